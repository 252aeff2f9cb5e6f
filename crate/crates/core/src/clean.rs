//! Removal of editor debris and non-informational layers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::svg::{local_part, serialize_svg, ElementNode, FloorplanDocument, Node};

/// Namespace URIs written by drawing tools that carry no map information.
const EDITOR_NAMESPACE_URIS: &[&str] = &[
    "http://sodipodi.sourceforge.net/DTD/sodipodi-0.dtd",
    "http://www.inkscape.org/namespaces/inkscape",
    "http://www.bohemiancoding.com/sketch/ns",
    "http://www.serif.com/",
    "http://www.figma.com/figma/ns",
    "http://ns.adobe.com/AdobeIllustrator/10.0/",
    "http://ns.adobe.com/AdobeSVGViewerExtensions/3.0/",
    "http://ns.adobe.com/Extensibility/1.0/",
    "http://ns.adobe.com/Flows/1.0/",
    "http://ns.adobe.com/GenericCustomNamespace/1.0/",
    "http://ns.adobe.com/Graphs/1.0/",
    "http://ns.adobe.com/ImageReplacement/1.0/",
    "http://ns.adobe.com/SaveForWeb/1.0/",
    "http://ns.adobe.com/Variables/1.0/",
    "http://ns.adobe.com/XPath/1.0/",
];

/// Prefixes treated as editor namespaces even when undeclared.
const EDITOR_PREFIXES: &[&str] = &["sodipodi", "inkscape", "sketch", "serif", "figma"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanConfig {
    pub strip_editor_namespaces: bool,
    pub strip_hidden: bool,
    pub strip_comments_metadata: bool,
    pub collapse_singleton_groups: bool,
    pub extra_strip_tags: Vec<String>,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig {
            strip_editor_namespaces: true,
            strip_hidden: true,
            strip_comments_metadata: true,
            collapse_singleton_groups: true,
            extra_strip_tags: Vec::new(),
        }
    }
}

impl CleanConfig {
    pub fn none() -> Self {
        CleanConfig {
            strip_editor_namespaces: false,
            strip_hidden: false,
            strip_comments_metadata: false,
            collapse_singleton_groups: false,
            extra_strip_tags: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    EditorNamespace,
    Hidden,
    Comment,
    Metadata,
    EmptyGroup,
    SingletonGroup,
    ExtraTag,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    /// Removed subtree roots, by reason.
    pub removed_elements: BTreeMap<RemovalReason, usize>,
    /// Removed attributes (including `xmlns:` declarations), by namespace prefix.
    pub removed_attributes: BTreeMap<String, usize>,
    pub bytes_before: usize,
    pub bytes_after: usize,
}

impl CleanReport {
    pub fn is_empty(&self) -> bool {
        self.removed_elements.is_empty() && self.removed_attributes.is_empty()
    }

    pub fn removed(&self, reason: RemovalReason) -> usize {
        self.removed_elements.get(&reason).copied().unwrap_or(0)
    }
}

/// True when the element's own presentation hides it.
pub fn is_hidden(el: &ElementNode) -> bool {
    if el.attr("display").is_some_and(|v| v.trim() == "none")
        || el.attr("visibility").is_some_and(|v| v.trim() == "hidden")
    {
        return true;
    }
    el.attr("style").is_some_and(|style| {
        style.split(';').any(|decl| {
            let Some((prop, value)) = decl.split_once(':') else {
                return false;
            };
            let value = value.trim().trim_end_matches("!important").trim();
            match prop.trim() {
                "display" => value == "none",
                "visibility" => value == "hidden",
                _ => false,
            }
        })
    })
}

/// Returns a cleaned copy of `doc` and a report of what was removed.
pub fn clean(doc: &FloorplanDocument, cfg: &CleanConfig) -> (FloorplanDocument, CleanReport) {
    let mut report = CleanReport {
        bytes_before: serialize_svg(doc).len(),
        ..Default::default()
    };
    let editor_prefixes = if cfg.strip_editor_namespaces {
        collect_editor_prefixes(doc.root())
    } else {
        BTreeSet::new()
    };
    let cleaner = Cleaner {
        cfg,
        editor_prefixes,
    };

    let (mut root, prolog) = doc.clone().into_parts();
    let prolog = prolog
        .into_iter()
        .filter(|n| match n {
            Node::Comment(_) if cfg.strip_comments_metadata => {
                *report
                    .removed_elements
                    .entry(RemovalReason::Comment)
                    .or_default() += 1;
                false
            }
            _ => true,
        })
        .collect();
    cleaner.strip_attributes(&mut root, &mut report);
    cleaner.clean_children(&mut root, &mut report);

    let out = FloorplanDocument::from_root(root, doc.source_name()).with_prolog(prolog);
    report.bytes_after = serialize_svg(&out).len();
    (out, report)
}

fn collect_editor_prefixes(root: &ElementNode) -> BTreeSet<String> {
    let mut prefixes: BTreeSet<String> = EDITOR_PREFIXES.iter().map(|p| p.to_string()).collect();
    for el in root.descendants() {
        for (name, value) in &el.attributes {
            if let Some(prefix) = name.strip_prefix("xmlns:") {
                if EDITOR_NAMESPACE_URIS.contains(&value.as_str()) {
                    prefixes.insert(prefix.to_string());
                }
            }
        }
    }
    prefixes
}

fn prefix_of(name: &str) -> Option<&str> {
    name.split_once(':').map(|(p, _)| p)
}

struct Cleaner<'a> {
    cfg: &'a CleanConfig,
    editor_prefixes: BTreeSet<String>,
}

impl Cleaner<'_> {
    fn removal_reason(&self, el: &ElementNode) -> Option<RemovalReason> {
        if self.cfg.strip_editor_namespaces
            && prefix_of(&el.tag).is_some_and(|p| self.editor_prefixes.contains(p))
        {
            return Some(RemovalReason::EditorNamespace);
        }
        if self.cfg.strip_comments_metadata && local_part(&el.tag) == "metadata" {
            return Some(RemovalReason::Metadata);
        }
        if self.cfg.strip_hidden && is_hidden(el) {
            return Some(RemovalReason::Hidden);
        }
        if self.cfg.extra_strip_tags.contains(&el.tag) {
            return Some(RemovalReason::ExtraTag);
        }
        None
    }

    fn strip_attributes(&self, el: &mut ElementNode, report: &mut CleanReport) {
        if self.editor_prefixes.is_empty() {
            return;
        }
        el.attributes.retain(|name, _| {
            let ns = match name.strip_prefix("xmlns:") {
                Some(declared) => declared,
                None => match prefix_of(name) {
                    Some(p) => p,
                    None => return true,
                },
            };
            if self.editor_prefixes.contains(ns) {
                *report.removed_attributes.entry(ns.to_string()).or_default() += 1;
                false
            } else {
                true
            }
        });
    }

    fn clean_children(&self, el: &mut ElementNode, report: &mut CleanReport) {
        let children = std::mem::take(&mut el.children);
        for child in children {
            match child {
                Node::Comment(_) if self.cfg.strip_comments_metadata => {
                    *report
                        .removed_elements
                        .entry(RemovalReason::Comment)
                        .or_default() += 1;
                }
                Node::Element(mut child) => {
                    if let Some(reason) = self.removal_reason(&child) {
                        *report.removed_elements.entry(reason).or_default() += 1;
                        continue;
                    }
                    self.strip_attributes(&mut child, report);
                    self.clean_children(&mut child, report);
                    if let Some(replacement) = self.collapse(child, report) {
                        el.children.push(replacement);
                    }
                }
                other => el.children.push(other),
            }
        }
    }

    /// Drops attribute-less empty groups and unwraps attribute-less singleton groups.
    fn collapse(&self, el: ElementNode, report: &mut CleanReport) -> Option<Node> {
        if !self.cfg.collapse_singleton_groups
            || local_part(&el.tag) != "g"
            || !el.attributes.is_empty()
        {
            return Some(Node::Element(el));
        }
        match el.children.as_slice() {
            [] => {
                *report
                    .removed_elements
                    .entry(RemovalReason::EmptyGroup)
                    .or_default() += 1;
                None
            }
            [Node::Element(_)] => {
                *report
                    .removed_elements
                    .entry(RemovalReason::SingletonGroup)
                    .or_default() += 1;
                el.children.into_iter().next()
            }
            _ => Some(Node::Element(el)),
        }
    }
}
