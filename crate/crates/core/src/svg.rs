//! In-memory SVG tree with lossless parse/serialize and id lookup.
//!
//! Attributes live in a `BTreeMap`, so they are always emitted sorted by
//! name. Whitespace-only text between structural elements is dropped on
//! parse and re-created by the pretty printer; text inside text-content
//! elements (`text`, `tspan`, `title`, ...) is kept verbatim.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

/// Attributes whose values describe shape or placement. Non-geometry
/// transformations must leave these byte-identical.
pub const GEOMETRY_ATTRIBUTES: &[&str] = &[
    "d",
    "points",
    "x",
    "y",
    "width",
    "height",
    "cx",
    "cy",
    "r",
    "rx",
    "ry",
    "x1",
    "y1",
    "x2",
    "y2",
    "transform",
];

/// Elements whose text children are significant, including whitespace.
const TEXT_CONTENT_TAGS: &[&str] = &[
    "text", "tspan", "textPath", "title", "desc", "style", "script",
];

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}: input is not valid UTF-8")]
    NotUtf8(String),
    #[error("{source_name}: root element is <{tag}>, expected <svg>")]
    NotSvg { source_name: String, tag: String },
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseWarning {
    /// The id occurs `count` times; the last occurrence is indexed.
    DuplicateId { id: String, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(ElementNode),
    Text(String),
    Comment(String),
    ProcessingInstruction(String),
}

impl Node {
    pub fn as_element(&self) -> Option<&ElementNode> {
        match self {
            Node::Element(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_element_mut(&mut self) -> Option<&mut ElementNode> {
        match self {
            Node::Element(e) => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ElementNode {
    pub tag: String,
    pub attributes: BTreeMap<String, String>,
    pub children: Vec<Node>,
}

impl ElementNode {
    pub fn new(tag: impl Into<String>) -> Self {
        ElementNode {
            tag: tag.into(),
            ..Default::default()
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    pub fn with_child(mut self, child: ElementNode) -> Self {
        self.children.push(Node::Element(child));
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.children.push(Node::Text(text.into()));
        self
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes.get(name).map(String::as_str)
    }

    pub fn set_attr(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.attributes.insert(name.into(), value.into());
    }

    pub fn remove_attr(&mut self, name: &str) -> Option<String> {
        self.attributes.remove(name)
    }

    pub fn id(&self) -> Option<&str> {
        self.attr("id")
    }

    /// Tag name with any namespace prefix removed.
    pub fn local_name(&self) -> &str {
        local_part(&self.tag)
    }

    /// Concatenated direct text children, or `None` if there are none.
    pub fn text_content(&self) -> Option<String> {
        let mut out: Option<String> = None;
        for child in &self.children {
            if let Node::Text(t) = child {
                out.get_or_insert_with(String::new).push_str(t);
            }
        }
        out
    }

    pub fn child_elements(&self) -> impl DoubleEndedIterator<Item = &ElementNode> {
        self.children.iter().filter_map(Node::as_element)
    }

    pub fn child_elements_mut(&mut self) -> impl Iterator<Item = &mut ElementNode> {
        self.children.iter_mut().filter_map(Node::as_element_mut)
    }

    /// Pre-order walk over this element and all descendant elements.
    pub fn descendants(&self) -> Descendants<'_> {
        Descendants { stack: vec![self] }
    }

    /// Pre-order mutable walk. The callback sees each element before its children.
    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&mut ElementNode)) {
        f(self);
        for child in self.child_elements_mut() {
            child.visit_mut(f);
        }
    }
}

pub struct Descendants<'a> {
    stack: Vec<&'a ElementNode>,
}

impl<'a> Iterator for Descendants<'a> {
    type Item = &'a ElementNode;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.child_elements().rev());
        Some(node)
    }
}

pub(crate) fn local_part(name: &str) -> &str {
    name.rsplit_once(':').map_or(name, |(_, local)| local)
}

/// Child-index path from the root to an element (indices into `children`).
pub type NodePath = Vec<usize>;

#[derive(Debug, Clone)]
pub struct FloorplanDocument {
    root: ElementNode,
    prolog: Vec<Node>,
    id_index: BTreeMap<String, NodePath>,
    source_name: String,
    warnings: Vec<ParseWarning>,
}

impl PartialEq for FloorplanDocument {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.prolog == other.prolog
    }
}

impl FloorplanDocument {
    pub fn from_root(root: ElementNode, source_name: impl Into<String>) -> Self {
        let mut doc = FloorplanDocument {
            root,
            prolog: Vec::new(),
            id_index: BTreeMap::new(),
            source_name: source_name.into(),
            warnings: Vec::new(),
        };
        doc.reindex();
        doc
    }

    pub fn root(&self) -> &ElementNode {
        &self.root
    }

    /// Comments, processing instructions and doctype preceding the root.
    pub fn prolog(&self) -> &[Node] {
        &self.prolog
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn warnings(&self) -> &[ParseWarning] {
        &self.warnings
    }

    pub fn id_index(&self) -> &BTreeMap<String, NodePath> {
        &self.id_index
    }

    pub fn into_parts(self) -> (ElementNode, Vec<Node>) {
        (self.root, self.prolog)
    }

    pub fn with_prolog(mut self, prolog: Vec<Node>) -> Self {
        self.prolog = prolog;
        self
    }

    /// Mutate the tree; the id index is rebuilt afterwards.
    pub fn modify<R>(&mut self, f: impl FnOnce(&mut ElementNode) -> R) -> R {
        let out = f(&mut self.root);
        self.reindex();
        out
    }

    pub fn element_at(&self, path: &[usize]) -> Option<&ElementNode> {
        let mut node = &self.root;
        for &i in path {
            node = node.children.get(i)?.as_element()?;
        }
        Some(node)
    }

    pub fn element_at_mut(&mut self, path: &[usize]) -> Option<&mut ElementNode> {
        let mut node = &mut self.root;
        for &i in path {
            node = node.children.get_mut(i)?.as_element_mut()?;
        }
        Some(node)
    }

    pub fn find_element(&self, id: &str) -> Option<&ElementNode> {
        if id.is_empty() {
            return None;
        }
        self.id_index.get(id).and_then(|p| self.element_at(p))
    }

    /// All elements (root included) satisfying `pred`, in document order.
    pub fn list_elements<F>(&self, mut pred: F) -> Vec<&ElementNode>
    where
        F: FnMut(&ElementNode) -> bool,
    {
        self.root.descendants().filter(|e| pred(e)).collect()
    }

    /// Rebuilds the id index; recomputes duplicate-id warnings.
    pub fn reindex(&mut self) {
        let mut index = BTreeMap::new();
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut path = Vec::new();
        index_element(&self.root, &mut path, &mut index, &mut counts);
        self.id_index = index;
        self.warnings = counts
            .into_iter()
            .filter(|(_, n)| *n > 1)
            .map(|(id, count)| ParseWarning::DuplicateId { id, count })
            .collect();
    }
}

fn index_element(
    el: &ElementNode,
    path: &mut NodePath,
    index: &mut BTreeMap<String, NodePath>,
    counts: &mut BTreeMap<String, usize>,
) {
    if let Some(id) = el.id().filter(|id| !id.is_empty()) {
        *counts.entry(id.to_string()).or_default() += 1;
        index.insert(id.to_string(), path.clone());
    }
    for (i, child) in el.children.iter().enumerate() {
        if let Node::Element(c) = child {
            path.push(i);
            index_element(c, path, index, counts);
            path.pop();
        }
    }
}

/// Parses UTF-8 SVG bytes into a document.
pub fn parse_svg(bytes: &[u8], source_name: &str) -> Result<FloorplanDocument, SvgError> {
    let text = std::str::from_utf8(bytes).map_err(|_| SvgError::NotUtf8(source_name.into()))?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let malformed = |offset: u64, message: String| {
        let (line, column) = line_column(text, offset as usize);
        SvgError::Malformed {
            source_name: source_name.to_string(),
            line,
            column,
            message,
        }
    };

    let mut prolog = Vec::new();
    let mut stack: Vec<ElementNode> = Vec::new();
    let mut root: Option<ElementNode> = None;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| malformed(reader.error_position(), e.to_string()))?;
        let pos = reader.buffer_position();
        match event {
            Event::Start(start) => {
                if root.is_some() {
                    return Err(malformed(pos, "content after the root element".into()));
                }
                stack.push(start_element(&start).map_err(|m| malformed(pos, m))?);
            }
            Event::Empty(start) => {
                if root.is_some() {
                    return Err(malformed(pos, "content after the root element".into()));
                }
                let el = start_element(&start).map_err(|m| malformed(pos, m))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None => root = Some(el),
                }
            }
            Event::End(_) => {
                let el = stack
                    .pop()
                    .ok_or_else(|| malformed(pos, "unexpected closing tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Element(el)),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                let raw = t
                    .unescape()
                    .map_err(|e| malformed(pos, e.to_string()))?
                    .into_owned();
                push_text(&mut stack, raw, || {
                    malformed(pos, "text outside the root element".into())
                })?;
            }
            Event::CData(c) => {
                let raw = String::from_utf8_lossy(&c.into_inner()).into_owned();
                push_text(&mut stack, raw, || {
                    malformed(pos, "text outside the root element".into())
                })?;
            }
            Event::Comment(c) => {
                let body = String::from_utf8_lossy(&c.into_inner()).into_owned();
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Comment(body)),
                    None if root.is_none() => prolog.push(Node::Comment(body)),
                    None => {}
                }
            }
            Event::PI(pi) => {
                let body = String::from_utf8_lossy(&pi.into_inner()).into_owned();
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::ProcessingInstruction(body)),
                    None if root.is_none() => prolog.push(Node::ProcessingInstruction(body)),
                    None => {}
                }
            }
            // The XML declaration is regenerated on output; the doctype is
            // dropped because entity definitions are not supported.
            Event::Decl(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }

    if let Some(open) = stack.last() {
        return Err(malformed(
            text.len() as u64,
            format!("unexpected end of input: <{}> is not closed", open.tag),
        ));
    }
    let root = root.ok_or_else(|| malformed(0, "document has no root element".into()))?;
    if local_part(&root.tag) != "svg" {
        return Err(SvgError::NotSvg {
            source_name: source_name.into(),
            tag: root.tag,
        });
    }
    Ok(FloorplanDocument::from_root(root, source_name).with_prolog(prolog))
}

fn push_text(
    stack: &mut [ElementNode],
    raw: String,
    outside: impl FnOnce() -> SvgError,
) -> Result<(), SvgError> {
    let blank = raw.trim().is_empty();
    match stack.last_mut() {
        Some(parent) => {
            if (!blank || TEXT_CONTENT_TAGS.contains(&parent.local_name())) && !raw.is_empty() {
                parent.children.push(Node::Text(raw));
            }
            Ok(())
        }
        None if blank => Ok(()),
        None => Err(outside()),
    }
}

fn start_element(start: &BytesStart<'_>) -> Result<ElementNode, String> {
    let tag = String::from_utf8_lossy(start.name().as_ref()).into_owned();
    let mut el = ElementNode::new(tag);
    for attr in start.attributes().with_checks(true) {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|e| e.to_string())?
            .into_owned();
        el.attributes.insert(key, value);
    }
    Ok(el)
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = before
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |p| p + 1);
    let column = String::from_utf8_lossy(&before[line_start..])
        .chars()
        .count()
        + 1;
    (line, column)
}

/// Serializes with sorted attributes and two-space indentation.
pub fn serialize_svg(doc: &FloorplanDocument) -> Vec<u8> {
    to_svg_string(doc).into_bytes()
}

pub fn to_svg_string(doc: &FloorplanDocument) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    for node in &doc.prolog {
        write_node(&mut out, node, 0, true);
    }
    write_element(&mut out, &doc.root, 0, true);
    out
}

fn write_node(out: &mut String, node: &Node, depth: usize, pretty: bool) {
    match node {
        Node::Element(e) => write_element(out, e, depth, pretty),
        Node::Text(t) => out.push_str(&escape_text(t)),
        Node::Comment(c) => {
            indent(out, depth, pretty);
            let _ = write!(out, "<!--{c}-->");
            newline(out, pretty);
        }
        Node::ProcessingInstruction(p) => {
            indent(out, depth, pretty);
            let _ = write!(out, "<?{p}?>");
            newline(out, pretty);
        }
    }
}

fn write_element(out: &mut String, el: &ElementNode, depth: usize, pretty: bool) {
    indent(out, depth, pretty);
    out.push('<');
    out.push_str(&el.tag);
    for (k, v) in &el.attributes {
        let _ = write!(out, " {k}=\"{}\"", escape(v.as_str()));
    }
    if el.children.is_empty() {
        out.push_str("/>");
        newline(out, pretty);
        return;
    }
    out.push('>');
    let inline = !pretty
        || TEXT_CONTENT_TAGS.contains(&el.local_name())
        || el.children.iter().any(|c| matches!(c, Node::Text(_)));
    if !inline {
        out.push('\n');
    }
    for child in &el.children {
        write_node(out, child, depth + 1, !inline);
    }
    if !inline {
        indent(out, depth, true);
    }
    let _ = write!(out, "</{}>", el.tag);
    newline(out, pretty);
}

fn escape_text(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn indent(out: &mut String, depth: usize, pretty: bool) {
    if pretty {
        out.extend(std::iter::repeat_n("  ", depth));
    }
}

fn newline(out: &mut String, pretty: bool) {
    if pretty {
        out.push('\n');
    }
}
