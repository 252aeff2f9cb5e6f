//! Machine checks over an adaptive SVG.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::color::{contrast_ratio, Rgb, AA_TEXT_CONTRAST};
use crate::css::{effective_property, style_get};
use crate::enrich::{is_enriched, ATTR_BIT_FIELD, ATTR_CATEGORY, ATTR_DESCRIBEDBY};
use crate::metadata::Category;
use crate::paint::{pattern_count, PATTERN_PREFIX};
use crate::rules::{assign_bitfield, LayerMask, LayerRules};
use crate::svg::{ElementNode, FloorplanDocument, ParseWarning};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    TextContrast,
    AriaIntegrity,
    BitFieldRange,
    BitFieldMismatch,
    PaintReference,
    DuplicateId,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleId::TextContrast => "text-contrast",
            RuleId::AriaIntegrity => "aria-integrity",
            RuleId::BitFieldRange => "bit-field-range",
            RuleId::BitFieldMismatch => "bit-field-mismatch",
            RuleId::PaintReference => "paint-reference",
            RuleId::DuplicateId => "duplicate-id",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finding {
    pub rule: RuleId,
    pub severity: Severity,
    pub element_id: Option<String>,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<f64>,
}

impl Finding {
    fn new(rule: RuleId, severity: Severity, element_id: Option<&str>, message: String) -> Self {
        Finding {
            rule,
            severity,
            element_id: element_id.map(str::to_string),
            message,
            ratio: None,
        }
    }
}

/// Page background: the root's `background-color`/`background` style, else white.
pub fn document_background(doc: &FloorplanDocument) -> Rgb {
    let root = doc.root();
    style_get(root, "background-color")
        .or_else(|| style_get(root, "background"))
        .and_then(|v| v.parse().ok())
        .unwrap_or(Rgb::WHITE)
}

/// Structural and contrast checks that need no rule set.
pub fn validate(doc: &FloorplanDocument) -> Vec<Finding> {
    let mut findings = Vec::new();
    check_duplicate_ids(doc, &mut findings);
    check_aria(doc, &mut findings);
    check_bit_fields(doc, None, &mut findings);
    check_paint_references(doc, &mut findings);
    check_text_contrast(doc, &mut findings);
    findings
}

/// [`validate`] plus agreement of each bit field with its category under `rules`.
pub fn validate_with_rules(doc: &FloorplanDocument, rules: &LayerRules) -> Vec<Finding> {
    let mut findings = Vec::new();
    check_duplicate_ids(doc, &mut findings);
    check_aria(doc, &mut findings);
    check_bit_fields(doc, Some(rules), &mut findings);
    check_paint_references(doc, &mut findings);
    check_text_contrast(doc, &mut findings);
    findings
}

fn check_duplicate_ids(doc: &FloorplanDocument, findings: &mut Vec<Finding>) {
    for w in doc.warnings() {
        let ParseWarning::DuplicateId { id, count } = w;
        findings.push(Finding::new(
            RuleId::DuplicateId,
            Severity::Warning,
            Some(id),
            format!("id `{id}` occurs {count} times"),
        ));
    }
}

fn check_aria(doc: &FloorplanDocument, findings: &mut Vec<Finding>) {
    for el in doc.root().descendants() {
        let Some(refs) = el.attr(ATTR_DESCRIBEDBY) else {
            continue;
        };
        for target in refs.split_whitespace() {
            if doc.find_element(target).is_none() {
                findings.push(Finding::new(
                    RuleId::AriaIntegrity,
                    Severity::Error,
                    el.id(),
                    format!("aria-describedby references missing id `{target}`"),
                ));
            }
        }
    }
}

fn check_bit_fields(
    doc: &FloorplanDocument,
    rules: Option<&LayerRules>,
    findings: &mut Vec<Finding>,
) {
    for el in doc.root().descendants().filter(|e| is_enriched(e)) {
        let raw = el.attr(ATTR_BIT_FIELD).unwrap_or_default();
        let mask = match raw.parse::<LayerMask>() {
            Ok(m) => m,
            Err(e) => {
                findings.push(Finding::new(
                    RuleId::BitFieldRange,
                    Severity::Error,
                    el.id(),
                    e.to_string(),
                ));
                continue;
            }
        };
        let Some(rules) = rules else { continue };
        let Some(category) = el
            .attr(ATTR_CATEGORY)
            .and_then(|c| c.parse::<Category>().ok())
        else {
            continue;
        };
        let expected = assign_bitfield(category, rules);
        if mask != expected {
            findings.push(Finding::new(
                RuleId::BitFieldMismatch,
                Severity::Error,
                el.id(),
                format!("bit field {mask} does not match {expected} for category {category}"),
            ));
        }
    }
}

/// Target id of a `url(#id)` paint value.
pub fn paint_target(value: &str) -> Option<&str> {
    let inner = value.trim().strip_prefix("url(")?.split(')').next()?;
    inner
        .trim()
        .trim_matches(|c| c == '"' || c == '\'')
        .strip_prefix('#')
}

fn check_paint_references(doc: &FloorplanDocument, findings: &mut Vec<Finding>) {
    for el in doc.root().descendants() {
        let mut seen = BTreeSet::new();
        for prop in ["fill", "stroke"] {
            for value in [style_get(el, prop), el.attr(prop).map(str::to_string)]
                .into_iter()
                .flatten()
            {
                let Some(target) = paint_target(&value) else {
                    continue;
                };
                if !seen.insert(target.to_string()) || doc.find_element(target).is_some() {
                    continue;
                }
                let message = match target
                    .strip_prefix(PATTERN_PREFIX)
                    .and_then(|n| n.parse::<usize>().ok())
                {
                    Some(n) if n >= pattern_count() => format!(
                        "pattern {n} is not available; the catalogue has {} patterns",
                        pattern_count()
                    ),
                    _ => format!("{prop} references undefined paint `{target}`"),
                };
                findings.push(Finding::new(
                    RuleId::PaintReference,
                    Severity::Error,
                    el.id(),
                    message,
                ));
            }
        }
    }
}

fn check_text_contrast(doc: &FloorplanDocument, findings: &mut Vec<Finding>) {
    let background = document_background(doc);
    let mut ancestors: Vec<&ElementNode> = Vec::new();
    walk_text(doc.root(), &mut ancestors, background, findings);
}

fn walk_text<'a>(
    el: &'a ElementNode,
    ancestors: &mut Vec<&'a ElementNode>,
    background: Rgb,
    findings: &mut Vec<Finding>,
) {
    ancestors.push(el);
    if el.local_name() == "text" {
        // inherited fill; the SVG initial value is black
        let fill = ancestors
            .iter()
            .rev()
            .find_map(|a| effective_property(a, "fill"))
            .unwrap_or_else(|| "#000000".to_string());
        if let Ok(fg) = fill.parse::<Rgb>() {
            let ratio = contrast_ratio(fg, background);
            if ratio < AA_TEXT_CONTRAST {
                let mut f = Finding::new(
                    RuleId::TextContrast,
                    Severity::Error,
                    el.id(),
                    format!("text {fg} on {background} has contrast {ratio:.2}:1, below 4.5:1"),
                );
                f.ratio = Some(ratio);
                findings.push(f);
            }
        }
    }
    for child in el.child_elements() {
        walk_text(child, ancestors, background, findings);
    }
    ancestors.pop();
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::parse_svg;

    fn doc(s: &str) -> FloorplanDocument {
        parse_svg(s.as_bytes(), "t").unwrap()
    }

    #[test]
    fn conformant_is_empty() {
        let d = doc(r##"<svg><defs><pattern id="af-pattern-0"/></defs>
            <rect id="a" aria-describedby="a-desc" data-layer-bit-field="9" data-category="stairs" style="fill:url(#af-pattern-0)"><desc id="a-desc">x</desc></rect>
            <text id="t" fill="#000000">Label</text></svg>"##);
        assert!(validate_with_rules(&d, &LayerRules::default()).is_empty());
    }

    #[test]
    fn dangling_aria() {
        let d = doc(r#"<svg><rect id="a" aria-describedby="gone"/></svg>"#);
        let f = validate(&d);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule, RuleId::AriaIntegrity);
        assert_eq!(f[0].element_id.as_deref(), Some("a"));
    }

    #[test]
    fn gray_on_gray_text() {
        let d = doc(
            r##"<svg style="background-color:#888888"><g fill="#777777"><text id="t">x</text></g></svg>"##,
        );
        let f = validate(&d);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule, RuleId::TextContrast);
        let expected = contrast_ratio(Rgb::from_u32(0x888888), Rgb::from_u32(0x777777));
        assert_eq!(f[0].ratio, Some(expected));
    }

    #[test]
    fn bit_field_checks() {
        let d = doc(
            r#"<svg><rect id="a" data-layer-bit-field="16"/><rect id="b" data-layer-bit-field="8" data-category="stairs"/></svg>"#,
        );
        let f = validate(&d);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule, RuleId::BitFieldRange);
        let f = validate_with_rules(&d, &LayerRules::default());
        assert_eq!(f.len(), 2);
        assert_eq!(f[1].rule, RuleId::BitFieldMismatch);
    }

    #[test]
    fn paint_references() {
        let d = doc(
            r#"<svg><rect id="a" fill="url(#nowhere)"/><rect id="b" style="fill:url(#af-pattern-12)"/></svg>"#,
        );
        let f = validate(&d);
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|x| x.rule == RuleId::PaintReference));
        assert!(f[1].message.contains("not available"));
    }

    #[test]
    fn duplicate_ids_are_warnings() {
        let d = doc(r#"<svg><rect id="a"/><rect id="a"/></svg>"#);
        let f = validate(&d);
        assert_eq!(f[0].severity, Severity::Warning);
        assert!(!has_errors(&f));
    }

    #[test]
    fn paint_target_parsing() {
        assert_eq!(paint_target("url(#x)"), Some("x"));
        assert_eq!(paint_target("url('#x') red"), Some("x"));
        assert_eq!(paint_target("#fff"), None);
    }
}
