//! Injection of accessibility markup and layer bit fields.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::metadata::{MatchResult, MetadataRecord};
use crate::rules::{assign_bitfield, LayerRules};
use crate::svg::{ElementNode, FloorplanDocument, Node};

pub const ATTR_BIT_FIELD: &str = "data-layer-bit-field";
pub const ATTR_LAYER_STATE: &str = "data-layer-state";
pub const ATTR_CATEGORY: &str = "data-category";
pub const ATTR_TABINDEX: &str = "tabindex";
pub const ATTR_DESCRIBEDBY: &str = "aria-describedby";
pub const ATTR_ROLE: &str = "role";

pub const STATE_ACTIVE: &str = "active";
pub const STATE_INACTIVE: &str = "inactive";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdCollision {
    pub requested: String,
    pub assigned: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnrichReport {
    pub enriched: usize,
    pub id_collisions: Vec<IdCollision>,
    /// Matched ids no longer present in the document.
    pub missing_elements: Vec<String>,
}

/// True for elements carrying the layer bit field.
pub fn is_enriched(el: &ElementNode) -> bool {
    el.attributes.contains_key(ATTR_BIT_FIELD)
}

/// Text of the generated `desc` child.
pub fn description_text(record: &MetadataRecord) -> String {
    match &record.description {
        Some(d) => d.clone(),
        None => format!("{}, {}", record.name, record.category.label()),
    }
}

/// Adds title/desc children and the accessibility attribute contract to
/// every matched element. Nothing is removed; re-running with the same
/// inputs is a no-op.
pub fn enrich_document(
    doc: &FloorplanDocument,
    matches: &MatchResult,
    rules: &LayerRules,
) -> (FloorplanDocument, EnrichReport) {
    let mut out = doc.clone();
    let mut report = EnrichReport::default();
    let mut taken: BTreeSet<String> = doc.id_index().keys().cloned().collect();

    for m in &matches.matched {
        let Some(path) = out.id_index().get(&m.element_id).cloned() else {
            report.missing_elements.push(m.element_id.clone());
            continue;
        };
        let el = out.element_at_mut(&path).expect("indexed path resolves");
        enrich_element(el, &m.element_id, &m.record, rules, &mut taken, &mut report);
        report.enriched += 1;
        // inserted children shift the paths of descendants
        out.reindex();
    }
    (out, report)
}

fn enrich_element(
    el: &mut ElementNode,
    element_id: &str,
    record: &MetadataRecord,
    rules: &LayerRules,
    taken: &mut BTreeSet<String>,
    report: &mut EnrichReport,
) {
    let has_title = el.child_elements().any(|c| c.local_name() == "title");
    if !has_title {
        let title = ElementNode::new("title").with_text(record.name.clone());
        el.children.insert(0, Node::Element(title));
    }

    let existing_desc = el.attr(ATTR_DESCRIBEDBY).and_then(|target| {
        el.child_elements()
            .any(|c| c.local_name() == "desc" && c.id() == Some(target))
            .then(|| target.to_string())
    });
    let desc_id = match existing_desc {
        Some(id) => id,
        None => {
            let id = unique_id(&format!("{element_id}-desc"), taken, report);
            let desc = ElementNode::new("desc")
                .with_attr("id", id.clone())
                .with_text(description_text(record));
            let at = el
                .children
                .iter()
                .position(|c| c.as_element().is_some_and(|e| e.local_name() == "title"))
                .map_or(0, |p| p + 1);
            el.children.insert(at, Node::Element(desc));
            id
        }
    };

    el.set_attr(ATTR_DESCRIBEDBY, desc_id);
    el.set_attr(ATTR_ROLE, "img");
    el.set_attr(ATTR_TABINDEX, "0");
    el.set_attr(ATTR_CATEGORY, record.category.as_str());
    el.set_attr(
        ATTR_BIT_FIELD,
        assign_bitfield(record.category, rules).to_string(),
    );
    if !el.attributes.contains_key(ATTR_LAYER_STATE) {
        el.set_attr(ATTR_LAYER_STATE, STATE_INACTIVE);
    }
}

fn unique_id(base: &str, taken: &mut BTreeSet<String>, report: &mut EnrichReport) -> String {
    let mut candidate = base.to_string();
    let mut n = 2;
    while taken.contains(&candidate) {
        candidate = format!("{base}-{n}");
        n += 1;
    }
    if candidate != base {
        report.id_collisions.push(IdCollision {
            requested: base.to_string(),
            assigned: candidate.clone(),
        });
    }
    taken.insert(candidate.clone());
    candidate
}

/// Makes every enriched element focusable with `tabindex="0"` so that
/// sequential focus follows document order.
pub fn assign_tab_order(doc: &FloorplanDocument) -> FloorplanDocument {
    let mut out = doc.clone();
    out.modify(|root| {
        root.visit_mut(&mut |el| {
            if is_enriched(el) {
                el.set_attr(ATTR_TABINDEX, "0");
            }
        })
    });
    out
}

/// Ids of focusable elements in sequential navigation order: positive
/// `tabindex` values ascending, then `tabindex="0"` in document order.
pub fn focus_order(doc: &FloorplanDocument) -> Vec<String> {
    let mut positive = Vec::new();
    let mut zero = Vec::new();
    for (pos, el) in doc.root().descendants().enumerate() {
        let Some(index) = el
            .attr(ATTR_TABINDEX)
            .and_then(|v| v.trim().parse::<i64>().ok())
        else {
            continue;
        };
        let id = el.id().unwrap_or_default().to_string();
        match index {
            0 => zero.push(id),
            i if i > 0 => positive.push((i, pos, id)),
            _ => {}
        }
    }
    positive.sort();
    positive
        .into_iter()
        .map(|(_, _, id)| id)
        .chain(zero)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::{match_metadata, parse_metadata_csv};
    use crate::svg::{parse_svg, to_svg_string};

    const HEADER: &str = "element_id,name,category,department,description,tags\n";

    fn setup(svg: &str, csv: &str) -> (FloorplanDocument, MatchResult) {
        let doc = parse_svg(svg.as_bytes(), "t.svg").unwrap();
        let table = parse_metadata_csv(format!("{HEADER}{csv}").as_bytes()).unwrap();
        let m = match_metadata(&doc, &table);
        (doc, m)
    }

    #[test]
    fn accessible_toilet_gets_full_contract() {
        let (doc, m) = setup(
            r#"<svg><path id="T1" d="M0 0h10v10z"/></svg>"#,
            "T1,Accessible Toilet,accessible_toilet,,,\n",
        );
        let (out, report) = enrich_document(&doc, &m, &LayerRules::default());
        assert_eq!(report.enriched, 1);
        let el = out.find_element("T1").unwrap();
        assert_eq!(el.attr(ATTR_BIT_FIELD), Some("10"));
        assert_eq!(el.attr(ATTR_LAYER_STATE), Some("inactive"));
        assert_eq!(el.attr(ATTR_TABINDEX), Some("0"));
        assert_eq!(el.attr(ATTR_ROLE), Some("img"));
        assert_eq!(el.attr(ATTR_CATEGORY), Some("accessible_toilet"));
        assert_eq!(el.attr(ATTR_DESCRIBEDBY), Some("T1-desc"));
        assert_eq!(el.attr("d"), Some("M0 0h10v10z"));
        let kids: Vec<_> = el.child_elements().collect();
        assert_eq!(kids[0].tag, "title");
        assert_eq!(kids[0].text_content().as_deref(), Some("Accessible Toilet"));
        assert_eq!(kids[1].tag, "desc");
        assert_eq!(
            kids[1].text_content().as_deref(),
            Some("Accessible Toilet, accessible toilet")
        );
        assert!(out.find_element("T1-desc").is_some());
    }

    #[test]
    fn empty_match_changes_nothing() {
        let (doc, _) = setup(r#"<svg><rect id="a"/></svg>"#, "");
        let (out, report) = enrich_document(&doc, &MatchResult::default(), &LayerRules::default());
        assert_eq!(out, doc);
        assert_eq!(report.enriched, 0);
    }

    #[test]
    fn desc_id_collision_is_suffixed() {
        let (doc, m) = setup(
            r#"<svg><rect id="a"/><rect id="a-desc"/><rect id="a-desc-2"/></svg>"#,
            "a,Shop,retail,,Sells things,\n",
        );
        let (out, report) = enrich_document(&doc, &m, &LayerRules::default());
        assert_eq!(
            report.id_collisions,
            vec![IdCollision {
                requested: "a-desc".into(),
                assigned: "a-desc-3".into()
            }]
        );
        let el = out.find_element("a").unwrap();
        assert_eq!(el.attr(ATTR_DESCRIBEDBY), Some("a-desc-3"));
        assert_eq!(
            out.find_element("a-desc-3")
                .unwrap()
                .text_content()
                .as_deref(),
            Some("Sells things")
        );
    }

    #[test]
    fn nested_matches_both_enriched() {
        let (doc, m) = setup(
            r#"<svg><g id="outer"><rect id="inner"/></g></svg>"#,
            "outer,Wing,other,,,\ninner,Lift,elevator,,,\n",
        );
        let (out, report) = enrich_document(&doc, &m, &LayerRules::default());
        assert_eq!(report.enriched, 2);
        assert_eq!(
            out.find_element("inner").unwrap().attr(ATTR_BIT_FIELD),
            Some("8")
        );
        assert_eq!(
            out.find_element("outer").unwrap().attr(ATTR_BIT_FIELD),
            Some("0")
        );
    }

    #[test]
    fn enrichment_is_idempotent() {
        let (doc, m) = setup(
            r#"<svg><rect id="a"/><g id="b"><title>Existing</title><path id="c"/></g></svg>"#,
            "a,Shop,retail,,,\nb,Lift,elevator,,,\n",
        );
        let rules = LayerRules::default();
        let (once, _) = enrich_document(&doc, &m, &rules);
        let (twice, report) = enrich_document(&once, &m, &rules);
        assert_eq!(to_svg_string(&once), to_svg_string(&twice));
        assert!(report.id_collisions.is_empty());
        // an existing title is kept, not duplicated
        let b = once.find_element("b").unwrap();
        assert_eq!(b.child_elements().filter(|c| c.tag == "title").count(), 1);
    }

    #[test]
    fn tab_order_follows_document_order() {
        let (doc, m) = setup(
            r#"<svg><rect id="z"/><g><rect id="m"/></g><rect id="a" tabindex="5"/></svg>"#,
            "a,A,retail,,,\nz,Z,retail,,,\nm,M,retail,,,\n",
        );
        let (out, _) = enrich_document(&doc, &m, &LayerRules::default());
        let out = assign_tab_order(&out);
        assert_eq!(focus_order(&out), vec!["z", "m", "a"]);
    }

    #[test]
    fn tab_order_without_enriched_is_identity() {
        let (doc, _) = setup(r#"<svg><rect id="a"/></svg>"#, "");
        assert_eq!(assign_tab_order(&doc), doc);
        assert!(focus_order(&doc).is_empty());
    }

    #[test]
    fn focus_order_positive_first() {
        let doc = parse_svg(
            br#"<svg><rect id="a" tabindex="0"/><rect id="b" tabindex="2"/><rect id="c" tabindex="1"/><rect id="d" tabindex="-1"/></svg>"#,
            "t",
        )
        .unwrap();
        assert_eq!(focus_order(&doc), vec!["c", "b", "a"]);
    }
}
