mod common;

use adaptive_floorplan::clean::{is_hidden, RemovalReason};
use adaptive_floorplan::svg::{to_svg_string, GEOMETRY_ATTRIBUTES};
use adaptive_floorplan::{clean, CleanConfig, ElementNode};

fn all_configs() -> Vec<CleanConfig> {
    (0..16u8)
        .map(|m| CleanConfig {
            strip_editor_namespaces: m & 1 != 0,
            strip_hidden: m & 2 != 0,
            strip_comments_metadata: m & 4 != 0,
            collapse_singleton_groups: m & 8 != 0,
            extra_strip_tags: Vec::new(),
        })
        .collect()
}

fn flags(c: &CleanConfig) -> [bool; 4] {
    [
        c.strip_editor_namespaces,
        c.strip_hidden,
        c.strip_comments_metadata,
        c.collapse_singleton_groups,
    ]
}

/// (tag, attribute, value) for geometry on rendered, non-editor elements.
fn geometry_multiset(root: &ElementNode) -> Vec<(String, String, String)> {
    fn walk(el: &ElementNode, out: &mut Vec<(String, String, String)>) {
        if is_hidden(el) || el.tag.contains(':') || el.tag == "metadata" {
            return;
        }
        for attr in GEOMETRY_ATTRIBUTES {
            if let Some(v) = el.attr(attr) {
                out.push((el.tag.clone(), attr.to_string(), v.to_string()));
            }
        }
        for c in el.child_elements() {
            walk(c, out);
        }
    }
    let mut out = Vec::new();
    walk(root, &mut out);
    out.sort();
    out
}

#[test]
fn clean_is_idempotent_on_corpus() {
    for (name, doc) in common::svg_corpus() {
        for cfg in all_configs() {
            let (once, _) = clean(&doc, &cfg);
            let (twice, report) = clean(&once, &cfg);
            assert_eq!(
                to_svg_string(&once),
                to_svg_string(&twice),
                "{name} {:?}",
                flags(&cfg)
            );
            assert!(
                report.removed_elements.values().all(|n| *n == 0),
                "{name}: {report:?}"
            );
        }
    }
}

#[test]
fn clean_preserves_geometry_on_corpus() {
    for (name, doc) in common::svg_corpus() {
        let before = geometry_multiset(doc.root());
        let (cleaned, _) = clean(&doc, &CleanConfig::default());
        assert_eq!(geometry_multiset(cleaned.root()), before, "{name}");
    }
}

#[test]
fn more_flags_never_add_elements() {
    let configs = all_configs();
    for (name, doc) in common::svg_corpus() {
        let counts: Vec<usize> = configs
            .iter()
            .map(|c| clean(&doc, c).0.list_elements(|_| true).len())
            .collect();
        for (i, a) in configs.iter().enumerate() {
            for (j, b) in configs.iter().enumerate() {
                let subset = flags(a).iter().zip(flags(b)).all(|(x, y)| !x || y);
                if subset {
                    assert!(
                        counts[j] <= counts[i],
                        "{name}: {:?} -> {:?}",
                        flags(a),
                        flags(b)
                    );
                }
            }
        }
    }
}

#[test]
fn editor_export_has_twelve_hidden_guides() {
    let doc = common::fixture_doc("editor_export.svg");
    // hand count: four display="none" lines, four style display:none lines,
    // four visibility="hidden" rects
    let manual = doc
        .list_elements(|e| e.id().is_some_and(|id| id.starts_with("guide-")))
        .len();
    assert_eq!(manual, 12);
    let (cleaned, report) = clean(&doc, &CleanConfig::default());
    assert_eq!(report.removed(RemovalReason::Hidden), 12);
    assert!(cleaned.list_elements(|e| e.tag.contains(':')).is_empty());
    assert!(cleaned
        .list_elements(|e| e.attributes.keys().any(|k| k.starts_with("inkscape:")))
        .is_empty());
    assert!(report.bytes_after < report.bytes_before);
}

#[test]
fn keep_hidden_keeps_guides() {
    let doc = common::fixture_doc("editor_export.svg");
    let cfg = CleanConfig {
        strip_hidden: false,
        ..CleanConfig::default()
    };
    let (cleaned, report) = clean(&doc, &cfg);
    assert_eq!(report.removed(RemovalReason::Hidden), 0);
    assert_eq!(
        cleaned
            .list_elements(|e| e.id().is_some_and(|id| id.starts_with("guide-")))
            .len(),
        12
    );
}

#[test]
fn already_clean_fixture_is_untouched() {
    let bytes = common::fixture("already_clean.svg");
    let doc = common::fixture_doc("already_clean.svg");
    let (cleaned, report) = clean(&doc, &CleanConfig::default());
    assert!(report.is_empty());
    assert_eq!(adaptive_floorplan::serialize_svg(&cleaned), bytes);
}
