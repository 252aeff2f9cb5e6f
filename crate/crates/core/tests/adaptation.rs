mod common;

use std::collections::BTreeSet;

use adaptive_floorplan::css::style_get;
use adaptive_floorplan::enrich::{is_enriched, ATTR_BIT_FIELD, ATTR_CATEGORY, ATTR_LAYER_STATE};
use adaptive_floorplan::paint::{HALF_FILL_PREFIX, PATTERN_PREFIX};
use adaptive_floorplan::pipeline::{run_enrich, EnrichInputs};
use adaptive_floorplan::validate::{paint_target, validate};
use adaptive_floorplan::view::{ViewWarning, ATTR_HIGHLIGHTED};
use adaptive_floorplan::{
    apply_view, Action, CleanConfig, Disability, DisabilityProfile, ElementState, FillMode,
    FloorplanDocument, LayerMask, LayerRules, StyleOptions,
};

fn sample_enriched() -> FloorplanDocument {
    let rules = LayerRules::default();
    run_enrich(&EnrichInputs {
        svg: &common::fixture("sample_plan.svg"),
        source_name: "sample_plan.svg",
        metadata: &common::fixture("sample_rooms.csv"),
        rules: &rules,
        clean: &CleanConfig::default(),
    })
    .unwrap()
    .0
}

/// Per-layer loop straight over the rule list.
fn brute_force(membership: u8, category: &str, profile: u8, rules: &LayerRules) -> ElementState {
    let mut actions: Vec<(Disability, Action)> = Vec::new();
    for bit in 0..4u8 {
        if membership & profile & (1 << bit) == 0 {
            continue;
        }
        let d = Disability::ALL
            .into_iter()
            .find(|d| rules.bit_index(*d) == bit)
            .unwrap();
        for r in rules.rules() {
            if r.category.as_str() == category && r.disability == d {
                actions.push((d, r.action));
            }
        }
    }
    let has = |a: Action| actions.iter().any(|(_, x)| *x == a);
    let mut winner = None;
    for a in rules.precedence() {
        if *a != Action::Annotate && has(*a) {
            winner = Some(*a);
            break;
        }
    }
    ElementState {
        visible: winner != Some(Action::Hide),
        highlighted: winner == Some(Action::Highlight),
        active: membership & profile != 0,
        annotations: actions
            .iter()
            .filter(|(_, a)| *a == Action::Annotate)
            .map(|(d, _)| d.as_str().to_string())
            .collect(),
    }
}

fn count_mismatches(doc: &FloorplanDocument, rules: &LayerRules) -> usize {
    let style = StyleOptions::default();
    let mut mismatches = 0;
    for mask in LayerMask::all() {
        let profile = DisabilityProfile::from_mask(mask, rules);
        let out = apply_view(doc, &profile, &style, rules).unwrap();
        for (id, state) in &out.states {
            let src = doc.find_element(id).unwrap();
            let membership: u8 = src.attr(ATTR_BIT_FIELD).unwrap().parse().unwrap();
            let expected = brute_force(
                membership,
                src.attr(ATTR_CATEGORY).unwrap(),
                mask.bits(),
                rules,
            );
            let el = out.document.find_element(id).unwrap();
            let rendered_ok = (style_get(el, "display").as_deref() == Some("none"))
                == !expected.visible
                && (el.attr(ATTR_HIGHLIGHTED) == Some("true")) == expected.highlighted
                && el.attr(ATTR_LAYER_STATE)
                    == Some(if expected.active {
                        "active"
                    } else {
                        "inactive"
                    });
            if *state != expected || !rendered_ok {
                mismatches += 1;
            }
        }
    }
    mismatches
}

#[test]
fn synthetic_plan_matches_brute_force_for_all_profiles() {
    let doc = common::fixture_doc("synthetic_50.svg");
    assert_eq!(doc.list_elements(is_enriched).len(), 50);
    assert_eq!(count_mismatches(&doc, &LayerRules::default()), 0);
    let hide_first = LayerRules::default()
        .with_precedence(vec![Action::Hide, Action::Highlight, Action::Annotate])
        .unwrap();
    assert_eq!(count_mismatches(&doc, &hide_first), 0);
}

#[test]
fn activation_is_monotone() {
    let doc = common::fixture_doc("synthetic_50.svg");
    let rules = LayerRules::default();
    let style = StyleOptions::default();
    let active: Vec<BTreeSet<String>> = LayerMask::all()
        .map(|m| {
            let out = apply_view(
                &doc,
                &DisabilityProfile::from_mask(m, &rules),
                &style,
                &rules,
            )
            .unwrap();
            out.states
                .into_iter()
                .filter(|(_, s)| s.active)
                .map(|(id, _)| id)
                .collect()
        })
        .collect();
    for p in LayerMask::all() {
        for q in LayerMask::all().filter(|q| p.is_subset_of(*q)) {
            assert!(
                active[p.bits() as usize].is_subset(&active[q.bits() as usize]),
                "{p} -> {q}"
            );
        }
    }
}

#[test]
fn base_layer_elements_are_neutral() {
    let doc = common::fixture_doc("synthetic_50.svg");
    let rules = LayerRules::default();
    for m in LayerMask::all() {
        let out = apply_view(
            &doc,
            &DisabilityProfile::from_mask(m, &rules),
            &StyleOptions::default(),
            &rules,
        )
        .unwrap();
        for (id, state) in &out.states {
            if doc.find_element(id).unwrap().attr(ATTR_BIT_FIELD) == Some("0") {
                assert_eq!(state, &ElementState::BASE);
            }
        }
    }
}

#[test]
fn mobility_hides_stairs_and_highlights_elevators() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    let profile = DisabilityProfile::only(Disability::MobilityImpairment);
    let out = apply_view(&doc, &profile, &StyleOptions::default(), &rules)
        .unwrap()
        .document;
    let by_cat = |c: &str| out.list_elements(|e| e.attr(ATTR_CATEGORY) == Some(c));
    let stairs = by_cat("stairs");
    let lifts = by_cat("elevator");
    assert_eq!((stairs.len(), lifts.len()), (2, 2));
    assert!(stairs
        .iter()
        .all(|e| style_get(e, "display").as_deref() == Some("none")));
    for e in lifts {
        assert_eq!(e.attr(ATTR_HIGHLIGHTED), Some("true"));
        assert_eq!(style_get(e, "stroke").as_deref(), Some("#000000"));
        assert_eq!(style_get(e, "stroke-width").as_deref(), Some("3"));
    }
}

#[test]
fn low_vision_highlight_beats_mobility_hide_on_stairs() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    let profile = DisabilityProfile {
        low_vision: true,
        mobility_impairment: true,
        ..Default::default()
    };
    let out = apply_view(&doc, &profile, &StyleOptions::default(), &rules).unwrap();
    let s1 = &out.states.iter().find(|(id, _)| id == "S1").unwrap().1;
    assert!(s1.visible && s1.highlighted);
}

#[test]
fn empty_profile_changes_no_state() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    let out = apply_view(
        &doc,
        &DisabilityProfile::default(),
        &StyleOptions::default(),
        &rules,
    )
    .unwrap();
    assert!(out.states.iter().all(|(_, s)| *s == ElementState::BASE));
    let d = &out.document;
    assert!(d
        .list_elements(|e| style_get(e, "display").is_some())
        .is_empty());
    assert!(d
        .list_elements(|e| e.attr(ATTR_HIGHLIGHTED).is_some())
        .is_empty());
    assert!(d
        .list_elements(|e| e.attr(ATTR_LAYER_STATE) == Some("active"))
        .is_empty());
}

#[test]
fn paint_references_resolve_in_every_mode() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    for mode in [FillMode::Full, FillMode::Half, FillMode::Pattern] {
        let style = StyleOptions::default().with_fill_mode(mode);
        for m in LayerMask::all() {
            let out = apply_view(
                &doc,
                &DisabilityProfile::from_mask(m, &rules),
                &style,
                &rules,
            )
            .unwrap();
            let d = &out.document;
            let mut used = BTreeSet::new();
            for el in d.list_elements(|_| true) {
                if let Some(target) = style_get(el, "fill").as_deref().and_then(paint_target) {
                    assert!(d.find_element(target).is_some(), "{mode:?}: {target}");
                    used.insert(target.to_string());
                }
            }
            for id in &used {
                assert_eq!(
                    d.list_elements(|e| e.id() == Some(id.as_str())).len(),
                    1,
                    "{id}"
                );
            }
            let prefix = match mode {
                FillMode::Pattern => PATTERN_PREFIX,
                _ => HALF_FILL_PREFIX,
            };
            assert!(used.iter().any(|id| id.starts_with(prefix)), "{mode:?}");
            assert!(
                validate(d).is_empty(),
                "{mode:?} mask {m}: {:?}",
                validate(d)
            );
        }
    }
}

#[test]
fn pattern_mode_gives_each_category_its_own_pattern() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    let style = StyleOptions::default().with_fill_mode(FillMode::Pattern);
    let out = apply_view(&doc, &DisabilityProfile::default(), &style, &rules)
        .unwrap()
        .document;
    let mut by_category = std::collections::BTreeMap::new();
    for el in out.list_elements(is_enriched) {
        let fill = style_get(el, "fill");
        let prev = by_category.insert(el.attr(ATTR_CATEGORY).unwrap().to_string(), fill.clone());
        assert!(
            prev.is_none() || prev == Some(fill),
            "one paint per category"
        );
    }
    let coloured: Vec<_> = by_category
        .iter()
        .filter(|(c, _)| style.is_coloured(c.parse().unwrap()))
        .collect();
    let distinct: BTreeSet<_> = coloured.iter().map(|(_, f)| (*f).clone()).collect();
    assert_eq!(distinct.len(), coloured.len());
    for text in out.list_elements(|e| e.tag == "text") {
        assert_eq!(style_get(text, "paint-order").as_deref(), Some("stroke"));
        assert_eq!(style_get(text, "stroke").as_deref(), Some("#FFFFFF"));
    }
}

#[test]
fn dyslexia_switches_font_unless_overridden() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    let profile = DisabilityProfile::only(Disability::Dyslexia);
    let out = apply_view(&doc, &profile, &StyleOptions::default(), &rules)
        .unwrap()
        .document;
    for t in out.list_elements(|e| e.tag == "text") {
        assert!(style_get(t, "font-family")
            .unwrap()
            .starts_with("OpenDyslexic"));
    }
    let style = StyleOptions::default().set_font("large_print").unwrap();
    let out = apply_view(&doc, &profile, &style, &rules).unwrap().document;
    for t in out.list_elements(|e| e.tag == "text") {
        assert!(!style_get(t, "font-family")
            .unwrap()
            .starts_with("OpenDyslexic"));
        let size = style_get(t, "font-size").unwrap();
        let scale: f64 = size.trim_end_matches("em").parse().unwrap();
        assert!(scale >= 1.5, "{size}");
    }
}

#[test]
fn large_print_scales_explicit_sizes() {
    let doc =
        adaptive_floorplan::parse_svg(br#"<svg><text id="t" font-size="12">Hi</text></svg>"#, "t")
            .unwrap();
    let style = StyleOptions::default().set_font("large_print").unwrap();
    let out = apply_view(
        &doc,
        &DisabilityProfile::default(),
        &style,
        &LayerRules::default(),
    )
    .unwrap()
    .document;
    assert_eq!(
        style_get(out.find_element("t").unwrap(), "font-size").as_deref(),
        Some("18")
    );
}

#[test]
fn unknown_category_falls_back_with_warning() {
    let doc = adaptive_floorplan::parse_svg(
        br#"<svg><rect id="a" data-category="spaceport" data-layer-bit-field="8"/></svg>"#,
        "t",
    )
    .unwrap();
    let rules = LayerRules::default();
    let out = apply_view(
        &doc,
        &DisabilityProfile::only(Disability::MobilityImpairment),
        &StyleOptions::default(),
        &rules,
    )
    .unwrap();
    assert!(matches!(
        out.warnings[..],
        [ViewWarning::UnknownCategory { .. }]
    ));
    let state = &out.states[0].1;
    assert!(state.active && state.visible && !state.highlighted);
}

#[test]
fn recolouring_accessible_entrance_updates_map_and_legend() {
    let doc = sample_enriched();
    let rules = LayerRules::default();
    let (style, warning) = StyleOptions::default()
        .set_category_color("accessible_entrance", adaptive_floorplan::Rgb::BLACK)
        .unwrap();
    assert!(warning.is_none());
    let out = apply_view(&doc, &DisabilityProfile::default(), &style, &rules)
        .unwrap()
        .document;
    assert_eq!(
        style_get(out.find_element("AE1").unwrap(), "fill").as_deref(),
        Some("#000000")
    );
    let present: BTreeSet<_> = [adaptive_floorplan::Category::AccessibleEntrance].into();
    assert_eq!(style.legend(&present)[0].fill, "#000000");
}
