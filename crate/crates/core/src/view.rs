//! Rendering an enriched document for a disability profile.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::color::{simulate_cvd, CvdKind, Rgb};
use crate::css::{style_get, style_map, style_set};
use crate::enrich::{
    is_enriched, ATTR_BIT_FIELD, ATTR_CATEGORY, ATTR_LAYER_STATE, STATE_ACTIVE, STATE_INACTIVE,
};
use crate::metadata::Category;
use crate::paint::{half_fill_paint, pattern_count, pattern_paint, PaintDefinition};
use crate::profile::{element_state, profile_mask, DisabilityProfile, ElementState};
use crate::rules::{LayerMask, LayerRules};
use crate::style::{CategoryPaint, FillMode, Font, StyleOptions, LARGE_PRINT_SCALE};
use crate::svg::{ElementNode, FloorplanDocument, Node};

pub const ATTR_HIGHLIGHTED: &str = "data-highlighted";
pub const ATTR_ANNOTATIONS: &str = "data-annotations";
pub const PAINT_DEFS_ID: &str = "af-paints";

/// Outline applied to highlighted elements, on top of a fully opaque fill.
pub const HIGHLIGHT_STROKE: &str = "#000000";
pub const HIGHLIGHT_STROKE_WIDTH: &str = "3";
const HALO_COLOUR: &str = "#FFFFFF";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViewWarning {
    UnknownCategory { element_id: String, value: String },
    InvalidBitField { element_id: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("pattern mode needs {needed} patterns but only {available} are defined")]
    NotEnoughPatterns { needed: usize, available: usize },
}

#[derive(Debug, Clone)]
pub struct ViewOutcome {
    pub document: FloorplanDocument,
    /// Enriched elements in document order.
    pub states: Vec<(String, ElementState)>,
    pub warnings: Vec<ViewWarning>,
}

/// Font a profile actually renders with.
pub fn effective_font(profile: &DisabilityProfile, style: &StyleOptions) -> Font {
    if profile.dyslexia && !style.font_overridden {
        Font::OpenDyslexic
    } else {
        style.font
    }
}

fn read_category(el: &ElementNode, id: &str, warnings: &mut Vec<ViewWarning>) -> Category {
    let raw = el.attr(ATTR_CATEGORY).unwrap_or_default();
    raw.parse().unwrap_or_else(|_| {
        warnings.push(ViewWarning::UnknownCategory {
            element_id: id.to_string(),
            value: raw.to_string(),
        });
        Category::Other
    })
}

fn read_membership(el: &ElementNode, id: &str, warnings: &mut Vec<ViewWarning>) -> LayerMask {
    let raw = el.attr(ATTR_BIT_FIELD).unwrap_or_default();
    raw.parse().unwrap_or_else(|_| {
        warnings.push(ViewWarning::InvalidBitField {
            element_id: id.to_string(),
            value: raw.to_string(),
        });
        LayerMask::EMPTY
    })
}

/// Applies layer states, paints and fonts for `profile` to an enriched
/// document.
pub fn apply_view(
    doc: &FloorplanDocument,
    profile: &DisabilityProfile,
    style: &StyleOptions,
    rules: &LayerRules,
) -> Result<ViewOutcome, ViewError> {
    let p_mask = profile_mask(profile, rules);

    let present: BTreeSet<Category> = doc
        .root()
        .descendants()
        .filter(|e| is_enriched(e))
        .filter_map(|e| e.attr(ATTR_CATEGORY)?.parse().ok())
        .collect();
    let patterns = if style.fill_mode == FillMode::Pattern {
        let assignment = style.pattern_assignment(&present);
        if assignment.len() > pattern_count() {
            return Err(ViewError::NotEnoughPatterns {
                needed: assignment.len(),
                available: pattern_count(),
            });
        }
        assignment
    } else {
        BTreeMap::new()
    };

    let font = effective_font(profile, style);
    let mut ctx = Pass {
        p_mask,
        style,
        rules,
        patterns: &patterns,
        font,
        states: Vec::new(),
        warnings: Vec::new(),
        paints: BTreeMap::new(),
    };
    let mut out = doc.clone();
    out.modify(|root| {
        root.visit_mut(&mut |el| ctx.visit(el));
        install_paints(root, ctx.paints.values());
    });

    Ok(ViewOutcome {
        document: out,
        states: ctx.states,
        warnings: ctx.warnings,
    })
}

struct Pass<'a> {
    p_mask: LayerMask,
    style: &'a StyleOptions,
    rules: &'a LayerRules,
    patterns: &'a BTreeMap<Category, usize>,
    font: Font,
    states: Vec<(String, ElementState)>,
    warnings: Vec<ViewWarning>,
    paints: BTreeMap<String, PaintDefinition>,
}

impl Pass<'_> {
    fn visit(&mut self, el: &mut ElementNode) {
        if el.local_name() == "text" {
            self.style_text(el);
        }
        if !is_enriched(el) {
            return;
        }
        let id = el.id().unwrap_or_default().to_string();
        let category = read_category(el, &id, &mut self.warnings);
        let membership = read_membership(el, &id, &mut self.warnings);
        let state = element_state(membership, category, self.p_mask, self.rules);

        el.set_attr(
            ATTR_LAYER_STATE,
            if state.active {
                STATE_ACTIVE
            } else {
                STATE_INACTIVE
            },
        );
        if let Some(fill) = self.fill_for(category) {
            style_set(el, "fill", &fill);
        }
        if !state.visible {
            style_set(el, "display", "none");
        }
        if state.highlighted {
            style_set(el, "stroke", HIGHLIGHT_STROKE);
            style_set(el, "stroke-width", HIGHLIGHT_STROKE_WIDTH);
            style_set(el, "fill-opacity", "1");
            el.set_attr(ATTR_HIGHLIGHTED, "true");
        }
        if !state.annotations.is_empty() {
            el.set_attr(ATTR_ANNOTATIONS, state.annotations.join(" "));
        }
        self.states.push((id, state));
    }

    fn fill_for(&mut self, category: Category) -> Option<String> {
        let paint = if self.style.fill_mode == FillMode::Pattern {
            CategoryPaint::Pattern(*self.patterns.get(&category)?)
        } else {
            self.style.colour_paint(category)?
        };
        Some(match paint {
            CategoryPaint::Solid(c) => c.to_string(),
            CategoryPaint::HalfFill(c) => self.use_paint(half_fill_paint(c)),
            CategoryPaint::Pattern(i) => {
                self.use_paint(pattern_paint(i).expect("assignment checked against catalogue"))
            }
        })
    }

    fn use_paint(&mut self, def: PaintDefinition) -> String {
        let reference = def.reference();
        self.paints.entry(def.id().to_string()).or_insert(def);
        reference
    }

    fn style_text(&self, el: &mut ElementNode) {
        style_set(el, "font-family", self.font.family());
        if self.font == Font::LargePrint {
            let scaled = current_font_size(el)
                .map(|(v, unit)| format!("{}{unit}", round3(v * LARGE_PRINT_SCALE)))
                .unwrap_or_else(|| format!("{LARGE_PRINT_SCALE}em"));
            style_set(el, "font-size", &scaled);
        }
        if self.style.fill_mode == FillMode::Pattern {
            style_set(el, "paint-order", "stroke");
            style_set(el, "stroke", HALO_COLOUR);
            style_set(el, "stroke-width", "3");
            style_set(el, "stroke-linejoin", "round");
        }
    }
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Numeric font size and its unit, from style or attribute.
pub fn current_font_size(el: &ElementNode) -> Option<(f64, String)> {
    let raw = style_get(el, "font-size").or_else(|| el.attr("font-size").map(str::to_string))?;
    let raw = raw.trim();
    let split = raw
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+'))
        .unwrap_or(raw.len());
    let value: f64 = raw[..split].parse().ok()?;
    Some((value, raw[split..].to_string()))
}

/// Adds the used paints to a `<defs id="af-paints">` at the top of the root,
/// skipping ids that are already defined there.
fn install_paints<'a>(root: &mut ElementNode, paints: impl Iterator<Item = &'a PaintDefinition>) {
    let paints: Vec<&PaintDefinition> = paints.collect();
    if paints.is_empty() {
        return;
    }
    let pos = root.children.iter().position(|c| {
        c.as_element()
            .is_some_and(|e| e.id() == Some(PAINT_DEFS_ID))
    });
    let pos = match pos {
        Some(p) => p,
        None => {
            let defs = ElementNode::new("defs").with_attr("id", PAINT_DEFS_ID);
            root.children.insert(0, Node::Element(defs));
            0
        }
    };
    let defs = root.children[pos].as_element_mut().expect("defs element");
    for def in paints {
        if !defs.child_elements().any(|c| c.id() == Some(def.id())) {
            defs.children.push(Node::Element(def.to_element()));
        }
    }
}

const COLOUR_PROPERTIES: &[&str] = &[
    "fill",
    "stroke",
    "stop-color",
    "flood-color",
    "lighting-color",
    "color",
];

/// Replaces every literal colour in paint attributes and style declarations
/// with its dichromat simulation. Paint references and keywords are kept.
pub fn simulate_document(doc: &FloorplanDocument, kind: CvdKind) -> FloorplanDocument {
    let convert = |value: &str| -> Option<String> {
        let rgb: Rgb = value.parse().ok()?;
        Some(simulate_cvd(rgb, kind).to_string())
    };
    let mut out = doc.clone();
    out.modify(|root| {
        root.visit_mut(&mut |el| {
            for prop in COLOUR_PROPERTIES {
                if let Some(v) = el.attr(prop).and_then(convert) {
                    el.set_attr(*prop, v);
                }
            }
            if el.attributes.contains_key("style") {
                style_map(el, |k, v| {
                    COLOUR_PROPERTIES.contains(&k).then(|| convert(v)).flatten()
                });
            }
        })
    });
    out
}
