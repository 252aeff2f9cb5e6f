//! Palette, half-fill gradients and monochrome pattern fills.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{delta_e, simulate_cvd, CvdKind, Rgb};
use crate::svg::ElementNode;

const PALETTE_JSON: &str = include_str!("../config/palette.json");
const FLOORS_JSON: &str = include_str!("../config/palette_floors.json");

pub const HALF_FILL_PREFIX: &str = "af-halffill-";
pub const PATTERN_PREFIX: &str = "af-pattern-";
const PATTERN_TILE: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    DiagonalStripes,
    Dots,
    Crosshatch,
    HorizontalLines,
    VerticalLines,
    ReverseDiagonalStripes,
    Grid,
    Checkerboard,
    Zigzag,
    Rings,
}

impl PatternKind {
    /// Catalogue order; the index is the `af-pattern-<n>` suffix.
    pub const CATALOGUE: [PatternKind; 10] = [
        PatternKind::DiagonalStripes,
        PatternKind::Dots,
        PatternKind::Crosshatch,
        PatternKind::HorizontalLines,
        PatternKind::VerticalLines,
        PatternKind::ReverseDiagonalStripes,
        PatternKind::Grid,
        PatternKind::Checkerboard,
        PatternKind::Zigzag,
        PatternKind::Rings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::DiagonalStripes => "diagonal-stripes",
            PatternKind::Dots => "dots",
            PatternKind::Crosshatch => "crosshatch",
            PatternKind::HorizontalLines => "horizontal-lines",
            PatternKind::VerticalLines => "vertical-lines",
            PatternKind::ReverseDiagonalStripes => "reverse-diagonal-stripes",
            PatternKind::Grid => "grid",
            PatternKind::Checkerboard => "checkerboard",
            PatternKind::Zigzag => "zigzag",
            PatternKind::Rings => "rings",
        }
    }

    fn marks(self) -> Vec<ElementNode> {
        let stroke = |d: &str| {
            ElementNode::new("path")
                .with_attr("d", d)
                .with_attr("fill", "none")
                .with_attr("stroke", "#000000")
                .with_attr("stroke-width", "1.5")
        };
        match self {
            PatternKind::DiagonalStripes => vec![stroke("M-2,2 L2,-2 M0,10 L10,0 M8,12 L12,8")],
            PatternKind::Dots => vec![ElementNode::new("circle")
                .with_attr("cx", "5")
                .with_attr("cy", "5")
                .with_attr("r", "2")
                .with_attr("fill", "#000000")],
            PatternKind::Crosshatch => vec![stroke("M0,0 L10,10 M10,0 L0,10")],
            PatternKind::HorizontalLines => vec![stroke("M0,5 H10")],
            PatternKind::VerticalLines => vec![stroke("M5,0 V10")],
            PatternKind::ReverseDiagonalStripes => {
                vec![stroke("M-2,8 L2,12 M0,0 L10,10 M8,-2 L12,2")]
            }
            PatternKind::Grid => vec![stroke("M0,5 H10 M5,0 V10")],
            PatternKind::Checkerboard => ["0", "5"]
                .iter()
                .map(|o| {
                    ElementNode::new("rect")
                        .with_attr("x", *o)
                        .with_attr("y", *o)
                        .with_attr("width", "5")
                        .with_attr("height", "5")
                        .with_attr("fill", "#000000")
                })
                .collect(),
            PatternKind::Zigzag => vec![stroke("M0,7 L2.5,3 L5,7 L7.5,3 L10,7")],
            PatternKind::Rings => vec![ElementNode::new("circle")
                .with_attr("cx", "5")
                .with_attr("cy", "5")
                .with_attr("r", "3")
                .with_attr("fill", "none")
                .with_attr("stroke", "#000000")
                .with_attr("stroke-width", "1.5")],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern index {index} out of range; valid indices are 0..={max}")]
pub struct PatternIndexError {
    pub index: usize,
    pub max: usize,
}

/// A paint server emitted into `<defs>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PaintDefinition {
    HalfFill {
        id: String,
        colour: Rgb,
    },
    Pattern {
        id: String,
        index: usize,
        kind: PatternKind,
    },
}

impl PaintDefinition {
    pub fn id(&self) -> &str {
        match self {
            PaintDefinition::HalfFill { id, .. } | PaintDefinition::Pattern { id, .. } => id,
        }
    }

    /// `url(#id)` form for fill properties.
    pub fn reference(&self) -> String {
        format!("url(#{})", self.id())
    }

    /// Gradient stops as (offset, colour); empty for patterns.
    pub fn stops(&self) -> Vec<(f64, Rgb)> {
        match self {
            PaintDefinition::HalfFill { colour, .. } => vec![
                (0.0, *colour),
                (0.5, *colour),
                (0.5, Rgb::WHITE),
                (1.0, Rgb::WHITE),
            ],
            PaintDefinition::Pattern { .. } => Vec::new(),
        }
    }

    pub fn to_element(&self) -> ElementNode {
        match self {
            PaintDefinition::HalfFill { id, .. } => {
                let mut grad = ElementNode::new("linearGradient")
                    .with_attr("id", id.clone())
                    .with_attr("x1", "0")
                    .with_attr("y1", "0")
                    .with_attr("x2", "1")
                    .with_attr("y2", "0");
                for (offset, colour) in self.stops() {
                    grad = grad.with_child(
                        ElementNode::new("stop")
                            .with_attr("offset", offset.to_string())
                            .with_attr("stop-color", colour.to_string()),
                    );
                }
                grad
            }
            PaintDefinition::Pattern { id, kind, .. } => {
                let tile = PATTERN_TILE.to_string();
                let mut pattern = ElementNode::new("pattern")
                    .with_attr("id", id.clone())
                    .with_attr("data-pattern-name", kind.name())
                    .with_attr("patternUnits", "userSpaceOnUse")
                    .with_attr("width", tile.clone())
                    .with_attr("height", tile.clone())
                    .with_child(
                        ElementNode::new("rect")
                            .with_attr("width", tile.clone())
                            .with_attr("height", tile)
                            .with_attr("fill", "#FFFFFF"),
                    );
                for mark in kind.marks() {
                    pattern = pattern.with_child(mark);
                }
                pattern
            }
        }
    }
}

/// Left half `c`, right half white, via a hard-stop gradient.
pub fn half_fill_paint(c: Rgb) -> PaintDefinition {
    PaintDefinition::HalfFill {
        id: format!("{HALF_FILL_PREFIX}{}", c.hex_lower()),
        colour: c,
    }
}

pub fn pattern_count() -> usize {
    PatternKind::CATALOGUE.len()
}

pub fn pattern_paint(index: usize) -> Result<PaintDefinition, PatternIndexError> {
    let kind = *PatternKind::CATALOGUE.get(index).ok_or(PatternIndexError {
        index,
        max: pattern_count() - 1,
    })?;
    Ok(PaintDefinition::Pattern {
        id: format!("{PATTERN_PREFIX}{index}"),
        index,
        kind,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "fill", content = "colour", rename_all = "snake_case")]
pub enum PaintOption {
    Full(Rgb),
    Half(Rgb),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Palette {
    pub name: String,
    pub base_colours: Vec<Rgb>,
    pub half_fill_variants: Vec<PaintDefinition>,
    pub patterns: Vec<PaintDefinition>,
}

#[derive(Deserialize)]
struct PaletteFile {
    #[serde(default)]
    name: String,
    base_colours: Vec<Rgb>,
}

#[derive(Debug, Error)]
pub enum PaletteError {
    #[error("invalid palette JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("palette has no colours")]
    Empty,
}

impl Palette {
    pub fn from_colours(name: impl Into<String>, base_colours: Vec<Rgb>) -> Self {
        let half_fill_variants = base_colours.iter().map(|c| half_fill_paint(*c)).collect();
        let patterns = (0..pattern_count())
            .map(|i| pattern_paint(i).expect("index within catalogue"))
            .collect();
        Palette {
            name: name.into(),
            base_colours,
            half_fill_variants,
            patterns,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, PaletteError> {
        let file: PaletteFile = serde_json::from_str(text)?;
        if file.base_colours.is_empty() {
            return Err(PaletteError::Empty);
        }
        Ok(Palette::from_colours(file.name, file.base_colours))
    }

    /// Full fills followed by half fills.
    pub fn paint_options(&self) -> Vec<PaintOption> {
        self.base_colours
            .iter()
            .map(|c| PaintOption::Full(*c))
            .chain(self.base_colours.iter().map(|c| PaintOption::Half(*c)))
            .collect()
    }
}

/// The IBM Design colour-blind safe palette (`config/palette.json`).
pub fn default_palette() -> Palette {
    static PALETTE: OnceLock<Palette> = OnceLock::new();
    PALETTE
        .get_or_init(|| Palette::from_json(PALETTE_JSON).expect("bundled palette is valid"))
        .clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaletteFloors {
    pub protanopia: f64,
    pub deuteranopia: f64,
    pub tritanopia: f64,
}

impl PaletteFloors {
    /// Minimum CIE76 pair distances committed in `config/palette_floors.json`.
    pub fn committed() -> Self {
        serde_json::from_str(FLOORS_JSON).expect("bundled floors are valid")
    }

    pub fn for_kind(&self, kind: CvdKind) -> f64 {
        match kind {
            CvdKind::Protanopia => self.protanopia,
            CvdKind::Deuteranopia => self.deuteranopia,
            CvdKind::Tritanopia => self.tritanopia,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDistance {
    pub a: Rgb,
    pub b: Rgb,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaletteReport {
    pub kind: CvdKind,
    pub simulated: Vec<Rgb>,
    /// `None` when the palette has fewer than two colours.
    pub min_pair: Option<PairDistance>,
    pub floor: f64,
    pub passes: bool,
}

/// Smallest pairwise CIELAB distance between simulated base colours.
pub fn min_pair_distance(colours: &[Rgb], kind: CvdKind) -> Option<PairDistance> {
    let simulated: Vec<Rgb> = colours.iter().map(|c| simulate_cvd(*c, kind)).collect();
    let mut best: Option<PairDistance> = None;
    for i in 0..colours.len() {
        for j in i + 1..colours.len() {
            let d = delta_e(simulated[i], simulated[j]);
            if best.as_ref().is_none_or(|b| d < b.distance) {
                best = Some(PairDistance {
                    a: colours[i],
                    b: colours[j],
                    distance: d,
                });
            }
        }
    }
    best
}

pub fn validate_palette(p: &Palette, kind: CvdKind) -> PaletteReport {
    validate_palette_with_floor(p, kind, PaletteFloors::committed().for_kind(kind))
}

pub fn validate_palette_with_floor(p: &Palette, kind: CvdKind, floor: f64) -> PaletteReport {
    let min_pair = min_pair_distance(&p.base_colours, kind);
    let passes = min_pair.as_ref().is_none_or(|m| m.distance >= floor);
    PaletteReport {
        kind,
        simulated: p
            .base_colours
            .iter()
            .map(|c| simulate_cvd(*c, kind))
            .collect(),
        min_pair,
        floor,
        passes,
    }
}
