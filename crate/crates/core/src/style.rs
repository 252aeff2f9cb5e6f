//! Run-time style options: category colours, fill mode, font.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{contrast_ratio, Rgb};
use crate::metadata::Category;
use crate::paint::{default_palette, half_fill_paint, Palette};

/// Minimum contrast of a category colour against the background before a
/// warning is attached (non-text graphics).
pub const GRAPHIC_CONTRAST_FLOOR: f64 = 3.0;

/// (category, palette slot, drawn as half fill)
const DEFAULT_ASSIGNMENT: [(Category, usize, bool); 10] = [
    (Category::AccessibleEntrance, 0, false),
    (Category::Elevator, 1, false),
    (Category::AccessibleToilet, 2, false),
    (Category::Stairs, 3, false),
    (Category::InformationDesk, 4, false),
    (Category::Entrance, 0, true),
    (Category::Ramp, 1, true),
    (Category::Toilet, 2, true),
    (Category::Exit, 3, true),
    (Category::Retail, 4, true),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMode {
    /// Solid colours, with half fills for the categories in `half_filled`.
    #[default]
    Full,
    /// Every coloured category drawn as a half fill.
    Half,
    /// Monochrome patterns instead of colour.
    Pattern,
}

impl FromStr for FillMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(FillMode::Full),
            "half" => Ok(FillMode::Half),
            "pattern" => Ok(FillMode::Pattern),
            _ => Err(format!(
                "unknown fill mode `{s}` (expected full, half or pattern)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Font {
    #[default]
    Default,
    LargePrint,
    OpenDyslexic,
}

/// Font size multiplier for [`Font::LargePrint`].
pub const LARGE_PRINT_SCALE: f64 = 1.5;

impl Font {
    pub const ALL: [Font; 3] = [Font::Default, Font::LargePrint, Font::OpenDyslexic];

    pub fn as_str(self) -> &'static str {
        match self {
            Font::Default => "default",
            Font::LargePrint => "large_print",
            Font::OpenDyslexic => "open_dyslexic",
        }
    }

    pub fn family(self) -> &'static str {
        match self {
            Font::Default | Font::LargePrint => "Arial, Helvetica, sans-serif",
            Font::OpenDyslexic => "OpenDyslexic, 'Comic Sans MS', sans-serif",
        }
    }
}

impl fmt::Display for Font {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StyleError {
    #[error("unknown font `{0}` (expected one of: default, large_print, open_dyslexic)")]
    UnknownFont(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
}

impl FromStr for Font {
    type Err = StyleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "default" => Ok(Font::Default),
            "largeprint" => Ok(Font::LargePrint),
            "opendyslexic" => Ok(Font::OpenDyslexic),
            _ => Err(StyleError::UnknownFont(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrastWarning {
    pub category: Category,
    pub colour: Rgb,
    pub background: Rgb,
    pub ratio: f64,
}

impl fmt::Display for ContrastWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} colour {} has contrast {:.2}:1 with background {}",
            self.category, self.colour, self.ratio, self.background
        )
    }
}

/// How a category is painted in the current fill mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CategoryPaint {
    Solid(Rgb),
    HalfFill(Rgb),
    Pattern(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendEntry {
    pub category: Category,
    pub label: String,
    pub paint: CategoryPaint,
    /// Value usable in a `fill` property.
    pub fill: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleOptions {
    pub category_colours: BTreeMap<Category, Rgb>,
    pub half_filled: BTreeSet<Category>,
    pub fill_mode: FillMode,
    pub font: Font,
    /// Set once the user picks a font explicitly.
    pub font_overridden: bool,
    /// Categories whose colour was changed at run time.
    pub overridden: BTreeSet<Category>,
    pub background: Rgb,
    pub text_colour: Rgb,
}

impl Default for StyleOptions {
    fn default() -> Self {
        StyleOptions::from_palette(&default_palette())
    }
}

impl StyleOptions {
    /// Assigns the ten coloured categories to the palette's full and
    /// half-fill variants. Palettes with fewer than five colours wrap.
    pub fn from_palette(palette: &Palette) -> Self {
        let mut category_colours = BTreeMap::new();
        let mut half_filled = BTreeSet::new();
        if !palette.base_colours.is_empty() {
            for (category, slot, half) in DEFAULT_ASSIGNMENT {
                let colour = palette.base_colours[slot % palette.base_colours.len()];
                category_colours.insert(category, colour);
                if half {
                    half_filled.insert(category);
                }
            }
        }
        StyleOptions {
            category_colours,
            half_filled,
            fill_mode: FillMode::Full,
            font: Font::Default,
            font_overridden: false,
            overridden: BTreeSet::new(),
            background: Rgb::WHITE,
            text_colour: Rgb::BLACK,
        }
    }

    pub fn is_coloured(&self, c: Category) -> bool {
        self.category_colours.contains_key(&c)
    }

    /// Overrides a category colour. A warning is returned when the colour
    /// has less than 3:1 contrast with the background.
    pub fn set_category_color(
        &self,
        category: &str,
        colour: Rgb,
    ) -> Result<(StyleOptions, Option<ContrastWarning>), StyleError> {
        let category = Category::normalize(category)
            .ok_or_else(|| StyleError::UnknownCategory(category.to_string()))?;
        let mut next = self.clone();
        next.category_colours.insert(category, colour);
        next.overridden.insert(category);
        let ratio = contrast_ratio(colour, self.background);
        let warning = (ratio < GRAPHIC_CONTRAST_FLOOR).then_some(ContrastWarning {
            category,
            colour,
            background: self.background,
            ratio,
        });
        Ok((next, warning))
    }

    pub fn set_font(&self, font: &str) -> Result<StyleOptions, StyleError> {
        let font: Font = font.parse()?;
        Ok(StyleOptions {
            font,
            font_overridden: true,
            ..self.clone()
        })
    }

    pub fn with_fill_mode(&self, fill_mode: FillMode) -> StyleOptions {
        StyleOptions {
            fill_mode,
            ..self.clone()
        }
    }

    /// Paint for a category outside pattern mode; `None` if uncoloured.
    pub fn colour_paint(&self, c: Category) -> Option<CategoryPaint> {
        let colour = *self.category_colours.get(&c)?;
        let half = match self.fill_mode {
            FillMode::Half => true,
            FillMode::Full | FillMode::Pattern => self.half_filled.contains(&c),
        };
        Some(if half {
            CategoryPaint::HalfFill(colour)
        } else {
            CategoryPaint::Solid(colour)
        })
    }

    /// Pattern indices for the coloured categories among `present`, in
    /// category order.
    pub fn pattern_assignment(&self, present: &BTreeSet<Category>) -> BTreeMap<Category, usize> {
        present
            .iter()
            .filter(|c| self.is_coloured(**c))
            .enumerate()
            .map(|(i, c)| (*c, i))
            .collect()
    }

    /// Legend rows for the coloured categories among `present`.
    pub fn legend(&self, present: &BTreeSet<Category>) -> Vec<LegendEntry> {
        let patterns = self.pattern_assignment(present);
        present
            .iter()
            .filter_map(|c| {
                let paint = if self.fill_mode == FillMode::Pattern {
                    CategoryPaint::Pattern(*patterns.get(c)?)
                } else {
                    self.colour_paint(*c)?
                };
                let fill = match &paint {
                    CategoryPaint::Solid(rgb) => rgb.to_string(),
                    CategoryPaint::HalfFill(rgb) => half_fill_paint(*rgb).reference(),
                    CategoryPaint::Pattern(i) => {
                        format!("url(#{}{i})", crate::paint::PATTERN_PREFIX)
                    }
                };
                Some(LegendEntry {
                    category: *c,
                    label: c.label(),
                    paint,
                    fill,
                })
            })
            .collect()
    }

    /// Every (foreground, background) pair default text may be drawn on:
    /// the page background and each half of every category paint.
    pub fn text_background_pairs(&self) -> Vec<(Rgb, Rgb)> {
        let mut backgrounds = vec![self.background];
        for (c, colour) in &self.category_colours {
            backgrounds.push(*colour);
            if self.half_filled.contains(c) || self.fill_mode == FillMode::Half {
                backgrounds.push(Rgb::WHITE);
            }
        }
        backgrounds.sort();
        backgrounds.dedup();
        backgrounds
            .into_iter()
            .map(|b| (self.text_colour, b))
            .collect()
    }
}
