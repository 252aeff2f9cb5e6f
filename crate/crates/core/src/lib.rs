//! Adaptive SVG floorplans.
//!
//! The pipeline cleans an editor-exported SVG ([`clean`]), joins room
//! metadata from CSV ([`metadata`]), injects accessibility markup and
//! disability-layer bit fields ([`enrich`]), and renders the result for a
//! user's disability profile ([`view`]).

pub mod clean;
pub mod color;
pub mod css;
pub mod enrich;
pub mod metadata;
pub mod paint;
pub mod pipeline;
pub mod profile;
pub mod rules;
pub mod style;
pub mod svg;
pub mod validate;
pub mod view;

pub use clean::{clean, CleanConfig, CleanReport};
pub use color::{contrast_ratio, relative_luminance, simulate_cvd, CvdKind, Rgb};
pub use enrich::{assign_tab_order, enrich_document};
pub use metadata::{
    match_metadata, parse_metadata_csv, Category, MatchResult, MetadataRecord, MetadataTable,
};
pub use paint::{
    default_palette, half_fill_paint, pattern_paint, validate_palette, PaintDefinition, Palette,
};
pub use profile::{element_state, profile_mask, DisabilityProfile, ElementState};
pub use rules::{assign_bitfield, Action, Disability, LayerMask, LayerRules};
pub use style::{FillMode, Font, StyleOptions};
pub use svg::{parse_svg, serialize_svg, ElementNode, FloorplanDocument, Node};
pub use validate::{validate, Finding};
pub use view::{apply_view, simulate_document, ViewOutcome};
