//! Disability layers, bit assignment and per-category layer actions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{BitAnd, BitOr};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metadata::Category;

const DEFAULT_RULES_JSON: &str = include_str!("../config/default_rules.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disability {
    LowVision,
    ColourImpairment,
    Dyslexia,
    MobilityImpairment,
}

impl Disability {
    pub const ALL: [Disability; 4] = [
        Disability::LowVision,
        Disability::ColourImpairment,
        Disability::Dyslexia,
        Disability::MobilityImpairment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Disability::LowVision => "low_vision",
            Disability::ColourImpairment => "colour_impairment",
            Disability::Dyslexia => "dyslexia",
            Disability::MobilityImpairment => "mobility_impairment",
        }
    }
}

impl fmt::Display for Disability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Highlight,
    Hide,
    Annotate,
}

/// Four-bit disability layer mask. Element side: layer membership.
/// Profile side: active layers.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct LayerMask(u8);

impl LayerMask {
    pub const EMPTY: LayerMask = LayerMask(0);
    pub const MAX: u8 = 0b1111;

    pub fn new(bits: u8) -> Option<LayerMask> {
        (bits <= Self::MAX).then_some(LayerMask(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: LayerMask) -> bool {
        self.0 & other.0 != 0
    }

    pub fn contains_bit(self, bit: u8) -> bool {
        self.0 & (1 << bit) != 0
    }

    pub fn is_subset_of(self, other: LayerMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// All sixteen masks in ascending order.
    pub fn all() -> impl Iterator<Item = LayerMask> {
        (0..=Self::MAX).map(LayerMask)
    }
}

impl BitOr for LayerMask {
    type Output = LayerMask;
    fn bitor(self, rhs: Self) -> Self {
        LayerMask(self.0 | rhs.0)
    }
}

impl BitAnd for LayerMask {
    type Output = LayerMask;
    fn bitand(self, rhs: Self) -> Self {
        LayerMask(self.0 & rhs.0)
    }
}

impl fmt::Display for LayerMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerMaskParseError {
    #[error("`{0}` is not a decimal integer")]
    NotInteger(String),
    #[error("layer bit field {0} is outside 0..=15")]
    OutOfRange(u64),
}

impl FromStr for LayerMask {
    type Err = LayerMaskParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|_| LayerMaskParseError::NotInteger(s.to_string()))?;
        u8::try_from(v)
            .ok()
            .and_then(LayerMask::new)
            .ok_or(LayerMaskParseError::OutOfRange(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub category: Category,
    pub disability: Disability,
    pub action: Action,
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("invalid rules JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no bit assigned to {0}")]
    MissingBit(Disability),
    #[error("bit index {index} for {disability} is outside 0..=3")]
    BitOutOfRange { disability: Disability, index: u8 },
    #[error("bit index {0} is assigned to more than one disability")]
    DuplicateBit(u8),
    #[error("more than one action for ({category}, {disability})")]
    ConflictingRule {
        category: Category,
        disability: Disability,
    },
    #[error("precedence must list each action exactly once")]
    BadPrecedence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRules", into = "RawRules")]
pub struct LayerRules {
    bits: BTreeMap<Disability, u8>,
    rules: Vec<Rule>,
    precedence: Vec<Action>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRules {
    bits: BTreeMap<Disability, u8>,
    rules: Vec<Rule>,
    #[serde(default = "default_precedence")]
    precedence: Vec<Action>,
}

fn default_precedence() -> Vec<Action> {
    vec![Action::Highlight, Action::Hide, Action::Annotate]
}

impl TryFrom<RawRules> for LayerRules {
    type Error = RulesError;
    fn try_from(raw: RawRules) -> Result<Self, Self::Error> {
        LayerRules::new(raw.bits, raw.rules, raw.precedence)
    }
}

impl From<LayerRules> for RawRules {
    fn from(r: LayerRules) -> Self {
        RawRules {
            bits: r.bits,
            rules: r.rules,
            precedence: r.precedence,
        }
    }
}

impl Default for LayerRules {
    /// The shipped rule set (`config/default_rules.json`).
    fn default() -> Self {
        LayerRules::from_json(DEFAULT_RULES_JSON).expect("bundled default rules are valid")
    }
}

impl LayerRules {
    pub fn new(
        bits: BTreeMap<Disability, u8>,
        rules: Vec<Rule>,
        precedence: Vec<Action>,
    ) -> Result<Self, RulesError> {
        let mut used = BTreeSet::new();
        for d in Disability::ALL {
            let index = *bits.get(&d).ok_or(RulesError::MissingBit(d))?;
            if index > 3 {
                return Err(RulesError::BitOutOfRange {
                    disability: d,
                    index,
                });
            }
            if !used.insert(index) {
                return Err(RulesError::DuplicateBit(index));
            }
        }
        let mut pairs = BTreeSet::new();
        for r in &rules {
            if !pairs.insert((r.category, r.disability)) {
                return Err(RulesError::ConflictingRule {
                    category: r.category,
                    disability: r.disability,
                });
            }
        }
        let distinct: BTreeSet<_> = precedence.iter().collect();
        if precedence.len() != 3 || distinct.len() != 3 {
            return Err(RulesError::BadPrecedence);
        }
        Ok(LayerRules {
            bits,
            rules,
            precedence,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, RulesError> {
        let raw: RawRules = serde_json::from_str(text)?;
        LayerRules::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rules serialize")
    }

    pub fn bit_index(&self, d: Disability) -> u8 {
        self.bits[&d]
    }

    pub fn bit(&self, d: Disability) -> LayerMask {
        LayerMask(1 << self.bit_index(d))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn precedence(&self) -> &[Action] {
        &self.precedence
    }

    pub fn with_precedence(mut self, precedence: Vec<Action>) -> Result<Self, RulesError> {
        self.precedence = precedence;
        LayerRules::new(self.bits, self.rules, self.precedence)
    }

    /// The action, if any, for a (category, disability) pair.
    pub fn action(&self, category: Category, d: Disability) -> Option<Action> {
        self.rules
            .iter()
            .find(|r| r.category == category && r.disability == d)
            .map(|r| r.action)
    }

    /// Categories with at least one rule.
    pub fn categories(&self) -> BTreeSet<Category> {
        self.rules.iter().map(|r| r.category).collect()
    }

    /// Earlier in the precedence list wins.
    pub fn rank(&self, a: Action) -> usize {
        self.precedence
            .iter()
            .position(|p| *p == a)
            .unwrap_or(usize::MAX)
    }
}

/// Layer membership of a category: one bit per disability with any rule for it.
pub fn assign_bitfield(category: Category, rules: &LayerRules) -> LayerMask {
    rules
        .rules
        .iter()
        .filter(|r| r.category == category)
        .fold(LayerMask::EMPTY, |m, r| m | rules.bit(r.disability))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bitfields() {
        let rules = LayerRules::default();
        // hand-computed from config/default_rules.json
        let expected = [
            (Category::Retail, 0),
            (Category::Toilet, 2),
            (Category::AccessibleToilet, 10),
            (Category::Elevator, 8),
            (Category::Stairs, 9),
            (Category::Ramp, 8),
            (Category::Entrance, 3),
            (Category::AccessibleEntrance, 10),
            (Category::Exit, 7),
            (Category::InformationDesk, 5),
            (Category::Corridor, 0),
            (Category::Parking, 0),
            (Category::Other, 0),
        ];
        for (cat, bits) in expected {
            assert_eq!(assign_bitfield(cat, &rules).bits(), bits, "{cat}");
        }
    }

    #[test]
    fn default_bit_table() {
        let rules = LayerRules::default();
        assert_eq!(rules.bit(Disability::LowVision).bits(), 1);
        assert_eq!(rules.bit(Disability::ColourImpairment).bits(), 2);
        assert_eq!(rules.bit(Disability::Dyslexia).bits(), 4);
        assert_eq!(rules.bit(Disability::MobilityImpairment).bits(), 8);
        assert_eq!(
            rules.precedence(),
            &[Action::Highlight, Action::Hide, Action::Annotate]
        );
    }

    #[test]
    fn json_round_trip() {
        let rules = LayerRules::default();
        assert_eq!(LayerRules::from_json(&rules.to_json()).unwrap(), rules);
    }

    #[test]
    fn rejects_invalid_configs() {
        let dup_bit = r#"{"bits":{"low_vision":0,"colour_impairment":0,"dyslexia":2,"mobility_impairment":3},"rules":[]}"#;
        assert!(LayerRules::from_json(dup_bit).is_err());
        let range = r#"{"bits":{"low_vision":4,"colour_impairment":1,"dyslexia":2,"mobility_impairment":3},"rules":[]}"#;
        assert!(LayerRules::from_json(range).is_err());
        let missing = r#"{"bits":{"low_vision":0},"rules":[]}"#;
        assert!(LayerRules::from_json(missing).is_err());
        let conflict = r#"{"bits":{"low_vision":0,"colour_impairment":1,"dyslexia":2,"mobility_impairment":3},
            "rules":[{"category":"stairs","disability":"low_vision","action":"hide"},
                     {"category":"stairs","disability":"low_vision","action":"highlight"}]}"#;
        assert!(matches!(
            LayerRules::from_json(conflict),
            Err(RulesError::ConflictingRule { .. })
        ));
        let prec = r#"{"bits":{"low_vision":0,"colour_impairment":1,"dyslexia":2,"mobility_impairment":3},"rules":[],"precedence":["hide","hide","annotate"]}"#;
        assert!(LayerRules::from_json(prec).is_err());
    }

    #[test]
    fn mask_parsing() {
        assert_eq!("9".parse::<LayerMask>().unwrap().bits(), 9);
        assert_eq!(
            "16".parse::<LayerMask>(),
            Err(LayerMaskParseError::OutOfRange(16))
        );
        assert!("x".parse::<LayerMask>().is_err());
        assert!("-1".parse::<LayerMask>().is_err());
    }
}
