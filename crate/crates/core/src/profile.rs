//! User disability profiles and per-element layer state.

use serde::{Deserialize, Serialize};

use crate::metadata::Category;
use crate::rules::{Action, Disability, LayerMask, LayerRules};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DisabilityProfile {
    pub low_vision: bool,
    pub colour_impairment: bool,
    pub dyslexia: bool,
    pub mobility_impairment: bool,
}

impl DisabilityProfile {
    pub fn has(&self, d: Disability) -> bool {
        match d {
            Disability::LowVision => self.low_vision,
            Disability::ColourImpairment => self.colour_impairment,
            Disability::Dyslexia => self.dyslexia,
            Disability::MobilityImpairment => self.mobility_impairment,
        }
    }

    pub fn set(&mut self, d: Disability, value: bool) {
        match d {
            Disability::LowVision => self.low_vision = value,
            Disability::ColourImpairment => self.colour_impairment = value,
            Disability::Dyslexia => self.dyslexia = value,
            Disability::MobilityImpairment => self.mobility_impairment = value,
        }
    }

    pub fn only(d: Disability) -> Self {
        let mut p = DisabilityProfile::default();
        p.set(d, true);
        p
    }

    /// The profile whose mask under `rules` is `mask`.
    pub fn from_mask(mask: LayerMask, rules: &LayerRules) -> Self {
        let mut p = DisabilityProfile::default();
        for d in Disability::ALL {
            p.set(d, mask.intersects(rules.bit(d)));
        }
        p
    }
}

/// OR of the bits of every declared disability.
pub fn profile_mask(p: &DisabilityProfile, rules: &LayerRules) -> LayerMask {
    Disability::ALL
        .into_iter()
        .filter(|d| p.has(*d))
        .fold(LayerMask::EMPTY, |m, d| m | rules.bit(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementState {
    pub visible: bool,
    pub highlighted: bool,
    /// Mirrors `data-layer-state`.
    pub active: bool,
    /// Disabilities whose annotate rule fired, in bit order.
    pub annotations: Vec<String>,
}

impl ElementState {
    pub const BASE: ElementState = ElementState {
        visible: true,
        highlighted: false,
        active: false,
        annotations: Vec::new(),
    };
}

/// Resolves the presentation of one element under an active profile mask.
///
/// Only layers present in both `membership` and `profile` contribute.
/// Between highlight and hide, whichever comes first in the rule
/// precedence wins; annotations accumulate independently.
pub fn element_state(
    membership: LayerMask,
    category: Category,
    profile: LayerMask,
    rules: &LayerRules,
) -> ElementState {
    let live = membership & profile;
    if live.is_empty() {
        return ElementState::BASE;
    }
    let mut disabilities: Vec<Disability> = Disability::ALL
        .into_iter()
        .filter(|d| live.intersects(rules.bit(*d)))
        .collect();
    disabilities.sort_by_key(|d| rules.bit_index(*d));

    let mut winner: Option<Action> = None;
    let mut annotations = Vec::new();
    for d in disabilities {
        match rules.action(category, d) {
            Some(Action::Annotate) => annotations.push(d.as_str().to_string()),
            Some(a) if winner.is_none_or(|w| rules.rank(a) < rules.rank(w)) => winner = Some(a),
            _ => {}
        }
    }
    ElementState {
        visible: winner != Some(Action::Hide),
        highlighted: winner == Some(Action::Highlight),
        active: true,
        annotations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::assign_bitfield;

    #[test]
    fn masks_from_default_bit_table() {
        let rules = LayerRules::default();
        assert_eq!(
            profile_mask(&DisabilityProfile::default(), &rules).bits(),
            0
        );
        assert_eq!(
            profile_mask(
                &DisabilityProfile::only(Disability::MobilityImpairment),
                &rules
            )
            .bits(),
            8
        );
        let p = DisabilityProfile {
            low_vision: true,
            dyslexia: true,
            ..Default::default()
        };
        assert_eq!(profile_mask(&p, &rules).bits(), 5);
    }

    #[test]
    fn from_mask_inverts_profile_mask() {
        let rules = LayerRules::default();
        for m in LayerMask::all() {
            assert_eq!(
                profile_mask(&DisabilityProfile::from_mask(m, &rules), &rules),
                m
            );
        }
    }

    #[test]
    fn stairs_hidden_for_mobility() {
        let rules = LayerRules::default();
        let s = element_state(
            LayerMask::new(9).unwrap(),
            Category::Stairs,
            LayerMask::new(8).unwrap(),
            &rules,
        );
        assert!(!s.visible && !s.highlighted && s.active);
    }

    #[test]
    fn stairs_highlight_beats_hide() {
        let rules = LayerRules::default();
        let s = element_state(
            LayerMask::new(9).unwrap(),
            Category::Stairs,
            LayerMask::new(9).unwrap(),
            &rules,
        );
        assert!(s.visible && s.highlighted && s.active);

        let hide_first = rules
            .clone()
            .with_precedence(vec![Action::Hide, Action::Highlight, Action::Annotate])
            .unwrap();
        let s = element_state(
            LayerMask::new(9).unwrap(),
            Category::Stairs,
            LayerMask::new(9).unwrap(),
            &hide_first,
        );
        assert!(!s.visible && !s.highlighted);
    }

    #[test]
    fn empty_profile_is_base() {
        let rules = LayerRules::default();
        for m in LayerMask::all() {
            assert_eq!(
                element_state(m, Category::Stairs, LayerMask::EMPTY, &rules),
                ElementState::BASE
            );
        }
    }

    #[test]
    fn annotations_collected() {
        let rules = LayerRules::default();
        let exit = assign_bitfield(Category::Exit, &rules);
        let s = element_state(
            exit,
            Category::Exit,
            LayerMask::new(0b1111).unwrap(),
            &rules,
        );
        assert!(s.highlighted);
        assert_eq!(s.annotations, vec!["colour_impairment", "dyslexia"]);
    }
}
