use std::fmt;

use super::{LabelAlgebra, LabelError, ModalityKind, World};

/// Weights below this are treated as the empty world set.
pub const EMPTY_WEIGHT: f64 = 1e-12;

/// Slack allowed when a collection of weights must sum to (at most) one.
pub const TOTAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(weight: f64) -> Result<Self, LabelError> {
        if weight.is_nan() || !(0.0..=1.0 + TOTAL_TOLERANCE).contains(&weight) {
            return Err(LabelError::InvalidProbability(weight));
        }
        Ok(Probability(weight.min(1.0)))
    }

    pub fn weight(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9}", self.0)
    }
}

/// Probability weights under an independence assumption: intersection is
/// multiplication and union of disjoint sets is addition.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProbabilityAlgebra;

impl ProbabilityAlgebra {
    pub fn sum(labels: &[Probability]) -> f64 {
        labels.iter().map(|p| p.0).sum()
    }
}

impl LabelAlgebra for ProbabilityAlgebra {
    type Label = Probability;

    fn kind(&self) -> ModalityKind {
        ModalityKind::Probability
    }

    fn top(&self) -> Probability {
        Probability(1.0)
    }

    fn meet(&self, a: &Probability, b: &Probability) -> Probability {
        Probability(a.0 * b.0)
    }

    fn join(&self, a: &Probability, b: &Probability) -> Result<Probability, LabelError> {
        let sum = a.0 + b.0;
        if sum > 1.0 + TOTAL_TOLERANCE {
            return Err(LabelError::ProbabilityOverflow(sum));
        }
        Ok(Probability(sum.min(1.0)))
    }

    fn hull(&self, a: &Probability, b: &Probability) -> Probability {
        Probability((a.0 + b.0).min(1.0))
    }

    fn is_empty(&self, l: &Probability) -> bool {
        l.0 < EMPTY_WEIGHT
    }

    /// The sum bound is necessary for disjointness but does not establish it:
    /// weights do not say which worlds they cover.
    fn overlap(&self, labels: &[Probability]) -> Option<String> {
        let sum = Self::sum(labels);
        (sum > 1.0 + TOTAL_TOLERANCE).then(|| format!("weights sum to {sum:.9} > 1"))
    }

    fn coverage_gap(&self, labels: &[Probability], within: &Probability) -> Option<String> {
        let sum = Self::sum(labels);
        ((sum - within.0).abs() > TOTAL_TOLERANCE)
            .then(|| format!("weights sum to {sum:.9}, expected {:.9} (gap {:.9})", within.0, within.0 - sum))
    }

    fn canonical_text(&self, l: &Probability) -> String {
        l.to_string()
    }

    fn weight(&self, l: &Probability) -> Option<f64> {
        Some(l.weight())
    }

    fn path_sensitive(&self) -> bool {
        false
    }

    fn condition(&self, l: &Probability, given: &Probability) -> Probability {
        if given.0 < EMPTY_WEIGHT {
            return Probability(0.0);
        }
        Probability((l.0 / given.0).min(1.0))
    }

    fn contains(&self, _l: &Probability, _w: &World) -> Result<bool, LabelError> {
        Err(LabelError::ForeignWorld(ModalityKind::Probability))
    }
}
