//! Label algebras: the ways a modal value can name the worlds each of its
//! variants belongs to.
//!
//! Three modalities are provided:
//!
//! * [`FeatureAlgebra`] labels are propositional formulas over declared
//!   features. Worlds are total feature configurations.
//! * [`ProbabilityAlgebra`] labels are weights in `[0, 1]`, read as the mass
//!   of worlds (under independence) rather than an explicit world set.
//! * [`IntervalAlgebra`] labels are endpoint tags; the two worlds are the
//!   lower and upper end of a range.
//!
//! All lifting machinery is written against [`LabelAlgebra`] and does not know
//! which modality it is running under.

mod feature;
mod interval;
mod minimize;
mod probability;
pub mod sat;

use std::fmt;

pub use feature::{FeatureAlgebra, FeatureExpr, Formula, DEFAULT_FEATURE_LIMIT};
pub use interval::{IntervalAlgebra, IntervalTag};
pub use probability::{Probability, ProbabilityAlgebra, EMPTY_WEIGHT, TOTAL_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelError {
    #[error("probability sum {0} exceeds 1.0")]
    ProbabilityOverflow(f64),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("cannot join interval tags {0} and {1}")]
    IntervalJoinMismatch(IntervalTag, IntervalTag),
    #[error("{count} features exceed the configured limit of {limit}")]
    TooManyFeatures { count: usize, limit: usize },
    #[error("undeclared feature `{0}`")]
    UnknownFeature(String),
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("feature expressions are only available in the feature modality")]
    FeatureUnsupported,
    #[error("world does not belong to the {0} modality")]
    ForeignWorld(ModalityKind),
    #[error("feature expression syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModalityKind {
    Feature,
    Probability,
    Interval,
}

impl fmt::Display for ModalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModalityKind::Feature => "feature",
            ModalityKind::Probability => "probability",
            ModalityKind::Interval => "interval",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Min,
    Max,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::Min => "MIN",
            Endpoint::Max => "MAX",
        })
    }
}

/// One concrete point of evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum World {
    /// Truth value per declared feature, in declaration order.
    Config(Vec<bool>),
    Endpoint(Endpoint),
    /// Index into each binding's support, in binding order.
    Joint(Vec<usize>),
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            World::Config(bits) => {
                let s: Vec<String> = bits.iter().map(|b| (*b as u8).to_string()).collect();
                write!(f, "config[{}]", s.join(","))
            }
            World::Endpoint(e) => write!(f, "{e}"),
            World::Joint(ix) => {
                let s: Vec<String> = ix.iter().map(|i| i.to_string()).collect();
                write!(f, "joint[{}]", s.join(","))
            }
        }
    }
}

/// Operations a modality supplies so values can be lifted over it.
///
/// `meet` and `join` are intersection and union of the denoted world sets.
/// `hull` is the union used for evaluation contexts; it agrees with `join`
/// wherever `join` is defined but never fails.
pub trait LabelAlgebra {
    type Label: Clone + fmt::Debug + PartialEq;

    fn kind(&self) -> ModalityKind;

    fn top(&self) -> Self::Label;

    /// Labels that partition the full world set. Used to seed a cross product
    /// with no arguments.
    fn top_partition(&self) -> Vec<Self::Label> {
        vec![self.top()]
    }

    fn meet(&self, a: &Self::Label, b: &Self::Label) -> Self::Label;

    fn join(&self, a: &Self::Label, b: &Self::Label) -> Result<Self::Label, LabelError>;

    fn hull(&self, a: &Self::Label, b: &Self::Label) -> Self::Label;

    fn is_empty(&self, l: &Self::Label) -> bool;

    /// `None` when the labels are pairwise disjoint, otherwise a description
    /// of the first overlap found.
    fn overlap(&self, labels: &[Self::Label]) -> Option<String>;

    /// `None` when the labels jointly cover exactly the worlds of `within`.
    fn coverage_gap(&self, labels: &[Self::Label], within: &Self::Label) -> Option<String>;

    fn check_disjoint(&self, labels: &[Self::Label]) -> bool {
        self.overlap(labels).is_none()
    }

    fn check_total(&self, labels: &[Self::Label]) -> bool {
        self.coverage_gap(labels, &self.top()).is_none()
    }

    /// Deterministic structural rendering.
    fn canonical_text(&self, l: &Self::Label) -> String;

    /// Tie-break order among variants with equal values.
    fn sort_key(&self, l: &Self::Label) -> String {
        self.canonical_text(l)
    }

    /// Rendering used in reports. Defaults to the canonical text.
    fn display_text(&self, l: &Self::Label) -> String {
        self.canonical_text(l)
    }

    /// Whether two equal-valued variants carrying these labels may be merged.
    fn mergeable(&self, _a: &Self::Label, _b: &Self::Label) -> bool {
        true
    }

    /// Path-sensitive modalities narrow the evaluation context at conditionals.
    /// The others evaluate branches unconditionally and weight the results.
    fn path_sensitive(&self) -> bool {
        true
    }

    /// Re-expresses `l` relative to the world set `given` (conditioning).
    fn condition(&self, l: &Self::Label, _given: &Self::Label) -> Self::Label {
        l.clone()
    }

    /// Whether `w` lies in the world set of `l`.
    fn contains(&self, l: &Self::Label, w: &World) -> Result<bool, LabelError>;

    /// Labels for a feature being present and absent.
    fn feature_literals(&self, _name: &str) -> Result<(Self::Label, Self::Label), LabelError> {
        Err(LabelError::FeatureUnsupported)
    }

    /// Probability mass of a label, for algebras whose labels are weights.
    fn weight(&self, _l: &Self::Label) -> Option<f64> {
        None
    }

    /// Number of satisfiability queries issued so far.
    fn sat_calls(&self) -> u64 {
        0
    }

    fn join_all<'a, I>(&self, labels: I) -> Result<Option<Self::Label>, LabelError>
    where
        I: IntoIterator<Item = &'a Self::Label>,
        Self::Label: 'a,
    {
        let mut acc: Option<Self::Label> = None;
        for l in labels {
            acc = Some(match acc {
                None => l.clone(),
                Some(a) => self.join(&a, l)?,
            });
        }
        Ok(acc)
    }

    fn hull_all<'a, I>(&self, labels: I) -> Option<Self::Label>
    where
        I: IntoIterator<Item = &'a Self::Label>,
        Self::Label: 'a,
    {
        labels.into_iter().fold(None, |acc, l| {
            Some(match acc {
                None => l.clone(),
                Some(a) => self.hull(&a, l),
            })
        })
    }

    fn meet_all<'a, I>(&self, labels: I) -> Self::Label
    where
        I: IntoIterator<Item = &'a Self::Label>,
        Self::Label: 'a,
    {
        let mut it = labels.into_iter();
        match it.next() {
            None => self.top(),
            Some(first) => it.fold(first.clone(), |acc, l| self.meet(&acc, l)),
        }
    }
}
