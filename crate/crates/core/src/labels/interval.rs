use std::fmt;

use super::{Endpoint, LabelAlgebra, LabelError, ModalityKind, World};

/// Endpoint tag of a range value.
///
/// `Empty` only arises from meeting different tags. `Both` is the full world
/// set and is used for evaluation contexts; neither appears in a validated
/// modal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalTag {
    Empty,
    Min,
    Max,
    Both,
}

impl IntervalTag {
    fn bits(self) -> u8 {
        match self {
            IntervalTag::Empty => 0b00,
            IntervalTag::Min => 0b01,
            IntervalTag::Max => 0b10,
            IntervalTag::Both => 0b11,
        }
    }

    fn from_bits(bits: u8) -> Self {
        match bits & 0b11 {
            0b00 => IntervalTag::Empty,
            0b01 => IntervalTag::Min,
            0b10 => IntervalTag::Max,
            _ => IntervalTag::Both,
        }
    }

    pub fn from_endpoint(e: Endpoint) -> Self {
        match e {
            Endpoint::Min => IntervalTag::Min,
            Endpoint::Max => IntervalTag::Max,
        }
    }
}

impl fmt::Display for IntervalTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalTag::Empty => "EMPTY",
            IntervalTag::Min => "MIN",
            IntervalTag::Max => "MAX",
            IntervalTag::Both => "MIN|MAX",
        })
    }
}

/// Range values evaluated at their two endpoints.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalAlgebra;

fn count(labels: &[IntervalTag], tag: IntervalTag) -> usize {
    labels.iter().filter(|l| l.bits() & tag.bits() != 0).count()
}

impl LabelAlgebra for IntervalAlgebra {
    type Label = IntervalTag;

    fn kind(&self) -> ModalityKind {
        ModalityKind::Interval
    }

    fn top(&self) -> IntervalTag {
        IntervalTag::Both
    }

    fn top_partition(&self) -> Vec<IntervalTag> {
        vec![IntervalTag::Min, IntervalTag::Max]
    }

    fn meet(&self, a: &IntervalTag, b: &IntervalTag) -> IntervalTag {
        IntervalTag::from_bits(a.bits() & b.bits())
    }

    fn join(&self, a: &IntervalTag, b: &IntervalTag) -> Result<IntervalTag, LabelError> {
        match (a, b) {
            (IntervalTag::Empty, t) | (t, IntervalTag::Empty) => Ok(*t),
            (x, y) if x == y => Ok(*x),
            _ => Err(LabelError::IntervalJoinMismatch(*a, *b)),
        }
    }

    fn hull(&self, a: &IntervalTag, b: &IntervalTag) -> IntervalTag {
        IntervalTag::from_bits(a.bits() | b.bits())
    }

    fn is_empty(&self, l: &IntervalTag) -> bool {
        *l == IntervalTag::Empty
    }

    fn overlap(&self, labels: &[IntervalTag]) -> Option<String> {
        for tag in [IntervalTag::Min, IntervalTag::Max] {
            let n = count(labels, tag);
            if n > 1 {
                return Some(format!("{n} variants labelled {tag}"));
            }
        }
        None
    }

    fn coverage_gap(&self, labels: &[IntervalTag], within: &IntervalTag) -> Option<String> {
        for tag in [IntervalTag::Min, IntervalTag::Max] {
            let wanted = usize::from(within.bits() & tag.bits() != 0);
            let n = count(labels, tag);
            if n != wanted {
                return Some(format!("{n} variants labelled {tag}, expected {wanted}"));
            }
        }
        None
    }

    /// A range must carry exactly one MIN and one MAX variant.
    fn check_disjoint(&self, labels: &[IntervalTag]) -> bool {
        self.coverage_gap(labels, &IntervalTag::Both).is_none()
    }

    fn canonical_text(&self, l: &IntervalTag) -> String {
        l.to_string()
    }

    // MIN sorts before MAX
    fn sort_key(&self, l: &IntervalTag) -> String {
        l.bits().to_string()
    }

    fn mergeable(&self, a: &IntervalTag, b: &IntervalTag) -> bool {
        self.join(a, b).is_ok()
    }

    fn contains(&self, l: &IntervalTag, w: &World) -> Result<bool, LabelError> {
        match w {
            World::Endpoint(e) => Ok(l.bits() & IntervalTag::from_endpoint(*e).bits() != 0),
            _ => Err(LabelError::ForeignWorld(ModalityKind::Interval)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use IntervalTag::*;

    #[test]
    fn meet_table() {
        let a = IntervalAlgebra;
        assert_eq!(a.meet(&Min, &Min), Min);
        assert_eq!(a.meet(&Max, &Max), Max);
        assert_eq!(a.meet(&Min, &Max), Empty);
        assert_eq!(a.meet(&Empty, &Min), Empty);
        assert_eq!(a.meet(&Min, &Both), Min);
    }

    #[test]
    fn join_table() {
        let a = IntervalAlgebra;
        assert_eq!(a.join(&Empty, &Max), Ok(Max));
        assert_eq!(a.join(&Min, &Min), Ok(Min));
        assert_eq!(a.join(&Min, &Max), Err(LabelError::IntervalJoinMismatch(Min, Max)));
        assert_eq!(a.hull(&Min, &Max), Both);
    }

    #[test]
    fn disjoint_and_total_need_one_of_each() {
        let a = IntervalAlgebra;
        assert!(a.check_disjoint(&[Min, Max]));
        assert!(a.check_total(&[Max, Min]));
        assert!(!a.check_disjoint(&[Min, Min]));
        assert!(!a.check_total(&[Min]));
        assert!(a.coverage_gap(&[Min], &Min).is_none());
    }

    #[test]
    fn emptiness() {
        assert!(IntervalAlgebra.is_empty(&Empty));
        assert!(!IntervalAlgebra.is_empty(&Min));
    }
}
