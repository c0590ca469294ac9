//! Modal values: finite sets of `(value, label)` variants whose labels
//! partition the worlds.

use std::fmt::Write as _;

use thiserror::Error;

use crate::labels::{Endpoint, LabelAlgebra, LabelError, ModalityKind, World};
use crate::value::{ErrorKind, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModalError {
    #[error("every variant of the modal value has an empty label")]
    EmptyModalValue,
    #[error("projection is not defined for the probability modality")]
    ProjectionUnsupported,
    #[error("no variant covers world {0}")]
    Uncovered(World),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// What to do with a range whose MAX value is below its MIN value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntervalEmpty {
    #[default]
    Reject,
    Swap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalValue<L> {
    pairs: Vec<(Value, L)>,
}

impl<L: Clone> ModalValue<L> {
    pub fn from_pairs(pairs: Vec<(Value, L)>) -> Self {
        ModalValue { pairs }
    }

    pub fn pairs(&self) -> &[(Value, L)] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<(Value, L)> {
        self.pairs
    }

    pub fn labels(&self) -> Vec<L> {
        self.pairs.iter().map(|(_, l)| l.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Outcome of lifted evaluation: values in some worlds, errors in others.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalResult<L> {
    pub values: Vec<(Value, L)>,
    pub errors: Vec<(ErrorKind, L)>,
}

impl<L: Clone> ModalResult<L> {
    pub fn empty() -> Self {
        ModalResult {
            values: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn from_value(mv: ModalValue<L>) -> Self {
        ModalResult {
            values: mv.pairs,
            errors: Vec::new(),
        }
    }

    pub fn value_part(&self) -> ModalValue<L> {
        ModalValue::from_pairs(self.values.clone())
    }

    pub fn labels(&self) -> Vec<L> {
        self.values
            .iter()
            .map(|(_, l)| l.clone())
            .chain(self.errors.iter().map(|(_, l)| l.clone()))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.errors.is_empty()
    }
}

/// A constant in every world.
pub fn make_const<A: LabelAlgebra>(alg: &A, v: Value) -> ModalValue<A::Label> {
    ModalValue::from_pairs(alg.top_partition().into_iter().map(|l| (v, l)).collect())
}

/// Drops empty labels, merges equal keys by joining their labels, and sorts by
/// key then canonical label text. May return an empty list.
pub(crate) fn normalize_pairs<A, K>(alg: &A, pairs: Vec<(K, A::Label)>) -> Result<Vec<(K, A::Label)>, LabelError>
where
    A: LabelAlgebra + ?Sized,
    K: Ord + Copy,
{
    let mut live: Vec<(K, A::Label)> = pairs.into_iter().filter(|(_, l)| !alg.is_empty(l)).collect();
    live.sort_by_key(|a| a.0);
    let mut out: Vec<(K, A::Label)> = Vec::with_capacity(live.len());
    let mut group_start = 0;
    for (k, l) in live {
        if out.last().is_some_and(|(prev, _)| *prev != k) {
            group_start = out.len();
        }
        match out[group_start..]
            .iter()
            .position(|(_, acc)| alg.mergeable(acc, &l))
        {
            Some(i) => {
                let slot = &mut out[group_start + i].1;
                *slot = alg.join(slot, &l)?;
            }
            None => out.push((k, l)),
        }
    }
    // ties only remain where labels could not be merged
    out.sort_by_cached_key(|(k, l)| (*k, alg.sort_key(l)));
    Ok(out)
}

pub fn normalize<A: LabelAlgebra>(alg: &A, mv: &ModalValue<A::Label>) -> Result<ModalValue<A::Label>, ModalError> {
    let pairs = normalize_pairs(alg, mv.pairs.clone())?;
    if pairs.is_empty() {
        return Err(ModalError::EmptyModalValue);
    }
    Ok(ModalValue { pairs })
}

/// Normalizes both halves of a result. An empty result is allowed: it is the
/// outcome of evaluating under an empty context.
pub fn normalize_result<A: LabelAlgebra>(alg: &A, r: ModalResult<A::Label>) -> Result<ModalResult<A::Label>, LabelError> {
    Ok(ModalResult {
        values: normalize_pairs(alg, r.values)?,
        errors: normalize_pairs(alg, r.errors)?,
    })
}

/// Findings of [`validate`]; every field is `None` for a well-formed value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub cardinality: Option<String>,
    pub empty_label: Option<String>,
    pub disjointness: Option<String>,
    pub totality: Option<String>,
    pub range: Option<String>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.first().is_none()
    }

    pub fn first(&self) -> Option<String> {
        [
            ("cardinality", &self.cardinality),
            ("empty label", &self.empty_label),
            ("disjointness", &self.disjointness),
            ("totality", &self.totality),
            ("range", &self.range),
        ]
        .into_iter()
        .find_map(|(what, d)| d.as_ref().map(|d| format!("{what}: {d}")))
    }
}

fn check_labels<A: LabelAlgebra>(alg: &A, labels: &[A::Label], within: &A::Label) -> Validation {
    Validation {
        cardinality: None,
        empty_label: labels
            .iter()
            .find(|l| alg.is_empty(l))
            .map(|l| format!("variant labelled {} denotes no world", alg.canonical_text(l))),
        disjointness: alg.overlap(labels),
        totality: alg.coverage_gap(labels, within),
        range: None,
    }
}

/// Checks disjointness and totality, plus the range check for integer
/// intervals.
pub fn validate<A: LabelAlgebra>(alg: &A, mv: &ModalValue<A::Label>, policy: IntervalEmpty) -> Validation {
    let mut v = check_labels(alg, &mv.labels(), &alg.top());
    if mv.is_empty() {
        v.cardinality = Some("no variants".into());
    }
    if alg.kind() == ModalityKind::Interval && policy == IntervalEmpty::Reject {
        if let (Some(Value::Int(lo)), Some(Value::Int(hi))) = (endpoint_value(alg, mv, true), endpoint_value(alg, mv, false)) {
            if hi < lo {
                v.range = Some(format!("MAX value {hi} is below MIN value {lo}"));
            }
        }
    }
    v
}

/// Joint disjointness and coverage of value and error labels, relative to the
/// worlds of `within`.
pub fn validate_result<A: LabelAlgebra>(alg: &A, r: &ModalResult<A::Label>, within: &A::Label) -> Validation {
    check_labels(alg, &r.labels(), within)
}

fn endpoint_value<A: LabelAlgebra>(alg: &A, mv: &ModalValue<A::Label>, min: bool) -> Option<Value> {
    endpoint_pair(alg, &mv.pairs, if min { Endpoint::Min } else { Endpoint::Max })
}

fn endpoint_pair<A: LabelAlgebra>(alg: &A, pairs: &[(Value, A::Label)], e: Endpoint) -> Option<Value> {
    let w = World::Endpoint(e);
    pairs
        .iter()
        .find(|(_, l)| alg.contains(l, &w).unwrap_or(false))
        .map(|(v, _)| *v)
}

/// Swaps the endpoint values of an inverted range. Other modalities and
/// well-ordered ranges are returned unchanged.
pub fn repair_range<A: LabelAlgebra>(alg: &A, mv: ModalValue<A::Label>) -> ModalValue<A::Label> {
    if alg.kind() != ModalityKind::Interval {
        return mv;
    }
    match (endpoint_value(alg, &mv, true), endpoint_value(alg, &mv, false)) {
        (Some(lo @ Value::Int(a)), Some(hi @ Value::Int(b))) if b < a => ModalValue {
            pairs: mv
                .pairs
                .into_iter()
                .map(|(v, l)| (if v == lo { hi } else { lo }, l))
                .collect(),
        },
        _ => mv,
    }
}

/// The value a modal value takes in world `w`.
pub fn project<A: LabelAlgebra>(alg: &A, mv: &ModalValue<A::Label>, w: &World) -> Result<Value, ModalError> {
    if alg.kind() == ModalityKind::Probability {
        return Err(ModalError::ProjectionUnsupported);
    }
    for (v, l) in &mv.pairs {
        if alg.contains(l, w)? {
            return Ok(*v);
        }
    }
    Err(ModalError::Uncovered(w.clone()))
}

/// The outcome of a result in world `w`.
pub fn project_result<A: LabelAlgebra>(
    alg: &A,
    r: &ModalResult<A::Label>,
    w: &World,
) -> Result<Result<Value, ErrorKind>, ModalError> {
    if alg.kind() == ModalityKind::Probability {
        return Err(ModalError::ProjectionUnsupported);
    }
    for (v, l) in &r.values {
        if alg.contains(l, w)? {
            return Ok(Ok(*v));
        }
    }
    for (e, l) in &r.errors {
        if alg.contains(l, w)? {
            return Ok(Err(*e));
        }
    }
    Err(ModalError::Uncovered(w.clone()))
}

/// One line per variant, `value @ label`; ranges print as `[min .. max]`.
pub fn render_value<A: LabelAlgebra>(alg: &A, mv: &ModalValue<A::Label>) -> String {
    render_result(alg, &ModalResult::from_value(mv.clone()))
}

/// Values first, then `error:KIND @ label` lines.
pub fn render_result<A: LabelAlgebra>(alg: &A, r: &ModalResult<A::Label>) -> String {
    let mut out = String::new();
    if alg.kind() == ModalityKind::Interval && r.errors.is_empty() && r.values.len() == 2 {
        let lo = endpoint_pair(alg, &r.values, Endpoint::Min);
        let hi = endpoint_pair(alg, &r.values, Endpoint::Max);
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let _ = writeln!(out, "[{lo} .. {hi}]");
            return out;
        }
    }
    for (v, l) in &r.values {
        let _ = writeln!(out, "{v} @ {}", alg.display_text(l));
    }
    for (e, l) in &r.errors {
        let _ = writeln!(out, "error:{e} @ {}", alg.display_text(l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{FeatureAlgebra, IntervalAlgebra, IntervalTag, Probability, ProbabilityAlgebra};

    fn p(w: f64) -> Probability {
        Probability::new(w).unwrap()
    }

    #[test]
    fn make_const_per_modality() {
        let f = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let c = make_const(&f, Value::Int(5));
        assert_eq!(render_value(&f, &c), "5 @ true\n");
        let c = make_const(&ProbabilityAlgebra, Value::Int(0));
        assert_eq!(render_value(&ProbabilityAlgebra, &c), "0 @ 1.000000000\n");
        let c = make_const(&IntervalAlgebra, Value::Int(5));
        assert_eq!(c.pairs(), &[(Value::Int(5), IntervalTag::Min), (Value::Int(5), IntervalTag::Max)]);
        assert_eq!(render_value(&IntervalAlgebra, &c), "[5 .. 5]\n");
    }

    #[test]
    fn normalize_merges_equal_values() {
        let f = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let mv = ModalValue::from_pairs(vec![
            (Value::Int(9), f.parse("FA & FB").unwrap()),
            (Value::Int(9), f.parse("!FA & FB").unwrap()),
            (Value::Int(2), f.parse("FA & !FB").unwrap()),
            (Value::Int(2), f.parse("!FA & !FB").unwrap()),
        ]);
        let n = normalize(&f, &mv).unwrap();
        assert_eq!(n.len(), 2);
        assert_eq!(n.pairs()[0].0, Value::Int(2));
        assert_eq!(f.canonical_text(&n.pairs()[0].1), "!FB");
        assert!(f.equivalent(n.pairs()[0].1, f.parse("!FB").unwrap()));
        // projection is preserved in every configuration
        for cfg in f.configurations() {
            let w = World::Config(cfg);
            assert_eq!(project(&f, &mv, &w).unwrap(), project(&f, &n, &w).unwrap());
        }
    }

    #[test]
    fn normalize_sums_probabilities() {
        // x + x cross terms for x = {(7, 0.2), (9, 0.8)} that land on 16
        let mut mass16 = 0.0;
        for (a, wa) in [(7, 0.2), (9, 0.8)] {
            for (b, wb) in [(7, 0.2), (9, 0.8)] {
                if a + b == 16 {
                    mass16 += wa * wb;
                }
            }
        }
        let mv = ModalValue::from_pairs(vec![(Value::Int(16), p(0.16)), (Value::Int(16), p(0.16))]);
        let n = normalize(&ProbabilityAlgebra, &mv).unwrap();
        assert_eq!(n.len(), 1);
        assert!((n.pairs()[0].1.weight() - mass16).abs() < 1e-12);
    }

    #[test]
    fn normalize_keeps_interval_endpoints_apart() {
        let mv = ModalValue::from_pairs(vec![(Value::Int(5), IntervalTag::Max), (Value::Int(5), IntervalTag::Min)]);
        let n = normalize(&IntervalAlgebra, &mv).unwrap();
        assert_eq!(n.pairs(), &[(Value::Int(5), IntervalTag::Min), (Value::Int(5), IntervalTag::Max)]);
    }

    #[test]
    fn normalize_all_empty_is_an_error() {
        let mv = ModalValue::from_pairs(vec![(Value::Int(1), p(0.0))]);
        assert_eq!(normalize(&ProbabilityAlgebra, &mv), Err(ModalError::EmptyModalValue));
    }

    #[test]
    fn validate_examples() {
        let f = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let x = ModalValue::from_pairs(vec![(Value::Int(-7), f.parse("FA").unwrap()), (Value::Int(3), f.parse("!FA").unwrap())]);
        assert!(validate(&f, &x, IntervalEmpty::Reject).is_ok());

        let pv = ModalValue::from_pairs(vec![(Value::Int(7), p(0.2)), (Value::Int(9), p(0.7))]);
        let v = validate(&ProbabilityAlgebra, &pv, IntervalEmpty::Reject);
        assert!(v.totality.as_deref().unwrap().contains("gap 0.100000000"));

        let inverted = ModalValue::from_pairs(vec![(Value::Int(9), IntervalTag::Min), (Value::Int(4), IntervalTag::Max)]);
        assert!(validate(&IntervalAlgebra, &inverted, IntervalEmpty::Reject).range.is_some());
        assert!(validate(&IntervalAlgebra, &inverted, IntervalEmpty::Swap).is_ok());
        let fixed = repair_range(&IntervalAlgebra, inverted);
        assert_eq!(render_value(&IntervalAlgebra, &fixed), "[4 .. 9]\n");
    }

    #[test]
    fn validate_reports_overlap() {
        let f = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let mv = ModalValue::from_pairs(vec![(Value::Int(1), f.parse("FA").unwrap()), (Value::Int(2), f.parse("FB").unwrap())]);
        let v = validate(&f, &mv, IntervalEmpty::Reject);
        assert!(v.disjointness.is_some());
        assert!(v.totality.is_some());
    }

    #[test]
    fn projection_examples() {
        let f = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let x = ModalValue::from_pairs(vec![(Value::Int(-7), f.parse("FA").unwrap()), (Value::Int(3), f.parse("!FA").unwrap())]);
        assert_eq!(project(&f, &x, &World::Config(vec![true, false])), Ok(Value::Int(-7)));
        let c = make_const(&f, Value::Int(5));
        for cfg in f.configurations() {
            assert_eq!(project(&f, &c, &World::Config(cfg)), Ok(Value::Int(5)));
        }
        let r = ModalValue::from_pairs(vec![(Value::Int(4), IntervalTag::Min), (Value::Int(9), IntervalTag::Max)]);
        assert_eq!(project(&IntervalAlgebra, &r, &World::Endpoint(Endpoint::Max)), Ok(Value::Int(9)));
        let pv = make_const(&ProbabilityAlgebra, Value::Int(1));
        assert_eq!(
            project(&ProbabilityAlgebra, &pv, &World::Joint(vec![0])),
            Err(ModalError::ProjectionUnsupported)
        );
    }
}
