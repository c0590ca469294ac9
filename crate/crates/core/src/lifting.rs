//! Shallow lifting: run an ordinary function on every combination of argument
//! variants whose labels still share a world, and label each result with that
//! shared world set.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::labels::{LabelAlgebra, LabelError};
use crate::modal::{normalize_pairs, normalize_result, ModalResult, ModalValue};
use crate::value::{ErrorKind, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("`{name}` expects {expected} arguments, got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("arguments come from different modalities")]
    ModalityMismatch,
    #[error("partial results overlap: {0}")]
    DisjointnessViolation(String),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// A deterministic single-world function of fixed arity.
#[derive(Clone, Copy)]
pub struct PrimitiveFn {
    pub name: &'static str,
    pub arity: usize,
    pub apply: fn(&[Value]) -> Result<Value, ErrorKind>,
}

impl fmt::Debug for PrimitiveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimitiveFn({}/{})", self.name, self.arity)
    }
}

/// Work counters for one evaluation.
///
/// `tuples`, `pruned` and `applied` describe cross products only, so
/// `applied + pruned == tuples` always holds. `applications` counts executions
/// per function name, including calls made inside single-world evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LiftStats {
    pub applications: BTreeMap<String, u64>,
    pub tuples: u64,
    pub pruned: u64,
    pub applied: u64,
    pub sat_calls: u64,
}

impl LiftStats {
    pub fn record(&mut self, name: &str, n: u64) {
        if n > 0 {
            *self.applications.entry(name.to_string()).or_default() += n;
        }
    }

    pub fn applications_of(&self, name: &str) -> u64 {
        self.applications.get(name).copied().unwrap_or(0)
    }

    /// Sum of application counts over the given names.
    pub fn total_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> u64 {
        names.into_iter().map(|n| self.applications_of(n)).sum()
    }

    /// `applications.<name>=<n>` lines followed by the cross-product counters.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, n) in &self.applications {
            out.push_str(&format!("applications.{name}={n}\n"));
        }
        out.push_str(&format!("tuples={}\n", self.tuples));
        out.push_str(&format!("pruned={}\n", self.pruned));
        out.push_str(&format!("sat_calls={}\n", self.sat_calls));
        out
    }
}

/// One element of an argument cross product.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuple<L> {
    pub values: Vec<Value>,
    pub label: L,
    pub pruned: bool,
}

/// Enumerates `args[0] × … × args[n-1]` in lexicographic order, meeting the
/// labels of each tuple and marking it pruned when the meet is empty.
///
/// With no arguments the full world set is visited once per label of the
/// algebra's top partition.
pub fn cross_product<A, F>(alg: &A, args: &[&[(Value, A::Label)]], stats: &mut LiftStats, mut visit: F)
where
    A: LabelAlgebra,
    F: FnMut(Tuple<A::Label>),
{
    let mut emit = |values: Vec<Value>, label: A::Label, stats: &mut LiftStats| {
        let pruned = alg.is_empty(&label);
        stats.tuples += 1;
        if pruned {
            stats.pruned += 1;
        } else {
            stats.applied += 1;
        }
        visit(Tuple { values, label, pruned });
    };
    if args.is_empty() {
        for label in alg.top_partition() {
            emit(Vec::new(), label, stats);
        }
        return;
    }
    if args.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut index = vec![0usize; args.len()];
    loop {
        let values: Vec<Value> = index.iter().zip(args).map(|(&i, a)| a[i].0).collect();
        let label = alg.meet_all(index.iter().zip(args).map(|(&i, a)| &a[i].1));
        emit(values, label, stats);
        // odometer, last argument fastest
        let mut pos = args.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < args[pos].len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

/// Applies `f` across the pruned cross product of `args`. Results and
/// per-world failures are labelled with the tuple's meet and normalized.
pub fn shallow_apply_with<A, F>(
    alg: &A,
    name: &str,
    mut f: F,
    args: &[&[(Value, A::Label)]],
    stats: &mut LiftStats,
) -> Result<ModalResult<A::Label>, LiftError>
where
    A: LabelAlgebra,
    F: FnMut(&[Value]) -> Result<Value, ErrorKind>,
{
    let mut out = ModalResult::empty();
    let mut applied = 0;
    cross_product(alg, args, stats, |t| {
        if t.pruned {
            return;
        }
        applied += 1;
        match f(&t.values) {
            Ok(v) => out.values.push((v, t.label)),
            Err(e) => out.errors.push((e, t.label)),
        }
    });
    stats.record(name, applied);
    Ok(normalize_result(alg, out)?)
}

/// Shallow lifting of a primitive over modal arguments.
pub fn shallow_apply<A: LabelAlgebra>(
    alg: &A,
    f: &PrimitiveFn,
    args: &[&ModalValue<A::Label>],
    stats: &mut LiftStats,
) -> Result<ModalResult<A::Label>, LiftError> {
    if args.len() != f.arity {
        return Err(LiftError::ArityMismatch {
            name: f.name.to_string(),
            expected: f.arity,
            got: args.len(),
        });
    }
    let before = alg.sat_calls();
    let slices: Vec<&[(Value, A::Label)]> = args.iter().map(|a| a.pairs()).collect();
    let r = shallow_apply_with(alg, f.name, f.apply, &slices, stats);
    stats.sat_calls += alg.sat_calls() - before;
    r
}

fn restrict_pairs<A: LabelAlgebra, K: Ord + Copy>(
    alg: &A,
    pairs: &[(K, A::Label)],
    ctx: &A::Label,
) -> Result<Vec<(K, A::Label)>, LabelError> {
    normalize_pairs(alg, pairs.iter().map(|(k, l)| (*k, alg.meet(l, ctx))).collect())
}

/// Meets every label with `ctx`, dropping variants that become empty.
pub fn restrict<A: LabelAlgebra>(
    alg: &A,
    r: &ModalResult<A::Label>,
    ctx: &A::Label,
) -> Result<ModalResult<A::Label>, LabelError> {
    Ok(ModalResult {
        values: restrict_pairs(alg, &r.values, ctx)?,
        errors: restrict_pairs(alg, &r.errors, ctx)?,
    })
}

pub fn restrict_value<A: LabelAlgebra>(
    alg: &A,
    m: &ModalValue<A::Label>,
    ctx: &A::Label,
) -> Result<ModalValue<A::Label>, LabelError> {
    Ok(ModalValue::from_pairs(restrict_pairs(alg, m.pairs(), ctx)?))
}

/// Unions two partial results that cover disjoint world sets. With `check`
/// set, the combined labels are verified to be pairwise disjoint.
pub fn partial_union<A: LabelAlgebra>(
    alg: &A,
    a: ModalResult<A::Label>,
    b: ModalResult<A::Label>,
    check: bool,
) -> Result<ModalResult<A::Label>, LiftError> {
    if check {
        // the algebra decides what overlap means: shared worlds for world
        // sets, excess mass for weights
        let mut labels = a.labels();
        labels.extend(b.labels());
        if let Some(detail) = alg.overlap(&labels) {
            return Err(LiftError::DisjointnessViolation(detail));
        }
    }
    let mut values = a.values;
    values.extend(b.values);
    let mut errors = a.errors;
    errors.extend(b.errors);
    Ok(normalize_result(alg, ModalResult { values, errors })?)
}
