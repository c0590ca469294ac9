//! Lifted interpretation of whole programs.
//!
//! [`eval_modal`] walks the syntax tree once, keeping every intermediate
//! value modal, so cross products are only formed at primitive applications
//! and shared sub-results are computed once. [`eval_shallow_blackbox`] instead
//! runs the plain evaluator on every surviving combination of inputs.
//!
//! Path-sensitive modalities (features, intervals) evaluate each sub-expression
//! under a context label: the worlds still alive on the current path. Weights
//! do not name worlds, so the probability modality evaluates sub-expressions
//! over the full distribution and rescales afterwards; this is exact when
//! every input is referenced at most once.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::labels::{LabelAlgebra, LabelError, ModalityKind};
use crate::lang::{eval_plain_counted, BinOp, EvalError, Expr, FeatureConfig, PlainEnv, Program, NOT};
use crate::lifting::{cross_product, partial_union, restrict, restrict_value, shallow_apply_with, LiftError, LiftStats};
use crate::modal::{make_const, normalize_result, validate_result, ModalResult, ModalValue};
use crate::value::{ErrorKind, Value};

/// Name under which whole-program runs are counted by
/// [`eval_shallow_blackbox`].
pub const PROGRAM_NAME: &str = "<program>";

/// Modal inputs by name.
pub type ModalEnv<L> = BTreeMap<String, ModalValue<L>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalModalError {
    #[error("no binding for `{0}`")]
    MissingBinding(String),
    #[error("feature(\"{0}\") used outside the feature modality")]
    FeatureInNonFeatureModality(ModalityKind, String),
    #[error("undefined function `{0}`")]
    UnknownFunction(String),
    #[error("invariant violated at `{at}`: {detail}")]
    Invariant { at: String, detail: String },
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Validate every intermediate result against its context.
    pub check_invariants: bool,
}

/// Left-to-right evaluation of several operands.
struct Chain<L> {
    values: Vec<Vec<(Value, L)>>,
    errors: Vec<(ErrorKind, L)>,
    /// Worlds (or mass) in which every operand succeeded; `None` when no
    /// world survived and later operands were skipped.
    live: Option<L>,
}

enum Branch<'e> {
    Expr(&'e Expr),
    /// Evaluates the expression and turns non-boolean values into
    /// `TypeMismatch`.
    Boolean(&'e Expr),
    Const(Value),
}

struct Deep<'a, A: LabelAlgebra> {
    alg: &'a A,
    program: &'a Program,
    stats: &'a mut LiftStats,
    opts: EvalOptions,
}

type Scope<L> = Vec<(String, ModalValue<L>)>;

impl<A: LabelAlgebra> Deep<'_, A> {
    fn path_sensitive(&self) -> bool {
        self.alg.path_sensitive()
    }

    fn eval(&mut self, e: &Expr, ctx: &A::Label, scope: &mut Scope<A::Label>) -> Result<ModalResult<A::Label>, EvalModalError> {
        let r = self.eval_node(e, ctx, scope)?;
        if self.opts.check_invariants {
            if let Some(detail) = validate_result(self.alg, &r, ctx).first() {
                return Err(EvalModalError::Invariant {
                    at: node_name(e),
                    detail,
                });
            }
        }
        Ok(r)
    }

    fn constant(&self, v: Value, ctx: &A::Label) -> Result<ModalResult<A::Label>, EvalModalError> {
        let c = make_const(self.alg, v);
        Ok(ModalResult::from_value(restrict_value(self.alg, &c, ctx)?))
    }

    fn eval_node(
        &mut self,
        e: &Expr,
        ctx: &A::Label,
        scope: &mut Scope<A::Label>,
    ) -> Result<ModalResult<A::Label>, EvalModalError> {
        let alg = self.alg;
        match e {
            Expr::Int(n) => self.constant(Value::Int(*n), ctx),
            Expr::Bool(b) => self.constant(Value::Bool(*b), ctx),
            Expr::Var(n) => {
                let v = scope
                    .iter()
                    .rev()
                    .find(|(k, _)| k == n)
                    .map(|(_, v)| v)
                    .ok_or_else(|| EvalModalError::MissingBinding(n.clone()))?;
                Ok(ModalResult::from_value(restrict_value(alg, v, ctx)?))
            }
            Expr::Feature(n) => {
                let (on, off) = alg.feature_literals(n).map_err(|err| match err {
                    LabelError::FeatureUnsupported => EvalModalError::FeatureInNonFeatureModality(alg.kind(), n.clone()),
                    other => other.into(),
                })?;
                let mv = ModalValue::from_pairs(vec![(Value::Bool(true), on), (Value::Bool(false), off)]);
                Ok(ModalResult::from_value(restrict_value(alg, &mv, ctx)?))
            }
            Expr::Let(n, a, b) => {
                let chain = self.chain(&[a], ctx, scope)?;
                let Some(live) = chain.live.clone() else {
                    return self.finish(chain, ModalResult::empty());
                };
                let inner = self.inner_context(&live);
                scope.push((n.clone(), ModalValue::from_pairs(chain.values[0].clone())));
                let body = self.eval(b, &inner, scope);
                scope.pop();
                self.finish(chain, body?)
            }
            Expr::Bin(op @ (BinOp::And | BinOp::Or), a, b) => {
                let g = self.eval(a, ctx, scope)?;
                let (t, f) = if *op == BinOp::And {
                    (Branch::Boolean(b), Branch::Const(Value::Bool(false)))
                } else {
                    (Branch::Const(Value::Bool(true)), Branch::Boolean(b))
                };
                self.conditional(g, t, f, scope)
            }
            Expr::Bin(op, a, b) => {
                let prim = op.primitive().expect("strict operator");
                let chain = self.chain(&[a, b], ctx, scope)?;
                if chain.live.is_none() {
                    return self.finish(chain, ModalResult::empty());
                }
                let r = shallow_apply_with(alg, prim.name, prim.apply, &[&chain.values[0], &chain.values[1]], self.stats)?;
                self.finish(chain, r)
            }
            Expr::Not(a) => {
                let chain = self.chain(&[a], ctx, scope)?;
                if chain.live.is_none() {
                    return self.finish(chain, ModalResult::empty());
                }
                let r = shallow_apply_with(alg, NOT.name, NOT.apply, &[&chain.values[0]], self.stats)?;
                self.finish(chain, r)
            }
            Expr::If(g, t, f) => {
                let g = self.eval(g, ctx, scope)?;
                self.conditional(g, Branch::Expr(t), Branch::Expr(f), scope)
            }
            Expr::Call(name, args) => {
                let def = self
                    .program
                    .function(name)
                    .ok_or_else(|| EvalModalError::UnknownFunction(name.clone()))?;
                let refs: Vec<&Expr> = args.iter().collect();
                let chain = self.chain(&refs, ctx, scope)?;
                let Some(live) = chain.live.clone() else {
                    return self.finish(chain, ModalResult::empty());
                };
                let inner = self.inner_context(&live);
                let mut frame: Scope<A::Label> = def
                    .params
                    .iter()
                    .zip(&chain.values)
                    .map(|(x, v)| (x.clone(), ModalValue::from_pairs(v.clone())))
                    .collect();
                self.stats.record(name, 1);
                let body = self.eval(&def.body, &inner, &mut frame)?;
                self.finish(chain, body)
            }
        }
    }

    /// The context operands are evaluated under once `live` worlds remain.
    fn inner_context(&self, live: &A::Label) -> A::Label {
        if self.path_sensitive() {
            live.clone()
        } else {
            self.alg.top()
        }
    }

    /// Evaluates `exprs` left to right. A world in which an operand fails
    /// keeps that first error and is excluded from the remaining operands.
    fn chain(
        &mut self,
        exprs: &[&Expr],
        ctx: &A::Label,
        scope: &mut Scope<A::Label>,
    ) -> Result<Chain<A::Label>, EvalModalError> {
        let alg = self.alg;
        let mut chain = Chain {
            values: Vec::with_capacity(exprs.len()),
            errors: Vec::new(),
            live: None,
        };
        let mut live = ctx.clone();
        for e in exprs {
            let r = self.eval(e, &self.inner_context(&live), scope)?;
            let Some(ok) = alg.hull_all(r.values.iter().map(|(_, l)| l)).filter(|l| !alg.is_empty(l)) else {
                chain.errors.extend(self.rescale(r.errors, &live));
                return Ok(chain);
            };
            if self.path_sensitive() {
                chain.errors.extend(r.errors);
                chain.values.push(r.values);
                live = ok;
            } else {
                chain.errors.extend(self.rescale(r.errors, &live));
                chain
                    .values
                    .push(r.values.into_iter().map(|(v, l)| (v, alg.condition(&l, &ok))).collect());
                live = alg.meet(&live, &ok);
            }
        }
        chain.live = Some(live);
        Ok(chain)
    }

    fn rescale<K>(&self, pairs: Vec<(K, A::Label)>, live: &A::Label) -> Vec<(K, A::Label)> {
        if self.path_sensitive() {
            pairs
        } else {
            pairs.into_iter().map(|(k, l)| (k, self.alg.meet(&l, live))).collect()
        }
    }

    /// Combines the operands' errors with the result computed from their
    /// values.
    fn finish(&self, chain: Chain<A::Label>, r: ModalResult<A::Label>) -> Result<ModalResult<A::Label>, EvalModalError> {
        let mut r = match &chain.live {
            Some(live) if !self.path_sensitive() => restrict(self.alg, &r, live)?,
            _ => r,
        };
        r.errors.extend(chain.errors);
        Ok(normalize_result(self.alg, r)?)
    }

    fn conditional(
        &mut self,
        guard: ModalResult<A::Label>,
        then: Branch<'_>,
        otherwise: Branch<'_>,
        scope: &mut Scope<A::Label>,
    ) -> Result<ModalResult<A::Label>, EvalModalError> {
        let alg = self.alg;
        let mut errors = guard.errors;
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for (v, l) in guard.values {
            match v {
                Value::Bool(true) => yes.push(l),
                Value::Bool(false) => no.push(l),
                Value::Int(_) => errors.push((ErrorKind::TypeMismatch, l)),
            }
        }
        let mut out = ModalResult {
            values: Vec::new(),
            errors,
        };
        for (labels, branch) in [(yes, then), (no, otherwise)] {
            let Some(within) = alg.hull_all(labels.iter()).filter(|l| !alg.is_empty(l)) else {
                continue;
            };
            let r = self.branch(branch, &self.inner_context(&within), scope)?;
            let r = if self.path_sensitive() {
                r
            } else {
                restrict(alg, &r, &within)?
            };
            out = partial_union(alg, out, r, self.opts.check_invariants)?;
        }
        Ok(normalize_result(alg, out)?)
    }

    fn branch(
        &mut self,
        b: Branch<'_>,
        ctx: &A::Label,
        scope: &mut Scope<A::Label>,
    ) -> Result<ModalResult<A::Label>, EvalModalError> {
        match b {
            Branch::Expr(e) => self.eval(e, ctx, scope),
            Branch::Const(v) => self.constant(v, ctx),
            Branch::Boolean(e) => {
                let r = self.eval(e, ctx, scope)?;
                let mut out = ModalResult {
                    values: Vec::new(),
                    errors: r.errors,
                };
                for (v, l) in r.values {
                    match v {
                        Value::Bool(_) => out.values.push((v, l)),
                        Value::Int(_) => out.errors.push((ErrorKind::TypeMismatch, l)),
                    }
                }
                Ok(normalize_result(self.alg, out)?)
            }
        }
    }
}

fn node_name(e: &Expr) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Var(n) => n.clone(),
        Expr::Feature(n) => format!("feature(\"{n}\")"),
        Expr::Let(n, _, _) => format!("let {n}"),
        Expr::If(..) => "if".into(),
        Expr::Bin(op, _, _) => op.symbol().into(),
        Expr::Not(_) => "!".into(),
        Expr::Call(f, _) => format!("{f}(..)"),
    }
}

fn check_features<A: LabelAlgebra>(alg: &A, p: &Program) -> Result<(), EvalModalError> {
    if alg.kind() != ModalityKind::Feature {
        if let Some(n) = p.features_used().into_iter().next() {
            return Err(EvalModalError::FeatureInNonFeatureModality(alg.kind(), n));
        }
    }
    Ok(())
}

/// Deep lifting: evaluates `main` with every intermediate value modal.
pub fn eval_modal<A: LabelAlgebra>(
    alg: &A,
    p: &Program,
    env: &ModalEnv<A::Label>,
    opts: EvalOptions,
    stats: &mut LiftStats,
) -> Result<ModalResult<A::Label>, EvalModalError> {
    check_features(alg, p)?;
    let before = alg.sat_calls();
    let mut scope: Scope<A::Label> = Vec::new();
    for n in p.inputs() {
        let v = env.get(&n).ok_or_else(|| EvalModalError::MissingBinding(n.clone()))?;
        scope.push((n, v.clone()));
    }
    let mut deep = Deep {
        alg,
        program: p,
        stats,
        opts,
    };
    let r = deep.eval(&p.main, &alg.top(), &mut scope);
    stats.sat_calls += alg.sat_calls() - before;
    r
}

/// Splits `label` until every feature in `features` has one truth value on
/// each piece.
fn split_by_features<A: LabelAlgebra>(
    alg: &A,
    label: A::Label,
    features: &[String],
) -> Result<Vec<(A::Label, FeatureConfig)>, LabelError> {
    let mut pieces = vec![(label, FeatureConfig::new())];
    for f in features {
        let (on, off) = alg.feature_literals(f)?;
        let mut next = Vec::with_capacity(pieces.len());
        for (l, cfg) in pieces {
            let with = alg.meet(&l, &on);
            let without = alg.meet(&l, &off);
            match (alg.is_empty(&with), alg.is_empty(&without)) {
                (false, true) => next.push((l, with_entry(cfg, f, true))),
                (true, false) => next.push((l, with_entry(cfg, f, false))),
                _ => {
                    if !alg.is_empty(&with) {
                        next.push((with, with_entry(cfg.clone(), f, true)));
                    }
                    if !alg.is_empty(&without) {
                        next.push((without, with_entry(cfg, f, false)));
                    }
                }
            }
        }
        pieces = next;
    }
    Ok(pieces)
}

fn with_entry(mut cfg: FeatureConfig, f: &str, b: bool) -> FeatureConfig {
    cfg.insert(f.to_string(), b);
    cfg
}

/// Shallow lifting of the whole program: the inputs' cross product is pruned
/// and the plain evaluator runs once per surviving tuple (per feature split).
pub fn eval_shallow_blackbox<A: LabelAlgebra>(
    alg: &A,
    p: &Program,
    env: &ModalEnv<A::Label>,
    stats: &mut LiftStats,
) -> Result<ModalResult<A::Label>, EvalModalError> {
    check_features(alg, p)?;
    let before = alg.sat_calls();
    let inputs = p.inputs();
    let mut args: Vec<&[(Value, A::Label)]> = Vec::with_capacity(inputs.len());
    for n in &inputs {
        args.push(env.get(n).ok_or_else(|| EvalModalError::MissingBinding(n.clone()))?.pairs());
    }
    let mut survivors = Vec::new();
    cross_product(alg, &args, stats, |t| {
        if !t.pruned {
            survivors.push(t);
        }
    });
    let features: Vec<String> = p.features_used().into_iter().collect();
    let mut out = ModalResult::empty();
    let mut runs = 0;
    for t in survivors {
        let plain: PlainEnv = inputs.iter().cloned().zip(t.values.iter().copied()).collect();
        let pieces = if features.is_empty() {
            vec![(t.label, FeatureConfig::new())]
        } else {
            split_by_features(alg, t.label, &features)?
        };
        for (label, cfg) in pieces {
            runs += 1;
            let config = (!features.is_empty()).then_some(&cfg);
            match eval_plain_counted(p, &plain, config, stats) {
                Ok(v) => out.values.push((v, label)),
                Err(EvalError::Runtime(k)) => out.errors.push((k, label)),
                Err(EvalError::MissingBinding(n)) => return Err(EvalModalError::MissingBinding(n)),
                Err(EvalError::UnknownFunction(n)) => return Err(EvalModalError::UnknownFunction(n)),
                Err(EvalError::MissingConfig(n)) => {
                    return Err(EvalModalError::FeatureInNonFeatureModality(alg.kind(), n))
                }
            }
        }
    }
    stats.record(PROGRAM_NAME, runs);
    stats.sat_calls += alg.sat_calls() - before;
    Ok(normalize_result(alg, out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{FeatureAlgebra, IntervalAlgebra, IntervalTag, Probability, ProbabilityAlgebra};
    use crate::lang::parse;
    use crate::modal::render_result;

    const SHARED: &str = "fun bar(a, b) = a * b; fun baz(c) = c + 1; \
                        fun foo(x, y, z) = bar(x, y) + baz(z); foo(x, y, z)";

    fn shared_calls_env(alg: &FeatureAlgebra) -> ModalEnv<crate::labels::Formula> {
        let mv = |pairs: &[(i64, &str)]| {
            ModalValue::from_pairs(pairs.iter().map(|(v, l)| (Value::Int(*v), alg.parse(l).unwrap())).collect())
        };
        [
            ("x", mv(&[(-7, "FA"), (3, "!FA")])),
            ("y", mv(&[(1, "FA & FB"), (8, "FA & !FB"), (4, "!FA & FB"), (10, "!FA & !FB")])),
            ("z", mv(&[(5, "true")])),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    #[test]
    fn shared_calls_deep_calls_baz_once() {
        let alg = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let p = parse(SHARED).unwrap();
        let mut stats = LiftStats::default();
        let opts = EvalOptions { check_invariants: true };
        let r = eval_modal(&alg, &p, &shared_calls_env(&alg), opts, &mut stats).unwrap();
        assert_eq!(
            render_result(&alg, &r),
            "-50 @ (FA & !FB)\n-1 @ (FA & FB)\n18 @ (!FA & FB)\n36 @ (!FA & !FB)\n"
        );
        assert_eq!(stats.applications_of("baz"), 1);
        assert_eq!(stats.applications_of("bar"), 1);
        assert_eq!(stats.applications_of("*"), 4);
    }

    #[test]
    fn shared_calls_shallow_calls_baz_four_times() {
        let alg = FeatureAlgebra::new(["FA", "FB"]).unwrap();
        let p = parse(SHARED).unwrap();
        let mut stats = LiftStats::default();
        let r = eval_shallow_blackbox(&alg, &p, &shared_calls_env(&alg), &mut stats).unwrap();
        assert_eq!((stats.tuples, stats.pruned, stats.applied), (8, 4, 4));
        assert_eq!(stats.applications_of("baz"), 4);
        assert_eq!(stats.applications_of(PROGRAM_NAME), 4);
        assert_eq!(
            render_result(&alg, &r),
            "-50 @ (FA & !FB)\n-1 @ (FA & FB)\n18 @ (!FA & FB)\n36 @ (!FA & !FB)\n"
        );
    }

    #[test]
    fn x_plus_x_is_correlated_by_labels() {
        let alg = FeatureAlgebra::new(["FA"]).unwrap();
        let p = parse("x + x").unwrap();
        let x = ModalValue::from_pairs(vec![
            (Value::Int(-7), alg.parse("FA").unwrap()),
            (Value::Int(3), alg.parse("!FA").unwrap()),
        ]);
        let env = [("x".to_string(), x)].into_iter().collect();
        let r = eval_modal(&alg, &p, &env, EvalOptions::default(), &mut LiftStats::default()).unwrap();
        assert_eq!(render_result(&alg, &r), "-14 @ FA\n6 @ !FA\n");
    }

    #[test]
    fn interval_absolute_value() {
        let p = parse("if x < 0 then 0 - x else x").unwrap();
        let x = ModalValue::from_pairs(vec![(Value::Int(-3), IntervalTag::Min), (Value::Int(9), IntervalTag::Max)]);
        let env = [("x".to_string(), x)].into_iter().collect();
        let opts = EvalOptions { check_invariants: true };
        let r = eval_modal(&IntervalAlgebra, &p, &env, opts, &mut LiftStats::default()).unwrap();
        assert_eq!(render_result(&IntervalAlgebra, &r), "[3 .. 9]\n");
    }

    #[test]
    fn constant_guard_skips_the_other_branch() {
        let alg = FeatureAlgebra::new(["FA"]).unwrap();
        let p = parse("if true then 1 + 2 else 3 * 4").unwrap();
        let mut stats = LiftStats::default();
        eval_modal(&alg, &p, &ModalEnv::new(), EvalOptions::default(), &mut stats).unwrap();
        assert_eq!(stats.applications_of("+"), 1);
        assert_eq!(stats.applications_of("*"), 0);
    }

    #[test]
    fn probability_scales_by_surviving_mass() {
        let p = parse("10 / x + y").unwrap();
        let w = |x: f64| Probability::new(x).unwrap();
        let x = ModalValue::from_pairs(vec![(Value::Int(0), w(0.25)), (Value::Int(5), w(0.75))]);
        let y = ModalValue::from_pairs(vec![(Value::Int(1), w(0.5)), (Value::Int(2), w(0.5))]);
        let env = [("x".to_string(), x), ("y".to_string(), y)].into_iter().collect();
        let opts = EvalOptions { check_invariants: true };
        let r = eval_modal(&ProbabilityAlgebra, &p, &env, opts, &mut LiftStats::default()).unwrap();
        // joint enumeration: x=0 fails regardless of y; x=5 gives 2 + y
        let expect = [(3, 0.75 * 0.5), (4, 0.75 * 0.5)];
        assert_eq!(r.values.len(), 2);
        for ((v, l), (ev, ew)) in r.values.iter().zip(expect) {
            assert_eq!(*v, Value::Int(ev));
            assert!((l.weight() - ew).abs() < 1e-12);
        }
        assert_eq!(r.errors.len(), 1);
        assert!((r.errors[0].1.weight() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_boolean_guard_is_a_labelled_error() {
        let alg = FeatureAlgebra::new(["FA"]).unwrap();
        let p = parse("if (if feature(\"FA\") then 1 else true) then 2 else 3").unwrap();
        let r = eval_modal(&alg, &p, &ModalEnv::new(), EvalOptions::default(), &mut LiftStats::default()).unwrap();
        assert_eq!(render_result(&alg, &r), "2 @ !FA\nerror:TypeMismatch @ FA\n");
    }

    #[test]
    fn feature_outside_feature_modality() {
        let p = parse("feature(\"FA\")").unwrap();
        let err = eval_modal(&IntervalAlgebra, &p, &ModalEnv::new(), EvalOptions::default(), &mut LiftStats::default());
        assert!(matches!(err, Err(EvalModalError::FeatureInNonFeatureModality(..))));
    }

    #[test]
    fn blackbox_on_constants_runs_once() {
        let alg = FeatureAlgebra::new(["FA"]).unwrap();
        let p = parse("1 + 2").unwrap();
        let mut stats = LiftStats::default();
        eval_shallow_blackbox(&alg, &p, &ModalEnv::new(), &mut stats).unwrap();
        assert_eq!(stats.applications_of(PROGRAM_NAME), 1);
    }
}
