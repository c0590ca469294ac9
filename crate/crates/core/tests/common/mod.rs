//! Seeded random programs and bindings for the oracle comparisons.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use modal_lift::eval::ModalEnv;
use modal_lift::labels::{FeatureAlgebra, Formula, IntervalTag, LabelAlgebra, Probability};
use modal_lift::lang::{BinOp, Expr, FunDef, Program};
use modal_lift::modal::ModalValue;
use modal_lift::Value;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub const MAX_DEPTH: usize = 6;
pub const MAX_FEATURES: usize = 4;
pub const MAX_BINDINGS: usize = 5;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Shape {
    Feature,
    Interval,
    /// Every input, parameter and let-bound name used at most once; no
    /// feature tests.
    Linear,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    shape: Shape,
    features: usize,
    /// Names in scope with their types; in linear mode a name is removed once
    /// used.
    vars: Vec<(String, Ty)>,
    funs: Vec<(String, usize)>,
    fresh: usize,
}

impl Gen<'_> {
    fn linear(&self) -> bool {
        self.shape == Shape::Linear
    }

    fn literal(&mut self, ty: Ty) -> Expr {
        match ty {
            Ty::Int => Expr::Int(self.rng.gen_range(0..=9)),
            Ty::Bool => Expr::Bool(self.rng.gen()),
        }
    }

    fn var(&mut self, ty: Ty) -> Option<Expr> {
        let candidates: Vec<usize> = (0..self.vars.len()).filter(|&i| self.vars[i].1 == ty).collect();
        let &i = candidates.choose(self.rng)?;
        let name = self.vars[i].0.clone();
        if self.linear() {
            self.vars.remove(i);
        }
        Some(Expr::Var(name))
    }

    fn leaf(&mut self, ty: Ty) -> Expr {
        if self.shape == Shape::Feature && ty == Ty::Bool && self.features > 0 && self.rng.gen_bool(0.5) {
            return Expr::Feature(format!("F{}", self.rng.gen_range(0..self.features)));
        }
        if self.rng.gen_bool(0.7) {
            if let Some(v) = self.var(ty) {
                return v;
            }
        }
        self.literal(ty)
    }

    fn expr(&mut self, ty: Ty, depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(ty);
        }
        let d = depth - 1;
        match (ty, self.rng.gen_range(0..10)) {
            (_, 0) => {
                let g = self.expr(Ty::Bool, d);
                let t = self.expr(ty, d);
                let e = self.expr(ty, d);
                Expr::if_(g, t, e)
            }
            (_, 1) => {
                let bound_ty = if self.rng.gen_bool(0.8) { Ty::Int } else { Ty::Bool };
                let bound = self.expr(bound_ty, d);
                self.fresh += 1;
                let name = format!("v{}", self.fresh);
                self.vars.push((name.clone(), bound_ty));
                let body = self.expr(ty, d);
                self.vars.retain(|(n, _)| *n != name);
                Expr::let_(&name, bound, body)
            }
            (Ty::Int, 2) if !self.funs.is_empty() => {
                let (f, arity) = self.funs.choose(self.rng).cloned().expect("non-empty");
                let args = (0..arity).map(|_| self.expr(Ty::Int, d)).collect();
                Expr::Call(f, args)
            }
            (Ty::Int, _) => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div].choose(self.rng).expect("ops");
                let a = self.expr(Ty::Int, d);
                let b = self.expr(Ty::Int, d);
                Expr::bin(op, a, b)
            }
            (Ty::Bool, 2 | 3) => Expr::not(self.expr(Ty::Bool, d)),
            (Ty::Bool, 4 | 5) => {
                let op = if self.rng.gen() { BinOp::And } else { BinOp::Or };
                let a = self.expr(Ty::Bool, d);
                let b = self.expr(Ty::Bool, d);
                Expr::bin(op, a, b)
            }
            (Ty::Bool, 6) => {
                let a = self.expr(Ty::Bool, d);
                let b = self.expr(Ty::Bool, d);
                Expr::bin(BinOp::Eq, a, b)
            }
            (Ty::Bool, _) => {
                let op = *[BinOp::Lt, BinOp::Le, BinOp::Eq].choose(self.rng).expect("ops");
                let a = self.expr(Ty::Int, d);
                let b = self.expr(Ty::Int, d);
                Expr::bin(op, a, b)
            }
        }
    }
}

/// A random well-typed program over inputs `x0..` with up to two helper
/// functions. Returns the program and its input names.
pub fn program(rng: &mut ChaCha8Rng, shape: Shape, features: usize, inputs: usize) -> Program {
    let mut g = Gen {
        rng,
        shape,
        features,
        vars: Vec::new(),
        funs: Vec::new(),
        fresh: 0,
    };
    let mut fundefs = Vec::new();
    for i in 0..g.rng.gen_range(0..=2) {
        let arity = g.rng.gen_range(1..=3);
        let params: Vec<String> = (0..arity).map(|j| format!("p{i}_{j}")).collect();
        g.vars = params.iter().map(|p| (p.clone(), Ty::Int)).collect();
        let depth = g.rng.gen_range(1..=3);
        let body = g.expr(Ty::Int, depth);
        let name = format!("f{i}");
        fundefs.push(FunDef {
            name: name.clone(),
            params,
            body,
        });
        g.funs.push((name, arity));
    }
    g.vars = (0..inputs).map(|i| (format!("x{i}"), Ty::Int)).collect();
    let depth = g.rng.gen_range(2..=MAX_DEPTH);
    let main = g.expr(Ty::Int, depth);
    Program { fundefs, main }
}

fn small(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(-4..=9)
}

/// A random partition of the configurations by a decision tree over features.
fn tree_partition(alg: &FeatureAlgebra, rng: &mut ChaCha8Rng, path: Formula, free: &[usize], out: &mut Vec<(Value, Formula)>) {
    if free.is_empty() || rng.gen_bool(0.35) {
        out.push((Value::Int(small(rng)), path));
        return;
    }
    let k = rng.gen_range(0..free.len());
    let f = free[k];
    let rest: Vec<usize> = free.iter().copied().filter(|&g| g != f).collect();
    let (on, off) = alg.feature_literals(&format!("F{f}")).expect("declared");
    tree_partition(alg, rng, alg.meet(&path, &on), &rest, out);
    tree_partition(alg, rng, alg.meet(&path, &off), &rest, out);
}

pub fn feature_env(alg: &FeatureAlgebra, rng: &mut ChaCha8Rng, inputs: usize) -> ModalEnv<Formula> {
    let all: Vec<usize> = (0..alg.features().len()).collect();
    (0..inputs)
        .map(|i| {
            let mut pairs = Vec::new();
            tree_partition(alg, rng, alg.tt(), &all, &mut pairs);
            (format!("x{i}"), ModalValue::from_pairs(pairs))
        })
        .collect()
}

pub fn interval_env(rng: &mut ChaCha8Rng, inputs: usize) -> ModalEnv<IntervalTag> {
    (0..inputs)
        .map(|i| {
            let lo = small(rng);
            let hi = lo + rng.gen_range(0..=6);
            let mv = ModalValue::from_pairs(vec![(Value::Int(lo), IntervalTag::Min), (Value::Int(hi), IntervalTag::Max)]);
            (format!("x{i}"), mv)
        })
        .collect()
}

pub fn probability_env(rng: &mut ChaCha8Rng, inputs: usize) -> ModalEnv<Probability> {
    (0..inputs)
        .map(|i| {
            let n = rng.gen_range(1..=3);
            let mut values: Vec<i64> = Vec::new();
            while values.len() < n {
                let v = small(rng);
                if !values.contains(&v) {
                    values.push(v);
                }
            }
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut used = 0.0;
            let mut pairs = Vec::new();
            for (j, v) in values.into_iter().enumerate() {
                let w = if j + 1 == n { 1.0 - used } else { raw[j] / total };
                used += w;
                pairs.push((Value::Int(v), Probability::new(w).expect("weight in range")));
            }
            (format!("x{i}"), ModalValue::from_pairs(pairs))
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feature names `F0..F{k-1}`.
pub fn feature_algebra(k: usize) -> FeatureAlgebra {
    FeatureAlgebra::new((0..k).map(|i| format!("F{i}"))).expect("small feature set")
}
