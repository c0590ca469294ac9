//! Ground truth by brute force: enumerate every world, project the inputs,
//! run the plain evaluator, and label each outcome with its world.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::eval::ModalEnv;
use crate::labels::{
    Endpoint, FeatureAlgebra, IntervalAlgebra, IntervalTag, LabelAlgebra, LabelError, Probability,
    ProbabilityAlgebra, World, TOTAL_TOLERANCE,
};
use crate::lang::{eval_plain, EvalError, FeatureConfig, PlainEnv, Program};
use crate::modal::{normalize_result, project, project_result, ModalError, ModalResult};
use crate::value::{ErrorKind, Value};

/// Most features a configuration enumeration may range over.
pub const MAX_ORACLE_FEATURES: usize = 20;
/// Most joint outcomes a probability enumeration may visit.
pub const MAX_JOINT_WORLDS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("enumeration needs {count} {what}, over the limit of {limit}")]
    BudgetExceeded { what: &'static str, count: u128, limit: u128 },
    #[error("no binding for `{0}`")]
    MissingBinding(String),
    #[error("plain evaluation failed: {0}")]
    Eval(EvalError),
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// One concrete world: its label, its weight and the inputs projected onto it.
#[derive(Debug, Clone)]
pub struct OracleWorld<L> {
    pub world: World,
    pub label: L,
    pub weight: f64,
    pub env: PlainEnv,
    pub config: Option<FeatureConfig>,
}

/// Algebras whose worlds can be listed one by one.
pub trait Enumerable: LabelAlgebra {
    fn enumerate_worlds(&self, env: &ModalEnv<Self::Label>) -> Result<Vec<OracleWorld<Self::Label>>, OracleError>;

    /// Worlds at which two results are compared by projection; `None` when
    /// results are compared as distributions instead.
    fn projection_worlds(&self) -> Option<Vec<World>>;
}

fn project_env<A: LabelAlgebra>(alg: &A, env: &ModalEnv<A::Label>, w: &World) -> Result<PlainEnv, OracleError> {
    env.iter()
        .map(|(k, mv)| Ok((k.clone(), project(alg, mv, w)?)))
        .collect()
}

impl Enumerable for FeatureAlgebra {
    fn enumerate_worlds(&self, env: &ModalEnv<Self::Label>) -> Result<Vec<OracleWorld<Self::Label>>, OracleError> {
        let k = self.features().len();
        if k > MAX_ORACLE_FEATURES {
            return Err(OracleError::BudgetExceeded {
                what: "features",
                count: k as u128,
                limit: MAX_ORACLE_FEATURES as u128,
            });
        }
        self.configurations()
            .map(|bits| {
                let world = World::Config(bits.clone());
                let config = self.features().iter().cloned().zip(bits.iter().copied()).collect();
                Ok(OracleWorld {
                    env: project_env(self, env, &world)?,
                    label: self.minterm(&bits),
                    world,
                    weight: 1.0,
                    config: Some(config),
                })
            })
            .collect()
    }

    fn projection_worlds(&self) -> Option<Vec<World>> {
        Some(self.configurations().map(World::Config).collect())
    }
}

impl Enumerable for IntervalAlgebra {
    fn enumerate_worlds(&self, env: &ModalEnv<Self::Label>) -> Result<Vec<OracleWorld<Self::Label>>, OracleError> {
        [Endpoint::Min, Endpoint::Max]
            .into_iter()
            .map(|e| {
                let world = World::Endpoint(e);
                Ok(OracleWorld {
                    env: project_env(self, env, &world)?,
                    label: IntervalTag::from_endpoint(e),
                    world,
                    weight: 1.0,
                    config: None,
                })
            })
            .collect()
    }

    fn projection_worlds(&self) -> Option<Vec<World>> {
        Some(vec![World::Endpoint(Endpoint::Min), World::Endpoint(Endpoint::Max)])
    }
}

impl Enumerable for ProbabilityAlgebra {
    /// The joint distribution of independent inputs.
    fn enumerate_worlds(&self, env: &ModalEnv<Self::Label>) -> Result<Vec<OracleWorld<Self::Label>>, OracleError> {
        let vars: Vec<(&String, &[(Value, Probability)])> = env.iter().map(|(k, v)| (k, v.pairs())).collect();
        let count = vars.iter().fold(1u128, |n, (_, s)| n.saturating_mul(s.len() as u128));
        if count > MAX_JOINT_WORLDS {
            return Err(OracleError::BudgetExceeded {
                what: "joint outcomes",
                count,
                limit: MAX_JOINT_WORLDS,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut index = vec![0usize; vars.len()];
        for _ in 0..count {
            let mut weight = 1.0;
            let mut plain = PlainEnv::new();
            for ((name, support), &i) in vars.iter().zip(&index) {
                weight *= support[i].1.weight();
                plain.insert((*name).clone(), support[i].0);
            }
            out.push(OracleWorld {
                world: World::Joint(index.clone()),
                label: Probability::new(weight)?,
                weight,
                env: plain,
                config: None,
            });
            for pos in (0..vars.len()).rev() {
                index[pos] += 1;
                if index[pos] < vars[pos].1.len() {
                    break;
                }
                index[pos] = 0;
            }
        }
        Ok(out)
    }

    fn projection_worlds(&self) -> Option<Vec<World>> {
        None
    }
}

/// Runs `p` in every world and aggregates the labelled outcomes.
pub fn brute_force_eval<A: Enumerable>(
    alg: &A,
    p: &Program,
    env: &ModalEnv<A::Label>,
) -> Result<ModalResult<A::Label>, OracleError> {
    if let Some(n) = p.inputs().into_iter().find(|n| !env.contains_key(n)) {
        return Err(OracleError::MissingBinding(n));
    }
    let mut out = ModalResult::empty();
    for w in alg.enumerate_worlds(env)? {
        match eval_plain(p, &w.env, w.config.as_ref()) {
            Ok(v) => out.values.push((v, w.label)),
            Err(EvalError::Runtime(k)) => out.errors.push((k, w.label)),
            Err(other) => return Err(OracleError::Eval(other)),
        }
    }
    Ok(normalize_result(alg, out)?)
}

/// Where two results first disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub world: Option<World>,
    pub detail: String,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.world {
            Some(w) => write!(f, "at world {w}: {}", self.detail),
            None => f.write_str(&self.detail),
        }
    }
}

fn outcome_text(o: &Result<Result<Value, ErrorKind>, ModalError>) -> String {
    match o {
        Ok(Ok(v)) => v.to_string(),
        Ok(Err(k)) => format!("error:{k}"),
        Err(e) => format!("<{e}>"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    Value(Value),
    Error(ErrorKind),
}

/// Denotational equality of two results: equal outcomes at every world, or
/// equal distributions within the probability tolerance.
pub fn assert_equiv<A: Enumerable>(alg: &A, a: &ModalResult<A::Label>, b: &ModalResult<A::Label>) -> Result<(), Divergence> {
    match alg.projection_worlds() {
        Some(worlds) => {
            for w in worlds {
                let (x, y) = (project_result(alg, a, &w), project_result(alg, b, &w));
                if x.is_err() || y.is_err() || x != y {
                    return Err(Divergence {
                        detail: format!("{} vs {}", outcome_text(&x), outcome_text(&y)),
                        world: Some(w),
                    });
                }
            }
            Ok(())
        }
        None => {
            let as_weights = |r: &ModalResult<A::Label>| -> Result<BTreeMap<Outcome, f64>, Divergence> {
                let mut m = BTreeMap::new();
                for (v, l) in &r.values {
                    *m.entry(Outcome::Value(*v)).or_insert(0.0) += weight_of(alg, l)?;
                }
                for (k, l) in &r.errors {
                    *m.entry(Outcome::Error(*k)).or_insert(0.0) += weight_of(alg, l)?;
                }
                Ok(m)
            };
            let (ma, mb) = (as_weights(a)?, as_weights(b)?);
            for key in ma.keys().chain(mb.keys()) {
                let (wa, wb) = (ma.get(key).copied().unwrap_or(0.0), mb.get(key).copied().unwrap_or(0.0));
                if (wa - wb).abs() > TOTAL_TOLERANCE {
                    let name = match key {
                        Outcome::Value(v) => v.to_string(),
                        Outcome::Error(k) => format!("error:{k}"),
                    };
                    return Err(Divergence {
                        world: None,
                        detail: format!("weight of {name}: {wa:.12} vs {wb:.12}"),
                    });
                }
            }
            Ok(())
        }
    }
}

fn weight_of<A: LabelAlgebra>(alg: &A, l: &A::Label) -> Result<f64, Divergence> {
    alg.weight(l).ok_or_else(|| Divergence {
        world: None,
        detail: format!("label {} is not a weight", alg.canonical_text(l)),
    })
}
