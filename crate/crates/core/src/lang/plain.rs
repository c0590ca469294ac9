//! Single-world evaluation. This is the reference semantics every lifted
//! evaluator is checked against.

use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{BinOp, Expr, Program, NOT};
use crate::lifting::{LiftStats, PrimitiveFn};
use crate::value::{ErrorKind, Value};

/// Truth value of each feature in one product.
pub type FeatureConfig = BTreeMap<String, bool>;

pub type PlainEnv = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{0}")]
    Runtime(ErrorKind),
    #[error("no binding for `{0}`")]
    MissingBinding(String),
    #[error("feature `{0}` needs a configuration")]
    MissingConfig(String),
    #[error("undefined function `{0}`")]
    UnknownFunction(String),
}

impl From<ErrorKind> for EvalError {
    fn from(e: ErrorKind) -> Self {
        EvalError::Runtime(e)
    }
}

impl EvalError {
    /// The per-world error kind, if this is one.
    pub fn runtime_kind(&self) -> Option<ErrorKind> {
        match self {
            EvalError::Runtime(k) => Some(*k),
            _ => None,
        }
    }
}

struct Plain<'a> {
    program: &'a Program,
    config: Option<&'a FeatureConfig>,
    stats: Option<&'a mut LiftStats>,
}

impl Plain<'_> {
    fn count(&mut self, name: &str) {
        if let Some(s) = self.stats.as_deref_mut() {
            s.record(name, 1);
        }
    }

    fn apply(&mut self, f: &PrimitiveFn, args: &[Value]) -> Result<Value, EvalError> {
        self.count(f.name);
        Ok((f.apply)(args)?)
    }

    fn boolean(v: Value) -> Result<bool, EvalError> {
        v.as_bool().ok_or(EvalError::Runtime(ErrorKind::TypeMismatch))
    }

    fn eval(&mut self, e: &Expr, scope: &mut Vec<(String, Value)>) -> Result<Value, EvalError> {
        match e {
            Expr::Int(n) => Ok(Value::Int(*n)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Var(n) => scope
                .iter()
                .rev()
                .find(|(k, _)| k == n)
                .map(|(_, v)| *v)
                .ok_or_else(|| EvalError::MissingBinding(n.clone())),
            Expr::Feature(n) => self
                .config
                .and_then(|c| c.get(n))
                .map(|b| Value::Bool(*b))
                .ok_or_else(|| EvalError::MissingConfig(n.clone())),
            Expr::Let(n, a, b) => {
                let v = self.eval(a, scope)?;
                scope.push((n.clone(), v));
                let r = self.eval(b, scope);
                scope.pop();
                r
            }
            Expr::If(g, t, f) => {
                let g = Self::boolean(self.eval(g, scope)?)?;
                self.eval(if g { t } else { f }, scope)
            }
            Expr::Bin(op @ (BinOp::And | BinOp::Or), a, b) => {
                let a = Self::boolean(self.eval(a, scope)?)?;
                if a == (*op == BinOp::Or) {
                    return Ok(Value::Bool(a));
                }
                Ok(Value::Bool(Self::boolean(self.eval(b, scope)?)?))
            }
            Expr::Bin(op, a, b) => {
                let a = self.eval(a, scope)?;
                let b = self.eval(b, scope)?;
                let f = op.primitive().expect("strict operator");
                self.apply(f, &[a, b])
            }
            Expr::Not(a) => {
                let a = self.eval(a, scope)?;
                self.apply(&NOT, &[a])
            }
            Expr::Call(name, args) => {
                let def = self
                    .program
                    .function(name)
                    .ok_or_else(|| EvalError::UnknownFunction(name.clone()))?;
                let mut frame = Vec::with_capacity(args.len());
                for (x, a) in def.params.iter().zip(args) {
                    frame.push((x.clone(), self.eval(a, scope)?));
                }
                self.count(name);
                self.eval(&def.body, &mut frame)
            }
        }
    }
}

/// Call-by-value evaluation of `main` in one world.
pub fn eval_plain(p: &Program, env: &PlainEnv, config: Option<&FeatureConfig>) -> Result<Value, EvalError> {
    let mut ev = Plain {
        program: p,
        config,
        stats: None,
    };
    let mut scope: Vec<(String, Value)> = env.iter().map(|(k, v)| (k.clone(), *v)).collect();
    ev.eval(&p.main, &mut scope)
}

/// As [`eval_plain`], also counting every primitive and function application
/// into `stats`.
pub fn eval_plain_counted(
    p: &Program,
    env: &PlainEnv,
    config: Option<&FeatureConfig>,
    stats: &mut LiftStats,
) -> Result<Value, EvalError> {
    let mut ev = Plain {
        program: p,
        config,
        stats: Some(stats),
    };
    let mut scope: Vec<(String, Value)> = env.iter().map(|(k, v)| (k.clone(), *v)).collect();
    ev.eval(&p.main, &mut scope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    const IFDEF: &str = "fun foo(x, y) = let c = if feature(\"FA\") then 0 + 1 else 0 in \
                            if feature(\"FB\") then (x + y) / c else (x + c) / y; foo(x, y)";

    fn env(pairs: &[(&str, i64)]) -> PlainEnv {
        pairs.iter().map(|(k, v)| (k.to_string(), Value::Int(*v))).collect()
    }

    fn config(fa: bool, fb: bool) -> FeatureConfig {
        [("FA".to_string(), fa), ("FB".to_string(), fb)].into_iter().collect()
    }

    #[test]
    fn ifdef_div_configurations() {
        let p = parse(IFDEF).unwrap();
        let e = env(&[("x", 6), ("y", 3)]);
        assert_eq!(
            eval_plain(&p, &e, Some(&config(false, true))),
            Err(EvalError::Runtime(ErrorKind::DivByZero))
        );
        assert_eq!(eval_plain(&p, &e, Some(&config(true, true))), Ok(Value::Int(9)));
        assert_eq!(eval_plain(&p, &e, Some(&config(true, false))), Ok(Value::Int(2)));
        assert_eq!(eval_plain(&p, &e, Some(&config(false, false))), Ok(Value::Int(2)));
    }

    #[test]
    fn unary_minus() {
        let p = parse("0 - 7").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Ok(Value::Int(-7)));
        let p = parse("-7").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Ok(Value::Int(-7)));
    }

    #[test]
    fn short_circuit() {
        let p = parse("false && (1 / 0 == 0)").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Ok(Value::Bool(false)));
        let p = parse("true || (1 / 0 == 0)").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Ok(Value::Bool(true)));
        let p = parse("true && 3").unwrap();
        assert_eq!(
            eval_plain(&p, &PlainEnv::new(), None),
            Err(EvalError::Runtime(ErrorKind::TypeMismatch))
        );
    }

    #[test]
    fn arithmetic_errors() {
        let run = |src: &str| eval_plain(&parse(src).unwrap(), &PlainEnv::new(), None);
        assert_eq!(run("9223372036854775807 + 1"), Err(EvalError::Runtime(ErrorKind::Overflow)));
        assert_eq!(run("0 - 7 / 2"), Ok(Value::Int(-3)));
        assert_eq!(run("(0 - 7) / 2"), Ok(Value::Int(-3)));
        assert_eq!(run("1 + true"), Err(EvalError::Runtime(ErrorKind::TypeMismatch)));
        assert_eq!(run("if 1 then 2 else 3"), Err(EvalError::Runtime(ErrorKind::TypeMismatch)));
    }

    #[test]
    fn missing_inputs() {
        let p = parse("x + 1").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Err(EvalError::MissingBinding("x".into())));
        let p = parse("feature(\"FA\")").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Err(EvalError::MissingConfig("FA".into())));
    }

    #[test]
    fn shadowing_and_fresh_frames() {
        let p = parse("fun f(a) = a * 2; let a = 1 in let a = a + 10 in f(a) + a").unwrap();
        assert_eq!(eval_plain(&p, &PlainEnv::new(), None), Ok(Value::Int(33)));
    }

    #[test]
    fn counted_evaluation() {
        let p = parse("fun bar(a, b) = a * b; fun baz(c) = c + 1; fun foo(x, y, z) = bar(x, y) + baz(z); foo(a, b, c)")
            .unwrap();
        let mut stats = LiftStats::default();
        let e = env(&[("a", -7), ("b", 1), ("c", 5)]);
        assert_eq!(eval_plain_counted(&p, &e, None, &mut stats), Ok(Value::Int(-1)));
        assert_eq!(stats.applications_of("baz"), 1);
        assert_eq!(stats.applications_of("+"), 2);
        assert_eq!(stats.applications_of("*"), 1);
    }
}
