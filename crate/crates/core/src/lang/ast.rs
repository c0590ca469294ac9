use std::collections::BTreeSet;
use std::fmt;

use crate::lifting::PrimitiveFn;
use crate::value::{ErrorKind, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Eq,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// The strict primitive behind the operator; `&&` and `||` short-circuit
    /// and have none.
    pub fn primitive(self) -> Option<&'static PrimitiveFn> {
        Some(match self {
            BinOp::Add => &ADD,
            BinOp::Sub => &SUB,
            BinOp::Mul => &MUL,
            BinOp::Div => &DIV,
            BinOp::Lt => &LT,
            BinOp::Le => &LE,
            BinOp::Eq => &EQ,
            BinOp::And | BinOp::Or => return None,
        })
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn ints(v: &[Value]) -> Result<(i64, i64), ErrorKind> {
    match (v[0], v[1]) {
        (Value::Int(a), Value::Int(b)) => Ok((a, b)),
        _ => Err(ErrorKind::TypeMismatch),
    }
}

fn add(v: &[Value]) -> Result<Value, ErrorKind> {
    let (a, b) = ints(v)?;
    a.checked_add(b).map(Value::Int).ok_or(ErrorKind::Overflow)
}

fn sub(v: &[Value]) -> Result<Value, ErrorKind> {
    let (a, b) = ints(v)?;
    a.checked_sub(b).map(Value::Int).ok_or(ErrorKind::Overflow)
}

fn mul(v: &[Value]) -> Result<Value, ErrorKind> {
    let (a, b) = ints(v)?;
    a.checked_mul(b).map(Value::Int).ok_or(ErrorKind::Overflow)
}

// truncates toward zero; i64::MIN / -1 overflows
fn div(v: &[Value]) -> Result<Value, ErrorKind> {
    let (a, b) = ints(v)?;
    if b == 0 {
        return Err(ErrorKind::DivByZero);
    }
    a.checked_div(b).map(Value::Int).ok_or(ErrorKind::Overflow)
}

fn lt(v: &[Value]) -> Result<Value, ErrorKind> {
    let (a, b) = ints(v)?;
    Ok(Value::Bool(a < b))
}

fn le(v: &[Value]) -> Result<Value, ErrorKind> {
    let (a, b) = ints(v)?;
    Ok(Value::Bool(a <= b))
}

fn eq(v: &[Value]) -> Result<Value, ErrorKind> {
    match (v[0], v[1]) {
        (Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a == b)),
        (Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a == b)),
        _ => Err(ErrorKind::TypeMismatch),
    }
}

fn not(v: &[Value]) -> Result<Value, ErrorKind> {
    v[0].as_bool().map(|b| Value::Bool(!b)).ok_or(ErrorKind::TypeMismatch)
}

pub const ADD: PrimitiveFn = PrimitiveFn { name: "+", arity: 2, apply: add };
pub const SUB: PrimitiveFn = PrimitiveFn { name: "-", arity: 2, apply: sub };
pub const MUL: PrimitiveFn = PrimitiveFn { name: "*", arity: 2, apply: mul };
pub const DIV: PrimitiveFn = PrimitiveFn { name: "/", arity: 2, apply: div };
pub const LT: PrimitiveFn = PrimitiveFn { name: "<", arity: 2, apply: lt };
pub const LE: PrimitiveFn = PrimitiveFn { name: "<=", arity: 2, apply: le };
pub const EQ: PrimitiveFn = PrimitiveFn { name: "==", arity: 2, apply: eq };
pub const NOT: PrimitiveFn = PrimitiveFn { name: "!", arity: 1, apply: not };

/// Names under which primitive applications are counted.
pub const PRIMITIVE_NAMES: [&str; 8] = ["+", "-", "*", "/", "<", "<=", "==", "!"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    Let(String, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Call(String, Vec<Expr>),
    Feature(String),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn if_(g: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(g), Box::new(t), Box::new(e))
    }

    pub fn let_(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let(name.to_string(), Box::new(bound), Box::new(body))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Feature(_) => {}
            Expr::Var(n) => {
                if !bound.contains(n) && !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Expr::Let(n, e1, e2) => {
                e1.collect_free(bound, out);
                bound.push(n.clone());
                e2.collect_free(bound, out);
                bound.pop();
            }
            Expr::If(g, t, e) => {
                g.collect_free(bound, out);
                t.collect_free(bound, out);
                e.collect_free(bound, out);
            }
            Expr::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Not(a) => a.collect_free(bound, out),
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
        }
    }

    pub(crate) fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Let(_, a, b) | Expr::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::If(g, t, e) => {
                g.visit(f);
                t.visit(f);
                e.visit(f);
            }
            Expr::Not(a) => a.visit(f),
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit(f)),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
}

/// Non-recursive first-order function definitions followed by a main
/// expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub fundefs: Vec<FunDef>,
    pub main: Expr,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FunDef> {
        self.fundefs.iter().find(|f| f.name == name)
    }

    /// Free variables of `main`; these are the program's inputs.
    pub fn inputs(&self) -> Vec<String> {
        self.main.free_vars()
    }

    /// Feature names reachable from `main` through calls, sorted.
    pub fn features_used(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut visited = BTreeSet::new();
        let mut pending = vec![&self.main];
        while let Some(e) = pending.pop() {
            e.visit(&mut |n| match n {
                Expr::Feature(name) => {
                    out.insert(name.clone());
                }
                Expr::Call(fname, _)
                    if visited.insert(fname.clone()) => {
                        if let Some(f) = self.function(fname) {
                            pending.push(&f.body);
                        }
                    }
                _ => {}
            });
        }
        out
    }

    /// True when no input, parameter or let-bound name is referenced more
    /// than once along the evaluation (a parameter's uses multiply the uses of
    /// its argument) and no feature tests occur.
    pub fn is_linear(&self) -> bool {
        fn uses(p: &Program, e: &Expr, name: &str) -> usize {
            match e {
                Expr::Var(n) => usize::from(n == name),
                Expr::Int(_) | Expr::Bool(_) | Expr::Feature(_) => 0,
                Expr::Let(n, a, b) => uses(p, a, name) + if n == name { 0 } else { uses(p, b, name) },
                Expr::If(g, t, e) => uses(p, g, name) + uses(p, t, name) + uses(p, e, name),
                Expr::Bin(_, a, b) => uses(p, a, name) + uses(p, b, name),
                Expr::Not(a) => uses(p, a, name),
                Expr::Call(f, args) => {
                    let def = p.function(f);
                    args.iter()
                        .enumerate()
                        .map(|(i, a)| {
                            let n = uses(p, a, name);
                            let param_uses = def.map_or(1, |d| uses(p, &d.body, &d.params[i]));
                            n * param_uses.max(1)
                        })
                        .sum()
                }
            }
        }
        fn lets_linear(p: &Program, e: &Expr) -> bool {
            let mut ok = true;
            e.visit(&mut |n| {
                if let Expr::Let(name, _, body) = n {
                    ok &= uses(p, body, name) <= 1;
                }
            });
            ok
        }
        let no_features = self.features_used().is_empty();
        no_features
            && self.inputs().iter().all(|v| uses(self, &self.main, v) <= 1)
            && lets_linear(self, &self.main)
            && self.fundefs.iter().all(|f| {
                lets_linear(self, &f.body) && f.params.iter().all(|x| uses(self, &f.body, x) <= 1)
            })
    }
}
