//! The expression language: syntax tree, parser, printer and the single-world
//! reference evaluator.

mod ast;
mod parser;
mod plain;
mod render;

pub use ast::{BinOp, Expr, FunDef, Program, ADD, DIV, EQ, LE, LT, MUL, NOT, PRIMITIVE_NAMES, SUB};
pub use parser::{parse, LoadError};
pub use plain::{eval_plain, eval_plain_counted, EvalError, FeatureConfig, PlainEnv};
pub use render::render;
