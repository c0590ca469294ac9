use std::fmt::Write as _;

use super::ast::{Expr, Program};

/// Prints a program in concrete syntax that parses back to the same tree.
/// Binary operators are fully parenthesized. Negative literals have no
/// concrete syntax and print as a subtraction from zero.
pub fn render(p: &Program) -> String {
    let mut out = String::new();
    for f in &p.fundefs {
        let _ = write!(out, "fun {}({}) = ", f.name, f.params.join(", "));
        expr(&f.body, &mut out);
        out.push_str(";\n");
    }
    expr(&p.main, &mut out);
    out.push('\n');
    out
}

fn expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Int(n) if *n < 0 => {
            let _ = write!(out, "(0 - {})", n.unsigned_abs());
        }
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Var(n) => out.push_str(n),
        Expr::Feature(n) => {
            let _ = write!(out, "feature(\"{n}\")");
        }
        Expr::Let(n, a, b) => {
            let _ = write!(out, "(let {n} = ");
            expr(a, out);
            out.push_str(" in ");
            expr(b, out);
            out.push(')');
        }
        Expr::If(g, t, f) => {
            out.push_str("(if ");
            expr(g, out);
            out.push_str(" then ");
            expr(t, out);
            out.push_str(" else ");
            expr(f, out);
            out.push(')');
        }
        Expr::Bin(op, a, b) => {
            out.push('(');
            expr(a, out);
            let _ = write!(out, " {op} ");
            expr(b, out);
            out.push(')');
        }
        Expr::Not(a) => {
            out.push('!');
            expr(a, out);
        }
        Expr::Call(f, args) => {
            out.push_str(f);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(a, out);
            }
            out.push(')');
        }
    }
}
