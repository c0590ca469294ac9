//! Lexer and recursive-descent parser for `.mdl` programs.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::ast::{BinOp, Expr, FunDef, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("scope error: {0}")]
    Scope(String),
    #[error("cyclic call chain: {0}")]
    CyclicCall(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Str(String),
    Fun,
    Let,
    In,
    If,
    Then,
    Else,
    True,
    False,
    Feature,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    EqEq,
    AndAnd,
    OrOr,
    Bang,
    LParen,
    RParen,
    Comma,
    Assign,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Fun => "fun",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Feature => "feature",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::EqEq => "==",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Assign => "=",
            Tok::Semi => ";",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, LoadError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| LoadError::Syntax { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let n = text
                .parse::<i64>()
                .map_err(|_| err(start_line, start_col, format!("integer literal `{text}` out of range")))?;
            Tok::Int(n)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            match word.as_str() {
                "fun" => Tok::Fun,
                "let" => Tok::Let,
                "in" => Tok::In,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "true" => Tok::True,
                "false" => Tok::False,
                "feature" => Tok::Feature,
                _ => Tok::Ident(word),
            }
        } else if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(err(start_line, start_col, "unterminated string".into()));
            }
            let s: String = chars[start..i].iter().collect();
            i += 1;
            col += s.chars().count() + 2;
            Tok::Str(s)
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let (tok, width) = match two.as_str() {
                "<=" => (Tok::Le, 2),
                "==" => (Tok::EqEq, 2),
                "&&" => (Tok::AndAnd, 2),
                "||" => (Tok::OrOr, 2),
                _ => (
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '<' => Tok::Lt,
                        '!' => Tok::Bang,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '=' => Tok::Assign,
                        ';' => Tok::Semi,
                        _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
                    },
                    1,
                ),
            };
            i += width;
            col += width;
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> LoadError {
        let s = &self.toks[self.pos];
        LoadError::Syntax {
            line: s.line,
            col: s.col,
            message,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), LoadError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`, found {}", want.spelling(), self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, LoadError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn program(&mut self) -> Result<Program, LoadError> {
        let mut fundefs = Vec::new();
        while *self.peek() == Tok::Fun {
            fundefs.push(self.fundef()?);
        }
        let main = self.expr()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(format!("unexpected {} after main expression", self.peek().describe())));
        }
        Ok(Program { fundefs, main })
    }

    fn fundef(&mut self) -> Result<FunDef, LoadError> {
        self.expect(Tok::Fun)?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            params.push(self.ident()?);
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Assign)?;
        let body = self.expr()?;
        self.expect(Tok::Semi)?;
        Ok(FunDef { name, params, body })
    }

    fn expr(&mut self) -> Result<Expr, LoadError> {
        match self.peek() {
            Tok::Let => {
                self.bump();
                let name = self.ident()?;
                self.expect(Tok::Assign)?;
                let bound = self.expr()?;
                self.expect(Tok::In)?;
                let body = self.expr()?;
                Ok(Expr::let_(&name, bound, body))
            }
            Tok::If => {
                self.bump();
                let g = self.expr()?;
                self.expect(Tok::Then)?;
                let t = self.expr()?;
                self.expect(Tok::Else)?;
                let e = self.expr()?;
                Ok(Expr::if_(g, t, e))
            }
            _ => self.binary(0),
        }
    }

    fn binary_op(&self, level: usize) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::EqEq => BinOp::Eq,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            _ => return None,
        };
        (precedence(op) == level).then_some(op)
    }

    // levels: 0 `||`, 1 `&&`, 2 comparisons, 3 additive, 4 multiplicative
    fn binary(&mut self, level: usize) -> Result<Expr, LoadError> {
        if level > 4 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binary_op(level) {
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, LoadError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::not(self.unary()?))
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::bin(BinOp::Sub, Expr::Int(0), self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, LoadError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::Var(name));
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Call(name, args))
            }
            Tok::Feature => {
                self.bump();
                self.expect(Tok::LParen)?;
                let name = match self.bump() {
                    Tok::Str(s) => s,
                    other => {
                        self.pos -= 1;
                        return Err(self.error(format!("expected feature name string, found {}", other.describe())));
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(Expr::Feature(name))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Let | Tok::If => self.expr(),
            other => Err(self.error(format!("expected expression, found {}", other.describe()))),
        }
    }
}

pub(crate) fn precedence(op: BinOp) -> usize {
    match op {
        BinOp::Or => 0,
        BinOp::And => 1,
        BinOp::Lt | BinOp::Le | BinOp::Eq => 2,
        BinOp::Add | BinOp::Sub => 3,
        BinOp::Mul | BinOp::Div => 4,
    }
}

/// Parses and load-checks a program.
pub fn parse(text: &str) -> Result<Program, LoadError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let program = p.program()?;
    check(&program)?;
    Ok(program)
}

fn calls(e: &Expr) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    e.visit(&mut |n| {
        if let Expr::Call(f, args) = n {
            out.push((f.clone(), args.len()));
        }
    });
    out
}

/// Scope, arity and call-graph checks.
fn check(p: &Program) -> Result<(), LoadError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, f) in p.fundefs.iter().enumerate() {
        if index.insert(&f.name, i).is_some() {
            return Err(LoadError::Scope(format!("function `{}` defined twice", f.name)));
        }
        let mut seen = HashSet::new();
        for x in &f.params {
            if !seen.insert(x) {
                return Err(LoadError::Scope(format!("parameter `{x}` repeated in `{}`", f.name)));
            }
        }
    }

    // cycles first, so self and mutual recursion get a precise diagnosis
    fn dfs<'a>(
        p: &'a Program,
        index: &HashMap<&str, usize>,
        i: usize,
        state: &mut [u8],
        path: &mut Vec<&'a str>,
    ) -> Result<(), LoadError> {
        state[i] = 1;
        path.push(&p.fundefs[i].name);
        for (callee, _) in calls(&p.fundefs[i].body) {
            let Some(&j) = index.get(callee.as_str()) else { continue };
            match state[j] {
                1 => {
                    let start = path.iter().position(|n| *n == callee).unwrap_or(0);
                    let mut cycle: Vec<&str> = path[start..].to_vec();
                    cycle.push(&p.fundefs[j].name);
                    return Err(LoadError::CyclicCall(cycle.join(" -> ")));
                }
                0 => dfs(p, index, j, state, path)?,
                _ => {}
            }
        }
        path.pop();
        state[i] = 2;
        Ok(())
    }
    let mut state = vec![0u8; p.fundefs.len()];
    for i in 0..p.fundefs.len() {
        if state[i] == 0 {
            dfs(p, &index, i, &mut state, &mut Vec::new())?;
        }
    }

    let check_calls = |e: &Expr, defined_before: usize, context: &str| -> Result<(), LoadError> {
        for (callee, argc) in calls(e) {
            match index.get(callee.as_str()) {
                None => return Err(LoadError::Scope(format!("call to undefined function `{callee}` in {context}"))),
                Some(&j) if j >= defined_before => {
                    return Err(LoadError::Scope(format!("`{callee}` is used in {context} before its definition")))
                }
                Some(&j) if p.fundefs[j].params.len() != argc => {
                    return Err(LoadError::Scope(format!(
                        "`{callee}` takes {} arguments but {context} passes {argc}",
                        p.fundefs[j].params.len()
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    };
    for (i, f) in p.fundefs.iter().enumerate() {
        let context = format!("`{}`", f.name);
        check_calls(&f.body, i, &context)?;
        let free: Vec<String> = f.body.free_vars().into_iter().filter(|v| !f.params.contains(v)).collect();
        if let Some(v) = free.first() {
            return Err(LoadError::Scope(format!("unbound variable `{v}` in {context}")));
        }
    }
    check_calls(&p.main, p.fundefs.len(), "main")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_calls_shape() {
        let p = parse("fun bar(a, b) = a * b; fun baz(c) = c + 1; fun foo(x, y, z) = bar(x, y) + baz(z); foo(a, b, c)").unwrap();
        assert_eq!(p.fundefs.len(), 3);
        assert!(matches!(&p.main, Expr::Call(f, args) if f == "foo" && args.len() == 3));
    }

    #[test]
    fn feature_guard() {
        let p = parse("if feature(\"FB\") then (x + y) / c else (x + c) / y").unwrap();
        match &p.main {
            Expr::If(g, _, _) => assert_eq!(**g, Expr::Feature("FB".into())),
            other => panic!("expected if, got {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse("1 + 2 * 3").unwrap();
        assert_eq!(p.main, Expr::bin(BinOp::Add, Expr::Int(1), Expr::bin(BinOp::Mul, Expr::Int(2), Expr::Int(3))));
        let p = parse("1 - 2 - 3").unwrap();
        assert_eq!(p.main, Expr::bin(BinOp::Sub, Expr::bin(BinOp::Sub, Expr::Int(1), Expr::Int(2)), Expr::Int(3)));
        let p = parse("a || b && !c == d").unwrap();
        let expected = Expr::bin(
            BinOp::Or,
            Expr::var("a"),
            Expr::bin(BinOp::And, Expr::var("b"), Expr::bin(BinOp::Eq, Expr::not(Expr::var("c")), Expr::var("d"))),
        );
        assert_eq!(p.main, expected);
    }

    #[test]
    fn unary_minus_desugars() {
        let p = parse("-7").unwrap();
        assert_eq!(p.main, Expr::bin(BinOp::Sub, Expr::Int(0), Expr::Int(7)));
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse("// leading\n1 // trailing\n").unwrap();
        assert_eq!(p.main, Expr::Int(1));
    }

    #[test]
    fn syntax_error_position() {
        let e = parse("1 +\n  * 2").unwrap_err();
        assert!(matches!(e, LoadError::Syntax { line: 2, col: 3, .. }), "{e:?}");
        assert!(matches!(parse("feature(FA)"), Err(LoadError::Syntax { .. })));
        assert!(matches!(parse("1 2"), Err(LoadError::Syntax { .. })));
        assert!(matches!(parse("99999999999999999999"), Err(LoadError::Syntax { .. })));
    }

    #[test]
    fn scope_errors() {
        assert!(matches!(parse("fun f(x) = y; f(1)"), Err(LoadError::Scope(_))));
        assert!(matches!(parse("g(1)"), Err(LoadError::Scope(_))));
        assert!(matches!(parse("fun f(x) = x; f(1, 2)"), Err(LoadError::Scope(_))));
        assert!(matches!(parse("fun f(x) = g(x); fun g(y) = y; f(1)"), Err(LoadError::Scope(_))));
        assert!(matches!(parse("fun f(x, x) = x; f(1, 2)"), Err(LoadError::Scope(_))));
    }

    #[test]
    fn cycles_are_rejected() {
        assert_eq!(
            parse("fun f(x) = f(x); f(1)"),
            Err(LoadError::CyclicCall("f -> f".into()))
        );
        assert!(matches!(
            parse("fun f(x) = g(x); fun g(y) = f(y); f(1)"),
            Err(LoadError::CyclicCall(_))
        ));
    }
}
