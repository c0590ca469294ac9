//! Reader for `.mb` bindings files:
//!
//! ```text
//! modality feature(FA, FB);
//! bind x = { -7 @ FA, 3 @ !FA };
//! bind z = { 5 @ true };
//! ```
//!
//! Probability bindings label variants with weights (`{ 7 @ 0.2, 9 @ 0.8 }`)
//! and interval bindings are written `[4 .. 9]`.

use thiserror::Error;

use crate::eval::ModalEnv;
use crate::labels::{
    FeatureAlgebra, IntervalAlgebra, IntervalTag, LabelAlgebra, LabelError, ModalityKind, Probability,
    ProbabilityAlgebra,
};
use crate::modal::{repair_range, validate, IntervalEmpty, ModalValue};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BindingsError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: {source}")]
    Label {
        line: usize,
        col: usize,
        #[source]
        source: LabelError,
    },
    #[error("`{0}` is bound twice")]
    Duplicate(String),
    #[error("binding `{name}` is not a valid modal value: {detail}")]
    Invalid { name: String, detail: String },
    #[error(transparent)]
    Modality(LabelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModalitySpec {
    Feature(Vec<String>),
    Probability,
    Interval,
}

impl ModalitySpec {
    pub fn kind(&self) -> ModalityKind {
        match self {
            ModalitySpec::Feature(_) => ModalityKind::Feature,
            ModalitySpec::Probability => ModalityKind::Probability,
            ModalitySpec::Interval => ModalityKind::Interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Form {
    /// `(value, label text, line, col)`
    Pairs(Vec<(Value, String, usize, usize)>),
    Range(Value, Value),
}

#[derive(Debug, Clone, PartialEq)]
struct RawBinding {
    name: String,
    form: Form,
    line: usize,
    col: usize,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> BindingsError {
        BindingsError::Syntax {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn advance(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => self.advance(),
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while self.peek().is_some_and(|c| c != b'\n') {
                        self.advance();
                    }
                }
                _ => return,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.peek().is_none()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_trivia();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            for _ in 0..s.len() {
                self.advance();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), BindingsError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String, BindingsError> {
        self.skip_trivia();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.advance();
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if word.is_empty() || word.as_bytes()[0].is_ascii_digit() {
            return Err(self.error("expected identifier"));
        }
        Ok(word.to_string())
    }

    fn keyword(&mut self, kw: &str) -> Result<(), BindingsError> {
        let (line, col) = (self.line, self.col);
        match self.ident() {
            Ok(w) if w == kw => Ok(()),
            _ => Err(BindingsError::Syntax {
                line,
                col,
                message: format!("expected `{kw}`"),
            }),
        }
    }

    fn value(&mut self) -> Result<Value, BindingsError> {
        self.skip_trivia();
        if self.eat("true") {
            return Ok(Value::Bool(true));
        }
        if self.eat("false") {
            return Ok(Value::Bool(false));
        }
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.advance();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.advance();
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<i64>()
            .map(Value::Int)
            .map_err(|_| self.error(format!("expected integer or boolean value, found `{text}`")))
    }

    /// Raw label text up to the next `,` or `}`.
    fn label_text(&mut self) -> Result<(String, usize, usize), BindingsError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        while self.peek().is_some_and(|c| c != b',' && c != b'}' && c != b'\n') {
            self.advance();
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).trim().to_string();
        if text.is_empty() {
            return Err(self.error("expected label"));
        }
        Ok((text, line, col))
    }
}

fn parse_raw(src: &str) -> Result<(ModalitySpec, Vec<RawBinding>), BindingsError> {
    let mut c = Cursor::new(src);
    c.skip_trivia();
    c.keyword("modality")?;
    let (line, col) = (c.line, c.col);
    let spec = match c.ident()?.as_str() {
        "feature" => {
            c.expect("(")?;
            let mut names = Vec::new();
            if !c.eat(")") {
                loop {
                    names.push(c.ident()?);
                    if c.eat(")") {
                        break;
                    }
                    c.expect(",")?;
                }
            }
            ModalitySpec::Feature(names)
        }
        "probability" => ModalitySpec::Probability,
        "interval" => ModalitySpec::Interval,
        other => {
            return Err(BindingsError::Syntax {
                line,
                col,
                message: format!("unknown modality `{other}`"),
            })
        }
    };
    c.expect(";")?;

    let mut bindings = Vec::new();
    while !c.at_end() {
        c.keyword("bind")?;
        c.skip_trivia();
        let (line, col) = (c.line, c.col);
        let name = c.ident()?;
        c.expect("=")?;
        let form = if c.eat("[") {
            let lo = c.value()?;
            c.expect("..")?;
            let hi = c.value()?;
            c.expect("]")?;
            Form::Range(lo, hi)
        } else {
            c.expect("{")?;
            let mut pairs = Vec::new();
            loop {
                let v = c.value()?;
                c.expect("@")?;
                let (text, l, k) = c.label_text()?;
                pairs.push((v, text, l, k));
                if c.eat("}") {
                    break;
                }
                c.expect(",")?;
            }
            Form::Pairs(pairs)
        };
        c.expect(";")?;
        bindings.push(RawBinding { name, form, line, col });
    }
    Ok((spec, bindings))
}

fn build_env<A: LabelAlgebra>(
    alg: &A,
    raw: Vec<RawBinding>,
    policy: IntervalEmpty,
    label: impl Fn(&str) -> Result<A::Label, LabelError>,
    range: impl Fn(Value, Value) -> Option<Vec<(Value, A::Label)>>,
) -> Result<ModalEnv<A::Label>, BindingsError> {
    let mut env = ModalEnv::new();
    for b in raw {
        let pairs = match b.form {
            Form::Pairs(ps) => ps
                .into_iter()
                .map(|(v, text, line, col)| {
                    label(&text)
                        .map(|l| (v, l))
                        .map_err(|source| BindingsError::Label { line, col, source })
                })
                .collect::<Result<Vec<_>, _>>()?,
            Form::Range(lo, hi) => range(lo, hi).ok_or_else(|| BindingsError::Syntax {
                line: b.line,
                col: b.col,
                message: format!("`[lo .. hi]` ranges need the interval modality (binding `{}`)", b.name),
            })?,
        };
        let mut mv = ModalValue::from_pairs(pairs);
        if policy == IntervalEmpty::Swap {
            mv = repair_range(alg, mv);
        }
        if let Some(detail) = validate(alg, &mv, policy).first() {
            return Err(BindingsError::Invalid { name: b.name, detail });
        }
        if env.insert(b.name.clone(), mv).is_some() {
            return Err(BindingsError::Duplicate(b.name));
        }
    }
    Ok(env)
}

/// A loaded bindings file: the algebra it declares and its validated inputs.
// One value per loaded file, so the size imbalance does not matter.
#[allow(clippy::large_enum_variant)]
#[derive(Debug)]
pub enum Session {
    Feature(FeatureAlgebra, ModalEnv<crate::labels::Formula>),
    Probability(ProbabilityAlgebra, ModalEnv<Probability>),
    Interval(IntervalAlgebra, ModalEnv<IntervalTag>),
}

impl Session {
    /// Parses and validates a bindings file. Every binding must be disjoint
    /// and total; inverted ranges are rejected or repaired per `policy`.
    pub fn load(src: &str, feature_limit: usize, policy: IntervalEmpty) -> Result<Session, BindingsError> {
        let (spec, raw) = parse_raw(src)?;
        Ok(match spec {
            ModalitySpec::Feature(names) => {
                let alg = FeatureAlgebra::with_limit(names, feature_limit).map_err(BindingsError::Modality)?;
                let env = build_env(&alg, raw, policy, |t| alg.parse(t), |_, _| None)?;
                Session::Feature(alg, env)
            }
            ModalitySpec::Probability => {
                let alg = ProbabilityAlgebra;
                let weight = |t: &str| {
                    let w: f64 = t
                        .parse()
                        .map_err(|_| LabelError::Syntax {
                            offset: 0,
                            message: format!("`{t}` is not a probability"),
                        })?;
                    Probability::new(w)
                };
                let env = build_env(&alg, raw, policy, weight, |_, _| None)?;
                Session::Probability(alg, env)
            }
            ModalitySpec::Interval => {
                let alg = IntervalAlgebra;
                let tag = |t: &str| match t {
                    "MIN" => Ok(IntervalTag::Min),
                    "MAX" => Ok(IntervalTag::Max),
                    _ => Err(LabelError::Syntax {
                        offset: 0,
                        message: format!("`{t}` is not MIN or MAX"),
                    }),
                };
                let range = |lo, hi| Some(vec![(lo, IntervalTag::Min), (hi, IntervalTag::Max)]);
                let env = build_env(&alg, raw, policy, tag, range)?;
                Session::Interval(alg, env)
            }
        })
    }

    pub fn kind(&self) -> ModalityKind {
        match self {
            Session::Feature(..) => ModalityKind::Feature,
            Session::Probability(..) => ModalityKind::Probability,
            Session::Interval(..) => ModalityKind::Interval,
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            Session::Feature(_, env) => env.keys().cloned().collect(),
            Session::Probability(_, env) => env.keys().cloned().collect(),
            Session::Interval(_, env) => env.keys().cloned().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::DEFAULT_FEATURE_LIMIT;
    use crate::modal::render_value;

    fn load(src: &str) -> Result<Session, BindingsError> {
        Session::load(src, DEFAULT_FEATURE_LIMIT, IntervalEmpty::Reject)
    }

    #[test]
    fn shared_calls_bindings() {
        let s = load(
            "modality feature(FA, FB);\n\
             bind x = { -7 @ FA, 3 @ !FA };\n\
             bind y = { 1 @ FA & FB, 8 @ FA & !FB, 4 @ !FA & FB, 10 @ !FA & !FB };\n\
             bind z = { 5 @ true }; // constant\n",
        )
        .unwrap();
        let Session::Feature(alg, env) = s else { panic!("feature session") };
        assert_eq!(render_value(&alg, &env["x"]), "-7 @ FA\n3 @ !FA\n");
        assert_eq!(env["y"].len(), 4);
        assert_eq!(env["z"].len(), 1);
    }

    #[test]
    fn probability_and_interval_forms() {
        let s = load("modality probability; bind p = { 7 @ 0.2, 9 @ 0.8 };").unwrap();
        assert_eq!(s.kind(), ModalityKind::Probability);
        let s = load("modality interval; bind r = [4 .. 9]; bind b = { true @ MIN, false @ MAX };").unwrap();
        let Session::Interval(alg, env) = s else { panic!("interval session") };
        assert_eq!(render_value(&alg, &env["r"]), "[4 .. 9]\n");
    }

    #[test]
    fn totality_violations_are_reported() {
        let err = load("modality feature(FA, FB); bind x = { 1 @ FA & FB, 2 @ !FA };").unwrap_err();
        match err {
            BindingsError::Invalid { name, detail } => {
                assert_eq!(name, "x");
                assert!(detail.starts_with("totality"), "{detail}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = load("modality probability; bind p = { 7 @ 0.2, 9 @ 0.7 };").unwrap_err();
        assert!(matches!(err, BindingsError::Invalid { .. }));
    }

    #[test]
    fn overlap_is_reported() {
        let err = load("modality feature(FA); bind x = { 1 @ FA, 2 @ true };").unwrap_err();
        assert!(matches!(err, BindingsError::Invalid { ref detail, .. } if detail.starts_with("disjointness")));
    }

    #[test]
    fn inverted_ranges() {
        let err = load("modality interval; bind r = [9 .. 4];").unwrap_err();
        assert!(matches!(err, BindingsError::Invalid { ref detail, .. } if detail.starts_with("range")));
        let s = Session::load("modality interval; bind r = [9 .. 4];", DEFAULT_FEATURE_LIMIT, IntervalEmpty::Swap).unwrap();
        let Session::Interval(alg, env) = s else { panic!("interval session") };
        assert_eq!(render_value(&alg, &env["r"]), "[4 .. 9]\n");
    }

    #[test]
    fn syntax_and_label_errors() {
        assert!(matches!(load("modality colour;"), Err(BindingsError::Syntax { .. })));
        assert!(matches!(load("modality feature(FA); bind x = { 1 @ FB };"), Err(BindingsError::Label { .. })));
        assert!(matches!(load("modality feature(FA); bind x = [1 .. 2];"), Err(BindingsError::Syntax { .. })));
        assert!(matches!(
            load("modality feature(FA); bind x = { 1 @ true }; bind x = { 2 @ true };"),
            Err(BindingsError::Duplicate(_))
        ));
        let err = load("modality feature(FA);\nbind x = { 1 @ true }\n").unwrap_err();
        assert!(matches!(err, BindingsError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn feature_limit() {
        let err = Session::load("modality feature(A, B, C);", 2, IntervalEmpty::Reject).unwrap_err();
        assert!(matches!(err, BindingsError::Modality(LabelError::TooManyFeatures { .. })));
    }
}
