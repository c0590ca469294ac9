use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use super::minimize;
use super::sat::{self, Cnf, Lit};
use super::{LabelAlgebra, LabelError, ModalityKind, World};

pub const DEFAULT_FEATURE_LIMIT: usize = 24;

/// Propositional formula over feature names, as written by users.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeatureExpr {
    True,
    False,
    Var(String),
    Not(Box<FeatureExpr>),
    And(Box<FeatureExpr>, Box<FeatureExpr>),
    Or(Box<FeatureExpr>, Box<FeatureExpr>),
}

impl FeatureExpr {
    pub fn var(name: impl Into<String>) -> Self {
        FeatureExpr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: FeatureExpr) -> Self {
        FeatureExpr::Not(Box::new(e))
    }

    pub fn and(a: FeatureExpr, b: FeatureExpr) -> Self {
        FeatureExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FeatureExpr, b: FeatureExpr) -> Self {
        FeatureExpr::Or(Box::new(a), Box::new(b))
    }

    /// Parses the surface syntax: identifiers, `true`, `false`, `!`, `&`, `|`
    /// and parentheses. `!` binds tightest and `|` loosest.
    pub fn parse(text: &str) -> Result<FeatureExpr, LabelError> {
        let mut p = SurfaceParser {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = p.disjunction()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Evaluates under a name-based assignment. Unknown names read as false.
    pub fn eval(&self, assignment: &dyn Fn(&str) -> bool) -> bool {
        match self {
            FeatureExpr::True => true,
            FeatureExpr::False => false,
            FeatureExpr::Var(n) => assignment(n),
            FeatureExpr::Not(e) => !e.eval(assignment),
            FeatureExpr::And(a, b) => a.eval(assignment) && b.eval(assignment),
            FeatureExpr::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }
}

impl fmt::Display for FeatureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureExpr::True => f.write_str("true"),
            FeatureExpr::False => f.write_str("false"),
            FeatureExpr::Var(n) => f.write_str(n),
            FeatureExpr::Not(e) => write!(f, "!{e}"),
            FeatureExpr::And(a, b) => write!(f, "({a} & {b})"),
            FeatureExpr::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

struct SurfaceParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl SurfaceParser<'_> {
    fn error(&self, message: &str) -> LabelError {
        LabelError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<FeatureExpr, LabelError> {
        let mut lhs = self.conjunction()?;
        while self.eat(b'|') {
            let rhs = self.conjunction()?;
            lhs = FeatureExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<FeatureExpr, LabelError> {
        let mut lhs = self.negation()?;
        while self.eat(b'&') {
            let rhs = self.negation()?;
            lhs = FeatureExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<FeatureExpr, LabelError> {
        if self.eat(b'!') {
            return Ok(FeatureExpr::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<FeatureExpr, LabelError> {
        if self.eat(b'(') {
            let e = self.disjunction()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return Err(self.error("expected feature name, `true`, `false` or `(`")),
        }
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        Ok(match word {
            "true" => FeatureExpr::True,
            "false" => FeatureExpr::False,
            _ => FeatureExpr::var(word),
        })
    }
}

/// Handle to a formula interned in a [`FeatureAlgebra`]. Handles from different
/// algebras must not be mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Var(u32),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
}

/// Feature sets up to this size get a truth table per node (2^6 rows fit a
/// u64), and formulas with equal tables share one handle.
const TABLE_FEATURES: usize = 6;

#[derive(Default)]
struct Store {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    sat_cache: HashMap<u32, bool>,
    /// All-rows mask when tables are kept.
    rows: Option<u64>,
    tables: Vec<u64>,
    by_table: HashMap<u64, u32>,
}

impl Store {
    fn new(features: usize) -> Self {
        let rows = (features <= TABLE_FEATURES).then(|| match 1u32 << features {
            64 => u64::MAX,
            n => (1u64 << n) - 1,
        });
        Store {
            rows,
            ..Store::default()
        }
    }

    fn table(&self, node: Node, rows: u64) -> u64 {
        let t = |id: u32| self.tables[id as usize];
        match node {
            Node::True => rows,
            Node::False => 0,
            Node::Var(i) => (0..64u32).filter(|r| r >> i & 1 == 1).fold(0, |acc, r| acc | 1 << r) & rows,
            Node::Not(a) => !t(a) & rows,
            Node::And(a, b) => t(a) & t(b),
            Node::Or(a, b) => t(a) | t(b),
        }
    }

    fn intern(&mut self, node: Node) -> u32 {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let table = self.rows.map(|rows| self.table(node, rows));
        if let Some(&id) = table.and_then(|t| self.by_table.get(&t)) {
            self.index.insert(node, id);
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.index.insert(node, id);
        if let Some(t) = table {
            self.tables.push(t);
            self.by_table.insert(t, id);
        }
        id
    }

    /// Satisfiability read off the truth table, when one is kept.
    fn table_sat(&self, id: u32) -> Option<bool> {
        self.rows.map(|_| self.tables[id as usize] != 0)
    }

    /// Reachable node ids in post-order (children first).
    fn post_order(&self, root: u32) -> Vec<u32> {
        let mut order = Vec::new();
        let mut seen = HashMap::new();
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
                continue;
            }
            if seen.insert(id, ()).is_some() {
                continue;
            }
            stack.push((id, true));
            match self.nodes[id as usize] {
                Node::Not(a) => stack.push((a, false)),
                Node::And(a, b) | Node::Or(a, b) => {
                    stack.push((b, false));
                    stack.push((a, false));
                }
                _ => {}
            }
        }
        order
    }
}

/// Presence-condition algebra: labels are propositional formulas over a fixed,
/// ordered set of features. Formulas are hash-consed, so structurally equal
/// formulas share one handle, and satisfiability results are cached per handle.
pub struct FeatureAlgebra {
    features: Vec<String>,
    limit: usize,
    store: Mutex<Store>,
    sat_calls: AtomicU64,
}

const TRUE: u32 = 0;
const FALSE: u32 = 1;
const FIRST_VAR: u32 = 2;

impl FeatureAlgebra {
    pub fn new<S: Into<String>>(features: impl IntoIterator<Item = S>) -> Result<Self, LabelError> {
        Self::with_limit(features, DEFAULT_FEATURE_LIMIT)
    }

    pub fn with_limit<S: Into<String>>(
        features: impl IntoIterator<Item = S>,
        limit: usize,
    ) -> Result<Self, LabelError> {
        let features: Vec<String> = features.into_iter().map(Into::into).collect();
        if features.len() > limit {
            return Err(LabelError::TooManyFeatures {
                count: features.len(),
                limit,
            });
        }
        let mut store = Store::new(features.len());
        store.intern(Node::True);
        store.intern(Node::False);
        for (i, name) in features.iter().enumerate() {
            if features[..i].contains(name) {
                return Err(LabelError::DuplicateFeature(name.clone()));
            }
            store.intern(Node::Var(i as u32));
        }
        Ok(FeatureAlgebra {
            features,
            limit,
            store: Mutex::new(store),
            sat_calls: AtomicU64::new(0),
        })
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    fn store(&self) -> std::sync::MutexGuard<'_, Store> {
        self.store.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn node(&self, f: Formula) -> Node {
        self.store().nodes[f.0 as usize]
    }

    pub fn tt(&self) -> Formula {
        Formula(TRUE)
    }

    pub fn ff(&self) -> Formula {
        Formula(FALSE)
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    pub fn var(&self, name: &str) -> Result<Formula, LabelError> {
        let i = self
            .feature_index(name)
            .ok_or_else(|| LabelError::UnknownFeature(name.to_string()))?;
        Ok(Formula(FIRST_VAR + i as u32))
    }

    // Constructors fold constants, double negation and idempotence; nothing
    // further is simplified.
    pub fn not(&self, a: Formula) -> Formula {
        let mut store = self.store();
        match (a.0, store.nodes[a.0 as usize]) {
            (TRUE, _) => Formula(FALSE),
            (FALSE, _) => Formula(TRUE),
            (_, Node::Not(inner)) => Formula(inner),
            _ => Formula(store.intern(Node::Not(a.0))),
        }
    }

    pub fn and(&self, a: Formula, b: Formula) -> Formula {
        match (a.0, b.0) {
            (FALSE, _) | (_, FALSE) => Formula(FALSE),
            (TRUE, _) => b,
            (_, TRUE) => a,
            _ if a == b => a,
            _ => Formula(self.store().intern(Node::And(a.0, b.0))),
        }
    }

    pub fn or(&self, a: Formula, b: Formula) -> Formula {
        match (a.0, b.0) {
            (TRUE, _) | (_, TRUE) => Formula(TRUE),
            (FALSE, _) => b,
            (_, FALSE) => a,
            _ if a == b => a,
            _ => Formula(self.store().intern(Node::Or(a.0, b.0))),
        }
    }

    /// Conjunction of one literal per feature describing `config`.
    pub fn minterm(&self, config: &[bool]) -> Formula {
        assert_eq!(config.len(), self.features.len(), "configuration arity");
        let lits: Vec<Formula> = config
            .iter()
            .enumerate()
            .map(|(i, &on)| {
                let v = Formula(FIRST_VAR + i as u32);
                if on {
                    v
                } else {
                    self.not(v)
                }
            })
            .collect();
        match lits.split_first() {
            None => self.tt(),
            Some((first, rest)) => rest.iter().fold(*first, |acc, l| self.and(acc, *l)),
        }
    }

    pub fn intern(&self, e: &FeatureExpr) -> Result<Formula, LabelError> {
        Ok(match e {
            FeatureExpr::True => self.tt(),
            FeatureExpr::False => self.ff(),
            FeatureExpr::Var(n) => self.var(n)?,
            FeatureExpr::Not(a) => {
                let a = self.intern(a)?;
                self.not(a)
            }
            FeatureExpr::And(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                self.and(a, b)
            }
            FeatureExpr::Or(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                self.or(a, b)
            }
        })
    }

    pub fn parse(&self, text: &str) -> Result<Formula, LabelError> {
        self.intern(&FeatureExpr::parse(text)?)
    }

    /// Expands the shared representation into a tree.
    pub fn to_expr(&self, f: Formula) -> FeatureExpr {
        match self.node(f) {
            Node::True => FeatureExpr::True,
            Node::False => FeatureExpr::False,
            Node::Var(i) => FeatureExpr::var(self.features[i as usize].clone()),
            Node::Not(a) => FeatureExpr::not(self.to_expr(Formula(a))),
            Node::And(a, b) => FeatureExpr::and(self.to_expr(Formula(a)), self.to_expr(Formula(b))),
            Node::Or(a, b) => FeatureExpr::or(self.to_expr(Formula(a)), self.to_expr(Formula(b))),
        }
    }

    /// Indices of the features the formula mentions, ascending.
    pub fn support(&self, f: Formula) -> Vec<usize> {
        let store = self.store();
        let mut vars: Vec<usize> = store
            .post_order(f.0)
            .into_iter()
            .filter_map(|id| match store.nodes[id as usize] {
                Node::Var(i) => Some(i as usize),
                _ => None,
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Truth value under a full configuration (one entry per declared feature).
    pub fn eval(&self, f: Formula, config: &[bool]) -> bool {
        let store = self.store();
        let order = store.post_order(f.0);
        let mut val: HashMap<u32, bool> = HashMap::with_capacity(order.len());
        for id in order {
            let v = match store.nodes[id as usize] {
                Node::True => true,
                Node::False => false,
                Node::Var(i) => config[i as usize],
                Node::Not(a) => !val[&a],
                Node::And(a, b) => val[&a] && val[&b],
                Node::Or(a, b) => val[&a] || val[&b],
            };
            val.insert(id, v);
        }
        val[&f.0]
    }

    /// Satisfiability by DPLL over a Tseitin encoding of the formula.
    pub fn sat_check(&self, f: Formula) -> Result<bool, LabelError> {
        self.sat_calls.fetch_add(1, Ordering::Relaxed);
        let cnf = {
            let store = self.store();
            if let Some(known) = store.table_sat(f.0).or_else(|| store.sat_cache.get(&f.0).copied()) {
                return Ok(known);
            }
            let cnf = self.tseitin(&store, f.0);
            cnf?
        };
        let result = sat::solve(&cnf, self.features.len()).is_some();
        self.store().sat_cache.insert(f.0, result);
        Ok(result)
    }

    /// True iff some configuration satisfies `f`, with the model when it does.
    pub fn find_model(&self, f: Formula) -> Result<Option<Vec<bool>>, LabelError> {
        let cnf = {
            let store = self.store();
            self.tseitin(&store, f.0)?
        };
        Ok(sat::solve(&cnf, self.features.len()).map(|mut m| {
            m.truncate(self.features.len());
            m
        }))
    }

    pub fn equivalent(&self, a: Formula, b: Formula) -> bool {
        let (na, nb) = (self.not(a), self.not(b));
        let left = self.and(a, nb);
        let right = self.and(na, b);
        let diff = self.or(left, right);
        !self.sat_check(diff).expect("formula built from this algebra")
    }

    fn tseitin(&self, store: &Store, root: u32) -> Result<Cnf, LabelError> {
        let k = self.features.len();
        let order = store.post_order(root);
        let used = order
            .iter()
            .filter(|&&id| matches!(store.nodes[id as usize], Node::Var(_)))
            .count();
        if used > self.limit {
            return Err(LabelError::TooManyFeatures {
                count: used,
                limit: self.limit,
            });
        }
        let mut cnf = Cnf::new(k);
        let mut lit: HashMap<u32, Lit> = HashMap::with_capacity(order.len());
        for id in order {
            let l = match store.nodes[id as usize] {
                Node::True | Node::False => {
                    let v = cnf.fresh_var();
                    let positive = store.nodes[id as usize] == Node::True;
                    cnf.add_clause([Lit::new(v, positive)]);
                    Lit::pos(v)
                }
                Node::Var(i) => Lit::pos(i as usize),
                Node::Not(a) => !lit[&a],
                Node::And(a, b) => {
                    let (la, lb) = (lit[&a], lit[&b]);
                    let g = Lit::pos(cnf.fresh_var());
                    cnf.add_clause([!g, la]);
                    cnf.add_clause([!g, lb]);
                    cnf.add_clause([g, !la, !lb]);
                    g
                }
                Node::Or(a, b) => {
                    let (la, lb) = (lit[&a], lit[&b]);
                    let g = Lit::pos(cnf.fresh_var());
                    cnf.add_clause([g, !la]);
                    cnf.add_clause([g, !lb]);
                    cnf.add_clause([!g, la, lb]);
                    g
                }
            };
            lit.insert(id, l);
        }
        cnf.add_clause([lit[&root]]);
        Ok(cnf)
    }

    fn text(&self, f: Formula, out: &mut String) {
        match self.node(f) {
            Node::True => out.push_str("true"),
            Node::False => out.push_str("false"),
            Node::Var(i) => out.push_str(&self.features[i as usize]),
            Node::Not(a) => {
                out.push('!');
                self.text(Formula(a), out);
            }
            Node::And(a, b) | Node::Or(a, b) => {
                let op = if matches!(self.node(f), Node::And(..)) {
                    " & "
                } else {
                    " | "
                };
                out.push('(');
                self.text(Formula(a), out);
                out.push_str(op);
                self.text(Formula(b), out);
                out.push(')');
            }
        }
    }

    /// Minimal sum-of-products rendering, used for reports. Falls back to the
    /// structural text when the formula mentions too many features to tabulate.
    pub fn simplified_text(&self, f: Formula) -> String {
        let support = self.support(f);
        if support.len() > minimize::MAX_VARS {
            return self.canonical_text(&f);
        }
        let mut config = vec![false; self.features.len()];
        let table: Vec<bool> = (0u32..1 << support.len())
            .map(|row| {
                for (bit, &feat) in support.iter().enumerate() {
                    config[feat] = row >> bit & 1 == 1;
                }
                self.eval(f, &config)
            })
            .collect();
        let names: Vec<&str> = support.iter().map(|&i| self.features[i].as_str()).collect();
        minimize::render_min_dnf(&names, &table)
    }
}

impl fmt::Debug for FeatureAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeatureAlgebra")
            .field("features", &self.features)
            .field("limit", &self.limit)
            .finish_non_exhaustive()
    }
}

impl LabelAlgebra for FeatureAlgebra {
    type Label = Formula;

    fn kind(&self) -> ModalityKind {
        ModalityKind::Feature
    }

    fn top(&self) -> Formula {
        self.tt()
    }

    fn meet(&self, a: &Formula, b: &Formula) -> Formula {
        self.and(*a, *b)
    }

    fn join(&self, a: &Formula, b: &Formula) -> Result<Formula, LabelError> {
        Ok(self.or(*a, *b))
    }

    fn hull(&self, a: &Formula, b: &Formula) -> Formula {
        self.or(*a, *b)
    }

    fn is_empty(&self, l: &Formula) -> bool {
        !self.sat_check(*l).expect("formula built from this algebra")
    }

    fn overlap(&self, labels: &[Formula]) -> Option<String> {
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                let both = self.and(*a, *b);
                if !self.is_empty(&both) {
                    return Some(format!(
                        "{} and {} overlap",
                        self.display_text(a),
                        self.display_text(b)
                    ));
                }
            }
        }
        None
    }

    fn coverage_gap(&self, labels: &[Formula], within: &Formula) -> Option<String> {
        for l in labels {
            let outside = self.and(*l, self.not(*within));
            if !self.is_empty(&outside) {
                return Some(format!(
                    "{} reaches outside {}",
                    self.display_text(l),
                    self.display_text(within)
                ));
            }
        }
        let covered = labels
            .iter()
            .copied()
            .reduce(|a, b| self.or(a, b))
            .unwrap_or_else(|| self.ff());
        let gap = self.and(*within, self.not(covered));
        self.find_model(gap).expect("formula built from this algebra").map(|model| format!("uncovered configuration {}", self.describe_config(&model)))
    }

    fn canonical_text(&self, l: &Formula) -> String {
        let mut s = String::new();
        self.text(*l, &mut s);
        s
    }

    // Structural text can be exponential in the shared representation, so
    // ties sort by handle, which is stable for a given evaluation order.
    fn sort_key(&self, l: &Formula) -> String {
        format!("{:010}", l.0)
    }

    fn display_text(&self, l: &Formula) -> String {
        self.simplified_text(*l)
    }

    fn contains(&self, l: &Formula, w: &World) -> Result<bool, LabelError> {
        match w {
            World::Config(bits) if bits.len() == self.features.len() => Ok(self.eval(*l, bits)),
            _ => Err(LabelError::ForeignWorld(ModalityKind::Feature)),
        }
    }

    fn feature_literals(&self, name: &str) -> Result<(Formula, Formula), LabelError> {
        let v = self.var(name)?;
        Ok((v, self.not(v)))
    }

    fn sat_calls(&self) -> u64 {
        self.sat_calls.load(Ordering::Relaxed)
    }
}

impl FeatureAlgebra {
    /// Renders a configuration as the set of enabled features, e.g. `{FA, FB}`.
    pub fn describe_config(&self, config: &[bool]) -> String {
        let on: Vec<&str> = self
            .features
            .iter()
            .zip(config)
            .filter(|(_, &b)| b)
            .map(|(n, _)| n.as_str())
            .collect();
        format!("{{{}}}", on.join(", "))
    }

    /// All `2^k` configurations in binary counting order (first feature is the
    /// least significant bit).
    pub fn configurations(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        let k = self.features.len();
        (0u64..1 << k).map(move |bits| (0..k).map(|i| bits >> i & 1 == 1).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> FeatureAlgebra {
        FeatureAlgebra::new(["FA", "FB"]).unwrap()
    }

    #[test]
    fn meet_is_conjunction() {
        let a = alg();
        let (fa, fb) = (a.var("FA").unwrap(), a.var("FB").unwrap());
        assert_eq!(a.canonical_text(&a.meet(&fa, &fb)), "(FA & FB)");
    }

    #[test]
    fn contradiction_is_empty() {
        let a = alg();
        let fa = a.var("FA").unwrap();
        assert!(a.is_empty(&a.and(fa, a.not(fa))));
        assert!(!a.is_empty(&a.tt()));
        assert!(a.is_empty(&a.ff()));
    }

    #[test]
    fn sat_check_examples() {
        let a = alg();
        assert!(a.sat_check(a.parse("FA & FB").unwrap()).unwrap());
        assert!(!a.sat_check(a.parse("FA & !FA").unwrap()).unwrap());
        assert!(!a.sat_check(a.parse("(FA | FB) & !FA & !FB").unwrap()).unwrap());
    }

    #[test]
    fn sat_results_are_cached() {
        let a = alg();
        let f = a.parse("FA & !FB").unwrap();
        a.sat_check(f).unwrap();
        let before = a.store().sat_cache.len();
        a.sat_check(f).unwrap();
        assert_eq!(a.store().sat_cache.len(), before);
        assert_eq!(a.sat_calls(), 2);
    }

    #[test]
    fn undeclared_feature_is_rejected() {
        let a = alg();
        assert_eq!(
            a.parse("FA & FC"),
            Err(LabelError::UnknownFeature("FC".into()))
        );
    }

    #[test]
    fn limit_is_enforced_on_construction() {
        let names: Vec<String> = (0..5).map(|i| format!("F{i}")).collect();
        assert!(matches!(
            FeatureAlgebra::with_limit(names, 4),
            Err(LabelError::TooManyFeatures { count: 5, limit: 4 })
        ));
    }

    #[test]
    fn surface_syntax_precedence() {
        let e = FeatureExpr::parse("!a & b | c").unwrap();
        assert_eq!(e.to_string(), "((!a & b) | c)");
        let e = FeatureExpr::parse("a | b & !(c | d)").unwrap();
        assert_eq!(e.to_string(), "(a | (b & !(c | d)))");
        assert!(FeatureExpr::parse("a &").is_err());
        assert!(FeatureExpr::parse("(a").is_err());
        assert!(FeatureExpr::parse("a b").is_err());
    }

    #[test]
    fn hash_consing_shares_structure() {
        let a = alg();
        assert_eq!(a.parse("FA & !FB").unwrap(), a.parse("(FA & (!FB))").unwrap());
    }

    #[test]
    fn simplified_rendering() {
        let a = alg();
        let f = a.parse("(FA & !FB) | (!FA & !FB)").unwrap();
        assert_eq!(a.display_text(&f), "!FB");
        let f = a.parse("FB & (FA & FB)").unwrap();
        assert_eq!(a.display_text(&f), "(FA & FB)");
        let f = a.parse("FA | !FA").unwrap();
        assert_eq!(a.display_text(&f), "true");
    }

    #[test]
    fn coverage_gap_names_a_configuration() {
        let a = alg();
        let labels = [a.parse("FA & FB").unwrap(), a.parse("!FA").unwrap()];
        let gap = a.coverage_gap(&labels, &a.tt()).unwrap();
        assert_eq!(gap, "uncovered configuration {FA}");
    }
}
