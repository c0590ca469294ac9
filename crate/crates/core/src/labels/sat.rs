//! A small DPLL solver: unit propagation over occurrence lists, pure-literal
//! elimination, chronological backtracking.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit((var as u32) << 1)
    }

    pub fn neg(var: usize) -> Self {
        Lit(((var as u32) << 1) | 1)
    }

    pub fn new(var: usize, positive: bool) -> Self {
        if positive {
            Lit::pos(var)
        } else {
            Lit::neg(var)
        }
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "!x{}", self.var())
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: usize) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn fresh_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn add_clause(&mut self, clause: impl Into<Vec<Lit>>) {
        let clause = clause.into();
        debug_assert!(clause.iter().all(|l| l.var() < self.num_vars));
        self.clauses.push(clause);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Assign {
    Unset,
    True,
    False,
}

struct Solver<'a> {
    clauses: &'a [Vec<Lit>],
    /// Clause indices per literal.
    occurs: Vec<Vec<usize>>,
    assign: Vec<Assign>,
    trail: Vec<Lit>,
    qhead: usize,
    /// Variables below this index are tried first when branching.
    priority: usize,
}

impl<'a> Solver<'a> {
    fn new(cnf: &'a Cnf, priority: usize) -> Self {
        let mut occurs = vec![Vec::new(); cnf.num_vars * 2];
        for (ci, clause) in cnf.clauses.iter().enumerate() {
            for &l in clause {
                occurs[l.index()].push(ci);
            }
        }
        Solver {
            clauses: &cnf.clauses,
            occurs,
            assign: vec![Assign::Unset; cnf.num_vars],
            trail: Vec::new(),
            qhead: 0,
            priority,
        }
    }

    fn value(&self, l: Lit) -> Assign {
        match (self.assign[l.var()], l.is_positive()) {
            (Assign::Unset, _) => Assign::Unset,
            (Assign::True, true) | (Assign::False, false) => Assign::True,
            _ => Assign::False,
        }
    }

    fn set(&mut self, l: Lit) {
        self.assign[l.var()] = if l.is_positive() {
            Assign::True
        } else {
            Assign::False
        };
        self.trail.push(l);
    }

    fn undo_to(&mut self, mark: usize) {
        for l in self.trail.drain(mark..) {
            self.assign[l.var()] = Assign::Unset;
        }
        self.qhead = self.qhead.min(mark);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead];
            self.qhead += 1;
            for oi in 0..self.occurs[falsified.index()].len() {
                let ci = self.occurs[falsified.index()][oi];
                let mut unit = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in &self.clauses[ci] {
                    match self.value(l) {
                        Assign::True => {
                            satisfied = true;
                            break;
                        }
                        Assign::Unset => {
                            open += 1;
                            unit = Some(l);
                        }
                        Assign::False => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => self.set(unit.expect("one open literal")),
                    _ => {}
                }
            }
        }
        true
    }

    fn clause_satisfied(&self, ci: usize) -> bool {
        self.clauses[ci]
            .iter()
            .any(|&l| self.value(l) == Assign::True)
    }

    /// Assigns every unassigned variable that occurs with only one polarity in
    /// the clauses not yet satisfied.
    fn eliminate_pure(&mut self) {
        let n = self.assign.len();
        let mut seen_pos = vec![false; n];
        let mut seen_neg = vec![false; n];
        for ci in 0..self.clauses.len() {
            if self.clause_satisfied(ci) {
                continue;
            }
            for &l in &self.clauses[ci] {
                if self.assign[l.var()] == Assign::Unset {
                    if l.is_positive() {
                        seen_pos[l.var()] = true;
                    } else {
                        seen_neg[l.var()] = true;
                    }
                }
            }
        }
        for v in 0..n {
            if self.assign[v] != Assign::Unset {
                continue;
            }
            match (seen_pos[v], seen_neg[v]) {
                (true, false) => self.set(Lit::pos(v)),
                (false, true) => self.set(Lit::neg(v)),
                _ => {}
            }
        }
    }

    fn pick_branch(&self) -> Option<usize> {
        let mut fallback = None;
        for ci in 0..self.clauses.len() {
            if self.clause_satisfied(ci) {
                continue;
            }
            for &l in &self.clauses[ci] {
                let v = l.var();
                if self.assign[v] != Assign::Unset {
                    continue;
                }
                if v < self.priority {
                    return Some(v);
                }
                fallback.get_or_insert(v);
            }
        }
        fallback
    }

    fn search(&mut self) -> bool {
        if !self.propagate() {
            return false;
        }
        self.eliminate_pure();
        if !self.propagate() {
            return false;
        }
        let Some(var) = self.pick_branch() else {
            return true;
        };
        let mark = self.trail.len();
        for positive in [true, false] {
            self.set(Lit::new(var, positive));
            if self.search() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// Decides satisfiability. Variables with index below `priority` are branched
/// on before any others, which keeps searches over Tseitin encodings bounded by
/// the number of original variables.
///
/// Returns a satisfying assignment when one exists. Variables that do not
/// influence any clause are reported as `false`.
pub fn solve(cnf: &Cnf, priority: usize) -> Option<Vec<bool>> {
    let mut solver = Solver::new(cnf, priority);
    for clause in &cnf.clauses {
        match clause.as_slice() {
            [] => return None,
            [l] => match solver.value(*l) {
                Assign::False => return None,
                Assign::Unset => solver.set(*l),
                Assign::True => {}
            },
            _ => {}
        }
    }
    if !solver.search() {
        return None;
    }
    Some(
        solver
            .assign
            .iter()
            .map(|a| matches!(a, Assign::True))
            .collect(),
    )
}
