//! End-to-end runs: load a program and a bindings file, evaluate in the
//! requested mode and produce the textual report and exit status.

use std::fmt;
use std::str::FromStr;

use crate::bindings::{BindingsError, Session};
use crate::eval::{eval_modal, eval_shallow_blackbox, EvalModalError, EvalOptions, ModalEnv, PROGRAM_NAME};
use crate::labels::{Endpoint, LabelError, ModalityKind, World, DEFAULT_FEATURE_LIMIT};
use crate::lang::{eval_plain, parse, EvalError, FeatureConfig, PlainEnv, Program};
use crate::lifting::{LiftError, LiftStats};
use crate::modal::{project, render_result, IntervalEmpty, ModalError};
use crate::oracle::{assert_equiv, brute_force_eval, Enumerable, OracleError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Plain,
    Shallow,
    #[default]
    Deep,
    Oracle,
    /// Deep evaluation compared against the oracle.
    Check,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "plain" => Mode::Plain,
            "shallow" => Mode::Shallow,
            "deep" => Mode::Deep,
            "oracle" => Mode::Oracle,
            "check" => Mode::Check,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Shallow => "shallow",
            Mode::Deep => "deep",
            Mode::Oracle => "oracle",
            Mode::Check => "check",
        })
    }
}

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    Invariant = 2,
    Budget = 3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: Mode,
    /// Single world for plain mode: `FA=1,FB=0` for features, `MIN` or `MAX`
    /// for intervals.
    pub config: Option<String>,
    pub stats: bool,
    pub check_invariants: bool,
    pub interval_empty: IntervalEmpty,
    pub feature_limit: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: Mode::Deep,
            config: None,
            stats: false,
            check_invariants: false,
            interval_empty: IntervalEmpty::Reject,
            feature_limit: DEFAULT_FEATURE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub stdout: String,
    pub stderr: String,
    pub exit: Exit,
}

impl Report {
    fn fail(exit: Exit, message: impl fmt::Display) -> Report {
        Report {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            exit,
        }
    }
}

fn eval_failure(e: EvalModalError) -> Report {
    match e {
        EvalModalError::Invariant { .. } | EvalModalError::Lift(LiftError::DisjointnessViolation(_)) => {
            Report::fail(Exit::Invariant, format!("invariant violation: {e}"))
        }
        EvalModalError::Lift(LiftError::Label(LabelError::ProbabilityOverflow(_))) => {
            Report::fail(Exit::Invariant, format!("invariant violation: {e}"))
        }
        other => Report::fail(Exit::Usage, other),
    }
}

fn oracle_failure(e: OracleError) -> Report {
    match e {
        OracleError::BudgetExceeded { .. } => Report::fail(Exit::Budget, e),
        other => Report::fail(Exit::Usage, other),
    }
}

fn bindings_failure(e: BindingsError) -> Report {
    match e {
        BindingsError::Invalid { .. } => Report::fail(Exit::Invariant, format!("invariant violation: {e}")),
        BindingsError::Modality(LabelError::TooManyFeatures { .. }) => Report::fail(Exit::Budget, e),
        other => Report::fail(Exit::Usage, format!("bindings: {other}")),
    }
}

/// Runs a program against a bindings file, both given as source text.
pub fn run_sources(program: &str, bindings: &str, opts: &RunOptions) -> Report {
    let p = match parse(program) {
        Ok(p) => p,
        Err(e) => return Report::fail(Exit::Usage, format!("program: {e}")),
    };
    let session = match Session::load(bindings, opts.feature_limit, opts.interval_empty) {
        Ok(s) => s,
        Err(e) => return bindings_failure(e),
    };
    run_session(&p, &session, opts)
}

/// Runs an already loaded program and session.
pub fn run_session(p: &Program, session: &Session, opts: &RunOptions) -> Report {
    if let Some(n) = p.inputs().into_iter().find(|n| !session.names().contains(n)) {
        return Report::fail(Exit::Usage, format!("program input `{n}` has no binding"));
    }
    if session.kind() != ModalityKind::Feature {
        if let Some(f) = p.features_used().into_iter().next() {
            return Report::fail(Exit::Usage, format!("feature(\"{f}\") used outside the feature modality"));
        }
    }
    if opts.mode == Mode::Plain {
        return run_plain(p, session, opts.config.as_deref());
    }
    if opts.config.is_some() {
        return Report::fail(Exit::Usage, "--config only applies to plain mode");
    }
    match session {
        Session::Feature(alg, env) => run_modal(alg, p, env, opts),
        Session::Probability(alg, env) => {
            let mut r = run_modal(alg, p, env, opts);
            if matches!(opts.mode, Mode::Deep | Mode::Check) && !p.is_linear() {
                r.stderr.push_str(
                    "note: program references an input more than once; probabilistic results treat each reference as independent\n",
                );
            }
            r
        }
        Session::Interval(alg, env) => run_modal(alg, p, env, opts),
    }
}

fn run_modal<A: Enumerable>(alg: &A, p: &Program, env: &ModalEnv<A::Label>, opts: &RunOptions) -> Report {
    let mut stats = LiftStats::default();
    let eval_opts = EvalOptions {
        check_invariants: opts.check_invariants,
    };
    let result = match opts.mode {
        Mode::Deep | Mode::Check => eval_modal(alg, p, env, eval_opts, &mut stats).map_err(eval_failure),
        Mode::Shallow => eval_shallow_blackbox(alg, p, env, &mut stats).map_err(eval_failure),
        Mode::Oracle => {
            let before = alg.sat_calls();
            let r = brute_force_eval(alg, p, env).map_err(oracle_failure);
            if r.is_ok() {
                let worlds = alg.enumerate_worlds(env).map(|w| w.len() as u64).unwrap_or(0);
                stats.record(PROGRAM_NAME, worlds);
            }
            stats.sat_calls += alg.sat_calls() - before;
            r
        }
        Mode::Plain => unreachable!("handled by run_plain"),
    };
    let result = match result {
        Ok(r) => r,
        Err(report) => return report,
    };
    let mut out = render_result(alg, &result);
    let mut stderr = String::new();
    let mut exit = Exit::Success;
    if opts.mode == Mode::Check {
        match brute_force_eval(alg, p, env) {
            Ok(truth) => match assert_equiv(alg, &result, &truth) {
                Ok(()) => out.push_str("check=ok\n"),
                Err(d) => {
                    out.push_str("check=diverged\n");
                    stderr.push_str(&format!("error: deep result differs from the oracle {d}\n"));
                    exit = Exit::Invariant;
                }
            },
            Err(e) => return oracle_failure(e),
        }
    }
    if opts.stats {
        out.push_str(&stats.render());
    }
    Report {
        stdout: out,
        stderr,
        exit,
    }
}

fn parse_feature_config(text: &str, features: &[String]) -> Result<FeatureConfig, String> {
    let mut cfg = FeatureConfig::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, val) = item
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=0|1 in --config, found `{item}`"))?;
        let (name, val) = (name.trim(), val.trim());
        if !features.iter().any(|f| f == name) {
            return Err(format!("--config names undeclared feature `{name}`"));
        }
        let on = match val {
            "1" | "true" => true,
            "0" | "false" => false,
            _ => return Err(format!("feature value must be 0 or 1, found `{val}`")),
        };
        if cfg.insert(name.to_string(), on).is_some() {
            return Err(format!("feature `{name}` assigned twice in --config"));
        }
    }
    if let Some(missing) = features.iter().find(|f| !cfg.contains_key(*f)) {
        return Err(format!("--config must assign every feature; `{missing}` is missing"));
    }
    Ok(cfg)
}

fn single_variant<L: Clone>(env: &ModalEnv<L>) -> Result<PlainEnv, String> {
    env.iter()
        .map(|(k, mv)| match mv.pairs() {
            [(v, _)] => Ok((k.clone(), *v)),
            _ => Err(format!("binding `{k}` has several variants; plain mode needs a single world")),
        })
        .collect()
}

fn projected<A: crate::labels::LabelAlgebra>(alg: &A, env: &ModalEnv<A::Label>, w: &World) -> Result<PlainEnv, ModalError> {
    env.iter().map(|(k, mv)| Ok((k.clone(), project(alg, mv, w)?))).collect()
}

fn run_plain(p: &Program, session: &Session, config: Option<&str>) -> Report {
    let prepared: Result<(PlainEnv, Option<FeatureConfig>), String> = match (session, config) {
        (Session::Feature(alg, env), Some(text)) => parse_feature_config(text, alg.features()).and_then(|cfg| {
            let bits: Vec<bool> = alg.features().iter().map(|f| cfg[f]).collect();
            projected(alg, env, &World::Config(bits))
                .map(|e| (e, Some(cfg)))
                .map_err(|e| e.to_string())
        }),
        (Session::Interval(alg, env), Some(text)) => {
            let e = match text.trim() {
                "MIN" => Ok(Endpoint::Min),
                "MAX" => Ok(Endpoint::Max),
                other => Err(format!("interval --config must be MIN or MAX, found `{other}`")),
            };
            e.and_then(|e| projected(alg, env, &World::Endpoint(e)).map_err(|e| e.to_string()))
                .map(|env| (env, None))
        }
        (Session::Probability(..), Some(_)) => Err("--config does not apply to the probability modality".into()),
        (Session::Feature(_, env), None) => single_variant(env).map(|e| (e, None)),
        (Session::Interval(_, env), None) => single_variant(env).map(|e| (e, None)),
        (Session::Probability(_, env), None) => single_variant(env).map(|e| (e, None)),
    };
    let (env, cfg) = match prepared {
        Ok(x) => x,
        Err(msg) => return Report::fail(Exit::Usage, msg),
    };
    match eval_plain(p, &env, cfg.as_ref()) {
        Ok(v) => Report {
            stdout: format!("{v}\n"),
            stderr: String::new(),
            exit: Exit::Success,
        },
        Err(EvalError::Runtime(k)) => Report {
            stdout: format!("error:{k}\n"),
            stderr: String::new(),
            exit: Exit::Success,
        },
        Err(EvalError::MissingConfig(f)) => {
            Report::fail(Exit::Usage, format!("feature(\"{f}\") needs --config in plain mode"))
        }
        Err(other) => Report::fail(Exit::Usage, other),
    }
}
