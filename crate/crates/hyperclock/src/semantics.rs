//! Direct evaluators for the satisfaction relations of the logic: the
//! interval-based continuum semantics (with its bounded-horizon variant) and
//! the point-based event semantics.
//!
//! Continuum quantification ("there exists t′ > t in the window") is decided
//! exactly via critical points: the truth of every subformula, as a function
//! of time, is piecewise constant with discontinuities confined to run
//! breakpoints shifted by sums of formula interval endpoints. Evaluating at
//! those points plus one midpoint per gap therefore decides ∃t′/∀t′ exactly.
//!
//! Run quantifiers (∃π/∀π) delegate candidate search to a provider; the
//! evaluators are exact relative to whatever run set the provider yields.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Execution, TimedAutomaton};
use crate::formula::{HcmtlFormula, PathVar, MARK_PROP};
use crate::pointwise::{PointExecution, PointTimedAutomaton};
use crate::timecore::{Interval, Rational, TimeBound};

/// The branching reference `†`: either a previously quantified path variable
/// or ε (no anchor yet — only valid at time 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Anchor {
    Epsilon,
    Var(PathVar),
}

/// Serializable path environment, either interval-mode or point-mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Environment {
    Interval {
        horizon: TimeBound,
        paths: BTreeMap<String, Execution>,
    },
    Point {
        horizon: TimeBound,
        paths: BTreeMap<String, PointExecution>,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("path variable {0:?} is not bound in the environment")]
    UnboundVariable(String),
    #[error("evaluation time {0} is not below the horizon {1}")]
    TimeBeyondHorizon(Rational, TimeBound),
    #[error("evaluation time {0} is negative")]
    NegativeTime(Rational),
}

/// Supplies candidate accepting runs for ∃π/∀π in the interval semantics.
///
/// With an anchor `(rho, t)` the provider must yield only runs that agree
/// with `rho` up to and including time `t`; with no anchor (the ε case at
/// time 0) it yields every accepting run it knows of. Evaluation filters the
/// anchored case defensively, so over-yielding is tolerated.
pub trait ExecutionProvider: Sync {
    fn candidates(
        &self,
        automaton: &TimedAutomaton,
        anchor: Option<(&Execution, &Rational)>,
        horizon: &TimeBound,
    ) -> Vec<Execution>;
}

/// Supplies candidate accepting point executions for ∃π/∀π in the point
/// semantics; the anchored case must yield extensions of the anchor from `t`.
pub trait PointExecutionProvider: Sync {
    fn candidates(
        &self,
        automaton: &PointTimedAutomaton,
        anchor: Option<(&PointExecution, &Rational)>,
        horizon: &TimeBound,
    ) -> Vec<PointExecution>;
}

/// Provider that never yields a run; sufficient for quantifier-free formulas.
pub struct NoRuns;

impl ExecutionProvider for NoRuns {
    fn candidates(
        &self,
        _: &TimedAutomaton,
        _: Option<(&Execution, &Rational)>,
        _: &TimeBound,
    ) -> Vec<Execution> {
        Vec::new()
    }
}

impl PointExecutionProvider for NoRuns {
    fn candidates(
        &self,
        _: &PointTimedAutomaton,
        _: Option<(&PointExecution, &Rational)>,
        _: &TimeBound,
    ) -> Vec<PointExecution> {
        Vec::new()
    }
}

/// Finite endpoint set of all run segments in an interval environment.
fn env_breakpoints(paths: &BTreeMap<PathVar, Execution>) -> BTreeSet<Rational> {
    let mut out = BTreeSet::new();
    out.insert(Rational::zero());
    for rho in paths.values() {
        for iv in rho.intervals() {
            out.insert(iv.left().clone());
            if let TimeBound::Finite(r) = iv.right() {
                out.insert(r.clone());
            }
        }
    }
    out
}

/// Close a breakpoint set under ± the formula's interval endpoints, iterated
/// to the formula's temporal nesting depth. The result contains every time at
/// which the truth of some subformula can change.
fn closure(
    base: &BTreeSet<Rational>,
    phi: &HcmtlFormula,
) -> BTreeSet<Rational> {
    let endpoints: Vec<Rational> = phi.interval_constants().into_iter().collect();
    let mut cur = base.clone();
    for _ in 0..phi.temporal_depth() {
        let mut next = cur.clone();
        for b in &cur {
            for e in &endpoints {
                let up = b + e;
                if !up.is_negative() {
                    next.insert(up);
                }
                let down = b - e;
                if !down.is_negative() {
                    next.insert(down);
                }
            }
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Finite set of sample times deciding continuum quantification over
/// `window`: the closure points inside the window, the window's contained
/// endpoints, one midpoint per gap, and one point past the last when the
/// window is right-unbounded.
pub fn critical_points(
    paths: &BTreeMap<PathVar, Execution>,
    phi: &HcmtlFormula,
    window: &Interval,
) -> Vec<Rational> {
    sample_times(&closure(&env_breakpoints(paths), phi), window)
}

fn sample_times(closed: &BTreeSet<Rational>, window: &Interval) -> Vec<Rational> {
    let mut grid: Vec<Rational> = Vec::new();
    grid.push(window.left().clone());
    for c in closed {
        if c > window.left() {
            match window.right() {
                TimeBound::Finite(r) if c > r => {}
                _ => grid.push(c.clone()),
            }
        }
    }
    if let TimeBound::Finite(r) = window.right() {
        if r != window.left() {
            grid.push(r.clone());
        }
    }
    grid.sort();
    grid.dedup();
    let mut out: Vec<Rational> = Vec::new();
    for (i, g) in grid.iter().enumerate() {
        if window.contains(g) {
            out.push(g.clone());
        }
        if i + 1 < grid.len() {
            let mid = Rational::midpoint(g, &grid[i + 1]);
            if window.contains(&mid) {
                out.push(mid);
            }
        }
    }
    if window.right() == &TimeBound::Infinity {
        let last = grid.last().cloned().unwrap_or_else(Rational::zero);
        out.push(&last + &Rational::int(1));
    }
    out.sort();
    out.dedup();
    out
}

/// Window of admissible t′ for a temporal operator at time `t` with
/// annotation `i`: (t, ∞) ∩ (t + i) ∩ [0, N). Returns `None` when empty.
fn operator_window(t: &Rational, i: &Interval, horizon: &TimeBound) -> Option<Interval> {
    let shifted = i.shift(t);
    // Enforce strictness t′ > t: only bites when the shifted window still
    // touches t, i.e. the annotation's left endpoint is 0.
    let (mut left, mut left_closed) = (shifted.left().clone(), shifted.left_closed());
    if &left <= t {
        left = t.clone();
        left_closed = false;
    }
    let (mut right, mut right_closed) = (shifted.right().clone(), shifted.right_closed());
    if let TimeBound::Finite(n) = horizon {
        let beats = match &right {
            TimeBound::Infinity => true,
            TimeBound::Finite(r) => r >= n,
        };
        if beats {
            right = TimeBound::Finite(n.clone());
            right_closed = false;
        }
    }
    match &right {
        TimeBound::Infinity => {}
        TimeBound::Finite(r) => {
            if r < &left || (r == &left && !(left_closed && right_closed)) {
                return None;
            }
        }
    }
    Interval::new(left, right, left_closed, right_closed).ok()
}

struct IntervalCtx<'a> {
    automaton: &'a TimedAutomaton,
    horizon: &'a TimeBound,
    provider: &'a dyn ExecutionProvider,
    root: &'a HcmtlFormula,
}

/// Interval-based satisfaction: Π, t, † ⊨ φ, bounded by `horizon` (pass
/// `TimeBound::Infinity` for the unbounded relation).
pub fn sat_interval(
    automaton: &TimedAutomaton,
    paths: &BTreeMap<PathVar, Execution>,
    t: &Rational,
    anchor: &Anchor,
    phi: &HcmtlFormula,
    horizon: &TimeBound,
    provider: &dyn ExecutionProvider,
) -> Result<bool, SemanticsError> {
    if t.is_negative() {
        return Err(SemanticsError::NegativeTime(t.clone()));
    }
    if let TimeBound::Finite(n) = horizon {
        if t >= n {
            return Err(SemanticsError::TimeBeyondHorizon(t.clone(), horizon.clone()));
        }
    }
    for v in phi.free_vars() {
        if !paths.contains_key(&v) {
            return Err(SemanticsError::UnboundVariable(v.0));
        }
    }
    if let Anchor::Var(v) = anchor {
        if !paths.contains_key(v) {
            return Err(SemanticsError::UnboundVariable(v.0.clone()));
        }
    }
    let ctx = IntervalCtx { automaton, horizon, provider, root: phi };
    let closed = closure(&env_breakpoints(paths), phi);
    Ok(eval_interval(&ctx, paths, &closed, t, anchor, phi))
}

fn eval_interval(
    ctx: &IntervalCtx<'_>,
    paths: &BTreeMap<PathVar, Execution>,
    closed: &BTreeSet<Rational>,
    t: &Rational,
    anchor: &Anchor,
    phi: &HcmtlFormula,
) -> bool {
    use HcmtlFormula::*;
    match phi {
        Atom(p, v) | NegAtom(p, v) => {
            let rho = &paths[v];
            let holds = rho
                .state_at(t)
                .map(|state| ctx.automaton.label(state).contains(p))
                .unwrap_or(false);
            match phi {
                Atom(..) => holds,
                // The reserved event-mark proposition asserts "an event occurs
                // here", which remains meaningful after a run has stopped: a
                // stopped run has no further events. Its negation is therefore
                // classical, unlike ordinary propositions, whose two polarities
                // are both false past the run's end.
                _ if p == MARK_PROP => !holds,
                _ => rho.state_at(t).is_some() && !holds,
            }
        }
        Or(a, b) => {
            eval_interval(ctx, paths, closed, t, anchor, a)
                || eval_interval(ctx, paths, closed, t, anchor, b)
        }
        And(a, b) => {
            eval_interval(ctx, paths, closed, t, anchor, a)
                && eval_interval(ctx, paths, closed, t, anchor, b)
        }
        Finally(i, a) => match operator_window(t, i, ctx.horizon) {
            None => false,
            Some(w) => sample_times(closed, &w)
                .iter()
                .any(|tp| eval_interval(ctx, paths, closed, tp, anchor, a)),
        },
        Globally(i, a) => match operator_window(t, i, ctx.horizon) {
            None => true,
            Some(w) => sample_times(closed, &w)
                .iter()
                .all(|tp| eval_interval(ctx, paths, closed, tp, anchor, a)),
        },
        Until(i, a, b) => match operator_window(t, i, ctx.horizon) {
            None => false,
            Some(w) => sample_times(closed, &w).iter().any(|tp| {
                eval_interval(ctx, paths, closed, tp, anchor, b)
                    && between_all_interval(ctx, paths, closed, t, tp, anchor, a)
            }),
        },
        Exists(v, a) => {
            quantify_interval(ctx, paths, t, anchor, v, a, true)
        }
        Forall(v, a) => {
            quantify_interval(ctx, paths, t, anchor, v, a, false)
        }
    }
}

/// ∀ t″ with t < t″ < t′: φ holds (the left operand of until).
fn between_all_interval(
    ctx: &IntervalCtx<'_>,
    paths: &BTreeMap<PathVar, Execution>,
    closed: &BTreeSet<Rational>,
    t: &Rational,
    tp: &Rational,
    anchor: &Anchor,
    phi: &HcmtlFormula,
) -> bool {
    if tp <= t {
        return true;
    }
    let w = match Interval::new(t.clone(), TimeBound::Finite(tp.clone()), false, false) {
        Ok(w) => w,
        Err(_) => return true,
    };
    sample_times(closed, &w)
        .iter()
        .all(|ts| eval_interval(ctx, paths, closed, ts, anchor, phi))
}

fn quantify_interval(
    ctx: &IntervalCtx<'_>,
    paths: &BTreeMap<PathVar, Execution>,
    t: &Rational,
    anchor: &Anchor,
    var: &PathVar,
    body: &HcmtlFormula,
    existential: bool,
) -> bool {
    let anchor_run = match anchor {
        Anchor::Epsilon => {
            // Branching from ε is only defined at time 0.
            if !t.is_zero() {
                return !existential;
            }
            None
        }
        Anchor::Var(d) => {
            let rho = &paths[d];
            if !rho.spans(t) {
                // At or past the run's end branching is impossible; ∃ has no
                // witness and ∀ holds vacuously.
                return !existential;
            }
            Some(rho)
        }
    };
    let raw = ctx.provider.candidates(
        ctx.automaton,
        anchor_run.map(|r| (r, t)),
        ctx.horizon,
    );
    let candidates: Vec<Execution> = match anchor_run {
        None => raw,
        Some(rho) => {
            let want = rho.prefix(t).ok();
            raw.into_iter()
                .filter(|c| c.prefix(t).ok() == want && want.is_some())
                .collect()
        }
    };
    if candidates.is_empty() {
        eprintln!(
            "warning: run provider yielded no candidates for {}{}; \
             existential is false and universal vacuously true",
            if existential { "exists " } else { "forall " },
            var
        );
        return !existential;
    }
    for rho in candidates {
        let mut extended = paths.clone();
        extended.insert(var.clone(), rho);
        let closed = closure(&env_breakpoints(&extended), ctx.root);
        let sub = eval_interval(
            ctx,
            &extended,
            &closed,
            t,
            &Anchor::Var(var.clone()),
            body,
        );
        if existential && sub {
            return true;
        }
        if !existential && !sub {
            return false;
        }
    }
    !existential
}

/// Whether `eta` is an extension of `base` from time `t`: identical steps up
/// to the last event at or before `t`, with any continuation strictly later
/// than `t`.
pub fn is_extension_from(eta: &PointExecution, base: &PointExecution, t: &Rational) -> bool {
    let j = base.steps.iter().take_while(|s| &s.time <= t).count();
    if eta.steps.len() < j {
        return false;
    }
    if eta.steps[..j] != base.steps[..j] {
        return false;
    }
    match eta.steps.get(j) {
        None => true,
        Some(next) => &next.time > t,
    }
}

struct PointCtx<'a> {
    automaton: &'a PointTimedAutomaton,
    horizon: &'a TimeBound,
    provider: &'a dyn PointExecutionProvider,
}

/// Point-based satisfaction: Γ, t, † ⊨ φ, bounded by `horizon`.
pub fn sat_point(
    automaton: &PointTimedAutomaton,
    paths: &BTreeMap<PathVar, PointExecution>,
    t: &Rational,
    anchor: &Anchor,
    phi: &HcmtlFormula,
    horizon: &TimeBound,
    provider: &dyn PointExecutionProvider,
) -> Result<bool, SemanticsError> {
    if t.is_negative() {
        return Err(SemanticsError::NegativeTime(t.clone()));
    }
    if let TimeBound::Finite(n) = horizon {
        if t >= n {
            return Err(SemanticsError::TimeBeyondHorizon(t.clone(), horizon.clone()));
        }
    }
    for v in phi.free_vars() {
        if !paths.contains_key(&v) {
            return Err(SemanticsError::UnboundVariable(v.0));
        }
    }
    if let Anchor::Var(v) = anchor {
        if !paths.contains_key(v) {
            return Err(SemanticsError::UnboundVariable(v.0.clone()));
        }
    }
    let ctx = PointCtx { automaton, horizon, provider };
    Ok(eval_point(&ctx, paths, t, anchor, phi))
}

/// All event times of all runs in the environment, in order.
fn event_points(paths: &BTreeMap<PathVar, PointExecution>) -> BTreeSet<Rational> {
    let mut out = BTreeSet::new();
    for eta in paths.values() {
        for s in &eta.steps {
            out.insert(s.time.clone());
        }
    }
    out
}

fn eval_point(
    ctx: &PointCtx<'_>,
    paths: &BTreeMap<PathVar, PointExecution>,
    t: &Rational,
    anchor: &Anchor,
    phi: &HcmtlFormula,
) -> bool {
    use HcmtlFormula::*;
    match phi {
        Atom(p, v) | NegAtom(p, v) => {
            let eta = &paths[v];
            match eta.event_at(ctx.automaton, t) {
                None => false,
                Some(event) => {
                    let holds = event.contains(p);
                    if matches!(phi, Atom(..)) { holds } else { !holds }
                }
            }
        }
        Or(a, b) => {
            eval_point(ctx, paths, t, anchor, a) || eval_point(ctx, paths, t, anchor, b)
        }
        And(a, b) => {
            eval_point(ctx, paths, t, anchor, a) && eval_point(ctx, paths, t, anchor, b)
        }
        Finally(i, a) => point_window(ctx, paths, t, i)
            .iter()
            .any(|tp| eval_point(ctx, paths, tp, anchor, a)),
        Globally(i, a) => point_window(ctx, paths, t, i)
            .iter()
            .all(|tp| eval_point(ctx, paths, tp, anchor, a)),
        Until(i, a, b) => point_window(ctx, paths, t, i).iter().any(|tp| {
            eval_point(ctx, paths, tp, anchor, b)
                && event_points(paths)
                    .iter()
                    .filter(|ts| *ts > t && *ts < tp)
                    .all(|ts| eval_point(ctx, paths, ts, anchor, a))
        }),
        Exists(v, a) => quantify_point(ctx, paths, t, anchor, v, a, true),
        Forall(v, a) => quantify_point(ctx, paths, t, anchor, v, a, false),
    }
}

/// Event points t′ of the environment with t′ > t, t′ − t ∈ i, t′ < N.
fn point_window(
    ctx: &PointCtx<'_>,
    paths: &BTreeMap<PathVar, PointExecution>,
    t: &Rational,
    i: &Interval,
) -> Vec<Rational> {
    event_points(paths)
        .into_iter()
        .filter(|tp| {
            tp > t
                && i.contains(&(tp - t))
                && match ctx.horizon {
                    TimeBound::Infinity => true,
                    TimeBound::Finite(n) => tp < n,
                }
        })
        .collect()
}

fn quantify_point(
    ctx: &PointCtx<'_>,
    paths: &BTreeMap<PathVar, PointExecution>,
    t: &Rational,
    anchor: &Anchor,
    var: &PathVar,
    body: &HcmtlFormula,
    existential: bool,
) -> bool {
    let anchor_run = match anchor {
        Anchor::Epsilon => {
            if !t.is_zero() {
                return !existential;
            }
            None
        }
        Anchor::Var(d) => {
            let eta = &paths[d];
            if t > &eta.duration() {
                return !existential;
            }
            Some(eta)
        }
    };
    let raw = ctx.provider.candidates(
        ctx.automaton,
        anchor_run.map(|r| (r, t)),
        ctx.horizon,
    );
    let candidates: Vec<PointExecution> = match anchor_run {
        None => raw,
        Some(eta) => raw
            .into_iter()
            .filter(|c| is_extension_from(c, eta, t))
            .collect(),
    };
    if candidates.is_empty() {
        eprintln!(
            "warning: run provider yielded no candidates for {}{}; \
             existential is false and universal vacuously true",
            if existential { "exists " } else { "forall " },
            var
        );
        return !existential;
    }
    for eta in candidates {
        let mut extended = paths.clone();
        extended.insert(var.clone(), eta);
        let sub = eval_point(ctx, &extended, t, &Anchor::Var(var.clone()), body);
        if existential && sub {
            return true;
        }
        if !existential && !sub {
            return false;
        }
    }
    !existential
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Segment;
    use crate::pointwise::{PointEdge, PointStep};

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    fn f(s: &str) -> HcmtlFormula {
        crate::formula::parse_fragment(s).unwrap()
    }

    /// Single-state automaton where p always holds; one run π over [0,5).
    fn always_p() -> (TimedAutomaton, BTreeMap<PathVar, Execution>) {
        let a: TimedAutomaton = serde_json::from_str(
            r#"{
                "propositions": ["p", "q"],
                "states": ["v"],
                "initial": ["v"],
                "labels": {"v": ["p"]},
                "clocks": [],
                "stateConstraints": {},
                "edges": [],
                "final": ["v"]
            }"#,
        )
        .unwrap();
        let rho = Execution {
            segments: vec![Segment { state: "v".into(), interval: iv("[0,5)") }],
            transitions: vec![],
        };
        let mut paths = BTreeMap::new();
        paths.insert(PathVar("pi".into()), rho);
        (a, paths)
    }

    fn sat(
        a: &TimedAutomaton,
        paths: &BTreeMap<PathVar, Execution>,
        t: &str,
        phi: &str,
        horizon: &str,
    ) -> bool {
        sat_interval(
            a,
            paths,
            &rat(t),
            &Anchor::Var(PathVar("pi".into())),
            &f(phi),
            &horizon.parse().unwrap(),
            &NoRuns,
        )
        .unwrap()
    }

    #[test]
    fn excluded_middle_fails_past_run_end() {
        let (a, paths) = always_p();
        assert!(!sat(&a, &paths, "6", "p@pi", "10"));
        assert!(!sat(&a, &paths, "6", "!p@pi", "10"));
        assert!(sat(&a, &paths, "4", "p@pi", "10"));
        assert!(!sat(&a, &paths, "4", "!p@pi", "10"));
        // Exactly at the right-open end the run no longer spans t.
        assert!(!sat(&a, &paths, "5", "p@pi", "10"));
    }

    #[test]
    fn event_mark_negation_is_classical() {
        // A simulation-style automaton: `s` is an ordinary dwell state, `m`
        // is a marked event state. The mark's negation means "no event
        // occurs here", which still holds after the run has stopped, while
        // ordinary propositions lose both polarities there.
        let a: TimedAutomaton = serde_json::from_str(
            r##"{
                "propositions": ["p", "#"],
                "states": ["s", "m"],
                "initial": ["s"],
                "labels": {"s": ["p"], "m": ["#"]},
                "clocks": [],
                "stateConstraints": {},
                "edges": [{"from": "s", "to": "m", "guards": [], "resets": []}],
                "final": ["m"]
            }"##,
        )
        .unwrap();
        let rho = Execution {
            segments: vec![
                Segment { state: "s".into(), interval: iv("[0,1)") },
                Segment { state: "m".into(), interval: iv("[1,1]") },
            ],
            transitions: vec![0],
        };
        let pi = PathVar("pi".into());
        let mut paths = BTreeMap::new();
        paths.insert(pi.clone(), rho);
        let check = |t: &str, phi: &HcmtlFormula| {
            sat_interval(
                &a,
                &paths,
                &rat(t),
                &Anchor::Var(pi.clone()),
                phi,
                &"3".parse().unwrap(),
                &NoRuns,
            )
            .unwrap()
        };
        let mark = HcmtlFormula::Atom(MARK_PROP.into(), pi.clone());
        let no_mark = HcmtlFormula::NegAtom(MARK_PROP.into(), pi.clone());
        // During the dwell: unmarked.
        assert!(!check("1/2", &mark));
        assert!(check("1/2", &no_mark));
        // At the event instant: marked.
        assert!(check("1", &mark));
        assert!(!check("1", &no_mark));
        // Past the run's end: still "no event here", while an ordinary
        // proposition loses both polarities.
        assert!(!check("2", &mark));
        assert!(check("2", &no_mark));
        assert!(!check("2", &HcmtlFormula::Atom("p".into(), pi.clone())));
        assert!(!check("2", &HcmtlFormula::NegAtom("p".into(), pi.clone())));
    }

    #[test]
    fn globally_over_alive_prefix() {
        let (a, paths) = always_p();
        assert!(sat(&a, &paths, "0", "G[0,3] p@pi", "10"));
        // Beyond the run's end the atom fails, so a window reaching past 5
        // falsifies G.
        assert!(!sat(&a, &paths, "0", "G[0,6] p@pi", "10"));
        assert!(!sat(&a, &paths, "0", "G[0,5] p@pi", "10"));
        assert!(sat(&a, &paths, "0", "G(0,5) p@pi", "10"));
    }

    #[test]
    fn finally_is_strict() {
        // p holds only at the singular instant t = 0.
        let a: TimedAutomaton = serde_json::from_str(
            r#"{
                "propositions": ["p"],
                "states": ["u", "w"],
                "initial": ["u"],
                "labels": {"u": ["p"], "w": []},
                "clocks": [],
                "stateConstraints": {},
                "edges": [{"from": "u", "to": "w", "guards": [], "resets": []}],
                "final": ["w"]
            }"#,
        )
        .unwrap();
        let rho = Execution {
            segments: vec![
                Segment { state: "u".into(), interval: iv("[0,0]") },
                Segment { state: "w".into(), interval: iv("(0,2)") },
            ],
            transitions: vec![0],
        };
        let mut paths = BTreeMap::new();
        paths.insert(PathVar("pi".into()), rho);
        // t′ > t is strict, so the witness at t′ = 0 is out of reach.
        assert!(!sat(&a, &paths, "0", "F[0,1] p@pi", "10"));
        assert!(sat(&a, &paths, "0", "F[0,1] !p@pi", "10"));
    }

    #[test]
    fn bounded_horizon_clips_windows() {
        let (a, paths) = always_p();
        // Unbounded: the window [6,7] lies past the run, F finds nothing.
        assert!(!sat(&a, &paths, "0", "F[6,7] p@pi", "inf"));
        // Bounded N = 5: same verdict, window clipped away entirely.
        assert!(!sat(&a, &paths, "0", "F[6,7] p@pi", "5"));
        // G over an empty window is vacuously true.
        assert!(sat(&a, &paths, "0", "G[6,7] p@pi", "5"));
    }

    #[test]
    fn until_needs_left_operand_throughout() {
        // p on [0,2), then q at [2,2] and beyond.
        let a: TimedAutomaton = serde_json::from_str(
            r#"{
                "propositions": ["p", "q"],
                "states": ["u", "w"],
                "initial": ["u"],
                "labels": {"u": ["p"], "w": ["q"]},
                "clocks": [],
                "stateConstraints": {},
                "edges": [{"from": "u", "to": "w", "guards": [], "resets": []}],
                "final": ["w"]
            }"#,
        )
        .unwrap();
        let rho = Execution {
            segments: vec![
                Segment { state: "u".into(), interval: iv("[0,2)") },
                Segment { state: "w".into(), interval: iv("[2,4)") },
            ],
            transitions: vec![0],
        };
        let mut paths = BTreeMap::new();
        paths.insert(PathVar("pi".into()), rho);
        assert!(sat(&a, &paths, "0", "(p@pi U[0,3] q@pi)", "10"));
        // Requiring q strictly before 2 fails: no event point carries q there.
        assert!(!sat(&a, &paths, "0", "(p@pi U[0,3/2] q@pi)", "10"));
        // Left operand broken: demand q throughout before its own onset.
        assert!(!sat(&a, &paths, "0", "(q@pi U[0,3] q@pi)", "10"));
    }

    /// The negation rewrite for until, G_I ¬φ2 ∨ (¬φ2 U_[0,R(I)) ¬φ1), is not
    /// a true dual over dense time: when ¬φ1 and φ2 hold together on a region
    /// adjacent to the current time, the real negation is satisfied (every
    /// potential witness has an earlier φ1 violation) while the rewrite's
    /// second disjunct demands ¬φ2 before the ¬φ1 point and fails. Both a
    /// formula and its rewritten negation can then be false at once, even on
    /// a run alive through the whole horizon. Recorded as a known limitation
    /// of the rewrite, which is kept as given; the F, G, and Boolean duals
    /// are exact.
    #[test]
    fn until_dual_rewrite_is_not_a_true_dual_over_dense_time() {
        // q-state on [0,1], p-state on (1,2); the run spans all of [0,2).
        let a: TimedAutomaton = serde_json::from_str(
            r#"{
                "propositions": ["p", "q"],
                "states": ["w", "v"],
                "initial": ["w"],
                "labels": {"w": ["q"], "v": ["p"]},
                "clocks": [],
                "stateConstraints": {},
                "edges": [{"from": "w", "to": "v", "guards": [], "resets": []}],
                "final": ["v"]
            }"#,
        )
        .unwrap();
        let rho = Execution {
            segments: vec![
                Segment { state: "w".into(), interval: iv("[0,1]") },
                Segment { state: "v".into(), interval: iv("(1,2)") },
            ],
            transitions: vec![0],
        };
        let mut paths = BTreeMap::new();
        paths.insert(PathVar("pi".into()), rho);
        let phi = f("(!q@pi U[1,3] !p@pi)");
        // The until fails: its only ¬p witness in the window is t′ = 1, where
        // q has already held on (0,1).
        assert!(!sat(&a, &paths, "0", "(!q@pi U[1,3] !p@pi)", "2"));
        // The true negation holds (every window time has p or a prior q), but
        // the rewrite requires p on (0,1) and is false as well.
        let neg = phi.negate();
        assert_eq!(neg.to_string(), "G[1,3] p@pi | (p@pi U[0,3) q@pi)");
        let both_false = !sat_interval(
            &a,
            &paths,
            &rat("0"),
            &Anchor::Var(PathVar("pi".into())),
            &neg,
            &"2".parse().unwrap(),
            &NoRuns,
        )
        .unwrap();
        assert!(both_false);
        // The same collapse with a window already open at 0: ¬φ1 = q and
        // φ2 = ¬p hold together on the initial q-region, so every witness is
        // blocked, yet the rewrite cannot exhibit the blocking q either.
        let phi0 = f("(!q@pi U[0,2] !p@pi)");
        assert!(!sat(&a, &paths, "0", "(!q@pi U[0,2] !p@pi)", "2"));
        let neg0 = sat_interval(
            &a,
            &paths,
            &rat("0"),
            &Anchor::Var(PathVar("pi".into())),
            &phi0.negate(),
            &"2".parse().unwrap(),
            &NoRuns,
        )
        .unwrap();
        assert!(!neg0);
    }

    #[test]
    fn quantifier_branching_rules() {
        let (a, paths) = always_p();
        struct Fixed(Execution);
        impl ExecutionProvider for Fixed {
            fn candidates(
                &self,
                _: &TimedAutomaton,
                _: Option<(&Execution, &Rational)>,
                _: &TimeBound,
            ) -> Vec<Execution> {
                vec![self.0.clone()]
            }
        }
        let provider = Fixed(paths[&PathVar("pi".into())].clone());
        let phi = f("exists rho. G[0,3] p@rho");
        // Anchored at π while π is alive: the provider's run satisfies G p.
        let ok = sat_interval(
            &a,
            &paths,
            &rat("1"),
            &Anchor::Var(PathVar("pi".into())),
            &phi,
            &"10".parse().unwrap(),
            &provider,
        )
        .unwrap();
        assert!(ok);
        // At t = 6 the anchor run has ended: ∃ is false, ∀ vacuously true.
        let ended_e = sat_interval(
            &a,
            &paths,
            &rat("6"),
            &Anchor::Var(PathVar("pi".into())),
            &phi,
            &"10".parse().unwrap(),
            &provider,
        )
        .unwrap();
        assert!(!ended_e);
        let ended_a = sat_interval(
            &a,
            &paths,
            &rat("6"),
            &Anchor::Var(PathVar("pi".into())),
            &f("forall rho. G[0,3] p@rho"),
            &"10".parse().unwrap(),
            &provider,
        )
        .unwrap();
        assert!(ended_a);
        // ε anchor away from time 0: branching impossible.
        let eps = sat_interval(
            &a,
            &BTreeMap::new(),
            &rat("1"),
            &Anchor::Epsilon,
            &f("exists rho. p@rho"),
            &"10".parse().unwrap(),
            &provider,
        )
        .unwrap();
        assert!(!eps);
    }

    #[test]
    fn horizon_precondition() {
        let (a, paths) = always_p();
        let err = sat_interval(
            &a,
            &paths,
            &rat("5"),
            &Anchor::Var(PathVar("pi".into())),
            &f("p@pi"),
            &"5".parse().unwrap(),
            &NoRuns,
        );
        assert!(matches!(err, Err(SemanticsError::TimeBeyondHorizon(..))));
    }

    #[test]
    fn critical_point_grid_shape() {
        let (_, paths) = always_p();
        let phi = f("F[1,2] p@pi");
        let pts = critical_points(&paths, &phi, &iv("[0,6]"));
        for need in ["0", "1", "2", "3", "4", "5", "6"] {
            assert!(pts.contains(&rat(need)), "missing {}", need);
        }
        // Midpoints fill every gap.
        assert!(pts.contains(&rat("1/2")));
    }

    fn point_fixture() -> (PointTimedAutomaton, BTreeMap<PathVar, PointExecution>) {
        let s = |x: &str| x.to_string();
        let b = PointTimedAutomaton {
            propositions: vec![s("p"), s("q")],
            states: vec![s("s")],
            start: s("s"),
            clocks: vec![],
            transitions: vec![PointEdge {
                from: s("s"),
                event: BTreeSet::from([s("p")]),
                guards: vec![],
                resets: BTreeSet::new(),
                to: s("s"),
            }],
            final_states: vec![s("s")],
        };
        let eta = PointExecution {
            steps: vec![
                PointStep { edge: 0, time: rat("1") },
                PointStep { edge: 0, time: rat("2") },
            ],
        };
        let mut paths = BTreeMap::new();
        paths.insert(PathVar("pi".into()), eta);
        (b, paths)
    }

    #[test]
    fn point_semantics_ranges_over_event_points() {
        let (b, paths) = point_fixture();
        let go = |t: &str, phi: &str| {
            sat_point(
                &b,
                &paths,
                &rat(t),
                &Anchor::Var(PathVar("pi".into())),
                &f(phi),
                &"inf".parse().unwrap(),
                &NoRuns,
            )
            .unwrap()
        };
        assert!(go("0", "F[0,5] p@pi"));
        assert!(!go("0", "G[0,5] q@pi"));
        // Atoms only hold at event times.
        assert!(!go("0", "p@pi"));
        assert!(go("1", "p@pi"));
        assert!(!go("1", "q@pi"));
        assert!(go("1", "!q@pi"));
        // Strictness: from t = 1 only the event at 2 is visible.
        assert!(!go("2", "F[0,5] p@pi"));
        assert!(go("1", "F[0,5] p@pi"));
    }

    #[test]
    fn point_extension_check() {
        let base = PointExecution {
            steps: vec![
                PointStep { edge: 0, time: rat("1") },
                PointStep { edge: 0, time: rat("3") },
            ],
        };
        let branch = PointExecution {
            steps: vec![
                PointStep { edge: 0, time: rat("1") },
                PointStep { edge: 0, time: rat("5/2") },
            ],
        };
        // Branching at t = 2 keeps the event at 1 and replaces the tail.
        assert!(is_extension_from(&branch, &base, &rat("2")));
        // Branching at t = 3 must keep the event at 3.
        assert!(!is_extension_from(&branch, &base, &rat("3")));
        assert!(is_extension_from(&base, &base, &rat("3")));
        // A continuation at or before t is not a valid branch.
        let early = PointExecution {
            steps: vec![
                PointStep { edge: 0, time: rat("1") },
                PointStep { edge: 0, time: rat("2") },
            ],
        };
        assert!(!is_extension_from(&early, &base, &rat("2")));
    }

    #[test]
    fn environment_json_round_trip() {
        let (_, paths) = point_fixture();
        let env = Environment::Point {
            horizon: "5".parse().unwrap(),
            paths: paths
                .into_iter()
                .map(|(k, v)| (k.0, v))
                .collect(),
        };
        let text = serde_json::to_string(&env).unwrap();
        assert!(text.contains(r#""mode":"point""#));
        let back: Environment = serde_json::from_str(&text).unwrap();
        assert_eq!(back, env);
    }
}
