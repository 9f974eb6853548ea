//! Grid-bounded verification engine.
//!
//! Quantification over executions is undecidable in general; this engine
//! restricts quantifier domains to accepting runs whose interval endpoints
//! lie on a rational grid (multiples of 1/k) with at most d transitions, and
//! labels its verdicts accordingly. Within that restriction evaluation is
//! exact: every open/closed boundary orientation at every junction is
//! enumerated, and emitted runs are re-validated at full rational precision.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Execution, Segment, TimedAutomaton};
use crate::formula::{HcmtlFormula, PathVar};
use crate::mso::{self, MsoError, SoBudget};
use crate::pointwise::{
    build_interval_automaton, PointExecution, PointStep, PointTimedAutomaton,
};
use crate::semantics::{
    sat_interval, sat_point, Anchor, Environment, ExecutionProvider,
    PointExecutionProvider, SemanticsError,
};
use crate::timecore::{ClockValuation, Interval, Rational, TimeBound};

/// Search budget: quantified runs have all interval endpoints on the grid of
/// multiples of 1/`granularity` within [0, horizon], and at most
/// `max_transitions` transitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridBudget {
    pub granularity: u64,
    pub max_transitions: usize,
    pub horizon: Rational,
}

impl GridBudget {
    /// Grid points 0, 1/k, …, horizon (ascending).
    pub fn grid(&self) -> Vec<Rational> {
        let step = Rational::new(1, self.granularity as i64);
        let mut out = Vec::new();
        let mut p = Rational::zero();
        while p <= self.horizon {
            out.push(p.clone());
            p = &p + &step;
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("formula has free path variables; verification needs a sentence")]
    NotASentence,
    #[error("horizon must be positive, got {0}")]
    BadHorizon(Rational),
    #[error("granularity must be at least 1")]
    BadGranularity,
    #[error(
        "internal consistency failure: direct point evaluation says {direct}, \
         reduction through the interval simulation says {reduce}"
    )]
    RouteDisagreement { direct: bool, reduce: bool },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Mso(#[from] MsoError),
}

/// Verdict labels. `HoldsOnGrid`/`FailsWithWitness` are relative to the grid
/// restriction of quantifier domains; `Holds`/`Fails` mark exact results for
/// quantifier-free evaluation over a supplied environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VerdictKind {
    HoldsOnGrid,
    FailsWithWitness,
    Holds,
    Fails,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictStats {
    pub runs_enumerated: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    /// Counterexample environment for a failed universal prefix; replayable
    /// through the direct semantics. Absent for failed existentials (there is
    /// nothing to exhibit) and for passing verdicts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Environment>,
    pub budget: GridBudget,
    pub stats: VerdictStats,
    /// Wall time is reported out of band so verdict bytes stay deterministic.
    #[serde(skip)]
    pub wall: Duration,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, VerdictKind::HoldsOnGrid | VerdictKind::Holds)
    }
}

/// Quantifier provider backed by grid enumeration, counting yielded runs.
pub struct GridProvider<'a> {
    budget: &'a GridBudget,
    counter: AtomicU64,
}

impl<'a> GridProvider<'a> {
    pub fn new(budget: &'a GridBudget) -> Self {
        GridProvider { budget, counter: AtomicU64::new(0) }
    }

    pub fn runs_enumerated(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

impl ExecutionProvider for GridProvider<'_> {
    fn candidates(
        &self,
        automaton: &TimedAutomaton,
        anchor: Option<(&Execution, &Rational)>,
        _horizon: &TimeBound,
    ) -> Vec<Execution> {
        let runs = enumerate_runs(automaton, self.budget, anchor);
        self.counter.fetch_add(runs.len() as u64, Ordering::Relaxed);
        runs
    }
}

impl PointExecutionProvider for GridProvider<'_> {
    fn candidates(
        &self,
        automaton: &PointTimedAutomaton,
        anchor: Option<(&PointExecution, &Rational)>,
        _horizon: &TimeBound,
    ) -> Vec<PointExecution> {
        let runs = enumerate_point_runs(automaton, self.budget, anchor);
        self.counter.fetch_add(runs.len() as u64, Ordering::Relaxed);
        runs
    }
}

/// All accepting executions within the budget: endpoints on the grid, ≤ d
/// transitions, every boundary orientation, bounded by the horizon (the span
/// stays inside [0, N)), each re-validated at full precision. With an anchor
/// `(rho, t)`, only runs whose prefix at `t` equals `rho`'s are produced.
pub fn enumerate_runs(
    a: &TimedAutomaton,
    budget: &GridBudget,
    anchor: Option<(&Execution, &Rational)>,
) -> Vec<Execution> {
    let grid = budget.grid();
    let mut runs = match anchor {
        None => {
            let mut initial: Vec<&String> = a.initial.iter().collect();
            initial.sort();
            initial.dedup();
            // Partition by initial state; deterministic merge by map order.
            initial
                .par_iter()
                .map(|v0| {
                    let mut dfs = RunDfs {
                        a,
                        grid: &grid,
                        max_transitions: budget.max_transitions,
                        horizon: &budget.horizon,
                        out: Vec::new(),
                    };
                    let mu = ClockValuation::zero(&a.clocks);
                    dfs.extend(
                        &mut Vec::new(),
                        &mut Vec::new(),
                        v0,
                        &Rational::zero(),
                        true,
                        &mu,
                        &Rational::zero(),
                        false,
                    );
                    dfs.out
                })
                .reduce(Vec::new, |mut acc, mut part| {
                    acc.append(&mut part);
                    acc
                })
        }
        Some((rho, t)) => {
            if !rho.spans(t) {
                return Vec::new();
            }
            let pre = match rho.prefix(t) {
                Ok(p) => p,
                Err(_) => return Vec::new(),
            };
            // Clock valuation at the resumed segment's left endpoint, by
            // replaying the prefix transitions.
            let mut mu = ClockValuation::zero(&a.clocks);
            for (i, &e) in pre.transitions.iter().enumerate() {
                let seg = &pre.segments[i];
                let end = match seg.interval.right() {
                    TimeBound::Finite(r) => r.clone(),
                    TimeBound::Infinity => return Vec::new(),
                };
                let dwell = &end - seg.interval.left();
                let edge = match a.edges.get(e) {
                    Some(edge) => edge,
                    None => return Vec::new(),
                };
                mu = mu.elapse(&dwell).reset(&edge.resets);
            }
            let last = pre.segments.last().expect("prefix is nonempty");
            let mut dfs = RunDfs {
                a,
                grid: &grid,
                max_transitions: budget.max_transitions,
                horizon: &budget.horizon,
                out: Vec::new(),
            };
            let mut segs: Vec<Segment> =
                pre.segments[..pre.segments.len() - 1].to_vec();
            let mut trans = pre.transitions.clone();
            dfs.extend(
                &mut segs,
                &mut trans,
                &last.state,
                last.interval.left(),
                last.interval.left_closed(),
                &mu,
                t,
                true,
            );
            dfs.out
        }
    };
    runs.retain(|r| r.is_accepting(a) && r.validate(a).is_empty());
    sort_runs(&mut runs);
    runs.dedup();
    runs
}

/// Deterministic order: transition count, then segment shape.
fn sort_runs(runs: &mut [Execution]) {
    runs.sort_by_cached_key(|r| {
        (
            r.transitions.len(),
            serde_json::to_string(r).expect("executions serialize"),
        )
    });
}

struct RunDfs<'a> {
    a: &'a TimedAutomaton,
    grid: &'a [Rational],
    max_transitions: usize,
    horizon: &'a Rational,
    out: Vec<Execution>,
}

impl<'a> RunDfs<'a> {
    /// Quick per-segment state-constraint check at one contained time
    /// (rejection is sound; the exact analytic check happens at emission).
    fn segment_plausible(
        &self,
        state: &str,
        left: &Rational,
        iv: &Interval,
        mu: &ClockValuation,
    ) -> bool {
        let probe = if iv.is_singular() {
            iv.left().clone()
        } else {
            let right = iv
                .right()
                .finite()
                .expect("grid intervals are finite")
                .clone();
            Rational::midpoint(iv.left(), &right)
        };
        let elapsed = mu.elapse(&(&probe - left));
        self.a.clocks.iter().all(|x| {
            let beta = self.a.beta(state, x);
            elapsed.eval_constraint(&beta).unwrap_or(false)
        })
    }

    /// Extend the current open-ended segment (state, [left, …) with
    /// orientation `left_closed`, base valuation `mu` at `left`) by choosing
    /// a right endpoint ≥ `min_right`. When `locked_at_min` (anchored
    /// resume), the state may not change exactly at `min_right`, or the
    /// prefix at the anchor time would differ from the anchor's.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &mut self,
        segs: &mut Vec<Segment>,
        trans: &mut Vec<usize>,
        state: &str,
        left: &Rational,
        left_closed: bool,
        mu: &ClockValuation,
        min_right: &Rational,
        locked_at_min: bool,
    ) {
        let mut rights: Vec<Rational> = self
            .grid
            .iter()
            .filter(|r| *r >= left && *r >= min_right)
            .cloned()
            .collect();
        if min_right >= left && !rights.contains(min_right) {
            // Off-grid anchor time: allow resuming exactly there.
            rights.push(min_right.clone());
            rights.sort();
        }
        for r in rights {
            let singular = &r == left;
            if singular && !left_closed {
                continue;
            }
            // Terminate the run here (both right orientations).
            if self.a.is_final(state) {
                for rc in [true, false] {
                    if singular && !rc {
                        continue;
                    }
                    if !singular && !rc && &r == left {
                        continue;
                    }
                    // The anchor time must stay inside the run's span.
                    if locked_at_min && &r == min_right && !rc {
                        continue;
                    }
                    if rc && &r >= self.horizon {
                        continue;
                    }
                    let iv = Interval::new(
                        left.clone(),
                        TimeBound::Finite(r.clone()),
                        left_closed,
                        rc,
                    )
                    .expect("checked nonempty");
                    if !self.segment_plausible(state, left, &iv, mu) {
                        continue;
                    }
                    let mut run_segs = segs.clone();
                    run_segs.push(Segment { state: state.to_string(), interval: iv });
                    self.out.push(Execution {
                        segments: run_segs,
                        transitions: trans.clone(),
                    });
                }
            }
            // Take a transition at r.
            if trans.len() >= self.max_transitions || &r >= self.horizon {
                continue;
            }
            let mu_at_r = mu.elapse(&(&r - left));
            for (ei, edge) in self.a.edges.iter().enumerate() {
                if edge.from != state {
                    continue;
                }
                let ok = edge
                    .guards
                    .iter()
                    .all(|g| mu_at_r.eval_constraint(g).unwrap_or(false));
                if !ok {
                    continue;
                }
                let mu_next = mu_at_r.reset(&edge.resets);
                // Closed/open junction: current segment keeps r.
                {
                    let iv = Interval::new(
                        left.clone(),
                        TimeBound::Finite(r.clone()),
                        left_closed,
                        true,
                    )
                    .expect("checked nonempty");
                    if self.segment_plausible(state, left, &iv, mu) {
                        segs.push(Segment { state: state.to_string(), interval: iv });
                        trans.push(ei);
                        self.extend(
                            segs,
                            trans,
                            &edge.to,
                            &r,
                            false,
                            &mu_next,
                            &r,
                            false,
                        );
                        trans.pop();
                        segs.pop();
                    }
                }
                // Open/closed junction: the next segment claims r. Not
                // allowed exactly at a locked anchor time, where the state
                // at that time is pinned.
                if !singular && !(locked_at_min && &r == min_right) {
                    let iv = Interval::new(
                        left.clone(),
                        TimeBound::Finite(r.clone()),
                        left_closed,
                        false,
                    )
                    .expect("checked nonempty");
                    if self.segment_plausible(state, left, &iv, mu) {
                        segs.push(Segment { state: state.to_string(), interval: iv });
                        trans.push(ei);
                        self.extend(
                            segs,
                            trans,
                            &edge.to,
                            &r,
                            true,
                            &mu_next,
                            &r,
                            false,
                        );
                        trans.pop();
                        segs.pop();
                    }
                }
            }
        }
    }
}

/// All accepting point executions within the budget: strictly increasing
/// event times on the grid below the horizon, 1 ≤ events ≤ d, each
/// re-validated. With an anchor `(eta, t)`, only extensions of `eta` from `t`
/// are produced.
pub fn enumerate_point_runs(
    b: &PointTimedAutomaton,
    budget: &GridBudget,
    anchor: Option<(&PointExecution, &Rational)>,
) -> Vec<PointExecution> {
    let grid = budget.grid();
    let mut prefix: Vec<PointStep> = Vec::new();
    let mut state = b.start.clone();
    let mut mu = ClockValuation::zero(&b.clocks);
    let mut last_time = Rational::zero();
    // Strict lower bound on new event times; absent for fresh runs, whose
    // first event may fall at time 0.
    let mut floor: Option<Rational> = None;
    if let Some((eta, t)) = anchor {
        for step in &eta.steps {
            if &step.time > t {
                break;
            }
            let edge = match b.transitions.get(step.edge) {
                Some(e) => e,
                None => return Vec::new(),
            };
            if edge.from != state {
                return Vec::new();
            }
            mu = mu.elapse(&(&step.time - &last_time)).reset(&edge.resets);
            last_time = step.time.clone();
            state = edge.to.clone();
            prefix.push(step.clone());
        }
        floor = Some(t.clone());
    }
    let mut out = Vec::new();
    let max = budget.max_transitions.max(1);
    point_dfs(
        b, &grid, &budget.horizon, max, &mut prefix, &state, &mu, &last_time,
        &floor, &mut out,
    );
    out.retain(|eta| eta.is_accepting(b) && eta.validate(b).is_empty());
    out.sort_by_cached_key(|eta| {
        (
            eta.steps.len(),
            serde_json::to_string(eta).expect("executions serialize"),
        )
    });
    out.dedup();
    out
}

#[allow(clippy::too_many_arguments)]
fn point_dfs(
    b: &PointTimedAutomaton,
    grid: &[Rational],
    horizon: &Rational,
    max_events: usize,
    steps: &mut Vec<PointStep>,
    state: &str,
    mu: &ClockValuation,
    last_time: &Rational,
    floor: &Option<Rational>,
    out: &mut Vec<PointExecution>,
) {
    if !steps.is_empty() && b.final_states.iter().any(|f| f == state) {
        out.push(PointExecution { steps: steps.clone() });
    }
    if steps.len() >= max_events {
        return;
    }
    for t in grid {
        // Event times strictly increase, stay strictly past the anchor time
        // when extending, and stay below the horizon (the simulated interval
        // run must fit in [0, N)).
        if matches!(floor, Some(f) if t <= f) || t >= horizon {
            continue;
        }
        if !steps.is_empty() && t <= last_time {
            continue;
        }
        let mu_at_t = mu.elapse(&(t - last_time));
        for (ei, edge) in b.transitions.iter().enumerate() {
            if edge.from != state {
                continue;
            }
            let ok = edge
                .guards
                .iter()
                .all(|g| mu_at_t.eval_constraint(g).unwrap_or(false));
            if !ok {
                continue;
            }
            steps.push(PointStep { edge: ei, time: t.clone() });
            let mu_next = mu_at_t.reset(&edge.resets);
            point_dfs(
                b, grid, horizon, max_events, steps, &edge.to, &mu_next, t, floor,
                out,
            );
            steps.pop();
        }
    }
}

fn check_budget(budget: &GridBudget) -> Result<(), EngineError> {
    if budget.granularity == 0 {
        return Err(EngineError::BadGranularity);
    }
    if budget.horizon <= Rational::zero() {
        return Err(EngineError::BadHorizon(budget.horizon.clone()));
    }
    Ok(())
}

/// Decide the sentence over the automaton under the bounded-time relation,
/// with quantifiers restricted to the budgeted grid.
pub fn verify(
    a: &TimedAutomaton,
    phi: &HcmtlFormula,
    budget: &GridBudget,
) -> Result<Verdict, EngineError> {
    check_budget(budget)?;
    if !phi.is_sentence() {
        return Err(EngineError::NotASentence);
    }
    let started = Instant::now();
    let provider = GridProvider::new(budget);
    let horizon = TimeBound::Finite(budget.horizon.clone());
    let empty = BTreeMap::new();
    let holds = sat_interval(
        a,
        &empty,
        &Rational::zero(),
        &Anchor::Epsilon,
        phi,
        &horizon,
        &provider,
    )?;
    let witness = if holds {
        None
    } else {
        find_witness(a, phi, budget, &provider)?
    };
    Ok(Verdict {
        verdict: if holds {
            VerdictKind::HoldsOnGrid
        } else {
            VerdictKind::FailsWithWitness
        },
        witness,
        budget: budget.clone(),
        stats: VerdictStats { runs_enumerated: provider.runs_enumerated() },
        wall: started.elapsed(),
    })
}

/// For a failed sentence with a universal prefix, bind each leading ∀ to a
/// minimal run falsifying the rest; the bindings replay to false through the
/// direct semantics. A failed leading ∃ has no witness.
fn find_witness(
    a: &TimedAutomaton,
    phi: &HcmtlFormula,
    budget: &GridBudget,
    provider: &GridProvider<'_>,
) -> Result<Option<Environment>, EngineError> {
    let horizon = TimeBound::Finite(budget.horizon.clone());
    let zero = Rational::zero();
    let mut paths: BTreeMap<PathVar, Execution> = BTreeMap::new();
    let mut cur = phi;
    let mut anchor_run: Option<Execution> = None;
    while let HcmtlFormula::Forall(v, body) = cur {
        let candidates = enumerate_runs(
            a,
            budget,
            anchor_run.as_ref().map(|r| (r, &zero)),
        );
        let mut found = None;
        for c in candidates {
            let mut trial = paths.clone();
            trial.insert(v.clone(), c.clone());
            let sat = sat_interval(
                a,
                &trial,
                &zero,
                &Anchor::Var(v.clone()),
                body,
                &horizon,
                provider,
            )?;
            if !sat {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => {
                paths.insert(v.clone(), c.clone());
                anchor_run = Some(c);
                cur = body;
            }
            // ∀ over an empty grid domain is vacuously true; the failure
            // came from elsewhere and there is nothing to exhibit.
            None => break,
        }
    }
    if paths.is_empty() {
        return Ok(None);
    }
    Ok(Some(Environment::Interval {
        horizon,
        paths: paths.into_iter().map(|(k, v)| (k.0, v)).collect(),
    }))
}

/// Cap the global worker pool used for run enumeration. Effective only
/// before the pool's first use; later calls report an error.
pub fn configure_threads(jobs: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Confirm a counterexample environment: bind the sentence's leading ∀
/// variables to the witness runs and check that the remaining body evaluates
/// to false at time 0 (anchored at the innermost bound variable).
pub fn replay_witness(
    a: &TimedAutomaton,
    phi: &HcmtlFormula,
    witness: &Environment,
    budget: &GridBudget,
) -> Result<bool, EngineError> {
    let Environment::Interval { horizon, paths } = witness else {
        return Ok(false);
    };
    let provider = GridProvider::new(budget);
    let zero = Rational::zero();
    let mut env: BTreeMap<PathVar, Execution> = BTreeMap::new();
    let mut cur = phi;
    let mut last = None;
    while let HcmtlFormula::Forall(v, body) = cur {
        match paths.get(&v.0) {
            Some(rho) => {
                env.insert(v.clone(), rho.clone());
                last = Some(v.clone());
                cur = body;
            }
            None => break,
        }
    }
    let Some(last) = last else { return Ok(false) };
    let sat = sat_interval(
        a,
        &env,
        &zero,
        &Anchor::Var(last),
        cur,
        horizon,
        &provider,
    )?;
    Ok(!sat)
}

/// Point-mode counterpart of [`replay_witness`].
pub fn replay_point_witness(
    b: &PointTimedAutomaton,
    phi: &HcmtlFormula,
    witness: &Environment,
    budget: &GridBudget,
) -> Result<bool, EngineError> {
    let Environment::Point { horizon, paths } = witness else {
        return Ok(false);
    };
    let provider = GridProvider::new(budget);
    let zero = Rational::zero();
    let mut env: BTreeMap<PathVar, PointExecution> = BTreeMap::new();
    let mut cur = phi;
    let mut last = None;
    while let HcmtlFormula::Forall(v, body) = cur {
        match paths.get(&v.0) {
            Some(eta) => {
                env.insert(v.clone(), eta.clone());
                last = Some(v.clone());
                cur = body;
            }
            None => break,
        }
    }
    let Some(last) = last else { return Ok(false) };
    let sat = sat_point(
        b,
        &env,
        &zero,
        &Anchor::Var(last),
        cur,
        horizon,
        &provider,
    )?;
    Ok(!sat)
}

/// Which evaluation route `verify_point` reports; both are always computed
/// and must agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Point semantics with a grid event enumerator.
    Direct,
    /// Interval verification of the simulating automaton and the transformed
    /// formula.
    Reduce,
}

/// Decide the sentence over a point-based automaton. The direct route
/// evaluates the point semantics; the reduce route verifies the interval
/// simulation against the transformed formula. A simulated run with k events
/// uses 2k − 1 interval transitions, or 2k − 2 when its first event is at
/// time 0, so the event budget d corresponds exactly to the transition budget
/// 2d − 1: anything looser admits simulated runs with more than d events.
/// Disagreement between the routes is an internal-consistency failure.
pub fn verify_point(
    b: &PointTimedAutomaton,
    phi: &HcmtlFormula,
    budget: &GridBudget,
    route: Route,
) -> Result<Verdict, EngineError> {
    check_budget(budget)?;
    if !phi.is_sentence() {
        return Err(EngineError::NotASentence);
    }
    let started = Instant::now();
    let provider = GridProvider::new(budget);
    let horizon = TimeBound::Finite(budget.horizon.clone());
    let empty = BTreeMap::new();
    let direct_holds = sat_point(
        b,
        &empty,
        &Rational::zero(),
        &Anchor::Epsilon,
        phi,
        &horizon,
        &provider,
    )?;
    let a_int = build_interval_automaton(b);
    let phi_int = phi.point_to_interval(&[]);
    let reduce_budget = GridBudget {
        granularity: budget.granularity,
        max_transitions: 2 * budget.max_transitions.max(1) - 1,
        horizon: budget.horizon.clone(),
    };
    let reduce_verdict = verify(&a_int, &phi_int, &reduce_budget)?;
    if direct_holds != reduce_verdict.holds() {
        return Err(EngineError::RouteDisagreement {
            direct: direct_holds,
            reduce: reduce_verdict.holds(),
        });
    }
    match route {
        Route::Reduce => Ok(reduce_verdict),
        Route::Direct => {
            let witness = if direct_holds {
                None
            } else {
                find_point_witness(b, phi, budget, &provider)?
            };
            Ok(Verdict {
                verdict: if direct_holds {
                    VerdictKind::HoldsOnGrid
                } else {
                    VerdictKind::FailsWithWitness
                },
                witness,
                budget: budget.clone(),
                stats: VerdictStats {
                    runs_enumerated: provider.runs_enumerated(),
                },
                wall: started.elapsed(),
            })
        }
    }
}

fn find_point_witness(
    b: &PointTimedAutomaton,
    phi: &HcmtlFormula,
    budget: &GridBudget,
    provider: &GridProvider<'_>,
) -> Result<Option<Environment>, EngineError> {
    let horizon = TimeBound::Finite(budget.horizon.clone());
    let zero = Rational::zero();
    let mut paths: BTreeMap<PathVar, PointExecution> = BTreeMap::new();
    let mut cur = phi;
    let mut anchor_run: Option<PointExecution> = None;
    while let HcmtlFormula::Forall(v, body) = cur {
        let candidates = enumerate_point_runs(
            b,
            budget,
            anchor_run.as_ref().map(|r| (r, &zero)),
        );
        let mut found = None;
        for c in candidates {
            let mut trial = paths.clone();
            trial.insert(v.clone(), c.clone());
            let sat = sat_point(
                b,
                &trial,
                &zero,
                &Anchor::Var(v.clone()),
                body,
                &horizon,
                provider,
            )?;
            if !sat {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => {
                paths.insert(v.clone(), c.clone());
                anchor_run = Some(c);
                cur = body;
            }
            None => break,
        }
    }
    if paths.is_empty() {
        return Ok(None);
    }
    Ok(Some(Environment::Point {
        horizon,
        paths: paths.into_iter().map(|(k, v)| (k.0, v)).collect(),
    }))
}

/// One direct-vs-compiled disagreement, with enough context to replay it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossCheckDisagreement {
    pub paths: BTreeMap<String, Execution>,
    pub time: Rational,
    /// Anchoring path variable; absent for the ε anchor.
    pub anchor: Option<String>,
    pub direct: bool,
    pub compiled: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub samples: usize,
    pub agreements: usize,
    pub disagreements: Vec<CrossCheckDisagreement>,
}

/// Sample random grid environments, times, and anchors; compare the direct
/// interval semantics against evaluating the compiled flow formula over the
/// encoded environment. The instance is scaled to integer constants for
/// compilation; the evaluation budget mirrors the grid budget (granularity
/// carried over, witness segments bounded by transitions + 1).
pub fn cross_check_mso(
    a: &TimedAutomaton,
    phi: &HcmtlFormula,
    budget: &GridBudget,
    samples: usize,
    seed: u64,
) -> Result<CrossCheckReport, EngineError> {
    check_budget(budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = enumerate_runs(a, budget, None);
    let free = phi.free_vars();
    if pool.is_empty() && !free.is_empty() {
        return Ok(CrossCheckReport {
            samples: 0,
            agreements: 0,
            disagreements: Vec::new(),
        });
    }
    let factor = mso::scaling_factor(a, Some(phi), &budget.horizon);
    let scaled_a = mso::scale_automaton(a, &factor);
    let scaled_phi = mso::scale_formula(phi, &factor);
    let scaled_horizon = &budget.horizon * &factor;
    let translation = mso::translate_hcmtl(&scaled_phi, &scaled_a)?;
    let so_budget = SoBudget {
        granularity: budget.granularity,
        max_segments: budget.max_transitions + 1,
    };
    let horizon = TimeBound::Finite(budget.horizon.clone());
    let provider = GridProvider::new(budget);
    let grid = budget.grid();
    let times: Vec<&Rational> =
        grid.iter().filter(|t| **t < budget.horizon).collect();
    let quantified = !phi.is_quantifier_free();
    let mut report = CrossCheckReport {
        samples,
        agreements: 0,
        disagreements: Vec::new(),
    };
    for _ in 0..samples {
        let mut paths: BTreeMap<PathVar, Execution> = BTreeMap::new();
        for v in &free {
            let rho = pool.choose(&mut rng).expect("pool nonempty").clone();
            paths.insert(v.clone(), rho);
        }
        // Anchor index 0 is ε; i ≥ 1 anchors at the i-th free variable.
        let anchor_idx = rng.gen_range(0..=free.len());
        // ε-anchored quantifiers only branch at time 0.
        let t = if quantified && anchor_idx == 0 {
            Rational::zero()
        } else {
            (*times.choose(&mut rng).expect("grid below horizon")).clone()
        };
        let anchor = match anchor_idx {
            0 => Anchor::Epsilon,
            i => Anchor::Var(free[i - 1].clone()),
        };
        let direct =
            sat_interval(a, &paths, &t, &anchor, phi, &horizon, &provider)?;
        let scaled_paths: BTreeMap<PathVar, Execution> = paths
            .iter()
            .map(|(k, v)| (k.clone(), mso::scale_execution(v, &factor)))
            .collect();
        let flow = mso::env_to_flow(
            &scaled_a,
            &scaled_paths,
            &free,
            &scaled_horizon,
        )?;
        let mut interp = BTreeMap::new();
        interp.insert(translation.free_var.clone(), &t * &factor);
        let compiled = mso::eval_mso(
            &flow,
            &interp,
            &translation.formulas[anchor_idx],
            &so_budget,
        )?;
        if direct == compiled {
            report.agreements += 1;
        } else {
            report.disagreements.push(CrossCheckDisagreement {
                paths: paths.into_iter().map(|(k, v)| (k.0, v)).collect(),
                time: t,
                anchor: match anchor {
                    Anchor::Epsilon => None,
                    Anchor::Var(v) => Some(v.0),
                },
                direct,
                compiled,
            });
        }
    }
    Ok(report)
}
