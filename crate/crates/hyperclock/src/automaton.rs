//! Interval-based timed automata, their executions, and the one-to-one
//! encoding of executions as flows of monadic predicates.
//!
//! An execution is a sequence of (state, interval) pairs connected by edges;
//! the flow encoding decorates transition instants with `T−`/`T+` markers and
//! reset markers so that distinct executions map to distinct flows and the
//! original execution can be reconstructed from its flow alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::timecore::{
    ClockConstraint, ClockValuation, Interval, IntervalSequence, Rational, TimeBound,
};

/// Edge of a timed automaton: source, target, a set of guard constraints that
/// must hold when the edge is taken, and the clocks reset by taking it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub guards: Vec<ClockConstraint>,
    #[serde(default)]
    pub resets: BTreeSet<String>,
}

/// Interval-based timed automaton.
///
/// State constraints are total on states × clocks; entries absent from
/// `state_constraints` default to the always-true constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TimedAutomaton {
    pub propositions: Vec<String>,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    #[serde(default)]
    pub labels: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub clocks: Vec<String>,
    #[serde(default)]
    pub state_constraints: BTreeMap<String, BTreeMap<String, ClockConstraint>>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(rename = "final")]
    pub final_states: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("state {0:?} is not declared")]
    UnknownState(String),
    #[error("clock {0:?} is not declared")]
    UnknownClock(String),
    #[error("proposition {0:?} is not declared")]
    UnknownProposition(String),
    #[error("duplicate identifier {0:?}")]
    Duplicate(String),
    #[error("state constraint for ({0}, {1}) mentions foreign clock {2:?}")]
    ForeignClock(String, String, String),
}

impl TimedAutomaton {
    /// Well-formedness: all cross references resolve, no duplicate ids, and
    /// each state constraint for (v, x) is a constraint over x alone.
    pub fn validate(&self) -> Result<(), AutomatonError> {
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s.clone()) {
                return Err(AutomatonError::Duplicate(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &self.clocks {
            if !seen.insert(c.clone()) {
                return Err(AutomatonError::Duplicate(c.clone()));
            }
        }
        let states: BTreeSet<&String> = self.states.iter().collect();
        let clocks: BTreeSet<&String> = self.clocks.iter().collect();
        let props: BTreeSet<&String> = self.propositions.iter().collect();
        for s in self.initial.iter().chain(&self.final_states) {
            if !states.contains(s) {
                return Err(AutomatonError::UnknownState(s.clone()));
            }
        }
        for (s, ps) in &self.labels {
            if !states.contains(s) {
                return Err(AutomatonError::UnknownState(s.clone()));
            }
            for p in ps {
                if !props.contains(p) {
                    return Err(AutomatonError::UnknownProposition(p.clone()));
                }
            }
        }
        for (s, per_clock) in &self.state_constraints {
            if !states.contains(s) {
                return Err(AutomatonError::UnknownState(s.clone()));
            }
            for (x, psi) in per_clock {
                if !clocks.contains(x) {
                    return Err(AutomatonError::UnknownClock(x.clone()));
                }
                for y in psi.clocks() {
                    if &y != x {
                        return Err(AutomatonError::ForeignClock(s.clone(), x.clone(), y));
                    }
                }
            }
        }
        for e in &self.edges {
            for s in [&e.from, &e.to] {
                if !states.contains(s) {
                    return Err(AutomatonError::UnknownState(s.clone()));
                }
            }
            for x in &e.resets {
                if !clocks.contains(x) {
                    return Err(AutomatonError::UnknownClock(x.clone()));
                }
            }
            for g in &e.guards {
                for x in g.clocks() {
                    if !clocks.contains(&x) {
                        return Err(AutomatonError::UnknownClock(x));
                    }
                }
            }
        }
        Ok(())
    }

    /// Propositions labeling state `v` (empty set when unlabeled).
    pub fn label(&self, v: &str) -> BTreeSet<String> {
        self.labels.get(v).cloned().unwrap_or_default()
    }

    /// State constraint β(v, x); the always-true constraint when unspecified.
    pub fn beta(&self, v: &str, x: &str) -> ClockConstraint {
        self.state_constraints
            .get(v)
            .and_then(|m| m.get(x))
            .cloned()
            .unwrap_or(ClockConstraint::True)
    }

    pub fn is_initial(&self, v: &str) -> bool {
        self.initial.iter().any(|s| s == v)
    }

    pub fn is_final(&self, v: &str) -> bool {
        self.final_states.iter().any(|s| s == v)
    }

    /// All rational constants appearing in constraints and guards.
    pub fn constants(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for per_clock in self.state_constraints.values() {
            for psi in per_clock.values() {
                out.extend(psi.constants());
            }
        }
        for e in &self.edges {
            for g in &e.guards {
                out.extend(g.constants());
            }
        }
        out
    }
}

/// One (state, interval) segment of an execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub state: String,
    pub interval: Interval,
}

/// Execution of a timed automaton: segments connected by edges (stored as
/// indices into the automaton's edge list so violations are attributable).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Execution {
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub transitions: Vec<usize>,
}

/// A single validation failure, carrying enough context to locate it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Segment or transition index the violation is attached to.
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Structure(String),
    BadIntervalSequence(String),
    NotInitial(String),
    UnknownState(String),
    EdgeIndexOutOfRange(usize),
    EdgeMismatch { edge_from: String, edge_to: String, seg_from: String, seg_to: String },
    StateConstraint { state: String, clock: String, witness: Rational, constraint: ClockConstraint },
    Guard { constraint: ClockConstraint },
    ConstraintEval(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Structure(m) => write!(f, "at {}: {}", self.index, m),
            ViolationKind::BadIntervalSequence(m) => write!(f, "at {}: {}", self.index, m),
            ViolationKind::NotInitial(s) => {
                write!(f, "first state {:?} is not an initial state", s)
            }
            ViolationKind::UnknownState(s) => write!(f, "segment {}: unknown state {:?}", self.index, s),
            ViolationKind::EdgeIndexOutOfRange(e) => {
                write!(f, "transition {}: edge index {} out of range", self.index, e)
            }
            ViolationKind::EdgeMismatch { edge_from, edge_to, seg_from, seg_to } => write!(
                f,
                "transition {}: edge {}→{} does not connect segment states {}→{}",
                self.index, edge_from, edge_to, seg_from, seg_to
            ),
            ViolationKind::StateConstraint { state, clock, witness, constraint } => write!(
                f,
                "segment {}: state constraint {} for ({}, {}) violated at t = {}",
                self.index,
                constraint.to_text(),
                state,
                clock,
                witness
            ),
            ViolationKind::Guard { constraint } => write!(
                f,
                "transition {}: guard {} violated",
                self.index,
                constraint.to_text()
            ),
            ViolationKind::ConstraintEval(m) => write!(f, "at {}: {}", self.index, m),
        }
    }
}

impl Execution {
    /// Interval sequence of the segments (unvalidated accessor).
    pub fn intervals(&self) -> Vec<Interval> {
        self.segments.iter().map(|s| s.interval.clone()).collect()
    }

    /// Whether `t` lies in the execution's time span `|ρ|`.
    pub fn spans(&self, t: &Rational) -> bool {
        self.segments.iter().any(|s| s.interval.contains(t))
    }

    /// State occupied at time `t`, if `t ∈ |ρ|`.
    pub fn state_at(&self, t: &Rational) -> Option<&str> {
        self.segments
            .iter()
            .find(|s| s.interval.contains(t))
            .map(|s| s.state.as_str())
    }

    /// Base clock valuations μ_1 .. μ_n at each segment's left endpoint.
    /// Requires a structurally valid shape (finite junction endpoints).
    fn base_valuations(&self, a: &TimedAutomaton) -> Option<Vec<ClockValuation>> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut mu = ClockValuation::zero(&a.clocks);
        out.push(mu.clone());
        for (i, edge_idx) in self.transitions.iter().enumerate() {
            let seg = &self.segments[i];
            let dwell = &match seg.interval.right() {
                TimeBound::Finite(r) => r.clone(),
                TimeBound::Infinity => return None,
            } - seg.interval.left();
            let edge = a.edges.get(*edge_idx)?;
            mu = mu.elapse(&dwell).reset(&edge.resets);
            out.push(mu.clone());
        }
        Some(out)
    }

    /// Clock valuation at time `t ∈ |ρ|`: the segment base valuation plus
    /// in-segment elapse.
    pub fn clock_valuation_at(
        &self,
        a: &TimedAutomaton,
        t: &Rational,
    ) -> Result<ClockValuation, String> {
        let idx = self
            .segments
            .iter()
            .position(|s| s.interval.contains(t))
            .ok_or_else(|| format!("time {} is outside the execution span", t))?;
        let bases = self
            .base_valuations(a)
            .ok_or_else(|| "execution shape invalid for valuation".to_string())?;
        Ok(bases[idx].elapse(&(t - self.segments[idx].interval.left())))
    }

    /// Prefix of the execution up to time `t ∈ |ρ|`: segments before the one
    /// containing `t`, plus that segment truncated to `I ∩ [0, t]`.
    pub fn prefix(&self, t: &Rational) -> Result<Execution, String> {
        let idx = self
            .segments
            .iter()
            .position(|s| s.interval.contains(t))
            .ok_or_else(|| format!("time {} is outside the execution span", t))?;
        let mut segments: Vec<Segment> = self.segments[..idx].to_vec();
        let last = &self.segments[idx];
        segments.push(Segment {
            state: last.state.clone(),
            interval: last
                .interval
                .truncate_at(t)
                .expect("containing interval truncates nonempty"),
        });
        Ok(Execution { segments, transitions: self.transitions[..idx].to_vec() })
    }

    /// Last state is a final state (acceptance; reported separately from
    /// validity).
    pub fn is_accepting(&self, a: &TimedAutomaton) -> bool {
        self.segments
            .last()
            .map(|s| a.is_final(&s.state))
            .unwrap_or(false)
    }

    /// Full validity check: structure, initial state, interval consecution,
    /// edge membership, state constraints at every time (decided
    /// analytically), and guard constraints at every transition.
    pub fn validate(&self, a: &TimedAutomaton) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.segments.is_empty() {
            out.push(Violation { index: 0, kind: ViolationKind::Structure("no segments".into()) });
            return out;
        }
        if self.transitions.len() + 1 != self.segments.len() {
            out.push(Violation {
                index: 0,
                kind: ViolationKind::Structure(format!(
                    "{} segments need {} transitions, found {}",
                    self.segments.len(),
                    self.segments.len() - 1,
                    self.transitions.len()
                )),
            });
            return out;
        }
        if let Err(e) = IntervalSequence::new(self.intervals()) {
            out.push(Violation { index: 0, kind: ViolationKind::BadIntervalSequence(e.to_string()) });
            return out;
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !a.states.contains(&seg.state) {
                out.push(Violation { index: i, kind: ViolationKind::UnknownState(seg.state.clone()) });
            }
        }
        if !out.is_empty() {
            return out;
        }
        if !a.is_initial(&self.segments[0].state) {
            out.push(Violation {
                index: 0,
                kind: ViolationKind::NotInitial(self.segments[0].state.clone()),
            });
        }
        for (i, edge_idx) in self.transitions.iter().enumerate() {
            match a.edges.get(*edge_idx) {
                None => out.push(Violation {
                    index: i,
                    kind: ViolationKind::EdgeIndexOutOfRange(*edge_idx),
                }),
                Some(e) => {
                    if e.from != self.segments[i].state || e.to != self.segments[i + 1].state {
                        out.push(Violation {
                            index: i,
                            kind: ViolationKind::EdgeMismatch {
                                edge_from: e.from.clone(),
                                edge_to: e.to.clone(),
                                seg_from: self.segments[i].state.clone(),
                                seg_to: self.segments[i + 1].state.clone(),
                            },
                        });
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        let bases = match self.base_valuations(a) {
            Some(b) => b,
            None => {
                out.push(Violation {
                    index: 0,
                    kind: ViolationKind::Structure(
                        "non-final segment with infinite right endpoint".into(),
                    ),
                });
                return out;
            }
        };
        // State constraints, decided analytically per segment: each clock's
        // value is affine in t with slope 1, so constraint truth can only flip
        // at finitely many crossing times.
        for (i, seg) in self.segments.iter().enumerate() {
            for x in &a.clocks {
                let psi = a.beta(&seg.state, x);
                if psi == ClockConstraint::True {
                    continue;
                }
                if let Some(witness) =
                    constraint_violation_witness(&psi, &bases[i], &seg.interval)
                {
                    out.push(Violation {
                        index: i,
                        kind: ViolationKind::StateConstraint {
                            state: seg.state.clone(),
                            clock: x.clone(),
                            witness,
                            constraint: psi,
                        },
                    });
                }
            }
        }
        // Guard constraints at transition boundaries, on the pre-reset
        // valuation μ′(x) = μ_i(x) + R(I_i) − L(I_i).
        for (i, edge_idx) in self.transitions.iter().enumerate() {
            let seg = &self.segments[i];
            let dwell = &match seg.interval.right() {
                TimeBound::Finite(r) => r.clone(),
                TimeBound::Infinity => unreachable!("checked by base_valuations"),
            } - seg.interval.left();
            let mu_prime = bases[i].elapse(&dwell);
            for psi in &a.edges[*edge_idx].guards {
                match mu_prime.eval_constraint(psi) {
                    Ok(true) => {}
                    Ok(false) => out.push(Violation {
                        index: i,
                        kind: ViolationKind::Guard { constraint: psi.clone() },
                    }),
                    Err(e) => out.push(Violation {
                        index: i,
                        kind: ViolationKind::ConstraintEval(e.to_string()),
                    }),
                }
            }
        }
        out
    }
}

/// First time in `interval` at which `psi` fails under the valuation that
/// starts at `base` at the interval's left endpoint and elapses with slope 1,
/// or `None` if `psi` holds throughout.
fn constraint_violation_witness(
    psi: &ClockConstraint,
    base: &ClockValuation,
    interval: &Interval,
) -> Option<Rational> {
    let left = interval.left().clone();
    // Times where some atom's truth can flip.
    let mut crossings: BTreeSet<Rational> = BTreeSet::new();
    collect_crossings(psi, base, &left, &mut crossings);
    let mut candidates: BTreeSet<Rational> = BTreeSet::new();
    if interval.left_closed() {
        candidates.insert(left.clone());
    }
    let right_finite = interval.right().finite().cloned();
    if let Some(r) = &right_finite {
        if interval.right_closed() {
            candidates.insert(r.clone());
        }
    }
    for c in &crossings {
        if interval.contains(c) {
            candidates.insert(c.clone());
        }
    }
    // Representatives for open regions between consecutive breakpoints.
    let mut anchors: Vec<Rational> = crossings.into_iter().collect();
    anchors.insert(0, left.clone());
    if let Some(r) = &right_finite {
        anchors.push(r.clone());
        anchors.sort();
        anchors.dedup();
        for w in anchors.windows(2) {
            let mid = Rational::midpoint(&w[0], &w[1]);
            if interval.contains(&mid) {
                candidates.insert(mid);
            }
        }
    } else {
        anchors.sort();
        anchors.dedup();
        for w in anchors.windows(2) {
            let mid = Rational::midpoint(&w[0], &w[1]);
            if interval.contains(&mid) {
                candidates.insert(mid);
            }
        }
        // Region beyond the last breakpoint of an unbounded interval.
        let beyond = anchors.last().cloned().unwrap_or_else(|| left.clone()) + Rational::one();
        if interval.contains(&beyond) {
            candidates.insert(beyond);
        }
    }
    for t in candidates {
        let mu = base.elapse(&(&t - &left));
        if !mu.eval_constraint(psi).unwrap_or(false) {
            return Some(t);
        }
    }
    None
}

fn collect_crossings(
    psi: &ClockConstraint,
    base: &ClockValuation,
    left: &Rational,
    out: &mut BTreeSet<Rational>,
) {
    match psi {
        ClockConstraint::True => {}
        ClockConstraint::Atom { clock, constant, .. } => {
            if let Some(v) = base.get(clock) {
                // base(x) + (t − left) = c  at  t = c − base(x) + left.
                let t = &(constant - v) + left;
                if !t.is_negative() {
                    out.insert(t);
                }
            }
        }
        ClockConstraint::And(a, b) | ClockConstraint::Or(a, b) => {
            collect_crossings(a, base, left, out);
            collect_crossings(b, base, left, out);
        }
    }
}

/// Monadic predicate of the flow alphabet: states, transition markers,
/// reset markers, and the event mark `#` used by point-automaton simulations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonadicPredicate {
    State(String),
    TransMinus(usize),
    TransPlus(usize),
    ResetMinus(String),
    ResetPlus(String),
    Mark,
}

impl fmt::Display for MonadicPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonadicPredicate::State(v) => write!(f, "v:{}", v),
            MonadicPredicate::TransMinus(e) => write!(f, "tminus:{}", e),
            MonadicPredicate::TransPlus(e) => write!(f, "tplus:{}", e),
            MonadicPredicate::ResetMinus(x) => write!(f, "rminus:{}", x),
            MonadicPredicate::ResetPlus(x) => write!(f, "rplus:{}", x),
            MonadicPredicate::Mark => write!(f, "mark"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid monadic predicate name {0:?}")]
pub struct ParsePredicateError(pub String);

impl FromStr for MonadicPredicate {
    type Err = ParsePredicateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "mark" {
            return Ok(MonadicPredicate::Mark);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| ParsePredicateError(s.into()))?;
        match kind {
            "v" => Ok(MonadicPredicate::State(rest.to_string())),
            "tminus" => rest
                .parse()
                .map(MonadicPredicate::TransMinus)
                .map_err(|_| ParsePredicateError(s.into())),
            "tplus" => rest
                .parse()
                .map(MonadicPredicate::TransPlus)
                .map_err(|_| ParsePredicateError(s.into())),
            "rminus" => Ok(MonadicPredicate::ResetMinus(rest.to_string())),
            "rplus" => Ok(MonadicPredicate::ResetPlus(rest.to_string())),
            _ => Err(ParsePredicateError(s.into())),
        }
    }
}

impl Serialize for MonadicPredicate {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MonadicPredicate {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finitely variable map from `[0, N)` to sets of monadic predicates.
///
/// Only nonempty-valued segments are stored; everything else maps to the
/// empty set. Construction canonicalizes to maximal constant pieces, so
/// structural equality coincides with pointwise equality of the maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    pub horizon: TimeBound,
    pub segments: Vec<FlowSegment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSegment {
    pub interval: Interval,
    pub predicates: BTreeSet<MonadicPredicate>,
}

impl Flow {
    /// Build a flow from raw pieces; overlapping pieces are rejected.
    pub fn new(
        horizon: TimeBound,
        pieces: Vec<(Interval, BTreeSet<MonadicPredicate>)>,
    ) -> Result<Flow, String> {
        let mut f = Flow { horizon, segments: Vec::new() };
        // Sort by left endpoint (closed before open at the same point).
        let mut pieces: Vec<_> =
            pieces.into_iter().filter(|(_, ps)| !ps.is_empty()).collect();
        pieces.sort_by(|(a, _), (b, _)| {
            a.left()
                .cmp(b.left())
                .then_with(|| b.left_closed().cmp(&a.left_closed()))
        });
        for w in pieces.windows(2) {
            let (i1, _) = &w[0];
            let (i2, _) = &w[1];
            let overlap = match i1.right() {
                TimeBound::Infinity => true,
                TimeBound::Finite(r) => match r.cmp(i2.left()) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Equal => i1.right_closed() && i2.left_closed(),
                    std::cmp::Ordering::Less => false,
                },
            };
            if overlap {
                return Err(format!("flow segments {} and {} overlap", i1, i2));
            }
        }
        f.segments = canonicalize(pieces);
        Ok(f)
    }

    /// Value of the flow at time `t` (empty set off the support).
    pub fn at(&self, t: &Rational) -> BTreeSet<MonadicPredicate> {
        self.segments
            .iter()
            .find(|s| s.interval.contains(t))
            .map(|s| s.predicates.clone())
            .unwrap_or_default()
    }

    pub fn contains(&self, t: &Rational, p: &MonadicPredicate) -> bool {
        self.segments
            .iter()
            .find(|s| s.interval.contains(t))
            .map(|s| s.predicates.contains(p))
            .unwrap_or(false)
    }

    /// All finite segment endpoints (discontinuity candidates).
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = BTreeSet::new();
        for s in &self.segments {
            out.insert(s.interval.left().clone());
            if let Some(r) = s.interval.right().finite() {
                out.insert(r.clone());
            }
        }
        out.into_iter().collect()
    }

    /// Every predicate mentioned anywhere in the flow.
    pub fn alphabet(&self) -> BTreeSet<MonadicPredicate> {
        self.segments
            .iter()
            .flat_map(|s| s.predicates.iter().cloned())
            .collect()
    }

    /// Union of two flows over the same horizon (pointwise set union).
    pub fn union(&self, other: &Flow) -> Flow {
        let mut pieces: Vec<(Interval, BTreeSet<MonadicPredicate>)> = Vec::new();
        // Refine both flows against the combined breakpoint set, then union.
        let mut points: BTreeSet<Rational> = BTreeSet::new();
        points.extend(self.breakpoints());
        points.extend(other.breakpoints());
        let points: Vec<Rational> = points.into_iter().collect();
        for (i, p) in points.iter().enumerate() {
            let mut at = self.at(p);
            at.extend(other.at(p));
            if !at.is_empty() {
                pieces.push((Interval::singular(p.clone()), at));
            }
            if let Some(q) = points.get(i + 1) {
                let mid = Rational::midpoint(p, q);
                let mut at = self.at(&mid);
                at.extend(other.at(&mid));
                if !at.is_empty() {
                    pieces.push((
                        Interval::new(p.clone(), TimeBound::Finite(q.clone()), false, false)
                            .expect("consecutive breakpoints"),
                        at,
                    ));
                }
            }
        }
        Flow::new(self.horizon.clone().min(other.horizon.clone()), pieces)
            .expect("refined pieces are disjoint")
    }
}

impl std::ops::Deref for FlowSegment {
    type Target = Interval;
    fn deref(&self) -> &Interval {
        &self.interval
    }
}

/// Merge adjacent pieces with equal predicate sets into maximal constant
/// pieces. Input pieces must be sorted and pairwise disjoint.
fn canonicalize(pieces: Vec<(Interval, BTreeSet<MonadicPredicate>)>) -> Vec<FlowSegment> {
    let mut out: Vec<FlowSegment> = Vec::new();
    for (interval, predicates) in pieces {
        if let Some(last) = out.last_mut() {
            if last.predicates == predicates && last.interval.consecutive(&interval) {
                let merged = Interval::new(
                    last.interval.left().clone(),
                    interval.right().clone(),
                    last.interval.left_closed(),
                    interval.right_closed(),
                )
                .expect("merging consecutive intervals");
                last.interval = merged;
                continue;
            }
        }
        out.push(FlowSegment { interval, predicates });
    }
    out
}

/// Structured decode failure, tagged with the violated flow property:
/// 1 unique state / contiguous support, 2 initial state, 3 at most one
/// transition marker, 4 marker/state/reset consistency, 5 forced transitions,
/// 6 resets without transitions, 7–8 clock values, 9 state constraints,
/// 10 guards, 11 acceptance.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("flow is not a valid execution encoding (property {property}): {message}")]
pub struct DecodeError {
    pub property: u8,
    pub message: String,
}

fn decode_err(property: u8, message: impl Into<String>) -> DecodeError {
    DecodeError { property, message: message.into() }
}

/// The execution-to-flow encoding Φ: interior times carry the segment state,
/// transition instants additionally carry `T−`/`T+` markers plus the reset
/// markers of the edge taken, and time 0 carries a reset marker for every
/// clock (all clocks start at zero).
pub fn encode_flow(a: &TimedAutomaton, rho: &Execution, horizon: TimeBound) -> Result<Flow, String> {
    let violations = rho.validate(a);
    if !violations.is_empty() {
        return Err(format!("invalid execution: {}", violations[0]));
    }
    if !rho.is_accepting(a) {
        return Err("execution is not accepting".to_string());
    }
    // Decorations at special times: map time → predicate set.
    let mut points: BTreeMap<Rational, BTreeSet<MonadicPredicate>> = BTreeMap::new();
    let zero = Rational::zero();
    let entry = points.entry(zero.clone()).or_default();
    entry.insert(MonadicPredicate::State(rho.segments[0].state.clone()));
    for x in &a.clocks {
        entry.insert(MonadicPredicate::ResetMinus(x.clone()));
    }
    for (i, edge_idx) in rho.transitions.iter().enumerate() {
        let left_seg = &rho.segments[i];
        let right_seg = &rho.segments[i + 1];
        let b = left_seg
            .interval
            .right()
            .finite()
            .expect("junction endpoint is finite")
            .clone();
        let edge = &a.edges[*edge_idx];
        let entry = points.entry(b).or_default();
        if right_seg.interval.left_closed() {
            // Entering transition: the boundary instant belongs to the target
            // segment.
            entry.insert(MonadicPredicate::State(right_seg.state.clone()));
            entry.insert(MonadicPredicate::TransMinus(*edge_idx));
            for x in &edge.resets {
                entry.insert(MonadicPredicate::ResetMinus(x.clone()));
            }
        } else {
            // Leaving transition: the boundary instant belongs to the source
            // segment.
            entry.insert(MonadicPredicate::State(left_seg.state.clone()));
            entry.insert(MonadicPredicate::TransPlus(*edge_idx));
            for x in &edge.resets {
                entry.insert(MonadicPredicate::ResetPlus(x.clone()));
            }
        }
    }
    // Interior pieces: each segment interval with decorated endpoints opened.
    let mut pieces: Vec<(Interval, BTreeSet<MonadicPredicate>)> = Vec::new();
    for seg in &rho.segments {
        let mut left_closed = seg.interval.left_closed();
        let mut right_closed = seg.interval.right_closed();
        let left = seg.interval.left().clone();
        let right = seg.interval.right().clone();
        if left_closed && points.contains_key(&left) {
            left_closed = false;
        }
        if right_closed {
            if let Some(r) = right.finite() {
                if points.contains_key(r) {
                    right_closed = false;
                }
            }
        }
        if let Ok(iv) = Interval::new(left, right, left_closed, right_closed) {
            pieces.push((
                iv,
                [MonadicPredicate::State(seg.state.clone())].into_iter().collect(),
            ));
        }
        // An empty interval here means the whole segment is a decorated point.
    }
    for (t, preds) in points {
        pieces.push((Interval::singular(t), preds));
    }
    Flow::new(horizon, pieces)
}

/// Inverse of [`encode_flow`]: reconstructs the unique execution encoded by
/// `f`, or reports which flow property fails.
pub fn decode_flow(a: &TimedAutomaton, f: &Flow) -> Result<Execution, DecodeError> {
    if f.segments.is_empty() {
        return Err(decode_err(2, "empty flow has no initial state"));
    }
    let state_of = |preds: &BTreeSet<MonadicPredicate>| -> Result<String, DecodeError> {
        let states: Vec<&String> = preds
            .iter()
            .filter_map(|p| match p {
                MonadicPredicate::State(v) => Some(v),
                _ => None,
            })
            .collect();
        match states.len() {
            1 => {
                let v = states[0].clone();
                if a.states.contains(&v) {
                    Ok(v)
                } else {
                    Err(decode_err(1, format!("unknown state {:?}", v)))
                }
            }
            0 => Err(decode_err(1, "support time with no state predicate")),
            _ => Err(decode_err(1, format!("two states at one time: {:?}", states))),
        }
    };
    // Support must start closed at 0 and be contiguous.
    let first = &f.segments[0];
    if !(first.interval.left().is_zero() && first.interval.left_closed()) {
        return Err(decode_err(1, "support does not start at time 0"));
    }
    for w in f.segments.windows(2) {
        if !w[0].interval.consecutive(&w[1].interval) {
            return Err(decode_err(
                1,
                format!("support gap between {} and {}", w[0].interval, w[1].interval),
            ));
        }
    }
    // Transition instants are exactly the singular canonical pieces carrying
    // transition markers; interior pieces must carry only a state predicate
    // (time 0 additionally carries the initialization reset markers).
    #[derive(Debug)]
    struct Marked {
        t: Rational,
        state: String,
        tminus: Vec<usize>,
        tplus: Vec<usize>,
        rminus: BTreeSet<String>,
        rplus: BTreeSet<String>,
    }
    let mut segs: Vec<Segment> = Vec::new();
    let mut transitions: Vec<usize> = Vec::new();
    // Reconstruction state machine over canonical pieces.
    let mut pending: Option<(String, Rational, bool)> = None; // (state, start, start_closed)
    let zero = Rational::zero();

    let classify = |piece: &FlowSegment| -> Result<Option<Marked>, DecodeError> {
        let state = state_of(&piece.predicates)?;
        let mut m = Marked {
            t: piece.interval.left().clone(),
            state,
            tminus: Vec::new(),
            tplus: Vec::new(),
            rminus: BTreeSet::new(),
            rplus: BTreeSet::new(),
        };
        for p in &piece.predicates {
            match p {
                MonadicPredicate::State(_) => {}
                MonadicPredicate::TransMinus(e) => m.tminus.push(*e),
                MonadicPredicate::TransPlus(e) => m.tplus.push(*e),
                MonadicPredicate::ResetMinus(x) => {
                    m.rminus.insert(x.clone());
                }
                MonadicPredicate::ResetPlus(x) => {
                    m.rplus.insert(x.clone());
                }
                MonadicPredicate::Mark => {
                    return Err(decode_err(1, "event mark in an automaton flow"))
                }
            }
        }
        let decorated = !(m.tminus.is_empty()
            && m.tplus.is_empty()
            && m.rminus.is_empty()
            && m.rplus.is_empty());
        if decorated {
            if !piece.interval.is_singular() {
                return Err(decode_err(
                    3,
                    format!("transition/reset markers over non-singular {}", piece.interval),
                ));
            }
            Ok(Some(m))
        } else {
            Ok(None)
        }
    };

    for piece in &f.segments {
        match classify(piece)? {
            None => {
                // Plain state piece: either extends the pending segment
                // (self-dwell after a junction) or starts/continues it.
                let state = state_of(&piece.predicates)?;
                match &mut pending {
                    Some((s, _, _)) if *s == state => {}
                    Some((s, _, _)) => {
                        return Err(decode_err(
                            5,
                            format!("state changes from {:?} to {:?} without a transition", s, state),
                        ));
                    }
                    None => {
                        pending = Some((
                            state,
                            piece.interval.left().clone(),
                            piece.interval.left_closed(),
                        ));
                    }
                }
            }
            Some(m) => {
                if m.tminus.len() > 1 || m.tplus.len() > 1 {
                    return Err(decode_err(3, format!("multiple transition markers at {}", m.t)));
                }
                let is_origin = m.t == zero;
                // Reset markers must match the edges (or, at time 0, the full
                // clock set for the entering side).
                let expect_rminus: BTreeSet<String> = if is_origin {
                    if !m.tminus.is_empty() {
                        return Err(decode_err(4, "entering transition marker at time 0"));
                    }
                    a.clocks.iter().cloned().collect()
                } else {
                    match m.tminus.first() {
                        Some(e) => a
                            .edges
                            .get(*e)
                            .ok_or_else(|| decode_err(4, format!("unknown edge index {}", e)))?
                            .resets
                            .clone(),
                        None => BTreeSet::new(),
                    }
                };
                if m.rminus != expect_rminus {
                    return Err(decode_err(
                        if m.tminus.is_empty() && !is_origin { 6 } else { 4 },
                        format!("entry reset markers {:?} at {} do not match", m.rminus, m.t),
                    ));
                }
                let expect_rplus: BTreeSet<String> = match m.tplus.first() {
                    Some(e) => a
                        .edges
                        .get(*e)
                        .ok_or_else(|| decode_err(4, format!("unknown edge index {}", e)))?
                        .resets
                        .clone(),
                    None => BTreeSet::new(),
                };
                if m.rplus != expect_rplus {
                    return Err(decode_err(
                        if m.tplus.is_empty() { 6 } else { 4 },
                        format!("exit reset markers {:?} at {} do not match", m.rplus, m.t),
                    ));
                }
                // Close the pending segment according to the marker kinds.
                match (m.tminus.first(), m.tplus.first()) {
                    (None, None) => {
                        // Origin point: starts the first segment.
                        debug_assert!(is_origin);
                        match &mut pending {
                            None => pending = Some((m.state.clone(), m.t.clone(), true)),
                            Some(_) => {
                                return Err(decode_err(4, "origin markers after support start"))
                            }
                        }
                    }
                    (Some(e_in), None) => {
                        // Entering transition: previous segment ends open at t.
                        let edge = &a.edges[*e_in];
                        let (s, start, sc) = pending.take().ok_or_else(|| {
                            decode_err(4, format!("entering marker at {} with no prior state", m.t))
                        })?;
                        if edge.from != s || edge.to != m.state {
                            return Err(decode_err(
                                4,
                                format!("edge {} inconsistent with states at {}", e_in, m.t),
                            ));
                        }
                        segs.push(Segment {
                            state: s,
                            interval: Interval::new(
                                start,
                                TimeBound::Finite(m.t.clone()),
                                sc,
                                false,
                            )
                            .map_err(|e| decode_err(1, e.to_string()))?,
                        });
                        transitions.push(*e_in);
                        pending = Some((m.state.clone(), m.t.clone(), true));
                    }
                    (None, Some(e_out)) => {
                        // Leaving transition: current segment ends closed at t.
                        let edge = &a.edges[*e_out];
                        let (s, start, sc) = match pending.take() {
                            Some(p) => p,
                            // A leaving transition at the very start of its
                            // segment (e.g. a singular first segment [0,0]).
                            None => (m.state.clone(), m.t.clone(), true),
                        };
                        if s != m.state {
                            return Err(decode_err(
                                4,
                                format!("exit marker state mismatch at {}", m.t),
                            ));
                        }
                        if edge.from != s {
                            return Err(decode_err(
                                4,
                                format!("edge {} does not leave state {:?}", e_out, s),
                            ));
                        }
                        segs.push(Segment {
                            state: s,
                            interval: Interval::new(start, TimeBound::Finite(m.t.clone()), sc, true)
                                .map_err(|e| decode_err(1, e.to_string()))?,
                        });
                        transitions.push(*e_out);
                        pending = Some((edge.to.clone(), m.t.clone(), false));
                    }
                    (Some(e_in), Some(e_out)) => {
                        // Singular segment with transitions on both sides.
                        let edge_in = &a.edges[*e_in];
                        let edge_out = &a.edges[*e_out];
                        let (s, start, sc) = pending.take().ok_or_else(|| {
                            decode_err(4, format!("markers at {} with no prior state", m.t))
                        })?;
                        if edge_in.from != s || edge_in.to != m.state || edge_out.from != m.state {
                            return Err(decode_err(
                                4,
                                format!("edges at {} inconsistent with surrounding states", m.t),
                            ));
                        }
                        segs.push(Segment {
                            state: s,
                            interval: Interval::new(
                                start,
                                TimeBound::Finite(m.t.clone()),
                                sc,
                                false,
                            )
                            .map_err(|e| decode_err(1, e.to_string()))?,
                        });
                        transitions.push(*e_in);
                        segs.push(Segment {
                            state: m.state.clone(),
                            interval: Interval::singular(m.t.clone()),
                        });
                        transitions.push(*e_out);
                        pending = Some((edge_out.to.clone(), m.t.clone(), false));
                    }
                }
            }
        }
    }
    // Close the trailing segment at the support's right end.
    let last_iv = &f.segments.last().unwrap().interval;
    match pending {
        Some((s, start, sc)) => {
            let interval = Interval::new(
                start,
                last_iv.right().clone(),
                sc,
                last_iv.right_closed(),
            )
            .map_err(|e| decode_err(1, e.to_string()))?;
            segs.push(Segment { state: s, interval });
        }
        None => {
            return Err(decode_err(
                5,
                "support ends immediately after a transition with no following segment",
            ))
        }
    }
    // A right-open final piece must still have final states on a left
    // neighborhood of the support supremum; since the reconstructed last
    // segment is a single state, this reduces to that state being final.
    let rho = Execution { segments: segs, transitions };
    let violations = rho.validate(a);
    if let Some(v) = violations.first() {
        let property = match &v.kind {
            ViolationKind::NotInitial(_) => 2,
            ViolationKind::StateConstraint { .. } => 9,
            ViolationKind::Guard { .. } => 10,
            _ => 1,
        };
        return Err(decode_err(property, v.to_string()));
    }
    if !rho.is_accepting(a) {
        return Err(decode_err(11, "last state is not a final state"));
    }
    // Exact re-encoding guarantees the flow really is in the image of Φ
    // (e.g. rules out spurious reset markers absorbed into interior pieces).
    let back = encode_flow(a, &rho, f.horizon.clone())
        .map_err(|e| decode_err(1, format!("re-encoding failed: {}", e)))?;
    if &back != f {
        return Err(decode_err(1, "flow is not the exact encoding of any execution"));
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    fn preds(names: &[&str]) -> BTreeSet<MonadicPredicate> {
        names.iter().map(|n| n.parse().unwrap()).collect()
    }

    /// Two-clock automaton shaped like the worked five-segment example:
    /// v1 →(e0, reset x1) v2 →(e1, reset x2) v3 →(e2, reset x2) v1
    /// →(e3, reset x1) v4, all constraints trivially true.
    fn example_automaton() -> TimedAutomaton {
        let s = |x: &str| x.to_string();
        TimedAutomaton {
            propositions: vec![s("p")],
            states: vec![s("v1"), s("v2"), s("v3"), s("v4")],
            initial: vec![s("v1")],
            labels: BTreeMap::from([(s("v2"), BTreeSet::from([s("p")]))]),
            clocks: vec![s("x1"), s("x2")],
            state_constraints: BTreeMap::new(),
            edges: vec![
                Edge { from: s("v1"), to: s("v2"), guards: vec![], resets: BTreeSet::from([s("x1")]) },
                Edge { from: s("v2"), to: s("v3"), guards: vec![], resets: BTreeSet::from([s("x2")]) },
                Edge { from: s("v3"), to: s("v1"), guards: vec![], resets: BTreeSet::from([s("x2")]) },
                Edge { from: s("v1"), to: s("v4"), guards: vec![], resets: BTreeSet::from([s("x1")]) },
            ],
            final_states: vec![s("v4")],
        }
    }

    fn example_execution() -> Execution {
        Execution {
            segments: vec![
                Segment { state: "v1".into(), interval: iv("[0,5)") },
                Segment { state: "v2".into(), interval: iv("[5,10]") },
                Segment { state: "v3".into(), interval: iv("(10,12)") },
                Segment { state: "v1".into(), interval: iv("[12,12]") },
                Segment { state: "v4".into(), interval: iv("(12,15)") },
            ],
            transitions: vec![0, 1, 2, 3],
        }
    }

    #[test]
    fn example_run_validates() {
        let a = example_automaton();
        let rho = example_execution();
        assert!(rho.validate(&a).is_empty());
        assert!(rho.is_accepting(&a));
    }

    #[test]
    fn edge_membership_violation() {
        let a = example_automaton();
        let mut rho = example_execution();
        rho.segments[1].state = "v3".into();
        let v = rho.validate(&a);
        assert!(v
            .iter()
            .any(|v| matches!(v.kind, ViolationKind::EdgeMismatch { .. })));
    }

    #[test]
    fn state_constraint_violation_with_witness() {
        let mut a = example_automaton();
        a.state_constraints.insert(
            "v1".into(),
            BTreeMap::from([(
                "x1".into(),
                ClockConstraint::atom("x1", crate::timecore::Rel::Le, rat("2")).unwrap(),
            )]),
        );
        // Dwelling at v1 until clock value 3 breaks x1 ≤ 2 somewhere in (2,3].
        let rho = Execution {
            segments: vec![
                Segment { state: "v1".into(), interval: iv("[0,3)") },
                Segment { state: "v4".into(), interval: iv("[3,4]") },
            ],
            transitions: vec![3],
        };
        let v = rho.validate(&a);
        let witness = v.iter().find_map(|v| match &v.kind {
            ViolationKind::StateConstraint { witness, .. } => Some(witness.clone()),
            _ => None,
        });
        let w = witness.expect("state constraint violation");
        assert!(w > rat("2") && w < rat("3"));
    }

    #[test]
    fn valuation_at_example_times() {
        let a = example_automaton();
        let rho = example_execution();
        let mu = rho.clock_valuation_at(&a, &rat("11")).unwrap();
        assert_eq!(mu.get("x1"), Some(&rat("6")));
        assert_eq!(mu.get("x2"), Some(&rat("1")));
        let mu0 = rho.clock_valuation_at(&a, &rat("0")).unwrap();
        assert_eq!(mu0.get("x1"), Some(&rat("0")));
        assert_eq!(mu0.get("x2"), Some(&rat("0")));
        let mu3 = rho.clock_valuation_at(&a, &rat("3")).unwrap();
        assert_eq!(mu3.get("x1"), Some(&rat("3")));
        assert!(rho.clock_valuation_at(&a, &rat("20")).is_err());
    }

    #[test]
    fn prefix_truncates() {
        let rho = Execution {
            segments: vec![Segment { state: "v1".into(), interval: iv("[0,10]") }],
            transitions: vec![],
        };
        let p = rho.prefix(&rat("5")).unwrap();
        assert_eq!(p.segments[0].interval, iv("[0,5]"));
        assert_eq!(rho.prefix(&rat("10")).unwrap(), rho);

        let rho = example_execution();
        let p = rho.prefix(&rat("10")).unwrap();
        assert_eq!(p.segments.len(), 2);
        assert_eq!(p.segments[1].interval, iv("[5,10]"));
        let p = rho.prefix(&rat("11")).unwrap();
        assert_eq!(p.segments.len(), 3);
        assert_eq!(p.segments[2].interval, iv("(10,11]"));
    }

    #[test]
    fn encode_example_flow() {
        let a = example_automaton();
        let rho = example_execution();
        let f = encode_flow(&a, &rho, TimeBound::Infinity).unwrap();
        assert_eq!(f.at(&rat("5")), preds(&["v:v2", "tminus:0", "rminus:x1"]));
        assert_eq!(f.at(&rat("10")), preds(&["v:v2", "tplus:1", "rplus:x2"]));
        assert_eq!(
            f.at(&rat("12")),
            preds(&["v:v1", "tminus:2", "rminus:x2", "tplus:3", "rplus:x1"])
        );
        assert_eq!(f.at(&rat("3")), preds(&["v:v1"]));
        assert_eq!(f.at(&rat("11")), preds(&["v:v3"]));
        assert_eq!(f.at(&rat("14")), preds(&["v:v4"]));
        assert!(f.at(&rat("15")).is_empty());
        // Time 0 carries the initialization resets.
        assert_eq!(f.at(&rat("0")), preds(&["v:v1", "rminus:x1", "rminus:x2"]));
    }

    #[test]
    fn clockless_single_segment_flow_is_plain() {
        let s = |x: &str| x.to_string();
        let a = TimedAutomaton {
            propositions: vec![],
            states: vec![s("v")],
            initial: vec![s("v")],
            labels: BTreeMap::new(),
            clocks: vec![],
            state_constraints: BTreeMap::new(),
            edges: vec![],
            final_states: vec![s("v")],
        };
        let rho = Execution {
            segments: vec![Segment { state: s("v"), interval: iv("[0,3]") }],
            transitions: vec![],
        };
        let f = encode_flow(&a, &rho, TimeBound::Infinity).unwrap();
        assert_eq!(f.segments.len(), 1);
        assert_eq!(f.segments[0].interval, iv("[0,3]"));
        assert_eq!(f.segments[0].predicates, preds(&["v:v"]));
    }

    #[test]
    fn decode_round_trip() {
        let a = example_automaton();
        let rho = example_execution();
        let f = encode_flow(&a, &rho, TimeBound::Infinity).unwrap();
        let back = decode_flow(&a, &f).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn decode_rejects_two_states() {
        let a = example_automaton();
        let f = Flow::new(
            TimeBound::Infinity,
            vec![(iv("[0,1]"), preds(&["v:v1", "v:v2"]))],
        )
        .unwrap();
        let e = decode_flow(&a, &f).unwrap_err();
        assert_eq!(e.property, 1);
    }

    #[test]
    fn decode_rejects_nonaccepting() {
        let a = example_automaton();
        let mut clocks_reset = vec![(
            Interval::singular(rat("0")),
            preds(&["v:v1", "rminus:x1", "rminus:x2"]),
        )];
        clocks_reset.push((iv("(0,3]"), preds(&["v:v1"])));
        let f = Flow::new(TimeBound::Infinity, clocks_reset).unwrap();
        let e = decode_flow(&a, &f).unwrap_err();
        assert_eq!(e.property, 11);
    }

    #[test]
    fn flow_union_merges_pointwise() {
        let f1 = Flow::new(
            TimeBound::Finite(rat("4")),
            vec![(iv("[0,2)"), preds(&["v:v1"]))],
        )
        .unwrap();
        let f2 = Flow::new(
            TimeBound::Finite(rat("4")),
            vec![(iv("[0,3)"), preds(&["v:v2"]))],
        )
        .unwrap();
        let u = f1.union(&f2);
        assert_eq!(u.at(&rat("1")), preds(&["v:v1", "v:v2"]));
        assert_eq!(u.at(&rat("5/2")), preds(&["v:v2"]));
        assert!(u.at(&rat("3")).is_empty());
    }

    #[test]
    fn automaton_json_round_trip() {
        let a = example_automaton();
        let text = serde_json::to_string_pretty(&a).unwrap();
        assert!(text.contains("stateConstraints") || !text.contains("state_constraints"));
        let back: TimedAutomaton = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        back.validate().unwrap();
    }

    #[test]
    fn flow_json_round_trip() {
        let a = example_automaton();
        let rho = example_execution();
        let f = encode_flow(&a, &rho, TimeBound::Finite(rat("20"))).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: Flow = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }
}
