//! Point-based timed automata, their executions, the simulation of
//! point-based automata by interval-based automata, and the bijection between
//! the two run spaces.
//!
//! A point-based automaton observes the system only at discrete event times.
//! The simulating interval automaton alternates between "state" states and
//! "edge" states; a dedicated clock pins edge states to singular intervals,
//! and edge states carry the event's propositions plus the event mark `#`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Edge, Execution, Segment, TimedAutomaton};
use crate::timecore::{
    ClockConstraint, ClockValuation, Interval, Rational, Rel, TimeBound,
};

/// Reserved clock name used to pin edge states to singular intervals.
pub const SINGULAR_CLOCK: &str = "x_sing";

/// Transition of a point-based automaton: an event (set of propositions)
/// observed while moving between states, guarded and with resets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEdge {
    pub from: String,
    #[serde(default)]
    pub event: BTreeSet<String>,
    #[serde(default)]
    pub guards: Vec<ClockConstraint>,
    #[serde(default)]
    pub resets: BTreeSet<String>,
    pub to: String,
}

/// Point-based timed automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointTimedAutomaton {
    pub propositions: Vec<String>,
    pub states: Vec<String>,
    pub start: String,
    #[serde(default)]
    pub clocks: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<PointEdge>,
    #[serde(rename = "final")]
    pub final_states: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointAutomatonError {
    #[error("state {0:?} is not declared")]
    UnknownState(String),
    #[error("clock {0:?} is not declared")]
    UnknownClock(String),
    #[error("proposition {0:?} is not declared")]
    UnknownProposition(String),
    #[error("clock name {0:?} is reserved")]
    ReservedClock(String),
    #[error("guard {0} mentions more than one clock")]
    MultiClockGuard(String),
    #[error("state and proposition namespaces overlap on {0:?}")]
    StatePropositionClash(String),
}

impl PointTimedAutomaton {
    pub fn validate(&self) -> Result<(), PointAutomatonError> {
        let states: BTreeSet<&String> = self.states.iter().collect();
        let clocks: BTreeSet<&String> = self.clocks.iter().collect();
        let props: BTreeSet<&String> = self.propositions.iter().collect();
        if !states.contains(&self.start) {
            return Err(PointAutomatonError::UnknownState(self.start.clone()));
        }
        for s in &self.final_states {
            if !states.contains(s) {
                return Err(PointAutomatonError::UnknownState(s.clone()));
            }
        }
        for c in &self.clocks {
            if c == SINGULAR_CLOCK {
                return Err(PointAutomatonError::ReservedClock(c.clone()));
            }
        }
        // The simulating automaton labels its state-states with the state's
        // own name, so state names join the proposition alphabet and must not
        // clash with declared propositions.
        for s in &self.states {
            if props.contains(s) {
                return Err(PointAutomatonError::StatePropositionClash(s.clone()));
            }
        }
        for e in &self.transitions {
            for s in [&e.from, &e.to] {
                if !states.contains(s) {
                    return Err(PointAutomatonError::UnknownState(s.clone()));
                }
            }
            for p in &e.event {
                if !props.contains(p) {
                    return Err(PointAutomatonError::UnknownProposition(p.clone()));
                }
            }
            for x in &e.resets {
                if !clocks.contains(x) {
                    return Err(PointAutomatonError::UnknownClock(x.clone()));
                }
            }
            for g in &e.guards {
                let gc = g.clocks();
                if gc.len() > 1 {
                    return Err(PointAutomatonError::MultiClockGuard(g.to_text()));
                }
                for x in gc {
                    if !clocks.contains(&x) {
                        return Err(PointAutomatonError::UnknownClock(x));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One step of a point execution: which transition fires, and when.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointStep {
    pub edge: usize,
    pub time: Rational,
}

/// Execution of a point-based automaton. A run carries at least one event:
/// the bijection with interval executions of the simulating automaton forces
/// this, since the simulated run must end inside an edge state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointExecution {
    pub steps: Vec<PointStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointViolation {
    pub step: usize,
    pub message: String,
}

impl std::fmt::Display for PointViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "step {}: {}", self.step, self.message)
    }
}

impl PointExecution {
    /// Event times in order.
    pub fn times(&self) -> Vec<Rational> {
        self.steps.iter().map(|s| s.time.clone()).collect()
    }

    /// Duration |η| = last event time (zero for the — rejected — empty run).
    pub fn duration(&self) -> Rational {
        self.steps
            .last()
            .map(|s| s.time.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Whether `t` is an event time.
    pub fn has_event_at(&self, t: &Rational) -> bool {
        self.steps.iter().any(|s| &s.time == t)
    }

    /// Event (proposition set) observed at event time `t`.
    pub fn event_at<'a>(&self, b: &'a PointTimedAutomaton, t: &Rational) -> Option<&'a BTreeSet<String>> {
        let step = self.steps.iter().find(|s| &s.time == t)?;
        b.transitions.get(step.edge).map(|e| &e.event)
    }

    /// State reached after the last event (the start state for no steps).
    pub fn last_state<'a>(&self, b: &'a PointTimedAutomaton) -> Option<&'a str> {
        match self.steps.last() {
            None => Some(&b.start),
            Some(s) => b.transitions.get(s.edge).map(|e| e.to.as_str()),
        }
    }

    pub fn is_accepting(&self, b: &PointTimedAutomaton) -> bool {
        self.last_state(b)
            .map(|s| b.final_states.iter().any(|f| f == s))
            .unwrap_or(false)
    }

    /// Validity: at least one step, edge chain from the start state, strictly
    /// increasing nonnegative event times, and guard satisfaction under the
    /// valuation recurrence (reset-to-zero vs elapse).
    pub fn validate(&self, b: &PointTimedAutomaton) -> Vec<PointViolation> {
        let mut out = Vec::new();
        if self.steps.is_empty() {
            out.push(PointViolation { step: 0, message: "execution has no events".into() });
            return out;
        }
        let mut state = b.start.clone();
        let mut mu = ClockValuation::zero(&b.clocks);
        let mut prev_t = Rational::zero();
        for (i, step) in self.steps.iter().enumerate() {
            let edge = match b.transitions.get(step.edge) {
                Some(e) => e,
                None => {
                    out.push(PointViolation {
                        step: i,
                        message: format!("edge index {} out of range", step.edge),
                    });
                    return out;
                }
            };
            if edge.from != state {
                out.push(PointViolation {
                    step: i,
                    message: format!(
                        "edge leaves {:?} but the execution is at {:?}",
                        edge.from, state
                    ),
                });
                return out;
            }
            if step.time.is_negative() {
                out.push(PointViolation { step: i, message: "negative event time".into() });
            }
            // Strictly increasing: equal times would make the simulated
            // interval run's inter-event gap empty.
            if i == 0 {
                if step.time < prev_t {
                    out.push(PointViolation { step: i, message: "negative first event time".into() });
                }
            } else if step.time <= prev_t {
                out.push(PointViolation {
                    step: i,
                    message: format!(
                        "event times must strictly increase ({} after {})",
                        step.time, prev_t
                    ),
                });
            }
            let elapsed = mu.elapse(&(&step.time - &prev_t));
            for psi in &edge.guards {
                match elapsed.eval_constraint(psi) {
                    Ok(true) => {}
                    Ok(false) => out.push(PointViolation {
                        step: i,
                        message: format!("guard {} violated", psi.to_text()),
                    }),
                    Err(e) => out.push(PointViolation { step: i, message: e.to_string() }),
                }
            }
            mu = elapsed.reset(&edge.resets);
            state = edge.to.clone();
            prev_t = step.time.clone();
        }
        out
    }
}

/// Name of the simulating automaton's state for point-edge index `i`.
pub fn edge_state_name(i: usize) -> String {
    format!("edge#{}", i)
}

/// Index of the simulating automaton's edge entering edge-state `i`.
pub fn entering_edge_index(i: usize) -> usize {
    2 * i
}

/// Index of the simulating automaton's edge leaving edge-state `i`.
pub fn leaving_edge_index(i: usize) -> usize {
    2 * i + 1
}

/// The simulating interval-based automaton: one state per point-automaton
/// state, one state per point-automaton edge (pinned to singular intervals by
/// the reserved clock), edge states labeled with the event plus the mark `#`.
pub fn build_interval_automaton(b: &PointTimedAutomaton) -> TimedAutomaton {
    let mut propositions: Vec<String> = b.propositions.clone();
    propositions.extend(b.states.iter().cloned());
    propositions.push(crate::formula::MARK_PROP.to_string());

    let mut states: Vec<String> = b.states.clone();
    let mut labels: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for s in &b.states {
        labels.insert(s.clone(), BTreeSet::from([s.clone()]));
    }
    let mut state_constraints: BTreeMap<String, BTreeMap<String, ClockConstraint>> =
        BTreeMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut final_states: Vec<String> = Vec::new();
    let mut initial: Vec<String> = vec![b.start.clone()];

    for (i, pe) in b.transitions.iter().enumerate() {
        let name = edge_state_name(i);
        states.push(name.clone());
        let mut label: BTreeSet<String> = pe.event.clone();
        label.insert(crate::formula::MARK_PROP.to_string());
        labels.insert(name.clone(), label);
        // β(edge state, x) = conjunction of the edge's guards over x;
        // β(edge state, x_sing) = (x_sing = 0).
        let mut per_clock: BTreeMap<String, ClockConstraint> = BTreeMap::new();
        for x in &b.clocks {
            let over_x: Vec<ClockConstraint> = pe
                .guards
                .iter()
                .filter(|g| g.clocks().contains(x))
                .cloned()
                .collect();
            if !over_x.is_empty() {
                per_clock.insert(x.clone(), ClockConstraint::conjoin(over_x));
            }
        }
        per_clock.insert(
            SINGULAR_CLOCK.to_string(),
            ClockConstraint::Atom {
                clock: SINGULAR_CLOCK.to_string(),
                rel: Rel::Eq,
                constant: Rational::zero(),
            },
        );
        state_constraints.insert(name.clone(), per_clock);
        // Entering edge: reset the singular clock; leaving edge: the point
        // edge's own resets.
        edges.push(Edge {
            from: pe.from.clone(),
            to: name.clone(),
            guards: vec![],
            resets: BTreeSet::from([SINGULAR_CLOCK.to_string()]),
        });
        edges.push(Edge {
            from: name.clone(),
            to: pe.to.clone(),
            guards: vec![],
            resets: pe.resets.clone(),
        });
        if pe.from == b.start {
            initial.push(name.clone());
        }
        if b.final_states.iter().any(|f| f == &pe.to) {
            final_states.push(name.clone());
        }
    }

    let mut clocks = b.clocks.clone();
    clocks.push(SINGULAR_CLOCK.to_string());

    TimedAutomaton {
        propositions,
        states,
        initial,
        labels,
        clocks,
        state_constraints,
        edges,
        final_states,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChiError {
    #[error("invalid point execution: {0}")]
    InvalidPoint(String),
    #[error("execution does not have the alternating state/edge shape: {0}")]
    Shape(String),
}

/// The bijection from accepting point executions to accepting executions of
/// the simulating automaton: events become singular edge-state segments,
/// separated by open dwell segments in the source states.
pub fn chi(b: &PointTimedAutomaton, eta: &PointExecution) -> Result<Execution, ChiError> {
    let violations = eta.validate(b);
    if let Some(v) = violations.first() {
        return Err(ChiError::InvalidPoint(v.to_string()));
    }
    let mut segments: Vec<Segment> = Vec::new();
    let mut transitions: Vec<usize> = Vec::new();
    let mut prev: Option<&PointStep> = None;
    for (i, step) in eta.steps.iter().enumerate() {
        let edge = &b.transitions[step.edge];
        match prev {
            None => {
                if step.time.is_zero() {
                    // Run starts directly inside the first edge state.
                } else {
                    segments.push(Segment {
                        state: edge.from.clone(),
                        interval: Interval::new(
                            Rational::zero(),
                            TimeBound::Finite(step.time.clone()),
                            true,
                            false,
                        )
                        .expect("positive first event time"),
                    });
                    transitions.push(entering_edge_index(step.edge));
                }
            }
            Some(p) => {
                segments.push(Segment {
                    state: edge.from.clone(),
                    interval: Interval::new(
                        p.time.clone(),
                        TimeBound::Finite(step.time.clone()),
                        false,
                        false,
                    )
                    .expect("strictly increasing event times"),
                });
                transitions.push(entering_edge_index(step.edge));
            }
        }
        segments.push(Segment {
            state: edge_state_name(step.edge),
            interval: Interval::singular(step.time.clone()),
        });
        if i + 1 < eta.steps.len() {
            transitions.push(leaving_edge_index(step.edge));
        }
        prev = Some(step);
    }
    Ok(Execution { segments, transitions })
}

/// Inverse of [`chi`]: recover the point execution from an alternating
/// state/edge-shaped execution of the simulating automaton.
pub fn chi_inverse(b: &PointTimedAutomaton, rho: &Execution) -> Result<PointExecution, ChiError> {
    let mut steps: Vec<PointStep> = Vec::new();
    for seg in &rho.segments {
        if let Some(idx) = seg.state.strip_prefix("edge#") {
            let edge: usize = idx
                .parse()
                .map_err(|_| ChiError::Shape(format!("bad edge state name {:?}", seg.state)))?;
            if edge >= b.transitions.len() {
                return Err(ChiError::Shape(format!("edge index {} out of range", edge)));
            }
            if !seg.interval.is_singular() {
                return Err(ChiError::Shape(format!(
                    "edge state over non-singular interval {}",
                    seg.interval
                )));
            }
            steps.push(PointStep { edge, time: seg.interval.left().clone() });
        } else if !b.states.contains(&seg.state) {
            return Err(ChiError::Shape(format!("unknown state {:?}", seg.state)));
        }
    }
    let eta = PointExecution { steps };
    // The shape must actually round-trip; this rejects executions that end in
    // a plain state or interleave states unexpectedly.
    let back = chi(b, &eta)?;
    if &back != rho {
        return Err(ChiError::Shape(
            "execution is not in the image of the point-to-interval bijection".into(),
        ));
    }
    Ok(eta)
}
