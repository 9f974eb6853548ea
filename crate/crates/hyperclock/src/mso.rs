//! Monadic second-order logic of order with a +1 relation, interpreted over
//! flows on a bounded time domain [0, N).
//!
//! This module provides:
//!
//! * the core formula syntax plus derived builders;
//! * an evaluator that decides first-order quantification exactly (truth of a
//!   quantifier-free matrix is piecewise constant between breakpoints of the
//!   model closed under integer shifts, so sampling those points plus one
//!   midpoint per gap is complete) and second-order quantification over a
//!   budgeted grid of witness sets — a documented under-approximation;
//! * a compiler from a timed automaton to a formula satisfied exactly by the
//!   flow encodings of its accepting executions;
//! * the translation from the hyper temporal logic into this logic, one
//!   formula per possible anchor;
//! * a deterministic s-expression serialization with a parser.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Execution, Flow, MonadicPredicate, TimedAutomaton};
use crate::formula::{HcmtlFormula, PathVar, MARK_PROP};
use crate::timecore::{ClockConstraint, Interval, Rational, Rel, TimeBound};

/// Core formula tree. Derived connectives (and, implication, universal
/// quantifiers, ≤, =) are expanded structurally by the builders below and
/// never appear as nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MsoFormula {
    Less(String, String),
    PlusOne(String, String),
    Pred(String, String),
    Or(Box<MsoFormula>, Box<MsoFormula>),
    Not(Box<MsoFormula>),
    ExistsFO(String, Box<MsoFormula>),
    ExistsSO(String, Box<MsoFormula>),
}

impl MsoFormula {
    pub fn less(x: impl Into<String>, y: impl Into<String>) -> Self {
        MsoFormula::Less(x.into(), y.into())
    }

    pub fn plus_one(x: impl Into<String>, y: impl Into<String>) -> Self {
        MsoFormula::PlusOne(x.into(), y.into())
    }

    pub fn pred(p: impl Into<String>, x: impl Into<String>) -> Self {
        MsoFormula::Pred(p.into(), x.into())
    }

    pub fn or(a: MsoFormula, b: MsoFormula) -> Self {
        MsoFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: MsoFormula) -> Self {
        MsoFormula::Not(Box::new(a))
    }

    pub fn and(a: MsoFormula, b: MsoFormula) -> Self {
        // ¬(¬a ∨ ¬b); keep `a` first so cheap antecedents short-circuit.
        Self::not(Self::or(Self::not(a), Self::not(b)))
    }

    pub fn implies(a: MsoFormula, b: MsoFormula) -> Self {
        Self::or(Self::not(a), b)
    }

    pub fn iff(a: MsoFormula, b: MsoFormula) -> Self {
        Self::and(
            Self::implies(a.clone(), b.clone()),
            Self::implies(b, a),
        )
    }

    pub fn exists_fo(x: impl Into<String>, body: MsoFormula) -> Self {
        MsoFormula::ExistsFO(x.into(), Box::new(body))
    }

    pub fn forall_fo(x: impl Into<String>, body: MsoFormula) -> Self {
        Self::not(Self::exists_fo(x, Self::not(body)))
    }

    pub fn exists_so(p: impl Into<String>, body: MsoFormula) -> Self {
        MsoFormula::ExistsSO(p.into(), Box::new(body))
    }

    pub fn forall_so(p: impl Into<String>, body: MsoFormula) -> Self {
        Self::not(Self::exists_so(p, Self::not(body)))
    }

    pub fn le(x: impl Into<String>, y: impl Into<String>) -> Self {
        Self::not(Self::less(y, x))
    }

    pub fn eq(x: impl Into<String>, y: impl Into<String>) -> Self {
        let (x, y) = (x.into(), y.into());
        Self::and(Self::le(x.clone(), y.clone()), Self::le(y, x))
    }

    /// Unsatisfiable formula (the logic has no constants).
    pub fn falsum() -> Self {
        Self::exists_fo("_absurd", Self::less("_absurd", "_absurd"))
    }

    pub fn truth() -> Self {
        Self::not(Self::falsum())
    }

    pub fn big_or(parts: Vec<MsoFormula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Self::falsum(),
            Some(first) => it.fold(first, Self::or),
        }
    }

    pub fn big_and(parts: Vec<MsoFormula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Self::truth(),
            Some(first) => it.fold(first, Self::and),
        }
    }
}

impl fmt::Display for MsoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsoFormula::Less(x, y) => write!(f, "(< {} {})", x, y),
            MsoFormula::PlusOne(x, y) => write!(f, "(+1 {} {})", x, y),
            MsoFormula::Pred(p, x) => write!(f, "(pred {} {})", p, x),
            MsoFormula::Or(a, b) => write!(f, "(or {} {})", a, b),
            MsoFormula::Not(a) => write!(f, "(not {})", a),
            MsoFormula::ExistsFO(x, a) => write!(f, "(exists-fo {} {})", x, a),
            MsoFormula::ExistsSO(p, a) => write!(f, "(exists-so {} {})", p, a),
        }
    }
}

/// Render the formula as its s-expression text.
pub fn serialize_mso(phi: &MsoFormula) -> String {
    phi.to_string()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid formula text: {0}")]
pub struct MsoParseError(pub String);

/// Parse the s-expression text format back into a formula.
pub fn parse_mso(text: &str) -> Result<MsoFormula, MsoParseError> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
                toks.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    toks.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        toks.push(cur);
    }
    let mut pos = 0;
    let phi = parse_sexpr(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(MsoParseError("trailing input".into()));
    }
    Ok(phi)
}

fn parse_sexpr(toks: &[String], pos: &mut usize) -> Result<MsoFormula, MsoParseError> {
    let expect = |pos: &mut usize, what: &str| -> Result<(), MsoParseError> {
        if toks.get(*pos).map(String::as_str) == Some(what) {
            *pos += 1;
            Ok(())
        } else {
            Err(MsoParseError(format!("expected {:?} at token {}", what, *pos)))
        }
    };
    let atom = |pos: &mut usize| -> Result<String, MsoParseError> {
        match toks.get(*pos) {
            Some(t) if t != "(" && t != ")" => {
                *pos += 1;
                Ok(t.clone())
            }
            _ => Err(MsoParseError(format!("expected name at token {}", *pos))),
        }
    };
    expect(pos, "(")?;
    let head = atom(pos)?;
    let phi = match head.as_str() {
        "<" => MsoFormula::less(atom(pos)?, atom(pos)?),
        "+1" => MsoFormula::plus_one(atom(pos)?, atom(pos)?),
        "pred" => MsoFormula::pred(atom(pos)?, atom(pos)?),
        "or" => {
            let a = parse_sexpr(toks, pos)?;
            let b = parse_sexpr(toks, pos)?;
            MsoFormula::or(a, b)
        }
        "not" => MsoFormula::not(parse_sexpr(toks, pos)?),
        "exists-fo" => {
            let x = atom(pos)?;
            MsoFormula::exists_fo(x, parse_sexpr(toks, pos)?)
        }
        "exists-so" => {
            let p = atom(pos)?;
            MsoFormula::exists_so(p, parse_sexpr(toks, pos)?)
        }
        other => return Err(MsoParseError(format!("unknown operator {:?}", other))),
    };
    expect(pos, ")")?;
    Ok(phi)
}

/// A monadic predicate together with the 1-based index of the path it
/// belongs to, rendered `<base>@<index>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexedPredicate {
    pub base: MonadicPredicate,
    pub path_index: usize,
}

impl fmt::Display for IndexedPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.base, self.path_index)
    }
}

/// Name of a predicate for the given path copy (no suffix without a copy).
pub fn predicate_name(mp: &MonadicPredicate, copy: Option<usize>) -> String {
    match copy {
        None => mp.to_string(),
        Some(i) => format!("{}@{}", mp, i),
    }
}

/// The monadic predicate alphabet of an automaton: one predicate per state,
/// an entering and a leaving marker per edge, and two reset markers per
/// clock.
pub fn monadic_predicates(a: &TimedAutomaton) -> Vec<MonadicPredicate> {
    let mut out: Vec<MonadicPredicate> = a
        .states
        .iter()
        .map(|s| MonadicPredicate::State(s.clone()))
        .collect();
    for i in 0..a.edges.len() {
        out.push(MonadicPredicate::TransMinus(i));
        out.push(MonadicPredicate::TransPlus(i));
    }
    for x in &a.clocks {
        out.push(MonadicPredicate::ResetMinus(x.clone()));
        out.push(MonadicPredicate::ResetPlus(x.clone()));
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MsoError {
    #[error("first-order variable {0:?} is unbound")]
    UnboundVariable(String),
    #[error("the time domain must be bounded for evaluation")]
    InfiniteHorizon,
    #[error("second-order witness space has {0} grid pieces; raise granularity limits or shrink the horizon")]
    SoSpaceTooLarge(usize),
    #[error("constant {0} is not an integer; scale the instance first")]
    NotIntegerScaled(Rational),
    #[error("guard {0} mentions more than one clock")]
    MultiClockGuard(String),
    #[error("cannot encode run: {0}")]
    EncodeFailed(String),
}

/// Flow model for evaluation: predicate names over non-overlapping pieces of
/// [0, horizon).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsoFlow {
    pub horizon: Rational,
    pub segments: Vec<(Interval, BTreeSet<String>)>,
}

impl MsoFlow {
    pub fn empty(horizon: Rational) -> Self {
        MsoFlow { horizon, segments: Vec::new() }
    }

    /// View an encoded execution flow under this logic's naming, optionally
    /// suffixed with a path copy index.
    pub fn from_flow(f: &Flow, copy: Option<usize>) -> Result<MsoFlow, MsoError> {
        let horizon = f
            .horizon
            .finite()
            .cloned()
            .ok_or(MsoError::InfiniteHorizon)?;
        let segments = f
            .segments
            .iter()
            .map(|s| {
                (
                    s.interval.clone(),
                    s.predicates
                        .iter()
                        .map(|p| predicate_name(p, copy))
                        .collect(),
                )
            })
            .collect();
        Ok(MsoFlow { horizon, segments })
    }

    pub fn at(&self, t: &Rational) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (iv, ps) in &self.segments {
            if iv.contains(t) {
                out.extend(ps.iter().cloned());
            }
        }
        out
    }

    pub fn contains(&self, t: &Rational, p: &str) -> bool {
        self.segments
            .iter()
            .any(|(iv, ps)| ps.contains(p) && iv.contains(t))
    }

    pub fn breakpoints(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        out.insert(Rational::zero());
        for (iv, _) in &self.segments {
            out.insert(iv.left().clone());
            if let Some(r) = iv.right().finite() {
                out.insert(r.clone());
            }
        }
        out
    }

    /// Pointwise union of two flows over the same horizon.
    pub fn union(&self, other: &MsoFlow) -> MsoFlow {
        debug_assert_eq!(self.horizon, other.horizon);
        let mut points: BTreeSet<Rational> = self.breakpoints();
        points.extend(other.breakpoints());
        points.insert(self.horizon.clone());
        let points: Vec<Rational> = points
            .into_iter()
            .filter(|p| p <= &self.horizon)
            .collect();
        let mut segments: Vec<(Interval, BTreeSet<String>)> = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if p < &self.horizon {
                let mut ps = self.at(p);
                ps.extend(other.at(p));
                if !ps.is_empty() {
                    segments.push((Interval::singular(p.clone()), ps));
                }
            }
            if i + 1 < points.len() {
                let q = &points[i + 1];
                let mid = Rational::midpoint(p, q);
                let mut ps = self.at(&mid);
                ps.extend(other.at(&mid));
                if !ps.is_empty() {
                    let iv = Interval::new(
                        p.clone(),
                        TimeBound::Finite(q.clone()),
                        false,
                        false,
                    )
                    .expect("strictly increasing breakpoints");
                    segments.push((iv, ps));
                }
            }
        }
        MsoFlow { horizon: self.horizon.clone(), segments }
    }
}

/// The flow encoding of an interval path environment: the union of each
/// path's encoded flow with predicates indexed by the path's 1-based position
/// in `order`.
pub fn env_to_flow(
    a: &TimedAutomaton,
    paths: &BTreeMap<PathVar, Execution>,
    order: &[PathVar],
    horizon: &Rational,
) -> Result<MsoFlow, MsoError> {
    let mut acc = MsoFlow::empty(horizon.clone());
    for (i, var) in order.iter().enumerate() {
        let rho = paths
            .get(var)
            .ok_or_else(|| MsoError::UnboundVariable(var.0.clone()))?;
        let flow = crate::automaton::encode_flow(
            a,
            rho,
            TimeBound::Finite(horizon.clone()),
        )
        .map_err(MsoError::EncodeFailed)?;
        let indexed = MsoFlow::from_flow(&flow, Some(i + 1))?;
        acc = acc.union(&indexed);
    }
    Ok(acc)
}

/// Budget for second-order quantification: witness sets are unions of at most
/// `max_segments` maximal intervals with endpoints on the grid of step
/// 1/`granularity`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoBudget {
    pub granularity: u64,
    pub max_segments: usize,
}

impl Default for SoBudget {
    fn default() -> Self {
        SoBudget { granularity: 1, max_segments: 4 }
    }
}

struct EvalState {
    vars: BTreeMap<String, Rational>,
    so: BTreeMap<String, Vec<Interval>>,
    /// Breakpoints of the model and active witnesses, closed under integer
    /// shifts within [0, N].
    base: BTreeSet<Rational>,
}

struct Evaluator<'a> {
    flow: &'a MsoFlow,
    budget: &'a SoBudget,
}

/// Close a point set under ±1 shifts within [0, n].
fn int_closure<I: IntoIterator<Item = Rational>>(points: I, n: &Rational) -> BTreeSet<Rational> {
    let one = Rational::int(1);
    let mut out = BTreeSet::new();
    for p in points {
        if p.is_negative() || &p > n {
            continue;
        }
        let mut up = p.clone();
        while &up <= n {
            out.insert(up.clone());
            up = &up + &one;
        }
        let mut down = p;
        while !down.is_negative() {
            out.insert(down.clone());
            if down < one {
                break;
            }
            down = &down - &one;
        }
    }
    out
}

/// Decide the formula over the flow under the given first-order assignment.
pub fn eval_mso(
    flow: &MsoFlow,
    interp: &BTreeMap<String, Rational>,
    phi: &MsoFormula,
    budget: &SoBudget,
) -> Result<bool, MsoError> {
    let mut base: BTreeSet<Rational> = flow.breakpoints();
    base.insert(Rational::zero());
    let base = int_closure(base, &flow.horizon);
    let mut state = EvalState { vars: interp.clone(), so: BTreeMap::new(), base };
    let ev = Evaluator { flow, budget };
    ev.eval(&mut state, phi)
}

impl<'a> Evaluator<'a> {
    fn eval(&self, st: &mut EvalState, phi: &MsoFormula) -> Result<bool, MsoError> {
        match phi {
            MsoFormula::Less(x, y) => Ok(self.value(st, x)? < self.value(st, y)?),
            MsoFormula::PlusOne(x, y) => {
                let vx = self.value(st, x)?;
                let vy = self.value(st, y)?;
                Ok(vy == &vx + &Rational::int(1))
            }
            MsoFormula::Pred(p, x) => {
                let t = self.value(st, x)?;
                match st.so.get(p) {
                    Some(witness) => Ok(witness.iter().any(|iv| iv.contains(&t))),
                    None => Ok(self.flow.contains(&t, p)),
                }
            }
            MsoFormula::Or(a, b) => {
                Ok(self.eval(st, a)? || self.eval(st, b)?)
            }
            MsoFormula::Not(a) => Ok(!self.eval(st, a)?),
            MsoFormula::ExistsFO(x, body) => {
                let candidates = self.fo_candidates(st);
                let saved = st.vars.get(x).cloned();
                let mut found = false;
                for c in candidates {
                    st.vars.insert(x.clone(), c);
                    if self.eval(st, body)? {
                        found = true;
                        break;
                    }
                }
                match saved {
                    Some(v) => {
                        st.vars.insert(x.clone(), v);
                    }
                    None => {
                        st.vars.remove(x);
                    }
                }
                Ok(found)
            }
            MsoFormula::ExistsSO(p, body) => {
                let pieces = self.elementary_pieces()?;
                let saved_so = st.so.get(p).cloned();
                let saved_base = st.base.clone();
                // Witness endpoints live on the grid, so extend the shift
                // closure with the grid once for the whole enumeration.
                let mut grid: BTreeSet<Rational> = st.base.clone();
                for piece in &pieces {
                    grid.insert(piece.left().clone());
                    if let Some(r) = piece.right().finite() {
                        grid.insert(r.clone());
                    }
                }
                st.base = int_closure(grid, &self.flow.horizon);
                let mut found = false;
                'masks: for mask in 0u64..(1u64 << pieces.len()) {
                    let witness = merge_selected(&pieces, mask);
                    if witness.len() > self.budget.max_segments {
                        continue 'masks;
                    }
                    st.so.insert(p.clone(), witness);
                    if self.eval(st, body)? {
                        found = true;
                        break;
                    }
                }
                match saved_so {
                    Some(w) => {
                        st.so.insert(p.clone(), w);
                    }
                    None => {
                        st.so.remove(p);
                    }
                }
                st.base = saved_base;
                Ok(found)
            }
        }
    }

    fn value(&self, st: &EvalState, x: &str) -> Result<Rational, MsoError> {
        st.vars
            .get(x)
            .cloned()
            .ok_or_else(|| MsoError::UnboundVariable(x.to_string()))
    }

    /// Sample points deciding an innermost first-order quantifier: the shift
    /// closure, current variable values with their own shift closure, and one
    /// midpoint per gap, all within [0, N).
    fn fo_candidates(&self, st: &EvalState) -> Vec<Rational> {
        let n = &self.flow.horizon;
        let mut pts = st.base.clone();
        pts.extend(int_closure(st.vars.values().cloned(), n));
        pts.insert(Rational::zero());
        pts.insert(n.clone());
        let pts: Vec<Rational> = pts.into_iter().collect();
        let mut out = Vec::with_capacity(pts.len() * 2);
        for (i, p) in pts.iter().enumerate() {
            if p < n {
                out.push(p.clone());
            }
            if i + 1 < pts.len() {
                out.push(Rational::midpoint(p, &pts[i + 1]));
            }
        }
        out
    }

    /// Elementary grid pieces of [0, N): singular points at multiples of
    /// 1/granularity, and the open gaps between them.
    fn elementary_pieces(&self) -> Result<Vec<Interval>, MsoError> {
        let n = &self.flow.horizon;
        let step = Rational::new(1, self.budget.granularity as i64);
        let mut points = Vec::new();
        let mut p = Rational::zero();
        while &p < n {
            points.push(p.clone());
            p = &p + &step;
        }
        let mut pieces = Vec::new();
        for (i, p) in points.iter().enumerate() {
            pieces.push(Interval::singular(p.clone()));
            let next = points.get(i + 1).cloned().unwrap_or_else(|| n.clone());
            pieces.push(
                Interval::new(p.clone(), TimeBound::Finite(next), false, false)
                    .expect("grid step is positive"),
            );
        }
        if pieces.len() > 20 {
            return Err(MsoError::SoSpaceTooLarge(pieces.len()));
        }
        Ok(pieces)
    }
}

/// Merge the mask-selected adjacent elementary pieces into maximal intervals.
fn merge_selected(pieces: &[Interval], mask: u64) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        if mask & (1 << i) == 0 {
            continue;
        }
        if let Some(last) = out.last() {
            if last.consecutive(piece) {
                let merged = Interval::new(
                    last.left().clone(),
                    piece.right().clone(),
                    last.left_closed(),
                    piece.right_closed(),
                )
                .expect("merge of consecutive pieces is nonempty");
                *out.last_mut().unwrap() = merged;
                continue;
            }
        }
        out.push(piece.clone());
    }
    out
}

struct VarGen(usize);

impl VarGen {
    fn fresh(&mut self, hint: &str) -> String {
        self.0 += 1;
        format!("{}{}", hint, self.0)
    }
}

struct AutomatonEmitter<'a> {
    a: &'a TimedAutomaton,
    copy: Option<usize>,
    gen: VarGen,
}

/// Compile the automaton into a formula over its monadic predicates that is
/// satisfied exactly by the flow encodings of its accepting bounded
/// executions. Constants must already be integers; with `copy`, every
/// predicate name carries that path index.
pub fn emit_automaton_formula(
    a: &TimedAutomaton,
    copy: Option<usize>,
) -> Result<MsoFormula, MsoError> {
    for c in a.constants() {
        if !c.is_integer() {
            return Err(MsoError::NotIntegerScaled(c));
        }
    }
    for e in &a.edges {
        for g in &e.guards {
            if g.clocks().len() > 1 {
                return Err(MsoError::MultiClockGuard(g.to_text()));
            }
        }
    }
    let mut em = AutomatonEmitter { a, copy, gen: VarGen(0) };
    Ok(em.emit())
}

impl<'a> AutomatonEmitter<'a> {
    fn p(&self, mp: MonadicPredicate, x: &str) -> MsoFormula {
        MsoFormula::pred(predicate_name(&mp, self.copy), x)
    }

    fn state(&self, v: &str, x: &str) -> MsoFormula {
        self.p(MonadicPredicate::State(v.to_string()), x)
    }

    fn tminus(&self, e: usize, x: &str) -> MsoFormula {
        self.p(MonadicPredicate::TransMinus(e), x)
    }

    fn tplus(&self, e: usize, x: &str) -> MsoFormula {
        self.p(MonadicPredicate::TransPlus(e), x)
    }

    fn rminus(&self, c: &str, x: &str) -> MsoFormula {
        self.p(MonadicPredicate::ResetMinus(c.to_string()), x)
    }

    fn rplus(&self, c: &str, x: &str) -> MsoFormula {
        self.p(MonadicPredicate::ResetPlus(c.to_string()), x)
    }

    fn some_state(&self, t: &str) -> MsoFormula {
        MsoFormula::big_or(self.a.states.iter().map(|v| self.state(v, t)).collect())
    }

    fn no_state(&self, t: &str) -> MsoFormula {
        MsoFormula::big_and(
            self.a
                .states
                .iter()
                .map(|v| MsoFormula::not(self.state(v, t)))
                .collect(),
        )
    }

    fn final_state(&self, t: &str) -> MsoFormula {
        MsoFormula::big_or(
            self.a
                .final_states
                .iter()
                .map(|v| self.state(v, t))
                .collect(),
        )
    }

    /// Exactly one state holds at `t`.
    fn unique_state(&self, t: &str) -> MsoFormula {
        let mut parts = vec![self.some_state(t)];
        for (i, v1) in self.a.states.iter().enumerate() {
            for v2 in &self.a.states[i + 1..] {
                parts.push(MsoFormula::not(MsoFormula::and(
                    self.state(v1, t),
                    self.state(v2, t),
                )));
            }
        }
        MsoFormula::big_and(parts)
    }

    /// 0(x): x is the least element of the domain.
    fn zero(&mut self, x: &str) -> MsoFormula {
        let y = self.gen.fresh("y");
        MsoFormula::forall_fo(y.clone(), MsoFormula::le(x, y))
    }

    /// +c(r, z) for c ≥ 1: z = r + c via a chain of +1 steps.
    fn plus_c(&mut self, r: &str, z: &str, c: u64) -> MsoFormula {
        if c == 1 {
            MsoFormula::plus_one(r, z)
        } else {
            let y = self.gen.fresh("y");
            let head = MsoFormula::plus_one(r, y.clone());
            let tail = self.plus_c(&y, z, c - 1);
            MsoFormula::exists_fo(y, MsoFormula::and(head, tail))
        }
    }

    /// t ∼ r + c. Upper bounds go through negated existentials so they stay
    /// correct when r + c falls outside the domain (no +c witness exists
    /// there, yet t < r + c still holds).
    fn cmp_shift(&mut self, t: &str, r: &str, rel: Rel, c: u64) -> MsoFormula {
        if c == 0 {
            return match rel {
                Rel::Lt => MsoFormula::less(t, r),
                Rel::Le => MsoFormula::le(t, r),
                Rel::Eq => MsoFormula::eq(t, r),
                Rel::Ge => MsoFormula::le(r, t),
                Rel::Gt => MsoFormula::less(r, t),
            };
        }
        let z = self.gen.fresh("z");
        let chain = self.plus_c(r, &z, c);
        match rel {
            // t < r+c  ≡  ¬(r+c ≤ t)
            Rel::Lt => MsoFormula::not(MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::le(z, t)),
            )),
            // t ≤ r+c  ≡  ¬(r+c < t)
            Rel::Le => MsoFormula::not(MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::less(z, t)),
            )),
            Rel::Eq => MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::eq(z, t)),
            ),
            Rel::Ge => MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::le(z, t)),
            ),
            Rel::Gt => MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::less(z, t)),
            ),
        }
    }

    /// The constraint with the clock value substituted by t − r.
    fn constraint_at(&mut self, cc: &ClockConstraint, t: &str, r: &str) -> MsoFormula {
        match cc {
            ClockConstraint::True => MsoFormula::truth(),
            ClockConstraint::Atom { rel, constant, .. } => {
                let c = constant
                    .numerator()
                    .try_into()
                    .expect("integer-scaled constant fits u64");
                self.cmp_shift(t, r, *rel, c)
            }
            ClockConstraint::And(a, b) => MsoFormula::and(
                self.constraint_at(a, t, r),
                self.constraint_at(b, t, r),
            ),
            ClockConstraint::Or(a, b) => MsoFormula::or(
                self.constraint_at(a, t, r),
                self.constraint_at(b, t, r),
            ),
        }
    }

    /// Static truth of the constraint at clock value 0.
    fn constraint_at_zero(cc: &ClockConstraint) -> bool {
        match cc {
            ClockConstraint::True => true,
            ClockConstraint::Atom { rel, constant, .. } => {
                rel.eval(&Rational::zero(), constant)
            }
            ClockConstraint::And(a, b) => {
                Self::constraint_at_zero(a) && Self::constraint_at_zero(b)
            }
            ClockConstraint::Or(a, b) => {
                Self::constraint_at_zero(a) || Self::constraint_at_zero(b)
            }
        }
    }

    fn reset_any(&self, clock: &str, at: &str) -> MsoFormula {
        MsoFormula::or(self.rminus(clock, at), self.rplus(clock, at))
    }

    /// ∃r(r < t ∧ reset(r) ∧ no reset in (r, t) ∧ body(r)): the value of the
    /// clock at t is t − r for the last reset time r strictly before t.
    fn last_reset_lookup(
        &mut self,
        clock: &str,
        t: &str,
        body: impl FnOnce(&mut Self, &str) -> MsoFormula,
    ) -> MsoFormula {
        let r = self.gen.fresh("r");
        let z = self.gen.fresh("z");
        let fresh_between = MsoFormula::forall_fo(
            z.clone(),
            MsoFormula::implies(
                MsoFormula::and(
                    MsoFormula::less(r.clone(), z.clone()),
                    MsoFormula::less(z.clone(), t),
                ),
                MsoFormula::not(self.reset_any(clock, &z)),
            ),
        );
        let inner = body(self, &r);
        MsoFormula::exists_fo(
            r.clone(),
            MsoFormula::big_and(vec![
                MsoFormula::less(r.clone(), t),
                self.reset_any(clock, &r),
                fresh_between,
                inner,
            ]),
        )
    }

    /// v1 holds throughout some nonempty open interval ending at t.
    fn left_neighborhood(&mut self, v1: &str, t: &str) -> MsoFormula {
        let y = self.gen.fresh("y");
        let z = self.gen.fresh("z");
        MsoFormula::exists_fo(
            y.clone(),
            MsoFormula::and(
                MsoFormula::less(y.clone(), t),
                MsoFormula::forall_fo(
                    z.clone(),
                    MsoFormula::implies(
                        MsoFormula::and(
                            MsoFormula::less(y, z.clone()),
                            MsoFormula::less(z.clone(), t),
                        ),
                        self.state(v1, &z),
                    ),
                ),
            ),
        )
    }

    /// v2 holds throughout some nonempty open interval starting at t.
    fn right_neighborhood(&mut self, v2: &str, t: &str) -> MsoFormula {
        let y = self.gen.fresh("y");
        let z = self.gen.fresh("z");
        MsoFormula::exists_fo(
            y.clone(),
            MsoFormula::and(
                MsoFormula::less(t, y.clone()),
                MsoFormula::forall_fo(
                    z.clone(),
                    MsoFormula::implies(
                        MsoFormula::and(
                            MsoFormula::less(t, z.clone()),
                            MsoFormula::less(z.clone(), y),
                        ),
                        self.state(v2, &z),
                    ),
                ),
            ),
        )
    }

    fn forall_t(&mut self, body: impl FnOnce(&mut Self, &str) -> MsoFormula) -> MsoFormula {
        let t = self.gen.fresh("t");
        let inner = body(self, &t);
        MsoFormula::forall_fo(t, inner)
    }

    fn emit(&mut self) -> MsoFormula {
        let mut parts: Vec<MsoFormula> = Vec::new();
        parts.push(self.termination());
        parts.push(self.initial_states());
        parts.push(self.at_most_one_transition());
        for e in 0..self.a.edges.len() {
            parts.push(self.transition_consistency(e));
        }
        parts.push(self.forced_transitions());
        parts.push(self.resets_need_transitions());
        parts.push(self.origin_resets());
        parts.push(self.state_constraints());
        parts.push(self.guards());
        parts.push(self.acceptance());
        MsoFormula::big_and(parts)
    }

    /// The run occupies exactly one state up to a termination point and none
    /// after; the support may be closed or open at that point, or span the
    /// whole domain (the domain is right-open, so a full-span run has no
    /// termination point inside it).
    fn termination(&mut self) -> MsoFormula {
        let l = self.gen.fresh("l");
        let closed = {
            let body = self.forall_t(|em, t| {
                MsoFormula::and(
                    MsoFormula::implies(
                        MsoFormula::le(t, l.clone()),
                        em.unique_state(t),
                    ),
                    MsoFormula::implies(
                        MsoFormula::less(l.clone(), t),
                        em.no_state(t),
                    ),
                )
            });
            MsoFormula::exists_fo(l.clone(), body)
        };
        let l2 = self.gen.fresh("l");
        let open = {
            let body = self.forall_t(|em, t| {
                MsoFormula::and(
                    MsoFormula::implies(
                        MsoFormula::less(t, l2.clone()),
                        em.unique_state(t),
                    ),
                    MsoFormula::implies(
                        MsoFormula::le(l2.clone(), t),
                        em.no_state(t),
                    ),
                )
            });
            MsoFormula::exists_fo(l2.clone(), body)
        };
        let full = self.forall_t(|em, t| em.unique_state(t));
        MsoFormula::or(MsoFormula::or(closed, open), full)
    }

    fn initial_states(&mut self) -> MsoFormula {
        let initial: Vec<String> = self.a.initial.clone();
        self.forall_t(|em, t| {
            let zero = em.zero(t);
            MsoFormula::implies(
                zero,
                MsoFormula::big_or(
                    initial.iter().map(|v| em.state(v, t)).collect(),
                ),
            )
        })
    }

    fn at_most_one_transition(&mut self) -> MsoFormula {
        let n = self.a.edges.len();
        self.forall_t(|em, t| {
            let mut parts = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    parts.push(MsoFormula::not(MsoFormula::and(
                        em.tminus(i, t),
                        em.tminus(j, t),
                    )));
                    parts.push(MsoFormula::not(MsoFormula::and(
                        em.tplus(i, t),
                        em.tplus(j, t),
                    )));
                }
            }
            MsoFormula::implies(em.some_state(t), MsoFormula::big_and(parts))
        })
    }

    /// An entering marker implies the target state now, the source state
    /// throughout a left neighborhood, and exactly the edge's resets; dually
    /// for a leaving marker.
    fn transition_consistency(&mut self, e: usize) -> MsoFormula {
        let edge = self.a.edges[e].clone();
        let minus = self.forall_t(|em, t| {
            let mut resets = Vec::new();
            for x in &em.a.clocks.clone() {
                if edge.resets.contains(x) {
                    resets.push(em.rminus(x, t));
                } else {
                    resets.push(MsoFormula::not(em.rminus(x, t)));
                }
            }
            MsoFormula::implies(
                em.tminus(e, t),
                MsoFormula::big_and(
                    [em.state(&edge.to, t), em.left_neighborhood(&edge.from, t)]
                        .into_iter()
                        .chain(resets)
                        .collect(),
                ),
            )
        });
        let plus = self.forall_t(|em, t| {
            let mut resets = Vec::new();
            for x in &em.a.clocks.clone() {
                if edge.resets.contains(x) {
                    resets.push(em.rplus(x, t));
                } else {
                    resets.push(MsoFormula::not(em.rplus(x, t)));
                }
            }
            MsoFormula::implies(
                em.tplus(e, t),
                MsoFormula::big_and(
                    [em.state(&edge.from, t), em.right_neighborhood(&edge.to, t)]
                        .into_iter()
                        .chain(resets)
                        .collect(),
                ),
            )
        });
        MsoFormula::and(minus, plus)
    }

    /// A change between two distinct states forces a marker of a matching
    /// edge (no matching edge ⇒ the change is impossible); self-loops are
    /// exempt because dwelling needs no transition.
    fn forced_transitions(&mut self) -> MsoFormula {
        let states = self.a.states.clone();
        let mut parts = Vec::new();
        for v1 in &states {
            for v2 in &states {
                if v1 == v2 {
                    continue;
                }
                let entering: Vec<usize> = self
                    .a
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| &e.from == v1 && &e.to == v2)
                    .map(|(i, _)| i)
                    .collect();
                let minus = self.forall_t(|em, t| {
                    MsoFormula::implies(
                        MsoFormula::and(
                            em.state(v2, t),
                            MsoFormula::and(
                                MsoFormula::not(em.zero(t)),
                                em.left_neighborhood(v1, t),
                            ),
                        ),
                        MsoFormula::big_or(
                            entering.iter().map(|&i| em.tminus(i, t)).collect(),
                        ),
                    )
                });
                let plus = self.forall_t(|em, t| {
                    MsoFormula::implies(
                        MsoFormula::and(
                            em.state(v1, t),
                            em.right_neighborhood(v2, t),
                        ),
                        MsoFormula::big_or(
                            entering.iter().map(|&i| em.tplus(i, t)).collect(),
                        ),
                    )
                });
                parts.push(MsoFormula::and(minus, plus));
            }
        }
        MsoFormula::big_and(parts)
    }

    /// Resets appear only alongside transition markers; the time origin is
    /// exempt for entering resets (clock initialization).
    fn resets_need_transitions(&mut self) -> MsoFormula {
        let n = self.a.edges.len();
        let clocks = self.a.clocks.clone();
        let minus = self.forall_t(|em, t| {
            let any_minus =
                MsoFormula::big_or((0..n).map(|i| em.tminus(i, t)).collect());
            let zero = em.zero(t);
            MsoFormula::implies(
                MsoFormula::and(
                    MsoFormula::not(zero),
                    MsoFormula::not(any_minus),
                ),
                MsoFormula::big_and(
                    clocks
                        .iter()
                        .map(|x| MsoFormula::not(em.rminus(x, t)))
                        .collect(),
                ),
            )
        });
        let clocks = self.a.clocks.clone();
        let plus = self.forall_t(|em, t| {
            let any_plus =
                MsoFormula::big_or((0..n).map(|i| em.tplus(i, t)).collect());
            MsoFormula::implies(
                MsoFormula::not(any_plus),
                MsoFormula::big_and(
                    clocks
                        .iter()
                        .map(|x| MsoFormula::not(em.rplus(x, t)))
                        .collect(),
                ),
            )
        });
        MsoFormula::and(minus, plus)
    }

    /// All clocks carry an entering reset at the origin.
    fn origin_resets(&mut self) -> MsoFormula {
        let clocks = self.a.clocks.clone();
        self.forall_t(|em, t| {
            let zero = em.zero(t);
            MsoFormula::implies(
                zero,
                MsoFormula::big_and(
                    clocks.iter().map(|x| em.rminus(x, t)).collect(),
                ),
            )
        })
    }

    /// State constraints hold at all times. A clock's value is 0 exactly when
    /// its entering reset holds (origin or entering transition); otherwise it
    /// is the time since the last reset strictly before now.
    fn state_constraints(&mut self) -> MsoFormula {
        let mut parts = Vec::new();
        let states = self.a.states.clone();
        let clocks = self.a.clocks.clone();
        for v in &states {
            for x in &clocks {
                let beta = self.a.beta(v, x);
                if beta == ClockConstraint::True {
                    continue;
                }
                if !Self::constraint_at_zero(&beta) {
                    parts.push(self.forall_t(|em, t| {
                        MsoFormula::not(MsoFormula::and(
                            em.state(v, t),
                            em.rminus(x, t),
                        ))
                    }));
                }
                let beta2 = beta.clone();
                parts.push(self.forall_t(|em, t| {
                    let t = t.to_string();
                    let lookup = em.last_reset_lookup(x, &t, |em, r| {
                        em.constraint_at(&beta2, &t, r)
                    });
                    MsoFormula::implies(
                        MsoFormula::and(
                            em.state(v, &t),
                            MsoFormula::not(em.rminus(x, &t)),
                        ),
                        lookup,
                    )
                }));
            }
        }
        MsoFormula::big_and(parts)
    }

    /// Guards hold at transition instants. Entering markers see the clock
    /// values before their own resets (last reset strictly earlier); leaving
    /// markers see 0 for clocks reset by a simultaneous entering transition.
    fn guards(&mut self) -> MsoFormula {
        let mut parts = Vec::new();
        let edges = self.a.edges.clone();
        let clocks = self.a.clocks.clone();
        for (e, edge) in edges.iter().enumerate() {
            for x in &clocks {
                let over_x: Vec<ClockConstraint> = edge
                    .guards
                    .iter()
                    .filter(|g| g.clocks().contains(x))
                    .cloned()
                    .collect();
                if over_x.is_empty() {
                    continue;
                }
                let guard = ClockConstraint::conjoin(over_x);
                let g1 = guard.clone();
                parts.push(self.forall_t(|em, t| {
                    let t = t.to_string();
                    let lookup = em.last_reset_lookup(x, &t, |em, r| {
                        em.constraint_at(&g1, &t, r)
                    });
                    MsoFormula::implies(em.tminus(e, &t), lookup)
                }));
                if !Self::constraint_at_zero(&guard) {
                    parts.push(self.forall_t(|em, t| {
                        MsoFormula::not(MsoFormula::and(
                            em.tplus(e, t),
                            em.rminus(x, t),
                        ))
                    }));
                }
                let g2 = guard.clone();
                parts.push(self.forall_t(|em, t| {
                    let t = t.to_string();
                    let lookup = em.last_reset_lookup(x, &t, |em, r| {
                        em.constraint_at(&g2, &t, r)
                    });
                    MsoFormula::implies(
                        MsoFormula::and(
                            em.tplus(e, &t),
                            MsoFormula::not(em.rminus(x, &t)),
                        ),
                        lookup,
                    )
                }));
            }
        }
        MsoFormula::big_and(parts)
    }

    /// The run ends in a final state: either the support has a maximum which
    /// is final, or the support is open at its supremum with a final left
    /// neighborhood, or the run spans the whole domain and is eventually
    /// always final.
    fn acceptance(&mut self) -> MsoFormula {
        let l = self.gen.fresh("l");
        let max_final = {
            let after = self.forall_t(|em, t| {
                MsoFormula::implies(
                    MsoFormula::less(l.clone(), t),
                    em.no_state(t),
                )
            });
            MsoFormula::exists_fo(
                l.clone(),
                MsoFormula::big_and(vec![
                    self.some_state(&l),
                    after,
                    self.final_state(&l),
                ]),
            )
        };
        let l2 = self.gen.fresh("l");
        let open_final = {
            let after = self.forall_t(|em, t| {
                MsoFormula::implies(
                    MsoFormula::le(l2.clone(), t),
                    em.no_state(t),
                )
            });
            let y = self.gen.fresh("y");
            let z = self.gen.fresh("z");
            let final_tail = MsoFormula::exists_fo(
                y.clone(),
                MsoFormula::and(
                    MsoFormula::less(y.clone(), l2.clone()),
                    MsoFormula::forall_fo(
                        z.clone(),
                        MsoFormula::implies(
                            MsoFormula::and(
                                MsoFormula::less(y, z.clone()),
                                MsoFormula::less(z.clone(), l2.clone()),
                            ),
                            self.final_state(&z),
                        ),
                    ),
                ),
            );
            MsoFormula::exists_fo(
                l2.clone(),
                MsoFormula::and(after, final_tail),
            )
        };
        let full_span = {
            let all_states = self.forall_t(|em, t| em.some_state(t));
            let y = self.gen.fresh("y");
            let z = self.gen.fresh("z");
            let eventually_final = MsoFormula::exists_fo(
                y.clone(),
                MsoFormula::forall_fo(
                    z.clone(),
                    MsoFormula::implies(
                        MsoFormula::less(y, z.clone()),
                        self.final_state(&z),
                    ),
                ),
            );
            MsoFormula::and(all_states, eventually_final)
        };
        MsoFormula::or(MsoFormula::or(max_final, open_final), full_span)
    }
}

/// The translation of a formula of the hyper logic: one flow formula per
/// anchor choice, each with a single free first-order variable.
#[derive(Clone, Debug)]
pub struct Translation {
    /// The free time variable of every formula in `formulas`.
    pub free_var: String,
    /// Index 0 is the no-anchor variant; index i ≥ 1 anchors at the i-th
    /// free path variable.
    pub formulas: Vec<MsoFormula>,
}

/// Translate a formula of the hyper logic over the automaton into flow
/// formulas, one per anchor in {none, π_1, …, π_m} where π_1..π_m are the
/// free path variables in first-occurrence order. Interval endpoints must be
/// integers.
pub fn translate_hcmtl(
    phi: &HcmtlFormula,
    a: &TimedAutomaton,
) -> Result<Translation, MsoError> {
    for c in phi.interval_constants() {
        if !c.is_integer() {
            return Err(MsoError::NotIntegerScaled(c));
        }
    }
    for c in a.constants() {
        if !c.is_integer() {
            return Err(MsoError::NotIntegerScaled(c));
        }
    }
    let free = phi.free_vars();
    let m = free.len();
    let free_var = "x0".to_string();
    let mut formulas = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let mut tr = Translator {
            a,
            varmap: free
                .iter()
                .enumerate()
                .map(|(j, v)| (v.clone(), j + 1))
                .collect(),
            next_copy: m + 1,
            gen: VarGen(0),
        };
        formulas.push(tr.translate(phi, i, &free_var)?);
    }
    Ok(Translation { free_var, formulas })
}

struct Translator<'a> {
    a: &'a TimedAutomaton,
    varmap: BTreeMap<PathVar, usize>,
    next_copy: usize,
    gen: VarGen,
}

impl<'a> Translator<'a> {
    fn state_pred(&self, v: &str, copy: usize, x: &str) -> MsoFormula {
        MsoFormula::pred(
            predicate_name(&MonadicPredicate::State(v.to_string()), Some(copy)),
            x,
        )
    }

    /// y − x ∈ I with x < y already enforced by the caller.
    fn membership(&mut self, x: &str, y: &str, i: &Interval) -> MsoFormula {
        let mut parts = Vec::new();
        let low: u64 = i
            .left()
            .numerator()
            .try_into()
            .expect("integer-scaled endpoint fits u64");
        if low > 0 {
            let rel = if i.left_closed() { Rel::Ge } else { Rel::Gt };
            parts.push(self.cmp_shift(y, x, rel, low));
        }
        if let Some(r) = i.right().finite() {
            let high: u64 = r
                .numerator()
                .try_into()
                .expect("integer-scaled endpoint fits u64");
            let rel = if i.right_closed() { Rel::Le } else { Rel::Lt };
            parts.push(self.cmp_shift(y, x, rel, high));
        }
        MsoFormula::big_and(parts)
    }

    fn plus_c(&mut self, r: &str, z: &str, c: u64) -> MsoFormula {
        if c == 1 {
            MsoFormula::plus_one(r, z)
        } else {
            let y = self.gen.fresh("y");
            let head = MsoFormula::plus_one(r, y.clone());
            let tail = self.plus_c(&y, z, c - 1);
            MsoFormula::exists_fo(y, MsoFormula::and(head, tail))
        }
    }

    fn cmp_shift(&mut self, t: &str, r: &str, rel: Rel, c: u64) -> MsoFormula {
        if c == 0 {
            return match rel {
                Rel::Lt => MsoFormula::less(t, r),
                Rel::Le => MsoFormula::le(t, r),
                Rel::Eq => MsoFormula::eq(t, r),
                Rel::Ge => MsoFormula::le(r, t),
                Rel::Gt => MsoFormula::less(r, t),
            };
        }
        let z = self.gen.fresh("z");
        let chain = self.plus_c(r, &z, c);
        match rel {
            Rel::Lt => MsoFormula::not(MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::le(z, t)),
            )),
            Rel::Le => MsoFormula::not(MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::less(z, t)),
            )),
            Rel::Eq => MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::eq(z, t)),
            ),
            Rel::Ge => MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::le(z, t)),
            ),
            Rel::Gt => MsoFormula::exists_fo(
                z.clone(),
                MsoFormula::and(chain, MsoFormula::less(z, t)),
            ),
        }
    }

    fn translate(
        &mut self,
        phi: &HcmtlFormula,
        anchor: usize,
        x: &str,
    ) -> Result<MsoFormula, MsoError> {
        use HcmtlFormula::*;
        Ok(match phi {
            Atom(p, var) => {
                let j = self.varmap[var];
                MsoFormula::big_or(
                    self.a
                        .states
                        .iter()
                        .filter(|v| self.a.label(v).contains(p))
                        .map(|v| self.state_pred(v, j, x))
                        .collect(),
                )
            }
            NegAtom(p, var) if p == MARK_PROP => {
                // The event-mark proposition is negated classically: "no event
                // occurs here" also holds at positions past the run's end,
                // where no state predicate is set at all.
                let j = self.varmap[var];
                MsoFormula::not(MsoFormula::big_or(
                    self.a
                        .states
                        .iter()
                        .filter(|v| self.a.label(v).contains(p))
                        .map(|v| self.state_pred(v, j, x))
                        .collect(),
                ))
            }
            NegAtom(p, var) => {
                let j = self.varmap[var];
                MsoFormula::big_or(
                    self.a
                        .states
                        .iter()
                        .filter(|v| !self.a.label(v).contains(p))
                        .map(|v| self.state_pred(v, j, x))
                        .collect(),
                )
            }
            Or(f1, f2) => MsoFormula::or(
                self.translate(f1, anchor, x)?,
                self.translate(f2, anchor, x)?,
            ),
            And(f1, f2) => MsoFormula::and(
                self.translate(f1, anchor, x)?,
                self.translate(f2, anchor, x)?,
            ),
            Finally(i, f1) => {
                let y = self.gen.fresh("y");
                let member = self.membership(x, &y, i);
                let body = self.translate(f1, anchor, &y)?;
                MsoFormula::exists_fo(
                    y.clone(),
                    MsoFormula::big_and(vec![
                        MsoFormula::less(x, y.clone()),
                        member,
                        body,
                    ]),
                )
            }
            Globally(i, f1) => {
                let y = self.gen.fresh("y");
                let member = self.membership(x, &y, i);
                let body = self.translate(f1, anchor, &y)?;
                MsoFormula::forall_fo(
                    y.clone(),
                    MsoFormula::implies(
                        MsoFormula::and(MsoFormula::less(x, y.clone()), member),
                        body,
                    ),
                )
            }
            Until(i, f1, f2) => {
                let y = self.gen.fresh("y");
                let z = self.gen.fresh("z");
                let member = self.membership(x, &y, i);
                let holds_2 = self.translate(f2, anchor, &y)?;
                let holds_1 = self.translate(f1, anchor, &z)?;
                let between = MsoFormula::forall_fo(
                    z.clone(),
                    MsoFormula::implies(
                        MsoFormula::and(
                            MsoFormula::less(x, z.clone()),
                            MsoFormula::less(z.clone(), y.clone()),
                        ),
                        holds_1,
                    ),
                );
                MsoFormula::exists_fo(
                    y.clone(),
                    MsoFormula::big_and(vec![
                        MsoFormula::less(x, y.clone()),
                        member,
                        holds_2,
                        between,
                    ]),
                )
            }
            Exists(var, f1) => {
                self.quantifier(var, f1, anchor, x, true)?
            }
            Forall(var, f1) => {
                self.quantifier(var, f1, anchor, x, false)?
            }
        })
    }

    fn quantifier(
        &mut self,
        var: &PathVar,
        body: &HcmtlFormula,
        anchor: usize,
        x: &str,
        existential: bool,
    ) -> Result<MsoFormula, MsoError> {
        let copy = self.next_copy;
        self.next_copy += 1;
        let phi_a = emit_automaton_formula(self.a, Some(copy))?;
        // With an anchor, the quantified run must agree with the anchor's
        // predicates up to the current time; without one (index 0) there is
        // no prefix to respect.
        let agreement = if anchor >= 1 {
            let y = self.gen.fresh("y");
            let eqs = MsoFormula::big_and(
                monadic_predicates(self.a)
                    .iter()
                    .map(|mp| {
                        MsoFormula::iff(
                            MsoFormula::pred(
                                predicate_name(mp, Some(anchor)),
                                y.clone(),
                            ),
                            MsoFormula::pred(
                                predicate_name(mp, Some(copy)),
                                y.clone(),
                            ),
                        )
                    })
                    .collect(),
            );
            Some(MsoFormula::forall_fo(
                y.clone(),
                MsoFormula::implies(MsoFormula::le(y, x), eqs),
            ))
        } else {
            None
        };
        let saved = self.varmap.insert(var.clone(), copy);
        let inner = self.translate(body, copy, x)?;
        match saved {
            Some(j) => {
                self.varmap.insert(var.clone(), j);
            }
            None => {
                self.varmap.remove(var);
            }
        }
        let constraint = match agreement {
            Some(ag) => MsoFormula::and(phi_a, ag),
            None => phi_a,
        };
        let matrix = if existential {
            MsoFormula::and(constraint, inner)
        } else {
            MsoFormula::implies(constraint, inner)
        };
        let mut out = matrix;
        for mp in monadic_predicates(self.a).iter().rev() {
            let name = predicate_name(mp, Some(copy));
            out = if existential {
                MsoFormula::exists_so(name, out)
            } else {
                MsoFormula::forall_so(name, out)
            };
        }
        Ok(out)
    }
}

/// Header recording how an instance was scaled to integer constants, so
/// external tools can map times back: original = scaled / factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingManifest {
    pub factor: Rational,
    pub horizon: Rational,
}

/// Least integer factor making the automaton's constants, the formula's
/// interval endpoints, and the horizon all integers.
pub fn scaling_factor(
    a: &TimedAutomaton,
    phi: Option<&HcmtlFormula>,
    horizon: &Rational,
) -> Rational {
    let mut consts: Vec<Rational> = a.constants().into_iter().collect();
    if let Some(phi) = phi {
        consts.extend(phi.interval_constants());
    }
    consts.push(horizon.clone());
    let (factor, _) = crate::timecore::scale_to_integers(consts.iter());
    factor.to_string().parse().expect("integer factor")
}

fn scale_constraint(cc: &ClockConstraint, k: &Rational) -> ClockConstraint {
    match cc {
        ClockConstraint::True => ClockConstraint::True,
        ClockConstraint::Atom { clock, rel, constant } => ClockConstraint::Atom {
            clock: clock.clone(),
            rel: *rel,
            constant: constant * k,
        },
        ClockConstraint::And(a, b) => ClockConstraint::And(
            Box::new(scale_constraint(a, k)),
            Box::new(scale_constraint(b, k)),
        ),
        ClockConstraint::Or(a, b) => ClockConstraint::Or(
            Box::new(scale_constraint(a, k)),
            Box::new(scale_constraint(b, k)),
        ),
    }
}

/// Multiply every clock-constraint constant by `k`.
pub fn scale_automaton(a: &TimedAutomaton, k: &Rational) -> TimedAutomaton {
    let mut out = a.clone();
    for e in &mut out.edges {
        for g in &mut e.guards {
            *g = scale_constraint(g, k);
        }
    }
    for per_clock in out.state_constraints.values_mut() {
        for cc in per_clock.values_mut() {
            *cc = scale_constraint(cc, k);
        }
    }
    out
}

fn scale_interval(i: &Interval, k: &Rational) -> Interval {
    let right = match i.right() {
        TimeBound::Infinity => TimeBound::Infinity,
        TimeBound::Finite(r) => TimeBound::Finite(r * k),
    };
    Interval::new(i.left() * k, right, i.left_closed(), i.right_closed())
        .expect("scaling by a positive factor preserves nonemptiness")
}

/// Multiply every segment-interval endpoint of an execution by `k`.
pub fn scale_execution(rho: &Execution, k: &Rational) -> Execution {
    Execution {
        segments: rho
            .segments
            .iter()
            .map(|s| crate::automaton::Segment {
                state: s.state.clone(),
                interval: scale_interval(&s.interval, k),
            })
            .collect(),
        transitions: rho.transitions.clone(),
    }
}

/// Multiply every temporal-interval endpoint by `k`.
pub fn scale_formula(phi: &HcmtlFormula, k: &Rational) -> HcmtlFormula {
    use HcmtlFormula::*;
    match phi {
        Atom(..) | NegAtom(..) => phi.clone(),
        Or(a, b) => Or(
            Box::new(scale_formula(a, k)),
            Box::new(scale_formula(b, k)),
        ),
        And(a, b) => And(
            Box::new(scale_formula(a, k)),
            Box::new(scale_formula(b, k)),
        ),
        Finally(i, a) => Finally(scale_interval(i, k), Box::new(scale_formula(a, k))),
        Globally(i, a) => Globally(scale_interval(i, k), Box::new(scale_formula(a, k))),
        Until(i, a, b) => Until(
            scale_interval(i, k),
            Box::new(scale_formula(a, k)),
            Box::new(scale_formula(b, k)),
        ),
        Exists(v, a) => Exists(v.clone(), Box::new(scale_formula(a, k))),
        Forall(v, a) => Forall(v.clone(), Box::new(scale_formula(a, k))),
    }
}
