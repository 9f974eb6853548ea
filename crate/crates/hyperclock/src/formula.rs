//! Hyper metric temporal logic formulas: negation normal form abstract
//! syntax, a concrete-syntax parser/printer, negation duals, and the
//! point-to-interval transform used when reducing point-based verification
//! to interval-based verification.
//!
//! The AST is negation normal by construction — negation exists only on
//! atoms, because excluded middle fails at times past the end of a run, so
//! `¬` cannot be treated as a defined connective.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::timecore::{Interval, Rational, TimeBound};

/// Path variable bound by `exists`/`forall`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathVar(pub String);

impl fmt::Display for PathVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The proposition name reserved for event marks in point-automaton
/// simulations.
pub const MARK_PROP: &str = "#";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HcmtlFormula {
    Atom(String, PathVar),
    NegAtom(String, PathVar),
    Or(Box<HcmtlFormula>, Box<HcmtlFormula>),
    And(Box<HcmtlFormula>, Box<HcmtlFormula>),
    Finally(Interval, Box<HcmtlFormula>),
    Globally(Interval, Box<HcmtlFormula>),
    Until(Interval, Box<HcmtlFormula>, Box<HcmtlFormula>),
    Exists(PathVar, Box<HcmtlFormula>),
    Forall(PathVar, Box<HcmtlFormula>),
}

use HcmtlFormula::*;

impl HcmtlFormula {
    pub fn or(a: HcmtlFormula, b: HcmtlFormula) -> Self {
        Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: HcmtlFormula, b: HcmtlFormula) -> Self {
        And(Box::new(a), Box::new(b))
    }

    /// Negation in negation normal form: atoms flip polarity, De Morgan on
    /// the connectives, quantifiers dualize, and the temporal operators are
    /// replaced by their duals — `¬F_I φ ≡ G_I ¬φ`, `¬G_I φ ≡ F_I ¬φ`, and
    /// `¬(φ1 U_I φ2) ≡ (G_I ¬φ2) ∨ (¬φ2 U_J ¬φ1)` with `J = [0, R(I))`.
    pub fn negate(&self) -> HcmtlFormula {
        match self {
            Atom(p, v) => NegAtom(p.clone(), v.clone()),
            NegAtom(p, v) => Atom(p.clone(), v.clone()),
            Or(a, b) => HcmtlFormula::and(a.negate(), b.negate()),
            And(a, b) => HcmtlFormula::or(a.negate(), b.negate()),
            Finally(i, a) => Globally(i.clone(), Box::new(a.negate())),
            Globally(i, a) => Finally(i.clone(), Box::new(a.negate())),
            Until(i, a, b) => {
                let globally = Globally(i.clone(), Box::new(b.negate()));
                // J = [0, R(I)); when R(I) = 0 the interval is empty and the
                // second disjunct can never hold, so it is dropped.
                match i.right() {
                    TimeBound::Finite(r) if r.is_zero() => globally,
                    right => {
                        let j = Interval::new(
                            Rational::zero(),
                            right.clone(),
                            true,
                            false,
                        )
                        .expect("[0, R(I)) is nonempty when R(I) > 0");
                        HcmtlFormula::or(
                            globally,
                            Until(j, Box::new(b.negate()), Box::new(a.negate())),
                        )
                    }
                }
            }
            Exists(v, a) => Forall(v.clone(), Box::new(a.negate())),
            Forall(v, a) => Exists(v.clone(), Box::new(a.negate())),
        }
    }

    /// Free path variables in first-occurrence order. This order fixes the
    /// indices used by the MSO translation.
    pub fn free_vars(&self) -> Vec<PathVar> {
        let mut out = Vec::new();
        let mut bound = BTreeSet::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<PathVar>, out: &mut Vec<PathVar>) {
        match self {
            Atom(_, v) | NegAtom(_, v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Or(a, b) | And(a, b) | Until(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Finally(_, a) | Globally(_, a) => a.collect_free(bound, out),
            Exists(v, a) | Forall(v, a) => {
                let fresh = bound.insert(v.clone());
                a.collect_free(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    /// All interval endpoints annotating temporal operators.
    pub fn interval_constants(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        self.collect_intervals(&mut out);
        out
    }

    fn collect_intervals(&self, out: &mut BTreeSet<Rational>) {
        match self {
            Atom(..) | NegAtom(..) => {}
            Or(a, b) | And(a, b) => {
                a.collect_intervals(out);
                b.collect_intervals(out);
            }
            Finally(i, a) | Globally(i, a) => {
                out.insert(i.left().clone());
                if let Some(r) = i.right().finite() {
                    out.insert(r.clone());
                }
                a.collect_intervals(out);
            }
            Until(i, a, b) => {
                out.insert(i.left().clone());
                if let Some(r) = i.right().finite() {
                    out.insert(r.clone());
                }
                a.collect_intervals(out);
                b.collect_intervals(out);
            }
            Exists(_, a) | Forall(_, a) => a.collect_intervals(out),
        }
    }

    /// All proposition names occurring in atoms.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_atoms(&mut |p, _| {
            out.insert(p.to_string());
        });
        out
    }

    fn walk_atoms(&self, f: &mut impl FnMut(&str, &PathVar)) {
        match self {
            Atom(p, v) | NegAtom(p, v) => f(p, v),
            Or(a, b) | And(a, b) | Until(_, a, b) => {
                a.walk_atoms(f);
                b.walk_atoms(f);
            }
            Finally(_, a) | Globally(_, a) => a.walk_atoms(f),
            Exists(_, a) | Forall(_, a) => a.walk_atoms(f),
        }
    }

    /// Maximum temporal nesting depth.
    pub fn temporal_depth(&self) -> usize {
        match self {
            Atom(..) | NegAtom(..) => 0,
            Or(a, b) | And(a, b) => a.temporal_depth().max(b.temporal_depth()),
            Finally(_, a) | Globally(_, a) => 1 + a.temporal_depth(),
            Until(_, a, b) => 1 + a.temporal_depth().max(b.temporal_depth()),
            Exists(_, a) | Forall(_, a) => a.temporal_depth(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Atom(..) | NegAtom(..) => true,
            Or(a, b) | And(a, b) | Until(_, a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Finally(_, a) | Globally(_, a) => a.is_quantifier_free(),
            Exists(..) | Forall(..) => false,
        }
    }

    /// Sentence: no free path variables.
    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Well-formedness beyond NNF shape: unique binding, no variable both
    /// free and bound, and every temporal operator inside some quantifier.
    pub fn check_well_formed(&self) -> Result<(), WellFormedError> {
        let free: BTreeSet<PathVar> = self.free_vars().into_iter().collect();
        let mut bound = BTreeSet::new();
        self.check_wf(&free, &mut bound, false)
    }

    fn check_wf(
        &self,
        free: &BTreeSet<PathVar>,
        bound_anywhere: &mut BTreeSet<PathVar>,
        in_scope: bool,
    ) -> Result<(), WellFormedError> {
        match self {
            Atom(..) | NegAtom(..) => Ok(()),
            Or(a, b) | And(a, b) => {
                a.check_wf(free, bound_anywhere, in_scope)?;
                b.check_wf(free, bound_anywhere, in_scope)
            }
            Finally(_, a) | Globally(_, a) => {
                if !in_scope {
                    return Err(WellFormedError::TemporalOutsideQuantifier);
                }
                a.check_wf(free, bound_anywhere, in_scope)
            }
            Until(_, a, b) => {
                if !in_scope {
                    return Err(WellFormedError::TemporalOutsideQuantifier);
                }
                a.check_wf(free, bound_anywhere, in_scope)?;
                b.check_wf(free, bound_anywhere, in_scope)
            }
            Exists(v, a) | Forall(v, a) => {
                if free.contains(v) {
                    return Err(WellFormedError::FreeAndBound(v.clone()));
                }
                if !bound_anywhere.insert(v.clone()) {
                    return Err(WellFormedError::Rebound(v.clone()));
                }
                a.check_wf(free, bound_anywhere, true)
            }
        }
    }

    /// Point-to-interval transform `⟨φ⟩`: atoms gain an event-mark conjunct,
    /// temporal quantification is relativized to event points (the times at
    /// which some in-scope run has an event mark), and quantifiers pass
    /// through while extending the in-scope variable set.
    ///
    /// The negated mark guards rely on the evaluators negating the reserved
    /// mark proposition classically: "no event occurs here" also holds after
    /// a simulated run has stopped, mirroring the point-based semantics,
    /// where temporal operators skip times with no events.
    pub fn point_to_interval(&self, scope: &[PathVar]) -> HcmtlFormula {
        let marks_or = |scope: &[PathVar]| -> HcmtlFormula {
            let mut it = scope.iter();
            let first = it
                .next()
                .expect("temporal operators lie inside quantifier scope, so scope is nonempty");
            it.fold(Atom(MARK_PROP.into(), first.clone()), |acc, v| {
                HcmtlFormula::or(acc, Atom(MARK_PROP.into(), v.clone()))
            })
        };
        let no_marks = |scope: &[PathVar]| -> HcmtlFormula {
            let mut it = scope.iter();
            let first = it.next().expect("nonempty scope");
            it.fold(NegAtom(MARK_PROP.into(), first.clone()), |acc, v| {
                HcmtlFormula::and(acc, NegAtom(MARK_PROP.into(), v.clone()))
            })
        };
        match self {
            Atom(p, v) => HcmtlFormula::and(Atom(MARK_PROP.into(), v.clone()), Atom(p.clone(), v.clone())),
            NegAtom(p, v) => {
                HcmtlFormula::and(Atom(MARK_PROP.into(), v.clone()), NegAtom(p.clone(), v.clone()))
            }
            Or(a, b) => HcmtlFormula::or(a.point_to_interval(scope), b.point_to_interval(scope)),
            And(a, b) => HcmtlFormula::and(a.point_to_interval(scope), b.point_to_interval(scope)),
            Finally(i, a) => Finally(
                i.clone(),
                Box::new(HcmtlFormula::and(marks_or(scope), a.point_to_interval(scope))),
            ),
            Globally(i, a) => Globally(
                i.clone(),
                Box::new(HcmtlFormula::or(no_marks(scope), a.point_to_interval(scope))),
            ),
            Until(i, a, b) => Until(
                i.clone(),
                Box::new(HcmtlFormula::or(no_marks(scope), a.point_to_interval(scope))),
                Box::new(HcmtlFormula::and(marks_or(scope), b.point_to_interval(scope))),
            ),
            Exists(v, a) => {
                let mut inner = scope.to_vec();
                if !inner.contains(v) {
                    inner.push(v.clone());
                }
                Exists(v.clone(), Box::new(a.point_to_interval(&inner)))
            }
            Forall(v, a) => {
                let mut inner = scope.to_vec();
                if !inner.contains(v) {
                    inner.push(v.clone());
                }
                Forall(v.clone(), Box::new(a.point_to_interval(&inner)))
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WellFormedError {
    #[error("temporal operator outside the scope of any path quantifier")]
    TemporalOutsideQuantifier,
    #[error("path variable {0} is both free and bound")]
    FreeAndBound(PathVar),
    #[error("path variable {0} is bound more than once")]
    Rebound(PathVar),
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

// Precedence levels for printing: higher binds tighter.
fn prec(f: &HcmtlFormula) -> u8 {
    match f {
        Atom(..) | NegAtom(..) | Until(..) => 5, // Until always prints parenthesized
        Finally(..) | Globally(..) => 4,
        And(..) => 3,
        Or(..) => 2,
        Exists(..) | Forall(..) => 1,
    }
}

fn fmt_prec(f: &HcmtlFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(f);
    let paren = p < min;
    if paren {
        write!(out, "(")?;
    }
    match f {
        Atom(prop, v) => write!(out, "{}@{}", prop, v)?,
        NegAtom(prop, v) => write!(out, "!{}@{}", prop, v)?,
        Or(a, b) => {
            fmt_prec(a, 2, out)?;
            write!(out, " | ")?;
            fmt_prec(b, 3, out)?;
        }
        And(a, b) => {
            fmt_prec(a, 3, out)?;
            write!(out, " & ")?;
            fmt_prec(b, 4, out)?;
        }
        Finally(i, a) => {
            write!(out, "F{} ", i)?;
            fmt_prec(a, 4, out)?;
        }
        Globally(i, a) => {
            write!(out, "G{} ", i)?;
            fmt_prec(a, 4, out)?;
        }
        Until(i, a, b) => {
            write!(out, "(")?;
            fmt_prec(a, 1, out)?;
            write!(out, " U{} ", i)?;
            fmt_prec(b, 1, out)?;
            write!(out, ")")?;
        }
        Exists(v, a) => {
            write!(out, "exists {}. ", v)?;
            fmt_prec(a, 1, out)?;
        }
        Forall(v, a) => {
            write!(out, "forall {}. ", v)?;
            fmt_prec(a, 1, out)?;
        }
    }
    if paren {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for HcmtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    WellFormed(#[from] WellFormedError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Dot,
    At,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '.' => {
                out.push((Tok::Dot, i));
                i += 1;
            }
            '@' => {
                out.push((Tok::At, i));
                i += 1;
            }
            '!' => {
                out.push((Tok::Bang, i));
                i += 1;
            }
            '&' => {
                out.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                out.push((Tok::Pipe, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            '<' => {
                if text[i..].starts_with("<->") {
                    out.push((Tok::DArrow, i));
                    i += 3;
                } else {
                    return Err(SyntaxError { position: i, message: "expected \"<->\"".into() });
                }
            }
            '-' => {
                if text[i..].starts_with("->") {
                    out.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(SyntaxError { position: i, message: "expected \"->\"".into() });
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'/' {
                    i += 1;
                    let denom_start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    if i == denom_start {
                        return Err(SyntaxError {
                            position: i,
                            message: "expected denominator digits".into(),
                        });
                    }
                }
                out.push((Tok::Number(text[start..i].to_string()), start));
            }
            c if c.is_alphabetic() || c == '_' || c == '#' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_alphanumeric() || c == '_' || c == '#' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            other => {
                return Err(SyntaxError {
                    position: i,
                    message: format!("unexpected character {:?}", other),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError { position: self.here(), message: message.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {}", what)))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err(format!("expected {}", what)))
            }
        }
    }

    // iff := imp ("<->" imp)*            (lowest precedence, left-assoc)
    fn formula(&mut self) -> Result<HcmtlFormula, SyntaxError> {
        let mut lhs = self.imp()?;
        while self.peek() == Some(&Tok::DArrow) {
            self.pos += 1;
            let rhs = self.imp()?;
            // a <-> b  ≡  (¬a ∨ b) ∧ (¬b ∨ a), pushed into NNF immediately.
            lhs = HcmtlFormula::and(
                HcmtlFormula::or(lhs.negate(), rhs.clone()),
                HcmtlFormula::or(rhs.negate(), lhs),
            );
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<HcmtlFormula, SyntaxError> {
        let mut lhs = self.disj()?;
        while self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.disj()?;
            lhs = HcmtlFormula::or(lhs.negate(), rhs);
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<HcmtlFormula, SyntaxError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let rhs = self.conj()?;
            lhs = HcmtlFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<HcmtlFormula, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = HcmtlFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn interval(&mut self) -> Result<Interval, SyntaxError> {
        let left_closed = match self.bump() {
            Some(Tok::LBracket) => true,
            Some(Tok::LParen) => false,
            _ => return Err(self.err("expected interval")),
        };
        let left: Rational = match self.bump() {
            Some(Tok::Number(n)) => n
                .parse()
                .map_err(|e| self.err(format!("bad rational: {}", e)))?,
            _ => return Err(self.err("expected interval left endpoint")),
        };
        self.expect(Tok::Comma, "\",\" in interval")?;
        let right = match self.bump() {
            Some(Tok::Number(n)) => TimeBound::Finite(
                n.parse()
                    .map_err(|e| self.err(format!("bad rational: {}", e)))?,
            ),
            Some(Tok::Ident(s)) if s == "inf" => TimeBound::Infinity,
            _ => return Err(self.err("expected interval right endpoint")),
        };
        let right_closed = match self.bump() {
            Some(Tok::RBracket) => true,
            Some(Tok::RParen) => false,
            _ => return Err(self.err("expected interval close")),
        };
        Interval::new(left, right, left_closed, right_closed)
            .map_err(|e| self.err(e.to_string()))
    }

    fn atom_tail(&mut self, prop: String) -> Result<HcmtlFormula, SyntaxError> {
        self.expect(Tok::At, "\"@\" in atom")?;
        let var = self.ident("path variable")?;
        Ok(Atom(prop, PathVar(var)))
    }

    fn unary(&mut self) -> Result<HcmtlFormula, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(inner.negate())
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "exists" | "forall" => {
                        let var = self.ident("path variable")?;
                        self.expect(Tok::Dot, "\".\" after quantifier binding")?;
                        let body = self.formula()?;
                        if id == "exists" {
                            Ok(Exists(PathVar(var), Box::new(body)))
                        } else {
                            Ok(Forall(PathVar(var), Box::new(body)))
                        }
                    }
                    "F" | "G"
                        if matches!(self.peek(), Some(Tok::LBracket) | Some(Tok::LParen)) =>
                    {
                        // "F(" could also start "F ( formula ... )"; an
                        // interval requires a number immediately after.
                        let looks_like_interval = match (self.peek(), self.toks.get(self.pos + 1))
                        {
                            (Some(Tok::LBracket), _) => true,
                            (Some(Tok::LParen), Some((Tok::Number(_), _))) => true,
                            _ => false,
                        };
                        if looks_like_interval {
                            let i = self.interval()?;
                            let body = self.unary()?;
                            if id == "F" {
                                Ok(Finally(i, Box::new(body)))
                            } else {
                                Ok(Globally(i, Box::new(body)))
                            }
                        } else {
                            self.atom_tail(id)
                        }
                    }
                    _ => self.atom_tail(id),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let lhs = self.formula()?;
                match self.peek() {
                    Some(Tok::Ident(u)) if u == "U" => {
                        self.pos += 1;
                        let i = self.interval()?;
                        let rhs = self.formula()?;
                        self.expect(Tok::RParen, "\")\"")?;
                        Ok(Until(i, Box::new(lhs), Box::new(rhs)))
                    }
                    _ => {
                        self.expect(Tok::RParen, "\")\"")?;
                        Ok(lhs)
                    }
                }
            }
            _ => Err(self.err("expected formula")),
        }
    }
}

/// Parse the concrete syntax into a well-formed NNF formula.
pub fn parse(text: &str) -> Result<HcmtlFormula, ParseError> {
    let f = parse_fragment(text)?;
    f.check_well_formed()?;
    Ok(f)
}

/// Parse without the well-formedness check. Useful for formula fragments
/// (e.g. quantifier bodies evaluated at an anchored time) that are not
/// closed sentences on their own.
pub fn parse_fragment(text: &str) -> Result<HcmtlFormula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos != toks.len() {
        return Err(SyntaxError {
            position: p.here(),
            message: "trailing input after formula".into(),
        }
        .into());
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(s: &str) -> PathVar {
        PathVar(s.to_string())
    }

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn parse_biconditional() {
        let f = parse("forall p1. G[0,inf) (run@p1 <-> run@p1)").unwrap();
        assert!(matches!(f, Forall(..)));
        f.check_well_formed().unwrap();
    }

    #[test]
    fn parse_nested_quantifiers() {
        let f = parse("exists p1. F[1,2] exists p2. q@p2").unwrap();
        match &f {
            Exists(v, body) => {
                assert_eq!(v, &pv("p1"));
                assert!(matches!(**body, Finally(..)));
            }
            _ => panic!("expected exists at root"),
        }
    }

    #[test]
    fn temporal_outside_quantifier_rejected() {
        let e = parse("F[0,1] p@x").unwrap_err();
        assert!(matches!(
            e,
            ParseError::WellFormed(WellFormedError::TemporalOutsideQuantifier)
        ));
    }

    #[test]
    fn shadowing_rejected() {
        let e = parse("exists p. exists p. q@p").unwrap_err();
        assert!(matches!(e, ParseError::WellFormed(WellFormedError::Rebound(_))));
    }

    #[test]
    fn negate_finally() {
        let f = Finally(iv("[1,2]"), Box::new(Atom("p".into(), pv("x"))));
        assert_eq!(
            f.negate(),
            Globally(iv("[1,2]"), Box::new(NegAtom("p".into(), pv("x"))))
        );
    }

    #[test]
    fn negate_until_dual() {
        let f = Until(
            iv("[0,2]"),
            Box::new(Atom("p".into(), pv("x"))),
            Box::new(Atom("q".into(), pv("x"))),
        );
        let n = f.negate();
        let expected = HcmtlFormula::or(
            Globally(iv("[0,2]"), Box::new(NegAtom("q".into(), pv("x")))),
            Until(
                iv("[0,2)"),
                Box::new(NegAtom("q".into(), pv("x"))),
                Box::new(NegAtom("p".into(), pv("x"))),
            ),
        );
        assert_eq!(n, expected);
    }

    #[test]
    fn negate_involutive_on_fg_fragment() {
        let f = parse("exists p1. G[0,3] (a@p1 | F[1,2] !b@p1)").unwrap();
        assert_eq!(f.negate().negate(), f);
    }

    #[test]
    fn free_vars_order() {
        let f = HcmtlFormula::and(Atom("p".into(), pv("pi1")), Atom("q".into(), pv("pi2")));
        assert_eq!(f.free_vars(), vec![pv("pi1"), pv("pi2")]);
        let f = Exists(pv("pi1"), Box::new(Atom("p".into(), pv("pi1"))));
        assert!(f.free_vars().is_empty());
        let f = Exists(
            pv("pi2"),
            Box::new(HcmtlFormula::and(
                Atom("p".into(), pv("pi1")),
                Atom("q".into(), pv("pi2")),
            )),
        );
        assert_eq!(f.free_vars(), vec![pv("pi1")]);
    }

    #[test]
    fn print_parse_round_trip() {
        let samples = [
            "exists p1. F[1,2] exists p2. q@p2",
            "forall p1. G[0,inf) (a@p1 | !b@p1)",
            "exists x. (a@x U[0,2] b@x)",
            "exists x. (a@x & b@x | c@x)",
            "exists x. F[1/2,3/2] (a@x U(0,inf) (b@x & !c@x))",
        ];
        for s in samples {
            let f = parse(s).unwrap();
            let printed = f.to_string();
            let back = parse(&printed).unwrap_or_else(|e| panic!("reparse {:?}: {}", printed, e));
            assert_eq!(back, f, "round trip through {:?}", printed);
        }
    }

    #[test]
    fn point_to_interval_atom() {
        let f = Atom("p".into(), pv("x"));
        let t = f.point_to_interval(&[pv("x")]);
        assert_eq!(
            t,
            HcmtlFormula::and(Atom("#".into(), pv("x")), Atom("p".into(), pv("x")))
        );
    }

    #[test]
    fn point_to_interval_until() {
        let f = Until(
            iv("[0,2]"),
            Box::new(Atom("a".into(), pv("x"))),
            Box::new(Atom("b".into(), pv("x"))),
        );
        let t = f.point_to_interval(&[pv("x")]);
        match t {
            Until(i, lhs, rhs) => {
                assert_eq!(i, iv("[0,2]"));
                // Guard on the left: no-marks ∨ ⟨a⟩.
                assert_eq!(
                    *lhs,
                    HcmtlFormula::or(
                        NegAtom("#".into(), pv("x")),
                        HcmtlFormula::and(Atom("#".into(), pv("x")), Atom("a".into(), pv("x")))
                    )
                );
                // Conjunct on the right: marks ∧ ⟨b⟩.
                assert_eq!(
                    *rhs,
                    HcmtlFormula::and(
                        Atom("#".into(), pv("x")),
                        HcmtlFormula::and(Atom("#".into(), pv("x")), Atom("b".into(), pv("x")))
                    )
                );
            }
            other => panic!("expected Until, got {}", other),
        }
    }

    #[test]
    fn point_to_interval_globally_under_binder() {
        let f = Forall(
            pv("pi"),
            Box::new(Globally(iv("[0,1]"), Box::new(Atom("p".into(), pv("pi"))))),
        );
        let t = f.point_to_interval(&[]);
        let expected = Forall(
            pv("pi"),
            Box::new(Globally(
                iv("[0,1]"),
                Box::new(HcmtlFormula::or(
                    NegAtom("#".into(), pv("pi")),
                    HcmtlFormula::and(Atom("#".into(), pv("pi")), Atom("p".into(), pv("pi"))),
                )),
            )),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn negate_preserves_free_vars() {
        let f = parse("exists x. F[0,1] (a@x | !b@x)").unwrap();
        assert_eq!(f.negate().free_vars(), f.free_vars());
    }
}
