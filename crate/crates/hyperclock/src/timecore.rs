//! Exact time arithmetic: rationals, intervals, interval sequences, clock
//! constraints and clock valuations.
//!
//! Every time constant in the toolkit lives here as an exact rational;
//! interval endpoints carry explicit open/closed flags so boundary-sensitive
//! semantics can be decided without sampling.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number, canonical reduced form with positive denominator.
///
/// Serializes as `"p/q"` (or `"p"` when integral) — never as a float.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numerator(&self) -> BigInt {
        self.0.numer().clone()
    }

    pub fn denominator(&self) -> BigInt {
        self.0.denom().clone()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Floor of the rational as a big integer.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Midpoint of two rationals.
    pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
        Rational((&a.0 + &b.0) / BigRational::from_integer(BigInt::from(2)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal {0:?} (expected \"p\" or \"p/q\")")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseRationalError(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Rational(BigRational::new(p, q)))
            }
            None => {
                let p: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rational(BigRational::from_integer(p)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(std::ops::$trait::$method(self.0, rhs.0))
            }
        }
        impl std::ops::$trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(std::ops::$trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Right endpoint of an interval: a finite rational or positive infinity.
/// Infinity compares greater than every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TimeBound {
    Finite(Rational),
    Infinity,
}

impl TimeBound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TimeBound::Finite(r) => Some(r),
            TimeBound::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TimeBound::Infinity)
    }
}

impl PartialOrd for TimeBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TimeBound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TimeBound::Infinity, TimeBound::Infinity) => Ordering::Equal,
            (TimeBound::Infinity, _) => Ordering::Greater,
            (_, TimeBound::Infinity) => Ordering::Less,
            (TimeBound::Finite(a), TimeBound::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialEq<Rational> for TimeBound {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, TimeBound::Finite(r) if r == other)
    }
}

impl PartialOrd<Rational> for TimeBound {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        match self {
            TimeBound::Infinity => Some(Ordering::Greater),
            TimeBound::Finite(r) => r.partial_cmp(other),
        }
    }
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeBound::Finite(r) => write!(f, "{}", r),
            TimeBound::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for TimeBound {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" => Ok(TimeBound::Infinity),
            other => other.parse().map(TimeBound::Finite),
        }
    }
}

impl Serialize for TimeBound {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TimeBound {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    #[error("interval is empty: {0}")]
    Empty(String),
    #[error("negative left endpoint: {0}")]
    NegativeLeft(Rational),
    #[error("infinite right endpoint must be open")]
    ClosedInfinity,
    #[error("malformed interval literal {0:?}")]
    Parse(String),
}

/// Time interval with rational endpoints and open/closed flags.
///
/// Construction rejects empty intervals: `left = right` is allowed only when
/// both ends are closed (a singular interval `[t,t]`), and an infinite right
/// endpoint must be open.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    left: Rational,
    right: TimeBound,
    left_closed: bool,
    right_closed: bool,
}

impl Interval {
    pub fn new(
        left: Rational,
        right: TimeBound,
        left_closed: bool,
        right_closed: bool,
    ) -> Result<Self, IntervalError> {
        if left.is_negative() {
            return Err(IntervalError::NegativeLeft(left));
        }
        match &right {
            TimeBound::Infinity => {
                if right_closed {
                    return Err(IntervalError::ClosedInfinity);
                }
            }
            TimeBound::Finite(r) => {
                let empty = match left.cmp(r) {
                    Ordering::Greater => true,
                    Ordering::Equal => !(left_closed && right_closed),
                    Ordering::Less => false,
                };
                if empty {
                    let lb = if left_closed { '[' } else { '(' };
                    let rb = if right_closed { ']' } else { ')' };
                    return Err(IntervalError::Empty(format!("{}{},{}{}", lb, left, right, rb)));
                }
            }
        }
        Ok(Interval { left, right, left_closed, right_closed })
    }

    /// Closed interval `[a,b]`.
    pub fn closed(a: Rational, b: Rational) -> Self {
        Interval::new(a, TimeBound::Finite(b), true, true).expect("nonempty closed interval")
    }

    /// Singular interval `[t,t]`.
    pub fn singular(t: Rational) -> Self {
        Interval::closed(t.clone(), t)
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &TimeBound {
        &self.right
    }

    pub fn left_closed(&self) -> bool {
        self.left_closed
    }

    pub fn right_closed(&self) -> bool {
        self.right_closed
    }

    pub fn is_singular(&self) -> bool {
        self.right == self.left
    }

    /// Membership of `t` in the interval, respecting open/closed flags.
    pub fn contains(&self, t: &Rational) -> bool {
        let left_ok = match t.cmp(&self.left) {
            Ordering::Greater => true,
            Ordering::Equal => self.left_closed,
            Ordering::Less => false,
        };
        if !left_ok {
            return false;
        }
        match &self.right {
            TimeBound::Infinity => true,
            TimeBound::Finite(r) => match t.cmp(r) {
                Ordering::Less => true,
                Ordering::Equal => self.right_closed,
                Ordering::Greater => false,
            },
        }
    }

    /// Translate both endpoints by `t`, preserving flags; `∞ + t = ∞`.
    pub fn shift(&self, t: &Rational) -> Interval {
        Interval {
            left: &self.left + t,
            right: match &self.right {
                TimeBound::Infinity => TimeBound::Infinity,
                TimeBound::Finite(r) => TimeBound::Finite(r + t),
            },
            left_closed: self.left_closed,
            right_closed: self.right_closed,
        }
    }

    /// Consecution: `R(I1) = L(I2)`, the shared endpoint belongs to exactly
    /// one of the two, and the intervals are disjoint.
    ///
    /// A singular `[t,t]` followed by another singular `[t,t]` cannot satisfy
    /// the exactly-one condition together with disjointness and is therefore
    /// non-consecutive.
    pub fn consecutive(&self, next: &Interval) -> bool {
        let boundary = match &self.right {
            TimeBound::Infinity => return false,
            TimeBound::Finite(r) => r,
        };
        if boundary != &next.left {
            return false;
        }
        // With R(I1) = L(I2) and both intervals nonempty, disjointness and
        // "shared endpoint in exactly one" coincide: exactly one closure flag
        // at the junction.
        self.right_closed != next.left_closed
    }

    /// Intersection with `[0, t]`; `None` if empty (i.e. the interval starts
    /// strictly after `t`).
    pub fn truncate_at(&self, t: &Rational) -> Option<Interval> {
        match t.cmp(&self.left) {
            Ordering::Less => None,
            Ordering::Equal if !self.left_closed => None,
            _ => {
                let within = match &self.right {
                    TimeBound::Infinity => true,
                    TimeBound::Finite(r) => match t.cmp(r) {
                        Ordering::Less => true,
                        Ordering::Equal => !self.right_closed,
                        Ordering::Greater => false,
                    },
                };
                if within {
                    Some(Interval {
                        left: self.left.clone(),
                        right: TimeBound::Finite(t.clone()),
                        left_closed: self.left_closed,
                        right_closed: true,
                    })
                } else {
                    Some(self.clone())
                }
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.left_closed { '[' } else { '(' },
            self.left,
            self.right,
            if self.right_closed { ']' } else { ')' }
        )
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || IntervalError::Parse(s.to_string());
        let mut chars = s.chars();
        let left_closed = match chars.next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let right_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let inner = &s[1..s.len() - 1];
        let (l, r) = inner.split_once(',').ok_or_else(bad)?;
        let left: Rational = l.parse().map_err(|_| bad())?;
        let right = match r.trim() {
            "inf" | "∞" => TimeBound::Infinity,
            other => TimeBound::Finite(other.parse().map_err(|_| bad())?),
        };
        Interval::new(left, right, left_closed, right_closed)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("empty interval sequence")]
    EmptySequence,
    #[error("first interval {0} does not start closed at 0")]
    BadInitial(Interval),
    #[error("intervals {0} and {1} (positions {2}, {3}) are not consecutive")]
    NotConsecutive(Interval, Interval, usize, usize),
}

/// Ordered sequence of intervals covering an initial segment of time:
/// the first interval starts closed at 0, and every adjacent pair is
/// consecutive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSequence {
    items: Vec<Interval>,
}

impl IntervalSequence {
    pub fn new(items: Vec<Interval>) -> Result<Self, SequenceError> {
        let first = items.first().ok_or(SequenceError::EmptySequence)?;
        if !(first.left().is_zero() && first.left_closed()) {
            return Err(SequenceError::BadInitial(first.clone()));
        }
        for (i, pair) in items.windows(2).enumerate() {
            if !pair[0].consecutive(&pair[1]) {
                return Err(SequenceError::NotConsecutive(
                    pair[0].clone(),
                    pair[1].clone(),
                    i,
                    i + 1,
                ));
            }
        }
        Ok(IntervalSequence { items })
    }

    pub fn items(&self) -> &[Interval] {
        &self.items
    }
}

/// Comparison relation in a clock constraint atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn eval(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

/// Negation-free clock constraint: atoms `x ∼ c` combined with ∧/∨, plus the
/// always-true constraint (the default for unspecified state constraints and
/// trivially guarded edges).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClockConstraint {
    True,
    Atom { clock: String, rel: Rel, constant: Rational },
    And(Box<ClockConstraint>, Box<ClockConstraint>),
    Or(Box<ClockConstraint>, Box<ClockConstraint>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("unknown clock {0:?}")]
    UnknownClock(String),
    #[error("negative constant {0} in clock constraint")]
    NegativeConstant(Rational),
    #[error("malformed clock constraint at {0:?}")]
    Parse(String),
}

impl ClockConstraint {
    pub fn atom(clock: &str, rel: Rel, constant: Rational) -> Result<Self, ConstraintError> {
        if constant.is_negative() {
            return Err(ConstraintError::NegativeConstant(constant));
        }
        Ok(ClockConstraint::Atom { clock: clock.to_string(), rel, constant })
    }

    pub fn and(a: ClockConstraint, b: ClockConstraint) -> Self {
        ClockConstraint::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ClockConstraint, b: ClockConstraint) -> Self {
        ClockConstraint::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of a list of constraints; empty list is `True`.
    pub fn conjoin(cs: impl IntoIterator<Item = ClockConstraint>) -> Self {
        let mut it = cs.into_iter();
        match it.next() {
            None => ClockConstraint::True,
            Some(first) => it.fold(first, ClockConstraint::and),
        }
    }

    /// Clocks mentioned in the constraint.
    pub fn clocks(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_clocks(&mut out);
        out
    }

    fn collect_clocks(&self, out: &mut BTreeSet<String>) {
        match self {
            ClockConstraint::True => {}
            ClockConstraint::Atom { clock, .. } => {
                out.insert(clock.clone());
            }
            ClockConstraint::And(a, b) | ClockConstraint::Or(a, b) => {
                a.collect_clocks(out);
                b.collect_clocks(out);
            }
        }
    }

    /// Constants mentioned in the constraint.
    pub fn constants(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut BTreeSet<Rational>) {
        match self {
            ClockConstraint::True => {}
            ClockConstraint::Atom { constant, .. } => {
                out.insert(constant.clone());
            }
            ClockConstraint::And(a, b) | ClockConstraint::Or(a, b) => {
                a.collect_constants(out);
                b.collect_constants(out);
            }
        }
    }

    /// Prefix text form, e.g. `(and (<= x 2) (or (< y 1) (= y 2)))`.
    pub fn to_text(&self) -> String {
        match self {
            ClockConstraint::True => "(true)".to_string(),
            ClockConstraint::Atom { clock, rel, constant } => {
                format!("({} {} {})", rel.symbol(), clock, constant)
            }
            ClockConstraint::And(a, b) => format!("(and {} {})", a.to_text(), b.to_text()),
            ClockConstraint::Or(a, b) => format!("(or {} {})", a.to_text(), b.to_text()),
        }
    }

    /// Parse the prefix text grammar.
    pub fn parse(text: &str) -> Result<Self, ConstraintError> {
        let tokens = tokenize_sexpr(text);
        let mut pos = 0;
        let c = parse_constraint(&tokens, &mut pos)
            .ok_or_else(|| ConstraintError::Parse(text.to_string()))?;
        if pos != tokens.len() {
            return Err(ConstraintError::Parse(text.to_string()));
        }
        Ok(c)
    }
}

fn tokenize_sexpr(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn parse_constraint(tokens: &[String], pos: &mut usize) -> Option<ClockConstraint> {
    if tokens.get(*pos)? != "(" {
        return None;
    }
    *pos += 1;
    let head = tokens.get(*pos)?.clone();
    *pos += 1;
    let result = match head.as_str() {
        "true" => ClockConstraint::True,
        "and" | "or" => {
            let a = parse_constraint(tokens, pos)?;
            let b = parse_constraint(tokens, pos)?;
            if head == "and" {
                ClockConstraint::and(a, b)
            } else {
                ClockConstraint::or(a, b)
            }
        }
        "<" | "<=" | "=" | ">=" | ">" => {
            let rel = match head.as_str() {
                "<" => Rel::Lt,
                "<=" => Rel::Le,
                "=" => Rel::Eq,
                ">=" => Rel::Ge,
                _ => Rel::Gt,
            };
            let clock = tokens.get(*pos)?.clone();
            *pos += 1;
            let constant: Rational = tokens.get(*pos)?.parse().ok()?;
            *pos += 1;
            ClockConstraint::Atom { clock, rel, constant }
        }
        _ => return None,
    };
    if tokens.get(*pos)? != ")" {
        return None;
    }
    *pos += 1;
    Some(result)
}

impl Serialize for ClockConstraint {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for ClockConstraint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        ClockConstraint::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Total map from clock ids to nonnegative rational values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockValuation {
    values: BTreeMap<String, Rational>,
}

impl ClockValuation {
    /// All clocks set to zero.
    pub fn zero<'a>(clocks: impl IntoIterator<Item = &'a String>) -> Self {
        ClockValuation {
            values: clocks.into_iter().map(|c| (c.clone(), Rational::zero())).collect(),
        }
    }

    pub fn get(&self, clock: &str) -> Option<&Rational> {
        self.values.get(clock)
    }

    pub fn set(&mut self, clock: &str, value: Rational) {
        self.values.insert(clock.to_string(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.values.iter()
    }

    /// Advance every clock by `delta`.
    pub fn elapse(&self, delta: &Rational) -> Self {
        ClockValuation {
            values: self.values.iter().map(|(c, v)| (c.clone(), v + delta)).collect(),
        }
    }

    /// Reset the given clocks to zero.
    pub fn reset<'a>(&self, clocks: impl IntoIterator<Item = &'a String>) -> Self {
        let mut out = self.clone();
        for c in clocks {
            out.values.insert(c.clone(), Rational::zero());
        }
        out
    }

    /// Truth of a clock constraint under this valuation.
    pub fn eval_constraint(&self, psi: &ClockConstraint) -> Result<bool, ConstraintError> {
        match psi {
            ClockConstraint::True => Ok(true),
            ClockConstraint::Atom { clock, rel, constant } => {
                let v = self
                    .values
                    .get(clock)
                    .ok_or_else(|| ConstraintError::UnknownClock(clock.clone()))?;
                Ok(rel.eval(v, constant))
            }
            ClockConstraint::And(a, b) => {
                Ok(self.eval_constraint(a)? && self.eval_constraint(b)?)
            }
            ClockConstraint::Or(a, b) => Ok(self.eval_constraint(a)? || self.eval_constraint(b)?),
        }
    }
}

/// Least common multiple of the denominators of `constants`, together with
/// the (now integral) scaled values. Applied uniformly to automata constants,
/// formula interval endpoints, and the horizon before MSO emission.
pub fn scale_to_integers<'a>(
    constants: impl IntoIterator<Item = &'a Rational>,
) -> (BigInt, BTreeSet<BigInt>) {
    let mut factor = BigInt::one();
    let consts: Vec<&Rational> = constants.into_iter().collect();
    for c in &consts {
        factor = factor.lcm(&c.denominator());
    }
    let scaled = consts
        .iter()
        .map(|c| {
            let v = &c.numerator() * &factor / c.denominator();
            v
        })
        .collect();
    (factor, scaled)
}
