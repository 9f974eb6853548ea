//! Verification toolkit for a branching-time hyper metric temporal logic
//! interpreted over timed automata.
//!
//! The pipeline has three legs that can be cross-checked against each other:
//!
//! * direct semantic evaluation of formulas over concrete path environments
//!   ([`semantics`]), exact over the continuum via critical-point analysis;
//! * a compilation of automata and formulas into monadic second-order logic
//!   over flows ([`mso`]), together with an evaluator for that logic;
//! * a grid-bounded verification engine ([`engine`]) that enumerates
//!   executions with endpoints on a rational grid and produces replayable
//!   verdicts.
//!
//! All time arithmetic is exact rational arithmetic ([`timecore`]); there is
//! no floating point anywhere in the toolkit.

pub mod automaton;
pub mod engine;
pub mod formula;
pub mod mso;
pub mod pointwise;
pub mod semantics;
pub mod timecore;
