//! Satisfiability procedures for monotone hybrid logic with `<>`, `[]`,
//! `down` and `@` over linear orders and over the natural numbers.

pub mod deciders;
pub mod fol;
pub mod formula;
pub mod kripke;
pub mod reductions;

pub use deciders::{decide, Frame, Verdict};
pub use formula::{parse, Formula};
