//! Deep-inference proof toolkit.
//!
//! Implements the calculus-of-structures systems SKSg, SKS and KS for
//! classical propositional logic and LBV for multiplicative linear logic,
//! side by side with the shallow systems LKp (two-sided sequents) and
//! MLL+mix (one-sided). On top of the checkers sit the constructive proof
//! transformations: Gentzen cut elimination for LKp with its
//! hyperexponential bound, atomization and cut elimination for SKS,
//! splitting and cut elimination for LBV, the LBV/MLL translations, and the
//! rewriting reading of LBV with merge sets. Bounded backward proof search
//! doubles as the independent oracle for all of it.

pub mod context;
pub mod derivation;
pub mod error;
pub mod lbv;
pub mod lkp;
pub mod parse;
pub mod rewrite;
pub mod rules;
pub mod search;
pub mod sks;
pub mod syntax;

pub mod cli;

pub use error::Error;
