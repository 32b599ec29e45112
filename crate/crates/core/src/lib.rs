//! Thorn-forking independence over decidable theories.
//!
//! The crate evaluates strong dividing, þ-dividing, þ-forking, local
//! þ-ranks and Uþ-ranks exactly over three theories with quantifier
//! elimination: pure equality, the dense linear order, and an equivalence
//! relation with infinitely many infinite classes. Positive answers come
//! with certificates that can be checked again independently.

pub mod error;
pub mod definable;
pub mod forking;
pub mod formula;
pub mod oracles;
pub mod rank;
pub mod report;
pub mod suites;
pub mod theory;

pub use error::{Error, Result};
pub use formula::{Atom, Elem, Formula, Signature, Sort, Term, Var};
pub use theory::{SolutionCount, Theory, TypeDesc};
