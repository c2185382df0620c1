//! Finite-model checking for two axiomatizations of classical mereology: one
//! taking fusion as primitive, one taking parthood as primitive.
//!
//! Structures are small (at most [`structures::DOMAIN_LIMIT`] individuals) and
//! pluralities are bitmasks, so every quantifier is decided by enumeration.

pub mod export;
pub mod native;
pub mod search;
pub mod semantics;
pub mod structures;
pub mod syntax;
pub mod theory;

pub use semantics::{check_sentence, Assignment, EvalError, EvalOutcome, Program};
pub use structures::{
    canonical_gem, induced_fusion, induced_part, FusionStructure, Interpretation, Kind, PartStructure, Plurality,
    Structure, StructureError,
};
pub use syntax::{parse, Formula, NamedFormula, ParseError, Term};
pub use theory::{Lemma, Theory, TheoryError};
