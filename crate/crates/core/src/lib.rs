//! Desk-scale laboratory for finite symmetry arithmetic.
//!
//! Everything in this crate works with *explicit finite objects*: groups are
//! dense multiplication tables, actions are tables, cohomology sets are
//! enumerated element by element, and every structural theorem the crate
//! exposes is re-checked exhaustively by an independent brute-force pass at
//! the scale where that is feasible. The point is not speed; it is that each
//! claim ("these orbits biject with this kernel", "this pipeline preserves
//! isomorphism classes") is *certified* on concrete instances.
//!
//! Module map:
//!
//! * [`group`] — finite groups as multiplication tables, subgroups,
//!   homomorphisms, quotients, actions, and catalog constructors.
//! * [`gl`] — small finite fields and matrix groups `GL_n(F)` carrying a
//!   Frobenius symmetry.
//! * [`cohomology`] — 1-cocycles, coboundaries, and first cohomology of a
//!   finite group acting on a finite (possibly non-abelian) group, with
//!   inflation, induced maps, cocycle factoring, and coprime splitting.
//! * [`descent`] — homogeneous spaces with compatible symmetry, rational
//!   points, and the orbit/kernel correspondence.
//! * [`groupoid`] — connected groupoids with a symmetry action, isomorphism
//!   classes at each rationality level, quotients, torsor averaging, and the
//!   three-step reduction pipeline with certificates.
//! * [`codings`] — codes for twisted powers, rectangular decompositions of
//!   binary relations, ranking codes, and stabilizer codes.
//! * [`sorts`] — orbit sorts of an ambient action, their invariant-map
//!   algebras, and the Galois-group comparison.
//! * [`kummer`] — exact cyclotomic arithmetic, Puiseux monomial fragments,
//!   ramification towers, and the Kummer pairing certificate.
//! * [`catalog`] — deterministic instance families used by the self-test
//!   suites and the seeded generators.
//! * [`io`] — plain-text instance file formats shared with the CLI.
//! * [`acceptance`] — the self-test suites run by `finimag selftest`.
//!
//! All enumeration orders are deterministic (indices ascending, maps in
//! lexicographic order), so reports are byte-stable across runs.

pub mod codings;
pub mod cohomology;
pub mod descent;
pub mod gl;
pub mod group;
pub mod groupoid;
pub mod io;

use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// The CLI maps these onto exit codes: `Parse` is an input error,
/// `Budget` a resource error, and `Check` a falsified certificate; all
/// remaining variants are rejected inputs (bad tables, guard violations,
/// unmet hypotheses).
#[derive(Debug, Error)]
pub enum Error {
    /// A table failed the group laws, or indices were out of range.
    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    /// A morphism table failed the groupoid laws (typing, identities,
    /// associativity, inverses, connectedness, or symmetry coherence).
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),

    /// A member list is not closed under the parent's operations.
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    /// A quotient was requested by a non-normal subgroup. The witness is a
    /// conjugating element and a member whose conjugate escapes.
    #[error("subgroup not normal: conjugation by {conjugator} moves member {member} outside")]
    NotNormal { conjugator: usize, member: usize },

    /// A documented size guard was exceeded.
    #[error("size guard: {0}")]
    Guard(String),

    /// An enumeration would exceed the configured work budget.
    #[error("enumeration budget exceeded: would need about {needed} steps, budget is {budget}")]
    Budget { needed: u128, budget: u64 },

    /// A stated hypothesis of the operation does not hold for the input.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// An instance file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A certificate check failed. Seeing this on honest input would
    /// falsify one of the structure theorems the crate verifies.
    #[error("certificate check failed: {0}")]
    Check(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Work budget for the exhaustive enumerations.
///
/// A "step" is one candidate considered by an enumeration loop (one cocycle
/// candidate, one witness trial, and so on). Operations estimate their step
/// count up front and refuse to start when the estimate exceeds the budget,
/// so a typo'd instance fails fast instead of spinning.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        // Comfortable for every documented instance family; a few seconds
        // of table lookups at the very largest.
        Budget { steps: 50_000_000 }
    }
}

impl Budget {
    pub fn new(steps: u64) -> Self {
        Budget { steps }
    }

    /// Checks an up-front estimate against the budget.
    pub fn admit(&self, needed: u128) -> Result<()> {
        if needed > self.steps as u128 {
            Err(Error::Budget { needed, budget: self.steps })
        } else {
            Ok(())
        }
    }
}
