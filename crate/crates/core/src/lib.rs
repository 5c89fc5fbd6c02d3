//! Exact extension of pseudonorms from a subgroup to a finite abelian group.
//!
//! The pipeline is:
//!
//! 1. [`group`] models `Z_{n_1} ⊕ … ⊕ Z_{n_r}`, its subgroups, quotients with
//!    an `F_p` basis, and homomorphisms.
//! 2. [`pseudonorm`] stores a pseudonorm as an exact value table and checks
//!    the axioms `|0| = 0`, `|x - y| <= |x| + |y|`.
//! 3. [`transversal`] builds transversals of two disjoint uniform collections
//!    through a doubly stochastic intersection matrix and its Birkhoff
//!    decomposition.
//! 4. [`extend`] evaluates the representation infimum `rho` with min-cost
//!    matchings, extends across a prime-index step and chains those steps.
//! 5. [`lattice`] runs the same construction on `Z^n ⊂ (1/m)Z^n`.
//! 6. [`winding`] reproduces the winding norms on `R` whose halving map is
//!    discontinuous.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below pick the
//! concrete types used by the command line tool and the test sweeps.

pub mod corpus;
pub mod error;
pub mod extend;
pub mod group;
pub mod io;
pub mod lattice;
pub mod matching;
pub mod pseudonorm;
pub mod scalar;
pub mod transversal;
pub mod winding;

pub use error::{Error, Result};
pub use extend::{
    build_chain, chain_extend, prime_step_extend, ChainExtension, ChainPlan, ExtendedNorm,
    ExtensionProblem, Representation, RhoEvaluator,
};
pub use group::{Element, FiniteAbelianGroup, Homomorphism, QuotientStructure, Subgroup};
pub use lattice::{lattice_extend, LatticeBase, LatticeExtension, LatticeGroup, LatticePoint};
pub use pseudonorm::{Pseudonorm, ValidationReport};
pub use scalar::Scalar;
pub use transversal::{BirkhoffDecomposition, DoublyStochasticMatrix, UniformCollection};

/// Arbitrary precision rational; the default exact scalar.
pub type Rational = num_rational::BigRational;
/// Machine-word rational. Faster, relies on overflow checks for safety.
pub type Rational64 = num_rational::Rational64;

pub type ExactPseudonorm = Pseudonorm<Rational>;
pub type ExactExtendedNorm = ExtendedNorm<Rational>;
pub type ExactDoublyStochasticMatrix = DoublyStochasticMatrix<Rational>;
pub type ExactBirkhoffDecomposition = BirkhoffDecomposition<Rational>;
pub type WindingNorm64 = winding::WindingNorm<f64>;
