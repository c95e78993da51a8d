//! Entropy of MV-algebra dynamical systems on finite probability spaces.
//!
//! Elements of the tribe are `[0, 1]`-valued functions on a finite space,
//! the state is integration against the point weights, and a transformation
//! acts by composition with a measure-preserving point map. On top of that
//! the crate computes partition entropies, minimum-entropy common
//! refinements, and the dynamical entropy `h(A, τ)`.
//!
//! Every numeric type is generic over [`Scalar`]: exact rationals or `f64`.

pub mod dynamics;
pub mod error;
pub mod mv;
pub mod partition;
pub mod refine;
pub mod scalar;

pub use dynamics::{
    classical_ks_oracle, conditional_bound_check, entropy_sequence, h_n, h_of_partition, h_of_system, infimum_vs_join,
    join_entropy, join_entropy_rate, refinement_axes, transport_partition, transport_system, ConditionalBound,
    EntropySequence, IsomorphismMap, JoinContrast, JoinSequence,
};
pub use error::{Error, Result};
pub use mv::{riesz_decompose, DynamicalSystem, FiniteSpace, MvElement, State, Transformation};
pub use partition::{
    conditional_entropy, entropy, entropy_of_masses, h_parallel, phi, product_refine, refine_lemma1, tau_partition,
    EntropyValue, LogBase, Partition, RefinementTensor,
};
pub use refine::{
    brute_force_oracle, min_entropy_refinement, Certificate, RefinementSolution, SolveMode, SolverConfig,
};
pub use scalar::{parse_rational, ratio, NumericMode, Rational, Scalar};
