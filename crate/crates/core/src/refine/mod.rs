//! Minimum-entropy common refinements.
//!
//! The entropy `Σ_cells φ(m(c))` is concave in the cell masses, and the
//! masses are linear in the per-point tensor entries, so the minimum over
//! the (product of per-point) transportation polytopes sits at a tuple of
//! local vertices. Exact mode enumerates those tuples; heuristic mode runs a
//! local search and reports the gap to a certified lower bound.

mod exact;
mod heuristic;
mod local;
pub mod oracle;

use std::fmt;

pub use local::{enumerate_local_vertices, enumerate_local_vertices_bounded, LocalPolytope, DEFAULT_MAX_BASES};
pub use oracle::brute_force_oracle;

use crate::error::{Error, Result};
use crate::mv::{same_space, State};
use crate::partition::{entropy, product_refine, EntropyValue, LogBase, Partition, RefinementTensor};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    Exact,
    Heuristic,
    /// Exact when it fits the budget and the arithmetic is rational,
    /// heuristic otherwise.
    #[default]
    Auto,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Exact => "exact",
            SolveMode::Heuristic => "heuristic",
            SolveMode::Auto => "auto",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: SolveMode,
    /// Upper bound on the product of axis sizes.
    pub max_cells_per_point: usize,
    /// Upper bound on the number of local-vertex tuples evaluated.
    pub max_combinations: u128,
    /// Upper bound on feasible bases visited per point.
    pub max_bases: usize,
    pub heuristic_iterations: usize,
    /// Random local vertices drawn per point by the heuristic.
    pub heuristic_candidates: usize,
    pub seed: u64,
    /// Evaluate vertex tuples on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolveMode::Auto,
            max_cells_per_point: 4096,
            max_combinations: 4_000_000,
            max_bases: DEFAULT_MAX_BASES,
            heuristic_iterations: 200,
            heuristic_candidates: 24,
            seed: 0,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: SolveMode) -> Self {
        SolverConfig {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    ExactVertexEnumeration,
    Heuristic,
    CrispUnique,
}

impl Certificate {
    pub fn name(self) -> &'static str {
        match self {
            Certificate::ExactVertexEnumeration => "exact-vertex-enumeration",
            Certificate::Heuristic => "heuristic",
            Certificate::CrispUnique => "crisp-unique",
        }
    }

    /// The entropy is the true minimum.
    pub fn is_exact(self) -> bool {
        !matches!(self, Certificate::Heuristic)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct RefinementSolution<S: Scalar> {
    pub tensor: RefinementTensor<S>,
    pub entropy: EntropyValue,
    pub certificate: Certificate,
    /// `entropy - max_t H(parts[t])`; reported for heuristic solutions.
    pub bound_gap: Option<f64>,
}

/// Largest single-axis entropy: a lower bound on the entropy of every common
/// refinement.
pub fn axis_lower_bound<S: Scalar>(parts: &[Partition<S>], state: &State<S>, base: LogBase) -> Result<f64> {
    parts
        .iter()
        .map(|p| entropy(p, state, base).map(|e| e.value))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

/// The minimum of `H(C)` over all common refinements `C` of `parts`.
pub fn min_entropy_refinement<S: Scalar>(
    parts: &[Partition<S>],
    state: &State<S>,
    base: LogBase,
    config: &SolverConfig,
) -> Result<RefinementSolution<S>> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one partition is required".into()))?;
    if parts.iter().any(|p| !same_space(p.space(), first.space())) || !same_space(state.space(), first.space()) {
        return Err(Error::SpaceMismatch);
    }

    if parts.iter().all(Partition::is_idempotent) {
        let tensor = product_refine(parts)?;
        let entropy = tensor.entropy(state, base)?;
        return Ok(RefinementSolution {
            tensor,
            entropy,
            certificate: Certificate::CrispUnique,
            bound_gap: None,
        });
    }

    match config.mode {
        SolveMode::Exact => {
            if !S::EXACT {
                return Err(Error::ExactRequiresRational);
            }
            exact::solve(parts, state, base, config)
        }
        SolveMode::Heuristic => heuristic::solve(parts, state, base, config),
        SolveMode::Auto => {
            if !S::EXACT {
                return heuristic::solve(parts, state, base, config);
            }
            match exact::solve(parts, state, base, config) {
                Err(Error::BudgetExceeded { .. }) => heuristic::solve(parts, state, base, config),
                other => other,
            }
        }
    }
}

/// Per-point tensors (indexed `[point][cell]`) to a validated tensor.
fn assemble<S: Scalar>(parts: &[Partition<S>], per_point: &[Vec<S>]) -> Result<RefinementTensor<S>> {
    let cells = per_point.first().map_or(0, Vec::len);
    let by_cell = (0..cells)
        .map(|c| per_point.iter().map(|x| x[c].clone()).collect())
        .collect();
    RefinementTensor::from_cell_values(parts.to_vec(), by_cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mv::FiniteSpace;
    use crate::scalar::{ratio, Rational};

    fn halves_vs_forty_sixty() -> (State<Rational>, Vec<Partition<Rational>>) {
        let s = FiniteSpace::single_point();
        let a = Partition::from_rows(&s, vec![vec![ratio(1, 2)], vec![ratio(1, 2)]]).unwrap();
        let b = Partition::from_rows(&s, vec![vec![ratio(2, 5)], vec![ratio(3, 5)]]).unwrap();
        (State::new(&s), vec![a, b])
    }

    #[test]
    fn single_partition_is_its_own_refinement() {
        let (m, parts) = halves_vs_forty_sixty();
        let sol = min_entropy_refinement(&parts[..1], &m, LogBase::Natural, &SolverConfig::default()).unwrap();
        assert_eq!(sol.tensor.entries(), parts[0].elements());
        assert_eq!(sol.entropy, entropy(&parts[0], &m, LogBase::Natural).unwrap());
    }

    #[test]
    fn halves_against_two_fifths_minimum_and_tie_break() {
        let (m, parts) = halves_vs_forty_sixty();
        let sol =
            min_entropy_refinement(&parts, &m, LogBase::Natural, &SolverConfig::with_mode(SolveMode::Exact)).unwrap();
        // 1-D grid over the family at step 1e-4 (30 digits): 0.943348392329039...
        assert!((sol.entropy.value - 0.943_348_392_329_039).abs() < 1e-12);
        assert_eq!(sol.certificate, Certificate::ExactVertexEnumeration);
        let masses = sol.tensor.masses(&m).unwrap();
        assert_eq!(masses, vec![ratio(0, 1), ratio(1, 2), ratio(2, 5), ratio(1, 10)]);
    }

    #[test]
    fn crisp_inputs_take_the_unique_refinement() {
        let s = FiniteSpace::<Rational>::uniform(4).unwrap();
        let a = Partition::crisp(&s, &[vec![0, 1], vec![2, 3]]).unwrap();
        let b = Partition::crisp(&s, &[vec![0, 3], vec![1, 2]]).unwrap();
        let sol = min_entropy_refinement(
            &[a.clone(), b.clone()],
            &State::new(&s),
            LogBase::Natural,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(sol.certificate, Certificate::CrispUnique);
        assert_eq!(sol.tensor, product_refine(&[a, b]).unwrap());
        assert!((sol.entropy.value - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_needs_rationals() {
        let s = FiniteSpace::<f64>::single_point();
        let a = Partition::from_rows(&s, vec![vec![0.5], vec![0.5]]).unwrap();
        let b = Partition::from_rows(&s, vec![vec![0.4], vec![0.6]]).unwrap();
        let m = State::new(&s);
        let err = min_entropy_refinement(
            &[a.clone(), b.clone()],
            &m,
            LogBase::Natural,
            &SolverConfig::with_mode(SolveMode::Exact),
        );
        assert_eq!(err.unwrap_err(), Error::ExactRequiresRational);
        let sol = min_entropy_refinement(&[a, b], &m, LogBase::Natural, &SolverConfig::default()).unwrap();
        assert_eq!(sol.certificate, Certificate::Heuristic);
        assert!((sol.entropy.value - 0.943_348_392_329_039).abs() < 1e-9);
    }

    #[test]
    fn budget_errors_and_auto_fallback() {
        let (m, parts) = halves_vs_forty_sixty();
        let tight = SolverConfig {
            mode: SolveMode::Exact,
            max_combinations: 1,
            ..SolverConfig::default()
        };
        assert!(matches!(
            min_entropy_refinement(&parts, &m, LogBase::Natural, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
        let auto = SolverConfig {
            mode: SolveMode::Auto,
            ..tight
        };
        let sol = min_entropy_refinement(&parts, &m, LogBase::Natural, &auto).unwrap();
        assert_eq!(sol.certificate, Certificate::Heuristic);
        assert!(sol.bound_gap.unwrap() >= 0.0);
    }
}
