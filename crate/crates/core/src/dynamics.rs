//! Dynamical entropy of a partition under a transformation.
//!
//! `H_n(A, τ)` is the least entropy of a common refinement of
//! `A, τA, ..., τ^{n-1}A`. The sequence is subadditive, so `H_n / n`
//! converges to its infimum; the running infimum is therefore reported as
//! the estimate of `h(A, τ)`, and it is always an upper bound.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mv::{same_space, DynamicalSystem, FiniteSpace, MvElement, Transformation};
use crate::partition::{entropy_of_masses, h_parallel, product_refine, tau_partition, LogBase, Partition};
use crate::refine::{min_entropy_refinement, Certificate, RefinementSolution, SolverConfig};
use crate::scalar::Scalar;

/// Slack for the subadditivity and comparison checks.
pub const CHECK_SLACK: f64 = 1e-9;

/// `H_{n+m} > H_n + H_m` observed for an entry produced by the heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubadditivityGap {
    pub n: usize,
    pub m: usize,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropySequence {
    /// `H_1, ..., H_N`.
    pub values: Vec<f64>,
    /// `H_n / n`.
    pub per_step: Vec<f64>,
    /// `min_{k <= n} H_k / k`.
    pub running_inf: Vec<f64>,
    pub certificates: Vec<Certificate>,
    /// Subadditivity violations involving heuristic entries.
    pub gaps: Vec<SubadditivityGap>,
    pub base: LogBase,
}

impl EntropySequence {
    /// Assembles the sequence and checks subadditivity. A violation among
    /// exact entries is an error; one involving a heuristic entry is kept as
    /// a diagnostic.
    pub fn new(values: Vec<f64>, certificates: Vec<Certificate>, base: LogBase) -> Result<Self> {
        if values.len() != certificates.len() {
            return Err(Error::InvalidArgument("one certificate per value is required".into()));
        }
        let per_step: Vec<f64> = values.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
        let running_inf = running_minimum(&per_step);
        let mut gaps = Vec::new();
        let len = values.len();
        for n in 1..=len {
            for m in n..=len - n {
                let excess = values[n + m - 1] - values[n - 1] - values[m - 1];
                if excess <= CHECK_SLACK {
                    continue;
                }
                let all_exact = [n, m, n + m].iter().all(|&k| certificates[k - 1].is_exact());
                if all_exact {
                    return Err(Error::InvariantViolation(format!(
                        "H_{} exceeds H_{n} + H_{m} by {excess:e}",
                        n + m
                    )));
                }
                gaps.push(SubadditivityGap { n, m, excess });
            }
        }
        Ok(EntropySequence {
            values,
            per_step,
            running_inf,
            certificates,
            gaps,
            base,
        })
    }

    /// Upper bound on `h(A, τ)`: the last running infimum.
    pub fn estimate(&self) -> f64 {
        self.running_inf.last().copied().unwrap_or(0.0)
    }

    /// The last two values agree.
    pub fn is_stabilized(&self) -> bool {
        match self.values.as_slice() {
            [.., a, b] => (a - b).abs() <= 1e-12,
            _ => false,
        }
    }
}

fn running_minimum(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::INFINITY, |acc, &v| {
            *acc = acc.min(v);
            Some(*acc)
        })
        .collect()
}

/// `A, τA, ..., τ^{n-1}A`.
pub fn refinement_axes<S: Scalar>(sys: &DynamicalSystem<S>, a: &Partition<S>, n: usize) -> Result<Vec<Partition<S>>> {
    if !same_space(sys.space(), a.space()) {
        return Err(Error::SpaceMismatch);
    }
    (0..n).map(|i| tau_partition(&sys.tau().power(i), a)).collect()
}

/// `H_n(A, τ)` with the minimizing refinement.
pub fn h_n<S: Scalar>(
    sys: &DynamicalSystem<S>,
    a: &Partition<S>,
    n: usize,
    base: LogBase,
    config: &SolverConfig,
) -> Result<RefinementSolution<S>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let axes = refinement_axes(sys, a, n)?;
    min_entropy_refinement(&axes, sys.state(), base, config)
}

/// `H_1, ..., H_{n_max}`, computed concurrently.
pub fn entropy_sequence<S: Scalar>(
    sys: &DynamicalSystem<S>,
    a: &Partition<S>,
    n_max: usize,
    base: LogBase,
    config: &SolverConfig,
) -> Result<EntropySequence> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let solve = |n: usize| h_n(sys, a, n, base, config).map(|s| (s.entropy.value, s.certificate));
    let solved: Vec<(f64, Certificate)> = if config.parallel {
        (1..=n_max).into_par_iter().map(solve).collect::<Result<_>>()?
    } else {
        (1..=n_max).map(solve).collect::<Result<_>>()?
    };
    let (values, certificates) = solved.into_iter().unzip();
    EntropySequence::new(values, certificates, base)
}

/// Estimate of `h(A, τ)` (running infimum of `H_n / n` at `n_max`).
pub fn h_of_partition<S: Scalar>(
    sys: &DynamicalSystem<S>,
    a: &Partition<S>,
    n_max: usize,
    base: LogBase,
    config: &SolverConfig,
) -> Result<(f64, EntropySequence)> {
    let seq = entropy_sequence(sys, a, n_max, base, config)?;
    Ok((seq.estimate(), seq))
}

/// Largest estimate over a library of partitions: a lower bound on the
/// supremum over all partitions (each term is itself an upper-bound
/// estimate of its own limit).
pub fn h_of_system<S: Scalar>(
    sys: &DynamicalSystem<S>,
    library: &[Partition<S>],
    n_max: usize,
    base: LogBase,
    config: &SolverConfig,
) -> Result<f64> {
    if library.is_empty() {
        return Err(Error::InvalidArgument("partition library is empty".into()));
    }
    library.iter().try_fold(0.0f64, |best, a| {
        h_of_partition(sys, a, n_max, base, config).map(|(h, _)| best.max(h))
    })
}

/// Entropies of the product joins `A ∨ τA ∨ ... ∨ τ^{n-1}A`.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinSequence {
    pub values: Vec<f64>,
    pub per_step: Vec<f64>,
    pub running_inf: Vec<f64>,
    pub base: LogBase,
}

/// Entropy of the `n`-fold product join.
pub fn join_entropy<S: Scalar>(sys: &DynamicalSystem<S>, a: &Partition<S>, n: usize, base: LogBase) -> Result<f64> {
    let axes = refinement_axes(sys, a, n)?;
    Ok(product_refine(&axes)?.entropy(sys.state(), base)?.value)
}

/// The product-join entropy rate: returns `H(join_N) / N` and the sequence.
pub fn join_entropy_rate<S: Scalar>(
    sys: &DynamicalSystem<S>,
    a: &Partition<S>,
    n_max: usize,
    base: LogBase,
) -> Result<(f64, JoinSequence)> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let values = (1..=n_max)
        .map(|n| join_entropy(sys, a, n, base))
        .collect::<Result<Vec<_>>>()?;
    let per_step: Vec<f64> = values.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
    let running_inf = running_minimum(&per_step);
    let estimate = *per_step.last().expect("n_max >= 1");
    Ok((
        estimate,
        JoinSequence {
            values,
            per_step,
            running_inf,
            base,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoinContrast {
    /// `H_n(A, τ)`.
    pub infimum: f64,
    /// Entropy of the product join.
    pub join: f64,
    /// `infimum <= join` up to [`CHECK_SLACK`].
    pub holds: bool,
}

/// Compares `H_n` with the entropy of the product join, which is one of the
/// refinements the infimum ranges over.
pub fn infimum_vs_join<S: Scalar>(
    sys: &DynamicalSystem<S>,
    a: &Partition<S>,
    n: usize,
    base: LogBase,
    config: &SolverConfig,
) -> Result<JoinContrast> {
    let infimum = h_n(sys, a, n, base, config)?.entropy.value;
    let join = join_entropy(sys, a, n, base)?;
    Ok(JoinContrast {
        infimum,
        join,
        holds: infimum <= join + CHECK_SLACK,
    })
}

/// Kolmogorov-Sinai join entropy `H(A ∨ T^{-1}A ∨ ... ∨ T^{-(n-1)}A)` of a
/// crisp partition, computed with set intersections only.
pub fn classical_ks_oracle<S: Scalar>(
    space: &Arc<FiniteSpace<S>>,
    map: &[usize],
    partition: &Partition<S>,
    n: usize,
    base: LogBase,
) -> Result<f64> {
    if !same_space(space, partition.space()) {
        return Err(Error::SpaceMismatch);
    }
    if !partition.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    Transformation::new(space, map.to_vec())?;
    let tol = space.tolerance();
    let blocks: Vec<BTreeSet<usize>> = partition
        .elements()
        .iter()
        .map(|e| (0..space.len()).filter(|&p| e.value(p).is_positive(tol)).collect())
        .collect();

    let mut atoms: Vec<BTreeSet<usize>> = vec![(0..space.len()).collect()];
    let mut iterate: Vec<usize> = (0..space.len()).collect();
    for _ in 0..n {
        let preimages: Vec<BTreeSet<usize>> = blocks
            .iter()
            .map(|b| (0..space.len()).filter(|&p| b.contains(&iterate[p])).collect())
            .collect();
        atoms = atoms
            .iter()
            .flat_map(|atom| preimages.iter().map(move |pre| atom & pre))
            .filter(|s| !s.is_empty())
            .collect();
        iterate = iterate.iter().map(|&p| map[p]).collect();
    }
    let masses = atoms.iter().map(|atom| {
        atom.iter()
            .fold(S::zero(), |acc, &p| acc + space.weight(p).clone())
            .to_f64()
    });
    Ok(entropy_of_masses(masses, base))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalBound {
    /// Estimate of `h(B, τ)`.
    pub lhs: f64,
    /// Estimate of `h(A, τ)` plus `H(B‖A)`.
    pub rhs: f64,
    pub h_parallel: f64,
    /// `lhs <= rhs` up to [`CHECK_SLACK`].
    pub holds: bool,
    /// Both `H_n` sequences were constant over their last two terms.
    pub stabilized: bool,
}

/// Checks `h(B, τ) <= h(A, τ) + H(B‖A)` for a crisp `A` on finite-horizon
/// estimates.
pub fn conditional_bound_check<S: Scalar>(
    sys: &DynamicalSystem<S>,
    a: &Partition<S>,
    b: &Partition<S>,
    n_max: usize,
    base: LogBase,
    config: &SolverConfig,
) -> Result<ConditionalBound> {
    if !a.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    let (h_b, seq_b) = h_of_partition(sys, b, n_max, base, config)?;
    let (h_a, seq_a) = h_of_partition(sys, a, n_max, base, config)?;
    let hp = h_parallel(b, a, sys.state(), base)?.value;
    let rhs = h_a + hp;
    Ok(ConditionalBound {
        lhs: h_b,
        rhs,
        h_parallel: hp,
        holds: h_b <= rhs + CHECK_SLACK,
        stabilized: seq_a.is_stabilized() && seq_b.is_stabilized(),
    })
}

/// A point bijection `σ` between two systems; it induces the element map
/// `ψ(f) = f ∘ σ^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsomorphismMap {
    forward: Vec<usize>,
}

impl IsomorphismMap {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; forward.len()];
        for (p, &q) in forward.iter().enumerate() {
            if q >= forward.len() || std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidIsomorphism(format!(
                    "point {p} maps to {q}, which is out of range or already taken"
                )));
            }
        }
        Ok(IsomorphismMap { forward })
    }

    pub fn identity(n: usize) -> Self {
        IsomorphismMap {
            forward: (0..n).collect(),
        }
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Self {
        let mut backward = vec![0; self.forward.len()];
        for (p, &q) in self.forward.iter().enumerate() {
            backward[q] = p;
        }
        IsomorphismMap { forward: backward }
    }

    /// Checks weight preservation and `T_2 ∘ σ = σ ∘ T_1`.
    pub fn validate<S: Scalar>(&self, from: &DynamicalSystem<S>, to: &DynamicalSystem<S>) -> Result<()> {
        let (n1, n2) = (from.space().len(), to.space().len());
        if self.forward.len() != n1 || n1 != n2 {
            return Err(Error::InvalidIsomorphism(format!(
                "bijection has {} entries for spaces of sizes {n1} and {n2}",
                self.forward.len()
            )));
        }
        let tol = from.space().tolerance().max(to.space().tolerance());
        for (p, &q) in self.forward.iter().enumerate() {
            let (w1, w2) = (from.space().weight(p), to.space().weight(q));
            if !w1.approx_eq(w2, tol) {
                return Err(Error::InvalidIsomorphism(format!(
                    "point {p} has weight {} but its image {q} has weight {}",
                    w1.render(),
                    w2.render()
                )));
            }
            let lhs = to.tau().map()[q];
            let rhs = self.forward[from.tau().map()[p]];
            if lhs != rhs {
                return Err(Error::InvalidIsomorphism(format!(
                    "map does not commute at point {p}: T2(σ({p})) = {lhs}, σ(T1({p})) = {rhs}"
                )));
            }
        }
        Ok(())
    }
}

/// The system relabeled by `σ`: point `σ(p)` carries the label and weight
/// of `p`, and the map becomes `σ T σ^{-1}`.
pub fn transport_system<S: Scalar>(sys: &DynamicalSystem<S>, iso: &IsomorphismMap) -> Result<DynamicalSystem<S>> {
    let space = sys.space();
    let n = space.len();
    if iso.forward.len() != n {
        return Err(Error::InvalidIsomorphism(format!(
            "bijection has {} entries for a space of size {n}",
            iso.forward.len()
        )));
    }
    let back = iso.inverse();
    let ids = (0..n).map(|q| space.ids()[back.forward[q]].clone()).collect();
    let weights = (0..n).map(|q| space.weight(back.forward[q]).clone()).collect();
    let target = FiniteSpace::with_tolerance(ids, weights, space.tolerance().max(f64::MIN_POSITIVE))?;
    let map = (0..n).map(|q| iso.forward[sys.tau().map()[back.forward[q]]]).collect();
    let out = DynamicalSystem::new(&target, map)?;
    iso.validate(sys, &out)?;
    Ok(out)
}

/// `ψ(A) = {a_i ∘ σ^{-1}}` on the target space.
pub fn transport_partition<S: Scalar>(
    a: &Partition<S>,
    iso: &IsomorphismMap,
    target: &Arc<FiniteSpace<S>>,
) -> Result<Partition<S>> {
    let n = a.space().len();
    if iso.forward.len() != n || target.len() != n {
        return Err(Error::InvalidIsomorphism(
            "bijection size does not match the spaces".into(),
        ));
    }
    let back = iso.inverse();
    let elements = a
        .elements()
        .iter()
        .map(|e| MvElement::new(target, (0..n).map(|q| e.value(back.forward[q]).clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(elements)
}
