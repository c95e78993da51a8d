//! Local search for low-entropy refinements when exact enumeration is out of
//! budget or the arithmetic is floating point.
//!
//! Starts from the better of the chained constructive refinement and the
//! product refinement, then alternates two moves until neither improves:
//! replacing one point's local tensor by a greedy local vertex, and shifting
//! mass along an exchange direction between two support cells (which keeps
//! every marginal fixed). Along such a direction the objective is concave,
//! so only the far endpoint is probed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::local::LocalPolytope;
use super::{assemble, axis_lower_bound, Certificate, RefinementSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::mv::State;
use crate::partition::{
    cell_count, flatten, phi_clamped, product_refine, refine_lemma1, unflatten, LogBase, Partition, RefinementTensor,
};
use crate::scalar::Scalar;

/// Exchange probes tried per point per sweep.
const PROBES_PER_POINT: usize = 2048;
const IMPROVEMENT: f64 = 1e-13;

pub(super) fn solve<S: Scalar>(
    parts: &[Partition<S>],
    state: &State<S>,
    base: LogBase,
    config: &SolverConfig,
) -> Result<RefinementSolution<S>> {
    let space = parts[0].space();
    let tol = space.tolerance();
    let shape: Vec<usize> = parts.iter().map(Partition::len).collect();
    let cells = cell_count(&shape);
    if cells > config.max_cells_per_point {
        return Err(Error::BudgetExceeded {
            what: "cells per point",
            required: cells as u128,
            budget: config.max_cells_per_point as u128,
        });
    }
    let weights: Vec<f64> = space.weights().iter().map(Scalar::to_f64).collect();

    let chained = per_point(&constructive_chain(parts)?);
    let product = per_point(&product_refine(parts)?);
    let mut search = LocalSearch::new(&weights, cells, base, chained);
    let product_h = LocalSearch::new(&weights, cells, base, product.clone()).value;
    if product_h < search.value {
        search = LocalSearch::new(&weights, cells, base, product);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pools: Vec<Vec<Vec<S>>> = (0..space.len())
        .map(|point| {
            if weights[point] == 0.0 {
                return Vec::new();
            }
            let lp = LocalPolytope::at_point(parts, point);
            let (active_cells, _, _) = lp.reduced_cells(tol);
            let mut order: Vec<usize> = (0..active_cells.len()).collect();
            let mut pool = vec![lp.greedy_vertex(None, tol)];
            for _ in 0..config.heuristic_candidates {
                order.shuffle(&mut rng);
                let v = lp.greedy_vertex(Some(&order), tol);
                if !pool.contains(&v) {
                    pool.push(v);
                }
            }
            pool
        })
        .collect();

    for _ in 0..config.heuristic_iterations {
        let mut improved = false;
        for (point, pool) in pools.iter().enumerate() {
            let mut best: Option<(f64, usize)> = None;
            for (i, candidate) in pool.iter().enumerate() {
                let h = search.value_with(point, candidate);
                if h < best.map_or(search.value - IMPROVEMENT, |(bh, _)| bh) {
                    best = Some((h, i));
                }
            }
            if let Some((_, i)) = best {
                search.replace(point, pool[i].clone());
                improved = true;
            }
        }
        for point in 0..space.len() {
            if weights[point] > 0.0 && exchange_sweep(&mut search, point, &shape, tol, &mut rng) {
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }

    let tensor = assemble(parts, &search.tensors)?;
    let entropy = tensor.entropy(state, base)?;
    let lower = axis_lower_bound(parts, state, base)?;
    Ok(RefinementSolution {
        tensor,
        entropy,
        certificate: Certificate::Heuristic,
        bound_gap: Some((entropy.value - lower).max(0.0)),
    })
}

/// Refines axis by axis with the constructive two-partition refinement,
/// treating the cells built so far as one flat partition.
fn constructive_chain<S: Scalar>(parts: &[Partition<S>]) -> Result<RefinementTensor<S>> {
    let mut flat = parts[0].clone();
    for p in &parts[1..] {
        flat = refine_lemma1(&flat, p)?.as_partition();
    }
    RefinementTensor::new(parts.to_vec(), flat.elements().to_vec())
}

fn per_point<S: Scalar>(tensor: &RefinementTensor<S>) -> Vec<Vec<S>> {
    (0..tensor.space().len())
        .map(|p| tensor.entries().iter().map(|e| e.value(p).clone()).collect())
        .collect()
}

struct LocalSearch<'a, S> {
    weights: &'a [f64],
    base: LogBase,
    tensors: Vec<Vec<S>>,
    masses: Vec<f64>,
    value: f64,
    scratch: Vec<f64>,
}

impl<'a, S: Scalar> LocalSearch<'a, S> {
    fn new(weights: &'a [f64], cells: usize, base: LogBase, tensors: Vec<Vec<S>>) -> Self {
        let mut masses = vec![0.0; cells];
        for (x, &w) in tensors.iter().zip(weights) {
            for (m, v) in masses.iter_mut().zip(x) {
                *m += w * v.to_f64();
            }
        }
        let value = masses.iter().map(|&m| phi_clamped(m, base)).sum();
        LocalSearch {
            weights,
            base,
            tensors,
            masses,
            value,
            scratch: Vec::with_capacity(cells),
        }
    }

    fn value_with(&mut self, point: usize, candidate: &[S]) -> f64 {
        let w = self.weights[point];
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.masses);
        for (c, (new, old)) in candidate.iter().zip(&self.tensors[point]).enumerate() {
            if new != old {
                self.scratch[c] += w * (new.to_f64() - old.to_f64());
            }
        }
        self.scratch.iter().map(|&m| phi_clamped(m, self.base)).sum()
    }

    fn replace(&mut self, point: usize, candidate: Vec<S>) {
        let w = self.weights[point];
        for (c, (new, old)) in candidate.iter().zip(&self.tensors[point]).enumerate() {
            if new != old {
                self.masses[c] += w * (new.to_f64() - old.to_f64());
            }
        }
        self.tensors[point] = candidate;
        self.value = self.masses.iter().map(|&m| phi_clamped(m, self.base)).sum();
    }
}

/// Tries exchange moves at one point; returns whether any was accepted.
fn exchange_sweep<S: Scalar, R: rand::Rng>(
    search: &mut LocalSearch<'_, S>,
    point: usize,
    shape: &[usize],
    tol: f64,
    rng: &mut R,
) -> bool {
    let axes = shape.len();
    if axes < 2 {
        return false;
    }
    let support: Vec<usize> = (0..search.tensors[point].len())
        .filter(|&c| search.tensors[point][c].is_positive(tol))
        .collect();
    let mut pairs: Vec<(usize, usize)> = support
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| support[i + 1..].iter().map(move |&y| (x, y)))
        .collect();
    pairs.shuffle(rng);
    // Subsets of axes 1..n; a subset and its complement give the same move.
    let masks = (1usize << (axes - 1).min(16)) - 1;
    let mut accepted = false;
    let mut probes = 0;
    'pairs: for (x, y) in pairs {
        let ix = unflatten(x, shape);
        let iy = unflatten(y, shape);
        for mask in 1..=masks {
            let mut xp = ix.clone();
            let mut yp = iy.clone();
            for t in 1..axes {
                if mask & (1 << (t - 1)) != 0 {
                    xp[t] = iy[t];
                    yp[t] = ix[t];
                }
            }
            if xp == ix || xp == iy {
                continue;
            }
            probes += 1;
            if probes > PROBES_PER_POINT {
                break 'pairs;
            }
            let (xp, yp) = (flatten(&xp, shape), flatten(&yp, shape));
            let current = &search.tensors[point];
            if !(current[x].is_positive(tol) && current[y].is_positive(tol)) {
                continue;
            }
            let delta = S::min_of(&current[x], &current[y]);
            let mut moved = current.clone();
            moved[x] = moved[x].clone() - delta.clone();
            moved[y] = moved[y].clone() - delta.clone();
            moved[xp] = moved[xp].clone() + delta.clone();
            moved[yp] = moved[yp].clone() + delta;
            if search.value_with(point, &moved) < search.value - IMPROVEMENT {
                search.replace(point, moved);
                accepted = true;
            }
        }
    }
    accepted
}
