//! The feasible set of a refinement tensor at a single point.
//!
//! At a point, a common refinement of `n` partitions is a nonnegative
//! `n`-axis array whose axis sums are the partitions' values at that point:
//! a multi-marginal (axial) transportation polytope. Vertices are enumerated
//! exactly by walking the graph of feasible bases with simplex pivots,
//! including degenerate ones, starting from a greedy vertex.

use std::collections::{HashSet, VecDeque};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::{cell_count, flatten, unflatten, Partition};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolytope<S> {
    pub point: usize,
    /// One marginal vector per axis, each summing to one.
    pub axis_marginals: Vec<Vec<S>>,
}

impl<S: Scalar> LocalPolytope<S> {
    pub fn at_point(parts: &[Partition<S>], point: usize) -> Self {
        LocalPolytope {
            point,
            axis_marginals: parts.iter().map(|p| p.column(point)).collect(),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axis_marginals.iter().map(Vec::len).collect()
    }

    pub fn cell_count(&self) -> usize {
        cell_count(&self.shape())
    }

    /// Indices with positive marginal on each axis. Cells outside the product
    /// of these are forced to zero.
    pub fn active_indices(&self, tol: f64) -> Vec<Vec<usize>> {
        self.axis_marginals
            .iter()
            .map(|m| (0..m.len()).filter(|&i| m[i].is_positive(tol)).collect())
            .collect()
    }

    /// Reduced problem: the active cells (as full flat indices, in row-major
    /// order of the reduced shape) and the reduced shape.
    pub(crate) fn reduced_cells(&self, tol: f64) -> (Vec<usize>, Vec<usize>, Vec<Vec<usize>>) {
        let active = self.active_indices(tol);
        let reduced_shape: Vec<usize> = active.iter().map(Vec::len).collect();
        let full_shape = self.shape();
        let cells = (0..cell_count(&reduced_shape))
            .map(|r| {
                let idx: Vec<usize> = unflatten(r, &reduced_shape)
                    .into_iter()
                    .zip(&active)
                    .map(|(i, act)| act[i])
                    .collect();
                flatten(&idx, &full_shape)
            })
            .collect();
        (cells, reduced_shape, active)
    }

    /// Greedy vertex: visits active cells in `order` (positions into the
    /// reduced cell list) and gives each the smallest residual marginal among
    /// its slices. Returned in full cell indexing.
    pub fn greedy_vertex(&self, order: Option<&[usize]>, tol: f64) -> Vec<S> {
        let (cells, reduced_shape, active) = self.reduced_cells(tol);
        let mut residual: Vec<Vec<S>> = active
            .iter()
            .zip(&self.axis_marginals)
            .map(|(act, m)| act.iter().map(|&i| m[i].clone()).collect())
            .collect();
        let mut out = vec![S::zero(); self.cell_count()];
        let lex: Vec<usize>;
        let order = match order {
            Some(o) => o,
            None => {
                lex = (0..cells.len()).collect();
                &lex
            }
        };
        for &r in order {
            let idx = unflatten(r, &reduced_shape);
            let value = idx
                .iter()
                .enumerate()
                .map(|(t, &i)| residual[t][i].clone())
                .reduce(|a, b| S::min_of(&a, &b))
                .unwrap_or_else(S::zero);
            if !value.is_positive(tol) {
                continue;
            }
            for (t, &i) in idx.iter().enumerate() {
                let left = residual[t][i].clone() - value.clone();
                residual[t][i] = if left.is_approx_zero(tol) { S::zero() } else { left };
            }
            out[cells[r]] = value;
        }
        out
    }
}

/// Linear system `A x = b` of the reduced local problem with one redundant
/// row per extra axis removed, so `A` has full row rank.
struct LocalSystem {
    rows: usize,
    /// `col_rows[j]`: rows in which column `j` has a one.
    col_rows: Vec<Vec<usize>>,
    rhs: Vec<Rational>,
}

impl LocalSystem {
    fn new(lp: &LocalPolytope<Rational>, reduced_shape: &[usize], active: &[Vec<usize>]) -> Self {
        // Row of slice (t, i): every index of axis 0; all but the last of the others.
        let mut row_of: Vec<Vec<Option<usize>>> = Vec::with_capacity(reduced_shape.len());
        let mut rhs = Vec::new();
        for (t, &k) in reduced_shape.iter().enumerate() {
            let keep = if t == 0 { k } else { k - 1 };
            let mut rows = vec![None; k];
            for (i, slot) in rows.iter_mut().enumerate().take(keep) {
                *slot = Some(rhs.len());
                rhs.push(lp.axis_marginals[t][active[t][i]].clone());
            }
            row_of.push(rows);
        }
        let col_rows = (0..cell_count(reduced_shape))
            .map(|r| {
                unflatten(r, reduced_shape)
                    .into_iter()
                    .enumerate()
                    .filter_map(|(t, i)| row_of[t][i])
                    .collect()
            })
            .collect();
        LocalSystem {
            rows: rhs.len(),
            col_rows,
            rhs,
        }
    }

    fn columns(&self) -> usize {
        self.col_rows.len()
    }

    /// Gauss-Jordan elimination pivoting on columns in `order` until the
    /// basis is full. Returns the chosen basic columns (row `k` of the
    /// tableau belongs to `basis[k]`) and the tableau `[B^-1 A | B^-1 b]`.
    fn eliminate(&self, order: impl IntoIterator<Item = usize>) -> Option<(Vec<usize>, Vec<Vec<Rational>>)> {
        let n = self.columns();
        let mut tab: Vec<Vec<Rational>> = (0..self.rows)
            .map(|r| {
                let mut row = vec![Rational::zero(); n + 1];
                row[n] = self.rhs[r].clone();
                row
            })
            .collect();
        for (j, rows) in self.col_rows.iter().enumerate() {
            for &r in rows {
                tab[r][j] = Rational::one();
            }
        }
        let mut basis = Vec::with_capacity(self.rows);
        for col in order {
            let k = basis.len();
            if k == self.rows {
                break;
            }
            let Some(pivot) = (k..self.rows).find(|&r| !tab[r][col].is_zero()) else {
                continue;
            };
            tab.swap(k, pivot);
            let inv = Rational::one() / tab[k][col].clone();
            for v in tab[k].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() * inv.clone();
                }
            }
            for r in 0..self.rows {
                if r == k || tab[r][col].is_zero() {
                    continue;
                }
                let factor = tab[r][col].clone();
                for c in 0..=n {
                    if !tab[k][c].is_zero() {
                        let delta = factor.clone() * tab[k][c].clone();
                        tab[r][c] = tab[r][c].clone() - delta;
                    }
                }
            }
            basis.push(col);
        }
        (basis.len() == self.rows).then_some((basis, tab))
    }
}

/// Default bound on feasible bases visited per point.
pub const DEFAULT_MAX_BASES: usize = 200_000;

/// Every extreme point of the local polytope, in full cell indexing, sorted
/// lexicographically.
pub fn enumerate_local_vertices(lp: &LocalPolytope<Rational>, cell_cap: usize) -> Result<Vec<Vec<Rational>>> {
    enumerate_local_vertices_bounded(lp, cell_cap, DEFAULT_MAX_BASES)
}

pub fn enumerate_local_vertices_bounded(
    lp: &LocalPolytope<Rational>,
    cell_cap: usize,
    max_bases: usize,
) -> Result<Vec<Vec<Rational>>> {
    let full_cells = lp.cell_count();
    if full_cells > cell_cap {
        return Err(Error::BudgetExceeded {
            what: "cells per point",
            required: full_cells as u128,
            budget: cell_cap as u128,
        });
    }
    for (t, m) in lp.axis_marginals.iter().enumerate() {
        let sum = m.iter().fold(Rational::zero(), |a, v| a + v);
        if sum != Rational::one() || m.iter().any(|v| *v < Rational::zero()) {
            return Err(Error::InvalidArgument(format!(
                "axis {t} marginal at point {} is not a probability vector",
                lp.point
            )));
        }
    }
    let (cells, reduced_shape, active) = lp.reduced_cells(0.0);
    let expand = |reduced: &[Rational]| {
        let mut full = vec![Rational::zero(); full_cells];
        for (r, v) in reduced.iter().enumerate() {
            full[cells[r]] = v.clone();
        }
        full
    };
    if cells.len() == 1 {
        return Ok(vec![expand(&[Rational::one()])]);
    }

    let system = LocalSystem::new(lp, &reduced_shape, &active);
    let n = system.columns();

    let start = lp.greedy_vertex(None, 0.0);
    let support: Vec<usize> = (0..n).filter(|&r| !start[cells[r]].is_zero()).collect();
    let order = support.iter().copied().chain((0..n).filter(|r| !support.contains(r)));
    let (first, _) = system
        .eliminate(order)
        .ok_or_else(|| Error::InvariantViolation("local transportation system is rank deficient".into()))?;

    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut sorted = first;
    sorted.sort_unstable();
    seen.insert(sorted.clone());
    queue.push_back(sorted);

    let mut vertices: HashSet<Vec<Rational>> = HashSet::new();
    while let Some(basis) = queue.pop_front() {
        let (basis, tab) = system
            .eliminate(basis.iter().copied())
            .ok_or_else(|| Error::InvariantViolation("pivot produced a singular basis".into()))?;
        let mut x = vec![Rational::zero(); n];
        for (k, &col) in basis.iter().enumerate() {
            x[col] = tab[k][n].clone();
        }
        vertices.insert(x);

        for entering in (0..n).filter(|j| !basis.contains(j)) {
            let mut best: Option<Rational> = None;
            let mut leaving = Vec::new();
            for (k, row) in tab.iter().enumerate() {
                let d = &row[entering];
                if *d <= Rational::zero() {
                    continue;
                }
                let ratio = row[n].clone() / d.clone();
                match &best {
                    Some(b) if ratio > *b => {}
                    Some(b) if ratio == *b => leaving.push(k),
                    _ => {
                        best = Some(ratio);
                        leaving.clear();
                        leaving.push(k);
                    }
                }
            }
            for k in leaving {
                let mut next = basis.clone();
                next[k] = entering;
                next.sort_unstable();
                if seen.insert(next.clone()) {
                    if seen.len() > max_bases {
                        return Err(Error::BudgetExceeded {
                            what: "feasible bases per point",
                            required: seen.len() as u128,
                            budget: max_bases as u128,
                        });
                    }
                    queue.push_back(next);
                }
            }
        }
    }

    let mut out: Vec<Vec<Rational>> = vertices.iter().map(|v| expand(v)).collect();
    out.sort();
    Ok(out)
}
