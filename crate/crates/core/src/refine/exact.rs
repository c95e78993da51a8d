//! Exact minimization over tuples of local vertices.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use super::local::{enumerate_local_vertices_bounded, LocalPolytope};
use super::{assemble, Certificate, RefinementSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::mv::State;
use crate::partition::{cell_count, entropy_of_masses, phi_clamped, LogBase, Partition};
use crate::scalar::{Rational, Scalar};

/// Relative window in which float-evaluated tuples are re-ranked with exact
/// masses.
const NEAR_TIE: f64 = 1e-9;

struct PointChoices {
    weight: Rational,
    vertices: Arc<Vec<Vec<Rational>>>,
}

pub(super) fn solve<S: Scalar>(
    parts: &[Partition<S>],
    state: &State<S>,
    base: LogBase,
    config: &SolverConfig,
) -> Result<RefinementSolution<S>> {
    let space = parts[0].space();
    let shape: Vec<usize> = parts.iter().map(Partition::len).collect();
    let cells = cell_count(&shape);
    if cells > config.max_cells_per_point {
        return Err(Error::BudgetExceeded {
            what: "cells per point",
            required: cells as u128,
            budget: config.max_cells_per_point as u128,
        });
    }
    let exact = |v: &S| v.to_rational().ok_or(Error::ExactRequiresRational);

    let mut cache: HashMap<Vec<Vec<Rational>>, Arc<Vec<Vec<Rational>>>> = HashMap::new();
    let mut points = Vec::with_capacity(space.len());
    for point in 0..space.len() {
        let marginals = parts
            .iter()
            .map(|p| p.column(point).iter().map(exact).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let weight = exact(space.weight(point))?;
        let lp = LocalPolytope {
            point,
            axis_marginals: marginals,
        };
        let vertices = if weight.is_zero() {
            // No mass: any feasible entry will do.
            Arc::new(vec![lp.greedy_vertex(None, 0.0)])
        } else if let Some(v) = cache.get(&lp.axis_marginals) {
            Arc::clone(v)
        } else {
            let v = Arc::new(enumerate_local_vertices_bounded(
                &lp,
                config.max_cells_per_point,
                config.max_bases,
            )?);
            cache.insert(lp.axis_marginals.clone(), Arc::clone(&v));
            v
        };
        points.push(PointChoices { weight, vertices });
    }

    let groups = group_points(&points);
    let total = groups
        .iter()
        .try_fold(1u128, |acc, g| acc.checked_mul(g.choices))
        .unwrap_or(u128::MAX);
    if total > config.max_combinations {
        return Err(Error::BudgetExceeded {
            what: "vertex combinations",
            required: total,
            budget: config.max_combinations,
        });
    }
    let total = u64::try_from(total).map_err(|_| Error::BudgetExceeded {
        what: "vertex combinations",
        required: total,
        budget: u64::MAX as u128,
    })?;

    let search = Search::new(&points, groups, cells, base);
    let best_float = search.minimum(total, config.parallel);
    let threshold = best_float + NEAR_TIE * best_float.abs().max(1.0);
    let mut candidates = search.within(total, threshold, config.parallel);
    candidates.sort_unstable();

    let mut best: Option<(f64, Vec<Rational>, u64)> = None;
    for idx in candidates {
        let masses = search.exact_masses(idx);
        let h = entropy_of_masses(masses.iter().map(Scalar::to_f64), base);
        let better = match &best {
            None => true,
            Some((bh, bm, _)) => match h.total_cmp(bh) {
                Ordering::Less => true,
                Ordering::Equal => masses < *bm,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((h, masses, idx));
        }
    }
    let (_, _, idx) = best.ok_or_else(|| Error::InvariantViolation("no feasible vertex tuple".into()))?;

    let choice = search.decode(idx);
    let per_point: Vec<Vec<S>> = points
        .iter()
        .zip(&choice)
        .map(|(p, &v)| p.vertices[v].iter().map(S::from_rational).collect())
        .collect();
    let tensor = assemble(parts, &per_point)?;
    let entropy = tensor.entropy(state, base)?;
    Ok(RefinementSolution {
        tensor,
        entropy,
        certificate: Certificate::ExactVertexEnumeration,
        bound_gap: None,
    })
}

/// Points with equal weights and equal marginals. Only the multiset of
/// vertices chosen across the group matters for the cell masses.
struct Group {
    members: Vec<usize>,
    /// `C(V + k - 1, k)` for `V` vertices and `k` members.
    choices: u128,
}

fn group_points(points: &[PointChoices]) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if p.weight.is_zero() || p.vertices.len() < 2 {
            continue;
        }
        let found = groups.iter_mut().find(|g| {
            let q = &points[g.members[0]];
            q.weight == p.weight && Arc::ptr_eq(&q.vertices, &p.vertices)
        });
        match found {
            Some(g) => g.members.push(i),
            None => groups.push(Group {
                members: vec![i],
                choices: 0,
            }),
        }
    }
    for g in &mut groups {
        let v = points[g.members[0]].vertices.len() as u128;
        g.choices = multiset_count(v, g.members.len() as u128);
    }
    groups
}

fn multiset_count(v: u128, k: u128) -> u128 {
    // C(v + k - 1, k), saturating
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(v + i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Nondecreasing sequences of length `k` over `0..v`, in lexicographic order.
fn multisets(v: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; k];
    loop {
        out.push(current.clone());
        let Some(pos) = (0..k).rev().find(|&j| (current[j] as usize) + 1 < v) else {
            return out;
        };
        let next = current[pos] + 1;
        for c in &mut current[pos..] {
            *c = next;
        }
    }
}

/// Mixed-radix walk over groups, one digit per group selecting a multiset.
struct Search<'a> {
    points: &'a [PointChoices],
    groups: Vec<Group>,
    options: Vec<Vec<Vec<u32>>>,
    /// Masses contributed by points with a single vertex.
    fixed: Vec<f64>,
    /// Sparse weighted contributions `[group][vertex] -> (cell, mass)`.
    contrib: Vec<Vec<Vec<(usize, f64)>>>,
    cells: usize,
    base: LogBase,
}

impl<'a> Search<'a> {
    fn new(points: &'a [PointChoices], groups: Vec<Group>, cells: usize, base: LogBase) -> Self {
        let weighted = |p: &PointChoices, v: &[Rational]| -> Vec<(usize, f64)> {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(c, x)| (c, Scalar::to_f64(&(x * &p.weight))))
                .collect()
        };
        let mut fixed = vec![0.0; cells];
        for p in points {
            if !p.weight.is_zero() && p.vertices.len() == 1 {
                for (c, m) in weighted(p, &p.vertices[0]) {
                    fixed[c] += m;
                }
            }
        }
        let contrib = groups
            .iter()
            .map(|g| {
                let p = &points[g.members[0]];
                p.vertices.iter().map(|v| weighted(p, v)).collect()
            })
            .collect();
        let options = groups
            .iter()
            .map(|g| multisets(points[g.members[0]].vertices.len(), g.members.len()))
            .collect();
        Search {
            points,
            groups,
            options,
            fixed,
            contrib,
            cells,
            base,
        }
    }

    fn evaluate(&self, buf: &mut Vec<f64>, mut idx: u64) -> f64 {
        buf.clear();
        buf.extend_from_slice(&self.fixed);
        for (g, opts) in self.options.iter().enumerate() {
            let radix = opts.len() as u64;
            let digit = (idx % radix) as usize;
            idx /= radix;
            for &v in &opts[digit] {
                for &(c, m) in &self.contrib[g][v as usize] {
                    buf[c] += m;
                }
            }
        }
        buf.iter().map(|&m| phi_clamped(m, self.base)).sum()
    }

    fn minimum(&self, total: u64, parallel: bool) -> f64 {
        if parallel {
            (0..total)
                .into_par_iter()
                .map_init(|| Vec::with_capacity(self.cells), |buf, idx| self.evaluate(buf, idx))
                .reduce(|| f64::INFINITY, f64::min)
        } else {
            let mut buf = Vec::with_capacity(self.cells);
            (0..total)
                .map(|idx| self.evaluate(&mut buf, idx))
                .fold(f64::INFINITY, f64::min)
        }
    }

    fn within(&self, total: u64, threshold: f64, parallel: bool) -> Vec<u64> {
        if parallel {
            (0..total)
                .into_par_iter()
                .map_init(
                    || Vec::with_capacity(self.cells),
                    |buf, idx| (self.evaluate(buf, idx) <= threshold).then_some(idx),
                )
                .flatten()
                .collect()
        } else {
            let mut buf = Vec::with_capacity(self.cells);
            (0..total)
                .filter(|&idx| self.evaluate(&mut buf, idx) <= threshold)
                .collect()
        }
    }

    /// Vertex chosen at every point for tuple `idx`; within a group the
    /// multiset is laid out in member order.
    fn decode(&self, mut idx: u64) -> Vec<usize> {
        let mut choice = vec![0; self.points.len()];
        for (g, opts) in self.options.iter().enumerate() {
            let radix = opts.len() as u64;
            let digit = (idx % radix) as usize;
            idx /= radix;
            for (&member, &v) in self.groups[g].members.iter().zip(&opts[digit]) {
                choice[member] = v as usize;
            }
        }
        choice
    }

    fn exact_masses(&self, idx: u64) -> Vec<Rational> {
        let choice = self.decode(idx);
        let mut masses = vec![Rational::zero(); self.cells];
        for (p, &v) in self.points.iter().zip(&choice) {
            if p.weight.is_zero() {
                continue;
            }
            for (c, x) in p.vertices[v].iter().enumerate() {
                if !x.is_zero() {
                    masses[c] += x * &p.weight;
                }
            }
        }
        masses
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_enumeration_matches_count() {
        for v in 1..6 {
            for k in 1..5 {
                let m = multisets(v, k);
                assert_eq!(m.len() as u128, multiset_count(v as u128, k as u128));
                assert!(m.windows(2).all(|w| w[0] < w[1]));
                assert!(m.iter().all(|s| s.windows(2).all(|w| w[0] <= w[1])));
            }
        }
        assert_eq!(multiset_count(48, 4), 249_900);
    }
}
