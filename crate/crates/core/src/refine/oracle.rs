//! Brute-force reference for the minimum refinement entropy.
//!
//! Shares no code with the solver: at every point it walks a grid over the
//! free cells of the local tensor (cells that close a slice take whatever
//! that slice still needs), adds every basic solution found by trying all
//! column subsets of the marginal equations, and minimizes over the product
//! across points. Meant for tiny instances in tests.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mv::State;
use crate::partition::{entropy_of_masses, EntropyValue, LogBase, Partition};
use crate::scalar::{Rational, Scalar};

/// Grid tensors enumerated per point before giving up.
pub const MAX_TENSORS_PER_POINT: usize = 2_000_000;
/// Tuples of per-point tensors evaluated before giving up.
pub const MAX_TUPLES: usize = 20_000_000;
/// Column subsets tried when listing basic solutions.
const MAX_SUBSETS: u64 = 500_000;

/// Minimum of `H(C)` over grid tensors with step `1 / resolution` and all
/// basic solutions.
pub fn brute_force_oracle(
    parts: &[Partition<Rational>],
    state: &State<Rational>,
    base: LogBase,
    resolution: u32,
) -> Result<EntropyValue> {
    if parts.is_empty() || resolution == 0 {
        return Err(Error::InvalidArgument(
            "need partitions and a positive resolution".into(),
        ));
    }
    let space = state.space();
    let step = Rational::new(1.into(), resolution.into());
    let shape: Vec<usize> = parts.iter().map(Partition::len).collect();
    let cells: Vec<Vec<usize>> = all_indices(&shape);

    let mut per_point: Vec<(f64, Vec<Vec<Rational>>)> = Vec::new();
    for point in 0..space.len() {
        let weight = space.weight(point).clone();
        if weight.is_zero() {
            continue;
        }
        let marginals: Vec<Vec<Rational>> = parts.iter().map(|p| p.column(point)).collect();
        let mut tensors = grid_tensors(&cells, &marginals, &step)?;
        for v in basic_solutions(&cells, &marginals) {
            if !tensors.contains(&v) {
                tensors.push(v);
            }
        }
        per_point.push((weight.to_f64(), tensors));
    }
    let tuples = per_point
        .iter()
        .try_fold(1usize, |acc, (_, t)| acc.checked_mul(t.len()))
        .unwrap_or(usize::MAX);
    if tuples > MAX_TUPLES {
        return Err(Error::OracleTooLarge(format!("{tuples} tensor tuples")));
    }

    let mut best = f64::INFINITY;
    let mut choice = vec![0usize; per_point.len()];
    loop {
        let mut masses = vec![0.0; cells.len()];
        for ((w, tensors), &c) in per_point.iter().zip(&choice) {
            for (m, v) in masses.iter_mut().zip(&tensors[c]) {
                *m += w * v.to_f64();
            }
        }
        best = best.min(entropy_of_masses(masses, base));
        // odometer
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(EntropyValue { value: best, base });
            }
            choice[k] += 1;
            if choice[k] < per_point[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn all_indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in shape {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

fn grid_tensors(cells: &[Vec<usize>], marginals: &[Vec<Rational>], step: &Rational) -> Result<Vec<Vec<Rational>>> {
    // The last cell (in enumeration order) of each slice closes it.
    let mut closes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cells.len()];
    for (t, m) in marginals.iter().enumerate() {
        for i in 0..m.len() {
            if let Some(last) = cells.iter().rposition(|c| c[t] == i) {
                closes[last].push((t, i));
            }
        }
    }
    let mut out = Vec::new();
    let mut residual = marginals.to_vec();
    let mut values = vec![Rational::zero(); cells.len()];
    walk(0, cells, &closes, step, &mut residual, &mut values, &mut out)?;
    Ok(out)
}

fn walk(
    c: usize,
    cells: &[Vec<usize>],
    closes: &[Vec<(usize, usize)>],
    step: &Rational,
    residual: &mut Vec<Vec<Rational>>,
    values: &mut Vec<Rational>,
    out: &mut Vec<Vec<Rational>>,
) -> Result<()> {
    if c == cells.len() {
        if residual.iter().flatten().all(Zero::is_zero) {
            if out.len() >= MAX_TENSORS_PER_POINT {
                return Err(Error::OracleTooLarge("grid too fine".into()));
            }
            out.push(values.clone());
        }
        return Ok(());
    }
    let idx = &cells[c];
    let cap = idx
        .iter()
        .enumerate()
        .map(|(t, &i)| residual[t][i].clone())
        .min()
        .expect("at least one axis");
    let options: Vec<Rational> = if let Some(&(t, i)) = closes[c].first() {
        let forced = residual[t][i].clone();
        let consistent = closes[c].iter().all(|&(s, j)| residual[s][j] == forced);
        if !consistent || forced > cap || forced < Rational::zero() {
            return Ok(());
        }
        vec![forced]
    } else {
        let mut opts = Vec::new();
        let mut v = Rational::zero();
        while v <= cap {
            opts.push(v.clone());
            v += step;
        }
        if opts.last() != Some(&cap) {
            opts.push(cap);
        }
        opts
    };
    for v in options {
        for (t, &i) in idx.iter().enumerate() {
            residual[t][i] -= &v;
        }
        values[c] = v.clone();
        walk(c + 1, cells, closes, step, residual, values, out)?;
        for (t, &i) in idx.iter().enumerate() {
            residual[t][i] += &v;
        }
    }
    values[c] = Rational::zero();
    Ok(())
}

/// Nonnegative solutions of the marginal equations supported on linearly
/// independent column sets; empty when there are too many subsets.
fn basic_solutions(cells: &[Vec<usize>], marginals: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let open: Vec<usize> = (0..cells.len())
        .filter(|&c| cells[c].iter().enumerate().all(|(t, &i)| !marginals[t][i].is_zero()))
        .collect();
    let rows: Vec<(usize, usize)> = marginals
        .iter()
        .enumerate()
        .flat_map(|(t, m)| (0..m.len()).map(move |i| (t, i)))
        .collect();
    let rank = (rows.len() + 1).saturating_sub(marginals.len()).min(open.len());
    let subsets: u64 = (1..=rank).map(|s| binomial(open.len() as u64, s as u64)).sum();
    if subsets > MAX_SUBSETS {
        return Vec::new();
    }
    let mut out = Vec::new();
    for size in 1..=rank {
        for subset in combinations(open.len(), size) {
            let cols: Vec<usize> = subset.iter().map(|&k| open[k]).collect();
            let matrix: Vec<Vec<Rational>> = rows
                .iter()
                .map(|&(t, i)| {
                    let mut row: Vec<Rational> = cols
                        .iter()
                        .map(|&c| {
                            if cells[c][t] == i {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect();
                    row.push(marginals[t][i].clone());
                    row
                })
                .collect();
            if let Some(x) = unique_solution(matrix, cols.len()) {
                if x.iter().all(|v| *v > Rational::zero()) {
                    let mut full = vec![Rational::zero(); cells.len()];
                    for (&c, v) in cols.iter().zip(x) {
                        full[c] = v;
                    }
                    if !out.contains(&full) {
                        out.push(full);
                    }
                }
            }
        }
    }
    out
}

fn unique_solution(mut m: Vec<Vec<Rational>>, unknowns: usize) -> Option<Vec<Rational>> {
    let rows = m.len();
    let mut r = 0;
    for col in 0..unknowns {
        let pivot = (r..rows).find(|&i| !m[i][col].is_zero())?;
        m.swap(r, pivot);
        let p = m[r][col].clone();
        for v in m[r].iter_mut() {
            *v = &*v / &p;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=unknowns {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    Some((0..unknowns).map(|i| m[i][unknowns].clone()).collect())
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mv::FiniteSpace;
    use crate::scalar::ratio;

    #[test]
    fn halves_against_two_fifths() {
        let s = FiniteSpace::single_point();
        let a = Partition::from_rows(&s, vec![vec![ratio(1, 2)], vec![ratio(1, 2)]]).unwrap();
        let b = Partition::from_rows(&s, vec![vec![ratio(2, 5)], vec![ratio(3, 5)]]).unwrap();
        let h = brute_force_oracle(&[a, b], &State::new(&s), LogBase::Natural, 10_000).unwrap();
        assert!((h.value - 0.943_348_39).abs() < 1e-8);
    }

    #[test]
    fn equal_halves_couple_diagonally() {
        let s = FiniteSpace::single_point();
        let a = Partition::from_rows(&s, vec![vec![ratio(1, 2)], vec![ratio(1, 2)]]).unwrap();
        let h = brute_force_oracle(&[a.clone(), a], &State::new(&s), LogBase::Natural, 100).unwrap();
        assert!((h.value - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn crisp_instance_is_the_join() {
        let s = FiniteSpace::<Rational>::uniform(4).unwrap();
        let a = Partition::crisp(&s, &[vec![0, 1], vec![2, 3]]).unwrap();
        let b = Partition::crisp(&s, &[vec![0], vec![1, 2, 3]]).unwrap();
        let h = brute_force_oracle(&[a, b], &State::new(&s), LogBase::Natural, 4).unwrap();
        // atoms {0}, {1}, {2,3}
        let expected = 2.0 * 0.25 * 4f64.ln() + 0.5 * 2f64.ln();
        assert!((h.value - expected).abs() < 1e-15);
    }

    #[test]
    fn basic_solutions_of_a_one_parameter_family() {
        let cells = all_indices(&[2, 2]);
        let m = vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(2, 5), ratio(3, 5)]];
        let v = basic_solutions(&cells, &m);
        assert_eq!(v.len(), 2);
    }
}
