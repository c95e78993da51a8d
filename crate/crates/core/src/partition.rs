//! Partitions of unity, refinement tensors and their entropies.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mv::{riesz_decompose, same_space, FiniteSpace, MvElement, State, Transformation};
use crate::scalar::Scalar;

/// Slack accepted by [`phi`] outside `[0, 1]` before reporting a domain error.
pub const PHI_DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Natural => "nats",
            LogBase::Two => "bits",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
        }
    }

    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub base: LogBase,
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.8} {}", self.value, self.base.unit())
    }
}

/// `φ(x) = -x log x`, with `φ(0) = 0`.
pub fn phi(x: f64, base: LogBase) -> Result<f64> {
    if !(-PHI_DOMAIN_SLACK..=1.0 + PHI_DOMAIN_SLACK).contains(&x) {
        return Err(Error::PhiDomain(x));
    }
    Ok(phi_clamped(x, base))
}

pub(crate) fn phi_clamped(x: f64, base: LogBase) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x > 0.0 {
        let v = -x * base.log(x);
        // -0.0 at x = 1
        v.max(0.0)
    } else {
        0.0
    }
}

/// `Σ φ(mass)` summed in ascending order of mass, so the result depends only
/// on the multiset of masses (bitwise).
pub fn entropy_of_masses(masses: impl IntoIterator<Item = f64>, base: LogBase) -> f64 {
    let mut masses: Vec<f64> = masses.into_iter().filter(|&m| m > 0.0).collect();
    masses.sort_by(f64::total_cmp);
    masses.into_iter().map(|m| phi_clamped(m, base)).sum()
}

/// A tuple of elements summing to the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<S: Scalar> {
    space: Arc<FiniteSpace<S>>,
    elements: Vec<MvElement<S>>,
}

impl<S: Scalar> Partition<S> {
    pub fn new(elements: Vec<MvElement<S>>) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyPartition)?;
        let space = Arc::clone(first.space());
        if elements.iter().any(|e| !same_space(e.space(), &space)) {
            return Err(Error::SpaceMismatch);
        }
        let tol = space.tolerance();
        for point in 0..space.len() {
            let sum = elements.iter().fold(S::zero(), |acc, e| acc + e.value(point).clone());
            if !sum.approx_eq(&S::one(), tol) {
                return Err(Error::NotPartitionOfUnity {
                    point,
                    sum: sum.render(),
                });
            }
        }
        Ok(Partition { space, elements })
    }

    /// One row of values per element.
    pub fn from_rows(space: &Arc<FiniteSpace<S>>, rows: Vec<Vec<S>>) -> Result<Self> {
        let elements = rows
            .into_iter()
            .map(|r| MvElement::new(space, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    /// The trivial partition `{u}`.
    pub fn unit(space: &Arc<FiniteSpace<S>>) -> Self {
        Partition {
            space: Arc::clone(space),
            elements: vec![MvElement::unit(space)],
        }
    }

    /// Crisp partition from blocks of point indices.
    pub fn crisp(space: &Arc<FiniteSpace<S>>, blocks: &[Vec<usize>]) -> Result<Self> {
        let elements = blocks
            .iter()
            .map(|b| MvElement::indicator(space, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        &self.space
    }

    pub fn elements(&self) -> &[MvElement<S>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Values of every element at one point; they sum to one.
    pub fn column(&self, point: usize) -> Vec<S> {
        self.elements.iter().map(|e| e.value(point).clone()).collect()
    }

    /// Every element is crisp.
    pub fn is_idempotent(&self) -> bool {
        self.elements.iter().all(MvElement::is_idempotent)
    }

    pub fn masses(&self, state: &State<S>) -> Result<Vec<S>> {
        self.elements.iter().map(|e| state.eval(e)).collect()
    }
}

/// `H(A) = Σ φ(m(a_i))`.
pub fn entropy<S: Scalar>(partition: &Partition<S>, state: &State<S>, base: LogBase) -> Result<EntropyValue> {
    let masses = partition.masses(state)?;
    Ok(EntropyValue {
        value: entropy_of_masses(masses.iter().map(Scalar::to_f64), base),
        base,
    })
}

/// `{τ(a_1), ..., τ(a_k)}`.
pub fn tau_partition<S: Scalar>(tau: &Transformation<S>, partition: &Partition<S>) -> Result<Partition<S>> {
    let elements = partition
        .elements
        .iter()
        .map(|e| tau.apply(e))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(elements)
}

/// A common refinement of `n` partitions, stored as an `n`-axis array of
/// elements in row-major order (last axis fastest). The sum over all cells
/// sharing coordinate `i` on axis `t` equals element `i` of axis `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementTensor<S: Scalar> {
    axes: Vec<Partition<S>>,
    shape: Vec<usize>,
    entries: Vec<MvElement<S>>,
}

impl<S: Scalar> RefinementTensor<S> {
    pub fn new(axes: Vec<Partition<S>>, entries: Vec<MvElement<S>>) -> Result<Self> {
        let tensor = Self::assemble(axes, entries)?;
        tensor.validate()?;
        Ok(tensor)
    }

    /// Builds a tensor from per-cell, per-point values.
    pub fn from_cell_values(axes: Vec<Partition<S>>, cells: Vec<Vec<S>>) -> Result<Self> {
        let space = Arc::clone(axes.first().ok_or(Error::InvalidTensor("no axes".into()))?.space());
        let entries = cells
            .into_iter()
            .map(|v| MvElement::new(&space, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes, entries)
    }

    fn assemble(axes: Vec<Partition<S>>, entries: Vec<MvElement<S>>) -> Result<Self> {
        let first = axes.first().ok_or(Error::InvalidTensor("no axes".into()))?;
        let space = Arc::clone(first.space());
        if axes.iter().any(|a| !same_space(a.space(), &space)) || entries.iter().any(|e| !same_space(e.space(), &space))
        {
            return Err(Error::SpaceMismatch);
        }
        let shape: Vec<usize> = axes.iter().map(Partition::len).collect();
        let cells = cell_count(&shape);
        if entries.len() != cells {
            return Err(Error::InvalidTensor(format!(
                "expected {cells} entries for shape {shape:?}, found {}",
                entries.len()
            )));
        }
        Ok(RefinementTensor { axes, shape, entries })
    }

    /// Checks every axis marginal at every point.
    pub fn validate(&self) -> Result<()> {
        let space = self.space();
        let tol = space.tolerance();
        let zero = S::zero();
        for e in &self.entries {
            if let Some(point) = e.values().iter().position(|v| !zero.approx_le(v, tol)) {
                return Err(Error::OutOfUnitInterval {
                    point,
                    value: e.value(point).render(),
                });
            }
        }
        for (axis, partition) in self.axes.iter().enumerate() {
            for point in 0..space.len() {
                let mut sums = vec![S::zero(); self.shape[axis]];
                for (flat, e) in self.entries.iter().enumerate() {
                    let i = coordinate(flat, &self.shape, axis);
                    sums[i] = sums[i].clone() + e.value(point).clone();
                }
                for (index, sum) in sums.iter().enumerate() {
                    if !sum.approx_eq(partition.elements[index].value(point), tol) {
                        return Err(Error::MarginalMismatch { axis, index, point });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        self.axes[0].space()
    }

    pub fn axes(&self) -> &[Partition<S>] {
        &self.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entries(&self) -> &[MvElement<S>] {
        &self.entries
    }

    pub fn entry(&self, index: &[usize]) -> &MvElement<S> {
        &self.entries[flatten(index, &self.shape)]
    }

    /// `m(c)` for every cell, in row-major order.
    pub fn masses(&self, state: &State<S>) -> Result<Vec<S>> {
        self.entries.iter().map(|e| state.eval(e)).collect()
    }

    /// `H(C) = Σ_cells φ(m(c))`.
    pub fn entropy(&self, state: &State<S>, base: LogBase) -> Result<EntropyValue> {
        let masses = self.masses(state)?;
        Ok(EntropyValue {
            value: entropy_of_masses(masses.iter().map(Scalar::to_f64), base),
            base,
        })
    }

    /// The cells as one flat partition of unity.
    pub fn as_partition(&self) -> Partition<S> {
        Partition {
            space: Arc::clone(self.space()),
            elements: self.entries.clone(),
        }
    }

    /// Swaps the two axes of a 2-axis tensor.
    pub fn transposed(&self) -> Result<Self> {
        if self.shape.len() != 2 {
            return Err(Error::InvalidTensor("transpose needs exactly two axes".into()));
        }
        let (rows, cols) = (self.shape[0], self.shape[1]);
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..cols {
            for i in 0..rows {
                entries.push(self.entries[i * cols + j].clone());
            }
        }
        Ok(RefinementTensor {
            axes: vec![self.axes[1].clone(), self.axes[0].clone()],
            shape: vec![cols, rows],
            entries,
        })
    }
}

pub(crate) fn cell_count(shape: &[usize]) -> usize {
    shape.iter().product()
}

pub(crate) fn flatten(index: &[usize], shape: &[usize]) -> usize {
    index.iter().zip(shape).fold(0, |acc, (&i, &k)| acc * k + i)
}

pub(crate) fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut index = vec![0; shape.len()];
    for (slot, &k) in index.iter_mut().zip(shape).rev() {
        *slot = flat % k;
        flat /= k;
    }
    index
}

/// Coordinate along `axis` of the cell with flat index `flat`.
pub(crate) fn coordinate(flat: usize, shape: &[usize], axis: usize) -> usize {
    let stride: usize = shape[axis + 1..].iter().product();
    (flat / stride) % shape[axis]
}

/// `H_C(A|B) = Σ_i Σ_j m(b_j) φ(m(c_ij) / m(b_j))` for a tensor with axes
/// `(A, B)`. Columns with `m(b_j) = 0` contribute nothing.
pub fn conditional_entropy<S: Scalar>(
    tensor: &RefinementTensor<S>,
    state: &State<S>,
    base: LogBase,
) -> Result<EntropyValue> {
    if tensor.shape.len() != 2 {
        return Err(Error::InvalidTensor(
            "conditional entropy needs exactly two axes".into(),
        ));
    }
    let tol = tensor.space().tolerance();
    let (rows, cols) = (tensor.shape[0], tensor.shape[1]);
    let masses = tensor.masses(state)?;
    let given = tensor.axes[1].masses(state)?;
    let mut value = 0.0;
    for (j, mb) in given.iter().enumerate() {
        if !mb.is_positive(tol) {
            continue;
        }
        let ratios = (0..rows).map(|i| (masses[i * cols + j].clone() / mb.clone()).to_f64());
        value += mb.to_f64() * entropy_of_masses(ratios, base);
    }
    Ok(EntropyValue { value, base })
}

/// The constructive common refinement: row `i` spreads `a_i` over the
/// residual capacities `b_j - Σ_{i'<i} c_{i'j}` from left to right by
/// repeated Riesz decomposition; the last row takes the residuals.
pub fn refine_lemma1<S: Scalar>(a: &Partition<S>, b: &Partition<S>) -> Result<RefinementTensor<S>> {
    if !same_space(a.space(), b.space()) {
        return Err(Error::SpaceMismatch);
    }
    let space = a.space();
    let (rows, cols) = (a.len(), b.len());
    let mut residual: Vec<MvElement<S>> = b.elements.clone();
    let mut entries: Vec<MvElement<S>> = Vec::with_capacity(rows * cols);
    for (i, ai) in a.elements.iter().enumerate() {
        if i + 1 == rows {
            entries.append(&mut residual);
            break;
        }
        let mut remaining = ai.clone();
        for j in 0..cols {
            let cell = if j + 1 == cols {
                remaining.clone()
            } else {
                let rest = residual[j + 1..]
                    .iter()
                    .try_fold(MvElement::zero(space), |acc, r| acc.partial_add(r))?;
                let (d, e) = riesz_decompose(&remaining, &residual[j], &rest)?;
                remaining = e;
                d
            };
            residual[j] = residual[j].partial_sub(&cell)?;
            entries.push(cell);
        }
    }
    RefinementTensor::new(vec![a.clone(), b.clone()], entries)
}

/// The product refinement `{a_{i_1} · ... · a_{i_n}}` of the tribe's
/// pointwise product.
pub fn product_refine<S: Scalar>(parts: &[Partition<S>]) -> Result<RefinementTensor<S>> {
    let first = parts.first().ok_or(Error::InvalidTensor("no axes".into()))?;
    let space = Arc::clone(first.space());
    if parts.iter().any(|p| !same_space(p.space(), &space)) {
        return Err(Error::SpaceMismatch);
    }
    let shape: Vec<usize> = parts.iter().map(Partition::len).collect();
    let entries = (0..cell_count(&shape))
        .map(|flat| {
            let index = unflatten(flat, &shape);
            let values = (0..space.len())
                .map(|p| {
                    index
                        .iter()
                        .zip(parts)
                        .fold(S::one(), |acc, (&i, part)| acc * part.elements[i].value(p).clone())
                })
                .collect();
            MvElement::from_parts_unchecked(&space, values)
        })
        .collect();
    RefinementTensor::new(parts.to_vec(), entries)
}

/// `H(B‖A) = Σ_i Σ_j m(b_j) φ(m(a_i · b_j) / m(b_j))`.
pub fn h_parallel<S: Scalar>(
    b: &Partition<S>,
    a: &Partition<S>,
    state: &State<S>,
    base: LogBase,
) -> Result<EntropyValue> {
    if !same_space(a.space(), b.space()) {
        return Err(Error::SpaceMismatch);
    }
    let tol = a.space().tolerance();
    let mut value = 0.0;
    for bj in &b.elements {
        let mb = state.eval(bj)?;
        if !mb.is_positive(tol) {
            continue;
        }
        let ratios = a
            .elements
            .iter()
            .map(|ai| Ok((state.eval(&ai.product(bj)?)? / mb.clone()).to_f64()))
            .collect::<Result<Vec<f64>>>()?;
        value += mb.to_f64() * entropy_of_masses(ratios, base);
    }
    Ok(EntropyValue { value, base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    const LN2: f64 = std::f64::consts::LN_2;

    fn point() -> Arc<FiniteSpace<Rational>> {
        FiniteSpace::single_point()
    }

    fn part(space: &Arc<FiniteSpace<Rational>>, rows: &[&[(i64, i64)]]) -> Partition<Rational> {
        Partition::from_rows(
            space,
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn cell_values(t: &RefinementTensor<Rational>) -> Vec<Vec<Rational>> {
        t.entries().iter().map(|e| e.values().to_vec()).collect()
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0, LogBase::Natural).unwrap(), 0.0);
        assert_eq!(phi(1.0, LogBase::Natural).unwrap(), 0.0);
        // -0.5 ln 0.5 = 0.346573590279972654708616...
        assert!((phi(0.5, LogBase::Natural).unwrap() - 0.346_573_590_279_972_65).abs() < 1e-15);
        assert_eq!(phi(0.5, LogBase::Two).unwrap(), 0.5);
        assert!(matches!(phi(-0.1, LogBase::Natural), Err(Error::PhiDomain(_))));
        assert!(matches!(phi(1.1, LogBase::Natural), Err(Error::PhiDomain(_))));
    }

    #[test]
    fn entropy_examples() {
        let s = point();
        let m = State::new(&s);
        let base = LogBase::Natural;
        assert_eq!(entropy(&Partition::unit(&s), &m, base).unwrap().value, 0.0);
        let halves = part(&s, &[&[(1, 2)], &[(1, 2)]]);
        assert!((entropy(&halves, &m, base).unwrap().value - LN2).abs() < 1e-15);
        // φ(0.4) + φ(0.6), frozen from a 30-digit evaluation.
        let uneven = part(&s, &[&[(2, 5)], &[(3, 5)]]);
        assert!((entropy(&uneven, &m, base).unwrap().value - 0.673_011_667_009_256).abs() < 1e-12);
    }

    #[test]
    fn entropy_ignores_order_and_zero_cells() {
        let s = point();
        let m = State::new(&s);
        let a = part(&s, &[&[(1, 5)], &[(3, 10)], &[(1, 2)]]);
        let b = part(&s, &[&[(1, 2)], &[(0, 1)], &[(1, 5)], &[(3, 10)], &[(0, 1)]]);
        assert_eq!(
            entropy(&a, &m, LogBase::Natural).unwrap().value,
            entropy(&b, &m, LogBase::Natural).unwrap().value
        );
    }

    #[test]
    fn partitions_must_sum_to_unit() {
        let s = point();
        let r = Partition::from_rows(&s, vec![vec![ratio(1, 2)], vec![ratio(1, 3)]]);
        assert!(matches!(r, Err(Error::NotPartitionOfUnity { point: 0, .. })));
        assert_eq!(Partition::<Rational>::new(vec![]).unwrap_err(), Error::EmptyPartition);
    }

    #[test]
    fn conditional_entropy_examples() {
        let s = point();
        let m = State::new(&s);
        let base = LogBase::Natural;
        let a = part(&s, &[&[(1, 2)], &[(1, 2)]]);
        let b = part(&s, &[&[(2, 5)], &[(3, 5)]]);

        // Conditioning on {u}: the tensor is A as a single column.
        let col = RefinementTensor::new(vec![a.clone(), Partition::unit(&s)], a.elements().to_vec()).unwrap();
        let h = conditional_entropy(&col, &m, base).unwrap().value;
        assert!((h - LN2).abs() < 1e-15);

        let independent = product_refine(&[a.clone(), b.clone()]).unwrap();
        let h = conditional_entropy(&independent, &m, base).unwrap().value;
        assert!((h - LN2).abs() < 1e-12);

        // Rows (0.4, 0.1), (0, 0.5): 0.6 (φ(1/6) + φ(5/6)) = 0.2703367253197828...
        let c = RefinementTensor::from_cell_values(
            vec![a, b],
            vec![
                vec![ratio(2, 5)],
                vec![ratio(1, 10)],
                vec![ratio(0, 1)],
                vec![ratio(1, 2)],
            ],
        )
        .unwrap();
        let expected = 0.6 * (-(1.0f64 / 6.0) * (1.0f64 / 6.0).ln() - (5.0f64 / 6.0) * (5.0f64 / 6.0).ln());
        let h = conditional_entropy(&c, &m, base).unwrap().value;
        assert!((h - expected).abs() < 1e-12);
        assert!((h - 0.270_336_725_319_782_8).abs() < 1e-12);
    }

    #[test]
    fn constructive_refinement_examples() {
        let s = point();
        let a = part(&s, &[&[(1, 2)], &[(1, 2)]]);
        let b = part(&s, &[&[(2, 5)], &[(3, 5)]]);
        let c = refine_lemma1(&a, &b).unwrap();
        assert_eq!(
            cell_values(&c),
            vec![
                vec![ratio(2, 5)],
                vec![ratio(1, 10)],
                vec![ratio(0, 1)],
                vec![ratio(1, 2)]
            ]
        );

        let single = refine_lemma1(&Partition::unit(&s), &b).unwrap();
        assert_eq!(single.entries(), b.elements());

        let four = FiniteSpace::<Rational>::uniform(4).unwrap();
        let x = Partition::crisp(&four, &[vec![0, 1], vec![2, 3]]).unwrap();
        let y = Partition::crisp(&four, &[vec![0, 2], vec![1], vec![3]]).unwrap();
        let c = refine_lemma1(&x, &y).unwrap();
        assert_eq!(c, product_refine(&[x, y]).unwrap());
        let atoms: Vec<Vec<Rational>> = vec![
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 1],
        ]
        .into_iter()
        .map(|r| r.into_iter().map(|v| ratio(v, 1)).collect())
        .collect();
        assert_eq!(cell_values(&c), atoms);
    }

    #[test]
    fn constructive_refinement_in_float_mode_stays_within_tolerance() {
        let s = FiniteSpace::<f64>::from_weights(vec![0.3, 0.7]).unwrap();
        let a = Partition::from_rows(&s, vec![vec![0.1, 0.35], vec![0.2, 0.4], vec![0.7, 0.25]]).unwrap();
        let b = Partition::from_rows(&s, vec![vec![0.3, 0.6], vec![0.7, 0.4]]).unwrap();
        refine_lemma1(&a, &b).unwrap().validate().unwrap();
    }

    #[test]
    fn product_refinement_examples() {
        let s = point();
        let a = part(&s, &[&[(1, 2)], &[(1, 2)]]);
        let one = product_refine(std::slice::from_ref(&a)).unwrap();
        assert_eq!(one.entries(), a.elements());
        let pair = product_refine(&[a.clone(), a]).unwrap();
        assert!(cell_values(&pair).iter().all(|v| v == &vec![ratio(1, 4)]));
        assert_eq!(pair.entry(&[1, 0]).values(), &[ratio(1, 4)]);
    }

    #[test]
    fn tensors_reject_bad_marginals() {
        let s = point();
        let a = part(&s, &[&[(1, 2)], &[(1, 2)]]);
        let bad = RefinementTensor::from_cell_values(
            vec![a.clone(), a.clone()],
            vec![
                vec![ratio(1, 2)],
                vec![ratio(0, 1)],
                vec![ratio(1, 4)],
                vec![ratio(1, 4)],
            ],
        );
        assert!(matches!(bad, Err(Error::MarginalMismatch { .. })));
        let short = RefinementTensor::from_cell_values(vec![a.clone(), a], vec![vec![ratio(1, 2)]]);
        assert!(matches!(short, Err(Error::InvalidTensor(_))));
    }

    #[test]
    fn tau_partition_examples() {
        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        let a = Partition::crisp(&two, &[vec![0], vec![1]]).unwrap();
        assert_eq!(tau_partition(&Transformation::identity(&two), &a).unwrap(), a);
        let swap = Transformation::new(&two, vec![1, 0]).unwrap();
        let swapped = tau_partition(&swap, &a).unwrap();
        assert_eq!(swapped, Partition::crisp(&two, &[vec![1], vec![0]]).unwrap());
    }

    #[test]
    fn idempotence() {
        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        assert!(Partition::crisp(&two, &[vec![0], vec![1]]).unwrap().is_idempotent());
        assert!(!part(&point(), &[&[(1, 2)], &[(1, 2)]]).is_idempotent());
        let mixed = Partition::from_rows(
            &two,
            vec![vec![ratio(1, 1), ratio(1, 2)], vec![ratio(0, 1), ratio(1, 2)]],
        )
        .unwrap();
        assert!(!mixed.is_idempotent());
    }

    #[test]
    fn h_parallel_examples() {
        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        let m = State::new(&two);
        let base = LogBase::Natural;
        let a = Partition::crisp(&two, &[vec![0], vec![1]]).unwrap();
        let b = Partition::from_rows(
            &two,
            vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 2), ratio(1, 2)]],
        )
        .unwrap();
        assert_eq!(h_parallel(&b, &Partition::unit(&two), &m, base).unwrap().value, 0.0);
        let h_a = entropy(&a, &m, base).unwrap().value;
        assert_eq!(h_parallel(&Partition::unit(&two), &a, &m, base).unwrap().value, h_a);
        assert!((h_parallel(&b, &a, &m, base).unwrap().value - LN2).abs() < 1e-15);
    }

    #[test]
    fn index_helpers_round_trip() {
        let shape = [2, 3, 4];
        for flat in 0..24 {
            let idx = unflatten(flat, &shape);
            assert_eq!(flatten(&idx, &shape), flat);
            for axis in 0..3 {
                assert_eq!(coordinate(flat, &shape, axis), idx[axis]);
            }
        }
    }
}
