//! The tribe of fuzzy sets over a finite probability space.
//!
//! A [`FiniteSpace`] carries point labels and probability weights. Elements
//! of the MV-algebra are functions from the points into `[0, 1]`
//! ([`MvElement`]); the unit is the constant one and the crisp elements are
//! indicator functions. A single-point space is the standard MV-algebra on
//! `[0, 1]`.
//!
//! States integrate against the weights and transformations act by
//! precomposition with a measure-preserving point map.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{NumericMode, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace<S> {
    ids: Vec<String>,
    weights: Vec<S>,
    tolerance: f64,
}

impl<S: Scalar> FiniteSpace<S> {
    /// Builds a space with the default float tolerance (ignored for exact
    /// scalars).
    pub fn new(ids: Vec<String>, weights: Vec<S>) -> Result<Arc<Self>> {
        Self::with_tolerance(ids, weights, NumericMode::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(ids: Vec<String>, weights: Vec<S>, tolerance: f64) -> Result<Arc<Self>> {
        if ids.is_empty() {
            return Err(Error::EmptySpace);
        }
        if ids.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: ids.len(),
                found: weights.len(),
            });
        }
        if !S::EXACT && !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "float tolerance must be positive, got {tolerance}"
            )));
        }
        let tolerance = if S::EXACT { 0.0 } else { tolerance };
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(Error::DuplicatePoint(id.clone()));
            }
        }
        if let Some(point) = weights.iter().position(|w| *w < S::zero()) {
            return Err(Error::NegativeWeight { point });
        }
        let sum = weights.iter().fold(S::zero(), |acc, w| acc + w.clone());
        if !sum.approx_eq(&S::one(), tolerance) {
            return Err(Error::WeightsNotNormalized { sum: sum.render() });
        }
        Ok(Arc::new(FiniteSpace {
            ids,
            weights,
            tolerance,
        }))
    }

    /// Points labelled `w0, w1, ...`.
    pub fn from_weights(weights: Vec<S>) -> Result<Arc<Self>> {
        let ids = (0..weights.len()).map(|i| format!("w{i}")).collect();
        Self::new(ids, weights)
    }

    pub fn uniform(n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let w = S::one() / S::from_rational(&crate::scalar::ratio(n as i64, 1));
        Self::from_weights(vec![w; n])
    }

    /// The standard MV-algebra `[0, 1]`.
    pub fn single_point() -> Arc<Self> {
        Self::from_weights(vec![S::one()]).expect("unit weight is valid")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, point: usize) -> &S {
        &self.weights[point]
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn numeric_mode(&self) -> NumericMode {
        if S::EXACT {
            NumericMode::ExactRational
        } else {
            NumericMode::Float64 {
                tolerance: self.tolerance,
            }
        }
    }
}

/// Structural identity: the same points with the same weights.
pub fn same_space<S: Scalar>(a: &Arc<FiniteSpace<S>>, b: &Arc<FiniteSpace<S>>) -> bool {
    Arc::ptr_eq(a, b) || (a.ids == b.ids && a.weights == b.weights)
}

fn ensure_same<S: Scalar>(a: &Arc<FiniteSpace<S>>, b: &Arc<FiniteSpace<S>>) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// A fuzzy set `f: points -> [0, 1]`.
#[derive(Debug, Clone)]
pub struct MvElement<S> {
    space: Arc<FiniteSpace<S>>,
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for MvElement<S> {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl<S: Scalar> MvElement<S> {
    pub fn new(space: &Arc<FiniteSpace<S>>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        let tol = space.tolerance();
        for (point, v) in values.iter().enumerate() {
            if !(S::zero().approx_le(v, tol) && v.approx_le(&S::one(), tol)) {
                return Err(Error::OutOfUnitInterval {
                    point,
                    value: v.render(),
                });
            }
        }
        Ok(MvElement {
            space: Arc::clone(space),
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(space: &Arc<FiniteSpace<S>>, values: Vec<S>) -> Self {
        debug_assert_eq!(values.len(), space.len());
        MvElement {
            space: Arc::clone(space),
            values,
        }
    }

    pub fn constant(space: &Arc<FiniteSpace<S>>, value: S) -> Result<Self> {
        Self::new(space, vec![value; space.len()])
    }

    pub fn unit(space: &Arc<FiniteSpace<S>>) -> Self {
        Self::from_parts_unchecked(space, vec![S::one(); space.len()])
    }

    pub fn zero(space: &Arc<FiniteSpace<S>>) -> Self {
        Self::from_parts_unchecked(space, vec![S::zero(); space.len()])
    }

    /// Indicator of a set of point indices.
    pub fn indicator(space: &Arc<FiniteSpace<S>>, points: &[usize]) -> Result<Self> {
        let mut values = vec![S::zero(); space.len()];
        for &p in points {
            if p >= space.len() {
                return Err(Error::MapOutOfRange { point: p, image: p });
            }
            values[p] = S::one();
        }
        Ok(Self::from_parts_unchecked(space, values))
    }

    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, point: usize) -> &S {
        &self.values[point]
    }

    /// `1 - a`.
    pub fn neg(&self) -> Self {
        let values = self.values.iter().map(|v| S::one() - v.clone()).collect();
        Self::from_parts_unchecked(&self.space, values)
    }

    /// Truncated sum `min(1, a + b)`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| S::min_of(&S::one(), &(a.clone() + b.clone())))
    }

    /// `max(0, a + b - 1)`.
    pub fn odot(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| S::max_of(&S::zero(), &(a.clone() + b.clone() - S::one())))
    }

    /// Pointwise minimum.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::min_of)
    }

    /// Pointwise maximum.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::max_of)
    }

    /// Pointwise product of fuzzy sets.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    /// Group addition restricted to the unit interval: defined only when
    /// `a + b <= 1` at every point.
    pub fn partial_add(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let tol = self.space.tolerance();
        let mut values = Vec::with_capacity(self.values.len());
        for (point, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            let s = a.clone() + b.clone();
            if !s.approx_le(&S::one(), tol) {
                return Err(Error::SumExceedsUnit { point });
            }
            values.push(s);
        }
        Ok(Self::from_parts_unchecked(&self.space, values))
    }

    /// `a - b`, defined when `b <= a` pointwise.
    pub fn partial_sub(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let tol = self.space.tolerance();
        let mut values = Vec::with_capacity(self.values.len());
        for (point, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            if !b.approx_le(a, tol) {
                return Err(Error::OutOfUnitInterval {
                    point,
                    value: (a.clone() - b.clone()).render(),
                });
            }
            values.push(S::max_of(&S::zero(), &(a.clone() - b.clone())));
        }
        Ok(Self::from_parts_unchecked(&self.space, values))
    }

    /// `a <= b` at every point.
    pub fn le(&self, other: &Self) -> Result<bool> {
        ensure_same(&self.space, &other.space)?;
        let tol = self.space.tolerance();
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a.approx_le(b, tol)))
    }

    /// Idempotent elements (`a ⊕ a = a`) are exactly the `{0, 1}`-valued ones.
    pub fn is_idempotent(&self) -> bool {
        let tol = self.space.tolerance();
        self.values
            .iter()
            .all(|v| v.is_approx_zero(tol) || v.approx_eq(&S::one(), tol))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self::from_parts_unchecked(&self.space, values))
    }
}

/// Splits `a <= b + c` into `d <= b`, `e <= c` with `d + e = a`, taking
/// `d = a ∧ b` and `e = a - d`. `b + c` may exceed the unit.
pub fn riesz_decompose<S: Scalar>(
    a: &MvElement<S>,
    b: &MvElement<S>,
    c: &MvElement<S>,
) -> Result<(MvElement<S>, MvElement<S>)> {
    ensure_same(&a.space, &b.space)?;
    ensure_same(&a.space, &c.space)?;
    let tol = a.space.tolerance();
    for point in 0..a.values.len() {
        let cap = b.values[point].clone() + c.values[point].clone();
        if !a.values[point].approx_le(&cap, tol) {
            return Err(Error::RieszPrecondition { point });
        }
    }
    let d = a.meet(b)?;
    let e_values = a
        .values
        .iter()
        .zip(&d.values)
        .map(|(x, y)| x.clone() - y.clone())
        .collect();
    let e = MvElement::from_parts_unchecked(&a.space, e_values);
    Ok((d, e))
}

/// The state `m(f) = Σ f(ω) P(ω)`.
#[derive(Debug, Clone)]
pub struct State<S> {
    space: Arc<FiniteSpace<S>>,
}

impl<S: Scalar> State<S> {
    pub fn new(space: &Arc<FiniteSpace<S>>) -> Self {
        State {
            space: Arc::clone(space),
        }
    }

    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        &self.space
    }

    pub fn eval(&self, a: &MvElement<S>) -> Result<S> {
        ensure_same(&self.space, &a.space)?;
        Ok(self.eval_values(&a.values))
    }

    pub(crate) fn eval_values(&self, values: &[S]) -> S {
        values
            .iter()
            .zip(&self.space.weights)
            .fold(S::zero(), |acc, (v, w)| acc + v.clone() * w.clone())
    }
}

/// `τ(f) = f ∘ T` for a measure-preserving point map `T`.
#[derive(Debug, Clone)]
pub struct Transformation<S> {
    space: Arc<FiniteSpace<S>>,
    map: Vec<usize>,
}

impl<S: Scalar> Transformation<S> {
    pub fn new(space: &Arc<FiniteSpace<S>>, map: Vec<usize>) -> Result<Self> {
        if map.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: map.len(),
            });
        }
        if let Some((point, &image)) = map.iter().enumerate().find(|(_, &t)| t >= space.len()) {
            return Err(Error::MapOutOfRange { point, image });
        }
        let mut pushed = vec![S::zero(); space.len()];
        for (point, &image) in map.iter().enumerate() {
            pushed[image] = pushed[image].clone() + space.weights[point].clone();
        }
        let tol = space.tolerance();
        for (point, (found, expected)) in pushed.iter().zip(&space.weights).enumerate() {
            if !found.approx_eq(expected, tol) {
                return Err(Error::NotMeasurePreserving {
                    point,
                    found: found.render(),
                    expected: expected.render(),
                });
            }
        }
        Ok(Transformation {
            space: Arc::clone(space),
            map,
        })
    }

    pub fn identity(space: &Arc<FiniteSpace<S>>) -> Self {
        Transformation {
            space: Arc::clone(space),
            map: (0..space.len()).collect(),
        }
    }

    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        &self.space
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: &MvElement<S>) -> Result<MvElement<S>> {
        ensure_same(&self.space, &a.space)?;
        let values = self.map.iter().map(|&t| a.values[t].clone()).collect();
        Ok(MvElement::from_parts_unchecked(&self.space, values))
    }

    /// `τ^k`, i.e. precomposition with `T^k`.
    pub fn power(&self, k: usize) -> Self {
        let map = (0..self.map.len())
            .map(|mut p| {
                for _ in 0..k {
                    p = self.map[p];
                }
                p
            })
            .collect();
        Transformation {
            space: Arc::clone(&self.space),
            map,
        }
    }
}

/// A finite space together with its state and a measure-preserving
/// transformation.
#[derive(Debug, Clone)]
pub struct DynamicalSystem<S> {
    space: Arc<FiniteSpace<S>>,
    state: State<S>,
    tau: Transformation<S>,
}

impl<S: Scalar> DynamicalSystem<S> {
    pub fn new(space: &Arc<FiniteSpace<S>>, map: Vec<usize>) -> Result<Self> {
        let tau = Transformation::new(space, map)?;
        Ok(Self::from_transformation(tau))
    }

    pub fn from_transformation(tau: Transformation<S>) -> Self {
        let space = Arc::clone(&tau.space);
        DynamicalSystem {
            state: State::new(&space),
            space,
            tau,
        }
    }

    pub fn identity(space: &Arc<FiniteSpace<S>>) -> Self {
        Self::from_transformation(Transformation::identity(space))
    }

    pub fn space(&self) -> &Arc<FiniteSpace<S>> {
        &self.space
    }

    pub fn state(&self) -> &State<S> {
        &self.state
    }

    pub fn tau(&self) -> &Transformation<S> {
        &self.tau
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn point() -> Arc<FiniteSpace<Rational>> {
        FiniteSpace::single_point()
    }

    fn el(space: &Arc<FiniteSpace<Rational>>, vals: &[(i64, i64)]) -> MvElement<Rational> {
        MvElement::new(space, vals.iter().map(|&(p, q)| ratio(p, q)).collect()).unwrap()
    }

    #[test]
    fn negation() {
        let s = point();
        assert_eq!(MvElement::unit(&s).neg(), MvElement::zero(&s));
        assert_eq!(el(&s, &[(3, 10)]).neg(), el(&s, &[(7, 10)]));
    }

    #[test]
    fn truncated_operations() {
        let s = point();
        let a = el(&s, &[(1, 2)]);
        let b = el(&s, &[(7, 10)]);
        assert_eq!(a.oplus(&b).unwrap(), MvElement::unit(&s));
        assert_eq!(a.odot(&b).unwrap(), el(&s, &[(1, 5)]));
        assert_eq!(a.oplus(&MvElement::zero(&s)).unwrap(), a);
    }

    #[test]
    fn partial_addition() {
        let s = point();
        let sum = el(&s, &[(2, 5)]).partial_add(&el(&s, &[(3, 5)])).unwrap();
        assert_eq!(sum, MvElement::unit(&s));
        let err = el(&s, &[(1, 2)]).partial_add(&el(&s, &[(7, 10)])).unwrap_err();
        assert_eq!(err, Error::SumExceedsUnit { point: 0 });

        let four = FiniteSpace::<Rational>::uniform(4).unwrap();
        let a = MvElement::indicator(&four, &[0, 2]).unwrap();
        let b = MvElement::indicator(&four, &[1]).unwrap();
        let union = MvElement::indicator(&four, &[0, 1, 2]).unwrap();
        assert_eq!(a.partial_add(&b).unwrap(), union);
        let err = a
            .partial_add(&MvElement::indicator(&four, &[3, 2]).unwrap())
            .unwrap_err();
        assert_eq!(err, Error::SumExceedsUnit { point: 2 });
    }

    #[test]
    fn riesz_examples() {
        let s = point();
        let (d, e) = riesz_decompose(&el(&s, &[(3, 10)]), &el(&s, &[(1, 5)]), &el(&s, &[(1, 2)])).unwrap();
        assert_eq!((d, e), (el(&s, &[(1, 5)]), el(&s, &[(1, 10)])));

        let z = MvElement::zero(&s);
        let (d, e) = riesz_decompose(&z, &el(&s, &[(1, 5)]), &el(&s, &[(1, 2)])).unwrap();
        assert_eq!((d, e), (z.clone(), z));

        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        let a = el(&two, &[(3, 5), (1, 10)]);
        let half = el(&two, &[(1, 2), (1, 2)]);
        let (d, e) = riesz_decompose(&a, &half, &half).unwrap();
        assert_eq!(d, el(&two, &[(1, 2), (1, 10)]));
        assert_eq!(e, el(&two, &[(1, 10), (0, 1)]));

        let err = riesz_decompose(&el(&s, &[(9, 10)]), &el(&s, &[(1, 5)]), &el(&s, &[(1, 2)])).unwrap_err();
        assert_eq!(err, Error::RieszPrecondition { point: 0 });
    }

    #[test]
    fn state_values() {
        let s = point();
        let m = State::new(&s);
        assert_eq!(m.eval(&MvElement::unit(&s)).unwrap(), ratio(1, 1));
        assert_eq!(m.eval(&MvElement::zero(&s)).unwrap(), ratio(0, 1));
        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        let a = el(&two, &[(1, 1), (0, 1)]);
        assert_eq!(State::new(&two).eval(&a).unwrap(), ratio(1, 2));
        assert_eq!(m.eval(&a).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn transformations() {
        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        let a = el(&two, &[(1, 1), (0, 1)]);
        assert_eq!(Transformation::identity(&two).apply(&a).unwrap(), a);
        let swap = Transformation::new(&two, vec![1, 0]).unwrap();
        assert_eq!(swap.apply(&a).unwrap(), el(&two, &[(0, 1), (1, 1)]));
        assert_eq!(swap.power(2).map(), &[0, 1]);
    }

    #[test]
    fn non_measure_preserving_maps_are_rejected() {
        let two = FiniteSpace::<Rational>::uniform(2).unwrap();
        assert!(matches!(
            Transformation::new(&two, vec![0, 0]),
            Err(Error::NotMeasurePreserving { point: 0, .. })
        ));
        assert!(matches!(
            Transformation::new(&two, vec![0, 2]),
            Err(Error::MapOutOfRange { point: 1, image: 2 })
        ));
        let skewed = FiniteSpace::from_weights(vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        assert!(Transformation::new(&skewed, vec![1, 0]).is_err());
        // Merging two points of weight 1/4 onto a point of weight 1/2.
        let merge = FiniteSpace::from_weights(vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)]).unwrap();
        assert!(Transformation::new(&merge, vec![2, 2, 0]).is_err());
        assert!(Transformation::new(&merge, vec![2, 2, 2]).is_err());
    }

    #[test]
    fn float_tolerance_applies_to_weights() {
        let ok = FiniteSpace::<f64>::from_weights(vec![0.1, 0.2, 0.7 + 1e-12]);
        assert!(ok.is_ok());
        let bad = FiniteSpace::<f64>::from_weights(vec![0.1, 0.2, 0.71]);
        assert!(matches!(bad, Err(Error::WeightsNotNormalized { .. })));
        assert!(FiniteSpace::<f64>::with_tolerance(vec!["a".into()], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn space_validation() {
        assert_eq!(
            FiniteSpace::<Rational>::from_weights(vec![]).unwrap_err(),
            Error::EmptySpace
        );
        assert!(matches!(
            FiniteSpace::new(vec!["a".into(), "a".into()], vec![ratio(1, 2), ratio(1, 2)]),
            Err(Error::DuplicatePoint(_))
        ));
        assert!(matches!(
            FiniteSpace::from_weights(vec![ratio(3, 2), ratio(-1, 2)]),
            Err(Error::NegativeWeight { point: 1 })
        ));
        assert!(matches!(
            MvElement::new(&point(), vec![ratio(3, 2)]),
            Err(Error::OutOfUnitInterval { point: 0, .. })
        ));
    }

    #[test]
    fn cross_space_operations_fail() {
        let a = MvElement::unit(&point());
        let b = MvElement::unit(&FiniteSpace::<Rational>::uniform(2).unwrap());
        assert_eq!(a.oplus(&b).unwrap_err(), Error::SpaceMismatch);
        // Structurally identical spaces are the same space.
        let c = MvElement::unit(&FiniteSpace::<Rational>::single_point());
        assert!(a.oplus(&c).is_ok());
    }
}
