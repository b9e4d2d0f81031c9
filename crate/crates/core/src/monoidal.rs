//! Twisting of graded tensor products, products and actions.
//!
//! On homogeneous components the twist by a skew form `γ_J` is the phase
//! `c_J(p, q) = exp(-πi γ_J(p, q))`. Deformed tensors, braidings, products
//! and actions all reduce to multiplying homogeneous pieces by that phase.
//!
//! [`GradedTensor`] keeps the accumulated phase of each component as a list
//! of exponents rather than a product of complex numbers. Exponents that
//! cancel exactly are dropped, which makes `Ψ_J ∘ Ψ_J` the identity exactly
//! instead of up to rounding.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{CMatrix, FiberKind, FiberValue, GradedElement};
use crate::cocycle::{unit_phase, Cocycle, SkewForm};
use crate::error::{check_rank, Error, Result};
use crate::hilbmod::{accumulate, ModuleElement};
use crate::index::MultiIndex;

/// A graded vector space element: degree `p` carries a vector in `C^d`.
/// Shares its representation with Hilbert-module elements.
pub type GradedVector = ModuleElement;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The twist parameter, a skew form on degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistJ {
    form: SkewForm,
}

impl TwistJ {
    pub fn new(form: SkewForm) -> Self {
        TwistJ { form }
    }

    pub fn zero(rank: usize) -> Self {
        TwistJ::new(SkewForm::zero(rank))
    }

    pub fn form(&self) -> &SkewForm {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    /// `J + K`
    pub fn add(&self, other: &TwistJ) -> Result<TwistJ> {
        Ok(TwistJ::new(self.form.add(&other.form)?))
    }

    /// The bicharacter with the same phases.
    pub fn cocycle(&self) -> Cocycle {
        crate::cocycle::make_bicharacter(self.form.clone())
    }

    fn exponent(&self, p: &MultiIndex, q: &MultiIndex) -> f64 {
        self.form.gamma(p, q)
    }
}

/// `c_J(p, q) = exp(-πi γ_J(p, q))`.
pub fn twist_c(j: &TwistJ, p: &MultiIndex, q: &MultiIndex) -> Result<Complex64> {
    Ok(unit_phase(j.form.checked_gamma(p, q)?))
}

/// One bihomogeneous component `x_p ⊗ y_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorComponent {
    /// Phase exponents `e` with total phase `exp(-πi Σ e)`.
    exponents: Vec<f64>,
    /// `rows x cols`, row-major.
    data: Vec<Complex64>,
}

impl TensorComponent {
    fn push_exponent(&mut self, e: f64) {
        if e == 0.0 {
            return;
        }
        match self.exponents.iter().position(|&x| x == -e) {
            Some(i) => {
                self.exponents.remove(i);
            }
            None => self.exponents.push(e),
        }
    }

    pub fn phase(&self) -> Complex64 {
        if self.exponents.is_empty() {
            Complex64::new(1.0, 0.0)
        } else {
            unit_phase(self.exponents.iter().sum())
        }
    }

    /// Raw data times the accumulated phase.
    pub fn values(&self) -> Vec<Complex64> {
        if self.exponents.is_empty() {
            return self.data.clone();
        }
        let s = self.phase();
        self.data.iter().map(|z| z * s).collect()
    }
}

/// Finite sum of bihomogeneous components of `V ⊗ W`, keyed by the
/// bidegree `(p, q)`; each component is a `d_V x d_W` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedTensor {
    rank: usize,
    rows: usize,
    cols: usize,
    components: BTreeMap<(MultiIndex, MultiIndex), TensorComponent>,
}

fn outer(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
}

impl GradedTensor {
    /// The untwisted tensor product `x ⊗ y`.
    pub fn simple(x: &GradedVector, y: &GradedVector) -> Result<Self> {
        check_rank(x.rank(), y.rank())?;
        let mut components = BTreeMap::new();
        for (p, xp) in x.iter() {
            for (q, yq) in y.iter() {
                components.insert(
                    (p.clone(), q.clone()),
                    TensorComponent {
                        exponents: Vec::new(),
                        data: outer(xp, yq),
                    },
                );
            }
        }
        Ok(GradedTensor {
            rank: x.rank(),
            rows: x.dim(),
            cols: y.dim(),
            components,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `(d_V, d_W)`
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, p: &MultiIndex, q: &MultiIndex) -> Option<&TensorComponent> {
        self.components.get(&(p.clone(), q.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &TensorComponent)> {
        self.components.iter()
    }

    /// Components with phases applied.
    pub fn values(&self) -> BTreeMap<(MultiIndex, MultiIndex), Vec<Complex64>> {
        self.components.iter().map(|(k, c)| (k.clone(), c.values())).collect()
    }

    /// Largest entrywise difference of the phased components; components
    /// present on one side only count against their full size.
    pub fn max_distance(&self, other: &GradedTensor) -> f64 {
        if self.shape() != other.shape() || self.rank != other.rank {
            return f64::INFINITY;
        }
        let (a, b) = (self.values(), other.values());
        let mut worst: f64 = 0.0;
        for (k, v) in &a {
            let w = b.get(k);
            for (i, z) in v.iter().enumerate() {
                worst = worst.max((z - w.map_or(ZERO, |w| w[i])).norm());
            }
        }
        for (k, w) in &b {
            if !a.contains_key(k) {
                worst = worst.max(w.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Multiplies each component `(p, q)` by `c_J(p, q)^sign`.
    fn twisted(&self, j: &TwistJ, sign: f64) -> Result<GradedTensor> {
        check_rank(self.rank, j.rank())?;
        let mut out = self.clone();
        for ((p, q), comp) in out.components.iter_mut() {
            comp.push_exponent(sign * j.exponent(p, q));
        }
        Ok(out)
    }

    /// The symmetric flip `V ⊗ W -> W ⊗ V`.
    pub fn flip(&self) -> GradedTensor {
        let (r, c) = (self.rows, self.cols);
        let components = self
            .components
            .iter()
            .map(|((p, q), comp)| {
                let mut data = vec![ZERO; r * c];
                for i in 0..r {
                    for j in 0..c {
                        data[j * r + i] = comp.data[i * c + j];
                    }
                }
                (
                    (q.clone(), p.clone()),
                    TensorComponent {
                        exponents: comp.exponents.clone(),
                        data,
                    },
                )
            })
            .collect();
        GradedTensor {
            rank: self.rank,
            rows: c,
            cols: r,
            components,
        }
    }
}

/// The consistency map `c_J`: scales the component `(p, q)` by `c_J(p, q)`.
pub fn consistency(j: &TwistJ, t: &GradedTensor) -> Result<GradedTensor> {
    t.twisted(j, 1.0)
}

/// `c_J^{-1}`
pub fn consistency_inverse(j: &TwistJ, t: &GradedTensor) -> Result<GradedTensor> {
    t.twisted(j, -1.0)
}

/// `x ⊗_J y`: the component at `(p, q)` is `c_J(p, q) x_p ⊗ y_q`.
pub fn deform_tensor(j: &TwistJ, x: &GradedVector, y: &GradedVector) -> Result<GradedTensor> {
    consistency(j, &GradedTensor::simple(x, y)?)
}

/// `Ψ_J = c_J^{-1} ∘ flip ∘ c_J` on a tensor.
pub fn braid(j: &TwistJ, t: &GradedTensor) -> Result<GradedTensor> {
    consistency_inverse(j, &consistency(j, t)?.flip())
}

/// `Ψ_J(x ⊗ y)`; the component `y_q ⊗ x_p` carries
/// `c_J(p, q) conj(c_J(q, p)) = exp(-2πi γ_J(p, q))`.
pub fn braiding_psi(j: &TwistJ, x: &GradedVector, y: &GradedVector) -> Result<GradedTensor> {
    braid(j, &GradedTensor::simple(x, y)?)
}

/// A bilinear, degree-additive product on graded vectors of dimension
/// [`dim`](GradedProduct::dim), given on bihomogeneous tensors.
pub trait GradedProduct {
    fn rank(&self) -> usize;
    fn dim(&self) -> usize;
    /// Product of the `dim x dim` row-major tensor `t` of bidegree `(p, q)`.
    /// Returns the degree the result lands in and its vector.
    fn mul_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>);
}

/// A bilinear, degree-additive action of graded vectors of dimension
/// `algebra_dim` on graded vectors of dimension `module_dim`.
pub trait GradedAction {
    fn rank(&self) -> usize;
    fn algebra_dim(&self) -> usize;
    fn module_dim(&self) -> usize;
    /// Action on the `algebra_dim x module_dim` row-major tensor `t` of
    /// bidegree `(p, q)`.
    fn act_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>);
}

/// Convolution of graded algebras with scalar (`dim = 1`) or `k x k`
/// matrix (`dim = k²`, row-major) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvolutionProduct {
    pub rank: usize,
    pub fiber: FiberKind,
}

impl GradedProduct for ConvolutionProduct {
    fn rank(&self) -> usize {
        self.rank
    }

    fn dim(&self) -> usize {
        let k = self.fiber.dim();
        k * k
    }

    fn mul_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>) {
        let k = self.fiber.dim();
        let d = k * k;
        let mut out = vec![ZERO; d];
        // (xy)_ij = Σ_l x_il y_lj, and t[(il), (lj)] = x_il y_lj
        for i in 0..k {
            for l in 0..k {
                for j in 0..k {
                    out[i * k + j] += t[(i * k + l) * d + l * k + j];
                }
            }
        }
        (p + q, out)
    }
}

/// Componentwise product `(x y)_i = x_i y_i` on `C^d`: commutative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointwiseProduct {
    pub rank: usize,
    pub dim: usize,
}

impl GradedProduct for PointwiseProduct {
    fn rank(&self) -> usize {
        self.rank
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn mul_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>) {
        (p + q, (0..self.dim).map(|i| t[i * self.dim + i]).collect())
    }
}

/// Fiber action of scalar or matrix coefficients on `C^m`, the action
/// underlying the Hilbert-module construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberAction {
    pub rank: usize,
    pub fiber: FiberKind,
    pub m: usize,
}

impl FiberAction {
    pub fn new(rank: usize, fiber: FiberKind, m: usize) -> Result<Self> {
        if let FiberKind::Matrix(k) = fiber {
            if k != m {
                return Err(Error::FiberMismatch(format!("{k}x{k} matrices cannot act on C^{m}")));
            }
        }
        Ok(FiberAction { rank, fiber, m })
    }
}

impl GradedAction for FiberAction {
    fn rank(&self) -> usize {
        self.rank
    }

    fn algebra_dim(&self) -> usize {
        let k = self.fiber.dim();
        k * k
    }

    fn module_dim(&self) -> usize {
        self.m
    }

    fn act_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>) {
        let m = self.m;
        let out = match self.fiber {
            FiberKind::Scalar => t[..m].to_vec(),
            FiberKind::Matrix(_) => (0..m)
                .map(|i| {
                    let mut acc = ZERO;
                    // t[(ij), l] = a_ij v_l
                    for j in 0..m {
                        acc += t[(i * m + j) * m + j];
                    }
                    acc
                })
                .collect(),
        };
        (p + q, out)
    }
}

/// `μ_J`: on bihomogeneous tensors, `μ_J = c_J(p, q) μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedProduct<P> {
    inner: P,
    j: TwistJ,
}

/// `α_J`: on bihomogeneous tensors, `α_J = c_J(p, q) α`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedAction<A> {
    inner: A,
    j: TwistJ,
}

pub fn deform_mul<P: GradedProduct>(mu: P, j: TwistJ) -> Result<DeformedProduct<P>> {
    check_rank(mu.rank(), j.rank())?;
    Ok(DeformedProduct { inner: mu, j })
}

pub fn deform_action<A: GradedAction>(alpha: A, j: TwistJ) -> Result<DeformedAction<A>> {
    check_rank(alpha.rank(), j.rank())?;
    Ok(DeformedAction { inner: alpha, j })
}

impl<P> DeformedProduct<P> {
    pub fn twist(&self) -> &TwistJ {
        &self.j
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<A> DeformedAction<A> {
    pub fn twist(&self) -> &TwistJ {
        &self.j
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }
}

impl<P: GradedProduct> GradedProduct for DeformedProduct<P> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn mul_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>) {
        let (deg, v) = self.inner.mul_tensor(p, q, t);
        let s = unit_phase(self.j.exponent(p, q));
        (deg, v.into_iter().map(|z| z * s).collect())
    }
}

impl<A: GradedAction> GradedAction for DeformedAction<A> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn algebra_dim(&self) -> usize {
        self.inner.algebra_dim()
    }

    fn module_dim(&self) -> usize {
        self.inner.module_dim()
    }

    fn act_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>) {
        let (deg, v) = self.inner.act_tensor(p, q, t);
        let s = unit_phase(self.j.exponent(p, q));
        (deg, v.into_iter().map(|z| z * s).collect())
    }
}

fn expect_degree(p: &MultiIndex, q: &MultiIndex, found: &MultiIndex) -> Result<()> {
    let expected = p + q;
    if &expected != found {
        return Err(Error::DegreeViolation {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

fn check_dim(what: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::FiberMismatch(format!("{what} expects C^{expected}, got C^{found}")));
    }
    Ok(())
}

/// `μ(x, y)` summed over homogeneous pieces.
pub fn multiply<P: GradedProduct + ?Sized>(mu: &P, x: &GradedVector, y: &GradedVector) -> Result<GradedVector> {
    check_rank(mu.rank(), x.rank())?;
    check_rank(mu.rank(), y.rank())?;
    check_dim("product", mu.dim(), x.dim())?;
    check_dim("product", mu.dim(), y.dim())?;
    let mut acc = BTreeMap::new();
    for (p, xp) in x.iter() {
        for (q, yq) in y.iter() {
            let (deg, v) = mu.mul_tensor(p, q, &outer(xp, yq));
            expect_degree(p, q, &deg)?;
            accumulate(&mut acc, deg, v);
        }
    }
    Ok(ModuleElement::pruned(x.rank(), mu.dim(), acc))
}

/// `μ` applied to a tensor (phases included), summed by total degree.
pub fn multiply_tensor<P: GradedProduct + ?Sized>(mu: &P, t: &GradedTensor) -> Result<GradedVector> {
    check_rank(mu.rank(), t.rank)?;
    check_dim("product", mu.dim(), t.rows)?;
    check_dim("product", mu.dim(), t.cols)?;
    let mut acc = BTreeMap::new();
    for ((p, q), comp) in &t.components {
        let (deg, v) = mu.mul_tensor(p, q, &comp.values());
        expect_degree(p, q, &deg)?;
        accumulate(&mut acc, deg, v);
    }
    Ok(ModuleElement::pruned(t.rank, mu.dim(), acc))
}

/// `α(a)[m]` summed over homogeneous pieces.
pub fn act<A: GradedAction + ?Sized>(alpha: &A, a: &GradedVector, m: &GradedVector) -> Result<GradedVector> {
    check_rank(alpha.rank(), a.rank())?;
    check_rank(alpha.rank(), m.rank())?;
    check_dim("action", alpha.algebra_dim(), a.dim())?;
    check_dim("action", alpha.module_dim(), m.dim())?;
    let mut acc = BTreeMap::new();
    for (p, ap) in a.iter() {
        for (q, mq) in m.iter() {
            let (deg, v) = alpha.act_tensor(p, q, &outer(ap, mq));
            expect_degree(p, q, &deg)?;
            accumulate(&mut acc, deg, v);
        }
    }
    Ok(ModuleElement::pruned(m.rank(), alpha.module_dim(), acc))
}

/// The monoidal unit: `C` concentrated in degree 0.
pub fn unit_object(rank: usize) -> GradedVector {
    ModuleElement::homogeneous(MultiIndex::zero(rank), vec![Complex64::new(1.0, 0.0)]).expect("nonzero unit vector")
}

/// Coefficients of an algebra element as graded vectors (row-major for
/// matrix fibers).
pub fn vector_from_element(a: &GradedElement) -> GradedVector {
    let k = a.fiber().dim();
    let mut coeffs = BTreeMap::new();
    for (p, v) in a.iter() {
        coeffs.insert(p.clone(), v.entries().to_vec());
    }
    ModuleElement::pruned(a.rank(), k * k, coeffs)
}

/// Inverse of [`vector_from_element`].
pub fn element_from_vector(v: &GradedVector, fiber: FiberKind) -> Result<GradedElement> {
    let k = fiber.dim();
    check_dim("element", k * k, v.dim())?;
    let terms = v
        .iter()
        .map(|(p, x)| {
            let value = match fiber {
                FiberKind::Scalar => FiberValue::Scalar(x[0]),
                FiberKind::Matrix(k) => FiberValue::Matrix(CMatrix::new(k, x.clone())?),
            };
            Ok((p.clone(), value))
        })
        .collect::<Result<Vec<_>>>()?;
    GradedElement::from_terms(v.rank(), fiber, terms)
}

impl fmt::Display for TwistJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J(n={}, {:?})", self.rank(), self.form.upper_entries())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::star;
    use crate::hilbmod::act_deformed;
    use crate::random;
    use rand::Rng;

    fn twist(rng: &mut impl Rng, n: usize) -> TwistJ {
        TwistJ::new(random::skew_form(rng, n, 1.0))
    }

    fn hom(rng: &mut impl Rng, n: usize, d: usize) -> GradedVector {
        let p = random::multi_index(rng, n, 5);
        ModuleElement::homogeneous(p, (0..d).map(|_| random::unit_disc(rng)).collect()).unwrap()
    }

    #[test]
    fn twist_basics() {
        let mut rng = random::seeded(1);
        let j = twist(&mut rng, 3);
        let k = twist(&mut rng, 3);
        let jk = j.add(&k).unwrap();
        let zero = MultiIndex::zero(3);
        for _ in 0..100 {
            let p = random::multi_index(&mut rng, 3, 10);
            let q = random::multi_index(&mut rng, 3, 10);
            assert_eq!(twist_c(&TwistJ::zero(3), &p, &q).unwrap(), Complex64::new(1.0, 0.0));
            assert_eq!(twist_c(&j, &zero, &q).unwrap(), Complex64::new(1.0, 0.0));
            assert_eq!(twist_c(&j, &p, &zero).unwrap(), Complex64::new(1.0, 0.0));
            let lhs = twist_c(&j, &p, &q).unwrap() * twist_c(&k, &p, &q).unwrap();
            assert!((lhs - twist_c(&jk, &p, &q).unwrap()).norm() < 1e-12);
            assert_eq!(twist_c(&j, &p, &q).unwrap(), j.cocycle().phase(&p, &q));
        }
        assert!(twist_c(&j, &MultiIndex::zero(2), &zero).is_err());
    }

    #[test]
    fn untwisted_tensor_is_plain() {
        let mut rng = random::seeded(2);
        let x = random::module_element(&mut rng, 2, 2, 3, 4);
        let y = random::module_element(&mut rng, 2, 3, 3, 4);
        let t = deform_tensor(&TwistJ::zero(2), &x, &y).unwrap();
        assert_eq!(t, GradedTensor::simple(&x, &y).unwrap());
        assert_eq!(t.len(), x.len() * y.len());
        let (p, xp) = x.iter().next().unwrap();
        let (q, yq) = y.iter().next().unwrap();
        assert_eq!(t.component(p, q).unwrap().values(), outer(xp, yq));
    }

    #[test]
    fn homogeneous_tensor_has_one_phase() {
        let mut rng = random::seeded(3);
        let j = twist(&mut rng, 2);
        let x = hom(&mut rng, 2, 2);
        let y = hom(&mut rng, 2, 2);
        let t = deform_tensor(&j, &x, &y).unwrap();
        assert_eq!(t.len(), 1);
        let ((p, q), comp) = t.iter().next().unwrap();
        let plain = outer(x.coeff(p).unwrap(), y.coeff(q).unwrap());
        let s = twist_c(&j, p, q).unwrap();
        for (z, w) in comp.values().iter().zip(&plain) {
            assert!((z - w * s).norm() < 1e-15);
        }
    }

    #[test]
    fn retwisting_adds_forms() {
        let mut rng = random::seeded(4);
        for _ in 0..20 {
            let j = twist(&mut rng, 3);
            let k = twist(&mut rng, 3);
            let x = random::module_element(&mut rng, 3, 2, 4, 5);
            let y = random::module_element(&mut rng, 3, 2, 4, 5);
            let twice = consistency(&k, &deform_tensor(&j, &x, &y).unwrap()).unwrap();
            let once = deform_tensor(&j.add(&k).unwrap(), &x, &y).unwrap();
            assert!(twice.max_distance(&once) < 1e-12);
        }
    }

    #[test]
    fn braiding_squares_to_identity_exactly() {
        let mut rng = random::seeded(5);
        for _ in 0..50 {
            let j = twist(&mut rng, 3);
            let x = random::module_element(&mut rng, 3, 2, 4, 4);
            let y = random::module_element(&mut rng, 3, 3, 4, 4);
            let t = GradedTensor::simple(&x, &y).unwrap();
            let once = braid(&j, &t).unwrap();
            assert_eq!(once.shape(), (3, 2));
            assert_eq!(braid(&j, &once).unwrap(), t);
        }
    }

    #[test]
    fn braiding_phase_is_double_twist() {
        let mut rng = random::seeded(6);
        let j = twist(&mut rng, 2);
        let x = hom(&mut rng, 2, 1);
        let y = hom(&mut rng, 2, 1);
        let (p, q) = (x.iter().next().unwrap().0.clone(), y.iter().next().unwrap().0.clone());
        let psi = braiding_psi(&j, &x, &y).unwrap();
        let got = psi.component(&q, &p).unwrap().values()[0];
        let want = x.coeff(&p).unwrap()[0] * y.coeff(&q).unwrap()[0] * unit_phase(2.0 * j.form().gamma(&p, &q));
        assert!((got - want).norm() < 1e-14);
        let plain = braiding_psi(&TwistJ::zero(2), &x, &y).unwrap();
        assert_eq!(plain, GradedTensor::simple(&y, &x).unwrap());
    }

    #[test]
    fn matches_star_bit_for_bit() {
        let mut rng = random::seeded(7);
        for fiber in [FiberKind::Scalar, FiberKind::Matrix(2), FiberKind::Matrix(3)] {
            for _ in 0..20 {
                let j = twist(&mut rng, 2);
                let a = random::element(&mut rng, 2, fiber, 4, 8);
                let b = random::element(&mut rng, 2, fiber, 4, 8);
                let mu = deform_mul(ConvolutionProduct { rank: 2, fiber }, j.clone()).unwrap();
                let v = multiply(&mu, &vector_from_element(&a), &vector_from_element(&b)).unwrap();
                let via_star = star(&a, &b, &j.cocycle()).unwrap();
                assert_eq!(element_from_vector(&v, fiber).unwrap(), via_star);
            }
        }
    }

    #[test]
    fn matches_act_deformed_bit_for_bit() {
        let mut rng = random::seeded(8);
        for (fiber, m) in [(FiberKind::Scalar, 1), (FiberKind::Scalar, 3), (FiberKind::Matrix(2), 2)] {
            for _ in 0..20 {
                let j = twist(&mut rng, 2);
                let a = random::element(&mut rng, 2, fiber, 4, 8);
                let psi = random::module_element(&mut rng, 2, m, 4, 8);
                let alpha = deform_action(FiberAction::new(2, fiber, m).unwrap(), j.clone()).unwrap();
                let got = act(&alpha, &vector_from_element(&a), &psi).unwrap();
                assert_eq!(got, act_deformed(&a, &psi, &j.cocycle()).unwrap());
            }
        }
    }

    #[test]
    fn functor_composition() {
        let mut rng = random::seeded(9);
        for _ in 0..100 {
            let j = twist(&mut rng, 3);
            let k = twist(&mut rng, 3);
            let base = ConvolutionProduct {
                rank: 3,
                fiber: FiberKind::Matrix(2),
            };
            let nested = deform_mul(deform_mul(base, j.clone()).unwrap(), k.clone()).unwrap();
            let direct = deform_mul(base, j.add(&k).unwrap()).unwrap();
            let x = hom(&mut rng, 3, 4);
            let y = hom(&mut rng, 3, 4);
            let lhs = multiply(&nested, &x, &y).unwrap();
            let rhs = multiply(&direct, &x, &y).unwrap();
            assert!(lhs.l1_distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn braided_commutativity() {
        let mut rng = random::seeded(10);
        for _ in 0..50 {
            let j = twist(&mut rng, 2);
            let mu = deform_mul(PointwiseProduct { rank: 2, dim: 3 }, j.clone()).unwrap();
            let x = hom(&mut rng, 2, 3);
            let y = hom(&mut rng, 2, 3);
            let plain = multiply_tensor(&mu, &GradedTensor::simple(&x, &y).unwrap()).unwrap();
            let braided = multiply_tensor(&mu, &braiding_psi(&j, &x, &y).unwrap()).unwrap();
            assert!(plain.l1_distance(&braided) < 1e-12);
            assert_eq!(plain, multiply(&mu, &x, &y).unwrap());
        }
    }

    #[test]
    fn deformed_product_is_not_commutative() {
        let j = TwistJ::new(SkewForm::planar(0.25));
        let mu = deform_mul(PointwiseProduct { rank: 2, dim: 1 }, j).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let u = ModuleElement::homogeneous(MultiIndex::from([1, 0]), vec![one]).unwrap();
        let v = ModuleElement::homogeneous(MultiIndex::from([0, 1]), vec![one]).unwrap();
        assert!(multiply(&mu, &u, &v).unwrap().l1_distance(&multiply(&mu, &v, &u).unwrap()) > 1.0);
    }

    #[test]
    fn transported_module_associativity() {
        let mut rng = random::seeded(11);
        for _ in 0..50 {
            let j = twist(&mut rng, 2);
            let fiber = FiberKind::Matrix(2);
            let mu = deform_mul(ConvolutionProduct { rank: 2, fiber }, j.clone()).unwrap();
            let alpha = deform_action(FiberAction::new(2, fiber, 2).unwrap(), j.clone()).unwrap();
            let a = hom(&mut rng, 2, 4);
            let b = hom(&mut rng, 2, 4);
            let m = hom(&mut rng, 2, 2);
            let lhs = act(&alpha, &multiply(&mu, &a, &b).unwrap(), &m).unwrap();
            let rhs = act(&alpha, &a, &act(&alpha, &b, &m).unwrap()).unwrap();
            assert!(lhs.l1_distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn unit_object_is_a_unit() {
        let mut rng = random::seeded(12);
        let j = twist(&mut rng, 2);
        let e = unit_object(2);
        let x = random::module_element(&mut rng, 2, 1, 4, 6);
        let left = deform_tensor(&j, &e, &x).unwrap();
        let right = deform_tensor(&j, &x, &e).unwrap();
        for ((p, q), comp) in left.iter() {
            assert!(p.is_zero());
            assert_eq!(comp.values(), x.coeff(q).unwrap());
        }
        for ((p, q), comp) in right.iter() {
            assert!(q.is_zero());
            assert_eq!(comp.values(), x.coeff(p).unwrap());
        }
    }

    struct Skewed;

    impl GradedProduct for Skewed {
        fn rank(&self) -> usize {
            1
        }
        fn dim(&self) -> usize {
            1
        }
        fn mul_tensor(&self, p: &MultiIndex, q: &MultiIndex, t: &[Complex64]) -> (MultiIndex, Vec<Complex64>) {
            (&(p + q) + &MultiIndex::from([1]), vec![t[0]])
        }
    }

    #[test]
    fn degree_violation_is_reported() {
        let x = unit_object(1);
        let mu = deform_mul(Skewed, TwistJ::zero(1)).unwrap();
        assert!(matches!(multiply(&mu, &x, &x), Err(Error::DegreeViolation { .. })));
    }

    #[test]
    fn vector_element_round_trip() {
        let mut rng = random::seeded(13);
        let a = random::element(&mut rng, 2, FiberKind::Matrix(2), 3, 6);
        assert_eq!(element_from_vector(&vector_from_element(&a), a.fiber()).unwrap(), a);
    }
}
