//! The graded algebra at a single fiber: finitely supported maps from
//! `Z^n` to fiber values, with the cocycle-deformed convolution product.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::cocycle::{make_bicharacter, Cocycle, SkewForm};
use crate::error::{check_rank, Error, Result};
use crate::index::MultiIndex;
use crate::PRUNE_THRESHOLD;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiberKind {
    Scalar,
    /// `k x k` complex matrices, `k >= 1`.
    Matrix(usize),
}

impl FiberKind {
    /// Side length of the fiber block (1 for scalars).
    pub fn dim(self) -> usize {
        match self {
            FiberKind::Scalar => 1,
            FiberKind::Matrix(k) => k,
        }
    }
}

impl fmt::Display for FiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberKind::Scalar => write!(f, "scalar"),
            FiberKind::Matrix(k) => write!(f, "{k}x{k} matrix"),
        }
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    k: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(k: usize, data: Vec<Complex64>) -> Result<Self> {
        if k == 0 || data.len() != k * k {
            return Err(Error::InvalidArgument(format!(
                "matrix of side {k} needs {} entries, got {}",
                k * k,
                data.len()
            )));
        }
        Ok(CMatrix { k, data })
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![ZERO; k * k];
        for i in 0..k {
            data[i * k + i] = ONE;
        }
        CMatrix { k, data }
    }

    pub fn zeros(k: usize) -> Self {
        CMatrix {
            k,
            data: vec![ZERO; k * k],
        }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.k + j]
    }

    fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        let k = self.k;
        let mut out = vec![ZERO; k * k];
        for i in 0..k {
            for l in 0..k {
                let a = self.data[i * k + l];
                for j in 0..k {
                    out[i * k + j] += a * rhs.data[l * k + j];
                }
            }
        }
        CMatrix { k, data: out }
    }

    fn adjoint(&self) -> CMatrix {
        let k = self.k;
        let mut out = vec![ZERO; k * k];
        for i in 0..k {
            for j in 0..k {
                out[j * k + i] = self.data[i * k + j].conj();
            }
        }
        CMatrix { k, data: out }
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A fiber coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberValue {
    Scalar(Complex64),
    Matrix(CMatrix),
}

impl FiberValue {
    pub fn kind(&self) -> FiberKind {
        match self {
            FiberValue::Scalar(_) => FiberKind::Scalar,
            FiberValue::Matrix(m) => FiberKind::Matrix(m.k),
        }
    }

    pub fn identity(kind: FiberKind) -> Self {
        match kind {
            FiberKind::Scalar => FiberValue::Scalar(ONE),
            FiberKind::Matrix(k) => FiberValue::Matrix(CMatrix::identity(k)),
        }
    }

    pub fn zero(kind: FiberKind) -> Self {
        match kind {
            FiberKind::Scalar => FiberValue::Scalar(ZERO),
            FiberKind::Matrix(k) => FiberValue::Matrix(CMatrix::zeros(k)),
        }
    }

    /// Modulus for scalars, Frobenius norm for matrices.
    pub fn norm(&self) -> f64 {
        match self {
            FiberValue::Scalar(z) => z.norm(),
            FiberValue::Matrix(m) => m.frobenius(),
        }
    }

    /// Fiber product. Kinds must agree (checked by callers).
    pub fn mul(&self, rhs: &FiberValue) -> FiberValue {
        match (self, rhs) {
            (FiberValue::Scalar(a), FiberValue::Scalar(b)) => FiberValue::Scalar(a * b),
            (FiberValue::Matrix(a), FiberValue::Matrix(b)) => FiberValue::Matrix(a.matmul(b)),
            _ => unreachable!("fiber kinds checked before multiplication"),
        }
    }

    pub fn scale(&self, s: Complex64) -> FiberValue {
        match self {
            FiberValue::Scalar(a) => FiberValue::Scalar(a * s),
            FiberValue::Matrix(m) => FiberValue::Matrix(CMatrix {
                k: m.k,
                data: m.data.iter().map(|z| z * s).collect(),
            }),
        }
    }

    pub fn add_assign(&mut self, rhs: &FiberValue) {
        match (self, rhs) {
            (FiberValue::Scalar(a), FiberValue::Scalar(b)) => *a += b,
            (FiberValue::Matrix(a), FiberValue::Matrix(b)) => {
                for (x, y) in a.data.iter_mut().zip(&b.data) {
                    *x += y;
                }
            }
            _ => unreachable!("fiber kinds checked before addition"),
        }
    }

    /// Conjugate (scalar) or conjugate transpose (matrix).
    pub fn adjoint(&self) -> FiberValue {
        match self {
            FiberValue::Scalar(a) => FiberValue::Scalar(a.conj()),
            FiberValue::Matrix(m) => FiberValue::Matrix(m.adjoint()),
        }
    }

    /// Matrix-vector product in the fiber; scalars act by multiplication.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            FiberValue::Scalar(a) => v.iter().map(|x| a * x).collect(),
            FiberValue::Matrix(m) => {
                debug_assert_eq!(m.k, v.len());
                (0..m.k)
                    .map(|i| {
                        let mut acc = ZERO;
                        for j in 0..m.k {
                            acc += m.data[i * m.k + j] * v[j];
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    /// Sum of entries on the diagonal (the value itself for scalars).
    pub fn trace(&self) -> Complex64 {
        match self {
            FiberValue::Scalar(a) => *a,
            FiberValue::Matrix(m) => (0..m.k).map(|i| m.data[i * m.k + i]).sum(),
        }
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Complex64] {
        match self {
            FiberValue::Scalar(a) => std::slice::from_ref(a),
            FiberValue::Matrix(m) => &m.data,
        }
    }
}

/// One fiber of the algebra in its Fourier picture: a finitely supported
/// map `Z^n -> FiberValue`. Coefficients with norm below
/// [`PRUNE_THRESHOLD`] are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedElement {
    rank: usize,
    fiber: FiberKind,
    coeffs: BTreeMap<MultiIndex, FiberValue>,
}

impl GradedElement {
    pub fn zero(rank: usize, fiber: FiberKind) -> Self {
        GradedElement {
            rank,
            fiber,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds an element from `(degree, value)` pairs; repeated degrees are
    /// summed.
    pub fn from_terms(
        rank: usize,
        fiber: FiberKind,
        terms: impl IntoIterator<Item = (MultiIndex, FiberValue)>,
    ) -> Result<Self> {
        if let FiberKind::Matrix(0) = fiber {
            return Err(Error::FiberMismatch("matrix fibers need k >= 1".into()));
        }
        let mut coeffs: BTreeMap<MultiIndex, FiberValue> = BTreeMap::new();
        for (idx, value) in terms {
            check_rank(rank, idx.rank())?;
            if value.kind() != fiber {
                return Err(Error::FiberMismatch(format!(
                    "coefficient at {idx} is {}, element is {fiber}",
                    value.kind()
                )));
            }
            match coeffs.get_mut(&idx) {
                Some(v) => v.add_assign(&value),
                None => {
                    coeffs.insert(idx, value);
                }
            }
        }
        Ok(Self::pruned(rank, fiber, coeffs))
    }

    /// Scalar element from `(degree, value)` pairs.
    pub fn scalar(rank: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        Self::from_terms(
            rank,
            FiberKind::Scalar,
            terms.into_iter().map(|(i, z)| (i, FiberValue::Scalar(z))),
        )
    }

    /// `δ_p` with the identity fiber value.
    pub fn delta(p: MultiIndex, fiber: FiberKind) -> Self {
        let rank = p.rank();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(p, FiberValue::identity(fiber));
        GradedElement { rank, fiber, coeffs }
    }

    /// The unit `δ_0`.
    pub fn unit(rank: usize, fiber: FiberKind) -> Self {
        Self::delta(MultiIndex::zero(rank), fiber)
    }

    fn pruned(rank: usize, fiber: FiberKind, mut coeffs: BTreeMap<MultiIndex, FiberValue>) -> Self {
        coeffs.retain(|_, v| v.norm() >= PRUNE_THRESHOLD);
        GradedElement { rank, fiber, coeffs }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fiber(&self) -> FiberKind {
        self.fiber
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Option<&FiberValue> {
        self.coeffs.get(idx)
    }

    /// Scalar coefficient at `idx` (zero when absent). Panics on matrix fibers.
    pub fn scalar_coeff(&self, idx: &MultiIndex) -> Complex64 {
        match self.coeffs.get(idx) {
            Some(FiberValue::Scalar(z)) => *z,
            Some(FiberValue::Matrix(_)) => panic!("scalar_coeff on a matrix-fibered element"),
            None => ZERO,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &FiberValue)> {
        self.coeffs.iter()
    }

    /// Sup-norm radius of the support (0 for the zero element).
    pub fn support_radius(&self) -> i64 {
        self.coeffs.keys().map(MultiIndex::radius).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &GradedElement) -> Result<()> {
        check_rank(self.rank, other.rank)?;
        if self.fiber != other.fiber {
            return Err(Error::FiberMismatch(format!(
                "cannot combine {} and {} fibers",
                self.fiber, other.fiber
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedElement) -> Result<GradedElement> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (idx, v) in &other.coeffs {
            match coeffs.get_mut(idx) {
                Some(w) => w.add_assign(v),
                None => {
                    coeffs.insert(idx.clone(), v.clone());
                }
            }
        }
        Ok(Self::pruned(self.rank, self.fiber, coeffs))
    }

    pub fn sub(&self, other: &GradedElement) -> Result<GradedElement> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> GradedElement {
        let coeffs = self.coeffs.iter().map(|(i, v)| (i.clone(), v.scale(s))).collect();
        Self::pruned(self.rank, self.fiber, coeffs)
    }

    /// `Σ_χ ‖a_χ‖`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(FiberValue::norm).sum()
    }

    /// `‖self - other‖₁`, or infinity when the two cannot be compared.
    pub fn l1_distance(&self, other: &GradedElement) -> f64 {
        self.sub(other).map_or(f64::INFINITY, |d| d.l1_norm())
    }

    /// Elements with matching structure where the fiber value is replaced
    /// by its trace; used to produce scalar probes from matrix elements.
    pub fn trace(&self) -> GradedElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, v)| (i.clone(), FiberValue::Scalar(v.trace())))
            .collect();
        Self::pruned(self.rank, FiberKind::Scalar, coeffs)
    }

    /// Isotypic part of degree `chi`.
    pub fn project(&self, chi: &MultiIndex) -> GradedElement {
        let mut coeffs = BTreeMap::new();
        if let Some(v) = self.coeffs.get(chi) {
            coeffs.insert(chi.clone(), v.clone());
        }
        GradedElement {
            rank: self.rank,
            fiber: self.fiber,
            coeffs,
        }
    }

    /// Multiplies the degree-χ coefficient by `f(χ)`.
    pub fn map_phases(&self, f: impl Fn(&MultiIndex) -> Complex64) -> GradedElement {
        let coeffs = self.coeffs.iter().map(|(i, v)| (i.clone(), v.scale(f(i)))).collect();
        Self::pruned(self.rank, self.fiber, coeffs)
    }
}

/// `(a ⋆ b)_χ = Σ_{χ₁+χ₂=χ} a_{χ₁} b_{χ₂} σ(χ₁, χ₂)`.
pub fn star(a: &GradedElement, b: &GradedElement, c: &Cocycle) -> Result<GradedElement> {
    a.check_compatible(b)?;
    check_rank(a.rank, c.rank())?;
    let mut acc: BTreeMap<MultiIndex, FiberValue> = BTreeMap::new();
    for (p, ap) in &a.coeffs {
        for (q, bq) in &b.coeffs {
            let term = ap.mul(bq).scale(c.phase(p, q));
            let deg = p + q;
            match acc.get_mut(&deg) {
                Some(v) => v.add_assign(&term),
                None => {
                    acc.insert(deg, term);
                }
            }
        }
    }
    Ok(GradedElement::pruned(a.rank, a.fiber, acc))
}

/// Convolution product: [`star`] with the trivial cocycle.
pub fn mul_undeformed(a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
    star(a, b, &Cocycle::trivial(a.rank))
}

/// `(a*)_χ = (a_{-χ})*`.
pub fn involution(a: &GradedElement) -> GradedElement {
    let coeffs = a.coeffs.iter().map(|(i, v)| (-i, v.adjoint())).collect();
    GradedElement {
        rank: a.rank,
        fiber: a.fiber,
        coeffs,
    }
}

/// `{a, b}(p) = -4π² Σ_{p₁+p₂=p} a(p₁) b(p₂) γ(p₁, p₂)`, scalar fibers only.
pub fn poisson(a: &GradedElement, b: &GradedElement, gamma: &SkewForm) -> Result<GradedElement> {
    a.check_compatible(b)?;
    check_rank(a.rank, gamma.rank())?;
    if a.fiber != FiberKind::Scalar {
        return Err(Error::FiberMismatch(
            "the Poisson bracket is defined for scalar fibers only".into(),
        ));
    }
    let mut acc: BTreeMap<MultiIndex, FiberValue> = BTreeMap::new();
    for (p, ap) in &a.coeffs {
        for (q, bq) in &b.coeffs {
            let g = gamma.gamma(p, q);
            if g == 0.0 {
                continue;
            }
            let term = ap.mul(bq).scale(Complex64::new(-4.0 * PI * PI * g, 0.0));
            let deg = p + q;
            match acc.get_mut(&deg) {
                Some(v) => v.add_assign(&term),
                None => {
                    acc.insert(deg, term);
                }
            }
        }
    }
    Ok(GradedElement::pruned(a.rank, a.fiber, acc))
}

/// The cocycle of the ħ-deformation: form `2πħγ`.
pub fn semiclassical_cocycle(gamma: &SkewForm, hbar: f64) -> Cocycle {
    make_bicharacter(gamma.scaled(2.0 * PI * hbar))
}

/// `‖(a ⋆_ħ b - b ⋆_ħ a)/(iħ) - {a, b}‖₁`.
pub fn semiclassical_defect(
    a: &GradedElement,
    b: &GradedElement,
    hbar: f64,
    gamma: &SkewForm,
) -> Result<f64> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    if a.fiber != FiberKind::Scalar {
        return Err(Error::FiberMismatch(
            "semiclassical defect needs scalar fibers".into(),
        ));
    }
    let c = semiclassical_cocycle(gamma, hbar);
    let commutator = star(a, b, &c)?.sub(&star(b, a, &c)?)?;
    let scaled = commutator.scale(Complex64::new(0.0, -1.0 / hbar));
    Ok(scaled.l1_distance(&poisson(a, b, gamma)?))
}

pub fn grading_support(a: &GradedElement) -> BTreeSet<MultiIndex> {
    a.coeffs.keys().cloned().collect()
}

/// `{p + q : p ∈ A, q ∈ B}`.
pub fn minkowski_sum(a: &BTreeSet<MultiIndex>, b: &BTreeSet<MultiIndex>) -> BTreeSet<MultiIndex> {
    a.iter().flat_map(|p| b.iter().map(move |q| p + q)).collect()
}
