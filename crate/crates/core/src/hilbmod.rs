//! Graded Hilbert modules over the deformed algebra.
//!
//! A module element is a finitely supported map `Z^n -> C^m`. Matrix-fibered
//! elements (`m x m`) act on it by the deformed convolution, scalar elements
//! act by scalar multiplication. The scalar-valued inner product
//!
//! ```text
//! ⟨ψ, φ⟩_χ = Σ_{χ₂ - χ₁ = χ} ⟨ψ_{χ₁}, φ_{χ₂}⟩ σ(-χ₁, χ₂)
//! ```
//!
//! is `ψ* ⋆ φ` with `ψ` read as a column-valued element. It is conjugate
//! linear in the first slot, right linear for the scalar deformed algebra
//! acting on the right, and left actions are adjointable:
//! `⟨a·ψ, φ⟩ = ⟨ψ, a*·φ⟩`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{self, FiberKind, FiberValue, GradedElement};
use crate::cocycle::Cocycle;
use crate::error::{check_rank, Error, Result};
use crate::index::MultiIndex;
use crate::rep::{self, TruncationBox};
use crate::verify::{Check, Report};
use crate::PRUNE_THRESHOLD;

fn vec_norm(v: &[Complex64]) -> f64 {
    if v.len() == 1 {
        v[0].norm()
    } else {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub(crate) fn accumulate(acc: &mut BTreeMap<MultiIndex, Vec<Complex64>>, deg: MultiIndex, v: Vec<Complex64>) {
    match acc.get_mut(&deg) {
        Some(w) => {
            for (x, y) in w.iter_mut().zip(&v) {
                *x += y;
            }
        }
        None => {
            acc.insert(deg, v);
        }
    }
}

/// Finitely supported map `Z^n -> C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement {
    rank: usize,
    m: usize,
    coeffs: BTreeMap<MultiIndex, Vec<Complex64>>,
}

impl ModuleElement {
    pub fn zero(rank: usize, m: usize) -> Self {
        ModuleElement {
            rank,
            m,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        rank: usize,
        m: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Vec<Complex64>)>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("module fiber dimension must be >= 1".into()));
        }
        let mut coeffs = BTreeMap::new();
        for (idx, v) in terms {
            check_rank(rank, idx.rank())?;
            if v.len() != m {
                return Err(Error::FiberMismatch(format!(
                    "vector at {idx} has length {}, module fiber is C^{m}",
                    v.len()
                )));
            }
            accumulate(&mut coeffs, idx, v);
        }
        Ok(Self::pruned(rank, m, coeffs))
    }

    /// `δ_p ⊗ v`.
    pub fn homogeneous(p: MultiIndex, v: Vec<Complex64>) -> Result<Self> {
        let rank = p.rank();
        let m = v.len();
        Self::from_terms(rank, m, [(p, v)])
    }

    pub(crate) fn pruned(rank: usize, m: usize, mut coeffs: BTreeMap<MultiIndex, Vec<Complex64>>) -> Self {
        coeffs.retain(|_, v| vec_norm(v) >= PRUNE_THRESHOLD);
        ModuleElement { rank, m, coeffs }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Fiber dimension `m`.
    pub fn dim(&self) -> usize {
        self.m
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

    pub fn coeff(&self, idx: &MultiIndex) -> Option<&[Complex64]> {
        self.coeffs.get(idx).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Vec<Complex64>)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> std::collections::BTreeSet<MultiIndex> {
        self.coeffs.keys().cloned().collect()
    }

    fn check_compatible(&self, other: &ModuleElement) -> Result<()> {
        check_rank(self.rank, other.rank)?;
        if self.m != other.m {
            return Err(Error::FiberMismatch(format!(
                "module fibers C^{} and C^{} differ",
                self.m, other.m
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModuleElement) -> Result<ModuleElement> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (i, v) in &other.coeffs {
            accumulate(&mut coeffs, i.clone(), v.clone());
        }
        Ok(Self::pruned(self.rank, self.m, coeffs))
    }

    pub fn scale(&self, s: Complex64) -> ModuleElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, v)| (i.clone(), v.iter().map(|z| z * s).collect()))
            .collect();
        Self::pruned(self.rank, self.m, coeffs)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|v| vec_norm(v)).sum()
    }

    pub fn l1_distance(&self, other: &ModuleElement) -> f64 {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
            .map_or(f64::INFINITY, |d| d.l1_norm())
    }
}

fn check_action(a: &GradedElement, psi: &ModuleElement, c: &Cocycle) -> Result<()> {
    check_rank(a.rank(), psi.rank)?;
    check_rank(a.rank(), c.rank())?;
    match a.fiber() {
        FiberKind::Scalar => Ok(()),
        FiberKind::Matrix(k) if k == psi.m => Ok(()),
        FiberKind::Matrix(k) => Err(Error::FiberMismatch(format!(
            "{k}x{k} matrices cannot act on C^{}",
            psi.m
        ))),
    }
}

/// `(a ⋆ ψ)_χ = Σ_{χ₁+χ₂=χ} a_{χ₁} ψ_{χ₂} σ(χ₁, χ₂)`.
pub fn act_deformed(a: &GradedElement, psi: &ModuleElement, c: &Cocycle) -> Result<ModuleElement> {
    check_action(a, psi, c)?;
    let mut acc = BTreeMap::new();
    for (p, ap) in a.iter() {
        for (q, v) in &psi.coeffs {
            let s = c.phase(p, q);
            let w: Vec<Complex64> = ap.apply(v).into_iter().map(|x| x * s).collect();
            accumulate(&mut acc, p + q, w);
        }
    }
    Ok(ModuleElement::pruned(psi.rank, psi.m, acc))
}

/// Right action of the scalar deformed algebra, `(ψ ⋆ b)_χ = Σ ψ_{χ₁} b_{χ₂} σ(χ₁, χ₂)`.
pub fn act_right(psi: &ModuleElement, b: &GradedElement, c: &Cocycle) -> Result<ModuleElement> {
    check_rank(psi.rank, b.rank())?;
    check_rank(psi.rank, c.rank())?;
    if b.fiber() != FiberKind::Scalar {
        return Err(Error::FiberMismatch("right action needs a scalar element".into()));
    }
    let mut acc = BTreeMap::new();
    for (p, v) in &psi.coeffs {
        for (q, bq) in b.iter() {
            let s = bq.trace() * c.phase(p, q);
            accumulate(&mut acc, p + q, v.iter().map(|x| x * s).collect());
        }
    }
    Ok(ModuleElement::pruned(psi.rank, psi.m, acc))
}

/// Scalar-valued inner product `ψ* ⋆ φ`, conjugate linear in `psi`.
pub fn inner(psi: &ModuleElement, phi: &ModuleElement, c: &Cocycle) -> Result<GradedElement> {
    psi.check_compatible(phi)?;
    check_rank(psi.rank, c.rank())?;
    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for (p, x) in &psi.coeffs {
        let minus_p = -p;
        for (q, y) in &phi.coeffs {
            let pairing: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
            *acc.entry(q - p).or_default() += pairing * c.phase(&minus_p, q);
        }
    }
    GradedElement::scalar(psi.rank, acc)
}

/// Settings for [`verify_module_axioms_with`].
#[derive(Debug, Clone, Copy)]
pub struct ModuleCheckOptions {
    /// Box radius of the truncated Gram operator; `None` skips the
    /// positivity check.
    pub gram_radius: Option<i64>,
    pub tolerance: f64,
    pub symmetry_tolerance: f64,
    pub positivity_floor: f64,
}

impl Default for ModuleCheckOptions {
    fn default() -> Self {
        ModuleCheckOptions {
            gram_radius: Some(20),
            tolerance: 1e-10,
            symmetry_tolerance: 1e-12,
            positivity_floor: -1e-8,
        }
    }
}

pub fn verify_module_axioms(
    a: &GradedElement,
    b: &GradedElement,
    psi: &ModuleElement,
    phi: &ModuleElement,
    c: &Cocycle,
) -> Result<Report> {
    verify_module_axioms_with(a, b, psi, phi, c, &ModuleCheckOptions::default())
}

/// Checks the module laws on one set of inputs:
///
/// * `(a ⋆ b)·ψ = a·(b·ψ)`
/// * additivity of the action in each argument
/// * sesquilinearity of the inner product
/// * `⟨a·ψ, φ⟩ = ⟨ψ, a*·φ⟩` (star compatibility)
/// * `⟨ψ, φ ⋆ s⟩ = ⟨ψ, φ⟩ ⋆ s` for the scalar probe `s = tr(a)`
/// * `⟨ψ, φ⟩* = ⟨φ, ψ⟩`
/// * the truncated Gram operator of `⟨ψ, ψ⟩` is positive semidefinite
pub fn verify_module_axioms_with(
    a: &GradedElement,
    b: &GradedElement,
    psi: &ModuleElement,
    phi: &ModuleElement,
    c: &Cocycle,
    opts: &ModuleCheckOptions,
) -> Result<Report> {
    let tol = opts.tolerance;
    let mut report = Report::new("module");

    let ab = algebra::star(a, b, c)?;
    let lhs = act_deformed(&ab, psi, c)?;
    let rhs = act_deformed(a, &act_deformed(b, psi, c)?, c)?;
    report.push(Check::single("action associativity", tol, lhs.l1_distance(&rhs)));

    let sum_vec = act_deformed(a, &psi.add(phi)?, c)?;
    let split = act_deformed(a, psi, c)?.add(&act_deformed(a, phi, c)?)?;
    let sum_alg = act_deformed(&a.add(b)?, psi, c)?;
    let split_alg = act_deformed(a, psi, c)?.add(&act_deformed(b, psi, c)?)?;
    report.push(Check::single(
        "action additivity",
        tol,
        sum_vec.l1_distance(&split).max(sum_alg.l1_distance(&split_alg)),
    ));

    let z = Complex64::new(0.6, -0.8);
    let lin2 = inner(psi, &phi.add(&psi.scale(z))?, c)?;
    let lin2_split = inner(psi, phi, c)?.add(&inner(psi, psi, c)?.scale(z))?;
    let anti1 = inner(&psi.scale(z), phi, c)?;
    let anti1_split = inner(psi, phi, c)?.scale(z.conj());
    report.push(Check::single(
        "inner product sesquilinearity",
        tol,
        lin2.l1_distance(&lin2_split).max(anti1.l1_distance(&anti1_split)),
    ));

    let compat_l = inner(&act_deformed(a, psi, c)?, phi, c)?;
    let compat_r = inner(psi, &act_deformed(&algebra::involution(a), phi, c)?, c)?;
    report.push(Check::single("star compatibility", tol, compat_l.l1_distance(&compat_r)));

    let s = a.trace();
    let right_l = inner(psi, &act_right(phi, &s, c)?, c)?;
    let right_r = algebra::star(&inner(psi, phi, c)?, &s, c)?;
    report.push(Check::single("right linearity", tol, right_l.l1_distance(&right_r)));

    let sym = algebra::involution(&inner(psi, phi, c)?).l1_distance(&inner(phi, psi, c)?);
    report.push(Check::single("conjugate symmetry", opts.symmetry_tolerance, sym));

    if let Some(radius) = opts.gram_radius {
        let gram = inner(psi, psi, c)?;
        let min_eig = if gram.is_zero() {
            0.0
        } else {
            let bx = TruncationBox::new(radius, psi.rank)?;
            rep::spectrum(&gram, c, &bx)?.min()
        };
        report.push(Check::lower_bound("gram positivity", opts.positivity_floor, min_eig));
    }

    Ok(report)
}

/// Inner product of homogeneous vectors, handy in tests.
pub fn fiber_pairing(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

impl ModuleElement {
    /// A scalar element viewed as a module element with `m = 1`.
    pub fn from_scalar(a: &GradedElement) -> Result<Self> {
        if a.fiber() != FiberKind::Scalar {
            return Err(Error::FiberMismatch("only scalar elements embed into C^1".into()));
        }
        let coeffs = a
            .iter()
            .map(|(i, v)| match v {
                FiberValue::Scalar(z) => (i.clone(), vec![*z]),
                FiberValue::Matrix(_) => unreachable!(),
            })
            .collect();
        Ok(ModuleElement {
            rank: a.rank(),
            m: 1,
            coeffs,
        })
    }
}
