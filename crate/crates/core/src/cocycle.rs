//! Skew forms, the unimodular bicharacters they generate, and families of
//! them indexed by a base grid.
//!
//! A skew form `θ` on `Z^n` defines `γ(p, q) = Σ_ij θ_ij p_i q_j` and the
//! bicharacter `σ(p, q) = exp(-πi γ(p, q))`. Phases are always computed from
//! the real exponent in one step.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_rank, Error, Result};
use crate::field::BaseGrid;
use crate::index::MultiIndex;
use crate::verify::Check;

/// Antisymmetric real `n x n` matrix, stored as its strictly upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewForm {
    n: usize,
    // row-major strictly upper triangle: (0,1), (0,2), ..., (1,2), ...
    upper: Vec<f64>,
}

impl SkewForm {
    pub fn zero(n: usize) -> Self {
        SkewForm {
            n,
            upper: vec![0.0; n * n.saturating_sub(1) / 2],
        }
    }

    /// Builds a form from strictly-upper entries `(i, j, θ_ij)` with `i < j`.
    /// Entries not listed are zero; repeated entries overwrite.
    pub fn from_upper(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut form = SkewForm::zero(n);
        for &(i, j, v) in entries {
            if i >= j || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "skew form entry ({i}, {j}) is not strictly upper triangular for n = {n}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "skew form entry ({i}, {j}) is not finite"
                )));
            }
            form.upper[Self::slot(n, i, j)] = v;
        }
        Ok(form)
    }

    /// The rank-2 form with `θ₁₂ = theta`.
    pub fn planar(theta: f64) -> Self {
        SkewForm {
            n: 2,
            upper: vec![theta],
        }
    }

    fn slot(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < n);
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// `θ_ij` with `θ_ji = -θ_ij` and zero diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[Self::slot(self.n, i, j)],
            Greater => -self.upper[Self::slot(self.n, j, i)],
            Equal => 0.0,
        }
    }

    /// Nonzero strictly-upper entries in row-major order.
    pub fn upper_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.upper[Self::slot(self.n, i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, s: f64) -> SkewForm {
        SkewForm {
            n: self.n,
            upper: self.upper.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &SkewForm) -> Result<SkewForm> {
        check_rank(self.n, other.n)?;
        Ok(SkewForm {
            n: self.n,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        })
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `γ(p, q)`. Computed as `Σ_{i<j} θ_ij (p_i q_j - p_j q_i)` with the
    /// integer part exact, so `γ(q, p) == -γ(p, q)` and `γ(p, p) == 0` hold
    /// bit-for-bit.
    pub fn gamma(&self, p: &MultiIndex, q: &MultiIndex) -> f64 {
        debug_assert_eq!(p.rank(), self.n);
        debug_assert_eq!(q.rank(), self.n);
        let (p, q) = (p.entries(), q.entries());
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let wedge = p[i] * q[j] - p[j] * q[i];
                if wedge != 0 {
                    acc += self.upper[Self::slot(self.n, i, j)] * wedge as f64;
                }
            }
        }
        acc
    }

    pub fn checked_gamma(&self, p: &MultiIndex, q: &MultiIndex) -> Result<f64> {
        check_rank(self.n, p.rank())?;
        check_rank(self.n, q.rank())?;
        Ok(self.gamma(p, q))
    }
}

/// `exp(-πi e)`, with `unit_phase(-e) == conj(unit_phase(e))` exactly.
pub fn unit_phase(e: f64) -> Complex64 {
    if e == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if e < 0.0 {
        return unit_phase(-e).conj();
    }
    let (s, c) = (PI * (e % 2.0)).sin_cos();
    Complex64::new(c, -s)
}

/// A unit-modulus function on pairs of lattice points.
///
/// [`Cocycle`] is the only production implementor; the trait exists so the
/// cocycle checker can be pointed at arbitrary phase functions.
pub trait PhaseFunction {
    fn rank(&self) -> usize;
    fn phase(&self, p: &MultiIndex, q: &MultiIndex) -> Complex64;
}

/// The bicharacter `σ(p, q) = exp(-πi γ(p, q))` of a skew form.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    form: SkewForm,
}

impl Cocycle {
    pub fn trivial(n: usize) -> Self {
        Cocycle {
            form: SkewForm::zero(n),
        }
    }

    pub fn form(&self) -> &SkewForm {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    pub fn is_trivial(&self) -> bool {
        self.form.is_zero()
    }

    /// `σ(p, q)` without rank checks.
    #[inline]
    pub fn phase(&self, p: &MultiIndex, q: &MultiIndex) -> Complex64 {
        unit_phase(self.form.gamma(p, q))
    }

    pub fn evaluate(&self, p: &MultiIndex, q: &MultiIndex) -> Result<Complex64> {
        Ok(unit_phase(self.form.checked_gamma(p, q)?))
    }

    /// The skew form `2θ` whose exponent reproduces `σ(p, q) / σ(q, p)`.
    pub fn deformation_class(&self) -> SkewForm {
        self.form.scaled(2.0)
    }
}

impl PhaseFunction for Cocycle {
    fn rank(&self) -> usize {
        self.form.rank()
    }
    fn phase(&self, p: &MultiIndex, q: &MultiIndex) -> Complex64 {
        Cocycle::phase(self, p, q)
    }
}

pub fn make_bicharacter(gamma: SkewForm) -> Cocycle {
    Cocycle { form: gamma }
}

/// Same as [`make_bicharacter`], checked against the rank of the lattice it
/// will be used on.
pub fn make_bicharacter_for(gamma: SkewForm, rank: usize) -> Result<Cocycle> {
    check_rank(rank, gamma.rank())?;
    Ok(Cocycle { form: gamma })
}

pub fn deformation_class(c: &Cocycle) -> SkewForm {
    c.deformation_class()
}

/// Samples `sample_count` triples in the box of radius `box_radius` and
/// checks `σ(p,q) σ(p+q,r) = σ(q,r) σ(p,q+r)`.
pub fn verify_cocycle_identity<C: PhaseFunction + ?Sized, R: Rng + ?Sized>(
    c: &C,
    sample_count: usize,
    box_radius: i64,
    rng: &mut R,
) -> Check {
    const TOL: f64 = 1e-12;
    let n = c.rank();
    let mut check = Check::new("cocycle identity", TOL);
    for _ in 0..sample_count {
        let p = crate::random::multi_index(rng, n, box_radius);
        let q = crate::random::multi_index(rng, n, box_radius);
        let r = crate::random::multi_index(rng, n, box_radius);
        let lhs = c.phase(&p, &q) * c.phase(&(&p + &q), &r);
        let rhs = c.phase(&q, &r) * c.phase(&p, &(&q + &r));
        check.record((lhs - rhs).norm(), || format!("p={p} q={q} r={r}"));
    }
    check
}

/// One skew form per point of a base grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleFamily {
    grid: Arc<BaseGrid>,
    forms: Vec<SkewForm>,
}

impl CocycleFamily {
    pub fn new(grid: Arc<BaseGrid>, forms: Vec<SkewForm>) -> Result<Self> {
        if forms.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "family has {} forms for a grid of {} points",
                forms.len(),
                grid.len()
            )));
        }
        if let Some(first) = forms.first() {
            for f in &forms[1..] {
                check_rank(first.rank(), f.rank())?;
            }
        }
        Ok(CocycleFamily { grid, forms })
    }

    /// A family whose form at each grid point is produced by `f`.
    pub fn from_fn(grid: Arc<BaseGrid>, f: impl Fn(usize) -> SkewForm) -> Result<Self> {
        let forms = (0..grid.len()).map(f).collect();
        Self::new(grid, forms)
    }

    pub fn grid(&self) -> &Arc<BaseGrid> {
        &self.grid
    }

    pub fn forms(&self) -> &[SkewForm] {
        &self.forms
    }

    pub fn rank(&self) -> usize {
        self.forms.first().map_or(0, SkewForm::rank)
    }

    pub fn cocycle_at(&self, i: usize) -> Cocycle {
        make_bicharacter(self.forms[i].clone())
    }

    pub fn cocycle_for(&self, label: &str) -> Result<Cocycle> {
        Ok(self.cocycle_at(self.grid.position(label)?))
    }

    /// Largest variation of the forms between consecutive grid points,
    /// divided by the coordinate distance when both points carry
    /// coordinates. Smoke test for continuity of the sampled family.
    pub fn lipschitz_estimate(&self) -> f64 {
        let pts = self.grid.points();
        let mut worst: f64 = 0.0;
        for i in 1..self.forms.len() {
            let diff = self.forms[i]
                .upper
                .iter()
                .zip(&self.forms[i - 1].upper)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let dist = match (&pts[i].coord, &pts[i - 1].coord) {
                (Some(a), Some(b)) => a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt(),
                _ => 1.0,
            };
            if dist > 0.0 {
                worst = worst.max(diff / dist);
            }
        }
        worst
    }
}
