//! Truncated regular representation on a lattice box.
//!
//! An element acts on `ℓ²(Z^n) ⊗ C^k` by `(a ⋆ Ψ)_χ = Σ a_{χ-η} σ(χ-η, η) Ψ_η`;
//! compressing to the box `{|χ_i| <= N}` gives a finite matrix. In the
//! lexicographic ordering of the box that matrix is banded, so spectra and
//! norms go through the LAPACK band solvers and never materialize the dense
//! matrix. [`represent`] still builds the dense form for inspection and for
//! the multiplicativity checks.

mod lapack;
mod oracle;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{self, FiberValue, GradedElement};
use crate::cocycle::{Cocycle, CocycleFamily};
use crate::error::{check_rank, Error, Result};
use crate::field::{self, FieldElement};
use crate::index::MultiIndex;

pub use oracle::{bands_to_spectrum_distance, bloch_oracle_hofstadter, hausdorff_distance, spectrum_to_bands_distance};

/// `‖a - a*‖₁` above this is rejected by [`spectrum`].
pub const SELF_ADJOINT_TOLERANCE: f64 = 1e-12;
/// Largest Hermiticity defect of the compressed matrix [`spectrum`] accepts.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Small matrices are cheaper through the dense solver.
const DENSE_CUTOFF: usize = 64;

/// The index set `{χ ∈ Z^n : |χ_i| <= N}`, ordered lexicographically with
/// the first coordinate most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncationBox {
    radius: i64,
    rank: usize,
}

impl TruncationBox {
    pub fn new(radius: i64, rank: usize) -> Result<Self> {
        if radius < 1 {
            return Err(Error::InvalidArgument(format!("box radius must be >= 1, got {radius}")));
        }
        let side = (2 * radius + 1) as u128;
        let card = (0..rank).try_fold(1u128, |acc, _| acc.checked_mul(side));
        if card.is_none_or(|c| c > i32::MAX as u128) {
            return Err(Error::InvalidArgument(format!(
                "box of radius {radius} in rank {rank} is too large"
            )));
        }
        Ok(TruncationBox { radius, rank })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    /// `(2N+1)^n`
    pub fn len(&self) -> usize {
        self.side().pow(self.rank as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, chi: &MultiIndex) -> bool {
        chi.rank() == self.rank && chi.radius() <= self.radius
    }

    pub fn index_of(&self, chi: &MultiIndex) -> Option<usize> {
        if !self.contains(chi) {
            return None;
        }
        let side = self.side();
        Some(
            chi.entries()
                .iter()
                .fold(0usize, |acc, &e| acc * side + (e + self.radius) as usize),
        )
    }

    pub fn point(&self, mut flat: usize) -> MultiIndex {
        let side = self.side();
        let mut e = vec![0i64; self.rank];
        for slot in e.iter_mut().rev() {
            *slot = (flat % side) as i64 - self.radius;
            flat /= side;
        }
        MultiIndex::new(e)
    }

    pub fn points(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Positions of the sub-box of radius `N - margin` (empty if the margin
    /// swallows the box).
    pub fn inner_positions(&self, margin: i64) -> Vec<usize> {
        let r = self.radius - margin;
        if r < 0 {
            return Vec::new();
        }
        (0..self.len()).filter(|&i| self.point(i).radius() <= r).collect()
    }

    /// Distance in the flat ordering between `χ` and `χ + d`.
    fn offset(&self, d: &MultiIndex) -> i64 {
        let side = self.side() as i64;
        d.entries().iter().fold(0i64, |acc, &e| acc * side + e)
    }
}

impl fmt::Display for TruncationBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "box(N={}, n={})", self.radius, self.rank)
    }
}

/// Calls `f(row, col, value)` for every nonzero entry of the compression.
fn for_each_entry(a: &GradedElement, c: &Cocycle, bx: &TruncationBox, mut f: impl FnMut(usize, usize, Complex64)) {
    let k = a.fiber().dim();
    for col in 0..bx.len() {
        let eta = bx.point(col);
        for (d, v) in a.iter() {
            let Some(row) = bx.index_of(&(d + &eta)) else { continue };
            let s = c.phase(d, &eta);
            match v {
                FiberValue::Scalar(z) => f(row, col, z * s),
                FiberValue::Matrix(m) => {
                    for r in 0..k {
                        for t in 0..k {
                            f(row * k + r, col * k + t, m.get(r, t) * s);
                        }
                    }
                }
            }
        }
    }
}

/// Half-bandwidth of the compression of `a`.
fn bandwidth(a: &GradedElement, bx: &TruncationBox) -> usize {
    let k = a.fiber().dim();
    let dim = bx.len() * k;
    let kd = a
        .iter()
        .map(|(d, _)| bx.offset(d).unsigned_abs() as usize * k + (k - 1))
        .max()
        .unwrap_or(0);
    kd.min(dim.saturating_sub(1))
}

fn check_inputs(a: &GradedElement, c: &Cocycle, bx: &TruncationBox) -> Result<()> {
    check_rank(a.rank(), c.rank())?;
    check_rank(a.rank(), bx.rank())
}

/// Dense compression of the regular representation.
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix {
    matrix: Array2<Complex64>,
    bx: TruncationBox,
    fiber_dim: usize,
}

impl RepMatrix {
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn truncation(&self) -> &TruncationBox {
        &self.bx
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |M_ij - conj(M_ji)|`
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for ((i, j), v) in m.indexed_iter() {
            worst = worst.max((v - m[[j, i]].conj()).norm());
        }
        worst
    }

    /// Matrix columns belonging to lattice points of the inner box of
    /// radius `N - margin`.
    pub fn inner_columns(&self, margin: i64) -> Vec<usize> {
        let k = self.fiber_dim;
        self.bx
            .inner_positions(margin)
            .into_iter()
            .flat_map(|p| (0..k).map(move |r| p * k + r))
            .collect()
    }

    pub fn matmul(&self, other: &RepMatrix) -> RepMatrix {
        RepMatrix {
            matrix: self.matrix.dot(&other.matrix),
            bx: self.bx,
            fiber_dim: self.fiber_dim,
        }
    }

    /// `max |A_ij - B_ij|` over the given columns.
    pub fn column_distance(&self, other: &RepMatrix, cols: &[usize]) -> f64 {
        let mut worst: f64 = 0.0;
        for &j in cols {
            for i in 0..self.dim() {
                worst = worst.max((self.matrix[[i, j]] - other.matrix[[i, j]]).norm());
            }
        }
        worst
    }

    /// `max |A_ij - conj(B_ji)|` over the given columns of `A`.
    pub fn adjoint_distance(&self, other: &RepMatrix, cols: &[usize]) -> f64 {
        let mut worst: f64 = 0.0;
        for &j in cols {
            for i in 0..self.dim() {
                worst = worst.max((self.matrix[[i, j]] - other.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }
}

/// Entry `(χ, η)` is `a_{χ-η} σ(χ-η, η)`; terms leaving the box are dropped.
pub fn represent(a: &GradedElement, c: &Cocycle, bx: &TruncationBox) -> Result<RepMatrix> {
    check_inputs(a, c, bx)?;
    let k = a.fiber().dim();
    let dim = bx.len() * k;
    let mut matrix = Array2::zeros((dim, dim));
    for_each_entry(a, c, bx, |i, j, v| matrix[[i, j]] += v);
    Ok(RepMatrix {
        matrix,
        bx: *bx,
        fiber_dim: k,
    })
}

/// Square band matrix holding both triangles: `A[i][j]` sits at
/// `(i + kd - j) + j * (2kd + 1)`.
struct Band {
    n: usize,
    kd: usize,
    data: Vec<Complex64>,
}

impl Band {
    fn new(n: usize, kd: usize) -> Self {
        Band {
            n,
            kd,
            data: vec![Complex64::new(0.0, 0.0); n * (2 * kd + 1)],
        }
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i + self.kd - j + j * (2 * self.kd + 1)
    }

    fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let p = self.at(i, j);
        self.data[p] += v;
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.at(i, j)]
    }

    fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            for i in j.saturating_sub(self.kd)..=j {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Upper triangle of `(A + A†)/2` in LAPACK band storage.
    fn symmetrized_upper(&self) -> Vec<Complex64> {
        let kd = self.kd;
        let mut ab = vec![Complex64::new(0.0, 0.0); self.n * (kd + 1)];
        for j in 0..self.n {
            for i in j.saturating_sub(kd)..=j {
                ab[kd + i - j + j * (kd + 1)] = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
            }
        }
        ab
    }
}

/// Eigenvalues of a Hermitian matrix given by its upper band.
fn hermitian_band_eigenvalues(n: usize, kd: usize, mut ab: Vec<Complex64>) -> Result<Vec<f64>> {
    if ab.iter().all(|z| z.im == 0.0) {
        let mut re: Vec<f64> = ab.iter().map(|z| z.re).collect();
        return lapack::dsbev(n, kd, &mut re);
    }
    if n <= DENSE_CUTOFF {
        let mut dense = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for i in j.saturating_sub(kd)..=j {
                dense[i + j * n] = ab[kd + i - j + j * (kd + 1)];
            }
        }
        return lapack::zheev(n, &mut dense);
    }
    lapack::zhbev(n, kd, &mut ab)
}

/// Eigenvalues of a compressed self-adjoint element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `max |M_ij - conj(M_ji)|` of the compression before symmetrizing.
    pub hermiticity_defect: f64,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }
}

/// Eigenvalues of `(M + M†)/2` for the compression `M` of a self-adjoint
/// element.
pub fn spectrum(a: &GradedElement, c: &Cocycle, bx: &TruncationBox) -> Result<Spectrum> {
    check_inputs(a, c, bx)?;
    let sa = a.l1_distance(&algebra::involution(a));
    if sa > SELF_ADJOINT_TOLERANCE {
        return Err(Error::NotSelfAdjoint(sa));
    }
    let dim = bx.len() * a.fiber().dim();
    let kd = bandwidth(a, bx);
    let mut band = Band::new(dim, kd);
    for_each_entry(a, c, bx, |i, j, v| band.add(i, j, v));
    let defect = band.hermiticity_defect();
    if !(defect <= HERMITICITY_TOLERANCE) {
        return Err(Error::HermiticityDefect(defect));
    }
    let eigenvalues = hermitian_band_eigenvalues(dim, kd, band.symmetrized_upper())?;
    Ok(Spectrum {
        eigenvalues,
        hermiticity_defect: defect,
    })
}

/// Largest singular value of the compression, as `sqrt(λ_max(M†M))`.
pub fn op_norm(a: &GradedElement, c: &Cocycle, bx: &TruncationBox) -> Result<f64> {
    check_inputs(a, c, bx)?;
    if a.is_zero() {
        return Ok(0.0);
    }
    let dim = bx.len() * a.fiber().dim();
    let kd = bandwidth(a, bx);
    let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
    for_each_entry(a, c, bx, |i, j, v| rows[i].push((j, v)));

    let gkd = (2 * kd).min(dim - 1);
    let mut ab = vec![Complex64::new(0.0, 0.0); dim * (gkd + 1)];
    for row in &mut rows {
        row.sort_by_key(|&(j, _)| j);
        for (s, &(j1, v1)) in row.iter().enumerate() {
            for &(j2, v2) in &row[s..] {
                ab[gkd + j1 - j2 + j2 * (gkd + 1)] += v1.conj() * v2;
            }
        }
    }
    let eig = hermitian_band_eigenvalues(dim, gkd, ab)?;
    Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// `u + u* + v + v*` with `u = δ_(1,0)`, `v = δ_(0,1)`.
pub fn harper_element() -> GradedElement {
    let one = Complex64::new(1.0, 0.0);
    GradedElement::scalar(
        2,
        [[1, 0], [-1, 0], [0, 1], [0, -1]].map(|e| (MultiIndex::from(e), one)),
    )
    .expect("rank 2 terms")
}

/// A reduced rational flux `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flux {
    pub p: i64,
    pub q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Flux {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(Error::InvalidArgument(format!("flux denominator must be positive, got {q}")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidArgument(format!("flux {p}/{q} is not in lowest terms")));
        }
        Ok(Flux { p, q })
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Flux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("flux `{s}` is not of the form p/q"));
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        Flux::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
    }
}

/// Per-sample spectra of a field element under a cocycle family.
pub fn butterfly_scan(
    fam: &CocycleFamily,
    element: &FieldElement,
    bx: &TruncationBox,
) -> Result<Vec<(String, Spectrum)>> {
    field::same_grid(fam.grid(), element.grid())?;
    fam.grid()
        .points()
        .iter()
        .zip(element.sections())
        .enumerate()
        .map(|(i, (pt, a))| Ok((pt.label.clone(), spectrum(a, &fam.cocycle_at(i), bx)?)))
        .collect()
}

/// Writes `label,theta,eig` rows. `theta` is the first grid coordinate when
/// the point has one, else the `(0,1)` entry of the sample's form.
pub fn write_butterfly_csv<W: Write>(
    mut w: W,
    fam: &CocycleFamily,
    rows: &[(String, Spectrum)],
) -> std::io::Result<()> {
    writeln!(w, "label,theta,eig")?;
    for (label, spec) in rows {
        let i = fam.grid().position(label).map_err(std::io::Error::other)?;
        let theta = match fam.grid().points()[i].coord.as_deref() {
            Some([t, ..]) => *t,
            _ if fam.rank() >= 2 => fam.forms()[i].get(0, 1),
            _ => 0.0,
        };
        for e in &spec.eigenvalues {
            writeln!(w, "{label},{theta},{e}")?;
        }
    }
    Ok(())
}
