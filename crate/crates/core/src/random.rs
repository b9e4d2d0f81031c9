//! Random fixtures shared by the verification suites and tests.
//!
//! All generators draw from a caller-supplied [`Rng`]; the suites use
//! [`seeded`] so reports are reproducible.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CMatrix, FiberKind, FiberValue, GradedElement};
use crate::cocycle::SkewForm;
use crate::hilbmod::ModuleElement;
use crate::index::MultiIndex;

/// Name of the generator behind [`seeded`], echoed in report headers.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.9, SeedableRng::seed_from_u64)";

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the box `{|χ_i| <= radius}`.
pub fn multi_index<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: i64) -> MultiIndex {
    MultiIndex::new((0..n).map(|_| rng.random_range(-radius..=radius)).collect())
}

/// Skew form with strictly-upper entries uniform in `[-scale, scale)`.
pub fn skew_form<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> SkewForm {
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            entries.push((i, j, rng.random_range(-scale..scale)));
        }
    }
    SkewForm::from_upper(n, &entries).expect("generated entries are upper triangular")
}

/// Uniform point of the closed unit disc.
pub fn unit_disc<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    let t = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, t)
}

pub fn fiber_value<R: Rng + ?Sized>(rng: &mut R, kind: FiberKind) -> FiberValue {
    match kind {
        FiberKind::Scalar => FiberValue::Scalar(unit_disc(rng)),
        FiberKind::Matrix(k) => {
            let data = (0..k * k).map(|_| unit_disc(rng)).collect();
            FiberValue::Matrix(CMatrix::new(k, data).expect("k*k entries"))
        }
    }
}

/// Distinct support points drawn from the box of the given radius.
fn support<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: i64, terms: usize) -> Vec<MultiIndex> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(n as u32);
    let count = terms.min(total);
    sample(rng, total, count)
        .into_iter()
        .map(|mut flat| {
            let mut e = vec![0i64; n];
            for slot in e.iter_mut().rev() {
                *slot = (flat % side) as i64 - radius;
                flat /= side;
            }
            MultiIndex::new(e)
        })
        .collect()
}

/// Element with between 1 and `max_terms` coefficients in the unit disc,
/// supported in the box of the given radius.
pub fn element<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    fiber: FiberKind,
    radius: i64,
    max_terms: usize,
) -> GradedElement {
    let terms = rng.random_range(1..=max_terms.max(1));
    let idx = support(rng, n, radius, terms);
    let terms: Vec<_> = idx.into_iter().map(|i| (i, fiber_value(rng, fiber))).collect();
    GradedElement::from_terms(n, fiber, terms).expect("generated terms are consistent")
}

/// Self-adjoint element `x + x*`.
pub fn self_adjoint<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    fiber: FiberKind,
    radius: i64,
    max_terms: usize,
) -> GradedElement {
    let x = element(rng, n, fiber, radius, max_terms);
    x.add(&crate::algebra::involution(&x)).expect("same structure")
}

/// Single homogeneous term.
pub fn homogeneous<R: Rng + ?Sized>(rng: &mut R, n: usize, fiber: FiberKind, radius: i64) -> GradedElement {
    let p = multi_index(rng, n, radius);
    GradedElement::from_terms(n, fiber, [(p, fiber_value(rng, fiber))]).expect("consistent")
}

/// Module element with vectors of length `m` and entries in the unit disc.
pub fn module_element<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    radius: i64,
    max_terms: usize,
) -> ModuleElement {
    let terms = rng.random_range(1..=max_terms.max(1));
    let idx = support(rng, n, radius, terms);
    let terms: Vec<_> = idx
        .into_iter()
        .map(|i| (i, (0..m).map(|_| unit_disc(rng)).collect::<Vec<_>>()))
        .collect();
    ModuleElement::from_terms(n, m, terms).expect("consistent")
}
