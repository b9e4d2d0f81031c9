//! Seeded verification suites, one per family of identities.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::Axis;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{Check, Report};
use crate::algebra::{self, grading_support, involution, minkowski_sum, star, FiberKind, GradedElement};
use crate::cocycle::{make_bicharacter, verify_cocycle_identity, Cocycle, CocycleFamily, SkewForm};
use crate::error::{Error, Result};
use crate::field::{self, BaseGrid, FieldElement};
use crate::hilbmod::{act_deformed, verify_module_axioms_with, ModuleCheckOptions};
use crate::index::MultiIndex;
use crate::monoidal::{self, ConvolutionProduct, FiberAction, GradedTensor, PointwiseProduct, TwistJ};
use crate::random::{self, PRNG_NAME};
use crate::rep::{self, Flux, TruncationBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cocycle,
    Assoc,
    Involution,
    Grading,
    Semiclassical,
    Module,
    Monoidal,
    Oracle,
    Rep,
    Field,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Cocycle,
        Suite::Assoc,
        Suite::Involution,
        Suite::Grading,
        Suite::Semiclassical,
        Suite::Module,
        Suite::Monoidal,
        Suite::Oracle,
        Suite::Rep,
        Suite::Field,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cocycle => "cocycle",
            Suite::Assoc => "assoc",
            Suite::Involution => "involution",
            Suite::Grading => "grading",
            Suite::Semiclassical => "semiclassical",
            Suite::Module => "module",
            Suite::Monoidal => "monoidal",
            Suite::Oracle => "oracle",
            Suite::Rep => "rep",
            Suite::Field => "field",
        }
    }

    /// Trial count used when none is given.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Cocycle => 1000,
            Suite::Assoc | Suite::Involution | Suite::Grading | Suite::Module => 200,
            Suite::Semiclassical => 20,
            Suite::Monoidal | Suite::Rep => 100,
            Suite::Field => 50,
            Suite::Oracle => 1,
        }
    }

    /// Box radius used when none is given (suites without a box ignore it).
    pub fn default_radius(self) -> Option<i64> {
        match self {
            Suite::Oracle => Some(40),
            Suite::Module => Some(20),
            Suite::Rep => Some(6),
            _ => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: Option<usize>,
    pub radius: Option<i64>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            trials: None,
            radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteHeader {
    pub suite: Suite,
    pub prng: &'static str,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_radius: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub header: SuiteHeader,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let trials = cfg.trials.unwrap_or(suite.default_trials());
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let radius = cfg.radius.or(suite.default_radius());
    if let Some(r) = radius {
        if r < 1 {
            return Err(Error::InvalidArgument(format!("box radius must be >= 1, got {r}")));
        }
    }
    let mut rng = random::seeded(cfg.seed);
    let rng = &mut rng;
    let report = match suite {
        Suite::Cocycle => cocycle_suite(rng, trials),
        Suite::Assoc => assoc_suite(rng, trials)?,
        Suite::Involution => involution_suite(rng, trials)?,
        Suite::Grading => grading_suite(rng, trials)?,
        Suite::Semiclassical => semiclassical_suite(rng, trials)?,
        Suite::Module => module_suite(rng, trials, radius.expect("module has a default radius"))?,
        Suite::Monoidal => monoidal_suite(rng, trials)?,
        Suite::Oracle => oracle_suite(radius.expect("oracle has a default radius"))?,
        Suite::Rep => rep_suite(rng, trials, radius.expect("rep has a default radius"))?,
        Suite::Field => field_suite(rng, trials)?,
    };
    Ok(SuiteReport {
        header: SuiteHeader {
            suite,
            prng: PRNG_NAME,
            seed: cfg.seed,
            trials,
            box_radius: radius,
        },
        passed: report.passed,
        checks: report.checks,
    })
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn fiber_for(trial: usize) -> FiberKind {
    if trial % 2 == 0 {
        FiberKind::Scalar
    } else {
        FiberKind::Matrix(2)
    }
}

fn cocycle_suite<R: Rng>(rng: &mut R, trials: usize) -> Report {
    const FORMS: usize = 20;
    const RADIUS: i64 = 10;
    const TOL: f64 = 1e-12;
    let n = 3;
    let mut report = Report::new("cocycle");
    let mut identity = Check::new("cocycle identity", TOL);
    let mut additive = Check::new("bicharacter additivity", TOL);
    let mut unimodular = Check::new("unimodularity", TOL);
    let mut symmetry = Check::new("conjugate symmetry", TOL);
    let mut normalized = Check::new("normalization at 0 (exact)", 0.0);
    let zero = MultiIndex::zero(n);
    for _ in 0..FORMS {
        let form = random::skew_form(rng, n, 1.0);
        let c = make_bicharacter(form.clone());
        identity.merge(&verify_cocycle_identity(&c, trials, RADIUS, rng));
        for _ in 0..trials {
            let p = random::multi_index(rng, n, RADIUS);
            let p2 = random::multi_index(rng, n, RADIUS);
            let q = random::multi_index(rng, n, RADIUS);
            let left = (c.phase(&(&p + &p2), &q) - c.phase(&p, &q) * c.phase(&p2, &q)).norm();
            let right = (c.phase(&q, &(&p + &p2)) - c.phase(&q, &p) * c.phase(&q, &p2)).norm();
            additive.record(left.max(right), || format!("p={p} p'={p2} q={q}"));
            unimodular.record((c.phase(&p, &q).norm() - 1.0).abs(), || format!("p={p} q={q}"));
            let want = Complex64::from_polar(1.0, -2.0 * PI * form.gamma(&p, &q));
            let got = c.phase(&p, &q) * c.phase(&q, &p).conj();
            symmetry.record((got - want).norm(), || format!("p={p} q={q}"));
            let exact = c.phase(&p, &zero) == ONE && c.phase(&zero, &q) == ONE;
            normalized.record_bool(exact, || format!("p={p} q={q}"));
        }
    }
    for c in [identity, additive, unimodular, symmetry, normalized] {
        report.push(c);
    }
    report
}

fn assoc_suite<R: Rng>(rng: &mut R, trials: usize) -> Result<Report> {
    const RADIUS: i64 = 5;
    const TERMS: usize = 8;
    let mut report = Report::new("assoc");
    let mut scalar = Check::new("associativity (scalar)", 1e-10);
    let mut matrix = Check::new("associativity (2x2 matrix)", 1e-10);
    let mut unit = Check::new("two-sided unit (exact)", 0.0);
    let mut trivial = Check::new("trivial cocycle recovers convolution (exact)", 0.0);
    for t in 0..trials {
        let fiber = fiber_for(t);
        let c = make_bicharacter(random::skew_form(rng, 2, 1.0));
        let a = random::element(rng, 2, fiber, RADIUS, TERMS);
        let b = random::element(rng, 2, fiber, RADIUS, TERMS);
        let d = random::element(rng, 2, fiber, RADIUS, TERMS);
        let lhs = star(&star(&a, &b, &c)?, &d, &c)?;
        let rhs = star(&a, &star(&b, &d, &c)?, &c)?;
        let check = if fiber == FiberKind::Scalar { &mut scalar } else { &mut matrix };
        check.record(lhs.l1_distance(&rhs), || format!("trial {t}"));
        let e = GradedElement::unit(2, fiber);
        unit.record_bool(star(&a, &e, &c)? == a && star(&e, &a, &c)? == a, || format!("trial {t}"));
        let zero = make_bicharacter(SkewForm::zero(2));
        trivial.record_bool(star(&a, &b, &zero)? == algebra::mul_undeformed(&a, &b)?, || format!("trial {t}"));
    }
    report.push(scalar);
    report.push(matrix);
    report.push(unit);
    report.push(trivial);
    report.push(generator_relation()?);
    Ok(report)
}

/// `u ⋆ v - exp(-2πiθ) v ⋆ u` for the planar forms of the acceptance list.
pub fn generator_relation() -> Result<Check> {
    let mut check = Check::new("generator relation", 1e-12);
    let u = GradedElement::delta(MultiIndex::from([1, 0]), FiberKind::Scalar);
    let v = GradedElement::delta(MultiIndex::from([0, 1]), FiberKind::Scalar);
    for theta in [0.0, 0.2, 0.5, 0.7317] {
        let c = make_bicharacter(SkewForm::planar(theta));
        let uv = star(&u, &v, &c)?;
        let vu = star(&v, &u, &c)?.scale(Complex64::from_polar(1.0, -2.0 * PI * theta));
        check.record(uv.l1_distance(&vu), || format!("theta={theta}"));
    }
    Ok(check)
}

fn involution_suite<R: Rng>(rng: &mut R, trials: usize) -> Result<Report> {
    let mut report = Report::new("involution");
    let mut reverse = Check::new("(a*b)* = b* a*", 1e-12);
    let mut involutive = Check::new("involution is involutive (exact)", 0.0);
    let mut degree = Check::new("adjoint negates degrees (exact)", 0.0);
    for t in 0..trials {
        let fiber = fiber_for(t);
        let c = make_bicharacter(random::skew_form(rng, 2, 1.0));
        let a = random::element(rng, 2, fiber, 5, 8);
        let b = random::element(rng, 2, fiber, 5, 8);
        let lhs = involution(&star(&a, &b, &c)?);
        let rhs = star(&involution(&b), &involution(&a), &c)?;
        reverse.record(lhs.l1_distance(&rhs), || format!("trial {t}"));
        involutive.record_bool(involution(&involution(&a)) == a, || format!("trial {t}"));
        let negated: std::collections::BTreeSet<_> = grading_support(&a).iter().map(|p| -p).collect();
        degree.record_bool(grading_support(&involution(&a)) == negated, || format!("trial {t}"));
    }
    report.push(reverse);
    report.push(involutive);
    report.push(degree);
    Ok(report)
}

fn grading_suite<R: Rng>(rng: &mut R, trials: usize) -> Result<Report> {
    let mut report = Report::new("grading");
    let mut contained = Check::new("supp(a*b) in supp(a)+supp(b) (exact)", 0.0);
    let mut homogeneous = Check::new("homogeneous products land in p+q (exact)", 0.0);
    for t in 0..trials {
        let fiber = fiber_for(t);
        let c = make_bicharacter(random::skew_form(rng, 2, 1.0));
        let a = random::element(rng, 2, fiber, 5, 8);
        let b = random::element(rng, 2, fiber, 5, 8);
        let sum = minkowski_sum(&grading_support(&a), &grading_support(&b));
        contained.record_bool(grading_support(&star(&a, &b, &c)?).is_subset(&sum), || format!("trial {t}"));
        let x = random::homogeneous(rng, 2, fiber, 5);
        let y = random::homogeneous(rng, 2, fiber, 5);
        let deg = minkowski_sum(&grading_support(&x), &grading_support(&y));
        homogeneous.record_bool(grading_support(&star(&x, &y, &c)?).is_subset(&deg), || format!("trial {t}"));
    }
    report.push(contained);
    report.push(homogeneous);
    Ok(report)
}

fn semiclassical_suite<R: Rng>(rng: &mut R, trials: usize) -> Result<Report> {
    const H: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
    let mut report = Report::new("semiclassical");
    // ratio within [0.4, 0.6] is |ratio - 0.5| <= 0.1
    let mut first = Check::new("halving ratio 1e-2 -> 5e-3 in [0.4, 0.6]", 0.1);
    let mut second = Check::new("halving ratio 5e-3 -> 2.5e-3 in [0.4, 0.6]", 0.1);
    let mut absolute = Check::new("defect(2.5e-3) / (10 h defect(1e-2) / 1e-2)", 1.0);
    let mut trivial = Check::new("zero form gives zero defect (exact)", 0.0);
    for t in 0..trials {
        let gamma = random::skew_form(rng, 2, 1.0);
        let a = random::element(rng, 2, FiberKind::Scalar, 3, 6);
        let b = random::element(rng, 2, FiberKind::Scalar, 3, 6);
        let d: Vec<f64> = H
            .iter()
            .map(|&h| algebra::semiclassical_defect(&a, &b, h, &gamma))
            .collect::<Result<_>>()?;
        if d[0] > 0.0 {
            let w = || format!("trial {t}: defects {d:?}");
            first.record((d[1] / d[0] - 0.5).abs(), w);
            second.record((d[2] / d[1] - 0.5).abs(), w);
            absolute.record(d[2] / (10.0 * H[2] * d[0] / H[0]), w);
        }
        let zero = algebra::semiclassical_defect(&a, &b, H[0], &SkewForm::zero(2))?;
        trivial.record(zero, || format!("trial {t}"));
    }
    report.push(first);
    report.push(second);
    report.push(absolute);
    report.push(trivial);
    Ok(report)
}

/// Trials that also run the (expensive) Gram positivity check.
const GRAM_TRIALS: usize = 3;

fn module_suite<R: Rng>(rng: &mut R, trials: usize, gram_radius: i64) -> Result<Report> {
    let mut report = Report::new("module");
    let m = 2;
    for t in 0..trials {
        let fiber = fiber_for(t);
        let c = make_bicharacter(random::skew_form(rng, 2, 1.0));
        let a = random::element(rng, 2, fiber, 3, 6);
        let b = random::element(rng, 2, fiber, 3, 6);
        let psi = random::module_element(rng, 2, m, 2, 5);
        let phi = random::module_element(rng, 2, m, 2, 5);
        let opts = ModuleCheckOptions {
            gram_radius: (t < GRAM_TRIALS).then_some(gram_radius),
            ..ModuleCheckOptions::default()
        };
        let r = verify_module_axioms_with(&a, &b, &psi, &phi, &c, &opts)?;
        report.absorb(&r);
    }
    Ok(report)
}

fn twist<R: Rng>(rng: &mut R, n: usize) -> TwistJ {
    TwistJ::new(random::skew_form(rng, n, 1.0))
}

fn homogeneous_vector<R: Rng>(rng: &mut R, n: usize, d: usize) -> Result<monoidal::GradedVector> {
    let p = random::multi_index(rng, n, 5);
    crate::hilbmod::ModuleElement::homogeneous(p, (0..d).map(|_| random::unit_disc(rng)).collect())
}

fn monoidal_suite<R: Rng>(rng: &mut R, trials: usize) -> Result<Report> {
    let n = 3;
    let mut report = Report::new("monoidal");
    let mut additivity = Check::new("twist phases add in J", 1e-12);
    let mut psi_squared = Check::new("braiding squares to identity (exact)", 0.0);
    let mut composition = Check::new("D_K D_J = D_(J+K)", 1e-12);
    let mut braided = Check::new("braided commutativity", 1e-12);
    let mut via_star = Check::new("deformed convolution = star (bitwise)", 0.0);
    let mut via_action = Check::new("deformed action = act_deformed (bitwise)", 0.0);
    let mut unit = Check::new("unit object (exact)", 0.0);
    for t in 0..trials {
        let j = twist(rng, n);
        let k = twist(rng, n);
        let jk = j.add(&k)?;
        let p = random::multi_index(rng, n, 10);
        let q = random::multi_index(rng, n, 10);
        let lhs = monoidal::twist_c(&j, &p, &q)? * monoidal::twist_c(&k, &p, &q)?;
        additivity.record((lhs - monoidal::twist_c(&jk, &p, &q)?).norm(), || format!("p={p} q={q}"));

        let x = random::module_element(rng, n, 2, 4, 4);
        let y = random::module_element(rng, n, 3, 4, 4);
        let tensor = GradedTensor::simple(&x, &y)?;
        psi_squared.record_bool(monoidal::braid(&j, &monoidal::braid(&j, &tensor)?)? == tensor, || {
            format!("trial {t}")
        });

        let fiber = fiber_for(t);
        let dim = fiber.dim() * fiber.dim();
        let base = ConvolutionProduct { rank: n, fiber };
        let nested = monoidal::deform_mul(monoidal::deform_mul(base, j.clone())?, k.clone())?;
        let direct = monoidal::deform_mul(base, jk.clone())?;
        let hx = homogeneous_vector(rng, n, dim)?;
        let hy = homogeneous_vector(rng, n, dim)?;
        let d = monoidal::multiply(&nested, &hx, &hy)?.l1_distance(&monoidal::multiply(&direct, &hx, &hy)?);
        composition.record(d, || format!("trial {t}"));

        let mu = monoidal::deform_mul(PointwiseProduct { rank: n, dim: 3 }, j.clone())?;
        let bx = homogeneous_vector(rng, n, 3)?;
        let by = homogeneous_vector(rng, n, 3)?;
        let plain = monoidal::multiply_tensor(&mu, &GradedTensor::simple(&bx, &by)?)?;
        let swapped = monoidal::multiply_tensor(&mu, &monoidal::braiding_psi(&j, &bx, &by)?)?;
        braided.record(plain.l1_distance(&swapped), || format!("trial {t}"));

        let a = random::element(rng, n, fiber, 4, 6);
        let b = random::element(rng, n, fiber, 4, 6);
        let mu = monoidal::deform_mul(base, j.clone())?;
        let v = monoidal::multiply(&mu, &monoidal::vector_from_element(&a), &monoidal::vector_from_element(&b))?;
        let same = monoidal::element_from_vector(&v, fiber)? == star(&a, &b, &j.cocycle())?;
        via_star.record_bool(same, || format!("trial {t}"));

        let m = fiber.dim();
        let module = random::module_element(rng, n, m, 4, 6);
        let alpha = monoidal::deform_action(FiberAction::new(n, fiber, m)?, j.clone())?;
        let got = monoidal::act(&alpha, &monoidal::vector_from_element(&a), &module)?;
        via_action.record_bool(got == act_deformed(&a, &module, &j.cocycle())?, || format!("trial {t}"));

        let e = monoidal::unit_object(n);
        let left = monoidal::deform_tensor(&j, &e, &y)?;
        let ok = left.iter().all(|((p, q), comp)| p.is_zero() && y.coeff(q) == Some(&comp.values()[..]));
        unit.record_bool(ok && left.len() == y.len(), || format!("trial {t}"));
    }
    for c in [additivity, psi_squared, composition, braided, via_star, via_action, unit] {
        report.push(c);
    }
    Ok(report)
}

/// Quasimomentum samples per direction for the Bloch oracle.
pub const ORACLE_SAMPLES: usize = 64;
/// Fluxes compared against the oracle.
pub const ORACLE_FLUXES: [(i64, i64); 3] = [(0, 1), (1, 2), (1, 3)];

fn oracle_suite(radius: i64) -> Result<Report> {
    const HAUSDORFF: f64 = 0.05;
    let mut report = Report::new("oracle");
    let bx = TruncationBox::new(radius, 2)?;
    let h = rep::harper_element();
    for (p, q) in ORACLE_FLUXES {
        let flux = Flux::new(p, q)?;
        let spec = rep::spectrum(&h, &make_bicharacter(SkewForm::planar(flux.value())), &bx)?;
        let bands = rep::bloch_oracle_hofstadter(flux, ORACLE_SAMPLES)?;
        let e = &spec.eigenvalues;
        report.push(Check::single(
            format!("hausdorff distance at flux {flux}"),
            HAUSDORFF,
            rep::hausdorff_distance(e, &bands),
        ));
        report.push(Check::single(
            format!("bands covered by spectrum at flux {flux}"),
            HAUSDORFF,
            rep::bands_to_spectrum_distance(e, &bands),
        ));
        report.push(Check::single(
            format!("spectrum inside bands at flux {flux}"),
            HAUSDORFF,
            rep::spectrum_to_bands_distance(e, &bands),
        ));
        let mirrored: f64 = bands
            .iter()
            .zip(bands.iter().rev())
            .map(|(b, m)| (b.0 + m.1).abs().max((b.1 + m.0).abs()))
            .fold(0.0, f64::max);
        report.push(Check::single(format!("oracle E -> -E symmetry at flux {flux}"), 1e-9, mirrored));
        if (p, q) == (1, 2) {
            let r8 = 2.0 * SQRT_2;
            report.push(Check::single(
                "flux 1/2 extremes vs 2 sqrt 2",
                0.01,
                (spec.min() + r8).abs().max((spec.max() - r8).abs()),
            ));
        }
        if (p, q) == (0, 1) {
            let outside = (-4.0 - spec.min()).max(spec.max() - 4.0).max(0.0);
            report.push(Check::single("flux 0 spectrum within [-4, 4]", 1e-9, outside));
        }
    }
    Ok(report)
}

fn rep_suite<R: Rng>(rng: &mut R, trials: usize, radius: i64) -> Result<Report> {
    const SUPPORT: i64 = 2;
    let mut report = Report::new("rep");
    let bx = TruncationBox::new(radius, 2)?;
    let mut delta = Check::new("op_norm of delta_p", 1e-12);
    let mut mult = Check::new("inner-box multiplicativity", 1e-10);
    let mut adjoint = Check::new("inner-box adjoint", 1e-10);
    let mut lower = Check::new("op_norm >= max coefficient", 1e-12);
    let mut unit = Check::new("unit represents identity (exact)", 0.0);
    for t in 0..trials {
        let fiber = fiber_for(t);
        let c = make_bicharacter(random::skew_form(rng, 2, 1.0));
        let p = random::multi_index(rng, 2, radius);
        let norm = rep::op_norm(&GradedElement::delta(p.clone(), FiberKind::Scalar), &c, &bx)?;
        delta.record((norm - 1.0).abs(), || format!("p={p}"));

        let a = random::element(rng, 2, fiber, SUPPORT, 6);
        let b = random::element(rng, 2, fiber, SUPPORT, 6);
        let ra = rep::represent(&a, &c, &bx)?;
        let rb = rep::represent(&b, &c, &bx)?;
        let rab = rep::represent(&star(&a, &b, &c)?, &c, &bx)?;
        let cols = rab.inner_columns(2 * SUPPORT);
        let prod = ra.matrix().dot(&rb.matrix().select(Axis(1), &cols));
        let direct = rab.matrix().select(Axis(1), &cols);
        let d = (&prod - &direct).iter().map(|z| z.norm()).fold(0.0, f64::max);
        mult.record(d, || format!("trial {t}"));

        let ras = rep::represent(&involution(&a), &c, &bx)?;
        adjoint.record(ras.adjoint_distance(&ra, &ra.inner_columns(SUPPORT)), || format!("trial {t}"));

        let max_coeff = a.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        if fiber == FiberKind::Scalar {
            lower.record(max_coeff - rep::op_norm(&a, &c, &bx)?, || format!("trial {t}"));
        }
        if t < 4 {
            let id = rep::represent(&GradedElement::unit(2, fiber), &c, &bx)?;
            let k = fiber.dim();
            let exact = id.matrix().indexed_iter().all(|((i, j), z)| *z == if i == j { ONE } else { Complex64::new(0.0, 0.0) });
            unit.record_bool(exact && id.dim() == bx.len() * k, || format!("trial {t}"));
        }
    }
    report.push(delta);
    report.push(laplacian_norms()?);
    report.push(mult);
    report.push(adjoint);
    report.push(lower);
    report.push(unit);
    Ok(report)
}

/// Norm of `δ₁ + δ₋₁` against `2cos(π/(2N+2))` for `N ∈ {10, 20, 40}`.
pub fn laplacian_norms() -> Result<Check> {
    let lap = GradedElement::scalar(1, [(MultiIndex::from([1]), ONE), (MultiIndex::from([-1]), ONE)])?;
    let mut check = Check::new("1d laplacian norm vs 2cos(pi/(2N+2))", 1e-9);
    for n in [10, 20, 40] {
        let norm = rep::op_norm(&lap, &Cocycle::trivial(1), &TruncationBox::new(n, 1)?)?;
        check.record((norm - 2.0 * (PI / (2.0 * n as f64 + 2.0)).cos()).abs(), || format!("N={n}"));
    }
    Ok(check)
}

/// The grid `θ(x) = x` on 9 equally spaced samples of `[0, 1]`.
pub fn theta_family(samples: usize) -> Result<CocycleFamily> {
    let grid = Arc::new(BaseGrid::uniform("theta", samples)?);
    let thetas: Vec<f64> = grid.points().iter().map(|p| p.coord.as_ref().map_or(0.0, |c| c[0])).collect();
    CocycleFamily::from_fn(grid, |i| SkewForm::planar(thetas[i]))
}

fn random_field<R: Rng>(rng: &mut R, grid: &Arc<BaseGrid>, fiber: FiberKind) -> Result<FieldElement> {
    let sections = (0..grid.len()).map(|_| random::element(rng, 2, fiber, 3, 6)).collect();
    FieldElement::new(grid.clone(), sections)
}

fn field_suite<R: Rng>(rng: &mut R, trials: usize) -> Result<Report> {
    let fam = theta_family(9)?;
    let grid = fam.grid().clone();
    let mut report = Report::new("field");
    let mut grid_ok = Check::new("grid theta(x) = x on 9 samples (exact)", 0.0);
    for (i, pt) in grid.points().iter().enumerate() {
        let x = pt.coord.as_ref().map_or(f64::NAN, |c| c[0]);
        grid_ok.record_bool(fam.forms()[i].get(0, 1) == x && grid.len() == 9, || pt.label.clone());
    }
    let mut eval = Check::new("evaluation commutes with products (exact)", 0.0);
    let mut equivariant = Check::new("torus-action equivariance", 1e-12);
    let mut central = Check::new("structure-map centrality", 1e-12);
    for t in 0..trials {
        let fiber = fiber_for(t);
        let a = random_field(rng, &grid, fiber)?;
        let b = random_field(rng, &grid, fiber)?;
        let ab = field::fiberwise_star(&a, &b, &fam)?;
        for pt in grid.points() {
            let x = &pt.label;
            let direct = star(&field::evaluate_at(&a, x)?, &field::evaluate_at(&b, x)?, &fam.cocycle_for(x)?)?;
            eval.record_bool(field::evaluate_at(&ab, x)? == direct, || format!("trial {t} at {x}"));
        }
        let tt = [rng.random::<f64>(), rng.random::<f64>()];
        let lhs = field::fiberwise_torus_action(&ab, &tt)?;
        let rhs = field::fiberwise_star(
            &field::fiberwise_torus_action(&a, &tt)?,
            &field::fiberwise_torus_action(&b, &tt)?,
            &fam,
        )?;
        equivariant.record(lhs.max_l1_distance(&rhs), || format!("trial {t}, t={tt:?}"));
        let f: Vec<Complex64> = (0..grid.len()).map(|_| random::unit_disc(rng)).collect();
        let fab = field::structure_mul(&f, &ab)?;
        let left = field::fiberwise_star(&field::structure_mul(&f, &a)?, &b, &fam)?;
        let right = field::fiberwise_star(&a, &field::structure_mul(&f, &b)?, &fam)?;
        central.record(fab.max_l1_distance(&left).max(fab.max_l1_distance(&right)), || format!("trial {t}"));
    }
    report.push(grid_ok);
    report.push(eval);
    report.push(equivariant);
    report.push(central);
    Ok(report)
}
