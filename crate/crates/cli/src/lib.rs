//! The `pdq` command line.
//!
//! [`run`] parses arguments, executes one verb and writes its result; the
//! binary is a thin wrapper so tests can drive the CLI in process.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use pdq_core::algebra::{self, GradedElement};
use pdq_core::cocycle::{make_bicharacter, Cocycle, CocycleFamily, SkewForm};
use pdq_core::field::{BaseGrid, FieldElement};
use pdq_core::hilbmod::{self, ModuleElement};
use pdq_core::json::{self, WireBands, WireElement, WireFamily, WireModule};
use pdq_core::monoidal::{self, GradedTensor, TwistJ};
use pdq_core::rep::{self, Flux, TruncationBox};
use pdq_core::verify::{run_suite, Suite, SuiteConfig};
use pdq_core::Error;

/// Significant digits of every number the CLI prints.
pub const DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "pdq", version, about = "Cocycle-deformed products, spectra and twists on torus-graded algebras")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Seed of the random generator.
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation box radius.
    #[arg(long = "N")]
    n: Option<i64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; butterfly defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Deformed product a ⋆ b (undeformed without --cocycle).
    Mul {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Skew form JSON.
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Adjoint a*.
    Involution {
        #[arg(long)]
        a: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Poisson bracket {a, b} for the skew form --gamma.
    Poisson {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Operator norm of the truncated representation.
    Norm {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Spectrum of a self-adjoint element on the truncation box.
    Spectrum {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Spectra over a family; defaults to u+u*+v+v* over θ ∈ [0, 1].
    Butterfly {
        /// Number of θ samples for the default Harper scan.
        #[arg(long = "flux-grid", default_value_t = 64)]
        flux_grid: usize,
        /// Field element JSON (replaces the Harper element).
        #[arg(long, requires = "family")]
        field: Option<PathBuf>,
        /// Cocycle family JSON for --field.
        #[arg(long, requires = "field")]
        family: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Bloch-oracle bands of u+u*+v+v* at rational flux p/q.
    Bands {
        #[arg(long)]
        flux: String,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Deformed action a·ψ on a module element.
    Act {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Algebra-valued inner product ⟨ψ, φ⟩.
    Inner {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        cocycle: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Twisted tensor x ⊗_J y, or the braiding Ψ_J(x ⊗ y) with --braid.
    Twist {
        /// Skew form JSON for J.
        #[arg(long)]
        j: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        braid: bool,
        #[command(flatten)]
        common: Common,
    },
}

/// A failure carrying its exit code and a one-line message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Attributes a library error to the flag it came from.
fn flagged(flag: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| match e {
        Error::Parse { field, message } => input_error(format!("{flag}: {field}: {message}")),
        other => input_error(format!("{flag}: {other}")),
    }
}

fn lib_error(e: Error) -> Failure {
    input_error(e.to_string())
}

fn read(flag: &str, path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{flag}: cannot read `{}`: {e}", path.display())))
}

fn load_element(flag: &str, path: &Path) -> Outcome<GradedElement> {
    json::parse_element(&read(flag, path)?).map_err(flagged(flag))
}

fn load_module(flag: &str, path: &Path) -> Outcome<ModuleElement> {
    json::parse_module(&read(flag, path)?).map_err(flagged(flag))
}

fn load_form(flag: &str, path: &Path) -> Outcome<SkewForm> {
    json::parse_skew_form(&read(flag, path)?).map_err(flagged(flag))
}

/// The cocycle from `--cocycle`, or the trivial one of the given rank.
fn load_cocycle(path: Option<&PathBuf>, rank: usize) -> Outcome<Cocycle> {
    match path {
        None => Ok(Cocycle::trivial(rank)),
        Some(p) => {
            let form = load_form("--cocycle", p)?;
            same_rank("--cocycle", form.rank(), rank)?;
            Ok(make_bicharacter(form))
        }
    }
}

fn same_rank(flag: &str, found: usize, expected: usize) -> Outcome<()> {
    if found != expected {
        return Err(input_error(format!("{flag}: rank {found} does not match the other inputs' rank {expected}")));
    }
    Ok(())
}

fn truncation(common: &Common, rank: usize, default: i64) -> Outcome<TruncationBox> {
    TruncationBox::new(common.n.unwrap_or(default), rank).map_err(flagged("--N"))
}

fn rounded_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable output");
    json::round_numbers(&mut v, DIGITS);
    let mut s = serde_json::to_string_pretty(&v).expect("json value");
    s.push('\n');
    s
}

fn num(x: f64) -> f64 {
    json::round_significant(x, DIGITS)
}

fn json_only(common: &Common) -> Outcome<()> {
    if common.format == Some(Format::Csv) {
        return Err(input_error("--format: csv output is only available for spectrum and butterfly"));
    }
    Ok(())
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        ComplexOut { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct TensorComponentOut {
    p: Vec<i64>,
    q: Vec<i64>,
    phase: ComplexOut,
    data: Vec<Vec<ComplexOut>>,
}

#[derive(Serialize)]
struct TensorOut {
    n: usize,
    shape: [usize; 2],
    components: Vec<TensorComponentOut>,
}

fn tensor_out(t: &GradedTensor) -> TensorOut {
    let (rows, cols) = t.shape();
    TensorOut {
        n: t.rank(),
        shape: [rows, cols],
        components: t
            .iter()
            .map(|((p, q), c)| TensorComponentOut {
                p: p.entries().to_vec(),
                q: q.entries().to_vec(),
                phase: c.phase().into(),
                data: c.values().chunks(cols.max(1)).map(|r| r.iter().map(|&z| z.into()).collect()).collect(),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct NormOut {
    norm: f64,
    box_radius: i64,
    rank: usize,
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    box_radius: i64,
    hermiticity_defect: f64,
    eigenvalues: &'a [f64],
}

#[derive(Serialize)]
struct ScanRow<'a> {
    label: &'a str,
    theta: f64,
    eigenvalues: &'a [f64],
}

fn harper_scan(samples: usize) -> Outcome<(CocycleFamily, FieldElement)> {
    if samples < 2 {
        return Err(input_error("--flux-grid: need at least 2 samples"));
    }
    let grid = Arc::new(BaseGrid::uniform("theta", samples).map_err(flagged("--flux-grid"))?);
    let thetas: Vec<f64> = grid.points().iter().map(|p| p.coord.as_ref().map_or(0.0, |c| c[0])).collect();
    let fam = CocycleFamily::from_fn(grid.clone(), |i| SkewForm::planar(thetas[i])).map_err(lib_error)?;
    Ok((fam, FieldElement::constant(grid, rep::harper_element())))
}

fn execute(verb: Verb) -> Outcome<(Common, String, i32)> {
    Ok(match verb {
        Verb::Mul { a, b, cocycle, common } => {
            json_only(&common)?;
            let a = load_element("--a", &a)?;
            let b = load_element("--b", &b)?;
            same_rank("--b", b.rank(), a.rank())?;
            if b.fiber() != a.fiber() {
                return Err(input_error(format!("--b: fiber {} does not match --a fiber {}", b.fiber(), a.fiber())));
            }
            let c = load_cocycle(cocycle.as_ref(), a.rank())?;
            let ab = algebra::star(&a, &b, &c).map_err(lib_error)?;
            (common, rounded_json(&WireElement::from_element(&ab)), 0)
        }
        Verb::Involution { a, common } => {
            json_only(&common)?;
            let a = load_element("--a", &a)?;
            (common, rounded_json(&WireElement::from_element(&algebra::involution(&a))), 0)
        }
        Verb::Poisson { a, b, gamma, common } => {
            json_only(&common)?;
            let a = load_element("--a", &a)?;
            let b = load_element("--b", &b)?;
            same_rank("--b", b.rank(), a.rank())?;
            let g = load_form("--gamma", &gamma)?;
            same_rank("--gamma", g.rank(), a.rank())?;
            let pb = algebra::poisson(&a, &b, &g).map_err(flagged("--a"))?;
            (common, rounded_json(&WireElement::from_element(&pb)), 0)
        }
        Verb::Norm { a, cocycle, common } => {
            json_only(&common)?;
            let a = load_element("--a", &a)?;
            let c = load_cocycle(cocycle.as_ref(), a.rank())?;
            let bx = truncation(&common, a.rank(), 20)?;
            let norm = rep::op_norm(&a, &c, &bx).map_err(lib_error)?;
            let out = NormOut {
                norm,
                box_radius: bx.radius(),
                rank: bx.rank(),
            };
            (common, rounded_json(&out), 0)
        }
        Verb::Spectrum { a, cocycle, common } => {
            let a = load_element("--a", &a)?;
            let c = load_cocycle(cocycle.as_ref(), a.rank())?;
            let bx = truncation(&common, a.rank(), 20)?;
            let spec = rep::spectrum(&a, &c, &bx).map_err(flagged("--a"))?;
            let text = match common.format_or(Format::Json) {
                Format::Json => rounded_json(&SpectrumOut {
                    box_radius: bx.radius(),
                    hermiticity_defect: spec.hermiticity_defect,
                    eigenvalues: &spec.eigenvalues,
                }),
                Format::Csv => {
                    let mut s = String::from("eig\n");
                    for e in &spec.eigenvalues {
                        s.push_str(&format!("{}\n", num(*e)));
                    }
                    s
                }
            };
            (common, text, 0)
        }
        Verb::Butterfly {
            flux_grid,
            field,
            family,
            common,
        } => {
            let (fam, element) = match (field, family) {
                (Some(f), Some(g)) => {
                    let element = json::parse_field(&read("--field", &f)?).map_err(flagged("--field"))?;
                    let wire: WireFamily = json::decode(&read("--family", &g)?).map_err(flagged("--family"))?;
                    let fam = wire.to_family(element.grid().clone()).map_err(flagged("--family"))?;
                    (fam, element)
                }
                _ => harper_scan(flux_grid)?,
            };
            same_rank("--family", fam.rank(), element.rank())?;
            let bx = truncation(&common, element.rank(), 40)?;
            let rows = rep::butterfly_scan(&fam, &element, &bx).map_err(flagged("--field"))?;
            let text = match common.format_or(Format::Csv) {
                Format::Csv => {
                    let rounded: Vec<_> = rows
                        .iter()
                        .map(|(l, s)| {
                            let mut s = s.clone();
                            s.eigenvalues.iter_mut().for_each(|e| *e = num(*e));
                            (l.clone(), s)
                        })
                        .collect();
                    let mut buf = Vec::new();
                    rep::write_butterfly_csv(&mut buf, &fam, &rounded).map_err(|e| input_error(e.to_string()))?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
                Format::Json => {
                    let out: Vec<ScanRow> = rows
                        .iter()
                        .enumerate()
                        .map(|(i, (label, s))| ScanRow {
                            label,
                            theta: match fam.grid().points()[i].coord.as_deref() {
                                Some([t, ..]) => *t,
                                _ if fam.rank() >= 2 => fam.forms()[i].get(0, 1),
                                _ => 0.0,
                            },
                            eigenvalues: &s.eigenvalues,
                        })
                        .collect();
                    rounded_json(&out)
                }
            };
            (common, text, 0)
        }
        Verb::Bands { flux, samples, common } => {
            json_only(&common)?;
            let flux: Flux = flux.parse().map_err(flagged("--flux"))?;
            let bands = rep::bloch_oracle_hofstadter(flux, samples).map_err(flagged("--samples"))?;
            (common, rounded_json(&WireBands::new(flux, &bands)), 0)
        }
        Verb::Act { a, psi, cocycle, common } => {
            json_only(&common)?;
            let a = load_element("--a", &a)?;
            let psi = load_module("--psi", &psi)?;
            same_rank("--psi", psi.rank(), a.rank())?;
            let c = load_cocycle(cocycle.as_ref(), a.rank())?;
            let out = hilbmod::act_deformed(&a, &psi, &c).map_err(flagged("--psi"))?;
            (common, rounded_json(&WireModule::from_module(&out)), 0)
        }
        Verb::Inner { psi, phi, cocycle, common } => {
            json_only(&common)?;
            let psi = load_module("--psi", &psi)?;
            let phi = load_module("--phi", &phi)?;
            same_rank("--phi", phi.rank(), psi.rank())?;
            let c = load_cocycle(cocycle.as_ref(), psi.rank())?;
            let out = hilbmod::inner(&psi, &phi, &c).map_err(flagged("--phi"))?;
            (common, rounded_json(&WireElement::from_element(&out)), 0)
        }
        Verb::Verify { suite, trials, common } => {
            json_only(&common)?;
            let suite: Suite = suite.parse().map_err(flagged("--suite"))?;
            let seed = common.seed.ok_or_else(|| input_error("--seed: required for verify"))?;
            let cfg = SuiteConfig {
                seed,
                trials,
                radius: common.n,
            };
            let report = run_suite(suite, &cfg).map_err(lib_error)?;
            let code = if report.passed { 0 } else { 1 };
            (common, rounded_json(&report), code)
        }
        Verb::Twist { j, x, y, braid, common } => {
            json_only(&common)?;
            let j = TwistJ::new(load_form("--j", &j)?);
            let x = load_module("--x", &x)?;
            let y = load_module("--y", &y)?;
            same_rank("--x", x.rank(), j.rank())?;
            same_rank("--y", y.rank(), j.rank())?;
            let t = if braid {
                monoidal::braiding_psi(&j, &x, &y)
            } else {
                monoidal::deform_tensor(&j, &x, &y)
            }
            .map_err(lib_error)?;
            (common, rounded_json(&tensor_out(&t)), 0)
        }
    })
}

/// Runs one invocation; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let body = text.split("Usage:").next().unwrap_or_default();
            let line = body.split_whitespace().collect::<Vec<_>>().join(" ");
            let _ = writeln!(err, "{line}");
            return 2;
        }
    };
    match execute(cli.verb) {
        Ok((common, text, code)) => {
            let written = match &common.out {
                Some(path) => fs::write(path, text.as_bytes())
                    .map_err(|e| format!("error: --out: cannot write `{}`: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| format!("error: {e}")),
            };
            match written {
                Ok(()) => code,
                Err(msg) => {
                    let _ = writeln!(err, "{msg}");
                    2
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
