use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isoptope::extremality::{self, FocResidual, HingeReport, HingeSpec};
use isoptope::isotropy;
use isoptope::optimize::{self, AscentConfig, AscentMode};
use isoptope::polytope::{moments, validate};
use isoptope::sample::{self, Estimate, RngSeed, Z_LIMIT};
use isoptope::{fixtures, json, symmetry, Error, PolytopeV};

#[derive(Parser)]
#[command(
    name = "isoptope",
    version,
    about = "Isotropic constants and extremality diagnostics for simplicial polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume, centroid, raw second moment and covariance.
    Moments { file: Option<PathBuf> },
    /// Map to isotropic position.
    Isotropic {
        file: Option<PathBuf>,
        /// Write the isotropic image here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The isotropic constant L and L^{2d}.
    Lconst { file: Option<PathBuf> },
    /// First-order residuals per facet, after isotropization.
    Foc { file: Option<PathBuf> },
    /// Hinging derivative of one facet about the ridge opposite one of its vertices.
    Hinge {
        file: Option<PathBuf>,
        #[arg(long)]
        facet: usize,
        #[arg(long)]
        apex: usize,
        /// Finite-difference step (and angle of the body written by --out).
        #[arg(long, default_value_t = 1e-4)]
        t: f64,
        /// Compare with a central finite difference at step t.
        #[arg(long)]
        fd: bool,
        /// Also report Richardson extrapolation from steps (r, r/2).
        #[arg(long, value_name = "R")]
        richardson: Option<f64>,
        /// Write the body hinged by angle t here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shake the body towards the hyperplane orthogonal to a direction.
    Shake {
        file: Option<PathBuf>,
        /// Comma-separated direction, e.g. 0,0,1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        dir: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-order, reflection and congruence summary.
    Symmetry { file: Option<PathBuf> },
    /// Monte Carlo check of an exact quantity.
    Mc {
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Facet for --check facet.
        #[arg(long, default_value_t = 0)]
        facet: usize,
        /// Weighted vertex for --check facet.
        #[arg(long, default_value_t = 0)]
        apex: usize,
    },
    /// Local ascent of L; prints the trace as CSV.
    Ascend {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Hinge)]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
        #[arg(long, default_value_t = 1e-6)]
        foc_tol: f64,
        /// Write the final body here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a fixture body.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sphere points for random-simplicial (default 2·dim + 2).
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Moments,
    M2,
    Facet,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hinge,
    Vertex,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Simplex,
    Cube,
    RandomSimplicial,
}

enum Failure {
    Input(String),
    Numeric(String),
    Statistical,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Statistical) => {
            eprintln!("error: statistical check failed (|z| > {Z_LIMIT})");
            ExitCode::from(4)
        }
    }
}

fn load(file: Option<&Path>) -> Result<PolytopeV, Failure> {
    let text = match file {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let p = PolytopeV::from_json(&text)?;
    let report = validate(&p);
    if !report.is_valid() {
        return Err(Failure::Input(format!("invalid polytope: {:?}", report.violations)));
    }
    Ok(p)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if std::env::var("ISOPTOPE_CI").is_ok_and(|v| v == "1") {
        return Err(Failure::Input("ISOPTOPE_CI=1 requires an explicit --seed".into()));
    }
    match std::env::var("ISOPTOPE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("ISOPTOPE_SEED is not an integer: {v}"))),
        Err(_) => Ok(0),
    }
}

fn emit<T: Serialize>(value: &T) -> Outcome {
    let text = json::to_string_pretty(value)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

fn write_body(path: &Path, p: &PolytopeV) -> Outcome {
    fs::write(path, format!("{}\n", p.to_json()?))?;
    Ok(())
}

#[derive(Serialize)]
struct LConst {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "L_pow_2d")]
    l_pow_2d: f64,
}

#[derive(Serialize)]
struct FocTable {
    dim: usize,
    #[serde(rename = "L")]
    l: f64,
    max_abs: f64,
    max_relative: f64,
    target: f64,
    residuals: Vec<FocResidual>,
}

#[derive(Serialize)]
struct HingeOutput {
    facet_index: usize,
    apex_index: usize,
    #[serde(flatten)]
    report: HingeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    finite_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    richardson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    richardson_relative_error: Option<f64>,
}

#[derive(Serialize)]
struct McEntry {
    name: String,
    estimate: Estimate,
    exact: f64,
    z: f64,
}

#[derive(Serialize)]
struct McOutput {
    check: &'static str,
    seed: RngSeed,
    entries: Vec<McEntry>,
    max_abs_z: f64,
    z_limit: f64,
    pass: bool,
}

fn entry(name: String, estimate: Estimate, exact: f64) -> McEntry {
    McEntry {
        z: estimate.z_score(exact),
        name,
        estimate,
        exact,
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Moments { file } => emit(&moments(&load(file.as_deref())?)?),
        Command::Isotropic { file, out } => {
            let r = isotropy::isotropic_position(&load(file.as_deref())?)?;
            if let Some(path) = out {
                write_body(&path, &r.body)?;
            }
            emit(&r)
        }
        Command::Lconst { file } => {
            let p = load(file.as_deref())?;
            let l_pow_2d = isotropy::isotropic_constant_pow_2d(&p)?;
            emit(&LConst {
                l: l_pow_2d.powf(1.0 / (2.0 * p.dim as f64)),
                l_pow_2d,
            })
        }
        Command::Foc { file } => {
            let iso = isotropy::isotropic_position(&load(file.as_deref())?)?;
            let residuals = extremality::foc_residuals(&iso.body)?;
            emit(&FocTable {
                dim: iso.body.dim,
                l: iso.l,
                max_abs: residuals.iter().map(FocResidual::max_abs).fold(0.0, f64::max),
                max_relative: residuals
                    .iter()
                    .flat_map(|r| r.relative.iter().map(|x| x.abs()))
                    .fold(0.0, f64::max),
                target: extremality::foc_target(iso.body.dim),
                residuals,
            })
        }
        Command::Hinge {
            file,
            facet,
            apex,
            t,
            fd,
            richardson,
            out,
        } => {
            if t.is_nan() || t <= 0.0 {
                return Err(Failure::Input("--t must be positive".into()));
            }
            let body = isotropy::isotropic_position(&load(file.as_deref())?)?.body;
            let spec = HingeSpec::new(facet, apex, 0.0);
            let report = extremality::hinge_derivative(&body, &spec)?;
            let finite_difference = if fd {
                Some(extremality::finite_difference_dl2d(&body, &spec, t)?)
            } else {
                None
            };
            let rich = match richardson {
                Some(r) => Some(extremality::richardson_dl2d(&body, &spec, r)?),
                None => None,
            };
            if let Some(path) = out {
                write_body(
                    &path,
                    &extremality::hinge_polytope(&body, &HingeSpec::new(facet, apex, t))?,
                )?;
            }
            emit(&HingeOutput {
                facet_index: facet,
                apex_index: apex,
                report,
                fd_step: fd.then_some(t),
                finite_difference,
                fd_relative_error: finite_difference.map(|f| rel_err(f, report.dl2d_dt)),
                richardson: rich,
                richardson_relative_error: rich.map(|f| rel_err(f, report.dl2d_dt)),
            })
        }
        Command::Shake { file, dir, out } => {
            let r = symmetry::shake(&load(file.as_deref())?, &dir)?;
            if let Some(path) = out {
                write_body(&path, &r.body)?;
            }
            emit(&r)
        }
        Command::Symmetry { file } => emit(&optimize::report_extremality(&load(file.as_deref())?)?),
        Command::Mc {
            file,
            check,
            n,
            seed,
            stream,
            facet,
            apex,
        } => {
            let seed = RngSeed::new(resolve_seed(seed)?).with_stream(stream);
            let p = load(file.as_deref())?;
            if n < 2 {
                return Err(Failure::Input("--n must be at least 2".into()));
            }
            let (name, entries) = match check {
                Check::Moments => {
                    let exact = moments(&p)?;
                    let est = sample::moment_estimates(&p, n, seed)?;
                    let mut entries: Vec<McEntry> = est
                        .centroid
                        .iter()
                        .enumerate()
                        .map(|(i, e)| entry(format!("centroid[{i}]"), *e, exact.centroid[i]))
                        .collect();
                    let mut idx = 0;
                    for i in 0..p.dim {
                        for j in i..p.dim {
                            entries.push(entry(
                                format!("covariance[{i}][{j}]"),
                                est.covariance[idx],
                                exact.covariance[(i, j)],
                            ));
                            idx += 1;
                        }
                    }
                    ("moments", entries)
                }
                Check::M2 => {
                    let exact = isotropy::m2_identity_lhs(&p)?;
                    ("m2", vec![entry("M2".into(), sample::m2_estimate(&p, n, seed)?, exact)])
                }
                Check::Facet => {
                    if facet >= p.facets.len() || apex >= p.dim {
                        return Err(Failure::Input("facet or apex out of range".into()));
                    }
                    let vs = p.facet_vertices(facet);
                    let exact = extremality::facet_second_moment(&vs, apex);
                    let est = sample::facet_second_moment_estimate(&vs, apex, n, seed)?;
                    ("facet", vec![entry("facet_second_moment".into(), est, exact)])
                }
            };
            let max_abs_z = entries.iter().map(|e| e.z.abs()).fold(0.0, f64::max);
            let pass = max_abs_z <= Z_LIMIT;
            emit(&McOutput {
                check: name,
                seed,
                entries,
                max_abs_z,
                z_limit: Z_LIMIT,
                pass,
            })?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Statistical)
            }
        }
        Command::Ascend {
            file,
            mode,
            seed,
            iters,
            step,
            shrink,
            foc_tol,
            out,
        } => {
            let seed = RngSeed::new(resolve_seed(seed)?);
            let p = load(file.as_deref())?;
            let cfg = AscentConfig {
                step_init: step,
                step_shrink: shrink,
                max_iters: iters,
                foc_tol,
                seed,
                mode: match mode {
                    Mode::Hinge => AscentMode::HingeAscent,
                    Mode::Vertex => AscentMode::VertexPerturb,
                },
            };
            let trace = optimize::ascend(&p, &cfg)?;
            if let Some(path) = out {
                write_body(&path, &trace.final_body)?;
            }
            io::stdout().lock().write_all(trace.to_csv().as_bytes())?;
            Ok(())
        }
        Command::Gen {
            kind,
            dim,
            seed,
            points,
        } => {
            let body = match kind {
                GenKind::Simplex => {
                    if !(1..=12).contains(&dim) {
                        return Err(Failure::Input("simplex dimension must be in 1..=12".into()));
                    }
                    fixtures::regular_simplex_isotropic(dim)
                }
                GenKind::Cube => {
                    if !(1..=8).contains(&dim) {
                        return Err(Failure::Input("cube dimension must be in 1..=8".into()));
                    }
                    fixtures::cube(dim)
                }
                GenKind::RandomSimplicial => {
                    if !(2..=6).contains(&dim) {
                        return Err(Failure::Input("random-simplicial dimension must be in 2..=6".into()));
                    }
                    let n = points.unwrap_or(2 * dim + 2);
                    if !(dim + 1..=64).contains(&n) {
                        return Err(Failure::Input(format!("--points must be in {}..=64", dim + 1)));
                    }
                    fixtures::random_simplicial(dim, n, resolve_seed(seed)?)?
                }
            };
            println!("{}", body.to_json()?);
            Ok(())
        }
    }
}
