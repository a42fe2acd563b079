use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use disc_sieve::budget::Budget;
use disc_sieve::format::{parse_poly, rational_rows, rational_string, QinvInput, SymMatrixJson};
use disc_sieve::{c3, lab, monogenic, Pool, Report, RunError, RunResult};
use disc_sieve_core::lattice::{embed_roots, fujiwara_bound, minkowski_reduce_with, roots, strong_from, Metric, Tri, TIE_TOLERANCE};
use disc_sieve_core::linalg::Mat;
use disc_sieve_core::local_density::{bruteforce_disc_density, bruteforce_maximal_density, lambda_np, rho_np};
use disc_sieve_core::q_invariant::{disc_over_q2, q_of_w0};
use disc_sieve_core::sym_rep::sigma_m;
use disc_sieve_core::{classify_p2, strongly_divides_oracle, weak_normal_form, BigInt, MonicPoly, QInput, SymMatrixRep};
use num_traits::{Signed, Zero};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "disc-sieve", version, about = "Squarefree discriminants, maximal orders and monogenic rings of monic integer polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for the Monte Carlo and sampling experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Leave wall-clock fields out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityKind {
    /// Squarefree discriminant mod p².
    Lambda,
    /// p-maximality.
    Rho,
    /// Squarefree discriminant among a_1 = 0 (sweep only).
    Kappa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Plain,
    Trace,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify p² | Δ(f) as not divisible, weak or strong.
    Classify {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
        /// Also run the exhaustive perturbation oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Map a weak normal form to its symmetric matrix σ_m(f).
    Embed {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        m: u64,
    },
    /// Q-invariant of a W₀ matrix or of a g×(g+1) pencil, given as JSON text or a file.
    Qinv {
        #[arg(long)]
        matrix: String,
    },
    /// Local density at p from its formula, optionally checked by a residue sweep.
    Localdensity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = DensityKind::Lambda)]
        kind: DensityKind,
    },
    /// Squarefree-discriminant density of the height box.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long = "X")]
        x: u64,
    },
    /// Maximal-order density of the height box.
    Maximal {
        #[arg(long)]
        n: usize,
        #[arg(long = "X")]
        x: u64,
    },
    /// Exact Möbius sieve identity on the height box.
    SieveCheck {
        #[arg(long)]
        n: usize,
        #[arg(long = "X")]
        x: u64,
    },
    /// Counts of f with m² | Δ(f) for some squarefree m > M.
    Tail {
        #[arg(long)]
        n: usize,
        #[arg(long = "X")]
        x: u64,
        /// Comma-separated thresholds; powers of two by default.
        #[arg(long = "M", value_delimiter = ',')]
        m: Vec<u64>,
    },
    /// Polynomials of the box that are reducible over Q.
    Reducible {
        #[arg(long)]
        n: usize,
        #[arg(long = "X")]
        x: u64,
    },
    /// Monte Carlo area of |4a₂³ + 27a₃²| < 1 against its closed form.
    C3vol {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1e6)]
        truncation: f64,
    },
    /// Strongly quasi-reduced monogenic rings with a_1 = 0 and height below Y.
    Monogenic {
        #[arg(long)]
        n: usize,
        /// Comma-separated heights.
        #[arg(long = "Y", value_delimiter = ',', required = true)]
        y: Vec<u64>,
        /// Relative length difference counted as a tie; 0 leaves ties to the certified error bounds.
        #[arg(long, default_value_t = TIE_TOLERANCE)]
        tie: f64,
    },
    /// Fraction of strongly quasi-reduced polynomials in sampled height boxes.
    Quasi {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long = "X", value_delimiter = ',', default_values_t = [5u64, 10, 20])]
        x: Vec<u64>,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
    },
    /// Roots, embedding and Minkowski reduction of Z[θ].
    Reduce {
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value_t = MetricArg::Plain)]
        metric: MetricArg,
        /// Relative length difference counted as a tie; 0 leaves ties to the certified error bounds.
        #[arg(long, default_value_t = TIE_TOLERANCE)]
        tie: f64,
    },
}

#[derive(Serialize)]
struct ClassifyReport {
    poly: String,
    p: u64,
    discriminant: String,
    tag: &'static str,
    witness: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_strong: Option<bool>,
}

impl Report for ClassifyReport {}

#[derive(Serialize)]
struct NormalFormJson {
    l: String,
    m: u64,
    c: Vec<String>,
}

#[derive(Serialize)]
struct EmbedReport {
    poly: String,
    normal_form: NormalFormJson,
    #[serde(flatten)]
    matrix: SymMatrixJson,
    invariant_poly: String,
    #[serde(rename = "Q")]
    q: String,
    #[serde(rename = "absQ")]
    abs_q: String,
}

impl Report for EmbedReport {}

#[derive(Serialize)]
struct QinvReport {
    input: &'static str,
    g: usize,
    #[serde(rename = "Q")]
    q: String,
    #[serde(rename = "absQ")]
    abs_q: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariant_poly: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disc_over_q2: Option<String>,
}

impl Report for QinvReport {}

#[derive(Serialize)]
struct LocalDensityReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equal: Option<bool>,
}

impl Report for LocalDensityReport {}

#[derive(Serialize)]
struct ReduceReport {
    poly: String,
    r: usize,
    s: usize,
    /// `[re, im]`, real roots first, then one root per complex pair.
    roots: Vec<[f64; 2]>,
    root_error_bound: f64,
    fujiwara_bound: f64,
    gram: Vec<Vec<f64>>,
    transform: Vec<Vec<i128>>,
    norms: Vec<f64>,
    is_minkowski_reduced: bool,
    unique: &'static str,
    quasi_reduced: &'static str,
    strongly_quasi_reduced: &'static str,
    h_polys: Option<Vec<String>>,
    tie_tolerance: f64,
}

impl Report for ReduceReport {}

fn tri_str(t: Tri) -> &'static str {
    match t {
        Tri::True => "true",
        Tri::False => "false",
        Tri::Undetermined => "undetermined",
    }
}

/// `h` with ascending coefficients, monic.
fn h_text(h: &[i128]) -> String {
    let coeffs = h.iter().rev().skip(1).map(|&c| BigInt::from(c)).collect();
    MonicPoly::new(coeffs).map_or_else(|_| format!("{h:?}"), |p| p.to_string())
}

fn check_tie(tie: f64) -> RunResult<()> {
    if tie.is_finite() && tie >= 0.0 {
        Ok(())
    } else {
        Err(RunError::invalid("--tie must be a finite non-negative number"))
    }
}

fn read_matrix_arg(arg: &str) -> RunResult<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        Ok(std::fs::read_to_string(arg)?)
    }
}

fn emit<R: Report>(mut report: R, cli: &Cli) -> RunResult<()> {
    if cli.no_timing {
        report.clear_timing();
    }
    let text = match cli.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> RunResult<()> {
    let budget = Budget::from_env()?;
    let pool = Pool::new(cli.threads)?;
    match &cli.command {
        Command::Classify { poly, p, oracle } => {
            let f = parse_poly(poly)?;
            let class = classify_p2(&f, *p)?;
            let oracle_strong = if *oracle { Some(strongly_divides_oracle(&f, *p, budget.oracle())?) } else { None };
            emit(
                ClassifyReport {
                    poly: f.to_string(),
                    p: *p,
                    discriminant: f.discriminant().to_string(),
                    tag: class.tag.as_str(),
                    witness: class.witness,
                    oracle_strong,
                },
                cli,
            )
        }
        Command::Embed { poly, m } => {
            let f = parse_poly(poly)?;
            let nf = weak_normal_form(&f, *m)?
                .ok_or_else(|| RunError::invalid(format!("{f} is not weakly divisible at every prime dividing {m}")))?;
            let b = sigma_m(&nf)?;
            let q = q_of_w0(&b)?;
            emit(
                EmbedReport {
                    poly: f.to_string(),
                    normal_form: NormalFormJson { l: nf.l.to_string(), m: nf.m, c: nf.c.iter().map(ToString::to_string).collect() },
                    matrix: SymMatrixJson::from_rep(&b),
                    invariant_poly: b.invariant_monic().map_or_else(|| "non-monic".into(), |p| p.to_string()),
                    q: rational_string(&q),
                    abs_q: rational_string(&q.abs()),
                },
                cli,
            )
        }
        Command::Qinv { matrix } => {
            let report = match QinvInput::parse(&read_matrix_arg(matrix)?)? {
                QinvInput::Pencil { a, b } => {
                    let input = QInput::new(rational_rows(&a)?, rational_rows(&b)?)?;
                    let q = input.q();
                    QinvReport {
                        input: "pencil",
                        g: input.g(),
                        q: rational_string(&q),
                        abs_q: rational_string(&q.abs()),
                        invariant_poly: None,
                        disc_over_q2: None,
                    }
                }
                QinvInput::Symmetric { n, d, s } => {
                    let rows = disc_sieve::format::integer_rows(&s)?;
                    if n.is_some_and(|n| n != rows.len()) {
                        return Err(RunError::invalid("\"n\" does not match the number of rows of S"));
                    }
                    let b = SymMatrixRep::new(d, Mat::from_rows(rows))?;
                    let q = q_of_w0(&b)?;
                    QinvReport {
                        input: "w0",
                        g: (b.n() - 1) / 2,
                        q: rational_string(&q),
                        abs_q: rational_string(&q.abs()),
                        invariant_poly: Some(b.invariant_monic().map_or_else(|| "non-monic".into(), |p| p.to_string())),
                        disc_over_q2: (!q.is_zero()).then(|| disc_over_q2(&b).map(|r| rational_string(&r))).transpose()?,
                    }
                }
            };
            emit(report, cli)
        }
        Command::Localdensity { n, p, oracle, kind } => {
            let formula = match kind {
                DensityKind::Lambda => Some(lambda_np(*n, *p)?),
                DensityKind::Rho => Some(rho_np(*n, *p)?),
                DensityKind::Kappa => None,
            };
            let sweep = if *oracle || *kind == DensityKind::Kappa {
                Some(match kind {
                    DensityKind::Lambda => bruteforce_disc_density(*n, *p, false, budget.sweep())?,
                    DensityKind::Kappa => bruteforce_disc_density(*n, *p, true, budget.sweep())?,
                    DensityKind::Rho => bruteforce_maximal_density(*n, *p, budget.sweep())?,
                })
            } else {
                None
            };
            let equal = match (&formula, &sweep) {
                (Some(f), Some(s)) => Some(f == s),
                _ => None,
            };
            emit(
                LocalDensityReport { formula: formula.as_ref().map(rational_string), oracle: sweep.as_ref().map(rational_string), equal },
                cli,
            )
        }
        Command::Density { n, x } => emit(lab::squarefree_density_experiment(*n, *x, &pool, &budget)?, cli),
        Command::Maximal { n, x } => emit(lab::maximality_density_experiment(*n, *x, &pool, &budget)?, cli),
        Command::SieveCheck { n, x } => emit(lab::mobius_sieve_identity_check(*n, *x, &pool, &budget)?, cli),
        Command::Tail { n, x, m } => {
            let ms = if m.is_empty() { lab::default_thresholds(*n, *x, &budget)? } else { m.clone() };
            emit(lab::tail_counts(*n, *x, &ms, &pool, &budget)?, cli)
        }
        Command::Reducible { n, x } => emit(lab::reducible_count(*n, *x, &pool, &budget)?, cli),
        Command::C3vol { samples, truncation } => emit(c3::c3_volume(*samples, *truncation, cli.seed, &pool)?, cli),
        Command::Monogenic { n, y, tie } => {
            check_tie(*tie)?;
            emit(monogenic::monogenic_count_experiment(*n, y, *tie, &pool, &budget)?, cli)
        }
        Command::Quasi { n, x, samples } => {
            emit(monogenic::quasi_fraction_experiment(*n, x, *samples, cli.seed, &pool, &budget)?, cli)
        }
        Command::Reduce { poly, metric, tie } => {
            check_tie(*tie)?;
            let f = parse_poly(poly)?;
            let rts = roots(&f)?;
            let metric = match metric {
                MetricArg::Plain => Metric::Plain,
                MetricArg::Trace => Metric::Trace,
            };
            let lat = embed_roots(&rts, metric);
            let red = minkowski_reduce_with(&lat, budget.lattice(), *tie)?;
            let n = lat.n;
            let gram = lat.gram();
            emit(
                ReduceReport {
                    poly: f.to_string(),
                    r: rts.r(),
                    s: rts.s(),
                    roots: rts.real.iter().map(|&x| [x, 0.0]).chain(rts.complex.iter().map(|z| [z.re, z.im])).collect(),
                    root_error_bound: lat.root_error_bound(),
                    fujiwara_bound: fujiwara_bound(&f),
                    gram: gram.chunks(n).map(<[f64]>::to_vec).collect(),
                    transform: red.transform.chunks(n).map(<[i128]>::to_vec).collect(),
                    norms: red.norms.clone(),
                    is_minkowski_reduced: red.is_minkowski_reduced,
                    unique: red.unique.as_str(),
                    quasi_reduced: tri_str(red.shape),
                    strongly_quasi_reduced: tri_str(strong_from(&red)),
                    h_polys: red.h_polys.as_ref().map(|hs| hs.iter().map(|h| h_text(h)).collect()),
                    tie_tolerance: *tie,
                },
                cli,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
