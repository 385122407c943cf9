//! Command-line front end for the `qpoincare` library.
//!
//! Three subcommands cover the library's surface:
//!
//! * `coeff`    — one error-bounded Fourier coefficient of a classical
//!   Poincare series (family `P`) or of a Maass-Poincare series
//!   (families `Qplus`, `Qzero`, `Qminus` by the sign of the index).
//! * `qexp`     — exact rational q-expansions of the level-one objects
//!   `Es`, `Delta`, `j`, the quotient `Es/Delta^r`, and general products
//!   `(E_s/Delta^r) F(j)` (`form`).
//! * `relation` — linear relations among cuspidal Poincare series:
//!   `corollary` (the distinguished generator), `find` (all reduced
//!   relations up to an index bound), `verify` (recompute coefficient
//!   columns with certified errors), and `solve` (realize a principal
//!   part as a weakly holomorphic form or report the obstruction).
//!
//! Exit codes form the machine contract: 0 success, 1 a verification
//! refuted the relation, 2 invalid input, 3 the requested error target
//! cannot be certified at the working precision.
//!
//! Global flags: `--precision` (bits, >= 64; the environment variable
//! `QPOINCARE_PRECISION` supplies the default), `--target-error`,
//! `--threads`, and `--output json|csv|pretty`.  Exact rationals are
//! rendered as `"p/q"` strings everywhere, so JSON output round-trips
//! without precision loss; in particular `relation verify --file`
//! accepts exactly what `relation corollary` and `relation find` emit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qpoincare::exactarith::{parse_rational, WeightProfile};
use qpoincare::poincare::{
    classical_coeff, maass_coeff_negative, maass_coeff_positive, maass_coeff_zero, CoeffResult,
    NumericConfig,
};
use qpoincare::qseries::{
    delta, eisenstein, j_invariant, tau_coeffs, weakly_holomorphic_level1, PrincipalPart, QSeries,
};
use qpoincare::relations::{
    corollary_relation, find_relations, solve_principal_part_level1, verify_relation_numeric,
    Relation, Verdict, VerificationReport,
};
use qpoincare::{Error, Result};
use rug::Rational;

#[derive(Parser)]
#[command(
    name = "qpoincare",
    version,
    about = "Poincare series coefficients, exact q-expansions, and linear relations",
    propagate_version = true
)]
struct Cli {
    /// Working precision in bits (>= 64); overrides QPOINCARE_PRECISION.
    #[arg(long, global = true)]
    precision: Option<u32>,

    /// Total error budget for analytic coefficient computations.
    #[arg(long, global = true)]
    target_error: Option<f64>,

    /// Worker threads for relation verification (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Pretty)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Classical cuspidal Poincare series coefficient a(m,k,N;n), n >= 1.
    #[value(name = "P")]
    P,
    /// Maass-Poincare holomorphic-part coefficient b(-m,k,N;n), n >= 1.
    #[value(name = "Qplus")]
    Qplus,
    /// Maass-Poincare constant-term coefficient b(-m,k,N;0).
    #[value(name = "Qzero")]
    Qzero,
    /// Maass-Poincare nonholomorphic-part coefficient b(-m,k,N;n), n <= -1.
    #[value(name = "Qminus")]
    Qminus,
}

impl Family {
    fn tag(self) -> &'static str {
        match self {
            Family::P => "P",
            Family::Qplus => "Qplus",
            Family::Qzero => "Qzero",
            Family::Qminus => "Qminus",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute one Fourier coefficient with a certified error bound.
    Coeff {
        /// Coefficient family: P, Qplus, Qzero, or Qminus.
        #[arg(value_enum)]
        family: Family,
        /// Index m >= 1 of the series.
        #[arg(long)]
        m: u64,
        /// Weight k as an exact rational, e.g. "24" or "15/2".
        #[arg(long)]
        k: String,
        /// Level N >= 1 (4 | N required for half-integral k).
        #[arg(long = "N", default_value_t = 1)]
        level: u64,
        /// Coefficient index n (required for P/Qplus/Qminus; 0 for Qzero).
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
    },
    /// Print an exact q-expansion.
    Qexp {
        /// One of: Es, Delta, j, Es/Delta^r, form.
        expression: String,
        /// Eisenstein weight s (for Es and Es/Delta^r).
        #[arg(long)]
        s: Option<u32>,
        /// Power of Delta in the denominator (for Es/Delta^r).
        #[arg(long)]
        r: Option<u32>,
        /// Target weight k for `form`: expands (E_s/Delta^r) F(j) of weight 2 - k.
        #[arg(long)]
        k: Option<i64>,
        /// Comma-separated rational coefficients c0,c1,... of F(j) for `form`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        coeffs: String,
        /// Highest power of q to include.
        #[arg(long, default_value_t = 64, allow_negative_numbers = true)]
        order: i64,
    },
    /// Find, construct, and verify linear relations among Poincare series.
    Relation {
        #[command(subcommand)]
        action: RelationCmd,
    },
}

#[derive(Subcommand)]
enum RelationCmd {
    /// The distinguished relation supported on {1, ..., d_k + 1}.
    Corollary {
        /// Even weight k >= 4.
        #[arg(long)]
        k: i64,
    },
    /// All reduced relations with support in {1..d_k} and one index <= mmax.
    Find {
        /// Even weight k >= 4.
        #[arg(long)]
        k: i64,
        /// Largest series index to consider.
        #[arg(long)]
        mmax: u64,
    },
    /// Recompute coefficient columns of a relation file and judge the residuals.
    Verify {
        /// Relation JSON file (one object or an array of them).
        #[arg(long)]
        file: PathBuf,
        /// Verify coefficient columns n = 1..=nmax.
        #[arg(long, default_value_t = 5)]
        nmax: u64,
        /// Optional cross-check: reject the file if its weight differs.
        #[arg(long)]
        k: Option<i64>,
        /// Optional cross-check: reject the file if its level differs.
        #[arg(long = "N")]
        level: Option<u64>,
    },
    /// Realize a principal part as a weakly holomorphic form, if one exists.
    Solve {
        /// Even weight k >= 4; the form has weight 2 - k.
        #[arg(long)]
        k: i64,
        /// Principal part JSON file: {"m": "p/q", ...} for poles q^{-m}.
        #[arg(long)]
        file: PathBuf,
        /// Highest power of q to include in the expansion.
        #[arg(long, default_value_t = 64, allow_negative_numbers = true)]
        order: i64,
    },
}

/// Resolved global options: flag > environment > default.
struct RunConfig {
    numeric: NumericConfig,
    target_error: f64,
    output: Output,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let precision = match cli.precision {
        Some(p) => p,
        None => match std::env::var("QPOINCARE_PRECISION") {
            Ok(text) => text.trim().parse::<u32>().map_err(|_| {
                Error::InvalidArgument(format!(
                    "QPOINCARE_PRECISION must be a positive integer, got `{text}`"
                ))
            })?,
            Err(_) => 128,
        },
    };
    if precision < 64 {
        return Err(Error::InvalidArgument(format!(
            "precision must be at least 64 bits, got {precision}"
        )));
    }
    let target_error = cli.target_error.unwrap_or(1e-9);
    if !(target_error > 0.0) || !target_error.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target error must be a positive finite number, got {target_error}"
        )));
    }
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::InvalidArgument("threads must be >= 1".into()));
        }
        // Results are independent of the pool size; this only bounds the
        // parallelism of `relation verify`.  A second initialization (e.g.
        // in tests sharing a process) is harmless, so the error is ignored.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(RunConfig {
        numeric: NumericConfig {
            precision_bits: precision,
            ..NumericConfig::default()
        },
        target_error,
        output: cli.output,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnreachableTolerance(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Coeff {
            family,
            m,
            k,
            level,
            n,
        } => cmd_coeff(&cfg, *family, *m, k, *level, *n),
        Command::Qexp {
            expression,
            s,
            r,
            k,
            coeffs,
            order,
        } => cmd_qexp(&cfg, expression, *s, *r, *k, coeffs, *order),
        Command::Relation { action } => match action {
            RelationCmd::Corollary { k } => cmd_relation_corollary(&cfg, *k),
            RelationCmd::Find { k, mmax } => cmd_relation_find(&cfg, *k, *mmax),
            RelationCmd::Verify {
                file,
                nmax,
                k,
                level,
            } => cmd_relation_verify(&cfg, file, *nmax, *k, *level),
            RelationCmd::Solve { k, file, order } => cmd_relation_solve(&cfg, *k, file, *order),
        },
    }
}

/// Parse "24" or "15/2" into the doubled weight 2k.
fn parse_two_k(text: &str) -> Result<i64> {
    let k = parse_rational(text)?;
    let two_k = k * Rational::from(2);
    if !two_k.is_integer() {
        return Err(Error::InvalidWeight(format!(
            "k must lie in (1/2)Z, got {text}"
        )));
    }
    two_k
        .numer()
        .to_i64()
        .ok_or_else(|| Error::InvalidWeight(format!("weight {text} is out of range")))
}

/// Format the weight of a profile back as an exact rational string.
fn k_string(w: &WeightProfile) -> String {
    Rational::from((w.two_k(), 2)).to_string()
}

// ---------------------------------------------------------------------------
// coeff
// ---------------------------------------------------------------------------

fn cmd_coeff(
    cfg: &RunConfig,
    family: Family,
    m: u64,
    k_text: &str,
    level: u64,
    n: Option<i64>,
) -> Result<ExitCode> {
    let w = WeightProfile::new(parse_two_k(k_text)?, level)?;
    let need_n = |sign: &str| -> Result<i64> {
        n.ok_or_else(|| Error::InvalidArgument(format!("this family needs --n with {sign}")))
    };
    let result = match family {
        Family::P => {
            let n = need_n("n >= 1")?;
            if n < 1 {
                return Err(Error::InvalidArgument(format!(
                    "family P has index n >= 1, got {n}"
                )));
            }
            classical_coeff(&w, m, n as u64, cfg.target_error, &cfg.numeric)?
        }
        Family::Qplus => {
            let n = need_n("n >= 1")?;
            if n < 1 {
                return Err(Error::InvalidArgument(format!(
                    "family Qplus has index n >= 1, got {n}"
                )));
            }
            maass_coeff_positive(&w, m, n as u64, cfg.target_error, &cfg.numeric)?
        }
        Family::Qzero => {
            if let Some(n) = n {
                if n != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "family Qzero has index n = 0, got {n}"
                    )));
                }
            }
            maass_coeff_zero(&w, m, cfg.target_error, &cfg.numeric)?
        }
        Family::Qminus => {
            let n = need_n("n <= -1")?;
            maass_coeff_negative(&w, m, n, cfg.target_error, &cfg.numeric)?
        }
    };
    render_coeff(cfg, family, &w, &result);
    Ok(ExitCode::SUCCESS)
}

fn render_coeff(cfg: &RunConfig, family: Family, w: &WeightProfile, r: &CoeffResult) {
    let (re, im) = r.value_f64();
    match cfg.output {
        Output::Json => {
            let v = serde_json::json!({
                "family": family.tag(),
                "k": k_string(w),
                "N": w.level(),
                "m": r.m,
                "n": r.n,
                "value": {"re": re, "im": im},
                "tail_bound": r.tail_bound,
                "rounding_bound": r.rounding_bound,
                "total_bound": r.total_bound(),
                "c_used": r.c_used,
                "heuristic": r.heuristic,
            });
            println!("{v}");
        }
        Output::Csv => {
            println!("family,m,k,N,n,re,im,tail_bound,rounding_bound,total_bound,c_used,heuristic");
            println!(
                "{},{},{},{},{},{},{},{:e},{:e},{:e},{},{}",
                family.tag(),
                r.m,
                k_string(w),
                w.level(),
                r.n,
                re,
                im,
                r.tail_bound,
                r.rounding_bound,
                r.total_bound(),
                r.c_used,
                r.heuristic
            );
        }
        Output::Pretty => {
            let index = match family {
                Family::P => format!("a({}, {}, {}; {})", r.m, k_string(w), w.level(), r.n),
                _ => format!("b(-{}, {}, {}; {})", r.m, k_string(w), w.level(), r.n),
            };
            println!("coefficient  {index}");
            if im.abs() <= r.total_bound() {
                // The imaginary part is indistinguishable from zero at the
                // certified accuracy; only the machine formats keep it.
                println!("value        {re}");
            } else {
                println!("value        {re} + {im} i");
            }
            println!(
                "bound        {:e}  (tail {:e}, rounding {:e})",
                r.total_bound(),
                r.tail_bound,
                r.rounding_bound
            );
            println!("cutoff       largest modulus c = {}", r.c_used);
            if r.heuristic {
                println!("note         k = 2 heuristic mode: the tail bound is an estimate");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// qexp
// ---------------------------------------------------------------------------

fn cmd_qexp(
    cfg: &RunConfig,
    expression: &str,
    s: Option<u32>,
    r: Option<u32>,
    k: Option<i64>,
    coeffs: &str,
    order: i64,
) -> Result<ExitCode> {
    let need = |flag: &str, what: &str| {
        Error::InvalidArgument(format!("`qexp {expression}` needs --{flag} ({what})"))
    };
    let series = match expression {
        "Es" => eisenstein(s.ok_or_else(|| need("s", "Eisenstein weight"))?, order)?,
        "Delta" => delta(order)?,
        "j" => j_invariant(order)?,
        "Es/Delta^r" => tau_coeffs(
            r.ok_or_else(|| need("r", "power of Delta"))?,
            s.ok_or_else(|| need("s", "Eisenstein weight"))?,
            order,
        )?,
        "form" => {
            let k = k.ok_or_else(|| need("k", "target weight; the form has weight 2 - k"))?;
            let f: Vec<Rational> = coeffs
                .split(',')
                .map(parse_rational)
                .collect::<Result<_>>()?;
            weakly_holomorphic_level1(k, &f, order)?
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown expression `{other}`; expected Es, Delta, j, Es/Delta^r, or form"
            )))
        }
    };
    render_series(cfg, &series);
    Ok(ExitCode::SUCCESS)
}

fn render_series(cfg: &RunConfig, f: &QSeries) {
    match cfg.output {
        Output::Json => println!("{}", f.to_json()),
        Output::Csv => {
            println!("exponent,coefficient");
            for e in f.lowest_exponent()..=f.trunc_order() {
                println!("{e},{}", f.coeff(e));
            }
        }
        Output::Pretty => println!("{f}"),
    }
}

// ---------------------------------------------------------------------------
// relation
// ---------------------------------------------------------------------------

fn cmd_relation_corollary(cfg: &RunConfig, k: i64) -> Result<ExitCode> {
    let rel = corollary_relation(k)?;
    match cfg.output {
        Output::Json => println!("{}", rel.to_json()),
        Output::Csv => {
            println!("m,alpha");
            for (m, alpha) in &rel.coefficients {
                println!("{m},{alpha}");
            }
        }
        Output::Pretty => print_relation_pretty(&rel),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_relation_find(cfg: &RunConfig, k: i64, mmax: u64) -> Result<ExitCode> {
    let rels = find_relations(k, mmax)?;
    match cfg.output {
        Output::Json => {
            let v: Vec<serde_json::Value> = rels.iter().map(Relation::to_json).collect();
            println!("{}", serde_json::Value::Array(v));
        }
        Output::Csv => {
            println!("relation,m,alpha");
            for (i, rel) in rels.iter().enumerate() {
                for (m, alpha) in &rel.coefficients {
                    println!("{},{m},{alpha}", i + 1);
                }
            }
        }
        Output::Pretty => {
            if rels.is_empty() {
                println!("no relations: P(1..={mmax}, {k}, 1) are linearly independent");
            }
            for (i, rel) in rels.iter().enumerate() {
                println!("relation {}:", i + 1);
                print_relation_pretty(rel);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_relation_pretty(rel: &Relation) {
    println!("{rel}");
    println!("  provenance:     {}", rel.provenance.as_str());
    println!("  principal part: {}", rel.principal_part());
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{} is not valid JSON: {e}", path.display())))
}

fn cmd_relation_verify(
    cfg: &RunConfig,
    file: &Path,
    nmax: u64,
    k: Option<i64>,
    level: Option<u64>,
) -> Result<ExitCode> {
    let doc = read_json(file)?;
    let rels: Vec<Relation> = match &doc {
        serde_json::Value::Array(items) => items
            .iter()
            .map(Relation::from_json)
            .collect::<Result<_>>()?,
        single => vec![Relation::from_json(single)?],
    };
    if rels.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} contains no relations",
            file.display()
        )));
    }
    for rel in &rels {
        if let Some(k) = k {
            if rel.weight != k {
                return Err(Error::InvalidArgument(format!(
                    "file has weight {}, but --k {k} was given",
                    rel.weight
                )));
            }
        }
        if let Some(level) = level {
            if rel.level != level {
                return Err(Error::InvalidArgument(format!(
                    "file has level {}, but --N {level} was given",
                    rel.level
                )));
            }
        }
    }
    let reports: Vec<VerificationReport> = rels
        .iter()
        .map(|rel| verify_relation_numeric(rel, nmax, cfg.target_error, &cfg.numeric))
        .collect::<Result<_>>()?;

    match cfg.output {
        Output::Json => {
            if reports.len() == 1 {
                println!("{}", reports[0].to_json());
            } else {
                let v: Vec<serde_json::Value> =
                    reports.iter().map(VerificationReport::to_json).collect();
                println!("{}", serde_json::Value::Array(v));
            }
        }
        Output::Csv => {
            println!("relation,n,residual,largest_term,budget,verdict,note");
            for (i, report) in reports.iter().enumerate() {
                for e in &report.entries {
                    println!(
                        "{},{},{:e},{:e},{:e},{},{}",
                        i + 1,
                        e.n,
                        e.residual,
                        e.largest,
                        e.budget,
                        e.verdict.as_str(),
                        csv_quote(e.note.as_deref().unwrap_or(""))
                    );
                }
            }
        }
        Output::Pretty => {
            for report in &reports {
                println!("relation: {}", report.relation);
                println!(
                    "{:>6}  {:>13}  {:>13}  {:>13}  verdict",
                    "n", "residual", "largest term", "budget"
                );
                for e in &report.entries {
                    println!(
                        "{:>6}  {:>13.6e}  {:>13.6e}  {:>13.6e}  {}",
                        e.n,
                        e.residual,
                        e.largest,
                        e.budget,
                        e.verdict.as_str()
                    );
                    if let Some(note) = &e.note {
                        println!("        note: {note}");
                    }
                }
                println!("overall: {}", report.verdict.as_str());
            }
        }
    }

    let refuted = reports.iter().any(|r| r.verdict == Verdict::Refuted);
    Ok(if refuted {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn csv_quote(text: &str) -> String {
    if text.contains(',') || text.contains('"') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn cmd_relation_solve(cfg: &RunConfig, k: i64, file: &Path, order: i64) -> Result<ExitCode> {
    let pp = PrincipalPart::from_json(&read_json(file)?)?;
    let solution = solve_principal_part_level1(k, &pp, order)?;
    match cfg.output {
        Output::Json => {
            let v = serde_json::json!({
                "exists": solution.is_some(),
                "series": solution.as_ref().map(QSeries::to_json),
            });
            println!("{v}");
        }
        Output::Csv => {
            match &solution {
                Some(f) => render_series(cfg, f),
                None => {
                    println!("exponent,coefficient");
                    eprintln!("no weakly holomorphic form of weight {} realizes this principal part", 2 - k);
                }
            }
        }
        Output::Pretty => match &solution {
            Some(f) => println!("{f}"),
            None => println!(
                "none: the principal part is obstructed (no weight {} weakly holomorphic form realizes it)",
                2 - k
            ),
        },
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_strings_parse_to_doubled_weights() {
        assert_eq!(parse_two_k("24").unwrap(), 48, "integral weight doubles");
        assert_eq!(parse_two_k("15/2").unwrap(), 15, "half-integral weight");
        assert_eq!(parse_two_k(" 7/2 ").unwrap(), 7, "whitespace tolerated");
        assert!(parse_two_k("1/3").is_err(), "k must lie in (1/2)Z");
        assert!(parse_two_k("x").is_err(), "junk rejected");
    }

    #[test]
    fn csv_quoting_escapes_delimiters() {
        assert_eq!(csv_quote("plain"), "plain");
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
        assert_eq!(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
