//! `spci` command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input, 2 validation failure,
//! 3 failed invariant in `verify`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spci::io::{
    factorization_from_json, factorization_to_json, format_significant, load_pmf, pmf_to_json,
    round_significant,
};
use spci::verify::{run_battery, VerifyTolerances};
use spci::{
    brute_marginals, brute_marginals_lifted, export_graph, factorize, lift_to_tanner, reconstruct,
    spci_detect, sum_product, BpConfig, Error, ExportFormat, JointPmf, Pmf,
};

const SIG_DIGITS: usize = 12;

#[derive(Parser)]
#[command(
    name = "spci",
    version,
    about = "Soft parity check factorization of joint PMFs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Input document; `-` reads stdin
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,

    /// Input document (alternative to the positional argument)
    #[arg(short, long, value_name = "FILE", conflicts_with = "file")]
    input: Option<PathBuf>,

    /// Write output here instead of stdout
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Human-readable tables instead of JSON
    #[arg(long)]
    pretty: bool,

    /// Raise probabilities below EPS to EPS, then renormalize
    #[arg(long, value_name = "EPS", num_args = 0..=1, default_missing_value = "1e-12")]
    epsilon_floor: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// PMF -> factorization
    Factorize(Common),
    /// Factorization -> PMF
    Reconstruct(Common),
    /// Report whether a PMF is a single soft parity check interaction
    SpciCheck(Common),
    /// Factorization -> Tanner graph
    Tanner {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// PMF -> single-variable marginals
    Marginalize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 0.0)]
        damping: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run the invariant battery on a PMF
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-10)]
        recon_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        residual_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        marginal_tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Bp,
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    Invalid(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Malformed(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Malformed(_) => Failure::Malformed(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

fn read_input(common: &Common) -> Result<String, Failure> {
    let path = common.input.as_ref().or(common.file.as_ref());
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = fs::read_to_string(p)
                .map_err(|e| Failure::Malformed(format!("{}: {e}", p.display())))?;
        }
        _ => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Malformed(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn read_pmf(common: &Common) -> Result<JointPmf, Failure> {
    if let Some(eps) = common.epsilon_floor {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Failure::Invalid(format!(
                "epsilon floor {eps} must lie in (0, 1)"
            )));
        }
    }
    let loaded = load_pmf(&read_input(common)?, common.epsilon_floor)?;
    if loaded.correction > 1e-12 {
        eprintln!(
            "note: input probabilities renormalized (|sum - 1| = {})",
            format_significant(loaded.correction, 3)
        );
    }
    Ok(loaded.pmf)
}

fn write_output(common: &Common, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &common.output {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Invalid(format!("stdout: {e}"))),
    }
}

/// Sorted keys, floats at [`SIG_DIGITS`] significant digits.
fn emit_json(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).expect("library emits valid JSON");
    round_significant(&mut v, SIG_DIGITS);
    v.to_string()
}

fn emit_value(mut v: Value) -> String {
    round_significant(&mut v, SIG_DIGITS);
    v.to_string()
}

fn fmt(x: f64) -> String {
    format_significant(x, SIG_DIGITS)
}

/// Aligned table: one row per label, one column per field element.
fn table(labels: &[String], rows: &[&Pmf]) -> String {
    let order = rows.first().map_or(0, |r| r.len());
    let mut cells: Vec<Vec<String>> = vec![std::iter::once("var".to_string())
        .chain((0..order).map(|c| c.to_string()))
        .collect()];
    for (label, row) in labels.iter().zip(rows) {
        cells.push(
            std::iter::once(label.clone())
                .chain(row.values().iter().map(|&v| fmt(v)))
                .collect(),
        );
    }
    let widths: Vec<usize> = (0..=order)
        .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn var_labels(n_orig: usize, total: usize) -> Vec<String> {
    (0..total)
        .map(|v| {
            if v < n_orig {
                format!("x{}", v + 1)
            } else {
                format!("u{}", v - n_orig + 1)
            }
        })
        .collect()
}

fn marginal_rows(ms: &[Pmf]) -> Value {
    Value::Array(ms.iter().map(|m| json!(m.values())).collect())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Factorize(common) => {
            let p = read_pmf(&common)?;
            let f = factorize(&p)?;
            let text = if common.pretty {
                let mut out = format!("logZ = {}\n", fmt(f.log_z()));
                let omit = f.omittable();
                for (i, factor) in f.factors().iter().enumerate() {
                    let q: Vec<String> = factor.q.values().iter().map(|&v| fmt(v)).collect();
                    out.push_str(&format!(
                        "q{:<4} a={:?}  order={}  q=[{}]{}\n",
                        i + 1,
                        factor.a.coeffs(),
                        factor.order(),
                        q.join(", "),
                        if omit[i] { "  (uniform)" } else { "" }
                    ));
                }
                out
            } else {
                emit_json(&factorization_to_json(&f))
            };
            write_output(&common, &text)
        }
        Command::Reconstruct(common) => {
            let f = factorization_from_json(&read_input(&common)?)?;
            let p = reconstruct(&f)?;
            let text = if common.pretty {
                let mut out = String::new();
                for k in 0..p.values().len() {
                    out.push_str(&format!("{:?}  {}\n", p.outcome(k), fmt(p.values()[k])));
                }
                out
            } else {
                emit_json(&pmf_to_json(&p))
            };
            write_output(&common, &text)
        }
        Command::SpciCheck(common) => {
            let p = read_pmf(&common)?;
            p.pmf().require_positive()?;
            let hit = spci_detect(&p);
            let text = match (&hit, common.pretty) {
                (Some(h), true) => {
                    let q: Vec<String> = h.q.values().iter().map(|&v| fmt(v)).collect();
                    format!(
                        "SPCI with a = {:?}, order {}\nq = [{}]\n",
                        h.a.coeffs(),
                        h.order(),
                        q.join(", ")
                    )
                }
                (None, true) => "not an SPCI\n".to_string(),
                (Some(h), false) => {
                    emit_value(json!({"is_spci": true, "a": h.a.coeffs(), "q": h.q.values()}))
                }
                (None, false) => emit_value(json!({"is_spci": false})),
            };
            write_output(&common, &text)
        }
        Command::Tanner { common, format } => {
            let f = factorization_from_json(&read_input(&common)?)?;
            let g = lift_to_tanner(&f)?;
            let format = match format {
                GraphFormat::Dot => ExportFormat::Dot,
                GraphFormat::Json => ExportFormat::Json,
            };
            let text = export_graph(&g, format);
            let text = if matches!(format, ExportFormat::Json) {
                emit_json(&text)
            } else {
                text
            };
            write_output(&common, &text)
        }
        Command::Marginalize {
            common,
            method,
            max_iters,
            damping,
            tol,
        } => {
            let p = read_pmf(&common)?;
            let labels = var_labels(p.num_vars(), p.num_vars());
            match method {
                Method::Brute => {
                    let ms = brute_marginals(&p);
                    let text = if common.pretty {
                        table(&labels, &ms.iter().collect::<Vec<_>>())
                    } else {
                        emit_value(json!({"method": "brute", "marginals": marginal_rows(&ms)}))
                    };
                    write_output(&common, &text)
                }
                Method::Bp => {
                    let config = BpConfig::new(max_iters, damping, tol)?;
                    let g = lift_to_tanner(&factorize(&p)?)?;
                    let mut report = sum_product(&g, &config);
                    if let Ok(exact) = brute_marginals_lifted(&g, spci::umm::DEFAULT_LIFTED_CAP) {
                        report = report.with_oracle(&exact);
                    }
                    let text = if common.pretty {
                        let all = var_labels(g.n_orig(), g.n_vars());
                        let mut out = table(&all, &report.marginals.iter().collect::<Vec<_>>());
                        out.push_str(&format!(
                            "iterations {}  converged {}  max_delta {}",
                            report.iterations,
                            report.converged,
                            fmt(report.max_delta)
                        ));
                        if let Some(gap) = report.l1_gap {
                            out.push_str(&format!("  l1_gap {}", fmt(gap)));
                        }
                        out.push('\n');
                        out
                    } else {
                        let x = &report.marginals[..g.n_orig()];
                        emit_value(json!({
                            "method": "bp",
                            "marginals": marginal_rows(x),
                            "report": report,
                        }))
                    };
                    write_output(&common, &text)
                }
            }
        }
        Command::Verify {
            common,
            recon_tol,
            residual_tol,
            marginal_tol,
        } => {
            for (name, t) in [
                ("recon-tol", recon_tol),
                ("residual-tol", residual_tol),
                ("marginal-tol", marginal_tol),
            ] {
                if t.is_nan() || t <= 0.0 {
                    return Err(Failure::Invalid(format!(
                        "--{name} must be positive, got {t}"
                    )));
                }
            }
            let p = read_pmf(&common)?;
            let tol = VerifyTolerances {
                reconstruction: recon_tol,
                residual: residual_tol,
                marginals: marginal_tol,
                ..Default::default()
            };
            let report = run_battery(&p, &tol)?;
            let text = if common.pretty {
                let mut out = String::new();
                for c in &report.checks {
                    let status = match c.passed {
                        Some(true) => "ok",
                        Some(false) => "FAIL",
                        None => "skipped",
                    };
                    let value = c.value.map_or("-".to_string(), fmt);
                    out.push_str(&format!("{:<40} {:<8} {}\n", c.name, status, value));
                }
                out
            } else {
                emit_value(json!({"passed": report.passed(), "checks": report.checks}))
            };
            write_output(&common, &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification("invariant battery failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Malformed(m) => eprintln!("error: malformed input: {m}"),
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Verification(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
