//! Command-line surface: reproduce the optimal-interferometry tables, score
//! arbitrary JSON-specified product inputs, and run the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/parse error.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mzfisher::{
    fixed_total_best, moments, optimal_mean_input, qfi_product, qfi_variance, tensor, verify,
    BuiltState, CutoffPolicy, FisherReport, MzConvention, StateSpec,
};

#[derive(Parser)]
#[command(
    name = "mzfisher",
    version,
    about = "Quantum Fisher information toolkit for two-mode Mach-Zehnder interferometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Aligned console table, 6 significant digits.
    Human,
    /// Comma-separated, 17 significant digits.
    Csv,
    /// JSON, lossless f64 round-trip.
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    /// Second beam splitter is B† (balanced Mach-Zehnder; the default).
    Inverse,
    /// Second beam splitter repeats B.
    Same,
}

impl From<Convention> for MzConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Inverse => MzConvention::InverseB,
            Convention::Same => MzConvention::SameB,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-total-photon table: twin-Fock vs N00N Fisher information.
    TableFixedN {
        /// Largest total photon number N (rows run 1..=N).
        #[arg(long, default_value_t = 20)]
        max_n: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Fixed-mean-photon table: dual squeezed vacuum vs the closed form.
    TableMeanN {
        /// Comma-separated mean photon numbers.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
        values: Vec<f64>,
        /// Fock cutoff per mode.
        #[arg(long, default_value_t = 64)]
        cutoff: usize,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// QFI of a product input given two single-mode state specs (JSON files;
    /// "-" reads one spec from stdin). Reports both computation routes.
    Qfi {
        /// Path to the mode-a spec.
        spec_a: String,
        /// Path to the mode-b spec.
        spec_b: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the self-verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
        /// Seed for the randomized criteria and the optimizer restarts.
        #[arg(long, default_value_t = 20240813)]
        seed: u64,
        /// Restart count for the optimizer-certificate criterion.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Beam-splitter orientation for the moment-estimator scan.
        #[arg(long, value_enum, default_value_t = Convention::Inverse)]
        mz_convention: Convention,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

/// 17 significant digits: enough for an exact f64 round trip.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// 6 significant digits for console tables.
fn human(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_infinite() {
        return "inf".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if (-3..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Trim trailing zeros but keep at least one digit after the point.
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

#[derive(Serialize)]
struct FixedRow {
    n: u64,
    n_opt: Vec<u64>,
    f_twin_fock: f64,
    f_noon: f64,
    qcrb_twin: f64,
    qcrb_noon: f64,
    ratio: f64,
}

fn cmd_table_fixed_n(max_n: u64, format: Format) -> ExitCode {
    let rows: Vec<FixedRow> = (1..=max_n)
        .map(|n| {
            let (n_opt, best) = fixed_total_best(n);
            let f_twin = best as f64;
            let f_noon = (n * n) as f64;
            FixedRow {
                n,
                n_opt,
                f_twin_fock: f_twin,
                f_noon,
                qcrb_twin: 1.0 / f_twin,
                qcrb_noon: 1.0 / f_noon,
                ratio: f_noon / f_twin,
            }
        })
        .collect();
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows).unwrap()),
        Format::Csv => {
            println!("N,n_opt,F_twin_fock,F_noon,qcrb_twin,qcrb_noon,ratio");
            for r in &rows {
                let opts = r
                    .n_opt
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join("|");
                println!(
                    "{},{},{},{},{},{},{}",
                    r.n,
                    opts,
                    full(r.f_twin_fock),
                    full(r.f_noon),
                    full(r.qcrb_twin),
                    full(r.qcrb_noon),
                    full(r.ratio)
                );
            }
        }
        Format::Human => {
            println!(
                "{:>4} {:>8} {:>12} {:>10} {:>12} {:>12} {:>8}",
                "N", "n_opt", "F_twin_fock", "F_noon", "qcrb_twin", "qcrb_noon", "ratio"
            );
            for r in &rows {
                let opts = r
                    .n_opt
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",");
                println!(
                    "{:>4} {:>8} {:>12} {:>10} {:>12} {:>12} {:>8}",
                    r.n,
                    opts,
                    human(r.f_twin_fock),
                    human(r.f_noon),
                    human(r.qcrb_twin),
                    human(r.qcrb_noon),
                    human(r.ratio)
                );
            }
        }
    }
    ExitCode::SUCCESS
}

#[derive(Serialize)]
struct MeanRow {
    n_mean: f64,
    f_closed_form: f64,
    f_simulated: f64,
    rel_deviation: f64,
    tail: f64,
    qcrb: f64,
}

fn cmd_table_mean_n(values: &[f64], cutoff: usize, format: Format) -> Result<ExitCode, String> {
    let mut rows = Vec::new();
    for &n_mean in values {
        if n_mean < 0.0 {
            return Err(format!("mean photon number must be nonnegative, got {n_mean}"));
        }
        let closed = n_mean * (n_mean + 2.0);
        let state = optimal_mean_input(n_mean, cutoff, CutoffPolicy::Reject)
            .map_err(|e| format!("N_mean={n_mean}: {e}"))?;
        let f = qfi_variance(&state).qfi;
        rows.push(MeanRow {
            n_mean,
            f_closed_form: closed,
            f_simulated: f,
            rel_deviation: if closed > 0.0 {
                (f - closed).abs() / closed
            } else {
                0.0
            },
            tail: state.truncation_tail(),
            qcrb: if f > 0.0 { 1.0 / f } else { f64::INFINITY },
        });
    }
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows).unwrap()),
        Format::Csv => {
            println!("N_mean,F_closed_form,F_simulated,rel_deviation,tail,qcrb");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{}",
                    full(r.n_mean),
                    full(r.f_closed_form),
                    full(r.f_simulated),
                    full(r.rel_deviation),
                    full(r.tail),
                    full(r.qcrb)
                );
            }
        }
        Format::Human => {
            println!(
                "{:>8} {:>10} {:>12} {:>12} {:>10} {:>10}",
                "N_mean", "F_closed", "F_simulated", "rel_dev", "tail", "qcrb"
            );
            for r in &rows {
                println!(
                    "{:>8} {:>10} {:>12} {:>12} {:>10} {:>10}",
                    human(r.n_mean),
                    human(r.f_closed_form),
                    human(r.f_simulated),
                    human(r.rel_deviation),
                    human(r.tail),
                    human(r.qcrb)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_spec(path: &str) -> Result<StateSpec, String> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| format!("{path}: {} (at {})", e.inner(), e.path()))
}

fn build_single(spec: &StateSpec, path: &str) -> Result<mzfisher::SingleModeState, String> {
    match spec.build(CutoffPolicy::Reject).map_err(|e| format!("{path}: {e}"))? {
        BuiltState::Single(s) => Ok(s),
        BuiltState::Two(_) => Err(format!(
            "{path}: expected a single-mode spec (number, coherent, squeezed_vacuum)"
        )),
    }
}

#[derive(Serialize)]
struct QfiOutput {
    variance_form: FisherReport,
    moment_form: FisherReport,
    discrepancy: f64,
}

fn cmd_qfi(spec_a: &str, spec_b: &str, format: Format) -> Result<ExitCode, String> {
    let a = build_single(&load_spec(spec_a)?, spec_a)?;
    let b = build_single(&load_spec(spec_b)?, spec_b)?;
    let d = a.cutoff().max(b.cutoff());
    let variance_form = qfi_variance(&tensor(&a.embed(d), &b.embed(d)).map_err(|e| e.to_string())?);
    let moment_form =
        qfi_product(&moments(&a), &moments(&b)).map_err(|e| format!("moment form: {e}"))?;
    let out = QfiOutput {
        discrepancy: (variance_form.qfi - moment_form.qfi).abs(),
        variance_form,
        moment_form,
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
        Format::Csv => {
            println!("method,qfi,qcrb,truncation_tail");
            println!(
                "variance_form,{},{},{}",
                full(out.variance_form.qfi),
                full(out.variance_form.qcrb),
                full(out.variance_form.truncation_tail)
            );
            println!(
                "moment_form,{},{},{}",
                full(out.moment_form.qfi),
                full(out.moment_form.qcrb),
                full(out.moment_form.truncation_tail)
            );
            println!("discrepancy,{},,", full(out.discrepancy));
        }
        Format::Human => {
            println!("QFI (variance form): {}", human(out.variance_form.qfi));
            println!("QFI (moment form):   {}", human(out.moment_form.qfi));
            println!("QCRB:                {}", human(out.variance_form.qcrb));
            println!("discrepancy:         {}", human(out.discrepancy));
            println!("truncation tail:     {}", human(out.variance_form.truncation_tail));
            println!("note: {}", out.variance_form.convention_note);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    level: Level,
    seed: u64,
    restarts: usize,
    conv: MzConvention,
    format: Format,
) -> ExitCode {
    let lvl = match level {
        Level::Fast => verify::VerifyLevel::Fast,
        Level::Full => verify::VerifyLevel::Full,
    };
    let report = verify::run_with(lvl, seed, conv, restarts);
    match format {
        Format::Json | Format::Csv => {
            println!("{}", serde_json::to_string_pretty(&report).unwrap())
        }
        Format::Human => {
            for c in &report.criteria {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("criterion {:2} [{}] {} ({:.2}s)", c.id, verdict, c.title, c.seconds);
                for check in &c.checks {
                    if !check.passed {
                        println!(
                            "    failed: {} — measured {:.6e}, target {}",
                            check.name, check.measured, check.target
                        );
                    }
                }
            }
            println!(
                "overall: {} ({:.2}s)",
                if report.passed { "PASS" } else { "FAIL" },
                report.seconds
            );
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::TableFixedN { max_n, format } => {
            if max_n < 1 {
                Err("--max-n must be at least 1".to_string())
            } else {
                Ok(cmd_table_fixed_n(max_n, format))
            }
        }
        Command::TableMeanN {
            values,
            cutoff,
            format,
        } => cmd_table_mean_n(&values, cutoff, format),
        Command::Qfi {
            spec_a,
            spec_b,
            format,
        } => cmd_qfi(&spec_a, &spec_b, format),
        Command::Verify {
            level,
            seed,
            restarts,
            mz_convention,
            format,
        } => Ok(cmd_verify(level, seed, restarts, mz_convention.into(), format)),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
