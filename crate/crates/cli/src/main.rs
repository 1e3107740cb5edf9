use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cmatlas::blowup::{adjoin_generators, Chart, ChartName};
use cmatlas::catalog::{build_example_algebra, Example};
use cmatlas::excurve::{classify_tameness, CurveDescriptor};
use cmatlas::pipeline::{cmd_enumerate, cmd_verify, resolve_field, FieldMode, PipelineError, VerifyOptions};
use cmatlas::structalg::StructureConstantAlgebra;

#[derive(Parser)]
#[command(name = "cmatlas", version, about = "Verify the worked non-commutative surface singularities and classify their CM modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartArg {
    U1,
    U2,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline on an example.
    Verify {
        #[arg(value_parser = parse_example, required_unless_present = "all", conflicts_with = "all")]
        example: Option<Example>,
        /// Both examples, each symbolically and over a prime field.
        #[arg(long)]
        all: bool,
        /// symbolic, q:<prime>, or a JSON field descriptor.
        #[arg(long, default_value = "symbolic", value_parser = parse_field)]
        field: FieldMode,
        /// Same as `--field symbolic`.
        #[arg(long, conflicts_with = "field")]
        symbolic: bool,
        /// Rational value for lambda (ex1).
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the Cohen–Macaulay classes of a given rank.
    Enumerate {
        #[arg(long)]
        rank: u32,
        /// Cross-check against exhaustive search.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 6)]
        max_degree: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tame or wild, from the type of the reduction curve.
    Classify {
        /// smooth-elliptic, kodaira:<k> or other:<tag>
        descriptor: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Dump a multiplication table as JSON.
    Inspect {
        #[arg(value_parser = parse_example)]
        example: Example,
        #[arg(long, value_enum)]
        chart: Option<ChartArg>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_example(s: &str) -> Result<Example, String> {
    s.parse()
}

fn parse_field(s: &str) -> Result<FieldMode, String> {
    s.parse()
}

enum Failure {
    Verification,
    Config(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { example, all, field, symbolic: _, lambda, seed, format, out } => {
            let mut runs = Vec::new();
            let base = VerifyOptions { field: field.clone(), lambda, seed, ..Default::default() };
            if all {
                let prime = match field {
                    FieldMode::Prime(q) => q,
                    _ => 10007,
                };
                for ex in Example::ALL {
                    runs.push((ex, VerifyOptions { field: FieldMode::Symbolic, ..base.clone() }));
                    runs.push((ex, VerifyOptions { field: FieldMode::Prime(prime), ..base.clone() }));
                }
            } else {
                runs.push((example.expect("required by clap"), base));
            }
            let reports = runs.iter().map(|(ex, o)| cmd_verify(*ex, o)).collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(|r| r.passed);
            let text = match format {
                Format::Json => pretty(&json!({ "reports": reports, "passed": passed })),
                Format::Text => {
                    let mut s: String = reports.iter().map(|r| r.to_text()).collect();
                    let _ = writeln!(s, "{}", if passed { "PASS" } else { "FAIL" });
                    s
                }
            };
            emit(&out, &text)?;
            if passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Enumerate { rank, oracle, max_degree, format, out } => {
            let r = cmd_enumerate(rank, oracle.then_some(max_degree))?;
            let text = match format {
                Format::Json => pretty(&r),
                Format::Text => r.to_text(),
            };
            emit(&out, &text)?;
            if r.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Classify { descriptor, format } => {
            let d: CurveDescriptor = descriptor.parse().map_err(|e: cmatlas::excurve::CurveError| Failure::Config(e.to_string()))?;
            let t = classify_tameness(&d);
            match format {
                Format::Json => print!("{}", pretty(&json!({ "curve": d.to_string(), "verdict": t }))),
                Format::Text => println!("{t}"),
            }
            Ok(())
        }
        Command::Inspect { example, chart, format, out } => {
            let k = resolve_field(example, &VerifyOptions { random_specializations: 0, ..Default::default() })?;
            let config = |e: cmatlas::structalg::AlgError| Failure::Config(e.to_string());
            let alg = build_example_algebra(example, &k).map_err(config)?;
            let alg: std::sync::Arc<StructureConstantAlgebra> = match chart {
                None => alg,
                Some(c) => {
                    let name = match c {
                        ChartArg::U1 => ChartName::U1,
                        ChartArg::U2 => ChartName::U2,
                    };
                    let spec = example.chart(name);
                    adjoin_generators(&alg, &Chart::new(name, &k), &spec.defs, &spec.basis).map_err(config)?.algebra
                }
            };
            let dump = alg.dump();
            let text = match format {
                Format::Json => pretty(&dump),
                Format::Text => {
                    let mut s = format!("ring [{}], basis {}\n", dump.ring.join(", "), dump.labels.join(", "));
                    for e in &dump.table {
                        let _ = writeln!(s, "{} * {} = {}", e.left, e.right, e.product);
                    }
                    s
                }
            };
            emit(&out, &text)
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("CMATLAS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
