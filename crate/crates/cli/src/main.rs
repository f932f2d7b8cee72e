use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use moyal_core::boppdiff::{self, isp2_realization, Realization};
use moyal_core::exprio::{self, render, render_coefficient, Format, Target, Value};
use moyal_core::ordering::{self, OrderParameter};
use moyal_core::symcalc;
use moyal_core::verify::{run_suite, Suite, SuiteConfig, DEFAULT_SEED};
use moyal_core::winf::structure_table_with_jobs;
use moyal_core::CanonicalElement;

#[derive(Parser)]
#[command(name = "moyal", version, about = "Exact phase-space quantization algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Latex,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Text => Format::Text,
            OutFormat::Latex => Format::Latex,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorKind {
    Weyl,
    Diffop,
}

#[derive(Args)]
struct Common {
    /// Ordering parameter: `formal`, a parameter name, or an exact number such as `1/2` or `1/2+1/3*i`.
    #[arg(long, default_value = "formal", value_parser = parse_order, allow_hyphen_values = true)]
    s: OrderParameter,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct FormatOnly {
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

fn parse_order(text: &str) -> Result<OrderParameter, String> {
    text.parse::<OrderParameter>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Star product f ⋆ g of two symbols.
    Star {
        f: String,
        g: String,
        #[command(flatten)]
        common: Common,
    },
    /// Moyal bracket f ⋆ g − g ⋆ f.
    Moyal {
        f: String,
        g: String,
        #[command(flatten)]
        common: Common,
    },
    /// Poisson bracket ∂_p f ∂_q g − ∂_q f ∂_p g.
    Pb {
        f: String,
        g: String,
        #[command(flatten)]
        out: FormatOnly,
    },
    /// s-quantization of a symbol into the Weyl algebra.
    Quantize {
        f: String,
        #[command(flatten)]
        common: Common,
    },
    /// Symbol of a Weyl-algebra element under s-quantization.
    Dequantize {
        a: String,
        #[command(flatten)]
        common: Common,
    },
    /// Expansion of t^(from)_{nm} in the t^(to) basis.
    ConvertOrder {
        n: u32,
        m: u32,
        #[arg(long, value_parser = parse_order, allow_hyphen_values = true)]
        from: OrderParameter,
        #[arg(long, value_parser = parse_order, allow_hyphen_values = true)]
        to: OrderParameter,
        #[command(flatten)]
        out: FormatOnly,
    },
    /// Commutator [a, b] of two operators.
    Commutator {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "weyl")]
        kind: OperatorKind,
        #[command(flatten)]
        out: FormatOnly,
    },
    /// Table of W∞ structure constants for all indices up to --nmax.
    StructureConstants {
        #[arg(long)]
        nmax: u32,
        #[arg(long, default_value = "formal", value_parser = parse_order, allow_hyphen_values = true)]
        s: OrderParameter,
        /// Anti-bracket constants instead of bracket constants.
        #[arg(long)]
        anti: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: TableFormat,
        #[arg(long, env = "MOYAL_JOBS")]
        jobs: Option<usize>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = |s: &str| s.parse::<Suite>())]
        suite: Suite,
        #[arg(long)]
        nmax: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "formal", value_parser = parse_order, allow_hyphen_values = true)]
        s: OrderParameter,
        #[arg(long, env = "MOYAL_JOBS")]
        jobs: Option<usize>,
        /// Emit a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print a named isp(2) realization (xi_eta, xi_eta_m, xi_eta_s, delta, delta_s, quantum).
    Realization {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the operator Γ^(r)_{nm}(s) (or T^(r)_{nm}(s) with --t).
    Gamma {
        n: u32,
        m: u32,
        #[arg(long, default_value = "0", value_parser = parse_order, allow_hyphen_values = true)]
        r: OrderParameter,
        #[arg(long)]
        t: bool,
        #[command(flatten)]
        common: Common,
    },
}

/// Error reported with exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn symbol(text: &str) -> Result<moyal_core::Symbol, UsageError> {
    Ok(exprio::parse_symbol(text)?)
}

fn print_value(v: Value, format: OutFormat) {
    println!("{}", render(&v, format.into()));
}

fn print_element(e: CanonicalElement, weyl: bool, format: OutFormat) {
    print_value(if weyl { Value::Weyl(e) } else { Value::DiffOp(e) }, format);
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    match cli.command {
        Command::Star { f, g, common } => {
            print_value(Value::Symbol(symcalc::star(&symbol(&f)?, &symbol(&g)?, &common.s)?), common.format);
        }
        Command::Moyal { f, g, common } => {
            print_value(Value::Symbol(symcalc::moyal(&symbol(&f)?, &symbol(&g)?, &common.s)?), common.format);
        }
        Command::Pb { f, g, out } => {
            print_value(Value::Symbol(symcalc::poisson(&symbol(&f)?, &symbol(&g)?)?), out.format);
        }
        Command::Quantize { f, common } => {
            print_element(ordering::quantize(&symbol(&f)?, &common.s)?, true, common.format);
        }
        Command::Dequantize { a, common } => {
            let a = exprio::parse_weyl(&a)?;
            print_value(Value::Symbol(ordering::dequantize(&a, &common.s)?), common.format);
        }
        Command::ConvertOrder { n, m, from, to, out } => {
            let table = ordering::convert_order(n, m, &from, &to)?;
            let rows: Vec<_> = table.iter().rev().collect();
            match out.format {
                OutFormat::Text => {
                    for ((a, b), c) in rows {
                        println!("({a},{b}): {}", render_coefficient(c, Format::Text));
                    }
                }
                OutFormat::Json => {
                    let js: Vec<_> = rows
                        .iter()
                        .map(|((a, b), c)| json!({"n": a, "m": b, "coefficient": c.to_string(), "exact": c}))
                        .collect();
                    println!("{}", serde_json::to_string(&json!({"from": from.to_string(), "to": to.to_string(), "terms": js}))?);
                }
                OutFormat::Latex => {
                    let parts: Vec<String> = rows
                        .iter()
                        .map(|((a, b), c)| format!("({})\\,\\hat{{t}}_{{{a}{b}}}", render_coefficient(c, Format::Latex)))
                        .collect();
                    println!("{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") });
                }
            }
        }
        Command::Commutator { a, b, kind, out } => {
            let target = match kind {
                OperatorKind::Weyl => Target::Weyl,
                OperatorKind::Diffop => Target::DiffOp,
            };
            let parse = |t: &str| -> Result<CanonicalElement, UsageError> {
                let v = exprio::parse(t, target)?;
                Ok(match v {
                    Value::Weyl(e) | Value::DiffOp(e) => e,
                    Value::Symbol(_) => unreachable!("operator target"),
                })
            };
            let c = parse(&a)?.commutator(&parse(&b)?)?;
            print_element(c, matches!(kind, OperatorKind::Weyl), out.format);
        }
        Command::StructureConstants { nmax, s, anti, format, jobs } => {
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let table = structure_table_with_jobs(nmax, &s, anti, jobs);
            print!(
                "{}",
                match format {
                    TableFormat::Json => table.to_json(),
                    TableFormat::Csv => table.to_csv(),
                    TableFormat::Latex => table.to_latex(),
                }
            );
        }
        Command::Verify { suite, nmax, seed, s, jobs, json } => {
            let cfg = SuiteConfig { nmax, seed, s };
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
            let report = pool.install(|| run_suite(suite, &cfg));
            if json {
                let checks: Vec<_> = report
                    .checks
                    .iter()
                    .map(|c| {
                        json!({
                            "identity": c.identity,
                            "cases": c.cases,
                            "passed": c.passed(),
                            "failures": c.failures.iter().map(|(i, d)| json!({"indices": i, "detail": d})).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let status = if report.passed() { "verified" } else { "failed" };
                println!("{}", serde_json::to_string_pretty(&json!({"suite": suite.name(), "status": status, "checks": checks}))?);
            } else {
                println!("{report}");
            }
            return Ok(report.passed());
        }
        Command::Realization { name, common } => {
            let gens = if name == "quantum" {
                boppdiff::quantum_isp2()
            } else {
                isp2_realization(name.parse::<Realization>()?, &common.s)
            };
            let weyl = name == "quantum";
            match common.format {
                OutFormat::Json => {
                    let map: serde_json::Map<String, serde_json::Value> =
                        gens.iter().map(|(n, e)| (n.to_string(), serde_json::to_value(e).unwrap())).collect();
                    println!("{}", serde_json::to_string(&map)?);
                }
                f => {
                    for (n, e) in gens.iter() {
                        let v = if weyl { Value::Weyl(e.clone()) } else { Value::DiffOp(e.clone()) };
                        println!("{n} = {}", render(&v, f.into()));
                    }
                }
            }
        }
        Command::Gamma { n, m, r, t, common } => {
            let op = if t { boppdiff::t_op(n, m, &r, &common.s)? } else { boppdiff::gamma(n, m, &r, &common.s)? };
            print_element(op, false, common.format);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
