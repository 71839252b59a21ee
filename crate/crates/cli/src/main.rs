use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use wbnc_core::bounds::{self, AOptions, BoundsError, ReportOptions};
use wbnc_core::config::{ConfigError, Configuration, Severity};
use wbnc_core::cone::{ConeError, MAX_DELTA_ENV};
use wbnc_core::fixtures;
use wbnc_core::formulas::{FormulaError, Method};
use wbnc_core::lattice::LatticeError;
use wbnc_core::rational::parse_rational;

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;

#[derive(Parser)]
#[command(name = "wbnc", version, about = "Effective-cone thresholds and negativity bounds for blown-up rational surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct Common {
    /// Configuration file, or a built-in fixture name (fig1, fig2, fig3).
    input: String,
    /// Segment length for the fig3 family.
    #[arg(long, default_value_t = 3)]
    r: u32,
    /// Number of branches for the fig3 family.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of standard out.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct Threshold {
    #[arg(long, default_value = "auto", value_parser = parse_method)]
    method: Method,
    /// Largest delta scanned by the cone method.
    #[arg(long = "max-delta", env = MAX_DELTA_ENV)]
    max_delta: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration and list every violation.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Print the threshold a (per ruling choice for F_0 configurations).
    A {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        threshold: Threshold,
    },
    /// Print alpha, beta, omega and every applicable bound.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        threshold: Threshold,
        #[arg(long)]
        delta: Option<u32>,
        /// Positive rational `p/q` or integer.
        #[arg(long, value_parser = parse_epsilon)]
        epsilon: Option<num_rational::BigRational>,
    },
    /// Print the arrowed proximity graph in DOT.
    Dot {
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in fixtures, or print one as configuration JSON.
    Fixtures {
        name: Option<String>,
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_epsilon(s: &str) -> Result<num_rational::BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure { code, message: message.to_string() }
    }
}

fn config_code(e: &ConfigError) -> u8 {
    match e {
        ConfigError::NotP2 => EXIT_COMPUTATION,
        _ => EXIT_INVALID,
    }
}

fn lattice_code(e: &LatticeError) -> u8 {
    match e {
        LatticeError::Config(c) => config_code(c),
        _ => EXIT_COMPUTATION,
    }
}

fn cone_code(e: &ConeError) -> u8 {
    match e {
        ConeError::Config(c) => config_code(c),
        ConeError::Lattice(l) => lattice_code(l),
        _ => EXIT_COMPUTATION,
    }
}

fn formula_code(e: &FormulaError) -> u8 {
    match e {
        FormulaError::Config(c) => config_code(c),
        FormulaError::Cone(c) => cone_code(c),
        _ => EXIT_COMPUTATION,
    }
}

fn bounds_code(e: &BoundsError) -> u8 {
    match e {
        BoundsError::Config(c) => config_code(c),
        BoundsError::Formula(f) => formula_code(f),
        BoundsError::Cone(c) => cone_code(c),
        BoundsError::Lattice(l) => lattice_code(l),
        BoundsError::NonPositiveEpsilon => EXIT_USAGE,
        _ => EXIT_COMPUTATION,
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        Failure::new(bounds_code(&e), e)
    }
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        Failure::new(formula_code(&e), e)
    }
}

/// An existing file is parsed; anything else is looked up as a fixture.
fn load(common: &Common) -> Result<Configuration, Failure> {
    let path = Path::new(&common.input);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
        return Configuration::from_json(&text)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())));
    }
    fixtures::by_name(&common.input, common.r, common.n).map_err(|e| Failure::new(EXIT_USAGE, e))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|()| out.flush()).map_err(|e| Failure::new(EXIT_COMPUTATION, e))
        }
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report values serialize")
}

fn validate(common: &Common) -> Result<(), Failure> {
    let c = load(common)?;
    let violations = c.validate();
    let fatal = violations.iter().any(|v| v.severity == Severity::Error);
    let text = match common.format {
        Format::Json => {
            let items: Vec<_> = violations
                .iter()
                .map(|v| {
                    let severity = if v.severity == Severity::Error { "error" } else { "warning" };
                    json!({ "severity": severity, "subject": v.subject, "message": v.message })
                })
                .collect();
            pretty(&json!({ "valid": !fatal, "violations": items }))
        }
        Format::Text if violations.is_empty() => "valid".to_string(),
        Format::Text => violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
    };
    emit(common.output.as_deref(), &text)?;
    if fatal {
        return Err(Failure { code: EXIT_INVALID, message: String::new() });
    }
    Ok(())
}

fn a_options(t: &Threshold) -> AOptions {
    AOptions { method: t.method, cap: t.max_delta }
}

fn threshold(common: &Common, t: &Threshold) -> Result<(), Failure> {
    let c = load(common)?;
    let opts = a_options(t);
    let rulings = !c.base().is_p2() && c.base().delta() == Some(0);
    let text = if rulings {
        let table = bounds::delta_zero_table(&c, &opts)?;
        match common.format {
            Format::Json => pretty(&table),
            Format::Text => {
                let row = |rows: &[bounds::RulingChoice]| {
                    rows.iter()
                        .map(|r| format!("{}={}", r.special_section.as_deref().unwrap_or("generic"), r.a))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                format!(
                    "first ruling: {} (min {})\nsecond ruling: {} (min {})",
                    row(&table.first_ruling),
                    table.a1,
                    row(&table.second_ruling),
                    table.a2
                )
            }
        }
    } else {
        c.ensure_valid().map_err(|e| Failure::new(config_code(&e), e))?;
        let a = opts.compute(&c)?;
        match common.format {
            Format::Json => pretty(&a),
            Format::Text => a.a.to_string(),
        }
    };
    emit(common.output.as_deref(), &text)
}

fn report(
    common: &Common,
    t: &Threshold,
    delta: Option<u32>,
    epsilon: Option<&num_rational::BigRational>,
) -> Result<(), Failure> {
    let c = load(common)?;
    let opts: ReportOptions = a_options(t);
    let report = bounds::full_report_with(&c, delta, epsilon, &opts)?;
    let text = match common.format {
        Format::Json => pretty(&report),
        Format::Text => bounds::render_text(&report),
    };
    emit(common.output.as_deref(), &text)
}

fn dot(common: &Common) -> Result<(), Failure> {
    let c = load(common)?;
    emit(common.output.as_deref(), &c.export_dot())
}

fn list_fixtures(name: Option<&str>, r: u32, n: u32, output: Option<&Path>) -> Result<(), Failure> {
    match name {
        None => emit(output, &fixtures::NAMES.join("\n")),
        Some(name) => {
            let c = fixtures::by_name(name, r, n).map_err(|e| Failure::new(EXIT_USAGE, e))?;
            emit(output, &c.to_json())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { common } => validate(&common),
        Command::A { common, threshold: t } => threshold(&common, &t),
        Command::Report { common, threshold: t, delta, epsilon } => report(&common, &t, delta, epsilon.as_ref()),
        Command::Dot { common } => dot(&common),
        Command::Fixtures { name, r, n, output } => list_fixtures(name.as_deref(), r, n, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("wbnc: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
