//! `gn-sharp`: sharp Gagliardo-Nirenberg constants, extremal profiles and
//! verification suites from the command line.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gn_sharp::{ExtReal, ParamSet, ShootingConfig};
use gn_sharp_cli::output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ADMISSIBILITY: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "gn-sharp", version, about = "Sharp Gagliardo-Nirenberg constants and extremal profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Best constant C, θ, M_c and β for one parameter set.
    Constant(ConstantArgs),
    /// Sampled extremal profile (r, u(r)) with metadata.
    Profile(ProfileArgs),
    /// Run verification suites; exits 4 if any check fails.
    Verify(VerifyArgs),
    /// m → ∞ study in one dimension.
    Limit(LimitArgs),
    /// Constants over a sweep of parameter tuples.
    Table(TableArgs),
}

fn parse_m(s: &str) -> Result<ExtReal, String> {
    ExtReal::parse(s)
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    /// A number or "inf".
    #[arg(long, value_parser = parse_m)]
    pub m: ExtReal,
}

impl ParamArgs {
    pub fn params(&self) -> ParamSet {
        ParamSet { d: self.d, p: self.p, q: self.q, m: self.m }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the payload here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit wall-clock timestamps so that payloads are reproducible.
    #[arg(long)]
    pub no_timestamps: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub bisection_tol: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

impl ConfigArgs {
    pub fn config(&self) -> ShootingConfig {
        let mut c = ShootingConfig::default();
        if let Some(v) = self.rtol {
            c.rtol = v;
        }
        if let Some(v) = self.atol {
            c.atol = v;
        }
        if let Some(v) = self.bisection_tol {
            c.bisection_tol = v;
        }
        if let Some(v) = self.r_max {
            c.r_max = v;
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Closed,
    Numeric,
}

#[derive(Args, Debug)]
pub struct ConstantArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of equally spaced samples, including r = 0.
    #[arg(long, default_value_t = 201, value_parser = clap::value_parser!(u64).range(1..))]
    pub points: u64,
    /// Right end of the sampled range; defaults to the support radius, or
    /// to where u falls below 1e-6 of its peak.
    #[arg(long)]
    pub r_end: Option<f64>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Inequality,
    Energy,
    Decay,
    Strauss,
    Scaling,
    Nash,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    CompactPoly,
    Tent,
    Mixed,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub p: f64,
    /// Required except for the nash suite, which fixes q = 0.
    #[arg(long)]
    pub q: Option<f64>,
    /// Required except for the nash suite, which fixes m = 1.
    #[arg(long, value_parser = parse_m)]
    pub m: Option<ExtReal>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "mixed")]
    pub family: FamilyArg,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    /// Increasing finite exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub m_list: Vec<f64>,
    #[arg(long, default_value_t = 1e-2)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub d: Vec<u32>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1.., value_parser = parse_m)]
    pub m: Vec<ExtReal>,
    /// Explicit tuple "d,p,q,m"; repeatable, added after the sweep.
    #[arg(long = "tuple")]
    pub tuples: Vec<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallel: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    ExitCode::from(commands::run(cli) as u8)
}
