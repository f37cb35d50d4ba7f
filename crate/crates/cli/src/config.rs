//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lifshitz_core::{Beta, LatticeSpec};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "lifshitz-ee",
    version,
    about = "Entanglement entropy of Lifshitz fermions on a ring"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Entropy of one contiguous block.
    Ee(Options),
    /// Entropy over a grid of z, β and block sizes.
    Sweep(Options),
    /// Low- or high-temperature expansion fit.
    Fit(Options),
    /// Bogoliubov angle and emergent metric of the cMERA solution.
    Cmera(Options),
    /// Compare the correlation method with exact diagonalization.
    OracleCheck(Options),
}

/// Every flag is optional so file values can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
struct Options {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    na: Option<usize>,
    #[arg(long)]
    z: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    mass: Option<f64>,
    #[arg(long, value_parser = parse_beta)]
    beta: Option<Beta>,
    #[arg(long, value_parser = parse_temperature)]
    temp: Option<Beta>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    zs: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_beta)]
    betas: Option<Vec<Beta>>,
    #[arg(long, value_delimiter = ',')]
    nas: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    regime: Option<Regime>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Sweep table (CSV or JSON) to fit instead of computing a grid.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Lowest cMERA scale; the range is [umin, 0].
    #[arg(long, allow_negative_numbers = true)]
    umin: Option<f64>,
    /// Number of cMERA scales.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

const FILE_KEYS: &[&str] = &[
    "n", "na", "z", "mass", "beta", "temp", "eps", "theta", "zs", "betas", "nas", "regime",
    "format", "out", "jobs", "input", "umin", "points",
];

impl Options {
    fn or(self, fallback: Options) -> Options {
        Options {
            n: self.n.or(fallback.n),
            na: self.na.or(fallback.na),
            z: self.z.or(fallback.z),
            mass: self.mass.or(fallback.mass),
            beta: self.beta.or(fallback.beta),
            temp: self.temp.or(fallback.temp),
            eps: self.eps.or(fallback.eps),
            theta: self.theta.or(fallback.theta),
            zs: self.zs.or(fallback.zs),
            betas: self.betas.or(fallback.betas),
            nas: self.nas.or(fallback.nas),
            regime: self.regime.or(fallback.regime),
            format: self.format.or(fallback.format),
            out: self.out.or(fallback.out),
            jobs: self.jobs.or(fallback.jobs),
            input: self.input.or(fallback.input),
            umin: self.umin.or(fallback.umin),
            points: self.points.or(fallback.points),
            config: self.config,
        }
    }
}

fn parse_beta(s: &str) -> Result<Beta, String> {
    if s.trim().eq_ignore_ascii_case("inf") {
        return Ok(Beta::GROUND_STATE);
    }
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number or 'inf'"))?;
    if !(v > 0.0) {
        return Err("β must be positive or 'inf'".into());
    }
    Beta::new(v).map_err(|e| e.to_string())
}

fn parse_temperature(s: &str) -> Result<Beta, String> {
    let t: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if t == 0.0 {
        return Ok(Beta::GROUND_STATE);
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err("temperature must be non-negative and finite".into());
    }
    Beta::from_temperature(t).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ee,
    Sweep,
    Fit,
    Cmera,
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

/// A fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spec: LatticeSpec,
    pub n_a: usize,
    pub beta: Beta,
    pub zs: Vec<u32>,
    /// Whether `--z` or `--zs` was given rather than defaulted.
    pub explicit_z: bool,
    pub betas: Vec<Beta>,
    pub nas: Vec<usize>,
    pub regime: Regime,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub input: Option<PathBuf>,
    pub u_min: f64,
    pub points: usize,
}

pub const DEFAULT_N: usize = 100;
pub const DEFAULT_NA: usize = 10;
pub const DEFAULT_U_MIN: f64 = -5.0;
pub const DEFAULT_POINTS: usize = 501;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `argv` (including the program name), merging in the config file
/// named by `--config` if present. Flags win over file values.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::from_clap)?;
    let (command, flags) = match cli.command {
        CommandArgs::Ee(o) => (Command::Ee, o),
        CommandArgs::Sweep(o) => (Command::Sweep, o),
        CommandArgs::Fit(o) => (Command::Fit, o),
        CommandArgs::Cmera(o) => (Command::Cmera, o),
        CommandArgs::OracleCheck(o) => (Command::OracleCheck, o),
    };
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Options::default(),
    };
    resolve(command, flags.or(file))
}

fn read_config_file(path: &Path) -> Result<Options, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Parses `key = value` lines; `#` starts a comment.
fn parse_config_text(text: &str) -> Result<Options, CliError> {
    let known: HashSet<&str> = FILE_KEYS.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut argv = vec!["lifshitz-ee".to_string(), "ee".to_string()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "config line {}: expected 'key = value'",
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !known.contains(key) {
            return Err(usage(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        if !seen.insert(key.to_string()) {
            return Err(usage(format!(
                "config line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
        argv.push(format!("--{key}"));
        argv.push(value.to_string());
    }
    match Cli::try_parse_from(argv).map_err(|e| match CliError::from_clap(e) {
        CliError::Usage(msg) => usage(format!("config file: {msg}")),
        other => other,
    })? {
        Cli {
            command: CommandArgs::Ee(o),
        } => Ok(o),
        _ => unreachable!("config text is always parsed as 'ee'"),
    }
}

fn resolve(command: Command, o: Options) -> Result<RunConfig, CliError> {
    let beta = match (o.beta, o.temp) {
        (Some(_), Some(_)) => return Err(usage("give either --beta or --temp, not both")),
        (Some(b), None) | (None, Some(b)) => b,
        (None, None) => Beta::GROUND_STATE,
    };
    let explicit_z = o.z.is_some() || o.zs.is_some();
    let z = o.z.unwrap_or(1);
    let n = o.n.unwrap_or(DEFAULT_N);
    let n_a = o.na.unwrap_or(DEFAULT_NA);
    let mut spec = LatticeSpec::new(n, z).map_err(|e| usage(e.to_string()))?;
    spec = spec
        .with_mass(o.mass.unwrap_or(0.0))
        .map_err(|e| usage(e.to_string()))?;
    spec = spec
        .with_spacing(o.eps.unwrap_or(1.0))
        .map_err(|e| usage(e.to_string()))?;
    spec = spec
        .with_boundary_phase(o.theta.unwrap_or(0.0))
        .map_err(|e| usage(e.to_string()))?;

    let zs = o.zs.unwrap_or_else(|| vec![z]);
    let betas = o.betas.unwrap_or_else(|| vec![beta]);
    let nas = o.nas.unwrap_or_else(|| vec![n_a]);
    if zs.is_empty() || betas.is_empty() || nas.is_empty() {
        return Err(usage("grid lists must not be empty"));
    }
    if let Some(&bad) = zs.iter().find(|&&z| z == 0) {
        return Err(usage(format!("z must be a positive integer, got {bad}")));
    }
    if let Some(&bad) = nas
        .iter()
        .chain(std::iter::once(&n_a))
        .find(|&&na| na == 0 || na > n)
    {
        return Err(usage(format!("block size must be in 1..={n}, got {bad}")));
    }
    let jobs = o.jobs.unwrap_or(1);
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let format = o.format.unwrap_or_default();
    match (command, format) {
        (Command::Ee | Command::OracleCheck, OutputFormat::Svg) => {
            return Err(usage("svg output is available for sweep, fit and cmera"));
        }
        (Command::Fit, _) if o.input.is_none() && o.regime.is_none() => {
            return Err(usage("fit needs --regime low|high"));
        }
        _ => {}
    }
    if o.input.is_some() && command != Command::Fit {
        return Err(usage("--input is only used by fit"));
    }
    let u_min = o.umin.unwrap_or(DEFAULT_U_MIN);
    if !(u_min < 0.0 && u_min.is_finite()) {
        return Err(usage("--umin must be negative"));
    }
    let points = o.points.unwrap_or(DEFAULT_POINTS);
    if points < 5 {
        return Err(usage("--points must be at least 5"));
    }
    Ok(RunConfig {
        command,
        spec,
        n_a,
        beta,
        zs,
        explicit_z,
        betas,
        nas,
        regime: o.regime.unwrap_or(Regime::Low),
        format,
        out: o.out,
        jobs,
        input: o.input,
        u_min,
        points,
    })
}
