//! Command-line front end: `verify-tables`, `run` and `sweep`.
//!
//! Settings resolve as defaults, then the `--config` file, then flags.
//! The config file holds one `key = value` per line using flag names
//! without the leading dashes; blank lines and `#` comments are ignored.
//!
//! Exit codes: 0 success, 1 failed table verification, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelConfig, EveConfig, EveStrategy, EveTargets};
use crate::protocol::config::{
    CheckStrategy, ProtocolConfig, DEFAULT_DECOY_FRACTION, DEFAULT_PAIRS, DEFAULT_QBER_THRESHOLD,
    DEFAULT_SAMPLE_FRACTION,
};
use crate::protocol::run_session;
use crate::report::{derive_seed, ConfigEcho, ReportLine};
use crate::verify::{verify_tables, Conventions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveChoice {
    None,
    IrZ,
    IrX,
    IrRandom,
}

impl EveChoice {
    fn strategy(self) -> Option<EveStrategy> {
        match self {
            EveChoice::None => None,
            EveChoice::IrZ => Some(EveStrategy::Z),
            EveChoice::IrX => Some(EveStrategy::X),
            EveChoice::IrRandom => Some(EveStrategy::RandomZx),
        }
    }

    fn name(self) -> &'static str {
        match self {
            EveChoice::None => "none",
            EveChoice::IrZ => "ir-z",
            EveChoice::IrX => "ir-x",
            EveChoice::IrRandom => "ir-random",
        }
    }
}

impl FromStr for EveChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(EveChoice::None),
            "ir-z" => Ok(EveChoice::IrZ),
            "ir-x" => Ok(EveChoice::IrX),
            "ir-random" => Ok(EveChoice::IrRandom),
            other => Err(format!("unknown eve `{other}` (expected none, ir-z, ir-x or ir-random)")),
        }
    }
}

fn parse_targets(s: &str) -> Result<EveTargets, String> {
    match s {
        "b" => Ok(EveTargets::B),
        "a" => Ok(EveTargets::A),
        "both" => Ok(EveTargets::Both),
        other => Err(format!("unknown eve targets `{other}` (expected b, a or both)")),
    }
}

fn targets_name(t: EveTargets) -> &'static str {
    match t {
        EveTargets::B => "b",
        EveTargets::A => "a",
        EveTargets::Both => "both",
    }
}

#[derive(Debug, Parser)]
#[command(name = "dep-qkd", version, about = "Two-step QKD simulator over doubly entangled photon pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the encoding and port tables exhaustively.
    VerifyTables,
    /// Run one or more protocol sessions.
    Run(SessionFlags),
    /// Run sessions over the cross product of swept parameter values.
    Sweep(SweepFlags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SessionFlags {
    /// Number of DEP pairs per session.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Expected fraction of the b sequence made of decoys, in [0, 1).
    #[arg(long)]
    pub decoy_fraction: Option<f64>,
    /// Security check: decoy, wc or both.
    #[arg(long, value_parser = CheckStrategy::from_str)]
    pub check: Option<CheckStrategy>,
    /// Eavesdropper: none, ir-z, ir-x or ir-random.
    #[arg(long, value_parser = EveChoice::from_str)]
    pub eve: Option<EveChoice>,
    /// Photons Eve attacks: b, a or both.
    #[arg(long, value_parser = parse_targets)]
    pub eve_targets: Option<EveTargets>,
    /// Per-photon loss probability.
    #[arg(long)]
    pub loss: Option<f64>,
    /// Abort when a check error rate exceeds this.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Fraction of delivered pairs used by the wavelength-converter check.
    #[arg(long)]
    pub sample_fraction: Option<f64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per setting.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Write report lines here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// key=value settings file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepFlags {
    #[command(flatten)]
    pub session: SessionFlags,
    /// Swept parameter as `name=v1,v2,...`; repeat for a cross product.
    #[arg(long = "sweep", required = true)]
    pub sweep: Vec<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub pairs: usize,
    pub decoy_fraction: f64,
    pub check: CheckStrategy,
    pub eve: EveChoice,
    pub eve_targets: EveTargets,
    pub loss: f64,
    pub threshold: f64,
    pub sample_fraction: f64,
    pub seed: u64,
    pub trials: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            pairs: DEFAULT_PAIRS,
            decoy_fraction: DEFAULT_DECOY_FRACTION,
            check: CheckStrategy::Both,
            eve: EveChoice::None,
            eve_targets: EveTargets::B,
            loss: 0.0,
            threshold: DEFAULT_QBER_THRESHOLD,
            sample_fraction: DEFAULT_SAMPLE_FRACTION,
            seed: 0,
            trials: 1,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| CliError::Usage(format!("invalid value `{value}` for {key}: {e}")))
}

impl Settings {
    /// Set one setting by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "pairs" => self.pairs = parse_value(key, value)?,
            "decoy-fraction" => self.decoy_fraction = parse_value(key, value)?,
            "check" => self.check = parse_value(key, value)?,
            "eve" => self.eve = parse_value(key, value)?,
            "eve-targets" => self.eve_targets = parse_targets(value).map_err(CliError::Usage)?,
            "loss" => self.loss = parse_value(key, value)?,
            "threshold" => self.threshold = parse_value(key, value)?,
            "sample-fraction" => self.sample_fraction = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            other => return Err(CliError::Usage(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    pub fn apply_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value, got `{line}`", n + 1))
            })?;
            self.set(key.trim().trim_start_matches("--"), value)?;
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &SessionFlags) {
        if let Some(v) = f.pairs {
            self.pairs = v;
        }
        if let Some(v) = f.decoy_fraction {
            self.decoy_fraction = v;
        }
        if let Some(v) = f.check {
            self.check = v;
        }
        if let Some(v) = f.eve {
            self.eve = v;
        }
        if let Some(v) = f.eve_targets {
            self.eve_targets = v;
        }
        if let Some(v) = f.loss {
            self.loss = v;
        }
        if let Some(v) = f.threshold {
            self.threshold = v;
        }
        if let Some(v) = f.sample_fraction {
            self.sample_fraction = v;
        }
        if let Some(v) = f.seed {
            self.seed = v;
        }
        if let Some(v) = f.trials {
            self.trials = v;
        }
    }

    pub fn resolve(f: &SessionFlags) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &f.config {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
            })?;
            s.apply_config_text(&text)?;
        }
        s.apply_flags(f);
        Ok(s)
    }

    pub fn protocol_config(&self, seed: u64) -> Result<ProtocolConfig, CliError> {
        let config = ProtocolConfig {
            n_pairs: self.pairs,
            decoy_fraction: self.decoy_fraction,
            check_strategy: self.check,
            check_sample_fraction: self.sample_fraction,
            qber_threshold: self.threshold,
            channel: ChannelConfig {
                loss_probability: self.loss,
                eve: self
                    .eve
                    .strategy()
                    .map(|strategy| EveConfig { strategy, targets: self.eve_targets }),
            },
            seed,
        };
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            pairs: self.pairs,
            decoy_fraction: self.decoy_fraction,
            check: self.check.to_string(),
            eve: self.eve.name().to_string(),
            eve_targets: targets_name(self.eve_targets).to_string(),
            loss: self.loss,
            threshold: self.threshold,
            sample_fraction: self.sample_fraction,
            seed: self.seed,
            trials: self.trials,
        }
    }
}

/// Parse `name=v1,v2,...`.
pub fn parse_sweep(arg: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, values) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("sweep `{arg}` must look like name=v1,v2")))?;
    let values: Vec<String> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage(format!("sweep over `{key}` has no values")));
    }
    if matches!(key.trim(), "seed" | "trials") {
        return Err(CliError::Usage(format!("`{key}` cannot be swept")));
    }
    Ok((key.trim().to_string(), values))
}

/// One session to execute.
struct Job {
    sweep_index: usize,
    trial_index: usize,
    settings: Settings,
}

fn execute(subcommand: &str, jobs: Vec<Job>) -> Result<Vec<String>, CliError> {
    let configs = jobs
        .iter()
        .map(|j| {
            let seed = derive_seed(j.settings.seed, j.sweep_index as u64, j.trial_index as u64);
            j.settings.protocol_config(seed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    jobs.par_iter()
        .zip(configs.par_iter())
        .map(|(job, config)| {
            let start = Instant::now();
            let report = run_session(config).map_err(|e| CliError::Usage(e.to_string()))?;
            let elapsed = start.elapsed().as_millis() as u64;
            Ok(ReportLine::new(subcommand, job.trial_index, job.settings.echo(), &report, elapsed)
                .to_json())
        })
        .collect()
}

fn emit(lines: &[String], output: &Option<PathBuf>, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = String::new();
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_verify_tables(out: &mut dyn Write) -> Result<i32, CliError> {
    verify_tables_with(&Conventions::default(), out)
}

/// `verify-tables` under explicit conventions.
pub fn verify_tables_with(conv: &Conventions, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = verify_tables(conv);
    out.write_all(report.render().as_bytes())?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_run(flags: &SessionFlags, out: &mut dyn Write) -> Result<i32, CliError> {
    let settings = Settings::resolve(flags)?;
    if settings.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let jobs = (0..settings.trials)
        .map(|t| Job { sweep_index: 0, trial_index: t, settings: settings.clone() })
        .collect();
    let lines = execute("run", jobs)?;
    emit(&lines, &flags.output, out)?;
    Ok(EXIT_OK)
}

pub fn cmd_sweep(flags: &SweepFlags, out: &mut dyn Write) -> Result<i32, CliError> {
    let base = Settings::resolve(&flags.session)?;
    if base.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let axes = flags.sweep.iter().map(|s| parse_sweep(s)).collect::<Result<Vec<_>, _>>()?;
    if axes.is_empty() {
        return Err(CliError::Usage("sweep needs at least one --sweep name=values".into()));
    }
    // cross product, first axis slowest
    let mut combos: Vec<Settings> = vec![base];
    for (key, values) in &axes {
        let mut next = Vec::with_capacity(combos.len() * values.len());
        for c in &combos {
            for v in values {
                let mut s = c.clone();
                s.set(key, v)?;
                next.push(s);
            }
        }
        combos = next;
    }
    let mut jobs = Vec::new();
    for (sweep_index, settings) in combos.into_iter().enumerate() {
        for trial_index in 0..settings.trials {
            jobs.push(Job { sweep_index, trial_index, settings: settings.clone() });
        }
    }
    let lines = execute("sweep", jobs)?;
    emit(&lines, &flags.session.output, out)?;
    Ok(EXIT_OK)
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::VerifyTables => cmd_verify_tables(out),
        Command::Run(flags) => cmd_run(flags, out),
        Command::Sweep(flags) => cmd_sweep(flags, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
