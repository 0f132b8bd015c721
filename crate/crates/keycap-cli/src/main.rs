//! Command-line front end tying the capacity, allocation, asymptotics, and
//! protocol modules to config files and CSV/JSON artifacts.
//!
//! Capabilities:
//! - `capacity`: Monte Carlo point estimate of the secret-key capacity.
//! - `sweep-snr` / `sweep-alpha`: dB sweeps under common random numbers.
//! - `allocation-check`: uniform power split vs. random simplex allocations.
//! - `asymptotics`: the applicable limit formulas next to a finite estimate.
//! - `protocol`: quantize-and-bin session analysis on a JSON instance file.
//!
//! Every artifact embeds the fully resolved run configuration (command,
//! channel, sampling plan, seed), so re-running with the echoed config
//! reproduces the output byte for byte. The worker count is deliberately
//! excluded from the echo: it can never change results, only wall-clock
//! time. Failures print a one-line JSON error record to stderr and exit
//! nonzero.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use keycap_core::allocation::{check_uniform_optimal, AllocationError};
use keycap_core::asymptotics::{
    alpha_limit, c_infinity, high_power_limit, large_antenna_limit, AsymptoticsError,
};
use keycap_core::capacity::{
    estimate_capacity, linear_to_db, sweep, CapacityError, SweepAxis, SweepPoint,
};
use keycap_core::channel::{ChannelConfig, SeedSpec};
use keycap_core::protocol::{
    build_rates, build_setup, estimate_error_and_leakage, AnalysisMode, ProtocolError,
    ProtocolInstance, SMode,
};

// ---------------------------------------------------------------------------
// Command-line surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "keycap",
    version,
    about = "Secret-key capacity experiments for fast-fading MIMO wiretap channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate the secret-key capacity of the configured channel.
    Capacity(CommonArgs),
    /// Sweep the destination SNR (dB) with common random numbers.
    SweepSnr {
        #[command(flatten)]
        common: CommonArgs,
        /// Inclusive dB grid as start:stop:step (default -5:25:2.5).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        snr_db_range: Option<RangeSpec>,
    },
    /// Sweep the eavesdropper gain alpha^2 (dB) with common random numbers.
    SweepAlpha {
        #[command(flatten)]
        common: CommonArgs,
        /// Inclusive dB grid as start:stop:step (default 0:20:2.5).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        alpha2_db_range: Option<RangeSpec>,
    },
    /// Score random power allocations against the uniform split.
    AllocationCheck(CommonArgs),
    /// Evaluate the applicable limits next to a finite-power estimate.
    Asymptotics {
        #[command(flatten)]
        common: CommonArgs,
        /// Antenna ratio m_W / m_D for the large-antenna closed form
        /// (default: the configured ratio).
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Analyze the quantize-and-bin protocol on a JSON instance.
    Protocol {
        #[command(flatten)]
        common: CommonArgs,
        /// Path to the protocol instance (overrides protocol.instance).
        #[arg(long)]
        instance: Option<String>,
        /// Typicality tolerance epsilon in (0, 1).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Blocklength n (>= 1).
        #[arg(long)]
        blocklength: Option<usize>,
        /// Analysis mode: exact enumeration or Monte Carlo sessions.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Capacity(_) => "capacity",
            Cmd::SweepSnr { .. } => "sweep-snr",
            Cmd::SweepAlpha { .. } => "sweep-alpha",
            Cmd::AllocationCheck(_) => "allocation-check",
            Cmd::Asymptotics { .. } => "asymptotics",
            Cmd::Protocol { .. } => "protocol",
        }
    }
}

/// Flags shared by every subcommand; each overrides its config-file field.
#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed. Beats KEYCAP_DEFAULT_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count for the channel-model commands.
    #[arg(long)]
    samples: Option<u64>,
    /// Worker threads. Results are identical for any value >= 1.
    #[arg(long)]
    workers: Option<usize>,
    /// Output format; csv is limited to capacity and the sweeps.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    /// Exhaustive enumeration of the support (ground truth).
    Exact,
    /// Seeded Monte Carlo sessions.
    Mc,
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

/// The on-disk configuration. Every field has a default, so `{}` is a valid
/// config and flags alone are enough to run any command. The effective,
/// fully resolved copy is echoed into every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunConfig {
    #[serde(default = "default_channel")]
    channel: ChannelConfig,
    #[serde(default)]
    mc: McSection,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    allocation: AllocationSection,
    #[serde(default)]
    asymptotics: AsymptoticsSection,
    #[serde(default)]
    protocol: ProtocolSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            channel: default_channel(),
            mc: McSection::default(),
            output: OutputSection::default(),
            sweep: SweepSection::default(),
            allocation: AllocationSection::default(),
            asymptotics: AsymptoticsSection::default(),
            protocol: ProtocolSection::default(),
        }
    }
}

fn default_channel() -> ChannelConfig {
    ChannelConfig {
        m_s: 1,
        m_d: 1,
        m_w: 1,
        power: 10.0,
        sigma2_d: 1.0,
        sigma2_w: 1.0,
        alpha2: 1.0,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct McSection {
    #[serde(default = "default_samples")]
    n_samples: u64,
    /// Resolved at run time; echoed as a concrete value.
    #[serde(default)]
    seed: Option<u64>,
}

fn default_samples() -> u64 {
    10_000
}

impl Default for McSection {
    fn default() -> Self {
        McSection { n_samples: default_samples(), seed: None }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct OutputSection {
    /// Resolved at run time; the per-command default applies when absent.
    #[serde(default)]
    format: Option<Format>,
}

/// An inclusive dB grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RangeSpec {
    start: f64,
    stop: f64,
    step: f64,
}

impl RangeSpec {
    fn expand(&self) -> Result<Vec<f64>, CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(fail("config", "range bounds and step must be finite"));
        }
        if self.step <= 0.0 {
            return Err(fail("config", format!("range step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(fail(
                "config",
                format!("range stop {} is below start {}", self.stop, self.start),
            ));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + self.step * i as f64).collect())
    }
}

fn parse_range(text: &str) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:step, got {text:?}"));
    }
    let mut vals = [0.0f64; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number in range: {part:?}"))?;
    }
    Ok(RangeSpec { start: vals[0], stop: vals[1], step: vals[2] })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepSection {
    #[serde(default = "default_snr_range")]
    snr_db: RangeSpec,
    #[serde(default = "default_alpha_range")]
    alpha2_db: RangeSpec,
}

fn default_snr_range() -> RangeSpec {
    RangeSpec { start: -5.0, stop: 25.0, step: 2.5 }
}

fn default_alpha_range() -> RangeSpec {
    RangeSpec { start: 0.0, stop: 20.0, step: 2.5 }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { snr_db: default_snr_range(), alpha2_db: default_alpha_range() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AllocationSection {
    #[serde(default = "default_trials")]
    trials: u64,
}

fn default_trials() -> u64 {
    20
}

impl Default for AllocationSection {
    fn default() -> Self {
        AllocationSection { trials: default_trials() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct AsymptoticsSection {
    /// Antenna ratio m_W / m_D for the large-antenna closed form;
    /// resolved to the configured ratio when absent.
    #[serde(default)]
    beta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProtocolSection {
    /// Path to the JSON instance file.
    #[serde(default)]
    instance: Option<String>,
    /// Typicality tolerance for quantization and decoding.
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    /// Slack used when building the rate quadruple.
    #[serde(default = "default_rate_epsilon")]
    rate_epsilon: f64,
    #[serde(default = "default_blocklength")]
    blocklength: usize,
    #[serde(default = "default_mode")]
    mode: Mode,
    /// Session count for Monte Carlo mode.
    #[serde(default = "default_replicates")]
    replicates: u64,
    /// Work cap shared by the exact acceptance table and the exact
    /// state enumeration.
    #[serde(default = "default_cap")]
    cap: u64,
    /// Maximum codebook size in codewords.
    #[serde(default = "default_codebook_cap")]
    codebook_cap: u64,
}

fn default_epsilon() -> f64 {
    0.25
}

fn default_rate_epsilon() -> f64 {
    0.001
}

fn default_blocklength() -> usize {
    4
}

fn default_mode() -> Mode {
    Mode::Exact
}

fn default_replicates() -> u64 {
    10_000
}

fn default_cap() -> u64 {
    1 << 26
}

fn default_codebook_cap() -> u64 {
    1 << 20
}

impl Default for ProtocolSection {
    fn default() -> Self {
        ProtocolSection {
            instance: None,
            epsilon: default_epsilon(),
            rate_epsilon: default_rate_epsilon(),
            blocklength: default_blocklength(),
            mode: default_mode(),
            replicates: default_replicates(),
            cap: default_cap(),
            codebook_cap: default_codebook_cap(),
        }
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// A failure destined for the stderr error record.
#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
}

fn fail(kind: &'static str, message: impl Into<String>) -> CliError {
    CliError { kind, message: message.into() }
}

impl From<CapacityError> for CliError {
    fn from(e: CapacityError) -> Self {
        let kind = match &e {
            CapacityError::Channel(_) => "channel",
            CapacityError::Linalg(_) => "linalg",
            _ => "capacity",
        };
        fail(kind, e.to_string())
    }
}

impl From<AllocationError> for CliError {
    fn from(e: AllocationError) -> Self {
        let kind = match &e {
            AllocationError::Channel(_) => "channel",
            AllocationError::Linalg(_) => "linalg",
            _ => "allocation",
        };
        fail(kind, e.to_string())
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        let kind = match &e {
            AsymptoticsError::Channel(_) => "channel",
            AsymptoticsError::Linalg(_) => "linalg",
            _ => "asymptotics",
        };
        fail(kind, e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        let kind = match &e {
            ProtocolError::EnumerationTooLarge { .. } | ProtocolError::SizeOverflow { .. } => {
                "cap_exceeded"
            }
            _ => "protocol",
        };
        fail(kind, e.to_string())
    }
}

fn emit_error(command: &str, err: &CliError) {
    let record = json!({
        "error": { "kind": err.kind, "message": err.message, "command": command }
    });
    eprintln!("{record}");
}

// ---------------------------------------------------------------------------
// Configuration resolution
// ---------------------------------------------------------------------------

/// Everything a handler needs: merged config, resolved seed, and plumbing.
struct Prepared {
    config: RunConfig,
    seed: u64,
    workers: usize,
    format: Format,
    out: Option<PathBuf>,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail("config", format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| fail("config", format!("malformed config {}: {e}", path.display())))
}

/// Seed precedence: `--seed`, then `KEYCAP_DEFAULT_SEED`, then the config
/// file, then the fixed fallback 42.
fn resolve_seed(flag: Option<u64>, config_seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(text) = std::env::var("KEYCAP_DEFAULT_SEED") {
        return text.trim().parse::<u64>().map_err(|_| {
            fail("config", format!("KEYCAP_DEFAULT_SEED must be a u64, got {text:?}"))
        });
    }
    Ok(config_seed.unwrap_or(42))
}

fn prepare(common: &CommonArgs, default_format: Format) -> Result<Prepared, CliError> {
    let mut config = load_config(&common.config)?;
    if let Some(n) = common.samples {
        config.mc.n_samples = n;
    }
    let seed = resolve_seed(common.seed, config.mc.seed)?;
    config.mc.seed = Some(seed);
    let format = common.format.or(config.output.format).unwrap_or(default_format);
    config.output.format = Some(format);
    Ok(Prepared {
        config,
        seed,
        workers: common.workers.unwrap_or(1),
        format,
        out: common.out.clone(),
    })
}

fn reject_csv(p: &Prepared, command: &str) -> Result<(), CliError> {
    if p.format == Format::Csv {
        return Err(fail(
            "config",
            format!("csv output is limited to capacity and the sweeps; {command} emits json"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Output rendering
// ---------------------------------------------------------------------------

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail("io", format!("cannot write {}: {e}", path.display()))),
    }
}

fn emit_json(p: &Prepared, command: &str, result: serde_json::Value) -> Result<(), CliError> {
    let doc = json!({ "command": command, "config": p.config, "result": result });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| fail("io", format!("cannot serialize output: {e}")))?;
    text.push('\n');
    write_output(&p.out, &text)
}

fn emit_csv(p: &Prepared, command: &str, points: &[SweepPoint]) -> Result<(), CliError> {
    let echo = json!({ "command": command, "config": p.config });
    let mut text = format!("# {echo}\n");
    text.push_str("axis_value,mean_bits,stderr_bits,n_samples\n");
    for pt in points {
        text.push_str(&format!(
            "{},{},{},{}\n",
            pt.axis_value, pt.mean_bits, pt.stderr_bits, pt.n_samples
        ));
    }
    write_output(&p.out, &text)
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

fn run_capacity(common: CommonArgs) -> Result<(), CliError> {
    let p = prepare(&common, Format::Json)?;
    let ch = p.config.channel.clone();
    let est =
        estimate_capacity(&ch, p.config.mc.n_samples, &SeedSpec::new(p.seed, "capacity"), p.workers)?;
    match p.format {
        Format::Json => {
            let result = serde_json::to_value(&est)
                .map_err(|e| fail("io", format!("cannot serialize output: {e}")))?;
            emit_json(&p, "capacity", result)
        }
        Format::Csv => {
            let point = SweepPoint {
                axis_value: linear_to_db(ch.power / ch.sigma2_d),
                mean_bits: est.mean_bits,
                stderr_bits: est.stderr_bits,
                n_samples: est.n_samples,
            };
            emit_csv(&p, "capacity", &[point])
        }
    }
}

fn run_sweep(
    common: CommonArgs,
    axis: SweepAxis,
    range_flag: Option<RangeSpec>,
    command: &str,
) -> Result<(), CliError> {
    let mut p = prepare(&common, Format::Csv)?;
    if let Some(r) = range_flag {
        match axis {
            SweepAxis::SnrDb => p.config.sweep.snr_db = r,
            SweepAxis::Alpha2Db => p.config.sweep.alpha2_db = r,
        }
    }
    let range = match axis {
        SweepAxis::SnrDb => p.config.sweep.snr_db,
        SweepAxis::Alpha2Db => p.config.sweep.alpha2_db,
    };
    let grid = range.expand()?;
    let series = sweep(
        &p.config.channel,
        axis,
        &grid,
        p.config.mc.n_samples,
        &SeedSpec::new(p.seed, command),
        p.workers,
    )?;
    match p.format {
        Format::Csv => emit_csv(&p, command, &series.points),
        Format::Json => {
            let result = serde_json::to_value(&series)
                .map_err(|e| fail("io", format!("cannot serialize output: {e}")))?;
            emit_json(&p, command, result)
        }
    }
}

fn run_allocation_check(common: CommonArgs) -> Result<(), CliError> {
    let p = prepare(&common, Format::Json)?;
    reject_csv(&p, "allocation-check")?;
    let report = check_uniform_optimal(
        &p.config.channel,
        p.config.mc.n_samples,
        p.config.allocation.trials,
        &SeedSpec::new(p.seed, "allocation-check"),
        p.workers,
    )?;
    let result = serde_json::to_value(&report)
        .map_err(|e| fail("io", format!("cannot serialize output: {e}")))?;
    emit_json(&p, "allocation-check", result)
}

fn run_asymptotics(common: CommonArgs, beta_flag: Option<f64>) -> Result<(), CliError> {
    let mut p = prepare(&common, Format::Json)?;
    reject_csv(&p, "asymptotics")?;
    if let Some(b) = beta_flag {
        p.config.asymptotics.beta = Some(b);
    }
    let ch = p.config.channel.clone();
    let beta = p
        .config
        .asymptotics
        .beta
        .unwrap_or(ch.m_w as f64 / ch.m_d as f64);
    p.config.asymptotics.beta = Some(beta);
    let n = p.config.mc.n_samples;
    let seed_spec = SeedSpec::new(p.seed, "asymptotics");

    let finite = estimate_capacity(&ch, n, &seed_spec, p.workers)?;
    let high_power = if ch.m_w >= ch.m_s {
        Some(high_power_limit(&ch, n, &seed_spec, p.workers)?)
    } else {
        None
    };
    let c_inf = if ch.m_w < ch.m_s {
        Some(c_infinity(&ch, n, &seed_spec, p.workers)?)
    } else {
        None
    };
    let alpha = alpha_limit(&ch, n, &seed_spec, p.workers)?;
    // The closed form needs beta > 0 and alpha2 > 0; outside that it simply
    // does not apply (e.g. the no-eavesdropper channel), so report null.
    let large = match large_antenna_limit(ch.m_s, beta, ch.alpha2, ch.sigma2_d, ch.sigma2_w) {
        Ok(bits) => json!({ "beta": beta, "limit_bits": bits }),
        Err(_) => json!(null),
    };

    let result = json!({
        "finite": finite,
        "high_power_limit": high_power,
        "c_infinity": c_inf,
        "alpha_limit": alpha,
        "large_antenna": large,
    });
    emit_json(&p, "asymptotics", result)
}

fn run_protocol(
    common: CommonArgs,
    instance_flag: Option<String>,
    epsilon_flag: Option<f64>,
    blocklength_flag: Option<usize>,
    mode_flag: Option<Mode>,
) -> Result<(), CliError> {
    let mut p = prepare(&common, Format::Json)?;
    reject_csv(&p, "protocol")?;
    if let Some(path) = instance_flag {
        p.config.protocol.instance = Some(path);
    }
    if let Some(e) = epsilon_flag {
        p.config.protocol.epsilon = e;
    }
    if let Some(n) = blocklength_flag {
        p.config.protocol.blocklength = n;
    }
    if let Some(m) = mode_flag {
        p.config.protocol.mode = m;
    }
    let sect = p.config.protocol.clone();
    let path = sect.instance.clone().ok_or_else(|| {
        fail("config", "protocol needs an instance file: pass --instance or set protocol.instance")
    })?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| fail("config", format!("cannot read instance {path}: {e}")))?;
    let inst: ProtocolInstance = serde_json::from_str(&text)
        .map_err(|e| fail("config", format!("malformed instance {path}: {e}")))?;

    let rates = build_rates(&inst, sect.rate_epsilon)?;
    let seed_spec = SeedSpec::new(p.seed, "protocol");
    let setup = build_setup(
        &inst,
        sect.blocklength,
        sect.epsilon,
        &rates,
        &seed_spec,
        SMode::Exact { cap: sect.cap as u128 },
        sect.codebook_cap,
    )?;
    let mode = match sect.mode {
        Mode::Exact => AnalysisMode::Exact,
        Mode::Mc => AnalysisMode::MonteCarlo { replicates: sect.replicates },
    };
    let report = estimate_error_and_leakage(&setup, mode, sect.cap as u128)?;

    let counts = &setup.codebook.counts;
    let result = json!({
        "rates": setup.rates,
        "codebook": {
            "n2": counts.n2,
            "n3": counts.n3,
            "n4": counts.n4,
            "total": counts.total() as u64,
        },
        "report": report,
    });
    emit_json(&p, "protocol", result)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Capacity(common) => run_capacity(common),
        Cmd::SweepSnr { common, snr_db_range } => {
            run_sweep(common, SweepAxis::SnrDb, snr_db_range, "sweep-snr")
        }
        Cmd::SweepAlpha { common, alpha2_db_range } => {
            run_sweep(common, SweepAxis::Alpha2Db, alpha2_db_range, "sweep-alpha")
        }
        Cmd::AllocationCheck(common) => run_allocation_check(common),
        Cmd::Asymptotics { common, beta } => run_asymptotics(common, beta),
        Cmd::Protocol { common, instance, epsilon, blocklength, mode } => {
            run_protocol(common, instance, epsilon, blocklength, mode)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return;
            }
            emit_error("cli", &fail("config", e.to_string()));
            std::process::exit(1);
        }
    };
    let command = cli.command.name();
    if let Err(err) = run(cli) {
        emit_error(command, &err);
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
