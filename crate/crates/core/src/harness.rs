//! Monte-Carlo sweep harness: configuration, execution, aggregation, CSV.
//!
//! A sweep draws one channel per trial, then evaluates every (scheme, b_bar,
//! SNR) grid point on that same channel. All schemes at a given (trial, SNR)
//! start from an identically seeded rng, so they see the same symbols and
//! noise and EVM differences isolate the receiver scheme. Per-trial rng
//! streams are derived from (master seed, stream tag, indices), which makes
//! the output a pure function of the config regardless of how many worker
//! threads execute it.

use std::fmt::Write as _;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::allocation::PowerModel;
use crate::channel::{generate_channel, ArrayGeometry, ChannelParams};
use crate::link::{run_trial, Scheme, TrialContext, TrialResult};
use crate::quantization::{CodebookBank, QuantizerMode};
use crate::{Error, Result};

const STREAM_CHANNEL: u64 = 0x6368_616e;
const STREAM_TRIAL: u64 = 0x7472_6961;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based stream: a fresh rng keyed on the master seed plus indices.
pub fn stream_rng(seed: u64, words: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix64(seed);
    for &w in words {
        state = splitmix64(state ^ w);
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Scheme families selectable in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Full,
    Uniform,
    Ba,
}

impl SchemeKind {
    fn parse(token: &str) -> Result<Self> {
        match token.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(SchemeKind::Full),
            "uniform" => Ok(SchemeKind::Uniform),
            "ba" => Ok(SchemeKind::Ba),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}' (expected full, uniform, ba)"
            ))),
        }
    }

    fn parse_list(s: &str) -> Result<Vec<Self>> {
        let mut kinds = Vec::new();
        for token in s.split(',') {
            let kind = Self::parse(token)?;
            if !kinds.contains(&kind) {
                kinds.push(kind);
            }
        }
        if kinds.is_empty() {
            return Err(Error::InvalidConfig("scheme list is empty".into()));
        }
        Ok(kinds)
    }
}

/// Full description of a sweep.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_antennas: usize,
    pub n_users: usize,
    pub snr_db_grid: Vec<f64>,
    pub b_bar_list: Vec<u32>,
    pub schemes: Vec<SchemeKind>,
    pub trials: usize,
    pub seed: u64,
    pub quantizer_mode: QuantizerMode,
    pub n_subpaths: usize,
    pub cluster_spread: f64,
    /// Per-subpath relative powers; `None` means equal.
    pub subpath_powers: Option<Vec<f64>>,
    pub power: PowerModel,
    pub carrier_hz: f64,
    pub spacing_ratio: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_antennas: 256,
            n_users: 8,
            snr_db_grid: (-5..=5).map(|k| 2.0 * k as f64).collect(),
            b_bar_list: vec![1, 2, 3],
            schemes: vec![SchemeKind::Full, SchemeKind::Uniform, SchemeKind::Ba],
            trials: 500,
            seed: 1,
            quantizer_mode: QuantizerMode::Codebook,
            n_subpaths: 4,
            cluster_spread: 0.02,
            subpath_powers: None,
            power: PowerModel::new(494e-15, 1e9).expect("default power model"),
            carrier_hz: 73e9,
            spacing_ratio: 0.25,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 || self.n_users == 0 {
            return Err(Error::InvalidConfig("antennas and users must be positive".into()));
        }
        if self.n_antennas < self.n_users {
            return Err(Error::InvalidConfig(format!(
                "need at least as many antennas as users ({} < {})",
                self.n_antennas, self.n_users
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("need at least one trial".into()));
        }
        if self.snr_db_grid.is_empty() {
            return Err(Error::InvalidConfig("SNR grid is empty".into()));
        }
        if self.snr_db_grid.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig("SNR grid has non-finite entries".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("scheme list is empty".into()));
        }
        let needs_b_bar = self
            .schemes
            .iter()
            .any(|k| matches!(k, SchemeKind::Uniform | SchemeKind::Ba));
        if needs_b_bar && self.b_bar_list.is_empty() {
            return Err(Error::InvalidConfig("b_bar list is empty".into()));
        }
        if self.b_bar_list.iter().any(|&b| b < 1 || b > 8) {
            return Err(Error::InvalidConfig("b_bar values must be in 1..=8".into()));
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(Error::InvalidConfig("carrier must be positive".into()));
        }
        if !(self.spacing_ratio > 0.0 && self.spacing_ratio.is_finite()) {
            return Err(Error::InvalidConfig("spacing ratio must be positive".into()));
        }
        self.channel_params()?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        let wavelength = 299_792_458.0 / self.carrier_hz;
        ArrayGeometry::new(self.n_antennas, wavelength, self.spacing_ratio * wavelength)
    }

    pub fn channel_params(&self) -> Result<ChannelParams> {
        match &self.subpath_powers {
            Some(powers) => ChannelParams::new(
                self.n_users,
                self.n_subpaths,
                self.cluster_spread,
                powers.clone(),
            ),
            None => ChannelParams::equal_powers(self.n_users, self.n_subpaths, self.cluster_spread),
        }
    }

    /// Expands the scheme kinds against the b_bar list into concrete rows.
    /// The unquantized reference collapses over b_bar.
    pub fn scheme_rows(&self) -> Vec<Scheme> {
        let mut rows = Vec::new();
        for kind in &self.schemes {
            match kind {
                SchemeKind::Full => rows.push(Scheme::Full),
                SchemeKind::Uniform => {
                    rows.extend(self.b_bar_list.iter().map(|&b| Scheme::Uniform(b)))
                }
                SchemeKind::Ba => rows.extend(self.b_bar_list.iter().map(|&b| Scheme::Ba(b))),
            }
        }
        rows.dedup();
        rows
    }

    /// Deepest codebook any trial could request: the relaxed bits are capped
    /// by `b_bar + log2(N)`.
    fn bank_depth(&self) -> u32 {
        let b_bar_max = self.b_bar_list.iter().copied().max().unwrap_or(1);
        let headroom = (self.n_antennas as f64).log2().ceil() as u32;
        (b_bar_max + headroom).clamp(1, 16)
    }
}

/// One aggregated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub trials: usize,
    pub evm_mean_pct: f64,
    pub evm_std_pct: f64,
    pub inactive_mean: f64,
    pub total_power_mean_w: f64,
    pub infeasible: usize,
}

/// Aggregated sweep output, one row per grid point, ordered by scheme label,
/// then b_bar, then SNR ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

pub const CSV_HEADER: &str =
    "scheme,b_bar,snr_db,trials,evm_mean_pct,evm_std_pct,inactive_mean,total_power_w,infeasible";

impl ResultTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                row.scheme.label(),
                row.scheme.b_bar().unwrap_or(0),
                fmt_sig(row.snr_db, 6),
                row.trials,
                fmt_sig(row.evm_mean_pct, 6),
                fmt_sig(row.evm_std_pct, 6),
                fmt_sig(row.inactive_mean, 6),
                fmt_sig(row.total_power_mean_w, 6),
                row.infeasible,
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Row for a given scheme and SNR, if present.
    pub fn find(&self, scheme: Scheme, snr_db: f64) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.snr_db == snr_db)
    }
}

/// Plain decimal with the given number of significant digits.
fn fmt_sig(x: f64, digits: i32) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).clamp(0, 17) as usize;
    let mut out = String::new();
    write!(out, "{x:.decimals$}").expect("formatting");
    out
}

/// Runs the whole sweep. Deterministic in the config, including under any
/// rayon worker count: trials are collected in index order and reduced
/// sequentially.
pub fn run_sweep(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let geometry = config.geometry()?;
    let channel_params = config.channel_params()?;
    let rows = config.scheme_rows();
    let bank = CodebookBank::with_defaults(config.bank_depth())?;
    let n_snr = config.snr_db_grid.len();

    let per_trial: Vec<Vec<TrialResult>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<TrialResult>> {
            let mut channel_rng = stream_rng(config.seed, &[STREAM_CHANNEL, trial as u64]);
            let channel = generate_channel(&geometry, &channel_params, &mut channel_rng)?;
            let mut outcomes = Vec::with_capacity(rows.len() * n_snr);
            for &scheme in &rows {
                for (si, &snr_db) in config.snr_db_grid.iter().enumerate() {
                    let ctx = TrialContext {
                        noise_power: 10.0_f64.powf(-snr_db / 10.0),
                        mode: config.quantizer_mode,
                        power: config.power,
                        bank: &bank,
                    };
                    // keyed on (trial, snr) only: every scheme row sees the
                    // same symbols and noise at this grid point
                    let mut rng =
                        stream_rng(config.seed, &[STREAM_TRIAL, trial as u64, si as u64]);
                    outcomes.push(run_trial(&ctx, &channel, scheme, &mut rng)?);
                }
            }
            Ok(outcomes)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table_rows = Vec::with_capacity(rows.len() * n_snr);
    for (ri, &scheme) in rows.iter().enumerate() {
        for (si, &snr_db) in config.snr_db_grid.iter().enumerate() {
            let idx = ri * n_snr + si;
            let mut evm_sum = 0.0;
            let mut evm_sumsq = 0.0;
            let mut feasible = 0usize;
            let mut inactive_sum = 0.0;
            let mut power_sum = 0.0;
            for outcomes in &per_trial {
                let r = &outcomes[idx];
                inactive_sum += (config.n_antennas - r.n_active) as f64;
                power_sum += r.total_power;
                if r.feasible {
                    evm_sum += r.evm_pct;
                    evm_sumsq += r.evm_pct * r.evm_pct;
                    feasible += 1;
                }
            }
            let trials = per_trial.len();
            let evm_mean = if feasible > 0 { evm_sum / feasible as f64 } else { f64::NAN };
            let evm_std = if feasible > 1 {
                ((evm_sumsq - evm_sum * evm_sum / feasible as f64) / (feasible as f64 - 1.0))
                    .max(0.0)
                    .sqrt()
            } else {
                0.0
            };
            table_rows.push(ResultRow {
                scheme,
                snr_db,
                trials,
                evm_mean_pct: evm_mean,
                evm_std_pct: evm_std,
                inactive_mean: inactive_sum / trials as f64,
                total_power_mean_w: power_sum / trials as f64,
                infeasible: trials - feasible,
            });
        }
    }
    table_rows.sort_by(|a, b| {
        (a.scheme.label(), a.scheme.b_bar().unwrap_or(0))
            .cmp(&(b.scheme.label(), b.scheme.b_bar().unwrap_or(0)))
            .then(a.snr_db.total_cmp(&b.snr_db))
    });
    Ok(ResultTable { rows: table_rows })
}

/// Writes the table to `path` as CSV.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut writer = BufWriter::new(file);
    table.write_csv(&mut writer)?;
    writer.flush()?;
    Ok(())
}

#[derive(Parser, Debug, Default)]
#[command(
    name = "beamba",
    version,
    about = "Monte-Carlo EVM sweeps for beamspace ADC bit allocation receivers"
)]
struct Cli {
    /// Base-station antenna count N
    #[arg(long)]
    antennas: Option<usize>,
    /// Single-antenna user count M
    #[arg(long)]
    users: Option<usize>,
    /// Comma-separated SNR grid in dB, e.g. "-10,-5,0,5,10"
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Comma-separated budget bit counts, e.g. "1,2,3"
    #[arg(long, value_name = "LIST")]
    bbar: Option<String>,
    /// Comma-separated scheme kinds out of full, uniform, ba
    #[arg(long, value_name = "LIST")]
    schemes: Option<String>,
    /// Monte-Carlo trials per grid point
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; the whole sweep is a pure function of the config
    #[arg(long)]
    seed: Option<u64>,
    /// Quantizer mode: aqnm or codebook
    #[arg(long)]
    mode: Option<String>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key = value config file; explicit flags override file entries
    #[arg(long)]
    config: Option<PathBuf>,
}

/// A fully resolved CLI invocation.
#[derive(Debug, Clone)]
pub struct CliInvocation {
    pub config: ExperimentConfig,
    pub out_path: PathBuf,
}

/// What to do with the parsed command line.
#[derive(Debug)]
pub enum CliOutcome {
    Run(Box<CliInvocation>),
    /// Help or version text to print before exiting successfully.
    Print(String),
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse '{t}' as a number")))
        })
        .collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse '{t}' as an integer")))
        })
        .collect()
}

fn parse_mode(s: &str) -> Result<QuantizerMode> {
    match s.trim().to_ascii_lowercase().as_str() {
        "aqnm" => Ok(QuantizerMode::Aqnm),
        "codebook" => Ok(QuantizerMode::Codebook),
        other => Err(Error::InvalidConfig(format!(
            "unknown quantizer mode '{other}' (expected aqnm or codebook)"
        ))),
    }
}

fn apply_file_entry(config: &mut ExperimentConfig, out: &mut PathBuf, key: &str, value: &str) -> Result<()> {
    let parse_usize = |v: &str| {
        v.parse::<usize>()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse '{v}' as an integer")))
    };
    let parse_f64 = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse '{v}' as a number")))
    };
    match key {
        "antennas" => config.n_antennas = parse_usize(value)?,
        "users" => config.n_users = parse_usize(value)?,
        "snr_db" => config.snr_db_grid = parse_f64_list(value)?,
        "bbar" => config.b_bar_list = parse_u32_list(value)?,
        "schemes" => config.schemes = SchemeKind::parse_list(value)?,
        "trials" => config.trials = parse_usize(value)?,
        "seed" => {
            config.seed = value
                .parse::<u64>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse '{value}' as a seed")))?
        }
        "mode" => config.quantizer_mode = parse_mode(value)?,
        "subpaths" => config.n_subpaths = parse_usize(value)?,
        "cluster_spread" => config.cluster_spread = parse_f64(value)?,
        "subpath_powers" => config.subpath_powers = Some(parse_f64_list(value)?),
        "carrier_ghz" => config.carrier_hz = parse_f64(value)? * 1e9,
        "spacing_ratio" => config.spacing_ratio = parse_f64(value)?,
        "adc_energy_fj" => {
            config.power = PowerModel::new(parse_f64(value)? * 1e-15, config.power.sampling_rate())?
        }
        "sampling_rate_ghz" => {
            config.power =
                PowerModel::new(config.power.conversion_energy(), parse_f64(value)? * 1e9)?
        }
        "out" => *out = PathBuf::from(value),
        other => {
            return Err(Error::InvalidConfig(format!("unknown config key '{other}'")));
        }
    }
    Ok(())
}

fn load_config_file(config: &mut ExperimentConfig, out: &mut PathBuf, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("{}:{}: expected 'key = value'", path.display(), lineno + 1))
        })?;
        apply_file_entry(config, out, key.trim(), value.trim())?;
    }
    Ok(())
}

/// Builds the experiment config from argv; file values come first, explicit
/// flags override them, and everything else keeps the defaults (N=256, M=8,
/// SNR -10..10 dB in 2 dB steps, b_bar 1..3, 4 subpaths, quarter-wave
/// spacing at 73 GHz).
pub fn parse_cli(args: &[String]) -> Result<CliOutcome> {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(CliOutcome::Print(e.to_string()));
        }
        Err(e) => return Err(Error::InvalidConfig(e.to_string())),
    };

    let mut config = ExperimentConfig::default();
    let mut out_path = PathBuf::from("results.csv");

    if let Some(path) = &cli.config {
        load_config_file(&mut config, &mut out_path, path)?;
    }
    if let Some(n) = cli.antennas {
        config.n_antennas = n;
    }
    if let Some(m) = cli.users {
        config.n_users = m;
    }
    if let Some(s) = &cli.snr_db {
        config.snr_db_grid = parse_f64_list(s)?;
    }
    if let Some(s) = &cli.bbar {
        config.b_bar_list = parse_u32_list(s)?;
    }
    if let Some(s) = &cli.schemes {
        config.schemes = SchemeKind::parse_list(s)?;
    }
    if let Some(t) = cli.trials {
        config.trials = t;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(m) = &cli.mode {
        config.quantizer_mode = parse_mode(m)?;
    }
    if let Some(o) = &cli.out {
        out_path = o.clone();
    }

    config.validate()?;
    Ok(CliOutcome::Run(Box::new(CliInvocation { config, out_path })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        std::iter::once("beamba")
            .chain(list.iter().copied())
            .map(String::from)
            .collect()
    }

    fn unwrap_run(outcome: CliOutcome) -> CliInvocation {
        match outcome {
            CliOutcome::Run(inv) => *inv,
            CliOutcome::Print(text) => panic!("expected a run, got text: {text}"),
        }
    }

    #[test]
    fn defaults_mirror_the_reference_setup() {
        let inv = unwrap_run(parse_cli(&args(&[])).unwrap());
        let c = &inv.config;
        assert_eq!(c.n_antennas, 256);
        assert_eq!(c.n_users, 8);
        assert_eq!(c.b_bar_list, vec![1, 2, 3]);
        assert_eq!(c.n_subpaths, 4);
        assert_eq!(c.spacing_ratio, 0.25);
        assert_eq!(c.trials, 500);
        assert_eq!(c.quantizer_mode, QuantizerMode::Codebook);
        assert_eq!(c.snr_db_grid.first(), Some(&-10.0));
        assert_eq!(c.snr_db_grid.last(), Some(&10.0));
        assert_eq!(c.snr_db_grid.len(), 11);
        assert_eq!(inv.out_path, PathBuf::from("results.csv"));
    }

    #[test]
    fn flags_override_single_fields() {
        let inv = unwrap_run(parse_cli(&args(&["--users", "16"])).unwrap());
        assert_eq!(inv.config.n_users, 16);
        assert_eq!(inv.config.n_antennas, 256);

        let inv = unwrap_run(parse_cli(&args(&["--bbar", "1,2"])).unwrap());
        assert_eq!(inv.config.b_bar_list, vec![1, 2]);

        let inv = unwrap_run(parse_cli(&args(&["--schemes", "ba"])).unwrap());
        assert_eq!(inv.config.schemes, vec![SchemeKind::Ba]);
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert!(parse_cli(&args(&["--not-a-flag"])).is_err());
        assert!(parse_cli(&args(&["--trials", "many"])).is_err());
        assert!(parse_cli(&args(&["--mode", "quantum"])).is_err());
        assert!(parse_cli(&args(&["--users", "0"])).is_err());
        assert!(parse_cli(&args(&["--antennas", "4", "--users", "8"])).is_err());
    }

    #[test]
    fn help_is_not_an_error() {
        match parse_cli(&args(&["--help"])).unwrap() {
            CliOutcome::Print(text) => assert!(text.contains("--antennas")),
            CliOutcome::Run(_) => panic!("help should print"),
        }
    }

    #[test]
    fn config_file_loads_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.conf");
        std::fs::write(
            &path,
            "# sweep setup\nantennas = 64\nusers = 4\ntrials = 7\nmode = aqnm\nout = from_file.csv\n",
        )
        .unwrap();
        let inv = unwrap_run(
            parse_cli(&args(&["--config", path.to_str().unwrap(), "--trials", "9"])).unwrap(),
        );
        assert_eq!(inv.config.n_antennas, 64);
        assert_eq!(inv.config.n_users, 4);
        assert_eq!(inv.config.trials, 9, "flag overrides file");
        assert_eq!(inv.config.quantizer_mode, QuantizerMode::Aqnm);
        assert_eq!(inv.out_path, PathBuf::from("from_file.csv"));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "wavelength = 3\n").unwrap();
        assert!(parse_cli(&args(&["--config", path.to_str().unwrap()])).is_err());
    }

    #[test]
    fn scheme_rows_collapse_full_over_b_bar() {
        let config = ExperimentConfig::default();
        let rows = config.scheme_rows();
        assert_eq!(rows.len(), 1 + 2 * config.b_bar_list.len());
        assert_eq!(rows.iter().filter(|s| matches!(s, Scheme::Full)).count(), 1);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(12.3456789, 6), "12.3457");
        assert_eq!(fmt_sig(-0.000123456789, 6), "-0.000123457");
        assert_eq!(fmt_sig(252928.0, 6), "252928");
        for &x in &[12.3456789f64, 9.88e-4, -3.21e7, 0.252928] {
            let printed = fmt_sig(x, 6);
            let parsed: f64 = printed.parse().unwrap();
            assert!(
                ((parsed - x) / x).abs() < 1e-5,
                "{x} printed as {printed}, parsed {parsed}"
            );
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let table = ResultTable { rows: Vec::new() };
        assert_eq!(table.to_csv_string(), format!("{CSV_HEADER}\n"));
    }

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            n_antennas: 16,
            n_users: 2,
            snr_db_grid: vec![-5.0, 5.0],
            b_bar_list: vec![1, 2],
            trials: 10,
            seed: 42,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn sweep_has_one_row_per_grid_point() {
        let config = small_config();
        let table = run_sweep(&config).unwrap();
        // full collapses over b_bar: (1 + 2 + 2) rows x 2 SNRs
        assert_eq!(table.rows.len(), 5 * 2);
        for row in &table.rows {
            assert_eq!(row.trials, 10);
            assert!(row.infeasible <= row.trials);
            let fields = 9;
            let line_fields = table.to_csv_string().lines().nth(1).unwrap().split(',').count();
            assert_eq!(line_fields, fields);
        }
        // sorted by scheme label, then b_bar, then SNR
        let labels: Vec<&str> = table.rows.iter().map(|r| r.scheme.label()).collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
    }

    #[test]
    fn sweep_is_a_pure_function_of_the_config() {
        let config = small_config();
        let a = run_sweep(&config).unwrap();
        let b = run_sweep(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv_string(), b.to_csv_string());
    }

    #[test]
    fn emitted_file_matches_the_in_memory_csv() {
        let config = small_config();
        let table = run_sweep(&config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_csv(&table, &path).unwrap();
        let written = std::fs::read_to_string(&path).unwrap();
        assert_eq!(written, table.to_csv_string());
    }

    #[test]
    fn csv_round_trips_through_six_significant_digits() {
        let config = small_config();
        let table = run_sweep(&config).unwrap();
        let csv = table.to_csv_string();
        for (line, row) in csv.lines().skip(1).zip(&table.rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 9);
            assert_eq!(fields[0], row.scheme.label());
            assert_eq!(fields[1].parse::<u32>().unwrap(), row.scheme.b_bar().unwrap_or(0));
            let evm: f64 = fields[4].parse().unwrap();
            if row.evm_mean_pct != 0.0 {
                assert!(((evm - row.evm_mean_pct) / row.evm_mean_pct).abs() < 1e-5);
            }
            let trials: usize = fields[3].parse().unwrap();
            assert_eq!(trials, row.trials);
        }
    }
}
