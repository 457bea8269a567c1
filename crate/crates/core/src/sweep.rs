//! Monte Carlo throughput sweeps over SNR, BER target and system profile.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::channel::{draw_realization, noise_var_for_db, snr_grid, trial_rng, ChannelProfile};
use crate::error::{Error, Result};
use crate::loading::{allocate_with_table, BerTable, Granularity};
use crate::metrics::{aggregate, eta_r, SweepPoint};
use crate::systems::{
    build_profile, ConstraintGrid, SystemKind, SystemProfile, RB_SUBCARRIERS, RB_SYMBOLS,
};

pub const CSV_HEADER: &str = "system,snr_db,p_t,trials,mean_bits_per_subcarrier,ci95,eta_r";

/// Arithmetic SNR range in dB, written `START:STEP:STOP` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrRange {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl SnrRange {
    pub fn new(start: f64, step: f64, stop: f64) -> Result<Self> {
        if !(start.is_finite() && step.is_finite() && stop.is_finite()) {
            return Err(Error::Config("SNR range must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::Config(format!(
                "SNR step must be positive, got {step}"
            )));
        }
        if stop < start {
            return Err(Error::Config(format!(
                "SNR stop {stop} is below start {start}"
            )));
        }
        Ok(Self { start, step, stop })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl Default for SnrRange {
    fn default() -> Self {
        Self {
            start: 0.0,
            step: 2.0,
            stop: 40.0,
        }
    }
}

impl FromStr for SnrRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{t}' in SNR range '{s}'")))
        };
        match parts.as_slice() {
            [single] => {
                let v = num(single)?;
                Self::new(v, 1.0, v)
            }
            [a, b, c] => Self::new(num(a)?, num(b)?, num(c)?),
            _ => Err(Error::Config(format!(
                "SNR range '{s}' must be START:STEP:STOP or a single value"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub systems: Vec<SystemKind>,
    pub snr_db: SnrRange,
    pub p_t: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub n_fft: usize,
    pub n_f: usize,
    pub n_t: usize,
    pub start_subcarrier: usize,
    pub granularity: Granularity,
    /// Extra system read from a constraint-map file; its grid sets the
    /// dimensions of the whole sweep.
    pub profile_file: Option<PathBuf>,
    /// Power delay profile; the TUx profile when absent.
    pub channel_file: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            systems: SystemKind::ALL.to_vec(),
            snr_db: SnrRange::default(),
            p_t: vec![1e-3],
            trials: 1000,
            seed: 1,
            n_fft: 128,
            n_f: RB_SUBCARRIERS,
            n_t: RB_SYMBOLS,
            start_subcarrier: 0,
            granularity: Granularity::Subcarrier,
            profile_file: None,
            channel_file: None,
            workers: None,
        }
    }
}

/// Partial configuration from a TOML file or command-line flags. Present
/// fields replace those of the configuration they are applied to.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOverrides {
    pub systems: Option<Vec<String>>,
    pub snr_db: Option<String>,
    pub p_t: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub n_fft: Option<usize>,
    pub n_f: Option<usize>,
    pub n_t: Option<usize>,
    pub start_subcarrier: Option<usize>,
    pub granularity: Option<String>,
    pub profile_file: Option<PathBuf>,
    pub channel_file: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl SweepOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML file; relative paths inside it resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut o = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut o.profile_file, &mut o.channel_file]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(o)
    }
}

/// Parses a comma-separated list of system names.
pub fn parse_systems(list: &[String]) -> Result<Vec<SystemKind>> {
    let mut out = Vec::new();
    for item in list.iter().flat_map(|s| s.split(',')).map(str::trim) {
        if item.is_empty() {
            continue;
        }
        let kind: SystemKind = item
            .parse()
            .map_err(|_| Error::Config(format!("unknown system '{item}'")))?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    Ok(out)
}

impl SweepConfig {
    pub fn apply(mut self, o: &SweepOverrides) -> Result<Self> {
        if let Some(s) = &o.systems {
            self.systems = parse_systems(s)?;
        }
        if let Some(r) = &o.snr_db {
            self.snr_db = r.parse()?;
        }
        if let Some(p) = &o.p_t {
            self.p_t = p.clone();
        }
        if let Some(g) = &o.granularity {
            self.granularity = g.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        }
        self.trials = o.trials.unwrap_or(self.trials);
        self.seed = o.seed.unwrap_or(self.seed);
        self.n_fft = o.n_fft.unwrap_or(self.n_fft);
        self.n_f = o.n_f.unwrap_or(self.n_f);
        self.n_t = o.n_t.unwrap_or(self.n_t);
        self.start_subcarrier = o.start_subcarrier.unwrap_or(self.start_subcarrier);
        if o.profile_file.is_some() {
            self.profile_file = o.profile_file.clone();
        }
        if o.channel_file.is_some() {
            self.channel_file = o.channel_file.clone();
        }
        if o.workers.is_some() {
            self.workers = o.workers;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.systems.is_empty() && self.profile_file.is_none() {
            return Err(Error::Config("no systems selected".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.p_t.is_empty() {
            return Err(Error::Config("no BER targets given".into()));
        }
        if let Some(p) = self.p_t.iter().find(|p| !(**p > 0.0 && **p < 0.5)) {
            return Err(Error::Config(format!("BER target {p} is outside (0, 0.5)")));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        SnrRange::new(self.snr_db.start, self.snr_db.step, self.snr_db.stop)?;
        Ok(())
    }
}

/// Systems evaluated per trial. Index 0 is always the fully blind reference.
struct Plan {
    systems: Vec<SystemProfile>,
    reported: Vec<usize>,
    channel: ChannelProfile,
    n_f: usize,
    n_t: usize,
    snr_db: Vec<f64>,
}

fn plan(cfg: &SweepConfig) -> Result<Plan> {
    cfg.validate()?;
    let channel = match &cfg.channel_file {
        Some(p) => ChannelProfile::load(p)?,
        None => ChannelProfile::tux(),
    };
    let custom = match &cfg.profile_file {
        Some(p) => {
            let (name, grid) = ConstraintGrid::load(p)?;
            Some(SystemProfile {
                name: name.unwrap_or_else(|| "custom".into()),
                grid,
            })
        }
        None => None,
    };
    let (n_f, n_t) = custom
        .as_ref()
        .map_or((cfg.n_f, cfg.n_t), |c| (c.grid.n_f(), c.grid.n_t()));
    if cfg.start_subcarrier + n_f > cfg.n_fft {
        return Err(Error::Config(format!(
            "subcarriers {}..{} exceed FFT size {}",
            cfg.start_subcarrier,
            cfg.start_subcarrier + n_f,
            cfg.n_fft
        )));
    }

    let mut systems = vec![build_profile(SystemKind::Fb, n_f, n_t)?];
    let mut reported = Vec::new();
    for &kind in &cfg.systems {
        if kind == SystemKind::Fb {
            reported.push(0);
        } else {
            reported.push(systems.len());
            systems.push(build_profile(kind, n_f, n_t)?);
        }
    }
    if let Some(c) = custom {
        if systems.iter().any(|s| s.name == c.name) {
            return Err(Error::Config(format!(
                "profile name '{}' clashes with a built-in system",
                c.name
            )));
        }
        reported.push(systems.len());
        systems.push(c);
    }
    Ok(Plan {
        systems,
        reported,
        channel,
        n_f,
        n_t,
        snr_db: cfg.snr_db.points(),
    })
}

/// Bits per trial, indexed `[p_t][snr][system]`, flattened.
fn run_trial(cfg: &SweepConfig, plan: &Plan, trial: usize) -> Result<Vec<u32>> {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let real = draw_realization(
        &plan.channel,
        cfg.n_fft,
        plan.n_f,
        plan.n_t,
        cfg.start_subcarrier,
        &mut rng,
    )?;
    let (n_snr, n_sys) = (plan.snr_db.len(), plan.systems.len());
    let mut bits = vec![0u32; cfg.p_t.len() * n_snr * n_sys];
    for (si, &db) in plan.snr_db.iter().enumerate() {
        let table = BerTable::new(&snr_grid(&real, noise_var_for_db(db))?);
        for (pi, &p_t) in cfg.p_t.iter().enumerate() {
            for (yi, sys) in plan.systems.iter().enumerate() {
                let alloc = allocate_with_table(&table, &sys.grid, p_t, cfg.granularity)?;
                bits[(pi * n_snr + si) * n_sys + yi] = alloc.total_bits;
            }
        }
    }
    Ok(bits)
}

fn run_trials(cfg: &SweepConfig, plan: &Plan) -> Result<Vec<Vec<u32>>> {
    use rayon::prelude::*;
    let work = || -> Result<Vec<Vec<u32>>> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, plan, t))
            .collect()
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Runs the sweep. Rows are ordered by BER target, then system (in the
/// requested order, a profile-file system last), then SNR.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let plan = plan(cfg)?;
    let per_trial = run_trials(cfg, &plan)?;
    let (n_snr, n_sys) = (plan.snr_db.len(), plan.systems.len());
    let positions = (plan.n_f * plan.n_t) as f64;
    let mut rows = Vec::new();
    for (pi, &p_t) in cfg.p_t.iter().enumerate() {
        for &yi in &plan.reported {
            for (si, &snr_db) in plan.snr_db.iter().enumerate() {
                let cell = |y: usize| (pi * n_snr + si) * n_sys + y;
                let values: Vec<f64> = per_trial
                    .iter()
                    .map(|b| b[cell(yi)] as f64 / positions)
                    .collect();
                let (mean, ci95) = match aggregate(&values) {
                    Ok(s) => (s.mean, s.ci95),
                    Err(_) => (values[0], f64::NAN),
                };
                let sys_bits: u64 = per_trial.iter().map(|b| b[cell(yi)] as u64).sum();
                let ref_bits: u64 = per_trial.iter().map(|b| b[cell(0)] as u64).sum();
                rows.push(SweepPoint {
                    system: plan.systems[yi].name.clone(),
                    snr_db,
                    p_t,
                    trials: cfg.trials,
                    mean_bits_per_subcarrier: mean,
                    ci95_half_width: ci95,
                    eta_r: eta_r(sys_bits, ref_bits).unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(rows)
}

/// `%g`-style formatting with six significant digits.
pub fn format_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(rows: &[SweepPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.system,
            format_g6(r.snr_db),
            format_g6(r.p_t),
            r.trials,
            format_g6(r.mean_bits_per_subcarrier),
            format_g6(r.ci95_half_width),
            format_g6(r.eta_r),
        );
    }
    out
}

/// Wide table with one line per SNR and, per (system, BER target), columns
/// for throughput, its interval half-width and relative efficiency.
pub fn to_series(rows: &[SweepPoint]) -> String {
    let mut snrs: Vec<f64> = Vec::new();
    let mut keys: Vec<(String, f64)> = Vec::new();
    for r in rows {
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
        if !keys.iter().any(|(s, p)| *s == r.system && *p == r.p_t) {
            keys.push((r.system.clone(), r.p_t));
        }
    }
    let mut out = String::from("snr_db");
    for (s, p) in &keys {
        let tag = format!("{s}_pt{}", format_g6(*p));
        let _ = write!(out, ",{tag}_bits,{tag}_ci95,{tag}_eta_r");
    }
    out.push('\n');
    for &snr in &snrs {
        out.push_str(&format_g6(snr));
        for (s, p) in &keys {
            match rows
                .iter()
                .find(|r| r.snr_db == snr && r.system == *s && r.p_t == *p)
            {
                Some(r) => {
                    let _ = write!(
                        out,
                        ",{},{},{}",
                        format_g6(r.mean_bits_per_subcarrier),
                        format_g6(r.ci95_half_width),
                        format_g6(r.eta_r)
                    );
                }
                None => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
