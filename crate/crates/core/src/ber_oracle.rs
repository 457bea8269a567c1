//! Monte Carlo bit-error-rate oracle for the closed-form BER models.
//!
//! Constellations are built here from first principles (Gray-labelled points,
//! unit average energy) and detected by brute-force minimum distance, so the
//! estimates share no code with the analytic expressions they check.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::trial_rng;
use crate::error::{Error, Result};
use crate::modulation::{ModulationFamily, ModulationScheme};

pub const MIN_SYMBOLS: u64 = 10_000;
const BATCH: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub scheme: ModulationScheme,
    /// Linear SNR per symbol.
    pub gamma: f64,
    pub n_symbols: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub bit_errors: u64,
    pub bits: u64,
    pub symbols: u64,
    pub ber: f64,
    /// Half-width of the 95% binomial normal-approximation interval.
    pub ci95: f64,
}

impl OracleEstimate {
    fn new(bit_errors: u64, symbols: u64, bits_per_symbol: u32) -> Self {
        let bits = symbols * bits_per_symbol as u64;
        let ber = bit_errors as f64 / bits as f64;
        Self {
            bit_errors,
            bits,
            symbols,
            ber,
            ci95: 1.96 * (ber * (1.0 - ber) / bits as f64).sqrt(),
        }
    }
}

/// Unit-energy constellation; `points[label]` is the symbol for bit label `label`.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub points: Vec<Complex64>,
    pub bits: u32,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

impl Constellation {
    pub fn new(scheme: ModulationScheme) -> Result<Self> {
        if scheme.is_silent() {
            return Err(Error::SilentScheme(scheme));
        }
        let m = scheme.order() as usize;
        let mut points = vec![Complex64::new(0.0, 0.0); m];
        match scheme.family() {
            ModulationFamily::Psk => {
                for s in 0..m {
                    let phi = 2.0 * std::f64::consts::PI * s as f64 / m as f64;
                    points[gray(s)] = Complex64::from_polar(1.0, phi);
                }
            }
            ModulationFamily::Ask => {
                for i in 0..m {
                    points[gray(i)] = Complex64::new(i as f64, 0.0);
                }
            }
            ModulationFamily::Qam => {
                let side = (m as f64).sqrt().round() as usize;
                let half = side.trailing_zeros();
                for i in 0..side {
                    for q in 0..side {
                        let label = (gray(i) << half) | gray(q);
                        points[label] = Complex64::new(
                            2.0 * i as f64 - (side - 1) as f64,
                            2.0 * q as f64 - (side - 1) as f64,
                        );
                    }
                }
            }
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        let scale = energy.sqrt().recip();
        for p in &mut points {
            *p *= scale;
        }
        Ok(Self {
            points,
            bits: scheme.bits(),
        })
    }

    pub fn detect(&self, r: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (r - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }
}

fn check(cfg: &OracleConfig) -> Result<Constellation> {
    if cfg.gamma.is_nan() || cfg.gamma <= 0.0 {
        return Err(Error::Domain(format!(
            "oracle SNR must be positive, got {}",
            cfg.gamma
        )));
    }
    if cfg.n_symbols < MIN_SYMBOLS {
        return Err(Error::Config(format!(
            "need at least {MIN_SYMBOLS} symbols, got {}",
            cfg.n_symbols
        )));
    }
    Constellation::new(cfg.scheme)
}

fn batch_errors(con: &Constellation, sigma: f64, seed: u64, batch: u64, n: u64) -> u64 {
    let mut rng = trial_rng(seed, batch);
    let m = con.points.len();
    let mut errors = 0u64;
    for _ in 0..n {
        let label = rng.random_range(0..m);
        let nr: f64 = rng.sample(StandardNormal);
        let ni: f64 = rng.sample(StandardNormal);
        let r = con.points[label] + Complex64::new(sigma * nr, sigma * ni);
        errors += (con.detect(r) ^ label).count_ones() as u64;
    }
    errors
}

/// Errors over batches `[from, to)` of a run of `total` symbols.
fn errors_in(con: &Constellation, cfg: &OracleConfig, total: u64, from: u64, to: u64) -> u64 {
    // Complex noise with total variance 1/gamma.
    let sigma = (0.5 / cfg.gamma).sqrt();
    (from..to)
        .into_par_iter()
        .map(|b| {
            let n = BATCH.min(total - b * BATCH);
            batch_errors(con, sigma, cfg.seed, b, n)
        })
        .sum()
}

/// Simulates exactly `cfg.n_symbols` uniformly drawn symbols over AWGN.
pub fn simulate_ber(cfg: &OracleConfig) -> Result<OracleEstimate> {
    let con = check(cfg)?;
    let batches = cfg.n_symbols.div_ceil(BATCH);
    let errors = errors_in(&con, cfg, cfg.n_symbols, 0, batches);
    Ok(OracleEstimate::new(errors, cfg.n_symbols, con.bits))
}

/// Simulates at least `cfg.n_symbols`, doubling the run until `min_errors`
/// bit errors are seen or `max_symbols` is reached.
///
/// Each batch has its own stream, so the result depends only on the
/// configuration and not on thread count.
pub fn simulate_until(
    cfg: &OracleConfig,
    min_errors: u64,
    max_symbols: u64,
) -> Result<OracleEstimate> {
    let con = check(cfg)?;
    let mut total = cfg.n_symbols.div_ceil(BATCH) * BATCH;
    let mut errors = errors_in(&con, cfg, total, 0, total / BATCH);
    while errors < min_errors && total < max_symbols {
        let next = (total * 2)
            .min(max_symbols.div_ceil(BATCH) * BATCH)
            .max(total + BATCH);
        errors += errors_in(&con, cfg, next, total / BATCH, next / BATCH);
        total = next;
    }
    Ok(OracleEstimate::new(errors, total, con.bits))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig {
    /// Minimum symbols per point.
    pub n_symbols: u64,
    /// Maximum relative error between analytic and simulated BER.
    pub tolerance: f64,
    pub seed: u64,
    /// Operating points per scheme, log-spaced in BER.
    pub points: usize,
    pub ber_high: f64,
    pub ber_low: f64,
    /// Bit errors sought per point before the run stops growing.
    pub min_errors: u64,
    /// Cap on symbols per point as a multiple of `n_symbols`.
    pub max_factor: u64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            n_symbols: 1_000_000,
            tolerance: 0.10,
            seed: 1,
            points: 8,
            ber_high: 0.4,
            ber_low: 1e-4,
            min_errors: 1600,
            max_factor: 64,
        }
    }
}

impl GateConfig {
    fn validate(&self) -> Result<()> {
        if self.n_symbols < MIN_SYMBOLS {
            return Err(Error::Config(format!(
                "need at least {MIN_SYMBOLS} symbols, got {}",
                self.n_symbols
            )));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::Config(format!("bad tolerance {}", self.tolerance)));
        }
        if self.points < 2 || self.max_factor < 1 {
            return Err(Error::Config(
                "need at least two points and max_factor >= 1".into(),
            ));
        }
        if !(0.0 < self.ber_low && self.ber_low < self.ber_high && self.ber_high < 0.5) {
            return Err(Error::Config(format!(
                "BER range must satisfy 0 < {} < {} < 0.5",
                self.ber_low, self.ber_high
            )));
        }
        Ok(())
    }

    /// BER targets from `ber_high` down to `ber_low`, log-spaced.
    pub fn targets(&self) -> Vec<f64> {
        let (hi, lo) = (self.ber_high.ln(), self.ber_low.ln());
        (0..self.points)
            .map(|i| (hi + (lo - hi) * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationRow {
    pub scheme: ModulationScheme,
    pub gamma: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub ci95: f64,
    pub symbols: u64,
    pub rel_error: f64,
    pub pass: bool,
}

pub fn validate_point(
    scheme: ModulationScheme,
    gamma: f64,
    stream: u64,
    cfg: &GateConfig,
) -> Result<ValidationRow> {
    let analytic = scheme.ber(gamma)?;
    let oc = OracleConfig {
        scheme,
        gamma,
        n_symbols: cfg.n_symbols,
        seed: cfg.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15),
    };
    let est = simulate_until(
        &oc,
        cfg.min_errors,
        cfg.n_symbols.saturating_mul(cfg.max_factor),
    )?;
    let rel_error = (est.ber - analytic).abs() / analytic;
    Ok(ValidationRow {
        scheme,
        gamma,
        analytic,
        empirical: est.ber,
        ci95: est.ci95,
        symbols: est.symbols,
        rel_error,
        pass: rel_error <= cfg.tolerance,
    })
}

/// Checks every non-silent catalog scheme at `cfg.points` operating points.
pub fn run_gate(cfg: &GateConfig) -> Result<Vec<ValidationRow>> {
    cfg.validate()?;
    let targets = cfg.targets();
    let mut rows = Vec::new();
    for (si, scheme) in crate::modulation::active_schemes().enumerate() {
        for (ti, &target) in targets.iter().enumerate() {
            let gamma = scheme.min_snr_for(target)?;
            let stream = (si * targets.len() + ti) as u64 + 1;
            rows.push(validate_point(scheme, gamma, stream, cfg)?);
        }
    }
    Ok(rows)
}
