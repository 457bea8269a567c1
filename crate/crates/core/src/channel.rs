//! Quasi-static frequency-selective Rayleigh channel.
//!
//! A tapped-delay-line profile is drawn once per OFDM symbol; the frequency
//! response at the resource-grid subcarriers is the DFT of the tap draw.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

const POWER_SUM_TOLERANCE: f64 = 1e-9;

/// Power-delay profile: tap delays in sample periods and average tap powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelProfile {
    delays: Vec<usize>,
    powers: Vec<f64>,
}

impl ChannelProfile {
    pub fn new(delays: Vec<usize>, powers: Vec<f64>) -> Result<Self> {
        if delays.is_empty() || delays.len() != powers.len() {
            return Err(Error::Config(format!(
                "profile needs equal, non-zero numbers of delays and powers (got {} and {})",
                delays.len(),
                powers.len()
            )));
        }
        if delays[0] != 0 {
            return Err(Error::Config("first tap delay must be 0".into()));
        }
        if delays.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "tap delays must be strictly increasing".into(),
            ));
        }
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Config(format!(
                "tap power {p} is not a non-negative number"
            )));
        }
        let total: f64 = powers.iter().sum();
        if (total - 1.0).abs() > POWER_SUM_TOLERANCE {
            return Err(Error::Config(format!(
                "tap powers sum to {total}, expected 1"
            )));
        }
        Ok(Self { delays, powers })
    }

    /// Typical-urban 9-tap profile.
    pub fn tux() -> Self {
        let gains = [2.69, 1.74, 2.89, 1.17, 0.23, 0.58, 0.36, 0.26, 0.08];
        Self {
            delays: (0..9).collect(),
            powers: gains.iter().map(|g| g / 10.0).collect(),
        }
    }

    /// Flat channel: one unit-power tap at delay 0.
    pub fn single_tap() -> Self {
        Self {
            delays: vec![0],
            powers: vec![1.0],
        }
    }

    /// Parses one `delay power` record per line. Blank lines and `#` comments
    /// are ignored; commas may separate the fields.
    pub fn parse(text: &str) -> Result<Self> {
        let mut delays = Vec::new();
        let mut powers = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            if fields.len() != 2 {
                return Err(parse_err(format!(
                    "expected 'delay power', got {} fields",
                    fields.len()
                )));
            }
            let delay: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad delay '{}'", fields[0])))?;
            let power: f64 = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad power '{}'", fields[1])))?;
            if let Some(&prev) = delays.last() {
                if delay <= prev {
                    return Err(parse_err(format!(
                        "delay {delay} does not exceed previous delay {prev}"
                    )));
                }
            }
            delays.push(delay);
            powers.push(power);
        }
        Self::new(delays, powers)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn num_taps(&self) -> usize {
        self.delays.len()
    }

    pub fn max_delay(&self) -> usize {
        *self.delays.last().expect("profile is non-empty")
    }

    /// One independent circularly-symmetric complex Gaussian draw per tap.
    pub fn draw_taps<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        self.powers
            .iter()
            .map(|&p| {
                let scale = (p / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(scale * re, scale * im)
            })
            .collect()
    }

    /// `H_k = sum_l taps[l] exp(-j 2 pi k delay[l] / n_fft)`.
    pub fn freq_response(&self, taps: &[Complex64], n_fft: usize, k: usize) -> Result<Complex64> {
        self.check_fft(n_fft)?;
        if k >= n_fft {
            return Err(Error::Config(format!(
                "subcarrier {k} outside {n_fft}-point DFT"
            )));
        }
        if taps.len() != self.num_taps() {
            return Err(Error::Config(format!(
                "{} taps supplied for a {}-tap profile",
                taps.len(),
                self.num_taps()
            )));
        }
        Ok(taps
            .iter()
            .zip(&self.delays)
            .map(|(h, &d)| h * twiddle(k * d, n_fft))
            .sum())
    }

    fn check_fft(&self, n_fft: usize) -> Result<()> {
        if n_fft <= self.max_delay() {
            return Err(Error::Config(format!(
                "FFT size {n_fft} must exceed the maximum tap delay {}",
                self.max_delay()
            )));
        }
        Ok(())
    }
}

fn twiddle(kd: usize, n_fft: usize) -> Complex64 {
    let phase = -2.0 * PI * (kd % n_fft) as f64 / n_fft as f64;
    Complex64::from_polar(1.0, phase)
}

/// Typical-urban profile.
pub fn tux_profile() -> ChannelProfile {
    ChannelProfile::tux()
}

/// Random stream for Monte Carlo trial `index` under `seed`.
///
/// Each trial owns a distinct ChaCha stream, so results do not depend on the
/// order or thread in which trials run.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Channel gains over an `n_f x n_t` resource grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Grid<Complex64>,
    pub n_fft: usize,
    pub start_subcarrier: usize,
}

/// Draws one independent tap set per OFDM symbol and evaluates it at bins
/// `k0 .. k0 + n_f`.
pub fn draw_realization<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    n_fft: usize,
    n_f: usize,
    n_t: usize,
    k0: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    profile.check_fft(n_fft)?;
    if k0 + n_f > n_fft {
        return Err(Error::Config(format!(
            "grid bins {k0}..{} exceed the {n_fft}-point DFT",
            k0 + n_f
        )));
    }
    let twiddles: Vec<Vec<Complex64>> = (k0..k0 + n_f)
        .map(|k| {
            profile
                .delays
                .iter()
                .map(|&d| twiddle(k * d, n_fft))
                .collect()
        })
        .collect();
    let mut cells = Vec::with_capacity(n_f * n_t);
    for _ in 0..n_t {
        let taps = profile.draw_taps(rng);
        for tw in &twiddles {
            cells.push(taps.iter().zip(tw).map(|(h, w)| h * w).sum());
        }
    }
    Ok(ChannelRealization {
        gains: Grid::from_cells(n_f, n_t, cells).expect("cell count matches"),
        n_fft,
        start_subcarrier: k0,
    })
}

/// Linear instantaneous SNR per grid position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Grid<f64>", into = "Grid<f64>")]
pub struct SnrGrid(Grid<f64>);

impl SnrGrid {
    pub fn new(gamma: Grid<f64>) -> Result<Self> {
        if let Some(g) = gamma.iter().find(|g| g.is_nan() || **g < 0.0) {
            return Err(Error::Domain(format!("SNR {g} is not non-negative")));
        }
        Ok(Self(gamma))
    }

    pub fn uniform(n_f: usize, n_t: usize, gamma: f64) -> Result<Self> {
        Self::new(Grid::filled(n_f, n_t, gamma))
    }

    pub fn gamma(&self, k: usize, l: usize) -> f64 {
        *self.0.get(k, l)
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.0
    }

    pub fn n_f(&self) -> usize {
        self.0.n_f()
    }

    pub fn n_t(&self) -> usize {
        self.0.n_t()
    }
}

impl TryFrom<Grid<f64>> for SnrGrid {
    type Error = Error;

    fn try_from(g: Grid<f64>) -> Result<Self> {
        Self::new(g)
    }
}

impl From<SnrGrid> for Grid<f64> {
    fn from(s: SnrGrid) -> Self {
        s.0
    }
}

/// `gamma = |H|^2 / noise_var` for unit symbol energy.
pub fn snr_grid(real: &ChannelRealization, noise_var: f64) -> Result<SnrGrid> {
    if noise_var.is_nan() || noise_var <= 0.0 || noise_var.is_infinite() {
        return Err(Error::Domain(format!(
            "noise variance must be positive, got {noise_var}"
        )));
    }
    SnrGrid::new(real.gains.map(|h| h.norm_sqr() / noise_var))
}

/// Noise variance giving a mean SNR of `snr_db` on a unit-power channel.
pub fn noise_var_for_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn tux_matches_published_taps() {
        let p = tux_profile();
        assert_eq!(p.num_taps(), 9);
        assert_eq!(p.delays(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
        let sum: f64 = p.powers().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let expect = [
            0.269, 0.174, 0.289, 0.117, 0.023, 0.058, 0.036, 0.026, 0.008,
        ];
        for (got, want) in p.powers().iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
        // the constructor's invariants hold for the built-in profile
        ChannelProfile::new(p.delays().to_vec(), p.powers().to_vec()).unwrap();
    }

    #[test]
    fn profile_validation() {
        assert!(ChannelProfile::new(vec![1, 2], vec![0.5, 0.5]).is_err());
        assert!(ChannelProfile::new(vec![0, 0], vec![0.5, 0.5]).is_err());
        assert!(ChannelProfile::new(vec![0, 2], vec![0.5, 0.6]).is_err());
        assert!(ChannelProfile::new(vec![0, 2], vec![1.5, -0.5]).is_err());
        assert!(ChannelProfile::new(vec![0], vec![]).is_err());
        assert!(ChannelProfile::new(vec![0, 3], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn parse_profile_file() {
        let text = "# delay power\n0 0.5\n\n2, 0.25 # late\n5 0.25\n";
        let p = ChannelProfile::parse(text).unwrap();
        assert_eq!(p.delays(), &[0, 2, 5]);
        let err = ChannelProfile::parse("0 0.5\n0 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = ChannelProfile::parse("0 0.5\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = ChannelProfile::parse("0 0.5 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(matches!(
            ChannelProfile::parse("0 0.7\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn flat_channel_response() {
        let p = ChannelProfile::single_tap();
        let taps = [Complex64::new(1.0, 0.0)];
        for k in 0..16 {
            let h = p.freq_response(&taps, 16, k).unwrap();
            assert!((h - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_tap_null() {
        let n = 64;
        let p = ChannelProfile::new(vec![0, n / 2], vec![0.5, 0.5]).unwrap();
        let taps = [Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
        for k in (1..n).step_by(2) {
            assert!(p.freq_response(&taps, n, k).unwrap().norm() < 1e-12);
        }
        assert!((p.freq_response(&taps, n, 0).unwrap().norm() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fft_size_must_cover_delay_spread() {
        let p = tux_profile();
        let taps = p.draw_taps(&mut trial_rng(1, 0));
        assert!(matches!(
            p.freq_response(&taps, 8, 0),
            Err(Error::Config(_))
        ));
        assert!(p.freq_response(&taps, 9, 0).is_ok());
        assert!(p.freq_response(&taps, 9, 9).is_err());
        assert!(draw_realization(&p, 8, 4, 1, 0, &mut trial_rng(1, 0)).is_err());
        assert!(draw_realization(&p, 128, 12, 7, 120, &mut trial_rng(1, 0)).is_err());
    }

    #[test]
    fn tap_statistics() {
        let p = tux_profile();
        let mut rng = trial_rng(7, 0);
        let n = 100_000;
        let mut power = vec![0.0; p.num_taps()];
        let mut mean = vec![Complex64::new(0.0, 0.0); p.num_taps()];
        for _ in 0..n {
            for (l, h) in p.draw_taps(&mut rng).into_iter().enumerate() {
                power[l] += h.norm_sqr();
                mean[l] += h;
            }
        }
        for l in 0..p.num_taps() {
            let expect = p.powers()[l];
            let got = power[l] / n as f64;
            assert!(
                (got - expect).abs() <= 0.03 * expect,
                "tap {l}: {got} vs {expect}"
            );
            // each component of the sample mean has std sqrt(p / 2n)
            let sigma = (expect / 2.0 / n as f64).sqrt();
            let m = mean[l] / n as f64;
            assert!(
                m.re.abs() < 3.0 * sigma && m.im.abs() < 3.0 * sigma,
                "tap {l}: {m}"
            );
        }
        let flat = ChannelProfile::single_tap();
        let mean_power: f64 = (0..n)
            .map(|_| flat.draw_taps(&mut rng)[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean_power - 1.0).abs() < 0.02);
    }

    #[test]
    fn realization_is_deterministic_per_stream() {
        let p = tux_profile();
        let a = draw_realization(&p, 128, 12, 7, 0, &mut trial_rng(42, 3)).unwrap();
        let b = draw_realization(&p, 128, 12, 7, 0, &mut trial_rng(42, 3)).unwrap();
        let c = draw_realization(&p, 128, 12, 7, 0, &mut trial_rng(42, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn realization_columns_match_freq_response() {
        let p = tux_profile();
        let mut rng = trial_rng(5, 0);
        let real = draw_realization(&p, 128, 12, 2, 10, &mut rng).unwrap();
        let mut rng = trial_rng(5, 0);
        for l in 0..2 {
            let taps = p.draw_taps(&mut rng);
            for k in 0..12 {
                let h = p.freq_response(&taps, 128, 10 + k).unwrap();
                assert!((h - real.gains.get(k, l)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_tap_columns_are_flat() {
        let p = ChannelProfile::single_tap();
        let real = draw_realization(&p, 128, 12, 7, 0, &mut trial_rng(9, 0)).unwrap();
        for l in 0..7 {
            let h0 = *real.gains.get(0, l);
            for k in 0..12 {
                assert_eq!(*real.gains.get(k, l), h0);
            }
        }
        let snr = snr_grid(&real, 0.1).unwrap();
        for l in 0..7 {
            assert!((0..12).all(|k| snr.gamma(k, l) == snr.gamma(0, l)));
        }
    }

    #[test]
    fn snr_examples() {
        let mk = |h: Complex64| ChannelRealization {
            gains: Grid::filled(1, 1, h),
            n_fft: 16,
            start_subcarrier: 0,
        };
        assert_eq!(
            snr_grid(&mk(Complex64::new(1.0, 0.0)), 1.0)
                .unwrap()
                .gamma(0, 0),
            1.0
        );
        let g = snr_grid(&mk(Complex64::new(1.0, 1.0)), 0.5)
            .unwrap()
            .gamma(0, 0);
        assert!((g - 4.0).abs() < 1e-15);
        assert!(snr_grid(&mk(Complex64::new(1.0, 0.0)), 0.0).is_err());
        assert!(snr_grid(&mk(Complex64::new(1.0, 0.0)), -1.0).is_err());
        assert!(SnrGrid::uniform(2, 2, -0.1).is_err());
        assert!((noise_var_for_db(20.0) - 0.01).abs() < 1e-15);
    }
}
