//! Spectral-efficiency metrics and Monte Carlo aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loading::Allocation;

/// Fraction of subcarriers that carry data: `1 - n_p / n`.
pub fn spectral_efficiency(n: usize, n_p: usize) -> Result<f64> {
    if n == 0 || n_p > n {
        return Err(Error::Domain(format!(
            "need 0 <= pilots <= subcarriers and subcarriers > 0, got {n_p} of {n}"
        )));
    }
    Ok(1.0 - n_p as f64 / n as f64)
}

/// Relative spectral efficiency: bits of a system over bits of the reference,
/// each summed over the same set of trials.
pub fn eta_r(bits_system: u64, bits_reference: u64) -> Result<f64> {
    if bits_reference == 0 {
        return Err(Error::ZeroReference);
    }
    Ok(bits_system as f64 / bits_reference as f64)
}

pub fn throughput_per_subcarrier(alloc: &Allocation) -> f64 {
    alloc.total_bits as f64 / alloc.positions() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Half-width of the normal-approximation 95% confidence interval.
    pub ci95: f64,
}

impl Summary {
    pub fn lower(&self) -> f64 {
        self.mean - self.ci95
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci95
    }

    /// True when the two 95% intervals are disjoint and `self` lies above.
    pub fn clearly_above(&self, other: &Summary) -> bool {
        self.lower() > other.upper()
    }
}

/// Sample mean and `1.96 * s / sqrt(n)`, reduced in slice order.
pub fn aggregate(values: &[f64]) -> Result<Summary> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Summary {
        mean,
        ci95: 1.96 * var.sqrt() / (n as f64).sqrt(),
    })
}

/// One row of a sweep: a system at one SNR and BER target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub system: String,
    pub snr_db: f64,
    pub p_t: f64,
    pub trials: usize,
    pub mean_bits_per_subcarrier: f64,
    pub ci95_half_width: f64,
    /// Relative to the fully blind system; NaN when the reference carried no
    /// bits at this point.
    pub eta_r: f64,
}

impl SweepPoint {
    pub fn throughput(&self) -> Summary {
        Summary {
            mean: self.mean_bits_per_subcarrier,
            ci95: self.ci95_half_width,
        }
    }
}
