//! Modulation catalog and conditional bit error probabilities.
//!
//! The catalog holds thirteen `(family, order)` pairs. Order 1 is the silent
//! scheme: it carries no bits and has no error probability.
//!
//! All constellations are normalized to unit average symbol energy, so the
//! instantaneous SNR `gamma = |H|^2 / sigma^2` is the only channel parameter.
//! Bit error probabilities are exact for Gray labeling under coherent
//! minimum-distance detection in complex AWGN:
//!
//! * ASK and square QAM reduce to one-dimensional Gray PAM, evaluated from
//!   Gaussian tails at the decision boundaries.
//! * PSK is evaluated from the probability of each decision sector, using the
//!   half-plane tail `Q(sqrt(2c))/2` plus an Owen's T correction integrated by
//!   Gauss-Legendre quadrature.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModulationFamily {
    Ask,
    Psk,
    Qam,
}

impl ModulationFamily {
    pub const ALL: [ModulationFamily; 3] = [Self::Ask, Self::Psk, Self::Qam];

    /// Modulation-type index `n`: ASK = 1, PSK = 2, QAM = 3.
    pub fn index(self) -> u8 {
        match self {
            Self::Ask => 1,
            Self::Psk => 2,
            Self::Qam => 3,
        }
    }

    /// Orders available in the catalog, ascending, including the silent order 1.
    pub fn orders(self) -> &'static [u32] {
        match self {
            Self::Ask => &[1, 2, 4, 8],
            Self::Psk => &[1, 2, 4, 8, 16],
            Self::Qam => &[1, 4, 16, 64],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ask => "ASK",
            Self::Psk => "PSK",
            Self::Qam => "QAM",
        }
    }
}

impl fmt::Display for ModulationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ASK" => Ok(Self::Ask),
            "PSK" => Ok(Self::Psk),
            "QAM" => Ok(Self::Qam),
            _ => Err(Error::Domain(format!("unknown modulation family '{s}'"))),
        }
    }
}

/// A catalog entry. Construction validates membership, so every value of this
/// type is a legal `(family, order)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ModulationScheme {
    family: ModulationFamily,
    order: u32,
}

const fn scheme(family: ModulationFamily, order: u32) -> ModulationScheme {
    ModulationScheme { family, order }
}

/// The full catalog in `(family, order)` order.
pub const CATALOG: [ModulationScheme; 13] = [
    scheme(ModulationFamily::Ask, 1),
    scheme(ModulationFamily::Ask, 2),
    scheme(ModulationFamily::Ask, 4),
    scheme(ModulationFamily::Ask, 8),
    scheme(ModulationFamily::Psk, 1),
    scheme(ModulationFamily::Psk, 2),
    scheme(ModulationFamily::Psk, 4),
    scheme(ModulationFamily::Psk, 8),
    scheme(ModulationFamily::Psk, 16),
    scheme(ModulationFamily::Qam, 1),
    scheme(ModulationFamily::Qam, 4),
    scheme(ModulationFamily::Qam, 16),
    scheme(ModulationFamily::Qam, 64),
];

pub fn catalog() -> &'static [ModulationScheme] {
    &CATALOG
}

/// Catalog entries that carry at least one bit.
pub fn active_schemes() -> impl Iterator<Item = ModulationScheme> {
    CATALOG.iter().copied().filter(|s| !s.is_silent())
}

impl ModulationScheme {
    pub fn new(family: ModulationFamily, order: u32) -> Result<Self> {
        if family.orders().contains(&order) {
            Ok(scheme(family, order))
        } else {
            Err(Error::NotInCatalog {
                family: family.name().to_string(),
                order,
            })
        }
    }

    pub const fn silent(family: ModulationFamily) -> Self {
        scheme(family, 1)
    }

    pub fn family(self) -> ModulationFamily {
        self.family
    }

    pub fn order(self) -> u32 {
        self.order
    }

    pub fn is_silent(self) -> bool {
        self.order == 1
    }

    /// `log2(order)`.
    pub fn bits(self) -> u32 {
        self.order.trailing_zeros()
    }

    /// Position of this scheme in [`CATALOG`].
    pub fn catalog_index(self) -> usize {
        let base = match self.family {
            ModulationFamily::Ask => 0,
            ModulationFamily::Psk => 4,
            ModulationFamily::Qam => 9,
        };
        let offset = self
            .family
            .orders()
            .iter()
            .position(|&o| o == self.order)
            .expect("scheme is in the catalog");
        base + offset
    }

    /// Bit error probability at linear SNR `gamma`.
    pub fn ber(self, gamma: f64) -> Result<f64> {
        if self.is_silent() {
            return Err(Error::SilentScheme(self));
        }
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::Domain(format!(
                "SNR must be non-negative, got {gamma}"
            )));
        }
        Ok(self.ber_unchecked(gamma))
    }

    /// [`ber`](Self::ber) without argument checks. `self` must not be silent
    /// and `gamma` must be non-negative.
    pub(crate) fn ber_unchecked(self, gamma: f64) -> f64 {
        if gamma == f64::INFINITY {
            return 0.0;
        }
        let m = self.order as f64;
        match self.family {
            ModulationFamily::Psk => psk_ber(self.order as usize, gamma),
            ModulationFamily::Qam => {
                // Each axis is a sqrt(M)-PAM carrying half the bits.
                let levels = (self.order as f64).sqrt().round() as usize;
                gray_pam_ber(levels, (3.0 * gamma / (m - 1.0)).sqrt())
            }
            ModulationFamily::Ask => {
                // Unipolar levels {0, d, .., (M-1)d}; d^2 (M-1)(2M-1) / 6 = 1.
                let r = (3.0 * gamma / ((m - 1.0) * (2.0 * m - 1.0))).sqrt();
                gray_pam_ber(self.order as usize, r)
            }
        }
    }

    /// Smallest SNR at which the BER reaches `target_ber`, by bisection.
    ///
    /// The returned value lies on the feasible side: `ber(result) <= target_ber`.
    pub fn min_snr_for(self, target_ber: f64) -> Result<f64> {
        if self.is_silent() {
            return Err(Error::SilentScheme(self));
        }
        if !(target_ber > 0.0 && target_ber < 0.5) {
            return Err(Error::Domain(format!(
                "target BER must lie in (0, 0.5), got {target_ber}"
            )));
        }
        if self.ber_unchecked(0.0) <= target_ber {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while self.ber_unchecked(hi) > target_ber {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Domain(format!(
                    "target BER {target_ber} unreachable for {self}"
                )));
            }
        }
        let mut lo = 0.0;
        for _ in 0..400 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.ber_unchecked(mid) > target_ber {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.order)
    }
}

impl FromStr for ModulationScheme {
    type Err = Error;

    /// Parses `QAM64`, `psk8`, `ASK1`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() < 4 || !s.is_char_boundary(3) {
            return Err(Error::Domain(format!("malformed scheme '{s}'")));
        }
        let (fam, order) = s.split_at(3);
        let family: ModulationFamily = fam.parse()?;
        let order: u32 = order
            .parse()
            .map_err(|_| Error::Domain(format!("malformed order in '{s}'")))?;
        Self::new(family, order)
    }
}

impl TryFrom<String> for ModulationScheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModulationScheme> for String {
    fn from(s: ModulationScheme) -> String {
        s.to_string()
    }
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

pub(crate) fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn hamming(a: usize, b: usize) -> u32 {
    (a ^ b).count_ones()
}

/// Exact BER of Gray-labeled, uniformly spaced `levels`-PAM, where `r` is the
/// half spacing divided by the per-dimension noise standard deviation.
fn gray_pam_ber(levels: usize, r: f64) -> f64 {
    // Boundary-to-point distances are odd multiples of the half spacing.
    let mut tail = [0.0f64; 9];
    for (n, t) in tail.iter_mut().enumerate().take(levels + 1) {
        *t = q_function((2 * n + 1) as f64 * r);
    }
    let mut acc = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            if i == j {
                continue;
            }
            let n = i.abs_diff(j);
            let outer_edge = if j > i { j == levels - 1 } else { j == 0 };
            let p = if outer_edge {
                tail[n - 1]
            } else {
                tail[n - 1] - tail[n]
            };
            acc += hamming(gray(i), gray(j)) as f64 * p;
        }
    }
    let bits = levels.trailing_zeros() as f64;
    acc / (levels as f64 * bits)
}

fn psk_ber(order: usize, gamma: f64) -> f64 {
    match order {
        2 => q_function((2.0 * gamma).sqrt()),
        // Gray QPSK: two antipodal axes, each with half the symbol energy.
        4 => q_function(gamma.sqrt()),
        _ => psk_sector_ber(order, gamma),
    }
}

/// Exact Gray M-PSK BER from decision-sector probabilities.
pub(crate) fn psk_sector_ber(order: usize, gamma: f64) -> f64 {
    let bits = order.trailing_zeros() as f64;
    let half = order / 2;
    let step = PI / order as f64;
    // tails[j] = P(phase error beyond (2j+1) pi / M on one side).
    let tails: Vec<f64> = (0..half)
        .map(|j| phase_tail((2 * j + 1) as f64 * step, gamma))
        .collect();
    let mut acc = 0.0;
    for offset in 1..order {
        let j = offset.min(order - offset);
        let p = if j == half {
            2.0 * tails[half - 1]
        } else {
            tails[j - 1] - tails[j]
        };
        let weight: u32 = (0..order)
            .map(|s| hamming(gray(s), gray((s + offset) % order)))
            .sum();
        acc += weight as f64 / order as f64 * p;
    }
    acc / bits
}

/// Probability that the received phase lies in `(alpha, pi)` when a unit
/// symbol at phase 0 is received at SNR `gamma`, for `0 < alpha < pi`.
fn phase_tail(alpha: f64, gamma: f64) -> f64 {
    let (sin, cos) = alpha.sin_cos();
    let c = gamma * sin * sin;
    let cot = cos / sin;
    let half_plane = 0.25 * libm::erfc(c.sqrt());
    let correction = owen_t_scaled(c, cot.abs());
    if cot >= 0.0 {
        half_plane + correction
    } else {
        half_plane - correction
    }
}

/// Owen's T function `T(sqrt(2c), a)`:
/// `exp(-c) / (2 pi) * integral_0^a exp(-c x^2) / (1 + x^2) dx`.
fn owen_t_scaled(c: f64, a: f64) -> f64 {
    if c > 745.0 || a == 0.0 {
        return 0.0;
    }
    // exp(-c x^2) < exp(-49) past this point.
    let upper = if c > 0.0 { a.min(7.0 / c.sqrt()) } else { a };
    let integral = legendre().integrate(0.0, upper, |x| (-c * x * x).exp() / (1.0 + x * x));
    (-c).exp() / (2.0 * PI) * integral
}

fn legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(32).unwrap()))
}
