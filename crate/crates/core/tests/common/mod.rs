#![allow(dead_code)]

use ofdm_se::channel::{
    draw_realization, noise_var_for_db, snr_grid, trial_rng, ChannelProfile, SnrGrid,
};
use ofdm_se::loading::{exhaustive_allocate, feasible_upgrade, greedy_allocate, is_feasible};
use ofdm_se::systems::{full_set, ConstraintGrid, Role};
use ofdm_se::{catalog, Grid, ModulationFamily, ModulationScheme};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const ORACLE_SEED: u64 = 20_240_611;

/// A random 2x2 loading problem: TUx gains at a random mean SNR, a BER
/// target from {1e-2, 1e-3}, and either the full catalog or random subsets.
pub fn oracle_instance(index: u64) -> (SnrGrid, ConstraintGrid, f64) {
    let mut rng = trial_rng(ORACLE_SEED, index);
    let real = draw_realization(&ChannelProfile::tux(), 128, 2, 2, 0, &mut rng).unwrap();
    let db = rng.random_range(0.0..40.0);
    let snr = snr_grid(&real, noise_var_for_db(db)).unwrap();
    let p_t = *[1e-2, 1e-3].choose(&mut rng).unwrap();
    let constraints = if index.is_multiple_of(2) {
        ConstraintGrid::uniform(2, 2, full_set()).unwrap()
    } else {
        let allowed = Grid::from_fn(2, 2, |_, _| {
            let mut set = vec![ModulationScheme::silent(ModulationFamily::Psk)];
            set.extend(
                catalog()
                    .iter()
                    .copied()
                    .filter(|s| !s.is_silent() && rng.random_bool(0.5)),
            );
            set
        });
        ConstraintGrid::new(allowed, Grid::filled(2, 2, Role::Data)).unwrap()
    };
    (snr, constraints, p_t)
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOutcome {
    pub feasible: bool,
    pub locally_maximal: bool,
    pub greedy_bits: u32,
    pub optimal_bits: u32,
}

impl OracleOutcome {
    pub fn ok(&self) -> bool {
        self.feasible && self.locally_maximal && self.greedy_bits <= self.optimal_bits
    }

    pub fn gap(&self) -> f64 {
        if self.optimal_bits == 0 {
            0.0
        } else {
            (self.optimal_bits - self.greedy_bits.min(self.optimal_bits)) as f64
                / self.optimal_bits as f64
        }
    }
}

pub fn oracle_outcome(index: u64) -> OracleOutcome {
    let (snr, c, p_t) = oracle_instance(index);
    let greedy = greedy_allocate(&snr, &c, p_t).unwrap();
    let best = exhaustive_allocate(&snr, &c, p_t).unwrap();
    OracleOutcome {
        feasible: is_feasible(&greedy.schemes, &snr, &c, p_t),
        locally_maximal: feasible_upgrade(&greedy.schemes, &snr, &c, p_t).is_none(),
        greedy_bits: greedy.total_bits,
        optimal_bits: best.total_bits,
    }
}

/// Pearson correlation magnitude of two complex sequences.
pub fn complex_corr(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<num_complex::Complex64>() / n;
    let mb = b.iter().sum::<num_complex::Complex64>() / n;
    let cov: num_complex::Complex64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb).conj())
        .sum();
    let va: f64 = a.iter().map(|x| (x - ma).norm_sqr()).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).norm_sqr()).sum();
    cov.norm() / (va * vb).sqrt()
}
