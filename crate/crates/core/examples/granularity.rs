//! Per-subcarrier against whole-block modulation choice.
//!
//! cargo run --release --example granularity -- [trials]

use ofdm_se::loading::Granularity;
use ofdm_se::sweep::{run_sweep, SnrRange, SweepConfig};
use ofdm_se::systems::SystemKind;

fn main() -> ofdm_se::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(100);
    let base = SweepConfig {
        systems: vec![SystemKind::Fb, SystemKind::Lte],
        snr_db: SnrRange::new(0.0, 5.0, 40.0)?,
        trials,
        ..Default::default()
    };
    let fine = run_sweep(&base)?;
    let coarse = run_sweep(&SweepConfig {
        granularity: Granularity::Block,
        ..base.clone()
    })?;
    println!(
        "{:>6}{:>8}{:>12}{:>10}",
        "dB", "system", "subcarrier", "block"
    );
    for (a, b) in fine.iter().zip(&coarse) {
        println!(
            "{:>6.0}{:>8}{:>12.3}{:>10.3}",
            a.snr_db, a.system, a.mean_bits_per_subcarrier, b.mean_bits_per_subcarrier
        );
    }
    Ok(())
}
