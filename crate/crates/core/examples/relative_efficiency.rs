//! Relative spectral efficiency against the fully blind system for three
//! BER targets.
//!
//! cargo run --release --example relative_efficiency -- [trials]

use ofdm_se::sweep::{run_sweep, SweepConfig};
use ofdm_se::systems::SystemKind;

fn main() -> ofdm_se::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(200);
    let cfg = SweepConfig {
        systems: vec![SystemKind::Cm, SystemKind::Lte, SystemKind::Mlte],
        p_t: vec![1e-2, 1e-3, 1e-4],
        trials,
        ..Default::default()
    };
    let rows = run_sweep(&cfg)?;
    for &p_t in &cfg.p_t {
        println!("p_t = {p_t:e}");
        println!("{:>6}{:>8}{:>8}{:>8}", "dB", "cm", "lte", "mlte");
        for snr in cfg.snr_db.points() {
            print!("{snr:>6.0}");
            for s in &cfg.systems {
                let r = rows
                    .iter()
                    .find(|r| r.p_t == p_t && r.system == s.name() && r.snr_db == snr)
                    .unwrap();
                print!("{:>8.3}", r.eta_r);
            }
            println!();
        }
        println!();
    }
    Ok(())
}
