//! Average throughput per subcarrier of FB, CM, LTE and M-LTE over SNR.
//!
//! cargo run --release --example throughput_vs_snr -- [trials]

use ofdm_se::sweep::{run_sweep, SweepConfig};

fn main() -> ofdm_se::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(200);
    let cfg = SweepConfig {
        trials,
        ..Default::default()
    };
    let rows = run_sweep(&cfg)?;

    let systems: Vec<String> = cfg.systems.iter().map(|s| s.to_string()).collect();
    print!("{:>6}", "dB");
    for s in &systems {
        print!("{:>18}", s);
    }
    println!();
    for snr in cfg.snr_db.points() {
        print!("{snr:>6.0}");
        for s in &systems {
            let r = rows
                .iter()
                .find(|r| r.system == *s && r.snr_db == snr)
                .unwrap();
            print!(
                "{:>10.3} ± {:<5.3}",
                r.mean_bits_per_subcarrier, r.ci95_half_width
            );
        }
        println!();
    }
    Ok(())
}
