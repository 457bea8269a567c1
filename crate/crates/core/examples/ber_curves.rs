//! BER of every catalog scheme over SNR, and the SNR each needs for a target.
//!
//! cargo run --example ber_curves -- [target_ber]

use ofdm_se::modulation::active_schemes;

fn main() -> ofdm_se::Result<()> {
    let target: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1e-3);
    let db_points: Vec<f64> = (0..=15).map(|i| 2.0 * i as f64).collect();

    print!("{:>6}", "dB");
    for s in active_schemes() {
        print!("{:>10}", s.to_string());
    }
    println!();
    for &db in &db_points {
        let gamma = 10f64.powf(db / 10.0);
        print!("{db:>6.0}");
        for s in active_schemes() {
            print!("{:>10.2e}", s.ber(gamma)?);
        }
        println!();
    }

    println!("\nSNR needed for BER {target:e}:");
    for s in active_schemes() {
        let g = s.min_snr_for(target)?;
        println!(
            "  {:<6} {} bits  {:>6.2} dB",
            s.to_string(),
            s.bits(),
            10.0 * g.log10()
        );
    }
    Ok(())
}
