//! Closed-form BER against Monte Carlo detection on explicit constellations.
//!
//! cargo run --release --example validate_ber -- [symbols]

use ofdm_se::ber_oracle::{run_gate, GateConfig};

fn main() -> ofdm_se::Result<()> {
    let n_symbols = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1_000_000);
    let cfg = GateConfig {
        n_symbols,
        ..Default::default()
    };
    let rows = run_gate(&cfg)?;
    println!(
        "{:<7}{:>10}{:>12}{:>12}{:>10}{:>8}",
        "scheme", "SNR dB", "analytic", "empirical", "rel.err", ""
    );
    for r in &rows {
        println!(
            "{:<7}{:>10.2}{:>12.3e}{:>12.3e}{:>10.4}{:>8}",
            r.scheme.to_string(),
            10.0 * r.gamma.log10(),
            r.analytic,
            r.empirical,
            r.rel_error,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    println!("worst relative error {worst:.4}");
    Ok(())
}
