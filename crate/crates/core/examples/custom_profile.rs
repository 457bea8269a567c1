//! Loads a constraint map from a profile file and allocates bits on it.
//!
//! cargo run --example custom_profile -- [profile_file] [snr_db]

use ofdm_se::channel::{draw_realization, noise_var_for_db, snr_grid, trial_rng, ChannelProfile};
use ofdm_se::loading::greedy_allocate;
use ofdm_se::systems::{build_profile, ConstraintGrid, SystemKind};

fn main() -> ofdm_se::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mixed_4x4.profile").into()
    });
    let db: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(30.0);

    let (name, grid) = ConstraintGrid::load(&path)?;
    let name = name.unwrap_or_else(|| "custom".into());
    println!(
        "{name}: {}x{} grid, {} data positions, ceiling {} bits",
        grid.n_f(),
        grid.n_t(),
        grid.bearing_positions(),
        grid.saturation_bits()
    );
    for k in 0..grid.n_f() {
        let row: Vec<String> = (0..grid.n_t())
            .map(|l| {
                let top = grid.allowed(k, l).iter().max_by_key(|s| s.bits()).unwrap();
                format!("{:>9}", format!("{:?}:{top}", grid.role(k, l)))
            })
            .collect();
        println!("  {}", row.join(" "));
    }

    for kind in SystemKind::ALL {
        let built = build_profile(kind, 12, 7)?;
        println!(
            "{kind} ceiling on 12x7: {} bits",
            built.grid.saturation_bits()
        );
    }

    let mut rng = trial_rng(3, 0);
    let real = draw_realization(
        &ChannelProfile::tux(),
        128,
        grid.n_f(),
        grid.n_t(),
        0,
        &mut rng,
    )?;
    let alloc = greedy_allocate(&snr_grid(&real, noise_var_for_db(db))?, &grid, 1e-3)?;
    println!(
        "\nat {db} dB: {} bits, average BER {:.3e}",
        alloc.total_bits, alloc.avg_ber
    );
    for k in 0..grid.n_f() {
        let row: Vec<String> = (0..grid.n_t())
            .map(|l| format!("{:>7}", alloc.schemes.get(k, l).to_string()))
            .collect();
        println!("  {}", row.join(""));
    }
    Ok(())
}
