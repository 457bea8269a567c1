//! Greedy bit loading of one channel draw for each system, plus a 2x2
//! comparison against exhaustive search.
//!
//! cargo run --example bit_loading -- [snr_db] [p_t] [instance.json]

use ofdm_se::channel::{
    draw_realization, noise_var_for_db, snr_grid, trial_rng, ChannelProfile, SnrGrid,
};
use ofdm_se::loading::{exhaustive_allocate, greedy_allocate, Allocation, Instance};
use ofdm_se::systems::{build_profile, full_set, ConstraintGrid, SystemKind};
use ofdm_se::Grid;

fn print_map(alloc: &Allocation) {
    for k in 0..alloc.schemes.n_f() {
        let row: Vec<String> = (0..alloc.schemes.n_t())
            .map(|l| format!("{:>7}", alloc.schemes.get(k, l).to_string()))
            .collect();
        println!("    {}", row.join(""));
    }
}

fn main() -> ofdm_se::Result<()> {
    let mut args = std::env::args().skip(1);
    let db: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(20.0);
    let p_t: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1e-3);
    let save = args.next();

    let mut rng = trial_rng(7, 0);
    let real = draw_realization(&ChannelProfile::tux(), 128, 12, 7, 0, &mut rng)?;
    let snr = snr_grid(&real, noise_var_for_db(db))?;
    for kind in SystemKind::ALL {
        let profile = build_profile(kind, 12, 7)?;
        let alloc = greedy_allocate(&snr, &profile.grid, p_t)?;
        println!(
            "{kind}: {} bits ({:.3} per subcarrier), average BER {:.3e}",
            alloc.total_bits,
            alloc.total_bits as f64 / 84.0,
            alloc.avg_ber
        );
        print_map(&alloc);
    }

    let small = SnrGrid::new(Grid::from_fn(2, 2, |k, l| snr.gamma(k, l)))?;
    let c = ConstraintGrid::uniform(2, 2, full_set())?;
    let greedy = greedy_allocate(&small, &c, p_t)?;
    let best = exhaustive_allocate(&small, &c, p_t)?;
    println!(
        "\n2x2 corner: greedy {} bits, exhaustive {} bits",
        greedy.total_bits, best.total_bits
    );
    if let Some(path) = save {
        Instance::new(small, c, p_t)?.save(&path)?;
        println!("instance written to {path}");
    }
    Ok(())
}
