//! TUx channel draws: per-subcarrier mean power and one resource-block snapshot.
//!
//! cargo run --example channel_draws -- [draws] [channel_file]

use ofdm_se::channel::{draw_realization, trial_rng, ChannelProfile};

fn main() -> ofdm_se::Result<()> {
    let mut args = std::env::args().skip(1);
    let draws: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let profile = match args.next() {
        Some(path) => ChannelProfile::load(path)?,
        None => ChannelProfile::tux(),
    };
    let (n_fft, n_f, n_t) = (128, 12, 7);

    println!("taps (delay, power):");
    for (d, p) in profile.delays().iter().zip(profile.powers()) {
        println!("  {d:>2}  {p:.3}");
    }

    let mut rng = trial_rng(1, 0);
    let mut power = vec![0.0; n_f];
    for _ in 0..draws {
        let taps = profile.draw_taps(&mut rng);
        for (k, acc) in power.iter_mut().enumerate() {
            *acc += profile.freq_response(&taps, n_fft, k)?.norm_sqr();
        }
    }
    println!("\nmean |H_k|^2 over {draws} draws:");
    for (k, p) in power.iter().enumerate() {
        println!("  k={k:>2}  {:.4}", p / draws as f64);
    }

    let real = draw_realization(&profile, n_fft, n_f, n_t, 0, &mut rng)?;
    println!("\n|H|^2 in dB for one {n_f}x{n_t} block (rows k, columns l):");
    for k in 0..n_f {
        let row: Vec<String> = (0..n_t)
            .map(|l| format!("{:>6.1}", 10.0 * real.gains.get(k, l).norm_sqr().log10()))
            .collect();
        println!("  {}", row.join(""));
    }
    Ok(())
}
