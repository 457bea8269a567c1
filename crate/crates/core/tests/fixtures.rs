use std::path::PathBuf;

use ofdm_se::channel::ChannelProfile;
use ofdm_se::loading::{exhaustive_allocate, greedy_allocate, Instance};
use ofdm_se::sweep::{run_sweep, SweepConfig, SweepOverrides};
use ofdm_se::systems::{ConstraintGrid, Role};
use ofdm_se::ModulationScheme;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[test]
fn strong_and_dead_positions() {
    let inst = Instance::load(fixture("strong_and_dead.json")).unwrap();
    let qam64: ModulationScheme = "QAM64".parse().unwrap();
    for alloc in [
        greedy_allocate(&inst.snr, &inst.constraints, inst.p_t).unwrap(),
        exhaustive_allocate(&inst.snr, &inst.constraints, inst.p_t).unwrap(),
    ] {
        assert_eq!(alloc.total_bits, 6);
        assert_eq!(*alloc.schemes.get(0, 0), qam64);
        assert!(alloc.schemes.get(1, 0).is_silent());
    }
}

#[test]
fn corner_instance_regression() {
    let inst = Instance::load(fixture("corner_instance.json")).unwrap();
    let greedy = greedy_allocate(&inst.snr, &inst.constraints, inst.p_t).unwrap();
    let best = exhaustive_allocate(&inst.snr, &inst.constraints, inst.p_t).unwrap();
    assert_eq!(greedy.total_bits, 14);
    assert_eq!(best.total_bits, 14);
    assert!(greedy.avg_ber <= inst.p_t && best.avg_ber <= inst.p_t);
    let again = Instance::from_json(&inst.to_json()).unwrap();
    assert_eq!(again, inst);
}

#[test]
fn mixed_profile_file() {
    let (name, grid) = ConstraintGrid::load(fixture("mixed_4x4.profile")).unwrap();
    assert_eq!(name.as_deref(), Some("mixed"));
    assert_eq!((grid.n_f(), grid.n_t()), (4, 4));
    assert_eq!(grid.role(1, 0), Role::AmplitudeData);
    assert_eq!(grid.bearing_positions(), 12);
    // 8 unconstrained x 6 + ASK8 + PSK16 + PSK8 + QAM16
    assert_eq!(grid.saturation_bits(), 48 + 3 + 4 + 3 + 4);
}

#[test]
fn two_ray_channel() {
    let p = ChannelProfile::load(fixture("two_ray.channel")).unwrap();
    assert_eq!(p.delays(), &[0, 3]);
    assert_eq!(p.max_delay(), 3);
}

#[test]
fn sweep_config_file() {
    let o = SweepOverrides::load(fixture("sweep.toml")).unwrap();
    let cfg = SweepConfig::default().apply(&o).unwrap();
    assert_eq!(cfg.trials, 20);
    assert_eq!(cfg.snr_db.points(), vec![10.0, 20.0, 30.0]);
    assert_eq!(run_sweep(&cfg).unwrap().len(), 6);
}

#[test]
fn custom_profile_sweep_saturates() {
    let cfg = SweepConfig {
        systems: vec![],
        snr_db: "80".parse().unwrap(),
        trials: 3,
        profile_file: Some(fixture("mixed_4x4.profile")),
        ..Default::default()
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].system, "mixed");
    assert!((rows[0].mean_bits_per_subcarrier - 62.0 / 16.0).abs() < 1e-12);
    assert!((rows[0].eta_r - 62.0 / 96.0).abs() < 1e-12);
}
