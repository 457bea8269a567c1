use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ofdm-se"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn sweep_writes_csv_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let series = dir.path().join("series.csv");
    let o = run(&[
        "sweep",
        "--systems",
        "lte,cm",
        "--snr-db",
        "0:20:40",
        "--pt",
        "1e-3,1e-2",
        "--trials",
        "5",
        "--out",
        out.to_str().unwrap(),
        "--series",
        series.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "system,snr_db,p_t,trials,mean_bits_per_subcarrier,ci95,eta_r"
    );
    assert_eq!(lines.len(), 1 + 2 * 2 * 3);
    assert!(lines[1].starts_with("lte,0,0.001,5,"));
    assert!(lines[7].starts_with("lte,0,0.01,5,"));
    let s = std::fs::read_to_string(&series).unwrap();
    assert_eq!(s.lines().count(), 4);
}

#[test]
fn stdout_is_the_default_destination() {
    let o = run(&[
        "sweep",
        "--systems",
        "fb",
        "--snr-db",
        "10",
        "--trials",
        "2",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().ends_with(",1"));
}

#[test]
fn flags_override_config_file() {
    let o = run(&[
        "sweep",
        "--config",
        &fixture("sweep.toml"),
        "--trials",
        "3",
        "--systems",
        "fb",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows
        .iter()
        .all(|r| r.starts_with("fb,") && r.split(',').nth(3) == Some("3")));
}

#[test]
fn custom_profile_and_channel_files() {
    let o = run(&[
        "sweep",
        "--profile-file",
        &fixture("mixed_4x4.profile"),
        "--channel-file",
        &fixture("two_ray.channel"),
        "--systems",
        "fb,cm",
        "--snr-db",
        "30",
        "--trials",
        "2",
        "--nfft",
        "64",
        "--granularity",
        "block",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\nmixed,30,"));

    // The resource-block pilot pattern does not fit the 4x4 map.
    let o = run(&[
        "sweep",
        "--profile-file",
        &fixture("mixed_4x4.profile"),
        "--systems",
        "lte",
        "--trials",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["sweep", "--snr-db", "0:0:10"],
        vec!["sweep", "--systems", "xyz"],
        vec!["sweep", "--pt", "0.7"],
        vec!["sweep", "--trials", "0"],
        vec!["sweep", "--granularity", "slot"],
        vec!["validate-ber", "--symbols", "9999"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = run(&[
        "sweep",
        "--systems",
        "fb",
        "--snr-db",
        "10",
        "--trials",
        "2",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn missing_profile_file_is_an_io_error() {
    let o = run(&[
        "sweep",
        "--profile-file",
        "/no/such.profile",
        "--trials",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zero_tolerance_gate_fails() {
    let o = run(&["validate-ber", "--symbols", "10000", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("FAIL"));
}
