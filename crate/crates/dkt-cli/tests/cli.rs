//! End-to-end tests of the `dkt` binary: flags, config files, output file
//! formats and the documented subcommand behaviors at desk scale.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dkt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dkt"))
        .args(args)
        .output()
        .expect("failed to run dkt")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dkt_cli_{}_{}", std::process::id(), name));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("missing {}: {}", dir.join(name).display(), e))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

#[test]
fn certify_finds_period_eight() {
    let out = tmp("cert8");
    let r = dkt(&[
        "certify", "--j", "2", "--kr", "j*pi/2", "--ktheta", "0.37", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let cert = json(&out, "certificate.json");
    assert_eq!(cert["period"], 8);
    assert!(cert["residual"].as_f64().unwrap() < 1e-9);
    let meta = json(&out, "run_meta.json");
    assert_eq!(meta["subcommand"], "certify");
    assert_eq!(meta["outputs"][0]["file"], "certificate.json");
}

#[test]
fn certify_reports_absence_with_min_residual() {
    let out = tmp("cert_none");
    let r = dkt(&[
        "certify", "--j", "1.5", "--kr", "j*pi/4", "--ktheta", "0", "--cutoff", "200", "--out",
        out.to_str().unwrap(),
    ]);
    // absence is a result, not an error
    assert!(r.status.success());
    let cert = json(&out, "certificate.json");
    assert!(cert["period"].is_null());
    assert!(cert["residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn certify_parameterizations_are_equivalent() {
    // (k, k') = (pi, pi) is (kr, ktheta) = (pi, 0)
    let out_a = tmp("cert_phys");
    let out_b = tmp("cert_trans");
    let ra = dkt(&["certify", "--j", "2", "--k", "pi", "--kprime", "pi", "--out", out_a.to_str().unwrap()]);
    let rb = dkt(&["certify", "--j", "2", "--kr", "pi", "--ktheta", "0", "--out", out_b.to_str().unwrap()]);
    assert!(ra.status.success() && rb.status.success());
    assert_eq!(read(&out_a, "certificate.json"), read(&out_b, "certificate.json"));
}

#[test]
fn certify_rejects_mixed_parameterizations() {
    let out = tmp("cert_mixed");
    let r = dkt(&[
        "certify", "--j", "2", "--k", "1", "--kprime", "1", "--kr", "1", "--ktheta", "0",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(!r.status.success());
}

#[test]
fn husimi_recurrence_visible_in_files() {
    // j = 6 (desk proxy), k_r = j pi/2: period 8, so the n = 8 field file
    // equals the n = 0 field file within 1e-8 elementwise
    let out = tmp("husimi");
    let r = dkt(&[
        "husimi", "--j", "6", "--kr", "j*pi/2", "--ktheta", "0", "--theta0", "2.25", "--phi0",
        "2.0", "--grid", "40x40", "--steps", "8", "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let parse = |name: &str| -> Vec<(f64, f64, f64)> {
        read(&out, name)
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(',').map(|x| x.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
            })
            .collect()
    };
    let q0 = parse("husimi_n0.csv");
    let q8 = parse("husimi_n8.csv");
    assert_eq!(q0.len(), 40 * 40);
    let mut max_dev = 0.0f64;
    let mut max_val = 0.0f64;
    let mut peak_at = (0.0, 0.0);
    for (a, b) in q0.iter().zip(q8.iter()) {
        assert_eq!((a.0, a.1), (b.0, b.1));
        max_dev = max_dev.max((a.2 - b.2).abs());
        if a.2 > max_val {
            max_val = a.2;
            peak_at = (a.0, a.1);
        }
    }
    assert!(max_dev < 1e-8, "recurrence deviation {}", max_dev);
    // the n = 0 field peaks near the initial point
    assert!((peak_at.0 - 2.25).abs() < 0.15 && (peak_at.1 - 2.0).abs() < 0.15);
}

#[test]
fn landscape_single_step_is_zero_and_deterministic() {
    let out = tmp("land1");
    let r = dkt(&[
        "landscape", "--j", "3", "--kr", "2.0", "--ktheta", "0.5", "--grid", "8x8", "--steps",
        "1", "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    for line in read(&out, "landscape.csv").lines().skip(1) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(v.abs() < 1e-10, "nonzero entropy {v} at steps=1");
    }
}

#[test]
fn rate_series_starts_at_unit_fidelity() {
    let out = tmp("rate_pt");
    let r = dkt(&[
        "rate", "--j", "2.5", "--kr", "j*pi/2", "--ktheta", "0.4", "--theta0", "0.9", "--phi0",
        "1.7", "--steps", "13", "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let text = read(&out, "rate_series.csv");
    let first = text.lines().nth(1).unwrap();
    let cols: Vec<f64> = first.split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(cols[0], 0.0);
    assert!((cols[1] - 1.0).abs() < 1e-12, "Z(0) = {}", cols[1]);
    assert!(cols[2].abs() < 1e-12, "R(0) = {}", cols[2]);
    // period 12 at this k_r: the n = 12 row recurs
    let row12: Vec<f64> = text.lines().nth(13).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row12[1] - 1.0).abs() < 1e-8);
    assert!(row12[2] < 1e-8);
}

#[test]
fn rate_sweep_orders_by_ktheta() {
    let out = tmp("rate_sweep");
    let r = dkt(&[
        "rate", "--j", "3", "--kr", "j*pi/2", "--sweep", "0:j*pi/2:9", "--theta0", "0",
        "--phi0", "0", "--steps", "60", "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = read(&out, "rate_sweep.csv");
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][0], 0.0);
    let kr = 3.0 * std::f64::consts::PI / 2.0;
    assert!((rows[8][0] - kr).abs() < 1e-12);
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0]);
    }
}

#[test]
fn spectral_degeneracy_only_run_at_exact_point() {
    // at k_r = j pi/2 the spectrum collapses onto a few phases; an empty
    // order list requests the degeneracy profile alone
    let out = tmp("spec_exact");
    let r = dkt(&[
        "spectral", "--j", "10.5", "--kr", "j*pi/2", "--ktheta", "0", "--orders", "", "--seed",
        "1", "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let summary = json(&out, "summary.json");
    assert_eq!(summary["levels"], 22);
    assert!(summary["degeneracy_clusters"].as_u64().unwrap() <= 24);
    assert!(summary["dominant_fraction_24"].as_f64().unwrap() >= 0.9);
}

#[test]
fn spectral_requires_seed() {
    let out = tmp("spec_noseed");
    let r = dkt(&[
        "spectral", "--j", "10.5", "--kr", "1.1*j*pi/2", "--ktheta", "0", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("seed"));
}

#[test]
fn spectral_histograms_normalized() {
    let out = tmp("spec_hist");
    let r = dkt(&[
        "spectral", "--j", "20.5", "--kr", "1.002*j*pi/2", "--ktheta", "0", "--orders", "1",
        "--seed", "9", "--members", "60", "--poisson-size", "200", "--goe-dim", "120", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in ["dkt_hist_k1.csv", "poisson_hist_k1.csv", "goe_hist_k1.csv"] {
        let mut mass = 0.0;
        for line in read(&out, name).lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            mass += cols[2] * (cols[1] - cols[0]);
        }
        assert!((mass - 1.0).abs() < 1e-9, "{name} mass {mass}");
    }
    let summary = json(&out, "summary.json");
    assert!(summary["orders"][0]["tv_poisson"].as_f64().unwrap() >= 0.0);
}

#[test]
fn verify_passes_by_default_and_fails_on_injected_fault() {
    let out = tmp("verify_ok");
    let r = dkt(&["verify", "--max-n", "4", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let checks = json(&out, "verification.json");
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"] == true));

    let out2 = tmp("verify_fault");
    let r2 = dkt(&["verify", "--max-n", "4", "--inject-fault", "--out", out2.to_str().unwrap()]);
    assert!(!r2.status.success(), "fault injection must fail the suite");
    let checks2 = json(&out2, "verification.json");
    assert!(checks2
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["pass"] == false && c["name"].as_str().unwrap().contains("injected_fault")));
}

#[test]
fn config_file_supplies_flags_and_flags_override() {
    let out = tmp("cfg");
    std::fs::create_dir_all(&out).unwrap();
    let cfg_path = out.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# certify configuration\nj = 2\nkr = j*pi/2\nktheta = 0.37\ncutoff = 96\n",
    )
    .unwrap();
    let sub = out.join("from_config");
    let r = dkt(&[
        "certify", "--config", cfg_path.to_str().unwrap(), "--out", sub.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(json(&sub, "certificate.json")["period"], 8);

    // a flag overrides the config value: k_r = j pi/4 at j = 1.5 has no
    // period within the cutoff
    let sub2 = out.join("override");
    let r2 = dkt(&[
        "certify", "--config", cfg_path.to_str().unwrap(), "--j", "1.5", "--kr", "j*pi/4",
        "--cutoff", "200", "--out", sub2.to_str().unwrap(),
    ]);
    assert!(r2.status.success());
    assert!(json(&sub2, "certificate.json")["period"].is_null());
}

#[test]
fn metadata_sidecar_round_trips_the_run() {
    let out = tmp("meta");
    let r = dkt(&[
        "rate", "--j", "2", "--kr", "1.3", "--ktheta", "0.2", "--steps", "20", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let meta = json(&out, "run_meta.json");
    assert_eq!(meta["config"]["params"]["j"], 2.0);
    assert_eq!(meta["config"]["steps"], 20);
    assert!(meta["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    // checksum matches the file on disk
    let listed = meta["outputs"][0]["sha256"].as_str().unwrap();
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(out.join("rate_series.csv")).unwrap();
    let actual: String = Sha256::digest(&bytes).iter().map(|b| format!("{:02x}", b)).collect();
    assert_eq!(listed, actual);
}
