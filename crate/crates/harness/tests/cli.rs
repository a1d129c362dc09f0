use std::fs;
use std::process::Command;

fn gridroute(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gridroute"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn frr_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = gridroute(&["frr", "--trials", "20", "--failures", "2", "--mode", "consecutive", "--seed", "9", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("schema,trial,event,"));
    // 20 trials x 2 events x 5 schemes.
    assert_eq!(text.lines().count(), 1 + 20 * 2 * 5);
    assert!(text.lines().skip(1).all(|l| l.starts_with("frr/1,")));
}

#[test]
fn validate_and_multigs_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.csv");
    let o = gridroute(&["validate", "--trials", "5", "--out", v.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&v).unwrap();
    assert!(text.lines().next().unwrap().contains("threshold_10pct_pass"));
    assert!(text.contains("legit_0f"));

    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "trials = 1\nbotnet_sizes = [0, 10]\n").unwrap();
    let m = dir.path().join("m.csv");
    let o = gridroute(&["multigs", "--config", cfg.to_str().unwrap(), "--out", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&m).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().any(|r| r.starts_with("multigs/1,0,") && r.contains(",0,0,0,")), "{text}");
}

#[test]
fn assumptions_and_bench_write_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "assumption_samples = 4\nassumption_pairs = 2\nbench_headers = 200\n").unwrap();
    for cmd in ["assumptions", "bench"] {
        let out = dir.path().join(format!("{cmd}.json"));
        let o = gridroute(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn bad_input_exits_nonzero() {
    let o = gridroute(&["frr", "--failures", "4"]);
    assert!(!o.status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "trails = 3\n").unwrap();
    let o = gridroute(&["frr", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    let o = gridroute(&["frr", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert!(!o.status.success());
}
