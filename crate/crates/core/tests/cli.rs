use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dmqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmqe"))
        .args(args)
        .output()
        .expect("failed to launch dmqe")
}

fn body_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn sinr_vs_l_writes_main_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[grids]\nbits = [1, 2]\nn_alice = [4, 16]\n[trial]\ntrials = 200\n").unwrap();
    let out = dir.path().join("nested/sinr.csv");
    let res = dmqe(&[
        "sinr-vs-l",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# master_seed: 9"));
    assert!(text.contains("# snr_definition:"));
    let lines = body_lines(&out);
    assert_eq!(lines[0], "L,N_a,loss_db_simulated,loss_db_closed_form,stderr");
    assert_eq!(lines.len(), 5);

    let side = body_lines(&dir.path().join("nested/sinr.closed_form.csv"));
    assert_eq!(side[0], "L,loss_db_closed_form,stderr");
    assert!(side[1].starts_with("1,3.922"));
}

#[test]
fn ber_sweep_has_no_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ber.toml");
    fs::write(
        &cfg,
        "[grids]\nbits = [3]\nangle_step = 45.0\n[trial]\nsymbols_per_point = 1000\ntrials = 2\n",
    )
    .unwrap();
    let out = dir.path().join("ber.csv");
    let res = dmqe(&["ber-sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let lines = body_lines(&out);
    assert_eq!(lines[0], "angle_deg,receiver_model,L_or_NQE,ber,stderr");
    // 5 angles x 2 curves of probes, then Bob for each curve
    assert_eq!(lines.len(), 1 + 10 + 2);
    assert!(!dir.path().join("ber.closed_form.csv").exists());
}

#[test]
fn out_of_range_value_exits_2_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[grids]\nbits = [0]\n").unwrap();
    let res = dmqe(&["sr-vs-l", "--config", cfg.to_str().unwrap(), "--out", "unused.csv"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("grids.bits"));
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[scenario]\nwarp_factor = 9\n").unwrap();
    let res = dmqe(&["sinr-vs-na", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn missing_config_exits_3() {
    let res = dmqe(&["sr-vs-l-na", "--config", "/nonexistent/dir/run.toml"]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("out.csv");
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[trial]\ntrials = 10\n").unwrap();
    let res = dmqe(&["sinr-vs-l", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn same_seed_same_bytes_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[grids]\nbits = [2, 3]\n[trial]\ntrials = 50\n").unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("sr_{workers}.csv"));
        let res = dmqe(&[
            "sr-vs-l",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(res.status.success());
        outputs.push(body_lines(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
}
