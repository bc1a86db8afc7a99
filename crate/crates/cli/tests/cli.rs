use std::path::PathBuf;
use std::process::{Command, Output};

fn cdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdiv")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cdiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn small_config(path: &PathBuf) {
    std::fs::write(
        path,
        "seed = 3\nsymbols_per_point = 10000\nsnr_sweep_db = [0.0, 10.0, 20.0]\n\
         [path_loss]\nalpha = 2.0\n[sender]\nscheme = \"qam16_circ\"\n\
         [[receivers]]\nlabel = \"intended\"\nscheme = \"qam16_circ\"\ndistance_m = 10.0\n\
         [[receivers]]\nlabel = \"eve_qam16_rect\"\nscheme = \"qam16_rect\"\ndistance_m = 10.0\n\
         [[receivers]]\nlabel = \"eve_qpsk\"\nscheme = \"qpsk\"\ndistance_m = 10.0\n\
         [[receivers]]\nlabel = \"eve_bpsk\"\nscheme = \"bpsk\"\ndistance_m = 10.0\n",
    )
    .unwrap();
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(cdiv(&["--help"]).status.code(), Some(0));
    assert_eq!(cdiv(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(cdiv(&[]).status.code(), Some(1));
    assert_eq!(cdiv(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cdiv(&["analytic", "sweep", "--snr-db", "0:5"]).status.code(), Some(1));
    assert_eq!(cdiv(&["scheme", "show", "--name", "qam64"]).status.code(), Some(1));
    assert_eq!(cdiv(&["scheme", "show", "--name", "bpsk", "--key", "0,0"]).status.code(), Some(1));
    assert_eq!(cdiv(&["secrecy", "verify", "--order", "9"]).status.code(), Some(1));
    assert_eq!(cdiv(&["sim", "figure", "--id", "fig6"]).status.code(), Some(1));
}

#[test]
fn analytic_sweep_csv() {
    let o = cdiv(&["analytic", "sweep", "--snr-db", "0:25:0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("snr_db,p_correct,p_error"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 51);
    assert!((rows[0][1] - 0.0136).abs() < 1e-4);
    assert!(rows.iter().all(|r| r[2] == 1.0 - r[1]));
}

#[test]
fn scheme_commands() {
    let o = cdiv(&["scheme", "show", "--name", "qpsk"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# 10  -0.707107  +0.707107"));

    let key = stdout(&cdiv(&["scheme", "make-key", "--order", "16", "--seed", "4"]));
    assert_eq!(key, stdout(&cdiv(&["scheme", "make-key", "--order", "16", "--seed", "4"])));
    assert_eq!(key.trim().split(',').count(), 16);

    let file = tmp("keyed.toml");
    let f = file.to_str().unwrap();
    let o = cdiv(&["scheme", "show", "--name", "qam16_rect", "--key", key.trim(), "--out", f]);
    assert!(o.status.success());
    let again = cdiv(&["scheme", "show", "--file", f]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn secrecy_json() {
    let o = cdiv(&["secrecy", "report", "--order", "16"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["keyspace_size"], "20922789888000");
    assert_eq!(v["shannon_bound_max_symbols"], 11);
    assert_eq!(v["unicity_distance_symbols"], "INFINITE");

    let o = cdiv(&["secrecy", "report", "--order", "4", "--redundancy", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let u: f64 = v["unicity_distance_symbols"].as_str().unwrap().parse().unwrap();
    assert!((u - 24f64.log2()).abs() < 1e-12);

    let o = cdiv(&["secrecy", "verify", "--order", "4", "--prior", "1/2,1/4,1/8,1/8"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["perfect_secrecy"], true);
    assert_eq!(v["keys_enumerated"], 24);
    assert_eq!(v["conditional"][3][0], "1/2");
}

#[test]
fn permanent_of_file() {
    let m = tmp("j3.txt");
    std::fs::write(&m, "# all ones\n1 1 1\n1 1 1\n1 1 1\n").unwrap();
    let o = cdiv(&["permanent", "--matrix", m.to_str().unwrap()]);
    assert_eq!(stdout(&o), "6\n");
    std::fs::write(&m, "1 2\n0 1\n").unwrap();
    assert_eq!(cdiv(&["permanent", "--matrix", m.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sim_run_and_figures() {
    let cfg = tmp("small.toml");
    small_config(&cfg);
    let out = tmp("small.csv");
    let o = cdiv(&["sim", "run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# symbols_per_point: 10000"));
    assert!(text.contains("# receiver eve_bpsk: scheme=bpsk"));

    let fig = cdiv(&["sim", "figure", "--id", "fig7", "--in", out.to_str().unwrap()]);
    assert!(fig.status.success());
    let fig = stdout(&fig);
    assert!(fig.contains("snr_db,intended_ber,eve_qam16_rect_ber,eve_qpsk_ber,eve_bpsk_ber"));
    assert_eq!(fig.lines().count(), 5);

    let summary = tmp("fig13.csv");
    let o = cdiv(&[
        "sim", "figure", "--id", "fig13", "--in", out.to_str().unwrap(), out.to_str().unwrap(),
        "--out", summary.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&summary).unwrap().contains("count,18"));

    let fig5 = stdout(&cdiv(&["sim", "figure", "--id", "fig5"]));
    assert_eq!(fig5.lines().count(), 53);
}

#[test]
fn data_errors_exit_2() {
    let bad = tmp("tampered.csv");
    std::fs::write(
        &bad,
        "receiver_label,snr_db,tx_bits,compared_bits,bit_errors,ber,symbol_errors,ser\n\
         intended,0.0,40,40,4,0.5,4,0.4\n",
    )
    .unwrap();
    let o = cdiv(&["sim", "figure", "--id", "fig13", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));

    let cfg = tmp("invalid.toml");
    std::fs::write(&cfg, "seed = 1\nsymbols_per_point = 10\n").unwrap();
    let o = cdiv(&["sim", "run", "--config", cfg.to_str().unwrap(), "--out", tmp("x.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let only_intended = tmp("partial.csv");
    std::fs::write(
        &only_intended,
        "receiver_label,snr_db,tx_bits,compared_bits,bit_errors,ber,symbol_errors,ser\n\
         intended,0.0,40,40,4,0.1,4,0.4\n",
    )
    .unwrap();
    let o = cdiv(&["sim", "figure", "--id", "fig8", "--in", only_intended.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eve_qam16_rect"));

    let missing = cdiv(&["sim", "run", "--config", "/no/such/file.toml", "--out", "/tmp/none.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}
