use std::path::Path;
use std::process::{Command, Output};

fn fraxim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraxim"))
        .args(args)
        .env("FRAXIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(csv_text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv_text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sweep_marks_the_gasket_band() {
    let out = fraxim(&["sweep", "--family", "sg", "--omega-start", "0.1", "--omega-stop", "10", "--omega-count", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let (h, body) = rows(&stdout(&out));
    assert_eq!(h, ["omega", "re_z", "im_z", "in_band"]);
    assert_eq!(body.len(), 50);
    for r in &body {
        let inside = 0.756 < r[0] && r[0] < 5.952;
        assert_eq!(r[col(&h, "in_band")] == 1.0, inside, "ω={}", r[0]);
        assert_eq!(r[1] > 0.0, inside);
    }
}

#[test]
fn sweep_hanoi_half_ratio_is_flat() {
    let out = fraxim(&["sweep", "--family", "hanoi", "-r", "0.5", "--omega-count", "40"]);
    let (h, body) = rows(&stdout(&out));
    assert_eq!(
        h,
        ["omega", "re_z", "im_z", "in_band", "re_zv", "im_zv", "re_zl", "im_zl"]
    );
    assert!(body.iter().all(|r| r[col(&h, "re_zl")] == 2.0 && r[col(&h, "in_band")] == 1.0));
}

#[test]
fn sweep_ladder_crossover() {
    let out = fraxim(&["sweep", "--family", "ladder", "--omega", "2"]);
    let (h, body) = rows(&stdout(&out));
    assert_eq!(body.len(), 1);
    assert!((body[0][col(&h, "abs_alpha")] - 1.0).abs() < 1e-12);
    assert_eq!(body[0][col(&h, "in_band")], 0.0);
}

#[test]
fn sweep_oracle_columns_track_the_closed_form() {
    let out = fraxim(&["sweep", "--family", "sg", "--omega-start", "0.5", "--omega-stop", "4", "--omega-count", "6", "--oracle"]);
    let (h, body) = rows(&stdout(&out));
    let (re, im, ren, imn) = (col(&h, "re_z"), col(&h, "im_z"), col(&h, "re_z_num"), col(&h, "im_z_num"));
    for r in &body {
        let d = (r[re] - r[ren]).hypot(r[im] - r[imn]);
        assert!(d < 5e-3 * r[re].hypot(r[im]).max(1.0), "ω={} d={d}", r[0]);
    }
}

#[test]
fn band_reports() {
    let out = fraxim(&["band", "--family", "sg"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["omega_lo"].as_f64().unwrap() - 0.756026).abs() < 1e-6);
    assert!((v["omega_hi"].as_f64().unwrap() - 5.952178).abs() < 1e-6);
    assert_eq!(v["nonempty"], true);

    let v: serde_json::Value = serde_json::from_str(&stdout(&fraxim(&["band", "--family", "hanoi", "-r", "0.7"]))).unwrap();
    assert_eq!(v["nonempty"], false);

    let v: serde_json::Value = serde_json::from_str(&stdout(&fraxim(&["band", "--family", "hanoi", "-r", "0.5"]))).unwrap();
    assert_eq!(v["omega_lo"], 0.0);
    assert!(v["omega_hi"].is_null());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"family":"ladder","L":1,"C":1,"omega":{"start":1,"stop":3,"count":3,"spacing":"linear"}}"#,
    );
    let (_, body) = rows(&stdout(&fraxim(&["sweep", "--config", &cfg])));
    assert_eq!(body.iter().map(|r| r[0]).collect::<Vec<_>>(), [1.0, 2.0, 3.0]);

    let (_, body) = rows(&stdout(&fraxim(&["sweep", "--config", &cfg, "--omega-count", "5"])));
    assert_eq!(body.len(), 5);
    let (h, body) = rows(&stdout(&fraxim(&["sweep", "--config", &cfg, "--family", "sg"])));
    assert_eq!(h.len(), 4);
    assert_eq!(body.len(), 3);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = fraxim(&["sweep", "--family", "sg", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("omega,re_z,im_z,in_band\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // configuration errors
    assert_eq!(fraxim(&["sweep"]).status.code(), Some(3));
    assert_eq!(fraxim(&["sweep", "--family", "tree"]).status.code(), Some(3));
    assert_eq!(fraxim(&["band", "--family", "hanoi", "-r", "1.5"]).status.code(), Some(3));
    let bad = write(dir.path(), "bad.json", r#"{"family":"sg","omega":{"start":2,"stop":1}}"#);
    assert_eq!(fraxim(&["sweep", "--config", &bad]).status.code(), Some(3));
    assert_eq!(fraxim(&["sweep", "--config", "/nonexistent/cfg.json"]).status.code(), Some(3));
    // resonance of the degenerate hanoi ratio at 2LCω²... x = 2
    let w = 2f64.sqrt().to_string();
    assert_eq!(fraxim(&["sweep", "--family", "hanoi", "-r", "0.6", "--omega", &w]).status.code(), Some(4));
    // unwritable output
    let out = fraxim(&["band", "--family", "sg", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fraxim(&["--help"]).status.code(), Some(0));
}

#[test]
fn validate_passes_and_fails_as_documented() {
    let ok = fraxim(&[
        "validate", "--family", "hanoi", "-r", "0.4", "--omega", "1", "-N", "12", "--epsilon", "1e-3",
        "--termination", "pair:1,0,1,0",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let v: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(v["passed"], true);
    let res = &v["rows"][0]["residuals"];
    assert!(res[0].as_f64().unwrap() < 1e-10 && res[1].as_f64().unwrap() < 1e-10);

    let out_of_band = fraxim(&["validate", "--family", "sg", "--omega", "0.5", "-N", "6", "--epsilon", "1e-3"]);
    assert_eq!(out_of_band.status.code(), Some(0));

    let lossless = ["validate", "--family", "sg", "--omega", "1", "--epsilon", "0", "-N", "3"];
    let out = fraxim(&lossless);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_ne!(v["rows"][0]["iterate_status"], "converged");

    let mut expecting = lossless.to_vec();
    expecting.push("--expect-divergence");
    assert_eq!(fraxim(&expecting).status.code(), Some(0));

    let lossy = ["validate", "--family", "sg", "--omega", "0.5", "--epsilon", "1e-3", "-N", "3", "--expect-divergence"];
    assert_eq!(fraxim(&lossy).status.code(), Some(2));
}

#[test]
fn converge_table() {
    let out = fraxim(&["converge", "--family", "hanoi", "-r", "0.4", "--at", "1", "--depths", "0,4,8", "--epsilons", "1e-2,1e-3", "--termination", "fixed:1,0"]);
    let (h, body) = rows(&stdout(&out));
    assert_eq!(h, ["epsilon", "n", "re_z", "im_z", "abs_err_vs_closedform"]);
    assert_eq!(body.len(), 6);
    assert_eq!((body[0][0], body[0][1]), (1e-2, 0.0));
    assert_eq!((body[3][0], body[3][1]), (1e-3, 0.0));
    // depth 0 is the termination itself
    assert_eq!((body[0][2], body[0][3]), (1.0, 0.0));
    for block in body.chunks(3) {
        assert!(block[2][4] < block[0][4]);
    }
}

#[test]
fn network_file_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(
        dir.path(),
        "net.json",
        r#"{"nodes":[0,1,2],"edges":[[0,1,{"kind":"resistor","value":1.0}],[1,2,{"kind":"inductor","value":1.0}]],"boundary":[0,2]}"#,
    );
    let out = fraxim(&["sweep", "--network", &net, "--omega-start", "1", "--omega-stop", "2", "--omega-count", "2", "--epsilon", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, body) = rows(&stdout(&out));
    let near = |a: &[f64], b: [f64; 2]| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14;
    assert!(near(&body[0][1..], [1.0, 1.0]), "{:?}", body[0]);
    assert!(near(&body[1][1..], [1.0, 2.0]), "{:?}", body[1]);
}

#[test]
fn sweep_is_byte_stable() {
    let args = ["sweep", "--family", "hanoi", "-r", "0.4", "--omega-count", "64", "--oracle"];
    let a = fraxim(&args).stdout;
    let b = fraxim(&args).stdout;
    let single = Command::new(env!("CARGO_BIN_EXE_fraxim"))
        .args(args)
        .env("FRAXIM_THREADS", "1")
        .output()
        .unwrap()
        .stdout;
    assert_eq!(a, b);
    assert_eq!(a, single);
}
