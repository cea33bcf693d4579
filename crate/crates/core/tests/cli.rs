//! End-to-end runs of the `cpcr` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn cpcr(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cpcr"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("cpcr runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn write_csv(dir: &Path, rows: &[&str]) -> String {
    let path = dir.join("small.csv");
    std::fs::write(&path, rows.join("\n")).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn decode_reads_the_encoding_from_the_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let enc = tmp.path().join("enc");
    let out = cpcr(&["encode", "--data", &data("wbc.csv"), "--cell-px", "2", "--out", enc.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // No grid or cell size on the decode command line: both come from the sidecar.
    let image = enc.join("images").join("wbc_1.png");
    assert!(image.exists());
    let dec = tmp.path().join("dec");
    let out = cpcr(&["decode", "--image", image.to_str().unwrap(), "--out", dec.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let decoded = json(dec.join("decoded.json"));
    assert_eq!(decoded["case_id"], 1);
    assert_eq!(decoded["values"].as_array().unwrap().len(), 10);
}

#[test]
fn decode_matches_the_encoded_values() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write_csv(tmp.path(), &["a,b,c,d,label", "8,10,10,8,x", "1,1,7,3,y", "5,5,5,5,x"]);
    let enc = tmp.path().join("enc");
    let out = cpcr(&[
        "encode", "--data", &csv, "--binning", "identity", "--collision", "spiral", "--pnm",
        "--out", enc.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (case, expected) in [(0, [8, 10, 10, 8]), (1, [1, 1, 7, 3]), (2, [5, 5, 5, 5])] {
        let image = enc.join("images").join(format!("small_{case}.pgm"));
        let dec = tmp.path().join(format!("dec{case}"));
        let out = cpcr(&["decode", "--image", image.to_str().unwrap(), "--out", dec.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let decoded = json(dec.join("decoded.json"));
        let values: Vec<u64> = decoded["values"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert_eq!(values, expected.map(|v| v as u64), "case {case}");
    }
}

#[test]
fn synth_writes_a_labeled_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cpcr(&["synth", "--dim", "3", "--n-per-class", "25", "--seed", "4", "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("swiss_roll.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 4);
    assert_eq!(lines.count(), 50);
}

#[test]
fn freq_reports_requested_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cpcr(&[
        "freq", "--data", &data("ionosphere.csv"), "--binning", "ionosphere", "--cells", "13",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tables = json(tmp.path().join("frequency.json"));
    assert_eq!(tables.as_array().unwrap().len(), 1);
    assert_eq!(tables[0]["cell"]["id"], 13);
    let text = std::fs::read_to_string(tmp.path().join("frequency.txt")).unwrap();
    assert!(text.contains("x5,x6"));
}

#[test]
fn cv_and_icc_write_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let common = ["--data", &data("wbc.csv"), "--folds", "3", "--epochs", "2", "--seed", "1"];
    let cv = tmp.path().join("cv");
    let mut args = vec!["cv"];
    args.extend(common);
    args.extend(["--out", cv.to_str().unwrap()]);
    assert!(cpcr(&args).status.success());
    let report = json(cv.join("cv_report.json"));
    assert_eq!(report["folds"].as_array().unwrap().len(), 3);

    let icc = tmp.path().join("icc");
    let mut args = vec!["icc"];
    args.extend(common);
    args.extend(["--out", icc.to_str().unwrap()]);
    assert!(cpcr(&args).status.success());
    let report = json(icc.join("icc_report.json"));
    assert_eq!(report["cells"].as_array().unwrap().len(), 25);
}

#[test]
fn optimize_emits_a_reusable_config() {
    let tmp = tempfile::tempdir().unwrap();
    let search = tmp.path().join("search");
    let out = cpcr(&[
        "optimize", "--data", &data("wbc.csv"), "--search-k", "2", "--epochs", "1", "--fold", "0",
        "--folds", "4", "--out", search.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = json(search.join("search_trace.json"));
    assert_eq!(trace["candidates"].as_array().unwrap().len(), 3);
    assert!(search.join("holdout.json").exists());

    // The best fragment feeds straight back into another command.
    let cv = tmp.path().join("cv");
    let out = cpcr(&[
        "cv", "--config", search.join("best_config.json").to_str().unwrap(), "--data", &data("wbc.csv"),
        "--folds", "3", "--epochs", "1", "--out", cv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(cv.join("cv_report.json"));
    assert_eq!(report["pairing"], trace["candidates"][trace["best"].as_u64().unwrap() as usize]["pairing"]);
}

#[test]
fn saliency_writes_maps_and_a_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cpcr(&[
        "saliency", "--data", &data("wbc.csv"), "--cases", "2,5", "--epochs", "1", "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("model.ckpt").exists());
    let records = json(tmp.path().join("saliency.json"));
    assert_eq!(records.as_array().unwrap().len(), 2);
    for r in records.as_array().unwrap() {
        assert!(tmp.path().join(r["image"].as_str().unwrap()).exists());
    }
}

#[test]
fn exit_codes_separate_usage_from_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().to_str().unwrap();
    assert_eq!(cpcr(&["encode", "--grid", "zero", "--out", out_dir]).status.code(), Some(1));
    assert_eq!(cpcr(&["decode", "--out", out_dir]).status.code(), Some(1));
    let missing = tmp.path().join("missing.csv");
    assert_eq!(
        cpcr(&["encode", "--data", missing.to_str().unwrap(), "--out", out_dir]).status.code(),
        Some(2)
    );
    let bad = write_csv(tmp.path(), &["a,b,label", "1,oops,x"]);
    assert_eq!(cpcr(&["encode", "--data", &bad, "--out", out_dir]).status.code(), Some(2));
}
