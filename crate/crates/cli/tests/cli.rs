use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lowdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn degree_of_top_character() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "chi.json", r#"{"n":3,"table_hex":"96"}"#);
    assert_eq!(stdout(&lowdeg(&["degree", "--input", &f])), "3\n");
}

#[test]
fn construct_matches_block_table() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(dir.path(), "fam.json", r#"{"n":3,"l":1,"sets":[6,0]}"#);
    assert_eq!(
        stdout(&lowdeg(&["construct", "--family", &fam])),
        "{\"n\":3,\"table_hex\":\"28\"}\n"
    );
}

#[test]
fn embed_intersecting_instance_is_far() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", r#"{"l_blocks":2,"m":2,"k":1,"x_hex":"09","y_hex":"05"}"#);
    let h = dir.path().join("h.json");
    let out = stdout(&lowdeg(&["embed-disj", "--input", &inst, "--n", "4", "--output", h.to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["classification"], "far");
    assert_eq!(v["tail"], "1/2^2");
    let deg = stdout(&lowdeg(&["degree", "--input", h.to_str().unwrap()]));
    assert_eq!(deg.trim(), v["degree"].to_string());
}

#[test]
fn transform_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"n":4,"table_hex":"3c5a"}"#);
    let csv = dir.path().join("spec.csv");
    stdout(&lowdeg(&["transform", "--input", &f, "--output", csv.to_str().unwrap()]));
    let spec = lowdeg::io::spectrum_from_csv(4, &fs::read_to_string(&csv).unwrap()).unwrap();
    let g = lowdeg::io::function_from_json(&fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(spec.inverse().unwrap(), g);
}

#[test]
fn malformed_input_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"n\":3,\n\"table\":\"96\"}");
    let out = lowdeg(&["degree", "--input", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn protocol_transcript_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"n":3,"table_hex":"96"}"#);
    let g = write(dir.path(), "g.json", r#"{"n":3,"table_hex":"28"}"#);
    let out = stdout(&lowdeg(&["simulate-protocol", "--f", &f, "--g", &g, "--l", "1", "--seeds", "0..4"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("seed,queries,bits,verdict"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r[2].parse::<usize>().unwrap(), 2 * r[1].parse::<usize>().unwrap());
    }
}

#[test]
fn yao_experiment_is_deterministic() {
    let args = ["experiment-yao", "--n", "9", "--k", "6", "--l", "2", "--d", "1", "--samples", "5000", "--seed", "7"];
    let a = stdout(&lowdeg(&args));
    assert_eq!(a, stdout(&lowdeg(&args)));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["covered"].as_u64().unwrap() <= 1);
    assert!(v["analytic_floor"].is_string());
    assert_eq!(v["ci95"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_empty_and_skipped_grids() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.cfg", "");
    let out = lowdeg(&["verify", "--config", &empty]);
    assert_eq!(stdout(&out), "check_id,parameters,expected,observed,status\n");

    let cfg = write(dir.path(), "grid.cfg", "oracle_n = 3,5\nprop_exhaustive_l = 0..1\ntransform_n = 1..3\ntransform_samples = 10\n");
    let reports = dir.path().join("reports");
    let out = lowdeg(&["verify", "--config", &cfg, "--output-dir", reports.to_str().unwrap(), "--format", "json"]);
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["skip"], 2);
    assert!(reports.join("report.csv").exists());
    assert_eq!(fs::read_to_string(reports.join("report.json")).unwrap(), text);

    let bad = write(dir.path(), "bad.cfg", "seed = 1\nnonsense = 3\n");
    let out = lowdeg(&["verify", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
