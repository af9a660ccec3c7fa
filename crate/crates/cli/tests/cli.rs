//! End-to-end checks of the command-line surface via the built binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mzfisher"))
}

fn stdout_of(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn fixed_table_has_expected_rows() {
    let csv = stdout_of(&["table-fixed-n", "--max-n", "20", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 21);
    // N=2: same Fisher information for twin-Fock and N00N.
    assert!(lines[2].starts_with("2,1,4.0000000000000000e0,4.0000000000000000e0"));
    // N=3: 7 vs 9, both optima listed.
    assert!(lines[3].starts_with("3,1|2,7.0000000000000000e0,9.0000000000000000e0"));
    // N=20: 220 vs 400.
    assert!(lines[20].starts_with("20,10,2.2000000000000000e2,4.0000000000000000e2"));
}

#[test]
fn csv_and_json_values_are_identical() {
    let csv = stdout_of(&["table-fixed-n", "--max-n", "6", "--format", "csv"]);
    let json = stdout_of(&["table-fixed-n", "--max-n", "6", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    for (i, line) in csv.lines().skip(1).enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let row = &rows[i];
        assert_eq!(fields[0].parse::<u64>().unwrap(), row["n"].as_u64().unwrap());
        for (k, key) in [(2, "f_twin_fock"), (3, "f_noon"), (4, "qcrb_twin"), (5, "qcrb_noon"), (6, "ratio")] {
            let from_csv: f64 = fields[k].parse().unwrap();
            assert_eq!(from_csv.to_bits(), row[key].as_f64().unwrap().to_bits());
        }
    }
}

#[test]
fn mean_table_matches_closed_form() {
    let json = stdout_of(&[
        "table-mean-n",
        "--values",
        "0,2",
        "--cutoff",
        "64",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(rows[0]["f_simulated"].as_f64().unwrap(), 0.0);
    let f2 = rows[1]["f_simulated"].as_f64().unwrap();
    assert!((f2 - 8.0).abs() < 1e-6, "N_mean=2 row gave {f2}");
}

#[test]
fn qfi_command_scores_known_inputs() {
    let dir = std::env::temp_dir();
    let a = dir.join("mzfisher_test_a.json");
    let b = dir.join("mzfisher_test_b.json");
    std::fs::write(&a, r#"{"type":"coherent","alpha":{"re":2.0},"cutoff":32}"#).unwrap();
    std::fs::write(&b, r#"{"type":"number","n":0,"cutoff":32}"#).unwrap();
    let json = stdout_of(&["qfi", a.to_str().unwrap(), b.to_str().unwrap()]);
    let out: serde_json::Value = serde_json::from_str(&json).unwrap();
    let qfi = out["variance_form"]["qfi"].as_f64().unwrap();
    assert!((qfi - 4.0).abs() < 1e-6, "coherent(2)⊗vacuum gave {qfi}");
    assert!(out["discrepancy"].as_f64().unwrap() < 1e-8);
}

#[test]
fn parse_errors_exit_with_code_2() {
    let dir = std::env::temp_dir();
    let bad = dir.join("mzfisher_test_bad.json");
    std::fs::write(&bad, r#"{"type":"number","n":3}"#).unwrap();
    let out = bin()
        .args(["qfi", bad.to_str().unwrap(), bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cutoff"), "stderr was: {err}");
}

#[test]
fn truncation_errors_carry_required_cutoff_hint() {
    let dir = std::env::temp_dir();
    let a = dir.join("mzfisher_test_trunc.json");
    std::fs::write(&a, r#"{"type":"coherent","alpha":{"re":4.0},"cutoff":8}"#).unwrap();
    let out = bin()
        .args(["qfi", a.to_str().unwrap(), a.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cutoff of at least"), "stderr was: {err}");
}
