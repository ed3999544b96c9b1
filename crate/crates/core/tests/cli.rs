use std::io::Write;
use std::process::{Command, Output, Stdio};

use monopole_qes::cli::OutputTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monopole-qes"))
}

fn with_config(args: &[&str], json: &str) -> Output {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(json.as_bytes()).unwrap();
    bin().args(args).arg("--config").arg(file.path()).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const MIE: &str = r#"{"case": "mie_oscillator", "alpha": 0.75, "phi_quanta": 0.5,
    "beta": 1, "beta_m1": 1, "beta_m2": 1, "v0": 1, "modes": [[1, 1], [2, 0]]}"#;

#[test]
fn spectrum_lists_constrained_levels() {
    let out = with_config(&["spectrum"], MIE);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,l,alpha,phi,j,param,param_value,energy"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn verify_passes_and_corrupted_energy_fails() {
    let ok = with_config(&["verify"], MIE);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).lines().skip(1).all(|l| l.ends_with(",true,ok")));

    let bad = MIE.replace("\"v0\": 1,", "\"v0\": 1, \"corrupt_energy\": 1e-3,");
    let out = with_config(&["verify"], &bad);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("mismatch"));
}

#[test]
fn configuration_errors_exit_two() {
    let unknown = MIE.replace("\"alpha\"", "\"alfa\"");
    assert_eq!(with_config(&["spectrum"], &unknown).status.code(), Some(2));

    let bad_alpha = MIE.replace("0.75", "1.5");
    assert_eq!(with_config(&["spectrum"], &bad_alpha).status.code(), Some(2));

    // l' = -1/2 with no inverse-square term gives j^2 < 0 at alpha < 1.
    let complex = r#"{"case": "coulomb", "alpha": 0.5, "phi_quanta": 0.5, "eta_c": 1,
        "modes": [[1, 0]]}"#;
    let out = with_config(&["verify"], complex);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("non-physical"));

    let out = bin().args(["spectrum", "--preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("spectrum").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn complex_index_can_be_skipped() {
    let skip = r#"{"case": "coulomb", "alpha": 0.5, "phi_quanta": 0.5, "eta_c": 1,
        "modes": [[1, 0]], "skip_nonphysical": true}"#;
    let out = with_config(&["verify"], skip);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("skipped"));
}

#[test]
fn config_from_stdin_matches_file() {
    let mut child = bin()
        .args(["spectrum", "--config", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(MIE.as_bytes()).unwrap();
    let piped = child.wait_with_output().unwrap();
    assert_eq!(piped.status.code(), Some(0));
    assert_eq!(piped.stdout, with_config(&["spectrum"], MIE).stdout);
}

#[test]
fn json_output_round_trips() {
    let out = with_config(&["spectrum", "--format", "json"], MIE);
    let table: OutputTable = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.to_json().unwrap(), stdout(&out));
    assert!(table.numbers("energy").iter().all(|e| e.is_finite()));
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let args = ["sweep", "--preset", "phi-sweep", "--output", path.to_str().unwrap()];
    assert_eq!(bin().args(args).status().unwrap().code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    assert_eq!(bin().args(args).status().unwrap().code(), Some(0));
    assert_eq!(first, std::fs::read(&path).unwrap());
    assert!(!first.is_empty());
}

#[test]
fn empty_modes_give_header_only() {
    let empty = r#"{"case": "kratzer", "d_e": 1, "r0": 1}"#;
    let out = with_config(&["verify"], empty);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn every_preset_runs_its_natural_command() {
    for (preset, command) in [
        ("fig1a", "potential"),
        ("fig2c", "potential"),
        ("coulomb", "spectrum"),
        ("kratzer", "verify"),
        ("l-sweep", "sweep"),
    ] {
        let out = bin().args([command, "--preset", preset]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{preset}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).lines().count() > 1, "{preset}");
    }
}
