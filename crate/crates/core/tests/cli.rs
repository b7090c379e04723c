use std::path::Path;
use std::process::{Command, Output};

use amkl::harness::{read_trace_csv, TRACE_HEADER};

fn amkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amkl")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn run_writes_trace_summary_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = amkl(&[
        "run",
        "--synthetic-sigma2",
        "1",
        "--synthetic-len",
        "400",
        "--synthetic-dim",
        "3",
        "--variant",
        "amkl_aks",
        "--regret",
        "--out",
        out_dir,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("al_eff") && stdout.contains("regret"), "{stdout}");

    let trace = dir.path().join("trace.csv");
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with(TRACE_HEADER));
    let rows = read_trace_csv(&trace).unwrap();
    assert_eq!(rows.len(), 400);
    assert!(rows[0].a_t);
    for name in ["summary.json", "mse.dat", "al_eff.dat", "plot.gp"] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["samples"], 400);
}

#[test]
fn emit_flags_suppress_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = amkl(&[
        "run",
        "--synthetic-sigma2",
        "1",
        "--synthetic-len",
        "100",
        "--variant",
        "raker",
        "--no-trace",
        "--no-plot",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(!dir.path().join("trace.csv").exists());
    assert!(!dir.path().join("mse.dat").exists());
    assert!(dir.path().join("summary.json").is_file());
}

#[test]
fn compare_prints_one_row_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("table.csv");
    let out = amkl(&[
        "compare",
        "--synthetic-sigma2",
        "1",
        "--synthetic-len",
        "300",
        "--variants",
        "raker,omkl_aks,amkl,amkl_aks,single_kernel",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 6, "{table}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    for v in ["raker", "omkl_aks", "amkl", "amkl_aks", "single_kernel"] {
        assert!(stdout.contains(v), "{stdout}");
    }
}

#[test]
fn sweep_writes_tradeoff_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = amkl(&[
        "sweep",
        "--synthetic-sigma2",
        "1",
        "--synthetic-len",
        "300",
        "--variant",
        "amkl_aks",
        "--eta-c-grid",
        "5e-4,5e-2",
        "--seeds",
        "0,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 5, "{stdout}");
    assert!(dir.path().join("tradeoff.dat").is_file());
}

#[test]
fn configuration_errors_exit_with_one() {
    assert_eq!(code(&amkl(&["run"])), 1);
    assert_eq!(code(&amkl(&["run", "--synthetic-sigma2", "1", "--delta", "1.5"])), 1);
    assert_eq!(code(&amkl(&["run", "--synthetic-sigma2", "1", "--variant", "nope"])), 1);
    assert_eq!(code(&amkl(&["sweep", "--synthetic-sigma2", "1", "--variant", "raker"])), 1);
    assert_eq!(code(&amkl(&["frobnicate"])), 1);
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.toml");
    let write = |csv: &str| {
        std::fs::write(dir.path().join("d.csv"), csv).unwrap();
        std::fs::write(
            &manifest,
            "name = \"tiny\"\npath = \"d.csv\"\nfeature_count = 2\nsample_count = 3\nlabel_column = 2\n",
        )
        .unwrap();
    };
    let run = |m: &Path| code(&amkl(&["run", "--manifest", m.to_str().unwrap(), "--no-trace", "--no-plot", "--no-summary"]));

    assert_eq!(run(&dir.path().join("absent.toml")), 2);
    write("1,2,0.5\n3,4,0.1\n5,6\n");
    assert_eq!(run(&manifest), 2);
    write("1,2,0.5\n3,4,0.1\n5,6,0.9\n");
    assert_eq!(run(&manifest), 0);
}

#[test]
fn help_exits_cleanly() {
    let out = amkl(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("compare"));
}
