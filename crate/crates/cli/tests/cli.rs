use std::path::Path;
use std::process::{Command, Output};

fn rkm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rkm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gap_gadget_then_exact_reports_two_against_one() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("gap.json");
    let out = rkm(&["gadget", "integrality-gap", "--d", "2", "--out", path(&cert)]);
    assert!(out.status.success());
    let out = rkm(&["exact", path(&cert)]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("opt 2 vs lp 1"), "{stderr}");
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("\"opt_value\": 2.0"));
    assert!(report.contains("\"proved_optimal\": true"));
}

#[test]
fn label_cover_certificate_verifies_with_congestion_one() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("lc.json");
    assert!(rkm(&["--seed", "4", "gadget", "label-cover-mcsp", "--out", path(&cert)]).status.success());
    let out = rkm(&["verify", path(&cert)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok: congestion 1");
}

#[test]
fn tampered_certificate_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("line.json");
    assert!(rkm(&["gadget", "line-embedding", "--out", path(&cert)]).status.success());
    let text = std::fs::read_to_string(&cert).unwrap();
    let tampered = text.replace("\"objective\": 1.0", "\"objective\": 0.5");
    assert_ne!(text, tampered);
    std::fs::write(&cert, tampered).unwrap();
    assert_eq!(rkm(&["verify", path(&cert)]).status.code(), Some(2));
}

#[test]
fn empty_solver_list_is_a_usage_error() {
    assert_eq!(rkm(&["bench", "--solvers", ""]).status.code(), Some(1));
    assert_eq!(rkm(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn malformed_instance_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(
        &file,
        r#"{"metric":{"type":"uniform","n":3},"facility_sites":[0,1,2],"client_points":[0,1,2],"groups":[[0],[1],[2],[0,7]],"k":1}"#,
    )
    .unwrap();
    let out = rkm(&["solve", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("groups[3][1]"));
}

#[test]
fn bench_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let file = dir.path().join(name);
        let out = rkm(&[
            "--seed", "11", "--format", "csv", "--out", path(&file), "bench", "--families", "uniform,gauss_exp",
            "--facilities", "8", "--groups", "3", "--clients-per-group", "4", "--k", "2", "--instances", "2",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(file).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(a.starts_with(b"instance_id,family,n_facilities,n_clients,n_groups,k,solver,seed,objective,lp_value,ratio,wall_time_ms,iterations\n"));
}

#[test]
fn generate_solve_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let out = rkm(&[
        "--seed", "2", "--out", path(&inst), "generate", "--family", "gauss_const", "--facilities", "9",
        "--groups", "3", "--clients-per-group", "4", "--k", "3",
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&inst).unwrap();
    assert!(text.contains("\"metadata\"") && text.contains("\"format_version\": 1"));

    let out = rkm(&["--format", "csv", "solve", path(&inst), "--solvers", "greedy_down,local_search"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);

    let csv = dir.path().join("cols.csv");
    std::fs::write(&csv, "x,y\n1,2\n2,3\n3,4\n4,5\n5,6\n6,7\n").unwrap();
    let out = rkm(&["stats", path(&csv), "--col-a", "x", "--col-b", "y"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"p_value\": 0.03125"));

    let out = rkm(&["stats", path(&csv), "--col-a", "x", "--col-b", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lp_command_writes_value_and_model() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let model = dir.path().join("model.lp");
    assert!(rkm(&["--out", path(&inst), "generate", "--facilities", "6", "--groups", "2", "--clients-per-group", "3", "--k", "2"])
        .status
        .success());
    let out = rkm(&["lp", path(&inst), "--export", path(&model)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"lp_value\""));
    assert!(std::fs::read_to_string(&model).unwrap().starts_with("Minimize"));
}
