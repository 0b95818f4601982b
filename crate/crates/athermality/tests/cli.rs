//! End-to-end tests of the `athermality` binary: exit codes, file formats
//! and report determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_athermality"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn write_matrix(dir: &Path, name: &str, re: &[&[f64]]) -> String {
    let dim = re.len();
    let value = json!({
        "dim": dim,
        "re": re,
        "im": vec![vec![0.0; dim]; dim],
    });
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn compute_relent_zero_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(dir.path(), "rho.json", &[&[0.75, 0.0], &[0.0, 0.25]]);
    let sigma = write_matrix(dir.path(), "sigma.json", &[&[0.5, 0.0], &[0.0, 0.5]]);

    let out = run_in(
        dir.path(),
        &["compute", "relent", "--rho", &rho, "--sigma", &rho],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["value"].as_f64().unwrap().abs() < 1e-10);

    let out = run_in(
        dir.path(),
        &["compute", "relent", "--rho", &rho, "--sigma", &sigma],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out)["value"].as_f64().unwrap();
    // 0.75 ln 1.5 + 0.25 ln 0.5
    assert!((v - 0.13081203594113694).abs() < 1e-12);
}

#[test]
fn compute_relent_support_violation_is_value_not_error() {
    let dir = tempfile::tempdir().unwrap();
    let rho = write_matrix(
        dir.path(),
        "rho.json",
        &[&[0.5, 0.0, 0.0], &[0.0, 0.25, 0.0], &[0.0, 0.0, 0.25]],
    );
    let sigma = write_matrix(
        dir.path(),
        "sigma.json",
        &[&[0.5, 0.0, 0.0], &[0.0, 0.5, 0.0], &[0.0, 0.0, 0.0]],
    );
    let out = run_in(
        dir.path(),
        &["compute", "relent", "--rho", &rho, "--sigma", &sigma],
    );
    assert_eq!(code(&out), 0, "infinity is a value, not an error");
    assert_eq!(stdout_json(&out)["value"], json!("infinity"));
}

#[test]
fn compute_gibbs_qubit_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let h = write_matrix(dir.path(), "h.json", &[&[0.0, 0.0], &[0.0, 1.0]]);
    let out = run_in(
        dir.path(),
        &["compute", "gibbs", "--hamiltonian", &h, "--beta", "1.0"],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let z = 1.0 + (-1.0f64).exp();
    assert!((v["re"][0][0].as_f64().unwrap() - 1.0 / z).abs() < 1e-6);
    assert!((v["re"][1][1].as_f64().unwrap() - (-1.0f64).exp() / z).abs() < 1e-6);
}

#[test]
fn compute_malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let out = run_in(
        dir.path(),
        &["compute", "relent", "--rho", &bad, "--sigma", &bad],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_small_run_is_deterministic_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str, csv: Option<&str>| {
        let mut v = vec![
            "verify".to_string(),
            "--seed".into(),
            "42".into(),
            "--trials".into(),
            "3".into(),
            "--alpha".into(),
            "2.0".into(),
            "--out".into(),
            out.to_string(),
        ];
        if let Some(csv) = csv {
            v.push("--csv".into());
            v.push(csv.to_string());
        }
        v
    };

    let a1: Vec<String> = args("report1.json", Some("rows.csv"));
    let out = run_in(
        dir.path(),
        &a1.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let a2: Vec<String> = args("report2.json", None);
    let out = run_in(
        dir.path(),
        &a2.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    assert_eq!(code(&out), 0);

    let r1 = fs::read(dir.path().join("report1.json")).unwrap();
    let r2 = fs::read(dir.path().join("report2.json")).unwrap();
    assert_eq!(r1, r2, "same seed must give byte-identical reports");

    let report: Value = serde_json::from_slice(&r1).unwrap();
    assert_eq!(report["passed"], json!(true));
    assert!(report["checks"].as_array().unwrap().len() > 10);

    let csv = fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert!(csv.starts_with("check_name,trial,violation"));
    assert!(csv.lines().count() > 10);

    // standalone witness replay files, one per search cell that found one
    let witness_dir = dir.path().join("report1-witnesses");
    assert!(witness_dir.is_dir());
    let entries: Vec<_> = fs::read_dir(&witness_dir).unwrap().collect();
    assert!(!entries.is_empty());
}

#[test]
fn verify_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--trials", "0"]);
    assert_eq!(code(&out), 2);
    let out = run_in(dir.path(), &["verify", "--dims", "1,2", "--trials", "2"]);
    assert_eq!(code(&out), 2);
}

fn write_problem(
    dir: &Path,
    name: &str,
    p: &[f64],
    p_target: &[f64],
    opts: Option<Value>,
) -> String {
    let matrix = |d: &[f64]| {
        json!({
            "dim": 2,
            "re": [[d[0], 0.0], [0.0, d[1]]],
            "im": [[0.0, 0.0], [0.0, 0.0]],
        })
    };
    let h = json!({"dim": 2, "re": [[0.0, 0.0], [0.0, 1.0]], "im": [[0.0,0.0],[0.0,0.0]]});
    let mut problem = json!({
        "beta": 1.0,
        "rho": matrix(p),
        "sigma": matrix(p_target),
        "h": h,
        "k": h,
    });
    if let Some(opts) = opts {
        problem["options"] = opts;
    }
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(&problem).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn feasible_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let gibbs = [0.7310585786300049, 0.2689414213699951];

    // identity instance: feasible
    let p = write_problem(dir.path(), "id.json", &gibbs, &gibbs, None);
    let out = run_in(dir.path(), &["feasible", "--problem", &p]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verdict"], json!("feasible"));

    // cooling toward Gibbs: feasible with a witness
    let p = write_problem(dir.path(), "fwd.json", &[0.9, 0.1], &[0.8, 0.2], None);
    let out = run_in(dir.path(), &["feasible", "--problem", &p]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert!(report["witness"].is_object());

    // athermality increase: screened out
    let p = write_problem(dir.path(), "rev.json", &[0.8, 0.2], &[0.9, 0.1], None);
    let out = run_in(dir.path(), &["feasible", "--problem", &p]);
    assert_eq!(code(&out), 3);
    assert_eq!(
        stdout_json(&out)["verdict"],
        json!("infeasible_by_monotone")
    );
    assert!(stdout_json(&out)["monotone_gap"].as_f64().unwrap() > 1e-9);

    // malformed problem file
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "[]").unwrap();
    let out = run_in(
        dir.path(),
        &["feasible", "--problem", &bad.to_string_lossy()],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn feasible_budget_exhaustion_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    // an off-diagonal (non-commuting) state routes to the projection solver;
    // a one-iteration budget against an unreachable tolerance must report
    // honestly rather than claim feasibility
    let problem = json!({
        "beta": 1.0,
        "rho": {"dim": 2, "re": [[0.6, 0.2], [0.2, 0.4]], "im": [[0.0,0.0],[0.0,0.0]]},
        "sigma": {"dim": 2, "re": [[0.6, 0.0], [0.0, 0.4]], "im": [[0.0,0.0],[0.0,0.0]]},
        "h": {"dim": 2, "re": [[0.0, 0.0], [0.0, 1.0]], "im": [[0.0,0.0],[0.0,0.0]]},
        "k": {"dim": 2, "re": [[0.0, 0.0], [0.0, 1.0]], "im": [[0.0,0.0],[0.0,0.0]]},
        "options": {"max_iter": 1, "residual_tol": 1e-300, "stall_window": 10},
    });
    let path = dir.path().join("tight.json");
    fs::write(&path, serde_json::to_string(&problem).unwrap()).unwrap();
    let out = run_in(
        dir.path(),
        &["feasible", "--problem", &path.to_string_lossy()],
    );
    assert_eq!(code(&out), 4);
    assert_eq!(
        stdout_json(&out)["verdict"],
        json!("not_found_within_budget")
    );
}

#[test]
fn demo_las_inequality_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["demo", "las", "--csv", "las.csv"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    for row in report["rows"].as_array().unwrap() {
        let d_n = row["d_n"].as_f64().unwrap();
        let bound = row["bound"].as_f64().unwrap();
        assert!(d_n >= bound - 1e-9);
    }
    let csv = fs::read_to_string(dir.path().join("las.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "n,d_n,bound,max_marginal_distance"
    );
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn demo_cc_swap_bell_gap_is_two_ln_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["demo", "cc-swap"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    let gap = report["athermality_gap"].as_f64().unwrap();
    assert!((gap - 2.0 * 2.0f64.ln()).abs() < 1e-9);
    let drift = report["catalyst_marginal_distances"][0].as_f64().unwrap();
    assert!(drift <= 1e-12);
    assert_eq!(report["transition"]["passed"], json!(true));
}

#[test]
fn demo_mc_swap_product_input_has_zero_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["demo", "mc-swap", "--input", "product", "--seed", "11"],
    );
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert!(report["athermality_gap"].as_f64().unwrap().abs() < 1e-10);
    assert!(
        report["mutual_information_over_beta"]
            .as_f64()
            .unwrap()
            .abs()
            < 1e-10
    );
}

#[test]
fn demo_bad_subtarget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["demo", "quench"]);
    assert_eq!(code(&out), 2);
}
