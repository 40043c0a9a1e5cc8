use std::path::Path;
use std::process::{Command, Output};

use qnute::{bs_tridiagonal, BSParams, Boundary, Grid};
use tempfile::TempDir;

fn qnute(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_qnute"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .env_remove("QNUTE_OUT")
        .current_dir(dir)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(rows: &[Vec<String>], idx: usize) -> Vec<f64> {
    rows.iter().map(|r| r[idx].parse().unwrap()).collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn price_writes_both_tables() {
    let dir = TempDir::new().unwrap();
    let out = qnute(dir.path(), &["price", "--out", "o"], "grid.n = 3\nschedule.steps = 50\n");
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("o/prices.csv"));
    assert_eq!(header, ["x", "qnute_price", "reference_pde_price", "analytic_price"]);
    assert_eq!(rows.len(), 8);
    let q = column(&rows, 1);
    assert!(q.windows(2).all(|w| w[1] >= w[0] - 1e-9), "call prices should not decrease: {q:?}");

    let (header, rows) = read_csv(&dir.path().join("o/trajectory.csv"));
    assert_eq!(header, ["step", "tau", "c", "cumulative_scale", "residual", "step_fidelity"]);
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[49][0], "50");
    assert!(rows[49][1].starts_with("3.00000000000e0"));
    assert!(dir.path().join("o/config.txt").exists());
}

#[test]
fn zero_steps_return_the_payoff() {
    let dir = TempDir::new().unwrap();
    let out = qnute(dir.path(), &["price", "--out", "o"], "grid.n = 3\nschedule.steps = 0\ncontract = put:75\n");
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&dir.path().join("o/prices.csv"));
    for r in &rows {
        let x: f64 = r[0].parse().unwrap();
        let q: f64 = r[1].parse().unwrap();
        assert!((q - (75.0 - x).max(0.0)).abs() < 1e-9, "{r:?}");
        assert_eq!(r[2], r[3]);
    }
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = "grid.n = 3\nschedule.steps = 40\ncontract = strangle:50,100\n";
    assert!(qnute(dir.path(), &["price", "--out", "a"], cfg).status.success());
    assert!(qnute(dir.path(), &["price", "--out", "b"], cfg).status.success());
    for f in ["prices.csv", "trajectory.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn environment_overrides_out_flag() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "grid.n = 2\nschedule.steps = 5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qnute"))
        .args(["price", "--config", "run.cfg", "--out", "flag", "--seed", "7"])
        .env("QNUTE_OUT", "env")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("env/prices.csv").exists());
    assert!(!dir.path().join("flag").exists());
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = qnute(dir.path(), &["price"], "contract = call:\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("contract"), "{}", stderr(&out));

    let out = qnute(dir.path(), &["price"], "grid.spacing = 3\n");
    assert_eq!(out.status.code(), Some(2));

    let out = qnute(dir.path(), &["fidelity-sweep"], "sweep.options =\n");
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_qnute")).args(["price", "--config", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn protocol_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = qnute(dir.path(), &["price", "--out", "o"], "contract = butterfly:50,100\ngrid.n = 4\n");
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("both boundaries"), "{}", stderr(&out));
}

#[test]
fn sweep_skips_oversized_domains() {
    let dir = TempDir::new().unwrap();
    let cfg = "sweep.options = call:75; put:75\nsweep.n = 2, 3\nsweep.domain_sizes = 2, 3\nschedule.steps = 60\n";
    let out = qnute(dir.path(), &["fidelity-sweep", "--out", "o", "--threads", "2"], cfg);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("skipping call:75 n=2 D=3"));
    let (header, rows) = read_csv(&dir.path().join("o/fidelity.csv"));
    assert_eq!(header, ["option", "n", "D", "mu_F", "sigma_F"]);
    let keys: Vec<_> = rows.iter().map(|r| format!("{} {} {}", r[0], r[1], r[2])).collect();
    assert_eq!(keys, ["call:75 2 2", "call:75 3 2", "call:75 3 3", "put:75 2 2", "put:75 3 2", "put:75 3 3"]);
    for r in rows.iter().filter(|r| r[1] == r[2]) {
        assert!(r[3].parse::<f64>().unwrap() > 0.9999, "{r:?}");
    }
}

#[test]
fn decompose_matches_tridiagonal() {
    let dir = TempDir::new().unwrap();
    let out = qnute(dir.path(), &["decompose", "--out", "o"], "grid.n = 2\nhamiltonian.boundary = central\n");
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Pauli terms"));
    let (header, rows) = read_csv(&dir.path().join("o/hamiltonian_dense.csv"));
    assert_eq!(header, ["row", "col", "real", "imag"]);
    assert_eq!(rows.len(), 16);
    let want = bs_tridiagonal(&Grid::new(0.0, 150.0, 2).unwrap(), &BSParams::new(0.04, 0.2).unwrap(), Boundary::Central).dense();
    for r in &rows {
        let (i, j): (usize, usize) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let re: f64 = r[2].parse().unwrap();
        assert!((re - want[(i, j)]).abs() < 1e-10, "{r:?}");
        assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
    }
    assert!(std::fs::read_to_string(dir.path().join("o/hamiltonian_pauli.txt")).unwrap().contains(" II"));
}

#[test]
fn decompose_guards() {
    let dir = TempDir::new().unwrap();
    let out = qnute(dir.path(), &["decompose", "--out", "o"], "grid.n = 1\n");
    assert_eq!(out.status.code(), Some(2));
    let out = qnute(dir.path(), &["decompose", "--out", "o"], "grid.n = 11\n");
    assert_eq!(out.status.code(), Some(2));
    let out = qnute(dir.path(), &["decompose", "--out", "z"], "params.r = 0\nparams.sigma = 0\ngrid.n = 3\n");
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("0 Pauli terms"));
}
