//! End-to-end checks of the binary through its public command surface.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmean-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn pmean_inline_values() {
    let out = run(&["pmean", "--values", "0,0,1", "--p", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("pmean = 0.414213562372"), "{text}");

    let out = run(&["pmean", "--values", "1,2,3", "--p", "2"]);
    assert!(stdout(&out).contains("pmean = 2"));

    let out = run(&["pmean", "--values", "0,1,2,3,4,5,6,7,8,9,10", "--p", "inf"]);
    assert!(stdout(&out).contains("pmean = 5"));
}

#[test]
fn pmean_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.txt");
    std::fs::write(&path, "0,2\n1,1\n2,1\n").unwrap();
    let out = run(&["pmean", "--file", path.to_str().unwrap(), "--p", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("pmean = 0.5"));

    // empty input is a usage error
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let out = run(&["pmean", "--file", empty.to_str().unwrap(), "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));

    // malformed file
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1\nnot-a-number\n").unwrap();
    let out = run(&["pmean", "--file", bad.to_str().unwrap(), "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    // no samples at all
    let out = run(&["pmean", "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn amvp_emits_rows_and_footer() {
    let out = run(&[
        "amvp",
        "--field",
        "rsq",
        "--point",
        "1,0,0",
        "--p",
        "2",
        "--eps",
        "0.4,0.2",
        "--resolution",
        "48",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("eps,resolution,nodes,mu,mu_minus_u,predicted,remainder"));
    assert!(text.contains("# leading_order"));

    // p-harmonic field flagged degenerate
    let out = run(&[
        "amvp", "--field", "x1", "--point", "1,0,0", "--p", "3", "--eps", "0.4,0.2",
        "--resolution", "32",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# degenerate"));

    // vanishing gradient is a numerical failure
    let out = run(&[
        "amvp", "--field", "rsq", "--point", "0,0,0", "--p", "3", "--eps", "0.2",
        "--resolution", "32",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "shape = koranyi-ball\nradius = 0.4\neps = 0.24\np = 3\ndatum = x1\n",
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let run1 = run(&[
        "solve",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert!(run1.status.success(), "{}", String::from_utf8_lossy(&run1.stderr));
    let run2 = run(&[
        "solve",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(run2.status.success());
    let csv_a = std::fs::read(out_a.with_extension("csv")).unwrap();
    let csv_b = std::fs::read(out_b.with_extension("csv")).unwrap();
    assert_eq!(csv_a, csv_b, "repeated runs must be bit-identical");
    let json_a = std::fs::read(out_a.with_extension("json")).unwrap();
    let json_b = std::fs::read(out_b.with_extension("json")).unwrap();
    assert_eq!(json_a, json_b);
    assert!(stdout(&run1).contains("iterations"));

    // CLI flag overrides the config entry: constant datum converges at once
    let out_c = dir.path().join("c");
    let run3 = run(&[
        "solve",
        "--config",
        cfg_path.to_str().unwrap(),
        "--datum",
        "x3",
        "--out",
        out_c.to_str().unwrap(),
    ]);
    assert!(run3.status.success());
    let csv_c = std::fs::read(out_c.with_extension("csv")).unwrap();
    assert_ne!(csv_a, csv_c);
}

#[test]
fn solve_rejects_bad_config() {
    // h above the coupling bound
    let out = run(&[
        "solve", "--shape", "koranyi-ball", "--radius", "0.4", "--eps", "0.24", "--h", "0.1",
        "--p", "3", "--datum", "x1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // unknown shape
    let out = run(&[
        "solve", "--shape", "pentagon", "--eps", "0.2", "--datum", "x1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // missing datum
    let out = run(&["solve", "--shape", "koranyi-ball", "--radius", "0.4", "--eps", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn converge_table_with_fit() {
    let out = run(&[
        "converge",
        "--shape",
        "koranyi-annulus",
        "--r-inner",
        "0.3",
        "--r-outer",
        "0.6",
        "--eps",
        "0.3,0.2",
        "--p",
        "3",
        "--datum",
        "radial-fit:0,1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("eps,h,n_interior,iterations,final_residual,sup_error"));
    assert!(text.contains("# fitted_rate"));

    // single-eps table: no fit footer value
    let out = run(&[
        "converge",
        "--shape",
        "koranyi-annulus",
        "--r-inner",
        "0.3",
        "--r-outer",
        "0.6",
        "--eps",
        "0.3",
        "--p",
        "3",
        "--datum",
        "radial-fit:0,1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# fitted_rate requires at least two"));
}

#[test]
fn boundary_iter_constants() {
    let out = run(&[
        "boundary-iter",
        "--mu",
        "0.5",
        "--p",
        "2",
        "--eta",
        "0.1",
        "--sup-g",
        "1",
        "--inf-g",
        "0",
        "--delta",
        "0.1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("theta = 0.974074074074074"), "{text}");
    assert!(text.contains("k0 = 141"), "{text}");

    // zero gap short-circuits to one iteration
    let out = run(&[
        "boundary-iter", "--mu", "0.5", "--p", "2", "--eta", "0.1", "--sup-g", "2", "--inf-g",
        "2", "--delta", "0.1",
    ]);
    assert!(stdout(&out).contains("k0 = 1"));

    // p = 4 prints the logarithmic-limit caveat
    let out = run(&[
        "boundary-iter", "--mu", "0.5", "--p", "4", "--eta", "0.1", "--sup-g", "1", "--inf-g",
        "0", "--delta", "0.1",
    ]);
    assert!(stdout(&out).contains("logarithmic limit"));
}

#[test]
fn verify_selected_fast_criteria() {
    let out = run(&[
        "verify",
        "--criteria",
        "02-derived-exact-roots,03-c-p-constant",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 2);

    let out = run(&["verify", "--criteria", "nope"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["verify", "--list"]);
    assert!(stdout(&out).contains("06-convergence-p-harmonic"));
}

#[test]
fn help_and_usage_exit_codes() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_round_trip_precision() {
    // full precision survives a write/parse cycle
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run");
    let out = run(&[
        "solve",
        "--shape",
        "koranyi-ball",
        "--radius",
        "0.4",
        "--eps",
        "0.24",
        "--p",
        "3",
        "--datum",
        "rsq",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(out_path.with_extension("csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "x1,x2,x3,kind,value,residual");
    for line in lines.take(50) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        let v: f64 = cols[4].parse().unwrap();
        assert_eq!(format!("{v}"), cols[4], "shortest round-trip formatting");
    }
    assert!(Path::new(&out_path.with_extension("json")).exists());
}
