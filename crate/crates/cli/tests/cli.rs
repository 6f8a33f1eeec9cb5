use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use qbs_cli::main_with;
use qbs_cli::table::{format_number, CsvTable};

fn qbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbs"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Fresh scratch directory per test name.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qbs-test-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn table(o: &Output) -> CsvTable {
    CsvTable::read_from(o.stdout.as_slice()).unwrap()
}

fn column(t: &CsvTable, name: &str) -> Vec<f64> {
    t.column(name)
        .unwrap()
        .into_iter()
        .map(Option::unwrap)
        .collect()
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["sweep", "--n-list", "4,8,16", "--grid", "101"];
    let a = qbs(&args);
    let b = qbs(&args);
    let single = Command::new(env!("CARGO_BIN_EXE_qbs"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, single.stdout);
}

#[test]
fn eval_csv_round_trips() {
    let o = qbs(&[
        "eval",
        "--n",
        "6",
        "--q",
        "0.8",
        "--f",
        "sin(3*x)+x^2",
        "--grid",
        "7",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("x,value,outside_domain\n"));
    assert!(!text.contains('\r'));
    let t = table(&o);
    assert_eq!(t.rows().len(), 7);
    assert_eq!(t.to_csv_string(), text);
}

#[test]
fn moments_have_unit_mass_and_sweep_errors_fall() {
    let m = table(&qbs(&["moments", "--n", "10", "--q", "0.7"]));
    assert!(column(&m, "m0").iter().all(|v| (v - 1.0).abs() < 1e-12));
    assert!(column(&m, "central2").iter().all(|&v| v >= -1e-14));

    let s = table(&qbs(&["sweep"]));
    let errs = column(&s, "sup_error");
    assert_eq!(errs.len(), 5);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn exit_codes() {
    assert_eq!(qbs(&["eval", "--n", "4"]).status.code(), Some(0));
    // reversed parameter ordering
    assert_eq!(
        qbs(&["eval", "--alpha1", "5", "--alpha2", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qbs(&["eval", "--f", "sin(x"]).status.code(), Some(2));
    assert_eq!(qbs(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qbs(&["eval", "--q", "1.5"]).status.code(), Some(2));
    // q = 1 - 2/2 = 0 is not a valid parameter for the n = 2 row
    let s = qbs(&["sweep", "--qseq", "one-minus-c/N:2", "--n-list", "2,4"]);
    assert_eq!(s.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&s.stderr).contains("n=2"));
    assert_eq!(table(&s).rows().len(), 1);
    let v = qbs(&["verify", "--mutate", "m1-slope=1e-6"]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v)
        .lines()
        .any(|l| l.starts_with("FAIL moment1-closed")));
}

#[test]
fn help_goes_to_stdout() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    assert_eq!(main_with(["qbs", "--help"], &mut out, &mut err), 0);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("--qseq") && text.contains("voronovskaja"));
    assert!(!text.contains("--mutate"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.conf");
    fs::write(
        &cfg,
        "# eval settings\nn = 5\nq = 0.6\nx = 0.25,0.5\nmax_terms = 4096\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = qbs(&["eval", "--config", cfg]);
    let explicit = qbs(&["eval", "--n", "5", "--q", "0.6", "--x", "0.25,0.5"]);
    assert!(
        from_file.status.success(),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    assert_eq!(from_file.stdout, explicit.stdout);
    let overridden = qbs(&["eval", "--config", cfg, "--n", "7"]);
    let want = qbs(&["eval", "--n", "7", "--q", "0.6", "--x", "0.25,0.5"]);
    assert_eq!(overridden.stdout, want.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = scratch("out");
    let path = dir.join("m.csv");
    let o = qbs(&["moments", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let t = CsvTable::read_from(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(t.rows().len(), 21);
}

#[test]
fn plot_writes_all_files() {
    let dir = scratch("plot").join("figs");
    let o = qbs(&["plot", "--out", dir.to_str().unwrap(), "--grid", "51"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["sweep.csv", "qsweep.csv", "curves.csv", "plot.gp"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let curves = CsvTable::read_from(fs::File::open(dir.join("curves.csv")).unwrap()).unwrap();
    assert_eq!(curves.rows().len(), 51);
}

#[test]
fn voronovskaja_derived_column_shrinks() {
    let t = table(&qbs(&["voronovskaja"]));
    let d = column(&t, "deviation_derived");
    assert_eq!(d.len(), 3);
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

proptest! {
    #[test]
    fn formatted_numbers_parse_back(v in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let back: f64 = format_number(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 1e-11 * v.abs());
    }
}
