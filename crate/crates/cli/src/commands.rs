//! Command implementations.

use std::fs;
use std::io::Write;
use std::path::Path;

use qbs_core::analysis::{
    bound_derivative_modulus_with, bound_lipschitz, bound_local_second_modulus_with,
    convergence_sweep, interior_grid, q_sweep, voronovskaja_deviation_with, GridSamples, LimitForm,
    SweepResult, SweepSettings, DEFAULT_MODULUS_GRID,
};
use qbs_core::moments::{delta_n, ClosedForms, MomentReport, QSequence};
use qbs_core::{OperatorSpec, QValue, TargetFunction};

use crate::config::{Command, QSource, RunConfig, DEFAULT_N_LIST, DEFAULT_Q_LIST};
use crate::error::CliError;
use crate::expr::parse_function;
use crate::table::CsvTable;
use crate::verify::run_verify;

/// Runs one command. Tables go to `--out` when given, otherwise to `out`;
/// diagnostics go to `err`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cfg.command {
        Command::Eval => emit(cfg, &eval(cfg)?, out),
        Command::Moments => emit(cfg, &moments(cfg)?, out),
        Command::Sweep => {
            let result = sweep(cfg)?;
            emit(cfg, &sweep_table(&result)?, out)?;
            report_failures(&result, err)
        }
        Command::Voronovskaja => emit(cfg, &voronovskaja(cfg)?, out),
        Command::Bounds => emit(cfg, &bounds(cfg)?, out),
        Command::Verify => verify(cfg, out, err),
        Command::Plot => plot(cfg, out, err),
    }
}

fn emit(cfg: &RunConfig, table: &CsvTable, out: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => table.write_to(fs::File::create(path)?)?,
        None => table.write_to(out)?,
    }
    Ok(())
}

fn function(cfg: &RunConfig, default: &str) -> Result<TargetFunction, CliError> {
    Ok(parse_function(cfg.function.as_deref().unwrap_or(default))?)
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn eval(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let n = cfg.single_n(16)?;
    let q = cfg
        .kind
        .uses_q()
        .then(|| cfg.single_q(n, 0.9))
        .transpose()?;
    let spec = OperatorSpec::new(cfg.kind, n, q, Some(cfg.params))?;
    let f = function(cfg, "fig6")?;
    let op = spec.bind(&f, &cfg.tol)?;
    let xs = match &cfg.x {
        Some(xs) => xs.clone(),
        None => spec.domain().grid(cfg.grid.unwrap_or(11)),
    };
    let mut t = CsvTable::new(["x", "value", "outside_domain"]);
    for x in xs {
        let e = op.evaluate(x)?;
        t.push_values(&[x, e.value, flag(e.outside_domain)])?;
    }
    Ok(t)
}

fn moments(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let n = cfg.single_n(8)?;
    let q = cfg.single_q(n, 0.9)?;
    let spec = OperatorSpec::q_kantorovich_stancu(n, q, cfg.params)?;
    let mut t = CsvTable::new(["x", "m0", "m1", "m2", "central2", "central2_bound"]);
    for x in spec.domain().grid(cfg.grid.unwrap_or(21)) {
        let r = MomentReport::closed(n, q, cfg.params, x)?;
        t.push_values(&[x, r.m0, r.m1, r.m2, r.central2, r.central2_bound])?;
    }
    Ok(t)
}

fn settings(cfg: &RunConfig) -> SweepSettings {
    SweepSettings {
        error_grid: cfg.grid_or_default(),
        modulus_grid: DEFAULT_MODULUS_GRID,
        tol: cfg.tol,
    }
}

fn sequence(cfg: &RunConfig, default: QSequence) -> Result<QSequence, CliError> {
    match &cfg.q {
        None => Ok(default),
        Some(QSource::Single(q)) => Ok(QSequence::Fixed(*q)),
        Some(QSource::Sequence(s)) => Ok(*s),
        Some(QSource::List(_)) => Err(CliError::Usage(format!(
            "{:?} needs --q or --qseq, not --q-list",
            cfg.command
        ))),
    }
}

fn n_list(cfg: &RunConfig, default: &[usize]) -> Vec<usize> {
    match (&cfg.n, &cfg.n_list) {
        (Some(n), _) => vec![*n],
        (None, Some(ns)) => ns.clone(),
        (None, None) => default.to_vec(),
    }
}

fn sweep(cfg: &RunConfig) -> Result<SweepResult, CliError> {
    let f = function(cfg, "fig6")?;
    if let Some(QSource::List(qs)) = &cfg.q {
        let n = cfg.single_n(32)?;
        return Ok(q_sweep(&f, n, qs, &cfg.params, &settings(cfg))?);
    }
    let qseq = sequence(cfg, QSequence::OneMinusCOverN(1.0))?;
    let ns = n_list(cfg, &DEFAULT_N_LIST);
    Ok(convergence_sweep(
        &f,
        qseq,
        &cfg.params,
        &ns,
        &settings(cfg),
    )?)
}

fn sweep_table(r: &SweepResult) -> Result<CsvTable, CliError> {
    let mut t = CsvTable::new(["n", "q", "sup_error", "bound", "x_argmax"]);
    for row in &r.rows {
        t.push(vec![
            Some(row.n as f64),
            Some(row.q),
            Some(row.sup_error),
            row.bound,
            Some(row.x_argmax),
        ])?;
    }
    Ok(t)
}

fn report_failures(r: &SweepResult, err: &mut dyn Write) -> Result<(), CliError> {
    for (n, q, e) in &r.failures {
        if q.is_nan() {
            writeln!(err, "row n={n} failed: {e}")?;
        } else {
            writeln!(err, "row n={n} q={q} failed: {e}")?;
        }
    }
    if r.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(r.failures[0].2.clone()))
    }
}

fn voronovskaja(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let f = function(cfg, "x2")?;
    let qseq = sequence(cfg, QSequence::NthRootOfA(0.5))?;
    let ns = n_list(cfg, &[16, 64, 256]);
    let xs = interior_grid(qseq, &cfg.params, &ns, cfg.grid.unwrap_or(5))?;
    let mut t = CsvTable::new(["n", "q", "deviation", "deviation_derived"]);
    for n in ns {
        let q = qseq.q_at(n)?;
        let printed = voronovskaja_deviation_with(
            &f,
            qseq,
            &cfg.params,
            n,
            &xs,
            &cfg.tol,
            LimitForm::Printed,
        )?;
        let derived = voronovskaja_deviation_with(
            &f,
            qseq,
            &cfg.params,
            n,
            &xs,
            &cfg.tol,
            LimitForm::Derived,
        )?;
        t.push_values(&[n as f64, q.get(), printed, derived])?;
    }
    Ok(t)
}

fn bounds(cfg: &RunConfig) -> Result<CsvTable, CliError> {
    let f = function(cfg, "fig6")?;
    let n = cfg.single_n(16)?;
    let q = cfg.single_q(n, 0.9)?;
    let p = cfg.params;
    let spec = OperatorSpec::q_kantorovich_stancu(n, q, p)?;
    let op = spec.bind(&f, &cfg.tol)?;
    let samples = GridSamples::new(&f, DEFAULT_MODULUS_GRID)?;
    let global = delta_n(n, q, &p)
        .ok()
        .map(|d| 2.0 * samples.modulus(d).value);
    let lip = bound_lipschitz(&f, n, q, &p).ok();
    let fprime = match (f.d1(), f.derivative()) {
        (Some(d1), Ok(df)) => Some((d1.clone(), GridSamples::new(&df, DEFAULT_MODULUS_GRID)?)),
        _ => None,
    };
    let mut t = CsvTable::new([
        "x",
        "error",
        "global_bound",
        "local_bound",
        "derivative_bound",
        "lip_bound",
    ]);
    for x in spec.domain().grid(cfg.grid.unwrap_or(21)) {
        let error = (op.eval(x)? - f.eval(x)).abs();
        let local = bound_local_second_modulus_with(&samples, n, q, &p, x, cfg.const_c).ok();
        let deriv = fprime
            .as_ref()
            .map(|(d1, s)| bound_derivative_modulus_with(s, d1(x), n, q, &p, x));
        t.push(vec![Some(x), Some(error), global, local, deriv, lip])?;
    }
    Ok(t)
}

fn verify(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let forms = match cfg.mutate {
        Some(m) => ClosedForms::mutated(m),
        None => ClosedForms::exact(),
    };
    let report = run_verify(&forms, &cfg.tol)?;
    let text = report.render();
    match &cfg.out {
        Some(path) => fs::write(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    err.write_all(report.diagnostics(10).as_bytes())?;
    match report.failures() {
        0 => Ok(()),
        k => Err(CliError::Verification(k)),
    }
}

const PLOT_SCRIPT: &str = r#"# gnuplot script; run from this directory with `gnuplot plot.gp`
set datafile separator ','
set terminal pngcairo size 1500,450
set output 'convergence.png'
set multiplot layout 1,3
set key autotitle columnhead left top
set title 'f and its approximations'
set xlabel 'x'
plot for [i=2:COLUMNS_CURVES] 'curves.csv' using 1:i with lines
set title 'sup error against n'
set xlabel 'n'
set logscale xy
plot 'sweep.csv' using 1:3 with linespoints title 'sup error', \
     'sweep.csv' using 1:4 with linespoints title 'bound'
set title 'sup error against q'
set xlabel 'q'
unset logscale x
plot 'qsweep.csv' using 2:3 with linespoints title 'sup error'
unset multiplot
"#;

fn plot(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| "qbs-plot".into());
    fs::create_dir_all(&dir)?;
    let f = function(cfg, "fig6")?;
    let s = settings(cfg);
    let qseq = sequence(cfg, QSequence::OneMinusCOverN(1.0))?;
    let ns = n_list(cfg, &DEFAULT_N_LIST);

    let by_n = convergence_sweep(&f, qseq, &cfg.params, &ns, &s)?;
    write_table(&dir.join("sweep.csv"), &sweep_table(&by_n)?)?;
    let qs = DEFAULT_Q_LIST
        .iter()
        .map(|&q| QValue::new(q))
        .collect::<Result<Vec<_>, _>>()?;
    let by_q = q_sweep(&f, 32, &qs, &cfg.params, &s)?;
    write_table(&dir.join("qsweep.csv"), &sweep_table(&by_q)?)?;

    let mut header = vec!["x".to_owned(), "f".to_owned()];
    let mut ops = Vec::new();
    for &n in &ns {
        match qseq.q_at(n) {
            Ok(q) => {
                header.push(format!("n={n}"));
                ops.push(OperatorSpec::q_kantorovich_stancu(n, q, cfg.params)?.bind(&f, &cfg.tol)?);
            }
            Err(e) => writeln!(err, "curve n={n} skipped: {e}")?,
        }
    }
    let columns = header.len();
    let mut curves = CsvTable::new(header);
    let count = cfg.grid.unwrap_or(201);
    for i in 0..count {
        let x = i as f64 / (count - 1) as f64;
        let mut row = vec![Some(x), Some(f.eval(x))];
        for op in &ops {
            row.push(Some(op.eval(x)?));
        }
        curves.push(row)?;
    }
    write_table(&dir.join("curves.csv"), &curves)?;
    fs::write(
        dir.join("plot.gp"),
        PLOT_SCRIPT.replace("COLUMNS_CURVES", &columns.to_string()),
    )?;
    writeln!(
        out,
        "wrote sweep.csv, qsweep.csv, curves.csv and plot.gp to {}",
        dir.display()
    )?;
    report_failures(&by_n, err)?;
    report_failures(&by_q, err)
}

fn write_table(path: &Path, t: &CsvTable) -> Result<(), CliError> {
    t.write_to(fs::File::create(path)?)?;
    Ok(())
}
