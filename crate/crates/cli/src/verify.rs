//! The oracle verification suite: closed forms against direct evaluation.

use std::fmt::Write as _;

use qbs_core::basis::stancu_domain;
use qbs_core::moments::{
    brute_force_moments, central2_bound, delta_n_x, local_shift_coeffs, ClosedForms,
};
use qbs_core::{JacksonTolerance, OperatorSpec, QValue, Result, StancuParams, TargetFunction};
use rayon::prelude::*;

pub const GRID_N: [usize; 5] = [1, 2, 4, 8, 16];
pub const GRID_Q: [f64; 4] = [0.3, 0.5, 0.9, 0.99];
pub const GRID_PARAMS: [(f64, f64, f64, f64); 4] = [
    (0.0, 0.0, 0.0, 0.0),
    (1.0, 2.0, 3.0, 4.0),
    (0.0, 1.0, 1.0, 2.0),
    (2.0, 2.0, 2.0, 2.0),
];
pub const GRID_X: usize = 11;

const MOMENT_TOL: f64 = 1e-10;
const UNITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    /// Offending inputs, for the diagnostic stream.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    /// Extra human-readable findings.
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    /// One `PASS|FAIL <name> <max-deviation>` line per check.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(s, "{tag} {} {:.3e}", c.name, c.max_deviation).unwrap();
        }
        s
    }

    /// Notes and violations, capped per check.
    pub fn diagnostics(&self, per_check: usize) -> String {
        let mut s = String::new();
        for n in &self.notes {
            writeln!(s, "{n}").unwrap();
        }
        for c in self.checks.iter().filter(|c| !c.violations.is_empty()) {
            writeln!(s, "{}: {} violation(s)", c.name, c.violations.len()).unwrap();
            for v in c.violations.iter().take(per_check) {
                writeln!(s, "  {v}").unwrap();
            }
        }
        s
    }
}

/// Accumulates one check across grid points.
struct Check {
    name: &'static str,
    limit: f64,
    worst: f64,
    violations: Vec<String>,
}

impl Check {
    fn new(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            limit,
            worst: 0.0,
            violations: Vec::new(),
        }
    }

    /// Records a deviation; anything above the limit (or NaN) is a violation.
    fn record(&mut self, dev: f64, at: impl FnOnce() -> String) {
        if dev.is_nan() || dev > self.worst {
            self.worst = if dev.is_nan() { f64::NAN } else { dev };
        }
        if dev.is_nan() || dev > self.limit {
            self.violations
                .push(format!("{} (deviation {dev:.3e})", at()));
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            passed: self.violations.is_empty(),
            max_deviation: self.worst,
            violations: self.violations,
        }
    }
}

/// Direct evaluations at one `(params, q, n)`.
struct Case {
    params: StancuParams,
    q: QValue,
    n: usize,
    xs: Vec<f64>,
    moments: Vec<[f64; 3]>,
    central: Vec<f64>,
}

fn compute_case(
    p: (f64, f64, f64, f64),
    qv: f64,
    n: usize,
    tol: &JacksonTolerance,
) -> Result<Case> {
    let params = StancuParams::new(p.0, p.1, p.2, p.3)?;
    let q = QValue::new(qv)?;
    let xs = stancu_domain(n, q, &params).grid(GRID_X);
    let moments = brute_force_moments(n, q, &params, &xs, tol)?;
    let spec = OperatorSpec::q_kantorovich_stancu(n, q, params)?;
    let central = xs
        .iter()
        .map(|&x| {
            let f = TargetFunction::new("(t-x)^2", move |t| (t - x) * (t - x))?;
            spec.bind(&f, tol)?.eval(x)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Case {
        params,
        q,
        n,
        xs,
        moments,
        central,
    })
}

/// Runs every check with the given closed forms.
pub fn run_verify(forms: &ClosedForms, tol: &JacksonTolerance) -> Result<VerifyReport> {
    let grid: Vec<_> = GRID_PARAMS
        .iter()
        .flat_map(|&p| {
            GRID_Q
                .iter()
                .flat_map(move |&q| GRID_N.iter().map(move |&n| (p, q, n)))
        })
        .collect();
    let cases = grid
        .par_iter()
        .map(|&(p, q, n)| compute_case(p, q, n, tol))
        .collect::<Result<Vec<Case>>>()?;

    let mut unity = Check::new("partition-of-unity", UNITY_TOL);
    let mut m1 = Check::new("moment1-closed", MOMENT_TOL);
    let mut m2 = Check::new("moment2-closed", MOMENT_TOL);
    let mut c2 = Check::new("central2-closed", MOMENT_TOL);
    let mut dual = Check::new("dual-reading-ordinary-square", MOMENT_TOL);
    let mut nonneg = Check::new("central2-nonnegative", 1e-12);
    let mut shift = Check::new("local-shift-identity", 1e-12);
    let mut dominate = Check::new("delta-n-x-dominates", 1e-10);
    let mut scan = Check::new("central2-bound-scan", 1e-12);
    let mut q_shifted_worst = 0.0f64;

    for case in &cases {
        let Case { params, q, n, .. } = case;
        let coeffs = forms.coefficients(*n, *q, params);
        let bound = central2_bound(*n, *q, params);
        let (an, bn) = local_shift_coeffs(*n, *q, params);
        let (a1, a2, b1, b2) = params.as_tuple();
        for ((&x, [bm0, bm1, bm2]), &bc2) in case.xs.iter().zip(&case.moments).zip(&case.central) {
            let at = || format!("n={n} q={} params=({a1},{a2},{b1},{b2}) x={x}", q.get());
            unity.record((bm0 - 1.0).abs(), at);
            m1.record((bm1 - coeffs.m1(x)).abs(), at);
            let dev2 = (bm2 - coeffs.m2(x)).abs();
            m2.record(dev2, at);
            let cc2 = coeffs.central2(x);
            c2.record((bc2 - cc2).abs(), at);
            let dev_q = (bm2 - coeffs.m2_q_shifted(x)).abs();
            q_shifted_worst = q_shifted_worst.max(dev_q);
            // the ordinary reading must match and be the closer one
            dual.record(if dev2 <= dev_q { dev2 } else { f64::INFINITY }, at);
            nonneg.record((-cc2).max(0.0), at);
            shift.record((an * x + bn - coeffs.m1(x)).abs(), at);
            let dom = cc2 + (an * x + bn - x).powi(2);
            dominate.record((dom - delta_n_x(*n, *q, params, x)).max(0.0), at);
            scan.record((cc2 - bound).max(0.0), || {
                format!("{} central2={cc2:.6e} bound={bound:.6e}", at())
            });
        }
    }

    let mut spot = Check::new("central2-bound-spot", 1e-9);
    let near_one = QValue::new(1.0 - 1e-12)?;
    let zero = StancuParams::zero();
    for n in 1..=32 {
        let want = 1.0 / (n as f64 + 1.0);
        spot.record((central2_bound(n, near_one, &zero) - want).abs(), || {
            format!("n={n}")
        });
    }

    let mut classical = Check::new("classical-central2-limit", 1e-8);
    let q_cl = QValue::new(1.0 - 1e-10)?;
    for n in GRID_N {
        let nf = n as f64;
        let coeffs = forms.coefficients(n, q_cl, &zero);
        for i in 0..GRID_X {
            let x = i as f64 / (GRID_X - 1) as f64;
            let want = (nf * x * (1.0 - x) + (x - 0.5).powi(2) + 1.0 / 12.0) / (nf + 1.0).powi(2);
            classical.record((coeffs.central2(x) - want).abs(), || format!("n={n} x={x}"));
        }
    }

    let dual_ok = dual.violations.is_empty();
    let notes = vec![format!(
        "dual-reading: ordinary square deviation {:.3e}, q-shifted product deviation {q_shifted_worst:.3e}; brute force matches the {} reading",
        dual.worst,
        if dual_ok { "ordinary-square" } else { "q-shifted or neither" }
    )];

    Ok(VerifyReport {
        checks: [
            unity, m1, m2, c2, dual, nonneg, shift, dominate, scan, spot, classical,
        ]
        .into_iter()
        .map(Check::finish)
        .collect(),
        notes,
    })
}
