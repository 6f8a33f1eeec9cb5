//! Moduli of continuity, error bounds and convergence experiments.
//!
//! Moduli are estimated on an equispaced grid of `[0, 1]` and are lower
//! estimates of the true moduli.

use rayon::prelude::*;

use crate::basis::{stancu_domain, StancuDomain, StancuParams};
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::moments::{
    central2_exact, delta_n, delta_n_x, local_shift_coeffs, scaled_limits, scaled_limits_derived,
    QSequence,
};
use crate::operators::{BoundOperator, OperatorSpec};
use crate::qcalc::{q_integer, JacksonTolerance, QValue};

pub const DEFAULT_MODULUS_GRID: usize = 2001;
pub const DEFAULT_ERROR_GRID: usize = 501;
/// Constant of the local second-modulus estimate.
pub const DEFAULT_CONST_C: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub value: f64,
    pub grid_points: usize,
}

/// Values of `f` on an equispaced grid of `[0, 1]`, for repeated modulus queries.
#[derive(Debug, Clone)]
pub struct GridSamples {
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(f: &TargetFunction, grid_points: usize) -> Result<Self> {
        if grid_points < 2 {
            return Err(Error::InvalidArgument {
                arg: "grid_points",
                reason: format!("need at least 2, got {grid_points}"),
            });
        }
        let last = (grid_points - 1) as f64;
        let values = (0..grid_points).map(|i| f.eval(i as f64 / last)).collect();
        Ok(Self { values })
    }

    pub fn grid_points(&self) -> usize {
        self.values.len()
    }

    /// Largest index offset whose distance does not exceed `delta`.
    fn max_offset(&self, delta: f64) -> usize {
        let last = self.values.len() - 1;
        let steps = (delta * last as f64 * (1.0 + 1e-12)).floor();
        if steps.is_nan() || steps < 0.0 {
            0
        } else {
            (steps as usize).min(last)
        }
    }

    pub fn modulus(&self, delta: f64) -> ModulusEstimate {
        let m = self.max_offset(delta);
        let v = &self.values;
        let value = (0..v.len())
            .into_par_iter()
            .map(|i| {
                let hi = (i + m).min(v.len() - 1);
                v[i + 1..=hi]
                    .iter()
                    .map(|w| (w - v[i]).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        ModulusEstimate {
            delta,
            value,
            grid_points: v.len(),
        }
    }

    pub fn second_modulus(&self, delta: f64) -> ModulusEstimate {
        let m = self.max_offset(delta);
        let v = &self.values;
        let last = v.len() - 1;
        let value = (0..v.len())
            .into_par_iter()
            .map(|i| {
                let reach = m.min(i).min(last - i);
                (1..=reach)
                    .map(|j| (v[i - j] - 2.0 * v[i] + v[i + j]).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        ModulusEstimate {
            delta,
            value,
            grid_points: v.len(),
        }
    }
}

/// `omega(f; delta)` on a `grid_points` grid.
pub fn modulus(f: &TargetFunction, delta: f64, grid_points: usize) -> Result<ModulusEstimate> {
    Ok(GridSamples::new(f, grid_points)?.modulus(delta))
}

/// `omega_2(f; delta)` on a `grid_points` grid.
pub fn second_modulus(
    f: &TargetFunction,
    delta: f64,
    grid_points: usize,
) -> Result<ModulusEstimate> {
    Ok(GridSamples::new(f, grid_points)?.second_modulus(delta))
}

/// `max |L f(x) - f(x)|` over `grid_points` equispaced points of `domain`,
/// with the maximizing `x`.
pub fn sup_error(
    op: &BoundOperator,
    f: &TargetFunction,
    domain: &StancuDomain,
    grid_points: usize,
) -> Result<(f64, f64)> {
    let xs = domain.grid(grid_points);
    let errs = xs
        .par_iter()
        .map(|&x| Ok((op.eval(x)? - f.eval(x)).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = (0.0, xs[0]);
    for (&x, &e) in xs.iter().zip(&errs) {
        if e > best.0 {
            best = (e, x);
        }
    }
    Ok(best)
}

/// `2 omega(f; delta_n)`.
pub fn bound_global_modulus(
    f: &TargetFunction,
    n: usize,
    q: QValue,
    params: &StancuParams,
    grid_points: usize,
) -> Result<f64> {
    let d = delta_n(n, q, params)?;
    Ok(2.0 * modulus(f, d, grid_points)?.value)
}

/// `C omega_2(f; sqrt(delta_n(x))) + omega(f; |(a_n - 1)x + b_n|)`.
pub fn bound_local_second_modulus(
    f: &TargetFunction,
    n: usize,
    q: QValue,
    params: &StancuParams,
    x: f64,
    const_c: f64,
    grid_points: usize,
) -> Result<f64> {
    let samples = GridSamples::new(f, grid_points)?;
    bound_local_second_modulus_with(&samples, n, q, params, x, const_c)
}

/// [`bound_local_second_modulus`] reusing precomputed samples of `f`.
pub fn bound_local_second_modulus_with(
    samples: &GridSamples,
    n: usize,
    q: QValue,
    params: &StancuParams,
    x: f64,
    const_c: f64,
) -> Result<f64> {
    let (an, bn) = local_shift_coeffs(n, q, params);
    let dx = delta_n_x(n, q, params, x);
    if dx < 0.0 {
        return Err(Error::NegativeDeltaSquared(dx));
    }
    Ok(const_c * samples.second_modulus(dx.sqrt()).value
        + samples.modulus(((an - 1.0) * x + bn).abs()).value)
}

/// Inputs of the general estimate for positive linear operators at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShishaMondInputs {
    /// `L(1; x)`
    pub m0: f64,
    /// `L(t - x; x)`
    pub m1_shift: f64,
    /// `L((t - x)^2; x)`, nonnegative
    pub central2: f64,
    pub delta: f64,
    pub f_at_x: f64,
    pub fprime_at_x: f64,
    /// `omega(f'; delta)`
    pub omega_fprime_at_delta: f64,
}

pub fn bound_shisha_mond(i: &ShishaMondInputs) -> f64 {
    let s = i.central2.max(0.0).sqrt();
    i.f_at_x.abs() * (i.m0 - 1.0).abs()
        + i.fprime_at_x.abs() * i.m1_shift.abs()
        + s * (i.m0.max(0.0).sqrt() + s / i.delta) * i.omega_fprime_at_delta
}

/// `|(a_n - 1)x + b_n| |f'(x)| + 2 sqrt(D) omega(f'; sqrt(D))` with
/// `D = K((t - x)^2; x)`.
pub fn bound_derivative_modulus(
    f: &TargetFunction,
    n: usize,
    q: QValue,
    params: &StancuParams,
    x: f64,
    grid_points: usize,
) -> Result<f64> {
    let d1 = f.require_d1()?;
    let samples = GridSamples::new(&f.derivative()?, grid_points)?;
    Ok(bound_derivative_modulus_with(
        &samples,
        d1(x),
        n,
        q,
        params,
        x,
    ))
}

/// [`bound_derivative_modulus`] reusing precomputed samples of `f'`.
pub fn bound_derivative_modulus_with(
    fprime_samples: &GridSamples,
    fprime_at_x: f64,
    n: usize,
    q: QValue,
    params: &StancuParams,
    x: f64,
) -> f64 {
    let (a1, a2, b1, b2) = params.as_tuple();
    let qv = q.get();
    let d = q_integer(n + 1, q) + b1;
    let shift = (2.0 * qv / (1.0 + qv) * (q_integer(n, q) + b2) / d - 1.0) * x
        + (1.0 + a1 + qv * a1 - 2.0 * qv * a2) / ((1.0 + qv) * d);
    let s = central2_exact(n, q, params, x).max(0.0).sqrt();
    shift.abs() * fprime_at_x.abs() + 2.0 * s * fprime_samples.modulus(s).value
}

/// `M delta_n^alpha`.
pub fn bound_lipschitz(
    f: &TargetFunction,
    n: usize,
    q: QValue,
    params: &StancuParams,
) -> Result<f64> {
    let lip = f.require_lipschitz()?;
    Ok(lip.m * delta_n(n, q, params)?.powf(lip.alpha))
}

/// Which second scaled limit the Voronovskaja deviation is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitForm {
    /// The published limits.
    #[default]
    Printed,
    /// Limits derived from the closed-form moments.
    Derived,
}

/// `max_x |[n](K f(x) - f(x)) - (f'(x) L1 + f''(x) L2 / 2)|` with the
/// published limits.
pub fn voronovskaja_deviation(
    f: &TargetFunction,
    qseq: QSequence,
    params: &StancuParams,
    n: usize,
    x_grid: &[f64],
    tol: &JacksonTolerance,
) -> Result<f64> {
    voronovskaja_deviation_with(f, qseq, params, n, x_grid, tol, LimitForm::Printed)
}

pub fn voronovskaja_deviation_with(
    f: &TargetFunction,
    qseq: QSequence,
    params: &StancuParams,
    n: usize,
    x_grid: &[f64],
    tol: &JacksonTolerance,
    form: LimitForm,
) -> Result<f64> {
    let d1 = f.require_d1()?;
    let d2 = f.require_d2()?;
    let q = qseq.q_at(n)?;
    let a = qseq.limit();
    let op = OperatorSpec::q_kantorovich_stancu(n, q, *params)?.bind(f, tol)?;
    let nq = q_integer(n, q);
    let devs = x_grid
        .par_iter()
        .map(|&x| {
            let (l1, l2) = match form {
                LimitForm::Printed => scaled_limits(x, a, params),
                LimitForm::Derived => scaled_limits_derived(x, a, params),
            };
            let lhs = nq * (op.eval(x)? - f.eval(x));
            Ok((lhs - (d1(x) * l1 + 0.5 * d2(x) * l2)).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// `count` points spread over the middle 60% of the interval common to the
/// domains of every `n` in `n_list`.
pub fn interior_grid(
    qseq: QSequence,
    params: &StancuParams,
    n_list: &[usize],
    count: usize,
) -> Result<Vec<f64>> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for &n in n_list {
        let d = stancu_domain(n, qseq.q_at(n)?, params);
        lo = lo.max(d.a);
        hi = hi.min(d.b);
    }
    let inner = StancuDomain {
        a: lo + 0.2 * (hi - lo),
        b: hi - 0.2 * (hi - lo),
    };
    Ok(inner.grid(count))
}

/// One row of a convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub q: f64,
    pub sup_error: f64,
    pub bound: Option<f64>,
    pub x_argmax: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<ExperimentRow>,
    /// Rows that could not be computed, with the reason.
    pub failures: Vec<(usize, f64, Error)>,
}

/// Settings shared by the sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub error_grid: usize,
    pub modulus_grid: usize,
    pub tol: JacksonTolerance,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            error_grid: DEFAULT_ERROR_GRID,
            modulus_grid: DEFAULT_MODULUS_GRID,
            tol: JacksonTolerance::default(),
        }
    }
}

fn experiment_row(
    f: &TargetFunction,
    samples: &GridSamples,
    n: usize,
    q: QValue,
    params: &StancuParams,
    s: &SweepSettings,
) -> Result<ExperimentRow> {
    let op = OperatorSpec::q_kantorovich_stancu(n, q, *params)?.bind(f, &s.tol)?;
    let (sup_error, x_argmax) = sup_error(&op, f, &stancu_domain(n, q, params), s.error_grid)?;
    // a negative delta_n^2 leaves the row without a bound rather than failing it
    let bound = delta_n(n, q, params)
        .ok()
        .map(|d| 2.0 * samples.modulus(d).value);
    Ok(ExperimentRow {
        n,
        q: q.get(),
        sup_error,
        bound,
        x_argmax,
    })
}

/// Sup-norm error and the `2 omega(f; delta_n)` bound for each `n`, with `q = q_n`.
pub fn convergence_sweep(
    f: &TargetFunction,
    qseq: QSequence,
    params: &StancuParams,
    n_list: &[usize],
    settings: &SweepSettings,
) -> Result<SweepResult> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument {
            arg: "n_list",
            reason: "must be nonempty and strictly ascending".into(),
        });
    }
    let samples = GridSamples::new(f, settings.modulus_grid)?;
    let mut out = SweepResult {
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for &n in n_list {
        let row = qseq
            .q_at(n)
            .and_then(|q| experiment_row(f, &samples, n, q, params, settings));
        match row {
            Ok(r) => out.rows.push(r),
            Err(e) => out.failures.push((n, f64::NAN, e)),
        }
    }
    Ok(out)
}

/// The same experiment at fixed `n` across several `q`.
pub fn q_sweep(
    f: &TargetFunction,
    n: usize,
    qs: &[QValue],
    params: &StancuParams,
    settings: &SweepSettings,
) -> Result<SweepResult> {
    let samples = GridSamples::new(f, settings.modulus_grid)?;
    let mut out = SweepResult {
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for &q in qs {
        match experiment_row(f, &samples, n, q, params, settings) {
            Ok(r) => out.rows.push(r),
            Err(e) => out.failures.push((n, q.get(), e)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::builtins;

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    #[test]
    fn modulus_examples() {
        let c = TargetFunction::constant(3.0);
        assert_eq!(modulus(&c, 0.3, 101).unwrap().value, 0.0);
        let id = builtins::identity();
        let m = modulus(&id, 0.1, 101).unwrap();
        assert!((m.value - 0.1).abs() < 1e-12);
        let m = modulus(&id, 0.105, 101).unwrap();
        assert!((m.value - 0.1).abs() < 1e-12);
        let m = modulus(&builtins::abs_half(), 0.1, 1001).unwrap();
        assert!((m.value - 0.1).abs() <= 1e-3);
    }

    #[test]
    fn second_modulus_examples() {
        let m = second_modulus(&builtins::identity(), 0.3, 201).unwrap();
        assert!(m.value < 1e-14);
        let m = second_modulus(&builtins::square(), 0.1, 2001).unwrap();
        assert!((m.value - 0.02).abs() < 1e-12);
    }

    #[test]
    fn moduli_monotone_in_delta() {
        for name in builtins::NAMES {
            let s = GridSamples::new(&builtins::by_name(name).unwrap(), 401).unwrap();
            let mut prev = (0.0, 0.0);
            for i in 1..=40 {
                let d = i as f64 / 40.0;
                let cur = (s.modulus(d).value, s.second_modulus(d).value);
                assert!(cur.0 >= prev.0 && cur.1 >= prev.1, "{name}");
                prev = cur;
            }
        }
    }

    #[test]
    fn shisha_mond_examples() {
        let base = ShishaMondInputs {
            m0: 1.0,
            m1_shift: 0.0,
            central2: 0.0,
            delta: 0.1,
            f_at_x: 2.0,
            fprime_at_x: 3.0,
            omega_fprime_at_delta: 0.5,
        };
        assert_eq!(bound_shisha_mond(&base), 0.0);
        let c2 = 0.04;
        let i = ShishaMondInputs {
            m1_shift: 0.1,
            central2: c2,
            delta: c2.sqrt(),
            ..base
        };
        let want = 3.0 * 0.1 + 2.0 * c2.sqrt() * 0.5;
        assert!((bound_shisha_mond(&i) - want).abs() < 1e-15);
        let bigger = ShishaMondInputs {
            central2: 0.05,
            ..i
        };
        assert!(bound_shisha_mond(&bigger) >= bound_shisha_mond(&i));
    }

    #[test]
    fn derivative_bound_shift_matches_local_coefficients() {
        let pr = StancuParams::new(1.0, 2.0, 3.0, 4.0).unwrap();
        let f = builtins::identity();
        let zero = GridSamples::new(&TargetFunction::constant(1.0), 11).unwrap();
        for x in [0.3, 0.5, 0.7] {
            let (an, bn) = local_shift_coeffs(6, q(0.8), &pr);
            let b = bound_derivative_modulus_with(&zero, 1.0, 6, q(0.8), &pr, x);
            assert!((b - ((an - 1.0) * x + bn).abs()).abs() < 1e-12);
        }
        assert!(bound_derivative_modulus(&builtins::abs_half(), 4, q(0.8), &pr, 0.5, 101).is_err());
        assert!(bound_derivative_modulus(&f, 4, q(0.8), &pr, 0.5, 101).is_ok());
    }

    #[test]
    fn lipschitz_spot_value() {
        let z = StancuParams::zero();
        let b = bound_lipschitz(&builtins::abs_half(), 99, q(1.0 - 1e-12), &z).unwrap();
        assert!((b - 0.1).abs() < 1e-6);
        assert!(bound_lipschitz(&TargetFunction::constant(1.0), 4, q(0.5), &z).is_err());
    }

    #[test]
    fn constant_sweep_has_no_error() {
        let r = convergence_sweep(
            &TargetFunction::constant(2.0),
            QSequence::OneMinusCOverN(1.0),
            &StancuParams::new(1.0, 2.0, 3.0, 4.0).unwrap(),
            &[4, 8, 16],
            &SweepSettings::default(),
        )
        .unwrap();
        assert!(r.failures.is_empty());
        assert!(r
            .rows
            .iter()
            .all(|row| row.sup_error <= 1e-12 && row.bound == Some(0.0)));
    }

    #[test]
    fn sweep_reports_row_failures() {
        let r = convergence_sweep(
            &builtins::fig6(),
            QSequence::OneMinusCOverN(2.0),
            &StancuParams::zero(),
            &[2, 4],
            &SweepSettings::default(),
        )
        .unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.failures.len(), 1);
        assert!(convergence_sweep(
            &builtins::fig6(),
            QSequence::OneMinusCOverN(1.0),
            &StancuParams::zero(),
            &[8, 4],
            &SweepSettings::default(),
        )
        .is_err());
    }
}
