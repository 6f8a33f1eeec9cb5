//! Closed-form moments of the q-Kantorovich–Stancu operator and the derived
//! quantities used by the error bounds.
//!
//! All closed forms share one set of coefficients:
//!
//! ```text
//! m1(x) = s1 (x - a) + o1
//! m2(x) = s2 (x - a)^2 + l2 (x - a) + c2
//! ```
//!
//! with `a` the left end of the operator domain. [`ClosedForms`] computes
//! them and can perturb any one of them, which is how the verification
//! suite checks that it actually detects wrong formulas.

use std::fmt;
use std::str::FromStr;

use crate::basis::{stancu_domain, StancuParams};
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::operators::OperatorSpec;
use crate::qcalc::{q_integer, JacksonTolerance, QValue};

/// A coefficient of the closed forms that can be perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationSite {
    FirstSlope,
    FirstOffset,
    SecondQuadratic,
    SecondLinear,
    SecondConstant,
}

impl MutationSite {
    pub const ALL: [MutationSite; 5] = [
        MutationSite::FirstSlope,
        MutationSite::FirstOffset,
        MutationSite::SecondQuadratic,
        MutationSite::SecondLinear,
        MutationSite::SecondConstant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationSite::FirstSlope => "m1-slope",
            MutationSite::FirstOffset => "m1-offset",
            MutationSite::SecondQuadratic => "m2-quadratic",
            MutationSite::SecondLinear => "m2-linear",
            MutationSite::SecondConstant => "m2-constant",
        }
    }
}

impl fmt::Display for MutationSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MutationSite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MutationSite::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument {
                arg: "mutation site",
                reason: format!("unknown site `{s}`"),
            })
    }
}

/// Adds `delta` to one closed-form coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mutation {
    pub site: MutationSite,
    pub delta: f64,
}

/// Coefficients of the first and second moments for one `(n, q, params)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    /// Left end of the domain.
    pub a: f64,
    pub first_slope: f64,
    pub first_offset: f64,
    pub second_quadratic: f64,
    pub second_linear: f64,
    pub second_constant: f64,
    q: f64,
}

impl Coefficients {
    pub fn m1(&self, x: f64) -> f64 {
        self.first_slope * (x - self.a) + self.first_offset
    }

    pub fn m2(&self, x: f64) -> f64 {
        let y = x - self.a;
        self.second_quadratic * y * y + self.second_linear * y + self.second_constant
    }

    /// `m2` with the square read as the q-shifted product `(x - a)(x - q a)`.
    pub fn m2_q_shifted(&self, x: f64) -> f64 {
        let y = x - self.a;
        self.second_quadratic * y * (x - self.q * self.a)
            + self.second_linear * y
            + self.second_constant
    }

    pub fn central2(&self, x: f64) -> f64 {
        self.m2(x) - 2.0 * x * self.m1(x) + x * x
    }
}

/// Closed-form evaluator, optionally with one perturbed coefficient.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClosedForms {
    mutation: Option<Mutation>,
}

impl ClosedForms {
    pub fn exact() -> Self {
        Self { mutation: None }
    }

    pub fn mutated(mutation: Mutation) -> Self {
        Self {
            mutation: Some(mutation),
        }
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    pub fn coefficients(&self, n: usize, q: QValue, params: &StancuParams) -> Coefficients {
        let (a1, _, b1, b2) = params.as_tuple();
        let qv = q.get();
        let nq = q_integer(n, q);
        let q2 = q_integer(2, q);
        let q3 = q_integer(3, q);
        let d = q_integer(n + 1, q) + b1;
        let r = (nq + b2) / d;

        let big_a = 1.0 + (qv - 1.0) * (qv - 1.0) / q3 + 2.0 * (qv - 1.0) / q2;
        let big_ab = 1.0 + (qv * qv - 1.0) / q3 + (2.0 * a1 + 1.0) * 2.0 * qv / q2;
        let big_c = a1 * a1 + 2.0 * a1 / q2 + 1.0 / q3;

        let mut c = Coefficients {
            a: stancu_domain(n, q, params).a,
            first_slope: r * 2.0 * qv / q2,
            first_offset: (a1 + 1.0 / q2) / d,
            second_quadratic: qv * q_integer(n - 1, q) / nq * big_a * r * r,
            second_linear: big_ab * (nq + b2) / (d * d),
            second_constant: big_c / (d * d),
            q: qv,
        };
        if let Some(m) = self.mutation {
            let slot = match m.site {
                MutationSite::FirstSlope => &mut c.first_slope,
                MutationSite::FirstOffset => &mut c.first_offset,
                MutationSite::SecondQuadratic => &mut c.second_quadratic,
                MutationSite::SecondLinear => &mut c.second_linear,
                MutationSite::SecondConstant => &mut c.second_constant,
            };
            *slot += m.delta;
        }
        c
    }
}

/// `K(t; x)` in closed form.
pub fn moment1_closed(n: usize, q: QValue, params: &StancuParams, x: f64) -> f64 {
    ClosedForms::exact().coefficients(n, q, params).m1(x)
}

/// `K(t^2; x)` in closed form, with `(x - a)` squared ordinarily.
pub fn moment2_closed(n: usize, q: QValue, params: &StancuParams, x: f64) -> f64 {
    ClosedForms::exact().coefficients(n, q, params).m2(x)
}

/// `K(t^2; x)` with the alternative `(x - a)(x - q a)` reading of the square.
/// Kept only for the dual-reading diagnostic; it does not match the operator.
pub fn moment2_closed_q_shifted(n: usize, q: QValue, params: &StancuParams, x: f64) -> f64 {
    ClosedForms::exact()
        .coefficients(n, q, params)
        .m2_q_shifted(x)
}

/// `K((t - x)^2; x) = m2 - 2x m1 + x^2`.
pub fn central2_exact(n: usize, q: QValue, params: &StancuParams, x: f64) -> f64 {
    ClosedForms::exact().coefficients(n, q, params).central2(x)
}

/// The published five-term upper bound for the central second moment,
/// evaluated as written. It is not valid for every `q`; see the tests.
pub fn central2_bound(n: usize, q: QValue, params: &StancuParams) -> f64 {
    let (a1, a2, b1, b2) = params.as_tuple();
    let qv = q.get();
    let nq = q_integer(n, q);
    let q2 = q_integer(2, q);
    let q3 = q_integer(3, q);
    let d = q_integer(n + 1, q) + b1;

    2.0 * qv * qv * (2.0 * qv + 1.0) / (q2 * q3) * nq * (nq + a2) / (d * d)
        + qv / (1.0 + qv)
            * ((3.0 + 5.0 * qv + 4.0 * qv * qv) / (1.0 + qv + qv * qv) + 4.0 * a1)
            * nq
            / (d * d)
        - 2.0 / (1.0 + qv) * (2.0 * qv * nq + 2.0 * a1 + 1.0) * (nq + a2) / (d * (nq + b2))
        + ((nq + a2) / (nq + b2)).powi(2)
        + ((1.0 + a1) / d).powi(2)
}

/// `delta_n = sqrt(central2_bound)`. Errors instead of clamping when the
/// bound is negative.
pub fn delta_n(n: usize, q: QValue, params: &StancuParams) -> Result<f64> {
    let sq = central2_bound(n, q, params);
    if sq < 0.0 {
        return Err(Error::NegativeDeltaSquared(sq));
    }
    Ok(sq.sqrt())
}

/// `(a_n, b_n)` with `m1(x) = a_n x + b_n`.
pub fn local_shift_coeffs(n: usize, q: QValue, params: &StancuParams) -> (f64, f64) {
    let (a1, a2, b1, b2) = params.as_tuple();
    let qv = q.get();
    let d = q_integer(n + 1, q) + b1;
    let k = 2.0 * qv / (1.0 + qv);
    let an = k * (q_integer(n, q) + b2) / d;
    let bn = (a1 + 1.0 / (1.0 + qv)) / d - k * a2 / d;
    (an, bn)
}

/// The quadratic-in-`x` majorant `delta_n(x)` of the local estimate.
pub fn delta_n_x(n: usize, q: QValue, params: &StancuParams, x: f64) -> f64 {
    let (a1, a2, b1, b2) = params.as_tuple();
    let qv = q.get();
    let q_sq = qv * qv;
    let q_cu = q_sq * qv;
    let nq = q_integer(n, q);
    let d = q_integer(n + 1, q) + b1;
    let r = (nq + b2) / d;
    let s = 1.0 + qv + q_sq;

    let quad =
        (1.0 + 2.0 * qv + 4.0 * q_sq + 5.0 * q_cu) / (1.0 + 2.0 * qv + 2.0 * q_sq + q_cu) * r * r
            - 2.0 * (3.0 * qv + 1.0) / (1.0 + qv) * r
            + 2.0;
    let lin = ((5.0 + 7.0 * qv + 6.0 * q_sq) / s
        + 2.0 * q_sq * (2.0 * qv + 1.0) * a2 / (s * nq)
        + 4.0 * a1)
        * (nq + b2)
        / (d * d)
        + 2.0 * a2 / d;
    let cst = q_sq * (2.0 * qv + 1.0) / s * (a2 / d).powi(2)
        - qv / (1.0 + qv) * ((3.0 + 5.0 * qv + 4.0 * q_sq) / s + 4.0 * a1) * a2 / (d * d)
        + 2.0 * ((1.0 + a1) / d).powi(2);
    quad * x * x + lin * x + cst
}

/// Limits of `[n](m1 - x)` and `[n] central2` along `q_n^n -> a`, in the
/// published form. The second limit is wrong; see [`scaled_limits_derived`].
pub fn scaled_limits(x: f64, a: f64, params: &StancuParams) -> (f64, f64) {
    let (_, _, b1, b2) = params.as_tuple();
    let l1 = first_scaled_limit(x, a, params);
    let l2 = (a + 2.0 * b1 - 2.0 * b2) * x * x + x;
    (l1, l2)
}

/// The same limits derived from the closed forms: `L2 = x(1 - x)` for every
/// `a` and every shift set.
pub fn scaled_limits_derived(x: f64, a: f64, params: &StancuParams) -> (f64, f64) {
    (first_scaled_limit(x, a, params), x * (1.0 - x))
}

fn first_scaled_limit(x: f64, a: f64, params: &StancuParams) -> f64 {
    let (a1, a2, b1, b2) = params.as_tuple();
    -(1.0 + a + 2.0 * (b1 - b2)) * x / 2.0 + (1.0 + 2.0 * (a1 - a2)) / 2.0
}

/// How `q` depends on `n` in limit experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QSequence {
    /// `q_n = 1 - c/n`, so `q_n^n -> e^{-c}`. Needs `n > c`.
    OneMinusCOverN(f64),
    /// `q_n = a^{1/n}`, so `q_n^n = a`. For `a = 0` uses `(n + 1)^{-1/n}`,
    /// for which `q_n^n = 1/(n + 1) -> 0`.
    NthRootOfA(f64),
    Fixed(QValue),
}

impl QSequence {
    pub fn one_minus_c_over_n(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument {
                arg: "c",
                reason: format!("must be positive, got {c}"),
            });
        }
        Ok(QSequence::OneMinusCOverN(c))
    }

    pub fn nth_root_of(a: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a) {
            return Err(Error::InvalidArgument {
                arg: "a",
                reason: format!("must lie in [0, 1), got {a}"),
            });
        }
        Ok(QSequence::NthRootOfA(a))
    }

    pub fn q_at(&self, n: usize) -> Result<QValue> {
        let nf = n as f64;
        match *self {
            QSequence::OneMinusCOverN(c) => QValue::new(1.0 - c / nf),
            QSequence::NthRootOfA(0.0) => QValue::new((nf + 1.0).powf(-1.0 / nf)),
            QSequence::NthRootOfA(a) => QValue::new(a.powf(1.0 / nf)),
            QSequence::Fixed(q) => Ok(q),
        }
    }

    /// `lim q_n^n`.
    pub fn limit(&self) -> f64 {
        match *self {
            QSequence::OneMinusCOverN(c) => (-c).exp(),
            QSequence::NthRootOfA(a) => a,
            QSequence::Fixed(_) => 0.0,
        }
    }
}

impl fmt::Display for QSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSequence::OneMinusCOverN(c) => write!(f, "one-minus-c/N:{c}"),
            QSequence::NthRootOfA(a) => write!(f, "nthroot:{a}"),
            QSequence::Fixed(q) => write!(f, "fixed:{}", q.get()),
        }
    }
}

impl FromStr for QSequence {
    type Err = Error;

    /// Accepts `one-minus-c/N:c`, `nthroot:a` and `fixed:q`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidArgument {
            arg: "qseq",
            reason,
        };
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("expected `kind:value`, got `{s}`")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{value}` is not a number")))?;
        match kind.trim() {
            "one-minus-c/N" | "one-minus-c/n" => QSequence::one_minus_c_over_n(v),
            "nthroot" => QSequence::nth_root_of(v),
            "fixed" => Ok(QSequence::Fixed(QValue::new(v)?)),
            other => Err(bad(format!("unknown sequence `{other}`"))),
        }
    }
}

/// Closed-form moments at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub central2: f64,
    pub central2_bound: f64,
    pub at_x: f64,
    pub spec: OperatorSpec,
}

impl MomentReport {
    pub fn closed(n: usize, q: QValue, params: StancuParams, x: f64) -> Result<Self> {
        let spec = OperatorSpec::q_kantorovich_stancu(n, q, params)?;
        let c = ClosedForms::exact().coefficients(n, q, &params);
        Ok(Self {
            m0: 1.0,
            m1: c.m1(x),
            m2: c.m2(x),
            central2: c.central2(x),
            central2_bound: central2_bound(n, q, &params),
            at_x: x,
            spec,
        })
    }
}

/// `(K(1;x), K(t;x), K(t^2;x))` by direct evaluation of the operator.
pub fn brute_force_moments(
    n: usize,
    q: QValue,
    params: &StancuParams,
    xs: &[f64],
    tol: &JacksonTolerance,
) -> Result<Vec<[f64; 3]>> {
    let spec = OperatorSpec::q_kantorovich_stancu(n, q, *params)?;
    let ops = [
        spec.bind(&TargetFunction::constant(1.0), tol)?,
        spec.bind(&TargetFunction::new("t", |t| t)?, tol)?,
        spec.bind(&TargetFunction::new("t^2", |t| t * t)?, tol)?,
    ];
    xs.iter()
        .map(|&x| Ok([ops[0].eval(x)?, ops[1].eval(x)?, ops[2].eval(x)?]))
        .collect()
}
