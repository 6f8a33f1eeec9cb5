//! q-calculus primitives: q-integers, q-factorials, q-binomials,
//! the q-Pochhammer product `(1 - x)_q^m` and the Jackson q-integral.
//!
//! All q-dependent formulas take a [`QValue`], so `0 < q < 1` holds
//! everywhere below and the `(1 - q^n) / (1 - q)` form never divides by zero.

use crate::error::{Error, Result};
use crate::quadrature;

/// Deformation parameter, strictly inside `(0, 1)`.
///
/// Alongside `q` it keeps `1 - q` and `ln q`, so that q-integers stay
/// accurate when `q` is within a few ulps of 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue {
    q: f64,
    gap: f64,
    ln_q: f64,
}

impl QValue {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQ(q));
        }
        // exact for q >= 1/2 (Sterbenz)
        let gap = 1.0 - q;
        Ok(Self {
            q,
            gap,
            ln_q: (-gap).ln_1p(),
        })
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.q
    }

    /// `1 - q`.
    #[inline]
    pub fn gap(self) -> f64 {
        self.gap
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.ln_q
    }

    /// `q^k`.
    #[inline]
    pub fn pow(self, k: usize) -> f64 {
        self.q.powi(k as i32)
    }
}

impl TryFrom<f64> for QValue {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        QValue::new(q)
    }
}

/// Truncation control for the Jackson series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacksonTolerance {
    abs_tol: f64,
    max_terms: usize,
}

impl JacksonTolerance {
    pub const DEFAULT_ABS_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_TERMS: usize = 1 << 19;

    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::InvalidArgument {
                arg: "abs_tol",
                reason: format!("must be positive and finite, got {abs_tol}"),
            });
        }
        if max_terms == 0 {
            return Err(Error::InvalidArgument {
                arg: "max_terms",
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self { abs_tol, max_terms })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for JacksonTolerance {
    fn default() -> Self {
        Self {
            abs_tol: Self::DEFAULT_ABS_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

/// q-integer `[n]_q = (1 - q^n) / (1 - q) = 1 + q + ... + q^(n-1)`.
pub fn q_integer(n: usize, q: QValue) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // 1 - q^n = -expm1(n ln q), accurate even when q^n rounds to 1
    -(n as f64 * q.ln()).exp_m1() / q.gap()
}

/// q-factorial `[n]_q! = [n][n-1]...[1]`, with `[0]! = 1`.
pub fn q_factorial(n: usize, q: QValue) -> f64 {
    (1..=n).map(|i| q_integer(i, q)).product()
}

/// Gaussian binomial `[n k]_q = [n]! / ([k]! [n-k]!)`.
pub fn q_binomial(n: usize, k: usize, q: QValue) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidArgument {
            arg: "k",
            reason: format!("q-binomial needs k <= n, got k = {k}, n = {n}"),
        });
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=k {
        acc *= q_integer(n - k + i, q) / q_integer(i, q);
    }
    Ok(acc)
}

/// `(1 - x)_q^m = prod_{s=0}^{m-1} (1 - q^s x)`.
pub fn q_pochhammer_one_minus(x: f64, m: usize, q: QValue) -> f64 {
    let mut acc = 1.0;
    let mut qs = 1.0;
    for _ in 0..m {
        acc *= 1.0 - qs * x;
        qs *= q.get();
    }
    acc
}

/// Jackson q-integral `int_0^A f(t) d_q t = A (1 - q) sum_j f(A q^j) q^j`.
///
/// The series stops at the first index `J` whose tail bound
/// `A sup|f| q^(J+1)` (all omitted terms together) drops below `abs_tol`,
/// where `sup|f|` is the running maximum of `|f|` over `f(0)` and every
/// node evaluated so far.
pub fn jackson_integral<F>(f: F, upper: f64, q: QValue, tol: &JacksonTolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(Error::InvalidArgument {
            arg: "upper",
            reason: format!("Jackson integral needs A > 0, got {upper}"),
        });
    }
    let scale = upper * q.gap();
    let qv = q.get();
    let at_zero = f(0.0);
    if !at_zero.is_finite() {
        return Err(Error::NotFinite {
            name: "integrand".into(),
            x: 0.0,
        });
    }
    let mut sup = at_zero.abs();
    let mut sum = 0.0;
    let mut qj = 1.0;
    let mut bound = f64::INFINITY;
    for _ in 0..tol.max_terms() {
        let t = upper * qj;
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NotFinite {
                name: "integrand".into(),
                x: t,
            });
        }
        sup = sup.max(v.abs());
        sum += v * qj;
        qj *= qv;
        bound = upper * sup * qj;
        if bound < tol.abs_tol() {
            return Ok(scale * sum);
        }
    }
    Err(Error::Truncation {
        terms: tol.max_terms(),
        bound,
    })
}

/// Jackson q-integral for `q` close to 1, via Euler–Maclaurin on the
/// log-substituted series.
///
/// With `q = e^{-h}` and `G(s) = g(e^{-s}) e^{-s}`, `g(t) = f(A t)`:
/// `sum_j G(jh) = (1/h) int_0^1 g + g(1)/2 - (h/12) G'(0) + O(h^3)`.
/// Requires `f` smooth near `A`; the ordinary integral uses composite
/// 16-point Gauss–Legendre.
pub fn jackson_integral_near_one<F>(f: F, upper: f64, q: QValue) -> f64
where
    F: Fn(f64) -> f64,
{
    let h = -q.ln();
    let g = |t: f64| f(upper * t);
    let ordinary = quadrature::integrate_composite(g, 0.0, 1.0, 16);
    let g1 = g(1.0);
    let eta = 1e-3;
    let dg1 = (3.0 * g1 - 4.0 * g(1.0 - eta) + g(1.0 - 2.0 * eta)) / (2.0 * eta);
    let dgs0 = -dg1 - g1;
    let series = ordinary / h + 0.5 * g1 - h / 12.0 * dgs0;
    upper * q.gap() * series
}
