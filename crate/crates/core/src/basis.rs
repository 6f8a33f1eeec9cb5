//! Shifted-knot domains and q-Bernstein basis weights.
//!
//! The shifted weights are the q-Bernstein basis in the rescaled variable
//! `u = (x - a) / (b - a)` on `[a, b] = [alpha2 / ([n] + beta2), ([n] + alpha2) / ([n] + beta2)]`.
//! The normaliser `(([n] + beta2) / [n])^n` of the shifted form equals
//! `(b - a)^-n`, which is what makes the weights a partition of unity.

use crate::error::{Error, Result};
use crate::qcalc::{q_integer, QValue};

/// Stancu shift quadruple with `0 <= alpha1 <= alpha2 <= beta1 <= beta2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancuParams {
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
}

impl StancuParams {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let ordered = 0.0 <= alpha1 && alpha1 <= alpha2 && alpha2 <= beta1 && beta1 <= beta2;
        if !ordered || !beta2.is_finite() {
            return Err(Error::InvalidParams {
                alpha1,
                alpha2,
                beta1,
                beta2,
            });
        }
        Ok(Self {
            alpha1,
            alpha2,
            beta1,
            beta2,
        })
    }

    pub const fn zero() -> Self {
        Self {
            alpha1: 0.0,
            alpha2: 0.0,
            beta1: 0.0,
            beta2: 0.0,
        }
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn as_tuple(&self) -> (f64, f64, f64, f64) {
        (self.alpha1, self.alpha2, self.beta1, self.beta2)
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Default for StancuParams {
    fn default() -> Self {
        Self::zero()
    }
}

/// The interval `[a, b]` on which a shifted operator is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancuDomain {
    pub a: f64,
    pub b: f64,
}

impl StancuDomain {
    /// Domain built from an effective degree `m` (`[n]_q`, or `n` classically).
    pub fn from_degree(m: f64, params: &StancuParams) -> Self {
        let denom = m + params.beta2;
        Self {
            a: params.alpha2 / denom,
            b: (m + params.alpha2) / denom,
        }
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// `count` equispaced points from `a` to `b` inclusive.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![0.5 * (self.a + self.b)],
            _ => (0..count)
                .map(|i| {
                    if i + 1 == count {
                        self.b
                    } else {
                        self.a + self.width() * i as f64 / (count - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Basis weights `w[0..=n]` at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisWeights {
    pub n: usize,
    pub weights: Vec<f64>,
    /// Set when the evaluation point lies outside the operator domain.
    pub outside_domain: bool,
}

impl BasisWeights {
    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn stancu_domain(n: usize, q: QValue, params: &StancuParams) -> StancuDomain {
    StancuDomain::from_degree(q_integer(n, q), params)
}

/// Classical shifted-knot domain `[alpha2/(n+beta2), (n+alpha2)/(n+beta2)]`.
pub fn classical_stancu_domain(n: usize, params: &StancuParams) -> StancuDomain {
    StancuDomain::from_degree(n as f64, params)
}

#[inline]
pub fn rescale(x: f64, dom: &StancuDomain) -> f64 {
    (x - dom.a) / (dom.b - dom.a)
}

#[inline]
pub fn unscale(u: f64, dom: &StancuDomain) -> f64 {
    dom.a + u * (dom.b - dom.a)
}

/// q-Bernstein weights `[n k]_q u^k (1 - u)_q^(n-k)`.
pub fn q_bernstein_weights(n: usize, q: QValue, u: f64) -> BasisWeights {
    // tail[m] = (1 - u)_q^m
    let mut tail = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    let mut qs = 1.0;
    tail.push(acc);
    for _ in 0..n {
        acc *= 1.0 - qs * u;
        qs *= q.get();
        tail.push(acc);
    }

    let mut weights = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    let mut u_pow = 1.0;
    for k in 0..=n {
        if k > 0 {
            // [n k] = [n k-1] [n-k+1] / [k]
            binom *= q_integer(n - k + 1, q) / q_integer(k, q);
            u_pow *= u;
        }
        weights.push(binom * u_pow * tail[n - k]);
    }
    BasisWeights {
        n,
        weights,
        outside_domain: !(0.0..=1.0).contains(&u),
    }
}

/// Ordinary Bernstein weights `C(n, k) u^k (1 - u)^(n-k)`.
pub fn bernstein_weights(n: usize, u: f64) -> BasisWeights {
    let v = 1.0 - u;
    let mut weights = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        weights.push(binom * u.powi(k as i32) * v.powi((n - k) as i32));
    }
    BasisWeights {
        n,
        weights,
        outside_domain: !(0.0..=1.0).contains(&u),
    }
}

/// Weights of the q-shifted operator at `x`.
pub fn stancu_weights(n: usize, q: QValue, params: &StancuParams, x: f64) -> BasisWeights {
    let dom = stancu_domain(n, q, params);
    let mut w = q_bernstein_weights(n, q, rescale(x, &dom));
    w.outside_domain = !dom.contains(x);
    w
}

/// Weights of the classical shifted-knot operator (ordinary powers, degree `n`).
pub fn classical_stancu_weights(n: usize, params: &StancuParams, x: f64) -> BasisWeights {
    let dom = classical_stancu_domain(n, params);
    let mut w = bernstein_weights(n, rescale(x, &dom));
    w.outside_domain = !dom.contains(x);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{q_binomial, q_pochhammer_one_minus};

    fn q(v: f64) -> QValue {
        QValue::new(v).unwrap()
    }

    fn grid_params() -> Vec<StancuParams> {
        vec![
            StancuParams::zero(),
            StancuParams::new(1.0, 2.0, 3.0, 4.0).unwrap(),
            StancuParams::new(0.0, 1.0, 1.0, 2.0).unwrap(),
            StancuParams::new(2.0, 2.0, 2.0, 2.0).unwrap(),
        ]
    }

    #[test]
    fn params_ordering_enforced() {
        assert!(StancuParams::new(0.0, 0.0, 0.0, 0.0).is_ok());
        assert!(StancuParams::new(1.0, 0.5, 2.0, 3.0).is_err());
        assert!(StancuParams::new(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(StancuParams::new(0.0, 0.0, 2.0, 1.0).is_err());
        assert!(StancuParams::new(0.0, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn domain_examples() {
        let d = stancu_domain(7, q(0.4), &StancuParams::zero());
        assert_eq!((d.a, d.b), (0.0, 1.0));

        let p = StancuParams::new(0.0, 1.0, 1.0, 2.0).unwrap();
        let d = stancu_domain(2, q(0.5), &p);
        assert!((d.a - 1.0 / 3.5).abs() < 1e-15);
        assert!((d.b - 2.5 / 3.5).abs() < 1e-15);

        for params in grid_params() {
            for n in [1, 3, 10] {
                let qq = q(0.7);
                let d = stancu_domain(n, qq, &params);
                let nq = q_integer(n, qq);
                assert!((d.width() - nq / (nq + params.beta2())).abs() < 1e-15);
                assert!(0.0 <= d.a && d.a < d.b);
            }
        }
    }

    #[test]
    fn rescale_endpoints_and_roundtrip() {
        let p = StancuParams::new(1.0, 2.0, 3.0, 4.0).unwrap();
        let d = stancu_domain(5, q(0.8), &p);
        assert_eq!(rescale(d.a, &d), 0.0);
        assert!((rescale(d.b, &d) - 1.0).abs() < 1e-15);
        assert!((rescale(0.5 * (d.a + d.b), &d) - 0.5).abs() < 1e-15);
        for i in 0..=20 {
            let x = d.a + d.width() * i as f64 / 20.0;
            assert!((unscale(rescale(x, &d), &d) - x).abs() <= 1e-15);
        }
    }

    #[test]
    fn q_bernstein_boundary_weights() {
        let qq = q(0.6);
        let w0 = q_bernstein_weights(5, qq, 0.0);
        assert_eq!(w0.weights, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let w1 = q_bernstein_weights(5, qq, 1.0);
        assert!(w1.weights[..5].iter().all(|&w| w == 0.0));
        assert!((w1.weights[5] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_bernstein_small_case_by_hand() {
        let (qv, u) = (0.5, 0.5);
        let w = q_bernstein_weights(2, q(qv), u);
        let w0 = (1.0 - u) * (1.0 - qv * u);
        let w1 = (1.0 + qv) * u * (1.0 - u);
        let w2 = u * u;
        assert!((w.weights[0] - w0).abs() < 1e-16);
        assert!((w.weights[1] - w1).abs() < 1e-16);
        assert!((w.weights[2] - w2).abs() < 1e-16);
        assert!((w0 + w1 + w2 - 1.0).abs() < 1e-16);
    }

    #[test]
    fn q_bernstein_matches_definition() {
        let qq = q(0.83);
        let n = 12;
        for u in [0.0, 0.1, 0.37, 0.9, 1.0] {
            let w = q_bernstein_weights(n, qq, u);
            for k in 0..=n {
                let direct = q_binomial(n, k, qq).unwrap()
                    * u.powi(k as i32)
                    * q_pochhammer_one_minus(u, n - k, qq);
                assert!((w.weights[k] - direct).abs() < 1e-14, "u={u} k={k}");
            }
        }
    }

    #[test]
    fn partition_of_unity_and_nonnegativity() {
        for params in grid_params() {
            for qv in [0.3, 0.5, 0.9, 0.99] {
                for n in 1..=32 {
                    let dom = stancu_domain(n, q(qv), &params);
                    for x in dom.grid(21) {
                        let w = stancu_weights(n, q(qv), &params, x);
                        assert!((w.sum() - 1.0).abs() <= 1e-12);
                        assert!(w.weights.iter().all(|&v| v >= 0.0));
                        assert!(!w.outside_domain);
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_to_unshifted_is_exact() {
        for qv in [0.3, 0.9] {
            for n in [1, 4, 17] {
                for i in 0..=20 {
                    let x = i as f64 / 20.0;
                    let a = stancu_weights(n, q(qv), &StancuParams::zero(), x);
                    let b = q_bernstein_weights(n, q(qv), x);
                    assert_eq!(a.weights, b.weights);
                }
            }
        }
    }

    #[test]
    fn endpoint_and_midpoint_examples() {
        let p = StancuParams::new(0.0, 1.0, 1.0, 2.0).unwrap();
        let qq = q(0.9);
        let d = stancu_domain(1, qq, &p);
        let w = stancu_weights(1, qq, &p, 0.5 * (d.a + d.b));
        assert!((w.weights[0] - 0.5).abs() < 1e-15 && (w.weights[1] - 0.5).abs() < 1e-15);
        let d = stancu_domain(6, qq, &p);
        let w = stancu_weights(6, qq, &p, d.a);
        assert_eq!(w.weights[0], 1.0);
        assert!(w.weights[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn outside_domain_is_flagged() {
        let p = StancuParams::new(0.0, 1.0, 1.0, 2.0).unwrap();
        let w = stancu_weights(3, q(0.5), &p, 0.0);
        assert!(w.outside_domain);
        assert!((w.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_to_one_matches_shifted_knot_weights() {
        // ((n+beta2)/n)^n C(n,r) (x-a)^r (b-x)^(n-r) with ordinary powers
        let qq = q(1.0 - 1e-8);
        for params in grid_params() {
            for n in 1..=16 {
                let dom = classical_stancu_domain(n, &params);
                let norm = ((n as f64 + params.beta2()) / n as f64).powi(n as i32);
                for x in dom.grid(11) {
                    let w = stancu_weights(n, qq, &params, x);
                    let mut c = 1.0;
                    for r in 0..=n {
                        if r > 0 {
                            c *= (n - r + 1) as f64 / r as f64;
                        }
                        let direct = norm
                            * c
                            * (x - dom.a).max(0.0).powi(r as i32)
                            * (dom.b - x).max(0.0).powi((n - r) as i32);
                        assert!(
                            (w.weights[r] - direct).abs() < 1e-6,
                            "n={n} r={r} x={x}: {} vs {direct}",
                            w.weights[r]
                        );
                    }
                }
            }
        }
    }
}
