//! Evaluation of the Bernstein-type operator family.
//!
//! Every operator has the shape `sum_k w_k(x) * I_k(f)`: basis weights that
//! depend only on `x`, times node functionals that depend only on `f`.
//! [`BoundOperator`] computes the node functionals once per `(spec, f)` and
//! then evaluates any number of points.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::basis::{
    bernstein_weights, classical_stancu_domain, classical_stancu_weights, q_bernstein_weights,
    stancu_domain, stancu_weights, BasisWeights, StancuDomain, StancuParams,
};
use crate::error::{Error, Result};
use crate::function::TargetFunction;
use crate::qcalc::{
    jackson_integral, jackson_integral_near_one, q_integer, JacksonTolerance, QValue,
};
use crate::quadrature;

/// Below this `1 - q` the Jackson integral switches to the Euler–Maclaurin rule.
pub const NEAR_ONE_GAP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `sum f(k/n) C(n,k) x^k (1-x)^(n-k)`
    Bernstein,
    /// Classical Kantorovich: integral means over `[k/(n+1), (k+1)/(n+1)]`.
    Kantorovich,
    /// q-Bernstein weights with Jackson integral means.
    QBernsteinKantorovich,
    /// Shifted knots `(r + alpha1)/(n + beta1)` on the shifted domain.
    StancuShifted,
    /// Kantorovich variant of the shifted-knot polynomials.
    KantorovichStancu,
    /// Kantorovich-type q-Bernstein–Stancu operator.
    QKantorovichStancu,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 6] = [
        OperatorKind::Bernstein,
        OperatorKind::Kantorovich,
        OperatorKind::QBernsteinKantorovich,
        OperatorKind::StancuShifted,
        OperatorKind::KantorovichStancu,
        OperatorKind::QKantorovichStancu,
    ];

    pub fn uses_q(self) -> bool {
        matches!(
            self,
            OperatorKind::QBernsteinKantorovich | OperatorKind::QKantorovichStancu
        )
    }

    pub fn uses_shifts(self) -> bool {
        matches!(
            self,
            OperatorKind::StancuShifted
                | OperatorKind::KantorovichStancu
                | OperatorKind::QKantorovichStancu
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Bernstein => "bernstein",
            OperatorKind::Kantorovich => "kantorovich",
            OperatorKind::QBernsteinKantorovich => "q-kantorovich",
            OperatorKind::StancuShifted => "stancu",
            OperatorKind::KantorovichStancu => "kantorovich-stancu",
            OperatorKind::QKantorovichStancu => "q-kantorovich-stancu",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown operator kind `{s}`")))
    }
}

/// One member of the operator family with its degree and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    n: usize,
    q: Option<QValue>,
    params: Option<StancuParams>,
}

impl OperatorSpec {
    /// Validates that `q` is present for q-kinds and `params` for shifted kinds.
    /// Fields the kind does not use are dropped.
    pub fn new(
        kind: OperatorKind,
        n: usize,
        q: Option<QValue>,
        params: Option<StancuParams>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("degree n must be at least 1".into()));
        }
        if kind.uses_q() && q.is_none() {
            return Err(Error::InvalidSpec(format!("{kind} needs q")));
        }
        if kind.uses_shifts() && params.is_none() {
            return Err(Error::InvalidSpec(format!("{kind} needs shift parameters")));
        }
        Ok(Self {
            kind,
            n,
            q: q.filter(|_| kind.uses_q()),
            params: params.filter(|_| kind.uses_shifts()),
        })
    }

    pub fn bernstein(n: usize) -> Result<Self> {
        Self::new(OperatorKind::Bernstein, n, None, None)
    }

    pub fn kantorovich(n: usize) -> Result<Self> {
        Self::new(OperatorKind::Kantorovich, n, None, None)
    }

    pub fn q_bernstein_kantorovich(n: usize, q: QValue) -> Result<Self> {
        Self::new(OperatorKind::QBernsteinKantorovich, n, Some(q), None)
    }

    pub fn stancu_shifted(n: usize, params: StancuParams) -> Result<Self> {
        Self::new(OperatorKind::StancuShifted, n, None, Some(params))
    }

    pub fn kantorovich_stancu(n: usize, params: StancuParams) -> Result<Self> {
        Self::new(OperatorKind::KantorovichStancu, n, None, Some(params))
    }

    pub fn q_kantorovich_stancu(n: usize, q: QValue, params: StancuParams) -> Result<Self> {
        Self::new(OperatorKind::QKantorovichStancu, n, Some(q), Some(params))
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> Option<QValue> {
        self.q
    }

    /// Shift parameters, zero for kinds without shifts.
    pub fn params(&self) -> StancuParams {
        self.params.unwrap_or_default()
    }

    fn q_unchecked(&self) -> QValue {
        self.q.expect("validated at construction")
    }

    /// The interval on which the operator is defined.
    pub fn domain(&self) -> StancuDomain {
        match self.kind {
            OperatorKind::Bernstein
            | OperatorKind::Kantorovich
            | OperatorKind::QBernsteinKantorovich => StancuDomain::unit(),
            OperatorKind::StancuShifted | OperatorKind::KantorovichStancu => {
                classical_stancu_domain(self.n, &self.params())
            }
            OperatorKind::QKantorovichStancu => {
                stancu_domain(self.n, self.q_unchecked(), &self.params())
            }
        }
    }

    /// Basis weights at `x`.
    pub fn weights(&self, x: f64) -> BasisWeights {
        match self.kind {
            OperatorKind::Bernstein | OperatorKind::Kantorovich => bernstein_weights(self.n, x),
            OperatorKind::QBernsteinKantorovich => {
                q_bernstein_weights(self.n, self.q_unchecked(), x)
            }
            OperatorKind::StancuShifted | OperatorKind::KantorovichStancu => {
                classical_stancu_weights(self.n, &self.params(), x)
            }
            OperatorKind::QKantorovichStancu => {
                stancu_weights(self.n, self.q_unchecked(), &self.params(), x)
            }
        }
    }

    /// Where `f` is probed for each basis index.
    pub fn sample_nodes(&self) -> Vec<SampleNode> {
        let n = self.n;
        let nf = n as f64;
        let p = self.params();
        (0..=n)
            .map(|k| {
                let kf = k as f64;
                match self.kind {
                    OperatorKind::Bernstein => SampleNode::Point(kf / nf),
                    OperatorKind::Kantorovich => {
                        SampleNode::Interval(kf / (nf + 1.0), (kf + 1.0) / (nf + 1.0))
                    }
                    OperatorKind::StancuShifted => {
                        SampleNode::Point((kf + p.alpha1()) / (nf + p.beta1()))
                    }
                    OperatorKind::KantorovichStancu => {
                        let d = nf + p.beta1() + 1.0;
                        SampleNode::Interval((kf + p.alpha1()) / d, (kf + p.alpha1() + 1.0) / d)
                    }
                    OperatorKind::QBernsteinKantorovich | OperatorKind::QKantorovichStancu => {
                        let q = self.q_unchecked();
                        let d = q_integer(n + 1, q) + p.beta1();
                        let lo = q_integer(k, q) + p.alpha1();
                        SampleNode::Interval(lo / d, (lo + q.pow(k)) / d)
                    }
                }
            })
            .collect()
    }

    /// Binds `f`, computing all node functionals.
    pub fn bind(&self, f: &TargetFunction, tol: &JacksonTolerance) -> Result<BoundOperator> {
        let node_values = (0..=self.n)
            .into_par_iter()
            .map(|k| self.node_value(f, k, tol))
            .collect::<Result<Vec<f64>>>()?;
        Ok(BoundOperator {
            spec: *self,
            node_values,
        })
    }

    fn node_value(&self, f: &TargetFunction, k: usize, tol: &JacksonTolerance) -> Result<f64> {
        let n = self.n;
        let nf = n as f64;
        let kf = k as f64;
        let p = self.params();
        match self.kind {
            OperatorKind::Bernstein => Ok(f.eval(kf / nf)),
            OperatorKind::StancuShifted => Ok(f.eval((kf + p.alpha1()) / (nf + p.beta1()))),
            OperatorKind::Kantorovich => Ok(quadrature::integrate(
                |t| f.eval((kf + t) / (nf + 1.0)),
                0.0,
                1.0,
            )),
            OperatorKind::KantorovichStancu => {
                let d = nf + p.beta1() + 1.0;
                Ok(quadrature::integrate(
                    |t| f.eval((kf + p.alpha1() + t) / d),
                    0.0,
                    1.0,
                ))
            }
            OperatorKind::QBernsteinKantorovich | OperatorKind::QKantorovichStancu => {
                let q = self.q_unchecked();
                let d = q_integer(n + 1, q) + p.beta1();
                let qk = q.pow(k);
                let base = q_integer(k, q);
                let a1 = p.alpha1();
                let g = |t: f64| f.eval((base + qk * t + a1) / d);
                q_integral(g, q, tol)
            }
        }
    }
}

/// `int_0^1 g d_q t`, by series or, for `q` within [`NEAR_ONE_GAP`] of 1,
/// by the Euler–Maclaurin rule.
pub fn q_integral<G: Fn(f64) -> f64>(g: G, q: QValue, tol: &JacksonTolerance) -> Result<f64> {
    if q.gap() <= NEAR_ONE_GAP {
        Ok(jackson_integral_near_one(g, 1.0, q))
    } else {
        jackson_integral(g, 1.0, q, tol)
    }
}

/// Where an operator samples `f` for one basis index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleNode {
    Point(f64),
    /// `f` is integrated (ordinary or Jackson) over this interval.
    Interval(f64, f64),
}

impl SampleNode {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            SampleNode::Point(x) => (x, x),
            SampleNode::Interval(lo, hi) => (lo, hi),
        }
    }
}

/// Result of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub outside_domain: bool,
}

/// An operator with its node functionals precomputed for one `f`.
#[derive(Debug, Clone)]
pub struct BoundOperator {
    spec: OperatorSpec,
    node_values: Vec<f64>,
}

impl BoundOperator {
    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    /// Evaluates at `x`. Kinds defined on `[0, 1]` reject points outside it;
    /// shifted kinds evaluate anywhere and flag points outside `[a, b]`.
    pub fn evaluate(&self, x: f64) -> Result<Evaluation> {
        if !self.spec.kind.uses_shifts() && !(0.0..=1.0).contains(&x) {
            return Err(Error::OutsideDomain {
                x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let w = self.spec.weights(x);
        let value = w
            .weights
            .iter()
            .zip(&self.node_values)
            .map(|(w, v)| w * v)
            .sum();
        Ok(Evaluation {
            value,
            outside_domain: w.outside_domain,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.evaluate(x).map(|e| e.value)
    }
}

/// One-shot evaluation of `spec` applied to `f` at `x`.
pub fn apply(
    spec: &OperatorSpec,
    f: &TargetFunction,
    x: f64,
    tol: &JacksonTolerance,
) -> Result<f64> {
    spec.bind(f, tol)?.eval(x)
}
