//! Library results against independent, deliberately naive reimplementations.

use qbs_core::analysis::{
    bound_derivative_modulus, bound_global_modulus, bound_lipschitz, bound_local_second_modulus,
    sup_error, DEFAULT_CONST_C, DEFAULT_MODULUS_GRID,
};
use qbs_core::basis::stancu_domain;
use qbs_core::moments::{central2_exact, moment1_closed, moment2_closed};
use qbs_core::qcalc::{jackson_integral, q_binomial, q_integer};
use qbs_core::{builtins, JacksonTolerance, OperatorSpec, QValue, StancuParams, TargetFunction};

type Named = (&'static str, fn(f64) -> f64);

fn q(v: f64) -> QValue {
    QValue::new(v).unwrap()
}

fn naive_q_int(n: usize, q: f64) -> f64 {
    (0..n).map(|i| q.powi(i as i32)).sum()
}

/// q-binomials from the q-Pascal triangle.
fn pascal_row(n: usize, q: f64) -> Vec<f64> {
    let mut row = vec![1.0];
    for m in 1..=n {
        let mut next = vec![1.0; m + 1];
        for k in 1..m {
            next[k] = row[k - 1] + q.powi(k as i32) * row[k];
        }
        row = next;
    }
    row
}

/// Eq-by-definition evaluation of the q-Kantorovich–Stancu operator.
fn naive_operator(
    f: impl Fn(f64) -> f64,
    n: usize,
    qv: f64,
    p: (f64, f64, f64, f64),
    x: f64,
) -> f64 {
    let (a1, a2, b1, b2) = p;
    let nq = naive_q_int(n, qv);
    let (a, b) = (a2 / (nq + b2), (nq + a2) / (nq + b2));
    let u = (x - a) / (b - a);
    let binom = pascal_row(n, qv);
    let d = naive_q_int(n + 1, qv) + b1;
    let mut total = 0.0;
    for (k, &bk) in binom.iter().enumerate() {
        let poch: f64 = (0..n - k).map(|s| 1.0 - qv.powi(s as i32) * u).product();
        let w = bk * u.powi(k as i32) * poch;
        let mut inner = 0.0;
        let mut qj = 1.0;
        while qj > 1e-17 {
            let t = qj;
            inner += f((naive_q_int(k, qv) + qv.powi(k as i32) * t + a1) / d) * qj;
            qj *= qv;
        }
        total += w * (1.0 - qv) * inner;
    }
    total
}

const PARAM_SETS: [(f64, f64, f64, f64); 4] = [
    (0.0, 0.0, 0.0, 0.0),
    (1.0, 2.0, 3.0, 4.0),
    (0.0, 1.0, 1.0, 2.0),
    (2.0, 2.0, 2.0, 2.0),
];

fn params(p: (f64, f64, f64, f64)) -> StancuParams {
    StancuParams::new(p.0, p.1, p.2, p.3).unwrap()
}

#[test]
fn q_integers_and_binomials() {
    for qv in [0.1, 0.5, 0.9, 0.99] {
        for n in 0..40 {
            let a = q_integer(n, q(qv));
            let b = naive_q_int(n, qv);
            assert!((a - b).abs() <= 1e-13 * b.max(1.0));
            let row = pascal_row(n, qv);
            for (k, want) in row.iter().enumerate() {
                let got = q_binomial(n, k, q(qv)).unwrap();
                assert!((got - want).abs() <= 1e-12 * want, "q={qv} n={n} k={k}");
            }
        }
    }
}

#[test]
fn operator_matches_definition() {
    let tol = JacksonTolerance::default();
    let fs: [Named; 3] = [
        ("fig6", |t| 1.0 - (4.0 * t.exp()).cos()),
        ("exp", f64::exp),
        ("abs", |t| (t - 0.5).abs()),
    ];
    for (name, f) in fs {
        let tf = TargetFunction::new(name, f).unwrap();
        for p in PARAM_SETS {
            for qv in [0.3, 0.8] {
                for n in [1, 3, 9] {
                    let spec = OperatorSpec::q_kantorovich_stancu(n, q(qv), params(p)).unwrap();
                    let op = spec.bind(&tf, &tol).unwrap();
                    for x in spec.domain().grid(7) {
                        let want = naive_operator(f, n, qv, p, x);
                        let got = op.eval(x).unwrap();
                        assert!(
                            (got - want).abs() < 1e-12,
                            "{name} {p:?} q={qv} n={n} x={x}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn closed_moments_match_definition() {
    for p in PARAM_SETS {
        for qv in [0.3, 0.5, 0.9] {
            for n in [1, 2, 4, 8, 16] {
                let pr = params(p);
                for x in stancu_domain(n, q(qv), &pr).grid(11) {
                    let m1 = naive_operator(|t| t, n, qv, p, x);
                    let m2 = naive_operator(|t| t * t, n, qv, p, x);
                    let c2 = naive_operator(|t| (t - x) * (t - x), n, qv, p, x);
                    assert!((moment1_closed(n, q(qv), &pr, x) - m1).abs() < 1e-10);
                    assert!((moment2_closed(n, q(qv), &pr, x) - m2).abs() < 1e-10);
                    assert!((central2_exact(n, q(qv), &pr, x) - c2).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn classical_kantorovich_by_hand() {
    // n = 1, f(t) = t: (1 - x) * 1/4 + x * 3/4
    let tol = JacksonTolerance::default();
    let op = OperatorSpec::kantorovich(1)
        .unwrap()
        .bind(&builtins::identity(), &tol)
        .unwrap();
    for x in [0.0, 0.3, 1.0] {
        assert!((op.eval(x).unwrap() - (0.25 + 0.5 * x)).abs() < 1e-15);
    }
}

#[test]
fn jackson_by_hand() {
    let tol = JacksonTolerance::default();
    // int_0^1 e^t d_q t = (1 - q) sum q^j e^(q^j)
    let qv: f64 = 0.4;
    let want: f64 = (1.0 - qv) * (0..200).map(|j| qv.powi(j) * qv.powi(j).exp()).sum::<f64>();
    let got = jackson_integral(f64::exp, 1.0, q(qv), &tol).unwrap();
    assert!((got - want).abs() < 1e-14);
}

fn sup_err(f: &TargetFunction, n: usize, qq: QValue, p: &StancuParams) -> f64 {
    let spec = OperatorSpec::q_kantorovich_stancu(n, qq, *p).unwrap();
    let op = spec.bind(f, &JacksonTolerance::default()).unwrap();
    sup_error(&op, f, &spec.domain(), 201).unwrap().0
}

#[test]
fn global_modulus_bound_holds() {
    let fs = [
        builtins::fig6(),
        builtins::abs_half(),
        builtins::cube(),
        builtins::exp(),
    ];
    for f in &fs {
        for p in PARAM_SETS {
            for qv in [0.7, 0.9, 0.99] {
                for n in [4, 8, 16, 32] {
                    let pr = params(p);
                    let bound =
                        bound_global_modulus(f, n, q(qv), &pr, DEFAULT_MODULUS_GRID).unwrap();
                    let err = sup_err(f, n, q(qv), &pr);
                    assert!(
                        err <= bound + 1e-9,
                        "{} {p:?} q={qv} n={n}: {err} > {bound}",
                        f.name()
                    );
                }
            }
        }
    }
}

#[test]
fn local_second_modulus_bound_holds_for_cube() {
    let f = builtins::cube();
    let tol = JacksonTolerance::default();
    for p in PARAM_SETS {
        for qv in [0.5, 0.9] {
            for n in [2, 8, 32] {
                let pr = params(p);
                let spec = OperatorSpec::q_kantorovich_stancu(n, q(qv), pr).unwrap();
                let op = spec.bind(&f, &tol).unwrap();
                for x in spec.domain().grid(9) {
                    let err = (op.eval(x).unwrap() - f.eval(x)).abs();
                    let b = bound_local_second_modulus(&f, n, q(qv), &pr, x, DEFAULT_CONST_C, 401)
                        .unwrap();
                    assert!(err <= b + 1e-9, "{p:?} q={qv} n={n} x={x}");
                }
            }
        }
    }
}

#[test]
fn derivative_modulus_bound_holds_for_smooth_functions() {
    let tol = JacksonTolerance::default();
    for f in [builtins::sin3(), builtins::fig6(), builtins::exp()] {
        for p in PARAM_SETS {
            for qv in [0.5, 0.9] {
                for n in [2, 8, 32] {
                    let pr = params(p);
                    let spec = OperatorSpec::q_kantorovich_stancu(n, q(qv), pr).unwrap();
                    let op = spec.bind(&f, &tol).unwrap();
                    for x in spec.domain().grid(9) {
                        let err = (op.eval(x).unwrap() - f.eval(x)).abs();
                        let b = bound_derivative_modulus(&f, n, q(qv), &pr, x, 401).unwrap();
                        assert!(err <= b + 1e-9, "{} {p:?} q={qv} n={n} x={x}", f.name());
                    }
                }
            }
        }
    }
}

#[test]
fn lipschitz_bound_holds() {
    for f in [builtins::abs_half(), builtins::sqrt_abs_half()] {
        for p in PARAM_SETS {
            for qv in [0.7, 0.9, 0.99] {
                for n in [4, 8, 16, 32] {
                    let pr = params(p);
                    let b = bound_lipschitz(&f, n, q(qv), &pr).unwrap();
                    let err = sup_err(&f, n, q(qv), &pr);
                    assert!(err <= b, "{} {p:?} q={qv} n={n}", f.name());
                }
            }
        }
    }
}
