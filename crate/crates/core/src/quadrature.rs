//! Fixed 16-point Gauss–Legendre quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const ORDER: usize = 16;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (nodes, weights) = legendre_roots(ORDER);
        let mut rule = Rule {
            nodes: [0.0; ORDER],
            weights: [0.0; ORDER],
        };
        rule.nodes.copy_from_slice(&nodes);
        rule.weights.copy_from_slice(&weights);
        rule
    })
}

/// Roots of P_n on [-1, 1] and the matching weights, by Newton iteration
/// from the Chebyshev-like initial guess.
fn legendre_roots(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(z) and P_{n-1}(z)
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrates `g` over `[lo, hi]` with one 16-point panel.
pub fn integrate<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = 0.0;
    for (node, w) in r.nodes.iter().zip(r.weights.iter()) {
        acc += w * g(mid + half * node);
    }
    acc * half
}

/// Integrates `g` over `[lo, hi]` split into `panels` equal 16-point panels.
pub fn integrate_composite<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let a = lo + width * p as f64;
            let b = if p + 1 == panels { hi } else { a + width };
            integrate(&g, a, b)
        })
        .sum()
}
