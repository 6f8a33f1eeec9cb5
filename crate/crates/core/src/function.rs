//! Target functions on `[0, 1]` with optional smoothness metadata.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Hölder/Lipschitz data: `|f(t) - f(x)| <= m |t - x|^alpha` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub m: f64,
    pub alpha: f64,
}

/// An evaluable function on `[0, 1]`.
///
/// `eval` is checked to be finite on a 101-point grid at construction; when
/// Lipschitz metadata is attached, the inequality is checked on every pair
/// of that grid.
#[derive(Clone)]
pub struct TargetFunction {
    name: String,
    eval: RealFn,
    d1: Option<RealFn>,
    d2: Option<RealFn>,
    lipschitz: Option<Lipschitz>,
    approximate_derivatives: bool,
}

const CHECK_POINTS: usize = 101;

fn check_grid() -> impl Iterator<Item = f64> {
    (0..CHECK_POINTS).map(|i| i as f64 / (CHECK_POINTS - 1) as f64)
}

impl TargetFunction {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        for x in check_grid() {
            if !eval(x).is_finite() {
                return Err(Error::NotFinite { name, x });
            }
        }
        Ok(Self {
            name,
            eval: Arc::new(eval),
            d1: None,
            d2: None,
            lipschitz: None,
            approximate_derivatives: false,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
            .expect("finite constant")
            .with_d1(|_| 0.0)
            .with_d2(|_| 0.0)
    }

    pub fn with_d1<F>(mut self, d1: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.d1 = Some(Arc::new(d1));
        self
    }

    pub fn with_d2<F>(mut self, d2: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.d2 = Some(Arc::new(d2));
        self
    }

    /// Marks the attached derivatives as numerical approximations.
    pub fn with_approximate_derivatives(mut self, approximate: bool) -> Self {
        self.approximate_derivatives = approximate;
        self
    }

    pub fn with_lipschitz(mut self, m: f64, alpha: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument {
                arg: "M",
                reason: format!("Lipschitz constant must be positive, got {m}"),
            });
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument {
                arg: "alpha",
                reason: format!("Lipschitz exponent must lie in (0, 1], got {alpha}"),
            });
        }
        let values: Vec<(f64, f64)> = check_grid().map(|x| (x, (self.eval)(x))).collect();
        for (i, &(x, fx)) in values.iter().enumerate() {
            for &(t, ft) in &values[i + 1..] {
                let allowed = m * (t - x).abs().powf(alpha);
                if (ft - fx).abs() > allowed * (1.0 + 1e-12) + 1e-15 {
                    return Err(Error::LipschitzViolation {
                        name: self.name.clone(),
                        t,
                        x,
                    });
                }
            }
        }
        self.lipschitz = Some(Lipschitz { m, alpha });
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn d1(&self) -> Option<&RealFn> {
        self.d1.as_ref()
    }

    pub fn d2(&self) -> Option<&RealFn> {
        self.d2.as_ref()
    }

    pub fn require_d1(&self) -> Result<&RealFn> {
        self.d1.as_ref().ok_or_else(|| Error::MissingMetadata {
            name: self.name.clone(),
            what: "first derivative",
        })
    }

    pub fn require_d2(&self) -> Result<&RealFn> {
        self.d2.as_ref().ok_or_else(|| Error::MissingMetadata {
            name: self.name.clone(),
            what: "second derivative",
        })
    }

    pub fn lipschitz(&self) -> Option<Lipschitz> {
        self.lipschitz
    }

    pub fn require_lipschitz(&self) -> Result<Lipschitz> {
        self.lipschitz.ok_or_else(|| Error::MissingMetadata {
            name: self.name.clone(),
            what: "Lipschitz metadata",
        })
    }

    pub fn has_approximate_derivatives(&self) -> bool {
        self.approximate_derivatives
    }

    /// The derivative as a stand-alone function (for moduli of `f'`).
    pub fn derivative(&self) -> Result<TargetFunction> {
        let d1 = self.require_d1()?.clone();
        let mut out = TargetFunction::new(format!("d/dx {}", self.name), move |x| d1(x))?;
        if let Some(d2) = &self.d2 {
            let d2 = d2.clone();
            out = out.with_d1(move |x| d2(x));
        }
        Ok(out.with_approximate_derivatives(self.approximate_derivatives))
    }
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .field("lipschitz", &self.lipschitz)
            .field("approximate_derivatives", &self.approximate_derivatives)
            .finish()
    }
}

/// Built-in test functions with exact derivative and Lipschitz data.
pub mod builtins {
    use super::TargetFunction;
    use std::f64::consts::E;

    /// `1 - cos(4 e^x)`, the benchmark function of the convergence figures.
    pub fn fig6() -> TargetFunction {
        TargetFunction::new("1-cos(4e^x)", |x| 1.0 - (4.0 * x.exp()).cos())
            .unwrap()
            .with_d1(|x| {
                let u = 4.0 * x.exp();
                u * u.sin()
            })
            .with_d2(|x| {
                let u = 4.0 * x.exp();
                u * u.sin() + u * u * u.cos()
            })
            // |f'| <= 4e on [0, 1]
            .with_lipschitz(4.0 * E, 1.0)
            .unwrap()
    }

    pub fn identity() -> TargetFunction {
        TargetFunction::new("x", |x| x)
            .unwrap()
            .with_d1(|_| 1.0)
            .with_d2(|_| 0.0)
            .with_lipschitz(1.0, 1.0)
            .unwrap()
    }

    pub fn square() -> TargetFunction {
        TargetFunction::new("x^2", |x| x * x)
            .unwrap()
            .with_d1(|x| 2.0 * x)
            .with_d2(|_| 2.0)
            .with_lipschitz(2.0, 1.0)
            .unwrap()
    }

    pub fn cube() -> TargetFunction {
        TargetFunction::new("x^3", |x| x * x * x)
            .unwrap()
            .with_d1(|x| 3.0 * x * x)
            .with_d2(|x| 6.0 * x)
            .with_lipschitz(3.0, 1.0)
            .unwrap()
    }

    pub fn exp() -> TargetFunction {
        TargetFunction::new("e^x", f64::exp)
            .unwrap()
            .with_d1(f64::exp)
            .with_d2(f64::exp)
            .with_lipschitz(E, 1.0)
            .unwrap()
    }

    pub fn sin3() -> TargetFunction {
        TargetFunction::new("sin(3x)", |x| (3.0 * x).sin())
            .unwrap()
            .with_d1(|x| 3.0 * (3.0 * x).cos())
            .with_d2(|x| -9.0 * (3.0 * x).sin())
            .with_lipschitz(3.0, 1.0)
            .unwrap()
    }

    /// `|x - 1/2|`, Lipschitz with `M = 1, alpha = 1`.
    pub fn abs_half() -> TargetFunction {
        TargetFunction::new("|x-1/2|", |x| (x - 0.5).abs())
            .unwrap()
            .with_lipschitz(1.0, 1.0)
            .unwrap()
    }

    /// `|x - 1/2|^(1/2)`, Hölder with `M = 1, alpha = 1/2`.
    pub fn sqrt_abs_half() -> TargetFunction {
        TargetFunction::new("|x-1/2|^(1/2)", |x| (x - 0.5).abs().sqrt())
            .unwrap()
            .with_lipschitz(1.0, 0.5)
            .unwrap()
    }

    /// Looks a built-in up by its registry name.
    pub fn by_name(name: &str) -> Option<TargetFunction> {
        let f = match name {
            "fig6" => fig6(),
            "x" | "identity" => identity(),
            "x2" | "square" => square(),
            "x3" | "cube" => cube(),
            "exp" => exp(),
            "sin3" => sin3(),
            "abs-half" => abs_half(),
            "sqrt-abs-half" => sqrt_abs_half(),
            "one" => TargetFunction::constant(1.0),
            _ => return None,
        };
        Some(f)
    }

    pub const NAMES: &[&str] = &[
        "fig6",
        "x",
        "x2",
        "x3",
        "exp",
        "sin3",
        "abs-half",
        "sqrt-abs-half",
        "one",
    ];
}
