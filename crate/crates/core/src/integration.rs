//! Definite integrals by composite Simpson's rule with panel doubling, and
//! lazy antiderivative objects.

use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::differentiable::LazyCell;
use crate::error::{Error, Result};
use crate::function::{Function, Node};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Initial panel count; even and at least 2.
    pub panels: usize,
    /// How many times the panel count may be doubled.
    pub max_refinements: u32,
    /// Convergence threshold on successive estimates.
    pub abs_tol: f64,
}

impl QuadratureConfig {
    pub fn new(panels: usize, max_refinements: u32, abs_tol: f64) -> Result<Self> {
        if panels < 2 || panels % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "panel count must be even and at least 2, got {panels}"
            )));
        }
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerance must be positive, got {abs_tol}"
            )));
        }
        Ok(QuadratureConfig {
            panels,
            max_refinements,
            abs_tol,
        })
    }

    pub fn global() -> QuadratureConfig {
        *GLOBAL_QUAD.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn set_global(cfg: QuadratureConfig) {
        *GLOBAL_QUAD.write().unwrap_or_else(|e| e.into_inner()) = cfg;
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: 256,
            max_refinements: 12,
            abs_tol: 1e-9,
        }
    }
}

static GLOBAL_QUAD: RwLock<QuadratureConfig> = RwLock::new(QuadratureConfig {
    panels: 256,
    max_refinements: 12,
    abs_tol: 1e-9,
});

/// Composite Simpson estimate on `cfg.panels` panels, doubled until two
/// successive estimates agree within `cfg.abs_tol`. Always numerical.
pub fn simpson(f: &Function, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    simpson_with(&|x| f.apply(x), lo, hi, cfg)
}

/// [`simpson`] over a plain closure.
pub fn simpson_with(f: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration limits must be finite, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return Ok(-simpson_with(f, hi, lo, cfg)?);
    }

    let mut n = cfg.panels;
    let mut h = (hi - lo) / n as f64;
    let ends = f(lo)? + f(hi)?;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let y = f(lo + h * i as f64)?;
        if i % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    let mut estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);

    let mut previous = estimate;
    for _ in 0..cfg.max_refinements {
        // Old interior points all become even points; new points are the midpoints.
        even += odd;
        n *= 2;
        h *= 0.5;
        odd = 0.0;
        for i in (1..n).step_by(2) {
            odd += f(lo + h * i as f64)?;
        }
        previous = estimate;
        estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        if (estimate - previous).abs() <= cfg.abs_tol {
            return Ok(estimate);
        }
    }
    Err(Error::NotConverged {
        refinements: cfg.max_refinements,
        previous,
        last: estimate,
    })
}

/// `∫_lo^hi f`. Uses the object's closed-form antiderivative when it has one
/// (`F(hi) - F(lo)`), otherwise [`simpson`].
pub fn definite_integral(f: &Function, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    match f.closed_form_antiderivative() {
        Some(big_f) => Ok(big_f.apply(hi)? - big_f.apply(lo)?),
        None => simpson(f, lo, hi, cfg),
    }
}

impl Function {
    /// The registered closed-form antiderivative, built on first demand.
    pub fn closed_form_antiderivative(&self) -> Option<Function> {
        self.node
            .antiderivative
            .as_ref()
            .map(|cell| cell.force(self, || {}).clone())
    }
}

/// `F(x) = ∫_base^x f` with the global quadrature settings.
pub fn antiderivative(f: &Function, base: f64) -> Function {
    antiderivative_with(f, base, QuadratureConfig::global())
}

/// `F(x) = ∫_base^x f`. Nothing is evaluated until `F` is applied, and each
/// application integrates afresh. `F'` is registered as `f` itself.
pub fn antiderivative_with(f: &Function, base: f64, cfg: QuadratureConfig) -> Function {
    let integrand = f.clone();
    let mut node = Node::new(
        Some(format!("int({f},{})", crate::function::format_number(base))),
        Arc::new(move |x| definite_integral(&integrand, base, x, &cfg)),
    );
    let f = f.clone();
    node.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| f.without_inverse())));
    Function::plain(node)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::catalog::builtins;
    use crate::function::constant;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(3, 4, 1e-9).is_err());
        assert!(QuadratureConfig::new(0, 4, 1e-9).is_err());
        assert!(QuadratureConfig::new(2, 4, 0.0).is_err());
        assert!(QuadratureConfig::new(2, 4, 1e-9).is_ok());
    }

    #[test]
    fn sine_over_half_period() {
        let v = simpson(&builtins::sin(), 0.0, PI, &cfg()).unwrap();
        assert!((v - 2.0).abs() <= 1e-9, "{v}");
        let v = definite_integral(&builtins::sin(), 0.0, PI, &cfg()).unwrap();
        assert!((v - 2.0).abs() <= 1e-9, "{v}");
    }

    #[test]
    fn empty_interval_and_constants() {
        assert_eq!(definite_integral(&builtins::log(), -3.0, -3.0, &cfg()).unwrap(), 0.0);
        assert_eq!(simpson(&constant(1.0), 0.0, 5.0, &cfg()).unwrap(), 5.0);
        assert_eq!(definite_integral(&constant(1.0), 0.0, 5.0, &cfg()).unwrap(), 5.0);
    }

    #[test]
    fn antisymmetric_in_limits() {
        let f = builtins::exp2x();
        let a = simpson(&f, -1.0, 0.5, &cfg()).unwrap();
        let b = simpson(&f, 0.5, -1.0, &cfg()).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn cubic_exactness() {
        let p = Function::from_fn(|x| 2.0 * x * x * x - x * x + 3.0 * x - 4.0);
        let exact = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 1.5 * x * x - 4.0 * x;
        let one_level = QuadratureConfig::new(2, 1, 1.0).unwrap();
        let v = simpson(&p, -1.0, 2.0, &one_level).unwrap();
        assert!((v - (exact(2.0) - exact(-1.0))).abs() <= 1e-12, "{v}");
    }

    #[test]
    fn reports_non_convergence() {
        let wild = Function::from_fn(|x| (1.0 / (x + 1e-3)).sin());
        let tight = QuadratureConfig::new(2, 3, 1e-14).unwrap();
        match simpson(&wild, 0.0, 1.0, &tight) {
            Err(Error::NotConverged {
                refinements,
                previous,
                last,
            }) => {
                assert_eq!(refinements, 3);
                assert!(previous.is_finite() && last.is_finite());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn domain_errors_propagate() {
        assert!(simpson(&builtins::log(), -1.0, 1.0, &cfg()).unwrap_err().is_domain());
    }

    #[test]
    fn antiderivative_values() {
        let big = antiderivative(&builtins::cos(), 0.0);
        assert!((big.apply(PI / 2.0).unwrap() - 1.0).abs() <= 1e-9);
        assert_eq!(antiderivative(&builtins::sqr_real(), 1.7).apply(1.7).unwrap(), 0.0);
        let big = antiderivative(&builtins::exp2x(), 0.0);
        assert!((big.apply(1.0).unwrap() - (2.0f64.exp() - 1.0) / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn antiderivative_derivative_is_integrand() {
        let big = antiderivative(&builtins::sin(), 0.0);
        let d = big.derivative().unwrap();
        for x in crate::domain::Interval::new(0.0, PI).unwrap().grid(25) {
            assert!((d.apply(x).unwrap() - x.sin()).abs() <= 1e-6);
        }
    }

    #[test]
    fn antiderivative_is_lazy_and_integrable() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static CALLS: AtomicUsize = AtomicUsize::new(0);
        let f = Function::from_fn(|x| {
            CALLS.fetch_add(1, Ordering::Relaxed);
            x
        });
        let big = antiderivative(&f, 0.0);
        let bigger = antiderivative(&big, 0.0);
        assert_eq!(CALLS.load(Ordering::Relaxed), 0);
        // ∫_0^x ∫_0^t s ds dt = x³/6
        let v = bigger.apply(1.5).unwrap();
        assert!((v - 1.5f64.powi(3) / 6.0).abs() < 1e-8, "{v}");
    }
}
