//! The differentiable tier: lazily built, memoized derivative towers with a
//! central-difference default and closed-form overrides.

use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result, Tier};
use crate::function::{compose_node, constant, div, Body, Function, Maker, Node};

/// Central-difference settings: `f'(x) ≈ (f(x+h) - f(x-h)) / (2h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    step: f64,
}

pub const DEFAULT_FD_STEP: f64 = 0.001;

static GLOBAL_FD_STEP: AtomicU64 = AtomicU64::new(DEFAULT_FD_STEP.to_bits());

impl FdConfig {
    pub fn new(step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidArgument(format!("fd step must be positive, got {step}")));
        }
        Ok(FdConfig { step })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn divisor(&self) -> f64 {
        2.0 * self.step
    }

    /// The library-wide step used by default derivatives.
    pub fn global() -> FdConfig {
        FdConfig {
            step: f64::from_bits(GLOBAL_FD_STEP.load(Ordering::Relaxed)),
        }
    }

    /// Sets the library-wide step. Derivatives already materialized keep
    /// the step they were built with.
    pub fn set_global(cfg: FdConfig) {
        GLOBAL_FD_STEP.store(cfg.step.to_bits(), Ordering::Relaxed);
    }
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { step: DEFAULT_FD_STEP }
    }
}

thread_local! {
    static MAKER_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of derivative makers run on the current thread so far.
pub fn derivative_maker_calls() -> u64 {
    MAKER_CALLS.with(Cell::get)
}

/// A memoized slot for a derived function object. The maker runs at most
/// once; concurrent demands block until the single winner has finished.
pub(crate) struct LazyCell {
    maker: Maker,
    cell: OnceLock<Function>,
}

impl LazyCell {
    pub(crate) fn new(maker: Maker) -> Self {
        LazyCell {
            maker,
            cell: OnceLock::new(),
        }
    }

    pub(crate) fn finite_difference() -> Self {
        LazyCell::new(fd_maker(None))
    }

    pub(crate) fn fresh(&self) -> Self {
        LazyCell::new(self.maker.clone())
    }

    pub(crate) fn is_materialized(&self) -> bool {
        self.cell.get().is_some()
    }

    pub(crate) fn force(&self, owner: &Function, on_make: impl FnOnce()) -> &Function {
        self.cell.get_or_init(|| {
            on_make();
            let made = (self.maker)(owner);
            // Every tower level must be differentiable in turn.
            if made.is_differentiable() {
                made
            } else {
                made.with_fd_derivative()
            }
        })
    }
}

fn fd_maker(cfg: Option<FdConfig>) -> Maker {
    Arc::new(move |owner: &Function| Function::plain(fd_node(format!("d({owner})"), owner.body(), cfg)))
}

/// `cfg: None` reads the global step when the stencil object is built.
fn fd_node(name: String, f: Body, cfg: Option<FdConfig>) -> Node {
    let h = cfg.unwrap_or_else(FdConfig::global);
    let (step, divisor) = (h.step(), h.divisor());
    let body: Body = Arc::new(move |x| Ok((f(x + step)? - f(x - step)?) / divisor));
    let mut node = Node::new(Some(name), body);
    node.derivative = Some(LazyCell::new(fd_maker(cfg)));
    node
}

/// Central-difference derivative of `f` with an explicit step. The result is
/// itself differentiable by nested central differences with the same step.
pub fn fd_derivative(f: &Function, cfg: FdConfig) -> Function {
    Function::plain(fd_node(format!("d({f})"), f.body(), Some(cfg)))
}

impl Function {
    /// The memoized derivative.
    ///
    /// The first demand runs the registered maker (closed form, rule-built or
    /// the finite-difference default); later demands return the same object.
    /// The derivative of an invertible-and-differentiable object is returned
    /// without the invertible capability.
    pub fn derivative(&self) -> Result<Function> {
        let cell = self
            .node
            .derivative
            .as_ref()
            .ok_or_else(|| Error::capability(self.describe(), Tier::Differentiable))?;
        let d = cell.force(self, || MAKER_CALLS.with(|c| c.set(c.get() + 1))).clone();
        Ok(if self.capabilities().is_combined() {
            d.without_inverse()
        } else {
            d
        })
    }

    /// Whether the derivative has been built yet.
    pub fn derivative_materialized(&self) -> bool {
        self.node.derivative.as_ref().is_some_and(LazyCell::is_materialized)
    }

    /// `(f(x), f'(x))`, by the per-object override when one is registered.
    pub fn value_and_derivative(&self, x: f64) -> Result<(f64, f64)> {
        if !self.is_differentiable() {
            return Err(Error::capability(self.describe(), Tier::Differentiable));
        }
        match &self.node.value_and_derivative {
            Some(vd) => {
                if !x.is_finite() {
                    return Err(Error::NonFiniteInput {
                        function: self.describe(),
                        x,
                    });
                }
                vd(x)
            }
            None => Ok((self.apply(x)?, self.derivative()?.apply(x)?)),
        }
    }
}

/// A stand-in for `f'` that forces `f`'s derivative only when applied.
/// Calculus rules use it so that building a derivative never builds the
/// derivatives of the operands.
pub(crate) fn deferred_derivative(f: &Function) -> Function {
    let src = f.clone();
    let body: Body = Arc::new(move |x| src.derivative()?.apply(x));
    let mut node = Node::new(Some(format!("d({f})")), body);
    let src = f.clone();
    node.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| {
        match src.derivative() {
            Ok(d) => deferred_derivative(&d),
            // Unreachable for operands checked at construction; keep the
            // failure observable at application time.
            Err(e) => Function::builder(move |_| Err(e.clone())).fd_derivative().build(),
        }
    })));
    Function::plain(node)
}

/// `y ↦ 1 / f'(g(y))`, the derivative of `g` when `g` inverts `f`.
/// Opt-in helper for building combined-tier pairs.
pub fn inverse_rule_derivative(forward: &Function, backward: &Function) -> Result<Function> {
    if !forward.is_differentiable() {
        return Err(Error::capability(forward.describe(), Tier::Differentiable));
    }
    let slope = Function::plain(compose_node(&deferred_derivative(forward), backward));
    Ok(div(&constant(1.0), &slope).renamed(format!("d({backward})")))
}

/// The inverse-function rule applied to a registered pair.
pub fn derivative_of_inverse(f: &Function) -> Result<Function> {
    inverse_rule_derivative(f, &f.inverse()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtins;
    use crate::function::{add, compose, identity, mul, neg, sub};

    fn fd() -> FdConfig {
        FdConfig::default()
    }

    #[test]
    fn fd_config_invariants() {
        let c = FdConfig::default();
        assert_eq!(c.step(), 0.001);
        assert_eq!(c.divisor(), 2.0 * c.step());
        assert!(FdConfig::new(0.0).is_err());
        assert!(FdConfig::new(-1.0).is_err());
    }

    #[test]
    fn closed_form_derivatives() {
        let d = builtins::sin().derivative().unwrap();
        assert_eq!(d.apply(0.7).unwrap(), 0.7f64.cos());
        let e = builtins::exp().derivative().unwrap();
        assert_eq!(e.apply(2.0).unwrap(), 2.0f64.exp());
    }

    #[test]
    fn fd_stencil_values() {
        // Not bit-exact: 5.001 and 4.999 are not representable.
        let d = fd_derivative(&identity(), fd()).apply(5.0).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "{d}");
        let d = fd_derivative(&builtins::sqr_real(), fd()).apply(3.0).unwrap();
        assert!((d - 6.0).abs() < 1e-9, "{d}");
        let d = fd_derivative(&builtins::sin(), fd()).apply(0.0).unwrap();
        assert!((d - 1.0).abs() <= 0.001f64.powi(2));
    }

    #[test]
    fn fd_propagates_domain_errors() {
        let d = fd_derivative(&builtins::log(), fd());
        assert!(d.apply(0.0005).unwrap_err().is_domain());
    }

    #[test]
    fn derivative_requires_capability() {
        let err = builtins::floor().derivative().unwrap_err();
        assert!(matches!(
            err,
            Error::Capability {
                missing: Tier::Differentiable,
                ..
            }
        ));
    }

    #[test]
    fn second_derivative_of_exp2x() {
        let f = builtins::exp2x();
        let d2 = f.derivative().unwrap().derivative().unwrap();
        assert!((d2.apply(0.0).unwrap() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn memoized_identity() {
        let f = compose(&builtins::sin(), &builtins::sqr_real());
        let a = f.derivative().unwrap();
        let b = f.derivative().unwrap();
        assert!(a.same_object(&b));
        assert_eq!(a.serial(), b.serial());
    }

    #[test]
    fn combined_tier_derivative_drops_inverse() {
        let e = builtins::exp();
        assert!(e.capabilities().is_combined());
        let d = e.derivative().unwrap();
        assert!(!d.is_invertible());
        assert!(d.is_differentiable());
        let dl = builtins::log().derivative().unwrap();
        assert!(!dl.is_invertible());
        assert_eq!(dl.apply(4.0).unwrap(), 0.25);
    }

    #[test]
    fn chain_rule_examples() {
        let sin_sq = compose(&builtins::sin(), &builtins::sqr_real());
        let d = sin_sq.derivative().unwrap().apply(1.0).unwrap();
        let oracle = fd_derivative(&sin_sq, fd()).apply(1.0).unwrap();
        assert!((d - oracle).abs() < 1e-4);
        assert!((d - 2.0 * 1.0f64.cos()).abs() < 1e-12);

        let ee = compose(&builtins::exp(), &builtins::exp());
        let d = ee.derivative().unwrap().apply(0.3).unwrap();
        let oracle = fd_derivative(&ee, fd()).apply(0.3).unwrap();
        assert!((d - oracle).abs() < 1e-4);

        let s = builtins::sin();
        let with_id = compose(&s, &identity());
        for x in [-1.0, 0.0, 0.4, 2.0] {
            let a = with_id.derivative().unwrap().apply(x).unwrap();
            let b = s.derivative().unwrap().apply(x).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn arithmetic_rules() {
        let (s, c, x) = (builtins::sin(), builtins::cos(), identity());
        let d = add(&s, &c).derivative().unwrap();
        let expected = sub(&c, &s);
        for t in [-2.0, 0.0, 0.5, 3.0] {
            assert!((d.apply(t).unwrap() - expected.apply(t).unwrap()).abs() < 1e-12);
        }
        let d = mul(&x, &x).derivative().unwrap();
        assert!((d.apply(4.0).unwrap() - 8.0).abs() < 1e-6);
        let d = neg(&s).derivative().unwrap();
        assert!((d.apply(0.0).unwrap() + 1.0).abs() < 1e-6);
        let q = crate::function::div(&s, &c).derivative().unwrap();
        let oracle = fd_derivative(&crate::function::div(&s, &c), fd());
        assert!((q.apply(0.3).unwrap() - oracle.apply(0.3).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn quotient_derivative_keeps_zero_denominator_error() {
        let q = crate::function::div(&constant(1.0), &identity());
        assert!(q.derivative().unwrap().apply(0.0).unwrap_err().is_domain());
    }

    #[test]
    fn value_and_derivative_default_and_override() {
        assert_eq!(builtins::exp().value_and_derivative(0.0).unwrap(), (1.0, 1.0));
        assert_eq!(builtins::sin().value_and_derivative(0.0).unwrap(), (0.0, 1.0));
        let f = compose(&builtins::sin(), &builtins::sqr_real());
        let (v, d) = f.value_and_derivative(1.0).unwrap();
        assert!((v - 1.0f64.sin()).abs() < 1e-12);
        assert!((d - 2.0 * 1.0f64.cos()).abs() < 1e-4);
        for x in [-3.0, -0.5, 0.0, 1.5, 4.0] {
            let (v, d) = builtins::exp().value_and_derivative(x).unwrap();
            let (dv, dd) = (
                builtins::exp().apply(x).unwrap(),
                builtins::exp().derivative().unwrap().apply(x).unwrap(),
            );
            assert!((v - dv).abs() <= 1e-8 * dv.abs() && (d - dd).abs() <= 1e-8 * dd.abs());
        }
    }

    #[test]
    fn composing_forces_nothing() {
        let before = derivative_maker_calls();
        let (f, g) = (builtins::exp2x().renamed("f"), builtins::sin().renamed("g"));
        let c = compose(&f, &g);
        assert_eq!(derivative_maker_calls(), before);
        let d = c.derivative().unwrap();
        assert_eq!(derivative_maker_calls(), before + 1);
        assert!(!f.derivative_materialized() && !g.derivative_materialized());
        d.apply(0.2).unwrap();
        assert!(f.derivative_materialized() && g.derivative_materialized());
        assert!(!d.derivative_materialized());
    }

    #[test]
    fn inverse_rule_matches_fd() {
        let d = derivative_of_inverse(&builtins::exp()).unwrap();
        for y in [0.5, 1.0, 2.0, 10.0] {
            let oracle = fd_derivative(&builtins::log(), fd()).apply(y).unwrap();
            assert!((d.apply(y).unwrap() - oracle).abs() < 1e-4 * (1.0 + oracle.abs()));
        }
        assert!(derivative_of_inverse(&builtins::sin()).is_err());
    }

    #[test]
    fn concurrent_demand_has_one_winner() {
        let f = compose(&builtins::exp(), &builtins::sin());
        let serials: Vec<u64> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..8).map(|_| s.spawn(|| f.derivative().unwrap().serial())).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(serials.windows(2).all(|w| w[0] == w[1]));
    }
}
