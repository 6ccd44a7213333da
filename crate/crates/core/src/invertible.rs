//! The invertible tier: mutually registered inverse pairs, one-sided
//! inverses and the inverse-of-composition rule.

use std::fmt;
use std::sync::Arc;

use crate::domain::Interval;
use crate::error::{Error, Result, Tier};
use crate::function::{Function, Node};

/// Which inverse law a registered pair satisfies, seen from the forward side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InverseKind {
    /// `backward . forward = id` and `forward . backward = id`.
    TwoSided,
    /// Only `backward . forward = id` (on the forward domain).
    LeftOnly,
    /// Only `forward . backward = id` (on the backward domain).
    RightOnly,
}

impl InverseKind {
    /// The same pair seen from the other side.
    pub fn flip(self) -> InverseKind {
        match self {
            InverseKind::TwoSided => InverseKind::TwoSided,
            InverseKind::LeftOnly => InverseKind::RightOnly,
            InverseKind::RightOnly => InverseKind::LeftOnly,
        }
    }

    fn has_left_law(self) -> bool {
        matches!(self, InverseKind::TwoSided | InverseKind::LeftOnly)
    }

    fn has_right_law(self) -> bool {
        matches!(self, InverseKind::TwoSided | InverseKind::RightOnly)
    }
}

impl fmt::Display for InverseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InverseKind::TwoSided => "two_sided",
            InverseKind::LeftOnly => "left_only",
            InverseKind::RightOnly => "right_only",
        })
    }
}

/// Kind of `(f . g)⁻¹ = g⁻¹ . f⁻¹` given the kinds of `f` and `g`.
///
/// The left law needs left laws on both factors, the right law needs right
/// laws on both. A left-only factor combined with a right-only factor keeps
/// neither, which yields `None`.
pub fn compose_kinds(f: InverseKind, g: InverseKind) -> Option<InverseKind> {
    let left = f.has_left_law() && g.has_left_law();
    let right = f.has_right_law() && g.has_right_law();
    match (left, right) {
        (true, true) => Some(InverseKind::TwoSided),
        (true, false) => Some(InverseKind::LeftOnly),
        (false, true) => Some(InverseKind::RightOnly),
        (false, false) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Forward,
    Backward,
}

impl Side {
    pub(crate) fn flip(self) -> Side {
        match self {
            Side::Forward => Side::Backward,
            Side::Backward => Side::Forward,
        }
    }
}

/// Both halves of a registered pair. A self-inverse function stores the same
/// node twice.
pub(crate) struct PairNodes {
    pub(crate) forward: Arc<Node>,
    pub(crate) backward: Arc<Node>,
    pub(crate) kind: InverseKind,
    /// Validation domain: forward-side for two-sided and left-only pairs,
    /// backward-side for right-only pairs.
    pub(crate) domain: Option<Interval>,
}

impl PairNodes {
    pub(crate) fn node(&self, side: Side) -> &Arc<Node> {
        match side {
            Side::Forward => &self.forward,
            Side::Backward => &self.backward,
        }
    }
}

#[derive(Clone)]
pub(crate) struct Link {
    pub(crate) pair: Arc<PairNodes>,
    pub(crate) side: Side,
}

/// A registered inverse pair, as seen from the forward object.
#[derive(Debug, Clone)]
pub struct InversePair {
    pub forward: Function,
    pub backward: Function,
    pub kind: InverseKind,
    pub domain: Option<Interval>,
}

/// Settings for [`make_invertible`].
#[derive(Debug, Clone, Copy)]
pub struct InverseOptions {
    pub kind: InverseKind,
    pub domain: Interval,
    pub samples: usize,
    pub tolerance: f64,
    /// Skip roundtrip validation entirely.
    pub unchecked: bool,
}

impl InverseOptions {
    pub fn new(kind: InverseKind, domain: Interval) -> Self {
        InverseOptions {
            kind,
            domain,
            samples: 16,
            tolerance: 1e-8,
            unchecked: false,
        }
    }

    pub fn two_sided(domain: Interval) -> Self {
        Self::new(InverseKind::TwoSided, domain)
    }

    pub fn unchecked(mut self) -> Self {
        self.unchecked = true;
        self
    }
}

impl Function {
    pub(crate) fn from_pair(pair: Arc<PairNodes>, side: Side) -> Function {
        Function {
            node: pair.node(side).clone(),
            link: Some(Link { pair, side }),
        }
    }

    /// The registered inverse. `f.inverse()?.inverse()?` is `f` itself.
    pub fn inverse(&self) -> Result<Function> {
        let link = self
            .link
            .as_ref()
            .ok_or_else(|| Error::capability(self.describe(), Tier::Invertible))?;
        Ok(Function::from_pair(link.pair.clone(), link.side.flip()))
    }

    /// The inverse law this object's registered inverse satisfies.
    pub fn inverse_kind(&self) -> Option<InverseKind> {
        self.link.as_ref().map(|l| match l.side {
            Side::Forward => l.pair.kind,
            Side::Backward => l.pair.kind.flip(),
        })
    }

    pub fn inverse_pair(&self) -> Option<InversePair> {
        let link = self.link.as_ref()?;
        Some(InversePair {
            forward: self.clone(),
            backward: Function::from_pair(link.pair.clone(), link.side.flip()),
            kind: self.inverse_kind()?,
            domain: link.pair.domain,
        })
    }
}

/// Registers `finv` as the inverse of `f`, returning `f` upgraded to the
/// invertible tier. Both halves are new objects knotted to each other, so
/// the result's inverse's inverse is the result itself.
///
/// Unless `opts.unchecked` is set, the pair is validated on `opts.samples`
/// points of `opts.domain` (the backward domain for right-only pairs).
pub fn make_invertible(f: &Function, finv: &Function, opts: InverseOptions) -> Result<Function> {
    if !opts.unchecked {
        validate_pair(f, finv, &opts)?;
    }
    let pair = Arc::new(PairNodes {
        forward: Arc::new(f.node.respawn()),
        backward: Arc::new(finv.node.respawn()),
        kind: opts.kind,
        domain: Some(opts.domain),
    });
    Ok(Function::from_pair(pair, Side::Forward))
}

/// Registers `f` as its own (two-sided) inverse.
pub fn make_self_inverse(f: &Function, domain: Interval) -> Result<Function> {
    let opts = InverseOptions::two_sided(domain);
    validate_pair(f, f, &opts)?;
    let node = Arc::new(f.node.respawn());
    let pair = Arc::new(PairNodes {
        forward: node.clone(),
        backward: node,
        kind: InverseKind::TwoSided,
        domain: Some(domain),
    });
    Ok(Function::from_pair(pair, Side::Forward))
}

fn roundtrip_error(outer: &Function, inner: &Function, x: f64) -> Result<f64> {
    let back = outer.apply(inner.apply(x)?)?;
    Ok((back - x).abs() / (1.0 + x.abs()))
}

/// Worst relative roundtrip error of the laws that `kind` asserts, as
/// `(x, error)`.
pub fn worst_roundtrip(
    forward: &Function,
    backward: &Function,
    kind: InverseKind,
    domain: Interval,
    samples: usize,
) -> Result<(f64, f64)> {
    let mut worst = (domain.lo, 0.0_f64);
    let mut note = |x: f64, e: f64| {
        if e > worst.1 || e.is_nan() {
            worst = (x, e);
        }
    };
    for x in domain.grid(samples) {
        match kind {
            InverseKind::TwoSided => {
                note(x, roundtrip_error(backward, forward, x)?);
                let y = forward.apply(x)?;
                note(x, roundtrip_error(forward, backward, y)?);
            }
            InverseKind::LeftOnly => note(x, roundtrip_error(backward, forward, x)?),
            InverseKind::RightOnly => note(x, roundtrip_error(forward, backward, x)?),
        }
    }
    Ok(worst)
}

fn validate_pair(f: &Function, finv: &Function, opts: &InverseOptions) -> Result<()> {
    let (worst_x, error) = worst_roundtrip(f, finv, opts.kind, opts.domain, opts.samples)?;
    if !(error <= opts.tolerance) {
        return Err(Error::Validation {
            function: f.describe(),
            worst_x,
            error,
            tolerance: opts.tolerance,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtins;
    use crate::function::{compose, identity, iterate};

    fn close_on(a: &Function, b: &Function, xs: &[f64], tol: f64) {
        for &x in xs {
            let (ya, yb) = (a.apply(x).unwrap(), b.apply(x).unwrap());
            assert!(
                (ya - yb).abs() <= tol * (1.0 + yb.abs()),
                "{a} vs {b} at {x}: {ya} {yb}"
            );
        }
    }

    #[test]
    fn succ_and_pred_are_mutual() {
        let succ = builtins::succ();
        let pred = builtins::pred();
        assert!(succ.inverse().unwrap().same_object(&pred));
        assert!(pred.inverse().unwrap().same_object(&succ));
        close_on(&succ.inverse().unwrap(), &pred, &Interval::law_default().grid(21), 0.0);
    }

    #[test]
    fn make_invertible_registers_mutually() {
        let f = Function::from_fn(|x| 2.0 * x + 1.0);
        let g = Function::from_fn(|y| (y - 1.0) / 2.0);
        let h = make_invertible(&f, &g, InverseOptions::two_sided(Interval::law_default())).unwrap();
        assert!(h.is_invertible());
        assert!(h.inverse().unwrap().inverse().unwrap().same_object(&h));
        assert_eq!(h.inverse().unwrap().apply(5.0).unwrap(), 2.0);
    }

    #[test]
    fn exp_log_roundtrip() {
        let e = builtins::exp();
        let y = e.apply(1.3).unwrap();
        assert!((e.inverse().unwrap().apply(y).unwrap() - 1.3).abs() < 1e-9);
    }

    #[test]
    fn validation_names_worst_point() {
        let f = Function::from_fn(|x| x + 1.0);
        let wrong = Function::from_fn(|x| x - 2.0);
        let err = make_invertible(&f, &wrong, InverseOptions::two_sided(Interval::law_default())).unwrap_err();
        match err {
            Error::Validation { worst_x, error, .. } => {
                assert!(error > 1e-8);
                assert!(Interval::law_default().contains(worst_x));
            }
            other => panic!("unexpected {other:?}"),
        }
        let unchecked = make_invertible(
            &f,
            &wrong,
            InverseOptions::two_sided(Interval::law_default()).unchecked(),
        );
        assert!(unchecked.is_ok());
    }

    #[test]
    fn right_only_pair_from_sine() {
        let s = builtins::sin();
        let asin = Function::from_fn(f64::asin);
        let domain = Interval::new(-1.0, 1.0).unwrap();
        let r = make_invertible(&s, &asin, InverseOptions::new(InverseKind::RightOnly, domain)).unwrap();
        assert_eq!(r.inverse_kind(), Some(InverseKind::RightOnly));
        assert_eq!(r.inverse().unwrap().inverse_kind(), Some(InverseKind::LeftOnly));
        // A two-sided registration must fail: asin(sin(x)) != x outside [-pi/2, pi/2].
        assert!(make_invertible(&s, &asin, InverseOptions::two_sided(Interval::law_default())).is_err());
    }

    #[test]
    fn inverse_requires_capability() {
        let err = builtins::sin().inverse().unwrap_err();
        assert!(matches!(
            err,
            Error::Capability {
                missing: Tier::Invertible,
                ..
            }
        ));
    }

    #[test]
    fn identity_is_self_inverse() {
        let id = identity();
        assert!(id.inverse().unwrap().same_object(&id));
        close_on(&id.inverse().unwrap(), &id, &[-2.75, 0.0, 4.0], 0.0);
    }

    #[test]
    fn inverse_of_composition() {
        let (exp, succ, pred, log) = (builtins::exp(), builtins::succ(), builtins::pred(), builtins::log());
        let c = compose(&exp, &succ);
        let expected = compose(&pred, &log);
        let xs: Vec<f64> = Interval::new(0.5, 50.0).unwrap().grid(20);
        close_on(&c.inverse().unwrap(), &expected, &xs, 1e-9);
        let y = c.apply(2.0).unwrap();
        assert!((c.inverse().unwrap().apply(y).unwrap() - 2.0).abs() < 1e-9);

        let ee = compose(&exp, &exp);
        let y = ee.apply(0.5).unwrap();
        assert!((ee.inverse().unwrap().apply(y).unwrap() - 0.5).abs() < 1e-9);

        close_on(
            &iterate(&succ, 2).inverse().unwrap(),
            &iterate(&pred, 2),
            &Interval::law_default().grid(50),
            0.0,
        );
    }

    #[test]
    fn kind_algebra() {
        use InverseKind::*;
        assert_eq!(compose_kinds(TwoSided, TwoSided), Some(TwoSided));
        assert_eq!(compose_kinds(TwoSided, LeftOnly), Some(LeftOnly));
        assert_eq!(compose_kinds(TwoSided, RightOnly), Some(RightOnly));
        assert_eq!(compose_kinds(RightOnly, TwoSided), Some(RightOnly));
        assert_eq!(compose_kinds(LeftOnly, LeftOnly), Some(LeftOnly));
        assert_eq!(compose_kinds(LeftOnly, RightOnly), None);
        assert_eq!(compose_kinds(RightOnly, LeftOnly), None);
    }

    #[test]
    fn mixed_kind_composite_satisfies_only_its_law() {
        // exp (two-sided) after sin_restricted (right-only): inverse is arcsin . log.
        let c = compose(&builtins::exp(), &builtins::sin_restricted());
        assert_eq!(c.inverse_kind(), Some(InverseKind::RightOnly));
        let inv = c.inverse().unwrap();
        // Right law on the backward domain exp([-1, 1]).
        for y in Interval::new((-1.0f64).exp(), 1.0f64.exp()).unwrap().grid(20) {
            let back = c.apply(inv.apply(y).unwrap()).unwrap();
            assert!((back - y).abs() < 1e-12);
        }
        // The left law does not hold off [-pi/2, pi/2].
        let x = 3.0;
        assert!((inv.apply(c.apply(x).unwrap()).unwrap() - x).abs() > 1.0);
    }
}
