//! Executable law suites: each law is checked against an independent oracle
//! (finite differences, brute force, closed forms) and reported with its
//! worst sample.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::catalog::{builtins, catalog};
use crate::differentiable::{derivative_maker_calls, fd_derivative, FdConfig};
use crate::domain::{box_samples, Interval};
use crate::error::{Error, Result};
use crate::function::{add, compose, identity, iterate, try_compose, Function};
use crate::integration::{antiderivative, definite_integral, simpson, QuadratureConfig};
use crate::invertible::{make_invertible, worst_roundtrip, InverseKind, InverseOptions};
use crate::model::{
    chi_square_per_dof, fit_normal_values, normal_pdf, normalization_config, total_mass, total_mass_2d,
    transform_model, transform_model_multivariate, transformed_aom, ContinuousModel, Datum, IsotropicNormal, Normal,
};
use crate::multivariate::{compose_vector, max_rel_diff};
use crate::specialized::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Inverse,
    Derivative,
    Integral,
    Multivariate,
    Perm,
    Model,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "algebra",
        "inverse",
        "derivative",
        "integral",
        "multivariate",
        "perm",
        "model",
        "all",
    ];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Algebra,
                Suite::Inverse,
                Suite::Derivative,
                Suite::Integral,
                Suite::Multivariate,
                Suite::Perm,
                Suite::Model,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Suite::Algebra => 0,
            Suite::Inverse => 1,
            Suite::Derivative => 2,
            Suite::Integral => 3,
            Suite::Multivariate => 4,
            Suite::Perm => 5,
            Suite::Model => 6,
            Suite::All => 7,
        };
        f.write_str(Suite::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "inverse" => Suite::Inverse,
            "derivative" => Suite::Derivative,
            "integral" => Suite::Integral,
            "multivariate" => Suite::Multivariate,
            "perm" => Suite::Perm,
            "model" => Suite::Model,
            "all" => Suite::All,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Deliberate defects that the suites must catch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Registers `succ` as its own inverse.
    WrongInverse,
    /// Registers `sin` as the closed-form derivative of `sin`.
    WrongDerivative,
    /// Feeds the array `[0,0,2]` to the permutation group laws.
    BrokenPermutation,
}

impl Fault {
    pub const NAMES: [&'static str; 3] = ["wrong-inverse", "wrong-derivative", "broken-permutation"];
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wrong-inverse" => Ok(Fault::WrongInverse),
            "wrong-derivative" => Ok(Fault::WrongDerivative),
            "broken-permutation" => Ok(Fault::BrokenPermutation),
            _ => Err(Error::InvalidArgument(format!(
                "unknown fault {s:?}; expected one of {}",
                Fault::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub suite: Suite,
    pub law: String,
    pub passed: bool,
    /// Where the worst error occurred.
    pub worst_at: String,
    pub error: f64,
    pub tolerance: f64,
    /// Set when the check could not be carried out.
    pub failure: Option<String>,
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: worst error {:.3e} at {} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.law,
            self.error,
            self.worst_at,
            self.tolerance
        )?;
        if let Some(m) = &self.failure {
            write!(f, ": {m}")?;
        }
        Ok(())
    }
}

/// Tracks the worst error seen by one law.
#[derive(Debug, Clone)]
pub struct Worst {
    pub at: String,
    pub error: f64,
}

impl Default for Worst {
    fn default() -> Self {
        Worst::new()
    }
}

impl Worst {
    pub fn new() -> Self {
        Worst {
            at: "-".into(),
            error: 0.0,
        }
    }

    pub fn note(&mut self, at: impl fmt::Display, error: f64) {
        if error > self.error || error.is_nan() && !self.error.is_nan() {
            self.error = error;
            self.at = at.to_string();
        }
    }
}

fn law(
    suite: Suite,
    name: impl Into<String>,
    tolerance: f64,
    body: impl FnOnce(&mut Worst) -> Result<()>,
) -> LawReport {
    let mut w = Worst::new();
    let outcome = body(&mut w);
    let failure = outcome.err().map(|e| e.to_string());
    LawReport {
        suite,
        law: name.into(),
        passed: failure.is_none() && w.error <= tolerance,
        worst_at: w.at,
        error: w.error,
        tolerance,
        failure,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// Runs `suite` (every suite for [`Suite::All`]) with an optional fault injected.
pub fn run(suite: Suite, fault: Option<Fault>) -> Vec<LawReport> {
    let mut out = Vec::new();
    for s in suite.members() {
        out.extend(match s {
            Suite::Algebra => algebra(),
            Suite::Inverse => inverse(fault),
            Suite::Derivative => derivative(fault),
            Suite::Integral => integral(),
            Suite::Multivariate => multivariate(),
            Suite::Perm => perm(fault),
            Suite::Model => model(),
            Suite::All => unreachable!(),
        });
    }
    out
}

fn algebra() -> Vec<LawReport> {
    let s = Suite::Algebra;
    let pool: Vec<Function> = [
        "sin", "cos", "succ", "pred", "sqr_real", "abs", "floor", "ceil", "round", "identity",
    ]
    .iter()
    .map(|k| catalog().function(k).expect("catalog key"))
    .collect();
    let xs = Interval::new(-2.0, 2.0).expect("interval").grid(41);
    let mut out = Vec::new();
    out.push(law(s, "compose associativity", 0.0, |w| {
        for f in &pool {
            for g in &pool {
                for h in pool.iter().step_by(3) {
                    let (a, b) = (compose(&compose(f, g), h), compose(f, &compose(g, h)));
                    for &x in &xs {
                        w.note(format!("{f}.{g}.{h} at {x}"), (a.apply(x)? - b.apply(x)?).abs());
                    }
                }
            }
        }
        Ok(())
    }));
    out.push(law(s, "identity is a two-sided unit", 0.0, |w| {
        let id = identity();
        for f in &pool {
            let (l, r) = (compose(&id, f), compose(f, &id));
            for &x in &xs {
                let v = f.apply(x)?;
                w.note(
                    format!("{f} at {x}"),
                    (l.apply(x)? - v).abs().max((r.apply(x)? - v).abs()),
                );
            }
        }
        Ok(())
    }));
    out.push(law(s, "iterate matches repeated application", 0.0, |w| {
        for f in &pool {
            for n in 0..4 {
                let it = iterate(f, n);
                for &x in &xs {
                    let mut v = x;
                    for _ in 0..n {
                        v = f.apply(v)?;
                    }
                    w.note(format!("{f}^{n} at {x}"), (it.apply(x)? - v).abs());
                }
            }
        }
        Ok(())
    }));
    out.push(law(s, "pointwise sum", 0.0, |w| {
        for f in &pool {
            for g in &pool {
                let h = add(f, g);
                for &x in &xs {
                    w.note(
                        format!("{f}+{g} at {x}"),
                        (h.apply(x)? - (f.apply(x)? + g.apply(x)?)).abs(),
                    );
                }
            }
        }
        Ok(())
    }));
    out
}

/// Invertible catalog entries, each with the domain its law is checked on.
fn invertible_entries(fault: Option<Fault>) -> Result<Vec<(String, Function, Interval)>> {
    let mut v = Vec::new();
    for (e, f) in catalog().scalars() {
        let Some(pair) = f.inverse_pair() else { continue };
        let domain = pair.domain.or(e.domain).expect("scalar entries have domains");
        let f = if fault == Some(Fault::WrongInverse) && e.key == "succ" {
            make_invertible(f, f, InverseOptions::two_sided(domain).unchecked())?
        } else {
            f.clone()
        };
        v.push((e.key.clone(), f, domain));
    }
    Ok(v)
}

fn inverse(fault: Option<Fault>) -> Vec<LawReport> {
    let s = Suite::Inverse;
    let entries = match invertible_entries(fault) {
        Ok(v) => v,
        Err(e) => return vec![law(s, "inverse registration", 0.0, |_| Err(e))],
    };
    let mut out = Vec::new();
    for (key, f, _) in &entries {
        let pair = f.inverse_pair().expect("invertible");
        // The pair domain belongs to whichever side registered it; check from
        // the forward side it was registered on.
        let (fwd, bwd, kind) = if f.inverse_kind() == Some(InverseKind::LeftOnly) {
            (pair.backward.clone(), pair.forward.clone(), InverseKind::RightOnly)
        } else {
            (pair.forward.clone(), pair.backward.clone(), pair.kind)
        };
        let domain = pair.domain.expect("catalog pairs carry a domain");
        out.push(law(s, format!("roundtrip ({key}, {kind})"), 1e-8, |w| {
            let (x, e) = roundtrip_from_registration(&fwd, &bwd, kind, domain)?;
            w.note(format!("x = {x}"), e);
            Ok(())
        }));
    }
    out.push(law(s, "inverse of inverse is the same object", 0.0, |w| {
        for (key, f, _) in &entries {
            let back = f.inverse()?.inverse()?;
            w.note(key, if back.same_object(f) { 0.0 } else { 1.0 });
        }
        Ok(())
    }));
    out.push(law(s, "inverse of a composition", 1e-8, |w| {
        inverse_of_composition(&entries, w)
    }));
    out
}

fn roundtrip_from_registration(
    fwd: &Function,
    bwd: &Function,
    kind: InverseKind,
    domain: Interval,
) -> Result<(f64, f64)> {
    // Two-sided pairs that were registered from the backward side (log, pred)
    // carry the forward side's domain, so check from the side that owns it.
    match worst_roundtrip(fwd, bwd, kind, domain, 100) {
        Ok(r) => Ok(r),
        Err(e) if e.is_domain() && kind == InverseKind::TwoSided => worst_roundtrip(bwd, fwd, kind, domain, 100),
        Err(e) => Err(e),
    }
}

/// `(f.g)⁻¹` against `g⁻¹.f⁻¹` at points `y = (f.g)(x)`, `x` on `g`'s domain.
pub fn inverse_of_composition(entries: &[(String, Function, Interval)], w: &mut Worst) -> Result<()> {
    for (kf, f, _) in entries {
        for (kg, g, dg) in entries {
            let Ok(fg) = try_compose(f, g) else { continue };
            let lhs = fg.inverse()?;
            let rhs = compose(&g.inverse()?, &f.inverse()?);
            for x in dg.grid(50) {
                let Ok(y) = fg.apply(x) else { continue };
                if !y.is_finite() {
                    continue;
                }
                // A right-only composite inverse can be undefined at points of
                // the forward range; both sides must then agree on that.
                match (lhs.apply(y), rhs.apply(y)) {
                    (Ok(a), Ok(b)) => w.note(format!("({kf}.{kg}) at y = {y}"), rel(a, b)),
                    (Err(_), Err(_)) => {}
                    (Err(e), Ok(_)) | (Ok(_), Err(e)) => return Err(e),
                }
            }
        }
    }
    Ok(())
}

/// Differentiable catalog entries with closed-form derivatives, plus the
/// injected faulty entry.
fn closed_form_entries(fault: Option<Fault>) -> Vec<(String, Function, Interval)> {
    let mut v: Vec<_> = catalog()
        .scalars()
        .filter(|(e, f)| f.is_differentiable() && e.key != "exp2x")
        .map(|(e, f)| (e.key.clone(), f.clone(), e.domain.expect("scalar domain")))
        .collect();
    if fault == Some(Fault::WrongDerivative) {
        v.push((
            "sin".into(),
            builtins::sin().with_derivative(builtins::sin),
            Interval::law_default(),
        ));
    }
    v
}

fn derivative(fault: Option<Fault>) -> Vec<LawReport> {
    let s = Suite::Derivative;
    let fd = FdConfig::default();
    let mut out = Vec::new();
    out.push(law(s, "closed form agrees with finite differences", 1e-4, |w| {
        for (key, f, domain) in closed_form_entries(fault) {
            let (d, oracle) = (f.derivative()?, fd_derivative(&f, fd));
            for x in domain.grid(100) {
                let cf = d.apply(x)?;
                w.note(
                    format!("{key} at {x}"),
                    (cf - oracle.apply(x)?).abs() / (1.0 + cf.abs()),
                );
            }
        }
        Ok(())
    }));
    out.push(law(s, "chain rule", 1e-4, |w| chain_rule(w, 100)));
    out.push(law(s, "sum rule", 1e-10, |w| {
        let pool = ["sin", "cos", "exp", "sqr_real", "succ"];
        for a in pool {
            for b in pool {
                let (f, g) = (catalog().function(a)?, catalog().function(b)?);
                let lhs = add(&f, &g).derivative()?;
                let rhs = add(&f.derivative()?, &g.derivative()?);
                for x in Interval::new(-3.0, 3.0)?.grid(50) {
                    w.note(format!("{a}+{b} at {x}"), (lhs.apply(x)? - rhs.apply(x)?).abs());
                }
            }
        }
        Ok(())
    }));
    out.push(law(s, "third derivative of exp2x at 0", 1e-2, |w| {
        let d3 = third_derivative_exp2x()?;
        w.note("x = 0", (d3 - 8.0).abs());
        Ok(())
    }));
    out.push(law(s, "composing builds no derivatives", 0.0, |w| {
        let before = derivative_maker_calls();
        let c = compose(&builtins::exp2x().renamed("f"), &builtins::sin().renamed("g"));
        w.note("compose", (derivative_maker_calls() - before) as f64);
        let d1 = c.derivative()?;
        w.note("first demand", (derivative_maker_calls() - before) as f64 - 1.0);
        let d2 = c.derivative()?;
        w.note("second demand", if d1.serial() == d2.serial() { 0.0 } else { 1.0 });
        Ok(())
    }));
    out.push(law(s, "value_and_derivative override agrees", 1e-8, |w| {
        for (key, f, domain) in closed_form_entries(None) {
            let d = f.derivative()?;
            for x in domain.grid(25) {
                let (v, dv) = f.value_and_derivative(x)?;
                w.note(format!("{key} at {x}"), rel(v, f.apply(x)?).max(rel(dv, d.apply(x)?)));
            }
        }
        Ok(())
    }));
    out
}

/// Worst `|D(f.g) - FD(f.g)| / (1 + |D(f.g)|)` over all 25 ordered pairs of
/// {sin, cos, exp, sqr_real, exp2x} at `samples` points of [-0.5, 0.5].
///
/// The oracle's own truncation error is about `h²/6 · |F'''/F'|`; for
/// exp2x.exp2x that is `h²/6 · (4e^{2x} + 2)²`, which passes 1e-4 near
/// x = 0.8, so the sample interval stays inside that.
pub fn chain_rule(w: &mut Worst, samples: usize) -> Result<()> {
    let pool = ["sin", "cos", "exp", "sqr_real", "exp2x"];
    let fd = FdConfig::default();
    for a in pool {
        for b in pool {
            let c = compose(&catalog().function(a)?, &catalog().function(b)?);
            let (d, oracle) = (c.derivative()?, fd_derivative(&c, fd));
            for x in Interval::new(-0.5, 0.5)?.grid(samples) {
                let v = d.apply(x)?;
                w.note(
                    format!("{a}.{b} at {x}"),
                    (v - oracle.apply(x)?).abs() / (1.0 + v.abs()),
                );
            }
        }
    }
    Ok(())
}

pub fn third_derivative_exp2x() -> Result<f64> {
    builtins::exp2x().derivative()?.derivative()?.derivative()?.apply(0.0)
}

fn integral() -> Vec<LawReport> {
    let s = Suite::Integral;
    let cfg = QuadratureConfig::default();
    let mut out = Vec::new();
    out.push(law(s, "integral of sin over [0, pi]", 1e-9, |w| {
        w.note("simpson", (simpson(&builtins::sin(), 0.0, PI, &cfg)? - 2.0).abs());
        Ok(())
    }));
    out.push(law(s, "Simpson is exact for cubics", 1e-12, |w| {
        let one = QuadratureConfig::new(2, 1, 1.0)?;
        for (a, b, c, d) in [(1.0, 0.0, 0.0, 0.0), (2.0, -1.0, 3.0, -4.0), (-0.5, 2.0, 0.0, 1.0)] {
            let p = Function::from_fn(move |x| a * x * x * x + b * x * x + c * x + d);
            let big = |x: f64| a * x.powi(4) / 4.0 + b * x.powi(3) / 3.0 + c * x * x / 2.0 + d * x;
            let (lo, hi) = (-1.0, 2.0);
            w.note(
                format!("{a}x^3+{b}x^2+{c}x+{d}"),
                (simpson(&p, lo, hi, &one)? - (big(hi) - big(lo))).abs(),
            );
        }
        Ok(())
    }));
    out.push(law(s, "derivative of the antiderivative", 1e-6, |w| {
        for (e, f) in catalog().scalars() {
            if !f.is_differentiable() {
                continue;
            }
            let domain = e.domain.expect("scalar domain");
            let d = antiderivative(f, domain.lo).derivative()?;
            for x in domain.grid(50) {
                w.note(format!("{} at {x}", e.key), (d.apply(x)? - f.apply(x)?).abs());
            }
        }
        Ok(())
    }));
    out.push(law(s, "integral of the derivative", 1e-5, |w| {
        for (key, g, domain) in closed_form_entries(None) {
            let dg = g.derivative()?;
            let (a, b) = (domain.lo, domain.lo + 0.5 * domain.width());
            let lhs = definite_integral(&dg, a, b, &cfg)?;
            w.note(
                format!("{key} on [{a}, {b}]"),
                (lhs - (g.apply(b)? - g.apply(a)?)).abs(),
            );
        }
        Ok(())
    }));
    out.push(law(s, "additivity over adjacent intervals", 2.0 * cfg.abs_tol, |w| {
        for key in ["sin", "exp2x", "sqr_real", "cos"] {
            let f = catalog().function(key)?;
            let (a, b, c) = (-1.0, 0.3, 2.0);
            let whole = simpson(&f, a, c, &cfg)?;
            let parts = simpson(&f, a, b, &cfg)? + simpson(&f, b, c, &cfg)?;
            w.note(key, (whole - parts).abs());
        }
        Ok(())
    }));
    out
}

fn multivariate() -> Vec<LawReport> {
    let s = Suite::Multivariate;
    let p = builtins::polar2cartesian();
    let c = builtins::cartesian2polar();
    let mut out = Vec::new();
    out.push(law(s, "polar Jacobian determinant is r", 1e-5, |w| {
        polar_determinant_grid(w, 20)
    }));
    out.push(law(
        s,
        "closed-form Jacobians agree with finite differences",
        1e-4,
        |w| {
            let polar_box = [Interval::new(0.5, 5.0)?, Interval::new(-3.0, 3.0)?];
            let plane_box = [Interval::new(-4.0, 4.0)?, Interval::new(0.2, 4.0)?];
            for (f, bx) in [(&p, &polar_box), (&c, &plane_box)] {
                for x in box_samples(bx, 50) {
                    let (j, fd) = (f.jacobian(&x)?, f.fd_jacobian(&x, FdConfig::default())?);
                    let e = j
                        .iter()
                        .zip(fd.iter())
                        .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
                        .fold(0.0, f64::max);
                    w.note(format!("{} at {x:?}", f.name()), e);
                }
            }
            Ok(())
        },
    ));
    out.push(law(s, "polar roundtrip", 1e-10, |w| {
        let bx = [Interval::new(1e-3, 10.0)?, Interval::new(-PI + 1e-6, PI - 1e-6)?];
        for x in box_samples(&bx, 200) {
            w.note(format!("{x:?}"), max_rel_diff(&c.apply(&p.apply(&x)?)?, &x));
        }
        Ok(())
    }));
    out.push(law(s, "determinant of a composition is the product", 1e-4, |w| {
        let cp = compose_vector(&c, &p)?;
        let bx = [Interval::new(0.5, 5.0)?, Interval::new(-3.0, 3.0)?];
        for x in box_samples(&bx, 50) {
            let lhs = cp.jacobian_determinant(&x)?;
            let rhs = c.jacobian_determinant(&p.apply(&x)?)? * p.jacobian_determinant(&x)?;
            w.note(format!("{x:?}"), (lhs - rhs).abs());
        }
        Ok(())
    }));
    out
}

/// `|det J(r, θ) - r|` for polar2cartesian on an `n×n` grid of
/// r ∈ [0.5, 5], θ ∈ (-π, π).
pub fn polar_determinant_grid(w: &mut Worst, n: usize) -> Result<()> {
    let p = builtins::polar2cartesian();
    let rs = Interval::new(0.5, 5.0)?.grid(n);
    let thetas = Interval::new(-PI, PI)?.midpoints(n);
    for &r in &rs {
        for &t in &thetas {
            w.note(
                format!("r = {r}, theta = {t}"),
                (p.jacobian_determinant(&[r, t])? - r).abs(),
            );
        }
    }
    Ok(())
}

fn all_perms(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    heap_permutations(n, &mut a, &mut out);
    out
}

fn heap_permutations(k: usize, a: &mut Vec<usize>, out: &mut Vec<Permutation>) {
    if k <= 1 {
        out.push(Permutation::from_array_unchecked(a.clone()));
        return;
    }
    for i in 0..k {
        heap_permutations(k - 1, a, out);
        let j = if k % 2 == 0 { i } else { 0 };
        if i + 1 < k {
            a.swap(j, k - 1);
        }
    }
}

fn perm_error(p: &Permutation, q: &Permutation) -> Result<f64> {
    let c = p.compose(q)?;
    let mut bad = 0;
    for i in 0..p.n() {
        if c.apply(i)? != p.apply(q.apply(i)?)? {
            bad += 1;
        }
    }
    Ok(bad as f64)
}

/// Permutations used by the group-law checks: all of S_1..S_4, or with the
/// fault, a broken array in their place.
fn perm_pool(n: usize, fault: Option<Fault>) -> Vec<Permutation> {
    let mut v = all_perms(n);
    if fault == Some(Fault::BrokenPermutation) && n == 3 {
        v[1] = Permutation::from_array_unchecked(vec![0, 0, 2]);
    }
    v
}

fn perm(fault: Option<Fault>) -> Vec<LawReport> {
    let s = Suite::Perm;
    let mut out = Vec::new();
    out.push(law(s, "compose matches brute force (n <= 4, exhaustive)", 0.0, |w| {
        let (e, _) = perm_exhaustive(fault)?;
        w.note("worst pair", e);
        Ok(())
    }));
    out.push(law(
        s,
        "compose matches brute force (n = 8, 200 random pairs)",
        0.0,
        |w| {
            w.note("random pairs", perm_random(200, 8, 0x5eed)?);
            Ok(())
        },
    ));
    out.push(law(s, "group laws (n <= 4)", 0.0, |w| {
        for n in 1..=4 {
            let pool = perm_pool(n, fault);
            let id = Permutation::identity(n);
            for p in &pool {
                let bad_unit = p.compose(&id)? != *p || id.compose(p)? != *p;
                let bad_inverse = p.compose(&p.inverse())? != id || p.inverse().compose(p)? != id;
                w.note(format!("{p}"), (bad_unit as u8 + bad_inverse as u8) as f64);
                for q in &pool {
                    for r in &pool {
                        let bad = p.compose(&q.compose(r)?)? != p.compose(q)?.compose(r)?;
                        w.note(format!("{p} {q} {r}"), bad as u8 as f64);
                    }
                }
            }
        }
        Ok(())
    }));
    out
}

/// Mismatches of compose vs `p(q(i))` over every pair in S_1..S_4, and the
/// number of pairs checked (576 for S_4 alone).
pub fn perm_exhaustive(fault: Option<Fault>) -> Result<(f64, usize)> {
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    for n in 1..=4 {
        let pool = perm_pool(n, fault);
        for p in &pool {
            for q in &pool {
                worst = worst.max(perm_error(p, q)?);
                pairs += 1;
            }
        }
    }
    Ok((worst, pairs))
}

pub fn perm_random(pairs: usize, n: usize, seed: u64) -> Result<f64> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..pairs {
        let mut a: Vec<usize> = (0..n).collect();
        let mut b = a.clone();
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        worst = worst.max(perm_error(&Permutation::new(a)?, &Permutation::new(b)?)?);
    }
    Ok(worst)
}

fn model() -> Vec<LawReport> {
    let s = Suite::Model;
    let cfg = QuadratureConfig::default();
    let mut out = Vec::new();
    out.push(law(s, "log transform density is log-normal", 1e-10, |w| {
        for (mu, sigma) in [(0.0, 1.0), (1.0, 0.5), (-0.3, 0.2)] {
            let t = transform_model(Arc::new(Normal::new(mu, sigma)?), &builtins::log())?;
            for y in Interval::new(0.05, 10.0)?.grid(50) {
                w.note(
                    format!("({mu}, {sigma}) at {y}"),
                    (t.density(y)? - normal_pdf(y.ln(), mu, sigma) / y).abs(),
                );
            }
        }
        Ok(())
    }));
    out.push(law(s, "transformed densities integrate to 1", 1e-3, |w| {
        let cfg = normalization_config();
        for (name, f) in [
            ("identity", identity()),
            ("log", builtins::log()),
            ("succ", builtins::succ()),
            ("exp", builtins::exp()),
        ] {
            let base = if name == "exp" {
                Normal::new(5.0, 0.5)?
            } else {
                Normal::new(1.0, 0.5)?
            };
            let t = transform_model(Arc::new(base), &f)?;
            w.note(name, (total_mass(&t, &cfg)? - 1.0).abs());
        }
        w.note("polar", (polar_mass()? - 1.0).abs());
        Ok(())
    }));
    out.push(law(s, "AoM of (2.0, 0.1) under log", 1e-6, |w| {
        w.note(
            "log",
            (transformed_aom(&builtins::log(), &Datum::new(2.0, 0.1)?)? - 0.05).abs(),
        );
        Ok(())
    }));
    out.push(law(s, "AoM chain rule", 1e-8, |w| {
        for (f, g) in [
            (builtins::exp(), builtins::succ()),
            (builtins::log(), builtins::exp()),
            (builtins::sin(), builtins::sqr_real()),
        ] {
            for v in [0.3, 1.0, 2.5] {
                let d = Datum::new(v, 0.01)?;
                let lhs = transformed_aom(&compose(&f, &g), &d)?;
                let rhs = transformed_aom(&f, &Datum::new(g.apply(v)?, transformed_aom(&g, &d)?)?)?;
                w.note(format!("({f}.{g}) at {v}"), (lhs - rhs).abs() / rhs.abs());
            }
        }
        Ok(())
    }));
    out.push(law(s, "samples match density (chi^2/dof)", 2.0, |w| {
        use rand::SeedableRng;
        for (name, f) in [("log", builtins::log()), ("succ", builtins::succ())] {
            let t = transform_model(Arc::new(Normal::new(1.0, 0.5)?), &f)?;
            let mut rng = rand::rngs::StdRng::seed_from_u64(17);
            let samples = (0..100_000).map(|_| t.sample(&mut rng)).collect::<Result<Vec<f64>>>()?;
            w.note(name, chi_square_per_dof(&t, &samples, 20, &cfg)?);
        }
        Ok(())
    }));
    out.push(law(s, "fitted log-space parameters", 0.02, |w| {
        let (m, sd) = lognormal_fit_check(10_000, 1.0, 0.5, 2024)?;
        w.note("mu", (m - 1.0).abs());
        w.note("sigma", (sd - 0.5).abs());
        Ok(())
    }));
    out
}

/// Mass of the standard plane Normal viewed in polar coordinates, over
/// r ∈ (0, 6], θ ∈ (-π, π].
pub fn polar_mass() -> Result<f64> {
    let t = transform_model_multivariate(Arc::new(IsotropicNormal::standard(2)), &builtins::polar2cartesian())?;
    let cfg = QuadratureConfig::new(64, 8, 1e-6)?;
    total_mass_2d(&t, [Interval::new(0.0, 6.0)?, Interval::new(-PI, PI)?], &cfg)
}

/// Draws `n` values `exp(Normal(mu, sigma))`, fits a Normal to their logs
/// and returns the fitted parameters.
pub fn lognormal_fit_check(n: usize, mu: f64, sigma: f64, seed: u64) -> Result<(f64, f64)> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let base = Normal::new(mu, sigma)?;
    let data = (0..n)
        .map(|_| Ok(base.sample(&mut rng)?.exp()))
        .collect::<Result<Vec<f64>>>()?;
    let logs = data
        .iter()
        .map(|&v| builtins::log().apply(v))
        .collect::<Result<Vec<f64>>>()?;
    let fitted = fit_normal_values(&logs)?;
    Ok((fitted.mu(), fitted.sigma()))
}
