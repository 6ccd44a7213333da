//! The ready-made function objects, keyed by the names the CLI accepts.

use std::sync::OnceLock;

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::function::{constant, mul, neg, Function};
use crate::invertible::{make_invertible, make_self_inverse, InverseKind, InverseOptions};
use crate::mapping::Mapping;
use crate::multivariate::{identity_map, polar2cartesian, VectorFunction};
use crate::specialized::Permutation;

#[derive(Debug, Clone)]
pub enum CatalogObject {
    Scalar(Function),
    Vector(VectorFunction),
    Permutation(Permutation),
    Text(Mapping<str, usize>),
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub key: String,
    pub object: CatalogObject,
    /// "applicable", "invertible", "differentiable" or "invertible+differentiable".
    pub tier: String,
    /// Where the entry's derivative and inverse are checked. `None` for
    /// entries that are not real-to-real.
    pub domain: Option<Interval>,
}

impl CatalogEntry {
    pub fn function(&self) -> Option<&Function> {
        match &self.object {
            CatalogObject::Scalar(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// Builds a fresh catalog, validating every registered inverse pair.
    pub fn build() -> Catalog {
        let mut entries = Vec::new();
        let mut scalar = |key: &str, f: Function, lo: f64, hi: f64| {
            entries.push(CatalogEntry {
                key: key.to_string(),
                tier: f.capabilities().tier_name().to_string(),
                object: CatalogObject::Scalar(f),
                domain: Some(Interval { lo, hi }),
            });
        };

        let id = raw::identity();
        scalar("identity", id, -10.0, 10.0);
        let succ = raw::succ();
        scalar("pred", succ.inverse().expect("paired"), -10.0, 10.0);
        scalar("succ", succ, -10.0, 10.0);
        scalar("sqr_real", raw::sqr_real(), -10.0, 10.0);
        scalar("abs", Function::from_fn(f64::abs).renamed("abs"), -10.0, 10.0);
        scalar("floor", Function::from_fn(f64::floor).renamed("floor"), -10.0, 10.0);
        scalar("ceil", Function::from_fn(f64::ceil).renamed("ceil"), -10.0, 10.0);
        scalar("round", Function::from_fn(f64::round).renamed("round"), -10.0, 10.0);
        scalar("sin", raw::sin("sin"), -10.0, 10.0);
        scalar("cos", raw::cos(), -10.0, 10.0);
        let sin_r = raw::sin_restricted();
        scalar("arcsin", sin_r.inverse().expect("paired"), -0.9, 0.9);
        scalar("sin_restricted", sin_r, -10.0, 10.0);
        let exp = raw::exp();
        scalar("log", exp.inverse().expect("paired"), 0.1, 100.0);
        scalar("exp", exp, -5.0, 5.0);
        scalar("oneOver", raw::one_over(), 0.25, 10.0);
        scalar("exp2x", raw::exp2x(), -3.0, 3.0);

        entries.push(CatalogEntry {
            key: "leng".into(),
            object: CatalogObject::Text(Mapping::new("leng", |s: &str| Ok(s.chars().count()))),
            tier: "applicable".into(),
            domain: None,
        });
        entries.push(CatalogEntry {
            key: "identity_map_2d".into(),
            object: CatalogObject::Vector(identity_map(2)),
            tier: "invertible+differentiable".into(),
            domain: None,
        });
        let polar = polar2cartesian();
        entries.push(CatalogEntry {
            key: "cartesian2polar".into(),
            object: CatalogObject::Vector(polar.inverse().expect("paired")),
            tier: "invertible+differentiable".into(),
            domain: None,
        });
        entries.push(CatalogEntry {
            key: "polar2cartesian".into(),
            object: CatalogObject::Vector(polar),
            tier: "invertible+differentiable".into(),
            domain: None,
        });
        entries.push(CatalogEntry {
            key: "cycle3".into(),
            object: CatalogObject::Permutation(Permutation::new(vec![1, 2, 0]).expect("valid").named("cycle3")),
            tier: "invertible".into(),
            domain: None,
        });
        entries.sort_by(|a, b| a.key.cmp(&b.key));
        Catalog { entries }
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn keys(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.key.as_str()).collect()
    }

    pub fn lookup(&self, key: &str) -> Result<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| Error::NotFound {
                key: key.to_string(),
                available: self.keys().into_iter().map(String::from).collect(),
            })
    }

    /// The real-to-real object under `key`.
    pub fn function(&self, key: &str) -> Result<Function> {
        let entry = self.lookup(key)?;
        entry
            .function()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("catalog entry '{key}' is not a real-to-real function")))
    }

    /// Scalar entries, for law suites.
    pub fn scalars(&self) -> impl Iterator<Item = (&CatalogEntry, &Function)> {
        self.entries.iter().filter_map(|e| e.function().map(|f| (e, f)))
    }
}

/// The process-wide catalog, built on first use.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::build)
}

pub fn lookup(key: &str) -> Result<&'static CatalogEntry> {
    catalog().lookup(key)
}

/// Constructors used while the catalog is being built. Derivative makers
/// refer to [`builtins`], which is safe because they run only on demand.
mod raw {
    use super::*;

    fn both() -> Interval {
        Interval::law_default()
    }

    pub(super) fn identity() -> Function {
        let f = Function::builder(Ok).name("id").derivative(|| constant(1.0)).build();
        make_self_inverse(&f, both()).expect("identity is self-inverse")
    }

    pub(super) fn succ() -> Function {
        let s = Function::builder(|x| Ok(x + 1.0))
            .name("succ")
            .derivative(|| constant(1.0))
            .build();
        let p = Function::builder(|x| Ok(x - 1.0))
            .name("pred")
            .derivative(|| constant(1.0))
            .build();
        make_invertible(&s, &p, InverseOptions::two_sided(both())).expect("succ/pred validate")
    }

    pub(super) fn sqr_real() -> Function {
        Function::builder(|x| Ok(x * x))
            .name("sqr_real")
            .derivative(|| mul(&constant(2.0), &builtins::identity()))
            .build()
    }

    pub(super) fn sin(name: &str) -> Function {
        Function::builder(|x| Ok(x.sin()))
            .name(name)
            .derivative(builtins::cos)
            .antiderivative(|| neg(&builtins::cos()))
            .value_and_derivative(|x| {
                let (s, c) = x.sin_cos();
                Ok((s, c))
            })
            .build()
    }

    pub(super) fn cos() -> Function {
        Function::builder(|x| Ok(x.cos()))
            .name("cos")
            .derivative(|| neg(&builtins::sin()))
            .antiderivative(builtins::sin)
            .build()
    }

    pub(super) fn sin_restricted() -> Function {
        let asin = Function::builder(|y: f64| {
            if y.abs() > 1.0 {
                return Err(Error::domain("arcsin", y, "outside [-1, 1]"));
            }
            Ok(y.asin())
        })
        .name("arcsin")
        .derivative(|| {
            Function::builder(|y: f64| {
                let s = 1.0 - y * y;
                if s <= 0.0 {
                    return Err(Error::domain("d(arcsin)", y, "outside (-1, 1)"));
                }
                Ok(1.0 / s.sqrt())
            })
            .name("d(arcsin)")
            .fd_derivative()
            .build()
        })
        .build();
        let opts = InverseOptions::new(InverseKind::RightOnly, Interval { lo: -1.0, hi: 1.0 });
        make_invertible(&sin("sin_restricted"), &asin, opts).expect("sin/arcsin right law validates")
    }

    pub(super) fn exp() -> Function {
        let e = Function::builder(|x: f64| Ok(x.exp()))
            .name("exp")
            .derivative(builtins::exp)
            .antiderivative(builtins::exp)
            .value_and_derivative(|x| {
                let v = x.exp();
                Ok((v, v))
            })
            .build();
        let l = Function::builder(|x: f64| {
            if x <= 0.0 {
                return Err(Error::domain("log", x, "logarithm of a non-positive number"));
            }
            Ok(x.ln())
        })
        .name("log")
        .derivative(builtins::one_over)
        .build();
        let opts = InverseOptions::two_sided(Interval { lo: -5.0, hi: 5.0 });
        make_invertible(&e, &l, opts).expect("exp/log validate")
    }

    pub(super) fn one_over() -> Function {
        let f = Function::builder(|x: f64| {
            if x == 0.0 {
                return Err(Error::domain("oneOver", x, "division by zero"));
            }
            Ok(1.0 / x)
        })
        .name("oneOver")
        .derivative(|| {
            let o = builtins::one_over();
            neg(&mul(&o, &o))
        })
        .build();
        make_self_inverse(&f, Interval { lo: 0.25, hi: 10.0 }).expect("oneOver is self-inverse")
    }

    pub(super) fn exp2x() -> Function {
        Function::builder(|x: f64| Ok((2.0 * x).exp()))
            .name("exp2x")
            .fd_derivative()
            .build()
    }
}

/// Shortcuts to the catalog's scalar objects. Each returns the shared
/// catalog object, so `builtins::log().inverse()` is `builtins::exp()`.
pub mod builtins {
    use super::*;

    fn get(key: &str) -> Function {
        catalog().function(key).expect("builtin key")
    }

    pub fn identity() -> Function {
        get("identity")
    }
    pub fn succ() -> Function {
        get("succ")
    }
    pub fn pred() -> Function {
        get("pred")
    }
    pub fn sqr_real() -> Function {
        get("sqr_real")
    }
    pub fn abs() -> Function {
        get("abs")
    }
    pub fn floor() -> Function {
        get("floor")
    }
    pub fn ceil() -> Function {
        get("ceil")
    }
    pub fn round() -> Function {
        get("round")
    }
    pub fn sin() -> Function {
        get("sin")
    }
    pub fn cos() -> Function {
        get("cos")
    }
    pub fn sin_restricted() -> Function {
        get("sin_restricted")
    }
    pub fn arcsin() -> Function {
        get("arcsin")
    }
    pub fn exp() -> Function {
        get("exp")
    }
    pub fn log() -> Function {
        get("log")
    }
    pub fn one_over() -> Function {
        get("oneOver")
    }
    pub fn exp2x() -> Function {
        get("exp2x")
    }

    pub fn leng() -> Mapping<str, usize> {
        match &lookup("leng").expect("builtin key").object {
            CatalogObject::Text(m) => m.clone(),
            _ => unreachable!("leng is a text mapping"),
        }
    }

    pub fn polar2cartesian() -> VectorFunction {
        match &lookup("polar2cartesian").expect("builtin key").object {
            CatalogObject::Vector(v) => v.clone(),
            _ => unreachable!("polar2cartesian is a vector function"),
        }
    }

    pub fn cartesian2polar() -> VectorFunction {
        match &lookup("cartesian2polar").expect("builtin key").object {
            CatalogObject::Vector(v) => v.clone(),
            _ => unreachable!("cartesian2polar is a vector function"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::differentiable::{fd_derivative, FdConfig};

    #[test]
    fn tiers_match_the_hierarchy() {
        assert_eq!(lookup("exp").unwrap().tier, "invertible+differentiable");
        assert_eq!(lookup("log").unwrap().tier, "invertible+differentiable");
        assert_eq!(lookup("identity").unwrap().tier, "invertible+differentiable");
        assert_eq!(lookup("sqr_real").unwrap().tier, "differentiable");
        assert_eq!(lookup("sin").unwrap().tier, "differentiable");
        for k in ["abs", "floor", "ceil", "round", "leng"] {
            assert_eq!(lookup(k).unwrap().tier, "applicable", "{k}");
        }
        assert!(lookup("succ").unwrap().tier.starts_with("invertible"));
        assert_eq!(lookup("cycle3").unwrap().tier, "invertible");
    }

    #[test]
    fn sample_values() {
        assert_eq!(builtins::one_over().apply(4.0).unwrap(), 0.25);
        assert!(builtins::one_over().apply(0.0).unwrap_err().is_domain());
        assert_eq!(builtins::leng().apply("hello").unwrap(), 5);
        assert_eq!(builtins::round().apply(2.5).unwrap(), 3.0);
        assert_eq!(builtins::floor().apply(-0.5).unwrap(), -1.0);
        assert!(builtins::log().apply(0.0).unwrap_err().is_domain());
        assert!(builtins::arcsin().apply(1.5).unwrap_err().is_domain());
    }

    #[test]
    fn lookup_and_not_found() {
        assert_eq!(lookup("sin").unwrap().key, "sin");
        match lookup("nope") {
            Err(Error::NotFound { key, available }) => {
                assert_eq!(key, "nope");
                assert!(available.iter().any(|k| k == "exp"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn log_inverse_is_exp() {
        let log = catalog().function("log").unwrap();
        assert!(log.inverse().unwrap().same_object(&catalog().function("exp").unwrap()));
        assert!(builtins::pred().inverse().unwrap().same_object(&builtins::succ()));
        assert!(builtins::arcsin()
            .inverse()
            .unwrap()
            .same_object(&builtins::sin_restricted()));
    }

    #[test]
    fn keys_unique_and_construction_deterministic() {
        let a = Catalog::build();
        let b = Catalog::build();
        let ka: Vec<_> = a.entries().iter().map(|e| (e.key.clone(), e.tier.clone())).collect();
        let kb: Vec<_> = b.entries().iter().map(|e| (e.key.clone(), e.tier.clone())).collect();
        assert_eq!(ka, kb);
        let mut keys = a.keys();
        keys.dedup();
        assert_eq!(keys.len(), a.entries().len());
    }

    #[test]
    fn closed_forms_agree_with_fd() {
        for (entry, f) in catalog().scalars() {
            if !f.is_differentiable() {
                continue;
            }
            let d = f.derivative().unwrap();
            let oracle = fd_derivative(f, FdConfig::default());
            for x in entry.domain.unwrap().grid(100) {
                let (a, b) = (d.apply(x).unwrap(), oracle.apply(x).unwrap());
                assert!(
                    (a - b).abs() <= 1e-4 * (1.0 + a.abs()),
                    "{} at {x}: {a} vs {b}",
                    entry.key
                );
            }
        }
    }
}
