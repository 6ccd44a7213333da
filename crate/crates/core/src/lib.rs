//! First-class real functions with capability tiers.
//!
//! A [`Function`] can always be applied and composed. Objects in the
//! invertible tier carry a registered inverse ([`Function::inverse`]);
//! objects in the differentiable tier carry a lazily built, memoized
//! derivative ([`Function::derivative`]) whose own derivative is available in
//! turn. Composition and pointwise arithmetic propagate both tiers by the
//! usual rules.
//!
//! ```
//! use fnalg::{builtins, compose};
//!
//! let f = compose(&builtins::exp(), &builtins::succ());
//! assert!((f.inverse().unwrap().apply(f.apply(0.5).unwrap()).unwrap() - 0.5).abs() < 1e-12);
//! let d = compose(&builtins::sin(), &builtins::sqr_real()).derivative().unwrap();
//! assert!((d.apply(1.0).unwrap() - 2.0 * 1.0f64.cos()).abs() < 1e-12);
//! ```

pub mod catalog;
pub mod differentiable;
pub mod domain;
pub mod error;
pub mod function;
pub mod integration;
pub mod invertible;
pub mod laws;
pub mod mapping;
pub mod model;
pub mod multivariate;
pub mod specialized;

pub use catalog::{builtins, catalog, lookup, Catalog, CatalogEntry, CatalogObject};
pub use differentiable::{
    derivative_maker_calls, derivative_of_inverse, fd_derivative, inverse_rule_derivative, FdConfig,
};
pub use domain::Interval;
pub use error::{Error, Result, Tier};
pub use function::{
    add, compose, constant, div, identity, iterate, mul, neg, sub, try_compose, CapabilitySet, Function,
    FunctionBuilder, Representation,
};
pub use integration::{antiderivative, antiderivative_with, definite_integral, simpson, QuadratureConfig};
pub use invertible::{make_invertible, make_self_inverse, InverseKind, InverseOptions, InversePair};
pub use mapping::Mapping;
pub use multivariate::{compose_vector, make_vector_invertible, JacobianMatrix, VectorFunction};
pub use specialized::{LinearMap, Permutation};
