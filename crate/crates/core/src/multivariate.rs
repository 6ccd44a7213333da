//! Vector-valued functions `R^n -> R^m` with gradients, Jacobians and
//! Jacobian determinants, plus the polar/cartesian pair.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::differentiable::FdConfig;
use crate::domain::{box_samples, Interval};
use crate::error::{Error, Result, Tier};
use crate::function::Representation;
use crate::invertible::Side;

/// Entry `(i, j)` is `∂f_i/∂x_j`.
pub type JacobianMatrix = DMatrix<f64>;

type VectorBody = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
type JacobianMaker = Arc<dyn Fn(&[f64]) -> Result<JacobianMatrix> + Send + Sync>;

/// Pivots below this magnitude make a matrix singular.
pub const SINGULAR_PIVOT: f64 = 1e-12;

struct VectorNode {
    name: String,
    n_in: usize,
    n_out: usize,
    body: VectorBody,
    jacobian: Option<JacobianMaker>,
    representation: Representation,
}

struct VectorPair {
    forward: Arc<VectorNode>,
    backward: Arc<VectorNode>,
}

#[derive(Clone)]
pub struct VectorFunction {
    node: Arc<VectorNode>,
    inverse: Option<(Arc<VectorPair>, Side)>,
}

impl VectorFunction {
    pub fn new(
        name: impl Into<String>,
        n_in: usize,
        n_out: usize,
        body: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::InvalidArgument(
                "vector function dimensions must be positive".into(),
            ));
        }
        Ok(VectorFunction {
            node: Arc::new(VectorNode {
                name: name.into(),
                n_in,
                n_out,
                body: Arc::new(body),
                jacobian: None,
                representation: Representation::Generic,
            }),
            inverse: None,
        })
    }

    /// A new object with a closed-form Jacobian. Any registered inverse is
    /// not carried over.
    pub fn with_jacobian(
        &self,
        maker: impl Fn(&[f64]) -> Result<JacobianMatrix> + Send + Sync + 'static,
    ) -> VectorFunction {
        VectorFunction {
            node: Arc::new(VectorNode {
                name: self.node.name.clone(),
                n_in: self.node.n_in,
                n_out: self.node.n_out,
                body: self.node.body.clone(),
                jacobian: Some(Arc::new(maker)),
                representation: self.node.representation,
            }),
            inverse: None,
        }
    }

    pub(crate) fn with_representation(mut self, r: Representation) -> Self {
        let node = VectorNode {
            name: self.node.name.clone(),
            n_in: self.node.n_in,
            n_out: self.node.n_out,
            body: self.node.body.clone(),
            jacobian: self.node.jacobian.clone(),
            representation: r,
        };
        self.node = Arc::new(node);
        self.inverse = None;
        self
    }

    pub fn name(&self) -> &str {
        &self.node.name
    }

    pub fn n_in(&self) -> usize {
        self.node.n_in
    }

    pub fn n_out(&self) -> usize {
        self.node.n_out
    }

    pub fn is_square(&self) -> bool {
        self.node.n_in == self.node.n_out
    }

    pub fn representation(&self) -> Representation {
        self.node.representation
    }

    pub fn has_closed_form_jacobian(&self) -> bool {
        self.node.jacobian.is_some()
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn same_object(&self, other: &VectorFunction) -> bool {
        Arc::ptr_eq(&self.node, &other.node)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.node.n_in {
            return Err(Error::Dimension {
                context: format!("input to {}", self.node.name),
                expected: self.node.n_in,
                found: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput {
                function: self.node.name.clone(),
                x: *bad,
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let y = (self.node.body)(x)?;
        if y.len() != self.node.n_out {
            return Err(Error::Dimension {
                context: format!("output of {}", self.node.name),
                expected: self.node.n_out,
                found: y.len(),
            });
        }
        if y.iter().any(|v| v.is_nan()) {
            return Err(Error::domain(&self.node.name, x[0], "result is undefined (NaN)"));
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Result<VectorFunction> {
        let (pair, side) = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::capability(&self.node.name, Tier::Invertible))?;
        let side = side.flip();
        Ok(VectorFunction {
            node: match side {
                Side::Forward => pair.forward.clone(),
                Side::Backward => pair.backward.clone(),
            },
            inverse: Some((pair.clone(), side)),
        })
    }

    /// Closed-form Jacobian when registered, else central differences column by column.
    pub fn jacobian(&self, x: &[f64]) -> Result<JacobianMatrix> {
        self.check_input(x)?;
        match &self.node.jacobian {
            Some(j) => {
                let m = j(x)?;
                if m.nrows() != self.node.n_out || m.ncols() != self.node.n_in {
                    return Err(Error::Dimension {
                        context: format!("Jacobian rows of {}", self.node.name),
                        expected: self.node.n_out,
                        found: m.nrows(),
                    });
                }
                Ok(m)
            }
            None => self.fd_jacobian(x, FdConfig::global()),
        }
    }

    /// Central-difference Jacobian, ignoring any closed form.
    pub fn fd_jacobian(&self, x: &[f64], cfg: FdConfig) -> Result<JacobianMatrix> {
        self.check_input(x)?;
        let (n, m) = (self.node.n_in, self.node.n_out);
        let mut jac = DMatrix::zeros(m, n);
        let mut probe = x.to_vec();
        for j in 0..n {
            probe[j] = x[j] + cfg.step();
            let up = self.apply(&probe)?;
            probe[j] = x[j] - cfg.step();
            let down = self.apply(&probe)?;
            probe[j] = x[j];
            for i in 0..m {
                jac[(i, j)] = (up[i] - down[i]) / cfg.divisor();
            }
        }
        Ok(jac)
    }

    /// Gradient of a scalar-valued function (`n_out = 1`).
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.node.n_out != 1 {
            return Err(Error::Dimension {
                context: format!("gradient of {} (output size)", self.node.name),
                expected: 1,
                found: self.node.n_out,
            });
        }
        Ok(self.jacobian(x)?.row(0).iter().copied().collect())
    }

    pub fn jacobian_determinant(&self, x: &[f64]) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Dimension {
                context: format!("determinant of the Jacobian of {} (not square)", self.node.name),
                expected: self.node.n_in,
                found: self.node.n_out,
            });
        }
        Ok(determinant(&self.jacobian(x)?))
    }
}

impl fmt::Debug for VectorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFunction")
            .field("name", &self.node.name)
            .field("n_in", &self.node.n_in)
            .field("n_out", &self.node.n_out)
            .field("invertible", &self.is_invertible())
            .finish()
    }
}

/// Determinant by LU with partial pivoting; 0 when any pivot has magnitude
/// below [`SINGULAR_PIVOT`].
pub fn determinant(m: &DMatrix<f64>) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let lu = m.clone().lu();
    if lu.u().diagonal().iter().any(|p| p.abs() < SINGULAR_PIVOT) {
        return 0.0;
    }
    lu.determinant()
}

fn knot(forward: VectorFunction, backward: VectorFunction) -> VectorFunction {
    let pair = Arc::new(VectorPair {
        forward: forward.node,
        backward: backward.node,
    });
    VectorFunction {
        node: pair.forward.clone(),
        inverse: Some((pair, Side::Forward)),
    }
}

/// Registers `finv` as the two-sided inverse of the square map `f`, after
/// checking both roundtrips at `samples` points of the box `domain`.
pub fn make_vector_invertible(
    f: &VectorFunction,
    finv: &VectorFunction,
    domain: &[Interval],
    samples: usize,
    tolerance: f64,
) -> Result<VectorFunction> {
    if !f.is_square() || finv.n_in() != f.n_out() || finv.n_out() != f.n_in() {
        return Err(Error::Dimension {
            context: format!("inverse registration {} / {}", f.name(), finv.name()),
            expected: f.n_in(),
            found: finv.n_out(),
        });
    }
    if domain.len() != f.n_in() {
        return Err(Error::Dimension {
            context: "validation box".into(),
            expected: f.n_in(),
            found: domain.len(),
        });
    }
    let mut worst = (Vec::new(), 0.0_f64);
    for x in box_samples(domain, samples) {
        let y = f.apply(&x)?;
        let back = finv.apply(&y)?;
        let again = f.apply(&back)?;
        let e1 = max_rel_diff(&back, &x);
        let e2 = max_rel_diff(&again, &y);
        let e = e1.max(e2);
        if e > worst.1 || e.is_nan() {
            worst = (x, e);
        }
    }
    if !(worst.1 <= tolerance) {
        return Err(Error::Validation {
            function: f.name().to_string(),
            worst_x: worst.0.first().copied().unwrap_or(f64::NAN),
            error: worst.1,
            tolerance,
        });
    }
    Ok(knot(f.clone(), finv.clone()))
}

pub(crate) fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs() / (1.0 + v.abs()))
        .fold(0.0, f64::max)
}

/// `f . g` for vector functions; the Jacobian follows the chain rule
/// `J_f(g(x)) · J_g(x)`. Invertible when both factors are.
pub fn compose_vector(f: &VectorFunction, g: &VectorFunction) -> Result<VectorFunction> {
    if f.n_in() != g.n_out() {
        return Err(Error::Dimension {
            context: format!("composition {} . {}", f.name(), g.name()),
            expected: f.n_in(),
            found: g.n_out(),
        });
    }
    let forward = compose_unchecked(f, g);
    match (f.is_invertible(), g.is_invertible()) {
        (true, true) => {
            let backward = compose_unchecked(&g.inverse()?, &f.inverse()?);
            Ok(knot(forward, backward))
        }
        _ => Ok(forward),
    }
}

fn compose_unchecked(f: &VectorFunction, g: &VectorFunction) -> VectorFunction {
    let (f1, g1) = (f.clone(), g.clone());
    let (f2, g2) = (f.clone(), g.clone());
    VectorFunction {
        node: Arc::new(VectorNode {
            name: format!("({}.{})", f.name(), g.name()),
            n_in: g.n_in(),
            n_out: f.n_out(),
            body: Arc::new(move |x| f1.apply(&g1.apply(x)?)),
            jacobian: Some(Arc::new(move |x| {
                let inner = g2.apply(x)?;
                Ok(f2.jacobian(&inner)? * g2.jacobian(x)?)
            })),
            representation: Representation::Generic,
        }),
        inverse: None,
    }
}

/// The identity on `R^n`, self-inverse, Jacobian the identity matrix.
pub fn identity_map(n: usize) -> VectorFunction {
    let f = VectorFunction::new(format!("identity_map_{n}d"), n, n, |x| Ok(x.to_vec()))
        .expect("positive dimension")
        .with_jacobian(move |_| Ok(DMatrix::identity(n, n)));
    knot(f.clone(), f)
}

fn polar2cartesian_raw() -> VectorFunction {
    VectorFunction::new("polar2cartesian", 2, 2, |p| {
        let (r, theta) = (p[0], p[1]);
        Ok(vec![r * theta.cos(), r * theta.sin()])
    })
    .expect("2x2")
    .with_jacobian(|p| {
        let (r, theta) = (p[0], p[1]);
        let (s, c) = theta.sin_cos();
        Ok(DMatrix::from_row_slice(2, 2, &[c, -r * s, s, r * c]))
    })
}

fn cartesian2polar_raw() -> VectorFunction {
    VectorFunction::new("cartesian2polar", 2, 2, |q| {
        let (x, y) = (q[0], q[1]);
        let r = x.hypot(y);
        if r == 0.0 {
            return Err(Error::domain("cartesian2polar", x, "the origin has no polar angle"));
        }
        Ok(vec![r, y.atan2(x)])
    })
    .expect("2x2")
    .with_jacobian(|q| {
        let (x, y) = (q[0], q[1]);
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return Err(Error::domain("cartesian2polar", x, "the origin has no polar angle"));
        }
        let r = r2.sqrt();
        Ok(DMatrix::from_row_slice(2, 2, &[x / r, y / r, -y / r2, x / r2]))
    })
}

/// `(r, θ) ↦ (r cos θ, r sin θ)` on `r > 0`, `θ ∈ (-π, π]`, registered with
/// `cartesian2polar` as its inverse.
pub fn polar2cartesian() -> VectorFunction {
    let domain = [
        Interval { lo: 1e-3, hi: 10.0 },
        Interval {
            lo: -PI + 1e-9,
            hi: PI - 1e-9,
        },
    ];
    make_vector_invertible(&polar2cartesian_raw(), &cartesian2polar_raw(), &domain, 64, 1e-10)
        .expect("polar pair validates")
}
