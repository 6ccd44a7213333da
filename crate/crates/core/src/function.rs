//! The base function object: application, composition, pointwise arithmetic
//! and iteration, plus the capability flags that travel through them.

use std::fmt;
use std::ops;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::differentiable::{deferred_derivative, LazyCell};
use crate::error::{Error, Result};
use crate::invertible::{compose_kinds, Link, PairNodes, Side};

pub(crate) type Body = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
pub(crate) type Maker = Arc<dyn Fn(&Function) -> Function + Send + Sync>;
pub(crate) type ValueAndDerivative = Arc<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>;

static NEXT_SERIAL: AtomicU64 = AtomicU64::new(0);

fn next_serial() -> u64 {
    NEXT_SERIAL.fetch_add(1, Ordering::Relaxed)
}

/// Which capability tiers a function object supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CapabilitySet {
    pub invertible: bool,
    pub differentiable: bool,
}

impl CapabilitySet {
    pub const APPLICABLE: CapabilitySet = CapabilitySet {
        invertible: false,
        differentiable: false,
    };

    /// Both flags set: the combined invertible-and-differentiable tier.
    pub fn is_combined(self) -> bool {
        self.invertible && self.differentiable
    }

    pub fn and(self, other: CapabilitySet) -> CapabilitySet {
        CapabilitySet {
            invertible: self.invertible && other.invertible,
            differentiable: self.differentiable && other.differentiable,
        }
    }

    pub fn tier_name(self) -> &'static str {
        match (self.invertible, self.differentiable) {
            (true, true) => "invertible+differentiable",
            (true, false) => "invertible",
            (false, true) => "differentiable",
            (false, false) => "applicable",
        }
    }
}

impl fmt::Display for CapabilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tier_name())
    }
}

/// How a function object is stored. Generic objects are closures; the
/// specialized representations override composition and inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Generic,
    Permutation,
    LinearMap,
}

pub(crate) struct Node {
    pub(crate) serial: u64,
    pub(crate) name: Option<String>,
    pub(crate) body: Body,
    pub(crate) derivative: Option<LazyCell>,
    pub(crate) antiderivative: Option<LazyCell>,
    pub(crate) value_and_derivative: Option<ValueAndDerivative>,
}

impl Node {
    pub(crate) fn new(name: Option<String>, body: Body) -> Self {
        Node {
            serial: next_serial(),
            name,
            body,
            derivative: None,
            antiderivative: None,
            value_and_derivative: None,
        }
    }

    /// A new object with the same behaviour and fresh (empty) memo cells.
    pub(crate) fn respawn(&self) -> Node {
        Node {
            serial: next_serial(),
            name: self.name.clone(),
            body: self.body.clone(),
            derivative: self.derivative.as_ref().map(LazyCell::fresh),
            antiderivative: self.antiderivative.as_ref().map(LazyCell::fresh),
            value_and_derivative: self.value_and_derivative.clone(),
        }
    }

    pub(crate) fn describe(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("f{}", self.serial),
        }
    }
}

/// An immutable real-to-real function object.
///
/// Cloning is cheap and yields the *same* object (same serial, shared memo
/// cells). Every operation that changes behaviour or capabilities returns a
/// new object.
#[derive(Clone)]
pub struct Function {
    pub(crate) node: Arc<Node>,
    pub(crate) link: Option<Link>,
}

impl Function {
    pub(crate) fn plain(node: Node) -> Function {
        Function {
            node: Arc::new(node),
            link: None,
        }
    }

    /// An unnamed, applicable-only function from an infallible closure.
    /// NaN results are reported as domain errors by [`Function::apply`].
    pub fn from_fn(body: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Function {
        Function::builder(move |x| Ok(body(x))).build()
    }

    pub fn builder(body: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> FunctionBuilder {
        FunctionBuilder {
            name: None,
            body: Arc::new(body),
            derivative: None,
            antiderivative: None,
            value_and_derivative: None,
        }
    }

    pub fn serial(&self) -> u64 {
        self.node.serial
    }

    pub fn name(&self) -> Option<&str> {
        self.node.name.as_deref()
    }

    /// The name if one was given, else `f<serial>`.
    pub fn describe(&self) -> String {
        self.node.describe()
    }

    pub fn capabilities(&self) -> CapabilitySet {
        CapabilitySet {
            invertible: self.link.is_some(),
            differentiable: self.node.derivative.is_some(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.link.is_some()
    }

    pub fn is_differentiable(&self) -> bool {
        self.node.derivative.is_some()
    }

    pub fn representation(&self) -> Representation {
        Representation::Generic
    }

    /// Object identity: both handles refer to the same function object.
    pub fn same_object(&self, other: &Function) -> bool {
        Arc::ptr_eq(&self.node, &other.node)
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput {
                function: self.describe(),
                x,
            });
        }
        let y = (self.node.body)(x)?;
        if y.is_nan() {
            return Err(Error::domain(self.describe(), x, "result is undefined (NaN)"));
        }
        Ok(y)
    }

    pub(crate) fn body(&self) -> Body {
        self.node.body.clone()
    }

    /// The same behaviour under a new name. The result is a new object.
    pub fn renamed(&self, name: impl Into<String>) -> Function {
        let mut node = self.node.respawn();
        node.name = Some(name.into());
        self.relinked(node)
    }

    /// A differentiable-only view of this object (same serial and memo cells).
    pub fn without_inverse(&self) -> Function {
        Function {
            node: self.node.clone(),
            link: None,
        }
    }

    /// A new object with the finite-difference derivative as its default.
    pub fn with_fd_derivative(&self) -> Function {
        let mut node = self.node.respawn();
        node.derivative = Some(LazyCell::finite_difference());
        self.relinked(node)
    }

    /// A new object with a closed-form derivative.
    pub fn with_derivative(&self, maker: impl Fn() -> Function + Send + Sync + 'static) -> Function {
        let mut node = self.node.respawn();
        node.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| maker())));
        self.relinked(node)
    }

    fn relinked(&self, node: Node) -> Function {
        match &self.link {
            None => Function::plain(node),
            // Changing one half of an inverse pair knots a new pair.
            Some(link) => {
                let other = link.pair.node(link.side.flip()).respawn();
                let (forward, backward) = match link.side {
                    Side::Forward => (node, other),
                    Side::Backward => (other, node),
                };
                Function::from_pair(
                    Arc::new(PairNodes {
                        forward: Arc::new(forward),
                        backward: Arc::new(backward),
                        kind: link.pair.kind,
                        domain: link.pair.domain,
                    }),
                    link.side,
                )
            }
        }
    }
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function")
            .field("serial", &self.node.serial)
            .field("name", &self.describe())
            .field("tier", &self.capabilities().tier_name())
            .finish()
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub struct FunctionBuilder {
    name: Option<String>,
    body: Body,
    derivative: Option<LazyCell>,
    antiderivative: Option<LazyCell>,
    value_and_derivative: Option<ValueAndDerivative>,
}

impl FunctionBuilder {
    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Differentiable, with the derivative built by central differences on demand.
    pub fn fd_derivative(mut self) -> Self {
        self.derivative = Some(LazyCell::finite_difference());
        self
    }

    /// Differentiable, with a closed-form derivative produced on first demand.
    pub fn derivative(mut self, maker: impl Fn() -> Function + Send + Sync + 'static) -> Self {
        self.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| maker())));
        self
    }

    /// A closed-form antiderivative, used by definite integration instead of quadrature.
    pub fn antiderivative(mut self, maker: impl Fn() -> Function + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(LazyCell::new(Arc::new(move |_: &Function| maker())));
        self
    }

    /// Overrides the combined value-and-derivative evaluation.
    pub fn value_and_derivative(mut self, f: impl Fn(f64) -> Result<(f64, f64)> + Send + Sync + 'static) -> Self {
        self.value_and_derivative = Some(Arc::new(f));
        self
    }

    pub(crate) fn into_node(self) -> Node {
        let mut node = Node::new(self.name, self.body);
        node.derivative = self.derivative;
        node.antiderivative = self.antiderivative;
        node.value_and_derivative = self.value_and_derivative;
        node
    }

    pub fn build(self) -> Function {
        Function::plain(self.into_node())
    }
}

/// A constant function; differentiable with derivative zero.
pub fn constant(c: f64) -> Function {
    Function::builder(move |_| Ok(c))
        .name(format_number(c))
        .derivative(|| constant(0.0))
        .antiderivative(move || scale_identity(c))
        .build()
}

fn scale_identity(c: f64) -> Function {
    Function::builder(move |x| Ok(c * x))
        .name(format!("({}*x)", format_number(c)))
        .derivative(move || constant(c))
        .build()
}

pub(crate) fn format_number(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

/// The unit of composition. Self-inverse, with derivative the constant one.
pub fn identity() -> Function {
    crate::catalog::builtins::identity()
}

pub(crate) fn compose_node(f: &Function, g: &Function) -> Node {
    let (fb, gb) = (f.body(), g.body());
    let (fname, gname) = (f.describe(), g.describe());
    let gname_err = gname.clone();
    let body: Body = Arc::new(move |x| {
        let inner = gb(x)?;
        if inner.is_nan() {
            return Err(Error::domain(&gname_err, x, "result is undefined (NaN)"));
        }
        if !inner.is_finite() {
            return Err(Error::NonFiniteInput {
                function: fname.clone(),
                x: inner,
            });
        }
        fb(inner)
    });
    let mut node = Node::new(Some(format!("({}.{})", f.describe(), gname)), body);
    if f.is_differentiable() && g.is_differentiable() {
        let (f, g) = (f.clone(), g.clone());
        // (f . g)' = (f' . g) * g', built from deferred derivatives so that
        // neither f' nor g' is forced until the result is applied.
        node.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| {
            let outer = Function::plain(compose_node(&deferred_derivative(&f), &g));
            mul(&outer, &deferred_derivative(&g))
        })));
    }
    node
}

/// `f . g`: apply `g`, then `f`.
///
/// Capabilities are the componentwise AND of the operands'. When both are
/// invertible the result's inverse is `g⁻¹ . f⁻¹`; one-sided inverses of
/// opposite handedness carry no inverse law, so such a composite is built
/// without the invertible capability (see [`try_compose`]).
pub fn compose(f: &Function, g: &Function) -> Function {
    match try_compose(f, g) {
        Ok(h) => h,
        Err(_) => Function::plain(compose_node(f, g)),
    }
}

/// Like [`compose`], but reports a capability error when both operands are
/// invertible and their inverse kinds cannot be combined.
pub fn try_compose(f: &Function, g: &Function) -> Result<Function> {
    let forward = compose_node(f, g);
    let (Some(_), Some(_)) = (&f.link, &g.link) else {
        return Ok(Function::plain(forward));
    };
    let (fk, gk) = (f.inverse_kind().unwrap(), g.inverse_kind().unwrap());
    let Some(kind) = compose_kinds(fk, gk) else {
        return Err(Error::Capability {
            function: forward.describe(),
            missing: crate::error::Tier::Invertible,
            detail: Some(format!("no inverse law for {fk} composed with {gk}")),
        });
    };
    let backward = compose_node(&g.inverse()?, &f.inverse()?);
    Ok(Function::from_pair(
        Arc::new(PairNodes {
            forward: Arc::new(forward),
            backward: Arc::new(backward),
            kind,
            domain: None,
        }),
        Side::Forward,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
            Op::Div => '/',
        }
    }
}

fn pointwise(op: Op, f: &Function, g: &Function) -> Function {
    let (fb, gb) = (f.body(), g.body());
    let name = format!("({}{}{})", f.describe(), op.symbol(), g.describe());
    let err_name = name.clone();
    let body: Body = Arc::new(move |x| {
        let (a, b) = (fb(x)?, gb(x)?);
        Ok(match op {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => {
                if b == 0.0 {
                    return Err(Error::domain(&err_name, x, "division by zero"));
                }
                a / b
            }
        })
    });
    let mut node = Node::new(Some(name), body);
    if f.is_differentiable() && g.is_differentiable() {
        let (f, g) = (f.clone(), g.clone());
        node.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| {
            let (df, dg) = (deferred_derivative(&f), deferred_derivative(&g));
            match op {
                Op::Add => add(&df, &dg),
                Op::Sub => sub(&df, &dg),
                Op::Mul => add(&mul(&df, &g), &mul(&f, &dg)),
                Op::Div => div(&sub(&mul(&df, &g), &mul(&f, &dg)), &mul(&g, &g)),
            }
        })));
    }
    Function::plain(node)
}

/// Pointwise `f + g`. Never invertible; differentiable iff both operands are.
pub fn add(f: &Function, g: &Function) -> Function {
    pointwise(Op::Add, f, g)
}

pub fn sub(f: &Function, g: &Function) -> Function {
    pointwise(Op::Sub, f, g)
}

pub fn mul(f: &Function, g: &Function) -> Function {
    pointwise(Op::Mul, f, g)
}

/// Pointwise `f / g`; a domain error wherever `g` is zero.
pub fn div(f: &Function, g: &Function) -> Function {
    pointwise(Op::Div, f, g)
}

pub fn neg(f: &Function) -> Function {
    let fb = f.body();
    let mut node = Node::new(Some(format!("(-{})", f.describe())), Arc::new(move |x| Ok(-fb(x)?)));
    if f.is_differentiable() {
        let f = f.clone();
        node.derivative = Some(LazyCell::new(Arc::new(move |_: &Function| {
            neg(&deferred_derivative(&f))
        })));
    }
    Function::plain(node)
}

/// `n`-fold self-composition; `iterate(f, 0)` is the identity.
pub fn iterate(f: &Function, n: usize) -> Function {
    match n {
        0 => identity(),
        1 => f.clone(),
        _ => (2..=n).fold(f.clone(), |acc, _| compose(&acc, f)),
    }
}

macro_rules! impl_binop {
    ($Trait:ident, $method:ident, $fun:ident) => {
        impl ops::$Trait<&Function> for &Function {
            type Output = Function;
            fn $method(self, rhs: &Function) -> Function {
                $fun(self, rhs)
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl ops::Neg for &Function {
    type Output = Function;
    fn neg(self) -> Function {
        neg(self)
    }
}
