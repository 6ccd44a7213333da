//! Applicable-only function objects between arbitrary types.
//!
//! The real-valued [`Function`](crate::Function) carries the calculus; this
//! type only has apply and compose, which is all that non-numeric functions
//! such as string length support.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;

pub struct Mapping<T: ?Sized, U> {
    name: String,
    body: Arc<dyn Fn(&T) -> Result<U> + Send + Sync>,
}

impl<T: ?Sized, U> Clone for Mapping<T, U> {
    fn clone(&self) -> Self {
        Mapping {
            name: self.name.clone(),
            body: self.body.clone(),
        }
    }
}

impl<T: ?Sized + 'static, U: 'static> Mapping<T, U> {
    pub fn new(name: impl Into<String>, body: impl Fn(&T) -> Result<U> + Send + Sync + 'static) -> Self {
        Mapping {
            name: name.into(),
            body: Arc::new(body),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, x: &T) -> Result<U> {
        (self.body)(x)
    }

    /// `self . g`: apply `g`, then `self`.
    pub fn compose<S: ?Sized + 'static>(&self, g: &Mapping<S, T>) -> Mapping<S, U>
    where
        T: Sized,
    {
        let (f, g2) = (self.body.clone(), g.body.clone());
        Mapping {
            name: format!("({}.{})", self.name, g.name),
            body: Arc::new(move |x| f(&g2(x)?)),
        }
    }
}

impl<T: ?Sized, U> fmt::Debug for Mapping<T, U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mapping").field("name", &self.name).finish()
    }
}
