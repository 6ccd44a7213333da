use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::Representation;
use crate::mapping::Mapping;

/// A permutation of `{0, …, n-1}` stored as its image array.
///
/// Composition follows function composition: `p.compose(&q)` applies `q`
/// first, so `(p.q)[i] = p[q[i]]`.
#[derive(Clone)]
pub struct Permutation {
    mapping: Arc<[usize]>,
    name: Option<String>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        if mapping.is_empty() {
            return Err(Error::InvalidPermutation("size must be positive".into()));
        }
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n {
                return Err(Error::InvalidPermutation(format!("entry {v} is not below {n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("entry {v} appears twice")));
            }
        }
        Ok(Self::from_array_unchecked(mapping))
    }

    /// Skips validation. Used to inject broken arrays into the law checks.
    pub fn from_array_unchecked(mapping: Vec<usize>) -> Self {
        Permutation {
            mapping: mapping.into(),
            name: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "permutation size must be positive");
        Self::from_array_unchecked((0..n).collect())
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.to_string())
    }

    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn representation(&self) -> Representation {
        Representation::Permutation
    }

    /// Every permutation is a bijection.
    pub fn is_invertible(&self) -> bool {
        true
    }

    pub fn is_valid(&self) -> bool {
        Permutation::new(self.mapping.to_vec()).is_ok()
    }

    pub fn apply(&self, i: usize) -> Result<usize> {
        self.mapping.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            size: self.n(),
        })
    }

    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        if self.n() != q.n() {
            return Err(Error::Dimension {
                context: "permutation composition".into(),
                expected: self.n(),
                found: q.n(),
            });
        }
        let mut out = Vec::with_capacity(self.n());
        for &j in q.mapping.iter() {
            out.push(self.apply(j)?);
        }
        Ok(Permutation::from_array_unchecked(out))
    }

    pub fn inverse(&self) -> Permutation {
        let mut out = vec![0; self.n()];
        for (i, &v) in self.mapping.iter().enumerate() {
            if let Some(slot) = out.get_mut(v) {
                *slot = i;
            }
        }
        Permutation::from_array_unchecked(out)
    }

    /// The same permutation as a generic applicable function object.
    pub fn to_mapping(&self) -> Mapping<usize, usize> {
        let p = self.clone();
        Mapping::new(self.name(), move |i: &usize| p.apply(*i))
    }
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.mapping == other.mapping
    }
}

impl Eq for Permutation {}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.mapping.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<usize> = serde_json::from_str(s.trim())
            .map_err(|e| Error::InvalidPermutation(format!("cannot parse {s:?}: {e}")))?;
        Permutation::new(v)
    }
}
