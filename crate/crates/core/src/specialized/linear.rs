use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::function::Representation;
use crate::multivariate::{VectorFunction, SINGULAR_PIVOT};

/// Residual allowed per unit of the condition estimate when validating a
/// computed inverse.
const INVERSE_RESIDUAL: f64 = 1e-12;

/// A linear map `R^n -> R^m` stored as its `m×n` matrix.
#[derive(Clone)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    name: Option<String>,
    /// Set on maps produced by [`LinearMap::inverse`]: the matrix they invert.
    inverse_of: Option<Arc<DMatrix<f64>>>,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(LinearMap {
            matrix,
            name: None,
            inverse_of: None,
        })
    }

    /// From row-major nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::Dimension {
                context: "matrix row length".into(),
                expected: ncols,
                found: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        LinearMap::new(DMatrix::from_row_slice(rows.len(), ncols, &flat))
    }

    pub fn identity(n: usize) -> Self {
        LinearMap::new(DMatrix::identity(n, n))
            .expect("n > 0")
            .named(format!("I{n}"))
    }

    /// Counter-clockwise rotation of the plane by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        LinearMap::new(DMatrix::from_row_slice(2, 2, &[c, -s, s, c])).expect("finite")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.to_string())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn representation(&self) -> Representation {
        Representation::LinearMap
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols() {
            return Err(Error::Dimension {
                context: format!("input to {}", self.name()),
                expected: self.cols(),
                found: x.len(),
            });
        }
        Ok((&self.matrix * DVector::from_column_slice(x)).iter().copied().collect())
    }

    /// `self . b`: the matrix product `self · b`.
    pub fn compose(&self, b: &LinearMap) -> Result<LinearMap> {
        if self.cols() != b.rows() {
            return Err(Error::Dimension {
                context: "linear map composition".into(),
                expected: self.cols(),
                found: b.rows(),
            });
        }
        LinearMap::new(&self.matrix * &b.matrix)
    }

    /// Determinant of a square map (0 below the singular-pivot threshold).
    pub fn determinant(&self) -> Result<f64> {
        self.require_square("determinant")?;
        Ok(crate::multivariate::determinant(&self.matrix))
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.rows() != self.cols() {
            return Err(Error::Dimension {
                context: format!("{what} of a non-square matrix"),
                expected: self.rows(),
                found: self.cols(),
            });
        }
        Ok(())
    }

    /// The inverse map, registered both ways: inverting the result gives
    /// back this matrix exactly.
    ///
    /// Fails on a pivot below `1e-12` in magnitude, and when the residual
    /// `max|A·A⁻¹ - I|` exceeds `1e-12 · n · max|A| · max|A⁻¹|`.
    pub fn inverse(&self) -> Result<LinearMap> {
        self.require_square("inverse")?;
        if let Some(orig) = &self.inverse_of {
            return Ok(LinearMap {
                matrix: (**orig).clone(),
                name: None,
                inverse_of: Some(Arc::new(self.matrix.clone())),
            });
        }
        let n = self.rows();
        let lu = self.matrix.clone().lu();
        if let Some(p) = lu.u().diagonal().iter().find(|p| p.abs() < SINGULAR_PIVOT) {
            return Err(Error::Singular { pivot: p.abs() });
        }
        let inv = lu.try_inverse().ok_or(Error::Singular { pivot: 0.0 })?;
        let cond = n as f64 * self.matrix.amax() * inv.amax();
        let residual = (&self.matrix * &inv - DMatrix::<f64>::identity(n, n)).amax();
        let tolerance = INVERSE_RESIDUAL * cond.max(1.0);
        if !(residual <= tolerance) {
            return Err(Error::IllConditioned { residual, tolerance });
        }
        Ok(LinearMap {
            matrix: inv,
            name: None,
            inverse_of: Some(Arc::new(self.matrix.clone())),
        })
    }

    /// The map as a generic vector function whose Jacobian is the matrix.
    pub fn to_vector_function(&self) -> VectorFunction {
        let (m, j) = (self.clone(), self.matrix.clone());
        VectorFunction::new(self.name(), self.cols(), self.rows(), move |x| m.apply(x))
            .expect("non-empty")
            .with_jacobian(move |_| Ok(j.clone()))
            .with_representation(Representation::LinearMap)
    }

    fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

impl PartialEq for LinearMap {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl fmt::Display for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_string(&self.to_rows()).map_err(|_| fmt::Error)?;
        f.write_str(&s)
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap{self}")
    }
}

impl FromStr for LinearMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = serde_json::from_str(s.trim())
            .map_err(|e| Error::InvalidArgument(format!("cannot parse matrix {s:?}: {e}")))?;
        LinearMap::from_rows(&rows)
    }
}
