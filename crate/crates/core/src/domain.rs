//! Closed real intervals used as validation and sampling domains.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of points used by law checks when no other count is given.
pub const DEFAULT_LAW_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval [{lo}, {hi}] must be finite and nonempty"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// `[-10, 10]`, the default sampling domain for law checks.
    pub fn law_default() -> Self {
        Interval { lo: -10.0, hi: 10.0 }
    }

    /// `(0, 20]`, the law-check domain for functions defined only on positive reals.
    pub fn law_positive() -> Self {
        Interval { lo: 0.0, hi: 20.0 }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `n` evenly spaced points including both end points.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => {
                let step = self.width() / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 })
                    .collect()
            }
        }
    }

    /// `n` evenly spaced points in `(lo, hi]`, skipping the left end point.
    pub fn grid_open_left(&self, n: usize) -> Vec<f64> {
        let step = self.width() / n as f64;
        (1..=n)
            .map(|i| if i == n { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }

    /// `n` evenly spaced points strictly inside the interval (cell midpoints).
    pub fn midpoints(&self, n: usize) -> Vec<f64> {
        let step = self.width() / n as f64;
        (0..n).map(|i| self.lo + step * (i as f64 + 0.5)).collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Deterministic, well-spread points in a box (an additive recurrence per
/// coordinate). Used wherever validation needs samples in more than one dimension.
pub fn box_samples(bounds: &[Interval], n: usize) -> Vec<Vec<f64>> {
    // Fractional parts of square roots of primes are a classic low-discrepancy choice.
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    (0..n)
        .map(|k| {
            bounds
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let alpha = PRIMES[j % PRIMES.len()].sqrt().fract();
                    let u = ((k as f64 + 0.5) * alpha + 0.5 * (j as f64 + 1.0) / 7.0).fract();
                    b.lo + u * b.width()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_both_ends() {
        let g = Interval::new(-1.0, 1.0).unwrap().grid(5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn open_left_grid_skips_zero() {
        let g = Interval::law_positive().grid_open_left(100);
        assert_eq!(g.len(), 100);
        assert!(g[0] > 0.0);
        assert_eq!(*g.last().unwrap(), 20.0);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn box_samples_stay_inside() {
        let b = [Interval::new(0.5, 5.0).unwrap(), Interval::new(-3.0, 3.0).unwrap()];
        for p in box_samples(&b, 200) {
            assert!(b[0].contains(p[0]) && b[1].contains(p[1]));
        }
    }
}
