//! Approximation domains and validated evaluation points.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::multiindex::Lattice;
use crate::DOMAIN_CLAMP_TOL;

/// Domain of a Bernstein polynomial.
///
/// `Mixed` places a `simplex_dims`-dimensional simplex on the leading axes
/// and unit intervals on the remaining ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Cube,
    Simplex,
    Mixed { simplex_dims: usize },
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::Cube => "cube",
            Domain::Simplex => "simplex",
            Domain::Mixed { .. } => "mixed",
        }
    }

    /// Number of leading axes under the simplex constraint in dimension `d`.
    pub fn simplex_dims(&self, d: usize) -> usize {
        match *self {
            Domain::Cube => 0,
            Domain::Simplex => d,
            Domain::Mixed { simplex_dims } => simplex_dims,
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::precondition("dimension must be at least 1"));
        }
        if let Domain::Mixed { simplex_dims } = *self {
            if simplex_dims == 0 || simplex_dims > d {
                return Err(Error::precondition(alloc::format!(
                    "mixed domain needs 1 <= d1 <= d, got d1 = {simplex_dims}, d = {d}"
                )));
            }
        }
        Ok(())
    }

    /// The sampling lattice of degree `n` in dimension `d`.
    pub fn lattice(&self, n: usize, d: usize) -> Lattice {
        let s = self.simplex_dims(d);
        Lattice::new(s, n, vec![n; d - s])
    }

    /// Whether `x` lies in the closed domain, up to the clamp tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.point(x).is_ok()
    }

    /// Validates `x`, clamping coordinates that are within
    /// [`DOMAIN_CLAMP_TOL`] outside the boundary.
    pub fn point(&self, x: &[f64]) -> Result<EvalPoint> {
        let d = x.len();
        self.check_dim(d)?;
        let outside = || Error::OutsideDomain {
            point: x.to_vec(),
            domain: self.name(),
        };
        let mut coords = Vec::with_capacity(d);
        for &c in x {
            if !(-DOMAIN_CLAMP_TOL..=1.0 + DOMAIN_CLAMP_TOL).contains(&c) {
                return Err(outside());
            }
            coords.push(c.clamp(0.0, 1.0));
        }
        let s = self.simplex_dims(d);
        if coords[..s].iter().sum::<f64>() > 1.0 + DOMAIN_CLAMP_TOL {
            return Err(outside());
        }
        Ok(EvalPoint {
            coords,
            domain: *self,
        })
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point validated against a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    coords: Vec<f64>,
    domain: Domain,
}

impl EvalPoint {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `‖x‖` over the simplex block (coordinates are non-negative).
    pub fn simplex_norm(&self) -> f64 {
        self.coords[..self.domain.simplex_dims(self.dim())].iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_roundoff_and_rejects_outside() {
        let p = Domain::Cube.point(&[-1e-13, 1.0 + 5e-13]).unwrap();
        assert_eq!(p.coords(), &[0.0, 1.0]);
        assert!(Domain::Cube.point(&[-1e-9, 0.5]).is_err());
        assert!(Domain::Simplex.point(&[0.6, 0.5]).is_err());
        assert!(Domain::Simplex.point(&[0.5, 0.5]).is_ok());
        // the cube block of a mixed point is not under the sum constraint
        let m = Domain::Mixed { simplex_dims: 1 };
        assert!(m.point(&[0.9, 0.9]).is_ok());
        let m2 = Domain::Mixed { simplex_dims: 2 };
        assert!(m2.point(&[0.6, 0.6, 0.1]).is_err());
        assert!(m2.point(&[f64::NAN, 0.1, 0.1]).is_err());
    }

    #[test]
    fn mixed_requires_simplex_block() {
        assert!(Domain::Mixed { simplex_dims: 0 }.point(&[0.1]).is_err());
        assert!(Domain::Mixed { simplex_dims: 3 }.point(&[0.1, 0.1]).is_err());
    }
}
