//! Scalar fields `f: R^d -> R` supplied by the caller.

use crate::error::{Error, Result};
use crate::DOMAIN_CLAMP_TOL;

/// Where a field may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DomainHint {
    Cube,
    Simplex,
    #[default]
    All,
}

impl DomainHint {
    pub fn contains(&self, x: &[f64]) -> bool {
        let in_unit = |c: &f64| *c >= -DOMAIN_CLAMP_TOL && *c <= 1.0 + DOMAIN_CLAMP_TOL;
        match self {
            DomainHint::All => true,
            DomainHint::Cube => x.iter().all(in_unit),
            DomainHint::Simplex => {
                x.iter().all(in_unit) && x.iter().sum::<f64>() <= 1.0 + DOMAIN_CLAMP_TOL
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DomainHint::Cube => "cube",
            DomainHint::Simplex => "simplex",
            DomainHint::All => "R^d",
        }
    }
}

/// A deterministic map from a point of `R^d` to a real.
pub trait ScalarField {
    fn eval(&self, x: &[f64]) -> Result<f64>;

    fn domain_hint(&self) -> DomainHint {
        DomainHint::All
    }

    /// Evaluates after checking `x` against [`ScalarField::domain_hint`].
    fn eval_checked(&self, x: &[f64]) -> Result<f64> {
        let hint = self.domain_hint();
        if !hint.contains(x) {
            return Err(Error::OutsideDomain {
                point: x.to_vec(),
                domain: hint.name(),
            });
        }
        self.eval(x)
    }
}

impl<F> ScalarField for F
where
    F: Fn(&[f64]) -> f64,
{
    fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self(x))
    }
}

/// A closure together with the domain on which it is defined.
#[derive(Clone, Copy)]
pub struct FnField<F> {
    f: F,
    hint: DomainHint,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    pub fn new(hint: DomainHint, f: F) -> Self {
        FnField { f, hint }
    }
}

impl<F> ScalarField for FnField<F>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    fn eval(&self, x: &[f64]) -> Result<f64> {
        (self.f)(x)
    }

    fn domain_hint(&self) -> DomainHint {
        self.hint
    }
}
