//! Bernstein polynomials on the cube, the simplex and mixed domains, and
//! their mixed partial derivatives.
//!
//! On the cube `K^d` the polynomial is the tensor-product sum
//!
//! ```text
//! B̃_n(f; x) = Σ_{0 ≤ j_i ≤ n} f(j/n) Π_i C(n, j_i) x_i^{j_i} (1-x_i)^{n-j_i}
//! ```
//!
//! and on the simplex `S^d` the multinomial sum
//!
//! ```text
//! B_n(f; x) = Σ_{|j| ≤ n} f(j/n) C^j_n x^j (1-‖x‖)^{n-|j|}.
//! ```
//!
//! The mixed form uses the multinomial factor on the leading `d1` axes and
//! binomial factors on the rest.
//!
//! Derivatives are evaluated through the finite-difference representation:
//! `∂^k B̃_n(f)` is a Bernstein polynomial over the reduced lattice
//! `0 ≤ j_i ≤ n - k_i` with coefficients
//! `Π_i n(n-1)…(n-k_i+1) · Δ^k f(j/n)`, and `∂^k B_n(f)` is a Bernstein
//! polynomial of degree `n - |k|` with coefficients
//! `n!/(n-|k|)! · Δ^k f(j/n)`. All differences use step `1/n`, and every
//! stencil point `(j + m)/n` lies on the degree-`n` sampling lattice.

pub(crate) mod basis;
pub mod oracle;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::domain::{Domain, EvalPoint};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::finite_diff::{lattice_point, Stencil};
use crate::multiindex::{Lattice, LogFactorials, MultiIndex};

pub use oracle::oracle_deriv;

/// Samples `f(j/n)` over the sampling lattice of a domain, in lexicographic
/// lattice order.
#[derive(Debug, Clone)]
pub struct BernsteinModel {
    domain: Domain,
    degree: usize,
    dim: usize,
    samples: Vec<f64>,
    lf: LogFactorials,
}

impl PartialEq for BernsteinModel {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.degree == other.degree
            && self.dim == other.dim
            && self.samples == other.samples
    }
}

impl BernsteinModel {
    /// Samples `f` on the degree-`n` lattice of `domain` in dimension `d`.
    pub fn build<F: ScalarField + ?Sized>(f: &F, domain: Domain, n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("degree n must be positive"));
        }
        domain.check_dim(d)?;
        let lattice = domain.lattice(n, d);
        let mut samples = Vec::with_capacity(lattice.len());
        for j in lattice.iter() {
            let v = f
                .eval_checked(&lattice_point(&j, n))
                .map_err(|e| Error::SampleFailed {
                    index: MultiIndex::new(j).expect("lattice dimension is positive"),
                    source: Box::new(e),
                })?;
            samples.push(v);
        }
        Ok(BernsteinModel {
            domain,
            degree: n,
            dim: d,
            samples,
            lf: LogFactorials::new(n),
        })
    }

    /// Wraps precomputed samples, e.g. read back from a file.
    pub fn from_samples(domain: Domain, n: usize, d: usize, samples: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("degree n must be positive"));
        }
        domain.check_dim(d)?;
        let expected = domain.lattice(n, d).len();
        if samples.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: samples.len(),
            });
        }
        Ok(BernsteinModel {
            domain,
            degree: n,
            dim: d,
            samples,
            lf: LogFactorials::new(n),
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn lattice(&self) -> Lattice {
        self.domain.lattice(self.degree, self.dim)
    }

    /// Evaluates at `x`, dispatching on the model's domain.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let p = self.point(x)?;
        Ok(self.eval_point(&p))
    }

    pub fn eval_point(&self, p: &EvalPoint) -> f64 {
        basis::eval_lattice(&self.lf, &self.lattice(), &self.samples, p.coords())
    }

    pub fn eval_cube(&self, x: &[f64]) -> Result<f64> {
        self.expect_kind(Domain::Cube)?;
        self.eval(x)
    }

    pub fn eval_simplex(&self, x: &[f64]) -> Result<f64> {
        self.expect_kind(Domain::Simplex)?;
        self.eval(x)
    }

    pub fn eval_mixed(&self, x: &[f64]) -> Result<f64> {
        if !matches!(self.domain, Domain::Mixed { .. }) {
            return Err(Error::KindMismatch {
                expected: "mixed",
                found: self.domain.name(),
            });
        }
        self.eval(x)
    }

    /// Values on the tensor grid `axes[0] × axes[1] × …` (last axis
    /// fastest). Cube models only.
    pub fn eval_tensor_grid(&self, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.expect_kind(Domain::Cube)?;
        check_grid_axes(axes, self.dim)?;
        let degrees = alloc::vec![self.degree; self.dim];
        Ok(basis::eval_tensor_grid(&self.lf, &degrees, &self.samples, axes))
    }

    fn point(&self, x: &[f64]) -> Result<EvalPoint> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        self.domain.point(x)
    }

    fn expect_kind(&self, kind: Domain) -> Result<()> {
        if self.domain != kind {
            return Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.domain.name(),
            });
        }
        Ok(())
    }
}

fn check_grid_axes(axes: &[Vec<f64>], dim: usize) -> Result<()> {
    if axes.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: axes.len(),
        });
    }
    for axis in axes {
        Domain::Cube.point(axis.as_slice()).map(|_| ())?;
    }
    Ok(())
}

/// Prefactor of the derivative representation, split as
/// `ratio · (power · Δ^k f)`:
///
/// * `ratio = Π_{r < |k_S|} (n - r) · Π_{cube i} Π_{r < k_i} (n - r)/n`
/// * `power = n^{|k_C|}`
///
/// where `k_S` is the simplex block of `k` and `k_C` the cube block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivScale {
    ratio: f64,
    power: f64,
}

impl DerivScale {
    pub fn new(domain: Domain, n: usize, k: &MultiIndex) -> Self {
        let s = domain.simplex_dims(k.dim());
        let ks: usize = k.as_slice()[..s].iter().sum();
        let nf = n as f64;
        let mut ratio = 1.0;
        for r in 0..ks {
            ratio *= n.saturating_sub(r) as f64;
        }
        let mut kc = 0;
        for &ki in &k.as_slice()[s..] {
            for r in 0..ki {
                ratio *= n.saturating_sub(r) as f64 / nf;
            }
            kc += ki;
        }
        DerivScale {
            ratio,
            power: libm::pow(nf, kc as f64),
        }
    }

    #[inline]
    pub fn apply(&self, delta: f64) -> f64 {
        self.ratio * (self.power * delta)
    }
}

/// Whether `∂^k` annihilates every degree-`n` polynomial of the domain: some
/// cube `k_i > n`, or `|k_S| > n` on the simplex block.
pub fn order_exceeds_degree(domain: Domain, n: usize, k: &MultiIndex) -> bool {
    let s = domain.simplex_dims(k.dim());
    let ks: usize = k.as_slice()[..s].iter().sum();
    ks > n || k.as_slice()[s..].iter().any(|&ki| ki > n)
}

/// The reduced lattice of `∂^k` applied to the degree-`n` polynomial, or
/// `None` when the derivative vanishes identically.
pub fn reduced_lattice(domain: Domain, n: usize, k: &MultiIndex) -> Option<Lattice> {
    if order_exceeds_degree(domain, n, k) {
        return None;
    }
    let s = domain.simplex_dims(k.dim());
    let ks: usize = k.as_slice()[..s].iter().sum();
    let cube = k.as_slice()[s..].iter().map(|&ki| n - ki).collect();
    Some(Lattice::new(s, n - ks, cube))
}

/// `∂^k` of a Bernstein polynomial, held as Bernstein coefficients over the
/// reduced lattice.
#[derive(Debug, Clone)]
pub struct DerivativeModel {
    domain: Domain,
    degree: usize,
    order: MultiIndex,
    lattice: Option<Lattice>,
    coeffs: Vec<f64>,
    lf: LogFactorials,
}

impl DerivativeModel {
    /// Samples `f` on the full degree-`n` lattice once, then takes
    /// differences by index shifts.
    pub fn build<F: ScalarField + ?Sized>(
        f: &F,
        domain: Domain,
        n: usize,
        k: &MultiIndex,
    ) -> Result<Self> {
        let model = BernsteinModel::build(f, domain, n, k.dim())?;
        Self::from_model(&model, k)
    }

    pub fn from_model(model: &BernsteinModel, k: &MultiIndex) -> Result<Self> {
        if k.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                actual: k.dim(),
            });
        }
        let n = model.degree();
        let domain = model.domain();
        let lattice = reduced_lattice(domain, n, k);
        let mut coeffs = Vec::new();
        if let Some(reduced) = &lattice {
            let full = model.lattice();
            let stencil = Stencil::new(k.as_slice());
            let scale = DerivScale::new(domain, n, k);
            let samples = model.samples();
            coeffs.reserve(reduced.len());
            let mut idx = alloc::vec![0; k.dim()];
            for j in reduced.iter() {
                let delta = stencil.apply(|m| {
                    for (i, e) in idx.iter_mut().enumerate() {
                        *e = j[i] + m[i];
                    }
                    let r = full.rank(&idx).expect("stencil stays on the sampling lattice");
                    Ok(samples[r])
                })?;
                coeffs.push(scale.apply(delta));
            }
        }
        Ok(DerivativeModel {
            domain,
            degree: n,
            order: k.clone(),
            lattice,
            coeffs,
            lf: LogFactorials::new(n),
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &MultiIndex {
        &self.order
    }

    /// Bernstein coefficients over the reduced lattice; empty when the
    /// derivative vanishes identically.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn reduced_lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.order.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.order.dim(),
                actual: x.len(),
            });
        }
        let p = self.domain.point(x)?;
        Ok(self.eval_point(&p))
    }

    pub fn eval_point(&self, p: &EvalPoint) -> f64 {
        match &self.lattice {
            None => 0.0,
            Some(l) => basis::eval_lattice(&self.lf, l, &self.coeffs, p.coords()),
        }
    }

    /// Values on a tensor grid (last axis fastest). Cube models only.
    pub fn eval_tensor_grid(&self, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
        if self.domain != Domain::Cube {
            return Err(Error::KindMismatch {
                expected: "cube",
                found: self.domain.name(),
            });
        }
        check_grid_axes(axes, self.order.dim())?;
        match &self.lattice {
            None => Ok(alloc::vec![0.0; axes.iter().map(Vec::len).product()]),
            Some(l) => Ok(basis::eval_tensor_grid(
                &self.lf,
                l.cube_degrees(),
                &self.coeffs,
                axes,
            )),
        }
    }
}

/// Samples `f` on the degree-`n` lattice of `domain`.
pub fn build_model<F: ScalarField + ?Sized>(
    f: &F,
    domain: Domain,
    n: usize,
    d: usize,
) -> Result<BernsteinModel> {
    BernsteinModel::build(f, domain, n, d)
}

pub fn eval_cube(model: &BernsteinModel, x: &[f64]) -> Result<f64> {
    model.eval_cube(x)
}

pub fn eval_simplex(model: &BernsteinModel, x: &[f64]) -> Result<f64> {
    model.eval_simplex(x)
}

pub fn eval_mixed(model: &BernsteinModel, x: &[f64]) -> Result<f64> {
    model.eval_mixed(x)
}

fn deriv_on<F: ScalarField + ?Sized>(
    f: &F,
    domain: Domain,
    k: &MultiIndex,
    n: usize,
    x: &[f64],
) -> Result<f64> {
    if x.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            actual: x.len(),
        });
    }
    let p = domain.point(x)?;
    Ok(DerivativeModel::build(f, domain, n, k)?.eval_point(&p))
}

/// `∂^k B̃_n(f; x)` on the cube.
pub fn deriv_cube<F: ScalarField + ?Sized>(f: &F, k: &MultiIndex, n: usize, x: &[f64]) -> Result<f64> {
    deriv_on(f, Domain::Cube, k, n, x)
}

/// `∂^k B_n(f; x)` on the simplex.
pub fn deriv_simplex<F: ScalarField + ?Sized>(
    f: &F,
    k: &MultiIndex,
    n: usize,
    x: &[f64],
) -> Result<f64> {
    deriv_on(f, Domain::Simplex, k, n, x)
}

/// `∂^k` of the mixed simplex×cube polynomial.
///
/// Composes the simplex rule on the leading `simplex_dims` axes with the
/// cube rule on the rest. Experimental: no convergence guarantee is
/// attached to it.
pub fn deriv_mixed<F: ScalarField + ?Sized>(
    f: &F,
    simplex_dims: usize,
    k: &MultiIndex,
    n: usize,
    x: &[f64],
) -> Result<f64> {
    deriv_on(f, Domain::Mixed { simplex_dims }, k, n, x)
}
