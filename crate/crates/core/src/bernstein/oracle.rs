//! Derivatives of Bernstein polynomials by direct differentiation of the
//! basis.
//!
//! Each basis function is expanded as a sum of terms
//! `c · x_1^{a_1} … x_s^{a_s} · (1-‖x‖)^b` (simplex block) or
//! `c · x^a (1-x)^b` (one cube axis), and `∂/∂x_i` is applied `k_i` times by
//! the product rule. Nothing here uses finite differences, so it serves as
//! an independent check on [`DerivativeModel`](super::DerivativeModel).

use alloc::vec;
use alloc::vec::Vec;

use super::BernsteinModel;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::multiindex::MultiIndex;

/// `C(n, k)` by the multiplicative formula in floating point.
fn binom_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `x^0, x^1, …, x^n`.
fn powers(x: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|a| libm::pow(x, a as f64)).collect()
}

/// Terms `c · Π x_i^{a_i} · t^b` stored flat: `exps` holds `width` entries
/// per term, the last one being `b`.
struct Terms {
    width: usize,
    coeffs: Vec<f64>,
    exps: Vec<usize>,
}

impl Terms {
    fn single(c: f64, a: &[usize], b: usize) -> Self {
        let mut exps = a.to_vec();
        exps.push(b);
        Terms {
            width: a.len() + 1,
            coeffs: vec![c],
            exps,
        }
    }

    /// `∂/∂x_axis` where `t = 1 - Σ x` depends on every variable.
    fn differentiate(&self, axis: usize) -> Terms {
        let w = self.width;
        let mut out = Terms {
            width: w,
            coeffs: Vec::with_capacity(2 * self.coeffs.len()),
            exps: Vec::with_capacity(2 * self.exps.len()),
        };
        for (t, &c) in self.coeffs.iter().enumerate() {
            let e = &self.exps[t * w..(t + 1) * w];
            if e[axis] > 0 {
                out.coeffs.push(c * e[axis] as f64);
                out.exps.extend_from_slice(e);
                let last = out.exps.len() - w + axis;
                out.exps[last] -= 1;
            }
            if e[w - 1] > 0 {
                out.coeffs.push(-c * e[w - 1] as f64);
                out.exps.extend_from_slice(e);
                let last = out.exps.len() - 1;
                out.exps[last] -= 1;
            }
        }
        out
    }

    fn eval(&self, xp: &[Vec<f64>], tp: &[f64]) -> f64 {
        let w = self.width;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, &c)| {
                let e = &self.exps[t * w..(t + 1) * w];
                let mut v = c * tp[e[w - 1]];
                for (i, &a) in e[..w - 1].iter().enumerate() {
                    v *= xp[i][a];
                }
                v
            })
            .sum()
    }
}

/// `d^k/dx^k [C(n,j) x^j (1-x)^{n-j}]` at `x` for `j = 0..=n`.
fn cube_axis_derivatives(n: usize, k: usize, x: f64) -> Vec<f64> {
    let xp = [powers(x, n)];
    let tp = powers(1.0 - x, n);
    (0..=n)
        .map(|j| {
            let mut terms = Terms::single(binom_f64(n, j), &[j], n - j);
            for _ in 0..k {
                terms = terms.differentiate(0);
            }
            terms.eval(&xp, &tp)
        })
        .collect()
}

/// `∂^k [C^j_n x^j (1-‖x‖)^{n-|j|}]` at `x` for every `j` of the degree-`n`
/// simplex lattice in dimension `x.len()`, in lexicographic order.
fn simplex_derivatives(n: usize, k: &[usize], x: &[f64]) -> Vec<f64> {
    let s = x.len();
    let xp: Vec<Vec<f64>> = x.iter().map(|&xi| powers(xi, n)).collect();
    let rest = (1.0 - x.iter().sum::<f64>()).max(0.0);
    let tp = powers(rest, n);
    crate::multiindex::Lattice::new(s, n, Vec::new())
        .iter()
        .map(|j| {
            let mut coeff = 1.0;
            let mut remaining = n;
            for &ji in &j {
                coeff *= binom_f64(remaining, ji);
                remaining -= ji;
            }
            let mut terms = Terms::single(coeff, &j, remaining);
            for (axis, &ki) in k.iter().enumerate() {
                for _ in 0..ki {
                    terms = terms.differentiate(axis);
                }
            }
            terms.eval(&xp, &tp)
        })
        .collect()
}

fn contract(coeffs: &[f64], weights: &[Vec<f64>]) -> f64 {
    match weights.split_first() {
        None => coeffs[0],
        Some((w, rest)) => {
            let stride = coeffs.len() / w.len();
            w.iter()
                .enumerate()
                .map(|(t, &wt)| wt * contract(&coeffs[t * stride..(t + 1) * stride], rest))
                .sum()
        }
    }
}

/// `∂^k` of the Bernstein polynomial held by `model`, evaluated at `x` by
/// differentiating the basis.
pub fn oracle_from_model(model: &BernsteinModel, k: &MultiIndex, x: &[f64]) -> Result<f64> {
    let d = model.dim();
    if k.dim() != d || x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: if k.dim() != d { k.dim() } else { x.len() },
        });
    }
    let p = model.domain().point(x)?;
    let x = p.coords();
    let n = model.degree();
    let s = model.domain().simplex_dims(d);
    let simplex = if s > 0 {
        simplex_derivatives(n, &k.as_slice()[..s], &x[..s])
    } else {
        vec![1.0]
    };
    let cube: Vec<Vec<f64>> = (s..d)
        .map(|i| cube_axis_derivatives(n, k[i], x[i]))
        .collect();
    let samples = model.samples();
    let block = samples.len() / simplex.len();
    Ok(simplex
        .iter()
        .enumerate()
        .map(|(si, &w)| w * contract(&samples[si * block..(si + 1) * block], &cube))
        .sum())
}

/// `∂^k` of the degree-`n` Bernstein polynomial of `f` on `domain`,
/// evaluated at `x` by differentiating the basis.
pub fn oracle_deriv<F: ScalarField + ?Sized>(
    f: &F,
    domain: Domain,
    k: &MultiIndex,
    n: usize,
    x: &[f64],
) -> Result<f64> {
    let model = BernsteinModel::build(f, domain, n, k.dim())?;
    oracle_from_model(&model, k, x)
}
