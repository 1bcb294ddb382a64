//! Evaluation of polynomials written in Bernstein form over a [`Lattice`].
//!
//! The simplex block uses the factorisation of the multinomial weight into
//! conditional binomials,
//!
//! ```text
//! C^j_m x^j (1-‖x‖)^{m-|j|} = Π_i C(r_i, j_i) p_i^{j_i} (1-p_i)^{r_i-j_i},
//! r_i = m - j_1 - … - j_{i-1},   p_i = x_i / (1 - x_1 - … - x_{i-1}),
//! ```
//!
//! so every weight is a product of binomial probabilities. Each binomial
//! probability vector is computed in log space and renormalised to unit
//! mass; a zero base with positive exponent contributes an exact zero and
//! `0^0 = 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::multiindex::{Lattice, LogFactorials};

/// `C(m, j) p^j q^{m-j}` for `j = 0..=m`, written into `out`. `q` is passed
/// separately from `p` so callers can supply an accurately computed `1 - p`.
pub(crate) fn binomial_pmf(lf: &LogFactorials, m: usize, p: f64, q: f64, out: &mut Vec<f64>) {
    out.clear();
    out.resize(m + 1, 0.0);
    if p <= 0.0 {
        out[0] = 1.0;
        return;
    }
    if q <= 0.0 {
        out[m] = 1.0;
        return;
    }
    let lp = libm::log(p);
    let lq = libm::log(q);
    let lm = lf.ln_factorial(m);
    let mut total = 0.0;
    for (j, w) in out.iter_mut().enumerate() {
        let lc = lm - lf.ln_factorial(j) - lf.ln_factorial(m - j);
        *w = libm::exp(lc + j as f64 * lp + (m - j) as f64 * lq);
        total += *w;
    }
    for w in out.iter_mut() {
        *w /= total;
    }
}

/// Cube-axis weights `C(m, j) x^j (1-x)^{m-j}`.
pub(crate) fn cube_weights(lf: &LogFactorials, m: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::new();
    binomial_pmf(lf, m, x, 1.0 - x, &mut out);
    out
}

/// Conditional success probabilities `(p_i, 1 - p_i)` of the sequential
/// binomial factorisation of a multinomial with probabilities
/// `(x_1, …, x_s, 1 - ‖x‖)`.
pub(crate) fn conditional_probabilities(x: &[f64]) -> Vec<(f64, f64)> {
    let mut rem = 1.0f64;
    x.iter()
        .map(|&xi| {
            if rem <= 0.0 {
                return (0.0, 1.0);
            }
            let next = (rem - xi).max(0.0);
            let p = (xi / rem).min(1.0);
            let q = next / rem;
            rem = next;
            (p, q)
        })
        .collect()
}

/// Multinomial weights `C^j_m x^j (1-‖x‖)^{m-|j|}` for every `j` of the
/// simplex lattice of degree `m`, in lexicographic order.
pub(crate) fn simplex_weights(lf: &LogFactorials, m: usize, x: &[f64]) -> Vec<f64> {
    let s = x.len();
    let probs = conditional_probabilities(x);
    // tables[axis][r] = pmf of Bin(r, p_axis); axis 0 only ever sees r = m
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(s);
    for (axis, &(p, q)) in probs.iter().enumerate() {
        let rows = if axis == 0 { m..=m } else { 0..=m };
        let mut t = vec![Vec::new(); m + 1];
        for r in rows {
            binomial_pmf(lf, r, p, q, &mut t[r]);
        }
        tables.push(t);
    }
    let lattice_len = Lattice::new(s, m, Vec::new()).len();
    let mut out = Vec::with_capacity(lattice_len);
    fill_simplex(&tables, 0, m, 1.0, &mut out);
    out
}

fn fill_simplex(tables: &[Vec<Vec<f64>>], axis: usize, r: usize, w: f64, out: &mut Vec<f64>) {
    if axis == tables.len() {
        out.push(w);
        return;
    }
    let pmf = &tables[axis][r];
    for (j, &pj) in pmf.iter().enumerate() {
        let wj = w * pj;
        if wj == 0.0 {
            // keep lexicographic positions: push zeros for the whole subtree
            push_zeros(tables.len() - axis - 1, r - j, out);
        } else {
            fill_simplex(tables, axis + 1, r - j, wj, out);
        }
    }
}

fn push_zeros(dims: usize, degree: usize, out: &mut Vec<f64>) {
    let count = if dims == 0 {
        1
    } else {
        Lattice::new(dims, degree, Vec::new()).len()
    };
    out.extend(core::iter::repeat_n(0.0, count));
}

/// `Σ_t w_0[t] Σ_u w_1[u] … c[t, u, …]` for a row-major block.
fn contract(coeffs: &[f64], weights: &[Vec<f64>]) -> f64 {
    match weights.split_first() {
        None => coeffs[0],
        Some((w, rest)) => {
            let stride = coeffs.len() / w.len();
            let mut acc = 0.0;
            for (t, &wt) in w.iter().enumerate() {
                if wt != 0.0 {
                    acc += wt * contract(&coeffs[t * stride..(t + 1) * stride], rest);
                }
            }
            acc
        }
    }
}

/// `Σ_j coeffs[rank(j)] · basis_j(x)` for the lattice's Bernstein basis.
///
/// `x` must already be validated against the lattice's domain.
pub(crate) fn eval_lattice(lf: &LogFactorials, lattice: &Lattice, coeffs: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(coeffs.len(), lattice.len());
    let s = lattice.simplex_dims();
    let sw = if s > 0 {
        simplex_weights(lf, lattice.simplex_degree(), &x[..s])
    } else {
        vec![1.0]
    };
    let cube: Vec<Vec<f64>> = lattice
        .cube_degrees()
        .iter()
        .zip(&x[s..])
        .map(|(&m, &xi)| cube_weights(lf, m, xi))
        .collect();
    let block = coeffs.len() / sw.len();
    let mut acc = 0.0;
    for (si, &w) in sw.iter().enumerate() {
        if w != 0.0 {
            acc += w * contract(&coeffs[si * block..(si + 1) * block], &cube);
        }
    }
    acc
}

/// Values of a pure cube-lattice polynomial on the tensor grid
/// `axes[0] × axes[1] × …`, row-major with the last axis fastest.
///
/// Contracts one axis at a time against the per-axis basis matrices.
pub(crate) fn eval_tensor_grid(
    lf: &LogFactorials,
    degrees: &[usize],
    coeffs: &[f64],
    axes: &[Vec<f64>],
) -> Vec<f64> {
    debug_assert_eq!(degrees.len(), axes.len());
    let mut shape: Vec<usize> = degrees.iter().map(|m| m + 1).collect();
    let mut tensor = coeffs.to_vec();
    for axis in (0..degrees.len()).rev() {
        let basis: Vec<Vec<f64>> = axes[axis]
            .iter()
            .map(|&x| cube_weights(lf, degrees[axis], x))
            .collect();
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let len = shape[axis];
        let g = basis.len();
        let mut next = vec![0.0; outer * g * inner];
        for o in 0..outer {
            for (gi, w) in basis.iter().enumerate() {
                let dst = &mut next[(o * g + gi) * inner..(o * g + gi + 1) * inner];
                for (t, &wt) in w.iter().enumerate() {
                    if wt == 0.0 {
                        continue;
                    }
                    let src = &tensor[(o * len + t) * inner..(o * len + t + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += wt * s;
                    }
                }
            }
        }
        tensor = next;
        shape[axis] = g;
    }
    tensor
}
