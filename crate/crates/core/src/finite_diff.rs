//! Forward differences along coordinate axes and their mixed products.
//!
//! `Δ_{z,x_i} f(x) = f(x + z e_i) - f(x)`, and for an order `k` the mixed
//! difference `Δ^k` applies `Δ_{z_i,x_i}` `k_i` times on each axis. The
//! single-axis operators commute, so `Δ^k` is evaluated through its closed
//! stencil
//!
//! ```text
//! Δ^k f(x) = Σ_{m ≤ k} (-1)^{|k|-|m|} Π_i C(k_i, m_i) f(x + Σ_i m_i z_i e_i)
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::multiindex::{binomial, Lattice, MultiIndex};
use crate::quadrature::GaussLegendre;

/// A mixed-difference request: order `k` and a positive step per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSpec {
    order: MultiIndex,
    steps: Vec<f64>,
}

impl DiffSpec {
    pub fn new(order: MultiIndex, steps: Vec<f64>) -> Result<Self> {
        if steps.len() != order.dim() {
            return Err(Error::DimensionMismatch {
                expected: order.dim(),
                actual: steps.len(),
            });
        }
        if let Some(z) = steps.iter().find(|z| !z.is_finite() || **z <= 0.0) {
            return Err(Error::precondition(alloc::format!(
                "difference steps must be positive and finite, got {z}"
            )));
        }
        Ok(DiffSpec { order, steps })
    }

    /// All steps equal to `1/n`.
    pub fn uniform(order: MultiIndex, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("n must be positive"));
        }
        let d = order.dim();
        Self::new(order, vec![1.0 / n as f64; d])
    }

    pub fn order(&self) -> &MultiIndex {
        &self.order
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.order.dim()
    }
}

/// Offsets `m ≤ k` with their signed weights `(-1)^{|k|-|m|} Π C(k_i, m_i)`,
/// in lexicographic order of `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    taps: Vec<(Vec<usize>, f64)>,
}

impl Stencil {
    pub fn new(order: &[usize]) -> Self {
        let total: usize = order.iter().sum();
        let taps = Lattice::new(0, 0, order.to_vec())
            .iter()
            .map(|m| {
                let weight = m
                    .iter()
                    .zip(order)
                    .map(|(&mi, &ki)| binomial(ki, mi) as f64)
                    .product::<f64>();
                let sign = if (total - m.iter().sum::<usize>()).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                (m, sign * weight)
            })
            .collect();
        Stencil { taps }
    }

    pub fn taps(&self) -> &[(Vec<usize>, f64)] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `Σ weight(m) · value(m)` in tap order.
    pub fn apply<F>(&self, mut value: F) -> Result<f64>
    where
        F: FnMut(&[usize]) -> Result<f64>,
    {
        let mut acc = 0.0;
        for (m, w) in &self.taps {
            acc += w * value(m)?;
        }
        Ok(acc)
    }
}

/// Coordinates of the lattice point `j / n`.
///
/// Every lattice sample in the crate goes through this function so that the
/// same index always produces bit-identical arguments.
pub fn lattice_point(j: &[usize], n: usize) -> Vec<f64> {
    let nf = n as f64;
    j.iter().map(|&e| e as f64 / nf).collect()
}

/// `f(x + z e_axis) - f(x)`.
///
/// Negative `z` is accepted here even though [`DiffSpec`] excludes it.
pub fn delta_axis<F: ScalarField + ?Sized>(f: &F, x: &[f64], axis: usize, z: f64) -> Result<f64> {
    if axis >= x.len() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: x.len(),
        });
    }
    let mut shifted = x.to_vec();
    shifted[axis] += z;
    Ok(f.eval_checked(&shifted)? - f.eval_checked(x)?)
}

/// The mixed difference `Δ^k f(x)` with per-axis steps.
pub fn delta_mixed<F: ScalarField + ?Sized>(f: &F, x: &[f64], spec: &DiffSpec) -> Result<f64> {
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: x.len(),
        });
    }
    let stencil = Stencil::new(spec.order().as_slice());
    let mut p = x.to_vec();
    stencil.apply(|m| {
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = x[i] + m[i] as f64 * spec.steps()[i];
        }
        f.eval_checked(&p)
    })
}

/// `n^{|k|} Δ^k f(x)` with every step `1/n`.
pub fn normalized_delta<F: ScalarField + ?Sized>(
    f: &F,
    x: &[f64],
    k: &MultiIndex,
    n: usize,
) -> Result<f64> {
    let spec = DiffSpec::uniform(k.clone(), n)?;
    let scale = libm::pow(n as f64, k.modulus() as f64);
    Ok(scale * delta_mixed(f, x, &spec)?)
}

/// `Δ^k f(j/n)` with steps `1/n`, sampling `f` at lattice points `(j+m)/n`.
pub fn lattice_delta<F: ScalarField + ?Sized>(
    f: &F,
    stencil: &Stencil,
    j: &[usize],
    n: usize,
) -> Result<f64> {
    let mut idx = vec![0; j.len()];
    stencil.apply(|m| {
        for (i, e) in idx.iter_mut().enumerate() {
            *e = j[i] + m[i];
        }
        f.eval_checked(&lattice_point(&idx, n))
    })
}

/// Both sides of the identity between a mixed difference and the iterated
/// integral of the matching mixed partial:
///
/// ```text
/// Δ^{k_1}_{z_1,x_1} … Δ^{k_d}_{z_d,x_d} f(x)
///   = ∫_{x_1}^{x_1+z_1} dξ¹_1 ∫_{ξ¹_1}^{ξ¹_1+z_1} dξ¹_2 … ∂^k f(ξ¹_{k_1}, …, ξ^d_{k_d})
/// ```
///
/// `df` must evaluate `∂^k f`. Each one-dimensional level uses a
/// `quad_points`-node Gauss–Legendre rule; an axis with `k_i = 0` is not
/// integrated and keeps the coordinate `x_i`. Returns `(lhs, rhs)`.
pub fn lemma1_check<F, G>(
    f: &F,
    df: &G,
    x: &[f64],
    spec: &DiffSpec,
    quad_points: usize,
) -> Result<(f64, f64)>
where
    F: ScalarField + ?Sized,
    G: ScalarField + ?Sized,
{
    let lhs = delta_mixed(f, x, spec)?;
    let rule = GaussLegendre::new(quad_points)?;
    let axes: Vec<Vec<(f64, f64)>> = (0..spec.dim())
        .map(|i| nested_rule(&rule, x[i], spec.steps()[i], spec.order()[i]))
        .collect();
    let rhs = tensor_sum(df, &axes)?;
    Ok((lhs, rhs))
}

/// Weighted nodes for the last variable of `levels` nested integrals
/// `∫_a^{a+z} dξ_1 ∫_{ξ_1}^{ξ_1+z} dξ_2 …`.
fn nested_rule(rule: &GaussLegendre, start: f64, z: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut nodes = vec![(start, 1.0)];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(nodes.len() * rule.len());
        for &(lo, w) in &nodes {
            next.extend(
                rule.nodes_on(lo, lo + z)
                    .map(|(t, wt)| (t, w * wt)),
            );
        }
        nodes = next;
    }
    nodes
}

fn tensor_sum<G: ScalarField + ?Sized>(g: &G, axes: &[Vec<(f64, f64)>]) -> Result<f64> {
    let d = axes.len();
    let mut point = vec![0.0; d];
    let mut counter = vec![0usize; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..d {
            let (t, wi) = axes[i][counter[i]];
            point[i] = t;
            w *= wi;
        }
        total += w * g.eval_checked(&point)?;
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(total);
            }
            axis -= 1;
            counter[axis] += 1;
            if counter[axis] < axes[axis].len() {
                break;
            }
            counter[axis] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{DomainHint, FnField};

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    /// Iterated application of single-axis differences in the given axis
    /// order.
    fn iterated<F: ScalarField>(f: &F, x: &[f64], k: &[usize], z: &[f64], axes: &[usize]) -> f64 {
        fn go<F: ScalarField>(f: &F, x: &[f64], pending: &[usize], z: &[f64]) -> f64 {
            match pending.split_first() {
                None => f.eval(x).unwrap(),
                Some((&axis, rest)) => {
                    let mut shifted = x.to_vec();
                    shifted[axis] += z[axis];
                    go(f, &shifted, rest, z) - go(f, x, rest, z)
                }
            }
        }
        let mut seq = Vec::new();
        for &a in axes {
            seq.extend(core::iter::repeat_n(a, k[a]));
        }
        go(f, x, &seq, z)
    }

    #[test]
    fn delta_axis_examples() {
        let sq = |x: &[f64]| x[0] * x[0];
        assert!((delta_axis(&sq, &[0.5], 0, 0.25).unwrap() - 0.3125).abs() < 1e-15);
        let c = |_: &[f64]| 3.5;
        assert_eq!(delta_axis(&c, &[0.1, 0.7], 1, 0.3).unwrap(), 0.0);
        let second = |x: &[f64]| x[1];
        assert_eq!(delta_axis(&second, &[0.3, 0.4], 0, 0.1).unwrap(), 0.0);
        assert!(matches!(
            delta_axis(&sq, &[0.5], 1, 0.1),
            Err(Error::AxisOutOfRange { axis: 1, dim: 1 })
        ));
    }

    #[test]
    fn delta_mixed_examples() {
        let sq = |x: &[f64]| x[0] * x[0];
        let spec = DiffSpec::new(mi(&[2]), vec![0.5]).unwrap();
        assert!((delta_mixed(&sq, &[0.0], &spec).unwrap() - 0.5).abs() < 1e-15);

        let prod = |x: &[f64]| x[0] * x[1];
        let spec = DiffSpec::new(mi(&[1, 1]), vec![0.2, 0.3]).unwrap();
        assert!((delta_mixed(&prod, &[0.35, 0.6], &spec).unwrap() - 0.06).abs() < 1e-15);

        let g = |x: &[f64]| libm::sin(x[0]) + x[1];
        let spec = DiffSpec::new(mi(&[0, 0]), vec![0.1, 0.1]).unwrap();
        assert_eq!(delta_mixed(&g, &[0.4, 0.2], &spec).unwrap(), g(&[0.4, 0.2]));

        assert!(matches!(
            delta_mixed(&g, &[0.4], &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diff_spec_validation() {
        assert!(DiffSpec::new(mi(&[1, 1]), vec![0.1]).is_err());
        assert!(DiffSpec::new(mi(&[1]), vec![0.0]).is_err());
        assert!(DiffSpec::new(mi(&[1]), vec![-0.1]).is_err());
        assert!(DiffSpec::new(mi(&[1]), vec![f64::NAN]).is_err());
    }

    #[test]
    fn normalized_delta_examples() {
        let lin = |x: &[f64]| x[0];
        let sq = |x: &[f64]| x[0] * x[0];
        for n in [1, 2, 7, 64, 256] {
            let v = normalized_delta(&lin, &[0.0], &mi(&[1]), n).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "n={n}");
            let v = normalized_delta(&sq, &[0.0], &mi(&[2]), n).unwrap();
            assert!((v - 2.0).abs() < 1e-9, "n={n}");
        }
        let s = |x: &[f64]| libm::sin(x[0]);
        let v = normalized_delta(&s, &[0.0], &mi(&[1]), 1000).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stencil_stays_on_declared_domain() {
        let f = FnField::new(DomainHint::Cube, |x: &[f64]| Ok(x[0]));
        let spec = DiffSpec::new(mi(&[2]), vec![0.25]).unwrap();
        assert!(delta_mixed(&f, &[0.5], &spec).is_ok());
        assert!(matches!(
            delta_mixed(&f, &[0.75], &spec),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn evaluator_failure_propagates() {
        let f = FnField::new(DomainHint::All, |x: &[f64]| {
            if x[0] > 0.5 {
                Err(Error::Evaluator("boom".into()))
            } else {
                Ok(x[0])
            }
        });
        assert!(matches!(
            delta_axis(&f, &[0.4], 0, 0.2),
            Err(Error::Evaluator(_))
        ));
    }

    #[test]
    fn stencil_form_equals_iterated_form() {
        let f = |x: &[f64]| libm::exp(0.3 * x[0] - x[1]) * libm::cos(x[2] + 0.2 * x[0]);
        let x = [0.11, 0.42, 0.27];
        let z = [0.1, 0.05, 0.2];
        for k in Lattice::new(0, 0, vec![3, 2, 3]).iter() {
            let spec = DiffSpec::new(MultiIndex::new(k.clone()).unwrap(), z.to_vec()).unwrap();
            let stencil = delta_mixed(&f, &x, &spec).unwrap();
            let rec = iterated(&f, &x, &k, &z, &[0, 1, 2]);
            let scale = 1f64.max(rec.abs());
            assert!((stencil - rec).abs() <= 1e-12 * scale, "k={k:?}");
        }
    }

    #[test]
    fn difference_integral_examples() {
        let prod = |x: &[f64]| x[0] * x[1];
        let one = |_: &[f64]| 1.0;
        let spec = DiffSpec::new(mi(&[1, 1]), vec![0.3, 0.4]).unwrap();
        let (lhs, rhs) = lemma1_check(&prod, &one, &[0.1, 0.2], &spec, 8).unwrap();
        assert!((lhs - 0.12).abs() < 1e-15);
        assert!((rhs - 0.12).abs() < 1e-14);

        let g = |x: &[f64]| libm::sin(x[0]) * x[1];
        let spec = DiffSpec::new(mi(&[0, 0]), vec![0.3, 0.4]).unwrap();
        let (lhs, rhs) = lemma1_check(&g, &g, &[0.1, 0.2], &spec, 4).unwrap();
        assert_eq!(lhs, g(&[0.1, 0.2]));
        assert_eq!(rhs, g(&[0.1, 0.2]));

        let cube = |x: &[f64]| x[0] * x[0] * x[0];
        let six = |x: &[f64]| 6.0 * x[0];
        let spec = DiffSpec::new(mi(&[2]), vec![0.5]).unwrap();
        let (lhs, rhs) = lemma1_check(&cube, &six, &[0.0], &spec, 4).unwrap();
        assert!((lhs - 0.75).abs() < 1e-15);
        assert!((rhs - 0.75).abs() < 1e-14);
    }

    #[test]
    fn nested_rule_weights_match_box_spline_mass() {
        // k nested integrals of length z have total volume z^k
        let rule = GaussLegendre::new(5).unwrap();
        for k in 0..4 {
            let nodes = nested_rule(&rule, 0.2, 0.3, k);
            let mass: f64 = nodes.iter().map(|(_, w)| w).sum();
            assert!((mass - libm::pow(0.3, k as f64)).abs() < 1e-15);
            assert!(nodes.iter().all(|(t, _)| *t >= 0.2 && *t <= 0.2 + 0.3 * k as f64));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn smooth(x: &[f64]) -> f64 {
            let mut acc = 0.0;
            for (i, xi) in x.iter().enumerate() {
                acc += libm::sin((i as f64 + 1.3) * xi) * libm::exp(-0.5 * xi * (i as f64));
            }
            acc * libm::cos(x.iter().sum::<f64>())
        }

        fn permutations(d: usize) -> Vec<Vec<usize>> {
            if d == 1 {
                return vec![vec![0]];
            }
            let mut out = Vec::new();
            for p in permutations(d - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, d - 1);
                    out.push(q);
                }
            }
            out
        }

        proptest! {
            #[test]
            fn differences_commute(
                d in 1usize..=4,
                k in proptest::collection::vec(0usize..=3, 4),
                x in proptest::collection::vec(0.0f64..1.0, 4),
                z in proptest::collection::vec(0.01f64..0.3, 4),
            ) {
                let (k, x, z) = (&k[..d], &x[..d], &z[..d]);
                let reference = iterated(&smooth, x, k, z, &(0..d).collect::<Vec<_>>());
                let magnitude: f64 = Stencil::new(k)
                    .taps()
                    .iter()
                    .map(|(_, w)| w.abs())
                    .sum::<f64>();
                for perm in permutations(d) {
                    let v = iterated(&smooth, x, k, z, &perm);
                    prop_assert!((v - reference).abs() <= 1e-12 * magnitude.max(1.0));
                }
                let spec = DiffSpec::new(MultiIndex::new(k.to_vec()).unwrap(), z.to_vec()).unwrap();
                let closed = delta_mixed(&smooth, x, &spec).unwrap();
                prop_assert!((closed - reference).abs() <= 1e-12 * magnitude.max(1.0));
            }

            #[test]
            fn difference_is_linear(
                a in -3.0f64..3.0,
                b in -3.0f64..3.0,
                k0 in 0usize..=3,
                k1 in 0usize..=3,
                x in proptest::collection::vec(0.0f64..1.0, 2),
            ) {
                let f = |p: &[f64]| libm::exp(p[0] * p[1]);
                let g = |p: &[f64]| p[0] * p[0] * p[1] - libm::sin(p[1]);
                let h = |p: &[f64]| a * f(p) + b * g(p);
                let spec = DiffSpec::new(mi(&[k0, k1]), vec![0.125, 0.2]).unwrap();
                let lhs = delta_mixed(&h, &x, &spec).unwrap();
                let rhs = a * delta_mixed(&f, &x, &spec).unwrap() + b * delta_mixed(&g, &x, &spec).unwrap();
                let scale = (a.abs() + b.abs()) * libm::pow(2.0, (k0 + k1) as f64) * 8.0;
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
            }

            #[test]
            fn low_degree_polynomials_are_annihilated(
                c in proptest::collection::vec(-2.0f64..2.0, 4),
                x in proptest::collection::vec(0.0f64..1.0, 2),
                z0 in 0.01f64..0.5,
                z1 in 0.01f64..0.5,
            ) {
                // degree 1 in axis 0, degree 2 in axis 1
                let p = |v: &[f64]| c[0] + c[1] * v[0] + c[2] * v[1] * v[1] + c[3] * v[0] * v[1] * v[1];
                for k in [[2, 0], [0, 3], [2, 3], [3, 1]] {
                    let spec = DiffSpec::new(mi(&k), vec![z0, z1]).unwrap();
                    let v = delta_mixed(&p, &x, &spec).unwrap();
                    let scale = c.iter().map(|t| t.abs()).sum::<f64>() * 64.0;
                    prop_assert!(v.abs() <= 1e-12 * scale.max(1.0), "k={:?} v={}", k, v);
                }
            }
        }
    }
}
