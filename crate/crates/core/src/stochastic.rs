//! Binomial and multinomial samplers and Monte Carlo estimators of the
//! probabilistic representations
//!
//! ```text
//! B̃_n(f; x) = E f(ξ_n(x)/n),   ξ_n(x) ~ Bin(n, x_1) ⊗ … ⊗ Bin(n, x_d)
//! B_n(f; x) = E f(η_n(x)/n),   η_n(x) = first d counts of Mult(n; x, 1-‖x‖)
//! ```
//!
//! and of their derivative analogues, where the trial count drops to
//! `n - k_i` per cube axis or `n - |k|` on the simplex.
//!
//! Randomness comes from xoshiro256** seeded through SplitMix64; every
//! estimator derives its own stream from `(seed, operation tag)`.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::bernstein::basis::{binomial_pmf, conditional_probabilities};
use crate::bernstein::{order_exceeds_degree, DerivScale};
use crate::domain::{Domain, EvalPoint};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::finite_diff::{lattice_delta, lattice_point, Stencil};
use crate::multiindex::{LogFactorials, MultiIndex};

/// Relative gap below which an estimate and its reference are treated as
/// equal when forming a z-score; covers floating-point noise in estimators
/// whose per-draw values are constant in exact arithmetic.
pub const ROUNDOFF_AGREEMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

/// Tags separating the streams of different operations.
pub mod tags {
    pub const BINOMIAL_VECTOR: u64 = 1;
    pub const MULTINOMIAL_PROJECTION: u64 = 2;
    pub const MC_EVAL: u64 = 3;
    pub const MC_DERIV: u64 = 4;
    pub const LLN: u64 = 5;
}

/// A deterministic stream of uniforms.
#[derive(Debug, Clone)]
pub struct SeedStream {
    rng: Xoshiro256StarStar,
}

impl SeedStream {
    /// Stream for `(seed, tag)`.
    pub fn derive(seed: RngSeed, tag: u64) -> Self {
        let mixed = seed.0 ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        SeedStream {
            rng: Xoshiro256StarStar::seed_from_u64(mixed),
        }
    }

    /// Stream for shard `shard` of `(seed, tag)`: the base stream advanced by
    /// `shard` jumps of 2^128 draws, so shards never overlap.
    pub fn shard(seed: RngSeed, tag: u64, shard: u64) -> Self {
        let mut s = Self::derive(seed, tag);
        for _ in 0..shard {
            s.rng.jump();
        }
        s
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inversion sampler for `Bin(m, p)` over a precomputed cumulative table.
#[derive(Debug, Clone)]
pub struct BinomialSampler {
    cdf: Vec<f64>,
}

impl BinomialSampler {
    fn with_table(lf: &LogFactorials, m: usize, p: f64, q: f64) -> Self {
        let mut pmf = Vec::new();
        binomial_pmf(lf, m, p, q, &mut pmf);
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        BinomialSampler { cdf }
    }

    pub fn new(m: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::precondition(alloc::format!(
                "binomial probability must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self::with_table(&LogFactorials::new(m), m, p, 1.0 - p))
    }

    pub fn trials(&self) -> usize {
        self.cdf.len() - 1
    }

    pub fn sample(&self, rng: &mut SeedStream) -> usize {
        let u = rng.uniform();
        self.cdf.partition_point(|&c| c <= u).min(self.trials())
    }
}

/// Draws the random lattice vector whose law turns the Bernstein sum of a
/// domain into an expectation: independent binomials on cube axes and the
/// first counts of a multinomial (sequential conditional binomials) on the
/// simplex block.
#[derive(Debug, Clone)]
pub struct LatticeSampler {
    simplex: Vec<Vec<BinomialSampler>>,
    cube: Vec<BinomialSampler>,
}

impl LatticeSampler {
    /// `simplex_trials` for the simplex block, `cube_trials[i]` for each cube
    /// axis; `x` must be a validated point of `domain`.
    pub fn new(x: &EvalPoint, simplex_trials: usize, cube_trials: &[usize]) -> Self {
        let d = x.dim();
        let s = x.domain().simplex_dims(d);
        let max_trials = cube_trials.iter().copied().chain([simplex_trials]).max().unwrap_or(0);
        let lf = LogFactorials::new(max_trials);
        let probs = conditional_probabilities(&x.coords()[..s]);
        let simplex = probs
            .iter()
            .enumerate()
            .map(|(axis, &(p, q))| {
                // the first axis always sees every trial
                let rows = if axis == 0 {
                    simplex_trials..=simplex_trials
                } else {
                    0..=simplex_trials
                };
                rows.map(|r| BinomialSampler::with_table(&lf, r, p, q)).collect()
            })
            .collect();
        let cube = cube_trials
            .iter()
            .zip(&x.coords()[s..])
            .map(|(&m, &xi)| BinomialSampler::with_table(&lf, m, xi, 1.0 - xi))
            .collect();
        LatticeSampler { simplex, cube }
    }

    pub fn dim(&self) -> usize {
        self.simplex.len() + self.cube.len()
    }

    pub fn sample_into(&self, rng: &mut SeedStream, out: &mut [usize]) {
        let s = self.simplex.len();
        let mut remaining = self.simplex.first().map_or(0, |t| t[0].trials());
        for (axis, tables) in self.simplex.iter().enumerate() {
            let sampler = if axis == 0 { &tables[0] } else { &tables[remaining] };
            let j = sampler.sample(rng);
            out[axis] = j;
            remaining -= j;
        }
        for (i, sampler) in self.cube.iter().enumerate() {
            out[s + i] = sampler.sample(rng);
        }
    }
}

fn checked_point(domain: Domain, x: &[f64]) -> Result<EvalPoint> {
    domain.point(x)
}

/// One draw of `ξ_n(x)`: independent `Bin(n, x_i)` components.
pub fn sample_binomial_vector(n: usize, x: &[f64], rng: &mut SeedStream) -> Result<MultiIndex> {
    let p = checked_point(Domain::Cube, x)?;
    let sampler = LatticeSampler::new(&p, 0, &vec![n; x.len()]);
    let mut out = vec![0; x.len()];
    sampler.sample_into(rng, &mut out);
    MultiIndex::new(out)
}

/// One draw of `η_n(x)`: the first `d` counts of `n` trials over `d + 1`
/// categories with probabilities `(x_1, …, x_d, 1 - ‖x‖)`.
pub fn sample_multinomial_projection(
    n: usize,
    x: &[f64],
    rng: &mut SeedStream,
) -> Result<MultiIndex> {
    let p = checked_point(Domain::Simplex, x)?;
    let sampler = LatticeSampler::new(&p, n, &[]);
    let mut out = vec![0; x.len()];
    sampler.sample_into(rng, &mut out);
    MultiIndex::new(out)
}

/// Result of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub estimate: f64,
    /// Sample standard deviation divided by `√samples`.
    pub std_error: f64,
    pub samples: usize,
    pub reference: Option<f64>,
}

impl McReport {
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self
    }

    /// `(estimate - reference) / std_error`, or `0` when the two agree to
    /// within [`ROUNDOFF_AGREEMENT`]. `None` without a reference.
    pub fn z_score(&self) -> Option<f64> {
        let r = self.reference?;
        let gap = self.estimate - r;
        if gap.abs() <= ROUNDOFF_AGREEMENT * r.abs().max(1.0) {
            return Some(0.0);
        }
        Some(gap / self.std_error)
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn report(&self) -> McReport {
        let var = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        } else {
            0.0
        };
        McReport {
            estimate: self.mean,
            std_error: libm::sqrt(var / self.count as f64),
            samples: self.count,
            reference: None,
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::precondition("Monte Carlo needs at least 2 samples"));
    }
    Ok(())
}

/// Monte Carlo estimate of the degree-`n` Bernstein polynomial of `f` at `x`
/// as `E f(vector/n)`.
pub fn mc_eval<F: ScalarField + ?Sized>(
    domain: Domain,
    f: &F,
    n: usize,
    x: &[f64],
    samples: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_samples(samples)?;
    if n == 0 {
        return Err(Error::precondition("degree n must be positive"));
    }
    let p = domain.point(x)?;
    let d = x.len();
    let s = domain.simplex_dims(d);
    let sampler = LatticeSampler::new(&p, if s > 0 { n } else { 0 }, &vec![n; d - s]);
    let mut rng = SeedStream::derive(seed, tags::MC_EVAL);
    let mut j = vec![0; d];
    let mut m = Moments::default();
    for _ in 0..samples {
        sampler.sample_into(&mut rng, &mut j);
        m.push(f.eval_checked(&lattice_point(&j, n))?);
    }
    Ok(m.report())
}

/// Monte Carlo estimate of `∂^k` of the degree-`n` Bernstein polynomial as
/// the expectation of the scaled difference `prefactor · Δ^k f(vector/n)`,
/// with `n - k_i` trials per cube axis and `n - |k_S|` on the simplex block.
pub fn mc_deriv<F: ScalarField + ?Sized>(
    domain: Domain,
    f: &F,
    k: &MultiIndex,
    n: usize,
    x: &[f64],
    samples: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_samples(samples)?;
    if n == 0 {
        return Err(Error::precondition("degree n must be positive"));
    }
    if k.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            actual: x.len(),
        });
    }
    let p = domain.point(x)?;
    if order_exceeds_degree(domain, n, k) {
        return Ok(McReport {
            estimate: 0.0,
            std_error: 0.0,
            samples,
            reference: None,
        });
    }
    let d = x.len();
    let s = domain.simplex_dims(d);
    let ks: usize = k.as_slice()[..s].iter().sum();
    let cube_trials: Vec<usize> = k.as_slice()[s..].iter().map(|&ki| n - ki).collect();
    let sampler = LatticeSampler::new(&p, if s > 0 { n - ks } else { 0 }, &cube_trials);
    let stencil = Stencil::new(k.as_slice());
    let scale = DerivScale::new(domain, n, k);
    let mut rng = SeedStream::derive(seed, tags::MC_DERIV);
    let mut j = vec![0; d];
    let mut m = Moments::default();
    for _ in 0..samples {
        sampler.sample_into(&mut rng, &mut j);
        m.push(scale.apply(lattice_delta(f, &stencil, &j, n)?));
    }
    Ok(m.report())
}

/// Mean ℓ¹ distance between `vector/n` and `x` for each `n`: the law of
/// large numbers for the sampling vectors of `domain`.
pub fn lln_diagnostic(
    domain: Domain,
    n_list: &[usize],
    x: &[f64],
    samples: usize,
    seed: RngSeed,
) -> Result<Vec<(usize, f64)>> {
    let p = domain.point(x)?;
    let d = x.len();
    let s = domain.simplex_dims(d);
    let mut rng = SeedStream::derive(seed, tags::LLN);
    let mut j = vec![0; d];
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::precondition("degree n must be positive"));
            }
            let sampler = LatticeSampler::new(&p, if s > 0 { n } else { 0 }, &vec![n; d - s]);
            let mut total = 0.0;
            for _ in 0..samples {
                sampler.sample_into(&mut rng, &mut j);
                total += j
                    .iter()
                    .zip(p.coords())
                    .map(|(&c, &xi)| (c as f64 / n as f64 - xi).abs())
                    .sum::<f64>();
            }
            Ok((n, total / samples.max(1) as f64))
        })
        .collect()
}
