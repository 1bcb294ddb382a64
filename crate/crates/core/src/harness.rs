//! Test-function corpus, evaluation grids and convergence tables.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bernstein::{BernsteinModel, DerivativeModel};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::multiindex::MultiIndex;

/// Highest `|k|` with a registered analytic partial in the built-in corpus.
pub const CORPUS_SMOOTHNESS: usize = 4;

/// Slopes of the `affine` corpus member, cycled over the axes.
pub const AFFINE_SLOPES: [f64; 4] = [0.75, -1.25, 0.5, 2.0];
/// Constant term of the `affine` corpus member.
pub const AFFINE_OFFSET: f64 = 0.3;

/// Errors below this are treated as exact reproduction and carry no rate.
pub const RATE_FLOOR: f64 = 1e-13;

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PartialFn = Box<dyn Fn(&[usize], &[f64]) -> f64 + Send + Sync>;

/// A test function with analytic mixed partials for `|k| <= smoothness`.
pub struct FunctionSpec {
    name: String,
    dim: usize,
    smoothness: usize,
    value: ValueFn,
    partial: PartialFn,
}

impl core::fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("smoothness", &self.smoothness)
            .finish_non_exhaustive()
    }
}

impl FunctionSpec {
    /// `partial(k, x)` must return `∂^k f(x)`, and `partial(0, x)` must equal
    /// `value(x)`.
    pub fn new<V, P>(name: impl Into<String>, dim: usize, smoothness: usize, value: V, partial: P) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        P: Fn(&[usize], &[f64]) -> f64 + Send + Sync + 'static,
    {
        FunctionSpec {
            name: name.into(),
            dim,
            smoothness,
            value: Box::new(value),
            partial: Box::new(partial),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    /// The analytic `∂^k f` as a field.
    pub fn partial(&self, k: &MultiIndex) -> Result<Partial<'_>> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: k.dim(),
            });
        }
        if k.modulus() > self.smoothness {
            return Err(Error::MissingPartial(k.clone()));
        }
        Ok(Partial { spec: self, k: k.clone() })
    }
}

impl ScalarField for FunctionSpec {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok((self.value)(x))
    }
}

/// A registered analytic partial of a [`FunctionSpec`].
pub struct Partial<'a> {
    spec: &'a FunctionSpec,
    k: MultiIndex,
}

impl ScalarField for Partial<'_> {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok((self.spec.partial)(self.k.as_slice(), x))
    }
}

/// `d^k/dx^k sin(πx)` or `cos(πx)`.
fn trig_derivative(is_sin: bool, k: usize, x: f64) -> f64 {
    let scale = libm::pow(PI, k as f64);
    let phase = PI * x;
    let v = match (is_sin, k % 4) {
        (true, 0) | (false, 3) => libm::sin(phase),
        (true, 1) | (false, 0) => libm::cos(phase),
        (true, 2) | (false, 1) => -libm::sin(phase),
        _ => -libm::cos(phase),
    };
    scale * v
}

/// The built-in corpus in dimension `dim`: `const1`, `affine`, `quad`,
/// `prodlin`, `sincos` and `expsum`.
pub fn builtin_corpus(dim: usize) -> Vec<FunctionSpec> {
    let s = CORPUS_SMOOTHNESS;
    let d = dim;
    vec![
        FunctionSpec::new(
            "const1",
            d,
            s,
            |_| 1.0,
            |k, _| if k.iter().all(|&e| e == 0) { 1.0 } else { 0.0 },
        ),
        FunctionSpec::new(
            "affine",
            d,
            s,
            |x| {
                AFFINE_OFFSET
                    + x.iter()
                        .enumerate()
                        .map(|(i, xi)| AFFINE_SLOPES[i % 4] * xi)
                        .sum::<f64>()
            },
            |k, x| match k.iter().sum::<usize>() {
                0 => {
                    AFFINE_OFFSET
                        + x.iter()
                            .enumerate()
                            .map(|(i, xi)| AFFINE_SLOPES[i % 4] * xi)
                            .sum::<f64>()
                }
                1 => AFFINE_SLOPES[k.iter().position(|&e| e == 1).unwrap() % 4],
                _ => 0.0,
            },
        ),
        FunctionSpec::new(
            "quad",
            d,
            s,
            |x| x.iter().map(|v| v * v).sum(),
            |k, x| {
                let active: Vec<usize> = (0..k.len()).filter(|&i| k[i] > 0).collect();
                match active.as_slice() {
                    [] => x.iter().map(|v| v * v).sum(),
                    [i] => match k[*i] {
                        1 => 2.0 * x[*i],
                        2 => 2.0,
                        _ => 0.0,
                    },
                    _ => 0.0,
                }
            },
        ),
        FunctionSpec::new(
            "prodlin",
            d,
            s,
            |x| x.iter().product(),
            |k, x| {
                if k.iter().any(|&e| e >= 2) {
                    return 0.0;
                }
                x.iter()
                    .zip(k)
                    .filter(|(_, &e)| e == 0)
                    .map(|(v, _)| v)
                    .product()
            },
        ),
        FunctionSpec::new(
            "sincos",
            d,
            s,
            |x| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| trig_derivative(i % 2 == 0, 0, v))
                    .product()
            },
            |k, x| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| trig_derivative(i % 2 == 0, k[i], v))
                    .product()
            },
        ),
        FunctionSpec::new(
            "expsum",
            d,
            s,
            move |x| libm::exp(x.iter().sum::<f64>() / d as f64),
            move |k, x| {
                let order = k.iter().sum::<usize>() as f64;
                libm::pow(d as f64, -order) * libm::exp(x.iter().sum::<f64>() / d as f64)
            },
        ),
    ]
}

/// Names of the built-in corpus members, in corpus order.
pub const CORPUS_NAMES: [&str; 6] = ["const1", "affine", "quad", "prodlin", "sincos", "expsum"];

/// Looks up a corpus member by name.
pub fn corpus_function(name: &str, dim: usize) -> Option<FunctionSpec> {
    builtin_corpus(dim).into_iter().find(|f| f.name() == name)
}

/// A deterministic evaluation grid: `points_per_axis` uniformly spaced
/// coordinates on `[inset, 1 - inset]` per axis; simplex blocks keep only
/// points with `‖x‖ <= 1 - inset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    domain: Domain,
    points_per_axis: usize,
    inset: f64,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 33;

    pub fn new(domain: Domain, points_per_axis: usize, inset: f64) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::precondition("grid needs at least 2 points per axis"));
        }
        if !(0.0..0.5).contains(&inset) {
            return Err(Error::precondition("grid inset must lie in [0, 0.5)"));
        }
        Ok(GridSpec {
            domain,
            points_per_axis,
            inset,
        })
    }

    pub fn with_defaults(domain: Domain) -> Self {
        GridSpec {
            domain,
            points_per_axis: Self::DEFAULT_POINTS,
            inset: 0.0,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn inset(&self) -> f64 {
        self.inset
    }

    pub fn axis(&self) -> Vec<f64> {
        let p = self.points_per_axis;
        let span = 1.0 - 2.0 * self.inset;
        (0..p)
            .map(|i| self.inset + span * i as f64 / (p - 1) as f64)
            .collect()
    }

    /// Grid points in dimension `d`, lexicographic in the axis indices.
    pub fn points(&self, d: usize) -> Vec<Vec<f64>> {
        let axis = self.axis();
        let s = self.domain.simplex_dims(d);
        let limit = 1.0 - self.inset + crate::DOMAIN_CLAMP_TOL;
        crate::multiindex::Lattice::new(0, 0, vec![self.points_per_axis - 1; d])
            .iter()
            .map(|idx| idx.iter().map(|&i| axis[i]).collect::<Vec<f64>>())
            .filter(|x| x[..s].iter().sum::<f64>() <= limit)
            .collect()
    }
}

/// `max |∂^k B_n(f)(x) - ∂^k f(x)|` over the grid (`k = 0` compares values).
pub fn sup_error(
    domain: Domain,
    spec: &FunctionSpec,
    k: &MultiIndex,
    n: usize,
    grid: &GridSpec,
) -> Result<f64> {
    if grid.domain() != domain {
        return Err(Error::precondition(alloc::format!(
            "grid domain {} does not match model domain {}",
            grid.domain(),
            domain
        )));
    }
    let exact = spec.partial(k)?;
    let model = BernsteinModel::build(spec, domain, n, spec.dim())?;
    let deriv = DerivativeModel::from_model(&model, k)?;
    let d = spec.dim();
    let mut worst: f64 = 0.0;
    if domain == Domain::Cube {
        let axes = vec![grid.axis(); d];
        let values = deriv.eval_tensor_grid(&axes)?;
        for (x, v) in grid.points(d).iter().zip(values) {
            worst = worst.max((v - exact.eval(x)?).abs());
        }
    } else {
        for x in grid.points(d) {
            let v = deriv.eval(&x)?;
            worst = worst.max((v - exact.eval(&x)?).abs());
        }
    }
    Ok(worst)
}

/// Sup-grid errors along a sequence of degrees, with a fitted log-log rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub function: String,
    pub domain: Domain,
    pub k: MultiIndex,
    /// `(n, sup_error)`, ascending in `n`.
    pub rows: Vec<(usize, f64)>,
    /// Least-squares slope of `ln sup_error` against `ln n`; `None` when
    /// fewer than two rows lie above [`RATE_FLOOR`].
    pub fitted_rate: Option<f64>,
}

impl ConvergenceReport {
    /// Whether errors never increase along the table, treating values below
    /// `floor` as equal.
    pub fn is_non_increasing(&self, floor: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 || w[1].1 <= floor)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Least-squares slope of `ln e` against `ln n`, omitting `e < RATE_FLOOR`.
pub fn fit_log_log_rate(rows: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, e)| *e >= RATE_FLOOR)
        .map(|&(n, e)| (libm::log(n as f64), libm::log(e)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Smallest degree for which `∂^k` of the degree-`n` polynomial is not
/// identically zero, plus one.
fn min_degree(domain: Domain, k: &MultiIndex) -> usize {
    let s = domain.simplex_dims(k.dim());
    let ks: usize = k.as_slice()[..s].iter().sum();
    let kc = k.as_slice()[s..].iter().copied().max().unwrap_or(0);
    ks.max(kc) + 1
}

pub fn convergence_table(
    domain: Domain,
    spec: &FunctionSpec,
    k: &MultiIndex,
    n_list: &[usize],
    grid: &GridSpec,
) -> Result<ConvergenceReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::precondition("n list must be non-empty and strictly increasing"));
    }
    let min_n = min_degree(domain, k);
    if n_list[0] < min_n {
        return Err(Error::precondition(alloc::format!(
            "every n must be at least {min_n} for order {k}"
        )));
    }
    let rows = n_list
        .iter()
        .map(|&n| Ok((n, sup_error(domain, spec, k, n, grid)?)))
        .collect::<Result<Vec<_>>>()?;
    let fitted_rate = fit_log_log_rate(&rows);
    Ok(ConvergenceReport {
        function: spec.name().to_string(),
        domain,
        k: k.clone(),
        rows,
        fitted_rate,
    })
}
