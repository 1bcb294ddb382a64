//! Multi-indices, cube/simplex lattices and log-space combinatorial
//! coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use crate::error::{Error, Result};

/// A `d`-tuple of non-negative integers. Used both for lattice points `j`
/// and for derivative orders `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::precondition("multi-index dimension must be at least 1"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "multi-index dimension must be at least 1");
        MultiIndex(vec![0; dim])
    }

    /// The multi-index with a single `1` on `axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.0[axis] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|j| = j_1 + … + j_d`.
    pub fn modulus(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl Index<usize> for MultiIndex {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl TryFrom<&[usize]> for MultiIndex {
    type Error = Error;

    fn try_from(s: &[usize]) -> Result<Self> {
        MultiIndex::new(s.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// `|j|`.
pub fn modulus(j: &MultiIndex) -> usize {
    j.modulus()
}

/// Which constraint defines a lattice of degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// Every entry in `0..=n`.
    Cube,
    /// Entries non-negative with `|j| <= n`.
    Simplex,
}

/// Table of `ln k!` for `k <= max_n`, built once and then read-only.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn new(max_n: usize) -> Self {
        let mut table = Vec::with_capacity(max_n + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=max_n {
            acc += libm::log(k as f64);
            table.push(acc);
        }
        LogFactorials { table }
    }

    pub fn max_n(&self) -> usize {
        self.table.len() - 1
    }

    /// `ln k!`. Panics if `k` exceeds the table.
    #[inline]
    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln( n! / (j_1! … j_d! (n-|j|)!) )`.
    pub fn log_multinomial(&self, n: usize, j: &[usize]) -> Result<f64> {
        let m: usize = j.iter().sum();
        if m > n {
            return Err(Error::precondition(alloc::format!(
                "multinomial needs |j| <= n, got |j| = {m}, n = {n}"
            )));
        }
        if n > self.max_n() {
            return Err(Error::precondition(alloc::format!(
                "log-factorial table holds n <= {}, asked for {n}",
                self.max_n()
            )));
        }
        let denom: f64 = j.iter().map(|&e| self.table[e]).sum::<f64>() + self.table[n - m];
        Ok(self.table[n] - denom)
    }

    /// `ln C(n, j)`.
    pub fn log_binomial(&self, n: usize, j: usize) -> Result<f64> {
        self.log_multinomial(n, &[j])
    }
}

/// `ln` of the multinomial coefficient `n choose j`.
pub fn log_multinomial(n: usize, j: &MultiIndex) -> Result<f64> {
    LogFactorials::new(n).log_multinomial(n, j.as_slice())
}

/// `ln C(n, j)`.
pub fn log_binomial(n: usize, j: usize) -> Result<f64> {
    LogFactorials::new(n).log_binomial(n, j)
}

/// Exact `C(n, k)`; saturates at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A lattice of multi-indices: the first `simplex_dims` entries are bound by
/// a shared modulus constraint `<= simplex_degree`, each remaining entry `i`
/// by its own bound `<= cube_degrees[i]`.
///
/// Pure cube and pure simplex lattices are the two degenerate cases; the
/// reduced lattices of the derivative formulas use per-axis cube degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    simplex_dims: usize,
    simplex_degree: usize,
    cube_degrees: Vec<usize>,
}

impl Lattice {
    pub fn new(simplex_dims: usize, simplex_degree: usize, cube_degrees: Vec<usize>) -> Self {
        assert!(
            simplex_dims + cube_degrees.len() >= 1,
            "lattice dimension must be at least 1"
        );
        Lattice {
            simplex_dims,
            simplex_degree,
            cube_degrees,
        }
    }

    pub fn of_kind(kind: LatticeKind, n: usize, d: usize) -> Self {
        match kind {
            LatticeKind::Cube => Lattice::new(0, 0, vec![n; d]),
            LatticeKind::Simplex => Lattice::new(d, n, Vec::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.simplex_dims + self.cube_degrees.len()
    }

    pub fn simplex_dims(&self) -> usize {
        self.simplex_dims
    }

    pub fn simplex_degree(&self) -> usize {
        self.simplex_degree
    }

    pub fn cube_degrees(&self) -> &[usize] {
        &self.cube_degrees
    }

    /// Number of points in the simplex block alone.
    pub fn simplex_len(&self) -> usize {
        binomial(self.simplex_degree + self.simplex_dims, self.simplex_dims) as usize
    }

    pub fn len(&self) -> usize {
        self.cube_degrees
            .iter()
            .fold(self.simplex_len(), |acc, &m| acc * (m + 1))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: &[usize]) -> bool {
        if j.len() != self.dim() {
            return false;
        }
        let (s, c) = j.split_at(self.simplex_dims);
        s.iter().sum::<usize>() <= self.simplex_degree
            && c.iter().zip(&self.cube_degrees).all(|(&e, &m)| e <= m)
    }

    /// Position of `j` in lexicographic order, or `None` if `j` is not a
    /// lattice point.
    pub fn rank(&self, j: &[usize]) -> Option<usize> {
        if !self.contains(j) {
            return None;
        }
        let (s, c) = j.split_at(self.simplex_dims);
        let mut rank = 0usize;
        let mut remaining = self.simplex_degree;
        for (i, &ji) in s.iter().enumerate() {
            let rest = self.simplex_dims - i - 1;
            for v in 0..ji {
                rank += binomial(remaining - v + rest, rest) as usize;
            }
            remaining -= ji;
        }
        for (&ji, &m) in c.iter().zip(&self.cube_degrees) {
            rank = rank * (m + 1) + ji;
        }
        Some(rank)
    }

    /// All lattice points in lexicographic order.
    pub fn iter(&self) -> LatticeIter<'_> {
        LatticeIter {
            lattice: self,
            current: Some(vec![0; self.dim()]),
        }
    }
}

/// Lexicographic odometer over a [`Lattice`].
pub struct LatticeIter<'a> {
    lattice: &'a Lattice,
    current: Option<Vec<usize>>,
}

impl LatticeIter<'_> {
    fn advance(&self, cur: &mut [usize]) -> bool {
        let l = self.lattice;
        for axis in (0..cur.len()).rev() {
            let room = if axis < l.simplex_dims {
                // entries after `axis` are reset, so only the prefix counts
                cur[..=axis].iter().sum::<usize>() < l.simplex_degree
            } else {
                cur[axis] < l.cube_degrees[axis - l.simplex_dims]
            };
            if room {
                cur[axis] += 1;
                for e in &mut cur[axis + 1..] {
                    *e = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for LatticeIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let mut cur = self.current.take()?;
        let out = cur.clone();
        if self.advance(&mut cur) {
            self.current = Some(cur);
        }
        Some(out)
    }
}

/// Every admissible multi-index of the `kind` lattice of degree `n` in
/// dimension `d`, in lexicographic order.
pub fn enumerate_lattice(kind: LatticeKind, n: usize, d: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::precondition("lattice dimension must be at least 1"));
    }
    Ok(Lattice::of_kind(kind, n, d).iter().map(MultiIndex).collect())
}
