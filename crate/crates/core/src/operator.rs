//! Compressed sparse row complex matrices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Result, SimError};
use crate::scalar::{Real, C};

/// Square sparse complex matrix in CSR layout. Explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal((0..dim).map(|_| C::new(T::one(), T::zero())))
    }

    pub fn from_diagonal<I: IntoIterator<Item = C<T>>>(diag: I) -> Self {
        let diag: Vec<_> = diag.into_iter().collect();
        let dim = diag.len();
        Self::from_triplets(dim, diag.into_iter().enumerate().map(|(i, v)| (i, i, v)))
    }

    /// Builds from (row, col, value) entries; duplicates are summed and
    /// resulting zeros dropped.
    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, C<T>)>>(dim: usize, entries: I) -> Self {
        let mut rows: Vec<BTreeMap<usize, C<T>>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in entries {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside {dim}x{dim}");
            let e = rows[r].entry(c).or_insert_with(C::zero);
            *e = *e + v;
        }
        let mut m = Self::zeros(dim);
        for (r, row) in rows.into_iter().enumerate() {
            for (c, v) in row {
                if !v.is_zero() {
                    m.cols.push(c);
                    m.vals.push(v);
                }
            }
            m.row_ptr[r + 1] = m.cols.len();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C<T>)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C<T>)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.row(r).find(|&(cc, _)| cc == c).map(|(_, v)| v).unwrap_or_else(C::zero)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (r, c, v * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C::new(-T::one(), T::zero())))
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = (0..self.dim).flat_map(|r| {
            self.row(r)
                .flat_map(move |(k, a)| other.row(k).map(move |(c, b)| (r, c, a * b)))
                .collect::<Vec<_>>()
        });
        Self::from_triplets(self.dim, entries)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C<T>]) -> Result<Vec<C<T>>> {
        if x.len() != self.dim {
            return Err(SimError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut y = vec![C::zero(); self.dim];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without allocation; lengths must equal `dim`.
    pub fn apply_into(&self, x: &[C<T>], y: &mut [C<T>]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = C::zero();
            for (c, v) in self.row(r) {
                acc = acc + v * x[c];
            }
            *yr = acc;
        }
    }

    /// ⟨x|A|y⟩ (unnormalized).
    pub fn sandwich(&self, x: &[C<T>], y: &[C<T>]) -> C<T> {
        let mut acc = C::zero();
        for r in 0..self.dim {
            let mut row = C::zero();
            for (c, v) in self.row(r) {
                row = row + v * y[c];
            }
            acc = acc + x[r].conj() * row;
        }
        acc
    }

    /// Largest entry modulus of `A − A†`.
    pub fn hermiticity_defect(&self) -> T {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self.get(i, i)).fold(C::zero(), |a, b| a + b)
    }

    pub fn to_dense(&self) -> Vec<Vec<C<T>>> {
        let mut d = vec![vec![C::zero(); self.dim]; self.dim];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Coordinate-list dump, one `row col re im` line per stored entry.
    pub fn to_coo_text(&self) -> String {
        let mut s = String::new();
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {:e} {:e}", v.re, v.im);
        }
        s
    }
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (ascending) and the matching column eigenvectors.
pub fn symmetric_eigen<T: Real>(a: &[Vec<T>]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let two = T::one() + T::one();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: T = (0..n).map(|i| m[i][i] * m[i][i]).sum::<T>() + off;
        if off <= T::epsilon() * T::epsilon() * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (two * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// Whether the Hermitian matrix `rho + shift·I` (dense, row-major `dim×dim`)
/// admits a Cholesky factorization, i.e. has no eigenvalue below `-shift`.
pub fn is_positive_with_shift<T: Real>(rho: &[C<T>], dim: usize, shift: T) -> bool {
    let mut l = vec![C::<T>::zero(); dim * dim];
    for j in 0..dim {
        let mut d = rho[j * dim + j].re + shift;
        for k in 0..j {
            d = d - l[j * dim + k].norm_sqr();
        }
        if !(d > T::zero()) {
            return false;
        }
        let djj = d.sqrt();
        l[j * dim + j] = C::new(djj, T::zero());
        for i in (j + 1)..dim {
            let mut s = rho[i * dim + j];
            for k in 0..j {
                s = s - l[i * dim + k] * l[j * dim + k].conj();
            }
            l[i * dim + j] = s / djj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = OperatorMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0)), (1, 0, c(0.0, 2.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), c(0.0, 2.0));
        assert_eq!(m.adjoint().get(0, 1), c(0.0, -2.0));
    }

    #[test]
    fn product_and_commutator() {
        let x = OperatorMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
        let z = OperatorMatrix::from_triplets(2, [(0, 0, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))]);
        assert_eq!(x.matmul(&x), OperatorMatrix::identity(2));
        let comm = z.commutator(&x);
        assert_eq!(comm.get(0, 1), c(2.0, 0.0));
        assert_eq!(comm.get(1, 0), c(-2.0, 0.0));
        assert!(comm.to_coo_text().lines().count() == 2);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]];
        let (vals, vecs) = symmetric_eigen(&a);
        let s2 = 2f64.sqrt();
        for (v, e) in vals.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((v - e).abs() < 1e-13);
        }
        for (k, vec) in vecs.iter().enumerate() {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i][j] * vec[j]).sum();
                assert!((av - vals[k] * vec[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_positivity() {
        let rho = vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)];
        assert!(is_positive_with_shift(&rho, 2, 1e-8));
        let bad = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1e-6, 0.0)];
        assert!(!is_positive_with_shift(&bad, 2, 1e-8));
        assert!(is_positive_with_shift(&bad, 2, 1e-5));
    }
}
