//! Dense linear algebra used by the thresholding solvers.
//!
//! Matrices are small-to-moderate and dense, so everything here is written
//! directly over `Vec<f64>` without an external BLAS.

use crate::error::{check_len, invalid, Error, Result};

/// Row-major dense `m x n` matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        check_len("matrix data", rows * cols, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "matrix entry ({}, {}) is not finite",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for row in rows {
            check_len("matrix row", n, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(m, n, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Multiplies every entry by `factor`.
    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("mat_vec operand", self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn transpose_mat_vec(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("transpose_mat_vec operand", self.rows, r.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * ri;
            }
        }
        Ok(out)
    }

    /// `A x` for a vector given by its nonzero entries only.
    pub(crate) fn mat_vec_sparse(&self, x: &[f64]) -> Vec<f64> {
        let nz: Vec<(usize, f64)> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .collect();
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                nz.iter().map(|&(j, v)| row[j] * v).sum()
            })
            .collect()
    }

    /// Gram matrix `A_S^T A_S` of the selected columns, row-major `|S| x |S|`.
    pub fn gram_of_columns(&self, cols: &[usize]) -> Vec<f64> {
        let s = cols.len();
        let mut g = vec![0.0; s * s];
        for i in 0..self.rows {
            let row = self.row(i);
            for (a, &ca) in cols.iter().enumerate() {
                let va = row[ca];
                if va == 0.0 {
                    continue;
                }
                for (b, &cb) in cols.iter().enumerate().skip(a) {
                    g[a * s + b] += va * row[cb];
                }
            }
        }
        for a in 0..s {
            for b in 0..a {
                g[a * s + b] = g[b * s + a];
            }
        }
        g
    }
}

/// Sorted, duplicate-free set of column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds a support from arbitrary indices, sorting and removing duplicates.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = v.iter().find(|&&i| i >= n) {
            return Err(invalid(format!(
                "support index {bad} out of range for n = {n}"
            )));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self(v))
    }

    /// `supp(x) = { i : x_i != 0 }`.
    pub fn of(x: &[f64]) -> Self {
        Self(
            x.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        v.dedup();
        SupportSet(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

/// Value of the least-squares objective at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    /// `f(x) = 0.5 * ||y - A x||^2`
    pub value: f64,
    /// `||y - A x||_2`
    pub residual_norm: f64,
}

pub fn mat_vec(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    a.mat_vec(x)
}

pub fn transpose_mat_vec(a: &DenseMatrix, r: &[f64]) -> Result<Vec<f64>> {
    a.transpose_mat_vec(r)
}

pub fn objective(a: &DenseMatrix, y: &[f64], x: &[f64]) -> Result<Objective> {
    check_len("objective measurements", a.rows(), y.len())?;
    let r = residual(a, y, x)?;
    let sq = dot(&r, &r);
    Ok(Objective {
        value: 0.5 * sq,
        residual_norm: sq.sqrt(),
    })
}

/// `y - A x`.
pub fn residual(a: &DenseMatrix, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_len("residual measurements", a.rows(), y.len())?;
    check_len("residual iterate", a.cols(), x.len())?;
    let ax = a.mat_vec_sparse(x);
    Ok(y.iter().zip(&ax).map(|(yi, ai)| yi - ai).collect())
}

/// Minimizes `||y - A z||_2` over `z` with `supp(z) ⊆ support`.
///
/// The column submatrix is reduced by Householder QR with column pivoting.
/// When it is numerically rank deficient the trailing triangle is eliminated
/// with a second orthogonal factorization, which yields the minimum-norm
/// minimizer.
pub fn least_squares_on_support(
    a: &DenseMatrix,
    y: &[f64],
    support: &SupportSet,
) -> Result<Vec<f64>> {
    check_len("least squares measurements", a.rows(), y.len())?;
    if let Some(&last) = support.indices().last() {
        if last >= a.cols() {
            return Err(invalid(format!(
                "support index {last} out of range for n = {}",
                a.cols()
            )));
        }
    }
    let mut z = vec![0.0; a.cols()];
    if support.is_empty() {
        return Ok(z);
    }
    let cols: Vec<Vec<f64>> = support.iter().map(|j| a.column(j)).collect();
    let coef = min_norm_lstsq(cols, y.to_vec());
    for (j, c) in support.iter().zip(coef) {
        z[j] = c;
    }
    Ok(z)
}

/// Minimum-norm least squares for a column-major system (`cols[c][i]`).
fn min_norm_lstsq(mut cols: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let m = b.len();
    let s = cols.len();
    let mut perm: Vec<usize> = (0..s).collect();
    let max_norm = cols.iter().map(|c| norm2(c)).fold(0.0, f64::max);
    if max_norm == 0.0 {
        return vec![0.0; s];
    }
    let tol = f64::EPSILON * (m.max(s) as f64) * max_norm;

    let mut rank = 0;
    for j in 0..m.min(s) {
        let (p, alpha) = (j..s)
            .map(|c| (c, norm2(&cols[c][j..])))
            .fold(
                (j, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if alpha <= tol {
            break;
        }
        cols.swap(j, p);
        perm.swap(j, p);
        let (head, tail) = cols.split_at_mut(j + 1);
        let pivot = &mut head[j];
        if let Some((v, vnorm2)) = householder(&mut pivot[j..], alpha) {
            for col in tail.iter_mut() {
                reflect(&v, vnorm2, &mut col[j..]);
            }
            reflect(&v, vnorm2, &mut b[j..]);
        }
        rank += 1;
    }

    // R is rank x s, stored as cols[c][i] for i < rank.
    let mut z = vec![0.0; s];
    if rank == s {
        for i in (0..s).rev() {
            let mut acc = b[i];
            for c in i + 1..s {
                acc -= cols[c][i] * z[c];
            }
            z[i] = acc / cols[i][i];
        }
    } else if rank > 0 {
        // R1 = [R11 R12] has full row rank; factor R1^T = Q2 [R2; 0] so that
        // R1 = R2^T Q2^T and the minimum-norm solution is Q2 [R2^{-T} c; 0].
        let mut rt: Vec<Vec<f64>> = (0..rank)
            .map(|i| (0..s).map(|c| cols[c][i]).collect())
            .collect();
        let mut reflectors = Vec::with_capacity(rank);
        for j in 0..rank {
            let (head, tail) = rt.split_at_mut(j + 1);
            let col = &mut head[j];
            let alpha = norm2(&col[j..]);
            let h = householder(&mut col[j..], alpha);
            if let Some((v, vnorm2)) = &h {
                for other in tail.iter_mut() {
                    reflect(v, *vnorm2, &mut other[j..]);
                }
            }
            reflectors.push(h);
        }
        // forward substitution with R2^T (lower triangular)
        let mut t = vec![0.0; s];
        for i in 0..rank {
            let mut acc = b[i];
            for c in 0..i {
                acc -= rt[i][c] * t[c];
            }
            t[i] = acc / rt[i][i];
        }
        for (j, h) in reflectors.iter().enumerate().rev() {
            if let Some((v, vnorm2)) = h {
                reflect(v, *vnorm2, &mut t[j..]);
            }
        }
        z = t;
    }

    let mut out = vec![0.0; s];
    for (pos, &orig) in perm.iter().enumerate() {
        out[orig] = z[pos];
    }
    out
}

/// Turns `x` into `(beta, 0, ..., 0)` in place and returns the reflector.
fn householder(x: &mut [f64], alpha: f64) -> Option<(Vec<f64>, f64)> {
    if alpha == 0.0 {
        return None;
    }
    let beta = if x[0] >= 0.0 { -alpha } else { alpha };
    let mut v = x.to_vec();
    v[0] -= beta;
    let vnorm2 = dot(&v, &v);
    x[0] = beta;
    x[1..].iter_mut().for_each(|e| *e = 0.0);
    if vnorm2 == 0.0 {
        None
    } else {
        Some((v, vnorm2))
    }
}

fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let f = 2.0 * dot(v, x) / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}

/// Eigenvalues of a symmetric row-major `dim x dim` matrix by cyclic Jacobi
/// rotations, returned in ascending order.
pub fn symmetric_eigenvalues(mat: &[f64], dim: usize) -> Vec<f64> {
    assert_eq!(
        mat.len(),
        dim * dim,
        "matrix storage does not match dimension"
    );
    let mut a = mat.to_vec();
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; dim];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j] * a[i * dim + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - sn * akq;
                    a[k * dim + q] = sn * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - sn * aqk;
                    a[q * dim + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Estimates the largest eigenvalue of a symmetric positive semidefinite
/// operator by power iteration (at most 100 steps, relative change 1e-6).
///
/// The estimate never exceeds the true value by more than rounding; callers
/// that need an upper bound apply their own safety factor.
pub fn power_iteration(dim: usize, mut apply: impl FnMut(&[f64], &mut [f64])) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut w = vec![0.0; dim];
    let mut estimate = 0.0;
    for _ in 0..100 {
        apply(&v, &mut w);
        let norm = norm2(&w);
        if norm == 0.0 {
            return 0.0;
        }
        let prev = estimate;
        estimate = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if (estimate - prev).abs() <= 1e-6 * estimate {
            break;
        }
    }
    estimate
}

/// Largest eigenvalue of `A^T A` by power iteration.
pub fn spectral_norm_squared(a: &DenseMatrix) -> f64 {
    let mut tmp = vec![0.0; a.rows()];
    power_iteration(a.cols(), |v, out| {
        for (i, t) in tmp.iter_mut().enumerate() {
            *t = dot(a.row(i), v);
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &t) in tmp.iter().enumerate() {
            for (o, &aij) in out.iter_mut().zip(a.row(i)) {
                *o += aij * t;
            }
        }
    })
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn nnz(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

pub(crate) fn ensure_finite(context: &'static str, v: &[f64]) -> Result<()> {
    match v.iter().position(|e| !e.is_finite()) {
        None => Ok(()),
        Some(i) => Err(Error::InvalidArgument(format!(
            "{context}: entry {i} is not finite"
        ))),
    }
}
