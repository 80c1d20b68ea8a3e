//! Dense matrices, Kronecker products and a Hermitian eigensolver.
//!
//! Everything here is generic over [`Scalar`], which covers `f32`, `f64` and
//! their complex counterparts. The rest of the crate works with
//! [`crate::CMat`] (complex double precision).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, Num, NumCast, One, Zero};

use crate::error::{QglError, Result};

/// Field of matrix entries: a real float or a complex number over one.
pub trait Scalar:
    Copy + Num + Neg<Output = Self> + fmt::Debug + PartialEq + Send + Sync + 'static
{
    type Real: Float + fmt::Debug + Send + Sync + 'static;

    fn conj(self) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn norm_sqr(self) -> Self::Real;

    fn abs(self) -> Self::Real {
        self.norm_sqr().sqrt()
    }

    fn scale(self, r: Self::Real) -> Self {
        self * Self::from_real(r)
    }

    fn is_finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }

    fn real_from_f64(x: f64) -> Self::Real {
        <Self::Real as NumCast>::from(x).unwrap_or_else(Self::Real::nan)
    }
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            fn conj(self) -> Self {
                self
            }
            fn re(self) -> $t {
                self
            }
            fn im(self) -> $t {
                0.0
            }
            fn from_real(r: $t) -> Self {
                r
            }
            fn norm_sqr(self) -> $t {
                self * self
            }
        }
    };
}

macro_rules! complex_scalar {
    ($t:ty) => {
        impl Scalar for Complex<$t> {
            type Real = $t;
            fn conj(self) -> Self {
                Complex::conj(&self)
            }
            fn re(self) -> $t {
                self.re
            }
            fn im(self) -> $t {
                self.im
            }
            fn from_real(r: $t) -> Self {
                Complex::new(r, 0.0)
            }
            fn norm_sqr(self) -> $t {
                Complex::norm_sqr(&self)
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);
complex_scalar!(f32);
complex_scalar!(f64);

/// Numerical thresholds shared by every check in the crate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub eig_cluster_eps: f64,
    pub rank_rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_eps: 1e-8,
            eig_cluster_eps: 1e-6,
            rank_rel_eps: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, eig_cluster_eps: f64, rank_rel_eps: f64) -> Result<Self> {
        let t = Tolerance {
            abs_eps,
            eig_cluster_eps,
            rank_rel_eps,
        };
        if [abs_eps, eig_cluster_eps, rank_rel_eps]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0)
        {
            Ok(t)
        } else {
            Err(QglError::Validation(format!("tolerances must be positive: {t:?}")))
        }
    }

    /// Default tolerance with `abs_eps` overridden by `QGL_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var("QGL_TOL") {
            Ok(s) => {
                let eps: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| QglError::Validation(format!("QGL_TOL is not a number: {s}")))?;
                Self::default().with_abs(eps)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_abs(self, abs_eps: f64) -> Result<Self> {
        Tolerance::new(abs_eps, self.eig_cluster_eps, self.rank_rel_eps)
    }

    /// Threshold for comparing two operators of size `dim` in Frobenius norm.
    pub fn op_threshold(&self, dim: usize, lhs_norm: f64, rhs_norm: f64) -> f64 {
        self.abs_eps * dim.max(1) as f64 * 1f64.max(lhs_norm).max(rhs_norm)
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QglError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|x| !x.is_finite()) {
            return Err(QglError::Validation(format!("non-finite entry at flat index {bad}")));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(QglError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn diag(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * n + i] = x;
        }
        m
    }

    /// Column vector.
    pub fn column(v: &[T]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[T]) {
        for (i, &x) in v.iter().enumerate() {
            self.data[i * self.cols + j] = x;
        }
    }

    pub fn reshape(mut self, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != self.data.len() {
            return Err(QglError::DimensionMismatch(format!(
                "cannot reshape {}x{} into {rows}x{cols}",
                self.rows, self.cols
            )));
        }
        self.rows = rows;
        self.cols = cols;
        Ok(self)
    }

    pub fn matmul(&self, b: &Self) -> Result<Self> {
        if self.cols != b.rows {
            return Err(QglError::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let mut out = Self::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == T::zero() {
                    continue;
                }
                let brow = &b.data[k * b.cols..(k + 1) * b.cols];
                for (o, &x) in orow.iter_mut().zip(brow) {
                    *o = *o + a * x;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(QglError::DimensionMismatch(format!(
                "matvec {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect())
    }

    /// Kronecker product, entry `(i·b.rows + k, j·b.cols + l) = a[i,j]·b[k,l]`.
    pub fn kron(&self, b: &Self) -> Self {
        let (r, c) = (self.rows * b.rows, self.cols * b.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                if a == T::zero() {
                    continue;
                }
                for k in 0..b.rows {
                    let base = (i * b.rows + k) * c + j * b.cols;
                    for l in 0..b.cols {
                        out.data[base + l] = a * b.data[k * b.cols + l];
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i].conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.data[i * self.cols + i])
    }

    pub fn norm_fro(&self) -> T::Real {
        self.data
            .iter()
            .fold(T::Real::zero(), |acc, x| acc + x.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T::Real {
        self.data
            .iter()
            .fold(T::Real::zero(), |acc, x| acc.max(x.abs()))
    }

    pub fn try_add(&self, b: &Self) -> Result<Self> {
        self.zip_with(b, |x, y| x + y)
    }

    pub fn try_sub(&self, b: &Self) -> Result<Self> {
        self.zip_with(b, |x, y| x - y)
    }

    fn zip_with(&self, b: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape() != b.shape() {
            return Err(QglError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
        })
    }

    /// Frobenius distance to `b`; infinite when shapes differ.
    pub fn dist(&self, b: &Self) -> T::Real {
        match self.try_sub(b) {
            Ok(d) => d.norm_fro(),
            Err(_) => T::Real::infinity(),
        }
    }

    /// Hermitian inner product `⟨self, b⟩ = Σ conj(self_ij)·b_ij`.
    pub fn inner(&self, b: &Self) -> T {
        self.data
            .iter()
            .zip(&b.data)
            .fold(T::zero(), |acc, (&x, &y)| acc + x.conj() * y)
    }

    pub fn hermitian_residual(&self) -> T::Real {
        if !self.is_square() {
            return T::Real::infinity();
        }
        self.dist(&self.adjoint())
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $g:ident) => {
        impl<'a, T: Scalar> $tr<&'a Matrix<T>> for &'a Matrix<T> {
            type Output = Matrix<T>;
            fn $f(self, rhs: &'a Matrix<T>) -> Matrix<T> {
                self.$g(rhs).expect("matrix shapes must agree")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, matmul);

impl<T: Scalar> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

pub fn matmul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.matmul(b)
}

pub fn kron<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.kron(b)
}

/// Compare two operators with the crate-wide Frobenius criterion.
/// Returns the residual and whether it is below threshold.
pub fn op_close<T: Scalar>(lhs: &Matrix<T>, rhs: &Matrix<T>, tol: &Tolerance) -> (f64, bool) {
    let res = to_f64(lhs.dist(rhs));
    let thr = tol.op_threshold(
        lhs.rows().max(lhs.cols()),
        to_f64(lhs.norm_fro()),
        to_f64(rhs.norm_fro()),
    );
    (res, res <= thr)
}

fn to_f64<R: Float>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh<T: Scalar> {
    /// Ascending.
    pub values: Vec<T::Real>,
    /// Unitary; column `j` belongs to `values[j]`.
    pub vectors: Matrix<T>,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Deterministic: the sweep order is fixed and no randomness is involved, so
/// bit-identical input gives bit-identical output.
pub fn eigh<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Eigh<T>> {
    if !a.is_square() {
        return Err(QglError::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let herm = to_f64(a.hermitian_residual());
    if herm > tol.abs_eps * n.max(1) as f64 * 1f64.max(to_f64(a.norm_fro())) {
        return Err(QglError::NotHermitian(herm));
    }
    // symmetrize so that rounding in the input does not leak into the result
    let half = T::real_from_f64(0.5);
    let mut m = Matrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()).scale(half));
    let mut v = Matrix::<T>::identity(n);
    let eps = T::Real::epsilon();
    let total = m.norm_fro();

    for _sweep in 0..100 {
        let mut off = T::Real::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m.data[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= eps * total || off == T::Real::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.data[p * n + q];
                let r = apq.abs();
                if r <= T::Real::min_positive_value() {
                    continue;
                }
                let app = m.data[p * n + p].re();
                let aqq = m.data[q * n + q].re();
                let diag_scale = app.abs() + aqq.abs();
                if diag_scale > T::Real::zero() && r < eps * eps * diag_scale {
                    m.data[p * n + q] = T::zero();
                    m.data[q * n + p] = T::zero();
                    continue;
                }
                let two = T::Real::one() + T::Real::one();
                let tau = (aqq - app) / (two * r);
                let t = if tau >= T::Real::zero() {
                    T::Real::one() / (tau + (T::Real::one() + tau * tau).sqrt())
                } else {
                    -T::Real::one() / (-tau + (T::Real::one() + tau * tau).sqrt())
                };
                let c = T::Real::one() / (T::Real::one() + t * t).sqrt();
                let s = t * c;
                let phase = apq.scale(T::Real::one() / r);
                let sp = phase.scale(s);
                let spc = sp.conj();
                let cc = T::from_real(c);
                // columns p, q of m and v: X <- X G
                for k in 0..n {
                    let xkp = m.data[k * n + p];
                    let xkq = m.data[k * n + q];
                    m.data[k * n + p] = xkp * cc - xkq * spc;
                    m.data[k * n + q] = xkp * sp + xkq * cc;
                    let vkp = v.data[k * n + p];
                    let vkq = v.data[k * n + q];
                    v.data[k * n + p] = vkp * cc - vkq * spc;
                    v.data[k * n + q] = vkp * sp + vkq * cc;
                }
                // rows p, q of m: X <- G† X
                for k in 0..n {
                    let xpk = m.data[p * n + k];
                    let xqk = m.data[q * n + k];
                    m.data[p * n + k] = cc * xpk - sp * xqk;
                    m.data[q * n + k] = spc * xpk + cc * xqk;
                }
                m.data[p * n + q] = T::zero();
                m.data[q * n + p] = T::zero();
                m.data[p * n + p] = T::from_real(m.data[p * n + p].re());
                m.data[q * n + q] = T::from_real(m.data[q * n + q].re());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T::Real> = (0..n).map(|i| m.data[i * n + i].re()).collect();
    order.sort_by(|&i, &j| {
        diag[i]
            .partial_cmp(&diag[j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v.data[r * n + order[c]]);
    Ok(Eigh { values, vectors })
}

/// Numerical rank and nullity of a Hermitian positive semidefinite matrix.
pub fn rank_nullity<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<(usize, usize)> {
    let e = eigh(a, tol)?;
    Ok(rank_from_values(&e.values, tol))
}

pub fn rank_from_values<R: Float>(values: &[R], tol: &Tolerance) -> (usize, usize) {
    let lmax = values.iter().fold(0.0f64, |acc, x| acc.max(to_f64(*x)));
    let thr = tol.rank_rel_eps * lmax.max(1.0);
    let rank = values.iter().filter(|x| to_f64(**x) > thr).count();
    (rank, values.len() - rank)
}

/// Group ascending eigenvalues into clusters whose internal gaps are below
/// `eig_cluster_eps · max(1, spectral radius)`. Returns `(mean, indices)`.
pub fn cluster_eigenvalues(values: &[f64], tol: &Tolerance) -> Vec<(f64, Vec<usize>)> {
    let radius = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let gap = tol.eig_cluster_eps * radius.max(1.0);
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        match out.last_mut() {
            Some((_, idx)) if x - values[*idx.last().unwrap()] < gap => idx.push(i),
            _ => out.push((x, vec![i])),
        }
    }
    for (mean, idx) in out.iter_mut() {
        *mean = idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64;
    }
    out
}

/// Minimal-norm least-squares solution of the normal equations `G x = h`
/// for a Hermitian positive semidefinite Gram matrix `G`.
///
/// Columns are equilibrated by the Gram diagonal before the pseudo-inverse;
/// directions whose eigenvalue falls below `rel_cut · λ_max` are dropped and
/// returned (in original coordinates) as the null directions.
pub fn gram_solve(
    gram: &Matrix<Complex<f64>>,
    rhs: &[Complex<f64>],
    rel_cut: f64,
    tol: &Tolerance,
) -> Result<(Vec<Complex<f64>>, Vec<Vec<Complex<f64>>>)> {
    let n = gram.rows();
    let gmax = (0..n).fold(0.0f64, |m, i| m.max(gram[(i, i)].re));
    // columns at rounding level relative to the largest are treated as zero
    let floor = gmax * 1e-24;
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let g = gram[(i, i)].re;
            if g > floor {
                1.0 / g.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let gs = Matrix::from_fn(n, n, |i, j| gram[(i, j)] * scale[i] * scale[j]);
    let hs: Vec<Complex<f64>> = (0..n).map(|i| rhs[i] * scale[i]).collect();
    let e = eigh(&gs, tol)?;
    let lmax = e.values.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut y = vec![Complex::new(0.0, 0.0); n];
    let mut null = Vec::new();
    for (j, &lam) in e.values.iter().enumerate() {
        let vj = e.vectors.col(j);
        if lam <= rel_cut * lmax.max(f64::MIN_POSITIVE) {
            null.push((0..n).map(|i| vj[i] * scale[i]).collect());
            continue;
        }
        let c: Complex<f64> = vj.iter().zip(&hs).map(|(v, h)| v.conj() * h).sum::<Complex<f64>>() / lam;
        for i in 0..n {
            y[i] += vj[i] * c;
        }
    }
    let x = (0..n).map(|i| y[i] * scale[i]).collect();
    Ok((x, null))
}

/// Dense complex square-system solve by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix<Complex<f64>>, b: &Matrix<Complex<f64>>) -> Result<Matrix<Complex<f64>>> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(QglError::DimensionMismatch("solve needs square a and matching b".into()));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                lu[(i, col)]
                    .norm()
                    .partial_cmp(&lu[(j, col)].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if lu[(piv, col)].norm() <= 1e-14 * scale {
            return Err(QglError::Numerical("singular matrix in solve".into()));
        }
        if piv != col {
            for j in 0..n {
                let t = lu[(col, j)];
                lu[(col, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..m {
                let t = x[(col, j)];
                x[(col, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let d = lu[(col, col)];
        for i in (col + 1)..n {
            let f = lu[(i, col)] / d;
            if f == Complex::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let t = lu[(col, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..m {
                let t = x[(col, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    for col in (0..n).rev() {
        let d = lu[(col, col)];
        for j in 0..m {
            let mut s = x[(col, j)];
            for k in (col + 1)..n {
                s -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = s / d;
        }
    }
    Ok(x)
}

pub fn inverse(a: &Matrix<Complex<f64>>) -> Result<Matrix<Complex<f64>>> {
    solve(a, &Matrix::identity(a.rows()))
}

/// Lift a real matrix to the complex field.
pub fn complexify<R: Float + Scalar<Real = R>>(a: &Matrix<R>) -> Matrix<Complex<R>>
where
    Complex<R>: Scalar<Real = R>,
{
    Matrix::from_fn(a.rows(), a.cols(), |i, j| Complex::new(a[(i, j)], R::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{c, CMat};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_and_diagonal_products() {
        let i2 = CMat::identity(2);
        assert_eq!(matmul(&i2, &i2).unwrap(), i2);
        let a = CMat::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = CMat::diag(&[c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(&a * &b, CMat::diag(&[c(3.0, 0.0), c(8.0, 0.0)]));
        assert!(matmul(&a, &CMat::zeros(3, 3)).is_err());
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let a = CMat::from_fn(2, 3, |i, j| c(i as f64 + 0.5 * j as f64, j as f64 - 1.0));
        let b = CMat::from_fn(3, 2, |i, j| c(1.0 - i as f64, 0.25 * (i + j) as f64));
        let p = &a * &b;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = c(0.0, 0.0);
                for k in 0..3 {
                    s += a[(i, k)] * b[(k, j)];
                }
                assert!((p[(i, j)] - s).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kron_small_cases() {
        assert_eq!(kron(&CMat::identity(2), &CMat::identity(3)), CMat::identity(6));
        let d = CMat::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let k = kron(&d, &CMat::identity(2));
        let want = CMat::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(k, want);

        let a = CMat::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 1.0));
        let b = CMat::from_fn(2, 2, |i, j| c(1.0, (i + 3 * j) as f64));
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn eigh_small_cases() {
        let d = CMat::diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let e = eigh(&d, &tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let x = CMat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let e = eigh(&x, &tol()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let nh = CMat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(matches!(eigh(&nh, &tol()), Err(QglError::NotHermitian(_))));
    }

    #[test]
    fn eigh_works_for_real_single_precision() {
        let a = Matrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = eigh(&a, &Tolerance::new(1e-5, 1e-4, 1e-5).unwrap()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-5 && (e.values[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn rank_nullity_basics() {
        assert_eq!(rank_nullity(&CMat::zeros(4, 4), &tol()).unwrap(), (0, 4));
        assert_eq!(rank_nullity(&CMat::identity(3), &tol()).unwrap(), (3, 0));
    }

    #[test]
    fn clustering_groups_close_values() {
        let cl = cluster_eigenvalues(&[-2.0, -2.0 + 1e-9, 1.0, 1.0, 1.0, 4.0], &tol());
        let sizes: Vec<usize> = cl.iter().map(|(_, v)| v.len()).collect();
        assert_eq!(sizes, vec![2, 3, 1]);
    }

    #[test]
    fn solve_and_inverse() {
        let a = CMat::from_rows(&[vec![c(2.0, 1.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(3.0, 0.0)]]).unwrap();
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).dist(&CMat::identity(2)) < 1e-14);
    }

    #[test]
    fn gram_solve_reports_null_direction() {
        // columns (1,0), (0,0): second coefficient is free
        let g = CMat::diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let (x, null) = gram_solve(&g, &[c(2.0, 0.0), c(0.0, 0.0)], 1e-12, &tol()).unwrap();
        assert!((x[0] - c(2.0, 0.0)).norm() < 1e-14 && x[1].norm() < 1e-14);
        assert_eq!(null.len(), 1);
    }

    #[test]
    fn tolerance_from_values() {
        assert!(Tolerance::new(0.0, 1.0, 1.0).is_err());
        assert_eq!(Tolerance::default().abs_eps, 1e-8);
    }
}
