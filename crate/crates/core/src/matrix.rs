//! Dense complex matrices sized for small bipartite operators (`mn` up to a
//! few dozen), together with the spectral routines the measures need.
//!
//! Eigenvalues come from a cyclic Jacobi iteration on Hermitian input and
//! singular values from a one-sided (Hestenes) Jacobi iteration. Both are
//! slow asymptotically but accurate to a few ulps on matrices of this size.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum `|A[i][j] - conj(A[j][i])|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Jacobi iteration stops once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

/// Eigenvalues below `-NEGATIVE_EIGEN_TOL` are counted as negative.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim, dim);
        for i in 0..dim {
            out[(i, i)] = ONE;
        }
        out
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real matrix from row-major entries; panics if the length is wrong.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
        Self { rows, cols, data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut out = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            out[(i, i)] = Complex64::new(v, 0.0);
        }
        out
    }

    /// Outer product `|v><v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// Largest `|A[i][j] - conj(A[j][i])|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| self[(i / p, j / q)] * other[(i % p, j % q)])
    }

    /// `Tr(A^dagger A)`, the squared Hilbert-Schmidt norm.
    pub fn hs_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Transpose on the first (`m`-dimensional) factor:
    /// `|i><j| (x) |k><l|  ->  |j><i| (x) |k><l|`.
    pub fn partial_transpose(&self, m: usize, n: usize) -> Result<Self> {
        self.check_bipartite(m, n)?;
        Ok(Self::from_fn(m * n, m * n, |r, c| {
            let (i, k) = (r / n, r % n);
            let (j, l) = (c / n, c % n);
            self[(j * n + k, i * n + l)]
        }))
    }

    /// Trace over the second (`n`-dimensional) factor.
    pub fn partial_trace_b(&self, m: usize, n: usize) -> Result<Self> {
        self.check_bipartite(m, n)?;
        Ok(Self::from_fn(m, m, |i, j| (0..n).map(|k| self[(i * n + k, j * n + k)]).sum()))
    }

    fn check_bipartite(&self, m: usize, n: usize) -> Result<()> {
        if self.rows != m * n || self.cols != m * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {0}x{0} for {m} (x) {n}, got {1}x{2}",
                m * n,
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }

    /// Eigenvalues of a Hermitian matrix, sorted nonincreasing.
    pub fn hermitian_eigenvalues(&self) -> Result<Spectrum> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        jacobi_eigenvalues(self.hermitian_part()).map(Spectrum::from_unsorted)
    }

    /// `Tr|A| = sum |lambda_i|` for Hermitian `A`.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.hermitian_eigenvalues()?.iter().map(|l| l.abs()).sum())
    }

    /// Singular values, sorted nonincreasing; there are `min(rows, cols)` of them.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        // Orthogonalize along the shorter dimension.
        let wide = if self.rows <= self.cols { self.clone() } else { self.adjoint() };
        let mut values = hestenes_row_norms(wide)?;
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(values)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Real eigenvalues sorted nonincreasing; degenerate values are repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_unsorted(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// Number of eigenvalues below `-NEGATIVE_EIGEN_TOL`.
    pub fn negative_count(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < -NEGATIVE_EIGEN_TOL).count()
    }

    /// `sum |lambda|` over strictly negative eigenvalues.
    pub fn negative_mass(&self) -> f64 {
        self.eigenvalues.iter().filter(|&&l| l < 0.0).map(|l| -l).sum()
    }

    /// Sum of the `k` largest eigenvalues.
    pub fn top_sum(&self, k: usize) -> f64 {
        self.eigenvalues.iter().take(k).sum()
    }
}

/// Real row-major matrix, used for the correlation matrix `T` and for `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `A A^T`.
    pub fn gram(&self) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let v: f64 = (0..self.cols).map(|k| self[(i, k)] * self[(j, k)]).sum();
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi on an exactly Hermitian matrix. Each pivot first has its
/// phase rotated away so the 2x2 block is real symmetric, then a real Givens
/// rotation annihilates it.
fn jacobi_eigenvalues(mut a: ComplexMatrix) -> Result<Vec<f64>> {
    let dim = a.rows;
    let scale = a.hs_norm_sq().sqrt();
    let tol = JACOBI_OFF_TOL.max(scale * f64::EPSILON);

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off >= tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Conjugate by diag(1, .., e^{-i phi} at q, ..) so that A[p][q] = r.
                let phase = apq / r;
                for i in 0..dim {
                    a[(i, q)] *= phase.conj();
                    a[(q, i)] *= phase;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..dim {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = x * c - y * s;
                    a[(i, q)] = x * s + y * c;
                }
                for j in 0..dim {
                    let (x, y) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = x * c - y * s;
                    a[(q, j)] = x * s + y * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(app - t * r, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
            }
        }
        off = off_diagonal_norm(&a);
    }
    Ok((0..dim).map(|i| a[(i, i)].re).collect())
}

/// One-sided Jacobi: rotate pairs of rows until they are mutually orthogonal;
/// the row norms are then the singular values.
fn hestenes_row_norms(mut a: ComplexMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = (a.rows, a.cols);
    let row = |a: &ComplexMatrix, i: usize| -> Vec<Complex64> { a.data[i * cols..(i + 1) * cols].to_vec() };

    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..rows {
            for q in (p + 1)..rows {
                let rp = row(&a, p);
                let rq = row(&a, q);
                let alpha: f64 = rp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = rq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = rp.iter().zip(&rq).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..cols {
                    let x = rp[k];
                    let y = rq[k] * phase;
                    a[(p, k)] = x * c - y * s;
                    a[(q, k)] = x * s + y * c;
                }
            }
        }
        if !rotated {
            return Ok((0..rows).map(|i| row(&a, i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect());
        }
        if sweep + 1 == MAX_SWEEPS {
            break;
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS, off_norm: f64::NAN })
}
