//! Validated bipartite states on `C^m (x) C^n` with `2 <= m <= n`.

use num_complex::Complex64;

use crate::error::{Error, Result, StateViolation};
use crate::matrix::{ComplexMatrix, HERMITIAN_TOL};

pub const TRACE_TOL: f64 = 1e-10;

/// Smallest eigenvalue accepted for a state.
pub const PSD_TOL: f64 = 1e-9;

pub const PURE_NORM_TOL: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace operator on `C^m (x) C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: usize,
    n: usize,
    mat: ComplexMatrix,
}

pub(crate) fn check_dims(m: usize, n: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    if m > n {
        return Err(Error::InvalidDimension(n));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates `mat` and stores its Hermitian part.
    pub fn new(m: usize, n: usize, mat: ComplexMatrix) -> Result<Self> {
        check_dims(m, n)?;
        if mat.rows() != m * n || mat.cols() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "state for {m} (x) {n} must be {0}x{0}, got {1}x{2}",
                m * n,
                mat.rows(),
                mat.cols()
            )));
        }
        let residual = mat.hermitian_deviation();
        if residual > HERMITIAN_TOL {
            return Err(Error::InvalidState(StateViolation::Hermiticity { residual }));
        }
        let mat = mat.hermitian_part();
        let residual = (mat.trace() - 1.0).norm();
        if residual > TRACE_TOL {
            return Err(Error::InvalidState(StateViolation::Trace { residual }));
        }
        let min_eigenvalue = mat.hermitian_eigenvalues()?.min().unwrap_or(0.0);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::InvalidState(StateViolation::Positivity { min_eigenvalue }));
        }
        Ok(Self { m, n, mat })
    }

    /// `(1 / mn) I`.
    pub fn maximally_mixed(m: usize, n: usize) -> Result<Self> {
        check_dims(m, n)?;
        Ok(Self { m, n, mat: ComplexMatrix::identity(m * n).scale(1.0 / (m * n) as f64) })
    }

    /// `rho_A (x) rho_B` for validated single-party states.
    pub fn product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        Self::new(a.rows(), b.rows(), a.kron(b))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `rho^Gamma`, transpose on the first factor.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        self.mat.partial_transpose(self.m, self.n).expect("dimensions validated at construction")
    }

    /// Marginal `rho^A`.
    pub fn marginal_a(&self) -> ComplexMatrix {
        self.mat.partial_trace_b(self.m, self.n).expect("dimensions validated at construction")
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.mat.hs_norm_sq()
    }

    /// `t rho + (1 - t) other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch("mixing states of different dimensions".into()));
        }
        Self::new(self.m, self.n, &self.mat.scale(t) + &other.mat.scale(1.0 - t))
    }
}

/// Unit vector in `C^m (x) C^n`, amplitudes indexed `i * n + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    m: usize,
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(m: usize, n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dims(m, n)?;
        if amplitudes.len() != m * n {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for {m} (x) {n}", amplitudes.len())));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { m, n, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(m: usize, n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(m, n, amplitudes)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The `m x n` coefficient matrix `Psi[i][k] = <i k | phi>`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.m, self.n, self.amplitudes.clone()).expect("length checked")
    }

    /// `|phi><phi|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { m: self.m, n: self.n, mat: ComplexMatrix::projector(&self.amplitudes) }
    }
}
