//! Bloch form of a bipartite state:
//!
//! ```text
//! rho = 1/(mn) [ I (x) I + sum_i x_i z_i (x) I + sum_j y_j I (x) z_j + sum_ij T_ij z_i (x) z_j ]
//! ```
//!
//! With `Tr(z_i z_j) = 2 delta_ij` the coefficients are recovered as
//! `x_i = (m/2) Tr(rho (z_i (x) I))`, `y_j = (n/2) Tr(rho (I (x) z_j))` and
//! `T_ij = (mn/4) Tr(rho (z_i (x) z_j))`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::{basis_for, GeneratorBasis};
use crate::matrix::{ComplexMatrix, RealMatrix, Spectrum};
use crate::state::DensityMatrix;

/// Extraction traces are real analytically; anything above this is an upstream fault.
pub const IMAGINARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BlochForm {
    pub m: usize,
    pub n: usize,
    /// Local vector of the first party, length `m^2 - 1`.
    pub x: Vec<f64>,
    /// Local vector of the second party, length `n^2 - 1`.
    pub y: Vec<f64>,
    /// Correlation matrix, `(m^2 - 1) x (n^2 - 1)`.
    pub t: RealMatrix,
}

impl BlochForm {
    pub fn zero(m: usize, n: usize) -> Self {
        Self { m, n, x: vec![0.0; m * m - 1], y: vec![0.0; n * n - 1], t: RealMatrix::zeros(m * m - 1, n * n - 1) }
    }

    fn check_shape(&self) -> Result<()> {
        let (p, q) = (self.m * self.m - 1, self.n * self.n - 1);
        if self.m < 2 || self.n < 2 {
            return Err(Error::InvalidDimension(self.m.min(self.n)));
        }
        if self.x.len() != p || self.y.len() != q || self.t.rows() != p || self.t.cols() != q {
            return Err(Error::DimensionMismatch(format!(
                "Bloch data for {} (x) {} needs x[{p}], y[{q}], T[{p}x{q}]; got x[{}], y[{}], T[{}x{}]",
                self.m,
                self.n,
                self.x.len(),
                self.y.len(),
                self.t.rows(),
                self.t.cols()
            )));
        }
        Ok(())
    }

    /// `||x||^2`.
    pub fn x_norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    /// `||T||^2 = Tr(T T^T)`.
    pub fn t_norm_sq(&self) -> f64 {
        self.t.frobenius_sq()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dx = self.x.iter().zip(&other.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dy = self.y.iter().zip(&other.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        dx.max(dy).max(self.t.max_abs_diff(&other.t))
    }
}

/// `G = x x^T + (2/n) T T^T`, real symmetric PSD of size `m^2 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    g: RealMatrix,
}

impl GMatrix {
    pub fn matrix(&self) -> &RealMatrix {
        &self.g
    }

    pub fn eigenvalues(&self) -> Result<Spectrum> {
        self.g.to_complex().hermitian_eigenvalues()
    }

    pub fn trace(&self) -> f64 {
        self.g.trace()
    }
}

/// `Tr(rho (a (x) b))` without building the Kronecker product.
fn trace_against_kron(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let (m, n) = (a.rows(), b.rows());
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            let aji = a[(j, i)];
            if aji.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let blk = b[(l, k)];
                    if blk.norm_sqr() != 0.0 {
                        sum += rho[(i * n + k, j * n + l)] * aji * blk;
                    }
                }
            }
        }
    }
    sum
}

fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue { residue: z.im.abs() });
    }
    Ok(z.re)
}

/// Bloch form with respect to the standard generator bases.
pub fn decompose(rho: &DensityMatrix) -> Result<BlochForm> {
    let (m, n) = rho.dims();
    decompose_with(rho.matrix(), &*basis_for(m)?, &*basis_for(n)?)
}

/// Bloch form of an `mn x mn` matrix with respect to arbitrary orthonormal
/// generator bases of the two parties.
pub fn decompose_with(rho: &ComplexMatrix, basis_a: &GeneratorBasis, basis_b: &GeneratorBasis) -> Result<BlochForm> {
    let (m, n) = (basis_a.dim(), basis_b.dim());
    if rho.rows() != m * n || rho.cols() != m * n {
        return Err(Error::DimensionMismatch(format!("expected a {0}x{0} matrix", m * n)));
    }
    let id_m = ComplexMatrix::identity(m);
    let id_n = ComplexMatrix::identity(n);
    let (mf, nf) = (m as f64, n as f64);

    let x = basis_a
        .generators()
        .iter()
        .map(|z| real_part_checked(trace_against_kron(rho, z, &id_n)).map(|v| 0.5 * mf * v))
        .collect::<Result<Vec<_>>>()?;
    let y = basis_b
        .generators()
        .iter()
        .map(|z| real_part_checked(trace_against_kron(rho, &id_m, z)).map(|v| 0.5 * nf * v))
        .collect::<Result<Vec<_>>>()?;
    let mut t = RealMatrix::zeros(basis_a.len(), basis_b.len());
    for (i, za) in basis_a.generators().iter().enumerate() {
        for (j, zb) in basis_b.generators().iter().enumerate() {
            t[(i, j)] = 0.25 * mf * nf * real_part_checked(trace_against_kron(rho, za, zb))?;
        }
    }
    Ok(BlochForm { m, n, x, y, t })
}

/// Rebuilds the `mn x mn` matrix. The result is Hermitian with unit trace but
/// need not be positive for arbitrary Bloch data.
pub fn reconstruct(bf: &BlochForm) -> Result<ComplexMatrix> {
    bf.check_shape()?;
    reconstruct_with(bf, &*basis_for(bf.m)?, &*basis_for(bf.n)?)
}

pub fn reconstruct_with(bf: &BlochForm, basis_a: &GeneratorBasis, basis_b: &GeneratorBasis) -> Result<ComplexMatrix> {
    bf.check_shape()?;
    if basis_a.dim() != bf.m || basis_b.dim() != bf.n {
        return Err(Error::DimensionMismatch("generator bases do not match the Bloch dimensions".into()));
    }
    let (m, n) = (bf.m, bf.n);
    // Local operators first: A = I + x.z, B = y.z, then the correlation sum.
    let mut local_a = ComplexMatrix::identity(m);
    for (xi, z) in bf.x.iter().zip(basis_a.generators()) {
        local_a = &local_a + &z.scale(*xi);
    }
    let mut local_b = ComplexMatrix::zeros(n, n);
    for (yj, z) in bf.y.iter().zip(basis_b.generators()) {
        local_b = &local_b + &z.scale(*yj);
    }
    let mut out = &local_a.kron(&ComplexMatrix::identity(n)) + &ComplexMatrix::identity(m).kron(&local_b);
    for (i, za) in basis_a.generators().iter().enumerate() {
        // sum_j T_ij z_j, then one Kronecker product per row of T.
        let mut row = ComplexMatrix::zeros(n, n);
        let mut any = false;
        for (j, zb) in basis_b.generators().iter().enumerate() {
            let tij = bf.t[(i, j)];
            if tij != 0.0 {
                row = &row + &zb.scale(tij);
                any = true;
            }
        }
        if any {
            out = &out + &za.kron(&row);
        }
    }
    Ok(out.scale(1.0 / (m * n) as f64))
}

pub fn g_matrix(bf: &BlochForm) -> GMatrix {
    let p = bf.x.len();
    let mut g = bf.t.gram();
    let w = 2.0 / bf.n as f64;
    for i in 0..p {
        for j in 0..p {
            g[(i, j)] = bf.x[i] * bf.x[j] + w * g[(i, j)];
        }
    }
    GMatrix { g }
}
