//! Ordered generator bases of SU(d), normalized so that `Tr(z_i z_j) = 2 delta_ij`.
//!
//! * `d = 2`: the Pauli matrices `sigma_1, sigma_2, sigma_3`.
//! * `d = 3`: the Gell-Mann matrices `mu_1 .. mu_8` in their conventional order
//!   (`mu_3` is diagonal and sits between the (0,1) and (0,2) pairs).
//! * `d >= 4`: the generalized Gell-Mann matrices. Index pairs `(j, k)` with
//!   `j < k` are visited lexicographically, each emitting the symmetric
//!   generator `E_jk + E_kj` followed by the antisymmetric `-i E_jk + i E_kj`;
//!   then the `d - 1` diagonal generators
//!   `sqrt(2 / (l (l + 1))) (E_00 + .. + E_{l-1,l-1} - l E_ll)` for `l = 1 .. d-1`.
//!
//! For `d = 2` the generic ordering coincides with the Pauli order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    d: usize,
    generators: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    /// Wraps a caller-supplied basis after checking shape, Hermiticity,
    /// tracelessness and `Tr(z_i z_j) = 2 delta_ij`.
    pub fn from_generators(d: usize, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if generators.len() != d * d - 1 {
            return Err(Error::DimensionMismatch(format!(
                "SU({d}) needs {} generators, got {}",
                d * d - 1,
                generators.len()
            )));
        }
        for g in &generators {
            if g.rows() != d || g.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "generator is {}x{}, expected {d}x{d}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        let basis = Self { d, generators };
        let residual = basis.orthonormality_residual();
        if residual > 1e-12 {
            return Err(Error::DimensionMismatch(format!("generators are not orthonormal (residual {residual:e})")));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.generators[i]
    }

    /// Largest deviation from Hermiticity, tracelessness and `Tr(z_i z_j) = 2 delta_ij`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.generators.iter().enumerate() {
            worst = worst.max(a.hermitian_deviation()).max(a.trace().norm());
            for (j, b) in self.generators.iter().enumerate().skip(i) {
                let want = if i == j { 2.0 } else { 0.0 };
                worst = worst.max((trace_of_product(a, b) - want).norm());
            }
        }
        worst
    }

    /// The same basis with generators reordered (`order[i]` is the source
    /// index of the new `i`-th generator) and sign-flipped.
    pub fn signed_permutation(&self, order: &[usize], flip: &[bool]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || flip.len() != self.len() {
            return Err(Error::DimensionMismatch("permutation length differs from basis size".into()));
        }
        for &k in order {
            if k >= self.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::DimensionMismatch("not a permutation".into()));
            }
        }
        let generators = order
            .iter()
            .zip(flip)
            .map(|(&k, &neg)| if neg { self.generators[k].scale(-1.0) } else { self.generators[k].clone() })
            .collect();
        Ok(Self { d: self.d, generators })
    }
}

/// `Tr(AB)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            sum += a[(i, k)] * b[(k, i)];
        }
    }
    sum
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<GeneratorBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GeneratorBasis>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Generator basis of SU(d); built once per `d` and shared afterwards.
pub fn basis_for(d: usize) -> Result<Arc<GeneratorBasis>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut cache = cache().lock().unwrap_or_else(|e| e.into_inner());
    let basis = cache
        .entry(d)
        .or_insert_with(|| {
            let generators = if d == 3 { gell_mann() } else { generalized_gell_mann(d) };
            Arc::new(GeneratorBasis { d, generators })
        })
        .clone();
    Ok(basis)
}

fn generalized_gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let i = Complex64::i();
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::new(1.0, 0.0);
            sym[(k, j)] = Complex64::new(1.0, 0.0);
            out.push(sym);

            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|r| match r.cmp(&l) {
                std::cmp::Ordering::Less => norm,
                std::cmp::Ordering::Equal => -(l as f64) * norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(ComplexMatrix::diagonal(&diag));
    }
    out
}

fn gell_mann() -> Vec<ComplexMatrix> {
    let mut generic = generalized_gell_mann(3);
    // generic order: s01 a01 s02 a02 s12 a12 diag1 diag2
    let diag1 = generic.remove(6);
    generic.insert(2, diag1);
    generic
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_order_is_exact() {
        let b = basis_for(2).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.get(0), &ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(
            b.get(1),
            &ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
        );
        assert_eq!(b.get(2), &ComplexMatrix::diagonal(&[1.0, -1.0]));
    }

    #[test]
    fn gell_mann_order_is_exact() {
        let b = basis_for(3).unwrap();
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let expected = [
            vec![z, o, z, o, z, z, z, z, z],
            vec![z, -i, z, i, z, z, z, z, z],
            vec![o, z, z, z, -o, z, z, z, z],
            vec![z, z, o, z, z, z, o, z, z],
            vec![z, z, -i, z, z, z, i, z, z],
            vec![z, z, z, z, z, o, z, o, z],
            vec![z, z, z, z, z, -i, z, i, z],
        ];
        for (k, want) in expected.into_iter().enumerate() {
            assert_eq!(b.get(k), &ComplexMatrix::from_vec(3, 3, want).unwrap(), "mu_{}", k + 1);
        }
        let s = 1.0 / 3f64.sqrt();
        assert!(b.get(7).max_abs_diff(&ComplexMatrix::diagonal(&[s, s, -2.0 * s])) < 1e-15);
    }

    #[test]
    fn bases_are_orthonormal() {
        for d in 2..=5 {
            let b = basis_for(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            assert!(b.orthonormality_residual() < 1e-12, "d = {d}");
            for g in b.generators() {
                assert!(g.trace().norm() < 1e-14);
                assert!(g.hermitian_deviation() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(matches!(basis_for(1), Err(Error::InvalidDimension(1))));
        assert!(matches!(basis_for(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn cached_instance_is_shared() {
        let a = basis_for(4).unwrap();
        let b = basis_for(4).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn signed_permutation_stays_orthonormal() {
        let b = basis_for(3).unwrap();
        let p = b
            .signed_permutation(&[7, 0, 1, 2, 3, 4, 5, 6], &[true, false, true, false, false, true, false, false])
            .unwrap();
        assert_eq!(p.get(0), &b.get(7).scale(-1.0));
        assert!(p.orthonormality_residual() < 1e-12);
        assert!(b.signed_permutation(&[0, 0, 1, 2, 3, 4, 5, 6], &[false; 8]).is_err());
    }

    #[test]
    fn from_generators_validates() {
        let b = basis_for(2).unwrap();
        assert!(GeneratorBasis::from_generators(2, b.generators().to_vec()).is_ok());
        let mut bad = b.generators().to_vec();
        bad[0] = bad[0].scale(2.0);
        assert!(GeneratorBasis::from_generators(2, bad).is_err());
    }
}
