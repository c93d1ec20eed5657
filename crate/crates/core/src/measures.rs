//! Negativity, geometric discord and the bounds tying them together.
//!
//! Discord is normalized as `D = m/(m-1) min ||rho - Pi(rho)||^2` over von
//! Neumann measurements `Pi` on the first party. Some references use
//! `D~ = ((m-1)/m) D` instead; only `D` is exposed here.
//!
//! For `2 x n` states the Bloch-form formula
//! `D = 2/(m(m-1)n) [ ||x||^2 + (2/n)||T||^2 - sum_{k<m} lambda_k(G) ]`
//! is exact. For `m >= 3` the same expression is only a lower bound and is
//! reported with `exact = false`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{decompose, g_matrix};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{check_dims, DensityMatrix, PureState};

/// Agreement required between the two negativity expressions.
pub const NEGATIVITY_ROUTE_TOL: f64 = 1e-9;

/// Slack on the theorem bounds in [`bounds_check`].
pub const BOUND_TOL: f64 = 1e-9;

/// Negative lower-bound values within this of zero are rounding noise.
const DISCORD_NOISE: f64 = 1e-12;

/// Schmidt coefficients at or below this are dropped.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

const REFINE_ITERATIONS: usize = 60;
const GOLDEN_STEPS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discord {
    pub value: f64,
    /// True when `value` is the discord itself rather than a lower bound.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub m: usize,
    pub n: usize,
    pub negativity: f64,
    pub negativity_sq: f64,
    pub discord: f64,
    pub discord_exact: bool,
    /// `negativity_sq - discord`; positive means `D < N^2`.
    pub gap: f64,
    pub pt_negative_count: usize,
    pub pt_negative_cap: usize,
    pub bounds_ok: bool,
}

impl MeasureReport {
    pub fn violates_discord_bound(&self) -> bool {
        self.gap > 0.0
    }
}

fn order_factor(m: usize) -> f64 {
    m as f64 / (m as f64 - 1.0)
}

/// The two negativity expressions: `(||rho^Gamma||_1 - 1)/(m-1)` and
/// `2/(m-1) sum_{lambda<0} |lambda|`, both from one spectrum of `rho^Gamma`.
pub fn negativity_routes(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let m = rho.m() as f64;
    let spectrum = rho.partial_transpose().hermitian_eigenvalues()?;
    let trace_norm: f64 = spectrum.iter().map(f64::abs).sum();
    Ok(((trace_norm - 1.0) / (m - 1.0), 2.0 / (m - 1.0) * spectrum.negative_mass()))
}

pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let (trace_norm_route, eigen_route) = negativity_routes(rho)?;
    if (trace_norm_route - eigen_route).abs() > NEGATIVITY_ROUTE_TOL {
        return Err(Error::NegativityMismatch { trace_norm_route, eigen_route });
    }
    Ok(eigen_route)
}

/// `(m-1)(n-1)`, the most negative eigenvalues a partial transpose can have.
pub fn pt_negative_cap(m: usize, n: usize) -> usize {
    (m - 1) * (n - 1)
}

pub fn pt_negative_count(rho: &DensityMatrix) -> Result<usize> {
    let count = rho.partial_transpose().hermitian_eigenvalues()?.negative_count();
    let cap = pt_negative_cap(rho.m(), rho.n());
    if count > cap {
        return Err(Error::CapViolation { count, cap });
    }
    Ok(count)
}

pub fn gd_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    let (m, n) = rho.dims();
    let bf = decompose(rho)?;
    let g = g_matrix(&bf).eigenvalues()?;
    let (mf, nf) = (m as f64, n as f64);
    let bracket = bf.x_norm_sq() + 2.0 / nf * bf.t_norm_sq() - g.top_sum(m - 1);
    let value = 2.0 / (mf * (mf - 1.0) * nf) * bracket;
    Ok(if value < 0.0 && value > -DISCORD_NOISE { 0.0 } else { value })
}

pub fn geometric_discord(rho: &DensityMatrix) -> Result<Discord> {
    Ok(Discord { value: gd_lower_bound(rho)?, exact: rho.m() == 2 })
}

/// `(I + s u.sigma)/2` for `s = +1, -1`.
pub fn qubit_projectors(u: [f64; 3]) -> [ComplexMatrix; 2] {
    let proj = |s: f64| {
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.5 * (1.0 + s * u[2]), 0.0),
                Complex64::new(0.5 * s * u[0], -0.5 * s * u[1]),
                Complex64::new(0.5 * s * u[0], 0.5 * s * u[1]),
                Complex64::new(0.5 * (1.0 - s * u[2]), 0.0),
            ],
        )
        .expect("2x2")
    };
    [proj(1.0), proj(-1.0)]
}

/// `sum_k (P_k (x) I) rho (P_k (x) I)`, computed block by block.
pub fn apply_local_measurement(rho: &ComplexMatrix, n: usize, projectors: &[ComplexMatrix]) -> ComplexMatrix {
    let m = rho.rows() / n;
    let mut out = ComplexMatrix::zeros(m * n, m * n);
    for p in projectors {
        // out_ab += sum_cd P_ac rho_cd P_db
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let pac = p[(a, c)];
                    if pac.norm_sqr() == 0.0 {
                        continue;
                    }
                    for d in 0..m {
                        let w = pac * p[(d, b)];
                        if w.norm_sqr() == 0.0 {
                            continue;
                        }
                        for k in 0..n {
                            for l in 0..n {
                                out[(a * n + k, b * n + l)] += w * rho[(c * n + k, d * n + l)];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn unit_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn check_qubit_party(rho: &DensityMatrix) -> Result<()> {
    if rho.m() != 2 {
        return Err(Error::WrongDimension { m: rho.m(), n: rho.n() });
    }
    Ok(())
}

/// `2 ||rho - Pi_u(rho)||^2` for the qubit measurement along `u`.
fn measured_distance(rho: &DensityMatrix, u: [f64; 3]) -> f64 {
    let projected = apply_local_measurement(rho.matrix(), rho.n(), &qubit_projectors(u));
    2.0 * (rho.matrix() - &projected).hs_norm_sq()
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Geometric discord of a `2 x n` state by direct search over qubit von
/// Neumann measurements: a `resolution x resolution` grid on the upper
/// hemisphere (`u` and `-u` give the same measurement), then alternating
/// golden-section line searches in `(theta, phi)` around the best grid point.
///
/// Works on the matrices themselves and never touches the Bloch form.
pub fn gd_bruteforce_2xn(rho: &DensityMatrix, resolution: usize) -> Result<f64> {
    check_qubit_party(rho)?;
    let res = resolution.max(2);
    let d_theta = std::f64::consts::FRAC_PI_2 / (res - 1) as f64;
    let d_phi = std::f64::consts::TAU / res as f64;
    let objective = |theta: f64, phi: f64| measured_distance(rho, unit_from_angles(theta, phi));

    let (mut theta, mut phi, mut best) = (0.0, 0.0, f64::INFINITY);
    for i in 0..res {
        let t = i as f64 * d_theta;
        for j in 0..res {
            let p = j as f64 * d_phi;
            let v = objective(t, p);
            if v < best {
                (theta, phi, best) = (t, p, v);
            }
        }
    }

    let mut half_width = d_theta.max(d_phi);
    for _ in 0..REFINE_ITERATIONS {
        let (t, v) = golden_section(theta - half_width, theta + half_width, |t| objective(t, phi));
        if v < best {
            (theta, best) = (t, v);
        }
        let (p, v) = golden_section(phi - half_width, phi + half_width, |p| objective(theta, p));
        if v < best {
            (phi, best) = (p, v);
        }
        half_width *= 0.8;
    }
    Ok(best)
}

/// For the measurement along unit vector `u`, returns
/// `(Tr(Pi(rho)^2), Tr(rho Pi(rho)))`. These coincide for every state and
/// measurement, which is what makes `||rho - Pi(rho)||^2 = Tr(rho^2) - Tr(Pi(rho)^2)`.
pub fn measurement_identity_check(rho: &DensityMatrix, u: [f64; 3]) -> Result<(f64, f64)> {
    check_qubit_party(rho)?;
    let projected = project_measurement(rho, u)?;
    let purity = projected.hs_norm_sq();
    let overlap = crate::generators::trace_of_product(rho.matrix(), &projected).re;
    Ok((purity, overlap))
}

/// `Pi^A(rho)` for the qubit measurement along `u`, built from explicit
/// Kronecker products. `u` is normalized first.
pub fn project_measurement(rho: &DensityMatrix, u: [f64; 3]) -> Result<ComplexMatrix> {
    check_qubit_party(rho)?;
    let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::NotNormalized { norm });
    }
    let u = [u[0] / norm, u[1] / norm, u[2] / norm];
    let id_n = ComplexMatrix::identity(rho.n());
    let mut out = ComplexMatrix::zeros(rho.matrix().rows(), rho.matrix().cols());
    for p in qubit_projectors(u) {
        let lifted = p.kron(&id_n);
        out = &out + &(&(&lifted * rho.matrix()) * &lifted);
    }
    Ok(out)
}

/// Schmidt coefficients of a pure state, sorted nonincreasing; zeros dropped.
pub fn schmidt(phi: &PureState) -> Result<Vec<f64>> {
    Ok(phi.coefficient_matrix().singular_values()?.into_iter().filter(|&c| c > SCHMIDT_CUTOFF).collect())
}

/// Negativity of a pure state from its Schmidt coefficients:
/// `N = ((sum c_i)^2 - 1) / (m - 1)`.
pub fn pure_negativity(coefficients: &[f64], m: usize) -> f64 {
    let s: f64 = coefficients.iter().sum();
    // N = 2/(m-1) * N~,  N~ = ((sum c)^2 - 1)/2
    let reduced = 0.5 * (s * s - 1.0);
    2.0 / (m as f64 - 1.0) * reduced
}

/// Discord of a pure state: `D = m/(m-1) (1 - sum c_i^4)`.
pub fn pure_gd(coefficients: &[f64], m: usize) -> f64 {
    order_factor(m) * (1.0 - coefficients.iter().map(|c| c.powi(4)).sum::<f64>())
}

/// Projector onto `(1/sqrt m) sum_i |i>|i>` in `C^m (x) C^n`.
pub fn maximal_state(m: usize, n: usize) -> Result<DensityMatrix> {
    check_dims(m, n)?;
    maximal_pure_state(m, n).map(|p| p.density())
}

pub fn maximal_pure_state(m: usize, n: usize) -> Result<PureState> {
    check_dims(m, n)?;
    let amp = 1.0 / (m as f64).sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); m * n];
    for i in 0..m {
        v[i * n + i] = Complex64::new(amp, 0.0);
    }
    PureState::new(m, n, v)
}

/// All measures of one state plus a verdict on the theorem bounds
/// `0 <= D <= m/(m-1)`, `0 <= N <= 1` and `-m/(m-1) <= N^2 - D <= 1`.
pub fn measure_report(rho: &DensityMatrix) -> Result<MeasureReport> {
    let (m, n) = rho.dims();
    let negativity = negativity(rho)?;
    let pt_negative_count = pt_negative_count(rho)?;
    let discord = geometric_discord(rho)?;
    let negativity_sq = negativity * negativity;
    let gap = negativity_sq - discord.value;
    let upper_d = order_factor(m);
    let bounds_ok = (-BOUND_TOL..=upper_d + BOUND_TOL).contains(&discord.value)
        && (-BOUND_TOL..=1.0 + BOUND_TOL).contains(&negativity)
        && (-upper_d - BOUND_TOL..=1.0 + BOUND_TOL).contains(&gap);
    Ok(MeasureReport {
        m,
        n,
        negativity,
        negativity_sq,
        discord: discord.value,
        discord_exact: discord.exact,
        gap,
        pt_negative_count,
        pt_negative_cap: pt_negative_cap(m, n),
        bounds_ok,
    })
}

/// [`measure_report`], failing with `BoundViolation` if any bound is broken.
pub fn bounds_check(rho: &DensityMatrix) -> Result<MeasureReport> {
    let report = measure_report(rho)?;
    if !report.bounds_ok {
        return Err(Error::BoundViolation(format!(
            "N = {}, D = {}, N^2 - D = {} for a {} x {} state",
            report.negativity, report.discord, report.gap, report.m, report.n
        )));
    }
    Ok(report)
}
