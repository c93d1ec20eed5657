//! Random-state ensembles, Monte-Carlo tallies of `D < N^2`, and the
//! invariant-verification run.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). Work is split
//! into chunks of [`CHUNK`] states; chunk `k` draws from the generator seeded
//! with `seed` on stream `k`, so results do not depend on the thread count.
//! Per-state auxiliary draws (measurement directions in `verify`) use stream
//! `AUX_STREAM_BASE + k` and never perturb the state sequence.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::measures::{
    gd_bruteforce_2xn, geometric_discord, measure_report, measurement_identity_check, negativity_routes,
    project_measurement, pt_negative_cap, MeasureReport, NEGATIVITY_ROUTE_TOL,
};
use crate::state::{check_dims, DensityMatrix, PureState};
use crate::stateio::StateFile;

pub const CHUNK: usize = 64;
const AUX_STREAM_BASE: u64 = 1 << 32;

/// Tolerance on `Tr(Pi(rho)^2) = Tr(rho Pi(rho))` and the distance identity.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Tolerance between the brute-force oracle and the closed-form discord.
pub const ORACLE_TOL: f64 = 1e-5;
/// States per verify run that also get the brute-force oracle (m = 2 only).
pub const ORACLE_SUBSAMPLE: usize = 20;
pub const ORACLE_RESOLUTION: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// `G G^dagger / Tr(G G^dagger)`, `G` a square complex Gaussian matrix.
    HilbertSchmidt,
    /// Projector onto a normalized complex Gaussian vector.
    Pure,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::HilbertSchmidt => "hilbert-schmidt",
            Ensemble::Pure => "pure",
        })
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hilbert-schmidt" | "hs" => Ok(Ensemble::HilbertSchmidt),
            "pure" => Ok(Ensemble::Pure),
            _ => Err(Error::Parse(format!("unknown ensemble `{s}` (expected hilbert-schmidt or pure)"))),
        }
    }
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_pure_state<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<PureState> {
    check_dims(m, n)?;
    let v = (0..m * n).map(|_| gaussian(rng)).collect();
    PureState::normalized(m, n, v)
}

pub fn random_hs_state<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dims(m, n)?;
    let dim = m * n;
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(m, n, w.scale(1.0 / tr))
}

pub fn random_state<R: Rng + ?Sized>(m: usize, n: usize, ensemble: Ensemble, rng: &mut R) -> Result<DensityMatrix> {
    match ensemble {
        Ensemble::HilbertSchmidt => random_hs_state(m, n, rng),
        Ensemble::Pure => Ok(random_pure_state(m, n, rng)?.density()),
    }
}

/// Uniform point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-6 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// The `count` states a run with this seed sees, in order.
pub fn sample_states(m: usize, n: usize, count: usize, seed: u64, ensemble: Ensemble) -> Result<Vec<DensityMatrix>> {
    check_dims(m, n)?;
    let chunks: Vec<Vec<DensityMatrix>> = chunk_bounds(count)
        .into_par_iter()
        .map(|(k, len)| {
            let mut rng = stream_rng(seed, k as u64);
            (0..len).map(|_| random_state(m, n, ensemble, &mut rng)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn chunk_bounds(count: usize) -> Vec<(usize, usize)> {
    (0..count.div_ceil(CHUNK)).map(|k| (k, CHUNK.min(count - k * CHUNK))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub dims: (usize, usize),
    pub count: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
    /// States with `D < N^2`.
    pub violations: usize,
    /// Largest and smallest `N^2 - D`; absent for an empty run.
    pub max_gap: Option<f64>,
    pub min_gap: Option<f64>,
    /// States whose measures broke a theorem bound or failed to evaluate.
    pub bound_failures: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    violations: usize,
    max_gap: Option<f64>,
    min_gap: Option<f64>,
    bound_failures: usize,
}

impl Tally {
    fn observe(&mut self, report: &MeasureReport) {
        if report.gap > 0.0 {
            self.violations += 1;
        }
        self.max_gap = Some(self.max_gap.map_or(report.gap, |g| g.max(report.gap)));
        self.min_gap = Some(self.min_gap.map_or(report.gap, |g| g.min(report.gap)));
        if !report.bounds_ok {
            self.bound_failures += 1;
        }
    }

    fn merge(self, other: Tally) -> Tally {
        let pick = |a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> f64| match (a, b) {
            (Some(x), Some(y)) => Some(f(x, y)),
            (x, y) => x.or(y),
        };
        Tally {
            violations: self.violations + other.violations,
            max_gap: pick(self.max_gap, other.max_gap, f64::max),
            min_gap: pick(self.min_gap, other.min_gap, f64::min),
            bound_failures: self.bound_failures + other.bound_failures,
        }
    }
}

/// Samples `count` states and tallies `D < N^2` along with bound failures.
pub fn sample(m: usize, n: usize, count: usize, seed: u64, ensemble: Ensemble) -> Result<SampleSummary> {
    check_dims(m, n)?;
    let tally = chunk_bounds(count)
        .into_par_iter()
        .map(|(k, len)| -> Result<Tally> {
            let mut rng = stream_rng(seed, k as u64);
            let mut tally = Tally::default();
            for _ in 0..len {
                let rho = random_state(m, n, ensemble, &mut rng)?;
                match measure_report(&rho) {
                    Ok(report) => tally.observe(&report),
                    Err(e) if e.is_numerical_fault() => tally.bound_failures += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(SampleSummary {
        dims: (m, n),
        count,
        seed,
        ensemble,
        violations: tally.violations,
        max_gap: tally.max_gap,
        min_gap: tally.min_gap,
        bound_failures: tally.bound_failures,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub evaluated: usize,
    pub failed: usize,
}

impl CheckTally {
    fn record(&mut self, ok: bool) -> bool {
        self.evaluated += 1;
        if !ok {
            self.failed += 1;
        }
        ok
    }

    fn merge(self, o: CheckTally) -> CheckTally {
        CheckTally { evaluated: self.evaluated + o.evaluated, failed: self.failed + o.failed }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerifyChecks {
    /// Both negativity expressions agree.
    pub negativity_routes: CheckTally,
    /// Negative partial-transpose eigenvalues stay within `(m-1)(n-1)`.
    pub pt_cap: CheckTally,
    /// `0 <= D <= m/(m-1)`, `0 <= N <= 1`, `-m/(m-1) <= N^2 - D <= 1`.
    pub theorem_bounds: CheckTally,
    /// `Tr(Pi(rho)^2) = Tr(rho Pi(rho))` and the distance identity (m = 2).
    pub measurement_identity: CheckTally,
    /// Brute-force measurement search matches the closed form (m = 2).
    pub oracle: CheckTally,
}

impl VerifyChecks {
    fn merge(self, o: VerifyChecks) -> VerifyChecks {
        VerifyChecks {
            negativity_routes: self.negativity_routes.merge(o.negativity_routes),
            pt_cap: self.pt_cap.merge(o.pt_cap),
            theorem_bounds: self.theorem_bounds.merge(o.theorem_bounds),
            measurement_identity: self.measurement_identity.merge(o.measurement_identity),
            oracle: self.oracle.merge(o.oracle),
        }
    }

    pub fn failed(&self) -> usize {
        self.negativity_routes.failed
            + self.pt_cap.failed
            + self.theorem_bounds.failed
            + self.measurement_identity.failed
            + self.oracle.failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyFailure {
    pub index: usize,
    pub check: &'static str,
    pub detail: String,
    pub state: StateFile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dims: (usize, usize),
    pub count: usize,
    pub seed: u64,
    pub checks: VerifyChecks,
    /// States with `D < N^2` (informational).
    pub violations: usize,
    pub max_gap: Option<f64>,
    pub first_failure: Option<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.failed() == 0 && self.first_failure.is_none()
    }
}

struct ChunkOutcome {
    checks: VerifyChecks,
    tally: Tally,
    first_failure: Option<VerifyFailure>,
}

fn verify_one(
    index: usize,
    rho: &DensityMatrix,
    u: [f64; 3],
    checks: &mut VerifyChecks,
    tally: &mut Tally,
) -> Result<Option<(&'static str, String)>> {
    let (m, n) = rho.dims();
    let mut failure: Option<(&'static str, String)> = None;
    let mut fail = |name: &'static str, detail: String| {
        if failure.is_none() {
            failure = Some((name, detail));
        }
    };

    let (by_trace_norm, by_eigenvalues) = negativity_routes(rho)?;
    if !checks.negativity_routes.record((by_trace_norm - by_eigenvalues).abs() <= NEGATIVITY_ROUTE_TOL) {
        fail("negativity_routes", format!("trace-norm route {by_trace_norm} vs eigenvalue route {by_eigenvalues}"));
    }

    let count = rho.partial_transpose().hermitian_eigenvalues()?.negative_count();
    let cap = pt_negative_cap(m, n);
    if !checks.pt_cap.record(count <= cap) {
        fail("pt_cap", format!("{count} negative eigenvalues, cap {cap}"));
    }

    match measure_report(rho) {
        Ok(report) => {
            tally.observe(&report);
            if !checks.theorem_bounds.record(report.bounds_ok) {
                fail(
                    "theorem_bounds",
                    format!("N = {}, D = {}, N^2 - D = {}", report.negativity, report.discord, report.gap),
                );
            }
        }
        Err(e) if e.is_numerical_fault() => {
            checks.theorem_bounds.record(false);
            fail("theorem_bounds", e.to_string());
        }
        Err(e) => return Err(e),
    }

    if m == 2 {
        let (projected_purity, overlap) = measurement_identity_check(rho, u)?;
        let distance_sq = (rho.matrix() - &project_measurement(rho, u)?).hs_norm_sq();
        let purity_gap = rho.purity() - projected_purity;
        let ok = (projected_purity - overlap).abs() <= IDENTITY_TOL
            && (distance_sq - purity_gap).abs() <= IDENTITY_TOL
            && distance_sq <= 1.0 + IDENTITY_TOL;
        if !checks.measurement_identity.record(ok) {
            fail(
                "measurement_identity",
                format!("Tr(Pi^2) = {projected_purity}, Tr(rho Pi) = {overlap}, ||rho - Pi||^2 = {distance_sq}"),
            );
        }

        if index < ORACLE_SUBSAMPLE {
            let exact = geometric_discord(rho)?.value;
            let brute = gd_bruteforce_2xn(rho, ORACLE_RESOLUTION)?;
            if !checks.oracle.record((exact - brute).abs() <= ORACLE_TOL) {
                fail("oracle", format!("closed form {exact} vs brute force {brute}"));
            }
        }
    }
    Ok(failure)
}

/// Runs every invariant on `count` Hilbert-Schmidt random states. The states
/// are the same ones [`sample`] sees for that seed.
pub fn verify(m: usize, n: usize, count: usize, seed: u64) -> Result<VerifyReport> {
    check_dims(m, n)?;
    let outcome = chunk_bounds(count)
        .into_par_iter()
        .map(|(k, len)| -> Result<ChunkOutcome> {
            let mut rng = stream_rng(seed, k as u64);
            let mut aux = stream_rng(seed, AUX_STREAM_BASE + k as u64);
            let mut out =
                ChunkOutcome { checks: VerifyChecks::default(), tally: Tally::default(), first_failure: None };
            for i in 0..len {
                let index = k * CHUNK + i;
                let rho = random_hs_state(m, n, &mut rng)?;
                let u = random_unit_vector(&mut aux);
                let failed = verify_one(index, &rho, u, &mut out.checks, &mut out.tally)?;
                if let (Some((check, detail)), None) = (failed, &out.first_failure) {
                    out.first_failure =
                        Some(VerifyFailure { index, check, detail, state: StateFile::from_state(&rho) });
                }
            }
            Ok(out)
        })
        .try_reduce(
            || ChunkOutcome { checks: VerifyChecks::default(), tally: Tally::default(), first_failure: None },
            |a, b| {
                let first_failure = match (a.first_failure, b.first_failure) {
                    (Some(x), Some(y)) => Some(if x.index <= y.index { x } else { y }),
                    (x, y) => x.or(y),
                };
                Ok(ChunkOutcome { checks: a.checks.merge(b.checks), tally: a.tally.merge(b.tally), first_failure })
            },
        )?;
    Ok(VerifyReport {
        dims: (m, n),
        count,
        seed,
        checks: outcome.checks,
        violations: outcome.tally.violations,
        max_gap: outcome.tally.max_gap,
        first_failure: outcome.first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sample() {
        let s = sample(2, 3, 0, 1, Ensemble::HilbertSchmidt).unwrap();
        assert_eq!((s.count, s.violations, s.bound_failures), (0, 0, 0));
        assert!(s.max_gap.is_none() && s.min_gap.is_none());
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_states(2, 3, 130, 9, Ensemble::HilbertSchmidt).unwrap();
        let b = sample_states(2, 3, 130, 9, Ensemble::HilbertSchmidt).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 130);
        let c = sample_states(2, 3, 130, 10, Ensemble::HilbertSchmidt).unwrap();
        assert_ne!(a[0], c[0]);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(matches!(sample(3, 2, 5, 0, Ensemble::Pure), Err(Error::InvalidDimension(_))));
        assert!(matches!(verify(1, 2, 5, 0), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn ensemble_names() {
        assert_eq!("hilbert-schmidt".parse::<Ensemble>().unwrap(), Ensemble::HilbertSchmidt);
        assert_eq!("pure".parse::<Ensemble>().unwrap(), Ensemble::Pure);
        assert!("ginibre".parse::<Ensemble>().is_err());
        assert_eq!(Ensemble::HilbertSchmidt.to_string(), "hilbert-schmidt");
    }

    #[test]
    fn pure_ensemble_gives_rank_one() {
        let mut rng = stream_rng(3, 0);
        let rho = random_state(2, 3, Ensemble::Pure, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_verify_run_passes() {
        let r = verify(2, 3, 30, 7).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks.oracle.evaluated, ORACLE_SUBSAMPLE);
        assert_eq!(r.checks.measurement_identity.evaluated, 30);
    }
}
