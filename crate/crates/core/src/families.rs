//! Four parametrized `2 x 3` families whose members satisfy `D < N^2`.
//!
//! All four share one sparsity pattern (rows/cols 2 and 3 vanish):
//!
//! ```text
//! p * [ d1  0  0  0  o  0 ]
//!     [ 0  d2  0  0  0  o ]
//!     [ 0   0  0  0  0  0 ]
//!     [ 0   0  0  0  0  0 ]
//!     [ o   0  0  0 d2  0 ]
//!     [ 0   o  0  0  0 d1 ]
//! ```
//!
//! | family | p            | d1     | d2  | o      | range          |
//! |--------|--------------|--------|-----|--------|----------------|
//! | rho1   | 1/(2(a²+b²)) | a²     | b²  | ab     | b > 0          |
//! | rho2   | 1/(8a+2)     | 3a+1   | a   | 2a     | 0 < a ≤ 1      |
//! | rho3   | 1/(8a+2)     | 3a+1   | a   | 2a−1   | 7/4 ≤ a ≤ 19/4 |
//! | rho4   | 1/(8a+2)     | 3a+1   | a   | 2a−2   | 7/2 ≤ a ≤ 17/2 |

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StateViolation};
use crate::matrix::ComplexMatrix;
use crate::measures::measure_report;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rho1,
    Rho2,
    Rho3,
    Rho4,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Rho1, Family::Rho2, Family::Rho3, Family::Rho4];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rho1 => "rho1",
            Family::Rho2 => "rho2",
            Family::Rho3 => "rho3",
            Family::Rho4 => "rho4",
        }
    }

    /// Closed interval of `a` for the one-parameter families; the lower end
    /// of rho2 is open.
    pub fn a_range(self) -> Option<(f64, f64)> {
        match self {
            Family::Rho1 => None,
            Family::Rho2 => Some((0.0, 1.0)),
            Family::Rho3 => Some((1.75, 4.75)),
            Family::Rho4 => Some((3.5, 8.5)),
        }
    }

    /// Shift `k` in the off-diagonal entry `2a - k` of rho2..rho4.
    fn offdiag_shift(self) -> f64 {
        match self {
            Family::Rho1 | Family::Rho2 => 0.0,
            Family::Rho3 => 1.0,
            Family::Rho4 => 2.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rho1" => Ok(Family::Rho1),
            "rho2" => Ok(Family::Rho2),
            "rho3" => Ok(Family::Rho3),
            "rho4" => Ok(Family::Rho4),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// A family member: `params` is `[a, b]` for rho1 and `[a]` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub params: Vec<f64>,
}

impl FamilySpec {
    pub fn rho1(a: f64, b: f64) -> Self {
        Self { family: Family::Rho1, params: vec![a, b] }
    }

    pub fn single(family: Family, a: f64) -> Self {
        Self { family, params: vec![a] }
    }

    fn expect_params(&self) -> Result<()> {
        let want = if self.family == Family::Rho1 { 2 } else { 1 };
        if self.params.len() != want {
            return Err(Error::InvalidParameters(format!(
                "{} takes {want} parameter(s), got {}",
                self.family,
                self.params.len()
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameters("parameters must be finite".into()));
        }
        Ok(())
    }

    /// Whether the parameters lie in the family's documented window.
    pub fn in_range(&self) -> bool {
        match (self.family, self.family.a_range()) {
            (Family::Rho1, _) => self.params.get(1).is_some_and(|&b| b > 0.0),
            (Family::Rho2, Some((lo, hi))) => self.params[0] > lo && self.params[0] <= hi,
            (_, Some((lo, hi))) => (lo..=hi).contains(&self.params[0]),
            (_, None) => unreachable!("only rho1 lacks an a-range"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// Reject parameters outside the documented window.
    #[default]
    Enforce,
    /// Build anything that still yields a valid state.
    AllowOutOfRange,
}

struct Template {
    scale: f64,
    d1: f64,
    d2: f64,
    off: f64,
}

impl Template {
    fn of(spec: &FamilySpec) -> Result<Self> {
        let t = match spec.family {
            Family::Rho1 => {
                let (a, b) = (spec.params[0], spec.params[1]);
                let norm = a * a + b * b;
                if norm == 0.0 {
                    return Err(Error::InvalidParameters("rho1 needs a^2 + b^2 > 0".into()));
                }
                Template { scale: 1.0 / (2.0 * norm), d1: a * a, d2: b * b, off: a * b }
            }
            fam => {
                let a = spec.params[0];
                let denom = 8.0 * a + 2.0;
                if denom == 0.0 {
                    return Err(Error::InvalidParameters(format!("{fam} is undefined at a = -1/4")));
                }
                Template { scale: 1.0 / denom, d1: 3.0 * a + 1.0, d2: a, off: 2.0 * a - fam.offdiag_shift() }
            }
        };
        Ok(t)
    }

    fn matrix(&self) -> ComplexMatrix {
        let mut raw = ComplexMatrix::zeros(6, 6);
        let re = |x: f64| Complex64::new(x * self.scale, 0.0);
        raw[(0, 0)] = re(self.d1);
        raw[(5, 5)] = re(self.d1);
        raw[(1, 1)] = re(self.d2);
        raw[(4, 4)] = re(self.d2);
        for (i, j) in [(0, 4), (4, 0), (1, 5), (5, 1)] {
            raw[(i, j)] = re(self.off);
        }
        raw
    }
}

/// The un-validated 6x6 matrix of a family member.
pub fn raw_matrix(spec: &FamilySpec) -> Result<ComplexMatrix> {
    spec.expect_params()?;
    Ok(Template::of(spec)?.matrix())
}

pub fn build(spec: &FamilySpec, policy: RangePolicy) -> Result<DensityMatrix> {
    spec.expect_params()?;
    if policy == RangePolicy::Enforce && !spec.in_range() {
        let (param, value) = match spec.family {
            Family::Rho1 => ("b", spec.params[1]),
            _ => ("a", spec.params[0]),
        };
        return Err(Error::OutOfRange { family: spec.family.name(), param, value });
    }
    match DensityMatrix::new(2, 3, Template::of(spec)?.matrix()) {
        Err(Error::InvalidState(StateViolation::Positivity { min_eigenvalue })) => {
            Err(Error::NotAState { min_eigenvalue })
        }
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub negativity_sq: f64,
    pub discord: f64,
}

/// Closed-form `N^2` and `D` of rho1(a, b) in terms of `c = a/b`.
pub fn rho1_closed_forms(a: f64, b: f64) -> Result<ClosedForms> {
    if b.is_nan() || b <= 0.0 {
        return Err(Error::OutOfRange { family: "rho1", param: "b", value: b });
    }
    let c2 = (a / b).powi(2);
    let denom = (c2 + 1.0).powi(2);
    let negativity_sq = (4.0 * c2 + 2.0 - 2.0 * (4.0 * c2 + 1.0).sqrt()) / denom;
    let discord = if c2 >= 2.0 { 2.0 * c2 / denom } else { (c2 * c2 + 2.0 * c2) / (2.0 * denom) };
    Ok(ClosedForms { negativity_sq, discord })
}

/// Closed-form negativity of rho1(a, b): `(b sqrt(b^2 + 4a^2) - b^2) / (a^2 + b^2)`.
pub fn rho1_negativity(a: f64, b: f64) -> f64 {
    (b * (b * b + 4.0 * a * a).sqrt() - b * b) / (a * a + b * b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// `N^2 - D > 0`.
    pub violates: bool,
    /// `N^2 - D`.
    pub margin: f64,
    /// For rho1, the analytic criterion `a^2 > 2 b^2`.
    pub analytic: Option<bool>,
}

/// Evaluates `N^2 - D` numerically for an in-range family member.
pub fn violates(spec: &FamilySpec) -> Result<Violation> {
    violates_with(spec, RangePolicy::Enforce)
}

pub fn violates_with(spec: &FamilySpec, policy: RangePolicy) -> Result<Violation> {
    let rho = build(spec, policy)?;
    let report = measure_report(&rho)?;
    let analytic = match spec.family {
        Family::Rho1 => Some(spec.params[0].powi(2) > 2.0 * spec.params[1].powi(2)),
        _ => None,
    };
    Ok(Violation { violates: report.gap > 0.0, margin: report.gap, analytic })
}
