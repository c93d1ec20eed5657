//! Parameter sweeps over the violating families, written as CSV.
//!
//! A sweep of `steps` rows over `[lo, hi]` samples the half-open interval
//! `(lo, hi]` at `lo + i (hi - lo) / steps` for `i = 1..=steps`, so that
//! ranges with an open lower end (rho2 on `(0, 1]`) need no special casing.
//! When `lo == hi` every row sits at that single value.
//!
//! For rho1 the swept parameter is `c = a/b` with `b = 1`, and two extra
//! columns carry the closed-form `D` and `N^2`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{build, rho1_closed_forms, Family, FamilySpec, RangePolicy};
use crate::measures::{geometric_discord, negativity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub discord: f64,
    pub negativity_sq: f64,
    /// `negativity_sq - discord`.
    pub gap: f64,
    pub closed_form_discord: Option<f64>,
    pub closed_form_negativity_sq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub policy: RangePolicy,
}

impl SweepConfig {
    pub fn new(family: Family, lo: f64, hi: f64, steps: usize) -> Self {
        Self { family, lo, hi, steps, policy: RangePolicy::Enforce }
    }

    pub fn allow_out_of_range(mut self, allow: bool) -> Self {
        self.policy = if allow { RangePolicy::AllowOutOfRange } else { RangePolicy::Enforce };
        self
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.lo > self.hi {
            return Err(Error::InvalidRange(format!("[{}, {}]", self.lo, self.hi)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidRange("steps must be at least 1".into()));
        }
        let h = (self.hi - self.lo) / self.steps as f64;
        Ok((1..=self.steps).map(|i| if i == self.steps { self.hi } else { self.lo + i as f64 * h }).collect())
    }
}

fn spec_at(family: Family, param: f64) -> FamilySpec {
    match family {
        Family::Rho1 => FamilySpec::rho1(param, 1.0),
        other => FamilySpec::single(other, param),
    }
}

fn row_at(family: Family, param: f64, policy: RangePolicy) -> Result<SweepRow> {
    let rho = build(&spec_at(family, param), policy)?;
    let n = negativity(&rho)?;
    let negativity_sq = n * n;
    let discord = geometric_discord(&rho)?.value;
    let closed = match family {
        Family::Rho1 => Some(rho1_closed_forms(param, 1.0)?),
        _ => None,
    };
    Ok(SweepRow {
        param,
        discord,
        negativity_sq,
        gap: negativity_sq - discord,
        closed_form_discord: closed.map(|c| c.discord),
        closed_form_negativity_sq: closed.map(|c| c.negativity_sq),
    })
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.grid()?.into_par_iter().map(|p| row_at(config.family, p, config.policy)).collect()
}

/// CSV with header `param,discord,negativity_sq,gap` plus the two closed-form
/// columns for rho1. Floats use the shortest representation that round-trips.
pub fn write_csv<W: Write>(family: Family, rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["param", "discord", "negativity_sq", "gap"];
    let with_closed = family == Family::Rho1;
    if with_closed {
        header.extend(["closed_form_discord", "closed_form_negativity_sq"]);
    }
    w.write_record(&header)?;
    for row in rows {
        let mut record =
            vec![row.param.to_string(), row.discord.to_string(), row.negativity_sq.to_string(), row.gap.to_string()];
        if with_closed {
            record.push(row.closed_form_discord.map(|v| v.to_string()).unwrap_or_default());
            record.push(row.closed_form_negativity_sq.map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
