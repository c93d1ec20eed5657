//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::time::Instant;

use common::{discordneg, field, json, read_csv, stderr};
use discordneg::bloch::{decompose, g_matrix, reconstruct};
use discordneg::families::rho1_negativity;
use discordneg::matrix::RealMatrix;
use discordneg::sampling::{random_pure_state, sample_states, stream_rng, ORACLE_RESOLUTION};
use discordneg::{
    build, gd_bruteforce_2xn, geometric_discord, maximal_state, negativity, pure_gd, pure_negativity, schmidt,
    violates, DensityMatrix, Ensemble, FamilySpec, RangePolicy, StateFile,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Collects sub-check results; the criterion passes only if all do.
#[derive(Default)]
struct Checks {
    parts: Vec<(bool, String)>,
}

impl Checks {
    fn add(&mut self, pass: bool, detail: impl Into<String>) {
        self.parts.push((pass, detail.into()));
    }

    fn outcome(self) -> Outcome {
        let pass = self.parts.iter().all(|(p, _)| *p);
        let detail = self
            .parts
            .iter()
            .map(|(p, d)| format!("[{}] {d}", if *p { "ok" } else { "FAILED" }))
            .collect::<Vec<_>>()
            .join("; ");
        Outcome::new(pass, detail)
    }
}

fn rho1(a: f64, b: f64) -> DensityMatrix {
    build(&FamilySpec::rho1(a, b), RangePolicy::Enforce).unwrap()
}

/// 10 x 10 grid of (a, b), a in [-3, 3], b in [0.25, 2.5].
fn ab_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            out.push((-3.0 + 6.0 * i as f64 / 9.0, 0.25 * (j + 1) as f64));
        }
    }
    out
}

fn max_dev(got: impl IntoIterator<Item = f64>, want: impl IntoIterator<Item = f64>) -> f64 {
    got.into_iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho1_5_2.json");
    StateFile::from_state(&rho1(5.0, 2.0)).write(&path).unwrap();
    let start = Instant::now();
    let out = discordneg(["--json", "analyze", path.to_str().unwrap()]);
    let elapsed = start.elapsed().as_secs_f64();
    if !out.status.success() {
        return Outcome::new(false, format!("analyze failed: {}", stderr(&out)));
    }
    let v = json(&out);
    let gap_err = (field(&v, "gap") - (232.0 - 32.0 * 26f64.sqrt()) / 841.0).abs();
    let d_err = (field(&v, "discord") - 200.0 / 841.0).abs();
    let count = v["pt_negative_count"].as_u64().unwrap();
    let mut c = Checks::default();
    c.add(gap_err <= 1e-10, format!("|gap - (232-32sqrt26)/841| = {gap_err:.1e}"));
    c.add(d_err <= 1e-10, format!("|D - 200/841| = {d_err:.1e}"));
    c.add(count == 2, format!("pt negative count {count}"));
    c.add(elapsed < 1.0, format!("runtime {elapsed:.3} s"));
    c.outcome()
}

fn criterion_2() -> Outcome {
    let mut spec_err = 0.0f64;
    let mut pt_err = 0.0f64;
    for (a, b) in ab_grid() {
        let rho = rho1(a, b);
        let spec = rho.matrix().hermitian_eigenvalues().unwrap();
        spec_err = spec_err.max(max_dev(spec.iter(), [0.5, 0.5, 0.0, 0.0, 0.0, 0.0]));

        let s = a * a + b * b;
        let root = b * (b * b + 4.0 * a * a).sqrt();
        let mut want = [a * a / (2.0 * s), (b * b + root) / (4.0 * s), (b * b - root) / (4.0 * s)]
            .into_iter()
            .flat_map(|l| [l, l])
            .collect::<Vec<_>>();
        want.sort_by(|x, y| y.total_cmp(x));
        let pt = rho.partial_transpose().hermitian_eigenvalues().unwrap();
        pt_err = pt_err.max(max_dev(pt.iter(), want));
    }
    let mut c = Checks::default();
    c.add(spec_err <= 1e-10, format!("spectrum max dev {spec_err:.1e}"));
    c.add(pt_err <= 1e-10, format!("PT spectrum max dev {pt_err:.1e} over 100 points"));
    c.outcome()
}

fn criterion_3() -> Outcome {
    let r3 = 3f64.sqrt();
    let mut worst = 0.0f64;
    for (a, b) in ab_grid() {
        let s = a * a + b * b;
        let bf = decompose(&rho1(a, b)).unwrap();

        let mut y = vec![0.0; 8];
        y[2] = (3.0 * a * a - 6.0 * b * b) / (4.0 * s);
        y[7] = -(a * a - 2.0 * b * b) * r3 / (4.0 * s);
        let off = 3.0 * a * b / (2.0 * s);
        let mut t = RealMatrix::zeros(3, 8);
        t[(0, 0)] = off;
        t[(0, 5)] = off;
        t[(1, 1)] = -off;
        t[(1, 6)] = -off;
        t[(2, 2)] = 3.0 * a * a / (4.0 * s);
        t[(2, 7)] = 3.0 * r3 * a * a / (4.0 * s);
        let diag3 = |p: f64, q: f64| {
            let mut m = RealMatrix::zeros(3, 3);
            m[(0, 0)] = p;
            m[(1, 1)] = p;
            m[(2, 2)] = q;
            m
        };
        let ttt = diag3(9.0 * a * a * b * b / (2.0 * s * s), 9.0 * a.powi(4) / (4.0 * s * s));
        let g = diag3(3.0 * a * a * b * b / (s * s), 3.0 * a.powi(4) / (2.0 * s * s));

        worst = worst
            .max(max_dev(bf.x.iter().copied(), [0.0; 3]))
            .max(max_dev(bf.y.iter().copied(), y))
            .max(bf.t.max_abs_diff(&t))
            .max(bf.t.gram().max_abs_diff(&ttt))
            .max(g_matrix(&bf).matrix().max_abs_diff(&g));
    }

    let mut round_trip = 0.0f64;
    for rho in sample_states(2, 3, 200, 3, Ensemble::HilbertSchmidt).unwrap() {
        let back = reconstruct(&decompose(&rho).unwrap()).unwrap();
        round_trip = round_trip.max(back.max_abs_diff(rho.matrix()));
    }
    let mut c = Checks::default();
    c.add(worst <= 1e-10, format!("x, y, T, TT^T, G max dev {worst:.1e} over 100 points"));
    c.add(round_trip <= 1e-10, format!("round trip max dev {round_trip:.1e} on 200 states"));
    c.outcome()
}

fn criterion_4() -> Outcome {
    let mut n_err = 0.0f64;
    let mut d_err = 0.0f64;
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for b in [0.5, 1.0, 2.0, 3.0, 5.0] {
        for i in 0..100 {
            let c = -6.0 + 12.0 * (i as f64 + 0.5) / 100.0;
            let a = c * b;
            let rho = rho1(a, b);
            n_err = n_err.max((negativity(&rho).unwrap() - rho1_negativity(a, b)).abs());
            let s = a * a + b * b;
            let closed_d = if a * a >= 2.0 * b * b {
                2.0 * a * a * b * b / (s * s)
            } else {
                (a.powi(4) + 2.0 * a * a * b * b) / (2.0 * s * s)
            };
            d_err = d_err.max((geometric_discord(&rho).unwrap().value - closed_d).abs());

            let boundary = a * a - 2.0 * b * b;
            if boundary.abs() > 1e-6 {
                compared += 1;
                let v = violates(&FamilySpec::rho1(a, b)).unwrap();
                if v.violates != (boundary > 0.0) {
                    mismatches.push((a, b, v.margin));
                }
            }
        }
    }
    let mut ch = Checks::default();
    ch.add(n_err <= 1e-10, format!("negativity vs closed form max dev {n_err:.1e} over 500 points"));
    ch.add(d_err <= 1e-10, format!("D vs piecewise closed form max dev {d_err:.1e}"));
    let detail = match mismatches.first() {
        None => format!("predicate == (a^2 > 2b^2) on all {compared} points"),
        Some((a, b, gap)) => format!(
            "predicate differs from (a^2 > 2b^2) on {} of {compared} points, e.g. a = {a:.4}, b = {b}: N^2 - D = {gap:.3e}",
            mismatches.len()
        ),
    };
    ch.add(mismatches.is_empty(), detail);
    ch.outcome()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut total = 0;
    for (n, count) in [(3, 200), (4, 100)] {
        for rho in sample_states(2, n, count, 5, Ensemble::HilbertSchmidt).unwrap() {
            let exact = geometric_discord(&rho).unwrap().value;
            let brute = gd_bruteforce_2xn(&rho, ORACLE_RESOLUTION).unwrap();
            worst = worst.max((exact - brute).abs());
            total += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut c = Checks::default();
    c.add(worst <= 1e-5, format!("max |brute - closed| {worst:.1e} over {total} states"));
    c.add(elapsed < 60.0, format!("runtime {elapsed:.1} s"));
    c.outcome()
}

fn criterion_6() -> Outcome {
    let mut n_err = 0.0f64;
    let mut d_err = 0.0f64;
    for (m, n) in [(2, 3), (3, 3)] {
        let mut rng = stream_rng(6, m as u64);
        for _ in 0..200 {
            let phi = random_pure_state(m, n, &mut rng).unwrap();
            let cs = schmidt(&phi).unwrap();
            let rho = phi.density();
            n_err = n_err.max((pure_negativity(&cs, m) - negativity(&rho).unwrap()).abs());
            if m == 2 {
                d_err = d_err.max((pure_gd(&cs, m) - geometric_discord(&rho).unwrap().value).abs());
            }
        }
    }
    let mut max_err = 0.0f64;
    for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        let rho = maximal_state(m, n).unwrap();
        max_err = max_err
            .max((negativity(&rho).unwrap() - 1.0).abs())
            .max((geometric_discord(&rho).unwrap().value - 1.0).abs());
    }
    let mut c = Checks::default();
    c.add(n_err <= 1e-8, format!("pure negativity max dev {n_err:.1e}"));
    c.add(d_err <= 1e-8, format!("pure D max dev {d_err:.1e}"));
    c.add(max_err <= 1e-12, format!("maximal state |N - 1|, |D - 1| <= {max_err:.1e}"));
    c.outcome()
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut c = Checks::default();
    for dims in ["2x2", "2x3", "3x3"] {
        let artifact = dir.path().join(format!("{dims}.json"));
        let out = discordneg([
            "--json",
            "verify",
            "--dims",
            dims,
            "--count",
            "1000",
            "--seed",
            "7",
            "--failure-out",
            artifact.to_str().unwrap(),
        ]);
        let v = json(&out);
        let checks = &v["checks"];
        let failed: u64 = ["negativity_routes", "pt_cap", "theorem_bounds", "measurement_identity", "oracle"]
            .iter()
            .map(|k| checks[k]["failed"].as_u64().unwrap())
            .sum();
        let identity = checks["measurement_identity"]["evaluated"].as_u64().unwrap();
        let violations = v["violations"].as_u64().unwrap();
        let mut pass = out.status.success() && failed == 0;
        let mut detail =
            format!("{dims}: exit {:?}, {failed} failed checks, {identity} identity checks", out.status.code());
        if dims == "2x2" {
            pass &= violations == 0;
            detail.push_str(&format!(", {violations} D < N^2"));
        }
        c.add(pass, detail);
    }
    c.outcome()
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut c = Checks::default();
    let runs: [(&str, f64, f64, usize); 4] =
        [("rho1", 0.0, 6.0, 600), ("rho2", 0.0, 1.0, 100), ("rho3", 1.75, 4.75, 100), ("rho4", 3.5, 8.5, 100)];
    for (family, lo, hi, steps) in runs {
        let mut bytes = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{family}-{k}.csv"));
            let out = discordneg([
                "sweep",
                "--family",
                family,
                "--from",
                &lo.to_string(),
                "--to",
                &hi.to_string(),
                "--steps",
                &steps.to_string(),
                "--out",
                path.to_str().unwrap(),
            ]);
            if !out.status.success() {
                c.add(false, format!("{family}: sweep failed: {}", stderr(&out)));
            }
            bytes.push(std::fs::read(&path).unwrap_or_default());
        }
        c.add(!bytes[0].is_empty() && bytes[0] == bytes[1], format!("{family}: byte-identical reruns"));

        let (_, rows) = read_csv(&dir.path().join(format!("{family}-0.csv")));
        if family == "rho1" {
            let closed = rows.iter().map(|r| (r[1] - r[4]).abs().max((r[2] - r[5]).abs())).fold(0.0, f64::max);
            c.add(closed <= 1e-10, format!("rho1: closed-form columns max dev {closed:.1e}"));
            let root2 = 2f64.sqrt();
            let wrong: Vec<&Vec<f64>> =
                rows.iter().filter(|r| if r[0] <= root2 { r[3] > 0.0 } else { r[3] <= 0.0 }).collect();
            let first_positive = rows.iter().find(|r| r[3] > 0.0).map(|r| r[0]);
            let detail = match wrong.first() {
                None => "rho1: gap <= 0 for c <= sqrt2 and gap > 0 for c > sqrt2".to_string(),
                Some(r) => format!(
                    "rho1: {} rows contradict a sign change at c = sqrt2 (e.g. c = {}, gap = {:.3e}); gap first positive at c = {:?}",
                    wrong.len(),
                    r[0],
                    r[3],
                    first_positive
                ),
            };
            c.add(wrong.is_empty(), detail);
        } else {
            let interior: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] > lo && r[0] < hi).collect();
            let min_gap = interior.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min);
            c.add(min_gap > 0.0, format!("{family}: min interior gap {min_gap:.3e} over {} points", interior.len()));
        }
    }
    c.outcome()
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("rho1(5,2) end-to-end analyze", criterion_1),
        ("rho1 spectra and PT spectra", criterion_2),
        ("Bloch data of rho1 and round trip", criterion_3),
        ("rho1 closed forms and violation predicate", criterion_4),
        ("brute-force oracle vs closed-form D", criterion_5),
        ("pure-state formulas and maximal state", criterion_6),
        ("verify on 2x2, 2x3, 3x3", criterion_7),
        ("family sweeps", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {} {} {name} ({:.1} s): {}",
            k + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
