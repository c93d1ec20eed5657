use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use discordneg::sampling::VerifyReport;
use discordneg::sweep::write_csv;
use discordneg::{
    measure_report, sample, sweep, verify, Ensemble, Error, Family, MeasureReport, SampleSummary, StateFile,
    SweepConfig,
};

/// Geometric discord and negativity of bipartite quantum states.
#[derive(Debug, Parser)]
#[command(name = "discordneg", version)]
struct Cli {
    /// Print machine-readable JSON instead of a text report.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measures of a state read from a state file.
    Analyze { file: PathBuf },
    /// Sweep a family parameter and write N^2, D and the gap as CSV.
    Sweep {
        #[arg(long)]
        family: Family,
        #[arg(long = "from", allow_negative_numbers = true)]
        lo: f64,
        #[arg(long = "to", allow_negative_numbers = true)]
        hi: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Permit parameters outside the family's documented window.
        #[arg(long)]
        allow_out_of_range: bool,
    },
    /// Count D < N^2 among random states.
    Sample {
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "hilbert-schmidt")]
        ensemble: Ensemble,
    },
    /// Check the negativity, partial-transpose and discord invariants on random states.
    Verify {
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Where the first failing state is written.
        #[arg(long, default_value = "verify-failure.json")]
        failure_out: PathBuf,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected MxN, got `{s}`"))?;
    let m = m.trim().parse().map_err(|_| format!("bad dimension `{m}`"))?;
    let n = n.trim().parse().map_err(|_| format!("bad dimension `{n}`"))?;
    Ok((m, n))
}

const EXIT_INVALID: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical_fault() { EXIT_VIOLATION } else { EXIT_INVALID })
        }
    }
}

fn run(cli: &Cli) -> discordneg::Result<ExitCode> {
    match &cli.command {
        Command::Analyze { file } => analyze(file, cli.json),
        Command::Sweep { family, lo, hi, steps, out, allow_out_of_range } => {
            let config = SweepConfig::new(*family, *lo, *hi, *steps).allow_out_of_range(*allow_out_of_range);
            let rows = sweep(&config)?;
            let mut writer = BufWriter::new(File::create(out)?);
            write_csv(*family, &rows, &mut writer)?;
            writer.flush()?;
            if cli.json {
                let summary = serde_json::json!({
                    "family": family.name(),
                    "rows": rows.len(),
                    "out": out.display().to_string(),
                    "min_gap": rows.iter().map(|r| r.gap).reduce(f64::min),
                    "max_gap": rows.iter().map(|r| r.gap).reduce(f64::max),
                });
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                println!("wrote {} rows for {} to {}", rows.len(), family, out.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { dims: (m, n), count, seed, ensemble } => {
            let summary = sample(*m, *n, *count, *seed, *ensemble)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                print_sample(&summary);
            }
            Ok(if summary.bound_failures > 0 { ExitCode::from(EXIT_VIOLATION) } else { ExitCode::SUCCESS })
        }
        Command::Verify { dims: (m, n), count, seed, failure_out } => {
            let report = verify(*m, *n, *count, *seed)?;
            if let Some(failure) = &report.first_failure {
                failure.state.write(failure_out)?;
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print_verify(&report, failure_out);
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VIOLATION) })
        }
    }
}

fn analyze(path: &Path, json: bool) -> discordneg::Result<ExitCode> {
    let state = StateFile::read(path)?.to_state()?;
    let report = measure_report(&state)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_report(&report);
    }
    if !report.bounds_ok {
        eprintln!("error: {}", Error::BoundViolation("measures outside the theorem bounds".into()));
        return Ok(ExitCode::from(EXIT_VIOLATION));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report(r: &MeasureReport) {
    let kind = if r.discord_exact { "exact" } else { "lower bound" };
    println!("state             {} x {}", r.m, r.n);
    println!("negativity N      {:.12}", r.negativity);
    println!("N^2               {:.12}", r.negativity_sq);
    println!("discord D         {:.12} ({kind})", r.discord);
    println!("gap N^2 - D       {:.12}", r.gap);
    println!("D < N^2           {}", if r.violates_discord_bound() { "yes" } else { "no" });
    println!("pt negative       {} (cap {})", r.pt_negative_count, r.pt_negative_cap);
    println!("bounds            {}", if r.bounds_ok { "ok" } else { "VIOLATED" });
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |g| format!("{g:.12}"))
}

fn print_sample(s: &SampleSummary) {
    let rate = if s.count == 0 { 0.0 } else { 100.0 * s.violations as f64 / s.count as f64 };
    println!("dims              {} x {}", s.dims.0, s.dims.1);
    println!("ensemble          {}", s.ensemble);
    println!("count             {}", s.count);
    println!("seed              {}", s.seed);
    println!("violations        {} ({rate:.3}%)", s.violations);
    println!("max gap           {}", fmt_opt(s.max_gap));
    println!("min gap           {}", fmt_opt(s.min_gap));
    println!("bound failures    {}", s.bound_failures);
}

fn print_verify(r: &VerifyReport, failure_out: &Path) {
    println!("verify {} x {}, {} states, seed {}", r.dims.0, r.dims.1, r.count, r.seed);
    let c = &r.checks;
    for (name, t) in [
        ("negativity routes", c.negativity_routes),
        ("pt negative cap", c.pt_cap),
        ("theorem bounds", c.theorem_bounds),
        ("measurement identity", c.measurement_identity),
        ("oracle", c.oracle),
    ] {
        if t.evaluated == 0 {
            println!("  {name:<22} skipped");
        } else {
            println!("  {name:<22} {}/{} ok", t.evaluated - t.failed, t.evaluated);
        }
    }
    println!("violations (D < N^2) {}", r.violations);
    println!("max gap              {}", fmt_opt(r.max_gap));
    if let Some(f) = &r.first_failure {
        println!("first failure        state #{} ({}): {}", f.index, f.check, f.detail);
        println!("failing state        {}", failure_out.display());
    }
    println!("result               {}", if r.passed() { "PASS" } else { "FAIL" });
}
