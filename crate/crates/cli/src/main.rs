use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use fivesq::arith::{factor, FactorBudget};
use fivesq::generator::{generate, verify_table};
use fivesq::local::{local_conditions, verify_local_via_points, LocalVerdict};
use fivesq::mw::MwTable;
use fivesq::pipeline::{parse_stages, run_sieve, write_rows, write_structured, Format, SieveConfig};
use fivesq::quintic::search_rational_points;
use fivesq::ternary::{representation_count, rank_zero_certificate, E0_FIRST, E0_SECOND, E2_FIRST, E2_SECOND};
use fivesq::Error;
use num_bigint::BigInt;

#[derive(Parser)]
#[command(name = "fivesq", version, about = "Sieve for five squares in arithmetic progression over Q(sqrt D)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Mordell-Weil sieve table.
    Mwtable {
        #[arg(long)]
        qmax: u64,
        /// Largest order of (6, 24) mod q that gets a residue set.
        #[arg(long)]
        omax: u64,
        /// Write the table here; without it the rows are printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sieve stages over a range of squarefree D.
    Sieve {
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value = "local,mw,divisor,ternary")]
        stages: String,
        #[arg(long)]
        mwtable: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "rows")]
        format: Format,
        /// `survivors` or `all`.
        #[arg(long, default_value = "survivors")]
        emit: EmitMode,
        #[arg(long, default_value_t = 100_000)]
        chunk_size: u64,
        #[arg(long, hide = true)]
        stop_after_chunks: Option<u64>,
    },
    /// Generate the progressions from multiples of the generator.
    Generate {
        /// Generate n = 1..=N.
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 10_000)]
        factor_budget_ms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON lines, one record per n.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check the bundled published rows (n <= 8) without factoring.
        #[arg(long)]
        verify_table: bool,
    },
    /// Search rational points of C_D by height.
    Search {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        height: u64,
    },
    /// Rank-zero certificate from ternary form counts.
    Ternary {
        #[arg(long)]
        d: u64,
    },
    /// Local conditions and exhaustive point counts mod small primes.
    Localcheck {
        #[arg(long, allow_hyphen_values = true)]
        d: BigInt,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[arg(long, default_value_t = 10_000)]
        factor_budget_ms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy)]
enum EmitMode {
    Survivors,
    All,
}

impl FromStr for EmitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "survivors" => Ok(EmitMode::Survivors),
            "all" => Ok(EmitMode::All),
            _ => Err(format!("unknown emit mode {s:?}")),
        }
    }
}

enum Failure {
    Usage(String),
    Incompatible(String),
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Incompatible(_) | Error::Json(_) => Failure::Incompatible(e.to_string()),
            Error::InvalidArgument(_) | Error::Parse(_) | Error::Io(_) | Error::BoundExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Assertion(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_mwtable(qmax: u64, omax: u64, out: Option<PathBuf>) -> Result<(), Failure> {
    let table = MwTable::build(qmax, omax)?;
    match out {
        Some(path) => {
            table.save(&path)?;
            eprintln!(
                "{} records, {} divisor primes, hash {}",
                table.records.len(),
                table.divisors.len(),
                table.hash()?
            );
        }
        None => {
            let mut w = output(None)?;
            for r in &table.records {
                writeln!(w, "{r}")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sieve(
    min: u64,
    max: u64,
    stages: &str,
    mwtable: Option<PathBuf>,
    jobs: Option<usize>,
    checkpoint: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Format,
    mode: EmitMode,
    chunk_size: u64,
    stop_after_chunks: Option<u64>,
) -> Result<(), Failure> {
    let mut config = SieveConfig::new(min, max);
    config.stages = parse_stages(stages)?;
    config.jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    config.checkpoint = checkpoint;
    config.emit_all = matches!(mode, EmitMode::All);
    config.chunk_size = chunk_size;
    config.stop_after_chunks = stop_after_chunks;
    let table = mwtable.as_deref().map(MwTable::load).transpose()?;
    let report = run_sieve(&config, table.as_ref())?;
    eprintln!("{} ({:.2}s)", report.stats, report.elapsed.as_secs_f64());
    if !report.complete {
        eprintln!("stopped early; rerun with the same checkpoint to continue");
        return Ok(());
    }
    let mut w = output(out.as_ref())?;
    match format {
        Format::Rows => write_rows(&report.verdicts, &mut w)?,
        Format::Structured => write_structured(&report.verdicts, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_generate(n: i64, budget_ms: u64, seed: u64, out: Option<PathBuf>, check_table: bool) -> Result<(), Failure> {
    if n < 1 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let budget = FactorBudget::millis(budget_ms).with_seed(seed);
    let mut json = out.as_ref().map(|p| File::create(p).map(BufWriter::new)).transpose()?;
    let mut stdout = io::stdout().lock();
    for k in 1..=n {
        let rec = generate(k, &budget)?;
        if !rec.ap.point().is_on_curve() {
            return Err(Failure::Assertion(format!("n={k}: normalized progression is off the curve")));
        }
        writeln!(stdout, "{rec}")?;
        let terms: Vec<String> = rec.ap.terms.iter().map(ToString::to_string).collect();
        writeln!(stdout, "  ap=({}) w={}", terms.join(","), rec.w)?;
        if let Some(w) = json.as_mut() {
            writeln!(w, "{}", serde_json::to_string(&rec).map_err(Error::from)?)?;
        }
    }
    if let Some(mut w) = json {
        w.flush()?;
    }
    if check_table {
        for c in verify_table(n.min(8))? {
            writeln!(
                stdout,
                "table n={} d_divides_square={} w_is_one={} x0_matches={}",
                c.n, c.d_divides_square, c.w_is_one, c.x0_matches
            )?;
        }
    }
    Ok(())
}

fn cmd_search(d: i64, height: u64) -> Result<(), Failure> {
    let found = search_rational_points(d, height);
    let mut w = output(None)?;
    for f in &found {
        if !f.point.is_on_curve() {
            return Err(Failure::Assertion(format!("{} is not on C_{d}", f.point)));
        }
        writeln!(w, "{}", f.point)?;
    }
    w.flush()?;
    eprintln!("{} points", found.len());
    Ok(())
}

fn cmd_ternary(d: u64) -> Result<(), Failure> {
    let c = rank_zero_certificate(d)?;
    let r = |f| representation_count(f, d);
    println!(
        "D={d} r_e0=({},{}) r_e2=({},{}) e0_diff={} e2_diff={} excludes={}",
        r(&E0_FIRST)?,
        r(&E0_SECOND)?,
        r(&E2_FIRST)?,
        r(&E2_SECOND)?,
        c.e0_diff,
        c.e2_diff,
        c.excludes
    );
    Ok(())
}

fn cmd_localcheck(d: BigInt, pmax: u64, budget_ms: u64, seed: u64) -> Result<(), Failure> {
    let budget = FactorBudget::millis(budget_ms).with_seed(seed);
    let f = factor(d.magnitude(), &budget);
    let mut w = output(None)?;
    writeln!(w, "D={d} factorization={f}")?;
    match local_conditions(&d, &f) {
        Ok(LocalVerdict::Pass) => writeln!(w, "local: pass")?,
        Ok(LocalVerdict::Fail { place, witness }) => writeln!(w, "local: fail at {place} ({witness})")?,
        Ok(LocalVerdict::Inconclusive { reason }) => writeln!(w, "local: inconclusive ({reason})")?,
        Err(e) => writeln!(w, "local: {e}")?,
    }
    let report = verify_local_via_points(&d, pmax)?;
    for c in &report.primes {
        let p = c.p as f64;
        let in_window = c.divides_d || (c.points as f64 - (p + 1.0)).abs() <= 10.0 * p.sqrt();
        writeln!(
            w,
            "p={} divides_d={} points={} smooth_points={} weil_window={} ok={}",
            c.p, c.divides_d, c.points, c.smooth_points, in_window, c.ok
        )?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Mwtable { qmax, omax, out } => cmd_mwtable(qmax, omax, out),
        Command::Sieve {
            min,
            max,
            stages,
            mwtable,
            jobs,
            checkpoint,
            out,
            format,
            emit,
            chunk_size,
            stop_after_chunks,
        } => cmd_sieve(min, max, &stages, mwtable, jobs, checkpoint, out, format, emit, chunk_size, stop_after_chunks),
        Command::Generate { n, factor_budget_ms, seed, out, verify_table } => {
            cmd_generate(n, factor_budget_ms, seed, out, verify_table)
        }
        Command::Search { d, height } => cmd_search(d, height),
        Command::Ternary { d } => cmd_ternary(d),
        Command::Localcheck { d, pmax, factor_budget_ms, seed } => cmd_localcheck(d, pmax, factor_budget_ms, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli)))
        .unwrap_or_else(|_| Err(Failure::Assertion("panic".into())));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Incompatible(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Assertion(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
