//! Sieving ranges of `D` through the certificate stages.

mod checkpoint;
mod emit;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arith::{CrtLimits, PrimeList, SegmentSieve};
use crate::local::{local_conditions_u64, LocalVerdict};
use crate::mw::{mw_admissible, Admissibility, ClassSource, MwTable};
use crate::ternary::rank_zero_certificate;
use crate::{Error, Result};

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use emit::{read_rows, read_structured, write_rows, write_structured, Format, ROWS_HEADER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Local,
    Mw,
    Divisor,
    Ternary,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Local, Stage::Mw, Stage::Divisor, Stage::Ternary];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Local => "local",
            Stage::Mw => "mw",
            Stage::Divisor => "divisor",
            Stage::Ternary => "ternary",
        }
    }

    fn excluded(self) -> Outcome {
        match self {
            Stage::Local => Outcome::ExcludedLocal,
            Stage::Mw => Outcome::ExcludedMw,
            Stage::Divisor => Outcome::ExcludedDivisor,
            Stage::Ternary => Outcome::ExcludedTernary,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown stage {s:?}")))
    }
}

/// Parse `local,mw,...`; the list must be a prefix of the fixed stage order.
pub fn parse_stages(s: &str) -> Result<Vec<Stage>> {
    let mut stages: Vec<Stage> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_>>()?;
    stages.sort();
    stages.dedup();
    if stages.iter().enumerate().any(|(i, st)| Stage::ALL[i] != *st) {
        return Err(Error::InvalidArgument(format!(
            "stages must be a prefix of local,mw,divisor,ternary, got {s:?}"
        )));
    }
    Ok(stages)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ExcludedLocal,
    ExcludedMw,
    ExcludedDivisor,
    ExcludedTernary,
    Survivor,
    /// Kept with the survivors: some step could not be certified.
    Inconclusive,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::ExcludedLocal,
        Outcome::ExcludedMw,
        Outcome::ExcludedDivisor,
        Outcome::ExcludedTernary,
        Outcome::Survivor,
        Outcome::Inconclusive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::ExcludedLocal => "excluded_local",
            Outcome::ExcludedMw => "excluded_mw",
            Outcome::ExcludedDivisor => "excluded_divisor",
            Outcome::ExcludedTernary => "excluded_ternary",
            Outcome::Survivor => "survivor",
            Outcome::Inconclusive => "inconclusive",
        }
    }

    pub fn is_survivor(self) -> bool {
        matches!(self, Outcome::Survivor | Outcome::Inconclusive)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown outcome {s:?}")))
    }
}

/// The verdict on one `D`. Witness fields are empty for plain survivors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveVerdict {
    #[serde(with = "crate::serde_dec")]
    pub d: u64,
    pub outcome: Outcome,
    pub witness_kind: String,
    pub witness: String,
}

impl SieveVerdict {
    fn new(d: u64, outcome: Outcome, kind: impl Into<String>, witness: impl Into<String>) -> Self {
        SieveVerdict { d, outcome, witness_kind: kind.into(), witness: witness.into() }
    }
}

fn certificate_text(cert: &[ClassSource]) -> String {
    let mut parts: Vec<String> = cert
        .iter()
        .map(|c| match c {
            ClassSource::Table(q) => format!("M{q}"),
            ClassSource::Divisor(q) => format!("K{q}"),
            ClassSource::Parity => "odd".into(),
        })
        .collect();
    parts.sort();
    parts.join(" ")
}

/// Run the stages on one squarefree `d` with prime factors `primes`.
pub fn classify(
    d: u64,
    primes: &[u64],
    stages: &[Stage],
    table: Option<&MwTable>,
    limits: &CrtLimits,
) -> Result<SieveVerdict> {
    let mut flagged: Option<(String, String)> = None;
    for &stage in stages {
        match stage {
            Stage::Local => match local_conditions_u64(d, primes) {
                LocalVerdict::Pass => {}
                LocalVerdict::Fail { place, witness } => {
                    return Ok(SieveVerdict::new(d, stage.excluded(), format!("place={place}"), witness));
                }
                LocalVerdict::Inconclusive { reason } => flagged = Some(("local".into(), reason)),
            },
            Stage::Mw | Stage::Divisor => {
                let table = table.ok_or_else(|| Error::InvalidArgument("the mw stages need a table".into()))?;
                let divisors: &[u64] = if stage == Stage::Divisor { primes } else { &[] };
                match mw_admissible(&d, table, divisors, limits)? {
                    Admissibility::Survives => {}
                    Admissibility::Excluded { certificate } => {
                        let kind = if stage == Stage::Divisor && certificate.len() == 1 { "divisor_empty" } else { "crt_empty" };
                        return Ok(SieveVerdict::new(d, stage.excluded(), kind, certificate_text(&certificate)));
                    }
                    Admissibility::Inconclusive { reason } => flagged = Some((stage.name().into(), reason)),
                }
            }
            Stage::Ternary => match rank_zero_certificate(d) {
                Ok(c) if c.excludes => {
                    let w = format!("e0_diff={} e2_diff={}", c.e0_diff, c.e2_diff);
                    return Ok(SieveVerdict::new(d, stage.excluded(), "ternary", w));
                }
                Ok(_) => {}
                Err(e) => flagged = Some(("ternary".into(), e.to_string())),
            },
        }
    }
    Ok(match flagged {
        Some((stage, reason)) => {
            SieveVerdict::new(d, Outcome::Inconclusive, format!("stage={stage}"), reason.replace(',', ";"))
        }
        None => SieveVerdict::new(d, Outcome::Survivor, "", ""),
    })
}

#[derive(Clone, Debug)]
pub struct SieveConfig {
    pub min: u64,
    pub max: u64,
    pub stages: Vec<Stage>,
    pub jobs: usize,
    /// Size of the unit of work and of checkpoint granularity.
    pub chunk_size: u64,
    pub checkpoint: Option<PathBuf>,
    /// Keep excluded verdicts too, not only survivors.
    pub emit_all: bool,
    /// Stop after this many chunks in this invocation (the checkpoint is kept).
    pub stop_after_chunks: Option<u64>,
    pub limits: CrtLimits,
}

impl SieveConfig {
    pub fn new(min: u64, max: u64) -> Self {
        SieveConfig {
            min,
            max,
            stages: Stage::ALL.to_vec(),
            jobs: 1,
            chunk_size: 100_000,
            checkpoint: None,
            emit_all: false,
            stop_after_chunks: None,
            limits: CrtLimits::default(),
        }
    }
}

/// Counts by outcome; deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveStats {
    pub squarefree: u64,
    pub outcomes: BTreeMap<Outcome, u64>,
}

impl SieveStats {
    fn absorb(&mut self, other: &SieveStats) {
        self.squarefree += other.squarefree;
        for (k, v) in &other.outcomes {
            *self.outcomes.entry(*k).or_default() += v;
        }
    }

    pub fn count(&self, outcome: Outcome) -> u64 {
        self.outcomes.get(&outcome).copied().unwrap_or(0)
    }
}

impl fmt::Display for SieveStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "squarefree={}", self.squarefree)?;
        for o in Outcome::ALL {
            write!(f, " {}={}", o, self.count(o))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SieveReport {
    /// Retained verdicts in increasing `D`.
    pub verdicts: Vec<SieveVerdict>,
    pub stats: SieveStats,
    /// False when stopped early; rerun with the same checkpoint to continue.
    pub complete: bool,
    /// Wall clock of this invocation; never part of the emitted verdicts.
    pub elapsed: Duration,
}

impl SieveReport {
    pub fn survivors(&self) -> Vec<u64> {
        self.verdicts.iter().filter(|v| v.outcome.is_survivor()).map(|v| v.d).collect()
    }
}

struct ChunkResult {
    verdicts: Vec<SieveVerdict>,
    stats: SieveStats,
}

fn run_chunk(
    sieve: &SegmentSieve,
    lo: u64,
    hi: u64,
    config: &SieveConfig,
    table: Option<&MwTable>,
) -> Result<ChunkResult> {
    let mut verdicts = Vec::new();
    let mut stats = SieveStats::default();
    let list: Vec<(u64, PrimeList)> = sieve.squarefree(lo, hi);
    for (d, primes) in list {
        let v = classify(d, &primes, &config.stages, table, &config.limits)?;
        stats.squarefree += 1;
        *stats.outcomes.entry(v.outcome).or_default() += 1;
        if config.emit_all || v.outcome.is_survivor() {
            verdicts.push(v);
        }
    }
    Ok(ChunkResult { verdicts, stats })
}

fn run_batch(
    sieve: &SegmentSieve,
    bounds: &[(u64, u64)],
    config: &SieveConfig,
    table: Option<&MwTable>,
    pool: Option<&Pool>,
) -> Result<Vec<ChunkResult>> {
    let work = |&(lo, hi): &(u64, u64)| run_chunk(sieve, lo, hi, config, table);
    match pool {
        #[cfg(feature = "parallel")]
        Some(pool) => pool.install(|| {
            use rayon::prelude::*;
            bounds.par_iter().map(work).collect()
        }),
        _ => bounds.iter().map(work).collect(),
    }
}

#[cfg(feature = "parallel")]
type Pool = rayon::ThreadPool;
#[cfg(not(feature = "parallel"))]
type Pool = ();

#[cfg(feature = "parallel")]
fn make_pool(jobs: usize) -> Result<Option<Pool>> {
    if jobs <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn make_pool(_jobs: usize) -> Result<Option<Pool>> {
    Ok(None)
}

/// Sieve `[min, max]`, resuming from and updating the checkpoint when one is configured.
///
/// Chunk boundaries depend only on `min` and `chunk_size`, so the verdicts
/// are identical for any number of jobs and any interruption pattern.
pub fn run_sieve(config: &SieveConfig, table: Option<&MwTable>) -> Result<SieveReport> {
    let start = Instant::now();
    if config.min == 0 || config.min > config.max {
        return Err(Error::InvalidArgument(format!("bad range [{}, {}]", config.min, config.max)));
    }
    if config.chunk_size == 0 {
        return Err(Error::InvalidArgument("chunk size must be positive".into()));
    }
    if config.max == u64::MAX {
        return Err(Error::InvalidArgument("max too large".into()));
    }
    let needs_table = config.stages.iter().any(|s| matches!(s, Stage::Mw | Stage::Divisor));
    if needs_table && table.is_none() {
        return Err(Error::InvalidArgument("stages mw/divisor need an MW table".into()));
    }
    let table_hash = match table {
        Some(t) if needs_table => Some(t.hash()?),
        _ => None,
    };
    let mut state = match &config.checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            cp.check_compatible(config, table_hash.as_deref())?;
            cp
        }
        _ => Checkpoint::fresh(config, table_hash.clone()),
    };
    let prior_ms = state.wall_clock_ms;
    let sieve = SegmentSieve::new(config.max);
    let pool = make_pool(config.jobs)?;
    let batch = config.jobs.max(1) as u64;
    let mut chunks_done = 0u64;
    while state.next <= config.max {
        if let Some(limit) = config.stop_after_chunks {
            if chunks_done >= limit {
                break;
            }
        }
        let mut room = batch;
        if let Some(limit) = config.stop_after_chunks {
            room = room.min(limit - chunks_done);
        }
        let mut bounds = Vec::new();
        let mut lo = state.next;
        while bounds.len() < room as usize && lo <= config.max {
            let hi = (lo + config.chunk_size).min(config.max + 1);
            bounds.push((lo, hi));
            lo = hi;
        }
        for r in run_batch(&sieve, &bounds, config, table, pool.as_ref())? {
            state.verdicts.extend(r.verdicts);
            state.stats.absorb(&r.stats);
        }
        state.next = lo;
        chunks_done += bounds.len() as u64;
        state.wall_clock_ms = prior_ms + start.elapsed().as_millis() as u64;
        if let Some(path) = &config.checkpoint {
            state.save(path)?;
        }
    }
    Ok(SieveReport {
        complete: state.next > config.max,
        verdicts: state.verdicts,
        stats: state.stats,
        elapsed: start.elapsed(),
    })
}
