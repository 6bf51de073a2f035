use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::sets::{base_point_mod, compute_m_sets, divisor_residues, e1_mod, DivisorClassData, MwLocalData};
use crate::arith::primes_up_to;
use crate::{Error, Result};

pub const TABLE_FORMAT: &str = "fivesq-mw-table";
pub const TABLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MwTableHeader {
    pub format: String,
    pub version: u32,
    pub q_max: u64,
    /// Only primes with `O_q <= order_bound` carry residue sets.
    pub order_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MwTable {
    pub header: MwTableHeader,
    pub records: Vec<MwLocalData>,
    /// Divisor classes for every prime `3 < q <= q_max`, regardless of order.
    pub divisors: Vec<DivisorClassData>,
}

#[cfg(feature = "parallel")]
fn map_primes<T: Send>(primes: &[u64], f: impl Fn(u64) -> Result<Option<T>> + Sync) -> Result<Vec<T>> {
    use rayon::prelude::*;
    let out: Result<Vec<Option<T>>> = primes.par_iter().map(|&q| f(q)).collect();
    Ok(out?.into_iter().flatten().collect())
}

#[cfg(not(feature = "parallel"))]
fn map_primes<T>(primes: &[u64], f: impl Fn(u64) -> Result<Option<T>>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for &q in primes {
        out.extend(f(q)?);
    }
    Ok(out)
}

impl MwTable {
    pub fn build(q_max: u64, order_bound: u64) -> Result<Self> {
        if q_max == 0 || order_bound == 0 {
            return Err(Error::InvalidArgument("q_max and order_bound must be positive".into()));
        }
        let primes = primes_up_to(q_max);
        let sieve_primes: Vec<u64> = primes.iter().copied().filter(|&q| q > 5).collect();
        let records = map_primes(&sieve_primes, |q| {
            let curve = e1_mod(q)?;
            let order = curve.point_order(&base_point_mod(&curve)?)?;
            if order > order_bound {
                return Ok(None);
            }
            compute_m_sets(q).map(Some)
        })?;
        let divisor_primes: Vec<u64> = primes.iter().copied().filter(|&q| q > 3).collect();
        let divisors = map_primes(&divisor_primes, |q| divisor_residues(q).map(Some))?;
        Ok(MwTable {
            header: MwTableHeader {
                format: TABLE_FORMAT.into(),
                version: TABLE_VERSION,
                q_max,
                order_bound,
            },
            records,
            divisors,
        })
    }

    pub fn record(&self, q: u64) -> Option<&MwLocalData> {
        self.records.binary_search_by_key(&q, |r| r.q).ok().map(|i| &self.records[i])
    }

    /// Stored divisor data for `q <= q_max`, else computed.
    pub fn divisor(&self, q: u64) -> Result<DivisorClassData> {
        match self.divisors.binary_search_by_key(&q, |r| r.q) {
            Ok(i) => Ok(self.divisors[i].clone()),
            Err(_) => divisor_residues(q),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let header: MwTableHeader = serde_json::from_value(
            value.get("header").cloned().ok_or_else(|| Error::Incompatible("missing table header".into()))?,
        )
        .map_err(|e| Error::Incompatible(format!("bad table header: {e}")))?;
        if header.format != TABLE_FORMAT || header.version != TABLE_VERSION {
            return Err(Error::Incompatible(format!(
                "table format {} v{} not supported (want {TABLE_FORMAT} v{TABLE_VERSION})",
                header.format, header.version
            )));
        }
        let table: MwTable = serde_json::from_value(value)?;
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let sorted = |qs: &mut dyn Iterator<Item = u64>| {
            let v: Vec<u64> = qs.collect();
            v.windows(2).all(|w| w[0] < w[1])
        };
        if !sorted(&mut self.records.iter().map(|r| r.q)) || !sorted(&mut self.divisors.iter().map(|r| r.q)) {
            return Err(Error::Incompatible("table records are not sorted by prime".into()));
        }
        for r in &self.records {
            if r.q > self.header.q_max || r.order > self.header.order_bound || r.order == 0 {
                return Err(Error::Incompatible(format!("record for q = {} outside the header bounds", r.q)));
            }
            if r.m_plus.iter().chain(&r.m_minus).any(|&k| k >= r.order) {
                return Err(Error::Incompatible(format!("residue out of range for q = {}", r.q)));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// SHA-256 of the serialized table, hex encoded.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_json()?.as_bytes())))
    }
}
