use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::SieveVerdict;
use crate::{Error, Result};

pub const ROWS_HEADER: &str = "d,outcome,witness_kind,witness";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Comma-separated, one verdict per line after a header.
    Rows,
    /// JSON lines after a header record.
    Structured,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rows" => Ok(Format::Rows),
            "structured" => Ok(Format::Structured),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

pub fn write_rows(verdicts: &[SieveVerdict], out: &mut impl Write) -> Result<()> {
    writeln!(out, "{ROWS_HEADER}")?;
    for v in verdicts {
        if v.witness.contains([',', '\n']) || v.witness_kind.contains([',', '\n']) {
            return Err(Error::InvalidArgument(format!("witness for {} cannot be written as a row", v.d)));
        }
        writeln!(out, "{},{},{},{}", v.d, v.outcome, v.witness_kind, v.witness)?;
    }
    Ok(())
}

pub fn read_rows(input: impl BufRead) -> Result<Vec<SieveVerdict>> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h == ROWS_HEADER => {}
        _ => return Err(Error::Parse("missing rows header".into())),
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(4, ',');
        let (Some(d), Some(outcome), Some(kind), Some(witness)) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse(format!("short row {line:?}")));
        };
        out.push(SieveVerdict {
            d: d.parse().map_err(|e| Error::Parse(format!("{d}: {e}")))?,
            outcome: outcome.parse()?,
            witness_kind: kind.into(),
            witness: witness.into(),
        });
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    fields: Vec<String>,
}

const STRUCTURED_FORMAT: &str = "fivesq-sieve-verdicts";

pub fn write_structured(verdicts: &[SieveVerdict], out: &mut impl Write) -> Result<()> {
    let header = Header {
        format: STRUCTURED_FORMAT.into(),
        version: 1,
        fields: ROWS_HEADER.split(',').map(String::from).collect(),
    };
    serde_json::to_writer(&mut *out, &header)?;
    writeln!(out)?;
    for v in verdicts {
        serde_json::to_writer(&mut *out, v)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_structured(input: impl BufRead) -> Result<Vec<SieveVerdict>> {
    let mut lines = input.lines();
    let header: Header = match lines.next() {
        Some(line) => serde_json::from_str(&line?)?,
        None => return Err(Error::Parse("empty input".into())),
    };
    if header.format != STRUCTURED_FORMAT {
        return Err(Error::Parse(format!("unexpected format {:?}", header.format)));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
