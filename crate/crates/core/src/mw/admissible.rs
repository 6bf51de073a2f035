use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::table::MwTable;
use crate::arith::{crt_decide, jacobi_u64, CrtDecision, CrtLimits, ResidueClass};
use crate::Result;

/// Integers that can be reduced modulo a machine word.
pub trait SieveInteger {
    fn mod_u64(&self, m: u64) -> u64;
}

impl SieveInteger for u64 {
    fn mod_u64(&self, m: u64) -> u64 {
        self % m
    }
}

impl SieveInteger for BigInt {
    fn mod_u64(&self, m: u64) -> u64 {
        self.mod_floor(&BigInt::from(m)).to_u64().expect("reduced below m")
    }
}

/// Label of a class entering the intersection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "q", rename_all = "snake_case")]
pub enum ClassSource {
    /// `M_{(D/q)}` for a table prime.
    Table(u64),
    /// `K_q` for a prime `q | D`.
    Divisor(u64),
    /// `k` odd.
    Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Admissibility {
    Survives,
    /// The listed classes already have empty intersection.
    Excluded { certificate: Vec<ClassSource> },
    /// A size limit was hit; treated as surviving.
    Inconclusive { reason: String },
}

impl Admissibility {
    pub fn survives(&self) -> bool {
        !matches!(self, Admissibility::Excluded { .. })
    }
}

/// The table classes for `D`, skipping table primes dividing `D`.
pub fn table_classes<D: SieveInteger>(d: &D, table: &MwTable) -> Vec<(ClassSource, ResidueClass)> {
    let mut out = Vec::with_capacity(table.records.len());
    for r in &table.records {
        let dm = d.mod_u64(r.q);
        if dm == 0 {
            continue;
        }
        let symbol = jacobi_u64(dm, r.q);
        out.push((ClassSource::Table(r.q), ResidueClass::new(r.order, r.set_for(symbol).iter().copied())));
    }
    out
}

/// Whether some odd `k` is compatible with every table prime and every
/// prime in `divisor_primes` (primes of `D` to test with `x(kP) = -18`).
pub fn mw_admissible<D: SieveInteger>(
    d: &D,
    table: &MwTable,
    divisor_primes: &[u64],
    limits: &CrtLimits,
) -> Result<Admissibility> {
    let mut classes = table_classes(d, table);
    for &q in divisor_primes {
        if q <= 3 {
            continue;
        }
        let data = table.divisor(q)?;
        if data.residues.is_empty() {
            return Ok(Admissibility::Excluded { certificate: vec![ClassSource::Divisor(q)] });
        }
        classes.push((ClassSource::Divisor(q), ResidueClass::new(data.order, data.residues)));
    }
    classes.push((ClassSource::Parity, ResidueClass::new(2, [1])));
    let (sources, classes): (Vec<_>, Vec<_>) = classes.into_iter().unzip();
    Ok(match crt_decide(&classes, limits) {
        CrtDecision::Empty { merged } => {
            Admissibility::Excluded { certificate: merged.into_iter().map(|i| sources[i]).collect() }
        }
        CrtDecision::Nonempty => Admissibility::Survives,
        CrtDecision::Inconclusive { reason } => Admissibility::Inconclusive { reason },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> MwTable {
        MwTable::build(100, 200).unwrap()
    }

    #[test]
    fn d409_survives() {
        let t = table();
        let a = mw_admissible(&409u64, &t, &[409], &CrtLimits::default()).unwrap();
        assert!(a.survives(), "{a:?}");
        let big = BigInt::from(4688329u64);
        assert!(mw_admissible(&big, &t, &[4688329], &CrtLimits::default()).unwrap().survives());
    }

    #[test]
    fn nonresidue_mod_17_is_excluded() {
        let t = table();
        // 73 = 5 mod 17, a non-residue
        let a = mw_admissible(&73u64, &t, &[], &CrtLimits::default()).unwrap();
        match a {
            Admissibility::Excluded { certificate } => assert!(!certificate.is_empty()),
            other => panic!("{other:?}"),
        }
        let only17 = MwTable { records: vec![t.record(17).unwrap().clone()], ..t.clone() };
        let a = mw_admissible(&73u64, &only17, &[], &CrtLimits::default()).unwrap();
        match a {
            Admissibility::Excluded { certificate } => assert!(certificate.contains(&ClassSource::Table(17))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn u64_and_bigint_agree() {
        let t = table();
        for d in (1u64..20_000).step_by(24) {
            let a = mw_admissible(&d, &t, &[], &CrtLimits::default()).unwrap();
            let b = mw_admissible(&BigInt::from(d), &t, &[], &CrtLimits::default()).unwrap();
            assert_eq!(a, b);
        }
    }
}
