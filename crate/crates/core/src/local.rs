//! Everywhere-local solvability of `C_D` as congruence conditions on `D`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, Factorization};
use crate::quintic::{for_each_point_mod_p, DEFAULT_ENUMERATION_BOUND};
use crate::arith::modular::{reduce_i64, SqrtTable};
use crate::{Error, Result};

/// Where a local condition fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Real,
    Two,
    Three,
    Five,
    /// A prime dividing `D`.
    Divisor(#[serde(with = "crate::serde_dec")] BigUint),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("real"),
            Place::Two => f.write_str("2"),
            Place::Three => f.write_str("3"),
            Place::Five => f.write_str("5"),
            Place::Divisor(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LocalVerdict {
    Pass,
    Fail { place: Place, witness: String },
    /// Some prime factor of `D` is unknown.
    Inconclusive { reason: String },
}

impl LocalVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, LocalVerdict::Pass)
    }

    pub fn failing_place(&self) -> Option<&Place> {
        match self {
            LocalVerdict::Fail { place, .. } => Some(place),
            _ => None,
        }
    }
}

fn fail(place: Place, witness: String) -> LocalVerdict {
    LocalVerdict::Fail { place, witness }
}

/// Conditions at the real place, 2, 3 and 5, given `D mod 120` and the sign.
fn small_places(positive: bool, even: bool, m8: u64, m3: u64, m5: u64) -> Option<LocalVerdict> {
    if !positive {
        return Some(fail(Place::Real, "D <= 0".into()));
    }
    if even {
        return Some(fail(Place::Two, "D even".into()));
    }
    if m8 != 1 {
        return Some(fail(Place::Two, format!("D mod 8 = {m8}")));
    }
    if m3 != 1 {
        return Some(fail(Place::Three, format!("D mod 3 = {m3}")));
    }
    if m5 != 1 && m5 != 4 {
        return Some(fail(Place::Five, format!("D mod 5 = {m5}")));
    }
    None
}

/// The local test for a squarefree `D` whose prime factors are `primes`.
pub fn local_conditions_u64(d: u64, primes: &[u64]) -> LocalVerdict {
    if let Some(v) = small_places(d > 0, d.is_multiple_of(2), d % 8, d % 3, d % 5) {
        return v;
    }
    for &p in primes {
        if p % 24 != 1 {
            return fail(Place::Divisor(p.into()), format!("{p} mod 24 = {}", p % 24));
        }
    }
    LocalVerdict::Pass
}

/// The local test for squarefree `D` with a factorization of `|D|`.
///
/// A listed prime factor that breaks the condition gives a failure even if
/// the factorization is incomplete; otherwise an incomplete one gives
/// [`LocalVerdict::Inconclusive`].
pub fn local_conditions(d: &BigInt, factorization: &Factorization) -> Result<LocalVerdict> {
    if d.is_zero() {
        return Err(Error::InvalidArgument("D = 0".into()));
    }
    if factorization.value != *d.magnitude() {
        return Err(Error::InvalidArgument(format!(
            "factorization of {} does not match D = {d}",
            factorization.value
        )));
    }
    if factorization.factors.iter().any(|pp| pp.exponent > 1) {
        return Err(Error::InvalidArgument(format!("D = {d} is not squarefree")));
    }
    let m = |k: u32| (d.magnitude() % k).to_u64().expect("small");
    if let Some(v) = small_places(d.sign() == Sign::Plus, m(2) == 0, m(8), m(3), m(5)) {
        return Ok(v);
    }
    for p in factorization.primes() {
        let r = (p % 24u32).to_u64().expect("small");
        if r != 1 {
            return Ok(fail(Place::Divisor(p.clone()), format!("{p} mod 24 = {r}")));
        }
    }
    if !factorization.is_complete() {
        return Ok(LocalVerdict::Inconclusive {
            reason: format!("unfactored part {}", factorization.residual),
        });
    }
    Ok(LocalVerdict::Pass)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub divides_d: bool,
    /// All of `C_D(F_p)`.
    pub points: u64,
    /// Points other than `[0:0:0:1:0]`, which lies on the curve exactly when `p | D`.
    pub smooth_points: u64,
    pub expected_nonempty: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPointReport {
    #[serde(with = "crate::serde_dec")]
    pub d: BigInt,
    pub p_max: u64,
    pub primes: Vec<PrimeCheck>,
}

impl LocalPointReport {
    pub fn ok(&self) -> bool {
        self.primes.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().filter(|c| !c.ok).map(|c| c.p)
    }
}

/// Exhaustive check that `C_D(F_p)` has points for every prime `5 < p <= p_max`,
/// and for `p | D` that it has points off `[0:0:0:1:0]` iff `p = 1 mod 24`.
pub fn verify_local_via_points(d: &BigInt, p_max: u64) -> Result<LocalPointReport> {
    if p_max > DEFAULT_ENUMERATION_BOUND {
        return Err(Error::BoundExceeded { p: p_max, bound: DEFAULT_ENUMERATION_BOUND });
    }
    let mut primes = Vec::new();
    for p in primes_up_to(p_max).into_iter().filter(|&p| p > 5) {
        let dm = residue(d, p);
        let table = SqrtTable::new(p);
        let (mut points, mut smooth) = (0, 0);
        for_each_point_mod_p(dm, &table, |pt| {
            points += 1;
            if pt[0] != 0 || pt[1] != 0 || pt[2] != 0 || pt[4] != 0 {
                smooth += 1;
            }
        });
        let divides_d = dm == 0;
        let expected_nonempty = !divides_d || p % 24 == 1;
        let ok = if divides_d { (smooth > 0) == expected_nonempty } else { points > 0 };
        primes.push(PrimeCheck { p, divides_d, points, smooth_points: smooth, expected_nonempty, ok });
    }
    Ok(LocalPointReport { d: d.clone(), p_max, primes })
}

fn residue(d: &BigInt, p: u64) -> u64 {
    let r = (d.abs() % p).to_u64().expect("small");
    if d.is_negative() {
        reduce_i64(-(r as i64), p)
    } else {
        r
    }
}
