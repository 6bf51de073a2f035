use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::arith::modular::{inv_mod, least_nonresidue, mul_mod, reduce_i64, SqrtTable};
use crate::ec::{FpCurve, FpPoint};
use crate::quintic::{for_each_point_mod_p, FpQuintuple};
use crate::{Error, Result};

/// `{0,±1}` style rendering of a set of residues mod `order` closed under negation.
pub fn signed_residues(set: &[u64], order: u64) -> String {
    let mut parts = Vec::new();
    for &m in set {
        let neg = (order - m % order) % order;
        if neg == m || !set.contains(&neg) {
            parts.push(m.to_string());
        } else if m < neg {
            parts.push(format!("±{m}"));
        }
    }
    format!("{{{}}}", parts.join(","))
}

/// `E1 : y^2 = x^3 + 8x^2 + 12x` over `F_q`.
pub fn e1_mod(q: u64) -> Result<FpCurve> {
    FpCurve::new(q, 8, 12, 0)
}

/// `(6, 24)` over `F_q`.
pub fn base_point_mod(curve: &FpCurve) -> Result<FpPoint> {
    curve.point(6, 24)
}

/// `[x] -> (6 x0^2 / x4^2, 24 x0 x1 x2 / x4^3)`, with `x4 = 0` sent to the identity.
pub fn phi(pt: &FpQuintuple, q: u64) -> FpPoint {
    let Some(inv) = inv_mod(pt[4] % q, q) else {
        return FpPoint::Infinity;
    };
    let inv2 = mul_mod(inv, inv, q);
    let inv3 = mul_mod(inv2, inv, q);
    let x0sq = mul_mod(pt[0], pt[0], q);
    let x = mul_mod(mul_mod(6 % q, x0sq, q), inv2, q);
    let y = mul_mod(mul_mod(mul_mod(24 % q, pt[0], q), mul_mod(pt[1], pt[2], q), q), inv3, q);
    FpPoint::Affine(x, y)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MwLocalData {
    pub q: u64,
    /// Order of `(6, 24)` mod `q`.
    pub order: u64,
    pub m_plus: Vec<u64>,
    pub m_minus: Vec<u64>,
    /// Even residues were dropped because `order` is even.
    pub pruned: bool,
}

impl fmt::Display for MwLocalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={} O={} M+={} M-={}",
            self.q,
            self.order,
            signed_residues(&self.m_plus, self.order),
            signed_residues(&self.m_minus, self.order)
        )
    }
}

impl MwLocalData {
    /// The set used for `D` with Legendre symbol `symbol` mod `q`.
    pub fn set_for(&self, symbol: i8) -> &[u64] {
        if symbol == 1 {
            &self.m_plus
        } else {
            &self.m_minus
        }
    }
}

fn check_q(q: u64, min: u64) -> Result<()> {
    if q <= min || !is_prime_u64(q) {
        return Err(Error::InvalidArgument(format!("need a prime q > {min}, got {q}")));
    }
    Ok(())
}

/// Residues `k mod O_q` with `kP` in the image of `C_{D'}(F_q)`.
fn image_residues(d_prime: u64, q: u64, sqrt: &SqrtTable, index: &HashMap<FpPoint, u64>) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for_each_point_mod_p(d_prime, sqrt, |pt| {
        if let Some(&k) = index.get(&phi(&pt, q)) {
            out.insert(k);
        }
    });
    out
}

fn prune(set: BTreeSet<u64>, order: u64) -> Vec<u64> {
    set.into_iter().filter(|k| order % 2 == 1 || k % 2 == 1).collect()
}

/// The residue sets for `(D/q) = 1` and `(D/q) = -1`, computed from `D' = 1`
/// and the least quadratic non-residue.
pub fn compute_m_sets(q: u64) -> Result<MwLocalData> {
    check_q(q, 5)?;
    compute_m_sets_with_nonresidue(q, least_nonresidue(q))
}

/// As [`compute_m_sets`] with a chosen non-residue representative.
pub fn compute_m_sets_with_nonresidue(q: u64, nonresidue: u64) -> Result<MwLocalData> {
    check_q(q, 5)?;
    let sqrt = SqrtTable::new(q);
    if sqrt.is_square(nonresidue % q) {
        return Err(Error::InvalidArgument(format!("{nonresidue} is a square mod {q}")));
    }
    let curve = e1_mod(q)?;
    let p = base_point_mod(&curve)?;
    let order = curve.point_order(&p)?;
    let index = curve.multiples_index(&p, order)?;
    let plus = image_residues(1, q, &sqrt, &index);
    let minus = image_residues(nonresidue % q, q, &sqrt, &index);
    Ok(MwLocalData {
        q,
        order,
        m_plus: prune(plus, order),
        m_minus: prune(minus, order),
        pruned: order % 2 == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorClassData {
    pub q: u64,
    pub order: u64,
    /// Residues mod `order` of odd `k` with `x(kP) = -18` mod `q`.
    pub residues: Vec<u64>,
}

/// The classes of odd `k` with `x([k]P) = -18` mod `q`, for a prime `q | D`.
///
/// There are at most two points with `x = -18`; their logarithms give the
/// answer without scanning the whole cyclic group.
pub fn divisor_residues(q: u64) -> Result<DivisorClassData> {
    check_q(q, 3)?;
    let curve = e1_mod(q)?;
    let p = base_point_mod(&curve)?;
    let order = curve.point_order(&p)?;
    let mut residues = Vec::new();
    if let Some(target) = curve.lift_x(reduce_i64(-18, q)) {
        if let Some(k) = curve.discrete_log(&p, order, &target)? {
            residues.push(k);
            residues.push((order - k) % order);
        }
    }
    residues.retain(|k| order % 2 == 1 || k % 2 == 1);
    residues.sort_unstable();
    residues.dedup();
    Ok(DivisorClassData { q, order, residues })
}

/// [`divisor_residues`] by walking `k = 1, 3, 5, ...` over two periods.
pub fn divisor_residues_by_scan(q: u64) -> Result<DivisorClassData> {
    check_q(q, 3)?;
    let curve = e1_mod(q)?;
    let p = base_point_mod(&curve)?;
    let order = curve.point_order(&p)?;
    let target = reduce_i64(-18, q);
    let two_p = curve.double(&p)?;
    let mut kp = p;
    let mut residues = BTreeSet::new();
    let mut k = 1u64;
    while k < 2 * order {
        if kp.x() == Some(target) {
            residues.insert(k % order);
        }
        kp = curve.add(&kp, &two_p)?;
        k += 2;
    }
    Ok(DivisorClassData { q, order, residues: residues.into_iter().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use crate::ec::FpCurve;

    #[test]
    fn phi_examples() {
        let q = 7;
        assert_eq!(phi(&[1, 1, 1, 1, 1], q), FpPoint::Affine(6, 24 % 7));
        assert_eq!(phi(&[6, 1, 1, 1, 1], q), FpPoint::Affine(6, 7 - 24 % 7));
        assert_eq!(phi(&[1, 1, 1, 1, 0], q), FpPoint::Infinity);
    }

    #[test]
    fn printed_table() {
        let rows: [(u64, u64, &[u64], &[u64]); 7] = [
            (7, 6, &[1, 5], &[3]),
            (11, 8, &[1, 7], &[3, 5]),
            (13, 6, &[1, 5], &[3]),
            (17, 6, &[1, 3, 5], &[]),
            (19, 8, &[1, 7], &[3, 5]),
            (23, 3, &[0, 1, 2], &[]),
            (29, 16, &[1, 15], &[3, 5, 7, 9, 11, 13]),
        ];
        for (q, order, plus, minus) in rows {
            let m = compute_m_sets(q).unwrap();
            assert_eq!((m.order, m.m_plus.as_slice(), m.m_minus.as_slice()), (order, plus, minus), "q={q}");
            assert_eq!(m.pruned, order % 2 == 0);
        }
        assert_eq!(compute_m_sets(29).unwrap().to_string(), "q=29 O=16 M+={±1} M-={±3,±5,±7}");
        assert_eq!(compute_m_sets(23).unwrap().to_string(), "q=23 O=3 M+={0,±1} M-={}");
    }

    #[test]
    fn set_invariants() {
        for q in primes_up_to(400).into_iter().filter(|&q| q > 5) {
            let m = compute_m_sets(q).unwrap();
            assert!(m.m_plus.contains(&(1 % m.order)), "q={q}");
            for set in [&m.m_plus, &m.m_minus] {
                for &k in set {
                    assert!(set.contains(&((m.order - k) % m.order)), "q={q} k={k}");
                }
            }
            let sqrt = SqrtTable::new(q);
            let other = (least_nonresidue(q) + 1..q).find(|&v| !sqrt.is_square(v)).unwrap();
            assert_eq!(compute_m_sets_with_nonresidue(q, other).unwrap(), m, "q={q}");
        }
    }

    #[test]
    fn phi_lands_on_e1() {
        for q in [7u64, 11, 13, 101, 409] {
            let curve = FpCurve::new(q, 8, 12, 0).unwrap();
            let sqrt = SqrtTable::new(q);
            for d in [1u64, least_nonresidue(q)] {
                for_each_point_mod_p(d, &sqrt, |pt| assert!(curve.contains(&phi(&pt, q))));
            }
        }
    }

    #[test]
    fn divisor_examples() {
        assert!(!divisor_residues(457).unwrap().residues.is_empty());
        assert!(!divisor_residues(409).unwrap().residues.is_empty());
        for q in primes_up_to(3000).into_iter().filter(|&q| q > 3) {
            assert_eq!(divisor_residues(q).unwrap(), divisor_residues_by_scan(q).unwrap(), "q={q}");
        }
    }

    #[test]
    fn divisor_scan_matches_exhaustive_q7() {
        let curve = FpCurve::new(7, 8, 12, 0).unwrap();
        let p = curve.point(6, 24).unwrap();
        let expect: Vec<u64> = (0..6)
            .filter(|k| k % 2 == 1 && curve.mul(*k as i64, &p).unwrap().x() == Some(reduce_i64(-18, 7)))
            .collect();
        assert_eq!(divisor_residues_by_scan(7).unwrap().residues, expect);
    }
}
