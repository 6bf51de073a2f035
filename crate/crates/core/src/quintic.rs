//! The genus-5 curve `C_D` classifying progressions `x0^2, x1^2, x2^2, D x3^2, x4^2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::arith::modular::{gcd_u64, inv_mod, isqrt_i128, mul_mod, reduce_i64, sub_mod, SqrtTable};
use crate::{Error, Result};

/// Default largest prime accepted by [`enumerate_points_mod_p`].
pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000;

/// Projective point `[x0 : x1 : x2 : x3 : x4]` together with `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ApQuintuple {
    #[serde(with = "crate::serde_dec::vec_array")]
    pub x: [BigInt; 5],
    #[serde(with = "crate::serde_dec")]
    pub d: BigInt,
}

impl std::fmt::Display for ApQuintuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d, e] = &self.x;
        write!(f, "[{a}:{b}:{c}:{d}:{e}]")
    }
}

impl ApQuintuple {
    pub fn new(x: [i64; 5], d: i64) -> Self {
        ApQuintuple { x: x.map(BigInt::from), d: BigInt::from(d) }
    }

    /// `(F012, F123, F234)` evaluated at the point.
    pub fn forms(&self) -> [BigInt; 3] {
        let sq: Vec<BigInt> = self.x.iter().map(|v| v * v).collect();
        let d3 = &self.d * &sq[3];
        [
            &sq[0] - 2 * &sq[1] + &sq[2],
            &sq[1] - 2 * &sq[2] + &d3,
            &sq[2] - 2 * &d3 + &sq[4],
        ]
    }

    pub fn is_on_curve(&self) -> bool {
        self.x.iter().any(|v| !v.is_zero()) && self.forms().iter().all(Zero::is_zero)
    }

    /// The progression `x0^2, x1^2, x2^2, D x3^2, x4^2`.
    pub fn progression(&self) -> [BigInt; 5] {
        let sq = |v: &BigInt| v * v;
        [sq(&self.x[0]), sq(&self.x[1]), sq(&self.x[2]), &self.d * sq(&self.x[3]), sq(&self.x[4])]
    }

    /// Representative with `x3 > 0`, or with the first nonzero coordinate
    /// positive when `x3 = 0`.
    pub fn canonical(&self) -> Self {
        let pivot = if !self.x[3].is_zero() {
            &self.x[3]
        } else {
            self.x.iter().find(|v| !v.is_zero()).unwrap_or(&self.x[3])
        };
        if pivot.is_negative() {
            ApQuintuple { x: self.x.clone().map(|v| -v), d: self.d.clone() }
        } else {
            self.clone()
        }
    }

    /// The distinct canonical points in the orbit of the sign changes.
    pub fn sign_orbit(&self) -> Vec<Self> {
        let mut out: Vec<Self> = (0..32u32)
            .map(|mask| {
                let mut x = self.x.clone();
                for (i, v) in x.iter_mut().enumerate() {
                    if mask >> i & 1 == 1 {
                        *v = -v.clone();
                    }
                }
                ApQuintuple { x, d: self.d.clone() }.canonical()
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn normalized(&self) -> Result<NormalizedAp> {
        let terms = self.progression().map(BigRational::from_integer);
        normalize_ap(&terms, &self.d)
    }
}

/// True iff the three quadrics vanish at a nonzero point.
pub fn is_on_curve(q: &ApQuintuple) -> bool {
    q.is_on_curve()
}

/// A point from [`search_rational_points`]; `orbit` numbers the sign orbit it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundPoint {
    pub point: ApQuintuple,
    pub orbit: usize,
}

fn exact_sqrt(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let r = isqrt_i128(v);
    (r * r == v).then_some(r)
}

/// All primitive points of `C_D(Q)` whose coordinates are at most `height`
/// in absolute value, closed under sign changes.
///
/// Two coordinates fix the progression, so the scan runs over coprime
/// `(x0, x1)` only and tests the other three terms for squareness.
pub fn search_rational_points(d: i64, height: u64) -> Vec<FoundPoint> {
    search_rational_points_in(d, height, 0..=height)
}

/// [`search_rational_points`] restricted to `x0` in `x0_range`, for sharding.
pub fn search_rational_points_in(
    d: i64,
    height: u64,
    x0_range: std::ops::RangeInclusive<u64>,
) -> Vec<FoundPoint> {
    if d == 0 {
        return Vec::new();
    }
    let h = height as i128;
    let dd = d as i128;
    let mut bases = Vec::new();
    for x0 in x0_range {
        if x0 > height {
            break;
        }
        for x1 in 0..=height {
            if gcd_u64(x0, x1) != 1 {
                continue;
            }
            let (a, b) = (x0 as i128, x1 as i128);
            let r = b * b - a * a;
            let Some(x2) = exact_sqrt(a * a + 2 * r) else { continue };
            let Some(x4) = exact_sqrt(a * a + 4 * r) else { continue };
            let t3 = a * a + 3 * r;
            if t3 % dd != 0 {
                continue;
            }
            let Some(x3) = exact_sqrt(t3 / dd) else { continue };
            if x2 > h || x3 > h || x4 > h {
                continue;
            }
            bases.push([a as i64, b as i64, x2 as i64, x3 as i64, x4 as i64]);
        }
    }
    let mut out = Vec::new();
    for (orbit, base) in bases.into_iter().enumerate() {
        let q = ApQuintuple::new(base, d);
        debug_assert!(q.is_on_curve());
        out.extend(q.sign_orbit().into_iter().map(|point| FoundPoint { point, orbit }));
    }
    out
}

/// Projective point over `F_p`, first nonzero coordinate equal to 1.
pub type FpQuintuple = [u64; 5];

/// All points of `C_D(F_p)`, for primes up to [`DEFAULT_ENUMERATION_BOUND`].
pub fn enumerate_points_mod_p(d: i64, p: u64) -> Result<Vec<FpQuintuple>> {
    enumerate_points_mod_p_bounded(d, p, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_points_mod_p_bounded(d: i64, p: u64, bound: u64) -> Result<Vec<FpQuintuple>> {
    check_enumeration_prime(p, bound)?;
    let table = SqrtTable::new(p);
    let mut out = Vec::new();
    for_each_point_mod_p(reduce_i64(d, p), &table, |pt| out.push(pt));
    Ok(out)
}

pub fn count_points_mod_p(d: i64, p: u64) -> Result<u64> {
    check_enumeration_prime(p, DEFAULT_ENUMERATION_BOUND)?;
    let table = SqrtTable::new(p);
    let mut n = 0;
    for_each_point_mod_p(reduce_i64(d, p), &table, |_| n += 1);
    Ok(n)
}

fn check_enumeration_prime(p: u64, bound: u64) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if p > bound {
        return Err(Error::BoundExceeded { p, bound });
    }
    Ok(())
}

/// Visit every point of `C_D(F_p)` with `D = d_mod_p`.
///
/// Points are produced chart by chart on the first nonzero coordinate.
/// Once `x0, x1` are fixed each remaining coordinate is a square root, so
/// the work is `O(p)` when `p` does not divide `D` and `O(p^2)` when it does.
pub fn for_each_point_mod_p(d_mod_p: u64, sqrt: &SqrtTable, mut visit: impl FnMut(FpQuintuple)) {
    let p = sqrt.modulus();
    let d = d_mod_p % p;
    let sq = |v: u64| mul_mod(v, v, p);
    let two = 2 % p;
    // Given x0, x1, x2: solve D x3^2 = 2 x2^2 - x1^2, then x4^2 = 2 D x3^2 - x2^2.
    let tail = |x0: u64, x1: u64, x2: u64, visit: &mut dyn FnMut(FpQuintuple)| {
        let t = sub_mod(mul_mod(two, sq(x2), p), sq(x1), p);
        if d != 0 {
            let x3sq = mul_mod(t, inv_mod(d, p).expect("d is a unit"), p);
            for x3 in sqrt.roots(x3sq) {
                let x4sq = sub_mod(mul_mod(two, t, p), sq(x2), p);
                for x4 in sqrt.roots(x4sq) {
                    visit([x0, x1, x2, x3, x4]);
                }
            }
        } else if t == 0 {
            let x4sq = sub_mod(0, sq(x2), p);
            for x3 in 0..p {
                for x4 in sqrt.roots(x4sq) {
                    visit([x0, x1, x2, x3, x4]);
                }
            }
        }
    };
    // chart x0 = 1: x2^2 = 2 x1^2 - 1
    for x1 in 0..p {
        for x2 in sqrt.roots(sub_mod(mul_mod(two, sq(x1), p), 1 % p, p)) {
            tail(1 % p, x1, x2, &mut visit);
        }
    }
    // chart x0 = 0, x1 = 1: x2^2 = 2
    for x2 in sqrt.roots(two) {
        tail(0, 1 % p, x2, &mut visit);
    }
    // x0 = x1 = 0 forces x2 = 0, then D x3^2 = 0 and x4 = 0
    if d == 0 {
        visit([0, 0, 0, 1 % p, 0]);
    }
}

/// `(j1, j2, k)` such that deleting columns `j1, j2` of the Jacobian of
/// `(F012, F123, F234)` leaves a minor equal to `k(D) * prod_{i != j1, j2} X_i`.
/// Each `k` is `(constant, uses_d)`.
pub const JACOBIAN_MINORS: [(usize, usize, i64, bool); 10] = [
    (0, 1, 8, true),
    (0, 2, -16, true),
    (0, 3, 24, false),
    (0, 4, -32, true),
    (1, 2, 8, true),
    (1, 3, -16, false),
    (1, 4, 24, true),
    (2, 3, 8, false),
    (2, 4, -16, true),
    (3, 4, 8, false),
];

/// Coefficients of `(F012, F123, F234)` as linear forms in `X_i^2`.
fn quadric_rows(d: u64, p: u64) -> [[u64; 5]; 3] {
    let m = |v: i64| reduce_i64(v, p);
    [
        [1, m(-2), 1, 0, 0],
        [0, 1, m(-2), d, 0],
        [0, 0, 1, sub_mod(0, mul_mod(2, d, p), p), 1],
    ]
}

/// Whether `C_D` is nonsingular over the algebraic closure of `F_p`.
///
/// When every minor constant is a unit, a singular point would need three
/// vanishing coordinates; the remaining two squares must then solve a
/// 3x2 linear system, which has a nonzero solution iff all its 2x2 minors
/// vanish.
pub fn is_good_reduction(d: i64, p: u64) -> Result<bool> {
    if p <= 3 {
        return Err(Error::InvalidArgument(format!("good-reduction criterion needs p > 3, got {p}")));
    }
    if !is_prime_u64(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let dm = reduce_i64(d, p);
    let units = JACOBIAN_MINORS.iter().all(|&(_, _, k, uses_d)| {
        let k = reduce_i64(k, p);
        let k = if uses_d { mul_mod(k, dm, p) } else { k };
        k != 0
    });
    if !units {
        return Ok(false);
    }
    let rows = quadric_rows(dm, p);
    for a in 0..5 {
        for b in a + 1..5 {
            let dependent = (0..3).all(|i| {
                (i + 1..3).all(|j| {
                    sub_mod(mul_mod(rows[i][a], rows[j][b], p), mul_mod(rows[i][b], rows[j][a], p), p) == 0
                })
            });
            if dependent {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A progression scaled by a rational square to coprime-as-possible integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedAp {
    /// `a, a + r, a + 2r, a + 3r, a + 4r`.
    #[serde(with = "crate::serde_dec::vec_array")]
    pub terms: [BigInt; 5],
    #[serde(with = "crate::serde_dec")]
    pub difference: BigInt,
    #[serde(with = "crate::serde_dec")]
    pub d: BigInt,
    /// Nonnegative `x0, x1, x2, x3, x4` with `terms = (x0^2, x1^2, x2^2, D x3^2, x4^2)`.
    #[serde(with = "crate::serde_dec::vec_array")]
    pub roots: [BigInt; 5],
}

impl NormalizedAp {
    pub fn point(&self) -> ApQuintuple {
        ApQuintuple { x: self.roots.clone(), d: self.d.clone() }
    }
}

fn rational_sqrt(v: &BigRational) -> Option<BigRational> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let m = v.denom().sqrt();
    (&n * &n == *v.numer() && &m * &m == *v.denom()).then(|| BigRational::new(n, m))
}

/// Scale a five-term progression with squares at positions 0, 1, 2, 4 and
/// `D` times a square at position 3 to primitive integers.
///
/// `d` must be squarefree; then the scaling is the least one making every
/// root integral and no square above 1 divides all five terms.
pub fn normalize_ap(terms: &[BigRational; 5], d: &BigInt) -> Result<NormalizedAp> {
    if d.is_zero() {
        return Err(Error::InvalidArgument("D = 0".into()));
    }
    let r = &terms[1] - &terms[0];
    if terms.windows(2).any(|w| &w[1] - &w[0] != r) {
        return Err(Error::NotSquarePattern("terms are not in arithmetic progression".into()));
    }
    if terms.iter().all(Zero::is_zero) {
        return Err(Error::NotSquarePattern("all terms vanish".into()));
    }
    let dq = BigRational::from_integer(d.clone());
    let mut roots = Vec::with_capacity(5);
    for (i, t) in terms.iter().enumerate() {
        let target = if i == 3 { t / &dq } else { t.clone() };
        let root = rational_sqrt(&target)
            .ok_or_else(|| Error::NotSquarePattern(format!("term {i} is not of the expected square class")))?;
        roots.push(root);
    }
    let denom_lcm = roots.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut ints: Vec<BigInt> = roots
        .iter()
        .map(|r| (r * BigRational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    for v in ints.iter_mut() {
        *v /= &g;
    }
    let roots: [BigInt; 5] = ints.try_into().expect("five roots");
    let sq = |v: &BigInt| v * v;
    let terms = [sq(&roots[0]), sq(&roots[1]), sq(&roots[2]), d * sq(&roots[3]), sq(&roots[4])];
    let difference = &terms[1] - &terms[0];
    Ok(NormalizedAp { terms, difference, d: d.clone(), roots })
}

/// Convert a small canonical point to machine integers, when it fits.
pub fn to_i64s(q: &ApQuintuple) -> Option<[i64; 5]> {
    let v: Option<Vec<i64>> = q.x.iter().map(|c| c.to_i64()).collect();
    v.map(|v| v.try_into().expect("five coordinates"))
}
