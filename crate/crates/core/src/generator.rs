//! Five-square progressions over `Q(sqrt D_n)` from multiples of `(2, -8)` on `E1`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, squarefree_split_with_factors, FactorBudget, Factorization, PrimePower};
use crate::ec::{e1, generator_point, torsion_basis, QPoint};
use crate::quintic::{normalize_ap, NormalizedAp};
use crate::{Error, Result};

/// Image of `psi`: an affine point of `z^2 = p(t)` or one of the two branches at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiImage {
    Affine(BigRational, BigRational),
    /// `1` for the image of `(-2, 0)`, `2` for the image of `(-3, -3)`.
    Infinity(u8),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `p(t) = t^4 - 12t^3 + 2t^2 + 12t + 1`.
pub fn quartic_p(t: &BigRational) -> BigRational {
    horner(t, &[1, -12, 2, 12, 1])
}

/// `q(t) = t^4 - 8t^3 + 2t^2 + 8t + 1`.
pub fn quartic_q(t: &BigRational) -> BigRational {
    horner(t, &[1, -8, 2, 8, 1])
}

fn horner(t: &BigRational, coeffs: &[i64]) -> BigRational {
    coeffs.iter().fold(BigRational::zero(), |acc, &c| acc * t + rat(c))
}

/// `Q(a, b) = a^4 - 8a^3 b + 2a^2 b^2 + 8ab^3 + b^4`, so that `q(a/b) = Q(a, b) / b^4`.
pub fn quartic_q_homogeneous(a: &BigInt, b: &BigInt) -> BigInt {
    let (a2, b2) = (a * a, b * b);
    &a2 * &a2 - 8 * &a2 * a * b + 2 * &a2 * &b2 + 8 * a * b * &b2 + &b2 * &b2
}

/// `(x, y) -> ((6 - x) / (6 + 3x - y), (-72 - 108x - 18x^2 + x^3 + 48y) / (6 + 3x - y)^2)`.
pub fn psi(pt: &QPoint) -> Result<PsiImage> {
    let QPoint::Affine(x, y) = pt else {
        return Err(Error::PsiAtIdentity);
    };
    let den = rat(6) + rat(3) * x - y;
    if den.is_zero() {
        return Ok(if *x == rat(-2) && y.is_zero() {
            PsiImage::Infinity(1)
        } else if *x == rat(-3) && *y == rat(-3) {
            PsiImage::Infinity(2)
        } else {
            PsiImage::Affine(rat(2) / rat(3), rat(23) / rat(9))
        });
    }
    let t = (rat(6) - x) / &den;
    let num = rat(-72) - rat(108) * x - rat(18) * x * x + x * x * x + rat(48) * y;
    Ok(PsiImage::Affine(t, num / (&den * &den)))
}

/// One term of the sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenRecord {
    pub n: i64,
    #[serde(with = "crate::serde_dec")]
    pub t: BigRational,
    #[serde(with = "crate::serde_dec")]
    pub z: BigRational,
    #[serde(with = "crate::serde_dec")]
    pub d: BigInt,
    /// `q(t) = D w^2`.
    #[serde(with = "crate::serde_dec")]
    pub w: BigRational,
    pub ap: NormalizedAp,
    pub d_factorization: Factorization,
    pub x0_factorization: Factorization,
    /// False when a factorization ran out of budget and a residual was assumed squarefree.
    pub proven: bool,
}

impl fmt::Display for GenRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} D={} X0={}", self.n, self.d_factorization, self.x0_factorization)?;
        if !self.proven {
            f.write_str(" (unproven)")?;
        }
        Ok(())
    }
}

/// `(t_n, z_n) = psi([n](2, -8))`, with `(0, 1)` for `n = 0`.
pub fn sequence_point(n: i64) -> Result<(BigRational, BigRational)> {
    if n == 0 {
        return Ok((BigRational::zero(), BigRational::one()));
    }
    point_image(n, &e1().mul(n, &generator_point()))
}

fn point_image(n: i64, pt: &QPoint) -> Result<(BigRational, BigRational)> {
    match psi(pt)? {
        PsiImage::Affine(t, z) => Ok((t, z)),
        PsiImage::Infinity(branch) => Err(Error::InfinityBranch { n, branch }),
    }
}

/// `(-t^2-2t+1)^2, (t^2+1)^2, (t^2-2t-1)^2, q(t), z^2`.
pub fn progression_terms(t: &BigRational, z: &BigRational) -> [BigRational; 5] {
    let t2 = t * t;
    let sq = |v: BigRational| &v * &v;
    [
        sq(-&t2 - rat(2) * t + rat(1)),
        sq(&t2 + rat(1)),
        sq(&t2 - rat(2) * t - rat(1)),
        quartic_q(t),
        z * z,
    ]
}

/// Factorization of the squarefree part, read off the factorization of `n`.
fn squarefree_part_factors(f: &Factorization, d: &BigInt) -> Factorization {
    Factorization {
        value: d.magnitude().clone(),
        factors: f
            .factors
            .iter()
            .filter(|pp| pp.exponent % 2 == 1)
            .map(|pp| PrimePower { prime: pp.prime.clone(), exponent: 1 })
            .collect(),
        residual: f.residual.clone(),
    }
}

pub fn generate(n: i64, budget: &FactorBudget) -> Result<GenRecord> {
    let (t, z) = sequence_point(n)?;
    record_from(n, t, z, budget)
}

fn record_from(n: i64, t: BigRational, z: BigRational, budget: &FactorBudget) -> Result<GenRecord> {
    let big_q = quartic_q_homogeneous(t.numer(), t.denom());
    let (split, qf) = squarefree_split_with_factors(&big_q, budget)?;
    let b2 = t.denom() * t.denom();
    let w = BigRational::new(BigInt::from(split.w.clone()), b2);
    let ap = normalize_ap(&progression_terms(&t, &z), &split.d)?;
    let x0_factorization = factor(ap.roots[0].magnitude(), budget);
    let proven = split.proven && x0_factorization.is_complete();
    Ok(GenRecord {
        n,
        t,
        z,
        d_factorization: squarefree_part_factors(&qf, &split.d),
        d: split.d,
        w,
        ap,
        x0_factorization,
        proven,
    })
}

/// The image of one translate `[m]P + T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Translate {
    Record(Box<GenRecord>),
    /// `psi` sends the translate to a branch at infinity.
    Infinity { point: QPoint, branch: u8 },
}

/// Records for `[m]P + T` with `m` in `{n, -n-1}` and `T` rational 2-torsion.
pub fn torsion_translates(n: i64, budget: &FactorBudget) -> Result<Vec<Translate>> {
    let curve = e1();
    let [t1, t2] = torsion_basis();
    let torsion = [QPoint::Infinity, t1.clone(), t2.clone(), curve.add(&t1, &t2)];
    let mut out = Vec::new();
    for m in [n, -n - 1] {
        let p = curve.mul(m, &generator_point());
        for t in &torsion {
            let q = curve.add(&p, t);
            out.push(match psi(&q)? {
                PsiImage::Affine(t, z) => Translate::Record(Box::new(record_from(n, t, z, budget)?)),
                PsiImage::Infinity(branch) => Translate::Infinity { point: q, branch },
            });
        }
    }
    Ok(out)
}

/// One published row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub n: i64,
    pub d: BigInt,
    pub d_text: String,
    pub x0: BigInt,
    pub x0_text: String,
}

const FIXTURES: &str = include_str!("../data/sequence.txt");

fn parse_product(s: &str) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for part in s.split('*') {
        let (base, exp) = match part.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().map_err(|e| Error::Parse(format!("{part}: {e}")))?),
            None => (part, 1),
        };
        let base: BigInt = base.parse().map_err(|e| Error::Parse(format!("{part}: {e}")))?;
        acc *= base.pow(exp);
    }
    Ok(acc)
}

pub fn fixtures() -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for line in FIXTURES.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [n, d, x0] = cols[..] else {
            return Err(Error::Parse(format!("bad fixture line {line:?}")));
        };
        out.push(Fixture {
            n: n.parse().map_err(|e| Error::Parse(format!("{n}: {e}")))?,
            d: parse_product(d)?,
            d_text: d.into(),
            x0: parse_product(x0)?,
            x0_text: x0.into(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCheck {
    pub n: i64,
    /// `Q(a_n, b_n) / D_n` is a nonzero square.
    pub d_divides_square: bool,
    /// The normalized fourth term is `D_n` itself.
    pub w_is_one: bool,
    pub x0_matches: bool,
    pub computed_x0: String,
}

impl TableCheck {
    pub fn ok(&self) -> bool {
        self.d_divides_square && self.w_is_one && self.x0_matches
    }
}

/// Check the published rows up to `n_max` without factoring anything.
pub fn verify_table(n_max: i64) -> Result<Vec<TableCheck>> {
    if n_max > 8 {
        return Err(Error::InvalidArgument(format!("published rows stop at n = 8, asked for {n_max}")));
    }
    let mut out = Vec::new();
    for fx in fixtures()?.into_iter().filter(|f| f.n <= n_max) {
        let (t, z) = sequence_point(fx.n)?;
        let big_q = quartic_q_homogeneous(t.numer(), t.denom());
        let (quot, rem) = (&big_q / &fx.d, &big_q % &fx.d);
        let d_divides_square = rem.is_zero() && quot.is_positive() && {
            let r = quot.sqrt();
            &r * &r == quot
        };
        let (w_is_one, computed_x0) = match normalize_ap(&progression_terms(&t, &z), &fx.d) {
            Ok(ap) => (ap.roots[3] == BigInt::one(), ap.roots[0].clone()),
            Err(_) => (false, BigInt::zero()),
        };
        out.push(TableCheck {
            n: fx.n,
            d_divides_square,
            w_is_one,
            x0_matches: computed_x0 == fx.x0,
            computed_x0: computed_x0.to_string(),
        });
    }
    Ok(out)
}

/// `D_n` from the fixture table, when listed.
pub fn published_d(n: i64) -> Option<BigUint> {
    fixtures().ok()?.into_iter().find(|f| f.n == n).map(|f| f.d.magnitude().clone())
}
