use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::fp::{FpCurve, FpPoint};
use crate::arith::modular::{inv_mod, mul_mod};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QPoint {
    Infinity,
    Affine(BigRational, BigRational),
}

impl QPoint {
    pub fn from_ints(x: i64, y: i64) -> Self {
        QPoint::Affine(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, QPoint::Infinity)
    }
}

/// `y^2 = x^3 + a2 x^2 + a4 x + a6` over the rationals, exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QCurve {
    pub a2: BigRational,
    pub a4: BigRational,
    pub a6: BigRational,
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

impl QCurve {
    pub fn from_ints(a2: i64, a4: i64, a6: i64) -> Result<Self> {
        let c = QCurve { a2: q(a2), a4: q(a4), a6: q(a6) };
        if c.discriminant().is_zero() {
            return Err(Error::InvalidArgument("singular cubic".into()));
        }
        Ok(c)
    }

    /// `16 * disc` of the cubic.
    pub fn discriminant(&self) -> BigRational {
        let (a2, a4, a6) = (&self.a2, &self.a4, &self.a6);
        let d = a2 * a2 * a4 * a4 - q(4) * a4 * a4 * a4 - q(4) * a2 * a2 * a2 * a6 + q(18) * a2 * a4 * a6
            - q(27) * a6 * a6;
        q(16) * d
    }

    pub fn rhs(&self, x: &BigRational) -> BigRational {
        ((x + &self.a2) * x + &self.a4) * x + &self.a6
    }

    pub fn contains(&self, pt: &QPoint) -> bool {
        match pt {
            QPoint::Infinity => true,
            QPoint::Affine(x, y) => y * y == self.rhs(x),
        }
    }

    pub fn neg(&self, pt: &QPoint) -> QPoint {
        match pt {
            QPoint::Infinity => QPoint::Infinity,
            QPoint::Affine(x, y) => QPoint::Affine(x.clone(), -y),
        }
    }

    pub fn add(&self, a: &QPoint, b: &QPoint) -> QPoint {
        let (x1, y1, x2, y2) = match (a, b) {
            (QPoint::Infinity, _) => return b.clone(),
            (_, QPoint::Infinity) => return a.clone(),
            (QPoint::Affine(x1, y1), QPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return QPoint::Infinity;
            }
            (q(3) * x1 * x1 + q(2) * &self.a2 * x1 + &self.a4) / (q(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - &self.a2 - x1 - x2;
        let y3 = &lambda * (x1 - &x3) - y1;
        QPoint::Affine(x3, y3)
    }

    pub fn mul(&self, n: i64, pt: &QPoint) -> QPoint {
        let mut k = n.unsigned_abs();
        let mut acc = QPoint::Infinity;
        let mut base = pt.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        if n < 0 {
            self.neg(&acc)
        } else {
            acc
        }
    }

    /// Reduction modulo a prime of good reduction.
    pub fn reduce(&self, p: u64) -> Result<FpCurve> {
        let r = |v: &BigRational| reduce_rational(v, p).ok_or(Error::BadReduction(p));
        let (a2, a4, a6) = (r(&self.a2)?, r(&self.a4)?, r(&self.a6)?);
        FpCurve::new(p, a2, a4, a6)
    }

    /// Image of a rational point; a `p` in the denominator of `x` sends it to infinity.
    pub fn reduce_point(&self, pt: &QPoint, p: u64) -> FpPoint {
        match pt {
            QPoint::Infinity => FpPoint::Infinity,
            QPoint::Affine(x, y) => match (reduce_rational(x, p), reduce_rational(y, p)) {
                (Some(x), Some(y)) => FpPoint::Affine(x, y),
                _ => FpPoint::Infinity,
            },
        }
    }
}

/// `v mod p`, or `None` when `p` divides the denominator.
pub fn reduce_rational(v: &BigRational, p: u64) -> Option<u64> {
    let m = BigInt::from(p);
    let num = v.numer().mod_floor(&m).to_u64()?;
    let den = v.denom().mod_floor(&m).to_u64()?;
    inv_mod(den, p).map(|inv| mul_mod(num, inv, p))
}

/// `y^2 = x(x+2)(x+6)`, the curve the sieve maps into.
pub fn e1() -> QCurve {
    QCurve::from_ints(8, 12, 0).expect("nonsingular")
}

/// `(6, 24)`: together with the 2-torsion it generates `E1(Q)`.
pub fn sieve_base_point() -> QPoint {
    QPoint::from_ints(6, 24)
}

/// `(2, -8)`: generator of the free part used by the progression generator.
pub fn generator_point() -> QPoint {
    QPoint::from_ints(2, -8)
}

/// The 2-torsion basis `(-2, 0)`, `(-6, 0)`.
pub fn torsion_basis() -> [QPoint; 2] {
    [QPoint::from_ints(-2, 0), QPoint::from_ints(-6, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_points_lie_on_e1() {
        let e = e1();
        assert!(e.contains(&sieve_base_point()));
        assert!(e.contains(&generator_point()));
        for t in torsion_basis() {
            assert!(e.contains(&t));
            assert!(e.add(&t, &t).is_infinity());
        }
    }

    #[test]
    fn doubling_generator() {
        let e = e1();
        let p = generator_point();
        let two = e.add(&p, &p);
        assert!(e.contains(&two));
        assert_eq!(e.mul(2, &p), two);
        assert_eq!(e.mul(-2, &p), e.neg(&two));
        assert!(e.mul(0, &p).is_infinity());
        assert_eq!(e.mul(1, &p), p);
    }

    #[test]
    fn inverse_sums_to_identity() {
        let e = e1();
        let p = sieve_base_point();
        assert!(e.add(&p, &e.neg(&p)).is_infinity());
    }

    #[test]
    fn reduction() {
        let e = e1();
        assert_eq!(e.reduce(7).unwrap().coefficients(), (1, 5, 0));
        assert!(matches!(e.reduce(2), Err(Error::BadReduction(2))));
        assert!(e.reduce(13).is_ok());
    }
}
