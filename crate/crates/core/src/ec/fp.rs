use std::collections::HashMap;

use crate::arith::factor_u64;
use crate::arith::modular::{add_mod, inv_mod, isqrt_u64, mul_mod, sqrt_mod, sub_mod};
use crate::{Error, Result};

/// A point of `y^2 = x^3 + a2 x^2 + a4 x + a6` over `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FpPoint {
    Infinity,
    Affine(u64, u64),
}

impl FpPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, FpPoint::Infinity)
    }

    pub fn x(&self) -> Option<u64> {
        match *self {
            FpPoint::Infinity => None,
            FpPoint::Affine(x, _) => Some(x),
        }
    }
}

/// `y^2 = x^3 + a2 x^2 + a4 x + a6` over `Z/pZ`.
///
/// The group law is only meaningful when `p` is prime; over a composite
/// modulus a non-invertible denominator is reported as
/// [`Error::NotInvertible`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpCurve {
    p: u64,
    a2: u64,
    a4: u64,
    a6: u64,
}

const LINEAR_SCAN_BELOW: u64 = 1000;

impl FpCurve {
    /// Fails with [`Error::BadReduction`] when the curve is singular mod `p`.
    pub fn new(p: u64, a2: u64, a4: u64, a6: u64) -> Result<Self> {
        if !(2..1 << 62).contains(&p) {
            return Err(Error::InvalidArgument(format!("modulus {p} out of range")));
        }
        let c = FpCurve { p, a2: a2 % p, a4: a4 % p, a6: a6 % p };
        if c.discriminant() == 0 {
            return Err(Error::BadReduction(p));
        }
        Ok(c)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coefficients(&self) -> (u64, u64, u64) {
        (self.a2, self.a4, self.a6)
    }

    /// `16 * disc(x^3 + a2 x^2 + a4 x + a6)` reduced mod `p`.
    pub fn discriminant(&self) -> u64 {
        let p = self.p;
        let m = |a: u64, b: u64| mul_mod(a, b, p);
        let (a2, a4, a6) = (self.a2, self.a4, self.a6);
        let pos = add_mod(m(m(a2, a2), m(a4, a4)), m(18, m(a2, m(a4, a6))), p);
        let neg = add_mod(
            add_mod(m(4, m(a4, m(a4, a4))), m(4, m(m(a2, a2), m(a2, a6))), p),
            m(27, m(a6, a6)),
            p,
        );
        m(16 % p, sub_mod(pos, neg, p))
    }

    pub fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        let t = mul_mod(add_mod(x, self.a2, p), x, p);
        add_mod(mul_mod(add_mod(t, self.a4, p), x, p), self.a6, p)
    }

    pub fn contains(&self, pt: &FpPoint) -> bool {
        match *pt {
            FpPoint::Infinity => true,
            FpPoint::Affine(x, y) => x < self.p && y < self.p && mul_mod(y, y, self.p) == self.rhs(x),
        }
    }

    pub fn point(&self, x: i64, y: i64) -> Result<FpPoint> {
        let p = self.p as i128;
        let pt = FpPoint::Affine((x as i128).rem_euclid(p) as u64, (y as i128).rem_euclid(p) as u64);
        if self.contains(&pt) {
            Ok(pt)
        } else {
            Err(Error::NotOnCurve)
        }
    }

    /// A point with the given `x`, if `rhs(x)` is a square mod `p` (`p` odd prime).
    pub fn lift_x(&self, x: u64) -> Option<FpPoint> {
        let x = x % self.p;
        sqrt_mod(self.rhs(x), self.p).map(|y| FpPoint::Affine(x, y))
    }

    pub fn neg(&self, pt: &FpPoint) -> FpPoint {
        match *pt {
            FpPoint::Infinity => FpPoint::Infinity,
            FpPoint::Affine(x, y) => FpPoint::Affine(x, (self.p - y) % self.p),
        }
    }

    fn inv(&self, v: u64) -> Result<u64> {
        inv_mod(v, self.p).ok_or(Error::NotInvertible { value: v, modulus: self.p })
    }

    pub fn add(&self, a: &FpPoint, b: &FpPoint) -> Result<FpPoint> {
        let p = self.p;
        let (x1, y1, x2, y2) = match (*a, *b) {
            (FpPoint::Infinity, _) => return Ok(*b),
            (_, FpPoint::Infinity) => return Ok(*a),
            (FpPoint::Affine(x1, y1), FpPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if add_mod(y1, y2, p) == 0 {
                return Ok(FpPoint::Infinity);
            }
            // tangent: (3x^2 + 2 a2 x + a4) / 2y
            let num = add_mod(
                add_mod(mul_mod(3, mul_mod(x1, x1, p), p), mul_mod(2, mul_mod(self.a2, x1, p), p), p),
                self.a4,
                p,
            );
            mul_mod(num, self.inv(mul_mod(2, y1, p))?, p)
        } else {
            mul_mod(sub_mod(y2, y1, p), self.inv(sub_mod(x2, x1, p))?, p)
        };
        let x3 = sub_mod(sub_mod(sub_mod(mul_mod(lambda, lambda, p), self.a2, p), x1, p), x2, p);
        let y3 = sub_mod(mul_mod(lambda, sub_mod(x1, x3, p), p), y1, p);
        Ok(FpPoint::Affine(x3, y3))
    }

    pub fn double(&self, a: &FpPoint) -> Result<FpPoint> {
        self.add(a, a)
    }

    /// `[n]P` by double-and-add.
    pub fn mul(&self, n: i64, pt: &FpPoint) -> Result<FpPoint> {
        let q = self.mul_u64(n.unsigned_abs(), pt)?;
        Ok(if n < 0 { self.neg(&q) } else { q })
    }

    pub fn mul_u64(&self, mut n: u64, pt: &FpPoint) -> Result<FpPoint> {
        let mut acc = FpPoint::Infinity;
        let mut base = *pt;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            n >>= 1;
            if n > 0 {
                base = self.double(&base)?;
            }
        }
        Ok(acc)
    }

    /// Every point of the curve, by enumeration of `x` (small `p` only).
    pub fn points(&self) -> Vec<FpPoint> {
        let p = self.p;
        let mut roots: Vec<Vec<u64>> = vec![Vec::new(); p as usize];
        for y in 0..p {
            roots[mul_mod(y, y, p) as usize].push(y);
        }
        let mut out = vec![FpPoint::Infinity];
        for x in 0..p {
            for &y in &roots[self.rhs(x) as usize] {
                out.push(FpPoint::Affine(x, y));
            }
        }
        out
    }

    /// Least `n >= 1` with `[n]P = O` (`p` prime).
    ///
    /// Small moduli are scanned; otherwise baby-step/giant-step over the
    /// Hasse interval finds a multiple of the order, which is then reduced.
    pub fn point_order(&self, pt: &FpPoint) -> Result<u64> {
        if !self.contains(pt) {
            return Err(Error::NotOnCurve);
        }
        if pt.is_infinity() {
            return Ok(1);
        }
        let p = self.p;
        if p < LINEAR_SCAN_BELOW {
            let mut q = *pt;
            let mut n = 1;
            while !q.is_infinity() {
                q = self.add(&q, pt)?;
                n += 1;
            }
            return Ok(n);
        }
        let spread = isqrt_u64(4 * p);
        let lo = p + 1 - spread;
        let hi = p + 1 + spread + 1;
        let width = hi - lo + 1;
        let s = isqrt_u64(width) + 1;

        let mut baby: HashMap<FpPoint, u64> = HashMap::with_capacity(s as usize);
        let mut q = FpPoint::Infinity;
        for j in 0..s {
            baby.entry(q).or_insert(j);
            q = self.add(&q, pt)?;
        }
        let giant = self.mul_u64(s, pt)?;
        let mut r = self.mul_u64(lo, pt)?;
        let mut multiple = None;
        for i in 0..=width / s + 1 {
            if let Some(&j) = baby.get(&self.neg(&r)) {
                multiple = Some(lo + i * s + j);
                break;
            }
            r = self.add(&r, &giant)?;
        }
        let mut m = multiple
            .ok_or_else(|| Error::InvalidArgument(format!("no multiple of the order in the Hasse interval; is {p} prime?")))?;
        for (l, _) in factor_u64(m) {
            while m % l == 0 && self.mul_u64(m / l, pt)?.is_infinity() {
                m /= l;
            }
        }
        Ok(m)
    }

    /// `k` in `[0, order)` with `[k]P = Q`, or `None` when `Q` is not in `<P>`.
    pub fn discrete_log(&self, base: &FpPoint, order: u64, target: &FpPoint) -> Result<Option<u64>> {
        if order < LINEAR_SCAN_BELOW {
            let mut q = FpPoint::Infinity;
            for k in 0..order {
                if q == *target {
                    return Ok(Some(k));
                }
                q = self.add(&q, base)?;
            }
            return Ok(None);
        }
        let s = isqrt_u64(order) + 1;
        let mut baby: HashMap<FpPoint, u64> = HashMap::with_capacity(s as usize);
        let mut q = FpPoint::Infinity;
        for j in 0..s {
            baby.entry(q).or_insert(j);
            q = self.add(&q, base)?;
        }
        let giant = self.neg(&self.mul_u64(s, base)?);
        let mut r = *target;
        for i in 0..=s {
            if let Some(&j) = baby.get(&r) {
                return Ok(Some((i * s + j) % order));
            }
            r = self.add(&r, &giant)?;
        }
        Ok(None)
    }

    /// The multiples `[0]P, [1]P, ..., [order-1]P` keyed by point.
    pub fn multiples_index(&self, base: &FpPoint, order: u64) -> Result<HashMap<FpPoint, u64>> {
        let mut index = HashMap::with_capacity(order as usize);
        let mut q = FpPoint::Infinity;
        for k in 0..order {
            index.insert(q, k);
            q = self.add(&q, base)?;
        }
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(p: u64) -> FpCurve {
        FpCurve::new(p, 8, 12, 0).unwrap()
    }

    #[test]
    fn reduction_coefficients() {
        assert_eq!(e1(7).coefficients(), (1, 5, 0));
        assert!(matches!(FpCurve::new(2, 8, 12, 0), Err(Error::BadReduction(2))));
        assert!(matches!(FpCurve::new(3, 8, 12, 0), Err(Error::BadReduction(3))));
        assert!(FpCurve::new(13, 8, 12, 0).is_ok());
    }

    #[test]
    fn identity_and_inverse() {
        let c = e1(7);
        let p = c.point(6, 24).unwrap();
        assert_eq!(c.add(&p, &FpPoint::Infinity).unwrap(), p);
        assert_eq!(c.add(&p, &c.point(6, -24).unwrap()).unwrap(), FpPoint::Infinity);
    }

    #[test]
    fn orders_of_base_point() {
        let p7 = e1(7).point(6, 24).unwrap();
        assert_eq!(e1(7).point_order(&p7).unwrap(), 6);
        let twice = e1(7).mul(2, &p7).unwrap();
        assert!(e1(7).contains(&twice));
        assert_eq!(e1(7).point_order(&twice).unwrap(), 3);
        assert!(e1(7).mul(6, &p7).unwrap().is_infinity());
        let p23 = e1(23).point(6, 24).unwrap();
        assert_eq!(e1(23).point_order(&p23).unwrap(), 3);
        assert_eq!(e1(23).point_order(&FpPoint::Infinity).unwrap(), 1);
    }

    #[test]
    fn discrete_log_small() {
        let c = e1(7);
        let p = c.point(6, 24).unwrap();
        assert_eq!(c.discrete_log(&p, 6, &p).unwrap(), Some(1));
        assert_eq!(c.discrete_log(&p, 6, &FpPoint::Infinity).unwrap(), Some(0));
        let q = c.mul(5, &p).unwrap();
        assert_eq!(c.discrete_log(&p, 6, &q).unwrap(), Some(5));
    }

    #[test]
    fn bsgs_matches_scan_on_large_prime() {
        let c = e1(1_000_003);
        let p = c.point(6, 24).unwrap();
        let order = c.point_order(&p).unwrap();
        assert!(c.mul_u64(order, &p).unwrap().is_infinity());
        let count = c.points().len() as u64;
        assert_eq!(count % order, 0);
        for k in [1u64, 2, 999, order / 2 + 7, order - 1] {
            let q = c.mul_u64(k, &p).unwrap();
            assert_eq!(c.discrete_log(&p, order, &q).unwrap(), Some(k % order));
        }
        // a point outside <P>, when one exists
        let t = c.point(0, 0).unwrap();
        if c.mul_u64(order, &t).unwrap() != FpPoint::Infinity {
            assert_eq!(c.discrete_log(&p, order, &t).unwrap(), None);
        }
    }

    #[test]
    fn composite_modulus_reports_non_invertible() {
        // y^2 = x^3 + 1 over Z/35; two points agreeing mod 5 but not mod 7
        // make the chord slope denominator a multiple of 5
        let c = FpCurve::new(35, 0, 0, 1).unwrap();
        let p = c.point(2, 3).unwrap();
        let q = (0..35u64)
            .flat_map(|x| (0..35u64).map(move |y| (x, y)))
            .map(|(x, y)| FpPoint::Affine(x, y))
            .find(|pt| match *pt {
                FpPoint::Affine(x, _) => c.contains(pt) && x % 5 == 2 && x % 7 != 2,
                _ => false,
            })
            .unwrap();
        assert!(matches!(c.add(&p, &q), Err(Error::NotInvertible { modulus: 35, .. })));
    }
}
