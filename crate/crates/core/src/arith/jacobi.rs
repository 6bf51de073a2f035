use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Jacobi symbol `(a/n)` for odd `n`.
pub fn jacobi_u64(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Jacobi symbol `(a/n)` with a signed numerator.
pub fn jacobi_i64(a: i64, n: u64) -> i8 {
    jacobi_u64(super::modular::reduce_i64(a, n), n)
}

/// Jacobi symbol `(a/n)` for arbitrary integers; `n` must be odd and positive.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i8> {
    if n.sign() != Sign::Plus || n.is_even() {
        return Err(Error::InvalidArgument(format!(
            "Jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let n = n.magnitude();
    let a = a.mod_floor(&BigInt::from_biguint(Sign::Plus, n.clone()));
    let a = a.magnitude();
    if let (Some(a), Some(n)) = (a.to_u64(), n.to_u64()) {
        return Ok(jacobi_u64(a, n));
    }
    Ok(jacobi_big(a.clone(), n.clone()))
}

fn jacobi_big(mut a: BigUint, mut n: BigUint) -> i8 {
    let mut t = 1i8;
    let low = |x: &BigUint, m: u64| (x.iter_u64_digits().next().unwrap_or(0)) % m;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        if tz % 2 == 1 && matches!(low(&n, 8), 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if low(&a, 4) == 3 && low(&n, 4) == 3 {
            t = -t;
        }
        a %= &n;
    }
    if n == BigUint::from(1u8) {
        t
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_by_table(a: u64, p: u64) -> i8 {
        let a = a % p;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn documented_values() {
        assert_eq!(jacobi_u64(1, 7), 1);
        assert_eq!(jacobi_u64(2, 7), 1);
        assert_eq!(jacobi_u64(409, 5), 1);
        assert_eq!(jacobi_i64(-1, 7), -1);
    }

    #[test]
    fn rejects_even_or_nonpositive_modulus() {
        assert!(jacobi(&BigInt::from(3), &BigInt::from(8)).is_err());
        assert!(jacobi(&BigInt::from(3), &BigInt::from(-7)).is_err());
        assert!(jacobi(&BigInt::from(3), &BigInt::from(0)).is_err());
        assert_eq!(jacobi(&BigInt::from(3), &BigInt::from(1)).unwrap(), 1);
    }

    #[test]
    fn legendre_agrees_with_residue_table() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97] {
            for a in 0..2 * p {
                assert_eq!(jacobi_u64(a, p), legendre_by_table(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn big_path_matches_word_path() {
        let n: BigInt = "1000000000000000000000000000057".parse().unwrap();
        let a: BigInt = "-123456789123456789123456789".parse().unwrap();
        let j = jacobi(&a, &n).unwrap();
        // multiplicativity across the big path
        let a2 = &a * &a;
        assert_eq!(jacobi(&a2, &n).unwrap(), j * j);
    }
}
