//! Integer factorization: trial division, then Brent's variant of Pollard rho
//! under a wall-clock budget.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::modular::{gcd_u64, mul_mod};
use super::prime::{is_prime_u64, is_probable_prime, small_primes};

const MR_ROUNDS: u32 = 24;

/// How much effort [`factor`] may spend, and how rho picks its parameters.
#[derive(Clone, Copy, Debug)]
pub struct FactorBudget {
    pub time: Duration,
    pub seed: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { time: Duration::from_secs(10), seed: 0 }
    }
}

impl FactorBudget {
    pub fn millis(ms: u64) -> Self {
        FactorBudget { time: Duration::from_millis(ms), ..Default::default() }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        FactorBudget { seed, ..self }
    }
}

/// `value = residual * prod(prime^exponent)`.
///
/// `factors` is sorted by prime. A `residual` other than 1 is a composite
/// cofactor that could not be split within the budget; it has no prime
/// factor below the trial-division bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "crate::serde_dec")]
    pub value: BigUint,
    pub factors: Vec<PrimePower>,
    #[serde(with = "crate::serde_dec")]
    pub residual: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub exponent: u32,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.residual.is_one()
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|f| &f.prime)
    }

    /// Multiply everything back together.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(self.residual.clone(), |acc, f| acc * f.prime.pow(f.exponent))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|pp| {
                if pp.exponent == 1 {
                    pp.prime.to_string()
                } else {
                    format!("{}^{}", pp.prime, pp.exponent)
                }
            })
            .collect();
        if !self.residual.is_one() {
            parts.push(format!("[{}]", self.residual));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        f.write_str(&parts.join(" * "))
    }
}

/// Factor `n >= 1`.
///
/// Budget exhaustion is not an error: the unsplit part is left in
/// [`Factorization::residual`].
pub fn factor(n: &BigUint, budget: &FactorBudget) -> Factorization {
    assert!(!n.is_zero(), "factor(0) is undefined");
    let deadline = Instant::now() + budget.time;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut primes: Vec<BigUint> = Vec::new();
    let mut rest = n.clone();

    for &p in small_primes() {
        if BigUint::from(p * p) > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            primes.push(BigUint::from(p));
        }
    }

    let mut residual = BigUint::one();
    let mut stack = vec![(rest, 1u32)];
    while let Some((c, mult)) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if let Some(small) = c.to_u64() {
            for (p, e) in factor_u64(small) {
                for _ in 0..e * mult {
                    primes.push(BigUint::from(p));
                }
            }
            continue;
        }
        if is_probable_prime(&c, MR_ROUNDS) {
            for _ in 0..mult {
                primes.push(c.clone());
            }
            continue;
        }
        if let Some((root, k)) = perfect_power(&c) {
            stack.push((root, mult * k));
            continue;
        }
        match split_big(&c, &mut rng, deadline) {
            Some(d) => {
                let other = &c / &d;
                stack.push((d, mult));
                stack.push((other, mult));
            }
            None => residual *= c.pow(mult),
        }
    }

    primes.sort();
    let mut factors: Vec<PrimePower> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some(last) if last.prime == p => last.exponent += 1,
            _ => factors.push(PrimePower { prime: p, exponent: 1 }),
        }
    }
    Factorization { value: n.clone(), factors, residual }
}

/// Complete factorization of a machine word, as sorted `(prime, exponent)`.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for &p in small_primes().iter().take_while(|&&p| p <= 1000) {
        if p * p > n {
            break;
        }
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut found = Vec::new();
    let mut c_seed = 1u64;
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            found.push(m);
            continue;
        }
        let d = loop {
            if let Some(d) = brent_u64(m, c_seed, 2) {
                break d;
            }
            c_seed += 1;
        };
        stack.push(d);
        stack.push(m / d);
    }
    found.sort_unstable();
    for p in found {
        match out.last_mut() {
            Some(last) if last.0 == p => last.1 += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    out
}

fn brent_u64(n: u64, c: u64, x0: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let m = 128u64;
    let (mut y, mut r, mut q) = (x0 % n, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    let mut g = 1;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_big(n: &BigUint, rng: &mut ChaCha8Rng, deadline: Instant) -> Option<BigUint> {
    while Instant::now() < deadline {
        let c = BigUint::from(rng.next_u64() % 1_000_000 + 1);
        let x0 = BigUint::from(rng.next_u64()) % n;
        if let Some(d) = brent_big(n, &c, x0, deadline) {
            return Some(d);
        }
    }
    None
}

fn brent_big(n: &BigUint, c: &BigUint, x0: BigUint, deadline: Instant) -> Option<BigUint> {
    let f = |x: &BigUint| (x * x + c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a >= b { a - b } else { b - a };
    let m = 256u64;
    let mut y = x0;
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = q * diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += m;
            if Instant::now() >= deadline {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// `Some((root, k))` with `root^k == n` and `k >= 2` maximal-first.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let max_k = (n.bits() / 16).max(2) as u32;
    for k in (2..=max_k).rev() {
        let r = n.nth_root(k);
        if &r.pow(k) == n {
            return Some((r, k));
        }
    }
    None
}
