//! Segmented factor sieve over an interval, yielding squarefree integers
//! with their prime factors.

use smallvec::SmallVec;

use super::modular::isqrt_u64;
use super::prime::primes_up_to;

pub type PrimeList = SmallVec<[u64; 6]>;

/// Factors every integer of `[lo, hi)` in one pass.
pub struct SegmentSieve {
    base_primes: Vec<u64>,
}

impl SegmentSieve {
    /// Prepare for intervals whose upper end does not exceed `max`.
    pub fn new(max: u64) -> Self {
        SegmentSieve { base_primes: primes_up_to(isqrt_u64(max) + 1) }
    }

    /// Squarefree `n` in `[lo, hi)` with their ascending prime factors.
    pub fn squarefree(&self, lo: u64, hi: u64) -> Vec<(u64, PrimeList)> {
        assert!(lo >= 1 && lo <= hi);
        let len = (hi - lo) as usize;
        let mut rest: Vec<u64> = (lo..hi).collect();
        let mut primes: Vec<PrimeList> = vec![PrimeList::new(); len];
        let mut squarefree = vec![true; len];
        for &p in &self.base_primes {
            if p.saturating_mul(p) >= hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m < hi {
                let i = (m - lo) as usize;
                if squarefree[i] {
                    rest[i] /= p;
                    if rest[i].is_multiple_of(p) {
                        squarefree[i] = false;
                    } else {
                        primes[i].push(p);
                    }
                }
                m += p;
            }
        }
        let mut out = Vec::with_capacity(len);
        for (i, ((mut ps, r), sf)) in primes.into_iter().zip(rest).zip(squarefree).enumerate() {
            if !sf {
                continue;
            }
            if r > 1 {
                ps.push(r);
            }
            out.push((lo + i as u64, ps));
        }
        out
    }
}
