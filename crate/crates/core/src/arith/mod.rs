//! Integer arithmetic utilities: residue symbols, primality, factoring,
//! squarefree parts, CRT intersection and a segmented factor sieve.

mod crt;
mod factor;
mod jacobi;
pub mod modular;
mod prime;
mod sieve;
mod squarefree;

pub use crt::{crt_decide, crt_intersect, crt_search, CrtDecision, CrtLimits, CrtOutcome, ResidueClass, SearchOutcome};
pub use factor::{factor, factor_u64, FactorBudget, Factorization, PrimePower};
pub use jacobi::{jacobi, jacobi_i64, jacobi_u64};
pub use prime::{is_prime_u64, is_probable_prime, primes_up_to, small_primes, TRIAL_BOUND};
pub use sieve::{PrimeList, SegmentSieve};
pub use squarefree::{squarefree_split, squarefree_split_with_factors, SquarefreeSplit};
