use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::factor::{factor, FactorBudget, Factorization};
use crate::{Error, Result};

/// `n = d * w^2` with `d` squarefree (sign carried by `d`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarefreeSplit {
    #[serde(with = "crate::serde_dec")]
    pub d: BigInt,
    #[serde(with = "crate::serde_dec")]
    pub w: BigUint,
    /// False when an unsplit residual was assumed squarefree.
    pub proven: bool,
}

pub fn squarefree_split(n: &BigInt, budget: &FactorBudget) -> Result<SquarefreeSplit> {
    let (split, _) = squarefree_split_with_factors(n, budget)?;
    Ok(split)
}

/// Like [`squarefree_split`], also returning the factorization of `|n|`.
pub fn squarefree_split_with_factors(
    n: &BigInt,
    budget: &FactorBudget,
) -> Result<(SquarefreeSplit, Factorization)> {
    if n.is_zero() {
        return Err(Error::InvalidArgument("squarefree part of 0".into()));
    }
    let f = factor(n.magnitude(), budget);
    let mut d = f.residual.clone();
    let mut w = BigUint::one();
    for pp in &f.factors {
        if pp.exponent % 2 == 1 {
            d *= &pp.prime;
        }
        w *= pp.prime.pow(pp.exponent / 2);
    }
    let sign = if n.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus };
    let split = SquarefreeSplit {
        d: BigInt::from_biguint(sign, d),
        w,
        proven: f.is_complete(),
    };
    Ok((split, f))
}
