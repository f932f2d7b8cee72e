use num_bigint::BigInt;
use num_traits::One;

use crate::coeffring::GaussianRational;

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Number of ways to contract `k` of `n` items with `k` of `m` items:
/// `C(n,k) C(m,k) k!`. This is the reordering coefficient of
/// `y^n x^m` into normal order.
pub fn contraction_count(k: u32, n: u32, m: u32) -> BigInt {
    binomial(n, k) * binomial(m, k) * factorial(k)
}

pub fn binomial_g(n: u32, k: u32) -> GaussianRational {
    GaussianRational::from_bigint(binomial(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 3), BigInt::from(0));
        assert_eq!(contraction_count(2, 3, 2), BigInt::from(6));
    }
}
