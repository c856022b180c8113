//! Exact integer and rational helpers shared by the counting modules.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serializer;

/// `C(n, r)` computed multiplicatively in arbitrary precision.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` in `u128`, or `None` on overflow.
pub fn binomial_u128(n: u64, r: u64) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

pub fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Generalized binomial `a (a-1) ... (a-r+1) / r!` for rational `a`.
pub fn generalized_binomial(a: &BigRational, r: u64) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..r {
        acc *= a - BigRational::from_integer(j.into());
    }
    acc / BigRational::from_integer(factorial(r).into())
}

/// Natural log of `C(m, r)`, `-inf` when `r > m`.
pub fn ln_binomial(m: f64, r: u64) -> f64 {
    if (r as f64) > m {
        return f64::NEG_INFINITY;
    }
    (0..r).map(|j| ((m - j as f64) / (j + 1) as f64).ln()).sum()
}

/// Relative comparison `lhs >= rhs` allowing `tol` of slack on the larger magnitude.
pub fn ge_with_tolerance(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs >= rhs - tol * lhs.abs().max(rhs.abs()).max(1.0)
}

pub(crate) fn serialize_display<T: std::fmt::Display, S: Serializer>(
    value: &T,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}
