//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn example_gram() -> Vec<Vec<i64>> {
    vec![
        vec![2, 0, 0, 0, 0],
        vec![0, 2, 0, 0, 0],
        vec![0, 0, -2, 0, 0],
        vec![0, 0, 0, -2, 0],
        vec![0, 0, 0, 0, -2],
    ]
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn sigma(k: u32, n: u64) -> BigInt {
    (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
}

/// Bernoulli numbers B_0..=B_n (B_1 = −1/2) from Σ_{j<m+1} C(m+1, j) B_j = 0.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for m in 1..=n {
        let mut binom = BigInt::one();
        let mut s = BigRational::zero();
        for j in 0..m {
            s += BigRational::from_integer(binom.clone()) * &b[j];
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Coefficients of the level-one Eisenstein series of weight k normalized to
/// constant term 1: c(n) = −2k/B_k · σ_{k−1}(n).
pub fn level_one_eisenstein(k: usize, n_max: u64) -> Vec<BigRational> {
    let bk = bernoulli(k)[k].clone();
    let factor = BigRational::from_integer(BigInt::from(-2 * k as i64)) / bk;
    let mut out = vec![BigRational::one()];
    for n in 1..=n_max {
        out.push(&factor * BigRational::from_integer(sigma(k as u32 - 1, n)));
    }
    out
}

/// Ramanujan τ(n) from the identity
/// 756 τ(n) = 65 σ₁₁(n) + 691 σ₅(n) − 252·691 Σ_{0<m<n} σ₅(m) σ₅(n − m).
pub fn ramanujan_tau(n: u64) -> BigInt {
    let conv: BigInt = (1..n).map(|m| sigma(5, m) * sigma(5, n - m)).sum();
    let v = BigInt::from(65) * sigma(11, n) + BigInt::from(691) * sigma(5, n) - BigInt::from(252 * 691) * conv;
    assert!((&v % BigInt::from(756)).is_zero());
    v / BigInt::from(756)
}

pub fn crate_root() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}
