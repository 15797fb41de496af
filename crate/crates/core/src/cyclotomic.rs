//! Exact arithmetic in cyclotomic fields Q(ζ_M).
//!
//! Elements are stored over the power basis `1, ζ, …, ζ^{φ(M)-1}` as an
//! integer numerator vector with one positive common denominator, reduced
//! modulo the M-th cyclotomic polynomial. The representation is canonical, so
//! equality is vector equality once both operands live in the same field.
//! Operands from different fields are lifted to Q(ζ_lcm) first.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct CyclotomicField {
    m: u64,
    phi: usize,
    /// Φ_M, low degree first, monic.
    poly: Vec<i64>,
    /// Nonzero `(i, poly[i])` for `i < phi`.
    tail: Vec<(usize, i64)>,
}

static FIELDS: LazyLock<Mutex<HashMap<u64, Arc<CyclotomicField>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared handle to Q(ζ_m); fields are built once and cached.
pub fn field(m: u64) -> Arc<CyclotomicField> {
    assert!(m >= 1, "cyclotomic modulus must be positive");
    let mut cache = FIELDS.lock().expect("field cache poisoned");
    cache
        .entry(m)
        .or_insert_with(|| Arc::new(CyclotomicField::build(m)))
        .clone()
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Φ_m via Φ_m = ∏_{d|m} (x^d − 1)^{μ(m/d)}.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    let divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    let mut p: Vec<i128> = vec![1];
    for &d in &divisors {
        if mobius(m / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i128; p.len() + d];
            for (i, &c) in p.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            p = next;
        }
    }
    for &d in &divisors {
        if mobius(m / d) == -1 {
            let d = d as usize;
            // p = q * (x^d - 1)  =>  q[i] = q[i-d] - p[i]
            let deg_q = p.len() - 1 - d;
            let mut q = vec![0i128; deg_q + 1];
            for i in 0..=deg_q {
                let prev = if i >= d { q[i - d] } else { 0 };
                q[i] = prev - p[i];
            }
            p = q;
        }
    }
    p.into_iter().map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow")).collect()
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

impl CyclotomicField {
    fn build(m: u64) -> Self {
        let poly = cyclotomic_polynomial(m);
        let phi = poly.len() - 1;
        debug_assert_eq!(phi as u64, euler_phi(m));
        let tail = poly[..phi]
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        CyclotomicField { m, phi, poly, tail }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi
    }

    pub fn polynomial(&self) -> &[i64] {
        &self.poly
    }

    /// Reduces `raw` (any length) modulo Φ_m in place; returns false on
    /// i128 overflow, leaving `raw` unspecified.
    fn reduce_i128(&self, raw: &mut Vec<i128>) -> bool {
        let phi = self.phi;
        for j in (phi..raw.len()).rev() {
            let c = raw[j];
            if c == 0 {
                continue;
            }
            raw[j] = 0;
            for &(i, p) in &self.tail {
                let Some(s) = c.checked_mul(p as i128) else { return false };
                let Some(v) = raw[j - phi + i].checked_sub(s) else { return false };
                raw[j - phi + i] = v;
            }
        }
        raw.resize(phi, 0);
        true
    }

    fn reduce_big(&self, raw: &mut Vec<BigInt>) {
        let phi = self.phi;
        for j in (phi..raw.len()).rev() {
            if raw[j].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut raw[j]);
            for &(i, p) in &self.tail {
                raw[j - phi + i] -= &c * p;
            }
        }
        raw.resize(phi, BigInt::zero());
    }

    /// Canonical reduction of an arbitrary-length integer polynomial in ζ.
    fn reduce(&self, raw: Vec<BigInt>) -> Vec<BigInt> {
        if raw.len() <= self.phi {
            let mut raw = raw;
            raw.resize(self.phi, BigInt::zero());
            return raw;
        }
        let small: Option<Vec<i128>> = raw.iter().map(|x| x.to_i64().map(i128::from)).collect();
        if let Some(mut s) = small {
            if self.reduce_i128(&mut s) {
                return s.into_iter().map(BigInt::from).collect();
            }
        }
        let mut raw = raw;
        self.reduce_big(&mut raw);
        raw
    }
}

/// An element of Q(ζ_M) in canonical power-basis form.
#[derive(Clone)]
pub struct CycloNumber {
    field: Arc<CyclotomicField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNumber {
    fn from_parts(field: Arc<CyclotomicField>, num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(num.len(), field.phi);
        let mut x = CycloNumber { field, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
    }

    pub fn zero(m: u64) -> Self {
        let f = field(m);
        let phi = f.phi;
        CycloNumber { field: f, num: vec![BigInt::zero(); phi], den: BigInt::one() }
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, &BigRational::one())
    }

    pub fn from_integer(m: u64, n: impl Into<BigInt>) -> Self {
        Self::from_rational(m, &BigRational::from_integer(n.into()))
    }

    pub fn from_rational(m: u64, r: &BigRational) -> Self {
        let f = field(m);
        let mut num = vec![BigInt::zero(); f.phi];
        num[0] = r.numer().clone();
        Self::from_parts(f, num, r.denom().clone())
    }

    /// ζ_m^j, with j reduced mod m.
    pub fn root_of_unity(m: u64, j: i64) -> Self {
        let j = j.rem_euclid(m as i64) as usize;
        let f = field(m);
        let mut raw = vec![BigInt::zero(); j + 1];
        raw[j] = BigInt::one();
        let num = f.reduce(raw);
        CycloNumber { field: f, num, den: BigInt::one() }
    }

    /// Σ counts[j] ζ_m^j for a group-ring style exponent vector.
    pub fn from_exponent_counts(m: u64, counts: &[i64]) -> Self {
        let f = field(m);
        let mut folded = vec![0i128; (m as usize).min(counts.len().max(1))];
        for (j, &c) in counts.iter().enumerate() {
            folded[j % m as usize] += c as i128;
        }
        let mut work = folded.clone();
        let num = if f.reduce_i128(&mut work) {
            work.into_iter().map(BigInt::from).collect()
        } else {
            f.reduce(folded.into_iter().map(BigInt::from).collect())
        };
        CycloNumber { field: f, num, den: BigInt::one() }
    }

    pub fn modulus(&self) -> u64 {
        self.field.m
    }

    pub fn degree(&self) -> usize {
        self.field.phi
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Re-expresses the element in Q(ζ_target); `target` must be a multiple
    /// of the current modulus.
    pub fn lift(&self, target: u64) -> Self {
        let m = self.field.m;
        assert!(target % m == 0, "cannot lift Q(zeta_{m}) into Q(zeta_{target})");
        if target == m {
            return self.clone();
        }
        let step = (target / m) as usize;
        let f = field(target);
        let mut raw = vec![BigInt::zero(); (self.num.len().saturating_sub(1)) * step + 1];
        for (i, c) in self.num.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        let num = f.reduce(raw);
        CycloNumber { field: f, num, den: self.den.clone() }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.field.m == b.field.m {
            return (a.clone(), b.clone());
        }
        let l = a.field.m.lcm(&b.field.m);
        (a.lift(l), b.lift(l))
    }

    /// Complex conjugation, ζ ↦ ζ^{M−1}.
    pub fn conj(&self) -> Self {
        let m = self.field.m as usize;
        let mut raw = vec![BigInt::zero(); m.max(1)];
        for (i, c) in self.num.iter().enumerate() {
            raw[(m - i) % m] += c;
        }
        let num = self.field.reduce(raw);
        Self::from_parts(self.field.clone(), num, self.den.clone())
    }

    /// Multiplication by ζ_M^j.
    pub fn mul_root(&self, j: i64) -> Self {
        let m = self.field.m as usize;
        let j = j.rem_euclid(m as i64) as usize;
        if j == 0 {
            return self.clone();
        }
        let mut raw = vec![BigInt::zero(); m];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                raw[(i + j) % m] += c;
            }
        }
        let num = self.field.reduce(raw);
        CycloNumber { field: self.field.clone(), num, den: self.den.clone() }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        Self::from_parts(self.field.clone(), num, &self.den * r.denom())
    }

    fn mul_same(&self, other: &Self) -> Self {
        let f = &self.field;
        let phi = f.phi;
        let small = |v: &[BigInt]| -> Option<Vec<i64>> {
            v.iter()
                .map(|x| x.to_i64().filter(|y| y.unsigned_abs() < (1u64 << 40)))
                .collect()
        };
        let len = 2 * phi - 1;
        if let (Some(a), Some(b)) = (small(&self.num), small(&other.num)) {
            let mut raw = vec![0i128; len];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    raw[i + j] += x as i128 * y as i128;
                }
            }
            let mut work = raw.clone();
            let num = if f.reduce_i128(&mut work) {
                work.into_iter().map(BigInt::from).collect()
            } else {
                f.reduce(raw.into_iter().map(BigInt::from).collect())
            };
            return Self::from_parts(f.clone(), num, &self.den * &other.den);
        }
        let mut raw = vec![BigInt::zero(); len];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.num.iter().enumerate() {
                raw[i + j] += x * y;
            }
        }
        let num = f.reduce(raw);
        Self::from_parts(f.clone(), num, &self.den * &other.den)
    }

    fn add_same(&self, other: &Self, sign: i32) -> Self {
        let num = if self.den == other.den {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if sign > 0 { a + b } else { a - b })
                .collect::<Vec<_>>()
        } else {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    let l = a * &other.den;
                    let r = b * &self.den;
                    if sign > 0 { l + r } else { l - r }
                })
                .collect()
        };
        let den = if self.den == other.den { self.den.clone() } else { &self.den * &other.den };
        Self::from_parts(self.field.clone(), num, den)
    }

    /// Multiplicative inverse, by solving the linear system of the
    /// multiplication-by-self map over Q.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.field.m));
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.field.m, &r.recip()));
        }
        let phi = self.field.phi;
        let m = self.field.m;
        // column j = self * ζ^j
        let cols: Vec<Vec<BigRational>> = (0..phi)
            .map(|j| self.mul_root(j as i64).coeffs())
            .collect();
        let mut aug: Vec<Vec<BigRational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..phi).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for c in 0..phi {
            let p = (c..phi)
                .find(|&i| !aug[i][c].is_zero())
                .ok_or(Error::DivisionByZero(m))?;
            aug.swap(c, p);
            let pivot = aug[c][c].clone();
            for x in aug[c].iter_mut() {
                *x = &*x / &pivot;
            }
            for i in 0..phi {
                if i != c && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    for j in c..=phi {
                        let s = &f * &aug[c][j];
                        aug[i][j] -= s;
                    }
                }
            }
        }
        let den = aug
            .iter()
            .fold(BigInt::one(), |acc, row| acc.lcm(row[phi].denom()));
        let num = aug
            .iter()
            .map(|row| row[phi].numer() * (&den / row[phi].denom()))
            .collect();
        Ok(Self::from_parts(self.field.clone(), num, den))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Σ c_j e^{2πij/M} in double precision.
    pub fn embed(&self) -> Complex64 {
        let m = self.field.m as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = c.to_f64().unwrap_or(f64::NAN) / den;
            acc += Complex64::from_polar(w, std::f64::consts::TAU * j as f64 / m);
        }
        acc
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.field.m == other.field.m {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = Self::common(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycloNumber {}

impl<'a> Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        if self.field.m == rhs.field.m {
            return self.add_same(rhs, 1);
        }
        let (a, b) = CycloNumber::common(self, rhs);
        a.add_same(&b, 1)
    }
}

impl<'a> Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        if self.field.m == rhs.field.m {
            return self.add_same(rhs, -1);
        }
        let (a, b) = CycloNumber::common(self, rhs);
        a.add_same(&b, -1)
    }
}

impl<'a> Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        if self.field.m == rhs.field.m {
            return self.mul_same(rhs);
        }
        let (a, b) = CycloNumber::common(self, rhs);
        a.mul_same(&b)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl fmt::Display for CycloNumber {
    /// Renders `Σ c_j ζ_M^j`, omitting zero terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.field.m;
        let mut first = true;
        for (j, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c.clone()) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match j {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "ζ_{m}^{j}")?,
                _ => write!(f, "{mag}·ζ_{m}^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNumber({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert!(p105.contains(&-2));
        for m in 1..200 {
            assert_eq!((cyclotomic_polynomial(m).len() - 1) as u64, euler_phi(m));
        }
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(CycloNumber::root_of_unity(1, 0), CycloNumber::one(1));
        let i = CycloNumber::root_of_unity(4, 1);
        assert_eq!(i.coeffs(), vec![q(0, 1), q(1, 1)]);
        let s = &CycloNumber::root_of_unity(3, 1) + &CycloNumber::root_of_unity(3, 2);
        assert_eq!(s, CycloNumber::from_integer(3, -1));
    }

    #[test]
    fn conjugation_and_division() {
        let i = CycloNumber::root_of_unity(4, 1);
        assert_eq!(i.conj(), -&i);
        let one_plus_i = &CycloNumber::one(4) + &i;
        let inv = one_plus_i.inverse().unwrap();
        let expected = (&CycloNumber::one(4) - &i).scale(&q(1, 2));
        assert_eq!(inv, expected);
        assert!(CycloNumber::zero(4).inverse().is_err());
    }

    #[test]
    fn norm_of_example_gauss_sum() {
        // 4 - 4i
        let g = &CycloNumber::from_integer(8, 4) - &CycloNumber::root_of_unity(8, 2).scale(&q(4, 1));
        assert_eq!(&g * &g.conj(), CycloNumber::from_integer(8, 32));
        let e = g.embed();
        assert!((e.re - 4.0).abs() < 1e-12 && (e.im + 4.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_of_zeta8() {
        let z = CycloNumber::root_of_unity(8, 1).embed();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.re - h).abs() < 1e-15 && (z.im - h).abs() < 1e-15);
        let one = CycloNumber::one(1).embed();
        assert_eq!(one, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mixed_moduli_lift() {
        let i = CycloNumber::root_of_unity(4, 1);
        let w = CycloNumber::root_of_unity(3, 1);
        let p = &i * &w;
        assert_eq!(p.modulus(), 12);
        assert_eq!(p, CycloNumber::root_of_unity(12, 3 + 4));
        assert_eq!(CycloNumber::root_of_unity(4, 1), CycloNumber::root_of_unity(8, 2));
    }

    #[test]
    fn roots_have_order_m() {
        for m in 1..=200u64 {
            for j in [1i64, 7, m as i64 - 1] {
                let z = CycloNumber::root_of_unity(m, j);
                assert_eq!(z.pow(m), CycloNumber::one(m), "m={m} j={j}");
            }
        }
    }

    #[test]
    fn display_rendering() {
        let g = &CycloNumber::from_integer(8, 4) - &CycloNumber::root_of_unity(8, 2).scale(&q(4, 1));
        assert_eq!(g.to_string(), "4 - 4·ζ_8^2");
        assert_eq!(CycloNumber::zero(5).to_string(), "0");
    }
}
