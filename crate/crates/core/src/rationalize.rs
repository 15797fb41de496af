//! Recovering exact rationals from numerically computed coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::eisenstein::{numeric_coefficients, Method};
use crate::error::{Error, Result};
use crate::fourier::{FloatTable, FourierTable, RationalTable};
use crate::lattice::DiscriminantForm;
use num_rational::Rational64;

/// The rational of smallest denominator in the closed interval [lo, hi]
/// (unique; ties in denominator cannot occur).
pub fn simplest_in(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi, "empty interval");
    if !lo.is_positive() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_in(&-hi, &-lo);
    }
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let f = lo.floor();
    let inner = simplest_in(&(hi - &f).recip(), &(lo - &f).recip());
    f + inner.recip()
}

/// Snaps `x ± err` to a rational with denominator at most `max_den`.
///
/// Let q be the smallest denominator of a rational within 10·err of x. The
/// answer is the multiple of 1/q nearest to x. Reconstruction fails if q
/// exceeds `max_den`, and is ambiguous if a second multiple of 1/q also
/// lies within the tolerance.
pub fn rationalize_value(x: f64, err: f64, max_den: u64, what: &str) -> Result<BigRational> {
    let fail = |reason: String| Error::Reconstruction { what: what.to_string(), reason };
    if !x.is_finite() || !err.is_finite() {
        return Err(fail(format!("non-finite value {x} ± {err}")));
    }
    let floor = 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
    let tol = BigRational::from_f64(10.0 * err.max(floor)).unwrap();
    let xr = BigRational::from_f64(x).unwrap();
    let simplest = simplest_in(&(&xr - &tol), &(&xr + &tol));
    if simplest.denom() > &BigInt::from(max_den) {
        return Err(fail(format!(
            "no rational with denominator ≤ {max_den} within 10× the numeric error of {x} ± {err}"
        )));
    }
    let q = BigRational::from_integer(simplest.denom().clone());
    let r = (&xr * &q).round() / &q;
    let step = q.recip();
    for other in [&r - &step, &r + &step] {
        if (&other - &xr).abs() <= tol {
            return Err(fail(format!(
                "ambiguous: both {r} and {other} lie within 10× the numeric error of {x} ± {err}"
            )));
        }
    }
    Ok(r)
}

/// Rationalizes every coefficient; also returns d, the least common
/// denominator, so that d·table is integral. d itself must not exceed
/// `max_den`. Coefficients must be real up
/// to their error.
pub fn rationalize(table: &FloatTable, max_den: u64) -> Result<(RationalTable, BigInt)> {
    let mut out: RationalTable = FourierTable::new(table.k, table.df.clone(), table.n_max);
    let mut d = BigInt::one();
    for (&(a, n), c) in &table.coeffs {
        let what = format!("c(α = {:?}, n = {n})", table.df.element(a).coords);
        if c.value.im.abs() > 10.0 * c.err.max(1e-300) {
            return Err(Error::Reconstruction {
                what,
                reason: format!("imaginary part {} exceeds 10× the error {}", c.value.im, c.err),
            });
        }
        let r = rationalize_value(c.value.re, c.err, max_den, &what)?;
        d = d.lcm(r.denom());
        if d > BigInt::from(max_den) {
            return Err(Error::Reconstruction {
                what,
                reason: format!(
                    "snapped to {r}, which raises the common denominator to {d} > {max_den}; \
                     the numeric error is too large for this denominator bound"
                ),
            });
        }
        out.coeffs.insert((a, n), r);
    }
    Ok((out, d))
}

/// Coset bound: fixed, or doubled from 128 until the reconstruction
/// succeeds and agrees with the one at half the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetBound {
    Fixed(u64),
    Auto { cap: u64 },
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub float: FloatTable,
    pub exact: RationalTable,
    pub d: BigInt,
    pub c_max: u64,
}

pub fn reconstruct_eisenstein(
    df: &DiscriminantForm,
    k: Rational64,
    n_max: u64,
    bound: CosetBound,
    method: Method,
    max_den: u64,
) -> Result<Reconstruction> {
    let attempt = |c: u64| -> Result<Reconstruction> {
        let float = numeric_coefficients(df, k, n_max, c, method)?;
        let (exact, d) = rationalize(&float, max_den)?;
        Ok(Reconstruction { float, exact, d, c_max: c })
    };
    match bound {
        CosetBound::Fixed(c) => attempt(c),
        CosetBound::Auto { cap } => {
            let mut c = 128;
            let mut previous: Option<Reconstruction> = None;
            loop {
                let current = attempt(c);
                match (&previous, current) {
                    (Some(p), Ok(r)) if p.exact == r.exact => return Ok(r),
                    (_, Ok(r)) => previous = Some(r),
                    (_, Err(e)) if c * 2 > cap => return Err(e),
                    (_, Err(_)) => previous = None,
                }
                if c * 2 > cap {
                    return Err(Error::Reconstruction {
                        what: "Eisenstein coefficients".into(),
                        reason: format!("no two consecutive coset bounds up to {cap} gave the same rationals"),
                    });
                }
                c *= 2;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn classical_ratio() {
        let x = 65520.0 / 691.0 + 3e-8;
        assert_eq!(rationalize_value(x, 1e-7, 10_000, "t").unwrap(), q(65520, 691));
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(rationalize_value(0.0, 0.0, 100, "t").unwrap(), q(0, 1));
        assert_eq!(rationalize_value(1.000_000_000_2, 1e-9, 100, "t").unwrap(), q(1, 1));
        assert_eq!(rationalize_value(-2.5, 1e-12, 100, "t").unwrap(), q(-5, 2));
    }

    #[test]
    fn failures() {
        // π with a tiny error has no small-denominator approximation.
        assert!(rationalize_value(std::f64::consts::PI, 1e-12, 1000, "t").is_err());
        // 0 and 1 are both within tolerance.
        assert!(rationalize_value(0.5, 0.1, 1000, "t").is_err());
        assert_eq!(rationalize_value(1.0 / 3.0 + 4e-6, 1e-6, 1_000_000, "t").unwrap(), q(1, 3));
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_in(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_in(&q(-7, 5), &q(-6, 5)), q(-4, 3));
        assert_eq!(simplest_in(&q(5, 2), &q(5, 2)), q(5, 2));
        let wide = rationalize_value(-336.0019, 0.02, 1000, "t").unwrap();
        assert_eq!(wide, q(-336, 1));
    }
}
