//! Helpers around [`BigRational`], the coefficient field of every polynomial.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponents are small rationals; integer exponents are the polynomial case.
pub type Exponent = Ratio<i64>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn exp(numer: i64, denom: i64) -> Exponent {
    Exponent::new(numer, denom)
}

pub fn exp_int(n: i64) -> Exponent {
    Exponent::from_integer(n)
}

/// `base^e` for a rational exponent, exact or an error if the result is irrational.
pub fn rational_pow(base: &Rational, e: Exponent) -> Result<Rational> {
    if e.is_zero() {
        return Ok(Rational::one());
    }
    if base.is_zero() {
        return if e.is_positive() {
            Ok(Rational::zero())
        } else {
            Err(Error::Domain("zero raised to a negative power".into()))
        };
    }
    let root_index = *e.denom();
    let rooted = if root_index == 1 {
        base.clone()
    } else {
        exact_root(base, root_index)?
    };
    let power = *e.numer();
    let magnitude = u32::try_from(power.unsigned_abs())
        .map_err(|_| Error::Domain(format!("exponent {e} too large")))?;
    let raised = num_traits::pow::pow(rooted, magnitude as usize);
    Ok(if power < 0 { raised.recip() } else { raised })
}

fn exact_root(base: &Rational, index: i64) -> Result<Rational> {
    let idx = u32::try_from(index).map_err(|_| Error::Domain(format!("root index {index}")))?;
    let negative = base.is_negative();
    if negative && idx % 2 == 0 {
        return Err(Error::Domain(format!(
            "even root of negative number {base}"
        )));
    }
    let root_int = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(idx);
        (num_traits::pow::pow(r.clone(), idx as usize) == n.abs()).then_some(r)
    };
    match (root_int(base.numer()), root_int(base.denom())) {
        (Some(n), Some(d)) => {
            let r = Rational::new(n, d);
            Ok(if negative { -r } else { r })
        }
        _ => Err(Error::Domain(format!("{base}^(1/{idx}) is irrational"))),
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn exponent_to_rational(e: Exponent) -> Rational {
    rat(*e.numer(), *e.denom())
}

pub fn is_integer_exponent(e: Exponent) -> bool {
    *e.denom() == 1
}

/// Rational square root when exact.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    rational_pow(q, exp(1, 2)).ok()
}
