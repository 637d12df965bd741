//! Exact rational helpers. Probabilities are `BigRational` everywhere; floats
//! only show up in [`to_decimal`].

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `1 / 2^k`.
pub fn half_pow(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `"num/den"`, an integer, or a finite decimal such as `"0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: `{text}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, fracpart)) = t.split_once('.') {
        if fracpart.is_empty() || !fracpart.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let f: BigInt = fracpart.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fracpart.len());
        let value = Rational::new(whole * &scale + f, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `"num/den"` in lowest terms (integers print as `"n/1"` for uniformity).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_decimal(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && r <= &Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), frac(1, 2));
        assert_eq!(parse_rational(" 6/8 ").unwrap(), frac(3, 4));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("0.125").unwrap(), frac(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), frac(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&frac(2, 20)), "1/10");
        assert_eq!(format_rational(&int(1)), "1/1");
        assert_eq!(half_pow(3), frac(1, 8));
    }
}
