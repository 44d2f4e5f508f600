//! Arbitrary-precision rational numbers as the exact numeric substrate.
//!
//! `Rational` keeps denominators positive and values in lowest terms, so
//! equality is value equality. Parsing accepts fraction strings ("3/5"),
//! integers ("25550"), and decimal or scientific notation ("0.6", "1e-3"),
//! all converted exactly.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// A probability computed in one of the two numeric modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Prob {
    Exact(Rational),
    Float(f64),
}

impl Prob {
    /// Nearest double; exact values are correctly rounded.
    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => rational_to_f64(r),
            Prob::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prob::Exact(_))
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) => write!(f, "{}", format_rational(r)),
            Prob::Float(x) => write!(f, "{x}"),
        }
    }
}

impl serde::Serialize for Prob {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Prob::Exact(r) => s.serialize_str(&format_rational(r)),
            Prob::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> serde::Deserialize<'de> for Prob {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Prob;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string or a float")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Prob, E> {
                Ok(Prob::Float(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Prob, E> {
                Ok(Prob::Float(v as f64))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Prob, E> {
                Ok(Prob::Float(v as f64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Prob, E> {
                parse_rational(v)
                    .map(Prob::Exact)
                    .map_err(|e| E::custom(e.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

/// Always "numer/denom", even for integers ("1/1"), so output stays uniform.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse "a/b", an integer, or exact decimal/scientific notation.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Domain("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Domain(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    // Decimal / scientific form: sign? digits (. digits)? ((e|E) sign? digits)?
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Domain(format!("bad exponent in {s:?}")))?;
            (&s[..pos], e)
        }
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(Error::Domain(format!("bad rational literal {s:?}")));
    }
    let n: BigInt = digits
        .parse()
        .map_err(|_| Error::Domain(format!("bad rational literal {s:?}")))?;
    let scale = frac_part.len() as i64 - exp10;
    let r = if scale >= 0 {
        Rational::new(n, BigInt::from(10u32).pow(u32::try_from(scale).map_err(|_| {
            Error::Domain(format!("exponent out of range in {s:?}"))
        })?))
    } else {
        Rational::from_integer(
            n * BigInt::from(10u32).pow(
                u32::try_from(-scale)
                    .map_err(|_| Error::Domain(format!("exponent out of range in {s:?}")))?,
            ),
        )
    };
    Ok(r)
}

/// Exact binary expansion of a finite double.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Correctly rounded (nearest, ties to even) conversion to double.
///
/// `Rational::to_f64` loses precision once numerator or denominator exceed
/// the double range; this conversion never does.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let x = big_ratio_to_f64(r.numer().magnitude(), r.denom().magnitude());
    if r.numer().sign() == Sign::Minus {
        -x
    } else {
        x
    }
}

/// Nearest double for num/den, both positive.
///
/// Scales so the integer quotient keeps three guard bits, rounds the division
/// to odd (sticky low bit), and lets the final u64 -> f64 conversion perform
/// the nearest-even rounding. Round-to-odd makes the double rounding exact.
pub(crate) fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    debug_assert!(!num.is_zero() && !den.is_zero());
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = 56 - (nb - db);
    let (q, rem) = if shift >= 0 {
        (num << shift as u64).div_rem(den)
    } else {
        num.div_rem(&(den << (-shift) as u64))
    };
    // q now has 55..=57 bits: at least 2 guard bits below the 53-bit mantissa.
    let mut q64 = q.to_u64().expect("quotient exceeds 64 bits");
    if !rem.is_zero() {
        q64 |= 1;
    }
    libm::ldexp(q64 as f64, -shift as i32)
}

// ln 2 split so that e * LN2_HI is exact for |e| < 2^20 (musl constants).
const LN2_HI: f64 = 6.931_471_803_691_238_164_9e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// Accurate natural log of a positive rational, however large its parts.
///
/// Writes the value as q * 2^-shift with q a 64-bit integer, so the result
/// carries only the rounding of ln(q) plus an exact-split multiple of ln 2.
/// Absolute error is a few ulps of the result, with no blowup from the size
/// of numerator and denominator.
pub(crate) fn ln_rational_f64(r: &Rational) -> f64 {
    assert!(
        r.is_positive(),
        "ln_rational_f64 requires a positive rational"
    );
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = 64 - (nb - db);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q64 = q.to_f64().expect("64-bit quotient");
    let e = -shift as f64;
    q64.ln() + e * LN2_HI + e * LN2_LO
}

/// Serde adapter keeping `Rational` fields as "numer/denom" strings.
pub mod rational_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Like [`rational_string`], for optional fields.
pub mod rational_string_opt {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(v) => s.serialize_some(&format_rational(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|v| parse_rational(&v).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parse_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/5").unwrap(), r(3, 5));
        assert_eq!(parse_rational("0.6").unwrap(), r(3, 5));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert_eq!(parse_rational("25550").unwrap(), r(25550, 1));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational("2.5e2").unwrap(), r(250, 1));
        assert_eq!(parse_rational(" 6/10 ").unwrap(), r(3, 5));
        assert_eq!(parse_rational("-7/2").unwrap(), r(-7, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "one", "1/0", "2.5.5", "1e", "--3", ".", "3//5"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn format_always_shows_denominator() {
        assert_eq!(format_rational(&r(3, 8)), "3/8");
        assert_eq!(format_rational(&r(2, 2)), "1/1");
        assert_eq!(format_rational(&r(0, 5)), "0/1");
        assert_eq!(format_rational(&r(-6, 10)), "-3/5");
    }

    #[test]
    fn to_f64_matches_simple_cases() {
        assert_eq!(rational_to_f64(&r(1, 2)), 0.5);
        assert_eq!(rational_to_f64(&r(1, 3)), 1.0 / 3.0);
        assert_eq!(rational_to_f64(&r(3, 5)), 0.6);
        assert_eq!(rational_to_f64(&r(-7, 4)), -1.75);
        assert_eq!(rational_to_f64(&Rational::zero()), 0.0);
    }

    #[test]
    fn to_f64_is_correctly_rounded_on_huge_parts() {
        // (2^200 + 1) / 2^200 rounds to exactly 1.
        let num = BigInt::from(1u8) << 200 | BigInt::one();
        let den = BigInt::from(1u8) << 200;
        assert_eq!(rational_to_f64(&Rational::new(num, den)), 1.0);
        // A tie: (2^53 + 1) / 2^53; nearest-even gives 1.0 exactly? The value
        // is representable halfway between 1 and 1+2^-52; even mantissa wins.
        let num = (BigInt::one() << 53) + BigInt::one();
        let den = BigInt::one() << 53;
        assert_eq!(rational_to_f64(&Rational::new(num, den)), 1.0);
        // Just above the tie must round up.
        let num = (BigInt::one() << 54) + BigInt::from(3u8);
        let den = BigInt::one() << 54;
        assert_eq!(
            rational_to_f64(&Rational::new(num, den)),
            1.0 + f64::EPSILON
        );
    }

    #[test]
    fn to_f64_agrees_with_float_division_on_a_grid() {
        for n in 1i64..=40 {
            for d in 1i64..=40 {
                let got = rational_to_f64(&r(n, d));
                let want = n as f64 / d as f64;
                assert!(
                    (got - want).abs() <= want.abs() * f64::EPSILON,
                    "{n}/{d}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn ln_rational_handles_big_factorial_ratios() {
        // ln(10!) against the known value.
        let f10: BigInt = (1u32..=10).product::<u32>().into();
        let got = ln_rational_f64(&Rational::from_integer(f10));
        assert!((got - 15.104412573075516).abs() < 1e-12);
        // ln of a tiny ratio stays accurate: ln(1/10!) = -ln(10!).
        let f10: BigInt = (1u32..=10).product::<u32>().into();
        let got = ln_rational_f64(&Rational::new(BigInt::one(), f10));
        assert!((got + 15.104412573075516).abs() < 1e-12);
    }

    #[test]
    fn round_trip_from_f64() {
        for x in [0.5, 0.1, 0.999, 1.0 / 3.0, 0.02] {
            let r = rational_from_f64(x).unwrap();
            assert_eq!(rational_to_f64(&r), x);
        }
    }

    #[test]
    fn prob_display_and_serde() {
        let p = Prob::Exact(r(3, 8));
        assert_eq!(p.to_string(), "3/8");
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"3/8\"");
        let back: Prob = serde_json::from_str("\"3/8\"").unwrap();
        assert_eq!(back, p);
        let q = Prob::Float(0.25);
        assert_eq!(serde_json::to_string(&q).unwrap(), "0.25");
        let back: Prob = serde_json::from_str("0.25").unwrap();
        assert_eq!(back, q);
    }
}
