//! Exact coordinates and their textual form.
//!
//! Coordinates are arbitrary-precision rationals. In text they are written
//! either as plain decimals (`"12.375"`, `"-3"`) or, when the denominator has
//! prime factors other than 2 and 5, as a reduced fraction (`"100/7"`).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::GeometryError;

pub type Coord = BigRational;

pub fn int(v: i64) -> Coord {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Coord {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a decimal (`"-1.25"`, `"3"`, `"2.5e-3"`) or fraction (`"7/3"`)
/// string into an exact rational.
pub fn parse_coord(text: &str) -> Result<Coord, GeometryError> {
    let bad = || GeometryError::BadCoordinate(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = parse_integer(num).ok_or_else(bad)?;
        let d: BigInt = parse_integer(den).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() { BigInt::zero() } else { all_digits.parse().map_err(|_| bad())? };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text for a coordinate: a finite decimal when one exists,
/// otherwise `numer/denom`. `parse_coord(&format_coord(c)) == c` always.
pub fn format_coord(c: &Coord) -> String {
    DecimalDisplay(c).to_string()
}

struct DecimalDisplay<'a>(&'a Coord);

impl fmt::Display for DecimalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.0;
        if c.is_integer() {
            return write!(f, "{}", c.numer());
        }
        let mut den = c.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let (mut twos, mut fives) = (0usize, 0usize);
        while den.is_even() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return write!(f, "{}/{}", c.numer(), c.denom());
        }
        let places = twos.max(fives);
        let scaled = c * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
        debug_assert!(scaled.is_integer());
        let n = scaled.to_integer();
        let sign = if n.is_negative() { "-" } else { "" };
        let digits = n.abs().to_string();
        let digits = format!("{digits:0>width$}", width = places + 1);
        let (ip, fp) = digits.split_at(digits.len() - places);
        write!(f, "{sign}{ip}.{fp}")
    }
}

/// Lossy conversion for rendering and timing output only.
pub fn to_f64(c: &Coord) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_coord("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_coord("-12.375").unwrap(), ratio(-12375, 1000));
        assert_eq!(parse_coord("3").unwrap(), int(3));
        assert_eq!(parse_coord("100/7").unwrap(), ratio(100, 7));
        assert_eq!(parse_coord("2.5e-3").unwrap(), ratio(25, 10000));
        assert_eq!(parse_coord(".5").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["1.2.3", "", "abc", "1/0", "1..2", "-", "1e", "0x10", "1/-"] {
            assert!(parse_coord(s).is_err(), "{s:?} should fail");
        }
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_coord(&ratio(1, 2)), "0.5");
        assert_eq!(format_coord(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_coord(&int(42)), "42");
        assert_eq!(format_coord(&ratio(100, 7)), "100/7");
        assert_eq!(format_coord(&ratio(3, 1000)), "0.003");
    }

    proptest! {
        #[test]
        fn text_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..5000) {
            let c = ratio(n, d);
            prop_assert_eq!(parse_coord(&format_coord(&c)).unwrap(), c);
        }
    }
}
