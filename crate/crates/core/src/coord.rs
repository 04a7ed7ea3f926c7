//! Fixed-point coordinates.
//!
//! A coordinate is an `i64` counting units of `1/scale`. Decimal input is
//! scaled exactly and rounded half-to-even once, at ingestion.

use crate::error::{Error, Result};
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};
use std::str::FromStr;

pub type Coord = i64;

pub const DEFAULT_SCALE: i64 = 1_000_000;

/// Exclusive bound on |units| so that length sums cannot overflow.
pub fn coord_limit(scale: i64) -> i64 {
    (1i64 << 62) / scale.max(1)
}

pub fn parse_decimal(s: &str) -> Result<Decimal> {
    let s = s.trim();
    let parsed = if s.contains(['e', 'E']) {
        Decimal::from_scientific(s)
    } else {
        Decimal::from_str_exact(s)
    };
    parsed.map_err(|_| Error::InvalidInput(format!("not a decimal number: {s:?}")))
}

/// Lossless for values typed as short decimals: goes through the shortest
/// round-trip representation of the float.
pub fn decimal_from_f64(v: f64) -> Result<Decimal> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite number {v}")));
    }
    Decimal::from_str(&format!("{v}")).map_err(|_| Error::CoordOverflow(format!("{v}")))
}

pub fn to_units(value: Decimal, scale: i64) -> Result<Coord> {
    let overflow = || Error::CoordOverflow(value.to_string());
    let scaled = value
        .checked_mul(Decimal::from(scale))
        .ok_or_else(overflow)?
        .round_dp_with_strategy(0, RoundingStrategy::MidpointNearestEven);
    let units = scaled.to_i64().ok_or_else(overflow)?;
    if units.unsigned_abs() >= coord_limit(scale) as u64 {
        return Err(overflow());
    }
    Ok(units)
}

/// Decimal text that re-ingests to exactly `units` at `scale`.
pub fn units_to_string(units: Coord, scale: i64) -> String {
    let mut digits = 0u32;
    let mut s = scale;
    while s % 10 == 0 && s > 1 {
        s /= 10;
        digits += 1;
    }
    if s == 1 {
        return Decimal::from_i128_with_scale(units as i128, digits).normalize().to_string();
    }
    // Not a power of ten: print enough places that rounding recovers `units`.
    let places = scale.to_string().len() as u32 + 3;
    let q = Decimal::from(units) / Decimal::from(scale);
    q.round_dp(places).normalize().to_string()
}

pub fn units_to_f64(units: Coord, scale: i64) -> f64 {
    units as f64 / scale as f64
}

/// Smallest integer c with c*c >= num/den, for num >= 0, den > 0.
pub fn ceil_sqrt_ratio(num: i64, den: i64) -> i64 {
    let (num, den) = (num as i128, den as i128);
    let mut c = ((num as f64 / den as f64).sqrt().floor() as i128).max(0);
    while c * c * den < num {
        c += 1;
    }
    while c > 0 && (c - 1) * (c - 1) * den >= num {
        c -= 1;
    }
    c as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_even_rounding() {
        let d = |s| parse_decimal(s).unwrap();
        assert_eq!(to_units(d("0.5"), 1).unwrap(), 0);
        assert_eq!(to_units(d("1.5"), 1).unwrap(), 2);
        assert_eq!(to_units(d("2.5"), 1).unwrap(), 2);
        assert_eq!(to_units(d("-2.5"), 1).unwrap(), -2);
        assert_eq!(to_units(d("1.25"), 4).unwrap(), 5);
        assert_eq!(to_units(d("1e-3"), 1000).unwrap(), 1);
    }

    #[test]
    fn float_input_keeps_its_decimal_reading() {
        // 0.15 is not exact in binary; its shortest text is.
        assert_eq!(to_units(decimal_from_f64(0.15).unwrap(), 100).unwrap(), 15);
        assert_eq!(to_units(decimal_from_f64(0.125).unwrap(), 100).unwrap(), 12);
    }

    #[test]
    fn overflow_is_reported() {
        let big = parse_decimal("5000000").unwrap();
        assert!(matches!(to_units(big, DEFAULT_SCALE), Err(Error::CoordOverflow(_))));
        assert!(to_units(parse_decimal("4000000").unwrap(), DEFAULT_SCALE).is_ok());
    }

    #[test]
    fn unit_text_round_trips() {
        for scale in [1, 3, 4, 7, 1000, DEFAULT_SCALE] {
            for units in [-7, 0, 1, 2, 5, 1234567, 999_999_999] {
                let text = units_to_string(units, scale);
                assert_eq!(to_units(parse_decimal(&text).unwrap(), scale).unwrap(), units, "{text}");
            }
        }
    }

    #[test]
    fn integer_sqrt_ceiling() {
        assert_eq!(ceil_sqrt_ratio(100, 1), 10);
        assert_eq!(ceil_sqrt_ratio(101, 1), 11);
        assert_eq!(ceil_sqrt_ratio(1, 2), 1);
        assert_eq!(ceil_sqrt_ratio(0, 5), 0);
        assert_eq!(ceil_sqrt_ratio(4_000_000, 1_000_000), 2);
        assert_eq!(ceil_sqrt_ratio(4_000_001, 1_000_000), 3);
    }
}
