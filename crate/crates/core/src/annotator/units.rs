//! Shipped unit conversion table.
//!
//! Only affine conversions with a positive slope are listed, so converting
//! never changes the ordering of two values.

use rust_decimal::{Decimal, RoundingStrategy};

use crate::vocab::UNIT;

/// Fractional digits kept after a conversion (half-even rounding).
pub const CONVERSION_SCALE: u32 = 4;

#[derive(Debug, Clone, Copy)]
pub struct AffineConversion {
    pub from: &'static str,
    pub to: &'static str,
    /// `to = (from + pre_offset) * numerator / denominator + post_offset`
    pre_offset: i64,
    numerator: i64,
    denominator: i64,
    post_offset: i64,
}

impl AffineConversion {
    pub fn apply(&self, value: Decimal) -> Decimal {
        let v = (value + Decimal::from(self.pre_offset)) * Decimal::from(self.numerator)
            / Decimal::from(self.denominator)
            + Decimal::from(self.post_offset);
        v.round_dp_with_strategy(CONVERSION_SCALE, RoundingStrategy::MidpointNearestEven)
    }
}

const TABLE: &[(&str, &str, i64, i64, i64, i64)] = &[
    // C = (F - 32) * 5 / 9
    ("Fahrenheit", "Cel", -32, 5, 9, 0),
    // F = C * 9 / 5 + 32
    ("Cel", "Fahrenheit", 0, 9, 5, 32),
];

pub fn conversions() -> impl Iterator<Item = AffineConversion> {
    TABLE.iter().map(|&(from, to, pre, num, den, post)| AffineConversion {
        from,
        to,
        pre_offset: pre,
        numerator: num,
        denominator: den,
        post_offset: post,
    })
}

/// Conversion between two unit IRIs, if one is shipped.
pub fn find_conversion(from: &str, to: &str) -> Option<AffineConversion> {
    let from = from.strip_prefix(UNIT)?;
    let to = to.strip_prefix(UNIT)?;
    conversions().find(|c| c.from == from && c.to == to)
}
