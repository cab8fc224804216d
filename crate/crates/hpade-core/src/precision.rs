//! Working-precision contract shared by every numeric routine.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{CoreError, Result};

pub const MIN_DECIMAL_DIGITS: u32 = 50;

/// Bits per decimal digit, rounded up generously (log2(10) = 3.3219...).
const BITS_PER_DIGIT: f64 = 3.321_928_094_887_362_4;

/// Fixed working precision for a whole computation.
///
/// Everything downstream derives its MPFR bit precision from this, so two
/// runs with the same context produce bit-identical results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < MIN_DECIMAL_DIGITS {
            return Err(CoreError::ParameterDomain(format!(
                "precision of {decimal_digits} decimal digits is below the minimum of {MIN_DECIMAL_DIGITS}"
            )));
        }
        Ok(Self { decimal_digits })
    }

    pub fn decimal_digits(self) -> u32 {
        self.decimal_digits
    }

    /// MPFR precision in bits, with a small guard margin.
    pub fn bits(self) -> u32 {
        (self.decimal_digits as f64 * BITS_PER_DIGIT).ceil() as u32 + 16
    }

    /// A context widened by `extra` decimal digits, for internal guard work.
    pub fn with_guard(self, extra: u32) -> Self {
        Self {
            decimal_digits: self.decimal_digits + extra,
        }
    }

    pub fn real<T>(self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    pub fn zero(self) -> Float {
        Float::new(self.bits())
    }

    pub fn one(self) -> Float {
        self.real(1)
    }

    pub fn pi(self) -> Float {
        self.real(Constant::Pi)
    }

    pub fn ln2(self) -> Float {
        self.real(Constant::Log2)
    }

    /// Parses a decimal string at this precision.
    pub fn parse(self, s: &str) -> Result<Float> {
        let incomplete = Float::parse(s)
            .map_err(|e| CoreError::ParameterDomain(format!("bad decimal literal {s:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), incomplete))
    }

    /// 10^(-k) at this precision.
    pub fn pow10_neg(self, k: u32) -> Float {
        let ten = self.real(10);
        ten.pow(-(k as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(49).is_err());
        assert!(PrecisionContext::new(50).is_ok());
    }

    #[test]
    fn round_trips_decimal_strings() {
        let ctx = PrecisionContext::new(80).unwrap();
        let x = ctx.parse("1.25").unwrap();
        assert_eq!(x.to_f64(), 1.25);
        let s = x.to_string_radix(10, None);
        let y = ctx.parse(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn guard_widens() {
        let ctx = PrecisionContext::new(100).unwrap();
        assert!(ctx.with_guard(30).bits() > ctx.bits());
    }
}
