//! Exact rational arithmetic and its `{num, den}` JSON encoding.
//!
//! Costs, LP coefficients and objective values are rationals end to end;
//! floating point appears only in reports and in the rounding probability
//! of the randomized algorithm.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational used throughout the crate.
pub type Rational = BigRational;

/// Builds a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    BigRational::from(BigInt::from(num))
}

/// Lossy conversion for reports.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serialized form of a rational: `{"num": .., "den": ..}` with a positive
/// denominator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumDen {
    pub num: i64,
    pub den: i64,
}

impl NumDen {
    pub fn from_rational(value: &Rational) -> Result<Self, String> {
        let num = value
            .numer()
            .to_i64()
            .ok_or_else(|| format!("numerator of {value} does not fit in i64"))?;
        let den = value
            .denom()
            .to_i64()
            .ok_or_else(|| format!("denominator of {value} does not fit in i64"))?;
        Ok(NumDen { num, den })
    }

    pub fn to_rational(&self) -> Result<Rational, String> {
        if self.den == 0 {
            return Err("rational with zero denominator".to_string());
        }
        Ok(rat(self.num, self.den))
    }
}

/// `#[serde(with = "crate::rational::serde_numden")]` for `Rational` fields.
pub mod serde_numden {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        NumDen::from_rational(value)
            .map_err(S::Error::custom)?
            .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let nd = NumDen::deserialize(de)?;
        nd.to_rational().map_err(D::Error::custom)
    }
}

/// `#[serde(with = "crate::rational::serde_numden_opt")]` for optional fields.
pub mod serde_numden_opt {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        match value {
            Some(v) => NumDen::from_rational(v)
                .map_err(S::Error::custom)?
                .serialize(ser),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Rational>, D::Error> {
        let nd = Option::<NumDen>::deserialize(de)?;
        nd.map(|nd| nd.to_rational().map_err(D::Error::custom))
            .transpose()
    }
}

/// Checks non-negativity of a cost.
pub fn check_nonnegative(value: &Rational, what: &str) -> Result<(), String> {
    if value.is_negative() {
        Err(format!("{what} must be nonnegative, got {value}"))
    } else {
        Ok(())
    }
}

/// Sum of an iterator of rationals.
pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let mut acc = Rational::zero();
    for v in values {
        acc += v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numden_round_trip() {
        let v = rat(9, 4);
        let nd = NumDen::from_rational(&v).unwrap();
        assert_eq!((nd.num, nd.den), (9, 4));
        assert_eq!(nd.to_rational().unwrap(), v);
    }

    #[test]
    fn numden_normalizes_sign() {
        let v = rat(3, -6);
        let nd = NumDen::from_rational(&v).unwrap();
        assert_eq!((nd.num, nd.den), (-1, 2));
    }

    #[test]
    fn zero_denominator_rejected() {
        let nd = NumDen { num: 1, den: 0 };
        assert!(nd.to_rational().is_err());
    }
}
