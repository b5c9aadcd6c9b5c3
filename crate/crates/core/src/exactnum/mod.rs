//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.

mod cycnum;
mod field;
mod interval;
mod tag;

pub use cycnum::{CycNum, Rational};
pub use field::{cyclotomic_polynomial, euler_phi, lcm};
pub(crate) use field::units;
pub use tag::FieldTag;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// JSON integer that falls back to a decimal string beyond 64 bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(x) => JsonInt::Small(x),
            None => JsonInt::Big(v.to_string()),
        }
    }
}

impl JsonInt {
    pub fn to_bigint(&self) -> Option<BigInt> {
        match self {
            JsonInt::Small(x) => Some(BigInt::from(*x)),
            JsonInt::Big(s) => s.parse().ok(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycNumJson {
    m: u32,
    coeffs: Vec<(JsonInt, JsonInt)>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs()
            .iter()
            .map(|c| (JsonInt::from(c.numer()), JsonInt::from(c.denom())))
            .collect();
        CycNumJson {
            m: self.conductor(),
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CycNumJson::deserialize(d)?;
        if raw.m == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let mut coeffs = Vec::with_capacity(raw.coeffs.len());
        for (n, den) in &raw.coeffs {
            let n = n.to_bigint().ok_or_else(|| D::Error::custom("bad numerator"))?;
            let den = den
                .to_bigint()
                .ok_or_else(|| D::Error::custom("bad denominator"))?;
            if den == BigInt::from(0) {
                return Err(D::Error::custom("zero denominator"));
            }
            coeffs.push(Rational::new(n, den));
        }
        CycNum::from_coeffs(raw.m, &coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let a = &CycNum::zeta(4) + &CycNum::from_ratio(4, 1, 2);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":4,"coeffs":[[1,2],[1,1]]}"#);
        let back: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn json_big_integers() {
        let big = CycNum::from_integer(3, i64::MAX) * CycNum::from_integer(3, 4);
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.contains('"'));
        let back: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn json_rejects_wrong_length() {
        assert!(serde_json::from_str::<CycNum>(r#"{"m":5,"coeffs":[[1,1]]}"#).is_err());
        assert!(serde_json::from_str::<CycNum>(r#"{"m":1,"coeffs":[[1,0]]}"#).is_err());
    }
}
