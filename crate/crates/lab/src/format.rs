//! Floating-point text forms shared by every output file.

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Serializes a finite value as a JSON number with 17 significant digits and
/// a non-finite one as `null`.
pub fn f17<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return s.serialize_none();
    }
    RawValue::from_string(fmt17(*v))
        .map_err(S::Error::custom)?
        .serialize(s)
}

pub fn f17_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => f17(v, s),
        None => s.serialize_none(),
    }
}

pub fn f17_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&F17(*x))?;
    }
    seq.end()
}

/// `null` reads back as NaN.
pub fn nullable<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Newtype carrying the 17-digit serialization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        f17(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MIN_POSITIVE] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
        assert_eq!(serde_json::to_string(&F17(0.5)).unwrap(), "5.0000000000000000e-1");
        assert_eq!(serde_json::to_string(&F17(f64::NAN)).unwrap(), "null");
    }
}
