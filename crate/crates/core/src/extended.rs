//! Reals extended with `+∞`.
//!
//! Stability thresholds are infinite on bipartite instances, and JSON has no
//! infinity literal, so `+∞` serializes as the string `"inf"`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A real number in `[-∞, +∞]` with a JSON-friendly encoding.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(pub f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Replace `+∞` by `cap`; finite values pass through.
    pub fn capped(self, cap: f64) -> f64 {
        if self.0.is_infinite() && self.0 > 0.0 {
            cap
        } else {
            self.0
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                Ok(ExtReal(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "inf" => Ok(ExtReal(f64::INFINITY)),
                    "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}
