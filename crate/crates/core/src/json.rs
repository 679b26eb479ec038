//! JSON encodings shared by the library and the `hr` binary.
//!
//! Matrices use `{"rows": r, "cols": c, "entries": ["p/q", ...]}` with
//! row-major entries in canonical rational form.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmat::{format_rational, parse_rational, Rational, RationalMatrix};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.entries().iter().map(format_rational).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let entries = repr
            .entries
            .iter()
            .map(|e| parse_rational(e))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        RationalMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}

/// Serde adapter storing a [`Rational`] as its canonical string.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of canonical strings.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(D::Error::custom))
            .collect()
    }
}

/// Same as [`rational_vec`] for an optional vector.
pub mod opt_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &Option<Vec<Rational>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(format_rational).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        Option::<Vec<String>>::deserialize(d)?
            .map(|v| {
                v.iter()
                    .map(|t| parse_rational(t).map_err(D::Error::custom))
                    .collect()
            })
            .transpose()
    }
}

/// Reads a list of matrices from any of the accepted shapes: a bare array,
/// or an object carrying `matrices` or `generators`.
pub fn matrices_from_value(value: &serde_json::Value) -> Result<Vec<RationalMatrix>> {
    let list = match value {
        serde_json::Value::Array(_) => value,
        serde_json::Value::Object(map) => map
            .get("matrices")
            .or_else(|| map.get("generators"))
            .ok_or_else(|| Error::Parse("expected `matrices` or `generators`".into()))?,
        _ => {
            return Err(Error::Parse(
                "expected an array or object of matrices".into(),
            ))
        }
    };
    serde_json::from_value(list.clone()).map_err(|e| Error::Parse(e.to_string()))
}
