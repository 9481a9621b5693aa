//! JSON encodings shared by the library and the command line.
//!
//! * matrix: `{"domain": "rational"|"complex", "n": 3, "entries": [[..], ..]}`
//!   with rationals as `"p/q"` strings and complex numbers as `[re, im]`
//! * pair: `{"x": matrix, "y": matrix, "c"?: [..], "r"?: [..]}`
//! * invariant tuple: `{"a": [a1..a9], "v": .., "w": ..}`
//! * reduced tuple: a bare array `[a3..a9]`, or `{"a": [..7 values]}`

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::invariants::{InvariantTuple, ReducedTuple};
use crate::matrix::{Matrix, Vector};
use crate::scalar::{Complex, Domain, Rational, Scalar};

pub fn encode_matrix<T: Scalar>(m: &Matrix<T>) -> Value {
    let rows: Vec<Value> = m
        .rows()
        .iter()
        .map(|row| Value::Array(row.iter().map(Scalar::encode).collect()))
        .collect();
    json!({"domain": T::DOMAIN, "n": m.n(), "entries": rows})
}

/// Domain tag of an encoded matrix or pair (defaults to rational).
pub fn domain_of(v: &Value) -> Result<Domain> {
    let tagged = v
        .get("domain")
        .or_else(|| v.get("x").and_then(|x| x.get("domain")));
    match tagged {
        None => Ok(Domain::Rational),
        Some(d) => Ok(serde_json::from_value(d.clone())?),
    }
}

pub fn decode_matrix<T: Scalar>(v: &Value) -> Result<Matrix<T>> {
    let rows = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("matrix needs an \"entries\" array of rows".into()))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Json("matrix rows must be arrays".into()))?
                .iter()
                .map(T::decode)
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_rows(rows)?;
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize != m.n() {
            return Err(Error::DimensionMismatch {
                left: n as usize,
                right: m.n(),
            });
        }
    }
    Ok(m)
}

pub fn encode_vector<T: Scalar>(v: &Vector<T>) -> Value {
    Value::Array(v.entries.iter().map(Scalar::encode).collect())
}

fn decode_entries<T: Scalar>(v: &Value) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| Error::Json(format!("expected an array of scalars, got {v}")))?
        .iter()
        .map(T::decode)
        .collect()
}

/// A matrix pair with the optional rank-one factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair<T> {
    pub x: Matrix<T>,
    pub y: Matrix<T>,
    pub c: Option<Vector<T>>,
    pub r: Option<Vector<T>>,
}

impl<T: Scalar> Pair<T> {
    pub fn new(x: Matrix<T>, y: Matrix<T>) -> Self {
        Pair {
            x,
            y,
            c: None,
            r: None,
        }
    }
}

pub fn encode_pair<T: Scalar>(p: &Pair<T>) -> Value {
    let mut obj = Map::new();
    obj.insert("x".into(), encode_matrix(&p.x));
    obj.insert("y".into(), encode_matrix(&p.y));
    if let Some(c) = &p.c {
        obj.insert("c".into(), encode_vector(c));
    }
    if let Some(r) = &p.r {
        obj.insert("r".into(), encode_vector(r));
    }
    Value::Object(obj)
}

pub fn decode_pair<T: Scalar>(v: &Value) -> Result<Pair<T>> {
    let field = |k: &str| {
        v.get(k)
            .ok_or_else(|| Error::Json(format!("pair needs field {k:?}")))
    };
    let x = decode_matrix(field("x")?)?;
    let y = decode_matrix(field("y")?)?;
    x.check_same_dim(&y)?;
    let c = v
        .get("c")
        .map(decode_entries)
        .transpose()?
        .map(Vector::column);
    let r = v.get("r").map(decode_entries).transpose()?.map(Vector::row);
    Ok(Pair { x, y, c, r })
}

pub fn encode_invariants<T: Scalar>(t: &InvariantTuple<T>) -> Value {
    json!({
        "a": t.a.iter().map(Scalar::encode).collect::<Vec<_>>(),
        "v": t.v.encode(),
        "w": t.w.encode(),
    })
}

pub fn encode_reduced<T: Scalar>(t: &ReducedTuple<T>) -> Value {
    Value::Array(t.0.iter().map(Scalar::encode).collect())
}

/// Accepts `[a3..a9]`, `{"a": [a3..a9]}` or a full `{"a": [a1..a9], ...}`
/// (whose first two entries must then be zero).
pub fn decode_reduced<T: Scalar>(v: &Value) -> Result<ReducedTuple<T>> {
    let arr = match v {
        Value::Array(_) => v,
        Value::Object(o) => o
            .get("a")
            .ok_or_else(|| Error::Json("tuple object needs field \"a\"".into()))?,
        _ => return Err(Error::Json(format!("expected a tuple, got {v}"))),
    };
    let vals: Vec<T> = decode_entries(arr)?;
    match vals.len() {
        7 => Ok(ReducedTuple::from_slice(&vals).expect("length checked")),
        9 => {
            let tol = Default::default();
            if !vals[0].is_zero_within(&tol, 0.0) || !vals[1].is_zero_within(&tol, 0.0) {
                return Err(Error::NonzeroTranslation);
            }
            Ok(ReducedTuple::from_slice(&vals[2..]).expect("length checked"))
        }
        k => Err(Error::Json(format!(
            "tuple must have 7 or 9 entries, got {k}"
        ))),
    }
}

/// Complex view of any encoded scalar array, whatever its domain.
pub fn decode_reduced_complex(v: &Value) -> Result<ReducedTuple<Complex>> {
    decode_reduced::<Complex>(v)
}

pub fn decode_rational(v: &Value) -> Result<Rational> {
    Rational::decode(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_both_domains() {
        let m = Matrix::from_fn(2, |i, j| Rational::ratio(i as i64 + 1, j as i64 + 2));
        let v = encode_matrix(&m);
        assert_eq!(v["domain"], "rational");
        assert_eq!(v["entries"][0][0], "1/2");
        assert_eq!(decode_matrix::<Rational>(&v).unwrap(), m);
        let z = m.to_complex();
        assert_eq!(decode_matrix::<Complex>(&encode_matrix(&z)).unwrap(), z);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(decode_matrix::<Rational>(&json!({"entries": [[1, 2], [3]]})).is_err());
        assert!(decode_matrix::<Rational>(&json!({"n": 3, "entries": [[1]]})).is_err());
        assert!(decode_reduced::<Rational>(&json!([1, 2, 3])).is_err());
        assert!(decode_reduced::<Rational>(&json!({"a": [1, 0, 0, 0, 0, 0, 0, 0, 0]})).is_err());
    }

    #[test]
    fn reduced_tuple_forms() {
        let a = decode_reduced::<Rational>(&json!(["2", 0, "-9/2", 0, 0, 0, 0])).unwrap();
        let b =
            decode_reduced::<Rational>(&json!({"a": [0, 0, 2, 0, "-9/2", 0, 0, 0, 0], "v": -3}))
                .unwrap();
        assert_eq!(a, b);
    }
}
