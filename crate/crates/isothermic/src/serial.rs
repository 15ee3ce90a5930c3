//! JSON representation of linear-algebra values: vectors as arrays, matrices as row-major
//! arrays of rows, complex numbers as {"re": …, "im": …}. Use with
//! `#[serde(with = "crate::serial::repr")]` on fields of the supported types.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// Complex number in the JSON layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(c: Complex64) -> Self {
        Cx { re: c.re, im: c.im }
    }
}

impl From<Cx> for Complex64 {
    fn from(c: Cx) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Conversion to and from a JSON value.
pub trait Repr: Sized {
    fn to_value(&self) -> Value;
    fn from_value(v: Value) -> std::result::Result<Self, String>;
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn as_f64(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::Null => Ok(f64::NAN),
        _ => v.as_f64().ok_or_else(|| format!("expected a number, got {v}")),
    }
}

fn as_array(v: Value) -> std::result::Result<Vec<Value>, String> {
    match v {
        Value::Array(a) => Ok(a),
        other => Err(format!("expected an array, got {other}")),
    }
}

impl Repr for f64 {
    fn to_value(&self) -> Value {
        num(*self)
    }
    fn from_value(v: Value) -> std::result::Result<Self, String> {
        as_f64(&v)
    }
}

impl Repr for Complex64 {
    fn to_value(&self) -> Value {
        serde_json::json!({ "re": num(self.re), "im": num(self.im) })
    }
    fn from_value(v: Value) -> std::result::Result<Self, String> {
        let re = as_f64(v.get("re").ok_or("complex number without \"re\"")?)?;
        let im = as_f64(v.get("im").ok_or("complex number without \"im\"")?)?;
        Ok(Complex64::new(re, im))
    }
}

impl<T: Repr + nalgebra::Scalar> Repr for DVector<T> {
    fn to_value(&self) -> Value {
        Value::Array(self.iter().map(Repr::to_value).collect())
    }
    fn from_value(v: Value) -> std::result::Result<Self, String> {
        let items = as_array(v)?.into_iter().map(T::from_value).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(DVector::from_vec(items))
    }
}

impl Repr for DMatrix<f64> {
    fn to_value(&self) -> Value {
        Value::Array(self.row_iter().map(|row| Value::Array(row.iter().map(|x| num(*x)).collect())).collect())
    }
    fn from_value(v: Value) -> std::result::Result<Self, String> {
        let rows = as_array(v)?
            .into_iter()
            .map(|r| as_array(r)?.iter().map(as_f64).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err("ragged matrix rows".into());
        }
        Ok(DMatrix::from_row_iterator(nrows, ncols, rows.into_iter().flatten()))
    }
}

impl<T: Repr> Repr for Vec<T> {
    fn to_value(&self) -> Value {
        Value::Array(self.iter().map(Repr::to_value).collect())
    }
    fn from_value(v: Value) -> std::result::Result<Self, String> {
        as_array(v)?.into_iter().map(T::from_value).collect()
    }
}

impl<T: Repr> Repr for Option<T> {
    fn to_value(&self) -> Value {
        self.as_ref().map_or(Value::Null, Repr::to_value)
    }
    fn from_value(v: Value) -> std::result::Result<Self, String> {
        match v {
            Value::Null => Ok(None),
            v => T::from_value(v).map(Some),
        }
    }
}

/// serde adapter for [`Repr`] types.
pub mod repr {
    use super::*;

    pub fn serialize<T: Repr, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.to_value().serialize(s)
    }

    pub fn deserialize<'de, T: Repr, D: Deserializer<'de>>(d: D) -> std::result::Result<T, D::Error> {
        T::from_value(Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Holder {
        #[serde(with = "repr")]
        m: DMatrix<f64>,
        #[serde(with = "repr")]
        c: Complex64,
    }

    #[test]
    fn matrix_is_row_major_and_complex_is_an_object() {
        let h = Holder { m: DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), c: Complex64::new(0.5, -1.0) };
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"m":[[1.0,2.0,3.0],[4.0,5.0,6.0]],"c":{"re":0.5,"im":-1.0}}"#);
    }
}
