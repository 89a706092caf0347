//! Exact rational numbers and their JSON encoding.
//!
//! Rationals travel over the wire as `[numerator, denominator]` pairs. On
//! input we also accept integers, `"p/q"` strings, and decimal literals
//! (parsed through their shortest decimal representation, so `0.1` is
//! exactly `1/10`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn sign(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Parses `"3"`, `"-2/7"` or a decimal literal such as `"0.125"`.
pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("not a number: {s:?}"));
    }
    let all = format!("{int_part}{frac_part}");
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: {s:?}"));
    }
    let mut value = Rational::from_integer(all.parse::<BigInt>().unwrap_or_default());
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    for _ in 0..shift.unsigned_abs() {
        if shift > 0 {
            value *= &ten;
        } else {
            value /= &ten;
        }
    }
    Ok(if neg { -value } else { value })
}

/// Decimal rendering with a fixed number of fractional digits, for humans.
pub fn display(q: &Rational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn from_json_value<E: de::Error>(v: &serde_json::Value) -> Result<Rational, E> {
    use serde_json::Value;
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else {
                parse(&n.to_string()).map_err(E::custom)
            }
        }
        Value::String(s) => parse(s).map_err(E::custom),
        Value::Array(items) if items.len() == 2 => {
            let part = |x: &Value| -> Result<BigInt, E> {
                match x {
                    Value::Number(n) => n
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| E::custom("rational parts must be integers")),
                    Value::String(s) => s.parse().map_err(|_| E::custom("bad integer string")),
                    _ => Err(E::custom("rational parts must be integers")),
                }
            };
            let n = part(&items[0])?;
            let d = part(&items[1])?;
            if d.is_zero() {
                return Err(E::custom("zero denominator"));
            }
            Ok(Rational::new(n, d))
        }
        _ => Err(E::custom("expected a rational: [num, den], integer, \"p/q\" or decimal")),
    }
}

fn bigint_json(b: &BigInt) -> serde_json::Value {
    match b.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(b.to_string()),
    }
}

/// `#[serde(with = "rational::serde_q")]` for a single rational.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&bigint_json(q.numer()))?;
        t.serialize_element(&bigint_json(q.denom()))?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = <serde_json::Value as serde::Deserialize>::deserialize(d)?;
        from_json_value(&v)
    }
}

/// `#[serde(with = "rational::serde_vec")]` for `Vec<Rational>`.
pub mod serde_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(Wrap))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Vec<Rational>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of rationals")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element::<serde_json::Value>()? {
                    out.push(from_json_value(&v)?);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(V)
    }
}

/// `#[serde(with = "rational::serde_vec_vec")]` for `Vec<Vec<Rational>>`.
pub mod serde_vec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|row| WrapVec(row)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let rows = <Vec<Vec<serde_json::Value>> as serde::Deserialize>::deserialize(d)?;
        rows.iter()
            .map(|row| row.iter().map(from_json_value).collect())
            .collect()
    }
}

/// `#[serde(with = "rational::serde_opt")]` for `Option<Rational>`.
pub mod serde_opt {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&Wrap(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let v = <Option<serde_json::Value> as serde::Deserialize>::deserialize(d)?;
        v.as_ref().map(from_json_value).transpose()
    }
}

/// Serialization adaptor for a borrowed rational.
pub struct Wrap<'a>(pub &'a Rational);

impl serde::Serialize for Wrap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_q::serialize(self.0, s)
    }
}

struct WrapVec<'a>(&'a [Rational]);

impl serde::Serialize for WrapVec<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_vec::serialize(self.0, s)
    }
}

/// Owned rational with serde support, for maps and nested containers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub Rational);

impl serde::Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_q::serialize(&self.0, s)
    }
}

impl<'de> serde::Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_q::deserialize(d).map(Q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-2/6").unwrap(), frac(-1, 3));
        assert_eq!(parse("0.125").unwrap(), frac(1, 8));
        assert_eq!(parse("1e-3").unwrap(), frac(1, 1000));
        assert_eq!(parse("2.5E2").unwrap(), int(250));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn json_accepts_pairs_numbers_and_strings() {
        let v: Vec<Q> = serde_json::from_str(r#"[[1,3], 2, "5/10", 0.1]"#).unwrap();
        assert_eq!(v[0].0, frac(1, 3));
        assert_eq!(v[1].0, int(2));
        assert_eq!(v[2].0, frac(1, 2));
        assert_eq!(v[3].0, frac(1, 10));
        assert_eq!(serde_json::to_string(&v[0]).unwrap(), "[1,3]");
    }
}
