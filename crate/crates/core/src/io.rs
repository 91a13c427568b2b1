//! Canonical JSON encoding: sorted keys, rationals as `[num, den]`, field
//! elements as `{"p": .., "q": .., "d": ..}`, floats with 17 significant digits.

use std::io;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, ser::Formatter, Value};

use crate::actions::{ActionSequence, TailClass};
use crate::diophantine::QuadraticIrrational;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn int_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => json!(v.to_string()),
    }
}

pub fn rational_json(r: &BigRational) -> Value {
    json!([int_json(r.numer()), int_json(r.denom())])
}

pub fn qi_json(x: &QuadraticIrrational) -> Value {
    json!({"p": rational_json(x.p()), "q": rational_json(x.q()), "d": x.d()})
}

fn bigint_from(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::domain(format!("expected an integer, got {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::domain(format!("expected an integer, got '{s}'"))),
        _ => Err(Error::domain(format!("expected an integer, got {v}"))),
    }
}

/// Accepts `[num, den]`, an integer, a decimal, or a string such as `"3/4"`.
pub fn rational_from(v: &Value) -> Result<BigRational> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let d = bigint_from(&a[1])?;
            if d.is_zero() {
                return Err(Error::domain("zero denominator"));
            }
            Ok(BigRational::new(bigint_from(&a[0])?, d))
        }
        Value::Number(n) => crate::diophantine::parse_rational_str(&n.to_string()),
        Value::String(s) => crate::diophantine::parse_rational_str(s),
        _ => Err(Error::domain(format!("expected a rational, got {v}"))),
    }
}

/// Accepts the object form, the CLI string syntax, or a rational.
pub fn qi_from(v: &Value) -> Result<QuadraticIrrational> {
    match v {
        Value::Object(o) => {
            let get = |k: &str| {
                o.get(k)
                    .ok_or_else(|| Error::domain(format!("field element is missing '{k}'")))
            };
            let d = get("d")?
                .as_u64()
                .ok_or_else(|| Error::domain("'d' must be a positive integer"))?;
            QuadraticIrrational::new(rational_from(get("p")?)?, rational_from(get("q")?)?, d)
        }
        Value::String(s) => s.parse(),
        _ => Ok(QuadraticIrrational::rational(rational_from(v)?)),
    }
}

/// Scalars that have a canonical JSON form.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::domain("bad number")),
            _ => Ok(Scalar::to_f64(&rational_from(v)?)),
        }
    }
}

impl JsonScalar for BigRational {
    fn to_json(&self) -> Value {
        rational_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        rational_from(v)
    }
}

impl JsonScalar for QuadraticIrrational {
    fn to_json(&self) -> Value {
        qi_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        qi_from(v)
    }
}

pub fn actions_to_json<S: JsonScalar>(a: &ActionSequence<S>) -> Value {
    let entries: Vec<Value> = a.entries().iter().map(|(n, g)| json!([n, g.to_json()])).collect();
    json!({"entries": entries, "tail": serde_json::to_value(a.tail()).expect("tail class")})
}

pub fn actions_from_json<S: JsonScalar>(v: &Value) -> Result<ActionSequence<S>> {
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::domain("action sequence needs an 'entries' array"))?;
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::domain(format!("entry {e} is not a pair [n, gamma]")))?;
        let n = pair[0]
            .as_u64()
            .ok_or_else(|| Error::domain(format!("index {} is not a positive integer", pair[0])))?;
        out.push((n, S::from_json(&pair[1])?));
    }
    let tail = match v.get("tail") {
        None => TailClass::None,
        Some(t) => serde_json::from_value(t.clone())
            .map_err(|e| Error::domain(format!("bad tail descriptor: {e}")))?,
    };
    ActionSequence::new(out, tail)
}

/// Compact JSON writer printing every float as `{:.16e}`.
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Deterministic rendering: keys sorted, floats at full precision, trailing newline.
pub fn canonical_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    // Value maps are BTreeMaps, so keys come out sorted
    v.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

pub fn read_json(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
