//! JSON emission with every number fixed at nine significant digits.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const SIGNIFICANT_DIGITS: usize = 9;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in `v`; integers are left alone.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_f64(round_sig(x))
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// `{"schema_version": 1, "command": …, "config": …, "report": …}`.
pub fn envelope<C: Serialize, R: Serialize>(command: &str, config: &C, report: &R) -> serde_json::Result<Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    m.insert("command".into(), Value::from(command));
    m.insert("config".into(), round_value(serde_json::to_value(config)?));
    m.insert("report".into(), round_value(serde_json::to_value(report)?));
    Ok(Value::Object(m))
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("a Value always serialises")
}

/// Divides the entropy-valued fields named in `keys`, at any depth, by ln 2.
pub fn to_bits(v: &mut Value, keys: &[&str]) {
    match v {
        Value::Object(o) => {
            for (k, x) in o.iter_mut() {
                if keys.contains(&k.as_str()) {
                    scale_numbers(x, std::f64::consts::LN_2.recip());
                } else {
                    to_bits(x, keys);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| to_bits(x, keys)),
        _ => {}
    }
}

fn scale_numbers(v: &mut Value, s: f64) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if let Some(m) = serde_json::Number::from_f64(round_sig(x * s)) {
                    *v = Value::Number(m);
                }
            }
        }
        Value::Object(o) => {
            for (k, x) in o.iter_mut() {
                // sample counts are not entropies
                if k != "bins" {
                    scale_numbers(x, s);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| scale_numbers(x, s)),
        _ => {}
    }
}
