use serde_json::{json, Map, Value};

use crate::numtheory::FactoredInt;

/// How large integers are written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueOptions {
    pub expand: bool,
    pub max_digits: usize,
}

impl Default for ValueOptions {
    fn default() -> Self {
        ValueOptions {
            expand: true,
            max_digits: 200,
        }
    }
}

/// `{"factors": {"2": 4, "3": 1}, "value": "48"}`. The decimal value is
/// dropped (and `"value_omitted": true` added) when expansion is disabled
/// or the value has more than `max_digits` digits.
pub fn factored(f: &FactoredInt, opts: ValueOptions) -> Value {
    let mut out = Map::new();
    out.insert(
        "factors".into(),
        serde_json::to_value(f).expect("factors serialize"),
    );
    let value = opts.expand.then(|| f.value().to_string());
    match value {
        Some(v) if v.len() <= opts.max_digits => {
            out.insert("value".into(), Value::String(v));
        }
        _ => {
            out.insert("value_omitted".into(), Value::Bool(true));
        }
    }
    Value::Object(out)
}

pub fn error(kind: &str, message: &str, exit_code: i32) -> Value {
    json!({ "error": { "kind": kind, "message": message, "exit_code": exit_code } })
}

/// Flattens a JSON document into aligned `key  value` rows.
pub fn table(value: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", value, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            // A factored integer renders on one line.
            if let Some(Value::Object(factors)) = map.get("factors") {
                let text = if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors
                        .iter()
                        .map(|(p, e)| {
                            if e == 1 {
                                p.clone()
                            } else {
                                format!("{p}^{e}")
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" * ")
                };
                let text = match map.get("value") {
                    Some(Value::String(val)) => format!("{text} = {val}"),
                    _ => text,
                };
                rows.push((prefix.to_string(), text));
                return;
            }
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, rows);
            }
        }
        Value::Array(items) => {
            if let Some(parts) = items.iter().map(scalar).collect::<Option<Vec<_>>>() {
                rows.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
            } else {
                for (i, child) in items.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), child, rows);
                }
            }
        }
        other => rows.push((prefix.to_string(), scalar(other).unwrap())),
    }
}
