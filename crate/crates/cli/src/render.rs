//! Plain-text rendering of JSON reports.

use std::fmt::Write;

use serde_json::Value;

pub fn text(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Object(_) | Value::Array(_) if !is_leaf(value) => block(&mut out, value, 0),
        other => {
            let _ = writeln!(out, "{}", scalar(other));
        }
    }
    out
}

/// Arrays of scalars or of small arrays print on one line.
fn is_leaf(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| match i {
            Value::Array(inner) => inner.iter().all(|x| !x.is_object() && !x.is_array() || is_leaf(x)),
            Value::Object(_) => false,
            _ => true,
        }),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) if items.is_empty() => "0".into(),
        other => other.to_string(),
    }
}

fn block(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_leaf(x) {
                    let shown = if x.is_array() { x.to_string() } else { scalar(x) };
                    let _ = writeln!(out, "{pad}{k}: {shown}");
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    block(out, x, indent + 1);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_leaf(x) {
                    let _ = writeln!(out, "{pad}- {x}");
                } else {
                    let _ = writeln!(out, "{pad}-");
                    block(out, x, indent + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}
