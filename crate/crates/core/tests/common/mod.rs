//! Helpers shared by the integration tests.

#![allow(dead_code)]

use serde_json::Value;

pub const SCHEMA: &str = include_str!("../../schema/v1.json");

/// Validates `doc` against the output schema. Covers the keywords the schema
/// uses: `$ref` into `$defs`, `oneOf`, `type`, `enum`, `const`, `required`,
/// `properties`, `additionalProperties`, `items` and `minimum`.
pub fn validate(doc: &Value) -> Result<(), String> {
    let schema: Value = serde_json::from_str(SCHEMA).map_err(|e| e.to_string())?;
    check(&schema, &schema, doc, "$")
}

fn resolve<'a>(root: &'a Value, node: &'a Value) -> Result<&'a Value, String> {
    match node.get("$ref").and_then(Value::as_str) {
        Some(r) => {
            let name = r
                .strip_prefix("#/$defs/")
                .ok_or_else(|| format!("unsupported $ref {r}"))?;
            root["$defs"]
                .get(name)
                .ok_or_else(|| format!("unknown definition {name}"))
        }
        None => Ok(node),
    }
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}

fn check(root: &Value, node: &Value, v: &Value, at: &str) -> Result<(), String> {
    let node = resolve(root, node)?;
    if let Some(alts) = node.get("oneOf").and_then(Value::as_array) {
        let hits = alts
            .iter()
            .filter(|s| check(root, s, v, at).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{at}: {hits} oneOf branches match"));
        }
    }
    match node.get("type") {
        Some(Value::String(t)) if !type_matches(t, v) => return Err(format!("{at}: expected {t}")),
        Some(Value::Array(ts))
            if !ts
                .iter()
                .any(|t| t.as_str().is_some_and(|t| type_matches(t, v))) =>
        {
            return Err(format!("{at}: expected one of {ts:?}"))
        }
        _ => {}
    }
    if let Some(c) = node.get("const") {
        if c != v {
            return Err(format!("{at}: expected {c}"));
        }
    }
    if let Some(e) = node.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{at}: {v} not in enum"));
        }
    }
    if let (Some(min), Some(x)) = (node.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{at}: {x} below {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = node.get("properties").and_then(Value::as_object);
        for key in node
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap_or_default();
            if !obj.contains_key(key) {
                return Err(format!("{at}: missing {key}"));
            }
        }
        for (k, val) in obj {
            let path = format!("{at}.{k}");
            match (
                props.and_then(|p| p.get(k)),
                node.get("additionalProperties"),
            ) {
                (Some(s), _) => check(root, s, val, &path)?,
                (None, Some(Value::Bool(false))) => return Err(format!("{path}: not allowed")),
                (None, Some(s @ Value::Object(_))) => check(root, s, val, &path)?,
                _ => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (node.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            check(root, items, x, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}
