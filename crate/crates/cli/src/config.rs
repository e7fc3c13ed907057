//! Flat `key = value` configuration files.
//!
//! One assignment per line; `#` starts a comment (outside quotes); values
//! are booleans, numbers, quoted or bare strings, or `[a, b, c]` lists.
//! Every key must be consumed by the experiment that runs — unknown keys
//! are an error, which catches typos like `bandlo` for `band_lo`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Number(f64),
    Text(String),
    List(Vec<Value>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Number(_) => "number",
            Value::Text(_) => "string",
            Value::List(_) => "list",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Bool(b) => serde_json::Value::Bool(*b),
            Value::Number(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Text(s) => serde_json::Value::String(s.clone()),
            Value::List(items) => {
                serde_json::Value::Array(items.iter().map(Value::to_json).collect())
            }
        }
    }
}

#[derive(Debug)]
pub struct Config {
    values: BTreeMap<String, Value>,
    accessed: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim().to_string();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(format!("line {}: bad key `{key}`", lineno + 1));
            }
            let parsed = parse_value(value.trim())
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
            if values.insert(key.to_string(), parsed).is_some() {
                return Err(format!("line {}: key `{key}` assigned twice", lineno + 1));
            }
        }
        Ok(Config { values, accessed: RefCell::new(BTreeSet::new()) })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        let v = self.values.get(key);
        if v.is_some() {
            self.accessed.borrow_mut().insert(key.to_string());
        }
        v
    }

    pub fn str_opt(&self, key: &str) -> Result<Option<String>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Text(s)) => Ok(Some(s.clone())),
            Some(other) => Err(format!("`{key}` should be a string, got {}", other.type_name())),
        }
    }

    pub fn str_required(&self, key: &str) -> Result<String, String> {
        self.str_opt(key)?
            .ok_or_else(|| format!("missing required config key `{key}`"))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Number(x)) => Ok(Some(*x)),
            Some(other) => Err(format!("`{key}` should be a number, got {}", other.type_name())),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, String> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.f64_opt(key)? {
            None => Ok(default),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 => Ok(x as usize),
            Some(x) => Err(format!("`{key}` should be a small nonnegative integer, got {x}")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, String> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(format!("`{key}` should be a boolean, got {}", other.type_name())),
        }
    }

    pub fn list_f64_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, String> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::List(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Number(x) => Ok(*x),
                    other => Err(format!(
                        "`{key}` should hold numbers, got {}",
                        other.type_name()
                    )),
                })
                .collect(),
            Some(Value::Number(x)) => Ok(vec![*x]),
            Some(other) => Err(format!("`{key}` should be a list, got {}", other.type_name())),
        }
    }

    pub fn list_str_or(&self, key: &str, default: &[&str]) -> Result<Vec<String>, String> {
        match self.get(key) {
            None => Ok(default.iter().map(|s| s.to_string()).collect()),
            Some(Value::List(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Text(s) => Ok(s.clone()),
                    other => Err(format!(
                        "`{key}` should hold strings, got {}",
                        other.type_name()
                    )),
                })
                .collect(),
            Some(Value::Text(s)) => Ok(vec![s.clone()]),
            Some(other) => Err(format!("`{key}` should be a list, got {}", other.type_name())),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// Error if the file holds keys nothing consumed.
    pub fn reject_unknown_keys(&self) -> Result<(), String> {
        let accessed = self.accessed.borrow();
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !accessed.contains(*k))
            .map(|k| k.as_str())
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(format!(
                "unknown config key(s) for this experiment: {}",
                unknown.join(", ")
            ))
        }
    }

    /// The parsed file as a (sorted) JSON object, for echoing into reports.
    pub fn echo_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.values {
            map.insert(k.clone(), v.to_json());
        }
        serde_json::Value::Object(map)
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (idx, ch) in line.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..idx],
            _ => {}
        }
    }
    line
}

fn parse_value(text: &str) -> Result<Value, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty value".into());
    }
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| format!("unterminated list `{text}`"))?;
        let mut items = Vec::new();
        for part in split_top_level(inner) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            items.push(parse_value(part)?);
        }
        return Ok(Value::List(items));
    }
    match text {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Some(inner) = text.strip_prefix('"') {
        let inner = inner
            .strip_suffix('"')
            .ok_or_else(|| format!("unterminated string `{text}`"))?;
        return Ok(Value::Text(inner.to_string()));
    }
    if let Ok(x) = text.parse::<f64>() {
        if x.is_finite() {
            return Ok(Value::Number(x));
        }
    }
    Ok(Value::Text(text.to_string()))
}

/// Split on commas that sit outside quotes and parentheses, so values like
/// `[ellipse(2, 1), slice(1.0)]` keep their arguments together.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut in_quotes = false;
    let mut start = 0;
    for (idx, ch) in text.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '(' | '[' if !in_quotes => depth += 1,
            ')' | ']' if !in_quotes => depth -= 1,
            ',' if !in_quotes && depth == 0 => {
                parts.push(&text[start..idx]);
                start = idx + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_four_value_kinds() {
        let cfg = Config::parse(
            "model = euclidean2   # trailing comment\n\
             count = 12\n\
             probe = true\n\
             label = \"a # quoted hash\"\n\
             radii = [1, 10, 100]\n\
             shapes = [ellipse(2, 1), slice(0.5)]\n",
        )
        .unwrap();
        assert_eq!(cfg.str_required("model").unwrap(), "euclidean2");
        assert_eq!(cfg.usize_or("count", 0).unwrap(), 12);
        assert!(cfg.bool_or("probe", false).unwrap());
        assert_eq!(cfg.str_required("label").unwrap(), "a # quoted hash");
        assert_eq!(cfg.list_f64_or("radii", &[]).unwrap(), vec![1.0, 10.0, 100.0]);
        assert_eq!(
            cfg.list_str_or("shapes", &[]).unwrap(),
            vec!["ellipse(2, 1)", "slice(0.5)"]
        );
        cfg.reject_unknown_keys().unwrap();
    }

    #[test]
    fn rejects_unconsumed_and_malformed_keys() {
        let cfg = Config::parse("model = x\nmystery = 3\n").unwrap();
        let _ = cfg.str_required("model").unwrap();
        let err = cfg.reject_unknown_keys().unwrap_err();
        assert!(err.contains("mystery"));

        assert!(Config::parse("just a line\n").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
        assert!(Config::parse("bad key! = 1\n").is_err());
    }
}
