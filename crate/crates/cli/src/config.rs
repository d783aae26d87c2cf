//! Experiment configuration: a flat key-value file with section headers.
//!
//! ```text
//! [base]
//! matrix = 2 1 1 1
//!
//! [roof]
//! cos 0 0 1
//! cos 1 0 0.1
//!
//! [params]
//! n_lo = 10
//! ```
//!
//! `[base]` and `[params]` hold `key = value` pairs. The field sections
//! (`roof`, `roof2`, `weight`, `weight2`, `test`) hold one term per line in the
//! field text format; weights may use `spow d` lines.

use std::collections::BTreeMap;

use rigidlab::toral::IntMatrix;
use rigidlab::{Field64, Weight64};
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const FIELD_SECTIONS: [&str; 5] = ["roof", "roof2", "weight", "weight2", "test"];

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

/// A parsed but not yet resolved config file.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    base: BTreeMap<String, Entry>,
    params: BTreeMap<String, Entry>,
    fields: BTreeMap<String, Vec<(usize, String)>>,
}

fn err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Config {
        line,
        message: message.into(),
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim().to_string();
                if name != "base" && name != "params" && !FIELD_SECTIONS.contains(&name.as_str()) {
                    return Err(err(line, format!("unknown section [{name}]")));
                }
                if FIELD_SECTIONS.contains(&name.as_str()) {
                    if cfg.fields.contains_key(&name) {
                        return Err(err(line, format!("duplicate section [{name}]")));
                    }
                    cfg.fields.insert(name.clone(), Vec::new());
                }
                section = Some(name);
                continue;
            }
            let Some(sec) = section.as_deref() else {
                return Err(err(line, "entry outside of any section"));
            };
            if FIELD_SECTIONS.contains(&sec) {
                cfg.fields
                    .get_mut(sec)
                    .expect("section registered")
                    .push((line, body.to_string()));
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(err(line, format!("expected `key = value`, found `{body}`")));
            };
            let key = key.trim().to_string();
            let table = if sec == "base" { &mut cfg.base } else { &mut cfg.params };
            if table.contains_key(&key) {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
            table.insert(
                key,
                Entry {
                    line,
                    value: value.trim().to_string(),
                },
            );
        }
        for (key, e) in &cfg.base {
            if key != "matrix" {
                return Err(err(e.line, format!("unknown key `{key}` in [base]")));
            }
        }
        Ok(cfg)
    }
}

/// Which field sections a command reads, with their defaults.
#[derive(Debug, Clone, Copy)]
pub struct FieldSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub weight: bool,
}

/// Parameter keys a command accepts, with the default written as text.
pub type ParamSpec = &'static [(&'static str, &'static str)];

/// A config resolved against a command: every accepted key has a value.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: String,
    pub matrix: IntMatrix,
    fields: BTreeMap<&'static str, (Option<Field64>, Option<Weight64>, String)>,
    params: Vec<(&'static str, usize, String)>,
}

fn parse_matrix(line: usize, s: &str) -> Result<IntMatrix, CliError> {
    let v: Vec<i64> = s
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, format!("bad matrix entry `{t}`"))))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(err(line, format!("matrix needs 4 entries, found {}", v.len())));
    }
    Ok([[v[0], v[1]], [v[2], v[3]]])
}

fn parse_field(lines: &[(usize, String)]) -> Result<Field64, CliError> {
    let mut f = Field64::zero();
    for (line, text) in lines {
        let m = Field64::parse_term(text).map_err(|m| err(*line, m))?;
        f.add_mode(m.k, m.cos_amp, m.sin_amp);
    }
    Ok(f)
}

fn parse_weight(lines: &[(usize, String)]) -> Result<Weight64, CliError> {
    let mut w = Weight64::zero();
    let mut d = 0u32;
    for (line, text) in lines {
        if let Some(rest) = text.strip_prefix("spow") {
            d = rest
                .trim()
                .parse()
                .map_err(|_| err(*line, format!("bad fiber power in `{text}`")))?;
            continue;
        }
        let m = Field64::parse_term(text).map_err(|m| err(*line, m))?;
        w = w.add(&Weight64::monomial(Field64::from_modes([m]), d));
    }
    Ok(w)
}

fn default_lines(text: &str) -> Vec<(usize, String)> {
    text.lines().map(|l| (0, l.trim().to_string())).filter(|(_, l)| !l.is_empty()).collect()
}

impl Resolved {
    pub fn resolve(
        command: &str,
        raw: &RawConfig,
        fields: &[FieldSpec],
        params: ParamSpec,
    ) -> Result<Self, CliError> {
        let matrix = match raw.base.get("matrix") {
            Some(e) => parse_matrix(e.line, &e.value)?,
            None => [[2, 1], [1, 1]],
        };
        for (name, lines) in &raw.fields {
            if !fields.iter().any(|f| f.name == name) {
                let line = lines.first().map_or(0, |l| l.0);
                return Err(err(line, format!("section [{name}] is not used by `{command}`")));
            }
        }
        let mut resolved_fields = BTreeMap::new();
        for spec in fields {
            let lines = raw
                .fields
                .get(spec.name)
                .cloned()
                .unwrap_or_else(|| default_lines(spec.default));
            let entry = if spec.weight {
                let w = parse_weight(&lines)?;
                let text = w.to_text();
                (None, Some(w), text)
            } else {
                let f = parse_field(&lines)?;
                let text = f.to_text();
                (Some(f), None, text)
            };
            resolved_fields.insert(spec.name, entry);
        }
        for (key, e) in &raw.params {
            if !params.iter().any(|(k, _)| k == key) {
                return Err(err(e.line, format!("unknown key `{key}` for `{command}`")));
            }
        }
        let params = params
            .iter()
            .map(|(k, default)| match raw.params.get(*k) {
                Some(e) => (*k, e.line, e.value.clone()),
                None => (*k, 0, default.to_string()),
            })
            .collect();
        Ok(Self {
            command: command.to_string(),
            matrix,
            fields: resolved_fields,
            params,
        })
    }

    pub fn field(&self, name: &str) -> Field64 {
        self.fields[name].0.clone().expect("scalar field section")
    }

    pub fn weight(&self, name: &str) -> Weight64 {
        self.fields[name].1.clone().expect("weight section")
    }

    fn entry(&self, key: &str) -> (usize, &str) {
        let (_, line, v) = self
            .params
            .iter()
            .find(|(k, _, _)| *k == key)
            .unwrap_or_else(|| panic!("parameter `{key}` not declared"));
        (*line, v.as_str())
    }

    pub fn string(&self, key: &str) -> String {
        self.entry(key).1.to_string()
    }

    /// Line number of a key in the file (0 for defaults), for error messages.
    pub fn line(&self, key: &str) -> usize {
        self.entry(key).0
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let (line, v) = self.entry(key);
        v.parse()
            .map_err(|_| err(line, format!("`{key}` must be a nonnegative integer, found `{v}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let (line, v) = self.entry(key);
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(err(line, format!("`{key}` must be a finite number, found `{v}`"))),
        }
    }

    pub fn positive(&self, key: &str) -> Result<f64, CliError> {
        let x = self.f64(key)?;
        if x <= 0.0 {
            return Err(err(self.line(key), format!("`{key}` must be positive, found {x}")));
        }
        Ok(x)
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        let (line, v) = self.entry(key);
        match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(err(line, format!("`{key}` must be true or false, found `{v}`"))),
        }
    }

    pub fn ints(&self, key: &str) -> Result<Vec<i64>, CliError> {
        let (line, v) = self.entry(key);
        v.split_whitespace()
            .map(|t| t.parse().map_err(|_| err(line, format!("bad integer `{t}` in `{key}`"))))
            .collect()
    }

    /// Replaces a parameter by its resolved value (e.g. an `auto` default).
    pub fn set(&mut self, key: &str, value: String) {
        if let Some(p) = self.params.iter_mut().find(|(k, _, _)| *k == key) {
            p.2 = value;
        }
    }

    /// The fully resolved config, for the JSON summaries.
    pub fn echo(&self) -> Value {
        let mut fields = Map::new();
        for (name, (_, _, text)) in &self.fields {
            fields.insert(name.to_string(), Value::String(text.clone()));
        }
        let mut params = Map::new();
        for (k, _, v) in &self.params {
            params.insert(k.to_string(), Value::String(v.clone()));
        }
        json!({
            "command": self.command,
            "matrix": self.matrix,
            "fields": fields,
            "params": params,
        })
    }
}
