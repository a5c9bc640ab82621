//! JSON design documents, named presets and parameter sweeps.
//!
//! A document carries `schema: 1` and the four parameter groups. Lengths
//! are millimetres; angles are degrees and carry a `_deg` suffix. A
//! document may instead name a `preset`, in which case its remaining keys
//! override the preset's values.

mod analysis;
mod schema;
mod sweep;

pub use analysis::Analysis;
pub use schema::schema;
pub use sweep::{run_sweep, SweepRow, SweepTable};

use crate::integrate::IntegrationParams;
use crate::kresling::{Chirality, KreslingParams};
use crate::mechanics::{MaterialParams, SegmentSpec};
use crate::metashell::MetashellParams;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("unit error at {pointer}: {message}")]
    Unit { pointer: String, message: String },
    #[error("invariant violated at {pointer}: {message}")]
    Invariant { pointer: String, message: String },
    #[error("bad sweep path {path}: {reason}")]
    BadPath { path: String, reason: String },
}

impl ConfigError {
    fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Schema { pointer: pointer.into(), message: message.into() }
    }

    fn invariant(pointer: &str, err: impl std::fmt::Display) -> Self {
        ConfigError::Invariant { pointer: pointer.into(), message: err.to_string() }
    }
}

/// Kresling pattern as written in documents, with angles in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KreslingConfig {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub theta_deg: f64,
    pub alpha_deg: f64,
    pub t_face: f64,
    pub levels: usize,
    #[serde(default)]
    pub chirality: Chirality,
}

impl KreslingConfig {
    pub fn params(&self) -> KreslingParams {
        KreslingParams {
            n: self.n,
            a: self.a,
            b: self.b,
            theta: self.theta_deg.to_radians(),
            alpha: self.alpha_deg.to_radians(),
            t_face: self.t_face,
            levels: self.levels,
            chirality: self.chirality,
        }
    }
}

impl From<&KreslingParams> for KreslingConfig {
    fn from(p: &KreslingParams) -> Self {
        KreslingConfig {
            n: p.n,
            a: p.a,
            b: p.b,
            theta_deg: p.theta.to_degrees(),
            alpha_deg: p.alpha.to_degrees(),
            t_face: p.t_face,
            levels: p.levels,
            chirality: p.chirality,
        }
    }
}

/// One independently inflating segment: a single shell row with its
/// infill and the origami levels inside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub infill: f64,
    pub levels: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub schema: u32,
    pub kresling: KreslingConfig,
    pub metashell: MetashellParams,
    #[serde(default)]
    pub material: MaterialParams,
    #[serde(default)]
    pub integration: IntegrationParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentConfig>>,
}

impl DesignConfig {
    pub fn kresling_params(&self) -> KreslingParams {
        self.kresling.params()
    }

    /// Segments for the sequence simulator: the explicit list when given,
    /// otherwise one per shell row.
    pub fn segment_specs(&self) -> Result<Vec<SegmentSpec>, ConfigError> {
        let origami = self.kresling_params();
        match &self.segments {
            Some(list) => Ok(list
                .iter()
                .map(|s| SegmentSpec {
                    shell: MetashellParams { rows: 1, infill_per_row: vec![s.infill], ..self.metashell.clone() },
                    origami: KreslingParams { levels: s.levels, ..origami.clone() },
                    infill: s.infill,
                })
                .collect()),
            None => crate::mechanics::segments_of(&self.metashell, &origami)
                .map_err(|e| ConfigError::invariant("/kresling/levels", e)),
        }
    }

    /// Checks every parameter group, naming the first offending one.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ConfigError::schema("/schema", format!("unsupported schema version {}", self.schema)));
        }
        self.kresling_params().validate().map_err(|e| ConfigError::invariant("/kresling", e))?;
        self.metashell.validate().map_err(|e| ConfigError::invariant("/metashell", e))?;
        self.material.validate().map_err(|e| ConfigError::invariant("/material", e))?;
        self.integration.validate().map_err(|e| ConfigError::invariant("/integration", e))?;
        if let Some(list) = &self.segments {
            if list.is_empty() {
                return Err(ConfigError::invariant("/segments", "at least one segment is required"));
            }
            for (i, s) in list.iter().enumerate() {
                if !(s.infill > 0.0 && s.infill <= 1.0) {
                    return Err(ConfigError::invariant(
                        &format!("/segments/{i}/infill"),
                        format!("infill {} is outside (0, 1]", s.infill),
                    ));
                }
                if s.levels < 1 {
                    return Err(ConfigError::invariant(&format!("/segments/{i}/levels"), "levels must be at least 1"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Named presets, in listing order.
pub const PRESETS: [&str; 2] = ["paper", "paper-bisegment"];

/// The reference single-segment actuator, or its two-row sequencing
/// variant with 99% infill in the bottom row and 60% in the top row.
pub fn preset(name: &str) -> Option<DesignConfig> {
    let (shell, origami) = match name {
        "paper" => (
            MetashellParams::paper(),
            KreslingParams::design(6, 15.0, 19.25, 20f64.to_radians(), 1.0, 1).expect("preset origami"),
        ),
        "paper-bisegment" => (
            MetashellParams { rows: 2, infill_per_row: vec![0.99, 0.60], ..MetashellParams::paper() },
            KreslingParams::design(6, 15.0, 14.625, 30f64.to_radians(), 1.0, 2).expect("preset origami"),
        ),
        _ => return None,
    };
    Some(DesignConfig {
        schema: SCHEMA_VERSION,
        kresling: KreslingConfig::from(&origami),
        metashell: shell,
        material: MaterialParams::default(),
        integration: IntegrationParams::default(),
        segments: None,
    })
}

/// Parses and validates a design document.
pub fn parse_config(text: &str) -> Result<DesignConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_value(value)
}

/// Like [`parse_config`], starting from a JSON value.
pub fn from_value(mut value: Value) -> Result<DesignConfig, ConfigError> {
    let Some(obj) = value.as_object_mut() else {
        return Err(ConfigError::schema("", "a design document must be a JSON object"));
    };
    if let Some(name) = obj.remove("preset") {
        let Some(name) = name.as_str() else {
            return Err(ConfigError::schema("/preset", "preset must be a string"));
        };
        let Some(base) = preset(name) else {
            return Err(ConfigError::schema(
                "/preset",
                format!("unknown preset {name:?}; known: {}", PRESETS.join(", ")),
            ));
        };
        let mut merged = serde_json::to_value(base).expect("preset serializes");
        merge(&mut merged, value);
        value = merged;
    } else if !obj.contains_key("schema") {
        return Err(ConfigError::schema("/schema", "missing schema version"));
    }
    check_units(&value)?;
    let cfg: DesignConfig = serde_path_to_error::deserialize(&value).map_err(|e| {
        let pointer = pointer_of(e.path());
        ConfigError::Schema { pointer, message: e.into_inner().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", escape(variant))),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// Catches angles written without the degree suffix.
fn check_units(value: &Value) -> Result<(), ConfigError> {
    if let Some(k) = value.get("kresling").and_then(Value::as_object) {
        for key in ["theta", "alpha"] {
            if k.contains_key(key) {
                return Err(ConfigError::Unit {
                    pointer: format!("/kresling/{key}"),
                    message: format!("angles are given in degrees as {key}_deg"),
                });
            }
        }
    }
    Ok(())
}
