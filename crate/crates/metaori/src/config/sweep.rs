use super::{from_value, Analysis, ConfigError, DesignConfig};
use crate::mechanics::{metashell_fd, predict_elongation, sig9, MechanicsError};
use crate::par::Exec;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub bistable: Option<bool>,
    /// First inflation limit pressure (mbar).
    pub snap_pressure: Option<f64>,
    /// Elongation (%).
    pub elongation: Option<f64>,
    /// Why some entries are missing.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepTable {
    /// JSON pointer of the swept parameter.
    pub path: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,bistable,snap_pressure_mbar,elongation_pct,error\n");
        let num = |x: Option<f64>| x.map(sig9).unwrap_or_default();
        for r in &self.rows {
            let error = r.error.as_deref().map(|e| format!("\"{}\"", e.replace('"', "\"\""))).unwrap_or_default();
            let bistable = r.bistable.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{bistable},{},{},{error}\n",
                sig9(r.value),
                num(r.snap_pressure),
                num(r.elongation)
            ));
        }
        out
    }
}

/// Evaluates bistability, snap pressure and elongation for each value of
/// the numeric parameter at `path` (`metashell.h` or `/metashell/h`).
/// A value that fails only marks its own row.
pub fn run_sweep(cfg: &DesignConfig, path: &str, values: &[f64], exec: Exec) -> Result<SweepTable, ConfigError> {
    let pointer = if path.starts_with('/') { path.to_string() } else { format!("/{}", path.replace('.', "/")) };
    let base = serde_json::to_value(cfg).expect("config serializes");
    let bad = |reason: &str| ConfigError::BadPath { path: path.into(), reason: reason.into() };
    let integral = match base.pointer(&pointer) {
        None => return Err(bad("no such parameter")),
        Some(Value::Number(n)) => n.is_u64(),
        Some(_) => return Err(bad("not a numeric parameter")),
    };
    let rows = exec.map(values, |&v| evaluate(&base, &pointer, integral, v));
    Ok(SweepTable { path: pointer, rows })
}

fn evaluate(base: &Value, pointer: &str, integral: bool, v: f64) -> SweepRow {
    let mut row = SweepRow { value: v, bistable: None, snap_pressure: None, elongation: None, error: None };
    let mut doc = base.clone();
    let number = if integral {
        if !(v >= 0.0 && v.fract() == 0.0) {
            row.error = Some(format!("{v} is not a valid count"));
            return row;
        }
        Value::from(v as u64)
    } else {
        match serde_json::Number::from_f64(v) {
            Some(n) => Value::Number(n),
            None => {
                row.error = Some(format!("{v} is not finite"));
                return row;
            }
        }
    };
    *doc.pointer_mut(pointer).expect("path checked") = number;
    let cfg = match from_value(doc) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let mut errors = Vec::new();
    match metashell_fd(&cfg.metashell, &cfg.material) {
        Ok(c) => row.bistable = Some(!c.stable_zeros().is_empty()),
        Err(e) => errors.push(e.to_string()),
    }
    match predict_elongation(&cfg.metashell, &cfg.material) {
        Ok(e) => row.elongation = Some(e),
        Err(MechanicsError::NotBistable) => {}
        Err(e) => errors.push(e.to_string()),
    }
    match Analysis::run(&cfg) {
        Ok(a) => row.snap_pressure = a.snap_pressure(),
        Err(e) => errors.push(e.to_string()),
    }
    errors.dedup();
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}
