use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Significant digits kept in every reported number.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub worst_slack: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `worst_slack <= tolerance`.
    pub fn new(name: &str, worst_slack: f64, tolerance: f64) -> Self {
        Self { name: name.into(), pass: worst_slack <= tolerance, worst_slack, tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value) -> Self {
        Self { command: command.into(), inputs, outputs: Value::Null, checks: Vec::new(), artifacts: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let value = round_value(serde_json::to_value(self).expect("report is serializable"));
        serde_json::to_string_pretty(&value).expect("report is serializable") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out += &format!("  {verdict} {} (worst slack {:.4e}, tolerance {:.1e})\n", c.name, c.worst_slack, c.tolerance);
        }
        for a in &self.artifacts {
            out += &format!("  wrote {a}\n");
        }
        out
    }
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every floating-point number in the tree to `DIGITS` significant digits.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map_or(Value::Null, |x| serde_json::json!(round_sig(x))),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Where artifacts go; `None` disables file output.
pub struct Artifacts {
    pub dir: Option<PathBuf>,
    pub svg: bool,
}

impl Artifacts {
    pub fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn svg_path(&self, name: &str) -> Option<PathBuf> {
        if self.svg {
            self.path(name)
        } else {
            None
        }
    }

    pub fn write(&self, report: &mut RunReport, path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, bytes)?;
        report.artifacts.push(path.display().to_string());
        Ok(())
    }
}
