//! Output plumbing: JSON documents under the `privsig/1` schema and the
//! fixed-column CSV emitted by sweeps.
//!
//! Every number leaving the tool is rounded to 12 significant digits
//! first, so identical flags and seed reproduce identical bytes: the JSON
//! and CSV writers both print the shortest decimal that round-trips to
//! the rounded value. JSON cannot spell non-finite numbers, so those
//! (e.g. an infinite critical trade-off weight) render as strings.

use std::fs;
use std::io::Write;
use std::path::Path;

use privsig::mat::Mat;
use privsig::model::{EquilibriumReport, LinearPolicyPair};
use privsig::spectral::SpectralDecomposition;
use privsig::Warning;
use serde_json::{json, Value};

pub const SCHEMA: &str = "privsig/1";
pub const CSV_HEADER: &str =
    "mode,delta,rho,sigma_x2,sigma_y2,p,sigma_w2,levels,mse_x,mse_y,j_e,j_d,b_over_a";

/// Round to 12 significant digits.
pub fn sig12(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.11e}").parse().expect("formatted float reparses")
    } else {
        v
    }
}

/// JSON number carrying 12 significant digits; non-finite values become
/// strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(sig12(v))
    } else {
        Value::String(format!("{v}"))
    }
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

pub fn vec_json(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn mat_json(m: &Mat) -> Value {
    Value::Array((0..m.rows()).map(|r| vec_json(m.row(r))).collect())
}

pub fn spectrum_json(s: &SpectralDecomposition) -> Value {
    json!({
        "lambda": vec_json(&s.lambda),
        "n_pos": s.n_pos,
        "n_neg": s.n_neg,
        "n_zero": s.n_zero,
    })
}

pub fn policy_json(p: &LinearPolicyPair) -> Value {
    json!({
        "f": mat_json(&p.f),
        "d_x": mat_json(&p.d_x),
        "d_y": mat_json(&p.d_y),
    })
}

pub fn report_json(r: &EquilibriumReport) -> Value {
    json!({
        "mse_x": num(r.mse_x),
        "mse_y": num(r.mse_y),
        "j_e": num(r.j_e),
        "j_d": num(r.j_d),
    })
}

pub fn warnings_json(w: &[Warning]) -> Value {
    Value::Array(
        w.iter()
            .map(|w| {
                Value::String(
                    match w {
                        Warning::DecoupledSource => "decoupled-source",
                    }
                    .into(),
                )
            })
            .collect(),
    )
}

/// One sweep row; `None` renders as an empty CSV cell or JSON null.
#[derive(Clone, Debug, Default)]
pub struct SweepRow {
    pub mode: &'static str,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub sigma_x2: Option<f64>,
    pub sigma_y2: Option<f64>,
    pub p: Option<f64>,
    pub sigma_w2: Option<f64>,
    pub levels: Option<usize>,
    pub mse_x: Option<f64>,
    pub mse_y: Option<f64>,
    pub j_e: Option<f64>,
    pub j_d: Option<f64>,
    pub b_over_a: Option<f64>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| sig12(x).to_string()).unwrap_or_default()
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let levels = self.levels.map(|l| l.to_string()).unwrap_or_default();
        [
            self.mode.to_string(),
            cell(self.delta),
            cell(self.rho),
            cell(self.sigma_x2),
            cell(self.sigma_y2),
            cell(self.p),
            cell(self.sigma_w2),
            levels,
            cell(self.mse_x),
            cell(self.mse_y),
            cell(self.j_e),
            cell(self.j_d),
            cell(self.b_over_a),
        ]
        .join(",")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": self.mode,
            "delta": opt_num(self.delta),
            "rho": opt_num(self.rho),
            "sigma_x2": opt_num(self.sigma_x2),
            "sigma_y2": opt_num(self.sigma_y2),
            "p": opt_num(self.p),
            "sigma_w2": opt_num(self.sigma_w2),
            "levels": self.levels.map_or(Value::Null, |l| json!(l)),
            "mse_x": opt_num(self.mse_x),
            "mse_y": opt_num(self.mse_y),
            "j_e": opt_num(self.j_e),
            "j_d": opt_num(self.j_d),
            "b_over_a": opt_num(self.b_over_a),
        })
    }
}

/// Serialize a JSON document (sorted keys, two-space indent, trailing
/// newline) — deterministic for byte-stable outputs.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("valid json tree");
    s.push('\n');
    s
}

/// Write to the `--out` file, or standard output when absent.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| format!("writing standard output: {e}"))
        }
    }
}
