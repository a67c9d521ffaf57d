//! Named verification checks and deterministic JSON emission.
//!
//! Reports are golden-file friendly: object keys appear in insertion order
//! and every float is printed as a fixed 15-significant-digit decimal, so
//! identical inputs produce byte-identical documents.

use std::fmt::Write as _;

/// One named verification check. `pass` holds iff `residual <= tol`.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check { name: name.into(), residual, tol, pass: residual <= tol }
    }

    /// Boolean check: residual 0 when it holds, 1 when it does not.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// A JSON value with deterministic serialization.
#[derive(Clone, Debug)]
pub enum Json {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> Json {
        Json::Object(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: Json) -> &mut Self {
        match self {
            Json::Object(fields) => fields.push((key.to_string(), value)),
            _ => panic!("push on a non-object Json value"),
        }
        self
    }

    pub fn to_string_pretty(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Int(k) => {
                let _ = write!(out, "{k}");
            }
            Json::Float(x) => {
                out.push_str(&format_f64(*x));
            }
            Json::Str(s) => write_json_string(out, s),
            Json::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Object(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_json_string(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Fixed 15-significant-digit decimal, locale-independent.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // Fold -0.0 into 0.0 so output does not depend on the sign of a
        // vanished term.
        return "0.0".to_string();
    }
    format!("{:.14e}", x)
}

impl From<&[Check]> for Json {
    fn from(checks: &[Check]) -> Json {
        Json::Array(
            checks
                .iter()
                .map(|c| {
                    let mut o = Json::object();
                    o.push("name", Json::Str(c.name.clone()))
                        .push("pass", Json::Bool(c.pass))
                        .push("residual", Json::Float(c.residual))
                        .push("tol", Json::Float(c.tol));
                    o
                })
                .collect(),
        )
    }
}

use num_complex::Complex64;

use crate::duration::Duration;
use crate::encoding::{Classification, GateReport};
use crate::operator::CMat;
use crate::rewrite::{ComparisonReport, SequenceStats};
use crate::synthesis::DerivationReport;

fn duration_str(t: Duration) -> Json {
    Json::Str(t.to_string())
}

/// Row-major array of {re, im} entries.
pub fn matrix_json(m: &CMat) -> Json {
    let mut rows = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let mut o = Json::object();
            o.push("re", Json::Float(m[(r, c)].re)).push("im", Json::Float(m[(r, c)].im));
            rows.push(o);
        }
    }
    Json::Array(rows)
}

pub fn stats_json(s: &SequenceStats) -> Json {
    let mut o = Json::object();
    o.push("swap", Json::Int(s.n_swap as i64))
        .push("sqrt", Json::Int(s.n_sqrt as i64))
        .push("invsqrt", Json::Int(s.n_invsqrt as i64))
        .push("nontrivial", Json::Int(s.n_nontrivial as i64))
        .push("parity", Json::Str(s.parity.to_string()));
    o
}

pub fn gate_json(g: &GateReport) -> Json {
    let mut o = Json::object();
    o.push("matrix", matrix_json(&g.gate4)).push("leakage", Json::Float(g.leakage));
    let (g1, g2) = g.makhlin.unwrap_or((Complex64::new(f64::NAN, f64::NAN), f64::NAN));
    if g.makhlin.is_some() {
        o.push("G1_re", Json::Float(g1.re))
            .push("G1_im", Json::Float(g1.im))
            .push("G2", Json::Float(g2));
    }
    match &g.classification {
        Classification::IdentityLike { phase } => {
            o.push("classification", Json::Str("identity-like".into()))
                .push("phase_re", Json::Float(phase.re))
                .push("phase_im", Json::Float(phase.im));
        }
        Classification::ControlledNSigma { nhat, .. } => {
            o.push("classification", Json::Str("controlled-nsigma".into())).push(
                "nhat",
                Json::Array(nhat.iter().map(|&x| Json::Float(x)).collect()),
            );
        }
        Classification::Other { reason } => {
            o.push("classification", Json::Str("other".into()))
                .push("reason", Json::Str(reason.clone()));
        }
    }
    o
}

/// The structured report for `derive`: coefficients, solutions, stats,
/// gate, and the named checks.
pub fn derivation_json(r: &DerivationReport) -> Json {
    let mut coeffs = Json::object();
    coeffs
        .push("alpha_re", Json::Float(r.coefficients.alpha.re))
        .push("alpha_im", Json::Float(r.coefficients.alpha.im))
        .push("beta_re", Json::Float(r.coefficients.beta.re))
        .push("beta_im", Json::Float(r.coefficients.beta.im))
        .push("gamma_re", Json::Float(r.coefficients.gamma.re))
        .push("gamma_im", Json::Float(r.coefficients.gamma.im))
        .push("delta_re", Json::Float(r.coefficients.delta.re))
        .push("delta_im", Json::Float(r.coefficients.delta.im))
        .push("F", Json::Float(r.coefficients.f));

    let solutions = Json::Array(
        r.solutions
            .iter()
            .map(|s| Json::Array(vec![duration_str(s.t1), duration_str(s.t2)]))
            .collect(),
    );

    let mut doc = Json::object();
    doc.push("coefficients", coeffs)
        .push("solutions", solutions)
        .push("chosen", Json::Array(vec![duration_str(r.chosen.t1), duration_str(r.chosen.t2)]))
        .push("stats", stats_json(&r.stats))
        .push("gate", gate_json(&r.gate))
        .push("checks", Json::from(r.checks.as_slice()));
    doc
}

pub fn comparison_json(c: &ComparisonReport) -> Json {
    let mut doc = Json::object();
    doc.push("phase_equal", Json::Bool(c.phase_equal));
    if let Some(phase) = c.phase {
        doc.push("phase_re", Json::Float(phase.re)).push("phase_im", Json::Float(phase.im));
    }
    doc.push("stats_a", stats_json(&c.stats_a))
        .push("stats_b", stats_json(&c.stats_b))
        .push("parity_differs", Json::Bool(c.parity_differs));
    if let Some(gate) = &c.gate {
        let mut g = Json::object();
        g.push("leakage_a", Json::Float(gate.leakage_a))
            .push("leakage_b", Json::Float(gate.leakage_b));
        if let Some((g1, g2)) = gate.makhlin_a {
            g.push("G1_a_re", Json::Float(g1.re))
                .push("G1_a_im", Json::Float(g1.im))
                .push("G2_a", Json::Float(g2));
        }
        if let Some((g1, g2)) = gate.makhlin_b {
            g.push("G1_b_re", Json::Float(g1.re))
                .push("G1_b_im", Json::Float(g1.im))
                .push("G2_b", Json::Float(g2));
        }
        if let Some(agree) = gate.makhlin_agree {
            g.push("makhlin_agree", Json::Bool(agree));
        }
        doc.push("gate", g);
    }
    doc.push("equivalent", Json::Bool(c.equivalent()));
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_fixed_width() {
        assert_eq!(format_f64(0.0), "0.0");
        assert_eq!(format_f64(-0.0), "0.0");
        assert_eq!(format_f64(1.0), "1.00000000000000e0");
        assert_eq!(format_f64(-0.5), "-5.00000000000000e-1");
        let f = 1.0 / 3.0_f64.sqrt();
        assert_eq!(format_f64(f), "5.77350269189626e-1");
    }

    #[test]
    fn emitted_json_parses_and_is_deterministic() {
        let mut doc = Json::object();
        doc.push("name", Json::Str("demo \"quoted\"".into()))
            .push("values", Json::Array(vec![Json::Float(0.5), Json::Int(3), Json::Bool(true)]))
            .push("empty", Json::Array(vec![]))
            .push("nested", {
                let mut o = Json::object();
                o.push("x", Json::Float(1e-12));
                o
            });
        let a = doc.to_string_pretty();
        let b = doc.to_string_pretty();
        assert_eq!(a, b);
        let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["values"][0], serde_json::json!(0.5));
        assert_eq!(parsed["nested"]["x"], serde_json::json!(1e-12));
    }

    #[test]
    fn check_semantics() {
        let c = Check::new("x", 1e-12, 1e-10);
        assert!(c.pass);
        let c = Check::new("x", 1e-9, 1e-10);
        assert!(!c.pass);
        assert!(Check::flag("y", true).pass);
        assert!(!Check::flag("y", false).pass);
    }
}
