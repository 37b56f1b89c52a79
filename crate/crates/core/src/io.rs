//! Deterministic CSV and JSON rendering.
//!
//! Every float is written as `{:.16e}` (17 significant digits, `.` separator)
//! and every line ends in `\n`, so identical inputs give identical bytes.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::Value;

use crate::bifurcation::{FoldRoots, ScanResult};
use crate::error::Result;
use crate::fock::OperatorMatrix;
use crate::stationary::{EvolutionTrace, KernelBasis, StationarityReport};

pub fn format_f64(x: f64) -> String {
    // -0.0 would otherwise print with a sign
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn write_report_csv<W: Write>(report: &StationarityReport, w: &mut W) -> Result<()> {
    writeln!(w, "n,energy,residual,stationary")?;
    for l in &report.levels {
        writeln!(w, "{},{},{},{}", l.n, format_f64(l.energy), format_f64(l.residual), l.stationary)?;
    }
    Ok(())
}

pub fn write_scan_csv<W: Write>(result: &ScanResult, w: &mut W) -> Result<()> {
    writeln!(w, "index,alpha0,alpha1,alpha2,a,lambda,root_low,root_high,stationary_levels")?;
    for r in &result.records {
        let (low, high) = match r.roots {
            FoldRoots::None => (None, None),
            FoldRoots::Tangency { root } => (Some(root), Some(root)),
            FoldRoots::Pair { low, high } => (Some(low), Some(high)),
        };
        let levels: Vec<String> = r.stationary_levels.iter().map(|n| n.to_string()).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.index,
            format_f64(r.alpha0),
            format_f64(r.alpha1),
            format_f64(r.alpha2),
            opt(r.a),
            opt(r.lambda),
            opt(low),
            opt(high),
            levels.join(";")
        )?;
    }
    Ok(())
}

pub fn write_trace_csv<W: Write>(trace: &EvolutionTrace, w: &mut W) -> Result<()> {
    writeln!(w, "t,trace_drift,hermiticity_drift,min_eigenvalue,residual")?;
    for i in 0..trace.times.len() {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_f64(trace.times[i]),
            format_f64(trace.trace_drift[i]),
            format_f64(trace.hermiticity_drift[i]),
            format_f64(trace.min_eigenvalue[i]),
            format_f64(trace.residual[i])
        )?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(eigenvalues: &[C64], w: &mut W) -> Result<()> {
    writeln!(w, "index,re,im")?;
    for (i, z) in eigenvalues.iter().enumerate() {
        writeln!(w, "{},{},{}", i, format_f64(z.re), format_f64(z.im))?;
    }
    Ok(())
}

/// One row per matrix entry of every kernel element.
pub fn write_kernel_csv<W: Write>(kernel: &KernelBasis, w: &mut W) -> Result<()> {
    writeln!(w, "element,row,col,re,im")?;
    for (k, e) in kernel.elements.iter().enumerate() {
        for i in 0..e.dim() {
            for j in 0..e.dim() {
                let z = e.get(i, j);
                writeln!(w, "{},{},{},{},{}", k, i, j, format_f64(z.re), format_f64(z.im))?;
            }
        }
    }
    Ok(())
}

/// Row-major `[[ [re, im], ... ], ...]`.
pub fn matrix_to_json(m: &OperatorMatrix) -> Value {
    let rows = (0..m.dim())
        .map(|i| Value::Array((0..m.dim()).map(|j| complex_to_json(m.get(i, j))).collect()))
        .collect();
    Value::Array(rows)
}

pub fn complex_to_json(z: C64) -> Value {
    serde_json::json!([z.re, z.im])
}

/// Serializes `value` and renders it with fixed float formatting, sorted
/// object keys, two-space indentation and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    render(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // numeric leaves stay on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    render(x, depth, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(depth + 1, out);
                render(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                render(x, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}
