//! File formats: `t,re,im` profile CSV and fixed-precision JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;
use sl2h::{RadialProfile, RadialRule, TypePair};

use crate::error::CliError;

/// Write `value` with every float at 17 significant digits and keys sorted.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // Short arrays of scalars stay on one line, e.g. [re, im].
            if items.len() <= 4 && items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, v, depth);
                }
                out.push(']');
                return;
            }
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, v, depth + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// 17 significant digits in exponent form; non-finite values become strings.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".into()
    } else if x.is_infinite() {
        if x > 0.0 { "\"inf\"" } else { "\"-inf\"" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Finite floats pass through; infinities and NaN become the strings
/// `"inf"`, `"-inf"`, `"nan"` (serde_json cannot hold them as numbers).
pub fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| {
        Value::String(if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        })
    })
}

pub fn write_json(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    write_text(path, &to_json_string(value))
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// `t,re,im` with a header line.
pub fn samples_to_csv<'a>(rows: impl IntoIterator<Item = (f64, &'a Complex64)>) -> String {
    let mut out = String::from("t,re,im\n");
    for (t, v) in rows {
        let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e}", v.re, v.im);
    }
    out
}

pub fn profile_to_csv(f: &RadialProfile) -> String {
    samples_to_csv(f.nodes().iter().copied().zip(f.values()))
}

/// To `path`, or stdout when absent.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `lo:hi:count` (inclusive, uniform) or a CSV file whose first column is `t`.
pub fn read_t_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if let [lo, hi, count] = parts[..] {
        if let (Ok(lo), Ok(hi), Ok(count)) = (lo.parse::<f64>(), hi.parse::<f64>(), count.parse::<usize>()) {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo && count >= 1) {
                return Err(CliError::Usage(format!(
                    "t-grid '{spec}' needs 0 <= lo <= hi and count >= 1"
                )));
            }
            if count == 1 {
                return Ok(vec![lo]);
            }
            return Ok((0..count)
                .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                .collect());
        }
    }
    let path = Path::new(spec);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| {
            CliError::Usage(format!(
                "t-grid '{spec}' is neither lo:hi:count nor a readable CSV: {e}"
            ))
        })?;
    let mut ts = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        let field = rec.get(0).unwrap_or("");
        match field.parse::<f64>() {
            Ok(t) if t.is_finite() && t >= 0.0 => ts.push(t),
            Err(_) if i == 0 => continue,
            _ => return Err(CliError::Usage(format!("{spec}: line {} has no valid t >= 0", i + 1))),
        }
    }
    if ts.is_empty() {
        return Err(CliError::Usage(format!("{spec}: no evaluation points")));
    }
    Ok(ts)
}

/// Raw `(t, value)` samples; the header is optional.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, Complex64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if i == 0 && rec.get(0).is_some_and(|s| s.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() != 3 {
            return Err(CliError::Usage(format!(
                "{}: line {} needs t,re,im",
                path.display(),
                i + 1
            )));
        }
        let num = |k: usize| -> Result<f64, CliError> {
            rec[k].parse::<f64>().map_err(|_| {
                CliError::Usage(format!(
                    "{}: bad number '{}' on line {}",
                    path.display(),
                    &rec[k],
                    i + 1
                ))
            })
        };
        rows.push((num(0)?, Complex64::new(num(1)?, num(2)?)));
    }
    if rows.len() < 4 {
        return Err(CliError::Usage(format!(
            "{}: need at least four samples",
            path.display()
        )));
    }
    if rows[0].0 < 0.0 || rows.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(CliError::Usage(format!(
            "{}: t must be non-negative and strictly increasing",
            path.display()
        )));
    }
    Ok(rows)
}

/// Read a profile written by this tool, keeping its rule when the nodes are
/// those of a unit-panel Gauss–Legendre rule. Other samplings are
/// interpolated (cubic) onto `fallback`; samples must then cover the
/// fallback range except where the function has already decayed to zero.
pub fn read_profile(path: &Path, pair: TypePair, fallback: &RadialRule) -> Result<RadialProfile, CliError> {
    let rows = read_samples(path)?;
    if let Some(rule) = detect_rule(&rows) {
        let values = rows.iter().map(|r| r.1).collect();
        return Ok(RadialProfile::new(pair, rule, values, None)?);
    }
    let values = resample(&rows, fallback.nodes(), path)?;
    Ok(RadialProfile::new(pair, fallback.clone(), values, None)?)
}

fn detect_rule(rows: &[(f64, Complex64)]) -> Option<RadialRule> {
    let last = rows.last()?.0;
    let panels = last.ceil().max(1.0) as usize;
    if !rows.len().is_multiple_of(panels) {
        return None;
    }
    let rule = RadialRule::uniform(0.0, panels as f64, 1.0, rows.len() / panels).ok()?;
    let matches = rule
        .nodes()
        .iter()
        .zip(rows)
        .all(|(a, r)| (a - r.0).abs() <= 1e-12 * (1.0 + a.abs()));
    matches.then_some(rule)
}

fn resample(rows: &[(f64, Complex64)], nodes: &[f64], path: &Path) -> Result<Vec<Complex64>, CliError> {
    let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let scale = rows.iter().map(|r| r.1.norm()).fold(0.0, f64::max);
    let negligible = |v: Complex64| v.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE);
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    nodes
        .iter()
        .map(|&t| {
            if t < first.0 || t > last.0 {
                let edge = if t < first.0 { first.1 } else { last.1 };
                return if negligible(edge) {
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    Err(CliError::Usage(format!(
                        "{}: samples cover [{}, {}] but the grid needs t = {t}",
                        path.display(),
                        first.0,
                        last.0
                    )))
                };
            }
            let n = ts.len();
            let idx = ts.partition_point(|&x| x < t);
            let start = idx.saturating_sub(2).min(n - 4);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in start..start + 4 {
                let mut w = 1.0;
                for k in start..start + 4 {
                    if k != j {
                        w *= (t - ts[k]) / (ts[j] - ts[k]);
                    }
                }
                acc += rows[j].1 * w;
            }
            Ok(acc)
        })
        .collect()
}
