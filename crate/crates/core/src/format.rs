//! Output helpers: 12-significant-digit floats, CSV, atomic file writes.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// `v` rounded to 12 significant digits.
pub fn round_sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Shortest decimal that round-trips `round_sig12(v)`; exponent notation
/// outside `[1e-5, 1e15)`.
pub fn fmt_sig12(v: f64) -> String {
    let r = round_sig12(v);
    if r == 0.0 || !r.is_finite() || (1e-5..1e15).contains(&r.abs()) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

fn round_value(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

/// CSV text from a header and rows of already-formatted cells.
pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `contents` to a temporary file next to `path`, then renames it into
/// place, so a failed run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_sig12(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig12(1e-300), "1e-300");
        assert_eq!(fmt_sig12(-2.5), "-2.5");
        assert_eq!(fmt_sig12(0.0), "0");
    }

    #[test]
    fn json_floats_are_rounded() {
        let text = to_json(&serde_json::json!({"x": 0.1 + 0.2, "n": 3, "v": [1.0 / 3.0]})).unwrap();
        assert!(text.contains("0.3,") || text.contains("0.3\n"));
        assert!(text.contains("0.333333333333"));
        assert!(!text.contains("0.3333333333333"));
    }

    #[test]
    fn csv_and_atomic_write() {
        let text = to_csv(&["a", "b"], vec![vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(text, "a,b\n1,\"x,y\"\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, text.as_bytes()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
