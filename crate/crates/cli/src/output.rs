use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// JSON to `target`, or to stdout when `target` is `-`.
pub fn emit_json<T: Serialize>(target: &Path, value: &T) -> Result<()> {
    let text = json_text(value)?;
    if target == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        write_atomic(target, text.as_bytes())
    }
}

/// Full-precision, locale-independent number.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated text with a header row.
pub struct Csv {
    buf: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self {
            buf,
            width: header.len(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        debug_assert_eq!(fields.len(), self.width);
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(f.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn numbers(&mut self, xs: &[f64]) {
        debug_assert_eq!(xs.len(), self.width);
        for (k, x) in xs.iter().enumerate() {
            if k > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{x:.16e}");
        }
        self.buf.push('\n');
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.buf.as_bytes())
    }
}
