//! Atomic file output, CSV tables and plain PGM images.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::CliResult;

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
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

/// Several outputs that are written together after the run has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(std::path::PathBuf, Vec<u8>)>,
    stdout: String,
    notes: String,
}

impl Outputs {
    /// `contents` to `path`, or to stdout when `path` is `None`.
    pub fn emit(&mut self, path: Option<&Path>, contents: impl Into<Vec<u8>>) {
        let contents = contents.into();
        match path {
            Some(p) => self.files.push((p.to_path_buf(), contents)),
            None => self.stdout.push_str(&String::from_utf8_lossy(&contents)),
        }
    }

    /// A summary line: stdout, or stderr when stdout carries data.
    pub fn say(&mut self, line: impl AsRef<str>) {
        self.notes.push_str(line.as_ref());
        self.notes.push('\n');
    }

    pub fn flush(self) -> CliResult<()> {
        for (path, contents) in &self.files {
            write_atomic(path, contents)?;
        }
        let mut out = std::io::stdout().lock();
        out.write_all(self.stdout.as_bytes())?;
        if self.stdout.is_empty() {
            out.write_all(self.notes.as_bytes())?;
        } else {
            std::io::stderr().write_all(self.notes.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }
}

/// CSV with a header row and LF endings. Fields are written verbatim.
#[derive(Debug)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "CSV row width");
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Plain (P2) grayscale image with maximum value 255, one text row per
/// image row.
pub fn pgm(width: usize, height: usize, pixels: &[u8]) -> String {
    assert_eq!(pixels.len(), width * height);
    let mut s = format!("P2\n{width} {height}\n255\n");
    for row in pixels.chunks(width.max(1)) {
        let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

/// `round(255 * value / max)`, zero when `max` is zero.
pub fn scale_to_byte(value: f64, max: f64) -> u8 {
    if max <= 0.0 {
        0
    } else {
        (255.0 * value / max).round().clamp(0.0, 255.0) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_layout() {
        assert_eq!(pgm(3, 2, &[0, 1, 2, 255, 4, 5]), "P2\n3 2\n255\n0 1 2\n255 4 5\n");
        assert_eq!(scale_to_byte(1.0, 2.0), 128);
        assert_eq!(scale_to_byte(3.0, 0.0), 0);
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(&["1".into(), 0.1f64.to_string()]);
        assert_eq!(c.into_string(), "a,b\n1,0.1\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
