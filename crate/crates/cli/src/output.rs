//! Deterministic CSV emission: 9 significant digits, `.` decimal separator,
//! LF line endings, unit-suffixed header row. A sidecar `<out>.meta` file
//! carries provenance (command line and resolved configuration) so the data
//! files themselves stay byte-stable across runs.

use std::fs;
use std::io;
use std::path::Path;

pub struct CsvTable {
    buf: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns, "row width mismatch");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(&format_sig9(*v));
        }
        self.buf.push('\n');
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.buf.as_bytes())
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

/// Nine significant digits in scientific notation.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        // normalize the sign of zero so output never depends on -0.0
        return String::from("0.00000000e0");
    }
    format!("{:.8e}", v)
}

/// Write the provenance sidecar next to the data file.
pub fn write_sidecar(
    out_path: &Path,
    command: &str,
    config_entries: &[(String, String)],
    notes: &[String],
) -> io::Result<()> {
    let mut buf = String::new();
    buf.push_str(&format!(
        "tool = metawave {}\ncommand = {}\n",
        env!("CARGO_PKG_VERSION"),
        command
    ));
    for (k, v) in config_entries {
        buf.push_str(&format!("{k} = {v}\n"));
    }
    for n in notes {
        buf.push_str(&format!("note: {n}\n"));
    }
    let mut meta = out_path.as_os_str().to_owned();
    meta.push(".meta");
    fs::write(meta, buf.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.028111799064233493), "2.81117991e-2");
        assert_eq!(format_sig9(-1.1128812094e-24), "-1.11288121e-24");
        assert_eq!(format_sig9(20.0), "2.00000000e1");
        assert_eq!(format_sig9(0.0), "0.00000000e0");
        assert_eq!(format_sig9(-0.0), "0.00000000e0");
    }

    #[test]
    fn lf_only() {
        let mut t = CsvTable::new(&["a_m", "b_s"]);
        t.row(&[1.0, 2.0]);
        assert!(!t.as_str().contains('\r'));
        assert_eq!(t.as_str(), "a_m,b_s\n1.00000000e0,2.00000000e0\n");
    }
}
