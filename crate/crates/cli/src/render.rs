use std::fmt::Write as _;

use serde_json::Value;

/// Six significant digits; exact zero prints as `0`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=9).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Plain aligned text table.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new(), footer: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn render(&self, styled: bool) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain(std::iter::once(self.headers[c].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = String::new();
        let header = line(&self.headers);
        if styled {
            let _ = writeln!(out, "\x1b[1m{header}\x1b[0m");
        } else {
            let _ = writeln!(out, "{header}");
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
        for f in &self.footer {
            let _ = writeln!(out, "{f}");
        }
        out
    }
}

/// Pretty JSON with sorted keys, so that parsing and re-rendering is a
/// byte-for-byte fixed point.
pub fn json(value: &Value) -> String {
    let normalized: Value = serde_json::from_str(&value.to_string()).expect("valid JSON");
    let mut s = serde_json::to_string_pretty(&normalized).expect("serializable");
    s.push('\n');
    s
}
