//! Fixed-format CSV blocks.

use std::fmt::Write;

/// 12 significant digits, `-0` printed as `0`.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// Accumulates `# name` headed CSV blocks separated by blank lines.
#[derive(Default)]
pub struct Blocks {
    text: String,
}

impl Blocks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn block(&mut self, name: &str, header: &[String]) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        writeln!(self.text, "# {name}").unwrap();
        writeln!(self.text, "{}", header.join(",")).unwrap();
    }

    pub fn row(&mut self, cells: &[String]) {
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}
