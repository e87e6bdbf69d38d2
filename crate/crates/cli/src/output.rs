//! Text and CSV emission.
//!
//! Numbers use the shortest decimal form that parses back to the same `f64`.
//! CSV files start with `#` provenance lines, then a header row; fields are
//! comma-separated with LF line endings.

use std::fmt::Write as _;

use dfm_core::RawParams;

pub const TOOL_VERSION: &str = concat!("dfm ", env!("CARGO_PKG_VERSION"));

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "NA".to_string())
}

pub fn param_echo(raw: &RawParams<f64>) -> String {
    [
        ("beta", raw.beta),
        ("R", raw.dividend),
        ("y_L", raw.y_low),
        ("y_H", raw.y_high),
        ("lambda", raw.lambda),
        ("theta", raw.theta),
        ("mu", raw.mu),
        ("A", raw.asset_supply),
        ("M", raw.money_stock),
    ]
    .iter()
    .map(|(k, v)| format!("{k}={}", num(*v)))
    .collect::<Vec<_>>()
    .join(" ")
}

/// `# dfm x.y.z` and `# key=value ...` lines.
pub fn provenance(raw: &RawParams<f64>, extra: &str) -> String {
    let mut s = format!("# {TOOL_VERSION}\n# {}\n", param_echo(raw));
    if !extra.is_empty() {
        let _ = writeln!(s, "# {extra}");
    }
    s
}

/// `key = value` lines with keys padded to a common width.
#[derive(Debug, Default)]
pub struct Report {
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.rows.push((key.to_string(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, num(value))
    }

    pub fn opt(&mut self, key: &str, value: Option<f64>) -> &mut Self {
        self.text(key, opt_num(value))
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        self.rows.iter().map(|(k, v)| format!("{k:<width$} = {v}\n")).collect()
    }

    /// Header row plus one data row.
    pub fn csv_row(&self) -> String {
        let keys: Vec<&str> = self.rows.iter().map(|(k, _)| k.as_str()).collect();
        let values: Vec<&str> = self.rows.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", keys.join(","), values.join(","))
    }
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}
