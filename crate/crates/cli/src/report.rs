use std::fmt::Write as _;

use geodecomp::linalg::RatMatrix;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub face: String,
    pub dim: usize,
    pub vanishing_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Totals {
    pub dim: usize,
    pub vanishing_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    pub global_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedMatrix {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major, rationals as `p/q`.
    pub entries: Vec<Vec<String>>,
}

impl NamedMatrix {
    pub fn new(name: impl Into<String>, m: &RatMatrix) -> Self {
        NamedMatrix {
            name: name.into(),
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

/// Everything a command prints. Rendering is deterministic.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Row>,
    /// Header for the last column of the table.
    #[serde(skip)]
    pub block_header: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub totals: Option<Totals>,
    pub facts: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<NamedMatrix>,
    pub status: String,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report {
            command,
            block_header: "block",
            ..Default::default()
        }
    }

    pub fn fact(&mut self, key: &str, value: impl ToString) {
        self.facts.push((key.to_owned(), value.to_string()));
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is serializable");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        if !self.rows.is_empty() {
            let width = self
                .rows
                .iter()
                .map(|r| r.face.chars().count())
                .max()
                .unwrap_or(0)
                .max(5);
            let has_block = self.rows.iter().any(|r| r.block.is_some());
            write!(out, "{:<width$}  {:>6}  {:>6}", "face", "dim F", "dim F°").unwrap();
            if has_block {
                write!(out, "  {:>6}", self.block_header).unwrap();
            }
            out.push('\n');
            for r in &self.rows {
                write!(out, "{:<width$}  {:>6}  {:>6}", r.face, r.dim, r.vanishing_dim).unwrap();
                if let Some(b) = r.block {
                    write!(out, "  {b:>6}").unwrap();
                }
                out.push('\n');
            }
            if let Some(t) = &self.totals {
                write!(out, "{:<width$}  {:>6}  {:>6}", "total", t.dim, t.vanishing_dim).unwrap();
                if let Some(b) = t.block {
                    write!(out, "  {b:>6}").unwrap();
                }
                out.push('\n');
                writeln!(out, "global dimension: {}", t.global_dim).unwrap();
            }
        }
        for (k, v) in &self.facts {
            writeln!(out, "{k}: {v}").unwrap();
        }
        for m in &self.matrices {
            writeln!(out, "{} ({}×{}):", m.name, m.rows, m.cols).unwrap();
            for row in &m.entries {
                writeln!(out, "  [{}]", row.join(", ")).unwrap();
            }
        }
        writeln!(out, "status: {}", self.status).unwrap();
        out
    }
}
