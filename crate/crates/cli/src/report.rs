use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Top-level shape of every report the tool writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope<R, S> {
    pub tool_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub records: Vec<R>,
    pub summary: S,
    /// Command-specific side tables; only `verify` fills this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<Value>,
    pub generated_at: String,
}

impl<R: Serialize, S: Serialize> ReportEnvelope<R, S> {
    pub fn new(
        command: &str,
        parameters: BTreeMap<String, Value>,
        records: Vec<R>,
        summary: S,
    ) -> Self {
        ReportEnvelope {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            parameters,
            records,
            summary,
            auxiliary: None,
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Plain text table; columns holding only numbers are right-aligned.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let widths: Vec<usize> = (0..cols)
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].len())
                    .chain([self.header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let numeric: Vec<bool> = (0..cols)
            .map(|i| {
                !self.rows.is_empty()
                    && self
                        .rows
                        .iter()
                        .all(|r| r[i].chars().all(|c| c.is_ascii_digit() || "+-".contains(c)))
            })
            .collect();
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let w = widths[i];
                    if numeric[i] {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&self.header);
        line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>());
        for r in &self.rows {
            line(r);
        }
        out
    }
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_columns() {
        let mut t = Table::new(&["p", "verdict"]);
        t.row(vec!["7".into(), "out_of_range".into()]);
        t.row(vec!["113".into(), "confirmed".into()]);
        let text = t.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "  p  verdict");
        assert_eq!(lines[1], "---  ------------");
        assert_eq!(lines[2], "  7  out_of_range");
        assert_eq!(lines[3], "113  confirmed");
    }

    #[test]
    fn envelope_round_trips() {
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), Value::from(7));
        let env = ReportEnvelope::new("demo", params, vec![1u32, 2], BTreeMap::from([("n", 2u32)]));
        let back: ReportEnvelope<u32, BTreeMap<String, u32>> =
            serde_json::from_str(&env.to_json()).unwrap();
        assert_eq!(back.records, env.records);
        assert_eq!(back.summary["n"], 2);
        assert_eq!(back.generated_at, env.generated_at);
    }
}
