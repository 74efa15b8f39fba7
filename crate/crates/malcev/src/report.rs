//! Line-oriented report documents with a stable key order.
//!
//! Reports are plain text, one `key: value` pair per line, grouped under
//! `[section]` headers, rendered exactly in insertion order so identical
//! runs produce identical bytes. Every report opens with the tool version;
//! callers are expected to record each effective cap and input before any
//! results.

use std::fmt::Display;

use crate::VERSION;

/// An append-only report document.
#[derive(Debug, Clone)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    /// Starts a report for the named subcommand, stamping the tool version.
    pub fn new(subcommand: &str) -> Report {
        let mut r = Report { lines: Vec::new() };
        r.kv("tool", format_args!("malcev {VERSION}"));
        r.kv("subcommand", subcommand);
        r
    }

    /// Appends one `key: value` line.
    pub fn kv(&mut self, key: &str, value: impl Display) {
        debug_assert!(!key.contains(':'), "report keys must not contain colons");
        self.lines.push(format!("{key}: {value}"));
    }

    /// Appends a section header.
    pub fn section(&mut self, name: &str) {
        self.lines.push(String::new());
        self.lines.push(format!("[{name}]"));
    }

    /// Appends a raw line, for dumps that are not key-value shaped.
    pub fn raw(&mut self, line: impl Display) {
        self.lines.push(line.to_string());
    }

    /// The full document, newline-terminated.
    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Formats a list of numbers as a comma-separated run, for table dumps.
pub fn join_values(values: &[u8]) -> String {
    let mut out = String::with_capacity(values.len() * 2);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&v.to_string());
    }
    out
}
