//! Report assembly and rendering. A report is an ordered list of keyed
//! values; the machine format prints one `key = value` line per entry in
//! that order, with notes and decimal approximations on `#` comment lines,
//! so downstream tooling can parse it with a line splitter. The text format
//! adds a short description of each quantity.

use arakgraph::{decimal_string, Rat};

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

enum Value {
    Exact(Rat),
    Count(usize),
    Note(String),
}

struct Entry {
    key: String,
    value: Value,
    describes: &'static str,
}

#[derive(Default)]
pub struct Report {
    entries: Vec<Entry>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// An exact rational entry. `describes` is the short definition shown in
    /// the text format.
    pub fn exact(&mut self, key: impl Into<String>, describes: &'static str, value: Rat) {
        self.entries.push(Entry {
            key: key.into(),
            value: Value::Exact(value),
            describes,
        });
    }

    pub fn count(&mut self, key: impl Into<String>, describes: &'static str, value: usize) {
        self.entries.push(Entry {
            key: key.into(),
            value: Value::Count(value),
            describes,
        });
    }

    /// Free-text annotation; rendered as a comment in the machine format.
    pub fn note(&mut self, key: impl Into<String>, text: impl Into<String>) {
        self.entries.push(Entry {
            key: key.into(),
            value: Value::Note(text.into()),
            describes: "",
        });
    }

    pub fn render(&self, format: Format, decimal: Option<usize>) -> String {
        match format {
            Format::Machine => self.render_machine(decimal),
            Format::Text => self.render_text(decimal),
        }
    }

    fn render_machine(&self, decimal: Option<usize>) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            match &entry.value {
                Value::Exact(x) => {
                    out.push_str(&format!("{} = {}\n", entry.key, x));
                    if let Some(digits) = decimal {
                        out.push_str(&format!(
                            "# {} ~ {}\n",
                            entry.key,
                            decimal_string(x, digits)
                        ));
                    }
                }
                Value::Count(n) => out.push_str(&format!("{} = {}\n", entry.key, n)),
                Value::Note(text) => out.push_str(&format!("# {}: {}\n", entry.key, text)),
            }
        }
        out
    }

    fn render_text(&self, decimal: Option<usize>) -> String {
        let key_width = self
            .entries
            .iter()
            .map(|e| e.key.len())
            .max()
            .unwrap_or(0)
            .max(4);
        let rendered: Vec<(String, String)> = self
            .entries
            .iter()
            .map(|entry| match &entry.value {
                Value::Exact(x) => {
                    let mut v = x.to_string();
                    if let Some(digits) = decimal {
                        v.push_str(&format!(" (~ {})", decimal_string(x, digits)));
                    }
                    (v, entry.describes.to_string())
                }
                Value::Count(n) => (n.to_string(), entry.describes.to_string()),
                Value::Note(text) => (text.clone(), String::new()),
            })
            .collect();
        let value_width = rendered.iter().map(|(v, _)| v.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (entry, (value, describes)) in self.entries.iter().zip(&rendered) {
            if describes.is_empty() {
                out.push_str(&format!("{:key_width$}  {}\n", entry.key, value));
            } else {
                out.push_str(&format!(
                    "{:key_width$}  {:value_width$}  {}\n",
                    entry.key, value, describes
                ));
            }
        }
        out
    }
}
