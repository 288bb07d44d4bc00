//! Pass/fail report types shared by the law and axiom checkers and the CLI.

use serde::Serialize;

/// Outcome of a single named law or axiom.
#[derive(Debug, Clone, Serialize)]
pub struct LawEntry {
    pub law: String,
    pub pass: bool,
    /// First counterexample found, rendered for humans; `None` when passing.
    pub witness: Option<String>,
}

impl LawEntry {
    pub fn pass(law: impl Into<String>) -> Self {
        LawEntry { law: law.into(), pass: true, witness: None }
    }

    pub fn fail(law: impl Into<String>, witness: impl Into<String>) -> Self {
        LawEntry { law: law.into(), pass: false, witness: Some(witness.into()) }
    }
}

/// A batch of law outcomes for one subject (a quantale, a space, a suite).
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub subject: String,
    pub entries: Vec<LawEntry>,
}

impl LawReport {
    pub fn new(subject: impl Into<String>) -> Self {
        LawReport { subject: subject.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, entry: LawEntry) {
        self.entries.push(entry);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, law: &str) -> Option<&LawEntry> {
        self.entries.iter().find(|e| e.law == law)
    }

    /// One line per law, stable order, suitable for terminal output.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let status = if e.pass { "pass" } else { "FAIL" };
            out.push_str(&format!("{:4}  {} :: {}", status, self.subject, e.law));
            if let Some(w) = &e.witness {
                out.push_str(&format!("  [{w}]"));
            }
            out.push('\n');
        }
        out
    }
}

/// Alias kept separate so axiom checks read as such at call sites.
pub type AxiomReport = LawReport;
