//! Pass/fail bookkeeping for the acceptance suite in `tests/acceptance.rs`.

use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    /// One-line summary of the measured numbers.
    pub summary: String,
    /// Indented lines shown under a failure.
    pub details: Vec<String>,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}  {}: {} ({:.1} s)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.summary,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Builder used inside a criterion body.
#[derive(Debug, Default)]
pub struct Findings {
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Findings {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn note(&mut self, what: String) {
        self.notes.push(what);
    }
}

/// Times `body`, which returns the summary line; the criterion passes iff no check failed.
pub fn judge(id: u32, title: &'static str, body: impl FnOnce(&mut Findings) -> String) -> Verdict {
    let start = Instant::now();
    let mut f = Findings::default();
    let summary = body(&mut f);
    let elapsed = start.elapsed();
    let pass = f.failures.is_empty();
    let mut details = f.failures;
    details.extend(f.notes);
    Verdict {
        id,
        title,
        pass,
        summary,
        details,
        elapsed,
    }
}
