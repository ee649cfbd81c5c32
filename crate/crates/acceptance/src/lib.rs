//! Pass/fail bookkeeping for the acceptance run.

use std::time::Instant;

/// Collects one verdict per criterion and prints it as it lands.
pub struct Report {
    title: String,
    started: Instant,
    passed: usize,
    failed: Vec<String>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        println!("== {title} ==");
        Report { title: title.to_string(), started: Instant::now(), passed: 0, failed: Vec::new() }
    }

    /// Records a verdict. `detail` carries the measured values.
    pub fn check(&mut self, id: &str, name: &str, ok: bool, detail: &str, seconds: f64) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {name}: {detail} ({seconds:.1} s)");
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(id.to_string());
        }
    }

    /// Records a criterion whose body returned an error.
    pub fn error(&mut self, id: &str, name: &str, err: &dyn std::fmt::Display, seconds: f64) {
        self.check(id, name, false, &format!("error: {err}"), seconds);
    }

    pub fn all_passed(&self) -> bool {
        self.failed.is_empty()
    }

    /// Prints the tally and returns the process exit code.
    pub fn finish(self) -> i32 {
        let total = self.passed + self.failed.len();
        println!(
            "== {}: {}/{} passed in {:.0} s{} ==",
            self.title,
            self.passed,
            total,
            self.started.elapsed().as_secs_f64(),
            if self.failed.is_empty() { String::new() } else { format!("; failed: {}", self.failed.join(", ")) }
        );
        i32::from(!self.failed.is_empty())
    }
}
