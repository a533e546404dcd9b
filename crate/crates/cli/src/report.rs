use std::fmt::Write as _;

use daff_core::check::Check;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub block: String,
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    pub records: Vec<Record>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub facts: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, trials: usize) -> Self {
        Report {
            command: command.into(),
            seed,
            trials,
            records: vec![],
            facts: vec![],
        }
    }

    pub fn record(&mut self, block: &str, check: &str, status: Status, witness: Option<String>) {
        self.records.push(Record {
            block: block.into(),
            check: check.into(),
            status,
            witness,
            seed: self.seed,
        });
    }

    pub fn outcome(&mut self, block: &str, check: &str, witness: Option<String>) {
        let status = if witness.is_some() { Status::Fail } else { Status::Pass };
        self.record(block, check, status, witness);
    }

    /// Kernel errors inside a check count as failures with the error text.
    pub fn result(&mut self, block: &str, check: &str, r: daff_core::Result<Option<String>>) {
        match r {
            Ok(w) => self.outcome(block, check, w),
            Err(e) => self.outcome(block, check, Some(format!("error: {e}"))),
        }
    }

    pub fn check(&mut self, block: &str, c: &Check) {
        self.outcome(block, &c.name, c.witness.clone());
    }

    pub fn skip(&mut self, block: &str, check: &str, reason: impl Into<String>) {
        self.record(block, check, Status::Skip, Some(reason.into()));
    }

    pub fn fact(&mut self, line: impl Into<String>) {
        self.facts.push(line.into());
    }

    /// Sorts records by block and check name.
    pub fn finish(mut self) -> Self {
        self.records
            .sort_by(|a, b| (&a.block, &a.check).cmp(&(&b.block, &b.check)));
        self
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.count(Status::Fail) > 0)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (seed {}, trials {})", self.command, self.seed, self.trials);
        for f in &self.facts {
            let _ = writeln!(out, "  {f}");
        }
        for r in &self.records {
            let _ = write!(out, "{}/{}: {}", r.block, r.check, r.status.as_str());
            if let Some(w) = &r.witness {
                let _ = write!(out, " ({w})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        );
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Json => self.json(),
        }
    }
}
