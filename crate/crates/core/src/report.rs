//! Machine-readable outcomes of verification runs, emitted as JSON lines.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::field::{FieldSpec, SampleRng};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: String,
    pub stage: String,
    pub expected: String,
    pub got: String,
}

impl Counterexample {
    pub fn new(
        input: impl Into<String>,
        stage: impl Into<String>,
        expected: impl ToString,
        got: impl ToString,
    ) -> Self {
        Counterexample {
            input: input.into(),
            stage: stage.into(),
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}

/// Result of one sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Counterexample),
    Budget(String),
}

impl Outcome {
    /// Maps an error raised while checking a sample: budget exhaustion is
    /// reported separately, anything else is a failure at `stage`.
    pub fn from_error(err: Error, input: impl Into<String>, stage: &str) -> Outcome {
        if err.is_budget() {
            Outcome::Budget(err.to_string())
        } else {
            Outcome::Fail(Counterexample::new(input, stage, "no error", err))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub check: String,
    pub params: Value,
    pub field: FieldSpec,
    pub seed: Option<u64>,
    pub samples: usize,
    pub passed: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    /// Only filled on request, so that reports stay byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, field: FieldSpec, seed: Option<u64>, params: Value) -> Self {
        VerificationReport {
            schema: SCHEMA_VERSION,
            check: check.into(),
            params,
            field,
            seed,
            samples: 0,
            passed: 0,
            status: Status::Pass,
            counterexample: None,
            notes: Vec::new(),
            details: Value::Null,
            wall_time_ms: None,
        }
    }

    pub fn record(&mut self, outcome: Outcome) {
        self.samples += 1;
        match outcome {
            Outcome::Pass => self.passed += 1,
            Outcome::Fail(cex) => {
                self.status = Status::Fail;
                if self.counterexample.is_none() {
                    self.counterexample = Some(cex);
                }
            }
            Outcome::Budget(msg) => {
                if self.status == Status::Pass {
                    self.status = Status::Budget;
                }
                if !self.notes.contains(&msg) {
                    self.notes.push(msg);
                }
            }
        }
    }

    pub fn record_all(&mut self, outcomes: impl IntoIterator<Item = Outcome>) {
        for o in outcomes {
            self.record(o);
        }
    }

    /// Records a single boolean claim.
    pub fn claim(&mut self, ok: bool, cex: impl FnOnce() -> Counterexample) {
        self.record(if ok { Outcome::Pass } else { Outcome::Fail(cex()) });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds another report's samples into this one.
    pub fn merge(&mut self, other: &VerificationReport) {
        self.samples += other.samples;
        self.passed += other.passed;
        match (self.status, other.status) {
            (Status::Fail, _) => {}
            (_, Status::Fail) => self.status = Status::Fail,
            (Status::Pass, Status::Budget) => self.status = Status::Budget,
            _ => {}
        }
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample.clone();
        }
        for n in &other.notes {
            if !self.notes.contains(n) {
                self.notes.push(n.clone());
            }
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Generator for sample `index` of a run seeded with `seed`; independent
/// of thread scheduling.
pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    let mut rng = SampleRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `check` on sample indices `0..samples` in parallel, returning the
/// outcomes in index order.
pub fn run_samples<F>(samples: usize, check: F) -> Vec<Outcome>
where
    F: Fn(usize) -> Outcome + Sync + Send,
{
    (0..samples).into_par_iter().map(check).collect()
}
