//! Verification suites. Each case yields a [`Report`] carrying its status,
//! a JSON witness, and elapsed time.

pub mod orders;
pub mod plucker;
pub mod suites;
pub mod typeb;
pub mod typec;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub case: Value,
    pub status: Status,
    pub witness: Value,
    pub timing_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn run_case(suite: &str, case: Value, f: impl FnOnce() -> Result<Value, Value>) -> Report {
    let start = Instant::now();
    let res = f();
    let timing_ms = start.elapsed().as_millis();
    let (status, witness) = match res {
        Ok(v) => (Status::Pass, v),
        Err(v) => (Status::Fail, v),
    };
    Report {
        suite: suite.to_string(),
        case,
        status,
        witness,
        timing_ms,
    }
}

/// Thread pool sized by `FLAGDEGEN_THREADS` when set.
pub fn pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var("FLAGDEGEN_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&k| k > 0)
    {
        b = b.num_threads(k);
    }
    b.build().expect("thread pool")
}

/// Runs independent cases in parallel; output is sorted by suite and case.
pub fn run_all<T: Sync>(items: &[T], f: impl Fn(&T) -> Report + Sync + Send) -> Vec<Report> {
    let mut out: Vec<Report> = pool().install(|| items.par_iter().map(&f).collect());
    out.sort_by_cached_key(|r| (r.suite.clone(), r.case.to_string()));
    out
}
