//! Analytic evaluation of mapped networks: latency, throughput, energy,
//! power, area, and the comparisons and sweeps built on them.

mod attribute;
mod compare;
mod error;
mod model;
mod point;
mod report;
mod sweep;
mod verify;

pub use attribute::{attribute, Attribution, AttributionStep, DEFAULT_STEPS};
pub use compare::{compare, deltas, evaluate_suite, Comparison, Deltas};
pub use error::EvalError;
pub use model::{evaluate, simulate, EvalReport};
pub use point::DesignPoint;
pub use report::{attribution_csv, comparison_csv, reports_csv, sweep_csv, to_json, verify_csv};
pub use sweep::{sweep, sweep_with, SweepAxis, SweepGrid, SweepPoint, SweepResult};
pub use verify::{
    exact_guard, run_verification, window_spanning_cases, SuiteResult, VerifyOptions, VerifyReport,
};
pub use xbar_arch::SCHEMA_VERSION;

pub type Result<T> = std::result::Result<T, EvalError>;

/// How independent evaluations are scheduled. Without the `parallel`
/// feature both variants run sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub(crate) fn run_each<T, U, F>(exec: Execution, items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
