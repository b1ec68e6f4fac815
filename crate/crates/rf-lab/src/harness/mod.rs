//! Experiment harness: a registry of runnable pipelines, a worker pool over
//! (config, seed) cells, and CSV/SVG report emission.
//!
//! Every cell owns a derived RNG substream and its outputs are merged in
//! cell order, so reruns with the same config hash are byte-identical
//! regardless of scheduling. `RF_LAB_WORKERS` caps the pool size.

pub mod config;
pub mod registry;
pub mod report;
pub mod svg;

pub use config::{config_hash, parse_config, ConfigDoc};
pub use registry::{registry, run_experiment, ExperimentConfig, RunCtx};
pub use report::{AggregateRow, AuxTable, ExperimentReport, FailureRow, MetricRow, Series};
pub use svg::{emit_svg, PlotKind};

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::sync::OnceLock;

use crate::error::Result;

/// Worker count: `RF_LAB_WORKERS` when set, otherwise the available
/// parallelism.
pub fn worker_count() -> usize {
    std::env::var("RF_LAB_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(worker_count())
            .build()
            .expect("worker pool")
    })
}

/// Run `worker` over the cells on the pool; `on_ready` sees each output in
/// cell order (a reorder buffer holds later cells until earlier ones land),
/// so incremental emission stays deterministic. Returns outputs in order.
pub(crate) fn run_cells<I, O>(
    items: Vec<I>,
    worker: impl Fn(usize, &I) -> O + Send + Sync,
    mut on_ready: impl FnMut(usize, &O) -> Result<()>,
) -> Result<Vec<O>>
where
    I: Send + Sync,
    O: Send,
{
    let total = items.len();
    let mut ordered: Vec<Option<O>> = Vec::with_capacity(total);
    let (tx, rx) = mpsc::channel::<(usize, O)>();
    pool().in_place_scope(|scope| -> Result<()> {
        for (idx, item) in items.iter().enumerate() {
            let tx = tx.clone();
            let worker = &worker;
            scope.spawn(move |_| {
                let out = worker(idx, item);
                // receiver can only disappear on panic; nothing to do then
                let _ = tx.send((idx, out));
            });
        }
        drop(tx);
        let mut pending: BTreeMap<usize, O> = BTreeMap::new();
        let mut next = 0usize;
        for (idx, out) in rx.iter() {
            pending.insert(idx, out);
            while let Some(out) = pending.remove(&next) {
                on_ready(next, &out)?;
                ordered.push(Some(out));
                next += 1;
            }
        }
        debug_assert_eq!(next, total, "all cells must complete");
        Ok(())
    })?;
    Ok(ordered.into_iter().map(|o| o.expect("filled in order")).collect())
}
