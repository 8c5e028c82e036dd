//! Multi-threaded walks. Walk `i` always draws from its own seeded stream, so
//! the aggregate is identical for every worker count.

use std::thread;

use kgbench_core::orwas::{run_walks, OrwasError, PairAggregate, SlotCounts, WalkConfig, WalkStats};
use kgbench_core::FrozenGraph;

/// Splits `0..W` into `workers` contiguous ranges, sizes differing by at most one.
pub fn split_ranges(total: usize, workers: usize) -> Vec<std::ops::Range<usize>> {
    let workers = workers.clamp(1, total.max(1));
    let (q, r) = (total / workers, total % workers);
    let mut start = 0;
    (0..workers)
        .map(|w| {
            let len = q + usize::from(w < r);
            let range = start..start + len;
            start += len;
            range
        })
        .collect()
}

pub fn walk_parallel(graph: &FrozenGraph, cfg: &WalkConfig, workers: usize) -> Result<(PairAggregate, WalkStats), OrwasError> {
    cfg.validate()?;
    let ranges = split_ranges(cfg.num_walks, workers);
    let results: Vec<Result<(SlotCounts, WalkStats), OrwasError>> = thread::scope(|s| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| {
                s.spawn(move || {
                    let mut acc = SlotCounts::new(graph);
                    let stats = run_walks(graph, cfg, range, &mut acc)?;
                    Ok((acc, stats))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("walk worker panicked")).collect()
    });

    let mut total: Option<SlotCounts> = None;
    let mut stats = WalkStats::default();
    for r in results {
        let (acc, s) = r?;
        stats.merge(&s);
        match &mut total {
            Some(t) => t.absorb(&acc),
            None => total = Some(acc),
        }
    }
    let total = total.unwrap_or_else(|| SlotCounts::new(graph));
    Ok((total.into_aggregate(graph), stats))
}
