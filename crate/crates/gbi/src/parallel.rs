//! Thread-parallel versions of the core searches and samplers. Each returns
//! exactly what its serial counterpart in `gbi-core` returns.

use gbi_core::lhv::{appendix_jobs, chunk_count, tally_chunk, Tally};
use gbi_core::{
    AppendixCheck, DimCap, DirectionSet, Error, HalfInteger, LhvModel, MeasurementMode, Maximum, OptimizerConfig,
    Result, ScanRow, SearchSpace, ViolationSearch,
};
use rayon::prelude::*;

/// Restarts run concurrently; merging is order-independent.
pub fn maximize_violation(
    n: usize,
    s: HalfInteger,
    mode: MeasurementMode,
    cfg: OptimizerConfig,
    space: SearchSpace,
    cap: DimCap,
) -> Result<Maximum> {
    let search = ViolationSearch::new(n, s, mode, space, cfg, cap)?;
    let best = (0..search.config().restarts)
        .into_par_iter()
        .map(|r| search.run_restart(r))
        .try_reduce_with(|a, b| Ok(a.merge(b)))
        .expect("at least one restart")?;
    search.finish(best)
}

pub fn parity_scan(
    ns: &[usize],
    spins: &[HalfInteger],
    mode: MeasurementMode,
    cfg: &OptimizerConfig,
    space: SearchSpace,
    cap: DimCap,
) -> Result<Vec<ScanRow>> {
    if ns.is_empty() || spins.is_empty() {
        return Err(Error::InvalidConfig("scan ranges must be nonempty"));
    }
    let mut rows = Vec::with_capacity(ns.len() * spins.len());
    for &n in ns {
        for &s in spins {
            let best = maximize_violation(n, s, mode, cfg.clone(), space, cap)?;
            rows.push(ScanRow { n, spin: s, max_p_gb: best.p_gb, violated: best.report.violated });
        }
    }
    Ok(rows)
}

/// Chunks of every estimate are tallied concurrently. Counts are integers,
/// so the merge order cannot change the result.
pub fn verify_appendix_bound(model: &LhvModel, ds: &DirectionSet, samples: u64, seed: u64) -> Result<AppendixCheck> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1"));
    }
    let jobs = appendix_jobs(ds)?;
    let estimates: Vec<_> = jobs
        .par_iter()
        .map(|job| {
            (0..chunk_count(samples))
                .into_par_iter()
                .map(|c| tally_chunk(model, &job.dirs, samples, seed, job.stream, c))
                .reduce(Tally::default, Tally::merge)
                .estimate()
        })
        .collect();
    AppendixCheck::from_estimates(ds.n(), &estimates)
}
