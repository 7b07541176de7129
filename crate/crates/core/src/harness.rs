//! Designed experiments over a size grid or a support grid.
//!
//! Each trial sorts a freshly generated input whose seed is derived from
//! `(experiment seed, n, trial index)`. Trials run sequentially; after
//! `trials.min` of them the loop stops as soon as the standard error of the
//! mean falls below `rel_sem_target * mean`, or at `trials.max`.
//!
//! `WeightedCount` responses are a pure function of the spec and are
//! bit-identical everywhere. `WallTime` responses time the sort call only
//! (input generation is excluded) and vary from run to run.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::sortlab::{f64_less, quicksort_instrumented, quicksort_instrumented_by, weighted_cost, OperationCounts, WeightVector};
use crate::table::{ResponseRow, ResponseTable};
use crate::workloads::{gen_heavy_tail, gen_tied, gen_uniform, HeavyTailSpec, Seed, TieDensitySpec, UniformKSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    UniformK(u64),
    TieDensity { tie_density: f64, exact_multiset: bool },
    HeavyTail,
}

impl Family {
    pub fn tied(tie_density: f64) -> Self {
        Family::TieDensity {
            tie_density,
            exact_multiset: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseMode {
    WallTime,
    WeightedCount(WeightVector),
}

impl Default for ResponseMode {
    fn default() -> Self {
        ResponseMode::WeightedCount(WeightVector::UNIT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPolicy {
    pub min: u64,
    pub max: u64,
    pub rel_sem_target: f64,
}

impl Default for TrialPolicy {
    fn default() -> Self {
        TrialPolicy {
            min: 30,
            max: 500,
            rel_sem_target: 0.01,
        }
    }
}

impl TrialPolicy {
    pub fn fixed(trials: u64) -> Self {
        TrialPolicy {
            min: trials,
            max: trials,
            rel_sem_target: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min < 1 || self.min > self.max {
            return Err(Error::invalid(format!(
                "need 1 <= trials_min <= trials_max, got {} and {}",
                self.min, self.max
            )));
        }
        if !(self.rel_sem_target >= 0.0) {
            return Err(Error::invalid("relative SEM target must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub family: Family,
    pub size_grid: Vec<u64>,
    pub trials: TrialPolicy,
    pub seed: Seed,
    pub response: ResponseMode,
}

impl WorkloadSpec {
    pub fn new(family: Family, size_grid: Vec<u64>, seed: Seed) -> Self {
        WorkloadSpec {
            family,
            size_grid,
            trials: TrialPolicy::default(),
            seed,
            response: ResponseMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size_grid.is_empty() {
            return Err(Error::invalid("size grid is empty"));
        }
        if self.size_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("size grid must be strictly increasing"));
        }
        self.trials.validate()?;
        if let ResponseMode::WeightedCount(w) = &self.response {
            w.validate()?;
        }
        Ok(())
    }
}

/// Sorts one generated input and returns its response.
pub fn run_trial(family: Family, n: u64, seed: Seed, response: &ResponseMode) -> Result<f64> {
    let n_usize = usize::try_from(n).map_err(|_| Error::ResourceExhausted {
        n,
        message: "size does not fit in memory addressing".into(),
    })?;
    let (counts, secs) = match family {
        Family::UniformK(k) => {
            let mut v = gen_uniform(UniformKSpec { n: n_usize, k }, seed)?;
            timed(|| quicksort_instrumented(&mut v))
        }
        Family::TieDensity {
            tie_density,
            exact_multiset,
        } => {
            let spec = TieDensitySpec {
                n: n_usize,
                tie_density,
                exact_multiset,
            };
            let mut v = gen_tied(spec, seed)?;
            timed(|| quicksort_instrumented(&mut v))
        }
        Family::HeavyTail => {
            let mut v = gen_heavy_tail(HeavyTailSpec { n: n_usize }, seed)?.values;
            timed(|| quicksort_instrumented_by(&mut v, f64_less))
        }
    };
    match response {
        ResponseMode::WallTime => Ok(secs),
        ResponseMode::WeightedCount(w) => weighted_cost(&counts, w),
    }
}

fn timed(f: impl FnOnce() -> OperationCounts) -> (OperationCounts, f64) {
    let start = Instant::now();
    let c = f();
    (c, start.elapsed().as_secs_f64())
}

/// Replicates one design point under `policy`. Returns the row and the raw
/// trial responses.
pub fn measure_point(
    family: Family,
    n: u64,
    policy: &TrialPolicy,
    seed: Seed,
    response: &ResponseMode,
) -> Result<(ResponseRow, Vec<f64>)> {
    let mut raw = Vec::new();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for trial in 0..policy.max {
        let y = run_trial(family, n, seed.derive(n, trial), response)?;
        raw.push(y);
        // Welford, for the stopping rule only.
        let t = raw.len() as f64;
        let d = y - mean;
        mean += d / t;
        m2 += d * (y - mean);
        if raw.len() as u64 >= policy.min {
            let sd = if raw.len() > 1 { (m2 / (t - 1.0)).sqrt() } else { 0.0 };
            if sd == 0.0 || sd / t.sqrt() < policy.rel_sem_target * mean.abs() {
                break;
            }
        }
    }
    let t = raw.len() as f64;
    let y = raw.iter().sum::<f64>() / t;
    let stddev = if raw.len() > 1 {
        (raw.iter().map(|v| (v - y) * (v - y)).sum::<f64>() / (t - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok((
        ResponseRow {
            n,
            y,
            trials: raw.len() as u64,
            stddev,
        },
        raw,
    ))
}

pub fn run_experiment(spec: &WorkloadSpec) -> Result<ResponseTable> {
    run_experiment_traced(spec).map(|(t, _)| t)
}

/// [`run_experiment`] that also returns every raw trial response, per row.
pub fn run_experiment_traced(spec: &WorkloadSpec) -> Result<(ResponseTable, Vec<Vec<f64>>)> {
    spec.validate()?;
    let mut table = ResponseTable::default();
    let mut raws = Vec::with_capacity(spec.size_grid.len());
    for &n in &spec.size_grid {
        match measure_point(spec.family, n, &spec.trials, spec.seed, &spec.response) {
            Ok((row, raw)) => {
                table.push(row);
                raws.push(raw);
            }
            Err(e) => {
                return Err(Error::Aborted {
                    n,
                    partial: table,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok((table, raws))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSweepRow {
    pub k: u64,
    pub y: f64,
    pub trials: u64,
    pub stddev: f64,
}

/// Responses against the support size `K` at a fixed `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KSweep {
    pub n: u64,
    pub rows: Vec<KSweepRow>,
}

impl KSweep {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,y,trials,stddev\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.k, r.y, r.trials, r.stddev));
        }
        s
    }
}

pub fn sweep_k(
    n: u64,
    k_grid: &[u64],
    trials: &TrialPolicy,
    seed: Seed,
    response: &ResponseMode,
) -> Result<KSweep> {
    if k_grid.is_empty() {
        return Err(Error::invalid("K grid is empty"));
    }
    if k_grid[0] == 0 || k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("K grid must be strictly increasing and start at 1 or above"));
    }
    trials.validate()?;
    if let ResponseMode::WeightedCount(w) = response {
        w.validate()?;
    }
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let (row, _) = measure_point(Family::UniformK(k), n, trials, seed, response)?;
        rows.push(KSweepRow {
            k,
            y: row.y,
            trials: row.trials,
            stddev: row.stddev,
        });
    }
    Ok(KSweep { n, rows })
}
