//! Experiment configuration files.
//!
//! A config is a set of `[section]` headers followed by `key = value` lines.
//! `#` starts a comment. Unknown sections and keys are errors, and every key
//! is optional. See [`CONFIG_HELP`] for the full key list.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{Family, ResponseMode, WorkloadSpec};
use crate::sortlab::WeightVector;
use crate::statfit::TermSet;
use crate::verdict::SelectionPolicy;
use crate::workloads::Seed;

pub const CONFIG_HELP: &str = "\
Config file format: `[section]` headers, then `key = value` lines; `#` comments.
Every key is optional; unknown keys are rejected.

[workload]
  family          uniform | tied | heavy-tail          (default uniform)
  k               support size for uniform             (default 1073741824)
  td              tie density for tied                 (default 1)
  exact_multiset  true | false, tied only              (default false)
  grid            size list, e.g. `1024, 2048`; `2^10..2^14` (powers of two);
                  `2^10..2^17:2` (two points per octave, rounded)
  grid_start, grid_stop, grid_step
                  arithmetic grid; used when `grid` is absent
                                                       (default grid 2^10..2^14:2)
  trials_min      minimum trials per size              (default 30)
  trials_max      maximum trials per size              (default 500)
  rel_sem_target  stop once SEM / mean falls below     (default 0.01)
  seed            64-bit seed                          (default 0)
  response        count | time                         (default count)
  weights         comparison, exchange, partition call weights (default 1,1,1)

[fit]
  terms           report model, e.g. const,n,nlogn,n2 (default const,n,nlogn,n2)
  log_base        base of the logarithm in n log n     (default 2)

[policy]
  alpha           significance level                   (default 0.05)
  s_ratio_min     S(reduced) / S(full) needed for Quadratic (default 2)
  noise_floor     lower bound on S relative to RMS(y)  (default 1e-9)
  reference       quadratic reference curve CSV for pseudo-linear demotion

[output]
  dir             output directory                     (default out)
  response_csv    response table file name             (default response.csv)
  report          report file name                     (default report.txt)
  plot_data       plot-data file name                  (default plot.csv)

Relative paths are resolved against the directory holding the config file.";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub dir: PathBuf,
    pub response_csv: String,
    pub report: String,
    pub plot_data: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            dir: PathBuf::from("out"),
            response_csv: "response.csv".into(),
            report: "report.txt".into(),
            plot_data: "plot.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub workload: WorkloadSpec,
    pub terms: TermSet,
    pub policy: SelectionPolicy,
    pub reference: Option<PathBuf>,
    pub output: OutputPaths,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            workload: WorkloadSpec::new(
                Family::UniformK(1 << 30),
                parse_grid("2^10..2^14:2").expect("default grid"),
                Seed(0),
            ),
            terms: TermSet::quadratic(2.0),
            policy: SelectionPolicy::default(),
            reference: None,
            output: OutputPaths::default(),
        }
    }
}

/// Parses one size: an integer, `2^k`, or a float literal such as `5e5`
/// that denotes an integer.
pub fn parse_size(tok: &str) -> Option<u64> {
    let tok = tok.trim();
    if let Some((b, e)) = tok.split_once('^') {
        let b: u64 = b.trim().parse().ok()?;
        let e: u32 = e.trim().parse().ok()?;
        return b.checked_pow(e);
    }
    if let Ok(v) = tok.parse::<u64>() {
        return Some(v);
    }
    let f: f64 = tok.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f < 1.8e19).then_some(f as u64)
}

/// Parses a size grid: a comma-separated list, `2^a..2^b` for every power
/// of two in between, or `2^a..2^b:p` for `p` points per octave
/// (`round(2^(a + i/p))`).
pub fn parse_grid(text: &str) -> Result<Vec<u64>> {
    let bad = |t: &str| Error::invalid(format!("bad size `{t}` in grid `{text}`"));
    if let Some((a, rest)) = text.split_once("..") {
        let (b, per_octave) = match rest.split_once(':') {
            Some((b, p)) => (b, p.trim().parse::<u32>().ok().filter(|&p| p >= 1).ok_or_else(|| bad(p))?),
            None => (rest, 1),
        };
        let exp = |t: &str| -> Result<u32> {
            t.trim()
                .strip_prefix("2^")
                .and_then(|e| e.trim().parse().ok())
                .filter(|&e: &u32| e < 63)
                .ok_or_else(|| bad(t))
        };
        let (lo, hi) = (exp(a)?, exp(b)?);
        if lo > hi {
            return Err(Error::invalid(format!("empty grid range `{text}`")));
        }
        let mut grid: Vec<u64> = (lo * per_octave..=hi * per_octave)
            .map(|i| 2f64.powf(f64::from(i) / f64::from(per_octave)).round() as u64)
            .collect();
        grid.dedup();
        return Ok(grid);
    }
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_size(t).ok_or_else(|| bad(t)))
        .collect()
}

/// Arithmetic grid `start, start + step, ...` up to and including `stop`.
pub fn arithmetic_grid(start: u64, stop: u64, step: u64) -> Result<Vec<u64>> {
    if step == 0 || start > stop {
        return Err(Error::invalid(format!(
            "grid_start..grid_stop by grid_step is empty ({start}..{stop} by {step})"
        )));
    }
    Ok((start..=stop).step_by(step as usize).collect())
}

pub fn parse_weights(text: &str) -> Result<WeightVector> {
    let ws = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::invalid(format!("bad weight list `{text}`")))?;
    let [c, e, p] = ws.as_slice() else {
        return Err(Error::invalid(format!("expected three weights, got `{text}`")));
    };
    WeightVector::new(*c, *e, *p)
}

#[derive(Default)]
struct Raw {
    family: Option<String>,
    k: Option<u64>,
    td: Option<f64>,
    exact_multiset: Option<bool>,
    grid: Option<Vec<u64>>,
    grid_start: Option<u64>,
    grid_stop: Option<u64>,
    grid_step: Option<u64>,
    response: Option<String>,
    weights: Option<WeightVector>,
    terms: Option<String>,
    log_base: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if self.output.dir.is_relative() {
            self.output.dir = base.join(&self.output.dir);
        }
        if let Some(r) = &mut self.reference {
            if r.is_relative() {
                *r = base.join(&*r);
            }
        }
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut raw = Raw::default();
        let mut section = String::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let perr = |m: String| Error::parse(source_name, lineno, m);
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !["workload", "fit", "policy", "output"].contains(&name) {
                    return Err(perr(format!("unknown section `[{name}]`")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim().trim_matches('"')))
                .ok_or_else(|| perr(format!("expected `key = value`, got `{line}`")))?;
            if section.is_empty() {
                return Err(perr(format!("key `{key}` appears before any section")));
            }
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| perr(format!("`{key}` expects a number, got `{v}`")))
            };
            let int = |v: &str| -> Result<u64> {
                parse_size(v).ok_or_else(|| perr(format!("`{key}` expects a non-negative integer, got `{v}`")))
            };
            let wrap = |e: Error| perr(e.to_string());
            let t = &mut cfg.workload.trials;
            match (section.as_str(), key) {
                ("workload", "family") => raw.family = Some(value.to_string()),
                ("workload", "k") => raw.k = Some(int(value)?),
                ("workload", "td") => raw.td = Some(num(value)?),
                ("workload", "exact_multiset") => {
                    raw.exact_multiset = Some(
                        value
                            .parse()
                            .map_err(|_| perr(format!("`exact_multiset` expects true or false, got `{value}`")))?,
                    )
                }
                ("workload", "grid") => raw.grid = Some(parse_grid(value).map_err(wrap)?),
                ("workload", "grid_start") => raw.grid_start = Some(int(value)?),
                ("workload", "grid_stop") => raw.grid_stop = Some(int(value)?),
                ("workload", "grid_step") => raw.grid_step = Some(int(value)?),
                ("workload", "trials_min") => t.min = int(value)?,
                ("workload", "trials_max") => t.max = int(value)?,
                ("workload", "rel_sem_target") => t.rel_sem_target = num(value)?,
                ("workload", "seed") => {
                    cfg.workload.seed = Seed(
                        value
                            .parse()
                            .map_err(|_| perr(format!("`seed` expects a 64-bit unsigned integer, got `{value}`")))?,
                    )
                }
                ("workload", "response") => raw.response = Some(value.to_string()),
                ("workload", "weights") => raw.weights = Some(parse_weights(value).map_err(wrap)?),
                ("fit", "terms") => raw.terms = Some(value.to_string()),
                ("fit", "log_base") => raw.log_base = Some(num(value)?),
                ("policy", "alpha") => cfg.policy.alpha = num(value)?,
                ("policy", "s_ratio_min") => cfg.policy.s_ratio_min = num(value)?,
                ("policy", "noise_floor") => cfg.policy.noise_floor = num(value)?,
                ("policy", "reference") => cfg.reference = Some(PathBuf::from(value)),
                ("output", "dir") => cfg.output.dir = PathBuf::from(value),
                ("output", "response_csv") => cfg.output.response_csv = value.to_string(),
                ("output", "report") => cfg.output.report = value.to_string(),
                ("output", "plot_data") => cfg.output.plot_data = value.to_string(),
                (s, k) => return Err(perr(format!("unknown key `{k}` in section [{s}]"))),
            }
        }
        cfg.apply(raw)?;
        Ok(cfg)
    }

    fn apply(&mut self, raw: Raw) -> Result<()> {
        let family = raw.family.as_deref().unwrap_or("uniform");
        self.workload.family = match family {
            "uniform" => Family::UniformK(raw.k.unwrap_or(1 << 30)),
            "tied" => Family::TieDensity {
                tie_density: raw.td.unwrap_or(1.0),
                exact_multiset: raw.exact_multiset.unwrap_or(false),
            },
            "heavy-tail" => Family::HeavyTail,
            other => {
                return Err(Error::invalid(format!(
                    "family must be uniform, tied or heavy-tail, got `{other}`"
                )))
            }
        };
        if raw.k.is_some() && family != "uniform" {
            return Err(Error::invalid("`k` applies only to family = uniform"));
        }
        if (raw.td.is_some() || raw.exact_multiset.is_some()) && family != "tied" {
            return Err(Error::invalid("`td` and `exact_multiset` apply only to family = tied"));
        }
        let ranged = raw.grid_start.is_some() || raw.grid_stop.is_some() || raw.grid_step.is_some();
        match (raw.grid, ranged) {
            (Some(_), true) => return Err(Error::invalid("give either `grid` or grid_start/stop/step, not both")),
            (Some(g), false) => self.workload.size_grid = g,
            (None, true) => {
                let (Some(a), Some(b), Some(s)) = (raw.grid_start, raw.grid_stop, raw.grid_step) else {
                    return Err(Error::invalid("grid_start, grid_stop and grid_step must be given together"));
                };
                self.workload.size_grid = arithmetic_grid(a, b, s)?;
            }
            (None, false) => {}
        }
        self.workload.response = match raw.response.as_deref().unwrap_or("count") {
            "count" => ResponseMode::WeightedCount(raw.weights.unwrap_or(WeightVector::UNIT)),
            "time" if raw.weights.is_some() => {
                return Err(Error::invalid("`weights` only applies to response = count"))
            }
            "time" => ResponseMode::WallTime,
            other => return Err(Error::invalid(format!("response must be count or time, got `{other}`"))),
        };
        self.terms = TermSet::parse(
            raw.terms.as_deref().unwrap_or("const,n,nlogn,n2"),
            raw.log_base.unwrap_or(2.0),
        )?;
        self.workload.validate()?;
        self.policy.validate()?;
        Ok(())
    }
}
