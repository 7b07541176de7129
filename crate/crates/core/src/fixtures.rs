//! Bundled reference data and the statistics printed alongside it.
//!
//! Data tables live in `fixtures/*.csv` as transcribed, one column per curve;
//! a blank cell means the value was not reported. Each `*.fixture` file names
//! a curve (`source = table1:500`), the fit or verdict to run on it, and the
//! expected values exactly as printed. A printed value with `d` decimals is
//! matched when the computed value lies within `10^-d` of it; F statistics
//! may instead match to 1e-3 relative, and degrees of freedom must be exact.

use std::fmt;

use crate::error::{Error, Result};
use crate::statfit::{fit_ols, RegressionFit, Term, TermSet};
use crate::table::{ResponseRow, ResponseTable};
use crate::verdict::{detect_pseudo_linear, select_model, SelectionPolicy};

const DATA: &[(&str, &str)] = &[
    ("table1", include_str!("../fixtures/table1.csv")),
    ("table3", include_str!("../fixtures/table3.csv")),
    ("table5", include_str!("../fixtures/table5.csv")),
];

const FIXTURES: &[(&str, &str)] = &[
    ("table2A", include_str!("../fixtures/table2A.fixture")),
    ("table2B", include_str!("../fixtures/table2B.fixture")),
    ("table2C", include_str!("../fixtures/table2C.fixture")),
    ("table2G", include_str!("../fixtures/table2G.fixture")),
    ("table2H", include_str!("../fixtures/table2H.fixture")),
    ("table4A", include_str!("../fixtures/table4A.fixture")),
    ("table4B", include_str!("../fixtures/table4B.fixture")),
    ("table5", include_str!("../fixtures/table5.fixture")),
    ("verdict-k500", include_str!("../fixtures/verdict-k500.fixture")),
    ("verdict-td1000", include_str!("../fixtures/verdict-td1000.fixture")),
    ("verdict-k50000", include_str!("../fixtures/verdict-k50000.fixture")),
    (
        "pseudolinear-td1000-k5000",
        include_str!("../fixtures/pseudolinear-td1000-k5000.fixture"),
    ),
];

/// Relative tolerance accepted for F statistics.
pub const F_REL_TOL: f64 = 1e-3;

pub fn fixture_ids() -> Vec<&'static str> {
    FIXTURES.iter().map(|(id, _)| *id).collect()
}

/// Raw text of a bundled data table.
pub fn data_text(name: &str) -> Option<&'static str> {
    DATA.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// One curve of a bundled table, addressed as `table:column`.
pub fn data_column(source: &str) -> Result<ResponseTable> {
    let (name, column) = source
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("data source `{source}` is not of the form table:column")))?;
    let text = data_text(name).ok_or_else(|| Error::invalid(format!("no bundled data table `{name}`")))?;
    let file = format!("{name}.csv");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = header
        .iter()
        .skip(1)
        .position(|h| *h == column)
        .map(|i| i + 1)
        .ok_or_else(|| Error::invalid(format!("table `{name}` has no column `{column}`")))?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let cell = fields.get(col).copied().unwrap_or("");
        if cell.is_empty() {
            continue;
        }
        let n = fields[0]
            .parse::<u64>()
            .map_err(|_| Error::parse(&file, i + 2, format!("bad size `{}`", fields[0])))?;
        let y = cell
            .parse::<f64>()
            .map_err(|_| Error::parse(&file, i + 2, format!("bad value `{cell}`")))?;
        rows.push(ResponseRow::point(n, y));
    }
    ResponseTable::new(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub key: String,
    pub printed: String,
    pub computed: String,
    /// `|computed - printed|`, absent for categorical values.
    pub deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureReport {
    pub id: String,
    pub description: String,
    pub comparisons: Vec<Comparison>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.failures().count();
        writeln!(
            f,
            "{} {}: {} ({} compared, {} mismatched)",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            self.comparisons.len(),
            failed
        )?;
        for c in &self.comparisons {
            write!(
                f,
                "  {} {:<24} printed {:<14} computed {}",
                if c.pass { "ok  " } else { "MISS" },
                c.key,
                c.printed,
                c.computed
            )?;
            if let (Some(d), Some(t)) = (c.deviation, c.tolerance) {
                write!(f, "  (|diff| {d:.3e}, tol {t:.3e})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Spec {
    description: String,
    entries: Vec<(String, String)>,
}

impl Spec {
    fn parse(id: &str, text: &str) -> Result<Self> {
        let file = format!("{id}.fixture");
        let mut description = String::new();
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(c) = line.strip_prefix('#') {
                if description.is_empty() {
                    description = c.trim().to_string();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(&file, i + 1, "expected `key = value`"))?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Spec { description, entries })
    }

    fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::invalid(format!("fixture lacks `{key}`")))
    }

    fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.iter().find(|(k, _)| k == key) {
            None => Ok(default),
            Some((_, v)) => v
                .parse()
                .map_err(|_| Error::invalid(format!("fixture value `{key} = {v}` is not a number"))),
        }
    }
}

const CONTROL_KEYS: &[&str] = &["kind", "source", "reference", "terms", "log_base", "s_ratio_min", "alpha"];

pub fn reproduce(id: &str) -> Result<FixtureReport> {
    let text = FIXTURES
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownFixture(id.to_string()))?;
    let spec = Spec::parse(id, text)?;
    let table = data_column(spec.get("source")?)?;
    let log_base = spec.get_f64("log_base", 2.0)?;
    let comparisons = match spec.get("kind")? {
        "regression" => {
            let terms = TermSet::parse(spec.get("terms")?, log_base)?;
            let fit = fit_ols(&table, &terms)?;
            spec.entries
                .iter()
                .filter(|(k, _)| !CONTROL_KEYS.contains(&k.as_str()))
                .map(|(k, v)| compare_stat(&fit, k, v))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect()
        }
        "verdict" => {
            let policy = SelectionPolicy {
                s_ratio_min: spec.get_f64("s_ratio_min", SelectionPolicy::default().s_ratio_min)?,
                alpha: spec.get_f64("alpha", SelectionPolicy::default().alpha)?,
                ..SelectionPolicy::default()
            };
            let verdict = select_model(&table, &policy, log_base)?;
            vec![categorical("label", spec.get("label")?, verdict.label.to_string())]
        }
        "domination" => {
            let reference = data_column(spec.get("reference")?)?;
            let dominates = detect_pseudo_linear(&table, &reference)?;
            vec![categorical("dominates", spec.get("dominates")?, dominates.to_string())]
        }
        other => return Err(Error::invalid(format!("unknown fixture kind `{other}`"))),
    };
    Ok(FixtureReport {
        id: id.to_string(),
        description: spec.description,
        comparisons,
    })
}

pub fn reproduce_all() -> Result<Vec<FixtureReport>> {
    fixture_ids().into_iter().map(reproduce).collect()
}

fn categorical(key: &str, printed: &str, computed: String) -> Comparison {
    Comparison {
        key: key.to_string(),
        printed: printed.to_string(),
        pass: printed == computed,
        computed,
        deviation: None,
        tolerance: None,
    }
}

/// One unit in the last printed digit.
fn last_digit_unit(printed: &str) -> f64 {
    let decimals = printed.split_once('.').map_or(0, |(_, d)| d.len());
    10f64.powi(-(decimals as i32))
}

fn numeric(key: &str, printed: &str, computed: f64, exact: bool, rel_fallback: Option<f64>) -> Result<Comparison> {
    let want: f64 = printed
        .parse()
        .map_err(|_| Error::invalid(format!("fixture value `{key} = {printed}` is not a number")))?;
    let dev = (computed - want).abs();
    let tol = if exact { 0.0 } else { last_digit_unit(printed) };
    // Slack for the binary representation of the printed decimal.
    let mut pass = dev <= tol * (1.0 + 1e-9) + 1e-12 * want.abs();
    if let Some(rel) = rel_fallback {
        pass |= dev <= rel * want.abs();
    }
    Ok(Comparison {
        key: key.to_string(),
        printed: printed.to_string(),
        computed: computed.to_string(),
        deviation: Some(dev),
        tolerance: Some(tol),
        pass,
    })
}

fn term_from_key(key: &str) -> Result<Term> {
    [Term::Const, Term::N, Term::NLogN, Term::NSquared]
        .into_iter()
        .find(|t| t.key() == key)
        .ok_or_else(|| Error::invalid(format!("unknown term key `{key}`")))
}

fn compare_stat(fit: &RegressionFit, key: &str, printed: &str) -> Result<Vec<Comparison>> {
    let a = &fit.anova;
    let one = |v: f64| numeric(key, printed, v, false, None).map(|c| vec![c]);
    let exact = |v: u64| numeric(key, printed, v as f64, true, None).map(|c| vec![c]);
    match key {
        "S" => one(fit.s),
        "R-Sq" => one(100.0 * fit.r2),
        "R-Sq(adj)" => one(100.0 * fit.r2_adj),
        "PRESS" => one(fit.press),
        "R-Sq(pred)" => one(100.0 * fit.r2_pred),
        "anova.regression.df" => exact(a.regression.df),
        "anova.regression.ss" => one(a.regression.ss),
        "anova.regression.ms" => one(a.regression.ms),
        "anova.residual.df" => exact(a.residual.df),
        "anova.residual.ss" => one(a.residual.ss),
        "anova.residual.ms" => one(a.residual.ms),
        "anova.total.df" => exact(a.total_df),
        "anova.total.ss" => one(a.total_ss),
        "anova.f" => numeric(key, printed, a.f, false, Some(F_REL_TOL)).map(|c| vec![c]),
        "anova.p" => one(a.p),
        _ => {
            let (kind, rest) = key
                .split_once('.')
                .ok_or_else(|| Error::invalid(format!("unknown fixture key `{key}`")))?;
            match kind {
                "obs" => compare_obs(fit, rest, printed),
                "seqss" => {
                    let term = term_from_key(rest)?;
                    let ss = fit
                        .seq_ss
                        .iter()
                        .find(|(t, _)| *t == term)
                        .map(|(_, ss)| *ss)
                        .ok_or_else(|| Error::invalid(format!("`{rest}` has no sequential SS")))?;
                    one(ss)
                }
                "eq" | "coef" | "se" | "t" | "p" => {
                    let term = term_from_key(rest)?;
                    let c = fit
                        .coef(term)
                        .ok_or_else(|| Error::invalid(format!("`{rest}` not in the fitted model")))?;
                    one(match kind {
                        "se" => c.se,
                        "t" => c.t,
                        "p" => c.p,
                        _ => c.coef,
                    })
                }
                _ => Err(Error::invalid(format!("unknown fixture key `{key}`"))),
            }
        }
    }
}

/// `obs.i = n y fit se_fit residual std_resid[R]`.
fn compare_obs(fit: &RegressionFit, index: &str, printed: &str) -> Result<Vec<Comparison>> {
    let i: usize = index
        .parse()
        .map_err(|_| Error::invalid(format!("bad observation index `{index}`")))?;
    let o = i
        .checked_sub(1)
        .and_then(|j| fit.obs.get(j))
        .ok_or_else(|| Error::invalid(format!("observation {i} out of range")))?;
    let fields: Vec<&str> = printed.split_whitespace().collect();
    let [n, y, fitted, se_fit, resid, std_resid] = fields.as_slice() else {
        return Err(Error::invalid(format!("observation {i} needs six fields")));
    };
    let (std_resid, flagged) = match std_resid.strip_suffix('R') {
        Some(s) => (s, true),
        None => (*std_resid, false),
    };
    let k = |name: &str| format!("obs.{i}.{name}");
    Ok(vec![
        numeric(&k("n"), n, o.n, true, None)?,
        numeric(&k("y"), y, o.y, false, None)?,
        numeric(&k("fit"), fitted, o.fit, false, None)?,
        numeric(&k("se_fit"), se_fit, o.se_fit, false, None)?,
        numeric(&k("residual"), resid, o.residual, false, None)?,
        numeric(&k("std_resid"), std_resid, o.std_resid, false, None)?,
        categorical(&k("flag"), if flagged { "R" } else { "-" }, if o.large { "R" } else { "-" }.into()),
    ])
}
