//! Complexity labels from fitted growth models.
//!
//! `select_model` compares `{1, n, n log n, n^2}` against `{1, n, n log n}`:
//!
//! 1. Quadratic when the `n^2` term is significant at `alpha` *and* dropping
//!    it inflates `S` by at least `s_ratio_min`.
//! 2. Otherwise, inside `{1, n, n log n}`: Inconclusive when neither growth
//!    term is significant, NLogN when `|t(n log n)| >= |t(n)|`, Linear when
//!    `|t(n)|` is larger and the `n` coefficient is positive, else
//!    Inconclusive.
//!
//! Noise-free responses give `S` at rounding level, where t statistics are
//! meaningless. Both `S` values are therefore floored at
//! `noise_floor * rms(y)` before t statistics, p-values and the `S` ratio
//! are formed; every input of the decision stays scale-free.
//!
//! A Linear label is demoted to PseudoLinear when the curve pointwise
//! dominates (`>=`) a Quadratic reference curve on the same size grid.

use std::fmt;

use crate::error::{Error, Result};
use crate::harness::{run_experiment, Family, WorkloadSpec};
use crate::statfit::{fit_ols, t_two_sided_p, RegressionFit, Term, TermSet};
use crate::table::ResponseTable;

pub const MIN_ROWS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPolicy {
    pub alpha: f64,
    pub s_ratio_min: f64,
    /// Lower bound on `S`, relative to the RMS response.
    pub noise_floor: f64,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        SelectionPolicy {
            alpha: 0.05,
            s_ratio_min: 2.0,
            noise_floor: 1e-9,
        }
    }
}

impl SelectionPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.s_ratio_min >= 1.0) || !self.s_ratio_min.is_finite() {
            return Err(Error::invalid(format!(
                "s_ratio_min must be at least 1, got {}",
                self.s_ratio_min
            )));
        }
        if !(self.noise_floor >= 0.0 && self.noise_floor < 1.0) {
            return Err(Error::invalid("noise_floor must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Linear,
    PseudoLinear,
    NLogN,
    Quadratic,
    Inconclusive,
}

impl Label {
    pub fn is_definite(self) -> bool {
        self != Label::Inconclusive
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Linear => "Linear",
            Label::PseudoLinear => "PseudoLinear",
            Label::NLogN => "NLogN",
            Label::Quadratic => "Quadratic",
            Label::Inconclusive => "Inconclusive",
        })
    }
}

/// One consulted coefficient, with t and p recomputed from the floored `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEvidence {
    pub term: Term,
    pub coef: f64,
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelEvidence {
    pub name: &'static str,
    pub s: f64,
    pub s_used: f64,
    pub df: u64,
    pub terms: Vec<TermEvidence>,
}

impl ModelEvidence {
    fn from_fit(name: &'static str, fit: &RegressionFit, floor: f64) -> Result<Self> {
        let s_used = fit.s.max(floor);
        let df = fit.df_resid();
        let terms = fit
            .coefs
            .iter()
            .map(|c| {
                let t = c.coef / (c.se_unit * s_used);
                Ok(TermEvidence {
                    term: c.term,
                    coef: c.coef,
                    t,
                    p: t_two_sided_p(t, df)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelEvidence {
            name,
            s: fit.s,
            s_used,
            df,
            terms,
        })
    }

    pub fn term(&self, term: Term) -> &TermEvidence {
        self.terms.iter().find(|t| t.term == term).expect("term fitted")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domination {
    pub dominates: bool,
    pub reference_label: Label,
    /// Smallest `linear_y - reference_y` over the grid and the `n` where it occurs.
    pub min_margin: f64,
    pub min_margin_at: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub policy: SelectionPolicy,
    pub log_base: f64,
    pub full: ModelEvidence,
    pub reduced: ModelEvidence,
    pub s_ratio: f64,
    /// The comparisons that decided the label, in order.
    pub steps: Vec<String>,
    pub domination: Option<Domination>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityVerdict {
    pub label: Label,
    pub evidence: Evidence,
}

pub fn select_model(table: &ResponseTable, policy: &SelectionPolicy, log_base: f64) -> Result<ComplexityVerdict> {
    policy.validate()?;
    if table.len() < MIN_ROWS {
        return Err(Error::TooFewRows {
            rows: table.len(),
            needed: MIN_ROWS,
        });
    }
    let full_fit = fit_ols(table, &TermSet::quadratic(log_base))?;
    let reduced_fit = fit_ols(table, &TermSet::n_log_n(log_base))?;
    let ys = table.responses();
    let rms = (ys.iter().map(|y| y * y).sum::<f64>() / ys.len() as f64).sqrt();
    let floor = policy.noise_floor * rms;
    let full = ModelEvidence::from_fit("{1, n, nlogn, n^2}", &full_fit, floor)?;
    let reduced = ModelEvidence::from_fit("{1, n, nlogn}", &reduced_fit, floor)?;
    let s_ratio = reduced.s_used / full.s_used;

    let mut steps = Vec::new();
    let sq = full.term(Term::NSquared);
    let quad_significant = sq.p < policy.alpha;
    let quad_improves = s_ratio >= policy.s_ratio_min;
    steps.push(format!(
        "p(n^2) = {:.3e} {} alpha = {}",
        sq.p,
        if quad_significant { "<" } else { ">=" },
        policy.alpha
    ));
    steps.push(format!(
        "S ratio = {:.4} {} s_ratio_min = {}",
        s_ratio,
        if quad_improves { ">=" } else { "<" },
        policy.s_ratio_min
    ));

    let label = if quad_significant && quad_improves {
        steps.push("quadratic term required".into());
        Label::Quadratic
    } else {
        let lin = reduced.term(Term::N);
        let nln = reduced.term(Term::NLogN);
        steps.push(format!(
            "reduced model: t(n) = {:.4}, p = {:.3e}; t(nlogn) = {:.4}, p = {:.3e}",
            lin.t, lin.p, nln.t, nln.p
        ));
        if !(lin.p < policy.alpha) && !(nln.p < policy.alpha) {
            steps.push("no growth term significant".into());
            Label::Inconclusive
        } else if nln.t.abs() >= lin.t.abs() {
            steps.push("|t(nlogn)| >= |t(n)|".into());
            Label::NLogN
        } else if lin.coef > 0.0 {
            steps.push("|t(n)| > |t(nlogn)| with positive n coefficient".into());
            Label::Linear
        } else {
            steps.push("|t(n)| > |t(nlogn)| but n coefficient is not positive".into());
            Label::Inconclusive
        }
    };

    Ok(ComplexityVerdict {
        label,
        evidence: Evidence {
            policy: *policy,
            log_base,
            full,
            reduced,
            s_ratio,
            steps,
            domination: None,
        },
    })
}

/// True when `linear_curve.y(n) >= reference.y(n)` at every shared size.
pub fn detect_pseudo_linear(linear_curve: &ResponseTable, reference: &ResponseTable) -> Result<bool> {
    Ok(domination_margin(linear_curve, reference)?.0 >= 0.0)
}

fn domination_margin(linear_curve: &ResponseTable, reference: &ResponseTable) -> Result<(f64, u64)> {
    if linear_curve.is_empty() {
        return Err(Error::InvalidPairing("curves are empty".into()));
    }
    if linear_curve.sizes() != reference.sizes() {
        return Err(Error::InvalidPairing(format!(
            "size grids differ: {:?} vs {:?}",
            linear_curve.sizes(),
            reference.sizes()
        )));
    }
    Ok(linear_curve
        .rows()
        .iter()
        .zip(reference.rows())
        .map(|(a, b)| (a.y - b.y, a.n))
        .fold((f64::INFINITY, 0), |acc, m| if m.0 < acc.0 { m } else { acc }))
}

/// Label for `table`, demoted from Linear to PseudoLinear when it dominates a
/// Quadratic `reference` on the same grid.
pub fn combined_verdict(
    table: &ResponseTable,
    reference: Option<&ResponseTable>,
    policy: &SelectionPolicy,
    log_base: f64,
) -> Result<ComplexityVerdict> {
    let mut verdict = select_model(table, policy, log_base)?;
    let Some(reference) = reference else {
        return Ok(verdict);
    };
    let (margin, at) = domination_margin(table, reference)?;
    let ref_label = select_model(reference, policy, log_base)?.label;
    let dominates = margin >= 0.0;
    if verdict.label == Label::Linear {
        if ref_label != Label::Quadratic {
            verdict
                .evidence
                .steps
                .push(format!("reference is {ref_label}, not Quadratic; no demotion"));
        } else if dominates {
            verdict
                .evidence
                .steps
                .push("curve dominates the quadratic reference at every size; demoted".into());
            verdict.label = Label::PseudoLinear;
        } else {
            verdict
                .evidence
                .steps
                .push(format!("reference exceeds curve at n = {at}; label kept"));
        }
    }
    verdict.evidence.domination = Some(Domination {
        dominates,
        reference_label: ref_label,
        min_margin: margin,
        min_margin_at: at,
    });
    Ok(verdict)
}

impl fmt::Display for ComplexityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.evidence;
        writeln!(f, "verdict: {}", self.label)?;
        writeln!(
            f,
            "policy: alpha = {}, s_ratio_min = {}, noise_floor = {}, log base = {}",
            e.policy.alpha, e.policy.s_ratio_min, e.policy.noise_floor, e.log_base
        )?;
        for m in [&e.full, &e.reduced] {
            writeln!(f, "model {}: S = {} (used {}), df = {}", m.name, m.s, m.s_used, m.df)?;
            for t in &m.terms {
                writeln!(f, "  {:<9} coef = {:<24} t = {:<12.4} p = {:.4e}", t.term.key(), t.coef, t.t, t.p)?;
            }
        }
        writeln!(f, "S ratio: {}", e.s_ratio)?;
        if let Some(d) = &e.domination {
            writeln!(
                f,
                "reference: {}, dominated = {}, min margin {} at n = {}",
                d.reference_label, d.dominates, d.min_margin, d.min_margin_at
            )?;
        }
        for s in &e.steps {
            writeln!(f, "- {s}")?;
        }
        Ok(())
    }
}

/// One point of a tie-density scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TieLevel {
    Density(f64),
    /// `t_d = n` at every size: all keys equal.
    AllEqual,
}

impl TieLevel {
    fn family(self) -> Family {
        match self {
            TieLevel::Density(td) => Family::tied(td),
            TieLevel::AllEqual => Family::UniformK(1),
        }
    }

    fn rank(self) -> f64 {
        match self {
            TieLevel::Density(td) => td,
            TieLevel::AllEqual => f64::INFINITY,
        }
    }
}

impl fmt::Display for TieLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieLevel::Density(td) => write!(f, "t_d = {td}"),
            TieLevel::AllEqual => f.write_str("t_d = n"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub level: TieLevel,
    pub table: ResponseTable,
    pub verdict: ComplexityVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TieScanReport {
    pub entries: Vec<ScanEntry>,
}

impl TieScanReport {
    /// Smallest level whose verdict is Linear.
    pub fn threshold(&self) -> Option<TieLevel> {
        self.entries
            .iter()
            .find(|e| e.verdict.label == Label::Linear)
            .map(|e| e.level)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.entries.iter().map(|e| e.verdict.label).collect()
    }

    /// Labels read NLogN... then Linear... with no return to NLogN; any
    /// trailing entries after the Linear run are ignored.
    pub fn is_monotone(&self) -> bool {
        let labels = self.labels();
        let first_linear = labels.iter().position(|&l| l == Label::Linear);
        match first_linear {
            None => true,
            Some(i) => {
                labels[..i].iter().all(|&l| l == Label::NLogN)
                    && !labels[i..].contains(&Label::NLogN)
            }
        }
    }
}

/// Runs `base` once per tie level (overriding its family) and labels each
/// curve.
pub fn conjecture1_check(
    levels: &[TieLevel],
    policy: &SelectionPolicy,
    base: &WorkloadSpec,
    log_base: f64,
) -> Result<TieScanReport> {
    if levels.windows(2).any(|w| w[0].rank() >= w[1].rank()) {
        return Err(Error::invalid("tie levels must be strictly increasing"));
    }
    let mut entries = Vec::with_capacity(levels.len());
    for &level in levels {
        let spec = WorkloadSpec {
            family: level.family(),
            ..base.clone()
        };
        let table = run_experiment(&spec)?;
        let verdict = select_model(&table, policy, log_base)?;
        entries.push(ScanEntry { level, table, verdict });
    }
    Ok(TieScanReport { entries })
}
