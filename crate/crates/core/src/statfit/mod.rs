//! Least-squares growth models with regression diagnostics.
//!
//! Candidate models are linear in a small basis of growth terms. Columns are
//! scaled to unit maximum before a Householder QR (an `n^2` column over a
//! grid reaching `5e6` spans thirteen orders of magnitude), and coefficients
//! are unscaled afterwards. The constant term, when present, is always
//! absorbed first; the remaining terms enter in declared order, which fixes
//! the sequential sums of squares.

mod dist;
mod qr;
mod report;

use std::fmt;

pub use dist::{f_upper_p, ln_gamma, reg_inc_beta, t_two_sided_p};
pub use report::{render_kv, render_report, residual_report, ResidualRow};

use crate::error::{Error, Result};
use crate::table::ResponseTable;
use qr::Householder;

/// Threshold on `|std resid|` above which an observation is flagged.
pub const LARGE_STD_RESID: f64 = 2.0;

/// A fit whose residual standard error is below this fraction of the RMS
/// response is treated as exact: its standardized residuals are reported as 0.
pub const EXACT_FIT_REL: f64 = 1e-12;

/// Relative pivot size below which a column counts as linearly dependent.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const,
    N,
    NLogN,
    NSquared,
}

impl Term {
    pub fn eval(self, n: f64, log_base: f64) -> f64 {
        match self {
            Term::Const => 1.0,
            Term::N => n,
            Term::NLogN if n == 0.0 => 0.0,
            Term::NLogN => n * n.ln() / log_base.ln(),
            Term::NSquared => n * n,
        }
    }

    /// Short key used in dumps and fixtures.
    pub fn key(self) -> &'static str {
        match self {
            Term::Const => "Constant",
            Term::N => "N",
            Term::NLogN => "NLogN",
            Term::NSquared => "NSquared",
        }
    }

    /// Report label.
    pub fn label(self, log_base: f64) -> &'static str {
        match self {
            Term::Const => "Constant",
            Term::N => "n",
            Term::NLogN if log_base == 2.0 => "nlgn",
            Term::NLogN => "nlogn",
            Term::NSquared => "n^2",
        }
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "const" | "constant" | "1" => Ok(Term::Const),
            "n" => Ok(Term::N),
            "nlogn" | "nlgn" | "n log n" => Ok(Term::NLogN),
            "n2" | "n^2" | "nsquared" => Ok(Term::NSquared),
            other => Err(Error::invalid(format!("unknown term `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermSet {
    terms: Vec<Term>,
    log_base: f64,
}

impl TermSet {
    pub fn new(terms: &[Term], log_base: f64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("a model needs at least one term"));
        }
        if !(log_base > 0.0 && log_base.is_finite() && log_base != 1.0) {
            return Err(Error::invalid(format!("invalid log base {log_base}")));
        }
        let mut ordered = Vec::with_capacity(terms.len());
        if terms.contains(&Term::Const) {
            ordered.push(Term::Const);
        }
        for &t in terms {
            if t == Term::Const {
                continue;
            }
            if ordered.contains(&t) {
                return Err(Error::invalid(format!("term {} listed twice", t.key())));
            }
            ordered.push(t);
        }
        if terms.iter().filter(|&&t| t == Term::Const).count() > 1 {
            return Err(Error::invalid("term Constant listed twice"));
        }
        Ok(TermSet {
            terms: ordered,
            log_base,
        })
    }

    /// `{Const, N, NLogN, NSquared}`.
    pub fn quadratic(log_base: f64) -> Self {
        Self::new(&[Term::Const, Term::N, Term::NLogN, Term::NSquared], log_base).expect("valid")
    }

    /// `{Const, N, NLogN}`.
    pub fn n_log_n(log_base: f64) -> Self {
        Self::new(&[Term::Const, Term::N, Term::NLogN], log_base).expect("valid")
    }

    /// `{Const, N}`.
    pub fn linear() -> Self {
        Self::new(&[Term::Const, Term::N], 2.0).expect("valid")
    }

    /// Parses a comma-separated list such as `const,n,nlogn,n2`.
    pub fn parse(list: &str, log_base: f64) -> Result<Self> {
        let terms = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Term>>>()?;
        Self::new(&terms, log_base)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    pub fn has_intercept(&self) -> bool {
        self.terms.first() == Some(&Term::Const)
    }

    pub fn with_log_base(&self, log_base: f64) -> Result<Self> {
        Self::new(&self.terms, log_base)
    }

    pub fn row(&self, n: f64) -> Vec<f64> {
        self.terms.iter().map(|t| t.eval(n, self.log_base)).collect()
    }
}

impl fmt::Display for TermSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self
            .terms
            .iter()
            .filter(|&&t| t != Term::Const)
            .map(|t| t.label(self.log_base))
            .collect();
        write!(f, "{}", names.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefStat {
    pub term: Term,
    pub coef: f64,
    pub se: f64,
    pub t: f64,
    pub p: f64,
    /// `sqrt([(X^T X)^{-1}]_jj)`: the standard error per unit of `S`.
    pub se_unit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaRow {
    pub df: u64,
    pub ss: f64,
    pub ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anova {
    pub regression: AnovaRow,
    pub residual: AnovaRow,
    pub total_df: u64,
    pub total_ss: f64,
    pub f: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObsDiag {
    pub n: f64,
    pub y: f64,
    pub fit: f64,
    pub se_fit: f64,
    pub residual: f64,
    pub leverage: f64,
    pub std_resid: f64,
    pub large: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub terms: TermSet,
    pub coefs: Vec<CoefStat>,
    pub s: f64,
    pub r2: f64,
    pub r2_adj: f64,
    pub press: f64,
    pub r2_pred: f64,
    pub anova: Anova,
    /// Sequential SS for each non-constant term, in entry order.
    pub seq_ss: Vec<(Term, f64)>,
    pub obs: Vec<ObsDiag>,
    pub exact_fit: bool,
}

impl RegressionFit {
    pub fn coef(&self, term: Term) -> Option<&CoefStat> {
        self.coefs.iter().find(|c| c.term == term)
    }

    /// `x(n)^T beta`.
    pub fn predict(&self, n: f64) -> f64 {
        self.coefs
            .iter()
            .map(|c| c.coef * c.term.eval(n, self.terms.log_base))
            .sum()
    }

    pub fn sse(&self) -> f64 {
        self.anova.residual.ss
    }

    pub fn ssr(&self) -> f64 {
        self.anova.regression.ss
    }

    pub fn df_resid(&self) -> u64 {
        self.anova.residual.df
    }
}

pub fn fit_ols(table: &ResponseTable, terms: &TermSet) -> Result<RegressionFit> {
    let ns: Vec<f64> = table.rows().iter().map(|r| r.n as f64).collect();
    fit_points(&ns, &table.responses(), terms)
}

/// Fits `ys` against the terms evaluated at `ns`. Rows may be in any order.
pub fn fit_points(ns: &[f64], ys: &[f64], terms: &TermSet) -> Result<RegressionFit> {
    if ns.len() != ys.len() {
        return Err(Error::invalid(format!(
            "{} sizes but {} responses",
            ns.len(),
            ys.len()
        )));
    }
    if ns.iter().chain(ys).any(|v| !v.is_finite()) || ns.iter().any(|&n| n < 0.0) {
        return Err(Error::invalid("sizes must be finite and non-negative, responses finite"));
    }
    let m = ns.len();
    let p = terms.terms.len();
    if m <= p {
        return Err(Error::NoResidualDf { rows: m, params: p });
    }

    let mut cols = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    for &term in &terms.terms {
        let col: Vec<f64> = ns.iter().map(|&n| term.eval(n, terms.log_base)).collect();
        let scale = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::SingularDesign {
                term: term.label(terms.log_base).into(),
            });
        }
        cols.push(col.into_iter().map(|v| v / scale).collect::<Vec<_>>());
        scales.push(scale);
    }
    let col_norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let qr = Householder::factor(cols);
    for (j, &term) in terms.terms.iter().enumerate() {
        if qr.r(j, j).abs() <= RANK_TOL * col_norms[j] {
            return Err(Error::SingularDesign {
                term: term.label(terms.log_base).into(),
            });
        }
    }

    let qty = qr.qt_mul(ys);
    let beta_scaled = qr.solve_r(&qty);
    let mut head = qty.clone();
    head[p..].iter_mut().for_each(|v| *v = 0.0);
    let fitted = qr.q_mul(&head);
    let residuals: Vec<f64> = ys.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let thin_q = qr.thin_q();
    let leverage: Vec<f64> = (0..m)
        .map(|i| thin_q.iter().map(|q| q[i] * q[i]).sum())
        .collect();
    let inv_gram = qr.inv_gram_diag();

    let intercept = terms.has_intercept();
    let df_resid = (m - p) as u64;
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let mse = sse / df_resid as f64;
    let s = mse.sqrt();

    let seq_ss: Vec<(Term, f64)> = terms
        .terms
        .iter()
        .enumerate()
        .filter(|(_, &t)| t != Term::Const)
        .map(|(j, &t)| (t, qty[j] * qty[j]))
        .collect();
    let ssr: f64 = seq_ss.iter().map(|(_, ss)| ss).sum();
    let (sst, df_total) = if intercept {
        let mean = ys.iter().sum::<f64>() / m as f64;
        (ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>(), (m - 1) as u64)
    } else {
        (ys.iter().map(|y| y * y).sum::<f64>(), m as u64)
    };
    let df_reg = if intercept { p - 1 } else { p } as u64;
    let msr = if df_reg > 0 { ssr / df_reg as f64 } else { f64::NAN };
    let f = msr / mse;
    let f_p = if df_reg > 0 {
        f_upper_p(f, df_reg, df_resid)?
    } else {
        f64::NAN
    };

    let mut coefs = Vec::with_capacity(p);
    for (j, &term) in terms.terms.iter().enumerate() {
        let coef = beta_scaled[j] / scales[j];
        let se_unit = inv_gram[j].sqrt() / scales[j];
        let se = s * se_unit;
        let t = coef / se;
        coefs.push(CoefStat {
            term,
            coef,
            se,
            t,
            p: t_two_sided_p(t, df_resid)?,
            se_unit,
        });
    }

    let rms_y = (ys.iter().map(|y| y * y).sum::<f64>() / m as f64).sqrt();
    let exact_fit = s <= EXACT_FIT_REL * rms_y;
    let obs: Vec<ObsDiag> = (0..m)
        .map(|i| {
            let h = leverage[i];
            let std_resid = if exact_fit {
                0.0
            } else {
                residuals[i] / (s * (1.0 - h).sqrt())
            };
            ObsDiag {
                n: ns[i],
                y: ys[i],
                fit: fitted[i],
                se_fit: s * h.sqrt(),
                residual: residuals[i],
                leverage: h,
                std_resid,
                large: std_resid.abs() > LARGE_STD_RESID,
            }
        })
        .collect();
    let press: f64 = residuals
        .iter()
        .zip(&leverage)
        .map(|(e, h)| {
            let d = e / (1.0 - h);
            d * d
        })
        .sum();

    Ok(RegressionFit {
        terms: terms.clone(),
        coefs,
        s,
        r2: ssr / sst,
        r2_adj: 1.0 - mse / (sst / df_total as f64),
        press,
        r2_pred: 1.0 - press / sst,
        anova: Anova {
            regression: AnovaRow {
                df: df_reg,
                ss: ssr,
                ms: msr,
            },
            residual: AnovaRow {
                df: df_resid,
                ss: sse,
                ms: mse,
            },
            total_df: df_total,
            total_ss: sst,
            f,
            p: f_p,
        },
        seq_ss,
        obs,
        exact_fit,
    })
}
