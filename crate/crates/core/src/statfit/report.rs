//! Text renderings of a fit: a block report laid out like a Minitab session
//! and a flat `key=value` dump with round-trip floats.

use std::fmt::Write as _;

use super::{RegressionFit, Term};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub obs: usize,
    pub n: f64,
    pub y: f64,
    pub fit: f64,
    pub se_fit: f64,
    pub residual: f64,
    pub std_resid: f64,
    pub large: bool,
}

/// Per-observation diagnostics in input order, numbered from 1.
pub fn residual_report(fit: &RegressionFit) -> Vec<ResidualRow> {
    fit.obs
        .iter()
        .enumerate()
        .map(|(i, o)| ResidualRow {
            obs: i + 1,
            n: o.n,
            y: o.y,
            fit: o.fit,
            se_fit: o.se_fit,
            residual: o.residual,
            std_resid: o.std_resid,
            large: o.large,
        })
        .collect()
}

/// Fixed notation with `sig` significant digits, scientific outside
/// `[1e-4, 1e7)`.
fn sig(x: f64, sig: i32) -> String {
    if !x.is_finite() {
        return "*".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..7).contains(&mag) {
        return format!("{:.*e}", (sig - 1) as usize, x);
    }
    let decimals = (sig - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn fixed(x: f64, decimals: usize) -> String {
    if x.is_finite() {
        format!("{x:.decimals$}")
    } else {
        "*".into()
    }
}

fn pct(x: f64, decimals: usize) -> String {
    if x.is_finite() {
        format!("{:.decimals$}%", 100.0 * x)
    } else {
        "*".into()
    }
}

fn equation(fit: &RegressionFit, response: &str) -> String {
    let base = fit.terms.log_base();
    let mut s = format!("{response} =");
    for (i, c) in fit.coefs.iter().enumerate() {
        let mag = sig(c.coef.abs(), 6);
        let sign = if c.coef < 0.0 { "-" } else { "+" };
        if i == 0 {
            s.push_str(if c.coef < 0.0 { " - " } else { " " });
        } else {
            let _ = write!(s, " {sign} ");
        }
        s.push_str(&mag);
        if c.term != Term::Const {
            let _ = write!(s, " {}", c.term.label(base));
        }
    }
    s
}

/// Block report: equation, coefficient table, fit summary, ANOVA, sequential
/// SS and observations. With `all_observations` every row is listed,
/// otherwise only flagged ones.
pub fn render_report(fit: &RegressionFit, response: &str, all_observations: bool) -> String {
    let base = fit.terms.log_base();
    let mut out = String::new();
    let _ = writeln!(out, "Regression Analysis: {response} versus {}", fit.terms);
    let _ = writeln!(out);
    let _ = writeln!(out, "The regression equation is");
    let _ = writeln!(out, "{}", equation(fit, response));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<12}{:>16}{:>16}{:>10}{:>8}", "Predictor", "Coef", "SE Coef", "T", "P");
    for c in &fit.coefs {
        let _ = writeln!(
            out,
            "{:<12}{:>16}{:>16}{:>10}{:>8}",
            c.term.label(base),
            sig(c.coef, 6),
            sig(c.se, 6),
            fixed(c.t, 2),
            fixed(c.p, 3)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "S = {}   R-Sq = {}   R-Sq(adj) = {}",
        sig(fit.s, 6),
        pct(fit.r2, 1),
        pct(fit.r2_adj, 1)
    );
    let _ = writeln!(out, "PRESS = {}   R-Sq(pred) = {}", sig(fit.press, 6), pct(fit.r2_pred, 2));
    let _ = writeln!(out);
    let a = &fit.anova;
    let _ = writeln!(out, "Analysis of Variance");
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<16}{:>4}{:>16}{:>16}{:>14}{:>8}", "Source", "DF", "SS", "MS", "F", "P");
    let _ = writeln!(
        out,
        "{:<16}{:>4}{:>16}{:>16}{:>14}{:>8}",
        "Regression",
        a.regression.df,
        sig(a.regression.ss, 6),
        sig(a.regression.ms, 6),
        fixed(a.f, 2),
        fixed(a.p, 3)
    );
    let _ = writeln!(
        out,
        "{:<16}{:>4}{:>16}{:>16}",
        "Residual Error",
        a.residual.df,
        sig(a.residual.ss, 6),
        sig(a.residual.ms, 6)
    );
    let _ = writeln!(out, "{:<16}{:>4}{:>16}", "Total", a.total_df, sig(a.total_ss, 6));
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<16}{:>4}{:>16}", "Source", "DF", "Seq SS");
    for (t, ss) in &fit.seq_ss {
        let _ = writeln!(out, "{:<16}{:>4}{:>16}", t.label(base), 1, sig(*ss, 6));
    }
    let _ = writeln!(out);

    let rows = residual_report(fit);
    let shown: Vec<_> = rows.iter().filter(|r| all_observations || r.large).collect();
    if all_observations {
        let _ = writeln!(out, "Observations");
    } else {
        let _ = writeln!(out, "Unusual Observations");
    }
    let _ = writeln!(
        out,
        "{:>4}{:>12}{:>14}{:>14}{:>12}{:>12}{:>10}",
        "Obs", "n", response, "Fit", "SE Fit", "Residual", "St Resid"
    );
    for r in &shown {
        let _ = writeln!(
            out,
            "{:>4}{:>12}{:>14}{:>14}{:>12}{:>12}{:>10}",
            r.obs,
            r.n,
            sig(r.y, 6),
            sig(r.fit, 6),
            sig(r.se_fit, 4),
            sig(r.residual, 4),
            format!("{}{}", fixed(r.std_resid, 2), if r.large { "R" } else { "" })
        );
    }
    if shown.iter().any(|r| r.large) {
        let _ = writeln!(out);
        let _ = writeln!(out, "R denotes an observation with a large standardized residual.");
    }
    out
}

/// Every statistic as `key=value`, one per line.
pub fn render_kv(fit: &RegressionFit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "log_base={}", fit.terms.log_base());
    for c in &fit.coefs {
        let k = c.term.key();
        let _ = writeln!(out, "coef.{k}={}", c.coef);
        let _ = writeln!(out, "se.{k}={}", c.se);
        let _ = writeln!(out, "t.{k}={}", c.t);
        let _ = writeln!(out, "p.{k}={}", c.p);
    }
    let _ = writeln!(out, "S={}", fit.s);
    let _ = writeln!(out, "r2={}", fit.r2);
    let _ = writeln!(out, "r2_adj={}", fit.r2_adj);
    let _ = writeln!(out, "press={}", fit.press);
    let _ = writeln!(out, "r2_pred={}", fit.r2_pred);
    let a = &fit.anova;
    let _ = writeln!(out, "anova.regression.df={}", a.regression.df);
    let _ = writeln!(out, "anova.regression.ss={}", a.regression.ss);
    let _ = writeln!(out, "anova.regression.ms={}", a.regression.ms);
    let _ = writeln!(out, "anova.residual.df={}", a.residual.df);
    let _ = writeln!(out, "anova.residual.ss={}", a.residual.ss);
    let _ = writeln!(out, "anova.residual.ms={}", a.residual.ms);
    let _ = writeln!(out, "anova.total.df={}", a.total_df);
    let _ = writeln!(out, "anova.total.ss={}", a.total_ss);
    let _ = writeln!(out, "anova.f={}", a.f);
    let _ = writeln!(out, "anova.p={}", a.p);
    for (t, ss) in &fit.seq_ss {
        let _ = writeln!(out, "seqss.{}={ss}", t.key());
    }
    for r in residual_report(fit) {
        let _ = writeln!(
            out,
            "obs.{}={},{},{},{},{},{},{}",
            r.obs,
            r.n,
            r.y,
            r.fit,
            r.se_fit,
            r.residual,
            r.std_resid,
            if r.large { "R" } else { "" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(sig(0.0876502, 6), "0.0876502");
        assert_eq!(sig(16607.5833, 6), "16607.6");
        assert_eq!(sig(-0.540728, 4), "-0.5407");
        assert_eq!(sig(5.22e-12, 4), "5.220e-12");
        assert_eq!(sig(f64::NAN, 4), "*");
    }
}
