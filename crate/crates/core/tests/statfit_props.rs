mod common;

use std::collections::BTreeSet;

use empirical_o::fixtures::data_column;
use empirical_o::statfit::{fit_points, residual_report};
use empirical_o::{fit_ols, t_two_sided_p, Error, ResponseTable, Term, TermSet};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use common::{exact_ols, rel_close};

const TERM_SETS: &[&[Term]] = &[
    &[Term::Const, Term::N],
    &[Term::Const, Term::N, Term::NLogN],
    &[Term::Const, Term::N, Term::NLogN, Term::NSquared],
    &[Term::Const, Term::NLogN, Term::N],
    &[Term::Const, Term::N, Term::NSquared],
    &[Term::N, Term::NLogN],
];

#[derive(Debug, Clone)]
struct Instance {
    ns: Vec<f64>,
    ys: Vec<f64>,
    terms: TermSet,
}

fn instance() -> impl Strategy<Value = Instance> {
    (
        0..TERM_SETS.len(),
        prop::collection::btree_set(2u64..20_000, 7..13),
        prop::collection::vec(0.5f64..2.0, 4),
        prop::collection::vec(any::<bool>(), 4),
        prop::collection::vec(-1.0f64..1.0, 13),
        0.001f64..0.2,
    )
        .prop_map(|(ti, sizes, mags, signs, noise, sigma)| {
            let terms = TermSet::new(TERM_SETS[ti], 2.0).unwrap();
            let ns: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
            let maxes: Vec<f64> = terms
                .terms()
                .iter()
                .map(|t| ns.iter().map(|&n| t.eval(n, 2.0).abs()).fold(0.0, f64::max))
                .collect();
            let ys = ns
                .iter()
                .zip(&noise)
                .map(|(&n, e)| {
                    let signal: f64 = terms
                        .row(n)
                        .iter()
                        .enumerate()
                        .map(|(j, x)| {
                            let s = if signs[j] { 1.0 } else { -1.0 };
                            s * mags[j] * x / maxes[j]
                        })
                        .sum();
                    signal + sigma * e
                })
                .collect();
            Instance { ns, ys, terms }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coefficients_match_exact_normal_equations(inst in instance()) {
        let fit = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        let exact = exact_ols(&inst.ns, &inst.ys, &inst.terms).unwrap();
        for (c, e) in fit.coefs.iter().zip(&exact) {
            prop_assert!(rel_close(c.coef, *e, 1e-8), "{:?}: {} vs {}", c.term, c.coef, e);
        }
    }

    #[test]
    fn anova_identities(inst in instance()) {
        let fit = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        let a = &fit.anova;
        prop_assert!(rel_close(a.total_ss, a.regression.ss + a.residual.ss, 1e-9));
        let seq: f64 = fit.seq_ss.iter().map(|(_, s)| s).sum();
        prop_assert!(rel_close(seq, a.regression.ss, 1e-9));
        let h: f64 = fit.obs.iter().map(|o| o.leverage).sum();
        prop_assert!((h - fit.coefs.len() as f64).abs() < 1e-9);
        prop_assert!(fit.obs.iter().all(|o| o.leverage > 0.0 && o.leverage <= 1.0 + 1e-12));
        prop_assert!(fit.press >= fit.sse() * (1.0 - 1e-12));
        prop_assert_eq!(a.regression.df + a.residual.df, a.total_df);
    }

    #[test]
    fn log_base_equivariance(inst in instance(), base in prop::sample::select(vec![std::f64::consts::E, 10.0, 3.0])) {
        let a = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        let b = fit_points(&inst.ns, &inst.ys, &inst.terms.with_log_base(base).unwrap()).unwrap();
        let ratio = base.log2();
        for (ca, cb) in a.coefs.iter().zip(&b.coefs) {
            prop_assert!(rel_close(ca.t, cb.t, 1e-9));
            prop_assert!(rel_close(ca.p, cb.p, 1e-9) || (ca.p - cb.p).abs() < 1e-14);
            if ca.term == Term::NLogN {
                prop_assert!(rel_close(ca.coef * ratio, cb.coef, 1e-9));
                prop_assert!(rel_close(ca.se * ratio, cb.se, 1e-9));
            } else {
                prop_assert!(rel_close(ca.coef, cb.coef, 1e-9) || (ca.coef - cb.coef).abs() < 1e-12 * ca.se);
            }
        }
        prop_assert!(rel_close(a.s, b.s, 1e-9));
        prop_assert!(rel_close(a.r2, b.r2, 1e-9));
        prop_assert!(rel_close(a.anova.f, b.anova.f, 1e-9));
        for (oa, ob) in a.obs.iter().zip(&b.obs) {
            prop_assert!((oa.fit - ob.fit).abs() <= 1e-9 * oa.fit.abs().max(a.s));
            prop_assert!((oa.residual - ob.residual).abs() <= 1e-9 * a.s.max(oa.y.abs()));
        }
    }

    #[test]
    fn residuals_orthogonal_to_design(inst in instance()) {
        let fit = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        let ynorm = inst.ys.iter().map(|y| y * y).sum::<f64>().sqrt();
        for (j, t) in inst.terms.terms().iter().enumerate() {
            let col: Vec<f64> = inst.ns.iter().map(|&n| inst.terms.row(n)[j]).collect();
            let xnorm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = col.iter().zip(&fit.obs).map(|(x, o)| x * o.residual).sum();
            prop_assert!(dot.abs() <= 1e-8 * xnorm * ynorm, "{t:?}: {dot}");
        }
    }

    #[test]
    fn row_order_is_irrelevant(inst in instance(), rot in 1usize..6) {
        let a = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        let m = inst.ns.len();
        let idx: Vec<usize> = (0..m).map(|i| (i * (2 * rot + 1) + rot) % m).collect();
        let uniq: BTreeSet<_> = idx.iter().collect();
        prop_assume!(uniq.len() == m);
        let ns: Vec<f64> = idx.iter().map(|&i| inst.ns[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| inst.ys[i]).collect();
        let b = fit_points(&ns, &ys, &inst.terms).unwrap();
        prop_assert!(rel_close(a.s, b.s, 1e-9));
        prop_assert!(rel_close(a.anova.f, b.anova.f, 1e-8));
        prop_assert!(rel_close(a.press, b.press, 1e-8));
        for ((_, sa), (_, sb)) in a.seq_ss.iter().zip(&b.seq_ss) {
            prop_assert!(rel_close(*sa, *sb, 1e-8) || (sa - sb).abs() <= 1e-10 * a.anova.total_ss);
        }
        for (ca, cb) in a.coefs.iter().zip(&b.coefs) {
            prop_assert!(rel_close(ca.t, cb.t, 1e-7));
        }
        // Row i of the permuted fit is row idx[i] of the original.
        for (i, &j) in idx.iter().enumerate() {
            prop_assert!((b.obs[i].leverage - a.obs[j].leverage).abs() < 1e-9);
        }
    }

    #[test]
    fn fits_are_x_beta(inst in instance()) {
        let fit = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        for o in &fit.obs {
            let xb: f64 = inst.terms.row(o.n).iter().zip(&fit.coefs).map(|(x, c)| x * c.coef).sum();
            prop_assert!((xb - o.fit).abs() <= 1e-9 * o.fit.abs().max(fit.s));
            prop_assert_eq!(o.large, o.std_resid.abs() > 2.0);
        }
    }

    #[test]
    fn rescaling_response_scales_coefficients(inst in instance(), c in 1e-3f64..1e3) {
        let a = fit_points(&inst.ns, &inst.ys, &inst.terms).unwrap();
        let ys: Vec<f64> = inst.ys.iter().map(|y| y * c).collect();
        let b = fit_points(&inst.ns, &ys, &inst.terms).unwrap();
        prop_assert!(rel_close(a.s * c, b.s, 1e-9));
        for (ca, cb) in a.coefs.iter().zip(&b.coefs) {
            prop_assert!(rel_close(ca.t, cb.t, 1e-8));
        }
    }

    #[test]
    fn t_tail_matches_statrs(t in -40.0f64..40.0, df in 1u64..200) {
        let dist = StudentsT::new(0.0, 1.0, df as f64).unwrap();
        let want = 2.0 * dist.cdf(-t.abs());
        let got = t_two_sided_p(t, df).unwrap();
        prop_assert!((got - want).abs() < 1e-10, "t={t} df={df}: {got} vs {want}");
    }
}

#[test]
fn exact_linear_data() {
    let ns = [1.0, 2.0, 3.0, 4.0, 5.0];
    let ys = [2.0, 4.0, 6.0, 8.0, 10.0];
    let fit = fit_points(&ns, &ys, &TermSet::linear()).unwrap();
    assert!(fit.coefs[0].coef.abs() < 1e-12);
    assert!((fit.coefs[1].coef - 2.0).abs() < 1e-12);
    assert!(fit.sse() < 1e-20);
    assert!((fit.r2 - 1.0).abs() < 1e-12);
    assert!(fit.exact_fit);
    assert!(residual_report(&fit).iter().all(|r| r.residual.abs() < 1e-12 && !r.large));
}

#[test]
fn eight_row_instance_against_oracle() {
    let ns = [3.0, 17.0, 40.0, 85.0, 160.0, 333.0, 700.0, 1500.0];
    let ys = [1.2, 9.0, 31.5, 88.0, 180.5, 420.1, 980.0, 2301.7];
    let terms = TermSet::quadratic(2.0);
    let fit = fit_points(&ns, &ys, &terms).unwrap();
    let exact = exact_ols(&ns, &ys, &terms).unwrap();
    for (c, e) in fit.coefs.iter().zip(&exact) {
        assert!(rel_close(c.coef, *e, 1e-8), "{:?}: {} vs {e}", c.term, c.coef);
    }
}

#[test]
fn flagged_residuals_in_bundled_data() {
    let fit = fit_ols(&data_column("table3:1").unwrap(), &TermSet::n_log_n(2.0)).unwrap();
    let rows = residual_report(&fit);
    assert_eq!(format!("{:.2}", rows[0].std_resid), "-2.22");
    assert!(rows[0].large);
    assert_eq!(format!("{:.2}", rows[9].std_resid), "1.75");
    assert!(!rows[9].large);
    assert_eq!(rows.iter().filter(|r| r.large).count(), 1);

    let fit = fit_ols(&data_column("table5:y").unwrap(), &TermSet::quadratic(2.0)).unwrap();
    let r = residual_report(&fit)[5];
    assert_eq!(format!("{:.4}", r.residual), "0.0396");
    assert_eq!(format!("{:.2}", r.std_resid), "1.87");
}

#[test]
fn singular_and_undersized_designs() {
    let t = ResponseTable::from_points(&[(4, 1.0), (4 + 1, 2.0)]).unwrap();
    assert!(matches!(
        fit_ols(&t, &TermSet::linear()),
        Err(Error::NoResidualDf { rows: 2, params: 2 })
    ));
    let ns = [2.0, 2.0, 2.0, 2.0];
    let err = fit_points(&ns, &[1.0, 2.0, 3.0, 4.0], &TermSet::linear()).unwrap_err();
    assert!(matches!(err, Error::SingularDesign { ref term } if term == "n"), "{err}");
}
