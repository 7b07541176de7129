use empirical_o::workloads::{
    gen_heavy_tail, gen_tied, gen_uniform, heavy_tail_k, heavy_tail_value, realized_tie_density, HeavyTailSpec,
    TieDensitySpec, UniformKSpec,
};
use empirical_o::Seed;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(sample: &[u64], k: u64) -> f64 {
    let mut counts = vec![0u64; k as usize];
    for &v in sample {
        counts[(v - 1) as usize] += 1;
    }
    let e = sample.len() as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    1.0 - ChiSquared::new((k - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn uniform_passes_chi_square() {
    let v = gen_uniform(UniformKSpec { n: 100_000, k: 50 }, Seed(11)).unwrap();
    let p = chi_square_p(&v, 50);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn tied_matches_uniform_with_derived_support() {
    let t = gen_tied(TieDensitySpec::new(500_000, 1000.0), Seed(3)).unwrap();
    let u = gen_uniform(UniformKSpec { n: 500_000, k: 500 }, Seed(3)).unwrap();
    assert_eq!(t, u);
    assert!((realized_tie_density(&t) - 1000.0).abs() < 1e-9);
}

#[test]
fn heavy_tail_frequencies_and_ks() {
    let n = 1_000_000;
    let d = gen_heavy_tail(HeavyTailSpec { n }, Seed(5)).unwrap();
    assert_eq!(d.cap_events, 0);
    let mut counts = [0u64; 64];
    for &k in &d.ks {
        counts[k as usize] += 1;
    }
    for k in 1..=10 {
        let p = 0.5f64.powi(k as i32);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let dev = (counts[k] as f64 - n as f64 * p).abs();
        assert!(dev <= 4.0 * sigma, "k = {k}: {} vs {}", counts[k], n as f64 * p);
    }
    let mut cum = 0u64;
    let mut ks_stat: f64 = 0.0;
    for (k, c) in counts.iter().enumerate().skip(1) {
        cum += c;
        let f = 1.0 - 0.5f64.powi(k as i32);
        ks_stat = ks_stat.max((cum as f64 / n as f64 - f).abs());
    }
    assert!(ks_stat <= 0.01, "KS = {ks_stat}");
}

#[test]
fn heavy_tail_batch_means_do_not_settle() {
    // 10^5 batches of 10^4 draws, seed chosen before the first run.
    let batches = 100_000u64;
    let mut means = Vec::with_capacity(batches as usize);
    for b in 0..batches {
        let d = gen_heavy_tail(HeavyTailSpec { n: 10_000 }, Seed(1).derive(10_000, b)).unwrap();
        means.push(d.values.iter().map(|x| x.abs()).sum::<f64>() / 10_000.0);
    }
    let m = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
    let cv = var.sqrt() / m;
    assert!(cv > 1.0, "coefficient of variation {cv}");
}

#[test]
fn inverse_cdf_examples() {
    assert_eq!(heavy_tail_k(0.4), 1);
    assert_eq!(heavy_tail_value(1), -2.0);
    assert_eq!(heavy_tail_k(0.75), 2);
    assert_eq!(heavy_tail_value(2), 2.0);
    assert_eq!(heavy_tail_k(0.875), 3);
    assert_eq!(heavy_tail_k(0.8750000000000001), 4);
}

proptest! {
    #[test]
    fn uniform_range_and_determinism(n in 0usize..3000, k in 1u64..1_000_000, seed in any::<u64>()) {
        let a = gen_uniform(UniformKSpec { n, k }, Seed(seed)).unwrap();
        prop_assert_eq!(a.len(), n);
        prop_assert!(a.iter().all(|&v| (1..=k).contains(&v)));
        prop_assert_eq!(a, gen_uniform(UniformKSpec { n, k }, Seed(seed)).unwrap());
    }

    #[test]
    fn heavy_tail_sign_follows_parity(n in 0usize..3000, seed in any::<u64>()) {
        let d = gen_heavy_tail(HeavyTailSpec { n }, Seed(seed)).unwrap();
        for (&x, &k) in d.values.iter().zip(&d.ks) {
            prop_assert!(k >= 1);
            prop_assert_eq!(x < 0.0, k % 2 == 1);
            prop_assert_eq!(x, heavy_tail_value(k));
        }
        prop_assert_eq!(d.clone(), gen_heavy_tail(HeavyTailSpec { n }, Seed(seed)).unwrap());
    }

    #[test]
    fn smallest_k_rule(u in 0.0f64..1.0) {
        let k = heavy_tail_k(u) as i32;
        prop_assert!(1.0 - 0.5f64.powi(k) >= u);
        if k > 1 {
            prop_assert!(1.0 - 0.5f64.powi(k - 1) < u);
        }
    }
}
