mod common;

use empirical_o::sortlab::{f64_less, quicksort_instrumented_by, sorted_with_counts};
use empirical_o::workloads::{gen_heavy_tail, gen_tied, gen_uniform, HeavyTailSpec, TieDensitySpec, UniformKSpec};
use empirical_o::{quicksort_instrumented, Seed};
use proptest::prelude::*;

use common::{reference_quicksort, RefCounts};

fn check_against_reference<T: Ord + Clone + std::fmt::Debug>(input: &[T]) -> Result<(), TestCaseError> {
    let (out, counts) = sorted_with_counts(input);
    prop_assert!(out.windows(2).all(|w| w[0] <= w[1]));
    let mut a = input.to_vec();
    a.sort();
    prop_assert_eq!(&out, &a);
    let mut r = input.to_vec();
    let mut rc = RefCounts::default();
    reference_quicksort(&mut r, &mut rc);
    prop_assert_eq!(counts.comparisons, rc.comparisons);
    prop_assert_eq!(counts.exchanges, rc.exchanges);
    prop_assert_eq!(counts.partition_calls, rc.partition_calls);
    if input.len() >= 2 {
        prop_assert!(counts.comparisons >= input.len() as u64 - 1);
    }
    Ok(())
}

proptest! {
    #[test]
    fn arbitrary_integers(v in prop::collection::vec(-50i64..50, 0..300)) {
        check_against_reference(&v)?;
    }

    #[test]
    fn uniform_family(n in 0usize..2000, k in 1u64..5000, seed in any::<u64>()) {
        check_against_reference(&gen_uniform(UniformKSpec { n, k }, Seed(seed)).unwrap())?;
    }

    #[test]
    fn tied_family(n in 1usize..2000, frac in 0.0f64..1.0, exact in any::<bool>(), seed in any::<u64>()) {
        let td = 1.0 + frac * (n as f64 - 1.0);
        let spec = TieDensitySpec { n, tie_density: td, exact_multiset: exact };
        check_against_reference(&gen_tied(spec, Seed(seed)).unwrap())?;
    }

    #[test]
    fn heavy_tail_family(n in 0usize..2000, seed in any::<u64>()) {
        let v = gen_heavy_tail(HeavyTailSpec { n }, Seed(seed)).unwrap().values;
        let mut s = v.clone();
        let c = quicksort_instrumented_by(&mut s, f64_less);
        prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
        let mut want = v.clone();
        want.sort_by(f64::total_cmp);
        prop_assert_eq!(&s, &want);
        let mut r = v;
        let mut rc = RefCounts::default();
        reference_quicksort(&mut r, &mut rc);
        prop_assert_eq!(c.comparisons, rc.comparisons);
    }

    #[test]
    fn counts_are_a_function_of_the_input(v in prop::collection::vec(any::<u32>(), 0..200)) {
        let (_, a) = sorted_with_counts(&v);
        let (_, b) = sorted_with_counts(&v);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn equal_and_sorted_inputs_are_quadratic() {
    for m in [2u64, 10, 100, 1000, 5000] {
        let mut eq = vec![7u8; m as usize];
        assert_eq!(quicksort_instrumented(&mut eq).comparisons, m * (m - 1) / 2);
        let mut asc: Vec<u64> = (1..=m).collect();
        assert_eq!(quicksort_instrumented(&mut asc).comparisons, m * (m - 1) / 2);
    }
}

#[test]
fn ties_degrade_comparisons() {
    // At fixed n, K = 1 needs at least as many comparisons as K = n, for
    // every seed tried.
    let n = 4096;
    for s in 0..20 {
        let mut a = gen_uniform(UniformKSpec { n, k: 1 }, Seed(s)).unwrap();
        let mut b = gen_uniform(UniformKSpec { n, k: n as u64 }, Seed(s)).unwrap();
        assert!(quicksort_instrumented(&mut a).comparisons >= quicksort_instrumented(&mut b).comparisons);
    }
}
