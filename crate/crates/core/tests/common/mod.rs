#![allow(dead_code)]

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{ToPrimitive, Zero};

use empirical_o::TermSet;

/// Least squares by exact rational normal equations over the f64 design
/// entries. Returns coefficients in term order, or `None` when singular.
pub fn exact_ols(ns: &[f64], ys: &[f64], terms: &TermSet) -> Option<Vec<f64>> {
    let rows: Vec<Vec<BigRational>> = ns
        .iter()
        .map(|&n| terms.row(n).into_iter().map(|v| BigRational::from_float(v).unwrap()).collect())
        .collect();
    let y: Vec<BigRational> = ys.iter().map(|&v| BigRational::from_float(v).unwrap()).collect();
    let p = terms.terms().len();
    // Augmented [X^T X | X^T y].
    let mut a = vec![vec![BigRational::zero(); p + 1]; p];
    for (r, yi) in rows.iter().zip(&y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += &r[i] * &r[j];
            }
            a[i][p] += &r[i] * yi;
        }
    }
    for c in 0..p {
        let piv = (c..p).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        for r in 0..p {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..=p {
                    let d = &f * &a[c][k];
                    a[r][k] -= d;
                }
            }
        }
    }
    Some((0..p).map(|i| (&a[i][p] / &a[i][i]).to_f64().unwrap()).collect())
}

pub fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct RefCounts {
    pub comparisons: u64,
    pub exchanges: u64,
    pub partition_calls: u64,
}

/// Textbook recursive Lomuto quicksort, last-element pivot, strict `<`.
pub fn reference_quicksort<T: PartialOrd>(a: &mut [T], c: &mut RefCounts) {
    if a.len() < 2 {
        return;
    }
    c.partition_calls += 1;
    let hi = a.len() - 1;
    let mut i = 0;
    for j in 0..hi {
        c.comparisons += 1;
        if a[j] < a[hi] {
            a.swap(i, j);
            c.exchanges += 1;
            i += 1;
        }
    }
    a.swap(i, hi);
    c.exchanges += 1;
    let (left, right) = a.split_at_mut(i);
    reference_quicksort(left, c);
    reference_quicksort(&mut right[1..], c);
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) || a == b
}
