//! Seeded input generators for the three experiment families.
//!
//! Every generator is a pure function of `(spec, seed)`. The stream comes from
//! `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha 0.9, 256-bit state); integer
//! draws use rand's bounded `random_range`, which rejects instead of reducing
//! modulo `K`. Changing either crate version may change the fixtures.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest exponent the heavy-tail sampler will emit.
pub const HEAVY_TAIL_K_CAP: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed for one trial of one grid point.
    ///
    /// Depends only on `(self, n, trial)`, never on the family or its
    /// parameter, so two experiments that generate the same distribution at
    /// the same `n` see identical inputs.
    pub fn derive(self, n: u64, trial: u64) -> Seed {
        let a = splitmix64(self.0 ^ 0x6a09_e667_f3bc_c908);
        let b = splitmix64(a ^ n.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        Seed(splitmix64(b ^ trial.wrapping_mul(0xbf58_476d_1ce4_e5b9)))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Discrete uniform on `1..=k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformKSpec {
    pub n: usize,
    pub k: u64,
}

/// Uniform samples whose expected copies per distinct value is `tie_density`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieDensitySpec {
    pub n: usize,
    pub tie_density: f64,
    /// Emit exactly `n / K` copies of each value (remainder spread over the
    /// smallest values) in shuffled order instead of i.i.d. draws.
    pub exact_multiset: bool,
}

impl TieDensitySpec {
    pub fn new(n: usize, tie_density: f64) -> Self {
        TieDensitySpec {
            n,
            tie_density,
            exact_multiset: false,
        }
    }

    /// Support size `K = round(n / t_d)`.
    pub fn support(&self) -> Result<u64> {
        let td = self.tie_density;
        if !td.is_finite() || td < 1.0 {
            return Err(Error::invalid(format!(
                "tie density must be at least 1, got {td}"
            )));
        }
        if td > self.n as f64 {
            return Err(Error::invalid(format!(
                "tie density {td} exceeds sample size {}",
                self.n
            )));
        }
        Ok(((self.n as f64 / td).round() as u64).max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeavyTailSpec {
    pub n: usize,
}

/// Output of the heavy-tail sampler. `ks[i]` is the exponent behind `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavyTailDraws {
    pub values: Vec<f64>,
    pub ks: Vec<u32>,
    pub cap_events: u64,
}

fn alloc<T>(n: usize) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(n).map_err(|e| Error::ResourceExhausted {
        n: n as u64,
        message: e.to_string(),
    })?;
    Ok(v)
}

pub fn gen_uniform(spec: UniformKSpec, seed: Seed) -> Result<Vec<u64>> {
    if spec.k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    let mut out = alloc(spec.n)?;
    let mut rng = seed.rng();
    out.extend((0..spec.n).map(|_| rng.random_range(1..=spec.k)));
    Ok(out)
}

pub fn gen_tied(spec: TieDensitySpec, seed: Seed) -> Result<Vec<u64>> {
    let k = spec.support()?;
    if !spec.exact_multiset {
        return gen_uniform(UniformKSpec { n: spec.n, k }, seed);
    }
    let mut out = alloc(spec.n)?;
    let base = spec.n as u64 / k;
    let extra = spec.n as u64 % k;
    for v in 1..=k {
        let copies = base + u64::from(v <= extra);
        out.extend(std::iter::repeat_n(v, copies as usize));
    }
    out.shuffle(&mut seed.rng());
    Ok(out)
}

/// Mean copies per distinct value actually present, `n / K'`.
pub fn realized_tie_density(sample: &[u64]) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let mut sorted = sample.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sample.len() as f64 / sorted.len() as f64
}

/// Smallest `k >= 1` with `1 - 2^-k >= u`, for `u` in `[0, 1)`.
///
/// `1 - u` is exact for the 53-bit uniforms rand produces, and
/// `2^-k <= 1 - u` holds exactly when `k >= -exponent(1 - u)`, so the result
/// is read off the binary exponent with no logarithm. Boundary values resolve
/// to the smaller `k`.
pub fn heavy_tail_k(u: f64) -> u32 {
    debug_assert!((0.0..1.0).contains(&u));
    let v = 1.0 - u;
    let exp = ((v.to_bits() >> 52) & 0x7ff) as i32 - 1023;
    (-exp).max(1) as u32
}

/// `(-1)^k 2^k / k`.
pub fn heavy_tail_value(k: u32) -> f64 {
    let mag = 2f64.powi(k as i32) / k as f64;
    if k % 2 == 1 {
        -mag
    } else {
        mag
    }
}

pub fn gen_heavy_tail(spec: HeavyTailSpec, seed: Seed) -> Result<HeavyTailDraws> {
    let mut values = alloc(spec.n)?;
    let mut ks = alloc(spec.n)?;
    let mut cap_events = 0;
    let mut rng = seed.rng();
    for _ in 0..spec.n {
        let mut k = heavy_tail_k(rng.random::<f64>());
        if k > HEAVY_TAIL_K_CAP {
            k = HEAVY_TAIL_K_CAP;
            cap_events += 1;
        }
        ks.push(k);
        values.push(heavy_tail_value(k));
    }
    Ok(HeavyTailDraws {
        values,
        ks,
        cap_events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_support() {
        let v = gen_uniform(UniformKSpec { n: 5, k: 1 }, Seed(9)).unwrap();
        assert_eq!(v, vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn empty_and_zero_k() {
        assert!(gen_uniform(UniformKSpec { n: 0, k: 10 }, Seed(1))
            .unwrap()
            .is_empty());
        assert!(matches!(
            gen_uniform(UniformKSpec { n: 3, k: 0 }, Seed(1)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn tied_full_density_is_constant() {
        let v = gen_tied(TieDensitySpec::new(1000, 1000.0), Seed(3)).unwrap();
        assert!(v.iter().all(|&x| x == 1));
    }

    #[test]
    fn tied_rejects_density_above_n() {
        assert!(gen_tied(TieDensitySpec::new(10, 11.0), Seed(3)).is_err());
        assert!(gen_tied(TieDensitySpec::new(10, 0.5), Seed(3)).is_err());
    }

    #[test]
    fn tied_delegates_to_uniform() {
        let spec = TieDensitySpec::new(500_000, 1000.0);
        assert_eq!(spec.support().unwrap(), 500);
        let a = gen_tied(TieDensitySpec::new(2000, 10.0), Seed(77)).unwrap();
        let b = gen_uniform(UniformKSpec { n: 2000, k: 200 }, Seed(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_count_matches_occupancy() {
        // E[distinct] = K (1 - (1 - 1/K)^n) ~= 632.3 for n = K = 1000;
        // sd is about 8.6, so 5 sd covers every seed we try.
        let expected = 1000.0 * (1.0 - (1.0 - 1e-3f64).powi(1000));
        for s in 0..5 {
            let v = gen_tied(TieDensitySpec::new(1000, 1.0), Seed(s)).unwrap();
            let distinct = 1000.0 / realized_tie_density(&v);
            assert!((distinct - expected).abs() < 43.0, "{distinct}");
        }
    }

    #[test]
    fn exact_multiset_has_exact_counts() {
        let spec = TieDensitySpec {
            n: 1003,
            tie_density: 10.0,
            exact_multiset: true,
        };
        let v = gen_tied(spec, Seed(5)).unwrap();
        assert_eq!(v.len(), 1003);
        let mut counts = vec![0u32; 101];
        for &x in &v {
            counts[x as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        assert!(counts[1..].iter().all(|&c| c == 10 || c == 11));
        assert_eq!(counts[1..].iter().filter(|&&c| c == 11).count(), 3);
    }

    #[test]
    fn inverse_cdf_boundaries() {
        assert_eq!(heavy_tail_k(0.0), 1);
        assert_eq!(heavy_tail_k(0.4), 1);
        assert_eq!(heavy_tail_k(0.5), 1);
        assert_eq!(heavy_tail_k(0.5000001), 2);
        assert_eq!(heavy_tail_k(0.75), 2);
        assert_eq!(heavy_tail_k(0.875), 3);
        assert_eq!(heavy_tail_k(0.9), 4);
        assert_eq!(heavy_tail_value(1), -2.0);
        assert_eq!(heavy_tail_value(2), 2.0);
        assert_eq!(heavy_tail_value(3), -8.0 / 3.0);
    }

    #[test]
    fn inverse_cdf_agrees_with_linear_search() {
        let mut rng = Seed(11).rng();
        for _ in 0..10_000 {
            let u: f64 = rng.random();
            let mut k = 1;
            while 1.0 - 2f64.powi(-k) < u {
                k += 1;
            }
            assert_eq!(heavy_tail_k(u), k as u32, "u = {u}");
        }
    }

    #[test]
    fn sub_seeds_differ_by_coordinate() {
        let s = Seed(1);
        assert_ne!(s.derive(10, 0), s.derive(10, 1));
        assert_ne!(s.derive(10, 0), s.derive(11, 0));
        assert_ne!(s.derive(10, 0), Seed(2).derive(10, 0));
        assert_eq!(s.derive(10, 4), s.derive(10, 4));
    }
}
