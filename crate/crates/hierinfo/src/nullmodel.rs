//! The permutation null model: uniform random relabelings, the expected
//! HMI under relabeling (EHMI), the chance-adjusted HMI (AHMI), and the
//! shuffle-k perturbation.
//!
//! Because relabeling both partitions by (τ, σ) changes the HMI exactly as
//! relabeling one of them by ρ = τσ⁻¹ does, the expected value is an
//! average of `I(ρT; S)` over permutations ρ. For small universes
//! (`n! <= exhaustive_threshold`) the average is computed exactly over all
//! `n!` permutations; otherwise permutations are sampled until the
//! relative standard error of the mean falls below a target.

use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hpart::{Element, HierPartition, Permutation};
use crate::infotheory::{hentropy, hmi_recursive, MeanKind};

/// Seed plus sub-stream index; identical values reproduce identical sample
/// sequences, and disjoint streams are independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        RngSeed { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RngSeed {
            seed: self.seed,
            stream,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A uniform random permutation of `{1..n}` (Fisher-Yates: all `n!`
/// outcomes equiprobable).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    use rand::seq::SliceRandom;
    let mut map: Vec<Element> = (1..=n as Element).collect();
    map.shuffle(rng);
    Permutation::new(map).expect("shuffle preserves bijection")
}

/// Shuffles the identities of `k` elements chosen uniformly at random: the
/// chosen elements are permuted uniformly among themselves (fixed points
/// allowed), all other elements stay put. The tree shape is unchanged.
/// With `k = n` this is exactly the uniform permutation model.
pub fn shuffle_k<R: Rng + ?Sized>(
    hp: &HierPartition,
    k: usize,
    rng: &mut R,
) -> Result<HierPartition> {
    let n = hp.n();
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if k <= 1 {
        // A permutation of at most one element is the identity.
        if k == 1 {
            let _ = rand::seq::index::sample(rng, n, 1);
        }
        return Ok(hp.clone());
    }
    use rand::seq::SliceRandom;
    let chosen = rand::seq::index::sample(rng, n, k).into_vec();
    let mut images: Vec<usize> = chosen.clone();
    images.shuffle(rng);
    let mut map: Vec<Element> = (1..=n as Element).collect();
    for (&pos, &img) in chosen.iter().zip(&images) {
        map[pos] = img as Element + 1;
    }
    let perm = Permutation::new(map).expect("partial shuffle preserves bijection");
    hp.apply_permutation(&perm)
}

/// Sampling controls for [`ehmi`].
#[derive(Clone, Copy, Debug)]
pub struct EhmiParams {
    /// Stop when sem / |mean| drops below this (default 0.01).
    pub rel_sem_target: f64,
    /// Never stop on the SEM rule before this many samples.
    pub min_samples: u64,
    /// Hard cap; hitting it clears the `converged` flag.
    pub max_samples: u64,
    /// Enumerate all permutations exactly when `n! <=` this (default 5040,
    /// i.e. n <= 7); exact enumeration is cheaper there than Monte-Carlo
    /// convergence and yields `sem = 0`.
    pub exhaustive_threshold: u64,
}

impl Default for EhmiParams {
    fn default() -> Self {
        EhmiParams {
            rel_sem_target: 0.01,
            min_samples: 30,
            max_samples: 100_000,
            exhaustive_threshold: 5040,
        }
    }
}

/// The estimated (or exact) expected HMI under the permutation model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhmiEstimate {
    pub mean: f64,
    /// Standard error of the mean; zero in exhaustive mode.
    pub sem: f64,
    /// Number of HMI evaluations behind the mean.
    pub samples: u64,
    /// True when all `n!` permutations were enumerated.
    pub exhausted: bool,
    /// False only when sampling hit `max_samples` before the SEM target.
    pub converged: bool,
}

pub fn factorial(n: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for i in 2..=n as u64 {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

/// Expected HMI `<I(T;S)>` under uniform relabeling.
pub fn ehmi<R: Rng + ?Sized>(
    t: &HierPartition,
    s: &HierPartition,
    params: &EhmiParams,
    rng: &mut R,
) -> Result<EhmiEstimate> {
    if t.n() != s.n() {
        return Err(Error::SizeMismatch {
            left: t.n(),
            right: s.n(),
        });
    }
    assert!(params.rel_sem_target > 0.0, "rel_sem_target must be positive");
    let n = t.n();

    if let Some(total) = factorial(n) {
        if total <= params.exhaustive_threshold {
            return Ok(ehmi_exhaustive(t, s, total));
        }
    }
    ehmi_sampled(t, s, params, rng)
}

fn ehmi_exhaustive(t: &HierPartition, s: &HierPartition, total: u64) -> EhmiEstimate {
    let n = t.n();
    let mut values: Vec<f64> = (1..=n as Element)
        .permutations(n)
        .map(|map| {
            let perm = Permutation::new(map).expect("permutations are bijections");
            let relabeled = t.apply_permutation(&perm).expect("same universe");
            hmi_recursive(&relabeled, s).expect("same universe")
        })
        .collect();
    debug_assert_eq!(values.len() as u64, total);
    // Summing in sorted order makes the mean independent of the
    // enumeration order, so pre-relabeling either argument leaves the
    // estimate bit-identical.
    values.sort_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / total as f64;
    EhmiEstimate {
        mean,
        sem: 0.0,
        samples: total,
        exhausted: true,
        converged: true,
    }
}

fn ehmi_sampled<R: Rng + ?Sized>(
    t: &HierPartition,
    s: &HierPartition,
    params: &EhmiParams,
    rng: &mut R,
) -> Result<EhmiEstimate> {
    let n = t.n();
    let min_samples = params.min_samples.max(2);
    let mut count = 0u64;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let converged = loop {
        let rho = random_permutation(n, rng);
        let value = hmi_recursive(&t.apply_permutation(&rho)?, s)?;
        count += 1;
        let delta = value - mean;
        mean += delta / count as f64;
        m2 += delta * (value - mean);

        if count >= min_samples {
            let sem = (m2 / (count as f64 - 1.0) / count as f64).sqrt();
            // Near-zero means make the relative rule meaningless; fall back
            // to an absolute SEM target there.
            let hit = if mean.abs() < 1e-6 {
                sem < 1e-4
            } else {
                sem / mean.abs() < params.rel_sem_target
            };
            if hit {
                break true;
            }
        }
        if count >= params.max_samples {
            break false;
        }
    };
    let sem = if count < 2 {
        0.0
    } else {
        (m2 / (count as f64 - 1.0) / count as f64).sqrt()
    };
    Ok(EhmiEstimate {
        mean,
        sem,
        samples: count,
        exhausted: false,
        converged,
    })
}

/// Forms the adjusted value `(I - <I>) / (M(H_T, H_S) - <I>)` from
/// already-computed pieces. `identical` marks `T = S`, where
/// `I(T;T) = M(H,H)` holds exactly by definition and the result is exactly
/// one (still subject to the degeneracy check).
pub fn adjusted_from_estimate(
    i: f64,
    h_t: f64,
    h_s: f64,
    mean: MeanKind,
    expected: &EhmiEstimate,
    identical: bool,
) -> Result<f64> {
    let denom = mean.apply(h_t, h_s) - expected.mean;
    if denom.abs() < 1e-9 {
        return Err(Error::DegenerateDenominator(format!(
            "M(H,H) - <I> = {denom:.3e}"
        )));
    }
    if identical {
        return Ok(1.0);
    }
    Ok((i - expected.mean) / denom)
}

/// Adjusted HMI `(I - <I>) / (M(H(T), H(S)) - <I>)` together with the EHMI
/// estimate used for the adjustment.
pub fn ahmi_with_estimate<R: Rng + ?Sized>(
    t: &HierPartition,
    s: &HierPartition,
    mean: MeanKind,
    params: &EhmiParams,
    rng: &mut R,
) -> Result<(f64, EhmiEstimate)> {
    let expected = ehmi(t, s, params, rng)?;
    let identical = t == s;
    let i = if identical { 0.0 } else { hmi_recursive(t, s)? };
    let value = adjusted_from_estimate(i, hentropy(t), hentropy(s), mean, &expected, identical)?;
    Ok((value, expected))
}

/// Adjusted HMI; equals 1 when `T = S` (and the denominator is
/// non-degenerate) and 0 in expectation for unrelated relabelings.
pub fn ahmi<R: Rng + ?Sized>(
    t: &HierPartition,
    s: &HierPartition,
    mean: MeanKind,
    params: &EhmiParams,
    rng: &mut R,
) -> Result<f64> {
    ahmi_with_estimate(t, s, mean, params, rng).map(|(a, _)| a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn hp(text: &str) -> HierPartition {
        HierPartition::parse(text).unwrap()
    }

    #[test]
    fn permutation_of_one_element_is_identity() {
        let mut rng = RngSeed::new(5).rng();
        for _ in 0..10 {
            assert_eq!(random_permutation(1, &mut rng), Permutation::identity(1));
        }
    }

    #[test]
    fn permutations_are_uniform_chi_square() {
        // 60000 draws over the 6 permutations of n = 3; the chi-square
        // statistic with 5 degrees of freedom stays below the upper 0.001
        // quantile 20.515 for a healthy generator.
        let mut rng = RngSeed::new(12345).rng();
        let draws = 60_000;
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..draws {
            let p = random_permutation(3, &mut rng);
            *counts.entry(p.as_slice().to_vec()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 20.515, "chi2 = {chi2}");
    }

    #[test]
    fn permutation_sequence_is_reproducible() {
        let a: Vec<Vec<Element>> = {
            let mut rng = RngSeed::new(7).rng();
            (0..5)
                .map(|_| random_permutation(6, &mut rng).as_slice().to_vec())
                .collect()
        };
        let b: Vec<Vec<Element>> = {
            let mut rng = RngSeed::new(7).rng();
            (0..5)
                .map(|_| random_permutation(6, &mut rng).as_slice().to_vec())
                .collect()
        };
        assert_eq!(a, b);
        let c: Vec<Vec<Element>> = {
            let mut rng = RngSeed::new(7).with_stream(1).rng();
            (0..5)
                .map(|_| random_permutation(6, &mut rng).as_slice().to_vec())
                .collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn shuffle_k_zero_and_one_are_identity() {
        let t = hp("[[[1,2],[3]],[4]]");
        let mut rng = RngSeed::new(3).rng();
        assert_eq!(shuffle_k(&t, 0, &mut rng).unwrap(), t);
        assert_eq!(shuffle_k(&t, 1, &mut rng).unwrap(), t);
    }

    #[test]
    fn shuffle_k_rejects_large_k() {
        let t = hp("[1,2,3]");
        let mut rng = RngSeed::new(3).rng();
        assert!(matches!(
            shuffle_k(&t, 4, &mut rng),
            Err(Error::KOutOfRange { k: 4, n: 3 })
        ));
    }

    #[test]
    fn shuffle_k_preserves_shape() {
        let t = hp("[[[1,2],[3]],[4,5],[[6],[7,8]]]");
        let mut rng = RngSeed::new(9).rng();
        for k in 0..=t.n() {
            let s = shuffle_k(&t, k, &mut rng).unwrap();
            assert!(s.validate().is_empty());
            // Same block-size multiset at every depth.
            for level in 0..=t.max_depth() {
                let mut a = t.level_partition(level).unwrap().block_sizes();
                let mut b = s.level_partition(level).unwrap().block_sizes();
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b, "k = {k}, level = {level}");
            }
        }
    }

    #[test]
    fn ehmi_exhaustive_three_element_self() {
        // Over the 6 permutations of [[1,2],[3]]: two reproduce the
        // partition (I = H) and four give the cross value (1/3) ln(27/16),
        // so <I> = (2 H + 4 I) / 6 = 0.3284488.
        let t = hp("[[1,2],[3]]");
        let mut rng = RngSeed::new(0).rng();
        let est = ehmi(&t, &t, &EhmiParams::default(), &mut rng).unwrap();
        assert!(est.exhausted);
        assert_eq!(est.samples, 6);
        assert_eq!(est.sem, 0.0);
        let h = 3.0f64.ln() - 2.0 / 3.0 * LN_2;
        let i = (27.0f64 / 16.0).ln() / 3.0;
        let expected = (2.0 * h + 4.0 * i) / 6.0;
        assert!((est.mean - expected).abs() < 1e-12);
        assert!((est.mean - 0.328_448_75).abs() < 1e-7);
    }

    #[test]
    fn ehmi_with_trivial_partition_is_zero() {
        let t = hp("[[1],[2,3]]");
        let s = hp("[1,2,3]");
        let mut rng = RngSeed::new(0).rng();
        let est = ehmi(&t, &s, &EhmiParams::default(), &mut rng).unwrap();
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn ehmi_two_singletons_is_ln2() {
        let t = hp("[[1],[2]]");
        let mut rng = RngSeed::new(0).rng();
        let est = ehmi(&t, &t, &EhmiParams::default(), &mut rng).unwrap();
        assert!((est.mean - LN_2).abs() < 1e-15);
    }

    #[test]
    fn ehmi_label_invariance_exhaustive() {
        let t = hp("[[[1,2],[3]],[4]]");
        let s = hp("[[1],[2],[[3],[4]]]");
        let pi = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        let params = EhmiParams::default();
        let a = ehmi(&t, &s, &params, &mut RngSeed::new(0).rng()).unwrap();
        let b = ehmi(
            &t.apply_permutation(&pi).unwrap(),
            &s,
            &params,
            &mut RngSeed::new(0).rng(),
        )
        .unwrap();
        let c = ehmi(
            &t,
            &s.apply_permutation(&pi).unwrap(),
            &params,
            &mut RngSeed::new(0).rng(),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn ehmi_sampled_is_deterministic_per_seed() {
        let t = hp("[[[1,2],[3]],[4]]");
        let params = EhmiParams {
            exhaustive_threshold: 0,
            max_samples: 500,
            ..EhmiParams::default()
        };
        let seed = RngSeed::new(77).with_stream(4);
        let a = ehmi(&t, &t, &params, &mut seed.rng()).unwrap();
        let b = ehmi(&t, &t, &params, &mut seed.rng()).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhausted);
    }

    #[test]
    fn ehmi_sampled_tracks_exhaustive() {
        let t = hp("[[[1,2],[3]],[4]]");
        let s = hp("[[2],[[3],[1,4]]]");
        let exact = ehmi(&t, &s, &EhmiParams::default(), &mut RngSeed::new(0).rng())
            .unwrap()
            .mean;
        let params = EhmiParams {
            exhaustive_threshold: 0,
            rel_sem_target: 0.005,
            max_samples: 100_000,
            ..EhmiParams::default()
        };
        let est = ehmi(&t, &s, &params, &mut RngSeed::new(21).rng()).unwrap();
        assert!(est.converged);
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.sem,
            "mean {} vs exact {} with sem {}",
            est.mean,
            exact,
            est.sem
        );
    }

    #[test]
    fn ehmi_nonconvergence_flag() {
        let t = hp("[[[1,2],[3]],[4]]");
        let params = EhmiParams {
            exhaustive_threshold: 0,
            rel_sem_target: 1e-9,
            min_samples: 2,
            max_samples: 50,
        };
        let est = ehmi(&t, &t, &params, &mut RngSeed::new(5).rng()).unwrap();
        assert!(!est.converged);
        assert_eq!(est.samples, 50);
    }

    #[test]
    fn ahmi_self_is_exactly_one() {
        let t = hp("[[1,2],[3]]");
        for mean in MeanKind::ALL {
            let value = ahmi(&t, &t, mean, &EhmiParams::default(), &mut RngSeed::new(0).rng())
                .unwrap();
            assert_eq!(value, 1.0);
        }
    }

    #[test]
    fn ahmi_relabeled_pair_is_minus_half() {
        // For T = [[1,2],[3]] and S = [[1,3],[2]]: I - <I> = (I - H)/3 and
        // M - <I> = 2(H - I)/3, so the adjusted value is exactly -1/2.
        let t = hp("[[1,2],[3]]");
        let s = hp("[[1,3],[2]]");
        let value = ahmi(
            &t,
            &s,
            MeanKind::Arithmetic,
            &EhmiParams::default(),
            &mut RngSeed::new(0).rng(),
        )
        .unwrap();
        assert!((value - (-0.5)).abs() < 1e-12, "{value}");
    }

    #[test]
    fn ahmi_degenerate_denominator() {
        // H = <I> = ln 2 for the two-singleton partition.
        let t = hp("[[1],[2]]");
        let result = ahmi(
            &t,
            &t,
            MeanKind::Arithmetic,
            &EhmiParams::default(),
            &mut RngSeed::new(0).rng(),
        );
        assert!(matches!(result, Err(Error::DegenerateDenominator(_))));
    }
}
