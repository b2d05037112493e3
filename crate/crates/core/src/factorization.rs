//! Class-entropy of topics and the factorizing prior built on it.
//!
//! A topic's class-entropy `H` is the Shannon entropy of its mass
//! distribution over classes, normalized by `log C` so that it lies in
//! `[0, 1]`: 0 when one class owns the topic, 1 when all classes share it
//! equally. The prior rewards topics whose `H` sits near either end.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Floor applied to the prior factor before taking logs or sampling.
/// The annealed factor is exactly zero at `H = H_bar = 1`.
pub const DEFAULT_PRIOR_GUARD: f64 = 1e-12;

/// Normalized class-entropy of one topic given its per-class mass.
///
/// An all-zero column counts as perfectly shared (`H = 1`).
pub fn topic_entropy(class_mass: &[f64]) -> Result<f64> {
    if class_mass.len() < 2 {
        return Err(Error::Invalid(format!(
            "topic entropy needs at least 2 classes, got {}",
            class_mass.len()
        )));
    }
    if let Some(m) = class_mass.iter().find(|m| m.is_nan() || **m < 0.0) {
        return Err(Error::Invalid(format!("negative class mass {m}")));
    }
    Ok(normalized_entropy(class_mass))
}

/// Unchecked core of [`topic_entropy`]; `mass.len() >= 2`, entries >= 0.
pub(crate) fn normalized_entropy(mass: &[f64]) -> f64 {
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return 1.0;
    }
    let plogp: f64 = mass
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| {
            let p = m / total;
            p * p.ln()
        })
        .sum();
    let h = plogp / (1.0 / mass.len() as f64).ln();
    h.clamp(0.0, 1.0)
}

/// `H^2 - H + 1`: equal to 1 at both ends, 0.75 at `H = 0.5`.
pub fn prior_factor_static(h: f64) -> f64 {
    h * h - h + 1.0
}

/// `H^2 - 2 H_bar H + 1`, the self-annealing form of the prior factor.
///
/// While the average entropy `h_bar` is high this rewards low-entropy
/// topics only; as `h_bar` falls, high-entropy topics are rewarded more.
/// At `h_bar = 0.5` it coincides with [`prior_factor_static`].
pub fn prior_factor_annealed(h: f64, h_bar: f64) -> f64 {
    h * h - 2.0 * h_bar * h + 1.0
}

/// Per-topic entropies of a C×K class-mass matrix, with their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicEntropy {
    pub h: Vec<f64>,
    pub h_bar: f64,
}

impl TopicEntropy {
    pub fn from_class_masses(masses: &Matrix) -> Result<Self> {
        let h = (0..masses.cols())
            .map(|k| topic_entropy(&masses.column(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_values(h))
    }

    pub fn from_values(h: Vec<f64>) -> Self {
        let h_bar = if h.is_empty() {
            1.0
        } else {
            h.iter().sum::<f64>() / h.len() as f64
        };
        Self { h, h_bar }
    }
}

/// Unnormalized log of the factorizing prior over a C×K class-mass matrix:
/// `sum_k log max(A(k), guard)` with the annealed factor `A`.
pub fn log_prior(class_masses: &Matrix, h_bar: f64) -> Result<f64> {
    log_prior_guarded(class_masses, h_bar, DEFAULT_PRIOR_GUARD)
}

pub fn log_prior_guarded(class_masses: &Matrix, h_bar: f64, guard: f64) -> Result<f64> {
    let entropy = TopicEntropy::from_class_masses(class_masses)?;
    Ok(entropy
        .h
        .iter()
        .map(|&h| prior_factor_annealed(h, h_bar).max(guard).ln())
        .sum())
}

/// Split of the topic space into class-private and shared topics.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Topics with `H < tau`, ascending by index.
    pub private: Vec<usize>,
    pub shared: Vec<usize>,
    pub tau: f64,
}

impl Segmentation {
    pub fn is_private(&self, k: usize) -> bool {
        self.private.binary_search(&k).is_ok()
    }
}

/// Partitions topics by entropy. With an explicit `tau`, private topics are
/// those with `H < tau`. Otherwise `tau` is the midpoint of the widest gap
/// between consecutive sorted `H` values (lowest such gap on ties); if all
/// values are equal every topic is shared and `tau = H[0]`.
pub fn segment_topics(h: &[f64], tau: Option<f64>) -> Segmentation {
    let tau = tau.unwrap_or_else(|| {
        let mut sorted = h.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut best: Option<(f64, f64)> = None;
        for w in sorted.windows(2) {
            let gap = w[1] - w[0];
            if gap > 0.0 && best.is_none_or(|(g, _)| gap > g) {
                best = Some((gap, 0.5 * (w[0] + w[1])));
            }
        }
        match best {
            Some((_, mid)) => mid,
            None => h.first().copied().unwrap_or(0.0),
        }
    });
    let (private, shared) = (0..h.len()).partition(|&k| h[k] < tau);
    Segmentation {
        private,
        shared,
        tau,
    }
}

/// Topic indices sorted by ascending entropy (stable on ties).
pub fn order_by_entropy(h: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| h[a].total_cmp(&h[b]));
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_endpoints() {
        assert_eq!(topic_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((topic_entropy(&[0.25; 4]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(topic_entropy(&[0.0; 3]).unwrap(), 1.0);
        assert!(topic_entropy(&[1.0]).is_err());
        assert!(topic_entropy(&[1.0, -0.5]).is_err());
    }

    #[test]
    fn entropy_two_class_value() {
        // mpmath, 30 digits
        let expected = 0.811_278_124_459_132_9;
        assert!((topic_entropy(&[0.75, 0.25]).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn static_factor_values() {
        assert_eq!(prior_factor_static(0.0), 1.0);
        assert_eq!(prior_factor_static(1.0), 1.0);
        assert_eq!(prior_factor_static(0.5), 0.75);
    }

    #[test]
    fn annealed_factor_values() {
        assert_eq!(prior_factor_annealed(1.0, 1.0), 0.0);
        for hb in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(prior_factor_annealed(0.0, hb), 1.0);
        }
        for i in 0..=1000 {
            let h = i as f64 / 1000.0;
            assert_eq!(prior_factor_annealed(h, 0.5), prior_factor_static(h));
        }
    }

    #[test]
    fn log_prior_cases() {
        // every column concentrated: H = 0, A = 1
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert_eq!(log_prior(&m, 0.7).unwrap(), 0.0);

        let col = [0.6, 0.4];
        let h = topic_entropy(&col).unwrap();
        let a = prior_factor_annealed(h, 0.3);
        let m = Matrix::from_rows(&[vec![0.6; 3], vec![0.4; 3]]);
        assert!((log_prior(&m, 0.3).unwrap() - 3.0 * a.ln()).abs() < 1e-12);

        let with_extra = Matrix::from_rows(&[vec![0.6, 0.6, 0.6, 5.0], vec![0.4, 0.4, 0.4, 0.0]]);
        assert!((log_prior(&with_extra, 0.3).unwrap() - 3.0 * a.ln()).abs() < 1e-12);

        // A = 0 corner is floored by the guard
        let uniform = Matrix::from_rows(&[vec![1.0], vec![1.0]]);
        assert_eq!(log_prior(&uniform, 1.0).unwrap(), DEFAULT_PRIOR_GUARD.ln());
    }

    #[test]
    fn segmentation_cases() {
        let s = segment_topics(&[0.9, 0.05, 0.95, 0.1], None);
        assert_eq!(s.private, vec![1, 3]);
        assert_eq!(s.shared, vec![0, 2]);
        assert!((s.tau - 0.5).abs() < 1e-12);

        let s = segment_topics(&[0.4; 5], None);
        assert!(s.private.is_empty());
        assert_eq!(s.shared.len(), 5);
        assert_eq!(s.tau, 0.4);

        let s = segment_topics(&[0.2, 1.0, 0.7], Some(1.1));
        assert_eq!(s.private, vec![0, 1, 2]);
        assert!(s.shared.is_empty());
    }

    proptest! {
        #[test]
        fn entropy_permutation_and_scale_invariant(
            mass in prop::collection::vec(0.0f64..10.0, 2..8),
            scale in 1e-3f64..1e3,
            rot in 0usize..8,
        ) {
            let h = topic_entropy(&mass).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
            let mut permuted = mass.clone();
            permuted.rotate_left(rot % mass.len());
            permuted.reverse();
            prop_assert!((topic_entropy(&permuted).unwrap() - h).abs() < 1e-12);
            let scaled: Vec<f64> = mass.iter().map(|m| m * scale).collect();
            prop_assert!((topic_entropy(&scaled).unwrap() - h).abs() < 1e-12);
        }

        #[test]
        fn entropy_zero_iff_single_class(mass in prop::collection::vec(0.0f64..10.0, 2..8)) {
            prop_assume!(mass.iter().any(|&m| m > 0.0));
            let h = topic_entropy(&mass).unwrap();
            let nonzero = mass.iter().filter(|&&m| m > 0.0).count();
            prop_assert_eq!(h == 0.0, nonzero == 1);
        }

        #[test]
        fn annealed_factor_nonnegative(h in 0.0f64..=1.0, hb in 0.0f64..=1.0) {
            let a = prior_factor_annealed(h, hb);
            prop_assert!(a >= 0.0);
            prop_assert!(a >= 1.0 - hb * hb - 1e-15);
        }

        #[test]
        fn segmentation_partitions_and_is_monotone(
            h in prop::collection::vec(0.0f64..=1.0, 2..20),
            t1 in 0.0f64..1.2,
            t2 in 0.0f64..1.2,
        ) {
            let auto = segment_topics(&h, None);
            let mut all: Vec<usize> = auto.private.iter().chain(&auto.shared).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..h.len()).collect::<Vec<_>>());
            for &p in &auto.private {
                for &s in &auto.shared {
                    prop_assert!(h[p] < h[s]);
                }
            }
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = segment_topics(&h, Some(lo));
            let b = segment_topics(&h, Some(hi));
            prop_assert!(a.private.iter().all(|k| b.private.contains(k)));
        }
    }
}
