//! Collapsed Gibbs training for class-labeled LDA, with or without the
//! self-annealing factorizing prior.
//!
//! Per token the unnormalized conditional is the standard collapsed-LDA
//! weight `(n_dk + alpha) (n_kv + pi) / (n_k + V pi)`. In factorized mode it
//! is multiplied by `A(H_k+, H_bar)`, where `H_k+` is the class-entropy of
//! topic `k` with the token included and `H_bar` is the average entropy
//! frozen at the start of the sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::corpus::Corpus;
use crate::error::Result;
use crate::factorization::prior_factor_annealed;
use crate::model::{EstimateAverager, Hyperparams, ModelState, TrainedModel};

/// Below this row maximum the conditional is recomputed in log space.
const UNDERFLOW_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepDiagnostics {
    pub iteration: usize,
    pub h_bar: f64,
    pub per_topic_h: Vec<f64>,
    /// Collapsed log joint `log p(w, z)`, plus the log prior when factorized.
    pub log_joint_proxy: f64,
    /// Tokens whose topic changed during the sweep.
    pub tokens_resampled: usize,
}

/// Prior factor for assigning a class-`class` token to topic `k`.
#[inline]
fn prior_weight(
    state: &ModelState,
    k: usize,
    class: usize,
    h_bar: f64,
    guard: f64,
    buf: &mut [f64],
) -> f64 {
    let h = state.entropy_with(k, Some(class), buf);
    prior_factor_annealed(h, h_bar).max(guard)
}

#[inline]
fn lda_weight(
    state: &ModelState,
    m: usize,
    v: usize,
    k: usize,
    hp: &Hyperparams,
    v_pi: f64,
) -> f64 {
    (state.n_dk[(m, k)] as f64 + hp.alpha) * (state.n_kv[(k, v)] as f64 + hp.pi)
        / (state.n_k[k] as f64 + v_pi)
}

/// Unnormalized conditional over topics for a token of word `v` in document
/// `m`. The token must already be removed from the counts
/// ([`ModelState::unassign`]).
pub fn gibbs_conditional(state: &ModelState, m: usize, v: usize, hp: &Hyperparams) -> Vec<f64> {
    let k = state.num_topics();
    let v_pi = state.n_kv.cols() as f64 * hp.pi;
    let mut weights: Vec<f64> = (0..k)
        .map(|t| lda_weight(state, m, v, t, hp, v_pi))
        .collect();
    if hp.factorized {
        let mut buf = vec![0.0; state.num_classes()];
        let class = state.label(m);
        for (t, w) in weights.iter_mut().enumerate() {
            *w *= prior_weight(state, t, class, state.h_bar, hp.prior_guard, &mut buf);
        }
    }
    weights
}

fn log_space_weights(
    state: &ModelState,
    m: usize,
    v: usize,
    hp: &Hyperparams,
    prior: Option<&[f64]>,
    out: &mut [f64],
) {
    let v_pi = state.n_kv.cols() as f64 * hp.pi;
    for (k, o) in out.iter_mut().enumerate() {
        let mut lw = (state.n_dk[(m, k)] as f64 + hp.alpha).ln()
            + (state.n_kv[(k, v)] as f64 + hp.pi).ln()
            - (state.n_k[k] as f64 + v_pi).ln();
        if let Some(a) = prior {
            lw += a[k].ln();
        }
        *o = lw;
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.iter_mut().for_each(|w| *w = (*w - max).exp());
}

/// Draws an index proportionally to `weights` by a running-sum search.
pub fn draw_topic<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    assert!(
        total > 0.0 && total.is_finite(),
        "degenerate Gibbs conditional: {weights:?}"
    );
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = k;
            if u < acc {
                return k;
            }
        }
    }
    last
}

/// Collapsed log joint `log p(w, z | alpha, pi)` of the current counts.
pub fn log_joint(state: &ModelState, hp: &Hyperparams) -> f64 {
    let k = state.num_topics() as f64;
    let v = state.n_kv.cols() as f64;
    let (lg_a, lg_p) = (ln_gamma(hp.alpha), ln_gamma(hp.pi));
    let mut total = 0.0;
    for row in state.n_dk.iter_rows() {
        let n: u32 = row.iter().sum();
        total += ln_gamma(k * hp.alpha) - ln_gamma(n as f64 + k * hp.alpha);
        total += row
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| ln_gamma(c as f64 + hp.alpha) - lg_a)
            .sum::<f64>();
    }
    for (t, row) in state.n_kv.iter_rows().enumerate() {
        total += ln_gamma(v * hp.pi) - ln_gamma(state.n_k[t] as f64 + v * hp.pi);
        total += row
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| ln_gamma(c as f64 + hp.pi) - lg_p)
            .sum::<f64>();
    }
    total
}

/// One collapsed Gibbs chain over a corpus.
pub struct Sampler<'a> {
    corpus: &'a Corpus,
    hp: Hyperparams,
    state: ModelState,
    rng: ChaCha8Rng,
    words: Vec<Vec<usize>>,
}

impl<'a> Sampler<'a> {
    /// Validates inputs, seeds the generator from `hp.seed` and draws the
    /// random initial assignment.
    pub fn new(corpus: &'a Corpus, hp: &Hyperparams) -> Result<Self> {
        hp.validate()?;
        corpus.validate_for_training()?;
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let state = ModelState::init(corpus, hp, &mut rng);
        let words = corpus
            .documents()
            .iter()
            .map(|d| d.tokens().collect())
            .collect();
        Ok(Self {
            corpus,
            hp: hp.clone(),
            state,
            rng,
            words,
        })
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hp
    }

    /// Resamples every token once, in document then token order, and then
    /// refreshes the average entropy used by the next sweep.
    pub fn sweep(&mut self) -> SweepDiagnostics {
        let hp = &self.hp;
        let state = &mut self.state;
        let k_topics = state.num_topics();
        let v_pi = state.n_kv.cols() as f64 * hp.pi;
        let h_bar = state.h_bar;
        let mut weights = vec![0.0; k_topics];
        let mut buf = vec![0.0; state.num_classes()];
        // prior[k] = A(H_k+) for the current document's class; refreshed
        // whenever a column of n_ck changes or the class changes.
        let mut prior = vec![1.0; k_topics];
        let mut prior_class = usize::MAX;
        let mut changed = 0;

        for (m, words) in self.words.iter().enumerate() {
            let class = state.label(m);
            if hp.factorized && class != prior_class {
                for (k, a) in prior.iter_mut().enumerate() {
                    *a = prior_weight(state, k, class, h_bar, hp.prior_guard, &mut buf);
                }
                prior_class = class;
            }
            for (i, &v) in words.iter().enumerate() {
                let old = state.unassign(m, i, v);
                if hp.factorized {
                    prior[old] = prior_weight(state, old, class, h_bar, hp.prior_guard, &mut buf);
                }
                let mut max = 0.0f64;
                for (k, w) in weights.iter_mut().enumerate() {
                    *w = lda_weight(state, m, v, k, hp, v_pi);
                    if hp.factorized {
                        *w *= prior[k];
                    }
                    max = max.max(*w);
                }
                if max < UNDERFLOW_GUARD {
                    let prior = hp.factorized.then_some(prior.as_slice());
                    log_space_weights(state, m, v, hp, prior, &mut weights);
                }
                let new = draw_topic(&mut self.rng, &weights);
                state.assign(m, i, v, new);
                if hp.factorized {
                    prior[new] = prior_weight(state, new, class, h_bar, hp.prior_guard, &mut buf);
                }
                changed += usize::from(new != old);
            }
        }

        debug_assert_eq!(state.check_consistency(self.corpus), Ok(()));
        state.iteration += 1;
        let entropy = state.entropy();
        state.h_bar = entropy.h_bar;
        let mut log_joint_proxy = log_joint(state, hp);
        if hp.factorized {
            log_joint_proxy += entropy
                .h
                .iter()
                .map(|&h| {
                    prior_factor_annealed(h, entropy.h_bar)
                        .max(hp.prior_guard)
                        .ln()
                })
                .sum::<f64>();
        }
        SweepDiagnostics {
            iteration: state.iteration,
            h_bar: entropy.h_bar,
            per_topic_h: entropy.h,
            log_joint_proxy,
            tokens_resampled: changed,
        }
    }

    /// Runs the full schedule: `iterations` sweeps, averaging estimators over
    /// every `sample_every`-th sweep after burn-in. If the thinning interval
    /// skips every post-burn-in sweep, the final state is used.
    pub fn run(mut self) -> Result<(TrainedModel, Vec<SweepDiagnostics>)> {
        let hp = self.hp.clone();
        let mut avg =
            EstimateAverager::new(self.corpus.num_docs(), hp.topics, self.corpus.vocab_size());
        let mut diagnostics = Vec::with_capacity(hp.iterations);
        for it in 1..=hp.iterations {
            let d = self.sweep();
            if it % 100 == 0 {
                log::info!(
                    "iteration {it}: H_bar={:.4} log_joint={:.2}",
                    d.h_bar,
                    d.log_joint_proxy
                );
            }
            diagnostics.push(d);
            if it > hp.burn_in && (it - hp.burn_in).is_multiple_of(hp.sample_every) {
                avg.add(&self.state, &hp);
            }
        }
        if avg.count() == 0 {
            avg.add(&self.state, &hp);
        }
        Ok((avg.finish(self.corpus, &hp)?, diagnostics))
    }
}

/// Trains one chain seeded with `hp.seed`.
pub fn train(corpus: &Corpus, hp: &Hyperparams) -> Result<(TrainedModel, Vec<SweepDiagnostics>)> {
    Sampler::new(corpus, hp)?.run()
}

/// Trains `chains` independent chains concurrently (seeds `hp.seed + i`) and
/// keeps the one with the highest final log joint; ties go to the lower
/// chain index.
pub fn train_chains(
    corpus: &Corpus,
    hp: &Hyperparams,
    chains: usize,
) -> Result<(TrainedModel, Vec<SweepDiagnostics>)> {
    if chains <= 1 {
        return train(corpus, hp);
    }
    let results: Vec<Result<(TrainedModel, Vec<SweepDiagnostics>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..chains)
            .map(|i| {
                let hp = Hyperparams {
                    seed: hp.seed.wrapping_add(i as u64),
                    ..hp.clone()
                };
                s.spawn(move || train(corpus, &hp))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling chain panicked"))
            .collect()
    });
    let mut best: Option<(f64, (TrainedModel, Vec<SweepDiagnostics>))> = None;
    for r in results {
        let (model, diag) = r?;
        let score = diag.last().map_or(f64::NEG_INFINITY, |d| d.log_joint_proxy);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, (model, diag)));
        }
    }
    Ok(best.expect("at least one chain").1)
}
