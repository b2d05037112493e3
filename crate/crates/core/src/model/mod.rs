//! Sampler state, hyperparameters and the point estimates derived from them.

mod file;

use rand::Rng;

pub use file::{read_model, write_model, MODEL_MAGIC};

use crate::corpus::{Corpus, Vocabulary};
use crate::error::{Error, Result};
use crate::factorization::{normalized_entropy, segment_topics, Segmentation, TopicEntropy};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    /// Number of topics K.
    pub topics: usize,
    /// Symmetric document–topic Dirichlet concentration, shared by all classes.
    pub alpha: f64,
    /// Symmetric topic–word Dirichlet concentration.
    pub pi: f64,
    /// Multiply the sampler's conditional by the annealed factorizing prior.
    pub factorized: bool,
    pub iterations: usize,
    pub burn_in: usize,
    /// Thinning interval between averaged post-burn-in snapshots.
    pub sample_every: usize,
    pub seed: u64,
    /// Floor on the prior factor; see [`crate::factorization::DEFAULT_PRIOR_GUARD`].
    pub prior_guard: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            topics: 20,
            alpha: 0.5,
            pi: 0.1,
            factorized: true,
            iterations: 2000,
            burn_in: 1000,
            sample_every: 10,
            seed: 0,
            prior_guard: crate::factorization::DEFAULT_PRIOR_GUARD,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Hyperparams(msg));
        if self.topics < 2 {
            return bad(format!("topics must be >= 2, got {}", self.topics));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.pi > 0.0 && self.pi.is_finite()) {
            return bad(format!("pi must be positive, got {}", self.pi));
        }
        if self.burn_in >= self.iterations {
            return bad(format!(
                "burn-in ({}) must be less than iterations ({})",
                self.burn_in, self.iterations
            ));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be >= 1".into());
        }
        if !(self.prior_guard > 0.0 && self.prior_guard < 1.0) {
            return bad(format!(
                "prior guard must be in (0, 1), got {}",
                self.prior_guard
            ));
        }
        Ok(())
    }
}

/// Collapsed Gibbs state: topic assignments and the counts they imply.
///
/// `z[m]` is aligned with `corpus.documents()[m].tokens()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub z: Vec<Vec<u32>>,
    pub n_dk: Matrix<u32>,
    pub n_kv: Matrix<u32>,
    pub n_k: Vec<u32>,
    /// Per-class topic token counts, C×K.
    pub n_ck: Matrix<u32>,
    /// Average topic entropy, updated between sweeps.
    pub h_bar: f64,
    pub iteration: usize,
    /// Document labels, copied from the corpus.
    labels: Vec<usize>,
    /// Smoothed per-class normalizers `N_c + M_c K alpha`.
    class_norm: Vec<f64>,
    /// Per-class smoothing mass `M_c alpha`.
    class_smoothing: Vec<f64>,
}

impl ModelState {
    /// Assigns every token a uniformly random topic.
    pub fn init<R: Rng>(corpus: &Corpus, hp: &Hyperparams, rng: &mut R) -> Self {
        let k = hp.topics;
        let c = corpus.num_classes();
        let mut state = ModelState {
            z: Vec::with_capacity(corpus.num_docs()),
            n_dk: Matrix::zeros(corpus.num_docs(), k),
            n_kv: Matrix::zeros(k, corpus.vocab_size()),
            n_k: vec![0; k],
            n_ck: Matrix::zeros(c, k),
            h_bar: 1.0,
            iteration: 0,
            labels: corpus.labels(),
            class_norm: vec![0.0; c],
            class_smoothing: vec![0.0; c],
        };
        for (m, doc) in corpus.documents().iter().enumerate() {
            let mut zs = Vec::with_capacity(doc.len());
            for v in doc.tokens() {
                let topic = rng.random_range(0..k);
                zs.push(topic as u32);
                state.add(m, doc.label, v, topic);
            }
            state.z.push(zs);
        }
        let sizes = corpus.class_sizes();
        let mut tokens = vec![0usize; c];
        for d in corpus.documents() {
            tokens[d.label] += d.len();
        }
        for cl in 0..c {
            state.class_smoothing[cl] = sizes[cl] as f64 * hp.alpha;
            state.class_norm[cl] = tokens[cl] as f64 + sizes[cl] as f64 * k as f64 * hp.alpha;
        }
        state.h_bar = state.entropy().h_bar;
        state
    }

    pub fn num_topics(&self) -> usize {
        self.n_k.len()
    }

    pub fn num_classes(&self) -> usize {
        self.n_ck.rows()
    }

    pub fn label(&self, m: usize) -> usize {
        self.labels[m]
    }

    /// Removes token `i` of document `m` (word `v`) from all counts and
    /// returns its topic. The assignment in `z` is left stale until
    /// [`ModelState::assign`] is called.
    pub fn unassign(&mut self, m: usize, i: usize, v: usize) -> usize {
        let k = self.z[m][i] as usize;
        self.remove(m, self.labels[m], v, k);
        k
    }

    /// Assigns token `i` of document `m` (word `v`) to topic `k`.
    pub fn assign(&mut self, m: usize, i: usize, v: usize, k: usize) {
        self.z[m][i] = k as u32;
        self.add(m, self.labels[m], v, k);
    }

    #[inline]
    pub(crate) fn add(&mut self, m: usize, class: usize, v: usize, k: usize) {
        self.n_dk[(m, k)] += 1;
        self.n_kv[(k, v)] += 1;
        self.n_k[k] += 1;
        self.n_ck[(class, k)] += 1;
    }

    #[inline]
    pub(crate) fn remove(&mut self, m: usize, class: usize, v: usize, k: usize) {
        self.n_dk[(m, k)] -= 1;
        self.n_kv[(k, v)] -= 1;
        self.n_k[k] -= 1;
        self.n_ck[(class, k)] -= 1;
    }

    /// Class mass of topic `k` in class `c`: the count-level counterpart of a
    /// row-normalized `theta_class`, `(N_ck + M_c alpha) / (N_c + M_c K alpha)`.
    /// `extra` adds hypothetical tokens to the count.
    #[inline]
    pub(crate) fn class_mass(&self, c: usize, k: usize, extra: u32) -> f64 {
        (self.n_ck[(c, k)] + extra) as f64 / self.class_norm[c]
            + self.class_smoothing[c] / self.class_norm[c]
    }

    /// Entropy of topic `k` as if one more token of class `with_class` were
    /// assigned to it. `buf` is scratch space of length C.
    #[inline]
    pub(crate) fn entropy_with(&self, k: usize, with_class: Option<usize>, buf: &mut [f64]) -> f64 {
        for (c, slot) in buf.iter_mut().enumerate() {
            let extra = u32::from(with_class == Some(c));
            *slot = self.class_mass(c, k, extra);
        }
        normalized_entropy(buf)
    }

    /// C×K class-mass matrix used for the sampler's entropies.
    pub fn class_masses(&self) -> Matrix {
        let (c, k) = (self.num_classes(), self.num_topics());
        let mut out = Matrix::zeros(c, k);
        for cl in 0..c {
            for t in 0..k {
                out[(cl, t)] = self.class_mass(cl, t, 0);
            }
        }
        out
    }

    /// Per-topic entropies of the current class masses.
    pub fn entropy(&self) -> TopicEntropy {
        let mut buf = vec![0.0; self.num_classes()];
        TopicEntropy::from_values(
            (0..self.num_topics())
                .map(|k| self.entropy_with(k, None, &mut buf))
                .collect(),
        )
    }

    /// Recounts everything from `z` and compares with the maintained counts.
    pub fn check_consistency(&self, corpus: &Corpus) -> std::result::Result<(), String> {
        let k = self.num_topics();
        let mut n_dk = Matrix::<u32>::zeros(corpus.num_docs(), k);
        let mut n_kv = Matrix::<u32>::zeros(k, corpus.vocab_size());
        let mut n_k = vec![0u32; k];
        let mut n_ck = Matrix::<u32>::zeros(corpus.num_classes(), k);
        if self.z.len() != corpus.num_docs() {
            return Err("z has wrong number of documents".into());
        }
        for (m, (doc, zs)) in corpus.documents().iter().zip(&self.z).enumerate() {
            if zs.len() != doc.len() {
                return Err(format!(
                    "document {m}: {} assignments for {} tokens",
                    zs.len(),
                    doc.len()
                ));
            }
            for (v, &t) in doc.tokens().zip(zs) {
                let t = t as usize;
                if t >= k {
                    return Err(format!("document {m}: topic {t} out of range"));
                }
                n_dk[(m, t)] += 1;
                n_kv[(t, v)] += 1;
                n_k[t] += 1;
                n_ck[(doc.label, t)] += 1;
            }
        }
        if n_dk != self.n_dk {
            return Err("n_dk inconsistent with z".into());
        }
        if n_kv != self.n_kv {
            return Err("n_kv inconsistent with z".into());
        }
        if n_k != self.n_k {
            return Err("n_k inconsistent with z".into());
        }
        if n_ck != self.n_ck {
            return Err("n_ck inconsistent with z".into());
        }
        Ok(())
    }
}

/// Posterior-mean topic–word distributions, `(n_kv + pi) / (n_k + V pi)`.
pub fn estimate_beta(state: &ModelState, hp: &Hyperparams) -> Matrix {
    let (k, v) = (state.n_kv.rows(), state.n_kv.cols());
    let mut out = Matrix::zeros(k, v);
    for t in 0..k {
        let denom = state.n_k[t] as f64 + v as f64 * hp.pi;
        for (o, &n) in out.row_mut(t).iter_mut().zip(state.n_kv.row(t)) {
            *o = (n as f64 + hp.pi) / denom;
        }
    }
    out
}

/// Posterior-mean document–topic proportions, `(n_dk + alpha) / (N_m + K alpha)`.
pub fn estimate_theta(state: &ModelState, hp: &Hyperparams) -> Matrix {
    let (m, k) = (state.n_dk.rows(), state.n_dk.cols());
    let mut out = Matrix::zeros(m, k);
    for d in 0..m {
        let row = state.n_dk.row(d);
        let n: u32 = row.iter().sum();
        let denom = n as f64 + k as f64 * hp.alpha;
        for (o, &c) in out.row_mut(d).iter_mut().zip(row) {
            *o = (c as f64 + hp.alpha) / denom;
        }
    }
    out
}

/// Per-class topic distributions: the θ rows of each class summed, then
/// renormalized.
pub fn compute_theta_class(theta: &Matrix, labels: &[usize], num_classes: usize) -> Result<Matrix> {
    let k = theta.cols();
    let mut out = Matrix::zeros(num_classes, k);
    let mut seen = vec![false; num_classes];
    for (row, &c) in theta.iter_rows().zip(labels) {
        if c >= num_classes {
            return Err(Error::Invalid(format!("label {c} >= {num_classes}")));
        }
        seen[c] = true;
        for (o, &x) in out.row_mut(c).iter_mut().zip(row) {
            *o += x;
        }
    }
    if let Some(c) = seen.iter().position(|s| !s) {
        return Err(Error::EmptyClass(c));
    }
    for c in 0..num_classes {
        let row = out.row_mut(c);
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= total);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// K×V smoothed topic–word distributions.
    pub beta: Matrix,
    /// C×K per-class topic distributions.
    pub theta_class: Matrix,
    /// Per-topic class entropy computed from `theta_class`.
    pub entropy: Vec<f64>,
    /// Average entropy reached by the sampler's annealing.
    pub h_bar: f64,
    pub hyperparams: Hyperparams,
    pub vocabulary: Vocabulary,
    pub class_names: Option<Vec<String>>,
    pub segmentation: Segmentation,
}

impl TrainedModel {
    /// Assembles a model, recomputing entropies from `theta_class` and
    /// segmenting with `tau` (automatic when `None`).
    pub fn from_parts(
        beta: Matrix,
        theta_class: Matrix,
        h_bar: f64,
        hyperparams: Hyperparams,
        vocabulary: Vocabulary,
        class_names: Option<Vec<String>>,
        tau: Option<f64>,
    ) -> Result<Self> {
        let entropy = TopicEntropy::from_class_masses(&theta_class)?.h;
        let segmentation = segment_topics(&entropy, tau);
        let model = Self {
            beta,
            theta_class,
            entropy,
            h_bar,
            hyperparams,
            vocabulary,
            class_names,
            segmentation,
        };
        model.validate(1e-9)?;
        Ok(model)
    }

    pub fn num_topics(&self) -> usize {
        self.beta.rows()
    }

    pub fn vocab_size(&self) -> usize {
        self.beta.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.theta_class.rows()
    }

    pub fn class_name(&self, c: usize) -> String {
        match &self.class_names {
            Some(names) => names[c].clone(),
            None => c.to_string(),
        }
    }

    /// Mean entropy over the given topics, `None` if the set is empty.
    pub fn mean_entropy_of(&self, topics: &[usize]) -> Option<f64> {
        if topics.is_empty() {
            return None;
        }
        Some(topics.iter().map(|&k| self.entropy[k]).sum::<f64>() / topics.len() as f64)
    }

    /// Checks shapes, row-stochasticity within `tol`, strict positivity of
    /// the estimates and the entropy/segmentation invariants.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let (k, v, c) = (self.num_topics(), self.vocab_size(), self.num_classes());
        let bad = |m: String| Err(Error::Invalid(m));
        if k != self.hyperparams.topics || self.theta_class.cols() != k || self.entropy.len() != k {
            return bad("topic count mismatch".into());
        }
        if v != self.vocabulary.len() {
            return bad(format!(
                "beta has {v} columns for {} terms",
                self.vocabulary.len()
            ));
        }
        if c < 2 {
            return bad("need at least 2 classes".into());
        }
        if let Some(names) = &self.class_names {
            if names.len() != c {
                return bad(format!("{} class names for {c} classes", names.len()));
            }
        }
        for (name, m) in [("beta", &self.beta), ("theta_class", &self.theta_class)] {
            if m.as_slice().iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return bad(format!("{name} has a non-positive entry"));
            }
            let err = m.max_row_sum_error();
            if err > tol {
                return bad(format!("{name} row sum off by {err:e}"));
            }
        }
        if self.entropy.iter().any(|h| !(0.0..=1.0).contains(h)) {
            return bad("entropy outside [0, 1]".into());
        }
        let seg = &self.segmentation;
        let mut all: Vec<usize> = seg.private.iter().chain(&seg.shared).copied().collect();
        all.sort_unstable();
        if all != (0..k).collect::<Vec<_>>() {
            return bad("segmentation is not a partition of the topics".into());
        }
        for &p in &seg.private {
            for &s in &seg.shared {
                if self.entropy[p] >= self.entropy[s] {
                    return bad(format!("private topic {p} has H >= shared topic {s}"));
                }
            }
        }
        Ok(())
    }
}

/// Running average of β̂ and θ̂ over sampler snapshots.
#[derive(Debug, Clone)]
pub struct EstimateAverager {
    beta_sum: Matrix,
    theta_sum: Matrix,
    count: usize,
    last_h_bar: f64,
}

impl EstimateAverager {
    pub fn new(num_docs: usize, num_topics: usize, vocab_size: usize) -> Self {
        Self {
            beta_sum: Matrix::zeros(num_topics, vocab_size),
            theta_sum: Matrix::zeros(num_docs, num_topics),
            count: 0,
            last_h_bar: 1.0,
        }
    }

    pub fn add(&mut self, state: &ModelState, hp: &Hyperparams) {
        let beta = estimate_beta(state, hp);
        let theta = estimate_theta(state, hp);
        accumulate(&mut self.beta_sum, &beta);
        accumulate(&mut self.theta_sum, &theta);
        self.count += 1;
        self.last_h_bar = state.h_bar;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(self, corpus: &Corpus, hp: &Hyperparams) -> Result<TrainedModel> {
        if self.count == 0 {
            return Err(Error::Invalid("no snapshots to average".into()));
        }
        let scale = 1.0 / self.count as f64;
        let beta = scaled(self.beta_sum, scale);
        let theta = scaled(self.theta_sum, scale);
        let theta_class = compute_theta_class(&theta, &corpus.labels(), corpus.num_classes())?;
        TrainedModel::from_parts(
            beta,
            theta_class,
            self.last_h_bar,
            hp.clone(),
            corpus.vocabulary().clone(),
            corpus.class_names().map(<[String]>::to_vec),
            None,
        )
    }
}

fn accumulate(sum: &mut Matrix, x: &Matrix) {
    for i in 0..sum.rows() {
        for (s, &v) in sum.row_mut(i).iter_mut().zip(x.row(i)) {
            *s += v;
        }
    }
}

fn scaled(mut m: Matrix, s: f64) -> Matrix {
    for i in 0..m.rows() {
        m.row_mut(i).iter_mut().for_each(|x| *x *= s);
    }
    m
}

/// Averages the estimators of post-burn-in snapshots into a trained model.
pub fn finalize_model(
    snapshots: &[ModelState],
    corpus: &Corpus,
    hp: &Hyperparams,
) -> Result<TrainedModel> {
    let mut avg = EstimateAverager::new(corpus.num_docs(), hp.topics, corpus.vocab_size());
    for s in snapshots {
        avg.add(s, hp);
    }
    avg.finish(corpus, hp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_corpus() -> Corpus {
        let vocab = Vocabulary::new((0..4).map(|i| format!("t{i}")).collect()).unwrap();
        let docs = vec![
            Document::from_counts([(0, 3), (1, 1)], 0).unwrap(),
            Document::from_counts([(2, 2), (3, 2)], 1).unwrap(),
            Document::from_counts([(0, 1), (3, 5)], 1).unwrap(),
        ];
        Corpus::new(vocab, docs, 2, None).unwrap()
    }

    fn hp(k: usize) -> Hyperparams {
        Hyperparams {
            topics: k,
            alpha: 0.5,
            pi: 0.1,
            iterations: 10,
            burn_in: 5,
            ..Hyperparams::default()
        }
    }

    #[test]
    fn hyperparam_validation() {
        assert!(hp(2).validate().is_ok());
        assert!(hp(1).validate().is_err());
        assert!(Hyperparams {
            alpha: 0.0,
            ..hp(2)
        }
        .validate()
        .is_err());
        assert!(Hyperparams { pi: -1.0, ..hp(2) }.validate().is_err());
        assert!(Hyperparams {
            burn_in: 10,
            ..hp(2)
        }
        .validate()
        .is_err());
        assert!(Hyperparams {
            sample_every: 0,
            ..hp(2)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn init_single_token() {
        let vocab = Vocabulary::new(vec!["a".into()]).unwrap();
        let docs = vec![
            Document::from_counts([(0, 1)], 0).unwrap(),
            Document::from_counts([(0, 1)], 1).unwrap(),
        ];
        let corpus = Corpus::new(vocab, docs, 2, None).unwrap();
        let s = ModelState::init(&corpus, &hp(2), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(s.z[0].len(), 1);
        assert!(s.z[0][0] < 2);
        assert_eq!(s.n_k.iter().sum::<u32>(), 2);
        s.check_consistency(&corpus).unwrap();
    }

    #[test]
    fn init_is_consistent_and_deterministic() {
        let corpus = small_corpus();
        let a = ModelState::init(&corpus, &hp(3), &mut ChaCha8Rng::seed_from_u64(9));
        let b = ModelState::init(&corpus, &hp(3), &mut ChaCha8Rng::seed_from_u64(9));
        a.check_consistency(&corpus).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.h_bar));
    }

    #[test]
    fn beta_examples() {
        let corpus = small_corpus();
        let mut s = ModelState::init(&corpus, &hp(2), &mut ChaCha8Rng::seed_from_u64(0));
        s.n_kv = Matrix::from_rows(&[vec![0, 0, 0, 0], vec![3, 1, 0, 0]]);
        s.n_k = vec![0, 4];
        let b = estimate_beta(&s, &Hyperparams { pi: 0.1, ..hp(2) });
        assert_eq!(b.row(0), &[0.25; 4]);
        assert!(b.max_row_sum_error() < 1e-12);

        let vocab = Vocabulary::new(vec!["a".into(), "b".into()]).unwrap();
        let c2 = Corpus::new(
            vocab,
            vec![
                Document::from_counts([(0, 3), (1, 1)], 0).unwrap(),
                Document::from_counts([(0, 1)], 1).unwrap(),
            ],
            2,
            None,
        )
        .unwrap();
        let mut s = ModelState::init(&c2, &hp(2), &mut ChaCha8Rng::seed_from_u64(0));
        s.n_kv = Matrix::from_rows(&[vec![3, 1], vec![1, 0]]);
        s.n_k = vec![4, 1];
        let b = estimate_beta(&s, &Hyperparams { pi: 1.0, ..hp(2) });
        assert!((b[(0, 0)] - 4.0 / 6.0).abs() < 1e-15);
        assert!((b[(0, 1)] - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn theta_examples() {
        let corpus = small_corpus();
        let mut s = ModelState::init(&corpus, &hp(2), &mut ChaCha8Rng::seed_from_u64(0));
        s.n_dk = Matrix::from_rows(&[vec![2, 2], vec![4, 0], vec![6, 0]]);
        let t = estimate_theta(
            &s,
            &Hyperparams {
                alpha: 0.5,
                ..hp(2)
            },
        );
        assert_eq!(t.row(0), &[0.5, 0.5]);
        assert!(t.max_row_sum_error() < 1e-12);
        let t = estimate_theta(
            &s,
            &Hyperparams {
                alpha: 1e-12,
                ..hp(2)
            },
        );
        assert!((t[(1, 0)] - 1.0).abs() < 1e-9 && t[(1, 1)] < 1e-9);
    }

    #[test]
    fn theta_class_examples() {
        let theta = Matrix::from_rows(&[vec![0.2, 0.8], vec![0.7, 0.3]]);
        let tc = compute_theta_class(&theta, &[0, 1], 2).unwrap();
        assert_eq!(tc, theta);

        let theta = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.7]]);
        let tc = compute_theta_class(&theta, &[0, 0, 1], 2).unwrap();
        assert_eq!(tc.row(0), &[0.5, 0.5]);

        let scaled = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 3.0], vec![0.3, 0.7]]);
        assert_eq!(compute_theta_class(&scaled, &[0, 0, 1], 2).unwrap(), tc);

        let permuted = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.3, 0.7], vec![1.0, 0.0]]);
        assert_eq!(compute_theta_class(&permuted, &[0, 1, 0], 2).unwrap(), tc);

        assert!(matches!(
            compute_theta_class(&theta, &[0, 0, 0], 2),
            Err(Error::EmptyClass(1))
        ));
    }

    #[test]
    fn finalize_averaging() {
        let corpus = small_corpus();
        let h = hp(3);
        let s = ModelState::init(&corpus, &h, &mut ChaCha8Rng::seed_from_u64(4));
        let one = finalize_model(std::slice::from_ref(&s), &corpus, &h).unwrap();
        assert_eq!(one.beta, estimate_beta(&s, &h));
        let theta = estimate_theta(&s, &h);
        assert_eq!(
            one.theta_class,
            compute_theta_class(&theta, &corpus.labels(), 2).unwrap()
        );

        let two = finalize_model(&[s.clone(), s.clone()], &corpus, &h).unwrap();
        assert!(two
            .beta
            .as_slice()
            .iter()
            .zip(one.beta.as_slice())
            .all(|(a, b)| (a - b).abs() < 1e-15));

        let t = ModelState::init(&corpus, &h, &mut ChaCha8Rng::seed_from_u64(5));
        let mixed = finalize_model(&[s, t], &corpus, &h).unwrap();
        assert!(mixed.beta.max_row_sum_error() < 1e-9);
        assert!(mixed.theta_class.max_row_sum_error() < 1e-9);
        mixed.validate(1e-9).unwrap();

        assert!(finalize_model(&[], &corpus, &h).is_err());
    }
}
