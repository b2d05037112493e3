//! Seeded generator for corpora with known class-private and shared topics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub private_topics_per_class: usize,
    pub shared_topics: usize,
    pub vocab_size: usize,
    pub docs_per_class: usize,
    pub doc_length: usize,
    /// Probability that a token is drawn from a shared topic.
    pub noise_fraction: f64,
    /// Symmetric Dirichlet parameter for each topic's word distribution.
    pub topic_word_concentration: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            num_classes: 4,
            private_topics_per_class: 1,
            shared_topics: 4,
            vocab_size: 64,
            docs_per_class: 50,
            doc_length: 100,
            noise_fraction: 0.7,
            topic_word_concentration: 0.5,
            seed: 7,
        }
    }
}

impl SyntheticSpec {
    pub fn num_topics(&self) -> usize {
        self.num_classes * self.private_topics_per_class + self.shared_topics
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("num_classes", self.num_classes),
            ("private_topics_per_class", self.private_topics_per_class),
            ("shared_topics", self.shared_topics),
            ("vocab_size", self.vocab_size),
            ("docs_per_class", self.docs_per_class),
            ("doc_length", self.doc_length),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::SyntheticSpec(format!("{name} must be >= 1")));
            }
        }
        if self.num_classes < 2 {
            return Err(Error::SyntheticSpec("num_classes must be >= 2".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_fraction) {
            return Err(Error::SyntheticSpec(format!(
                "noise_fraction {} outside [0, 1]",
                self.noise_fraction
            )));
        }
        if !(self.topic_word_concentration > 0.0 && self.topic_word_concentration.is_finite()) {
            return Err(Error::SyntheticSpec(
                "topic_word_concentration must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopicRole {
    Private(usize),
    Shared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// K×V generating word distributions.
    pub beta: Vec<Vec<f64>>,
    pub roles: Vec<TopicRole>,
    /// Per-document count of tokens drawn from each generating topic.
    pub doc_topic_counts: Vec<Vec<u32>>,
}

impl GroundTruth {
    /// Fraction of all tokens that came from shared topics.
    pub fn shared_token_fraction(&self) -> f64 {
        let mut shared = 0u64;
        let mut total = 0u64;
        for row in &self.doc_topic_counts {
            for (k, &n) in row.iter().enumerate() {
                total += n as u64;
                if self.roles[k] == TopicRole::Shared {
                    shared += n as u64;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            shared as f64 / total as f64
        }
    }
}

fn draw_dirichlet(rng: &mut ChaCha8Rng, dim: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    loop {
        let draws: Vec<f64> = (0..dim).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|x| x / total).collect();
        }
    }
}

fn draw_categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

struct Generator<'a> {
    spec: &'a SyntheticSpec,
    beta: Vec<Vec<f64>>,
    roles: Vec<TopicRole>,
    rng: ChaCha8Rng,
}

impl<'a> Generator<'a> {
    fn new(spec: &'a SyntheticSpec) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let k = spec.num_topics();
        let beta = (0..k)
            .map(|_| draw_dirichlet(&mut rng, spec.vocab_size, spec.topic_word_concentration))
            .collect();
        let mut roles = Vec::with_capacity(k);
        for c in 0..spec.num_classes {
            roles.extend(std::iter::repeat_n(
                TopicRole::Private(c),
                spec.private_topics_per_class,
            ));
        }
        roles.extend(std::iter::repeat_n(TopicRole::Shared, spec.shared_topics));
        Self {
            spec,
            beta,
            roles,
            rng,
        }
    }

    /// Draws `per_class` documents for every class, class-major.
    fn documents(&mut self, per_class: usize) -> (Vec<Document>, Vec<Vec<u32>>) {
        let spec = self.spec;
        let p = spec.private_topics_per_class;
        let shared_start = spec.num_classes * p;
        let mut docs = Vec::with_capacity(per_class * spec.num_classes);
        let mut topic_counts = Vec::with_capacity(docs.capacity());
        for c in 0..spec.num_classes {
            for _ in 0..per_class {
                let mut counts = vec![0u32; self.roles.len()];
                let mut tokens = Vec::with_capacity(spec.doc_length);
                for _ in 0..spec.doc_length {
                    let topic = if self.rng.random::<f64>() < spec.noise_fraction {
                        shared_start + self.rng.random_range(0..spec.shared_topics)
                    } else {
                        c * p + self.rng.random_range(0..p)
                    };
                    counts[topic] += 1;
                    tokens.push(draw_categorical(&mut self.rng, &self.beta[topic]));
                }
                docs.push(Document::from_tokens(tokens, c));
                topic_counts.push(counts);
            }
        }
        (docs, topic_counts)
    }

    fn corpus(&self, docs: Vec<Document>) -> Result<Corpus> {
        let vocab = Vocabulary::new((0..self.spec.vocab_size).map(|i| format!("w{i}")).collect())?;
        Corpus::new(vocab, docs, self.spec.num_classes, None)
    }
}

/// Generates a labeled corpus and the ground truth that produced it.
/// Pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Corpus, GroundTruth)> {
    let (train, _, truth) = generate_synthetic_with_holdout(spec, 0)?;
    Ok((train, truth))
}

/// As [`generate_synthetic`], then draws `test_docs_per_class` further
/// documents per class from the same generating topics. The training corpus
/// is identical to what [`generate_synthetic`] returns for the same spec.
/// Ground-truth topic counts cover training documents only.
pub fn generate_synthetic_with_holdout(
    spec: &SyntheticSpec,
    test_docs_per_class: usize,
) -> Result<(Corpus, Corpus, GroundTruth)> {
    spec.validate()?;
    let mut gen = Generator::new(spec);
    let (train_docs, doc_topic_counts) = gen.documents(spec.docs_per_class);
    let (test_docs, _) = gen.documents(test_docs_per_class);
    let train = gen.corpus(train_docs)?;
    let test = gen.corpus(test_docs)?;
    let truth = GroundTruth {
        beta: gen.beta,
        roles: gen.roles,
        doc_topic_counts,
    };
    Ok((train, test, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_spec_shape_and_noise_fraction() {
        let spec = SyntheticSpec {
            noise_fraction: 0.7,
            seed: 7,
            ..SyntheticSpec::default()
        };
        let (corpus, truth) = generate_synthetic(&spec).unwrap();
        assert_eq!(corpus.num_docs(), 200);
        assert!(corpus.documents().iter().all(|d| d.len() == 100));
        assert_eq!(corpus.class_sizes(), vec![50; 4]);
        // 20000 Bernoulli(0.7) draws: sd ~ 0.0032, so 0.03 is > 9 sd.
        let f = truth.shared_token_fraction();
        assert!((f - 0.7).abs() <= 0.03, "shared fraction {f}");
        for (doc, counts) in corpus.documents().iter().zip(&truth.doc_topic_counts) {
            assert_eq!(counts.iter().sum::<u32>() as usize, doc.len());
        }
        for row in &truth.beta {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_zero_uses_only_own_private_topics() {
        let spec = SyntheticSpec {
            noise_fraction: 0.0,
            private_topics_per_class: 2,
            ..SyntheticSpec::default()
        };
        let (corpus, truth) = generate_synthetic(&spec).unwrap();
        assert_eq!(truth.shared_token_fraction(), 0.0);
        for (doc, counts) in corpus.documents().iter().zip(&truth.doc_topic_counts) {
            for (k, &n) in counts.iter().enumerate() {
                if n > 0 {
                    assert_eq!(truth.roles[k], TopicRole::Private(doc.label));
                }
            }
        }
    }

    #[test]
    fn lambda_one_uses_only_shared_topics() {
        let spec = SyntheticSpec {
            noise_fraction: 1.0,
            ..SyntheticSpec::default()
        };
        let (_, truth) = generate_synthetic(&spec).unwrap();
        assert_eq!(truth.shared_token_fraction(), 1.0);
    }

    #[test]
    fn deterministic_and_holdout_prefix() {
        let spec = SyntheticSpec::default();
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        let (train, test, truth) = generate_synthetic_with_holdout(&spec, 10).unwrap();
        assert_eq!(train, a.0);
        assert_eq!(truth, a.1);
        assert_eq!(test.num_docs(), 40);
        let other = generate_synthetic(&SyntheticSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(other.0, a.0);
    }

    #[test]
    fn rejects_invalid_spec() {
        let bad = [
            SyntheticSpec {
                noise_fraction: 1.5,
                ..Default::default()
            },
            SyntheticSpec {
                shared_topics: 0,
                ..Default::default()
            },
            SyntheticSpec {
                num_classes: 1,
                ..Default::default()
            },
            SyntheticSpec {
                topic_word_concentration: 0.0,
                ..Default::default()
            },
        ];
        for spec in bad {
            assert!(generate_synthetic(&spec).is_err(), "{spec:?}");
        }
    }
}
