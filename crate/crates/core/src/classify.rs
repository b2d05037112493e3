//! Maximum-likelihood classification with a trained model, and the
//! evaluation protocols built on it.
//!
//! A document's score for class `c` is its log-likelihood under the topic
//! mixture given by row `c` of `theta_class`:
//! `sum_v count(v) * log sum_k theta_class[c, k] * beta[k, v]`.
//! Topics spread evenly across classes contribute the same amount to every
//! class and so do not move the argmax.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::corpus::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::model::TrainedModel;

#[inline]
fn mixture(model: &TrainedModel, c: usize, v: usize) -> f64 {
    let row = model.theta_class.row(c);
    (0..row.len()).map(|k| row[k] * model.beta[(k, v)]).sum()
}

pub fn doc_log_likelihood(doc: &Document, class: usize, model: &TrainedModel) -> f64 {
    doc.counts()
        .iter()
        .map(|&(v, n)| n as f64 * mixture(model, class, v).ln())
        .sum()
}

fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

/// Returns the most likely class (lowest index on ties) and every class's
/// log-likelihood.
pub fn classify(doc: &Document, model: &TrainedModel) -> (usize, Vec<f64>) {
    let scores: Vec<f64> = (0..model.num_classes())
        .map(|c| doc_log_likelihood(doc, c, model))
        .collect();
    (argmax_lowest(&scores), scores)
}

/// Precomputed `log sum_k theta_class[c, k] beta[k, v]` for every class and
/// term, for scoring many documents.
pub struct Scorer<'a> {
    model: &'a TrainedModel,
    log_mix: Vec<f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(model: &'a TrainedModel) -> Self {
        let (c, v) = (model.num_classes(), model.vocab_size());
        let mut log_mix = Vec::with_capacity(c * v);
        for cl in 0..c {
            log_mix.extend((0..v).map(|t| mixture(model, cl, t).ln()));
        }
        Self { model, log_mix }
    }

    /// Same result as [`classify`].
    pub fn classify(&self, doc: &Document) -> (usize, Vec<f64>) {
        let v = self.model.vocab_size();
        let scores: Vec<f64> = (0..self.model.num_classes())
            .map(|c| {
                let table = &self.log_mix[c * v..(c + 1) * v];
                doc.counts().iter().map(|&(t, n)| n as f64 * table[t]).sum()
            })
            .collect();
        (argmax_lowest(&scores), scores)
    }
}

/// Re-encodes `corpus` over `vocab`, dropping terms `vocab` does not know.
/// Returns the re-encoded corpus and the number of dropped tokens.
pub fn align_to_vocabulary(corpus: &Corpus, vocab: &Vocabulary) -> Result<(Corpus, usize)> {
    if corpus.vocabulary() == vocab {
        return Ok((corpus.clone(), 0));
    }
    let index: HashMap<&str, usize> = vocab
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut dropped = 0;
    let mut docs = Vec::with_capacity(corpus.num_docs());
    for doc in corpus.documents() {
        let mut pairs = Vec::with_capacity(doc.counts().len());
        for &(t, n) in doc.counts() {
            match index.get(corpus.vocabulary().term(t)) {
                Some(&i) => pairs.push((i, n)),
                None => dropped += n as usize,
            }
        }
        docs.push(Document::from_counts(pairs, doc.label)?);
    }
    let names = corpus.class_names().map(<[String]>::to_vec);
    Ok((
        Corpus::new(vocab.clone(), docs, corpus.num_classes(), names)?,
        dropped,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    /// Accuracy within each true class; `None` for classes absent from the
    /// test set.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub n_test: usize,
    pub class_names: Vec<String>,
    pub predictions: Vec<usize>,
}

impl EvalReport {
    fn from_predictions(truth: &[usize], predicted: Vec<usize>, class_names: Vec<String>) -> Self {
        let c = class_names.len();
        let mut confusion = vec![vec![0usize; c]; c];
        for (&t, &p) in truth.iter().zip(&predicted) {
            confusion[t][p] += 1;
        }
        let n_test = truth.len();
        let correct: usize = (0..c).map(|i| confusion[i][i]).sum();
        let accuracy = if n_test == 0 {
            0.0
        } else {
            correct as f64 / n_test as f64
        };
        let per_class_accuracy = confusion
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: usize = row.iter().sum();
                (n > 0).then(|| row[i] as f64 / n as f64)
            })
            .collect();
        Self {
            accuracy,
            per_class_accuracy,
            confusion,
            n_test,
            class_names,
            predictions: predicted,
        }
    }

    /// Pools several reports over the same classes (e.g. hold-one-out folds).
    pub fn combine(reports: &[EvalReport]) -> Option<EvalReport> {
        let names = reports.first()?.class_names.clone();
        let mut truth = Vec::new();
        let mut pred = Vec::new();
        for r in reports {
            for (t, row) in r.confusion.iter().enumerate() {
                for (p, &n) in row.iter().enumerate() {
                    truth.extend(std::iter::repeat_n(t, n));
                    pred.extend(std::iter::repeat_n(p, n));
                }
            }
        }
        Some(Self::from_predictions(&truth, pred, names))
    }

    /// `accuracy=<float> n=<int>` followed by the confusion matrix as CSV
    /// (rows = true class, columns = predicted class).
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "accuracy={} n={}", self.accuracy, self.n_test);
        let _ = writeln!(out, "true\\predicted,{}", self.class_names.join(","));
        for (name, row) in self.class_names.iter().zip(&self.confusion) {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{name},{}", cells.join(","));
        }
        out
    }
}

/// Classifies every test document. Empty documents are assigned class 0.
pub fn evaluate(test: &Corpus, model: &TrainedModel) -> Result<EvalReport> {
    if test.vocabulary() != &model.vocabulary {
        return Err(Error::Invalid(
            "test vocabulary differs from model vocabulary".into(),
        ));
    }
    let c = model.num_classes();
    if let Some((m, d)) = test
        .documents()
        .iter()
        .enumerate()
        .find(|(_, d)| d.label >= c)
    {
        return Err(Error::Invalid(format!(
            "test document {m} has class {} but the model has {c} classes",
            d.label
        )));
    }
    let scorer = Scorer::new(model);
    let mut empty = 0;
    let predicted: Vec<usize> = test
        .documents()
        .iter()
        .map(|d| {
            if d.is_empty() {
                empty += 1;
            }
            scorer.classify(d).0
        })
        .collect();
    if empty > 0 {
        log::warn!("{empty} empty test documents assigned class 0");
    }
    let names = (0..c).map(|i| model.class_name(i)).collect();
    Ok(EvalReport::from_predictions(
        &test.labels(),
        predicted,
        names,
    ))
}

pub enum HoldoutMode<'a> {
    /// One fold per document: train on the rest, test on it.
    HoldOneOut,
    /// The corpus is the training set; `test` is the separate test set.
    FixedSplit { test: &'a Corpus },
    /// One fold per distinct (class, tag) pair: every document with that
    /// pair is held out.
    ConditionHoldout { tags: &'a [String] },
}

/// Training/test index lists for each fold, in fold order.
pub fn holdout_folds(
    corpus: &Corpus,
    mode: &HoldoutMode<'_>,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let m = corpus.num_docs();
    match mode {
        HoldoutMode::HoldOneOut => Ok((0..m)
            .map(|i| ((0..m).filter(|&j| j != i).collect(), vec![i]))
            .collect()),
        HoldoutMode::FixedSplit { .. } => Ok(vec![((0..m).collect(), Vec::new())]),
        HoldoutMode::ConditionHoldout { tags } => {
            if tags.len() != m {
                return Err(Error::Invalid(format!(
                    "condition tag missing: {} tags for {m} documents",
                    tags.len()
                )));
            }
            let mut groups: Vec<((usize, &str), Vec<usize>)> = Vec::new();
            for (i, doc) in corpus.documents().iter().enumerate() {
                let key = (doc.label, tags[i].as_str());
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, idx)) => idx.push(i),
                    None => groups.push((key, vec![i])),
                }
            }
            groups.sort_by(|a, b| a.0.cmp(&b.0));
            Ok(groups
                .into_iter()
                .map(|(_, test)| {
                    let train = (0..m).filter(|j| test.binary_search(j).is_err()).collect();
                    (train, test)
                })
                .collect())
        }
    }
}

/// Yields `(train, test)` corpora for the chosen protocol. All folds share
/// the corpus vocabulary.
pub fn holdout_split<'a>(
    corpus: &'a Corpus,
    mode: HoldoutMode<'a>,
) -> Result<Box<dyn Iterator<Item = (Corpus, Corpus)> + 'a>> {
    if let HoldoutMode::FixedSplit { test } = mode {
        if test.vocabulary() != corpus.vocabulary() {
            return Err(Error::Invalid("train and test vocabularies differ".into()));
        }
        return Ok(Box::new(std::iter::once((corpus.clone(), test.clone()))));
    }
    let folds = holdout_folds(corpus, &mode)?;
    Ok(Box::new(folds.into_iter().map(move |(train, test)| {
        (corpus.subset(&train), corpus.subset(&test))
    })))
}
