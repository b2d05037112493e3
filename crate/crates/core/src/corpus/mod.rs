//! Labeled bag-of-words corpora.
//!
//! Documents are stored as sorted sparse term counts over a shared
//! [`Vocabulary`]. Indices are 0-based everywhere in memory; the on-disk
//! formats in [`io`] are 1-based.

mod io;
mod synthetic;
mod text;

use std::collections::{BTreeMap, HashSet};

pub use io::{
    load_corpus, load_corpus_with_classes, load_unlabeled, read_condition_tags, save_corpus,
};
pub use synthetic::{
    generate_synthetic, generate_synthetic_with_holdout, GroundTruth, SyntheticSpec, TopicRole,
};
pub use text::{build_corpus_from_text, tokenize_text};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
}

impl Vocabulary {
    pub fn new(terms: Vec<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Corpus("vocabulary is empty".into()));
        }
        let mut seen = HashSet::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if !seen.insert(t.as_str()) {
                return Err(Error::Corpus(format!(
                    "duplicate vocabulary term {t:?} at index {i}"
                )));
            }
        }
        Ok(Self { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }
}

/// A bag of words with a class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    /// `(term, count)` pairs sorted by term, counts strictly positive.
    counts: Vec<(usize, u32)>,
    len: usize,
    pub label: usize,
}

impl Document {
    /// Builds a document from `(term, count)` pairs; repeated terms are merged
    /// and zero counts are rejected.
    pub fn from_counts(
        pairs: impl IntoIterator<Item = (usize, u32)>,
        label: usize,
    ) -> Result<Self> {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for (term, count) in pairs {
            if count == 0 {
                return Err(Error::Corpus(format!("zero count for term {term}")));
            }
            *merged.entry(term).or_insert(0) += count;
        }
        let counts: Vec<(usize, u32)> = merged.into_iter().collect();
        let len = counts.iter().map(|&(_, c)| c as usize).sum();
        Ok(Self { counts, len, label })
    }

    /// Builds a document from a token-index sequence.
    pub fn from_tokens(tokens: impl IntoIterator<Item = usize>, label: usize) -> Self {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for t in tokens {
            *merged.entry(t).or_insert(0) += 1;
        }
        let counts: Vec<(usize, u32)> = merged.into_iter().collect();
        let len = counts.iter().map(|&(_, c)| c as usize).sum();
        Self { counts, len, label }
    }

    pub fn counts(&self) -> &[(usize, u32)] {
        &self.counts
    }

    /// Total token count N.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_of(&self, term: usize) -> u32 {
        self.counts
            .binary_search_by_key(&term, |&(t, _)| t)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Expands the bag into one entry per token, in ascending term order.
    pub fn tokens(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .flat_map(|&(t, c)| std::iter::repeat_n(t, c as usize))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    vocabulary: Vocabulary,
    documents: Vec<Document>,
    num_classes: usize,
    class_names: Option<Vec<String>>,
}

impl Corpus {
    /// Validates term indices and labels. Class coverage is not required
    /// here (test folds may miss classes); see [`Corpus::validate_for_training`].
    pub fn new(
        vocabulary: Vocabulary,
        documents: Vec<Document>,
        num_classes: usize,
        class_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::Corpus(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        if let Some(names) = &class_names {
            if names.len() != num_classes {
                return Err(Error::Corpus(format!(
                    "{} class names for {num_classes} classes",
                    names.len()
                )));
            }
        }
        let v = vocabulary.len();
        for (m, doc) in documents.iter().enumerate() {
            if doc.label >= num_classes {
                return Err(Error::Corpus(format!(
                    "document {m} has label {} >= {num_classes}",
                    doc.label
                )));
            }
            if let Some(&(t, _)) = doc.counts.last() {
                if t >= v {
                    return Err(Error::Corpus(format!(
                        "document {m} has term index {t} >= {v}"
                    )));
                }
            }
        }
        Ok(Self {
            vocabulary,
            documents,
            num_classes,
            class_names,
        })
    }

    /// Training needs every class represented and no empty documents.
    pub fn validate_for_training(&self) -> Result<()> {
        if let Some(m) = self.documents.iter().position(Document::is_empty) {
            return Err(Error::Corpus(format!("document {m} is empty")));
        }
        let sizes = self.class_sizes();
        if let Some(c) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::EmptyClass(c));
        }
        Ok(())
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    /// Display name for class `c`: its string label if known, else the index.
    pub fn class_name(&self, c: usize) -> String {
        match &self.class_names {
            Some(names) => names[c].clone(),
            None => c.to_string(),
        }
    }

    pub fn labels(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.label).collect()
    }

    /// Number of documents per class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_classes];
        for d in &self.documents {
            sizes[d.label] += 1;
        }
        sizes
    }

    pub fn num_tokens(&self) -> usize {
        self.documents.iter().map(Document::len).sum()
    }

    /// A corpus over the same vocabulary and classes holding the selected
    /// documents, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            vocabulary: self.vocabulary.clone(),
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            num_classes: self.num_classes,
            class_names: self.class_names.clone(),
        }
    }
}
