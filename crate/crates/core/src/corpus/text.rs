use std::collections::HashMap;

use super::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};

/// Lowercases and splits on maximal runs of non-alphanumeric characters.
/// No stemming and no stop-word list.
pub fn tokenize_text(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Builds a corpus from raw labeled texts, keeping tokens that occur at least
/// `min_count` times overall. The vocabulary is in first-occurrence order.
/// Documents left empty by the filter are dropped.
pub fn build_corpus_from_text<S: AsRef<str>>(
    texts: &[(S, usize)],
    min_count: usize,
) -> Result<Corpus> {
    let num_classes = texts.iter().map(|(_, c)| c + 1).max().unwrap_or(0);
    let tokenized: Vec<Vec<String>> = texts
        .iter()
        .map(|(t, _)| tokenize_text(t.as_ref()))
        .collect();

    let mut totals: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for tok in tokenized.iter().flatten() {
        let n = totals.entry(tok.as_str()).or_insert(0);
        if *n == 0 {
            order.push(tok.as_str());
        }
        *n += 1;
    }
    let kept: Vec<&str> = order
        .into_iter()
        .filter(|t| totals[t] >= min_count.max(1))
        .collect();
    let index: HashMap<&str, usize> = kept.iter().enumerate().map(|(i, &t)| (t, i)).collect();

    let mut documents = Vec::new();
    let mut per_class = vec![0usize; num_classes];
    for (m, (tokens, &(_, label))) in tokenized.iter().zip(texts).enumerate() {
        let doc = Document::from_tokens(
            tokens.iter().filter_map(|t| index.get(t.as_str()).copied()),
            label,
        );
        if doc.is_empty() {
            log::warn!("dropping text {m}: empty after vocabulary filtering");
            continue;
        }
        per_class[label] += 1;
        documents.push(doc);
    }
    if let Some(c) = per_class.iter().position(|&n| n == 0) {
        return Err(Error::EmptyClass(c));
    }
    let vocabulary = Vocabulary::new(kept.into_iter().map(String::from).collect())?;
    Corpus::new(vocabulary, documents, num_classes, None)
}
