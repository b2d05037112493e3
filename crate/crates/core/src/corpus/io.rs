//! Readers and writers for the UCI-style bag-of-words file triple
//! (docword, labels, vocab), all 1-indexed on disk.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};

/// Splits file content into lines, tolerating CRLF and a missing or present
/// trailing newline. Returns `(1-based line number, line)`.
fn lines(text: &str) -> Vec<(usize, &str)> {
    let mut out: Vec<(usize, &str)> = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .collect();
    if out.last().is_some_and(|(_, l)| l.is_empty()) {
        out.pop();
    }
    out
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn file_label(path: &Path) -> String {
    path.display().to_string()
}

pub(crate) fn parse_vocab(text: &str, file: &str) -> Result<Vocabulary> {
    let mut terms = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (line, term) in lines(text) {
        if let Some(first) = seen.insert(term, line) {
            return Err(Error::parse(
                file,
                line,
                format!("duplicate vocab term {term:?} (first seen at line {first})"),
            ));
        }
        terms.push(term.to_string());
    }
    if terms.is_empty() {
        return Err(Error::parse(file, 1, "empty vocabulary"));
    }
    Vocabulary::new(terms)
}

fn header_value(lines: &[(usize, &str)], i: usize, name: &str, file: &str) -> Result<usize> {
    let (line, text) = lines
        .get(i)
        .copied()
        .ok_or_else(|| Error::parse(file, i + 1, format!("malformed header: missing {name}")))?;
    text.trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(file, line, format!("malformed header: bad {name} {text:?}")))
}

/// Sparse `(term, count)` list of one document, 0-based.
type Bag = Vec<(usize, u32)>;

/// Parses a docword file into per-document bags. Returns `(W, documents)`.
pub(crate) fn parse_docword(text: &str, file: &str) -> Result<(usize, Vec<Bag>)> {
    let lines = lines(text);
    let d = header_value(&lines, 0, "D", file)?;
    let w = header_value(&lines, 1, "W", file)?;
    let nnz = header_value(&lines, 2, "NNZ", file)?;
    let entries = &lines[3.min(lines.len())..];
    if entries.len() != nnz {
        let line = lines.last().map_or(3, |(l, _)| *l);
        return Err(Error::parse(
            file,
            line,
            format!("malformed header: NNZ={nnz} but {} entries", entries.len()),
        ));
    }

    let mut docs: Vec<Vec<(usize, u32)>> = vec![Vec::new(); d];
    let mut prev_doc = 0usize;
    for &(line, entry) in entries {
        let fields: Vec<&str> = entry.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(file, line, "expected \"docId termId count\""));
        }
        let parse = |s: &str, what: &str| {
            s.parse::<i64>()
                .map_err(|_| Error::parse(file, line, format!("bad {what} {s:?}")))
        };
        let doc_id = parse(fields[0], "docId")?;
        let term_id = parse(fields[1], "termId")?;
        let count = parse(fields[2], "count")?;
        if doc_id < 1 || doc_id as usize > d {
            return Err(Error::parse(file, line, "document index out of range"));
        }
        if term_id < 1 || term_id as usize > w {
            return Err(Error::parse(file, line, "term index out of range"));
        }
        if count <= 0 {
            return Err(Error::parse(file, line, "count must be positive"));
        }
        if count > u32::MAX as i64 {
            return Err(Error::parse(file, line, "count too large"));
        }
        let doc = doc_id as usize;
        if doc < prev_doc {
            return Err(Error::parse(file, line, "docId not ascending"));
        }
        prev_doc = doc;
        let term = term_id as usize - 1;
        let bag = &mut docs[doc - 1];
        if bag.iter().any(|&(t, _)| t == term) {
            return Err(Error::parse(file, line, "duplicate (docId, termId) entry"));
        }
        bag.push((term, count as u32));
    }
    Ok((w, docs))
}

enum Labels {
    Numeric(Vec<usize>),
    Named(Vec<String>),
}

fn parse_labels(text: &str, file: &str) -> Result<Labels> {
    let raw: Vec<(usize, &str)> = lines(text);
    if let Some(&(line, _)) = raw.iter().find(|(_, l)| l.trim().is_empty()) {
        return Err(Error::parse(file, line, "empty label"));
    }
    let numeric: Option<Vec<usize>> = raw.iter().map(|(_, l)| l.trim().parse().ok()).collect();
    Ok(match numeric {
        Some(v) => Labels::Numeric(v),
        None => Labels::Named(raw.iter().map(|(_, l)| l.trim().to_string()).collect()),
    })
}

fn classes_sidecar(labels_path: &Path) -> PathBuf {
    let mut name = labels_path.as_os_str().to_owned();
    name.push(".classes");
    PathBuf::from(name)
}

fn read_class_list(path: &Path) -> Result<Vec<String>> {
    let text = read(path)?;
    Ok(lines(&text)
        .into_iter()
        .map(|(_, l)| l.to_string())
        .collect())
}

/// Loads and validates a labeled corpus.
///
/// Numeric labels are class indices; if a `<labels>.classes` sidecar exists
/// it supplies the class names. String labels are numbered by first
/// appearance and the mapping is written to the sidecar.
pub fn load_corpus(docword: &Path, labels: &Path, vocab: &Path) -> Result<Corpus> {
    load(docword, labels, vocab, None)
}

/// Like [`load_corpus`] but maps labels through a fixed class list, as needed
/// for test sets that must agree with a trained model's class indices.
pub fn load_corpus_with_classes(
    docword: &Path,
    labels: &Path,
    vocab: &Path,
    classes: &[String],
) -> Result<Corpus> {
    load(docword, labels, vocab, Some(classes))
}

/// Loads documents without labels (every label 0) over a known class list,
/// for classifying unlabeled data.
pub fn load_unlabeled(docword: &Path, vocab: &Path, classes: &[String]) -> Result<Corpus> {
    let vocabulary = parse_vocab(&read(vocab)?, &file_label(vocab))?;
    let (w, bags) = parse_docword(&read(docword)?, &file_label(docword))?;
    if w != vocabulary.len() {
        return Err(Error::parse(
            file_label(docword),
            2,
            format!("W={w} but vocabulary has {} terms", vocabulary.len()),
        ));
    }
    let documents = bags
        .into_iter()
        .map(|bag| Document::from_counts(bag, 0))
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(vocabulary, documents, classes.len(), Some(classes.to_vec()))
}

fn load(docword: &Path, labels: &Path, vocab: &Path, classes: Option<&[String]>) -> Result<Corpus> {
    let vocabulary = parse_vocab(&read(vocab)?, &file_label(vocab))?;
    let (w, bags) = parse_docword(&read(docword)?, &file_label(docword))?;
    if w != vocabulary.len() {
        return Err(Error::parse(
            file_label(docword),
            2,
            format!("W={w} but vocabulary has {} terms", vocabulary.len()),
        ));
    }
    let labels_file = file_label(labels);
    let parsed = parse_labels(&read(labels)?, &labels_file)?;
    let found = match &parsed {
        Labels::Numeric(v) => v.len(),
        Labels::Named(v) => v.len(),
    };
    if found != bags.len() {
        return Err(Error::LabelCountMismatch {
            expected: bags.len(),
            found,
        });
    }

    let (label_ids, num_classes, class_names) = match (parsed, classes) {
        (Labels::Numeric(ids), Some(names)) => {
            if let Some(m) = ids.iter().position(|&c| c >= names.len()) {
                return Err(Error::parse(&labels_file, m + 1, "label out of range"));
            }
            (ids, names.len(), Some(names.to_vec()))
        }
        (Labels::Named(strs), Some(names)) => {
            let mut ids = Vec::with_capacity(strs.len());
            for (m, s) in strs.iter().enumerate() {
                match names.iter().position(|n| n == s) {
                    Some(c) => ids.push(c),
                    None => {
                        return Err(Error::parse(
                            &labels_file,
                            m + 1,
                            format!("unknown label {s:?}"),
                        ))
                    }
                }
            }
            (ids, names.len(), Some(names.to_vec()))
        }
        (Labels::Numeric(ids), None) => {
            let sidecar = classes_sidecar(labels);
            if sidecar.exists() {
                let names = read_class_list(&sidecar)?;
                if let Some(m) = ids.iter().position(|&c| c >= names.len()) {
                    return Err(Error::parse(&labels_file, m + 1, "label out of range"));
                }
                let c = names.len();
                (ids, c, Some(names))
            } else {
                let c = ids.iter().max().map_or(0, |&x| x + 1);
                (ids, c, None)
            }
        }
        (Labels::Named(strs), None) => {
            let mut names: Vec<String> = Vec::new();
            let mut index: HashMap<String, usize> = HashMap::new();
            let ids: Vec<usize> = strs
                .into_iter()
                .map(|s| {
                    *index.entry(s.clone()).or_insert_with(|| {
                        names.push(s);
                        names.len() - 1
                    })
                })
                .collect();
            let sidecar = classes_sidecar(labels);
            let mut body = names.join("\n");
            body.push('\n');
            if let Err(e) = fs::write(&sidecar, body) {
                log::warn!("could not write {}: {e}", sidecar.display());
            }
            let c = names.len();
            (ids, c, Some(names))
        }
    };

    let mut documents = Vec::with_capacity(bags.len());
    for (m, (bag, label)) in bags.into_iter().zip(label_ids).enumerate() {
        if bag.is_empty() {
            return Err(Error::Corpus(format!("document {} has no tokens", m + 1)));
        }
        documents.push(Document::from_counts(bag, label)?);
    }
    Corpus::new(vocabulary, documents, num_classes, class_names)
}

/// Writes `corpus` in the format [`load_corpus`] reads. Labels are written
/// as indices; class names, if any, go to the `.classes` sidecar.
pub fn save_corpus(corpus: &Corpus, docword: &Path, labels: &Path, vocab: &Path) -> Result<()> {
    let nnz: usize = corpus.documents().iter().map(|d| d.counts().len()).sum();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}\n{}\n{}",
        corpus.num_docs(),
        corpus.vocab_size(),
        nnz
    );
    for (m, doc) in corpus.documents().iter().enumerate() {
        for &(t, c) in doc.counts() {
            let _ = writeln!(out, "{} {} {}", m + 1, t + 1, c);
        }
    }
    fs::write(docword, out).map_err(|e| Error::io(docword, e))?;

    let mut out = String::new();
    for d in corpus.documents() {
        let _ = writeln!(out, "{}", d.label);
    }
    fs::write(labels, out).map_err(|e| Error::io(labels, e))?;
    if let Some(names) = corpus.class_names() {
        let sidecar = classes_sidecar(labels);
        let mut body = names.join("\n");
        body.push('\n');
        fs::write(&sidecar, body).map_err(|e| Error::io(&sidecar, e))?;
    }

    let mut out = corpus.vocabulary().terms().join("\n");
    out.push('\n');
    fs::write(vocab, out).map_err(|e| Error::io(vocab, e))?;
    Ok(())
}

/// Reads a condition-tags file: one tag per document, aligned with labels.
pub fn read_condition_tags(path: &Path, num_docs: usize) -> Result<Vec<String>> {
    let text = read(path)?;
    let tags: Vec<String> = lines(&text)
        .into_iter()
        .map(|(_, l)| l.trim().to_string())
        .collect();
    if let Some(m) = tags.iter().position(String::is_empty) {
        return Err(Error::parse(
            file_label(path),
            m + 1,
            "condition tag missing",
        ));
    }
    if tags.len() != num_docs {
        return Err(Error::Invalid(format!(
            "condition tag missing: {} tags for {num_docs} documents",
            tags.len()
        )));
    }
    Ok(tags)
}
