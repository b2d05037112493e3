//! Versioned plain-text model file.
//!
//! ```text
//! FLDA 1
//! K V C factorized
//! alpha pi H_bar tau
//! <K rows of beta, V values each>
//! <C rows of theta_class, K values each>
//! <K entropies>
//! <K role flags, p or s>
//! <V vocabulary terms, one per line>
//! <C class names, one per line>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Hyperparams, TrainedModel};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::factorization::Segmentation;
use crate::matrix::Matrix;

pub const MODEL_MAGIC: &str = "FLDA 1";

const ROW_SUM_TOLERANCE: f64 = 1e-6;

fn join_floats(xs: &[f64]) -> String {
    let mut s = String::with_capacity(xs.len() * 20);
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:?}");
    }
    s
}

pub fn render_model(model: &TrainedModel) -> String {
    let mut out = String::new();
    let (k, v, c) = (model.num_topics(), model.vocab_size(), model.num_classes());
    let hp = &model.hyperparams;
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "{k} {v} {c} {}", u8::from(hp.factorized));
    let _ = writeln!(
        out,
        "{:?} {:?} {:?} {:?}",
        hp.alpha, hp.pi, model.h_bar, model.segmentation.tau
    );
    for row in model.beta.iter_rows() {
        let _ = writeln!(out, "{}", join_floats(row));
    }
    for row in model.theta_class.iter_rows() {
        let _ = writeln!(out, "{}", join_floats(row));
    }
    let _ = writeln!(out, "{}", join_floats(&model.entropy));
    let roles: Vec<&str> = (0..k)
        .map(|t| {
            if model.segmentation.is_private(t) {
                "p"
            } else {
                "s"
            }
        })
        .collect();
    let _ = writeln!(out, "{}", roles.join(" "));
    for term in model.vocabulary.terms() {
        let _ = writeln!(out, "{term}");
    }
    for cl in 0..c {
        let _ = writeln!(out, "{}", model.class_name(cl));
    }
    out
}

pub fn write_model(model: &TrainedModel, path: &Path) -> Result<()> {
    fs::write(path, render_model(model)).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<TrainedModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text, &path.display().to_string())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
    file: &'a str,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.strip_suffix('\r').unwrap_or(l))
            }
            None => Err(Error::parse(
                self.file,
                self.line + 1,
                format!("missing {what}"),
            )),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.file, self.line, msg)
    }

    fn floats(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let l = self.next(what)?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("bad number in {what}")))?;
        if xs.len() != n {
            return Err(self.err(format!("{what}: expected {n} values, got {}", xs.len())));
        }
        Ok(xs)
    }

    fn stochastic_rows(&mut self, rows: usize, cols: usize, what: &str) -> Result<Matrix> {
        let mut out = Vec::with_capacity(rows);
        for _ in 0..rows {
            let row = self.floats(cols, what)?;
            if row.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(self.err(format!("{what}: entries must be positive")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(self.err(format!("{what}: row sums to {sum}")));
            }
            out.push(row);
        }
        Ok(Matrix::from_rows(&out))
    }
}

pub(crate) fn parse_model(text: &str, file: &str) -> Result<TrainedModel> {
    let mut lines = Lines {
        inner: text.split('\n').enumerate(),
        file,
        line: 0,
    };
    if lines.next("header")?.trim() != MODEL_MAGIC {
        return Err(lines.err(format!("not a model file (expected {MODEL_MAGIC:?})")));
    }
    let dims: Vec<usize> = lines
        .next("dimensions")?
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| lines.err("bad dimensions line"))?;
    let [k, v, c, factorized] = dims[..] else {
        return Err(lines.err("expected \"K V C factorized\""));
    };
    if k < 2 || v < 1 || c < 2 || factorized > 1 {
        return Err(lines.err("invalid dimensions"));
    }
    let params = lines.floats(4, "parameters")?;
    let beta = lines.stochastic_rows(k, v, "beta")?;
    let theta_class = lines.stochastic_rows(c, k, "theta_class")?;
    let entropy = lines.floats(k, "entropies")?;
    let roles_line = lines.next("roles")?;
    let roles: Vec<&str> = roles_line.split_whitespace().collect();
    if roles.len() != k || roles.iter().any(|r| *r != "p" && *r != "s") {
        return Err(lines.err("roles: expected K flags of p or s"));
    }
    let mut terms = Vec::with_capacity(v);
    for _ in 0..v {
        terms.push(lines.next("vocabulary")?.to_string());
    }
    let vocabulary = Vocabulary::new(terms).map_err(|e| lines.err(e.to_string()))?;
    let mut names = Vec::with_capacity(c);
    for _ in 0..c {
        names.push(lines.next("class names")?.to_string());
    }
    let plain = names.iter().enumerate().all(|(i, n)| *n == i.to_string());

    let (private, shared) = (0..k).partition(|&t| roles[t] == "p");
    let hyperparams = Hyperparams {
        topics: k,
        alpha: params[0],
        pi: params[1],
        factorized: factorized == 1,
        ..Hyperparams::default()
    };
    let model = TrainedModel {
        beta,
        theta_class,
        entropy,
        h_bar: params[2],
        hyperparams,
        vocabulary,
        class_names: if plain { None } else { Some(names) },
        segmentation: Segmentation {
            private,
            shared,
            tau: params[3],
        },
    };
    model
        .validate(ROW_SUM_TOLERANCE)
        .map_err(|e| Error::parse(file, 0, format!("corrupt model: {e}")))?;
    Ok(model)
}
