//! Human-readable artifacts: per-class topic tables, heatmaps, entropy
//! trajectories and the topic inspection listing. All exports order topics
//! by ascending class-entropy.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::factorization::order_by_entropy;
use crate::matrix::Matrix;
use crate::model::TrainedModel;
use crate::sampler::SweepDiagnostics;

/// `theta_class` as CSV: header `class,topic_<k>...` in ascending-entropy
/// order, then one row per class.
pub fn theta_class_csv(model: &TrainedModel) -> String {
    let order = order_by_entropy(&model.entropy);
    let mut out = String::from("class");
    for &k in &order {
        let _ = write!(out, ",topic_{k}");
    }
    out.push('\n');
    for c in 0..model.num_classes() {
        out.push_str(&model.class_name(c));
        for &k in &order {
            let _ = write!(out, ",{:?}", model.theta_class[(c, k)]);
        }
        out.push('\n');
    }
    out
}

/// `iteration,H_bar,log_joint_proxy,H0..H{K-1}`.
pub fn diagnostics_csv(diag: &[SweepDiagnostics]) -> String {
    let k = diag.first().map_or(0, |d| d.per_topic_h.len());
    let mut out = String::from("iteration,H_bar,log_joint_proxy");
    for t in 0..k {
        let _ = write!(out, ",H{t}");
    }
    out.push('\n');
    for d in diag {
        let _ = write!(out, "{},{:?},{:?}", d.iteration, d.h_bar, d.log_joint_proxy);
        for h in &d.per_topic_h {
            let _ = write!(out, ",{h:?}");
        }
        out.push('\n');
    }
    out
}

pub fn segmentation_summary(model: &TrainedModel) -> String {
    let seg = &model.segmentation;
    let list = |ks: &[usize]| {
        ks.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "K_p={} K_s={} tau={:?}\nH_bar={:?}\nprivate: {}\nshared: {}\n",
        seg.private.len(),
        seg.shared.len(),
        seg.tau,
        model.h_bar,
        list(&seg.private),
        list(&seg.shared)
    )
}

/// Plain (P2) grayscale PGM with one pixel per cell, columns taken in
/// `column_order`, scaled so the matrix maximum maps to 255.
pub fn render_pgm(matrix: &Matrix, column_order: &[usize]) -> String {
    let max = matrix.as_slice().iter().copied().fold(0.0f64, f64::max);
    let mut out = format!("P2\n{} {}\n255\n", column_order.len(), matrix.rows());
    for r in 0..matrix.rows() {
        let px: Vec<String> = column_order
            .iter()
            .map(|&k| {
                let x = if max > 0.0 { matrix[(r, k)] / max } else { 0.0 };
                ((x * 255.0).round() as u8).to_string()
            })
            .collect();
        out.push_str(&px.join(" "));
        out.push('\n');
    }
    out
}

/// Sidecar path for a heatmap: `<path>` with extension `order`.
pub fn heatmap_sidecar(path: &Path) -> PathBuf {
    path.with_extension("order")
}

/// Writes the `theta_class` heatmap and its sidecar listing the column order
/// and the private/shared split index.
pub fn emit_heatmap(model: &TrainedModel, path: &Path) -> Result<()> {
    let order = order_by_entropy(&model.entropy);
    fs::write(path, render_pgm(&model.theta_class, &order)).map_err(|e| Error::io(path, e))?;
    let cols: Vec<String> = order.iter().map(usize::to_string).collect();
    let sidecar = heatmap_sidecar(path);
    let body = format!(
        "columns: {}\nsplit: {}\n",
        cols.join(" "),
        model.segmentation.private.len()
    );
    fs::write(&sidecar, body).map_err(|e| Error::io(&sidecar, e))
}

/// Indices of the `n` largest entries, largest first; ties by lower index.
fn top_terms(row: &[f64], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    idx.truncate(n);
    idx
}

/// Terms that dominate the shared topics: the union of each shared topic's
/// `top_n` terms, in order of first appearance by ascending entropy.
pub fn learned_stop_words(model: &TrainedModel, top_n: usize) -> Vec<String> {
    let mut words: Vec<String> = Vec::new();
    for k in order_by_entropy(&model.entropy) {
        if model.segmentation.is_private(k) {
            continue;
        }
        for t in top_terms(model.beta.row(k), top_n) {
            let term = model.vocabulary.term(t);
            if !words.iter().any(|w| w == term) {
                words.push(term.to_string());
            }
        }
    }
    words
}

pub fn render_inspect(model: &TrainedModel, top_n: usize) -> String {
    let mut out = String::new();
    let seg = &model.segmentation;
    let _ = writeln!(
        out,
        "topics={} classes={} K_p={} K_s={} tau={:.4} H_bar={:.4}",
        model.num_topics(),
        model.num_classes(),
        seg.private.len(),
        seg.shared.len(),
        seg.tau,
        model.h_bar
    );
    for k in order_by_entropy(&model.entropy) {
        let private = seg.is_private(k);
        let _ = write!(
            out,
            "topic {k} [{}] H={:.4}",
            if private { "private" } else { "shared" },
            model.entropy[k]
        );
        if private {
            let col = model.theta_class.column(k);
            let dominant = top_terms(&col, 1)[0];
            let _ = write!(out, " class={}", model.class_name(dominant));
        }
        let terms: Vec<&str> = top_terms(model.beta.row(k), top_n)
            .into_iter()
            .map(|t| model.vocabulary.term(t))
            .collect();
        let _ = writeln!(out, ": {}", terms.join(" "));
    }
    let _ = writeln!(
        out,
        "learned stop words: {}",
        learned_stop_words(model, top_n).join(" ")
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;
    use crate::model::Hyperparams;

    fn model() -> TrainedModel {
        // topic 0 shared, topics 1/2 private to classes 0/1
        TrainedModel::from_parts(
            Matrix::from_rows(&[
                vec![0.4, 0.3, 0.1, 0.1, 0.1],
                vec![0.05, 0.05, 0.8, 0.05, 0.05],
                vec![0.05, 0.05, 0.05, 0.05, 0.8],
            ]),
            Matrix::from_rows(&[vec![0.5, 0.45, 0.05], vec![0.5, 0.05, 0.45]]),
            0.4,
            Hyperparams {
                topics: 3,
                ..Hyperparams::default()
            },
            Vocabulary::new(
                ["the", "at", "wheat", "of", "oil"]
                    .map(String::from)
                    .to_vec(),
            )
            .unwrap(),
            Some(vec!["grain".into(), "crude".into()]),
            None,
        )
        .unwrap()
    }

    #[test]
    fn heatmap_normalization() {
        let m = Matrix::from_rows(&[vec![0.9, 0.1], vec![0.1, 0.9]]);
        assert_eq!(render_pgm(&m, &[0, 1]), "P2\n2 2\n255\n255 28\n28 255\n");
        let flat = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(
            render_pgm(&flat, &[1, 0]),
            "P2\n2 2\n255\n255 255\n255 255\n"
        );
    }

    #[test]
    fn heatmap_sidecar_split() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("theta_class.pgm");
        let m = model();
        emit_heatmap(&m, &p).unwrap();
        let side = fs::read_to_string(heatmap_sidecar(&p)).unwrap();
        assert!(side.ends_with(&format!("split: {}\n", m.segmentation.private.len())));
        assert!(side.starts_with("columns: "));
        assert!(side.contains(" 0\n"), "shared topic last: {side}");
    }

    #[test]
    fn csv_rows_resum_to_one() {
        let csv = theta_class_csv(&model());
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().ends_with(",topic_0"));
        for line in lines {
            let sum: f64 = line
                .split(',')
                .skip(1)
                .map(|x| x.parse::<f64>().unwrap())
                .sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn inspect_lists_stop_words_and_classes() {
        let m = model();
        assert_eq!(m.segmentation.shared, vec![0]);
        let text = render_inspect(&m, 2);
        assert!(text.contains("learned stop words: the at\n"), "{text}");
        assert!(text.contains("[private] H="));
        assert!(text.contains("class=grain: wheat"), "{text}");
        assert!(text.contains("class=crude: oil"), "{text}");

        let empty = render_inspect(&m, 0);
        assert!(empty.contains("learned stop words: \n"));
        assert!(empty.contains("topic 0 [shared]"));
    }

    #[test]
    fn diagnostics_header() {
        let d = vec![SweepDiagnostics {
            iteration: 1,
            h_bar: 0.5,
            per_topic_h: vec![0.25, 0.75],
            log_joint_proxy: -10.0,
            tokens_resampled: 3,
        }];
        assert_eq!(
            diagnostics_csv(&d),
            "iteration,H_bar,log_joint_proxy,H0,H1\n1,0.5,-10.0,0.25,0.75\n"
        );
    }
}
