use factopic::corpus::{generate_synthetic_with_holdout, TopicRole};
use factopic::{classify, evaluate, train, Document, Hyperparams, SyntheticSpec};

fn clean_model_and_test() -> (factopic::TrainedModel, factopic::Corpus) {
    let spec = SyntheticSpec {
        noise_fraction: 0.0,
        shared_topics: 1,
        topic_word_concentration: 0.1,
        docs_per_class: 20,
        doc_length: 50,
        seed: 3,
        ..SyntheticSpec::default()
    };
    let (train_set, test_set, truth) = generate_synthetic_with_holdout(&spec, 10).unwrap();
    assert!(truth.roles[..4]
        .iter()
        .enumerate()
        .all(|(c, r)| *r == TopicRole::Private(c)));
    let hp = Hyperparams {
        topics: 5,
        alpha: 0.1,
        pi: 0.1,
        factorized: true,
        iterations: 150,
        burn_in: 100,
        sample_every: 5,
        seed: 1,
        ..Hyperparams::default()
    };
    (train(&train_set, &hp).unwrap().0, test_set)
}

#[test]
fn private_only_documents_get_their_generating_class() {
    let (model, test) = clean_model_and_test();
    let report = evaluate(&test, &model).unwrap();
    assert_eq!(report.accuracy, 1.0, "{}", report.render());

    for doc in test.documents() {
        let (c, scores) = classify(doc, &model);
        // bag-of-words: reversing token order changes nothing
        let rev = Document::from_tokens(doc.tokens().collect::<Vec<_>>().into_iter().rev(), 0);
        assert_eq!(classify(&rev, &model), (c, scores.clone()));
        // doubling every count doubles every score
        let doubled = Document::from_tokens(doc.tokens().chain(doc.tokens()), 0);
        let (c2, s2) = classify(&doubled, &model);
        assert_eq!(c2, c);
        for (a, b) in scores.iter().zip(&s2) {
            assert!((2.0 * a - b).abs() <= 1e-9 * b.abs());
        }
    }
}

#[test]
fn tokens_with_equal_class_likelihood_do_not_move_the_argmax() {
    let (model, test) = clean_model_and_test();
    let v = model.vocab_size();
    let per_class = |w: usize| -> Vec<f64> {
        (0..model.num_classes())
            .map(|c| {
                (0..model.num_topics())
                    .map(|k| model.theta_class[(c, k)] * model.beta[(k, w)])
                    .sum()
            })
            .collect()
    };
    // Find the word whose mixture likelihood varies least across classes.
    let spread = |w: usize| {
        let p = per_class(w);
        let max = p.iter().copied().fold(f64::MIN, f64::max);
        let min = p.iter().copied().fold(f64::MAX, f64::min);
        (max / min).ln()
    };
    let flat = (0..v)
        .min_by(|&a, &b| spread(a).total_cmp(&spread(b)))
        .unwrap();
    for doc in test.documents() {
        let (c, scores) = classify(doc, &model);
        let padded = Document::from_tokens(doc.tokens().chain(std::iter::repeat_n(flat, 3)), 0);
        let (c2, s2) = classify(&padded, &model);
        let margin = {
            let mut s = scores.clone();
            s.sort_by(|a, b| b.total_cmp(a));
            s[0] - s[1]
        };
        if margin > 3.0 * spread(flat) {
            assert_eq!(c2, c);
        }
        assert!(s2.iter().all(|x| x.is_finite()));
    }
}
