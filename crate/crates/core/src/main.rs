use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use factopic::classify::{align_to_vocabulary, holdout_split, EvalReport, HoldoutMode, Scorer};
use factopic::corpus::{
    generate_synthetic, load_corpus, load_corpus_with_classes, load_unlabeled, read_condition_tags,
    save_corpus, SyntheticSpec, TopicRole,
};
use factopic::model::{read_model, write_model};
use factopic::{evaluate, report, train_chains, Error, Hyperparams, Result};

#[derive(Parser, Debug)]
#[command(name = "factopic", version, about = "Factorized LDA topic models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model and write it with its diagnostics and exports
    Train(TrainArgs),
    /// Print the predicted class of every document
    Classify(ClassifyArgs),
    /// Accuracy and confusion matrix on a test set or by cross-validation
    Eval(EvalArgs),
    /// List topics by class-entropy with their top terms
    Inspect(InspectArgs),
    /// Write a synthetic corpus with known private and shared topics
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct CorpusArgs {
    #[arg(long)]
    docword: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct HyperArgs {
    /// Number of topics
    #[arg(long, default_value_t = 20)]
    topics: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pi: f64,
    /// Use the factorizing prior (otherwise: regular LDA)
    #[arg(long)]
    factorized: bool,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 1000)]
    burnin: usize,
    /// Thinning interval for averaging post-burn-in samples
    #[arg(long, default_value_t = 10)]
    sample_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent chains; the one with the best final log joint is kept
    #[arg(long, default_value_t = 1)]
    chains: usize,
}

impl HyperArgs {
    fn hyperparams(&self) -> Result<Hyperparams> {
        let hp = Hyperparams {
            topics: self.topics,
            alpha: self.alpha,
            pi: self.pi,
            factorized: self.factorized,
            iterations: self.iters,
            burn_in: self.burnin,
            sample_every: self.sample_every,
            seed: self.seed,
            ..Hyperparams::default()
        };
        hp.validate()?;
        if self.chains == 0 {
            return Err(Error::Hyperparams("chains must be >= 1".into()));
        }
        Ok(hp)
    }
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    docword: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    /// Labels file; when absent documents are treated as unlabeled
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Debug, PartialEq)]
enum Protocol {
    /// Evaluate a trained model on a separate test set
    Fixed,
    /// Train on all documents but one, test on it, for every document
    HoldOneOut,
    /// Hold out every (class, condition) group in turn
    ConditionHoldout,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_enum, default_value_t = Protocol::Fixed)]
    protocol: Protocol,
    /// Trained model (fixed protocol)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Condition tags, one per document (condition-holdout protocol)
    #[arg(long)]
    tags: Option<PathBuf>,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Write the report here as well as to stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 1)]
    private: usize,
    #[arg(long, default_value_t = 4)]
    shared: usize,
    #[arg(long, default_value_t = 64)]
    vocab_size: usize,
    #[arg(long, default_value_t = 50)]
    docs_per_class: usize,
    #[arg(long, default_value_t = 100)]
    doc_length: usize,
    /// Probability that a token comes from a shared topic
    #[arg(long, default_value_t = 0.7)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    concentration: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory; files are named synth.{docword,labels,vocab,truth}
    #[arg(long)]
    out: PathBuf,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let hp = args.hyper.hyperparams()?;
    let corpus = load_corpus(
        &args.corpus.docword,
        &args.corpus.labels,
        &args.corpus.vocab,
    )?;
    corpus.validate_for_training()?;
    create_dir(&args.out)?;
    log::info!(
        "training on {} documents, {} tokens, V={}, C={}",
        corpus.num_docs(),
        corpus.num_tokens(),
        corpus.vocab_size(),
        corpus.num_classes()
    );
    let (model, diag) = train_chains(&corpus, &hp, args.hyper.chains)?;
    write_model(&model, &args.out.join("model.flda"))?;
    write(&args.out.join("diag.csv"), &report::diagnostics_csv(&diag))?;
    write(
        &args.out.join("theta_class.csv"),
        &report::theta_class_csv(&model),
    )?;
    report::emit_heatmap(&model, &args.out.join("theta_class.pgm"))?;
    let summary = report::segmentation_summary(&model);
    write(&args.out.join("segmentation.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let classes: Vec<String> = (0..model.num_classes())
        .map(|c| model.class_name(c))
        .collect();
    let corpus = match &args.labels {
        Some(labels) => load_corpus_with_classes(&args.docword, labels, &args.vocab, &classes)?,
        None => load_unlabeled(&args.docword, &args.vocab, &classes)?,
    };
    let (corpus, dropped) = align_to_vocabulary(&corpus, &model.vocabulary)?;
    if dropped > 0 {
        log::warn!("dropped {dropped} out-of-vocabulary tokens");
    }
    let scorer = Scorer::new(&model);
    let mut out = String::from("doc,predicted");
    for c in &classes {
        let _ = write!(out, ",loglik_{c}");
    }
    out.push('\n');
    for (m, doc) in corpus.documents().iter().enumerate() {
        let (c, scores) = scorer.classify(doc);
        let _ = write!(out, "{},{}", m + 1, classes[c]);
        for s in scores {
            let _ = write!(out, ",{s:?}");
        }
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let c = &args.corpus;
    let report = match args.protocol {
        Protocol::Fixed => {
            let model_path = args.model.as_ref().ok_or_else(|| {
                Error::Invalid("--model is required for the fixed protocol".into())
            })?;
            let model = read_model(model_path)?;
            let classes: Vec<String> = (0..model.num_classes())
                .map(|i| model.class_name(i))
                .collect();
            let test = load_corpus_with_classes(&c.docword, &c.labels, &c.vocab, &classes)?;
            let (test, dropped) = align_to_vocabulary(&test, &model.vocabulary)?;
            if dropped > 0 {
                log::warn!("dropped {dropped} out-of-vocabulary test tokens");
            }
            evaluate(&test, &model)?
        }
        Protocol::HoldOneOut | Protocol::ConditionHoldout => {
            let hp = args.hyper.hyperparams()?;
            let corpus = load_corpus(&c.docword, &c.labels, &c.vocab)?;
            let tags;
            let mode = if args.protocol == Protocol::HoldOneOut {
                HoldoutMode::HoldOneOut
            } else {
                let path = args.tags.as_ref().ok_or_else(|| {
                    Error::Invalid("--tags is required for condition-holdout".into())
                })?;
                tags = read_condition_tags(path, corpus.num_docs())?;
                HoldoutMode::ConditionHoldout { tags: &tags }
            };
            let mut reports = Vec::new();
            for (i, (train, test)) in holdout_split(&corpus, mode)?.enumerate() {
                log::info!(
                    "fold {}: train {} test {}",
                    i + 1,
                    train.num_docs(),
                    test.num_docs()
                );
                let (model, _) = train_chains(&train, &hp, args.hyper.chains)?;
                reports.push(evaluate(&test, &model)?);
            }
            EvalReport::combine(&reports)
                .ok_or_else(|| Error::Invalid("no folds to evaluate".into()))?
        }
    };
    let text = report.render();
    if let Some(path) = &args.report {
        write(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_inspect(args: &InspectArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    print!("{}", report::render_inspect(&model, args.top_n));
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        num_classes: args.classes,
        private_topics_per_class: args.private,
        shared_topics: args.shared,
        vocab_size: args.vocab_size,
        docs_per_class: args.docs_per_class,
        doc_length: args.doc_length,
        noise_fraction: args.lambda,
        topic_word_concentration: args.concentration,
        seed: args.seed,
    };
    spec.validate()?;
    let (corpus, truth) = generate_synthetic(&spec)?;
    create_dir(&args.out)?;
    let p = |ext: &str| args.out.join(format!("synth.{ext}"));
    save_corpus(&corpus, &p("docword"), &p("labels"), &p("vocab"))?;

    let mut out = String::new();
    let roles: Vec<String> = truth
        .roles
        .iter()
        .map(|r| match r {
            TopicRole::Private(c) => format!("p{c}"),
            TopicRole::Shared => "s".into(),
        })
        .collect();
    let _ = writeln!(out, "roles {}", roles.join(" "));
    let total: u64 = truth
        .doc_topic_counts
        .iter()
        .flatten()
        .map(|&n| n as u64)
        .sum();
    let shared: u64 = truth
        .doc_topic_counts
        .iter()
        .flat_map(|row| row.iter().zip(&truth.roles))
        .filter(|(_, r)| **r == TopicRole::Shared)
        .map(|(&n, _)| n as u64)
        .sum();
    let _ = writeln!(out, "shared_tokens {shared} total_tokens {total}");
    for row in &truth.beta {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    write(&p("truth"), &out)?;
    println!(
        "wrote {} documents ({} classes, {} topics) to {}",
        corpus.num_docs(),
        spec.num_classes,
        spec.num_topics(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
