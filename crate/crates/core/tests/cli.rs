use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn factopic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_factopic"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = factopic(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, extra: &[&str]) -> [String; 3] {
    let mut args = vec![
        "synth",
        "--out",
        s(dir),
        "--docs-per-class",
        "15",
        "--doc-length",
        "40",
    ];
    args.extend_from_slice(extra);
    ok(&args);
    ["docword", "labels", "vocab"].map(|e| {
        dir.join(format!("synth.{e}"))
            .to_string_lossy()
            .into_owned()
    })
}

#[test]
fn train_inspect_classify_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let [dw, lb, vo] = synth(&tmp.path().join("data"), &["--seed", "4"]);
    let out = tmp.path().join("model");
    let summary = ok(&[
        "train",
        "--docword",
        &dw,
        "--labels",
        &lb,
        "--vocab",
        &vo,
        "--topics",
        "8",
        "--factorized",
        "--iters",
        "40",
        "--burnin",
        "20",
        "--out",
        s(&out),
    ]);
    assert!(summary.starts_with("K_p="), "{summary}");
    for f in [
        "model.flda",
        "diag.csv",
        "theta_class.csv",
        "theta_class.pgm",
        "theta_class.order",
        "segmentation.txt",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let diag = fs::read_to_string(out.join("diag.csv")).unwrap();
    assert_eq!(diag.lines().count(), 41);
    assert!(diag.starts_with("iteration,H_bar,log_joint_proxy,H0,"));

    let model = out.join("model.flda");
    let inspect = ok(&["inspect", "--model", s(&model), "--top-n", "3"]);
    assert_eq!(
        inspect.lines().filter(|l| l.starts_with("topic ")).count(),
        8
    );
    assert!(inspect.contains("learned stop words:"));

    let predictions = ok(&[
        "classify",
        "--model",
        s(&model),
        "--docword",
        &dw,
        "--vocab",
        &vo,
    ]);
    assert_eq!(
        predictions.lines().next().unwrap(),
        "doc,predicted,loglik_0,loglik_1,loglik_2,loglik_3"
    );
    assert_eq!(predictions.lines().count(), 61);

    let report_path = tmp.path().join("eval.txt");
    let report = ok(&[
        "eval",
        "--docword",
        &dw,
        "--labels",
        &lb,
        "--vocab",
        &vo,
        "--model",
        s(&model),
        "--report",
        s(&report_path),
    ]);
    assert!(report.starts_with("accuracy="));
    assert!(report.contains(" n=60\n"));
    assert_eq!(fs::read_to_string(&report_path).unwrap(), report);
}

#[test]
fn hold_one_out_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("v"), "a\nb\nc\n").unwrap();
    fs::write(
        dir.join("d"),
        "4\n3\n6\n1 1 3\n2 1 2\n2 2 1\n3 3 4\n4 3 2\n4 2 1\n",
    )
    .unwrap();
    fs::write(dir.join("l"), "x\nx\ny\ny\n").unwrap();
    let report = ok(&[
        "eval",
        "--protocol",
        "hold-one-out",
        "--docword",
        s(&dir.join("d")),
        "--labels",
        s(&dir.join("l")),
        "--vocab",
        s(&dir.join("v")),
        "--topics",
        "2",
        "--iters",
        "20",
        "--burnin",
        "10",
    ]);
    assert!(report.contains(" n=4\n"), "{report}");
    assert!(report.contains("true\\predicted,x,y\n"), "{report}");
}

#[test]
fn invalid_input_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let [dw, lb, vo] = synth(tmp.path(), &[]);
    let out = tmp.path().join("m");
    let bad_topics = factopic(&[
        "train",
        "--docword",
        &dw,
        "--labels",
        &lb,
        "--vocab",
        &vo,
        "--topics",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(bad_topics.status.code(), Some(1));
    assert!(!out.exists());

    let missing = factopic(&[
        "train",
        "--docword",
        "/nonexistent/d",
        "--labels",
        &lb,
        "--vocab",
        &vo,
        "--out",
        s(&out),
    ]);
    assert_eq!(missing.status.code(), Some(2));

    assert_eq!(factopic(&["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        factopic(&["synth", "--lambda", "1.5", "--out", s(&out)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn synth_is_deterministic_and_lambda_zero_has_no_shared_tokens() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    synth(&a, &["--seed", "9"]);
    synth(&b, &["--seed", "9"]);
    for e in ["docword", "labels", "vocab", "truth"] {
        let f = format!("synth.{e}");
        assert_eq!(
            fs::read(a.join(&f)).unwrap(),
            fs::read(b.join(&f)).unwrap(),
            "{f}"
        );
    }
    let z = tmp.path().join("z");
    synth(&z, &["--lambda", "0"]);
    let truth = fs::read_to_string(z.join("synth.truth")).unwrap();
    let mut lines = truth.lines();
    assert_eq!(lines.next(), Some("roles p0 p1 p2 p3 s s s s"));
    assert_eq!(lines.next(), Some("shared_tokens 0 total_tokens 2400"));
    assert_eq!(lines.count(), 8);
}
