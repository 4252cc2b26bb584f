use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use headtags_core::corpus::load_corpus;
use headtags_core::retrieval::{caption_key, sentence_key, EmbeddingVector, Modality, Retriever, TableProvider};
use headtags_core::{ArticleRecord, Segmenter};
use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn headtags(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_headtags"));
    cmd.args(args).env("HEADTAGS_LOG", "off");
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("HEADTAGS_")) {
        cmd.env_remove(k);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json_lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn corpus_path() -> PathBuf {
    fixtures().join("corpus.jsonl")
}

fn record(id: &str, n_tags: usize) -> ArticleRecord {
    ArticleRecord {
        id: id.into(),
        language: "en".into(),
        headline: format!("Headline {id}"),
        body: format!("First sentence of {id}. Second sentence here."),
        captions: vec!["caption".into()],
        image_ids: vec![format!("{id}.jpg")],
        tags: (0..n_tags).map(|i| format!("tag{i}")).collect(),
    }
}

fn write_records(path: &Path, records: &[ArticleRecord]) {
    let text: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
    std::fs::write(path, text).unwrap();
}

#[test]
fn ingest_counts_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = (dir.path().join("out.jsonl"), dir.path().join("report.json"));
    let stdout = ok(&headtags(
        &[
            "ingest",
            "--input",
            p(&corpus_path()),
            "--output",
            p(&out),
            "--report",
            p(&report),
        ],
        &[],
    ));
    assert!(stdout.contains("rejected 0"));
    assert_eq!(read_json(&report)["kept"], 12);
    assert_eq!(json_lines(&out).len(), 12);

    let mut text = std::fs::read_to_string(corpus_path()).unwrap();
    text.push_str("{\"id\": \"bad\"}\n");
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, text).unwrap();
    ok(&headtags(
        &[
            "ingest",
            "--input",
            p(&bad),
            "--output",
            p(&out),
            "--report",
            p(&report),
        ],
        &[],
    ));
    let r = read_json(&report);
    assert_eq!(r["kept"], 12);
    assert_eq!(r["rejected"][0]["line"], 13);

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    ok(&headtags(&["ingest", "--input", p(&empty), "--output", p(&out)], &[]));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn stats_breakdown_sums_to_summary() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("stats.json");
    ok(&headtags(
        &["stats", "--input", p(&corpus_path()), "--report", p(&report)],
        &[],
    ));
    let r = read_json(&report);
    let total: u64 = r["languages"]
        .as_object()
        .unwrap()
        .values()
        .map(|s| s["n_samples"].as_u64().unwrap())
        .sum();
    assert_eq!(total, r["summary"]["n_samples"].as_u64().unwrap());

    let two = dir.path().join("two.jsonl");
    let mut a = record("a", 1);
    a.headline = "one two".into();
    a.body = "w w w w w w w w w w.".into();
    let mut b = record("b", 1);
    b.headline = "one".into();
    b.body = "w w w w.".into();
    write_records(&two, &[a, b]);
    ok(&headtags(&["stats", "--input", p(&two), "--report", p(&report)], &[]));
    let cr = read_json(&report)["summary"]["compression_ratio_pct"].as_f64().unwrap();
    assert!((cr - (80.0 + 75.0) / 2.0).abs() < 1e-9);

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(headtags(&["stats", "--input", p(&empty)], &[]).status.code(), Some(1));
}

#[test]
fn split_is_seeded_and_config_precedence_holds() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_records(
        &input,
        &(0..200).map(|i| record(&format!("r{i}"), 2)).collect::<Vec<_>>(),
    );
    let run = |sub: &str, args: &[&str], envs: &[(&str, &str)]| {
        let out_dir = dir.path().join(sub);
        let mut full = vec!["split", "--input", p(&input), "--out-dir", p(&out_dir)];
        full.extend_from_slice(args);
        let out = headtags(&full, envs);
        (
            out,
            json_lines(&out_dir.join("val.jsonl"))
                .iter()
                .map(|v| v["id"].to_string())
                .collect::<Vec<_>>(),
        )
    };
    assert_eq!(
        headtags(&["split", "--input", p(&input), "--out-dir", p(dir.path())], &[])
            .status
            .code(),
        Some(2)
    );

    let (out, flag7) = run("a", &["--seed", "7"], &[]);
    assert!(ok(&out).contains("train 190  val 2  test 8"));
    let (_, again) = run("b", &["--seed", "7"], &[]);
    assert_eq!(flag7, again);
    let (_, flag8) = run("c", &["--seed", "8"], &[]);
    assert_ne!(flag7, flag8);

    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "seed = 7\n").unwrap();
    let (_, from_cfg) = run("d", &["--config", p(&cfg)], &[]);
    assert_eq!(from_cfg, flag7);
    let (_, env_over_cfg) = run("e", &["--config", p(&cfg)], &[("HEADTAGS_SEED", "8")]);
    assert_eq!(env_over_cfg, flag8);
    let (_, flag_over_env) = run("f", &["--config", p(&cfg), "--seed", "7"], &[("HEADTAGS_SEED", "8")]);
    assert_eq!(flag_over_env, flag7);
}

fn wave(seed: usize, dim: usize) -> Vec<f32> {
    (0..dim)
        .map(|d| (((seed * 31 + d * 17) % 23) as f32 - 11.0) / 7.0)
        .collect()
}

/// Embedding table covering every sentence, caption and image of `records`.
fn embedding_table(records: &[ArticleRecord], path: &Path) -> TableProvider {
    let seg = Segmenter::builtin();
    let dim = 8;
    let mut table = TableProvider::new(dim);
    let mut n = 0;
    let mut next = || {
        n += 1;
        EmbeddingVector::new(wave(n, dim)).unwrap()
    };
    for r in records {
        for i in 0..seg.segment(&r.body, &r.language).unwrap().len() {
            table.insert(sentence_key(&r.id, i), next()).unwrap();
        }
        for j in 0..r.captions.len() {
            table.insert(caption_key(&r.id, j), next()).unwrap();
        }
        for img in &r.image_ids {
            table.insert(img.clone(), next()).unwrap();
        }
    }
    let mut buf = Vec::new();
    table.write(&mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
    table
}

#[test]
fn retrieve_matches_library_and_handles_missing() {
    let dir = tempfile::tempdir().unwrap();
    let records = load_corpus(corpus_path()).unwrap();
    let emb = dir.path().join("emb.jsonl");
    let table = embedding_table(&records, &emb);
    let out = dir.path().join("ret.jsonl");
    let corpus = corpus_path();
    let base = [
        "retrieve",
        "--input",
        p(&corpus),
        "--output",
        p(&out),
        "--embeddings",
        p(&emb),
    ];

    let mut args = base.to_vec();
    args.extend(["--modality", "caption", "--k", "2", "--mode", "retrieved-only"]);
    ok(&headtags(&args, &[]));
    let seg = Segmenter::builtin();
    let retriever = Retriever::new(&seg, &table);
    let rows = json_lines(&out);
    assert_eq!(rows.len(), records.len());
    for (row, r) in rows.iter().zip(&records) {
        let want = retriever.retrieve(r, Modality::Caption, 2).unwrap();
        assert_eq!(row["content"], want.sentences.join(" "));
        assert_eq!(row["selected"], serde_json::to_value(&want.selection.indices).unwrap());
    }

    let mut args = base.to_vec();
    args.extend(["--modality", "image", "--k", "1000", "--mode", "retrieved-only"]);
    ok(&headtags(&args, &[]));
    for (row, r) in json_lines(&out).iter().zip(&records) {
        let all: Vec<String> = seg
            .segment(&r.body, &r.language)
            .unwrap()
            .into_iter()
            .map(|s| s.text)
            .collect();
        assert_eq!(row["content"], all.join(" "));
    }

    let mut args = base.to_vec();
    args.extend(["--modality", "video"]);
    assert_eq!(headtags(&args, &[]).status.code(), Some(2));

    let mut extra = records.clone();
    extra.push(record("unknown", 2));
    let input = dir.path().join("extra.jsonl");
    write_records(&input, &extra);
    let report = dir.path().join("report.json");
    let args = [
        "retrieve",
        "--input",
        p(&input),
        "--output",
        p(&out),
        "--embeddings",
        p(&emb),
        "--modality",
        "image",
        "--report",
        p(&report),
    ];
    ok(&headtags(&args, &[]));
    assert_eq!(read_json(&report)["skipped"], serde_json::json!(["unknown"]));
    assert_eq!(json_lines(&out).len(), records.len());
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(headtags(&strict, &[]).status.code(), Some(1));
    assert_eq!(headtags(&args, &[("HEADTAGS_STRICT", "true")]).status.code(), Some(1));
}

#[test]
fn prepare_mixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_records(
        &input,
        &(0..100)
            .map(|i| record(&format!("r{i}"), 1 + i % 4))
            .collect::<Vec<_>>(),
    );
    let out = dir.path().join("inst.jsonl");
    let run = |fraction: &str| {
        ok(&headtags(
            &[
                "prepare",
                "--input",
                p(&input),
                "--output",
                p(&out),
                "--fraction",
                fraction,
                "--seed",
                "11",
            ],
            &[],
        ));
        json_lines(&out)
    };
    let rows = run("0.7");
    assert_eq!(rows.iter().filter(|r| r["mode"] == "controlled").count(), 70);
    for r in rows.iter().filter(|r| r["mode"] == "controlled") {
        let n = r["n"].as_u64().unwrap() as usize;
        let tags = r["target"]
            .as_str()
            .unwrap()
            .split("Tag words are: ")
            .nth(1)
            .unwrap()
            .split(", ")
            .count();
        assert_eq!(n, tags);
    }
    assert_eq!(run("0.7"), rows);
    assert!(run("0").iter().all(|r| r["mode"] == "unrestricted" && r["n"].is_null()));
    let retrieved = dir.path().join("ret.jsonl");
    let mut row: Value = serde_json::to_value(record("x", 2)).unwrap();
    row["content"] = "Picked sentence.".into();
    std::fs::write(&retrieved, format!("{row}\n")).unwrap();
    ok(&headtags(
        &[
            "prepare",
            "--input",
            p(&retrieved),
            "--output",
            p(&out),
            "--fraction",
            "1",
            "--seed",
            "1",
        ],
        &[],
    ));
    assert_eq!(
        json_lines(&out)[0]["input"],
        "Generate Headline and Two Tag Words: Picked sentence.."
    );
    assert_eq!(
        headtags(&["prepare", "--input", p(&input), "--output", p(&out)], &[])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_headline_reports() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = fixtures().join("vocab.txt");
    let (hyps, refs, report) = (
        dir.path().join("h.txt"),
        dir.path().join("r.txt"),
        dir.path().join("rep.json"),
    );
    std::fs::write(
        &refs,
        "Floods close schools across the northern region\nCentral bank raises interest rates again\n",
    )
    .unwrap();
    std::fs::copy(&refs, &hyps).unwrap();
    let run = || {
        headtags(
            &[
                "eval-headline",
                "--hyps",
                p(&hyps),
                "--refs",
                p(&refs),
                "--vocab",
                p(&vocab),
                "--report",
                p(&report),
            ],
            &[],
        )
    };
    let stdout = ok(&run());
    assert!(stdout.contains("ROUGE-1"));
    let r = read_json(&report);
    for key in ["ROUGE-1", "ROUGE-2", "ROUGE-L", "BLEU", "LR"] {
        assert!((r[key].as_f64().unwrap() - 1.0).abs() < 1e-12, "{key}");
    }
    std::fs::write(&hyps, "Harga beras naik\nLa grève continue\n").unwrap();
    ok(&run());
    let r = read_json(&report);
    for key in ["ROUGE-1", "ROUGE-2", "ROUGE-L"] {
        assert_eq!(r[key], 0.0);
    }
    assert!(r["BLEU"].as_f64().unwrap() < 1e-6);
    assert_eq!(
        headtags(&["eval-headline", "--hyps", p(&hyps), "--refs", p(&refs)], &[])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_tags_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (preds, golds, report) = (
        dir.path().join("p.jsonl"),
        dir.path().join("g.jsonl"),
        dir.path().join("rep.json"),
    );
    let run = |extra: &[&str]| {
        let mut args = vec![
            "eval-tags",
            "--preds",
            p(&preds),
            "--golds",
            p(&golds),
            "--language",
            "en",
            "--report",
            p(&report),
        ];
        args.extend_from_slice(extra);
        ok(&headtags(&args, &[]));
        read_json(&report)
    };
    std::fs::write(&golds, "[\"b\", \"c\", \"d\"]\n[\"Elections\", \"voting\"]\n").unwrap();
    std::fs::copy(&golds, &preds).unwrap();
    let r = run(&[]);
    for key in ["F1@3", "F1@5", "F1@M", "F1@O"] {
        assert_eq!(r[key], 1.0, "{key}");
    }
    std::fs::write(&preds, "[]\n[]\n").unwrap();
    assert_eq!(run(&[])["F1@M"], 0.0);
    std::fs::write(&golds, "[\"b\", \"c\", \"d\"]\n").unwrap();
    std::fs::write(&preds, "[\"a\", \"b\", \"c\"]\n").unwrap();
    let r = run(&["--k", "3"]);
    for key in ["P@3", "R@3", "F1@3", "F1@M", "F1@O"] {
        assert!((r[key].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }
    assert!(r.get("F1@5").is_none());
    std::fs::write(&preds, "Headline is: H. Tag words are: a, b, c.\n").unwrap();
    let r = run(&["--format", "generated"]);
    assert!((r["F1@M"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
}
