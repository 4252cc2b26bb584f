use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::CommandFactory;
use headtags_core::corpus::{self, read_corpus_lenient, split_records, write_corpus, SplitRatios};
use headtags_core::gen_metrics::headline_report;
use headtags_core::instruction::{mixture_assign, parse_output, InstructionExample, Mode, DEFAULT_CONTROLLED_FRACTION};
use headtags_core::retrieval::{
    build_selected_content, ContentMode, EmbeddingProvider, HttpProvider, Modality, RetrievalError, Retriever,
    TableProvider,
};
use headtags_core::tag_metrics::{corpus_report, score_record, TagEvalConfig};
use headtags_core::{ArticleRecord, MetricReport, Segmenter, Stemmer, SubwordVocab};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::FileConfig;
use crate::output::{read_lines, write_atomic, write_json_lines, write_report};
use crate::{Cli, Command, ContentModeArg, ModalityArg, PredFormat};

fn usage(msg: String) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, msg).exit()
}

fn required<T>(value: Option<T>, flag: &str) -> T {
    value.unwrap_or_else(|| {
        usage(format!(
            "--{flag} is required (flag, HEADTAGS_* variable or config file)"
        ))
    })
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => ingest(&a.input, &a.output, a.report.as_deref()),
        Command::Stats(a) => stats(&a.input, a.vocab.or(cfg.vocab).as_deref(), a.report.as_deref()),
        Command::Split(a) => {
            let seed = required(a.seed.or(cfg.seed), "seed");
            let ratios = match a.ratios.or(cfg.ratios) {
                None => SplitRatios::default(),
                Some(r) if r.len() == 3 => SplitRatios {
                    train: r[0],
                    val: r[1],
                    test: r[2],
                },
                Some(_) => usage("--ratios takes three values".into()),
            };
            split(&a.input, &a.out_dir, ratios, seed, a.report.as_deref())
        }
        Command::Retrieve(a) => {
            let modality = match (a.modality, cfg.modality) {
                (Some(ModalityArg::Image), _) => Modality::Image,
                (Some(ModalityArg::Caption), _) => Modality::Caption,
                (None, Some(m)) => m.parse().unwrap_or_else(|e: String| usage(e)),
                (None, None) => usage("--modality is required".into()),
            };
            let mode = match (a.mode, cfg.mode) {
                (Some(ContentModeArg::ArticleOnly), _) => ContentMode::ArticleOnly,
                (Some(ContentModeArg::RetrievedOnly), _) => ContentMode::RetrievedOnly,
                (Some(ContentModeArg::RetrievedPlusArticle), _) => ContentMode::RetrievedPlusArticle,
                (None, Some(m)) => m.parse().unwrap_or_else(|e: String| usage(e)),
                (None, None) => ContentMode::RetrievedPlusArticle,
            };
            let k = a.k.or(cfg.k).unwrap_or(5);
            if k == 0 {
                usage("--k must be at least 1".into());
            }
            let provider: Box<dyn EmbeddingProvider> =
                match (a.embeddings.or(cfg.embeddings), a.service_url.or(cfg.service_url)) {
                    (Some(path), _) => {
                        Box::new(TableProvider::load(&path).with_context(|| format!("loading {}", path.display()))?)
                    }
                    (None, Some(url)) => {
                        let mut p = HttpProvider::new(url);
                        if let Some(dir) = a.image_dir.or(cfg.image_dir) {
                            p = p.with_image_dir(dir);
                        }
                        Box::new(p)
                    }
                    (None, None) => usage("one of --embeddings or --service-url is required".into()),
                };
            let strict = a.strict.or(cfg.strict).unwrap_or(false);
            retrieve(
                &a.input,
                &a.output,
                provider.as_ref(),
                modality,
                k,
                mode,
                strict,
                a.report.as_deref(),
            )
        }
        Command::Prepare(a) => {
            let seed = required(a.seed.or(cfg.seed), "seed");
            let fraction = a.fraction.or(cfg.fraction).unwrap_or(DEFAULT_CONTROLLED_FRACTION);
            if !(0.0..=1.0).contains(&fraction) {
                usage(format!("--fraction {fraction} is outside [0, 1]"));
            }
            prepare(&a.input, &a.output, fraction, seed, a.report.as_deref())
        }
        Command::EvalHeadline(a) => {
            let vocab = required(a.vocab.or(cfg.vocab), "vocab");
            eval_headline(&a.hyps, &a.refs, &vocab, a.report.as_deref())
        }
        Command::EvalTags(a) => {
            let language = required(a.language.or(cfg.language), "language");
            let mut config = TagEvalConfig::new(language);
            if let Some(k) = a.k_values.or(cfg.k_values) {
                config.k_values = k;
            }
            if config.validate().is_err() {
                usage("--k values must be at least 1".into());
            }
            eval_tags(&a.preds, &a.golds, &config, a.format, a.report.as_deref())
        }
    }
}

fn open_corpus(path: &Path) -> anyhow::Result<(Vec<ArticleRecord>, Vec<corpus::Reject>)> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_corpus_lenient(std::io::BufReader::new(file))?)
}

fn load_strict(path: &Path) -> anyhow::Result<Vec<ArticleRecord>> {
    corpus::load_corpus(path).with_context(|| format!("loading {}", path.display()))
}

#[derive(Serialize)]
struct RejectRow {
    line: usize,
    reason: String,
}

fn ingest(input: &Path, output: &Path, report: Option<&Path>) -> anyhow::Result<()> {
    let (records, rejects) = open_corpus(input)?;
    if records.is_empty() && rejects.is_empty() {
        warn!("{} holds no records", input.display());
    }
    for r in &rejects {
        warn!("line {}: {}", r.line, r.error);
    }
    write_atomic(output, |w| Ok(write_corpus(w, &records)?))?;
    let rows: Vec<RejectRow> = rejects
        .iter()
        .map(|r| RejectRow {
            line: r.line,
            reason: r.error.to_string(),
        })
        .collect();
    write_report(report, &json!({"kept": records.len(), "rejected": rows}))?;
    println!("kept {} records, rejected {}", records.len(), rows.len());
    Ok(())
}

fn stats(input: &Path, vocab: Option<&Path>, report: Option<&Path>) -> anyhow::Result<()> {
    let records = load_strict(input)?;
    if records.is_empty() {
        bail!("{} holds no records", input.display());
    }
    let vocab = vocab.map(SubwordVocab::from_file).transpose()?;
    let (per_lang, summary) =
        corpus::compute_stats_by_language(&records, &Segmenter::builtin(), &Stemmer::builtin(), vocab.as_ref())?;
    write_report(report, &json!({"summary": summary, "languages": per_lang}))?;
    println!(
        "{:<8} {:>8} {:>9} {:>7} {:>8} {:>7} {:>7} {:>7} {:>7} {:>7}",
        "lang", "samples", "words", "sents", "h-words", "CR%", "pairs", "tags", "tag%", "nov1%"
    );
    let rows = per_lang
        .iter()
        .map(|(l, s)| (l.as_str(), s))
        .chain(std::iter::once(("all", &summary)));
    for (lang, s) in rows {
        println!(
            "{:<8} {:>8} {:>9.2} {:>7.2} {:>8.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2}",
            lang,
            s.n_samples,
            s.avg_words,
            s.avg_sentences,
            s.avg_headline_words,
            s.compression_ratio_pct,
            s.avg_image_caption_pairs,
            s.avg_tags,
            s.present_tag_pct,
            s.novel_ngram_pct.get(&1).copied().unwrap_or(0.0),
        );
    }
    Ok(())
}

fn split(input: &Path, out_dir: &Path, ratios: SplitRatios, seed: u64, report: Option<&Path>) -> anyhow::Result<()> {
    let records = load_strict(input)?;
    let parts = split_records(&records, ratios, seed)?;
    let mut counts: BTreeMap<String, [usize; 3]> = BTreeMap::new();
    for (slot, part) in [&parts.train, &parts.val, &parts.test].into_iter().enumerate() {
        for r in part {
            counts.entry(r.language.clone()).or_default()[slot] += 1;
        }
    }
    for (name, part) in [("train", &parts.train), ("val", &parts.val), ("test", &parts.test)] {
        write_atomic(&out_dir.join(format!("{name}.jsonl")), |w| Ok(write_corpus(w, part)?))?;
    }
    write_report(
        report,
        &json!({
            "seed": seed,
            "train": parts.train.len(),
            "val": parts.val.len(),
            "test": parts.test.len(),
            "languages": counts,
        }),
    )?;
    println!(
        "train {}  val {}  test {}",
        parts.train.len(),
        parts.val.len(),
        parts.test.len()
    );
    Ok(())
}

fn skippable(err: &RetrievalError) -> bool {
    use headtags_core::retrieval::ProviderError;
    matches!(
        err,
        RetrievalError::Provider(ProviderError::Missing(_))
            | RetrievalError::NoImages(_)
            | RetrievalError::NoCaptions(_)
            | RetrievalError::NoSentences(_)
    )
}

#[allow(clippy::too_many_arguments)]
fn retrieve(
    input: &Path,
    output: &Path,
    provider: &dyn EmbeddingProvider,
    modality: Modality,
    k: usize,
    mode: ContentMode,
    strict: bool,
    report: Option<&Path>,
) -> anyhow::Result<()> {
    let records = load_strict(input)?;
    let segmenter = Segmenter::builtin();
    let retriever = Retriever::new(&segmenter, provider);
    let mut rows = Vec::with_capacity(records.len());
    let mut skipped = Vec::new();
    for record in &records {
        let (content, selected) = if mode == ContentMode::ArticleOnly {
            (record.body.clone(), None)
        } else {
            match retriever.retrieve(record, modality, k) {
                Ok(got) => (
                    build_selected_content(Some(&got.sentences[..]), record, mode)?,
                    Some(got.selection),
                ),
                Err(e) if !strict && skippable(&e) => {
                    warn!("skipping {}: {e}", record.id);
                    skipped.push(record.id.clone());
                    continue;
                }
                Err(e) => return Err(e).with_context(|| format!("record {}", record.id)),
            }
        };
        let mut row = serde_json::to_value(record)?;
        row["content"] = Value::String(content);
        if let Some(sel) = selected {
            row["selected"] = serde_json::to_value(&sel.indices)?;
            row["k_effective"] = sel.k_effective.into();
        }
        rows.push(row);
    }
    write_json_lines(output, &rows)?;
    write_report(report, &json!({"written": rows.len(), "skipped": skipped}))?;
    println!("wrote {} records, skipped {}", rows.len(), skipped.len());
    Ok(())
}

fn prepare(input: &Path, output: &Path, fraction: f64, seed: u64, report: Option<&Path>) -> anyhow::Result<()> {
    let mut items = Vec::new();
    let mut skipped = 0usize;
    for (i, line) in read_lines(input)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = ArticleRecord::from_json_line(line, i + 1)?;
        let content = serde_json::from_str::<Value>(line)?
            .get("content")
            .and_then(Value::as_str)
            .map_or_else(|| record.body.clone(), str::to_string);
        // check the target once up front so the mixture counts only usable records
        match InstructionExample::build(&record, &content, Mode::Controlled(record.tags.len())) {
            Ok(_) => items.push((record, content)),
            Err(e) => {
                warn!("skipping {}: {e}", record.id);
                skipped += 1;
            }
        }
    }
    let counts: Vec<usize> = items.iter().map(|(r, _)| r.tags.len()).collect();
    let modes = mixture_assign(&counts, fraction, seed)?;
    let examples = items
        .iter()
        .zip(&modes)
        .map(|((r, c), &m)| InstructionExample::build(r, c, m))
        .collect::<Result<Vec<_>, _>>()?;
    write_json_lines(output, &examples)?;
    let controlled = modes.iter().filter(|m| m.is_controlled()).count();
    write_report(
        report,
        &json!({
            "examples": examples.len(),
            "controlled": controlled,
            "unrestricted": examples.len() - controlled,
            "skipped": skipped,
            "seed": seed,
            "fraction": fraction,
        }),
    )?;
    info!("mixture fraction {fraction} with seed {seed}");
    println!(
        "wrote {} examples: {} controlled, {} unrestricted, {} skipped",
        examples.len(),
        controlled,
        examples.len() - controlled,
        skipped
    );
    Ok(())
}

fn print_report(report: &MetricReport) {
    for (name, value) in report.iter() {
        println!("{name:<8} {value:.4}");
    }
}

fn eval_headline(hyps: &Path, refs: &Path, vocab: &PathBuf, report: Option<&Path>) -> anyhow::Result<()> {
    let vocab = SubwordVocab::from_file(vocab).with_context(|| format!("loading {}", vocab.display()))?;
    let result = headline_report(&read_lines(hyps)?, &read_lines(refs)?, &vocab)?;
    write_report(report, &result)?;
    print_report(&result);
    Ok(())
}

fn parse_tag_line(line: &str, format: PredFormat, path: &Path, line_no: usize) -> anyhow::Result<Vec<String>> {
    match format {
        PredFormat::Json => serde_json::from_str(line)
            .with_context(|| format!("{}:{line_no}: expected a JSON array of strings", path.display())),
        PredFormat::Generated => Ok(parse_output(line, false)?.tags),
    }
}

fn eval_tags(
    preds: &Path,
    golds: &Path,
    config: &TagEvalConfig,
    format: PredFormat,
    report: Option<&Path>,
) -> anyhow::Result<()> {
    let pred_lines = read_lines(preds)?;
    let gold_lines = read_lines(golds)?;
    if pred_lines.len() != gold_lines.len() {
        bail!("{} predictions for {} gold lines", pred_lines.len(), gold_lines.len());
    }
    let stemmer = Stemmer::builtin();
    let mut scores = Vec::with_capacity(pred_lines.len());
    for (i, (p, g)) in pred_lines.iter().zip(&gold_lines).enumerate() {
        let pred = parse_tag_line(p, format, preds, i + 1)?;
        let gold = parse_tag_line(g, PredFormat::Json, golds, i + 1)?;
        scores.push(score_record(&stemmer, config, &pred, &gold)?);
    }
    let result = corpus_report(config, &scores)?;
    write_report(report, &result)?;
    print_report(&result);
    Ok(())
}
