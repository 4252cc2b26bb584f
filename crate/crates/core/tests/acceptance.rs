//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use headtags_core::baselines::{ext_oracle, lead_1};
use headtags_core::corpus::{compression_pct, load_corpus, split_corpus, split_sizes, SplitRatios};
use headtags_core::gen_metrics::{corpus_bleu, lcs_len, rouge_l, rouge_n, SubwordVocab};
use headtags_core::instruction::{build_input, build_target, controlled_count, mixture_assign, parse_output, Mode};
use headtags_core::retrieval::{
    aggregate_scores, caption_key, select_top_k, sentence_key, EmbeddingVector, Retriever, TableProvider,
};
use headtags_core::stemmer::stem_english;
use headtags_core::tag_metrics::TagScorer;
use headtags_core::{ArticleRecord, Segmenter, Stemmer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn random_tokens(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<String> {
    let alphabet = rng.random_range(2..12);
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| format!("t{}", rng.random_range(0..alphabet)))
        .collect()
}

fn metric_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for pair in 0..500 {
        let h = random_tokens(&mut rng, 40);
        let r = random_tokens(&mut rng, 40);
        for n in 1..=2 {
            let (hits, hn, rn) = brute_ngram_overlap(&h, &r, n);
            let want = prf(hits, hn, rn);
            let got = rouge_n(&h, &r, n);
            ensure((got.precision, got.recall, got.f1) == want, || {
                format!("pair {pair}: rouge-{n} {got:?} vs {want:?}")
            })?;
        }
        let l = brute_lcs(&h, &r);
        ensure(lcs_len(&h, &r) == l, || format!("pair {pair}: lcs"))?;
        let got = rouge_l(&h, &r);
        ensure((got.precision, got.recall, got.f1) == prf(l, h.len(), r.len()), || {
            format!("pair {pair}: rouge-L")
        })?;
    }
    let suites = bleu_fixture();
    let mut worst = 0.0f64;
    for case in &suites {
        let got = corpus_bleu(&case.hyps, &case.refs, 4).map_err(|e| e.to_string())?;
        worst = worst.max((got - case.bleu).abs());
    }
    ensure(worst < 1e-4, || format!("BLEU max deviation {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "500 pairs exact, {} BLEU suites max |d|={worst:.1e}, {:?}",
        suites.len(),
        start.elapsed()
    ))
}

fn eq1_fixture() -> Outcome {
    let st = Stemmer::builtin();
    let s = TagScorer::new(&st, "en");
    let (pred, gold) = (["a", "b", "c"], ["b", "c", "d"]);
    let two_thirds = 2.0 / 3.0;
    let cases = [
        ("F1@3", s.f1_at_k(&pred, &gold, 3)),
        ("F1@M", s.f1_at_m(&pred, &gold)),
        ("F1@O", s.f1_at_o(&pred, &gold)),
    ];
    for (label, r) in cases {
        let r = r.map_err(|e| e.to_string())?;
        for v in [r.precision, r.recall, r.f1] {
            ensure((v - two_thirds).abs() <= 1e-12, || format!("{label}: {r:?}"))?;
        }
    }
    Ok("P=R=F1=2/3 for F1@3, F1@M, F1@O".into())
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect()
}

fn retrieval_end_to_end() -> Outcome {
    let start = Instant::now();
    let seg = Segmenter::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let dim = 16;
    let mut checks = 0;
    for r in 0..100 {
        let id = format!("rec{r}");
        let n = rng.random_range(3..=40);
        let m = rng.random_range(1..=4);
        let sentences: Vec<String> = (0..n).map(|i| format!("Sentence {i} of record {r}.")).collect();
        let mut table = TableProvider::new(dim);
        let s_vecs: Vec<Vec<f32>> = (0..n).map(|_| random_vec(&mut rng, dim)).collect();
        let i_vecs: Vec<Vec<f32>> = (0..m).map(|_| random_vec(&mut rng, dim)).collect();
        let c_vecs: Vec<Vec<f32>> = (0..m).map(|_| random_vec(&mut rng, dim)).collect();
        let insert = |t: &mut TableProvider, k: String, v: &[f32]| {
            t.insert(k, EmbeddingVector::new(v.to_vec()).unwrap()).unwrap()
        };
        for (i, v) in s_vecs.iter().enumerate() {
            insert(&mut table, sentence_key(&id, i), v);
        }
        let image_ids: Vec<String> = (0..m).map(|j| format!("{id}-img{j}")).collect();
        for (j, v) in i_vecs.iter().enumerate() {
            insert(&mut table, image_ids[j].clone(), v);
            insert(&mut table, caption_key(&id, j), &c_vecs[j]);
        }
        let record = ArticleRecord {
            id: id.clone(),
            language: "en".into(),
            headline: "h".into(),
            body: sentences.join(" "),
            captions: (0..m).map(|j| format!("caption {j}")).collect(),
            image_ids,
            tags: vec!["t".into()],
        };
        let retriever = Retriever::new(&seg, &table);
        for k in [5, 10, 15, n, n + 3] {
            let img = retriever.img_ret(&record, k).map_err(|e| e.to_string())?;
            let cap = retriever.cap_ret(&record, k).map_err(|e| e.to_string())?;
            for (label, got, queries) in [("img", &img, &i_vecs), ("cap", &cap, &c_vecs)] {
                let want = brute_select(&s_vecs, queries, k);
                ensure(got.selection.indices == want, || {
                    format!("{id} {label} k={k}: {:?} vs {want:?}", got.selection.indices)
                })?;
                ensure(got.selection.indices.windows(2).all(|w| w[0] < w[1]), || {
                    format!("{id}: not in document order")
                })?;
                let texts: Vec<&String> = want.iter().map(|&i| &sentences[i]).collect();
                ensure(got.sentences.iter().collect::<Vec<_>>() == texts, || {
                    format!("{id} {label}: sentence texts")
                })?;
                if k >= n {
                    ensure(got.selection.indices == (0..n).collect::<Vec<_>>(), || {
                        format!("{id}: k>=n' not all")
                    })?;
                }
                checks += 1;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("100 records, {checks} selections match, {:?}", start.elapsed()))
}

fn scale_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for _ in 0..1000 {
        let dim = rng.random_range(2..32);
        let n = rng.random_range(3..=40);
        let m = rng.random_range(1..=4);
        let s: Vec<EmbeddingVector> = (0..n)
            .map(|_| EmbeddingVector::new(random_vec(&mut rng, dim)).unwrap())
            .collect();
        let q: Vec<EmbeddingVector> = (0..m)
            .map(|_| EmbeddingVector::new(random_vec(&mut rng, dim)).unwrap())
            .collect();
        let factor = 10f32.powf(rng.random_range(-3.0f32..3.0));
        let scaled: Vec<EmbeddingVector> = q.iter().map(|v| v.scaled(factor)).collect();
        let k = rng.random_range(1..=n);
        let a = select_top_k(&aggregate_scores(&s, &q).map_err(|e| e.to_string())?, k);
        let b = select_top_k(&aggregate_scores(&s, &scaled).map_err(|e| e.to_string())?, k);
        if a.indices != b.indices {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations in 1000 trials"))?;
    Ok("1000 trials, 0 violations".into())
}

const PAPER_LANGUAGE_COUNTS: [(&str, usize); 20] = [
    ("en", 200813),
    ("pt", 4112),
    ("es", 28406),
    ("ru", 28272),
    ("uk", 16997),
    ("pa", 8195),
    ("gu", 7218),
    ("hi", 7191),
    ("mr", 9396),
    ("bn", 12954),
    ("fr", 6344),
    ("tr", 5031),
    ("ar", 6922),
    ("zh", 12279),
    ("te", 9579),
    ("ta", 9973),
    ("ne", 6185),
    ("fa", 8830),
    ("ur", 13469),
    ("id", 12951),
];
const PAPER_SPLIT: (usize, usize, usize) = (394_353, 5_187, 15_577);

fn split_and_mixture() -> Outcome {
    let ratios = SplitRatios::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..50 {
        let langs = ["en", "hi", "zh", "ar", "ru"];
        let n = rng.random_range(0..2000);
        let recs: Vec<(usize, &str)> = (0..n).map(|i| (i, langs[rng.random_range(0..langs.len())])).collect();
        let s = split_corpus(&recs, |r| r.1, ratios, trial).map_err(|e| e.to_string())?;
        let mut ids: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).map(|r| r.0).collect();
        ids.sort_unstable();
        ensure(ids == (0..n).collect::<Vec<_>>(), || {
            format!("trial {trial}: not a partition")
        })?;
        for lang in langs {
            let count = recs.iter().filter(|r| r.1 == lang).count();
            let (_, v, t) = split_sizes(count, ratios);
            ensure(
                s.val.iter().filter(|r| r.1 == lang).count() == v && s.test.iter().filter(|r| r.1 == lang).count() == t,
                || format!("trial {trial}: {lang} not floor-rounded"),
            )?;
        }
    }

    let mut paper: Vec<(usize, &str)> = Vec::new();
    for (lang, count) in PAPER_LANGUAGE_COUNTS {
        paper.extend((0..count).map(|i| (i, lang)));
    }
    let total = paper.len();
    let s = split_corpus(&paper, |r| r.1, ratios, 42).map_err(|e| e.to_string())?;
    let got = (s.train.len(), s.val.len(), s.test.len());
    let rel = |g: usize, w: usize| (g as f64 - w as f64) / w as f64 * 100.0;
    let devs = [
        ("train", got.0, PAPER_SPLIT.0),
        ("val", got.1, PAPER_SPLIT.1),
        ("test", got.2, PAPER_SPLIT.2),
    ];
    let detail = devs
        .iter()
        .map(|(l, g, w)| format!("{l} {g} vs {w} ({:+.3}%)", rel(*g, *w)))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(total == 415_117, || format!("synthetic corpus has {total} records"))?;
    let paper_ok = devs.iter().all(|(_, g, w)| rel(*g, *w).abs() <= 0.1);

    for n in [0, 1, 10, 15, 99, 100, 1001] {
        let counts = vec![3; n];
        let a = mixture_assign(&counts, 0.7, 1).map_err(|e| e.to_string())?;
        let b = mixture_assign(&counts, 0.7, 1).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("n={n}: not deterministic"))?;
        let c = a.iter().filter(|m| m.is_controlled()).count();
        let want = (0.7 * n as f64).round() as usize;
        ensure(c == want && c == controlled_count(n, 0.7), || {
            format!("n={n}: {c} controlled, want {want}")
        })?;
    }
    ensure(paper_ok, || {
        format!("partitions exact; mixture exact; paper totals outside 0.1%: {detail}")
    })?;
    Ok(format!("partitions exact; mixture exact; {detail}"))
}

const WORDS: [&str; 16] = [
    "storm",
    "Parliament",
    "votes",
    "नया",
    "बजट",
    "北京",
    "展览",
    "музей",
    "открылся",
    "مستشفى",
    "grève",
    "trains",
    "U.S.",
    "2024",
    "café",
    "e-mail",
];

fn phrase(rng: &mut ChaCha8Rng, max: usize) -> String {
    let n = rng.random_range(1..=max);
    (0..n)
        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn instruction_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let headline = phrase(&mut rng, 12);
        let tags: Vec<String> = (0..rng.random_range(1..=8)).map(|_| phrase(&mut rng, 3)).collect();
        let target = build_target(&headline, &tags).map_err(|e| e.to_string())?;
        let parsed = parse_output(&target, true).map_err(|e| e.to_string())?;
        ensure(parsed.headline == headline && parsed.tags == tags, || {
            format!("pair {i}: {target:?} -> {parsed:?}")
        })?;
    }
    let boxed = [
        (
            build_input("X", Mode::Unrestricted),
            "Generate Headline and Tag Words: X.",
        ),
        (
            build_input("X", Mode::Controlled(3)),
            "Generate Headline and Three Tag Words: X.",
        ),
    ];
    for (got, want) in boxed {
        let got = got.map_err(|e| e.to_string())?;
        ensure(got == want, || format!("{got:?} != {want:?}"))?;
    }
    let target = build_target("H", &["a", "b"]).map_err(|e| e.to_string())?;
    ensure(target == "Headline is: H. Tag words are: a, b.", || target.clone())?;
    Ok("1000 pairs round-trip; templates byte-exact".into())
}

fn stemmer_vectors() -> Outcome {
    let vectors = stem_vectors();
    let wrong: Vec<String> = vectors
        .iter()
        .filter(|(w, s)| stem_english(w) != *s)
        .map(|(w, s)| format!("{w}->{} (want {s})", stem_english(w)))
        .collect();
    ensure(wrong.is_empty(), || {
        format!("{} mismatches: {}", wrong.len(), wrong.join(", "))
    })?;
    let st = Stemmer::builtin();
    for (text, lang) in [("北京 科技展览会", "zh"), ("హైదరాబాద్ వార్తలు", "te")]
    {
        for tok in text.split(' ') {
            let got = st.stem(tok, lang).map_err(|e| e.to_string())?;
            ensure(got == tok, || format!("{lang}: {tok} -> {got}"))?;
        }
        let norm = st.normalize_tag(text, lang).map_err(|e| e.to_string())?;
        ensure(norm == text.to_lowercase(), || format!("{lang}: {norm}"))?;
    }
    Ok(format!("{} English vectors agree; zh/te pass through", vectors.len()))
}

fn baseline_dominance() -> Outcome {
    let seg = Segmenter::builtin();
    let vocab = SubwordVocab::from_file(fixture("vocab.txt")).map_err(|e| e.to_string())?;
    let records = load_corpus(fixture("corpus.jsonl")).map_err(|e| e.to_string())?;
    let r2 = |pick: &str, head: &str| rouge_n(&vocab.tokenize(pick), &vocab.tokenize(head), 2).f1;
    let mut lead_sum = 0.0;
    let mut oracle_sum = 0.0;
    for r in &records {
        let lead = lead_1(r, &seg).map_err(|e| e.to_string())?;
        let oracle = ext_oracle(r, &seg, &vocab).map_err(|e| e.to_string())?;
        ensure(r.body.contains(&oracle), || {
            format!("{}: oracle pick not in body", r.id)
        })?;
        let (l, o) = (r2(&lead, &r.headline), r2(&oracle, &r.headline));
        ensure(o >= l, || format!("{}: oracle {o} < lead {l}", r.id))?;
        lead_sum += l;
        oracle_sum += o;
    }
    let n = records.len() as f64;
    let (lead_mean, oracle_mean) = (lead_sum / n, oracle_sum / n);
    ensure(oracle_mean > lead_mean, || {
        format!("means {oracle_mean} vs {lead_mean}")
    })?;
    Ok(format!(
        "{} records: EXT-ORACLE {oracle_mean:.4} > LEAD-1 {lead_mean:.4}",
        records.len()
    ))
}

fn compression_fixture() -> Outcome {
    let headline = ["word"; 10].join(" ");
    let body = ["word"; 100].join(" ");
    let c = compression_pct(&headline, &body);
    ensure(c == 90.0, || format!("{c}"))?;
    Ok("90.0".into())
}

fn main() {
    type Check = (&'static str, fn() -> Outcome);
    let checks: [Check; 9] = [
        ("metric oracle equivalence", metric_oracles),
        ("tag F1 worked example", eq1_fixture),
        ("retrieval end-to-end oracle", retrieval_end_to_end),
        ("selection scale invariance", scale_invariance),
        ("split and mixture", split_and_mixture),
        ("instruction round-trip", instruction_round_trip),
        ("stemmer vectors", stemmer_vectors),
        ("baseline dominance", baseline_dominance),
        ("compression fixture", compression_fixture),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
