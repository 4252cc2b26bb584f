#![allow(dead_code)]

use std::path::PathBuf;

use serde::Deserialize;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[derive(Deserialize)]
pub struct WordpieceFixture {
    pub vocab: Vec<String>,
    pub unk_token: String,
    pub cases: Vec<WordpieceCase>,
}

#[derive(Deserialize)]
pub struct WordpieceCase {
    pub text: String,
    pub tokens: Vec<String>,
}

#[derive(Deserialize)]
pub struct BleuCase {
    pub hyps: Vec<Vec<String>>,
    pub refs: Vec<Vec<String>>,
    pub bleu: f64,
}

pub fn wordpiece_fixture() -> WordpieceFixture {
    serde_json::from_str(&std::fs::read_to_string(fixture("wordpiece_cases.json")).unwrap()).unwrap()
}

pub fn bleu_fixture() -> Vec<BleuCase> {
    serde_json::from_str(&std::fs::read_to_string(fixture("bleu_cases.json")).unwrap()).unwrap()
}

pub fn stem_vectors() -> Vec<(String, String)> {
    std::fs::read_to_string(fixture("english_stem_vectors.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (w, s) = l.split_once('\t').unwrap();
            (w.to_string(), s.to_string())
        })
        .collect()
}

/// Overlap by repeatedly removing matched n-grams from a list copy.
pub fn brute_ngram_overlap(hyp: &[String], reference: &[String], n: usize) -> (usize, usize, usize) {
    let grams = |t: &[String]| -> Vec<Vec<String>> {
        if t.len() < n {
            Vec::new()
        } else {
            (0..=t.len() - n).map(|i| t[i..i + n].to_vec()).collect()
        }
    };
    let h = grams(hyp);
    let mut r = grams(reference);
    let (hn, rn) = (h.len(), r.len());
    let mut hits = 0;
    for g in &h {
        if let Some(pos) = r.iter().position(|x| x == g) {
            r.swap_remove(pos);
            hits += 1;
        }
    }
    (hits, hn, rn)
}

/// Full-table LCS.
pub fn brute_lcs(a: &[String], b: &[String]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn prf(hits: usize, hyp: usize, reference: usize) -> (f64, f64, f64) {
    let p = if hyp == 0 { 0.0 } else { hits as f64 / hyp as f64 };
    let r = if reference == 0 {
        0.0
    } else {
        hits as f64 / reference as f64
    };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Dot-product cosine from scratch in f64.
pub fn brute_cosine(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for i in 0..a.len() {
        dot += a[i] as f64 * b[i] as f64;
        na += a[i] as f64 * a[i] as f64;
        nb += b[i] as f64 * b[i] as f64;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Scores every sentence against every query, then picks the k best by
/// repeated argmax (earliest index on ties) and sorts them.
pub fn brute_select(sentences: &[Vec<f32>], queries: &[Vec<f32>], k: usize) -> Vec<usize> {
    let scores: Vec<f64> = sentences
        .iter()
        .map(|s| {
            let mut total = 0.0;
            for q in queries {
                total += brute_cosine(s, q);
            }
            total
        })
        .collect();
    let mut taken = vec![false; scores.len()];
    let mut picked = Vec::new();
    for _ in 0..k.min(scores.len()) {
        let mut best: Option<usize> = None;
        for i in 0..scores.len() {
            if !taken[i] && best.is_none_or(|b| scores[i] > scores[b]) {
                best = Some(i);
            }
        }
        let b = best.unwrap();
        taken[b] = true;
        picked.push(b);
    }
    picked.sort();
    picked
}
