//! Snowball English ("Porter2") stemmer, current revision.
//!
//! Operates on characters; anything outside `a e i o u y` counts as a
//! consonant. Input is not case folded.

const EXCEPTIONS: &[(&str, &str)] = &[
    ("andes", "andes"),
    ("atlas", "atlas"),
    ("bias", "bias"),
    ("cosmos", "cosmos"),
    ("early", "earli"),
    ("gently", "gentl"),
    ("howe", "howe"),
    ("idly", "idl"),
    ("news", "news"),
    ("only", "onli"),
    ("singly", "singl"),
    ("skies", "sky"),
    ("skis", "ski"),
    ("sky", "sky"),
    ("ugly", "ugli"),
];

const REGION_PREFIXES: &[&str] = &[
    "arsen", "commun", "emerg", "gener", "inter", "later", "organ", "past", "univers",
];

const STEP2: &[(&str, &str)] = &[
    ("ational", "ate"),
    ("fulness", "ful"),
    ("iveness", "ive"),
    ("ization", "ize"),
    ("ousness", "ous"),
    ("biliti", "ble"),
    ("lessli", "less"),
    ("tional", "tion"),
    ("alism", "al"),
    ("aliti", "al"),
    ("entli", "ent"),
    ("fulli", "ful"),
    ("iviti", "ive"),
    ("ogist", "og"),
    ("ousli", "ous"),
    ("ation", "ate"),
    ("abli", "able"),
    ("alli", "al"),
    ("anci", "ance"),
    ("ator", "ate"),
    ("enci", "ence"),
    ("izer", "ize"),
    ("bli", "ble"),
    ("ogi", "og"),
    ("li", ""),
];

/// (suffix, replacement, needs R2)
const STEP3: &[(&str, &str, bool)] = &[
    ("ational", "ate", false),
    ("tional", "tion", false),
    ("alize", "al", false),
    ("ative", "", true),
    ("icate", "ic", false),
    ("iciti", "ic", false),
    ("ical", "ic", false),
    ("ness", "", false),
    ("ful", "", false),
];

const STEP4: &[&str] = &[
    "ement", "ance", "ence", "able", "ible", "ment", "ate", "ive", "ize", "iti", "ism", "ion", "ous", "ant", "ent",
    "ic", "al", "er",
];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn is_valid_li(c: char) -> bool {
    matches!(c, 'c' | 'd' | 'e' | 'g' | 'h' | 'k' | 'm' | 'n' | 'r' | 't')
}

struct Word {
    chars: Vec<char>,
    r1: usize,
    r2: usize,
}

impl Word {
    fn len(&self) -> usize {
        self.chars.len()
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.len() && self.chars[self.len() - n..].iter().copied().eq(suffix.chars())
    }

    /// Start index of `suffix` if the word ends with it.
    fn suffix_start(&self, suffix: &str) -> Option<usize> {
        self.ends_with(suffix).then(|| self.len() - suffix.chars().count())
    }

    fn replace_from(&mut self, at: usize, with: &str) {
        self.chars.truncate(at);
        self.chars.extend(with.chars());
    }

    fn stem_is(&self, at: usize, word: &str) -> bool {
        self.chars[..at].iter().copied().eq(word.chars())
    }

    /// Whether `chars[..end]` ends in a short syllable.
    fn ends_short(&self, end: usize) -> bool {
        let w = &self.chars[..end];
        if w.ends_with(&['p', 'a', 's', 't']) {
            return true;
        }
        match end {
            0 | 1 => false,
            2 => is_vowel(w[0]) && !is_vowel(w[1]),
            _ => {
                let last = w[end - 1];
                !is_vowel(last) && !matches!(last, 'w' | 'x' | 'Y') && is_vowel(w[end - 2]) && !is_vowel(w[end - 3])
            }
        }
    }

    fn first_suffix<'a, T>(&self, table: &'a [T], key: impl Fn(&T) -> &str) -> Option<(usize, &'a T)> {
        table
            .iter()
            .find_map(|entry| self.suffix_start(key(entry)).map(|at| (at, entry)))
    }
}

/// Index just past the first consonant that follows a vowel, searching from `from`.
fn after_vowel_consonant(chars: &[char], from: usize) -> Option<usize> {
    let v = from + chars.get(from..)?.iter().position(|&c| is_vowel(c))?;
    let c = v + chars[v..].iter().position(|&c| !is_vowel(c))?;
    Some(c + 1)
}

pub fn stem(word: &str) -> String {
    if let Some((_, out)) = EXCEPTIONS.iter().find(|(w, _)| *w == word) {
        return out.to_string();
    }
    let mut chars: Vec<char> = word.chars().collect();
    if chars.len() < 3 {
        return word.to_string();
    }

    if chars[0] == '\'' {
        chars.remove(0);
    }
    let mut has_y = false;
    for i in 0..chars.len() {
        if chars[i] == 'y' && (i == 0 || is_vowel(chars[i - 1])) {
            chars[i] = 'Y';
            has_y = true;
        }
    }

    let n = chars.len();
    let prefix = REGION_PREFIXES
        .iter()
        .find(|p| chars.iter().copied().take(p.len()).eq(p.chars()));
    let r1 = match prefix {
        Some(p) => p.len(),
        None => after_vowel_consonant(&chars, 0).unwrap_or(n),
    };
    let r2 = after_vowel_consonant(&chars, r1).unwrap_or(n);
    let mut w = Word { chars, r1, r2 };

    step1a(&mut w);
    step1b(&mut w);
    step1c(&mut w);
    step2(&mut w);
    step3(&mut w);
    step4(&mut w);
    step5(&mut w);

    let out: String = w.chars.into_iter().collect();
    if has_y {
        out.replace('Y', "y")
    } else {
        out
    }
}

fn step1a(w: &mut Word) {
    for apos in ["'s'", "'s", "'"] {
        if let Some(at) = w.suffix_start(apos) {
            w.chars.truncate(at);
            break;
        }
    }
    if let Some(at) = w.suffix_start("sses") {
        w.replace_from(at, "ss");
    } else if let Some(at) = w.suffix_start("ied").or_else(|| w.suffix_start("ies")) {
        w.replace_from(at, if at > 1 { "i" } else { "ie" });
    } else if w.ends_with("ss") || w.ends_with("us") {
    } else if let Some(at) = w.suffix_start("s") {
        // a vowel somewhere before the letter preceding the s
        if at >= 2 && w.chars[..at - 1].iter().any(|&c| is_vowel(c)) {
            w.chars.truncate(at);
        }
    }
}

fn step1b(w: &mut Word) {
    const SUFFIXES: &[&str] = &["eedly", "ingly", "edly", "eed", "ing", "ed"];
    let Some((at, &suffix)) = w.first_suffix(SUFFIXES, |s| s) else {
        return;
    };
    match suffix {
        "eed" | "eedly" => {
            if at >= w.r1 && !["succ", "proc", "exc"].iter().any(|s| w.stem_is(at, s)) {
                w.replace_from(at, "ee");
            }
            return;
        }
        "ing" => {
            if at == 2 && w.chars[1] == 'y' && !is_vowel(w.chars[0]) {
                w.replace_from(1, "ie");
                return;
            }
            if ["even", "cann", "inn", "earr", "herr", "out"]
                .iter()
                .any(|s| w.stem_is(at, s))
            {
                return;
            }
        }
        _ => {}
    }

    if !w.chars[..at].iter().any(|&c| is_vowel(c)) {
        return;
    }
    w.chars.truncate(at);
    if w.ends_with("at") || w.ends_with("bl") || w.ends_with("iz") {
        w.chars.push('e');
    } else if ["bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"]
        .iter()
        .any(|d| w.ends_with(d))
    {
        if !(w.len() == 3 && matches!(w.chars[0], 'a' | 'e' | 'o')) {
            w.chars.pop();
        }
    } else if w.len() == w.r1 && w.ends_short(w.len()) {
        w.chars.push('e');
    }
}

fn step1c(w: &mut Word) {
    let n = w.len();
    if n >= 3 && matches!(w.chars[n - 1], 'y' | 'Y') && !is_vowel(w.chars[n - 2]) {
        w.chars[n - 1] = 'i';
    }
}

fn step2(w: &mut Word) {
    let Some((at, &(suffix, repl))) = w.first_suffix(STEP2, |e| e.0) else {
        return;
    };
    if at < w.r1 {
        return;
    }
    match suffix {
        "ogi" if at == 0 || w.chars[at - 1] != 'l' => {}
        "li" if at == 0 || !is_valid_li(w.chars[at - 1]) => {}
        _ => w.replace_from(at, repl),
    }
}

fn step3(w: &mut Word) {
    let Some((at, &(_, repl, needs_r2))) = w.first_suffix(STEP3, |e| e.0) else {
        return;
    };
    if at >= w.r1 && (!needs_r2 || at >= w.r2) {
        w.replace_from(at, repl);
    }
}

fn step4(w: &mut Word) {
    let Some((at, &suffix)) = w.first_suffix(STEP4, |s| s) else {
        return;
    };
    if at < w.r2 {
        return;
    }
    if suffix == "ion" && !(at > 0 && matches!(w.chars[at - 1], 's' | 't')) {
        return;
    }
    w.chars.truncate(at);
}

fn step5(w: &mut Word) {
    let n = w.len();
    if n == 0 {
        return;
    }
    let at = n - 1;
    match w.chars[at] {
        'e' if at >= w.r2 || (at >= w.r1 && !w.ends_short(at)) => {
            w.chars.pop();
        }
        'l' if at >= w.r2 && at > 0 && w.chars[at - 1] == 'l' => {
            w.chars.pop();
        }
        _ => {}
    }
}
