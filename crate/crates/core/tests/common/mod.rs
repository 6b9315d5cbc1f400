//! Synthetic corpora shaped like the real ones: English (5 cells),
//! Spanish (43 cells, three conjugation classes), Swahili (prefixing,
//! 24 cells) and a toy purely-suffixing language.
#![allow(dead_code)]

use morphprobe::corpus::{Corpus, LanguageConfig, Triple};
use morphprobe::features::TagOrdering;
use morphprobe::transcribe::PronLexicon;

pub type Row = (String, String, String);

/// `n` distinct two-syllable stems over the given consonants and vowels.
pub fn stems(n: usize, consonants: &str, vowels: &str, offset: usize) -> Vec<String> {
    let syllables: Vec<String> = consonants
        .chars()
        .flat_map(|c| vowels.chars().map(move |v| format!("{c}{v}")))
        .collect();
    let m = syllables.len();
    assert!(n <= m * m, "not enough syllable pairs");
    // stride through the pairs so neighbouring stems differ in both syllables
    let stride = (0..).map(|k| 7 + k).find(|s| gcd(*s, m * m) == 1).unwrap();
    (0..n)
        .map(|i| {
            let k = (offset + i * stride) % (m * m);
            format!("{}{}", syllables[k / m], syllables[k % m])
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub const EN_CELLS: [(&str, &str); 5] = [
    ("", "V;NFIN"),
    ("s", "V;PRS;3;SG"),
    ("ed", "V;PST"),
    ("ing", "V.PTCP;PRS"),
    ("en", "V.PTCP;PST"),
];

pub fn english_rows(n: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for w in stems(n, "bdfgklmnprstv", "aeiou", 0) {
        for (suffix, fs) in EN_CELLS {
            rows.push((w.clone(), format!("{w}{suffix}"), fs.to_string()));
        }
    }
    rows
}

/// Toy pronunciations: one or two candidates per word, the second
/// differing in its first vowel so pair selection has something to choose.
pub fn english_lexicon(rows: &[Row]) -> PronLexicon {
    let mut lex = PronLexicon::default();
    let phone = |w: &str| -> String {
        w.chars()
            .map(|c| match c {
                'a' => 'æ',
                'e' => 'ɛ',
                'i' => 'ɪ',
                'o' => 'ɒ',
                'u' => 'ʌ',
                'g' => 'ɡ',
                c => c,
            })
            .collect()
    };
    for (lemma, form, _) in rows {
        for w in [lemma, form] {
            if lex.lookup(w).is_some() {
                continue;
            }
            let p = phone(w);
            if w.len() % 2 == 0 {
                let alt = p.replacen('æ', "eɪ", 1);
                if alt != p {
                    lex.insert(w, &alt);
                }
            }
            lex.insert(w, &p);
        }
    }
    lex
}

pub fn lexicon_text(lex_rows: &[Row], lex: &PronLexicon) -> String {
    let mut words: Vec<&String> = lex_rows.iter().flat_map(|(l, f, _)| [l, f]).collect();
    words.sort();
    words.dedup();
    words
        .into_iter()
        .map(|w| format!("{w}\t{}\n", lex.lookup(w).unwrap().join("|")))
        .collect()
}

pub const ES_TENSES: [(&str, &str); 6] = [
    ("IND;PRS", ""),
    ("IND;PST;PFV", "ste"),
    ("IND;PST;IPFV", "ba"),
    ("IND;FUT", "rá"),
    ("COND", "ría"),
    ("SBJV;PRS", "e"),
];

pub const ES_CELLS: [(&str, &str); 7] = [
    ("1;SG", "o"),
    ("2;SG", "s"),
    ("3;SG", ""),
    ("1;PL", "mos"),
    ("2;PL", "is"),
    ("3;PL", "n"),
    ("2;SG;FORM", "d"),
];

/// `n` lemmas cycling through -ar/-er/-ir, 43 cells each.
pub fn spanish_rows(n: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for (i, stem) in stems(n, "bdflmnprstv", "aeiou", 3).into_iter().enumerate() {
        let theme = ["a", "e", "i"][i % 3];
        let lemma = format!("{stem}{theme}r");
        rows.push((lemma.clone(), lemma.clone(), "V;NFIN".into()));
        for (tense, t) in ES_TENSES {
            for (cell, c) in ES_CELLS {
                rows.push((lemma.clone(), format!("{stem}{theme}{t}{c}"), format!("V;{tense};{cell}")));
            }
        }
    }
    rows
}

pub const SW_SUBJECTS: [(&str, &str); 6] = [
    ("1;SG", "ni"),
    ("2;SG", "u"),
    ("3;SG", "a"),
    ("1;PL", "tu"),
    ("2;PL", "m"),
    ("3;PL", "wa"),
];

/// Tense/aspect markers. The perfect uses the raw `PRF` tag that the
/// shipped rewrite table folds into `PFV`.
pub const SW_TAM: [(&str, &str, &str); 4] = [
    ("PRS", "PRS", "na"),
    ("PST", "PST", "li"),
    ("FUT", "FUT", "ta"),
    ("PST;PRF", "PST;PFV", "me"),
];

/// Swahili rows; `raw` keeps the unnormalized `PRF` tag.
pub fn swahili_rows(n: usize, raw: bool) -> Vec<Row> {
    let mut rows = Vec::new();
    for stem in stems(n, "bdfgklmnpstvz", "aiu", 1) {
        let lemma = format!("{stem}a");
        for (raw_tam, tam, marker) in SW_TAM {
            for (cell, subj) in SW_SUBJECTS {
                let tags = if raw { raw_tam } else { tam };
                rows.push((lemma.clone(), format!("{subj}{marker}{lemma}"), format!("V;{tags};{cell}")));
            }
        }
    }
    rows
}

pub const TOY_CELLS: [(&str, &str); 6] = [
    ("", "V;NFIN"),
    ("ta", "V;PST"),
    ("ru", "V;FUT"),
    ("mi", "V;PRS;1;SG"),
    ("si", "V;PRS;2;SG"),
    ("ka", "V;PRS;3;SG"),
];

/// 50 lemmas × 6 suffix-coded cells; `V;NFIN` is the no-change cell.
pub fn suffixing_rows() -> Vec<Row> {
    let mut rows = Vec::new();
    for lemma in stems(50, "bdgklmnprstvz", "aeiou", 5) {
        for (suffix, fs) in TOY_CELLS {
            rows.push((lemma.clone(), format!("{lemma}{suffix}"), fs.to_string()));
        }
    }
    rows
}

pub fn corpus(language: &str, rows: &[Row]) -> Corpus {
    let ord = TagOrdering::default();
    let triples = rows
        .iter()
        .map(|(l, f, s)| Triple::new(l.clone(), f.clone(), ord.parse(s).unwrap()).unwrap())
        .collect();
    let (c, dups) = Corpus::from_triples(&LanguageConfig::permissive(language), triples);
    assert_eq!(dups, 0, "fixture rows must be unique");
    c
}

pub fn unimorph_text(rows: &[Row]) -> String {
    rows.iter().map(|(l, f, s)| format!("{l}\t{f}\t{s}\n")).collect()
}

pub fn english() -> Corpus {
    corpus("en", &english_rows(1500))
}

pub fn spanish() -> Corpus {
    corpus("es", &spanish_rows(600))
}

pub fn swahili() -> Corpus {
    corpus("sw", &swahili_rows(250, false))
}

pub fn fixture(language: &str) -> Corpus {
    match language {
        "en" => english(),
        "es" => spanish(),
        "sw" => swahili(),
        other => panic!("no fixture for {other}"),
    }
}
