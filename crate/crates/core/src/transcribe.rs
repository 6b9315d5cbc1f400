//! Phonological presentation of corpora.
//!
//! Two transcription routes are supported: lookup in a pronunciation lexicon
//! (choosing, among all candidate pairs, the lemma/form transcriptions with
//! the smallest edit distance) and an ordered list of grapheme rewrite rules.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::{Corpus, Triple};
use crate::error::{Error, Result};

pub const SPANISH_RULES: &str = include_str!("../data/rules/es.tsv");
pub const SWAHILI_RULES: &str = include_str!("../data/rules/sw.tsv");

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Word → candidate transcriptions, looked up case-insensitively.
#[derive(Clone, Debug, Default)]
pub struct PronLexicon {
    entries: HashMap<String, Vec<String>>,
}

impl PronLexicon {
    /// `word\tt1|t2|...` lines; repeated words accumulate candidates.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = PronLexicon::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |reason: &str| Error::Format {
                context: "lexicon".into(),
                line: idx + 1,
                reason: reason.into(),
            };
            let (word, trans) = line.split_once('\t').ok_or_else(|| fail("expected word<TAB>transcriptions"))?;
            let candidates: Vec<&str> = trans.split('|').filter(|c| !c.is_empty()).collect();
            if word.is_empty() || candidates.is_empty() {
                return Err(fail("empty word or transcription list"));
            }
            for c in candidates {
                lex.insert(word, c);
            }
        }
        Ok(lex)
    }

    pub fn insert(&mut self, word: &str, transcription: &str) {
        let list = self.entries.entry(word.to_lowercase()).or_default();
        if !list.iter().any(|c| c == transcription) {
            list.push(transcription.to_string());
        }
    }

    pub fn lookup(&self, word: &str) -> Option<&[String]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Pick the candidate pair minimizing edit distance. Ties go to the
/// earlier lemma candidate, then the earlier form candidate.
pub fn transcribe_pair(lemma: &str, form: &str, lexicon: &PronLexicon) -> Option<(String, String)> {
    let lemma_c = lexicon.lookup(lemma)?;
    let form_c = lexicon.lookup(form)?;
    let mut best: Option<(usize, &String, &String)> = None;
    for l in lemma_c {
        for f in form_c {
            let d = levenshtein(l, f);
            if best.is_none_or(|(bd, _, _)| d < bd) {
                best = Some((d, l, f));
            }
        }
    }
    best.map(|(_, l, f)| (l.clone(), f.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub source: String,
    pub target: String,
}

/// Ordered rewrite rules; list position is priority.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<RewriteRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<RewriteRule>) -> Result<Self> {
        if let Some(r) = rules.iter().find(|r| r.source.is_empty()) {
            return Err(Error::InvalidArgument(format!("rule with empty source -> {:?}", r.target)));
        }
        Ok(RuleSet { rules })
    }

    /// One `source\ttarget` rule per line; the target may be empty.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (source, target) = line.split_once('\t').ok_or_else(|| Error::Format {
                context: "rules".into(),
                line: idx + 1,
                reason: "expected source<TAB>target".into(),
            })?;
            rules.push(RewriteRule {
                source: source.to_string(),
                target: target.to_string(),
            });
        }
        RuleSet::new(rules)
    }

    pub fn spanish() -> Self {
        RuleSet::parse(SPANISH_RULES).expect("shipped rules are valid")
    }

    pub fn swahili() -> Self {
        RuleSet::parse(SWAHILI_RULES).expect("shipped rules are valid")
    }

    pub fn builtin(language: &str) -> Option<Self> {
        match language {
            "es" => Some(RuleSet::spanish()),
            "sw" => Some(RuleSet::swahili()),
            _ => None,
        }
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }
}

/// Left-to-right scan applying the first listed rule whose source is a
/// prefix of the remaining input.
pub fn rule_transcribe(word: &str, rules: &RuleSet) -> Result<String> {
    let mut out = String::new();
    let mut rest = word;
    let mut position = 0;
    while let Some(c) = rest.chars().next() {
        let rule = rules
            .rules
            .iter()
            .find(|r| rest.starts_with(r.source.as_str()))
            .ok_or_else(|| Error::NoRule {
                word: word.to_string(),
                character: c,
                position,
            })?;
        out.push_str(&rule.target);
        position += rule.source.chars().count();
        rest = &rest[rule.source.len()..];
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum Transcriber {
    Lexicon(PronLexicon),
    Rules(RuleSet),
}

impl Transcriber {
    /// `Ok(None)` when the pair cannot be transcribed.
    pub fn pair(&self, lemma: &str, form: &str) -> Result<Option<(String, String)>> {
        let pair = match self {
            Transcriber::Lexicon(lex) => transcribe_pair(lemma, form, lex),
            Transcriber::Rules(rules) => Some((
                rule_transcribe(&lemma.to_lowercase(), rules)?,
                rule_transcribe(&form.to_lowercase(), rules)?,
            )),
        };
        Ok(pair.filter(|(l, f)| !l.is_empty() && !f.is_empty()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscribedTriple {
    pub base: Triple,
    pub lemma_t: String,
    pub form_t: String,
}

#[derive(Clone, Debug, Default)]
pub struct Transcribed {
    pub triples: Vec<TranscribedTriple>,
    pub discarded: Vec<Triple>,
}

impl Transcribed {
    pub fn map(&self) -> TranscriptionMap {
        let mut map = TranscriptionMap::default();
        for t in &self.triples {
            map.pairs
                .insert((t.base.lemma.clone(), t.base.form.clone()), (t.lemma_t.clone(), t.form_t.clone()));
        }
        map
    }
}

pub fn transcribe_corpus(corpus: &Corpus, transcriber: &Transcriber) -> Result<Transcribed> {
    let results: Vec<Result<Option<TranscribedTriple>>> = corpus
        .triples()
        .par_iter()
        .map(|t| {
            Ok(transcriber.pair(&t.lemma, &t.form)?.map(|(lemma_t, form_t)| TranscribedTriple {
                base: t.clone(),
                lemma_t,
                form_t,
            }))
        })
        .collect();
    let mut out = Transcribed::default();
    for (t, r) in corpus.triples().iter().zip(results) {
        match r? {
            Some(tt) => out.triples.push(tt),
            None => out.discarded.push(t.clone()),
        }
    }
    Ok(out)
}

/// Orthographic (lemma, form) → transcribed (lemma, form). Pair selection
/// depends only on the two words, so features are not part of the key.
#[derive(Clone, Debug, Default)]
pub struct TranscriptionMap {
    pairs: HashMap<(String, String), (String, String)>,
}

impl TranscriptionMap {
    pub fn get(&self, lemma: &str, form: &str) -> Option<&(String, String)> {
        self.pairs.get(&(lemma.to_string(), form.to_string()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_unimorph, LanguageConfig};
    use proptest::prelude::*;

    /// The recursive definition, memoized.
    fn lev_oracle(a: &[char], b: &[char]) -> usize {
        fn go(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
            if a.is_empty() {
                return b.len();
            }
            if b.is_empty() {
                return a.len();
            }
            if let Some(&v) = memo.get(&(a.len(), b.len())) {
                return v;
            }
            let (ta, tb) = (&a[1..], &b[1..]);
            let v = if a[0] == b[0] {
                go(ta, tb, memo)
            } else {
                1 + go(ta, b, memo).min(go(a, tb, memo)).min(go(ta, tb, memo))
            };
            memo.insert((a.len(), b.len()), v);
            v
        }
        go(a, b, &mut HashMap::new())
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("pika", "pika"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        let (k, s): (Vec<char>, Vec<char>) = ("kitten".chars().collect(), "sitting".chars().collect());
        assert_eq!(lev_oracle(&k, &s), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        // code points, not bytes
        assert_eq!(levenshtein("riːd", "rɛd"), 2);
    }

    proptest! {
        #[test]
        fn levenshtein_matches_recursive_definition(a in "[abcé]{0,7}", b in "[abcé]{0,7}") {
            let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
            prop_assert_eq!(levenshtein(&a, &b), lev_oracle(&ca, &cb));
        }

        #[test]
        fn levenshtein_is_a_metric(a in "[abc]{0,8}", b in "[abc]{0,8}", c in "[abc]{0,8}") {
            prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
            prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
            prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        }

        #[test]
        fn pair_selection_is_brute_force_minimum(
            lemma_c in prop::collection::vec("[abɛː]{1,5}", 1..8),
            form_c in prop::collection::vec("[abɛː]{1,5}", 1..8),
        ) {
            let mut lex = PronLexicon::default();
            for c in &lemma_c { lex.insert("lemma", c); }
            for c in &form_c { lex.insert("form", c); }
            let (l, f) = transcribe_pair("lemma", "form", &lex).unwrap();
            let min = lex.lookup("lemma").unwrap().iter()
                .flat_map(|x| lex.lookup("form").unwrap().iter().map(move |y| levenshtein(x, y)))
                .min().unwrap();
            prop_assert_eq!(levenshtein(&l, &f), min);
        }

        #[test]
        fn rule_transcription_is_deterministic(word in "[a-zñáéíóú]{0,10}") {
            let rules = RuleSet::spanish();
            prop_assert_eq!(rule_transcribe(&word, &rules).unwrap(), rule_transcribe(&word, &rules).unwrap());
        }
    }

    #[test]
    fn pair_selection_examples() {
        let mut lex = PronLexicon::default();
        lex.insert("read", "riːd");
        lex.insert("read", "rɛd");
        lex.insert("red", "rɛd");
        // both lemma candidates against the single form candidate
        assert_eq!(transcribe_pair("read", "red", &lex), Some(("rɛd".into(), "rɛd".into())));

        let mut lex = PronLexicon::default();
        lex.insert("walk", "wɔk");
        lex.insert("walked", "wɔkt");
        assert_eq!(transcribe_pair("walk", "walked", &lex), Some(("wɔk".into(), "wɔkt".into())));
        assert_eq!(transcribe_pair("walk", "walking", &lex), None);
        assert_eq!(transcribe_pair("WALK", "Walked", &lex), Some(("wɔk".into(), "wɔkt".into())));
    }

    #[test]
    fn ties_follow_lexicon_order() {
        let lex = PronLexicon::parse("a\txa|ya\nb\txb|yb\n").unwrap();
        assert_eq!(transcribe_pair("a", "b", &lex), Some(("xa".into(), "xb".into())));
    }

    /// Every way of covering the word with rule sources.
    fn all_segmentations(word: &str, rules: &RuleSet) -> Vec<Vec<usize>> {
        if word.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, r) in rules.rules().iter().enumerate() {
            if let Some(rest) = word.strip_prefix(r.source.as_str()) {
                for mut tail in all_segmentations(rest, rules) {
                    tail.insert(0, i);
                    out.push(tail);
                }
            }
        }
        out
    }

    #[test]
    fn que_example_and_greedy_first_match() {
        let rules = RuleSet::parse("qu\tk\ne\te\nq\tq\nu\tu\n").unwrap();
        assert_eq!(rule_transcribe("que", &rules).unwrap(), "ke");
        // the scan result is the lexicographically-first segmentation by rule priority
        let segs = all_segmentations("que", &rules);
        let best = segs.iter().min().unwrap();
        let via_oracle: String = best.iter().map(|&i| rules.rules()[i].target.as_str()).collect();
        assert_eq!(via_oracle, "ke");
    }

    #[test]
    fn identity_rules_and_missing_rule() {
        let rules = RuleSet::parse("a\ta\nb\tb\n").unwrap();
        assert_eq!(rule_transcribe("abba", &rules).unwrap(), "abba");
        match rule_transcribe("x", &rules) {
            Err(Error::NoRule { character, position, .. }) => {
                assert_eq!(character, 'x');
                assert_eq!(position, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shipped_rules_cover_alphabets() {
        let es = RuleSet::spanish();
        assert_eq!(rule_transcribe("correrás", &es).unwrap(), "koreɾas");
        assert_eq!(rule_transcribe("quiere", &es).unwrap(), "kjeɾe");
        assert_eq!(rule_transcribe("chico", &es).unwrap(), "tʃiko");
        for c in "abcdefghijklmnñopqrstuvwxyzáéíóúü".chars() {
            assert!(rule_transcribe(&c.to_string(), &es).is_ok(), "{c}");
        }
        let sw = RuleSet::swahili();
        assert_eq!(rule_transcribe("ulipika", &sw).unwrap(), "ulipika");
        assert_eq!(rule_transcribe("nitachukua", &sw).unwrap(), "nitatʃukua");
        for c in "abcdefghijklmnoprstuvwyz'".chars() {
            assert!(rule_transcribe(&c.to_string(), &sw).is_ok(), "{c}");
        }
    }

    #[test]
    fn corpus_transcription_by_both_methods() {
        let cfg = LanguageConfig::new("en");
        let c = parse_unimorph("walk\twalked\tV;PST\nwalk\twalks\tV;PRS;3;SG\nzzz\tzzzed\tV;PST\n", &cfg).corpus;
        let lex = PronLexicon::parse("walk\twɔk\nwalked\twɔkt\nwalks\twɔks\n").unwrap();
        let out = transcribe_corpus(&c, &Transcriber::Lexicon(lex)).unwrap();
        assert_eq!(out.triples.len(), 2);
        assert_eq!(out.discarded.len(), 1);
        assert_eq!(out.discarded[0].lemma, "zzz");
        assert_eq!(out.map().get("walk", "walks"), Some(&("wɔk".to_string(), "wɔks".to_string())));

        let all_missing = transcribe_corpus(&c, &Transcriber::Lexicon(PronLexicon::default())).unwrap();
        assert!(all_missing.triples.is_empty());
        assert_eq!(all_missing.discarded.len(), 3);

        let cfg = LanguageConfig::new("es");
        let c = parse_unimorph("correr\tcorrerás\tV;IND;FUT;2;SG;INFM\n", &cfg).corpus;
        let out = transcribe_corpus(&c, &Transcriber::Rules(RuleSet::spanish())).unwrap();
        assert_eq!(out.triples[0].lemma_t, "koreɾ");
        assert_eq!(out.triples[0].form_t, "koreɾas");

        let bad = parse_unimorph("correr\tcorrer$\tV;NFIN\n", &LanguageConfig::new("es")).corpus;
        assert!(transcribe_corpus(&bad, &Transcriber::Rules(RuleSet::spanish())).is_err());
    }
}
