//! UniMorph-style corpora: parsing, filtering, canonical serialization.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::features::{FeatureSet, FeatureTag, TagInventory, TagOrdering};

/// One (lemma, inflected form, feature set) record.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub lemma: String,
    pub form: String,
    pub features: FeatureSet,
}

/// Identity of a triple: lemma, form and serialized features.
pub type TripleKey = (String, String, String);

impl Triple {
    pub fn new(lemma: impl Into<String>, form: impl Into<String>, features: FeatureSet) -> Result<Self> {
        let lemma = lemma.into();
        let form = form.into();
        for (what, s) in [("lemma", &lemma), ("form", &form)] {
            if s.is_empty() {
                return Err(Error::InvalidArgument(format!("empty {what}")));
            }
            if s.contains('\t') || s.contains('\n') {
                return Err(Error::InvalidArgument(format!("{what} {s:?} contains a tab or newline")));
            }
        }
        Ok(Triple { lemma, form, features })
    }

    pub fn key(&self) -> TripleKey {
        (self.lemma.clone(), self.form.clone(), self.features.to_string())
    }

    /// `lemma\tform\tfeatures`
    pub fn to_tsv(&self) -> String {
        format!("{}\t{}\t{}", self.lemma, self.form, self.features)
    }
}

/// Per-language parsing context.
#[derive(Clone, Debug)]
pub struct LanguageConfig {
    pub language: String,
    pub inventory: TagInventory,
    pub ordering: TagOrdering,
}

impl LanguageConfig {
    /// UniMorph inventory and the default dimension ordering.
    pub fn new(language: impl Into<String>) -> Self {
        LanguageConfig {
            language: language.into(),
            inventory: TagInventory::UniMorph,
            ordering: TagOrdering::default(),
        }
    }

    /// Accepts any well-formed tag.
    pub fn permissive(language: impl Into<String>) -> Self {
        LanguageConfig {
            inventory: TagInventory::Any,
            ..LanguageConfig::new(language)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub rejections: Vec<Rejection>,
    /// Lines that repeated an earlier triple exactly.
    pub duplicates: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusSummary {
    pub n_lemmas: usize,
    pub n_feature_sets: usize,
    pub n_triples: usize,
}

/// Deduplicated triples in canonical order: (lemma, serialized features,
/// form), compared by code point.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub language: String,
    pub ordering: TagOrdering,
    pub inventory: TagInventory,
    triples: Vec<Triple>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language && self.triples == other.triples
    }
}

impl Corpus {
    /// Sorts and deduplicates. Returns the corpus and the number of
    /// duplicates removed.
    pub fn from_triples(config: &LanguageConfig, triples: Vec<Triple>) -> (Self, usize) {
        let mut corpus = Corpus {
            language: config.language.clone(),
            ordering: config.ordering.clone(),
            inventory: config.inventory.clone(),
            triples,
        };
        let removed = corpus.canonicalize();
        (corpus, removed)
    }

    pub fn empty(config: &LanguageConfig) -> Self {
        Corpus::from_triples(config, Vec::new()).0
    }

    fn canonicalize(&mut self) -> usize {
        let before = self.triples.len();
        self.triples
            .sort_by_cached_key(|t| (t.lemma.clone(), t.features.to_string(), t.form.clone()));
        self.triples.dedup_by(|a, b| {
            a.lemma == b.lemma && a.form == b.form && a.features.to_string() == b.features.to_string()
        });
        before - self.triples.len()
    }

    pub fn config(&self) -> LanguageConfig {
        LanguageConfig {
            language: self.language.clone(),
            inventory: self.inventory.clone(),
            ordering: self.ordering.clone(),
        }
    }

    /// New corpus with the same language settings.
    pub fn with_triples(&self, triples: Vec<Triple>) -> (Self, usize) {
        Corpus::from_triples(&self.config(), triples)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Keeps triples carrying `pos` itself or a compound tag headed by it.
    pub fn filter_pos(&self, pos: &str) -> Corpus {
        let triples = self
            .triples
            .iter()
            .filter(|t| t.features.tags().iter().any(|tag| tag.as_str() == pos || tag.head() == pos))
            .cloned()
            .collect();
        Corpus { triples, ..self.clone_settings() }
    }

    /// Drops triples whose lemma or form contains a space.
    pub fn exclude_multiword(&self) -> Corpus {
        let triples = self
            .triples
            .iter()
            .filter(|t| !t.lemma.contains(' ') && !t.form.contains(' '))
            .cloned()
            .collect();
        Corpus { triples, ..self.clone_settings() }
    }

    fn clone_settings(&self) -> Corpus {
        Corpus {
            language: self.language.clone(),
            ordering: self.ordering.clone(),
            inventory: self.inventory.clone(),
            triples: Vec::new(),
        }
    }

    pub fn summarize(&self) -> CorpusSummary {
        let lemmas: HashSet<&str> = self.triples.iter().map(|t| t.lemma.as_str()).collect();
        let sets: HashSet<&FeatureSet> = self.triples.iter().map(|t| &t.features).collect();
        CorpusSummary {
            n_lemmas: lemmas.len(),
            n_feature_sets: sets.len(),
            n_triples: self.triples.len(),
        }
    }

    /// Distinct feature sets, sorted by serialized string.
    pub fn feature_sets(&self) -> Vec<FeatureSet> {
        let map: BTreeMap<String, &FeatureSet> =
            self.triples.iter().map(|t| (t.features.to_string(), &t.features)).collect();
        map.into_values().cloned().collect()
    }

    /// Number of (lemma, features) cells realized by more than one form.
    pub fn overabundant_cells(&self) -> usize {
        let mut forms: BTreeMap<(&str, String), usize> = BTreeMap::new();
        for t in &self.triples {
            *forms.entry((&t.lemma, t.features.to_string())).or_default() += 1;
        }
        forms.values().filter(|&&n| n > 1).count()
    }

    pub fn keys(&self) -> HashSet<TripleKey> {
        self.triples.iter().map(Triple::key).collect()
    }

    /// Canonical corpus file: `#` header, then one sorted triple per line.
    pub fn serialize(&self) -> String {
        let s = self.summarize();
        let mut out = String::new();
        let _ = writeln!(out, "# language: {}", self.language);
        let _ = writeln!(out, "# lemmas: {}", s.n_lemmas);
        let _ = writeln!(out, "# feature_sets: {}", s.n_feature_sets);
        let _ = writeln!(out, "# triples: {}", s.n_triples);
        for t in &self.triples {
            out.push_str(&t.to_tsv());
            out.push('\n');
        }
        out
    }
}

/// Parse `lemma\tform\ttags` lines. Malformed lines become rejections; `#`
/// lines and blank lines are skipped.
pub fn parse_unimorph(text: &str, config: &LanguageConfig) -> ParseOutcome {
    let mut triples = Vec::new();
    let mut rejections = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_line(line, config) {
            Ok(t) => triples.push(t),
            Err(reason) => rejections.push(Rejection { line: idx + 1, reason }),
        }
    }
    let (corpus, duplicates) = Corpus::from_triples(config, triples);
    ParseOutcome {
        corpus,
        rejections,
        duplicates,
    }
}

fn parse_line(line: &str, config: &LanguageConfig) -> std::result::Result<Triple, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 3 {
        return Err(format!("expected 3 tab-separated columns, found {}", cols.len()));
    }
    let (lemma, form, tags) = (cols[0], cols[1], cols[2]);
    if lemma.is_empty() || form.is_empty() {
        return Err("empty lemma or form".into());
    }
    let mut parsed = Vec::new();
    for raw in tags.split(';') {
        let tag = FeatureTag::new(raw).map_err(|_| format!("malformed tag {raw:?}"))?;
        if !config.inventory.contains(&tag) {
            return Err(format!("tag {tag} not in {} inventory", config.language));
        }
        parsed.push(tag);
    }
    let features = config.ordering.feature_set(parsed).map_err(|e| e.to_string())?;
    Triple::new(lemma, form, features).map_err(|e| e.to_string())
}

/// Parse headerless 3-column split files (train, gold, predictions).
pub fn parse_triples(text: &str, ordering: &TagOrdering, context: &str) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let fail = |reason: String| Error::Format {
            context: context.to_string(),
            line: idx + 1,
            reason,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(fail(format!("expected 3 columns, found {}", cols.len())));
        }
        let features = ordering.parse(cols[2]).map_err(|e| fail(e.to_string()))?;
        out.push(Triple::new(cols[0], cols[1], features).map_err(|e| fail(e.to_string()))?);
    }
    Ok(out)
}

/// Parse 2-column (lemma, features) files.
pub fn parse_covered(text: &str, ordering: &TagOrdering, context: &str) -> Result<Vec<(String, FeatureSet)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let fail = |reason: String| Error::Format {
            context: context.to_string(),
            line: idx + 1,
            reason,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 || cols[0].is_empty() {
            return Err(fail(format!("expected 2 columns, found {}", cols.len())));
        }
        let features = ordering.parse(cols[1]).map_err(|e| fail(e.to_string()))?;
        out.push((cols[0].to_string(), features));
    }
    Ok(out)
}

/// Distinct lemmas in code-point order.
pub fn distinct_lemmas<'a, I: IntoIterator<Item = &'a Triple>>(triples: I) -> Vec<String> {
    let set: BTreeSet<&str> = triples.into_iter().map(|t| t.lemma.as_str()).collect();
    set.into_iter().map(str::to_string).collect()
}
