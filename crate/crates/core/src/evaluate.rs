//! Scoring of prediction files.
//!
//! Accuracy is exact string match. Every gold row falls in one OOV category
//! determined by whether its lemma and its feature set occur anywhere in the
//! training data (train and fine-tune together). Incorrect predictions can be
//! classified with an ordered error taxonomy; the first matching pattern
//! wins and the final `nonsense` pattern catches everything else.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Triple;
use crate::error::{Error, Result};
use crate::features::FeatureSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OovCategory {
    #[serde(rename = "noOOV")]
    NoOov,
    #[serde(rename = "lmOOV")]
    LemmaOov,
    #[serde(rename = "fsOOV")]
    FeaturesOov,
    #[serde(rename = "bothOOV")]
    BothOov,
}

impl OovCategory {
    pub const ALL: [OovCategory; 4] = [
        OovCategory::NoOov,
        OovCategory::LemmaOov,
        OovCategory::FeaturesOov,
        OovCategory::BothOov,
    ];

    pub fn from_flags(lemma_seen: bool, features_seen: bool) -> Self {
        match (lemma_seen, features_seen) {
            (true, true) => OovCategory::NoOov,
            (false, true) => OovCategory::LemmaOov,
            (true, false) => OovCategory::FeaturesOov,
            (false, false) => OovCategory::BothOov,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OovCategory::NoOov => "noOOV",
            OovCategory::LemmaOov => "lmOOV",
            OovCategory::FeaturesOov => "fsOOV",
            OovCategory::BothOov => "bothOOV",
        }
    }
}

impl fmt::Display for OovCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Lemmas and feature sets observed during training.
#[derive(Clone, Debug, Default)]
pub struct TrainingVocabulary {
    lemmas: HashSet<String>,
    feature_sets: HashSet<FeatureSet>,
}

impl TrainingVocabulary {
    pub fn new<'a, I: IntoIterator<Item = &'a Triple>>(train_plus_finetune: I) -> Self {
        let mut v = TrainingVocabulary::default();
        for t in train_plus_finetune {
            v.lemmas.insert(t.lemma.clone());
            v.feature_sets.insert(t.features.clone());
        }
        v
    }

    pub fn categorize(&self, lemma: &str, features: &FeatureSet) -> OovCategory {
        OovCategory::from_flags(self.lemmas.contains(lemma), self.feature_sets.contains(features))
    }
}

pub fn categorize_oov(test: &Triple, train_plus_finetune: &[Triple]) -> OovCategory {
    TrainingVocabulary::new(train_plus_finetune).categorize(&test.lemma, &test.features)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionRecord {
    pub lemma: String,
    pub predicted: String,
    pub features: FeatureSet,
}

impl From<Triple> for PredictionRecord {
    fn from(t: Triple) -> Self {
        PredictionRecord {
            lemma: t.lemma,
            predicted: t.form,
            features: t.features,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub n: usize,
    pub correct: usize,
    pub accuracy: Option<f64>,
}

impl CategoryScore {
    fn record(&mut self, ok: bool) {
        self.n += 1;
        self.correct += usize::from(ok);
    }

    fn finish(&mut self) {
        self.accuracy = (self.n > 0).then(|| self.correct as f64 / self.n as f64);
    }
}

/// Free-form labels carried through to aggregation and ANOVA tables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportLabels {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(default)]
    pub labels: ReportLabels,
    pub total: CategoryScore,
    pub categories: BTreeMap<OovCategory, CategoryScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taxa: Option<TaxonCounts>,
}

impl EvalReport {
    pub fn accuracy(&self) -> Option<f64> {
        self.total.accuracy
    }

    /// Summary table: one row, percent accuracy per category.
    pub fn table(&self, system: &str) -> String {
        let mut out = String::from("System\tnoOOV\tlmOOV\tfsOOV\tbothOOV\tTotal\n");
        out.push_str(system);
        for cat in OovCategory::ALL {
            out.push('\t');
            out.push_str(&fmt_pct(self.categories.get(&cat).and_then(|c| c.accuracy)));
        }
        out.push('\t');
        out.push_str(&fmt_pct(self.total.accuracy));
        out.push('\n');
        if let Some(taxa) = &self.taxa {
            out.push_str(&format!("\ncorrect\t{}\n", taxa.correct));
            for (taxon, n) in &taxa.counts {
                out.push_str(&format!("{taxon}\t{n}\n"));
            }
        }
        out
    }
}

fn fmt_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |a| format!("{:.2}%", a * 100.0))
}

fn check_alignment(predictions: &[PredictionRecord], gold: &[Triple]) -> Result<()> {
    if predictions.len() != gold.len() {
        return Err(Error::Misaligned {
            row: predictions.len().min(gold.len()) + 1,
            reason: format!("{} predictions for {} gold rows", predictions.len(), gold.len()),
        });
    }
    for (i, (p, g)) in predictions.iter().zip(gold).enumerate() {
        if p.lemma != g.lemma || p.features != g.features {
            return Err(Error::Misaligned {
                row: i + 1,
                reason: format!(
                    "prediction ({}, {}) vs gold ({}, {})",
                    p.lemma, p.features, g.lemma, g.features
                ),
            });
        }
    }
    Ok(())
}

pub fn evaluate(predictions: &[PredictionRecord], gold: &[Triple], train_plus_finetune: &[Triple]) -> Result<EvalReport> {
    check_alignment(predictions, gold)?;
    let vocab = TrainingVocabulary::new(train_plus_finetune);
    let mut report = EvalReport::default();
    for cat in OovCategory::ALL {
        report.categories.insert(cat, CategoryScore::default());
    }
    for (p, g) in predictions.iter().zip(gold) {
        let ok = p.predicted == g.form;
        report.total.record(ok);
        let cat = vocab.categorize(&g.lemma, &g.features);
        report.categories.get_mut(&cat).expect("all categories present").record(ok);
    }
    report.total.finish();
    report.categories.values_mut().for_each(CategoryScore::finish);
    Ok(report)
}

/// How an error pattern recognizes a prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "match", rename_all = "kebab-case")]
pub enum Matcher {
    /// Templates over `{lemma}`, `{lemma-N}`, `{gold}`, `{gold-N}`, optional
    /// literals `(x)` and alternations `[a|b]`.
    Template { templates: Vec<String> },
    /// Prediction equals gold with one occurrence of `from` replaced by `to`.
    SubstituteOne { pairs: Vec<(String, String)> },
    /// Prediction equals gold once acute accents and diaereses are removed.
    AccentOnly,
    /// Gold is `prefix + rest`; prediction is a different prefix + rest.
    PrefixSwap { prefixes: Vec<String> },
    /// Gold is `prefix + infix + rest`; prediction swaps the infix.
    InfixSwap { prefixes: Vec<String>, infixes: Vec<String> },
    /// Gold is `prefix + infix + rest`; prediction is `prefix + rest`.
    InfixDrop { prefixes: Vec<String>, infixes: Vec<String> },
    Any,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPattern {
    pub taxon: String,
    #[serde(flatten)]
    pub matcher: Matcher,
}

pub const NONSENSE: &str = "nonsense";

impl ErrorPattern {
    pub fn new(taxon: &str, matcher: Matcher) -> Self {
        ErrorPattern {
            taxon: taxon.to_string(),
            matcher,
        }
    }

    pub fn nonsense() -> Self {
        ErrorPattern::new(NONSENSE, Matcher::Any)
    }

    pub fn matches(&self, lemma: &str, gold: &str, predicted: &str) -> bool {
        match &self.matcher {
            Matcher::Any => true,
            Matcher::Template { templates } => templates
                .iter()
                .any(|t| expand_template(t, lemma, gold).iter().any(|s| s == predicted)),
            Matcher::SubstituteOne { pairs } => pairs.iter().any(|(from, to)| {
                gold.match_indices(from.as_str())
                    .any(|(i, _)| format!("{}{}{}", &gold[..i], to, &gold[i + from.len()..]) == predicted)
            }),
            Matcher::AccentOnly => predicted != gold && strip_accents(predicted) == strip_accents(gold),
            Matcher::PrefixSwap { prefixes } => prefixes.iter().any(|p| {
                gold.strip_prefix(p.as_str()).is_some_and(|rest| {
                    prefixes
                        .iter()
                        .any(|q| q != p && predicted.strip_prefix(q.as_str()) == Some(rest))
                })
            }),
            Matcher::InfixSwap { prefixes, infixes } => slot_decompositions(gold, prefixes, infixes).any(|(p, t, rest)| {
                infixes.iter().any(|u| u != t && predicted == format!("{p}{u}{rest}"))
            }),
            Matcher::InfixDrop { prefixes, infixes } => {
                slot_decompositions(gold, prefixes, infixes).any(|(p, _, rest)| predicted == format!("{p}{rest}"))
            }
        }
    }
}

fn slot_decompositions<'a>(
    word: &'a str,
    prefixes: &'a [String],
    infixes: &'a [String],
) -> impl Iterator<Item = (&'a str, &'a str, &'a str)> + 'a {
    prefixes.iter().flat_map(move |p| {
        let after = word.strip_prefix(p.as_str());
        infixes.iter().filter_map(move |t| {
            let rest = after?.strip_prefix(t.as_str())?;
            Some((p.as_str(), t.as_str(), rest))
        })
    })
}

pub fn strip_accents(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            'á' | 'à' => 'a',
            'é' | 'è' => 'e',
            'í' | 'ì' => 'i',
            'ó' | 'ò' => 'o',
            'ú' | 'ù' | 'ü' => 'u',
            'Á' => 'A',
            'É' => 'E',
            'Í' => 'I',
            'Ó' => 'O',
            'Ú' | 'Ü' => 'U',
            other => other,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Literal(String),
    Word { gold: bool, trim: usize },
    Choice(Vec<String>),
}

fn parse_template(template: &str) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut literal = String::new();
    let mut chars = template.chars().peekable();
    let flush = |literal: &mut String, pieces: &mut Vec<Piece>| {
        if !literal.is_empty() {
            pieces.push(Piece::Literal(std::mem::take(literal)));
        }
    };
    while let Some(c) = chars.next() {
        let close = match c {
            '{' => '}',
            '(' => ')',
            '[' => ']',
            _ => {
                literal.push(c);
                continue;
            }
        };
        let body: String = chars.by_ref().take_while(|&x| x != close).collect();
        flush(&mut literal, &mut pieces);
        pieces.push(match c {
            '{' => {
                let (name, trim) = match body.split_once('-') {
                    Some((n, k)) => (n, k.parse().unwrap_or(0)),
                    None => (body.as_str(), 0),
                };
                Piece::Word { gold: name == "gold", trim }
            }
            '(' => Piece::Choice(vec![String::new(), body]),
            _ => Piece::Choice(body.split('|').map(str::to_string).collect()),
        });
    }
    flush(&mut literal, &mut pieces);
    pieces
}

/// All strings a template denotes for one (lemma, gold) pair.
pub fn expand_template(template: &str, lemma: &str, gold: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    for piece in parse_template(template) {
        let options: Vec<String> = match piece {
            Piece::Literal(s) => vec![s],
            Piece::Word { gold: g, trim } => {
                let word = if g { gold } else { lemma };
                let n = word.chars().count();
                if trim > n || (trim > 0 && trim == n) {
                    return Vec::new();
                }
                vec![word.chars().take(n - trim).collect()]
            }
            Piece::Choice(opts) => opts,
        };
        out = out
            .iter()
            .flat_map(|prefix| options.iter().map(move |o| format!("{prefix}{o}")))
            .collect();
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonCounts {
    pub correct: usize,
    /// Taxa in taxonomy order.
    pub counts: Vec<(String, usize)>,
}

impl TaxonCounts {
    pub fn total(&self) -> usize {
        self.correct + self.counts.iter().map(|(_, n)| n).sum::<usize>()
    }

    pub fn get(&self, taxon: &str) -> usize {
        self.counts.iter().find(|(t, _)| t == taxon).map_or(0, |(_, n)| *n)
    }
}

/// Count each incorrect prediction under its first matching taxon.
pub fn classify_errors(taxonomy: &[ErrorPattern], predictions: &[PredictionRecord], gold: &[Triple]) -> Result<TaxonCounts> {
    check_alignment(predictions, gold)?;
    let mut counts = TaxonCounts {
        correct: 0,
        counts: taxonomy.iter().map(|p| (p.taxon.clone(), 0)).collect(),
    };
    if !counts.counts.iter().any(|(t, _)| t == NONSENSE) {
        counts.counts.push((NONSENSE.to_string(), 0));
    }
    for (p, g) in predictions.iter().zip(gold) {
        if p.predicted == g.form {
            counts.correct += 1;
            continue;
        }
        let taxon = taxonomy
            .iter()
            .find(|pat| pat.matches(&g.lemma, &g.form, &p.predicted))
            .map_or(NONSENSE, |pat| pat.taxon.as_str());
        let slot = counts.counts.iter_mut().find(|(t, _)| t == taxon).expect("taxon listed");
        slot.1 += 1;
    }
    Ok(counts)
}

/// Mean and spread of one cell across seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub mean: Option<f64>,
    pub range: Option<f64>,
    pub seeds: usize,
}

impl CellSummary {
    fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return CellSummary {
                mean: None,
                range: None,
                seeds: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        CellSummary {
            mean: Some(mean),
            range: Some(max - min),
            seeds: values.len(),
        }
    }

    /// `45.00%` and `(10.00)`, in percentage points.
    pub fn formatted(&self) -> (String, String) {
        match (self.mean, self.range) {
            (Some(m), Some(r)) => (format!("{:.2}%", m * 100.0), format!("({:.2})", r * 100.0)),
            _ => ("-".into(), "(-)".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seeds: Vec<u64>,
    pub categories: BTreeMap<OovCategory, CellSummary>,
    pub total: CellSummary,
}

impl SeedSummary {
    pub fn table(&self, system: &str) -> String {
        let mut top = String::from(system);
        let mut bottom = String::new();
        for cell in OovCategory::ALL.iter().map(|c| &self.categories[c]).chain([&self.total]) {
            let (m, r) = cell.formatted();
            top.push('\t');
            top.push_str(&m);
            bottom.push('\t');
            bottom.push_str(&r);
        }
        format!("System\tnoOOV\tlmOOV\tfsOOV\tbothOOV\tTotal\n{top}\n{bottom}\n")
    }
}

/// Per-cell mean and max−min across seeds; empty cells are skipped.
pub fn aggregate_seeds(reports: &[(u64, EvalReport)]) -> Result<SeedSummary> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("no reports to aggregate".into()));
    }
    let mut categories = BTreeMap::new();
    for cat in OovCategory::ALL {
        let values: Vec<f64> = reports
            .iter()
            .filter_map(|(_, r)| r.categories.get(&cat).and_then(|c| c.accuracy))
            .collect();
        categories.insert(cat, CellSummary::from_values(&values));
    }
    let totals: Vec<f64> = reports.iter().filter_map(|(_, r)| r.total.accuracy).collect();
    Ok(SeedSummary {
        seeds: reports.iter().map(|(s, _)| *s).collect(),
        categories,
        total: CellSummary::from_values(&totals),
    })
}
