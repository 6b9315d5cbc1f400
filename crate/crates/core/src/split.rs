//! Seeded BLIND and PROBE splits, their rendering, and independent checks.
//!
//! All sampling starts from the corpus's canonical order and draws from a
//! single [`Rng`] seeded with the split seed, so a (corpus, sizes, seed,
//! probe) tuple always yields the same split.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{parse_covered, parse_triples, Corpus, Triple, TripleKey};
use crate::error::{Error, Result};
use crate::features::{FeatureSet, TagOrdering};
use crate::probes::{apply_partition, rename_triples, ProbeSpec, UnitKind};
use crate::rng::Rng;
use crate::transcribe::TranscriptionMap;

/// Accepted band for the realized fsOOV fraction of a BLIND test set.
pub const BLIND_OOV_RANGE: (f64, f64) = (0.45, 0.55);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub n_train: usize,
    pub n_finetune: usize,
    pub n_test: usize,
}

impl Default for SplitSizes {
    fn default() -> Self {
        SplitSizes {
            n_train: 1600,
            n_finetune: 400,
            n_test: 1000,
        }
    }
}

impl SplitSizes {
    pub fn new(n_train: usize, n_finetune: usize, n_test: usize) -> Result<Self> {
        if n_train == 0 || n_finetune == 0 || n_test == 0 {
            return Err(Error::InvalidArgument("split sizes must be positive".into()));
        }
        Ok(SplitSizes {
            n_train,
            n_finetune,
            n_test,
        })
    }

    pub fn n_learn(&self) -> usize {
        self.n_train + self.n_finetune
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitMetadata {
    pub language: String,
    /// `blind` or a probe name.
    pub mode: String,
    pub seed: u64,
    pub sizes: SplitSizes,
    pub n_train: usize,
    pub n_finetune: usize,
    pub n_test: usize,
    /// Share of test rows whose feature set is absent from train and fine-tune.
    pub fs_oov_fraction: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub held_out_feature_sets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_kind: Option<UnitKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub train_units: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub test_units: Vec<String>,
    /// Relevant triples that ended up in train or fine-tune.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant_in_train: Option<usize>,
    /// Test rows drawn before irrelevant ones were discarded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_sampled: Option<usize>,
}

impl SplitMetadata {
    pub fn is_blind(&self) -> bool {
        self.mode == "blind"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataSplit {
    pub train: Vec<Triple>,
    pub finetune: Vec<Triple>,
    pub test: Vec<Triple>,
    pub metadata: SplitMetadata,
}

pub fn fs_oov_fraction(train: &[Triple], finetune: &[Triple], test: &[Triple]) -> f64 {
    if test.is_empty() {
        return 0.0;
    }
    let seen: HashSet<&FeatureSet> = train.iter().chain(finetune).map(|t| &t.features).collect();
    test.iter().filter(|t| !seen.contains(&t.features)).count() as f64 / test.len() as f64
}

fn base_metadata(language: &str, mode: &str, seed: u64, sizes: SplitSizes, split: (&[Triple], &[Triple], &[Triple])) -> SplitMetadata {
    let (train, finetune, test) = split;
    SplitMetadata {
        language: language.to_string(),
        mode: mode.to_string(),
        seed,
        sizes,
        n_train: train.len(),
        n_finetune: finetune.len(),
        n_test: test.len(),
        fs_oov_fraction: fs_oov_fraction(train, finetune, test),
        held_out_feature_sets: Vec::new(),
        unit_kind: None,
        train_units: Vec::new(),
        test_units: Vec::new(),
        relevant_in_train: None,
        test_sampled: None,
    }
}

/// Language-independent split with roughly half the test rows carrying a
/// feature set never seen in training.
pub fn blind_split(corpus: &Corpus, sizes: SplitSizes, seed: u64) -> Result<DataSplit> {
    let needed = sizes.n_learn() + sizes.n_test;
    if corpus.len() < needed {
        return Err(Error::InsufficientData(format!(
            "corpus has {} triples, split needs {needed}",
            corpus.len()
        )));
    }
    let mut counts: HashMap<&FeatureSet, usize> = HashMap::new();
    for t in corpus.triples() {
        *counts.entry(&t.features).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "corpus has {} feature set(s); holding one out needs at least 2",
            counts.len()
        )));
    }
    let mut feature_sets: Vec<&FeatureSet> = counts.keys().copied().collect();
    feature_sets.sort_by_cached_key(|f| f.to_string());

    let mut rng = Rng::new(seed);
    rng.shuffle(&mut feature_sets);

    let from_held_out = sizes.n_test / 2;
    let outside_needed = sizes.n_learn() + (sizes.n_test - from_held_out);
    let mut held_out: HashSet<&FeatureSet> = HashSet::new();
    let mut held_triples = 0;
    let mut outside = corpus.len();
    for fs in feature_sets {
        if held_triples >= from_held_out {
            break;
        }
        let n = counts[fs];
        if outside - n < outside_needed {
            continue;
        }
        held_out.insert(fs);
        held_triples += n;
        outside -= n;
    }
    if held_triples < from_held_out {
        return Err(Error::Constraint(format!(
            "held-out feature sets cover {held_triples} triples, {from_held_out} needed while keeping {outside_needed} outside"
        )));
    }

    let (mut pool_h, mut pool_out): (Vec<&Triple>, Vec<&Triple>) =
        corpus.triples().iter().partition(|t| held_out.contains(&t.features));
    rng.shuffle(&mut pool_out);
    let mut rest_out = pool_out.split_off(sizes.n_learn());
    let finetune: Vec<Triple> = pool_out.split_off(sizes.n_train).into_iter().cloned().collect();
    let train: Vec<Triple> = pool_out.into_iter().cloned().collect();

    rng.shuffle(&mut pool_h);
    pool_h.truncate(from_held_out);
    rest_out.truncate(sizes.n_test - from_held_out);
    let mut test: Vec<Triple> = pool_h.into_iter().chain(rest_out).cloned().collect();
    rng.shuffle(&mut test);

    let mut metadata = base_metadata(&corpus.language, "blind", seed, sizes, (&train, &finetune, &test));
    let (lo, hi) = BLIND_OOV_RANGE;
    if !(lo..=hi).contains(&metadata.fs_oov_fraction) {
        return Err(Error::Constraint(format!(
            "realized fsOOV fraction {:.4} outside [{lo}, {hi}]",
            metadata.fs_oov_fraction
        )));
    }
    let mut held: Vec<String> = held_out.iter().map(|f| f.to_string()).collect();
    held.sort();
    metadata.held_out_feature_sets = held;
    Ok(DataSplit {
        train,
        finetune,
        test,
        metadata,
    })
}

/// Probe split: relevant material is partitioned into trainable and
/// test-only units, training is padded with irrelevant triples, and only
/// relevant rows are kept for test.
pub fn probe_split(corpus: &Corpus, probe: &ProbeSpec, sizes: SplitSizes, seed: u64) -> Result<DataSplit> {
    probe.check_language(&corpus.language)?;
    let prepared = probe.prepare_corpus(corpus)?;
    let relevant: Vec<Triple> = prepared
        .triples()
        .iter()
        .filter(|t| probe.relevance.matches(t))
        .cloned()
        .collect();
    if relevant.is_empty() {
        return Err(Error::InsufficientData(format!("{}: no relevant triples in corpus", probe.name)));
    }
    let mut rng = Rng::new(seed);
    let partition = apply_partition(probe, &relevant, &mut rng)?;
    if partition.test_only.is_empty() {
        return Err(Error::InsufficientData(format!("{}: partition left nothing for test", probe.name)));
    }
    let train_allowed: HashSet<TripleKey> = partition.train_allowed.iter().map(Triple::key).collect();
    let test_only: HashSet<TripleKey> = partition.test_only.iter().map(Triple::key).collect();

    let mut pool: Vec<&Triple> = prepared
        .triples()
        .iter()
        .filter(|t| !probe.relevance.matches(t) || train_allowed.contains(&t.key()))
        .collect();
    if pool.len() < sizes.n_learn() {
        return Err(Error::InsufficientData(format!(
            "{}: training pool has {} triples, {} needed",
            probe.name,
            pool.len(),
            sizes.n_learn()
        )));
    }
    rng.shuffle(&mut pool);
    pool.truncate(sizes.n_learn());
    let used: HashSet<TripleKey> = pool.iter().map(|t| t.key()).collect();
    let finetune: Vec<Triple> = pool.split_off(sizes.n_train).into_iter().cloned().collect();
    let train: Vec<Triple> = pool.into_iter().cloned().collect();

    let mut test_pool: Vec<&Triple> = prepared
        .triples()
        .iter()
        .filter(|t| {
            let k = t.key();
            !used.contains(&k) && (!probe.relevance.matches(t) || test_only.contains(&k))
        })
        .collect();
    if test_pool.len() < sizes.n_test {
        return Err(Error::InsufficientData(format!(
            "{}: test pool has {} triples, {} needed",
            probe.name,
            test_pool.len(),
            sizes.n_test
        )));
    }
    rng.shuffle(&mut test_pool);
    test_pool.truncate(sizes.n_test);
    let test: Vec<Triple> = test_pool
        .into_iter()
        .filter(|t| probe.relevance.matches(t))
        .cloned()
        .collect();
    if test.is_empty() {
        return Err(Error::InsufficientData(format!("{}: no relevant triples sampled for test", probe.name)));
    }
    let relevant_in_train = train.iter().chain(&finetune).filter(|t| probe.relevance.matches(t)).count();

    let (train, finetune, test, train_units, test_units) = match probe.output_rewrite() {
        Some(table) => (
            rename_triples(&train, table, &prepared)?,
            rename_triples(&finetune, table, &prepared)?,
            rename_triples(&test, table, &prepared)?,
            rename_units(probe, &partition.train_units, table, &prepared)?,
            rename_units(probe, &partition.test_units, table, &prepared)?,
        ),
        None => (train, finetune, test, partition.train_units, partition.test_units),
    };
    let mut metadata = base_metadata(&corpus.language, &probe.name, seed, sizes, (&train, &finetune, &test));
    metadata.unit_kind = Some(probe.unit_kind());
    metadata.train_units = train_units;
    metadata.test_units = test_units;
    metadata.relevant_in_train = Some(relevant_in_train);
    metadata.test_sampled = Some(sizes.n_test);
    Ok(DataSplit {
        train,
        finetune,
        test,
        metadata,
    })
}

fn rename_units(
    probe: &ProbeSpec,
    units: &[String],
    table: &crate::normalize::TagRewriteTable,
    corpus: &Corpus,
) -> Result<Vec<String>> {
    if probe.unit_kind() == UnitKind::Lemma {
        return Ok(units.to_vec());
    }
    let mut out = Vec::with_capacity(units.len());
    for u in units {
        let fs = corpus.ordering.parse(u)?;
        let t = Triple::new("x", "x", fs)?;
        out.push(rename_triples(&[t], table, corpus)?.remove(0).features.to_string());
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Presentation {
    Orthography,
    Transcription,
}

impl Presentation {
    pub const BOTH: [Presentation; 2] = [Presentation::Orthography, Presentation::Transcription];

    pub fn dir_name(self) -> &'static str {
        match self {
            Presentation::Orthography => "orthography",
            Presentation::Transcription => "transcription",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "orthography" | "orth" => Ok(Presentation::Orthography),
            "transcription" | "trans" => Ok(Presentation::Transcription),
            other => Err(Error::InvalidArgument(format!("unknown presentation {other:?}"))),
        }
    }
}

pub const SPLIT_FILES: [&str; 4] = ["train.tsv", "finetune.tsv", "test_covered.tsv", "test_gold.tsv"];

/// One presentation of a split, as written to disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedSplit {
    pub train: Vec<Triple>,
    pub finetune: Vec<Triple>,
    pub test_covered: Vec<(String, FeatureSet)>,
    pub test_gold: Vec<Triple>,
}

fn tsv(triples: &[Triple]) -> String {
    triples.iter().map(|t| t.to_tsv() + "\n").collect()
}

impl RenderedSplit {
    /// File name and contents, in [`SPLIT_FILES`] order.
    pub fn files(&self) -> Vec<(&'static str, String)> {
        let covered: String = self.test_covered.iter().map(|(l, f)| format!("{l}\t{f}\n")).collect();
        vec![
            (SPLIT_FILES[0], tsv(&self.train)),
            (SPLIT_FILES[1], tsv(&self.finetune)),
            (SPLIT_FILES[2], covered),
            (SPLIT_FILES[3], tsv(&self.test_gold)),
        ]
    }

    pub fn read(dir: &Path, ordering: &TagOrdering) -> Result<Self> {
        let load = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
        };
        let ctx = |name: &str| dir.join(name).display().to_string();
        Ok(RenderedSplit {
            train: parse_triples(&load(SPLIT_FILES[0])?, ordering, &ctx(SPLIT_FILES[0]))?,
            finetune: parse_triples(&load(SPLIT_FILES[1])?, ordering, &ctx(SPLIT_FILES[1]))?,
            test_covered: parse_covered(&load(SPLIT_FILES[2])?, ordering, &ctx(SPLIT_FILES[2]))?,
            test_gold: parse_triples(&load(SPLIT_FILES[3])?, ordering, &ctx(SPLIT_FILES[3]))?,
        })
    }

    pub fn train_plus_finetune(&self) -> Vec<Triple> {
        self.train.iter().chain(&self.finetune).cloned().collect()
    }
}

/// Render a split in one presentation. Transcription needs a map covering
/// every triple; a gap means transcription was not applied before splitting.
pub fn render_split(split: &DataSplit, presentation: Presentation, map: Option<&TranscriptionMap>) -> Result<RenderedSplit> {
    let convert = |triples: &[Triple]| -> Result<Vec<Triple>> {
        match presentation {
            Presentation::Orthography => Ok(triples.to_vec()),
            Presentation::Transcription => triples
                .iter()
                .map(|t| {
                    let (lemma, form) = map.and_then(|m| m.get(&t.lemma, &t.form)).ok_or_else(|| Error::Untranscribable {
                        lemma: t.lemma.clone(),
                        form: t.form.clone(),
                    })?;
                    Ok(Triple {
                        lemma: lemma.clone(),
                        form: form.clone(),
                        features: t.features.clone(),
                    })
                })
                .collect(),
        }
    };
    let test_gold = convert(&split.test)?;
    Ok(RenderedSplit {
        train: convert(&split.train)?,
        finetune: convert(&split.finetune)?,
        test_covered: test_gold.iter().map(|t| (t.lemma.clone(), t.features.clone())).collect(),
        test_gold,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn text(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("[{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    }
}

/// Re-derive every split invariant from the orthographic files, the source
/// corpus and (for probe splits) the probe definition.
pub fn verify_split(files: &RenderedSplit, metadata: &SplitMetadata, corpus: &Corpus, probe: Option<&ProbeSpec>) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let sizes = metadata.sizes;
    let (train, ft, test) = (&files.train, &files.finetune, &files.test_gold);

    report.push(
        "train-size",
        train.len() == sizes.n_train,
        format!("{} rows, expected {}", train.len(), sizes.n_train),
    );
    report.push(
        "finetune-size",
        ft.len() == sizes.n_finetune,
        format!("{} rows, expected {}", ft.len(), sizes.n_finetune),
    );
    let test_ok = if metadata.is_blind() {
        test.len() == sizes.n_test
    } else {
        !test.is_empty() && test.len() <= sizes.n_test && test.len() == metadata.n_test
    };
    report.push("test-size", test_ok, format!("{} rows (requested {})", test.len(), sizes.n_test));

    let keys = |v: &[Triple]| v.iter().map(Triple::key).collect::<HashSet<_>>();
    let (k_train, k_ft, k_test) = (keys(train), keys(ft), keys(test));
    let overlaps = [
        ("train/finetune", k_train.intersection(&k_ft).count()),
        ("train/test", k_train.intersection(&k_test).count()),
        ("finetune/test", k_ft.intersection(&k_test).count()),
    ];
    let clashes: Vec<String> = overlaps.iter().filter(|(_, n)| *n > 0).map(|(w, n)| format!("{w}: {n}")).collect();
    let dup_rows = train.len() + ft.len() + test.len() - k_train.len() - k_ft.len() - k_test.len();
    report.push(
        "disjoint",
        clashes.is_empty() && dup_rows == 0,
        if clashes.is_empty() && dup_rows == 0 {
            "no shared triples".to_string()
        } else {
            format!("shared: [{}], duplicated rows: {dup_rows}", clashes.join(", "))
        },
    );

    let covered_ok = files.test_covered.len() == test.len()
        && files.test_covered.iter().zip(test).all(|((l, f), g)| *l == g.lemma && *f == g.features);
    report.push("covered-matches-gold", covered_ok, format!("{} covered rows", files.test_covered.len()));

    let source = match probe {
        Some(p) => {
            let prepared = p.prepare_corpus(corpus)?;
            match p.output_rewrite() {
                Some(table) => rename_triples(prepared.triples(), table, &prepared)?,
                None => prepared.triples().to_vec(),
            }
        }
        None => corpus.triples().to_vec(),
    };
    let source_keys: HashSet<TripleKey> = source.iter().map(Triple::key).collect();
    let foreign = train.iter().chain(ft).chain(test).filter(|t| !source_keys.contains(&t.key())).count();
    report.push("drawn-from-corpus", foreign == 0, format!("{foreign} rows not in corpus"));

    let fraction = fs_oov_fraction(train, ft, test);
    if metadata.is_blind() {
        let (lo, hi) = BLIND_OOV_RANGE;
        report.push(
            "fs-oov-fraction",
            (lo..=hi).contains(&fraction),
            format!("{fraction:.4} (accepted [{lo}, {hi}])"),
        );
    }
    report.push(
        "metadata-fraction",
        (fraction - metadata.fs_oov_fraction).abs() < 1e-12,
        format!("files {fraction:.4}, metadata {:.4}", metadata.fs_oov_fraction),
    );

    if let Some(p) = probe {
        verify_probe(&mut report, p, metadata, corpus, files)?;
    }
    Ok(report)
}

fn verify_probe(report: &mut VerificationReport, probe: &ProbeSpec, metadata: &SplitMetadata, corpus: &Corpus, files: &RenderedSplit) -> Result<()> {
    report.push(
        "language",
        probe.language == corpus.language && probe.name == metadata.mode,
        format!("probe {} ({}) on {} corpus", probe.name, probe.language, corpus.language),
    );
    // Relevance is judged on the triples before any output renaming.
    let prepared = probe.prepare_corpus(corpus)?;
    let mut relevant: Vec<Triple> = prepared.triples().iter().filter(|t| probe.relevance.matches(t)).cloned().collect();
    if let Some(table) = probe.output_rewrite() {
        relevant = rename_triples(&relevant, table, &prepared)?;
    }
    let relevant_keys: HashSet<TripleKey> = relevant.iter().map(Triple::key).collect();
    let test = &files.test_gold;
    let irrelevant = test.iter().filter(|t| !relevant_keys.contains(&t.key())).count();
    report.push("test-relevant", irrelevant == 0, format!("{irrelevant} irrelevant test rows"));

    let learn: Vec<&Triple> = files.train.iter().chain(&files.finetune).collect();
    let mut train_units: HashSet<String> = learn
        .iter()
        .filter(|t| relevant_keys.contains(&t.key()))
        .map(|t| probe.unit_of(t))
        .collect();
    train_units.extend(metadata.train_units.iter().cloned());
    let mut test_units: HashSet<String> = test.iter().map(|t| probe.unit_of(t)).collect();
    test_units.extend(metadata.test_units.iter().cloned());
    let mut shared: Vec<&String> = train_units.intersection(&test_units).collect();
    shared.sort();
    report.push(
        "probe-exclusivity",
        shared.is_empty(),
        if shared.is_empty() {
            format!("{} train-only and {} test-only units", train_units.len(), test_units.len())
        } else {
            format!("shared units: {}", shared.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "))
        },
    );
    let in_train = learn.iter().filter(|t| relevant_keys.contains(&t.key())).count();
    if let Some(expected) = metadata.relevant_in_train {
        report.push(
            "relevant-in-train",
            in_train == expected,
            format!("{in_train} relevant rows in train+finetune, metadata {expected}"),
        );
    }
    Ok(())
}

/// Line-level agreement of two presentations: same (lemma, features)
/// identities row by row, once each lemma is mapped across presentations.
pub fn check_parallel(orth: &RenderedSplit, trans: &RenderedSplit, map: &TranscriptionMap) -> Check {
    let pairs = [
        ("train", &orth.train, &trans.train),
        ("finetune", &orth.finetune, &trans.finetune),
        ("test_gold", &orth.test_gold, &trans.test_gold),
    ];
    for (name, a, b) in pairs {
        if a.len() != b.len() {
            return Check {
                name: "parallel-presentations".into(),
                passed: false,
                detail: format!("{name}: {} vs {} rows", a.len(), b.len()),
            };
        }
        for (i, (x, y)) in a.iter().zip(b.iter()).enumerate() {
            let mapped = map.get(&x.lemma, &x.form);
            let ok = x.features == y.features && mapped.is_some_and(|(l, f)| *l == y.lemma && *f == y.form);
            if !ok {
                return Check {
                    name: "parallel-presentations".into(),
                    passed: false,
                    detail: format!("{name} row {}: {} vs {}", i + 1, x.to_tsv(), y.to_tsv()),
                };
            }
        }
    }
    let same_covered = orth.test_covered.len() == trans.test_covered.len();
    Check {
        name: "parallel-presentations".into(),
        passed: same_covered,
        detail: format!("{} / {} / {} rows", orth.train.len(), orth.finetune.len(), orth.test_gold.len()),
    }
}

/// Counts of how often each test unit occurs, handy for reports.
pub fn unit_counts(probe: &ProbeSpec, triples: &[Triple]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for t in triples {
        *out.entry(probe.unit_of(t)).or_default() += 1;
    }
    out
}
