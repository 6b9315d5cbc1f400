//! Language-specific probes: which triples are relevant, which of them may
//! be trained on, and how errors on them are classified.
//!
//! Probes are declarative and round-trip through JSON. The built-in catalog
//! is compiled in and also shipped as `data/probes.json`.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Triple};
use crate::error::{Error, Result};
use crate::evaluate::{ErrorPattern, Matcher, NONSENSE};
use crate::features::{FeatureSet, TagInventory};
use crate::normalize::{canonicalize_feature_set, Canonical, TagRewriteTable};
use crate::rng::Rng;

pub const CATALOG_JSON: &str = include_str!("../data/probes.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RelevancePredicate {
    FeatureContainsAll {
        tags: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        excluding: Vec<String>,
    },
    FeatureContainsExactSet { tags: Vec<String> },
    LemmaSuffixIn { suffixes: Vec<String> },
    AnyOf { predicates: Vec<RelevancePredicate> },
}

impl RelevancePredicate {
    pub fn contains_all(tags: &[&str]) -> Self {
        RelevancePredicate::FeatureContainsAll {
            tags: strings(tags),
            excluding: Vec::new(),
        }
    }

    pub fn matches(&self, triple: &Triple) -> bool {
        match self {
            RelevancePredicate::FeatureContainsAll { tags, excluding } => {
                triple.features.contains_all(tags) && !excluding.iter().any(|t| triple.features.contains(t))
            }
            RelevancePredicate::FeatureContainsExactSet { tags } => {
                let wanted: BTreeSet<&str> = tags.iter().map(String::as_str).collect();
                let have: BTreeSet<&str> = triple.features.tags().iter().map(|t| t.as_str()).collect();
                wanted == have
            }
            RelevancePredicate::LemmaSuffixIn { suffixes } => suffixes.iter().any(|s| triple.lemma.ends_with(s.as_str())),
            RelevancePredicate::AnyOf { predicates } => predicates.iter().any(|p| p.matches(triple)),
        }
    }

    pub fn is_lemma_based(&self) -> bool {
        match self {
            RelevancePredicate::LemmaSuffixIn { .. } => true,
            RelevancePredicate::AnyOf { predicates } => !predicates.is_empty() && predicates.iter().all(Self::is_lemma_based),
            _ => false,
        }
    }

    fn validate(&self) -> Result<()> {
        let empty = match self {
            RelevancePredicate::FeatureContainsAll { tags, .. } | RelevancePredicate::FeatureContainsExactSet { tags } => tags.is_empty(),
            RelevancePredicate::LemmaSuffixIn { suffixes } => suffixes.is_empty() || suffixes.iter().any(String::is_empty),
            RelevancePredicate::AnyOf { predicates } => {
                predicates.iter().try_for_each(Self::validate)?;
                predicates.is_empty()
            }
        };
        if empty {
            return Err(Error::Probe("relevance predicate with empty payload".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionGroup {
    pub predicate: RelevancePredicate,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PartitionRule {
    ExcludeAll,
    KRandomFeatureSets { k: usize },
    GroupedKRandom { groups: Vec<PartitionGroup> },
    KRandomLemmas { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewriteStage {
    /// Rewrite the corpus, then partition on the rewritten tags.
    BeforePartition,
    /// Build the split on the original tags, then rename in the output.
    AfterSplit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRewrite {
    pub stage: RewriteStage,
    pub table: TagRewriteTable,
}

/// Granularity at which a probe withholds material from training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitKind {
    FeatureSet,
    Lemma,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub name: String,
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewrite: Option<ProbeRewrite>,
    pub relevance: RelevancePredicate,
    pub partition: PartitionRule,
    pub taxonomy: Vec<ErrorPattern>,
}

impl ProbeSpec {
    pub fn unit_kind(&self) -> UnitKind {
        if self.relevance.is_lemma_based() || matches!(self.partition, PartitionRule::KRandomLemmas { .. }) {
            UnitKind::Lemma
        } else {
            UnitKind::FeatureSet
        }
    }

    pub fn unit_of(&self, triple: &Triple) -> String {
        match self.unit_kind() {
            UnitKind::Lemma => triple.lemma.clone(),
            UnitKind::FeatureSet => triple.features.to_string(),
        }
    }

    pub fn check_language(&self, language: &str) -> Result<()> {
        if self.language != language {
            return Err(Error::LanguageMismatch {
                probe: self.name.clone(),
                expected: self.language.clone(),
                actual: language.to_string(),
            });
        }
        Ok(())
    }

    fn rewrite_at(&self, stage: RewriteStage) -> Option<&TagRewriteTable> {
        self.rewrite.as_ref().filter(|r| r.stage == stage).map(|r| &r.table)
    }

    /// The corpus a split is drawn from: rewritten when the probe asks for it
    /// before partitioning, otherwise unchanged.
    pub fn prepare_corpus(&self, corpus: &Corpus) -> Result<Corpus> {
        match self.rewrite_at(RewriteStage::BeforePartition) {
            Some(table) => Ok(corpus.with_triples(rename_triples(corpus.triples(), table, corpus)?).0),
            None => Ok(corpus.clone()),
        }
    }

    /// Tag renaming applied to finished split files.
    pub fn output_rewrite(&self) -> Option<&TagRewriteTable> {
        self.rewrite_at(RewriteStage::AfterSplit)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.language.is_empty() {
            return Err(Error::Probe("probe needs a name and a language".into()));
        }
        self.relevance.validate()?;
        let ks: Vec<usize> = match &self.partition {
            PartitionRule::ExcludeAll => vec![],
            PartitionRule::KRandomFeatureSets { k } | PartitionRule::KRandomLemmas { k } => vec![*k],
            PartitionRule::GroupedKRandom { groups } => {
                groups.iter().try_for_each(|g| g.predicate.validate())?;
                if groups.is_empty() {
                    return Err(Error::Probe(format!("{}: grouped partition without groups", self.name)));
                }
                groups.iter().map(|g| g.k).collect()
            }
        };
        if ks.contains(&0) {
            return Err(Error::Probe(format!("{}: partition k must be at least 1", self.name)));
        }
        match self.taxonomy.last() {
            Some(p) if p.taxon == NONSENSE && p.matcher == Matcher::Any => Ok(()),
            _ => Err(Error::Probe(format!("{}: taxonomy must end with the nonsense catch-all", self.name))),
        }
    }
}

/// Rewrite feature tags of each triple; the result is not re-sorted.
pub fn rename_triples(triples: &[Triple], table: &TagRewriteTable, corpus: &Corpus) -> Result<Vec<Triple>> {
    triples
        .iter()
        .map(|t| match canonicalize_feature_set(t.features.tags(), table, &TagInventory::Any, &corpus.ordering)? {
            Canonical::Set(features) => Ok(Triple { features, ..t.clone() }),
            Canonical::Unmappable(reason) => Err(Error::Probe(format!("rewrite dropped {}: {reason}", t.to_tsv()))),
        })
        .collect()
}

pub fn evaluate_relevance(probe: &ProbeSpec, triple: &Triple) -> bool {
    probe.relevance.matches(triple)
}

/// Result of splitting the relevant triples into trainable and test-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub train_allowed: Vec<Triple>,
    pub test_only: Vec<Triple>,
    /// Units (feature sets or lemmas) allowed in training, sorted.
    pub train_units: Vec<String>,
    /// Units reserved for test, sorted.
    pub test_units: Vec<String>,
}

fn distinct_sorted<'a, I: IntoIterator<Item = &'a Triple>>(triples: I, unit: impl Fn(&Triple) -> String) -> Vec<String> {
    triples.into_iter().map(unit).collect::<BTreeSet<_>>().into_iter().collect()
}

fn choose_k(mut candidates: Vec<String>, k: usize, rng: &mut Rng, what: &str) -> Result<Vec<String>> {
    if candidates.len() < k {
        return Err(Error::InsufficientData(format!(
            "{what}: {} candidates, {k} required",
            candidates.len()
        )));
    }
    rng.shuffle(&mut candidates);
    candidates.truncate(k);
    Ok(candidates)
}

pub fn apply_partition(probe: &ProbeSpec, relevant: &[Triple], rng: &mut Rng) -> Result<Partition> {
    if relevant.is_empty() {
        return Err(Error::InsufficientData(format!("{}: no relevant triples", probe.name)));
    }
    let unit = |t: &Triple| probe.unit_of(t);
    let allowed: HashSet<String> = match &probe.partition {
        PartitionRule::ExcludeAll => HashSet::new(),
        PartitionRule::KRandomFeatureSets { k } | PartitionRule::KRandomLemmas { k } => {
            choose_k(distinct_sorted(relevant, unit), *k, rng, &probe.name)?.into_iter().collect()
        }
        PartitionRule::GroupedKRandom { groups } => {
            let mut seen: HashSet<String> = HashSet::new();
            let mut allowed = HashSet::new();
            for (i, group) in groups.iter().enumerate() {
                let members = distinct_sorted(relevant.iter().filter(|t| group.predicate.matches(t)), unit);
                if let Some(dup) = members.iter().find(|m| seen.contains(*m)) {
                    return Err(Error::Probe(format!("{}: {dup} belongs to more than one group", probe.name)));
                }
                seen.extend(members.iter().cloned());
                allowed.extend(choose_k(members, group.k, rng, &format!("{} group {}", probe.name, i + 1))?);
            }
            allowed
        }
    };
    let (train_allowed, test_only): (Vec<Triple>, Vec<Triple>) =
        relevant.iter().cloned().partition(|t| allowed.contains(&unit(t)));
    Ok(Partition {
        train_units: distinct_sorted(&train_allowed, unit),
        test_units: distinct_sorted(&test_only, unit),
        train_allowed,
        test_only,
    })
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn template(taxon: &str, templates: &[&str]) -> ErrorPattern {
    ErrorPattern::new(taxon, Matcher::Template { templates: strings(templates) })
}

pub fn english_taxonomy() -> Vec<ErrorPattern> {
    vec![
        template("bare-lemma", &["{lemma}"]),
        template("ing", &["{lemma}ing", "{lemma-1}ing", "{lemma}ɪŋ"]),
        template("ed", &["{lemma}(e)d", "{lemma-1}ied", "{lemma}[d|t|ɪd|əd]"]),
        template("es", &["{lemma}(e)s", "{lemma-1}ies", "{lemma}[s|z|ɪz|əz]"]),
        ErrorPattern::nonsense(),
    ]
}

pub fn spanish_taxonomy() -> Vec<ErrorPattern> {
    let sub = |taxon: &str, pairs: &[(&str, &str)]| {
        ErrorPattern::new(
            taxon,
            Matcher::SubstituteOne {
                pairs: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            },
        )
    };
    vec![
        sub("er-form", &[("a", "e"), ("i", "e")]),
        sub("a-for-e", &[("e", "a")]),
        sub("i-for-e", &[("e", "i")]),
        ErrorPattern::new("stress-only", Matcher::AccentOnly),
        ErrorPattern::nonsense(),
    ]
}

pub fn swahili_taxonomy() -> Vec<ErrorPattern> {
    let prefixes = strings(&["ni", "u", "a", "tu", "m", "wa"]);
    let infixes = strings(&["ta", "li", "me", "mɛ", "na"]);
    vec![
        ErrorPattern::new("wrong-person-prefix", Matcher::PrefixSwap { prefixes: prefixes.clone() }),
        ErrorPattern::new(
            "wrong-tense-infix",
            Matcher::InfixSwap {
                prefixes: prefixes.clone(),
                infixes: infixes.clone(),
            },
        ),
        ErrorPattern::new("missing-tense-infix", Matcher::InfixDrop { prefixes, infixes }),
        ErrorPattern::nonsense(),
    ]
}

fn probe(name: &str, language: &str, relevance: RelevancePredicate, partition: PartitionRule) -> ProbeSpec {
    let taxonomy = match language {
        "en" => english_taxonomy(),
        "es" => spanish_taxonomy(),
        _ => swahili_taxonomy(),
    };
    ProbeSpec {
        name: name.into(),
        language: language.into(),
        rewrite: None,
        relevance,
        partition,
        taxonomy,
    }
}

fn nfin_to_prs(stage: RewriteStage) -> Option<ProbeRewrite> {
    let table = TagRewriteTable::new([("NFIN".to_string(), "PRS".to_string())], []).expect("valid table");
    Some(ProbeRewrite { stage, table })
}

fn grouped(groups: &[&[&str]], k: usize) -> (RelevancePredicate, PartitionRule) {
    let preds: Vec<RelevancePredicate> = groups.iter().map(|g| RelevancePredicate::contains_all(g)).collect();
    (
        RelevancePredicate::AnyOf { predicates: preds.clone() },
        PartitionRule::GroupedKRandom {
            groups: preds.into_iter().map(|predicate| PartitionGroup { predicate, k }).collect(),
        },
    )
}

/// The thirteen probes, in catalog order.
pub fn builtin_probes() -> Vec<ProbeSpec> {
    use PartitionRule::*;
    use RelevancePredicate as R;
    let k2 = KRandomFeatureSets { k: 2 };
    let en_nfin = probe("en-NFIN", "en", R::contains_all(&["NFIN"]), ExcludeAll);
    let en_prs = ProbeSpec {
        name: "en-PRS".into(),
        rewrite: nfin_to_prs(RewriteStage::AfterSplit),
        ..en_nfin.clone()
    };
    let en_prs3sg = ProbeSpec {
        rewrite: nfin_to_prs(RewriteStage::BeforePartition),
        ..probe(
            "en-PRS3SG",
            "en",
            R::FeatureContainsExactSet { tags: strings(&["V", "PRS", "3", "SG"]) },
            ExcludeAll,
        )
    };
    let (aggl_rel, aggl_part) = grouped(&[&["COND"], &["IND", "PST", "IPFV"], &["IND", "FUT"]], 2);
    let (non3_rel, non3_part) = grouped(&[&["1", "SG"], &["1", "PL"], &["2", "SG"], &["2", "PL"]], 1);
    vec![
        en_nfin,
        en_prs,
        en_prs3sg,
        probe("es-FUT", "es", R::contains_all(&["IND", "FUT"]), k2.clone()),
        probe("es-AGGL", "es", aggl_rel, aggl_part),
        probe("es-PSTPFV", "es", R::contains_all(&["IND", "PST", "PFV"]), k2.clone()),
        probe("es-IR", "es", R::LemmaSuffixIn { suffixes: strings(&["ir"]) }, KRandomLemmas { k: 50 }),
        probe("es-IRAR", "es", R::LemmaSuffixIn { suffixes: strings(&["ir", "ar"]) }, ExcludeAll),
        probe("sw-1PL", "sw", R::contains_all(&["1", "PL"]), k2.clone()),
        probe("sw-NON3", "sw", non3_rel, non3_part),
        probe("sw-FUT", "sw", R::contains_all(&["FUT"]), k2.clone()),
        probe(
            "sw-PST",
            "sw",
            R::FeatureContainsAll {
                tags: strings(&["PST"]),
                excluding: strings(&["PFV"]),
            },
            k2.clone(),
        ),
        probe("sw-PSTPFV", "sw", R::contains_all(&["PST", "PFV"]), k2),
    ]
}

pub fn find_probe<'a>(catalog: &'a [ProbeSpec], name: &str) -> Result<&'a ProbeSpec> {
    catalog
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown probe {name:?}")))
}

pub fn parse_catalog(json: &str) -> Result<Vec<ProbeSpec>> {
    let probes: Vec<ProbeSpec> = serde_json::from_str(json)?;
    let mut names = HashSet::new();
    for p in &probes {
        p.validate()?;
        if !names.insert(p.name.as_str()) {
            return Err(Error::Probe(format!("duplicate probe name {}", p.name)));
        }
    }
    Ok(probes)
}

pub fn serialize_catalog(probes: &[ProbeSpec]) -> String {
    let mut s = serde_json::to_string_pretty(probes).expect("probe specs serialize");
    s.push('\n');
    s
}

/// Feature sets present in the corpus that a probe deems relevant.
pub fn relevant_feature_sets(probe: &ProbeSpec, corpus: &Corpus) -> Vec<FeatureSet> {
    let mut out: Vec<FeatureSet> = corpus
        .triples()
        .iter()
        .filter(|t| probe.relevance.matches(t))
        .map(|t| t.features.clone())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    out.sort();
    out
}
