//! Tag rewriting and feature-set canonicalization.
//!
//! Rewrite tables are data: a TSV of `MAP\tFROM\tTO` and `DROP\tTAG` lines.
//! The shipped Swahili table folds `PRF` into `PFV`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Triple};
use crate::error::{Error, Result};
use crate::features::{FeatureSet, FeatureTag, TagInventory, TagOrdering};

pub const SWAHILI_TABLE: &str = include_str!("../data/rewrite/sw.tsv");

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct TagRewriteTable {
    mappings: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    drop: BTreeSet<String>,
}

#[derive(Deserialize)]
struct RawTable {
    mappings: BTreeMap<String, String>,
    #[serde(default)]
    drop: BTreeSet<String>,
}

impl TryFrom<RawTable> for TagRewriteTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        TagRewriteTable::new(raw.mappings, raw.drop)
    }
}

impl TagRewriteTable {
    pub fn new<M, D>(mappings: M, drop: D) -> Result<Self>
    where
        M: IntoIterator<Item = (String, String)>,
        D: IntoIterator<Item = String>,
    {
        let mut table = TagRewriteTable::default();
        for (from, to) in mappings {
            table.insert(from, to)?;
        }
        table.drop = drop.into_iter().collect();
        table.validate()?;
        Ok(table)
    }

    fn insert(&mut self, from: String, to: String) -> Result<()> {
        FeatureTag::new(from.as_str()).map_err(|e| Error::RewriteTable(e.to_string()))?;
        FeatureTag::new(to.as_str()).map_err(|e| Error::RewriteTable(e.to_string()))?;
        if self.mappings.contains_key(&from) {
            return Err(Error::RewriteTable(format!("{from} mapped twice")));
        }
        self.mappings.insert(from, to);
        Ok(())
    }

    /// A target that is also a source would make rewriting order-dependent.
    fn validate(&self) -> Result<()> {
        for to in self.mappings.values() {
            if self.mappings.contains_key(to) {
                return Err(Error::RewriteTable(format!("{to} is both a target and a source")));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = TagRewriteTable::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let fail = |reason: &str| Error::Format {
                context: "rewrite table".into(),
                line: idx + 1,
                reason: reason.into(),
            };
            match cols.as_slice() {
                ["MAP", from, to] => table
                    .insert(from.to_string(), to.to_string())
                    .map_err(|e| fail(&e.to_string()))?,
                ["DROP", tag] => {
                    FeatureTag::new(*tag).map_err(|e| fail(&e.to_string()))?;
                    table.drop.insert(tag.to_string());
                }
                _ => return Err(fail("expected MAP\\tFROM\\tTO or DROP\\tTAG")),
            }
        }
        table.validate()?;
        Ok(table)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (from, to) in &self.mappings {
            out.push_str(&format!("MAP\t{from}\t{to}\n"));
        }
        for tag in &self.drop {
            out.push_str(&format!("DROP\t{tag}\n"));
        }
        out
    }

    pub fn swahili() -> Self {
        TagRewriteTable::parse(SWAHILI_TABLE).expect("shipped table is valid")
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty() && self.drop.is_empty()
    }

    pub fn rewrite<'a>(&'a self, tag: &'a str) -> &'a str {
        self.mappings.get(tag).map(String::as_str).unwrap_or(tag)
    }

    pub fn sources(&self) -> impl Iterator<Item = &String> {
        self.mappings.keys().chain(self.drop.iter())
    }

    pub fn targets(&self) -> impl Iterator<Item = &String> {
        self.mappings.values()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Canonical {
    Set(FeatureSet),
    Unmappable(String),
}

/// Rewrite, deduplicate and reorder a raw tag list.
pub fn canonicalize_feature_set(
    raw_tags: &[FeatureTag],
    table: &TagRewriteTable,
    inventory: &TagInventory,
    ordering: &TagOrdering,
) -> Result<Canonical> {
    if raw_tags.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    let mut out = Vec::with_capacity(raw_tags.len());
    for tag in raw_tags {
        if table.drop.contains(tag.as_str()) {
            return Ok(Canonical::Unmappable(format!("drop marker {tag}")));
        }
        let rewritten = FeatureTag::new(table.rewrite(tag.as_str()))?;
        if !inventory.contains(&rewritten) {
            return Ok(Canonical::Unmappable(format!("tag {rewritten} outside inventory")));
        }
        out.push(rewritten);
    }
    Ok(Canonical::Set(ordering.feature_set(out)?))
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub corpus: Corpus,
    pub dropped: Vec<(Triple, String)>,
    /// Triples that collapsed into another after rewriting.
    pub merged: usize,
}

pub fn normalize_corpus(corpus: &Corpus, table: &TagRewriteTable) -> Result<Normalized> {
    let mut kept = Vec::with_capacity(corpus.len());
    let mut dropped = Vec::new();
    for t in corpus.triples() {
        match canonicalize_feature_set(t.features.tags(), table, &corpus.inventory, &corpus.ordering)? {
            Canonical::Set(features) => kept.push(Triple {
                features,
                ..t.clone()
            }),
            Canonical::Unmappable(reason) => dropped.push((t.clone(), reason)),
        }
    }
    let (corpus, merged) = corpus.with_triples(kept);
    Ok(Normalized {
        corpus,
        dropped,
        merged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_unimorph, LanguageConfig};
    use proptest::prelude::*;

    fn tags(list: &[&str]) -> Vec<FeatureTag> {
        list.iter().map(|t| FeatureTag::new(*t).unwrap()).collect()
    }

    #[test]
    fn swahili_prf_maps_to_pfv() {
        let ord = TagOrdering::default();
        let out = canonicalize_feature_set(&tags(&["V", "PRF", "1", "SG"]), &TagRewriteTable::swahili(), &TagInventory::UniMorph, &ord)
            .unwrap();
        match out {
            Canonical::Set(fs) => assert_eq!(fs.to_string(), "V;PFV;1;SG"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_table_keeps_canonical_set() {
        let ord = TagOrdering::default();
        let out = canonicalize_feature_set(&tags(&["V", "IND", "FUT", "3", "SG"]), &TagRewriteTable::default(), &TagInventory::UniMorph, &ord)
            .unwrap();
        assert_eq!(out, Canonical::Set(ord.parse("V;IND;FUT;3;SG").unwrap()));
    }

    #[test]
    fn tag_order_is_irrelevant() {
        let ord = TagOrdering::default();
        let t = TagRewriteTable::default();
        let a = canonicalize_feature_set(&tags(&["SG", "3", "V"]), &t, &TagInventory::Any, &ord).unwrap();
        let b = canonicalize_feature_set(&tags(&["V", "3", "SG"]), &t, &TagInventory::Any, &ord).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_input_is_an_error() {
        let r = canonicalize_feature_set(&[], &TagRewriteTable::default(), &TagInventory::Any, &TagOrdering::default());
        assert!(r.is_err());
    }

    #[test]
    fn drop_marker_and_inventory_make_unmappable() {
        let table = TagRewriteTable::parse("DROP\tLGSPEC1\n").unwrap();
        let ord = TagOrdering::default();
        let r = canonicalize_feature_set(&tags(&["V", "LGSPEC1"]), &table, &TagInventory::UniMorph, &ord).unwrap();
        assert!(matches!(r, Canonical::Unmappable(_)));
        let r = canonicalize_feature_set(&tags(&["V", "XYZ"]), &table, &TagInventory::UniMorph, &ord).unwrap();
        assert!(matches!(r, Canonical::Unmappable(_)));
    }

    #[test]
    fn table_parsing_and_validation() {
        let t = TagRewriteTable::parse("# comment\nMAP\tPRF\tPFV\nDROP\tLGSPEC1\n").unwrap();
        assert_eq!(t.rewrite("PRF"), "PFV");
        assert_eq!(t.rewrite("PST"), "PST");
        assert_eq!(TagRewriteTable::parse(&t.serialize()).unwrap(), t);
        assert!(TagRewriteTable::parse("MAP\tA\tB\nMAP\tA\tC\n").is_err());
        assert!(TagRewriteTable::parse("MAP\tA\tB\nMAP\tB\tC\n").is_err());
        assert!(TagRewriteTable::parse("SWAP\tA\tB\n").is_err());
    }

    fn corpus(text: &str) -> Corpus {
        parse_unimorph(text, &LanguageConfig::new("sw")).corpus
    }

    #[test]
    fn normalize_drops_and_merges() {
        let c = corpus("pika\tnimepika\tV;PRF;1;SG\npika\tnimepika\tV;PFV;1;SG\npika\tx\tV;LGSPEC1\npika\tnilipika\tV;PST;1;SG\n");
        let table = TagRewriteTable::parse("MAP\tPRF\tPFV\nDROP\tLGSPEC1\n").unwrap();
        let n = normalize_corpus(&c, &table).unwrap();
        assert_eq!(n.corpus.len(), 2);
        assert_eq!(n.dropped.len(), 1);
        assert_eq!(n.dropped[0].0.form, "x");
        assert_eq!(n.merged, 1);
        assert_eq!(c.len(), n.corpus.len() + n.dropped.len() + n.merged);
    }

    #[test]
    fn empty_table_is_identity() {
        let c = corpus("pika\tnilipika\tV;PST;1;SG\nsoma\tnasoma\tV;PRS;1;SG\n");
        let n = normalize_corpus(&c, &TagRewriteTable::default()).unwrap();
        assert_eq!(n.corpus.serialize(), c.serialize());
    }

    proptest! {
        #[test]
        fn idempotent_and_conserving(rows in prop::collection::vec(("[a-c]{1,3}", "[a-c]{1,4}", prop::sample::subsequence(vec!["V", "PRF", "PFV", "PST", "1", "SG", "LGSPEC1"], 1..5)), 0..40)) {
            let text: String = rows.iter().map(|(l, f, t)| format!("{l}\t{f}\t{}\n", t.join(";"))).collect();
            let c = corpus(&text);
            let table = TagRewriteTable::parse("MAP\tPRF\tPFV\nDROP\tLGSPEC1\n").unwrap();
            let once = normalize_corpus(&c, &table).unwrap();
            prop_assert_eq!(c.len(), once.corpus.len() + once.dropped.len() + once.merged);
            let twice = normalize_corpus(&once.corpus, &table).unwrap();
            prop_assert_eq!(&twice.corpus, &once.corpus);
            prop_assert!(twice.dropped.is_empty());
            // no two serialized sets differ only by tag order
            let mut seen = std::collections::HashMap::new();
            for t in once.corpus.triples() {
                let s = t.features.to_string();
                let prev = seen.insert(t.features.clone(), s.clone());
                if let Some(p) = prev { prop_assert_eq!(p, s); }
            }
        }
    }
}
