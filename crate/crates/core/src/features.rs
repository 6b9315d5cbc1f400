//! Morphological feature tags and canonically ordered feature sets.
//!
//! A [`FeatureSet`] compares as a set: two sets holding the same tags are
//! equal no matter which order the tags were listed in. Its display form is
//! fixed by a [`TagOrdering`], so serializing a set always yields the same
//! `;`-joined string.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single UniMorph-style tag such as `IND`, `2` or `V.PTCP`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureTag(String);

impl FeatureTag {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.contains(';') || text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidTag(text));
        }
        Ok(FeatureTag(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Segment before the first `.`; `V.PTCP` has head `V`.
    pub fn head(&self) -> &str {
        self.0.split('.').next().unwrap_or(&self.0)
    }
}

impl TryFrom<String> for FeatureTag {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        FeatureTag::new(value)
    }
}

impl From<FeatureTag> for String {
    fn from(tag: FeatureTag) -> String {
        tag.0
    }
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dimension order used when no language-specific table is given.
/// Tags within a row share a rank, so sets never hold two of them in
/// practice; ties fall back to code-point order.
const DEFAULT_ORDER: &[&[&str]] = &[
    &["V", "V.PTCP", "V.MSDR", "V.CVB", "N", "ADJ", "ADV", "PRO", "DET", "NUM"],
    &["FIN", "NFIN"],
    &["IND", "SBJV", "IMP", "COND", "OPT", "POT", "PURP", "ADM", "OBLIG", "INFR"],
    &["PRS", "PST", "FUT", "RCT", "RMT", "IMMED", "HOD", "1DAY"],
    &["IPFV", "PFV", "PRF", "PROG", "HAB", "ITER", "PRSP", "DUR", "CONT"],
    &["1", "2", "3", "4", "EXCL", "INCL", "OBV", "PROX"],
    &["SG", "PL", "DU", "TRI", "PAUC", "GRPL"],
    &["INFM", "FORM", "ELEV", "HUMB", "POL"],
    &["POS", "NEG"],
    &["ACT", "PASS", "MID", "ANTIP", "CAUS", "APPL", "RECP", "REFL"],
];

/// Total order over tags: rank from an ordering table, then code point.
/// Tags absent from the table sort after every listed tag.
#[derive(Clone, Debug)]
pub struct TagOrdering {
    ranks: HashMap<String, usize>,
}

impl Default for TagOrdering {
    fn default() -> Self {
        TagOrdering::from_groups(DEFAULT_ORDER.iter().map(|g| g.iter().copied()))
    }
}

impl TagOrdering {
    /// Each group is one rank; earlier groups sort first.
    pub fn from_groups<'a, G, I>(groups: G) -> Self
    where
        G: IntoIterator<Item = I>,
        I: IntoIterator<Item = &'a str>,
    {
        let mut ranks = HashMap::new();
        for (rank, group) in groups.into_iter().enumerate() {
            for tag in group {
                ranks.entry(tag.to_string()).or_insert(rank);
            }
        }
        TagOrdering { ranks }
    }

    fn rank(&self, tag: &FeatureTag) -> usize {
        self.ranks.get(tag.as_str()).copied().unwrap_or(usize::MAX)
    }

    pub fn compare(&self, a: &FeatureTag, b: &FeatureTag) -> std::cmp::Ordering {
        self.rank(a)
            .cmp(&self.rank(b))
            .then_with(|| a.as_str().cmp(b.as_str()))
    }

    /// Build a canonical set from tags in any order; duplicates collapse.
    pub fn feature_set<I>(&self, tags: I) -> Result<FeatureSet>
    where
        I: IntoIterator<Item = FeatureTag>,
    {
        let mut tags: Vec<FeatureTag> = tags.into_iter().collect();
        if tags.is_empty() {
            return Err(Error::EmptyFeatureSet);
        }
        tags.sort_by(|a, b| self.compare(a, b));
        tags.dedup();
        Ok(FeatureSet { tags })
    }

    /// Parse a `;`-joined tag string.
    pub fn parse(&self, text: &str) -> Result<FeatureSet> {
        let tags = text
            .split(';')
            .map(FeatureTag::new)
            .collect::<Result<Vec<_>>>()?;
        self.feature_set(tags)
    }
}

/// Non-empty set of tags held in canonical display order.
#[derive(Clone, Debug)]
pub struct FeatureSet {
    tags: Vec<FeatureTag>,
}

impl FeatureSet {
    pub fn tags(&self) -> &[FeatureTag] {
        &self.tags
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t.as_str() == tag)
    }

    pub fn contains_all<S: AsRef<str>>(&self, tags: &[S]) -> bool {
        tags.iter().all(|t| self.contains(t.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    fn sorted(&self) -> BTreeSet<&str> {
        self.tags.iter().map(FeatureTag::as_str).collect()
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tag) in self.tags.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(tag.as_str())?;
        }
        Ok(())
    }
}

impl PartialEq for FeatureSet {
    fn eq(&self, other: &Self) -> bool {
        self.tags.len() == other.tags.len() && self.tags.iter().all(|t| other.tags.contains(t))
    }
}

impl Eq for FeatureSet {}

impl Hash for FeatureSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // order-independent combination of per-tag hashes
        let mut acc: u64 = 0;
        for tag in &self.tags {
            let mut h = DefaultHasher::new();
            tag.hash(&mut h);
            acc = acc.wrapping_add(h.finish());
        }
        state.write_usize(self.tags.len());
        state.write_u64(acc);
    }
}

impl PartialOrd for FeatureSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FeatureSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sorted().cmp(&other.sorted())
    }
}

/// Which tags a language accepts.
#[derive(Clone, Debug, Default)]
pub enum TagInventory {
    /// Any syntactically valid tag.
    #[default]
    Any,
    /// The UniMorph schema's tag vocabulary.
    UniMorph,
    Explicit(BTreeSet<String>),
}

const UNIMORPH_TAGS: &[&str] = &[
    // parts of speech
    "V", "PTCP", "MSDR", "CVB", "N", "PROPN", "ADJ", "ADV", "PRO", "DET", "NUM", "ADP", "CONJ",
    "PART", "INTJ", "ART", "AUX", "CLF", "COMP",
    // finiteness, mood, tense, aspect
    "FIN", "NFIN", "IND", "SBJV", "IMP", "COND", "OPT", "POT", "PURP", "ADM", "OBLIG", "INFR",
    "IRR", "REAL", "DEB", "PERM", "LKLY", "SIM", "PRS", "PST", "FUT", "RCT", "RMT", "IMMED",
    "HOD", "1DAY", "IPFV", "PFV", "PRF", "PROG", "HAB", "ITER", "PRSP", "DUR", "CONT",
    // person, number, politeness, polarity
    "0", "1", "2", "3", "4", "EXCL", "INCL", "OBV", "PROX", "SG", "PL", "DU", "TRI", "PAUC",
    "GRPL", "GPAUC", "INFM", "FORM", "ELEV", "HUMB", "POL", "POS", "NEG",
    // voice, valency, case, gender, misc
    "ACT", "PASS", "MID", "ANTIP", "CAUS", "APPL", "RECP", "REFL", "DIR", "INV", "NOM", "ACC",
    "GEN", "DAT", "INS", "LOC", "ABL", "ALL", "ESS", "VOC", "COM", "MASC", "FEM", "NEUT",
    "DEF", "INDF", "SPEC", "NSPEC", "EVID", "FH", "NFH", "QUOT", "DECL", "INT", "FOC", "TOP",
    "CMPR", "SPRL", "EQT", "AB", "RL", "MASC+FEM", "LGSPEC1", "LGSPEC2", "LGSPEC3",
];

impl TagInventory {
    pub fn contains(&self, tag: &FeatureTag) -> bool {
        match self {
            TagInventory::Any => true,
            TagInventory::Explicit(set) => {
                set.contains(tag.as_str()) || tag.as_str().split('.').all(|s| set.contains(s))
            }
            TagInventory::UniMorph => tag.as_str().split('.').all(is_unimorph_segment),
        }
    }

    pub fn extend<I: IntoIterator<Item = String>>(&mut self, extra: I) {
        if let TagInventory::Explicit(set) = self {
            set.extend(extra);
        }
    }
}

fn is_unimorph_segment(seg: &str) -> bool {
    if UNIMORPH_TAGS.contains(&seg) {
        return true;
    }
    // open-ended families: noun classes, language-specific and argument tags
    let family = |prefix: &str| {
        seg.strip_prefix(prefix)
            .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '-'))
    };
    family("BANTU") || family("LGSPEC") || family("ARG") || family("NALN")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(list: &[&str]) -> Vec<FeatureTag> {
        list.iter().map(|t| FeatureTag::new(*t).unwrap()).collect()
    }

    #[test]
    fn tag_validation() {
        assert!(FeatureTag::new("IND").is_ok());
        assert!(FeatureTag::new("V.PTCP").is_ok());
        assert!(FeatureTag::new("").is_err());
        assert!(FeatureTag::new("A;B").is_err());
        assert!(FeatureTag::new("A B").is_err());
        assert!(FeatureTag::new("A\tB").is_err());
        assert_eq!(FeatureTag::new("V.PTCP").unwrap().head(), "V");
    }

    #[test]
    fn canonical_order_matches_unimorph_layout() {
        let ord = TagOrdering::default();
        let fs = ord.feature_set(tags(&["SG", "FORM", "2", "FUT", "IND", "V"])).unwrap();
        assert_eq!(fs.to_string(), "V;IND;FUT;2;SG;FORM");
        let fs = ord.parse("PL;3;PFV;PST;IND;V").unwrap();
        assert_eq!(fs.to_string(), "V;IND;PST;PFV;3;PL");
        assert_eq!(ord.parse("PRS;V.PTCP").unwrap().to_string(), "V.PTCP;PRS");
    }

    #[test]
    fn set_equality_ignores_order() {
        let ord = TagOrdering::default();
        let a = ord.parse("V;IND;FUT;3;SG").unwrap();
        let b = ord.parse("3;SG;FUT;V;IND").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());

        // sets built under different orderings still compare as sets
        let reversed = TagOrdering::from_groups([["SG"], ["3"], ["FUT"], ["IND"], ["V"]]);
        let c = reversed.parse("V;IND;FUT;3;SG").unwrap();
        assert_eq!(c.to_string(), "SG;3;FUT;IND;V");
        assert_eq!(a, c);
        let hash = |fs: &FeatureSet| {
            let mut h = DefaultHasher::new();
            fs.hash(&mut h);
            h.finish()
        };
        assert_eq!(hash(&a), hash(&c));
        assert_eq!(a.cmp(&c), std::cmp::Ordering::Equal);
    }

    #[test]
    fn unknown_tags_sort_last_by_code_point() {
        let ord = TagOrdering::default();
        assert_eq!(ord.parse("ZZ;V;AA").unwrap().to_string(), "V;AA;ZZ");
    }

    #[test]
    fn duplicates_collapse_and_empty_rejected() {
        let ord = TagOrdering::default();
        assert_eq!(ord.parse("V;V;PST").unwrap().len(), 2);
        assert!(matches!(ord.feature_set(Vec::new()), Err(Error::EmptyFeatureSet)));
        assert!(ord.parse("V;;PST").is_err());
    }

    #[test]
    fn inventory_membership() {
        let inv = TagInventory::UniMorph;
        assert!(inv.contains(&FeatureTag::new("V.PTCP").unwrap()));
        assert!(inv.contains(&FeatureTag::new("BANTU1-2").unwrap()));
        assert!(!inv.contains(&FeatureTag::new("FOO").unwrap()));
        let mut explicit = TagInventory::Explicit(["V", "PST"].iter().map(|s| s.to_string()).collect());
        assert!(!explicit.contains(&FeatureTag::new("PRF").unwrap()));
        explicit.extend(["PRF".to_string()]);
        assert!(explicit.contains(&FeatureTag::new("PRF").unwrap()));
    }
}
