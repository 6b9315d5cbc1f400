//! Non-neural inflector: one edit rule per aligned training pair.
//!
//! Each (lemma, form) pair is aligned on its longest common substring. The
//! material around that core becomes an edit: drop `front_strip` characters
//! from the lemma start and `strip` from its end, then add `prepend` and
//! `append`. Rules are indexed by feature set and by up to three final
//! lemma characters; prediction uses the most specific matching rule and
//! copies the lemma for feature sets never seen in training.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::Triple;
use crate::error::{Error, Result};
use crate::features::{FeatureSet, TagOrdering};

pub const MAX_CONTEXT: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edit {
    pub prepend: String,
    pub front_strip: usize,
    pub strip: usize,
    pub append: String,
}

impl Edit {
    /// `None` when the lemma is too short or the result would be empty.
    pub fn apply(&self, lemma: &str) -> Option<String> {
        let chars: Vec<char> = lemma.chars().collect();
        if self.front_strip + self.strip > chars.len() {
            return None;
        }
        let core: String = chars[self.front_strip..chars.len() - self.strip].iter().collect();
        let out = format!("{}{core}{}", self.prepend, self.append);
        (!out.is_empty()).then_some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditRule {
    pub features: FeatureSet,
    pub lemma_suffix: String,
    pub edit: Edit,
    pub support: usize,
}

/// Leftmost-longest common substring of `a` and `b` over code points:
/// `(start in a, start in b, length)`, preferring the smallest start in `a`,
/// then in `b`.
pub fn longest_common_substring(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            cur[j] = if a[i - 1] == b[j - 1] { prev[j - 1] + 1 } else { 0 };
            let len = cur[j];
            if len == 0 {
                continue;
            }
            let start = (i - len, j - len);
            if len > best.2 || (len == best.2 && start < (best.0, best.1)) {
                best = (start.0, start.1, len);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

pub fn extract_edit(lemma: &str, form: &str) -> Edit {
    let l: Vec<char> = lemma.chars().collect();
    let f: Vec<char> = form.chars().collect();
    let (i, j, len) = longest_common_substring(&l, &f);
    Edit {
        prepend: f[..j].iter().collect(),
        front_strip: i,
        strip: l.len() - i - len,
        append: f[j + len..].iter().collect(),
    }
}

fn suffix(chars: &[char], k: usize) -> String {
    chars[chars.len() - k..].iter().collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleModel {
    rules: BTreeMap<FeatureSet, Vec<EditRule>>,
}

pub fn train_baseline(train: &[Triple]) -> RuleModel {
    let mut support: BTreeMap<(FeatureSet, String, Edit), usize> = BTreeMap::new();
    for t in train {
        let edit = extract_edit(&t.lemma, &t.form);
        let chars: Vec<char> = t.lemma.chars().collect();
        for k in 0..=MAX_CONTEXT.min(chars.len()) {
            *support.entry((t.features.clone(), suffix(&chars, k), edit.clone())).or_default() += 1;
        }
    }
    let mut rules: BTreeMap<FeatureSet, Vec<EditRule>> = BTreeMap::new();
    for ((features, lemma_suffix, edit), support) in support {
        rules.entry(features.clone()).or_default().push(EditRule {
            features,
            lemma_suffix,
            edit,
            support,
        });
    }
    for list in rules.values_mut() {
        sort_rules(list);
    }
    RuleModel { rules }
}

fn sort_rules(list: &mut [EditRule]) {
    list.sort_by(|a, b| {
        b.lemma_suffix
            .chars()
            .count()
            .cmp(&a.lemma_suffix.chars().count())
            .then(b.support.cmp(&a.support))
            .then_with(|| a.lemma_suffix.cmp(&b.lemma_suffix))
            .then_with(|| a.edit.cmp(&b.edit))
    });
}

impl RuleModel {
    pub fn rules_for(&self, features: &FeatureSet) -> &[EditRule] {
        self.rules.get(features).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.rules.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn predict(&self, lemma: &str, features: &FeatureSet) -> String {
        self.rules_for(features)
            .iter()
            .filter(|r| lemma.ends_with(r.lemma_suffix.as_str()))
            .find_map(|r| r.edit.apply(lemma))
            .unwrap_or_else(|| lemma.to_string())
    }

    /// TSV with columns features, lemma_suffix, prepend, front_strip, strip,
    /// append, support.
    pub fn dump(&self) -> String {
        let mut out = String::from("# features\tlemma_suffix\tprepend\tfront_strip\tstrip\tappend\tsupport\n");
        for r in self.rules.values().flatten() {
            let e = &r.edit;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.features, r.lemma_suffix, e.prepend, e.front_strip, e.strip, e.append, r.support
            );
        }
        out
    }

    pub fn parse(text: &str, ordering: &TagOrdering) -> Result<Self> {
        let mut rules: BTreeMap<FeatureSet, Vec<EditRule>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |reason: String| Error::Format {
                context: "model".into(),
                line: idx + 1,
                reason,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 7 {
                return Err(fail(format!("expected 7 columns, found {}", cols.len())));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|e| fail(format!("{s:?}: {e}")));
            let features = ordering.parse(cols[0]).map_err(|e| fail(e.to_string()))?;
            let rule = EditRule {
                features: features.clone(),
                lemma_suffix: cols[1].to_string(),
                edit: Edit {
                    prepend: cols[2].to_string(),
                    front_strip: num(cols[3])?,
                    strip: num(cols[4])?,
                    append: cols[5].to_string(),
                },
                support: num(cols[6])?,
            };
            if rule.support == 0 {
                return Err(fail("support must be at least 1".into()));
            }
            rules.entry(features).or_default().push(rule);
        }
        for list in rules.values_mut() {
            sort_rules(list);
        }
        Ok(RuleModel { rules })
    }
}

pub fn predict(model: &RuleModel, lemma: &str, features: &FeatureSet) -> String {
    model.predict(lemma, features)
}
