//! Fixed-effects ANOVA with sequential sums of squares, and the F
//! distribution's upper tail.
//!
//! Terms enter the model in the order given. Each factor contributes
//! treatment-coded indicator columns (first level in sorted order is the
//! baseline) and an interaction contributes the products of its factors'
//! columns. Columns are orthonormalized incrementally with modified
//! Gram–Schmidt, so a term's sum of squares is the squared length of the
//! response's projection onto what the term adds beyond earlier terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TERMS: [&str; 5] = ["system", "seed", "presentation", "language", "presentation*language"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub accuracy: f64,
    pub factors: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub term: String,
    pub df: usize,
    pub ss: f64,
    pub ms: f64,
    pub f: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub rows: Vec<AnovaRow>,
    pub residual_df: usize,
    pub residual_ss: f64,
    pub residual_ms: f64,
    pub total_df: usize,
    pub total_ss: f64,
}

/// Parse `a*b` (or `a:b`) into its factor names.
pub fn term_factors(term: &str) -> Vec<String> {
    term.split(['*', ':']).map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn subtract_projection(v: &mut [f64], q: &[f64]) {
    let c = dot(v, q);
    for (x, qi) in v.iter_mut().zip(q) {
        *x -= c * qi;
    }
}

pub fn anova_sequential<S: AsRef<str>>(observations: &[Observation], terms: &[S]) -> Result<AnovaTable> {
    let n = observations.len();
    if n < 2 {
        return Err(Error::Anova(format!("{n} observation(s)")));
    }
    if let Some(o) = observations.iter().find(|o| !o.accuracy.is_finite()) {
        return Err(Error::Anova(format!("non-finite response {}", o.accuracy)));
    }
    let parsed: Vec<(String, Vec<String>)> = terms.iter().map(|t| (t.as_ref().to_string(), term_factors(t.as_ref()))).collect();
    let mut indicators: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
    for factor in parsed.iter().flat_map(|(_, fs)| fs) {
        if indicators.contains_key(factor) {
            continue;
        }
        let mut values = Vec::with_capacity(n);
        for (i, o) in observations.iter().enumerate() {
            let v = o
                .factors
                .get(factor)
                .ok_or_else(|| Error::Anova(format!("observation {} lacks factor {factor}", i + 1)))?;
            values.push(v.as_str());
        }
        let levels: BTreeSet<&str> = values.iter().copied().collect();
        if levels.len() < 2 {
            return Err(Error::Anova(format!("factor {factor} has a single level")));
        }
        let cols = levels
            .iter()
            .skip(1)
            .map(|level| values.iter().map(|v| f64::from(u8::from(v == level))).collect())
            .collect();
        indicators.insert(factor.clone(), cols);
    }

    let y: Vec<f64> = observations.iter().map(|o| o.accuracy).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let total_ss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / (n as f64).sqrt(); n]];
    let mut residual: Vec<f64> = y.iter().map(|v| v - mean).collect();

    let mut rows = Vec::with_capacity(parsed.len());
    for (term, factors) in &parsed {
        let mut columns: Vec<Vec<f64>> = vec![vec![1.0; n]];
        for f in factors {
            columns = columns
                .iter()
                .flat_map(|c| indicators[f].iter().map(move |ind| c.iter().zip(ind).map(|(a, b)| a * b).collect()))
                .collect();
        }
        let mut ss = 0.0;
        for mut col in columns.iter().cloned() {
            let original = dot(&col, &col).sqrt();
            for _ in 0..2 {
                for q in &basis {
                    subtract_projection(&mut col, q);
                }
            }
            let norm = dot(&col, &col).sqrt();
            if original == 0.0 || norm <= 1e-9 * original {
                return Err(Error::SingularDesign(term.clone()));
            }
            col.iter_mut().for_each(|x| *x /= norm);
            let c = dot(&residual, &col);
            ss += c * c;
            subtract_projection(&mut residual, &col);
            basis.push(col);
        }
        rows.push(AnovaRow {
            term: term.clone(),
            df: columns.len(),
            ss,
            ms: ss / columns.len() as f64,
            f: f64::NAN,
            p: f64::NAN,
        });
    }

    let model_df: usize = rows.iter().map(|r| r.df).sum();
    let residual_df = (n - 1)
        .checked_sub(model_df)
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Anova(format!("no residual degrees of freedom ({n} observations, {model_df} model df)")))?;
    let residual_ss = dot(&residual, &residual);
    if residual_ss <= 1e-24 * (n as f64) || residual_ss <= 1e-15 * total_ss {
        return Err(Error::Anova("zero residual variance; F statistics undefined".into()));
    }
    let residual_ms = residual_ss / residual_df as f64;
    for row in &mut rows {
        row.f = row.ms / residual_ms;
        row.p = f_tail(row.f, row.df as f64, residual_df as f64)?;
    }
    Ok(AnovaTable {
        rows,
        residual_df,
        residual_ss,
        residual_ms,
        total_df: n - 1,
        total_ss,
    })
}

impl AnovaTable {
    pub fn row(&self, term: &str) -> Option<&AnovaRow> {
        self.rows.iter().find(|r| r.term == term)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("term\tdf\tss\tms\tF\tp\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{:.12e}\t{:.12e}\t{:.12e}\t{:.12e}", r.term, r.df, r.ss, r.ms, r.f, r.p);
        }
        let _ = writeln!(out, "Residuals\t{}\t{:.12e}\t{:.12e}\t\t", self.residual_df, self.residual_ss, self.residual_ms);
        let _ = writeln!(out, "Total\t{}\t{:.12e}\t\t\t", self.total_df, self.total_ss);
        out
    }

    /// Variable / F-statistic / p-value, one row per term.
    pub fn text(&self) -> String {
        let width = self.rows.iter().map(|r| display_term(&r.term).len()).max().unwrap_or(8).max(8);
        let mut out = format!("{:<width$}  {:>11}  {:>8}\n", "Variable", "F-statistic", "p-value");
        for r in &self.rows {
            let _ = writeln!(out, "{:<width$}  {:>11.3}  {:>8}", display_term(&r.term), r.f, format_p(r.p));
        }
        out
    }
}

fn display_term(term: &str) -> String {
    term_factors(term).join(" * ")
}

pub fn format_p(p: f64) -> String {
    if p < 2.2e-16 {
        "<2e-16".to_string()
    } else if p < 1e-3 {
        format!("{p:.2e}")
    } else {
        format!("{p:.3}")
    }
}

/// Results table with a header naming the factors and an `accuracy` column.
pub fn parse_observations(text: &str) -> Result<Vec<Observation>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let names: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    let acc_col = names
        .iter()
        .position(|n| *n == "accuracy")
        .ok_or_else(|| Error::Format {
            context: "results".into(),
            line: 1,
            reason: "header has no accuracy column".into(),
        })?;
    let mut out = Vec::new();
    for (idx, line) in lines {
        let cols: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        let fail = |reason: String| Error::Format {
            context: "results".into(),
            line: idx + 1,
            reason,
        };
        if cols.len() != names.len() {
            return Err(fail(format!("expected {} columns, found {}", names.len(), cols.len())));
        }
        let accuracy: f64 = cols[acc_col].parse().map_err(|e| fail(format!("accuracy {:?}: {e}", cols[acc_col])))?;
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(fail(format!("accuracy {accuracy} outside [0, 1]")));
        }
        let factors = names
            .iter()
            .zip(&cols)
            .enumerate()
            .filter(|(i, _)| *i != acc_col)
            .map(|(_, (n, v))| (n.to_string(), v.to_string()))
            .collect();
        out.push(Observation { accuracy, factors });
    }
    Ok(out)
}

const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let sum = LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn betainc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn check_f_args(f: f64, df1: f64, df2: f64) -> Result<()> {
    if !(df1 >= 1.0 && df2 >= 1.0 && df1.is_finite() && df2.is_finite()) {
        return Err(Error::InvalidArgument(format!("F distribution needs df >= 1, got ({df1}, {df2})")));
    }
    if f.is_nan() || f < 0.0 {
        return Err(Error::InvalidArgument(format!("F statistic {f} must be non-negative")));
    }
    Ok(())
}

/// P(X > f) for X ~ F(df1, df2).
pub fn f_tail(f: f64, df1: f64, df2: f64) -> Result<f64> {
    check_f_args(f, df1, df2)?;
    if f == 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    Ok(betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))
}

/// P(X <= f) for X ~ F(df1, df2), computed from the complementary argument.
pub fn f_lower(f: f64, df1: f64, df2: f64) -> Result<f64> {
    check_f_args(f, df1, df2)?;
    if f.is_infinite() {
        return Ok(1.0);
    }
    Ok(betainc(df1 / 2.0, df2 / 2.0, df1 * f / (df2 + df1 * f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn obs(acc: f64, pairs: &[(&str, &str)]) -> Observation {
        Observation {
            accuracy: acc,
            factors: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    fn one_way() -> Vec<Observation> {
        [(1.0, "a"), (2.0, "a"), (3.0, "a"), (4.0, "b"), (5.0, "b"), (6.0, "b")]
            .iter()
            .map(|(y, g)| obs(*y, &[("g", g)]))
            .collect()
    }

    #[test]
    fn one_way_fixture() {
        let t = anova_sequential(&one_way(), &["g"]).unwrap();
        let r = t.row("g").unwrap();
        assert!((r.ss - 13.5).abs() < 1e-9);
        assert!((t.residual_ss - 4.0).abs() < 1e-9);
        assert!((r.f - 13.5).abs() < 1e-9);
        assert_eq!((r.df, t.residual_df), (1, 4));
        // definitional formulas
        let groups = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let grand = 3.5;
        let between: f64 = groups.iter().map(|g| 3.0 * (g.iter().sum::<f64>() / 3.0 - grand).powi(2)).sum();
        let within: f64 = groups
            .iter()
            .map(|g| {
                let m = g.iter().sum::<f64>() / 3.0;
                g.iter().map(|v| (v - m).powi(2)).sum::<f64>()
            })
            .sum();
        assert!((r.ss - between).abs() < 1e-12);
        assert!((t.residual_ss - within).abs() < 1e-12);
    }

    #[test]
    fn constant_response_is_an_error() {
        let data: Vec<_> = one_way().into_iter().map(|o| Observation { accuracy: 0.5, ..o }).collect();
        assert!(matches!(anova_sequential(&data, &["g"]), Err(Error::Anova(_))));
    }

    #[test]
    fn aliased_and_saturated_designs() {
        let data: Vec<_> = one_way()
            .into_iter()
            .map(|mut o| {
                let g = o.factors["g"].clone();
                o.factors.insert("h".into(), g);
                o
            })
            .collect();
        match anova_sequential(&data, &["g", "h"]) {
            Err(Error::SingularDesign(term)) => assert_eq!(term, "h"),
            other => panic!("{other:?}"),
        }
        let two = vec![obs(1.0, &[("g", "a")]), obs(2.0, &[("g", "b")])];
        assert!(matches!(anova_sequential(&two, &["g"]), Err(Error::Anova(_))));
        assert!(anova_sequential(&one_way(), &["missing"]).is_err());
    }

    #[test]
    fn f_tail_fixed_points() {
        assert!((f_tail(1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(f_tail(0.0, 3.0, 7.0).unwrap(), 1.0);
        assert!(f_tail(1.0, 0.0, 1.0).is_err());
        assert!(f_tail(-1.0, 1.0, 1.0).is_err());
        assert!((f_tail(13.5, 1.0, 4.0).unwrap() - 0.0213).abs() < 5e-5);
    }

    /// Unnormalized F density integrated by composite Simpson after mapping
    /// [0, ∞) to [0, 1) through t = (v / (1 - v))².
    fn quadrature_tail(f: f64, d1: f64, d2: f64) -> f64 {
        let g = |t: f64| t.powf(d1 / 2.0 - 1.0) * (1.0 + d1 * t / d2).powf(-(d1 + d2) / 2.0);
        let h = |v: f64| {
            if v <= 0.0 || v >= 1.0 {
                return 0.0;
            }
            let u = v / (1.0 - v);
            g(u * u) * 2.0 * u / (1.0 - v).powi(2)
        };
        let simpson = |a: f64, b: f64, n: usize| {
            let step = (b - a) / n as f64;
            let mut s = h(a) + h(b);
            for i in 1..n {
                s += h(a + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * step / 3.0
        };
        let cut = f.sqrt() / (1.0 + f.sqrt());
        let total = simpson(0.0, cut, 200_000) + simpson(cut, 1.0, 200_000);
        simpson(cut, 1.0, 200_000) / total
    }

    #[test]
    fn f_tail_matches_quadrature() {
        for (f, d1, d2) in [(13.5, 1.0, 4.0), (2.0, 3.0, 10.0), (0.7, 5.0, 40.0), (4.2, 2.0, 6.0), (1.1, 4.0, 76.0)] {
            let oracle = quadrature_tail(f, d1, d2);
            let got = f_tail(f, d1, d2).unwrap();
            assert!((got - oracle).abs() < 1e-6, "F({d1},{d2}) at {f}: {got} vs {oracle}");
        }
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    fn grid(rng: &mut Rng, effect: impl Fn(usize, usize, usize, usize) -> f64) -> Vec<Observation> {
        let mut out = Vec::new();
        for s in 0..3 {
            for seed in 0..5 {
                for p in 0..2 {
                    for l in 0..3 {
                        let noise = (rng.below(1_000_000) as f64 / 1e6 - 0.5) * 0.04;
                        let acc = (effect(s, seed, p, l) + noise).clamp(0.0, 1.0);
                        out.push(obs(
                            acc,
                            &[
                                ("system", ["chr-trm", "cluzh", "enc-dec"][s]),
                                ("seed", &seed.to_string()),
                                ("presentation", ["orth", "trans"][p]),
                                ("language", ["en", "es", "sw"][l]),
                            ],
                        ));
                    }
                }
            }
        }
        out
    }

    /// Balanced-design sums of squares from cell means.
    fn definitional(data: &[Observation]) -> BTreeMap<&'static str, f64> {
        let y: Vec<f64> = data.iter().map(|o| o.accuracy).collect();
        let grand = y.iter().sum::<f64>() / y.len() as f64;
        let main = |f: &str| {
            let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for o in data {
                groups.entry(o.factors[f].clone()).or_default().push(o.accuracy);
            }
            groups.values().map(|g| g.len() as f64 * (g.iter().sum::<f64>() / g.len() as f64 - grand).powi(2)).sum::<f64>()
        };
        let mut cells: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
        for o in data {
            cells.entry((o.factors["presentation"].clone(), o.factors["language"].clone())).or_default().push(o.accuracy);
        }
        let cell_ss: f64 = cells.values().map(|g| g.len() as f64 * (g.iter().sum::<f64>() / g.len() as f64 - grand).powi(2)).sum();
        let mut out = BTreeMap::new();
        for f in ["system", "seed", "presentation", "language"] {
            out.insert(f, main(f));
        }
        out.insert("presentation*language", cell_ss - out["presentation"] - out["language"]);
        out
    }

    #[test]
    fn ninety_row_grid() {
        let mut rng = Rng::new(2024);
        let data = grid(&mut rng, |s, _, _, l| 0.3 + 0.2 * s as f64 + 0.1 * l as f64);
        let t = anova_sequential(&data, &DEFAULT_TERMS).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.term.as_str()).collect::<Vec<_>>(), DEFAULT_TERMS);
        assert_eq!(t.rows.iter().map(|r| r.df).collect::<Vec<_>>(), vec![2, 4, 1, 2, 2]);
        assert_eq!(t.residual_df, 78);
        let sum: f64 = t.rows.iter().map(|r| r.ss).sum::<f64>() + t.residual_ss;
        assert!((sum - t.total_ss).abs() <= 1e-9 * t.total_ss);
        for (term, ss) in definitional(&data) {
            let got = t.row(term).unwrap().ss;
            assert!((got - ss).abs() <= 1e-9 * t.total_ss, "{term}: {got} vs {ss}");
        }
        let pres = t.row("presentation").unwrap();
        assert!(pres.f < t.row("system").unwrap().f);
        assert!(pres.p > 0.001);
        let text = t.text();
        assert!(text.contains("presentation * language"));
        assert!(text.contains("<2e-16"));
    }

    #[test]
    fn observations_parse() {
        let text = "system\tseed\tpresentation\tlanguage\taccuracy\ncluzh\t0\torth\ten\t0.5\n";
        let o = parse_observations(text).unwrap();
        assert_eq!(o[0].factors["system"], "cluzh");
        assert_eq!(o[0].accuracy, 0.5);
        assert!(parse_observations("system\taccuracy\nx\t1.5\n").is_err());
        assert!(parse_observations("system\nx\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn decomposition_and_order_invariance(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let data = grid(&mut rng, |s, _, p, l| 0.4 + 0.05 * s as f64 + 0.03 * (p * l) as f64);
            let t = anova_sequential(&data, &DEFAULT_TERMS).unwrap();
            let sum: f64 = t.rows.iter().map(|r| r.ss).sum::<f64>() + t.residual_ss;
            prop_assert!((sum - t.total_ss).abs() <= 1e-9 * t.total_ss);
            prop_assert!(t.rows.iter().all(|r| r.ss >= -1e-9));
            prop_assert_eq!(t.rows.iter().map(|r| r.df).sum::<usize>() + t.residual_df, t.total_df);
            let mut shuffled = data.clone();
            rng.shuffle(&mut shuffled);
            let u = anova_sequential(&shuffled, &DEFAULT_TERMS).unwrap();
            for (a, b) in t.rows.iter().zip(&u.rows) {
                prop_assert!((a.ss - b.ss).abs() <= 1e-9 * t.total_ss);
                prop_assert!((a.f - b.f).abs() <= 1e-7 * a.f.max(1.0));
            }
        }

        #[test]
        fn large_effect_dominates(seed in any::<u64>(), which in 0usize..3) {
            let mut rng = Rng::new(seed);
            let data = grid(&mut rng, |s, _, p, l| 0.5 + 0.25 * [s, p, l][which] as f64 - 0.125 * [2, 1, 2][which] as f64);
            let t = anova_sequential(&data, &DEFAULT_TERMS).unwrap();
            let target = ["system", "presentation", "language"][which];
            let best = t.row(target).unwrap().f;
            prop_assert!(t.rows.iter().filter(|r| r.term != target).all(|r| r.f < best));
        }

        #[test]
        fn f_tail_monotone_and_complementary(f in 0.0f64..50.0, df1 in 1u32..30, df2 in 1u32..120) {
            let (d1, d2) = (df1 as f64, df2 as f64);
            let p = f_tail(f, d1, d2).unwrap();
            let q = f_lower(f, d1, d2).unwrap();
            prop_assert!((p + q - 1.0).abs() < 1e-10);
            prop_assert!(f_tail(f + 0.5, d1, d2).unwrap() <= p + 1e-15);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
