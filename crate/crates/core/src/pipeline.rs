//! Command-line front end: argument definitions and one function per
//! subcommand. Every command that writes files records them in a
//! `run_manifest.json` in its output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::baseline::train_baseline;
use crate::corpus::{parse_triples, parse_unimorph, Corpus, LanguageConfig, Triple};
use crate::error::{Error, Result};
use crate::evaluate::{aggregate_seeds, classify_errors, evaluate, EvalReport, PredictionRecord, ReportLabels};
use crate::features::TagOrdering;
use crate::manifest::{OutputSet, RunManifest, SplitManifest, SPLIT_MANIFEST};
use crate::normalize::{normalize_corpus, TagRewriteTable};
use crate::probes::{builtin_probes, find_probe, parse_catalog, serialize_catalog, ProbeSpec};
use crate::split::{blind_split, check_parallel, probe_split, render_split, verify_split, Presentation, RenderedSplit, SplitSizes};
use crate::stats::{anova_sequential, parse_observations, DEFAULT_TERMS};
use crate::transcribe::{transcribe_corpus, PronLexicon, RuleSet, Transcriber, TranscriptionMap};

#[derive(Debug, Parser)]
#[command(name = "morphprobe", version, about = "BLIND/PROBE splits, evaluation and ANOVA for inflection corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, filter and normalize UniMorph files into a canonical corpus.
    Ingest(IngestArgs),
    /// Generate BLIND and/or PROBE splits for a list of seeds.
    Split(SplitArgs),
    /// Re-check a generated split against its corpus.
    Verify(VerifyArgs),
    /// Train the rule baseline and predict a covered test file.
    Baseline(BaselineArgs),
    /// Score predictions against gold, by OOV category.
    Evaluate(EvaluateArgs),
    /// Combine evaluation reports across seeds.
    Aggregate(AggregateArgs),
    /// Sequential ANOVA over a results table.
    Anova(AnovaArgs),
    /// Print (and optionally write) the probe catalog.
    Probes(ProbesArgs),
    /// Verify the checksums recorded in a run manifest.
    CheckManifest(CheckManifestArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// UniMorph TSV files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub language: String,
    /// Part-of-speech tag to keep.
    #[arg(long, default_value = "V")]
    pub pos: String,
    /// Tag rewrite table; Swahili uses the shipped table by default.
    #[arg(long)]
    pub rewrite_table: Option<PathBuf>,
    /// Accept any well-formed tag instead of the UniMorph vocabulary.
    #[arg(long)]
    pub any_tags: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Probe catalog JSON replacing the built-in probes.
    #[arg(long)]
    pub probes_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TranscriptionArgs {
    /// Pronunciation lexicon (`word\tt1|t2`).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Ordered rewrite rules (`source\ttarget`).
    #[arg(long)]
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Canonical corpus written by `ingest`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Defaults to the language recorded in the corpus header.
    #[arg(long)]
    pub language: Option<String>,
    /// `blind`, probe names (comma-separated), or `all`.
    #[arg(long, default_value = "blind")]
    pub probe: String,
    #[arg(long, default_value = "0,1,2,3,4")]
    pub seeds: String,
    #[arg(long, default_value_t = 1600)]
    pub train_size: usize,
    #[arg(long, default_value_t = 400)]
    pub finetune_size: usize,
    #[arg(long, default_value_t = 1000)]
    pub test_size: usize,
    /// `both`, `orthography` or `transcription`.
    #[arg(long, default_value = "both")]
    pub presentation: String,
    #[command(flatten)]
    pub transcription: TranscriptionArgs,
    #[command(flatten)]
    pub catalog: CatalogArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Seed directory holding `manifest.json`.
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long)]
    pub language: Option<String>,
    #[command(flatten)]
    pub transcription: TranscriptionArgs,
    #[command(flatten)]
    pub catalog: CatalogArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub finetune: Option<PathBuf>,
    /// Covered test file (lemma, features).
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub finetune: Option<PathBuf>,
    /// Probe whose error taxonomy classifies incorrect predictions.
    #[arg(long)]
    pub probe: Option<String>,
    #[command(flatten)]
    pub catalog: CatalogArgs,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub presentation: Option<String>,
    #[arg(long)]
    pub language: Option<String>,
    /// Split label; defaults to the probe name, or `blind`.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// `report.json` files written by `evaluate`.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnovaArgs {
    /// TSV with factor columns and an `accuracy` column.
    #[arg(long)]
    pub results: PathBuf,
    /// Comma-separated terms in model order; `a*b` is an interaction.
    #[arg(long)]
    pub terms: Option<String>,
    /// Use every row instead of only `split == blind` rows.
    #[arg(long)]
    pub pool: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProbesArgs {
    #[command(flatten)]
    pub catalog: CatalogArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckManifestArgs {
    pub dir: PathBuf,
}

pub fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    match cli.command {
        Command::Ingest(a) => cmd_ingest(&a, argv),
        Command::Split(a) => cmd_split(&a, argv),
        Command::Verify(a) => cmd_verify(&a),
        Command::Baseline(a) => cmd_baseline(&a, argv),
        Command::Evaluate(a) => cmd_evaluate(&a, argv),
        Command::Aggregate(a) => cmd_aggregate(&a, argv),
        Command::Anova(a) => cmd_anova(&a, argv),
        Command::Probes(a) => cmd_probes(&a, argv),
        Command::CheckManifest(a) => cmd_check_manifest(&a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_triples(path: &Path) -> Result<Vec<Triple>> {
    parse_triples(&read(path)?, &TagOrdering::default(), &path.display().to_string())
}

/// Load a canonical corpus; the language comes from the flag or the header.
pub fn read_corpus(path: &Path, language: Option<&str>) -> Result<Corpus> {
    let text = read(path)?;
    let header = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# language:").map(|s| s.trim().to_string()));
    let language = language
        .map(str::to_string)
        .or(header)
        .ok_or_else(|| Error::InvalidArgument(format!("{}: no language header; pass --language", path.display())))?;
    let outcome = parse_unimorph(&text, &LanguageConfig::permissive(language));
    if let Some(r) = outcome.rejections.first() {
        return Err(Error::Format {
            context: path.display().to_string(),
            line: r.line,
            reason: r.reason.clone(),
        });
    }
    Ok(outcome.corpus)
}

fn load_catalog(args: &CatalogArgs, manifest: Option<&mut RunManifest>) -> Result<Vec<ProbeSpec>> {
    match &args.probes_file {
        Some(path) => {
            if let Some(m) = manifest {
                m.add_input(path)?;
            }
            parse_catalog(&read(path)?)
        }
        None => Ok(builtin_probes()),
    }
}

fn load_transcriber(args: &TranscriptionArgs, language: &str, manifest: Option<&mut RunManifest>) -> Result<Transcriber> {
    let mut inputs = Vec::new();
    let t = match (&args.lexicon, &args.rules) {
        (Some(_), Some(_)) => return Err(Error::InvalidArgument("--lexicon and --rules are exclusive".into())),
        (Some(path), None) => {
            inputs.push(path);
            Transcriber::Lexicon(PronLexicon::parse(&read(path)?)?)
        }
        (None, Some(path)) => {
            inputs.push(path);
            Transcriber::Rules(RuleSet::parse(&read(path)?)?)
        }
        (None, None) => Transcriber::Rules(RuleSet::builtin(language).ok_or_else(|| {
            Error::InvalidArgument(format!("no built-in transcription rules for {language}; pass --lexicon or --rules"))
        })?),
    };
    if let Some(m) = manifest {
        for p in inputs {
            m.add_input(p)?;
        }
    }
    Ok(t)
}

pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let seeds: Vec<u64> = text
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|e| Error::InvalidArgument(format!("seed {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds".into()));
    }
    Ok(seeds)
}

pub fn parse_presentations(text: &str) -> Result<Vec<Presentation>> {
    if text == "both" {
        return Ok(Presentation::BOTH.to_vec());
    }
    let mut out: Vec<Presentation> = text.split(',').map(|s| Presentation::parse(s.trim())).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn diagnostics_line(out: &mut String, kind: &str, location: &str, reason: &str) {
    out.push_str(&format!("{kind}\t{location}\t{reason}\n"));
}

pub fn cmd_ingest(args: &IngestArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    let config = if args.any_tags {
        LanguageConfig::permissive(&args.language)
    } else {
        LanguageConfig::new(&args.language)
    };
    let mut triples = Vec::new();
    let mut diagnostics = String::new();
    for path in &args.inputs {
        let outcome = parse_unimorph(&read(path)?, &config);
        manifest.add_input(path)?;
        for r in &outcome.rejections {
            diagnostics_line(&mut diagnostics, "rejected", &format!("{}:{}", path.display(), r.line), &r.reason);
        }
        triples.extend(outcome.corpus.triples().iter().cloned());
    }
    let (corpus, duplicates) = Corpus::from_triples(&config, triples);
    let parsed = corpus.len();
    let pos = corpus.filter_pos(&args.pos);
    let off_pos = parsed - pos.len();
    let single = pos.exclude_multiword();
    let multiword = pos.len() - single.len();
    let table = match &args.rewrite_table {
        Some(path) => {
            manifest.add_input(path)?;
            TagRewriteTable::parse(&read(path)?)?
        }
        None if args.language == "sw" => TagRewriteTable::swahili(),
        None => TagRewriteTable::default(),
    };
    let normalized = normalize_corpus(&single, &table)?;
    for (t, reason) in &normalized.dropped {
        diagnostics_line(&mut diagnostics, "dropped", &t.to_tsv().replace('\t', " "), reason);
    }
    let corpus = normalized.corpus;
    let summary = corpus.summarize();
    let counts = [
        ("duplicates", duplicates),
        ("other_pos", off_pos),
        ("multiword", multiword),
        ("unmappable", normalized.dropped.len()),
        ("merged", normalized.merged),
        ("overabundant_cells", corpus.overabundant_cells()),
    ];
    for (name, n) in counts {
        diagnostics_line(&mut diagnostics, "count", name, &n.to_string());
    }

    let mut out = OutputSet::new(&args.out);
    out.write(&format!("{}.corpus.tsv", args.language), corpus.serialize().as_bytes())?;
    out.write(&format!("{}.diagnostics.tsv", args.language), diagnostics.as_bytes())?;
    manifest.write(&out)?;
    println!("language\tlemmas\tfeature_sets\ttriples");
    println!("{}\t{}\t{}\t{}", args.language, summary.n_lemmas, summary.n_feature_sets, summary.n_triples);
    let rejected = diagnostics.lines().filter(|l| l.starts_with("rejected")).count();
    if rejected > 0 {
        eprintln!("{rejected} line(s) rejected; see {}.diagnostics.tsv", args.language);
    }
    Ok(())
}

/// Modes requested by `--probe`, validated against the corpus language.
fn resolve_modes(spec: &str, language: &str, catalog: &[ProbeSpec]) -> Result<Vec<Option<ProbeSpec>>> {
    if spec == "all" {
        let mut modes = vec![None];
        modes.extend(catalog.iter().filter(|p| p.language == language).cloned().map(Some));
        return Ok(modes);
    }
    spec.split(',')
        .map(str::trim)
        .map(|name| match name {
            "blind" => Ok(None),
            name => {
                let p = find_probe(catalog, name)?;
                p.check_language(language)?;
                Ok(Some(p.clone()))
            }
        })
        .collect()
}

pub fn cmd_split(args: &SplitArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    let sizes = SplitSizes::new(args.train_size, args.finetune_size, args.test_size)?;
    let seeds = parse_seeds(&args.seeds)?;
    let presentations = parse_presentations(&args.presentation)?;
    let catalog = load_catalog(&args.catalog, Some(&mut manifest))?;
    let mut corpus = read_corpus(&args.corpus, args.language.as_deref())?;
    manifest.add_input(&args.corpus)?;
    let modes = resolve_modes(&args.probe, &corpus.language, &catalog)?;

    let map = if presentations.contains(&Presentation::Transcription) {
        let transcriber = load_transcriber(&args.transcription, &corpus.language, Some(&mut manifest))?;
        let transcribed = transcribe_corpus(&corpus, &transcriber)?;
        if !transcribed.discarded.is_empty() {
            eprintln!("{} untranscribable triple(s) removed before splitting", transcribed.discarded.len());
        }
        corpus = corpus.with_triples(transcribed.triples.iter().map(|t| t.base.clone()).collect()).0;
        Some(transcribed.map())
    } else {
        None
    };

    let jobs: Vec<(&Option<ProbeSpec>, u64)> = modes.iter().flat_map(|m| seeds.iter().map(move |s| (m, *s))).collect();
    let results: Vec<Result<(OutputSet, String)>> = jobs
        .par_iter()
        .map(|(mode, seed)| split_job(&corpus, mode.as_ref(), sizes, *seed, &presentations, map.as_ref(), &args.out))
        .collect();
    let mut outputs = OutputSet::new(&args.out);
    for r in results {
        let (set, line) = r?;
        outputs.extend(set);
        println!("{line}");
    }
    manifest.seeds = seeds;
    manifest.probes = modes
        .iter()
        .map(|m| m.as_ref().map_or_else(|| "blind".to_string(), |p| p.name.clone()))
        .collect();
    manifest.write(&outputs)?;
    Ok(())
}

fn split_job(
    corpus: &Corpus,
    probe: Option<&ProbeSpec>,
    sizes: SplitSizes,
    seed: u64,
    presentations: &[Presentation],
    map: Option<&TranscriptionMap>,
    out: &Path,
) -> Result<(OutputSet, String)> {
    let split = match probe {
        Some(p) => probe_split(corpus, p, sizes, seed)?,
        None => blind_split(corpus, sizes, seed)?,
    };
    let md = &split.metadata;
    let base = format!("{}/{}/{}", corpus.language, md.mode, seed);
    let mut outputs = OutputSet::new(out);
    let mut files = BTreeMap::new();
    for &p in presentations {
        let rendered = render_split(&split, p, map)?;
        for (name, text) in rendered.files() {
            let rel = format!("{}/{name}", p.dir_name());
            let sum = outputs.write(&format!("{base}/{rel}"), text.as_bytes())?;
            files.insert(rel, sum);
        }
    }
    let record = SplitManifest {
        metadata: split.metadata.clone(),
        files,
    };
    outputs.write(&format!("{base}/{SPLIT_MANIFEST}"), record.to_json().as_bytes())?;
    let line = format!(
        "{base}\ttrain {}\tfinetune {}\ttest {}\tfsOOV {:.3}",
        md.n_train, md.n_finetune, md.n_test, md.fs_oov_fraction
    );
    Ok((outputs, line))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let record = SplitManifest::read(&args.split.join(SPLIT_MANIFEST))?;
    let md = &record.metadata;
    let corpus = read_corpus(&args.corpus, args.language.as_deref().or(Some(md.language.as_str())))?;
    let catalog = load_catalog(&args.catalog, None)?;
    let probe = if md.is_blind() { None } else { Some(find_probe(&catalog, &md.mode)?) };
    let orth_dir = args.split.join(Presentation::Orthography.dir_name());
    let orth = RenderedSplit::read(&orth_dir, &corpus.ordering)?;
    let mut report = verify_split(&orth, md, &corpus, probe)?;

    let mismatched: Vec<String> = record
        .files
        .iter()
        .filter_map(|(rel, sum)| match crate::manifest::file_sha256(&args.split.join(rel)) {
            Ok(actual) if &actual == sum => None,
            Ok(_) => Some(format!("{rel} changed")),
            Err(e) => Some(e.to_string()),
        })
        .collect();
    report.push(
        "checksums",
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} files match", record.files.len())
        } else {
            mismatched.join("; ")
        },
    );

    let trans_dir = args.split.join(Presentation::Transcription.dir_name());
    if trans_dir.is_dir() {
        let trans = RenderedSplit::read(&trans_dir, &corpus.ordering)?;
        let check = match load_transcriber(&args.transcription, &corpus.language, None) {
            Ok(t) => check_parallel(&orth, &trans, &transcribe_corpus(&corpus, &t)?.map()),
            Err(_) => structural_parallel(&orth, &trans),
        };
        report.checks.push(check);
    }
    print!("{}", report.text());
    if report.passed() {
        Ok(())
    } else {
        Err(Error::Constraint(format!(
            "{} check(s) failed",
            report.checks.iter().filter(|c| !c.passed).count()
        )))
    }
}

/// Parallelism check without transcription resources: row counts and
/// feature sequences must agree.
fn structural_parallel(orth: &RenderedSplit, trans: &RenderedSplit) -> crate::split::Check {
    let feats = |v: &[Triple]| v.iter().map(|t| t.features.to_string()).collect::<Vec<_>>();
    let ok = feats(&orth.train) == feats(&trans.train)
        && feats(&orth.finetune) == feats(&trans.finetune)
        && feats(&orth.test_gold) == feats(&trans.test_gold)
        && orth.test_covered.len() == trans.test_covered.len();
    crate::split::Check {
        name: "parallel-presentations".into(),
        passed: ok,
        detail: "row counts and feature sequences (no transcription resource to map lemmas)".into(),
    }
}

pub fn cmd_baseline(args: &BaselineArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    let mut train = read_triples(&args.train)?;
    manifest.add_input(&args.train)?;
    if let Some(ft) = &args.finetune {
        train.extend(read_triples(ft)?);
        manifest.add_input(ft)?;
    }
    if train.is_empty() {
        return Err(Error::InsufficientData("empty training data".into()));
    }
    let test = crate::corpus::parse_covered(&read(&args.test)?, &TagOrdering::default(), &args.test.display().to_string())?;
    manifest.add_input(&args.test)?;
    let model = train_baseline(&train);
    let predictions: String = test
        .iter()
        .map(|(lemma, fs)| format!("{lemma}\t{}\t{fs}\n", model.predict(lemma, fs)))
        .collect();
    let mut out = OutputSet::new(&args.out);
    out.write("predictions.tsv", predictions.as_bytes())?;
    out.write("model.tsv", model.dump().as_bytes())?;
    manifest.write(&out)?;
    println!("{} rules, {} predictions", model.len(), test.len());
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    let predictions: Vec<PredictionRecord> = read_triples(&args.predictions)?.into_iter().map(Into::into).collect();
    let gold = read_triples(&args.gold)?;
    let mut train = read_triples(&args.train)?;
    for p in [&args.predictions, &args.gold, &args.train] {
        manifest.add_input(p)?;
    }
    if let Some(ft) = &args.finetune {
        train.extend(read_triples(ft)?);
        manifest.add_input(ft)?;
    }
    let mut report = evaluate(&predictions, &gold, &train)?;
    if let Some(name) = &args.probe {
        let catalog = load_catalog(&args.catalog, Some(&mut manifest))?;
        let probe = find_probe(&catalog, name)?;
        report.taxa = Some(classify_errors(&probe.taxonomy, &predictions, &gold)?);
    }
    report.labels = ReportLabels {
        system: args.system.clone(),
        seed: args.seed,
        presentation: args.presentation.clone(),
        language: args.language.clone(),
        split: args.split.clone().or_else(|| args.probe.clone()).or_else(|| Some("blind".into())),
    };
    let system = args.system.as_deref().unwrap_or("system");
    let table = report.table(system);
    let mut out = OutputSet::new(&args.out);
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    out.write("report.json", json.as_bytes())?;
    out.write("report.txt", table.as_bytes())?;
    manifest.write(&out)?;
    print!("{table}");
    Ok(())
}

pub fn cmd_aggregate(args: &AggregateArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    type Group = (String, String, String, String);
    let mut groups: BTreeMap<Group, Vec<(u64, EvalReport)>> = BTreeMap::new();
    let mut results = String::from("system\tseed\tpresentation\tlanguage\tsplit\taccuracy\n");
    for path in &args.reports {
        let report: EvalReport = serde_json::from_str(&read(path)?)?;
        manifest.add_input(path)?;
        let l = &report.labels;
        let label = |v: &Option<String>| v.clone().unwrap_or_else(|| "NA".into());
        let seed = l.seed.unwrap_or(0);
        if let Some(acc) = report.accuracy() {
            results.push_str(&format!(
                "{}\t{seed}\t{}\t{}\t{}\t{acc}\n",
                label(&l.system),
                label(&l.presentation),
                label(&l.language),
                label(&l.split)
            ));
        }
        let key = (label(&l.system), label(&l.presentation), label(&l.language), label(&l.split));
        groups.entry(key).or_default().push((seed, report));
    }
    let mut text = String::new();
    let mut summaries = Vec::new();
    for ((system, presentation, language, split), reports) in &groups {
        let summary = aggregate_seeds(reports)?;
        text.push_str(&format!("## {language} {split} {presentation}\n"));
        text.push_str(&summary.table(system));
        text.push('\n');
        summaries.push(serde_json::json!({
            "system": system, "presentation": presentation, "language": language, "split": split,
            "summary": summary,
        }));
    }
    let mut out = OutputSet::new(&args.out);
    out.write("summary.txt", text.as_bytes())?;
    let mut json = serde_json::to_string_pretty(&summaries)?;
    json.push('\n');
    out.write("summary.json", json.as_bytes())?;
    out.write("results.tsv", results.as_bytes())?;
    manifest.write(&out)?;
    print!("{text}");
    Ok(())
}

pub fn cmd_anova(args: &AnovaArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    let mut observations = parse_observations(&read(&args.results)?)?;
    manifest.add_input(&args.results)?;
    if !args.pool && observations.iter().any(|o| o.factors.contains_key("split")) {
        observations.retain(|o| o.factors.get("split").map(String::as_str) == Some("blind"));
    }
    if observations.is_empty() {
        return Err(Error::InsufficientData("no observations (BLIND rows only unless --pool)".into()));
    }
    let terms: Vec<String> = match &args.terms {
        Some(t) => t.split(',').map(|s| s.trim().to_string()).collect(),
        None => DEFAULT_TERMS.iter().map(|s| s.to_string()).collect(),
    };
    let table = anova_sequential(&observations, &terms)?;
    let mut out = OutputSet::new(&args.out);
    out.write("anova.tsv", table.to_tsv().as_bytes())?;
    out.write("anova.txt", table.text().as_bytes())?;
    manifest.write(&out)?;
    print!("{}", table.text());
    Ok(())
}

pub fn cmd_probes(args: &ProbesArgs, argv: Vec<String>) -> Result<()> {
    let mut manifest = RunManifest::new(argv);
    let catalog = load_catalog(&args.catalog, Some(&mut manifest))?;
    let text = serialize_catalog(&catalog);
    if let Some(dir) = &args.out {
        let mut out = OutputSet::new(dir);
        out.write("probes.json", text.as_bytes())?;
        manifest.write(&out)?;
    }
    print!("{text}");
    Ok(())
}

pub fn cmd_check_manifest(args: &CheckManifestArgs) -> Result<()> {
    let manifest = RunManifest::read(&args.dir)?;
    let problems = manifest.verify(&args.dir);
    if problems.is_empty() {
        println!("{} outputs verified", manifest.outputs.len());
        Ok(())
    } else {
        for p in &problems {
            println!("{p}");
        }
        Err(Error::Constraint(format!("{} output(s) do not match the manifest", problems.len())))
    }
}
