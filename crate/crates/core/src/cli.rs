//! Command line front end: config loading, subcommands and run manifests.
//!
//! Every subcommand reads all of its small inputs (lexicons, phrase lists,
//! gold files) up front, streams the corpora, and renders its outputs into an
//! [`OutputSet`] that is committed only after the whole run succeeded.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::attribution::{self, PronounRules};
use crate::corpus_io::{self, DocumentStream, EnglishFilterConfig, TagMap, TweetRecord, TweetStream};
use crate::error::{Error, Result};
use crate::evaluation::{self, ThresholdTie};
use crate::lexicons::{
    self, ActionPhrase, ConflictPolicy, Gender, NameGenderLexicon, NameList, TagCounts, VerbLexicon,
};
use crate::matcher::{self, PhraseAutomaton, PhraseId};
use crate::scoring::{self, CountTable, GenderedCount, ScoredSet};
use crate::tsv::{self, OutputSet};
use crate::Score;

/// Records handed to the worker pool at a time.
const BATCH_SIZE: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "actionbias", version, about = "Gender bias of commonsense action phrases")]
pub struct Cli {
    /// Key-value config file (TOML); flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusKind {
    Tweet,
    Document,
}

impl CorpusKind {
    fn as_str(self) -> &'static str {
        match self {
            CorpusKind::Tweet => "tweet",
            CorpusKind::Document => "document",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the verb lexicon, the cleaned name lists and the action phrases.
    BuildLexicons,
    /// Match, attribute and score a corpus.
    Score {
        #[arg(long, value_enum)]
        kind: CorpusKind,
    },
    /// Compare one or two score tables with a gold file.
    Evaluate {
        #[arg(long = "scores", required = true, num_args = 1)]
        scores: Vec<PathBuf>,
        #[arg(long)]
        gold: PathBuf,
        /// Give half credit to predictions exactly at the threshold.
        #[arg(long)]
        half_credit_ties: bool,
    },
    /// Balanced-sample user proportions for probe phrases.
    Sanity {
        #[arg(long)]
        probes: PathBuf,
    },
    /// Sum count files and score the result.
    #[command(hide = true)]
    MergeCounts {
        #[arg(long = "counts", required = true, num_args = 1)]
        counts: Vec<PathBuf>,
    },
    /// Turn raw ratings into a gold file.
    AggregateGold {
        #[arg(long)]
        ratings: PathBuf,
    },
    /// Tally lemma/tag counts over the document corpus.
    CountTags,
}

/// Run settings. Keys in the config file use the flag names.
#[derive(Debug, Clone, Default, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long, global = true)]
    pub tweet_corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    pub document_corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    pub male_names: Option<PathBuf>,
    #[arg(long, global = true)]
    pub female_names: Option<PathBuf>,
    #[arg(long, global = true)]
    pub concepts: Option<PathBuf>,
    /// Fine-to-coarse tag map; the bundled map is used when absent.
    #[arg(long, global = true)]
    pub tag_map: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tag_counts: Option<PathBuf>,
    /// English word list; the bundled list is used when absent.
    #[arg(long, global = true)]
    pub word_list: Option<PathBuf>,
    /// Action phrase file; derived from concepts and tag counts when absent.
    #[arg(long, global = true)]
    pub actions: Option<PathBuf>,
    #[arg(long, global = true)]
    pub dominance_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub max_nonenglish_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub min_occurrences: Option<u64>,
    /// Count a phrase at most once per record and gender when scoring.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub dedup_scoring: Option<bool>,
    /// Treat him/his/himself and her/hers/herself as gendered too.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub extended_pronouns: Option<bool>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Entries set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        let base = &mut self;
        overlay!(
            base,
            top,
            tweet_corpus,
            document_corpus,
            male_names,
            female_names,
            concepts,
            tag_map,
            tag_counts,
            word_list,
            actions,
            dominance_ratio,
            max_nonenglish_ratio,
            min_occurrences,
            dedup_scoring,
            extended_pronouns,
            seed,
            output_dir,
            workers,
        );
        self
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn min_occurrences(&self) -> u64 {
        self.min_occurrences.unwrap_or(1)
    }

    pub fn dominance_ratio(&self) -> f64 {
        self.dominance_ratio.unwrap_or(VerbLexicon::DEFAULT_DOMINANCE_RATIO)
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1).max(1)
    }

    fn pronoun_rules(&self) -> PronounRules {
        if self.extended_pronouns.unwrap_or(false) {
            PronounRules::extended()
        } else {
            PronounRules::default()
        }
    }

    fn require<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        let path = value
            .as_deref()
            .ok_or_else(|| Error::Config(format!("missing required setting `{key}`")))?;
        existing(path, key)
    }

    fn tag_map(&self) -> Result<TagMap> {
        match &self.tag_map {
            Some(p) => TagMap::load(p),
            None => Ok(TagMap::default()),
        }
    }

    fn english_filter(&self) -> Result<EnglishFilterConfig> {
        let ratio = self
            .max_nonenglish_ratio
            .unwrap_or(EnglishFilterConfig::DEFAULT_MAX_NONENGLISH_RATIO);
        match &self.word_list {
            Some(p) => EnglishFilterConfig::new(corpus_io::load_wordlist(p)?, ratio),
            None => EnglishFilterConfig::bundled().with_ratio(ratio),
        }
    }

    fn name_lexicon(&self) -> Result<NameGenderLexicon> {
        let male = NameList::load(self.require(&self.male_names, "male-names")?)?;
        let female = NameList::load(self.require(&self.female_names, "female-names")?)?;
        NameGenderLexicon::resolve(&male, &female, ConflictPolicy::DropBoth)
    }

    fn verb_lexicon(&self, tag_map: &TagMap) -> Result<VerbLexicon> {
        let counts = TagCounts::load(self.require(&self.tag_counts, "tag-counts")?)?;
        lexicons::build_verb_lexicon(&counts, tag_map, self.dominance_ratio())
    }

    fn action_phrases(&self, tag_map: &TagMap) -> Result<Vec<ActionPhrase>> {
        if let Some(path) = &self.actions {
            return lexicons::load_actions(existing(path, "actions")?);
        }
        let concepts = lexicons::load_concepts(self.require(&self.concepts, "concepts")?)?;
        let verbs = self.verb_lexicon(tag_map)?;
        Ok(lexicons::extract_actions(concepts, &verbs))
    }
}

fn existing<'a>(path: &'a Path, key: &str) -> Result<&'a Path> {
    if !path.is_file() {
        return Err(Error::Config(format!(
            "`{key}` does not name a file: {}",
            path.display()
        )));
    }
    Ok(path)
}

/// `key<TAB>value` lines in insertion order.
#[derive(Debug, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(written) => {
            for p in written {
                log::info!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let config = base.overlay(&cli.overrides);
    let outputs = match &cli.command {
        Command::BuildLexicons => cmd_build_lexicons(&config)?,
        Command::Score { kind } => cmd_score(&config, *kind)?,
        Command::Evaluate {
            scores,
            gold,
            half_credit_ties,
        } => {
            let tie = if *half_credit_ties {
                ThresholdTie::HalfCredit
            } else {
                ThresholdTie::Incorrect
            };
            cmd_evaluate(&config, scores, gold, tie)?
        }
        Command::Sanity { probes } => cmd_sanity(&config, probes)?,
        Command::MergeCounts { counts } => cmd_merge_counts(&config, counts)?,
        Command::AggregateGold { ratings } => cmd_aggregate_gold(&config, ratings)?,
        Command::CountTags => cmd_count_tags(&config)?,
    };
    outputs.commit()
}

pub fn cmd_build_lexicons(config: &RunConfig) -> Result<OutputSet> {
    let tag_map = config.tag_map()?;
    let male = NameList::load(config.require(&config.male_names, "male-names")?)?;
    let female = NameList::load(config.require(&config.female_names, "female-names")?)?;
    let concepts = lexicons::load_concepts(config.require(&config.concepts, "concepts")?)?;
    let names = NameGenderLexicon::resolve(&male, &female, ConflictPolicy::DropBoth)?;
    let verbs = config.verb_lexicon(&tag_map)?;
    let actions = lexicons::extract_actions(concepts.iter().map(|(id, t)| (id.clone(), t)), &verbs);
    if verbs.is_empty() {
        log::warn!("verb lexicon is empty; no actions extracted");
    }
    log::info!(
        "{} concepts in, {} actions out, {} verbs, {} conflicting names dropped",
        concepts.len(),
        actions.len(),
        verbs.len(),
        names.conflicts().len()
    );

    let dir = config.output_dir();
    let mut out = OutputSet::new();
    out.add(dir.join("verbs.txt"), verbs.to_text());
    out.add(dir.join("male_names.txt"), lines(names.male_names()));
    out.add(dir.join("female_names.txt"), lines(names.female_names()));
    out.add(dir.join("actions.tsv"), lexicons::actions_to_tsv(&actions));
    let mut m = Manifest::default();
    m.set("concepts", concepts.len());
    m.set("actions", actions.len());
    m.set("verbs", verbs.len());
    m.set("dominance_ratio", config.dominance_ratio());
    m.set("male_names", names.male_names().len());
    m.set("female_names", names.female_names().len());
    m.set("conflicting_names", names.conflicts().len());
    out.add(dir.join("manifest_build_lexicons.tsv"), m.render());
    Ok(out)
}

fn lines(set: &BTreeSet<String>) -> String {
    set.iter().map(|s| format!("{s}\n")).collect()
}

/// Partial result of matching and attributing one batch of records.
#[derive(Debug, Default)]
struct Tally {
    counts: CountTable<PhraseId>,
    /// Filled instead of `counts` when deduplicating, since a document can
    /// straddle batches.
    seen: BTreeSet<(String, PhraseId, Gender)>,
    matches: u64,
    attributed: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.counts.merge(other.counts);
        self.seen.extend(other.seen);
        self.matches += other.matches;
        self.attributed += other.attributed;
        self
    }

    fn record(&mut self, key: &str, phrase: PhraseId, gender: Gender, dedup: bool) {
        self.attributed += 1;
        if dedup {
            self.seen.insert((key.to_string(), phrase, gender));
        } else {
            let mut c = GenderedCount::default();
            c.record(gender);
            self.counts.add(phrase, c);
        }
    }

    fn finish(mut self) -> (CountTable<PhraseId>, u64, u64) {
        for (_, phrase, gender) in std::mem::take(&mut self.seen) {
            let mut c = GenderedCount::default();
            c.record(gender);
            self.counts.add(phrase, c);
        }
        (self.counts, self.matches, self.attributed)
    }
}

struct ScoreInputs {
    automaton: PhraseAutomaton,
    actions: Vec<ActionPhrase>,
    names: NameGenderLexicon,
    rules: PronounRules,
    dedup: bool,
}

fn tally_tweets(batch: &[TweetRecord], inputs: &ScoreInputs) -> Tally {
    batch
        .par_iter()
        .fold(Tally::default, |mut t, record| {
            let found = matcher::find_record_matches(&record.sentences, &inputs.automaton);
            t.matches += found.len() as u64;
            for occ in attribution::attribute_by_author(record, &found, &inputs.names) {
                t.record(&record.record_id, occ.phrase_id(), occ.gender(), inputs.dedup);
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

fn tally_sentences(batch: &[corpus_io::DocumentSentence], inputs: &ScoreInputs) -> Tally {
    batch
        .par_iter()
        .fold(Tally::default, |mut t, ds| {
            let found = matcher::find_matches(&ds.sentence, &inputs.automaton);
            t.matches += found.len() as u64;
            let key = ds.record_key();
            for occ in attribution::attribute_sentence(&ds.sentence, &found, &key, &inputs.names, &inputs.rules) {
                t.record(&key, occ.phrase_id(), occ.gender(), inputs.dedup);
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

pub fn cmd_score(config: &RunConfig, kind: CorpusKind) -> Result<OutputSet> {
    let tag_map = config.tag_map()?;
    let names = config.name_lexicon()?;
    let actions = config.action_phrases(&tag_map)?;
    let corpus = match kind {
        CorpusKind::Tweet => config.require(&config.tweet_corpus, "tweet-corpus")?,
        CorpusKind::Document => config.require(&config.document_corpus, "document-corpus")?,
    };
    let filter = config.english_filter()?;
    if actions.is_empty() {
        return Err(Error::Config("the action phrase list is empty".into()));
    }
    let inputs = ScoreInputs {
        automaton: matcher::compile(&actions)?,
        names,
        rules: config.pronoun_rules(),
        dedup: config.dedup_scoring.unwrap_or(false),
        actions,
    };
    let pool = thread_pool(config.workers())?;
    let source = tsv::source_name(corpus);
    let reader = tsv::open(corpus)?;

    let mut manifest = Manifest::default();
    manifest.set("corpus_kind", kind.as_str());
    let mut total = Tally::default();
    match kind {
        CorpusKind::Tweet => {
            let mut stream = TweetStream::new(reader, &tag_map, &source);
            let (mut read, mut filtered, mut known) = (0u64, 0u64, 0u64);
            let mut batch = Vec::with_capacity(BATCH_SIZE);
            let mut exhausted = false;
            while !exhausted {
                batch.clear();
                while batch.len() < BATCH_SIZE {
                    let Some(record) = stream.next().transpose()? else {
                        exhausted = true;
                        break;
                    };
                    read += 1;
                    if !corpus_io::passes_english_filter(&record, &filter) {
                        filtered += 1;
                        continue;
                    }
                    if inputs.names.guess_gender(&record.author_first_name).is_known() {
                        known += 1;
                    }
                    batch.push(record);
                }
                total = total.merge(pool.install(|| tally_tweets(&batch, &inputs)));
            }
            manifest.set("records_read", read);
            manifest.set("records_filtered_nonenglish", filtered);
            manifest.set("records_kept", read - filtered);
            manifest.set("records_known_author", known);
            manifest.set("fallback_lemmas", stream.fallback_lemmas());
        }
        CorpusKind::Document => {
            let mut stream = DocumentStream::new(reader, &tag_map, &source);
            let mut read = 0u64;
            let mut docs = BTreeSet::new();
            let mut batch = Vec::with_capacity(BATCH_SIZE);
            let mut exhausted = false;
            while !exhausted {
                batch.clear();
                while batch.len() < BATCH_SIZE {
                    let Some(ds) = stream.next().transpose()? else {
                        exhausted = true;
                        break;
                    };
                    read += 1;
                    docs.insert(ds.record_key());
                    batch.push(ds);
                }
                total = total.merge(pool.install(|| tally_sentences(&batch, &inputs)));
            }
            manifest.set("documents_read", docs.len());
            manifest.set("sentences_read", read);
            manifest.set("fallback_lemmas", stream.fallback_lemmas());
        }
    }

    let (by_index, matches, attributed) = total.finish();
    let counts = by_index.map_keys(|&i| inputs.actions[i].source_id.clone());
    let texts: BTreeMap<String, String> = inputs.actions.iter().map(|a| (a.source_id.clone(), a.text())).collect();
    let rows = scoring::score_table::<Score>(&counts, &texts, config.min_occurrences())?;
    if rows.is_empty() {
        log::warn!("no phrase was attributed in the corpus; the score table is empty");
    }
    let ctx = counts.context();
    manifest.set("phrases", inputs.actions.len());
    manifest.set("matches", matches);
    manifest.set("attributed", attributed);
    manifest.set("unattributed", matches - attributed);
    manifest.set("dedup_scoring", inputs.dedup);
    manifest.set("male_total", ctx.map_or(0, |c| c.male_total));
    manifest.set("female_total", ctx.map_or(0, |c| c.female_total));
    manifest.set("phrases_counted", counts.len());
    manifest.set("phrases_scored", rows.len());
    manifest.set("min_occurrences", config.min_occurrences());

    let dir = config.output_dir();
    let tag = kind.as_str();
    let mut out = OutputSet::new();
    out.add(
        dir.join(format!("scores_{tag}.tsv")),
        scoring::render_score_table(&rows),
    );
    out.add(
        dir.join(format!("counts_{tag}.tsv")),
        scoring::render_counts(&counts, &texts),
    );
    out.add(dir.join(format!("manifest_score_{tag}.tsv")), manifest.render());
    Ok(out)
}

pub fn cmd_evaluate(config: &RunConfig, score_files: &[PathBuf], gold: &Path, tie: ThresholdTie) -> Result<OutputSet> {
    if score_files.is_empty() || score_files.len() > 2 {
        return Err(Error::Config(format!(
            "evaluate takes one or two score tables, got {}",
            score_files.len()
        )));
    }
    let gold = evaluation::read_gold::<Score>(existing(gold, "gold")?)?;
    let mut methods: Vec<(String, ScoredSet<Score>)> = Vec::new();
    for path in score_files {
        let rows = scoring::read_score_table::<Score>(existing(path, "scores")?)?;
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        methods.push((name, scoring::z_scores(&rows)));
    }
    for (name, set) in &methods {
        if evaluation::coverage(set, &gold).covered == 0 {
            return Err(Error::EmptyEvaluableSet(format!(
                "no gold phrase has a score in {name} ({} gold phrases)",
                gold.len()
            )));
        }
    }
    let scatter = if let [(_, a), (_, b)] = methods.as_slice() {
        let combined = scoring::combine_average(a, b);
        let matching = scoring::matching_signs_filter(a, b);
        let rows = evaluation::scatter_rows(a, b, &gold);
        methods.push(("combined".into(), combined));
        methods.push(("matching_signs".into(), matching));
        Some(evaluation::render_scatter(&rows))
    } else {
        None
    };

    let reports: Vec<_> = methods
        .iter()
        .map(|(name, set)| evaluation::evaluate_method(name, set, &gold, tie))
        .collect();
    let mut m = Manifest::default();
    m.set("gold_phrases", gold.len());
    m.set("gold_non_neutral", gold.iter().filter(|g| g.mean_score != 0.0).count());
    m.set(
        "threshold_ties",
        if tie == ThresholdTie::HalfCredit {
            "half_credit"
        } else {
            "incorrect"
        },
    );
    for r in &reports {
        m.set(&format!("{}.coverage", r.method_name), r.coverage.covered);
        m.set(&format!("{}.binary_coverage", r.method_name), r.binary_coverage.covered);
        m.set(&format!("{}.binary_total", r.method_name), r.binary_coverage.total);
    }

    let dir = config.output_dir();
    let mut out = OutputSet::new();
    out.add(dir.join("eval_report.tsv"), evaluation::render_report(&reports));
    if let Some(scatter) = scatter {
        out.add(dir.join("scatter.tsv"), scatter);
    }
    out.add(dir.join("manifest_evaluate.tsv"), m.render());
    Ok(out)
}

/// One probe per line as space-separated lemmas; `#` starts a comment line.
pub fn read_probes<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for line in tsv::numbered_lines(reader, source_name) {
        let (_, line) = line?;
        if line.trim_start().starts_with('#') {
            continue;
        }
        out.push(line.split_whitespace().map(str::to_lowercase).collect());
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{source_name}: no probe phrases")));
    }
    Ok(out)
}

pub fn cmd_sanity(config: &RunConfig, probes: &Path) -> Result<OutputSet> {
    let tag_map = config.tag_map()?;
    let names = config.name_lexicon()?;
    let filter = config.english_filter()?;
    let probes_path = existing(probes, "probes")?;
    let probes = read_probes(tsv::open(probes_path)?, &tsv::source_name(probes_path))?;
    let corpus = config.require(&config.tweet_corpus, "tweet-corpus")?;
    let automaton = matcher::compile(&probes)?;

    let mut users = evaluation::UserMentions::default();
    let mut stream = TweetStream::new(tsv::open(corpus)?, &tag_map, &tsv::source_name(corpus));
    for record in stream.by_ref() {
        let record = record?;
        if corpus_io::passes_english_filter(&record, &filter) {
            users.observe(&record, &automaton, &names);
        }
    }
    let table = evaluation::sanity_from_users::<Score>(users, &probes, config.seed())?;
    let mut out = OutputSet::new();
    out.add(
        config.output_dir().join("sanity.tsv"),
        evaluation::render_sanity(&table),
    );
    Ok(out)
}

pub fn cmd_merge_counts(config: &RunConfig, files: &[PathBuf]) -> Result<OutputSet> {
    let mut counts = CountTable::new();
    let mut texts = BTreeMap::new();
    for path in files {
        let (c, t) = scoring::read_counts(existing(path, "counts")?)?;
        counts.merge(c);
        texts.extend(t);
    }
    let rows = scoring::score_table::<Score>(&counts, &texts, config.min_occurrences())?;
    let dir = config.output_dir();
    let mut out = OutputSet::new();
    out.add(dir.join("scores_merged.tsv"), scoring::render_score_table(&rows));
    out.add(dir.join("counts_merged.tsv"), scoring::render_counts(&counts, &texts));
    Ok(out)
}

pub fn cmd_aggregate_gold(config: &RunConfig, ratings: &Path) -> Result<OutputSet> {
    let ratings = evaluation::read_ratings(existing(ratings, "ratings")?)?;
    let texts: BTreeMap<String, String> = if config.concepts.is_some() {
        lexicons::load_concepts(config.require(&config.concepts, "concepts")?)?
            .into_iter()
            .collect()
    } else if let Some(path) = &config.actions {
        lexicons::load_actions(existing(path, "actions")?)?
            .into_iter()
            .map(|a| (a.source_id.clone(), a.text()))
            .collect()
    } else {
        BTreeMap::new()
    };
    let agg = evaluation::aggregate_gold_detailed::<Score>(&ratings, &texts);
    let phrases: BTreeSet<&str> = ratings.iter().map(|r| r.phrase_id.as_str()).collect();
    let na = |v: Option<Score>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());

    let mut m = Manifest::default();
    m.set("ratings", ratings.len());
    m.set("phrases_rated", phrases.len());
    m.set("dropped_few_raters", agg.dropped_few_raters);
    m.set("dropped_meaningless", agg.dropped_meaningless);
    m.set("gold_phrases", agg.gold.len());
    m.set("majority_agreement", na(evaluation::majority_agreement(&ratings)));
    m.set(
        "majority_agreement_min_raters",
        na(evaluation::majority_agreement(&evaluation::filter_min_raters(&ratings))),
    );
    let dir = config.output_dir();
    let mut out = OutputSet::new();
    out.add(dir.join("gold.tsv"), evaluation::render_gold(&agg.gold));
    out.add(dir.join("manifest_gold.tsv"), m.render());
    Ok(out)
}

pub fn cmd_count_tags(config: &RunConfig) -> Result<OutputSet> {
    let tag_map = config.tag_map()?;
    let corpus = config.require(&config.document_corpus, "document-corpus")?;
    let mut counts = TagCounts::new();
    for ds in DocumentStream::new(tsv::open(corpus)?, &tag_map, &tsv::source_name(corpus)) {
        counts.observe(&ds?.sentence);
    }
    let mut out = OutputSet::new();
    out.add(config.output_dir().join("tag_counts.tsv"), counts.to_tsv());
    Ok(out)
}
