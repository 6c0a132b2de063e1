//! Gold standard handling and evaluation metrics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus_io::TweetRecord;
use crate::error::{Error, Result};
use crate::lexicons::{Gender, NameGenderLexicon};
use crate::matcher::{self, PhraseAutomaton};
use crate::scalar::Real;
use crate::scoring::ScoredSet;
use crate::tsv;

/// Phrases rated by fewer raters are dropped from the gold standard.
pub const MIN_RATERS: usize = 5;

/// One answer on the five-point scale (-2 typically feminine .. +2 typically
/// masculine) or the "meaningless" option.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatingValue {
    Score(i8),
    Meaningless,
}

impl FromStr for RatingValue {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "X" | "x" => Ok(RatingValue::Meaningless),
            other => match other.parse::<i8>() {
                Ok(v) if (-2..=2).contains(&v) => Ok(RatingValue::Score(v)),
                _ => Err(format!("rating must be one of -2,-1,0,1,2,X; got {other:?}")),
            },
        }
    }
}

impl fmt::Display for RatingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatingValue::Score(v) => write!(f, "{v}"),
            RatingValue::Meaningless => f.write_str("X"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawRating {
    pub phrase_id: String,
    pub rater_id: String,
    pub value: RatingValue,
}

impl RawRating {
    pub fn new(phrase_id: impl Into<String>, rater_id: impl Into<String>, value: RatingValue) -> Self {
        RawRating {
            phrase_id: phrase_id.into(),
            rater_id: rater_id.into(),
            value,
        }
    }
}

const RATINGS_HEADER: &str = "phrase_id\trater_id\tvalue";
const GOLD_HEADER: &str = "phrase_id\tphrase_text\tmean_score\tn_raters";

pub fn read_ratings(path: &Path) -> Result<Vec<RawRating>> {
    parse_ratings(tsv::open(path)?, &tsv::source_name(path))
}

/// `phrase_id<TAB>rater_id<TAB>value`; a rater may rate a phrase only once.
pub fn parse_ratings<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<RawRating>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for line in tsv::numbered_lines(reader, source_name) {
        let (line_no, line) = line?;
        if line == RATINGS_HEADER {
            continue;
        }
        let f = tsv::fields(&line, 3, source_name, line_no)?;
        let value = f[2]
            .parse()
            .map_err(|e: String| Error::parse(source_name, line_no, e))?;
        if !seen.insert((f[0].to_string(), f[1].to_string())) {
            return Err(Error::parse(
                source_name,
                line_no,
                format!("rater {:?} rated phrase {:?} twice", f[1], f[0]),
            ));
        }
        out.push(RawRating::new(f[0], f[1], value));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldRating<T> {
    pub phrase_id: String,
    pub phrase_text: String,
    /// Mean of the numeric answers, in [-2, 2].
    pub mean_score: T,
    /// Every rater of the phrase, including "meaningless" answers.
    pub n_raters: usize,
}

/// Result of [`aggregate_gold_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct GoldAggregation<T> {
    pub gold: Vec<GoldRating<T>>,
    pub dropped_few_raters: usize,
    pub dropped_meaningless: usize,
}

fn group_by_phrase(ratings: &[RawRating]) -> BTreeMap<&str, Vec<RatingValue>> {
    let mut groups: BTreeMap<&str, Vec<RatingValue>> = BTreeMap::new();
    for r in ratings {
        groups.entry(&r.phrase_id).or_default().push(r.value);
    }
    groups
}

fn value_counts(values: &[RatingValue]) -> HashMap<RatingValue, usize> {
    let mut counts = HashMap::new();
    for v in values {
        *counts.entry(*v).or_insert(0) += 1;
    }
    counts
}

pub fn aggregate_gold<T: Real>(ratings: &[RawRating]) -> Vec<GoldRating<T>> {
    aggregate_gold_detailed(ratings, &BTreeMap::new()).gold
}

/// Drops phrases with fewer than [`MIN_RATERS`] raters, then phrases whose
/// strict modal answer is "meaningless" (a tie with a numeric answer keeps the
/// phrase). The gold score is the mean of the numeric answers. Output is
/// sorted by phrase id.
pub fn aggregate_gold_detailed<T: Real>(ratings: &[RawRating], texts: &BTreeMap<String, String>) -> GoldAggregation<T> {
    let mut out = GoldAggregation {
        gold: Vec::new(),
        dropped_few_raters: 0,
        dropped_meaningless: 0,
    };
    for (phrase, values) in group_by_phrase(ratings) {
        if values.len() < MIN_RATERS {
            out.dropped_few_raters += 1;
            continue;
        }
        let counts = value_counts(&values);
        let meaningless = counts.get(&RatingValue::Meaningless).copied().unwrap_or(0);
        let best_numeric = counts
            .iter()
            .filter(|(v, _)| **v != RatingValue::Meaningless)
            .map(|(_, c)| *c)
            .max()
            .unwrap_or(0);
        if meaningless > best_numeric {
            out.dropped_meaningless += 1;
            continue;
        }
        let numeric: Vec<i8> = values
            .iter()
            .filter_map(|v| match v {
                RatingValue::Score(s) => Some(*s),
                RatingValue::Meaningless => None,
            })
            .collect();
        let sum: i64 = numeric.iter().map(|&s| s as i64).sum();
        let mean = T::from_i64(sum).expect("small integer") / T::from_usize(numeric.len()).expect("small integer");
        out.gold.push(GoldRating {
            phrase_id: phrase.to_string(),
            phrase_text: texts.get(phrase).cloned().unwrap_or_default(),
            mean_score: mean,
            n_raters: values.len(),
        });
    }
    out
}

/// Ratings of phrases that have at least [`MIN_RATERS`] raters.
pub fn filter_min_raters(ratings: &[RawRating]) -> Vec<RawRating> {
    let groups = group_by_phrase(ratings);
    ratings
        .iter()
        .filter(|r| groups[r.phrase_id.as_str()].len() >= MIN_RATERS)
        .cloned()
        .collect()
}

/// Probability that a rating equals the modal answer of the other ratings of
/// the same phrase (any co-modal answer counts). Phrases with a single rating
/// are skipped; `None` when nothing is left.
pub fn majority_agreement<T: Real>(ratings: &[RawRating]) -> Option<T> {
    let mut agree = 0usize;
    let mut total = 0usize;
    for values in group_by_phrase(ratings).values() {
        if values.len() < 2 {
            continue;
        }
        let mut counts = value_counts(values);
        for v in values {
            *counts.get_mut(v).expect("own value counted") -= 1;
            let max = counts.values().copied().max().unwrap_or(0);
            if counts[v] == max {
                agree += 1;
            }
            *counts.get_mut(v).expect("own value counted") += 1;
            total += 1;
        }
    }
    (total > 0).then(|| T::from_usize(agree).unwrap() / T::from_usize(total).unwrap())
}

pub fn read_gold<T: Real>(path: &Path) -> Result<Vec<GoldRating<T>>> {
    parse_gold(tsv::open(path)?, &tsv::source_name(path))
}

pub fn parse_gold<T: Real, R: BufRead>(reader: R, source_name: &str) -> Result<Vec<GoldRating<T>>> {
    let mut out = Vec::new();
    for line in tsv::numbered_lines(reader, source_name) {
        let (line_no, line) = line?;
        if line == GOLD_HEADER {
            continue;
        }
        let f = tsv::fields(&line, 4, source_name, line_no)?;
        out.push(GoldRating {
            phrase_id: f[0].to_string(),
            phrase_text: f[1].to_string(),
            mean_score: tsv::parse_number(f[2], "mean_score", source_name, line_no)?,
            n_raters: tsv::parse_number(f[3], "n_raters", source_name, line_no)?,
        });
    }
    Ok(out)
}

pub fn render_gold<T: Real>(gold: &[GoldRating<T>]) -> String {
    let mut out = format!("{GOLD_HEADER}\n");
    for g in gold {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            g.phrase_id, g.phrase_text, g.mean_score, g.n_raters
        ));
    }
    out
}

fn check_finite<T: Real>(values: &[T], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation(format!(
            "{what} contains non-finite values"
        )));
    }
    Ok(())
}

/// 1-based ranks with ties replaced by the mean of the ranks they span.
pub fn mid_ranks<T: Real>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![T::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j, whose mean is (i + j + 1) / 2
        let rank = T::from_usize(i + j + 1).unwrap() * T::half();
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    let n = T::from_usize(x.len()).unwrap();
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (*a - mx, *b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::UndefinedCorrelation("one variable is constant".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Spearman rank correlation: Pearson correlation of mid-ranks.
pub fn spearman<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::UndefinedCorrelation(format!(
            "paired inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedCorrelation(format!(
            "need at least 3 pairs, got {}",
            x.len()
        )));
    }
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    pearson(&mid_ranks(x), &mid_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Pos,
    Neg,
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Computed from sorted tie groups in O(n log n).
pub fn roc_auc<T: Real>(scores: &[T], labels: &[Label]) -> Result<T> {
    if scores.len() != labels.len() {
        return Err(Error::UndefinedAuc(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::UndefinedAuc("scores contain NaN".into()));
    }
    let positives = labels.iter().filter(|l| **l == Label::Pos).count() as u128;
    let negatives = labels.len() as u128 - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::UndefinedAuc("both classes must be present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));

    // twice the number of (pos, neg) pairs won by the positive, ties = 1
    let mut doubled_wins: u128 = 0;
    let mut negatives_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos_g, mut neg_g) = (0u128, 0u128);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            match labels[order[j]] {
                Label::Pos => pos_g += 1,
                Label::Neg => neg_g += 1,
            }
            j += 1;
        }
        doubled_wins += 2 * pos_g * negatives_below + pos_g * neg_g;
        negatives_below += neg_g;
        i = j;
    }
    let num = T::from_u128(doubled_wins).unwrap();
    let den = T::from_u128(2 * positives * negatives).unwrap();
    Ok(num / den)
}

/// How a prediction exactly at the threshold is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdTie {
    #[default]
    Incorrect,
    HalfCredit,
}

/// Fraction of non-neutral gold phrases whose predicted side of `threshold`
/// matches the sign of the human score.
pub fn sign_accuracy<T: Real>(
    predicted: &ScoredSet<T>,
    gold: &[GoldRating<T>],
    threshold: T,
    tie: ThresholdTie,
) -> Result<T> {
    let mut credit = T::zero();
    let mut total = 0usize;
    for g in gold.iter().filter(|g| g.mean_score != T::zero()) {
        let Some(&p) = predicted.get(&g.phrase_id) else {
            continue;
        };
        total += 1;
        if p == threshold {
            if tie == ThresholdTie::HalfCredit {
                credit = credit + T::half();
            }
        } else if (p > threshold) == (g.mean_score > T::zero()) {
            credit = credit + T::one();
        }
    }
    if total == 0 {
        return Err(Error::UndefinedAccuracy(
            "no gold phrase with a non-zero score has a prediction".into(),
        ));
    }
    Ok(credit / T::from_usize(total).unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coverage {
    pub covered: usize,
    pub total: usize,
}

impl Coverage {
    pub fn fraction<T: Real>(&self) -> T {
        if self.total == 0 {
            return T::zero();
        }
        T::from_usize(self.covered).unwrap() / T::from_usize(self.total).unwrap()
    }
}

pub fn coverage<T: Real>(method: &ScoredSet<T>, gold: &[GoldRating<T>]) -> Coverage {
    Coverage {
        covered: gold.iter().filter(|g| method.contains_key(&g.phrase_id)).count(),
        total: gold.len(),
    }
}

/// One row of the evaluation report. Metrics that are undefined for the
/// method (too few items, a single class) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T> {
    pub method_name: String,
    pub spearman: Option<T>,
    pub auc: Option<T>,
    pub accuracy: Option<T>,
    /// Gold phrases with a prediction.
    pub coverage: Coverage,
    /// Non-neutral gold phrases with a prediction (the two-class task).
    pub binary_coverage: Coverage,
}

pub fn evaluate_method<T: Real>(
    method_name: &str,
    predicted: &ScoredSet<T>,
    gold: &[GoldRating<T>],
    tie: ThresholdTie,
) -> EvalReport<T> {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let (mut scores, mut labels) = (Vec::new(), Vec::new());
    for g in gold {
        let Some(&p) = predicted.get(&g.phrase_id) else {
            continue;
        };
        xs.push(p);
        ys.push(g.mean_score);
        if g.mean_score != T::zero() {
            scores.push(p);
            labels.push(if g.mean_score > T::zero() {
                Label::Pos
            } else {
                Label::Neg
            });
        }
    }
    let non_neutral: Vec<GoldRating<T>> = gold.iter().filter(|g| g.mean_score != T::zero()).cloned().collect();
    EvalReport {
        method_name: method_name.to_string(),
        spearman: spearman(&xs, &ys).ok(),
        auc: roc_auc(&scores, &labels).ok(),
        accuracy: sign_accuracy(predicted, gold, T::zero(), tie).ok(),
        coverage: coverage(predicted, gold),
        binary_coverage: coverage(predicted, &non_neutral),
    }
}

pub const REPORT_HEADER: &str = "method\tspearman\tauc\taccuracy\tcoverage_pct\tcoverage_n";

fn opt<T: Real>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn render_report<T: Real>(rows: &[EvalReport<T>]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in rows {
        let pct: T = r.coverage.fraction::<T>() * T::hundred();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.2}\t{}\n",
            r.method_name,
            opt(r.spearman),
            opt(r.auc),
            opt(r.accuracy),
            pct.to_f64().unwrap_or(f64::NAN),
            r.coverage.covered
        ));
    }
    out
}

/// Quadrant of the (a, b) plane: 1 for (+,+), 2 for (-,+), 3 for (-,-), 4 for
/// (+,-) and 0 on an axis.
pub fn quadrant<T: Real>(a: T, b: T) -> u8 {
    let zero = T::zero();
    match (a.partial_cmp(&zero), b.partial_cmp(&zero)) {
        (Some(Ordering::Greater), Some(Ordering::Greater)) => 1,
        (Some(Ordering::Less), Some(Ordering::Greater)) => 2,
        (Some(Ordering::Less), Some(Ordering::Less)) => 3,
        (Some(Ordering::Greater), Some(Ordering::Less)) => 4,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow<T> {
    pub phrase_text: String,
    pub z_a: T,
    pub z_b: T,
    pub gold_mean: T,
    pub quadrant: u8,
}

/// Gold phrases scored by both methods, in gold order.
pub fn scatter_rows<T: Real>(a: &ScoredSet<T>, b: &ScoredSet<T>, gold: &[GoldRating<T>]) -> Vec<ScatterRow<T>> {
    gold.iter()
        .filter_map(|g| {
            let (za, zb) = (*a.get(&g.phrase_id)?, *b.get(&g.phrase_id)?);
            Some(ScatterRow {
                phrase_text: g.phrase_text.clone(),
                z_a: za,
                z_b: zb,
                gold_mean: g.mean_score,
                quadrant: quadrant(za, zb),
            })
        })
        .collect()
}

pub fn render_scatter<T: Real>(rows: &[ScatterRow<T>]) -> String {
    let mut out = String::from("phrase_text\tz_corpusA\tz_corpusB\tgold_mean\tquadrant\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.phrase_text, r.z_a, r.z_b, r.gold_mean, r.quadrant
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SanityRow<T> {
    pub phrase: String,
    pub male_pct: T,
    pub female_pct: T,
    pub male_users: usize,
    pub female_users: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SanityTable<T> {
    pub rows: Vec<SanityRow<T>>,
    /// Users per gender in the balanced sample.
    pub sample_size: usize,
    pub seed: u64,
    /// Probes nobody in the sample mentioned.
    pub omitted: Vec<String>,
}

/// Unique-user gender proportions of probe phrases on a balanced sample.
///
/// Users are identified by their full author name. All users of the minority
/// gender are kept and the majority gender is subsampled uniformly without
/// replacement (seeded) down to the same size. Every probe row reports the
/// share of mentioning sample users per gender.
pub fn sanity_proportions<'a, T, I>(
    records: I,
    probes: &[Vec<String>],
    lexicon: &NameGenderLexicon,
    seed: u64,
) -> Result<SanityTable<T>>
where
    T: Real,
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let automaton = matcher::compile(probes)?;
    let users = collect_user_mentions(records, &automaton, lexicon);
    sanity_from_users(users, probes, seed)
}

/// Per-user gender and the set of probes the user mentioned at least once.
#[derive(Debug, Clone, Default)]
pub struct UserMentions {
    users: BTreeMap<String, (Gender, BTreeSet<usize>)>,
}

impl UserMentions {
    pub fn observe(&mut self, record: &TweetRecord, automaton: &PhraseAutomaton, lexicon: &NameGenderLexicon) {
        let gender = lexicon.guess_gender(&record.author_first_name);
        if !gender.is_known() {
            return;
        }
        let key = if record.author_name.is_empty() {
            record.record_id.clone()
        } else {
            record.author_name.clone()
        };
        let entry = self.users.entry(key).or_insert_with(|| (gender, BTreeSet::new()));
        for m in matcher::find_record_matches(&record.sentences, automaton) {
            entry.1.insert(m.phrase_id);
        }
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}

pub fn collect_user_mentions<'a, I>(
    records: I,
    automaton: &PhraseAutomaton,
    lexicon: &NameGenderLexicon,
) -> UserMentions
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let mut users = UserMentions::default();
    for r in records {
        users.observe(r, automaton, lexicon);
    }
    users
}

pub fn sanity_from_users<T: Real>(users: UserMentions, probes: &[Vec<String>], seed: u64) -> Result<SanityTable<T>> {
    let (male, female): (Vec<_>, Vec<_>) = users.users.into_values().partition(|(g, _)| *g == Gender::Male);
    if male.is_empty() || female.is_empty() {
        return Err(Error::DegenerateSample(format!(
            "need users of both genders (male: {}, female: {})",
            male.len(),
            female.len()
        )));
    }
    let size = male.len().min(female.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsample = |group: Vec<(Gender, BTreeSet<usize>)>, rng: &mut ChaCha8Rng| {
        if group.len() == size {
            return group;
        }
        let mut picked = rand::seq::index::sample(rng, group.len(), size).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| group[i].clone()).collect()
    };
    let male = subsample(male, &mut rng);
    let female = subsample(female, &mut rng);

    let mentions = |group: &[(Gender, BTreeSet<usize>)], probe: usize| {
        group.iter().filter(|(_, seen)| seen.contains(&probe)).count()
    };
    let mut rows = Vec::new();
    let mut omitted = Vec::new();
    for (i, probe) in probes.iter().enumerate() {
        let phrase = probe.join(" ");
        let (mu, fu) = (mentions(&male, i), mentions(&female, i));
        if mu + fu == 0 {
            log::warn!("probe {phrase:?} is not mentioned by any sampled user; row omitted");
            omitted.push(phrase);
            continue;
        }
        let male_pct = T::hundred() * T::from_usize(mu).unwrap() / T::from_usize(mu + fu).unwrap();
        rows.push(SanityRow {
            phrase,
            male_pct,
            female_pct: T::hundred() - male_pct,
            male_users: mu,
            female_users: fu,
        });
    }
    Ok(SanityTable {
        rows,
        sample_size: size,
        seed,
        omitted,
    })
}

pub fn render_sanity<T: Real>(table: &SanityTable<T>) -> String {
    let mut out = format!("# seed={} sample_size_per_gender={}\n", table.seed, table.sample_size);
    out.push_str("phrase\tmale_pct\tfemale_pct\tmale_users\tfemale_users\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{}\t{:.2}\t{:.2}\t{}\t{}\n",
            r.phrase,
            r.male_pct.to_f64().unwrap_or(f64::NAN),
            r.female_pct.to_f64().unwrap_or(f64::NAN),
            r.male_users,
            r.female_users
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratings(phrase: &str, values: &[&str]) -> Vec<RawRating> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| RawRating::new(phrase, format!("r{i}"), v.parse().unwrap()))
            .collect()
    }

    #[test]
    fn gold_filters() {
        let mut all = ratings("nurse", &["-2", "-2", "-2", "-2", "-2"]);
        all.extend(ratings("few", &["1", "1", "1", "1"]));
        all.extend(ratings("junk", &["X", "X", "X", "X", "1", "2"]));
        all.extend(ratings("tie", &["X", "X", "-1", "-1", "0", "1"]));
        let agg = aggregate_gold_detailed::<f64>(&all, &BTreeMap::new());
        assert_eq!((agg.dropped_few_raters, agg.dropped_meaningless), (1, 1));
        assert_eq!(agg.gold.len(), 2);
        assert_eq!(agg.gold[0].phrase_id, "nurse");
        assert_eq!(agg.gold[0].mean_score, -2.0);
        assert_eq!(agg.gold[1].mean_score, -0.25);
        assert_eq!(agg.gold[1].n_raters, 6);
    }

    #[test]
    fn rating_parse() {
        assert!("3".parse::<RatingValue>().is_err());
        assert_eq!("x".parse::<RatingValue>(), Ok(RatingValue::Meaningless));
        let dup = "p\tr1\t1\np\tr1\t2\n";
        assert!(parse_ratings(dup.as_bytes(), "d").is_err());
    }

    #[test]
    fn agreement_extremes() {
        let unanimous = ratings("a", &["1", "1", "1"]);
        assert_eq!(majority_agreement::<f64>(&unanimous), Some(1.0));
        let mut split = ratings("a", &["1", "-1"]);
        split.extend(ratings("b", &["X", "2"]));
        assert_eq!(majority_agreement::<f64>(&split), Some(0.0));
        assert_eq!(majority_agreement::<f64>(&ratings("a", &["1"])), None);
    }

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let up: Vec<f64> = x.iter().map(|v: &f64| v.exp()).collect();
        let down: Vec<f64> = x.iter().map(|v| -v * v).collect();
        assert!((spearman(&x, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &down).unwrap() + 1.0).abs() < 1e-12);
        assert!(spearman(&x, &[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert_eq!(mid_ranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn auc_basics() {
        use Label::*;
        assert_eq!(roc_auc(&[0.1, 0.2, 0.8, 0.9], &[Neg, Neg, Pos, Pos]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.5; 4], &[Neg, Pos, Pos, Neg]).unwrap(), 0.5);
        assert!(roc_auc(&[0.1, 0.2], &[Pos, Pos]).is_err());
        assert_eq!(roc_auc(&[0.1f32, 0.4, 0.35, 0.8], &[Neg, Neg, Pos, Pos]).unwrap(), 0.75);
    }

    fn gold(rows: &[(&str, f64)]) -> Vec<GoldRating<f64>> {
        rows.iter()
            .map(|(id, m)| GoldRating {
                phrase_id: id.to_string(),
                phrase_text: id.to_string(),
                mean_score: *m,
                n_raters: 5,
            })
            .collect()
    }

    fn set(rows: &[(&str, f64)]) -> ScoredSet<f64> {
        rows.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn accuracy_and_coverage() {
        let g = gold(&[("a", 1.0), ("b", -1.2), ("c", 0.0), ("d", 2.0)]);
        let same = set(&[("a", 0.3), ("b", -2.0), ("c", 5.0)]);
        let flipped = set(&[("a", -0.3), ("b", 2.0)]);
        assert_eq!(sign_accuracy(&same, &g, 0.0, ThresholdTie::Incorrect).unwrap(), 1.0);
        assert_eq!(sign_accuracy(&flipped, &g, 0.0, ThresholdTie::Incorrect).unwrap(), 0.0);
        let tie = set(&[("a", 0.0), ("b", -1.0)]);
        assert_eq!(sign_accuracy(&tie, &g, 0.0, ThresholdTie::Incorrect).unwrap(), 0.5);
        assert_eq!(sign_accuracy(&tie, &g, 0.0, ThresholdTie::HalfCredit).unwrap(), 0.75);
        assert!(sign_accuracy(&set(&[("c", 1.0)]), &g, 0.0, ThresholdTie::Incorrect).is_err());
        assert_eq!(coverage(&same, &g), Coverage { covered: 3, total: 4 });
        assert_eq!(coverage(&set(&[]), &g).fraction::<f64>(), 0.0);
    }

    #[test]
    fn quadrants() {
        assert_eq!(quadrant(1.0, 1.0), 1);
        assert_eq!(quadrant(-1.0, 1.0), 2);
        assert_eq!(quadrant(-1.0, -1.0), 3);
        assert_eq!(quadrant(1.0, -1.0), 4);
        assert_eq!(quadrant(0.0, -1.0), 0);
    }
}
