//! Per-phrase gender tallies and bias scores.
//!
//! For a phrase seen `m` times in male and `f` times in female context
//! (`n = m + f`), with corpus totals `M = Σm`, `F = Σf` and `p = M / (M + F)`,
//! the bias score is the binomial standardization of `m`:
//!
//! ```text
//! s = (m - n·p) / sqrt(n·p·(1 - p))
//! ```
//!
//! Positive scores lean masculine. Substituting `p` gives the equivalent
//! `s = (m·F - f·M) / sqrt(n·M·F)`, which is what [`normalized_bias`]
//! evaluates: the numerator is an exact integer, so swapping the genders
//! negates the score bit for bit.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::ops::{Add, AddAssign};
use std::path::Path;

use crate::attribution::GenderedOccurrence;
use crate::error::{Error, Result};
use crate::lexicons::Gender;
use crate::matcher::PhraseId;
use crate::scalar::{strict_sign, Real};
use crate::tsv;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct GenderedCount {
    pub m: u64,
    pub f: u64,
}

impl GenderedCount {
    pub fn new(m: u64, f: u64) -> Self {
        GenderedCount { m, f }
    }

    pub fn n(&self) -> u64 {
        self.m + self.f
    }

    pub fn record(&mut self, gender: Gender) {
        match gender {
            Gender::Male => self.m += 1,
            Gender::Female => self.f += 1,
            Gender::Unknown => {}
        }
    }

    pub fn swapped(self) -> Self {
        GenderedCount { m: self.f, f: self.m }
    }
}

impl Add for GenderedCount {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        GenderedCount {
            m: self.m + rhs.m,
            f: self.f + rhs.f,
        }
    }
}

impl AddAssign for GenderedCount {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Corpus-wide male and female totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringContext {
    pub male_total: u64,
    pub female_total: u64,
}

impl ScoringContext {
    pub fn new(male_total: u64, female_total: u64) -> Self {
        ScoringContext {
            male_total,
            female_total,
        }
    }

    pub fn n(&self) -> u64 {
        self.male_total + self.female_total
    }

    /// Male proportion `M / N`; `None` when there are no occurrences.
    pub fn p<T: Real>(&self) -> Option<T> {
        (self.n() > 0).then(|| T::from_count(self.male_total) / T::from_count(self.n()))
    }

    /// Both genders present, i.e. `0 < p < 1`.
    pub fn is_degenerate(&self) -> bool {
        self.male_total == 0 || self.female_total == 0
    }
}

/// Tallies keyed by phrase. Merging is componentwise addition, so partial
/// tables from corpus partitions can be combined in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable<K: Ord> {
    counts: BTreeMap<K, GenderedCount>,
}

impl<K: Ord> Default for CountTable<K> {
    fn default() -> Self {
        CountTable {
            counts: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> CountTable<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K, count: GenderedCount) {
        *self.counts.entry(key).or_default() += count;
    }

    pub fn merge(&mut self, other: CountTable<K>) {
        for (k, c) in other.counts {
            self.add(k, c);
        }
    }

    pub fn get(&self, key: &K) -> Option<GenderedCount> {
        self.counts.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &GenderedCount)> {
        self.counts.iter()
    }

    /// Totals over every phrase in the table; `None` for an empty table.
    pub fn context(&self) -> Option<ScoringContext> {
        if self.counts.is_empty() {
            return None;
        }
        let total = self.counts.values().fold(GenderedCount::default(), |a, &b| a + b);
        Some(ScoringContext::new(total.m, total.f))
    }

    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> CountTable<J> {
        let mut out = CountTable::new();
        for (k, c) in &self.counts {
            out.add(f(k), *c);
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, GenderedCount)> for CountTable<K> {
    fn from_iter<I: IntoIterator<Item = (K, GenderedCount)>>(iter: I) -> Self {
        let mut t = CountTable::new();
        for (k, c) in iter {
            t.add(k, c);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub counts: CountTable<PhraseId>,
    /// `None` for an empty occurrence stream.
    pub context: Option<ScoringContext>,
}

/// Sums occurrences per phrase and gender. With `dedup_per_record`, a phrase
/// counts at most once per (record, gender).
pub fn aggregate<'a, I>(occurrences: I, dedup_per_record: bool) -> Aggregate
where
    I: IntoIterator<Item = &'a GenderedOccurrence>,
{
    let mut counts = CountTable::new();
    let mut seen: HashSet<(&str, PhraseId, Gender)> = HashSet::new();
    for occ in occurrences {
        if dedup_per_record && !seen.insert((occ.record_id(), occ.phrase_id(), occ.gender())) {
            continue;
        }
        let mut c = GenderedCount::default();
        c.record(occ.gender());
        counts.add(occ.phrase_id(), c);
    }
    let context = counts.context();
    Aggregate { counts, context }
}

pub fn normalized_bias<T: Real>(count: GenderedCount, ctx: &ScoringContext) -> Result<T> {
    if ctx.is_degenerate() {
        return Err(Error::DegenerateContext(format!(
            "male proportion must lie strictly between 0 and 1 (M = {}, F = {})",
            ctx.male_total, ctx.female_total
        )));
    }
    if count.n() == 0 {
        return Err(Error::UndefinedScore("phrase has no occurrences".into()));
    }
    let (m, f) = (count.m as i128, count.f as i128);
    let (big_m, big_f) = (ctx.male_total as i128, ctx.female_total as i128);
    let numerator = T::from_i128(m * big_f - f * big_m).expect("numerator representable");
    let variance = T::from_count(count.n()) * T::from_count(ctx.male_total) * T::from_count(ctx.female_total);
    Ok(numerator / variance.sqrt())
}

/// Standardizes with the population (divide by N) standard deviation.
pub fn zscore_population<K: Clone, T: Real>(scores: &[(K, T)]) -> Result<Vec<(K, T)>> {
    if scores.len() < 2 {
        return Err(Error::DegenerateDistribution(format!(
            "z-scores need at least 2 values, got {}",
            scores.len()
        )));
    }
    let len = T::from_usize(scores.len()).expect("length representable");
    let mean = scores.iter().map(|(_, s)| *s).sum::<T>() / len;
    let var = scores.iter().map(|(_, s)| (*s - mean) * (*s - mean)).sum::<T>() / len;
    let sd = var.sqrt();
    if sd.is_nan() || sd <= T::zero() {
        return Err(Error::DegenerateDistribution("all scores are equal".into()));
    }
    Ok(scores.iter().map(|(k, s)| (k.clone(), (*s - mean) / sd)).collect())
}

/// Scores keyed by phrase id.
pub type ScoredSet<T> = BTreeMap<String, T>;

/// Mean of the two scores on the phrases present in both sets.
pub fn combine_average<T: Real>(a: &ScoredSet<T>, b: &ScoredSet<T>) -> ScoredSet<T> {
    a.iter()
        .filter_map(|(k, za)| b.get(k).map(|zb| (k.clone(), (*za + *zb) * T::half())))
        .collect()
}

/// [`combine_average`] restricted to phrases whose two scores have the same
/// strict sign; exact zeros are signless and dropped.
pub fn matching_signs_filter<T: Real>(a: &ScoredSet<T>, b: &ScoredSet<T>) -> ScoredSet<T> {
    a.iter()
        .filter_map(|(k, za)| {
            let zb = b.get(k)?;
            let sa = strict_sign(*za)?;
            (strict_sign(*zb)? == sa).then(|| (k.clone(), (*za + *zb) * T::half()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasScore<T> {
    pub phrase_id: String,
    pub phrase_text: String,
    pub m: u64,
    pub f: u64,
    /// `m / n`.
    pub raw: T,
    pub s: T,
    pub z: T,
}

impl<T: Real> BiasScore<T> {
    pub fn n(&self) -> u64 {
        self.m + self.f
    }
}

pub const SCORE_HEADER: &str = "phrase_id\tphrase_text\tm\tf\traw\ts\tz";
pub const COUNT_HEADER: &str = "phrase_id\tphrase_text\tm\tf";

/// Scores every phrase with at least `min_occurrences` occurrences, sorted by
/// phrase id. The context totals cover the whole table. An empty table gives
/// an empty result.
pub fn score_table<T: Real>(
    counts: &CountTable<String>,
    texts: &BTreeMap<String, String>,
    min_occurrences: u64,
) -> Result<Vec<BiasScore<T>>> {
    let Some(ctx) = counts.context() else {
        return Ok(Vec::new());
    };
    let min_occurrences = min_occurrences.max(1);
    let mut rows = Vec::new();
    for (id, c) in counts.iter().filter(|(_, c)| c.n() >= min_occurrences) {
        let s = normalized_bias::<T>(*c, &ctx)?;
        rows.push(BiasScore {
            phrase_id: id.clone(),
            phrase_text: texts.get(id).cloned().unwrap_or_default(),
            m: c.m,
            f: c.f,
            raw: T::from_count(c.m) / T::from_count(c.n()),
            s,
            z: T::nan(),
        });
    }
    if rows.is_empty() {
        return Ok(rows);
    }
    let pairs: Vec<(usize, T)> = rows.iter().map(|r| r.s).enumerate().collect();
    for (i, z) in zscore_population(&pairs)? {
        rows[i].z = z;
    }
    Ok(rows)
}

pub fn render_score_table<T: Real>(rows: &[BiasScore<T>]) -> String {
    let mut out = String::from(SCORE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.phrase_id, r.phrase_text, r.m, r.f, r.raw, r.s, r.z
        ));
    }
    out
}

pub fn read_score_table<T: Real>(path: &Path) -> Result<Vec<BiasScore<T>>> {
    parse_score_table(tsv::open(path)?, &tsv::source_name(path))
}

pub fn parse_score_table<T: Real, R: BufRead>(reader: R, source_name: &str) -> Result<Vec<BiasScore<T>>> {
    let mut rows = Vec::new();
    for line in tsv::numbered_lines(reader, source_name) {
        let (line_no, line) = line?;
        if line == SCORE_HEADER {
            continue;
        }
        let f = tsv::fields(&line, 7, source_name, line_no)?;
        rows.push(BiasScore {
            phrase_id: f[0].to_string(),
            phrase_text: f[1].to_string(),
            m: tsv::parse_number(f[2], "m", source_name, line_no)?,
            f: tsv::parse_number(f[3], "f", source_name, line_no)?,
            raw: tsv::parse_number(f[4], "raw", source_name, line_no)?,
            s: tsv::parse_number(f[5], "s", source_name, line_no)?,
            z: tsv::parse_number(f[6], "z", source_name, line_no)?,
        });
    }
    Ok(rows)
}

/// z-scores of a table keyed by phrase id.
pub fn z_scores<T: Real>(rows: &[BiasScore<T>]) -> ScoredSet<T> {
    rows.iter().map(|r| (r.phrase_id.clone(), r.z)).collect()
}

pub fn render_counts(counts: &CountTable<String>, texts: &BTreeMap<String, String>) -> String {
    let mut out = String::from(COUNT_HEADER);
    out.push('\n');
    for (id, c) in counts.iter() {
        let text = texts.get(id).map(String::as_str).unwrap_or("");
        out.push_str(&format!("{id}\t{text}\t{}\t{}\n", c.m, c.f));
    }
    out
}

/// Reads a counts file; phrase texts are returned alongside the table.
pub fn read_counts(path: &Path) -> Result<(CountTable<String>, BTreeMap<String, String>)> {
    let name = tsv::source_name(path);
    let mut counts = CountTable::new();
    let mut texts = BTreeMap::new();
    for line in tsv::numbered_lines(tsv::open(path)?, &name) {
        let (line_no, line) = line?;
        if line == COUNT_HEADER {
            continue;
        }
        let f = tsv::fields(&line, 4, &name, line_no)?;
        let m = tsv::parse_number(f[2], "m", &name, line_no)?;
        let fe = tsv::parse_number(f[3], "f", &name, line_no)?;
        counts.add(f[0].to_string(), GenderedCount::new(m, fe));
        texts.insert(f[0].to_string(), f[1].to_string());
    }
    Ok((counts, texts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::AttributionSource;

    fn occ(phrase: PhraseId, g: Gender, record: &str) -> GenderedOccurrence {
        GenderedOccurrence::new(phrase, g, AttributionSource::AuthorMetadata, record).unwrap()
    }

    #[test]
    fn aggregate_counts_and_context() {
        let stream = vec![
            occ(0, Gender::Male, "a"),
            occ(0, Gender::Male, "a"),
            occ(0, Gender::Male, "a"),
            occ(0, Gender::Female, "b"),
        ];
        let agg = aggregate(&stream, false);
        assert_eq!(agg.counts.get(&0), Some(GenderedCount::new(3, 1)));
        assert_eq!(agg.context, Some(ScoringContext::new(3, 1)));
        let dedup = aggregate(&stream, true);
        assert_eq!(dedup.counts.get(&0), Some(GenderedCount::new(1, 1)));
        let empty = aggregate(std::iter::empty(), false);
        assert!(empty.counts.is_empty() && empty.context.is_none());
    }

    #[test]
    fn bias_examples() {
        let s: f64 = normalized_bias(GenderedCount::new(6, 2), &ScoringContext::new(10, 10)).unwrap();
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
        let zero: f64 = normalized_bias(GenderedCount::new(5, 5), &ScoringContext::new(7, 7)).unwrap();
        assert_eq!(zero, 0.0);
        let zero: f64 = normalized_bias(GenderedCount::new(3, 1), &ScoringContext::new(300, 100)).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn bias_errors() {
        assert!(matches!(
            normalized_bias::<f64>(GenderedCount::new(1, 0), &ScoringContext::new(5, 0)),
            Err(Error::DegenerateContext(_))
        ));
        assert!(matches!(
            normalized_bias::<f64>(GenderedCount::new(0, 0), &ScoringContext::new(5, 5)),
            Err(Error::UndefinedScore(_))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let s: f32 = normalized_bias(GenderedCount::new(6, 2), &ScoringContext::new(10, 10)).unwrap();
        assert!((s - 2f32.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn zscores() {
        let z = zscore_population(&[("a", 1.0f64), ("b", 3.0)]).unwrap();
        assert_eq!(z, vec![("a", -1.0), ("b", 1.0)]);
        let again = zscore_population(&z).unwrap();
        for ((_, x), (_, y)) in z.iter().zip(&again) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(zscore_population(&[("a", 2.0f64), ("b", 2.0)]).is_err());
        assert!(zscore_population(&[("a", 2.0f64)]).is_err());
    }

    fn set(rows: &[(&str, f64)]) -> ScoredSet<f64> {
        rows.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn combination() {
        let a = set(&[("x", 1.0), ("y", 0.5), ("only_a", 3.0), ("z", 0.0), ("w", 2.0)]);
        let b = set(&[("x", 0.0), ("y", -0.5), ("z", 1.0), ("w", -2.0)]);
        let c = combine_average(&a, &b);
        assert_eq!(c.get("x"), Some(&0.5));
        assert_eq!(c.get("y"), Some(&0.0));
        assert!(!c.contains_key("only_a"));
        let m = matching_signs_filter(
            &set(&[("p", 0.5), ("q", 0.5), ("r", 0.0)]),
            &set(&[("p", 1.5), ("q", -1.5), ("r", 1.0)]),
        );
        assert_eq!(m, set(&[("p", 1.0)]));
    }

    #[test]
    fn table_round_trip() {
        let counts: CountTable<String> = [
            ("b".to_string(), GenderedCount::new(3, 1)),
            ("a".to_string(), GenderedCount::new(1, 3)),
        ]
        .into_iter()
        .collect();
        let texts = [("a".to_string(), "go bed".to_string())].into_iter().collect();
        let rows = score_table::<f64>(&counts, &texts, 1).unwrap();
        assert_eq!(rows[0].phrase_id, "a");
        assert_eq!(rows[0].phrase_text, "go bed");
        assert_eq!(rows[0].z, -1.0);
        let text = render_score_table(&rows);
        let back = parse_score_table::<f64, _>(text.as_bytes(), "t").unwrap();
        assert_eq!(back, rows);
        assert!(score_table::<f64>(&CountTable::new(), &texts, 1).unwrap().is_empty());
    }
}
