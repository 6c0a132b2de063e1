//! Name/gender dictionary, verb lexicon and action-phrase extraction.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use crate::corpus_io::{Pos, Sentence, TagMap};
use crate::error::{Error, Result};
use crate::tsv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Male,
    Female,
    Unknown,
}

impl Gender {
    pub fn is_known(self) -> bool {
        self != Gender::Unknown
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "MALE",
            Gender::Female => "FEMALE",
            Gender::Unknown => "UNKNOWN",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How names present on both lists are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ConflictPolicy {
    /// Remove the name from both lists; it becomes [`Gender::Unknown`].
    #[default]
    DropBoth,
    /// Keep the name on the side whose count is at least `ratio` times the
    /// other side's count; drop it otherwise. Both lists must carry counts.
    Dominance { ratio: f64 },
}

/// A parsed name list: `name` or `name<TAB>count` per line.
#[derive(Debug, Clone, Default)]
pub struct NameList {
    entries: BTreeMap<String, Option<u64>>,
}

impl NameList {
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        NameList {
            entries: names
                .into_iter()
                .map(|n| (n.as_ref().trim().to_lowercase(), None))
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_reader(tsv::open(path)?, &tsv::source_name(path))
    }

    pub fn from_reader<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for line in tsv::numbered_lines(reader, source_name) {
            let (line_no, line) = line?;
            let mut cols = line.split('\t');
            let name = cols.next().unwrap_or("").trim().to_lowercase();
            let count = match cols.next() {
                Some(raw) => Some(tsv::parse_number::<u64>(raw, "name count", source_name, line_no)?),
                None => None,
            };
            if cols.next().is_some() {
                return Err(Error::parse(
                    source_name,
                    line_no,
                    "expected `name` or `name<TAB>count`",
                ));
            }
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::parse(source_name, line_no, format!("invalid name {name:?}")));
            }
            // repeated names accumulate their counts
            match entries.entry(name) {
                Entry::Vacant(slot) => {
                    slot.insert(count);
                }
                Entry::Occupied(mut slot) => {
                    if let (Some(total), Some(c)) = (slot.get_mut().as_mut(), count) {
                        *total += c;
                    }
                }
            }
        }
        if entries.is_empty() {
            return Err(Error::Config(format!("name list {source_name} is empty")));
        }
        Ok(NameList { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameGenderLexicon {
    male: BTreeSet<String>,
    female: BTreeSet<String>,
    conflicts: BTreeSet<String>,
}

impl NameGenderLexicon {
    pub fn from_lists<I, J, S, T>(male: I, female: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        Self::resolve(
            &NameList::from_names(male),
            &NameList::from_names(female),
            ConflictPolicy::DropBoth,
        )
        .expect("drop-both policy never fails")
    }

    pub fn resolve(male: &NameList, female: &NameList, policy: ConflictPolicy) -> Result<Self> {
        let mut lex = NameGenderLexicon::default();
        for (name, count) in &male.entries {
            match female.entries.get(name) {
                None => {
                    lex.male.insert(name.clone());
                }
                Some(female_count) => match policy {
                    ConflictPolicy::DropBoth => {
                        lex.conflicts.insert(name.clone());
                    }
                    ConflictPolicy::Dominance { ratio } => {
                        let (Some(m), Some(f)) = (*count, *female_count) else {
                            return Err(Error::Config(format!(
                                "dominance policy needs counts on both lists for {name:?}"
                            )));
                        };
                        if m as f64 >= ratio * f as f64 && m > f {
                            lex.male.insert(name.clone());
                        } else if f as f64 >= ratio * m as f64 && f > m {
                            lex.female.insert(name.clone());
                        } else {
                            lex.conflicts.insert(name.clone());
                        }
                    }
                },
            }
        }
        for name in female.entries.keys() {
            if !male.entries.contains_key(name) {
                lex.female.insert(name.clone());
            }
        }
        Ok(lex)
    }

    pub fn male_names(&self) -> &BTreeSet<String> {
        &self.male
    }

    pub fn female_names(&self) -> &BTreeSet<String> {
        &self.female
    }

    /// Names found on both input lists that were not assigned to either side.
    pub fn conflicts(&self) -> &BTreeSet<String> {
        &self.conflicts
    }

    pub fn guess_gender(&self, first_name: &str) -> Gender {
        let name = first_name.trim().to_lowercase();
        if self.male.contains(&name) {
            Gender::Male
        } else if self.female.contains(&name) {
            Gender::Female
        } else {
            Gender::Unknown
        }
    }
}

pub fn load_name_lexicon(male_list: &Path, female_list: &Path) -> Result<NameGenderLexicon> {
    NameGenderLexicon::resolve(
        &NameList::load(male_list)?,
        &NameList::load(female_list)?,
        ConflictPolicy::DropBoth,
    )
}

pub fn guess_gender(first_name: &str, lexicon: &NameGenderLexicon) -> Gender {
    lexicon.guess_gender(first_name)
}

/// Per-lemma part-of-speech tag frequencies (`lemma<TAB>pos<TAB>count`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagCounts {
    counts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl TagCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, lemma: &str, tag: &str, count: u64) {
        *self
            .counts
            .entry(lemma.to_string())
            .or_default()
            .entry(tag.to_string())
            .or_default() += count;
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_reader(tsv::open(path)?, &tsv::source_name(path))
    }

    pub fn from_reader<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut out = TagCounts::new();
        for line in tsv::numbered_lines(reader, source_name) {
            let (line_no, line) = line?;
            let f = tsv::fields(&line, 3, source_name, line_no)?;
            let count = tsv::parse_number::<u64>(f[2], "count", source_name, line_no)?;
            out.add(&f[0].trim().to_lowercase(), f[1].trim(), count);
        }
        Ok(out)
    }

    /// Tallies coarse tags over annotated sentences.
    pub fn from_sentences<'a, I>(sentences: I) -> Self
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        let mut out = TagCounts::new();
        for s in sentences {
            out.observe(s);
        }
        out
    }

    pub fn observe(&mut self, sentence: &Sentence) {
        for t in &sentence.tokens {
            self.add(&t.lemma, t.pos.as_str(), 1);
        }
    }

    pub fn merge(&mut self, other: TagCounts) {
        for (lemma, tags) in other.counts {
            for (tag, c) in tags {
                self.add(&lemma, &tag, c);
            }
        }
    }

    pub fn lemmas(&self) -> impl Iterator<Item = (&str, &BTreeMap<String, u64>)> {
        self.counts.iter().map(|(l, t)| (l.as_str(), t))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (lemma, tags) in &self.counts {
            for (tag, c) in tags {
                out.push_str(&format!("{lemma}\t{tag}\t{c}\n"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerbLexicon {
    verbs: BTreeSet<String>,
    dominance_ratio: f64,
}

impl VerbLexicon {
    pub const DEFAULT_DOMINANCE_RATIO: f64 = 2.0;

    pub fn from_verbs<I, S>(verbs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        VerbLexicon {
            verbs: verbs.into_iter().map(|v| v.as_ref().to_lowercase()).collect(),
            dominance_ratio: Self::DEFAULT_DOMINANCE_RATIO,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let name = tsv::source_name(path);
        let mut verbs = Vec::new();
        for line in tsv::numbered_lines(tsv::open(path)?, &name) {
            verbs.push(line?.1.trim().to_string());
        }
        Ok(Self::from_verbs(verbs))
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.verbs.contains(lemma)
    }

    pub fn verbs(&self) -> &BTreeSet<String> {
        &self.verbs
    }

    pub fn len(&self) -> usize {
        self.verbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty()
    }

    pub fn dominance_ratio(&self) -> f64 {
        self.dominance_ratio
    }

    pub fn to_text(&self) -> String {
        self.verbs.iter().map(|v| format!("{v}\n")).collect()
    }
}

/// Keeps lemmas whose verb frequency exceeds `dominance_ratio` times their
/// most frequent non-verb tag. Tags mapping to [`Pos::Verb`] are summed into
/// one verb count; every other tag is compared individually.
pub fn build_verb_lexicon(tag_counts: &TagCounts, tag_map: &TagMap, dominance_ratio: f64) -> Result<VerbLexicon> {
    if !dominance_ratio.is_finite() || dominance_ratio < 1.0 {
        return Err(Error::Config(format!(
            "dominance ratio must be >= 1, got {dominance_ratio}"
        )));
    }
    let mut verbs = BTreeSet::new();
    for (lemma, tags) in tag_counts.lemmas() {
        let mut verb = 0u64;
        let mut other_max = 0u64;
        for (tag, &count) in tags {
            if tag_map.coarse(tag) == Pos::Verb {
                verb += count;
            } else {
                other_max = other_max.max(count);
            }
        }
        if verb > 0 && verb as f64 > dominance_ratio * other_max as f64 {
            verbs.insert(lemma.to_string());
        }
    }
    Ok(VerbLexicon { verbs, dominance_ratio })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActionPhrase {
    pub lemmas: Vec<String>,
    pub source_id: String,
}

impl ActionPhrase {
    pub fn text(&self) -> String {
        self.lemmas.join(" ")
    }
}

/// `concept_id<TAB>concept_text` lines.
pub fn load_concepts(path: &Path) -> Result<Vec<(String, String)>> {
    let name = tsv::source_name(path);
    read_concepts(tsv::open(path)?, &name)
}

pub fn read_concepts<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for line in tsv::numbered_lines(reader, source_name) {
        let (line_no, line) = line?;
        let f = tsv::fields(&line, 2, source_name, line_no)?;
        if f[0].is_empty() {
            return Err(Error::parse(source_name, line_no, "empty concept id"));
        }
        out.push((f[0].to_string(), f[1].to_string()));
    }
    Ok(out)
}

/// Concepts with at least two tokens whose first token is a known verb, in
/// input order. Identical lemma sequences under distinct ids are all kept.
pub fn extract_actions<I, S, T>(concepts: I, verbs: &VerbLexicon) -> Vec<ActionPhrase>
where
    I: IntoIterator<Item = (S, T)>,
    S: Into<String>,
    T: AsRef<str>,
{
    concepts
        .into_iter()
        .filter_map(|(id, text)| {
            let lemmas: Vec<String> = text.as_ref().split_whitespace().map(str::to_lowercase).collect();
            (lemmas.len() >= 2 && verbs.contains(&lemmas[0])).then(|| ActionPhrase {
                lemmas,
                source_id: id.into(),
            })
        })
        .collect()
}

/// Reads a phrase file written by [`actions_to_tsv`] (same layout as a concept file).
pub fn load_actions(path: &Path) -> Result<Vec<ActionPhrase>> {
    let name = tsv::source_name(path);
    let mut out = Vec::new();
    for (i, (id, text)) in load_concepts(path)?.into_iter().enumerate() {
        let lemmas: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
        if lemmas.is_empty() {
            return Err(Error::parse(&name, i + 1, format!("phrase {id:?} has no lemmas")));
        }
        out.push(ActionPhrase { lemmas, source_id: id });
    }
    Ok(out)
}

pub fn actions_to_tsv(actions: &[ActionPhrase]) -> String {
    actions
        .iter()
        .map(|a| format!("{}\t{}\n", a.source_id, a.text()))
        .collect()
}
