//! Readers for the two annotated corpus formats.
//!
//! * Vertical documents: one `surface<TAB>pos<TAB>lemma` token per line, a blank
//!   line closes a sentence and `#doc <id>` opens a document.
//! * Tweet records: `record_id<TAB>author_name<TAB>tokens` where every token is
//!   `surface|pos|lemma` and the pseudo-token `</s>` separates sentences.
//!
//! Both readers are lazy iterators and stop after the first error. Fine-grained
//! tags are folded into [`Pos`] through a [`TagMap`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tsv;

/// Pseudo-token separating sentences inside a tweet record.
pub const SENTENCE_BREAK: &str = "</s>";

/// Lemma placeholders meaning "not annotated"; the lowercased surface is used instead.
const MISSING_LEMMA: [&str; 2] = ["_", "<unknown>"];

const DEFAULT_TAG_MAP: &str = include_str!("../data/default_tagmap.tsv");
const DEFAULT_WORDLIST: &str = include_str!("../data/default_english_words.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Verb,
    Pronoun,
    ProperNoun,
    Other,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Verb, Pos::Pronoun, Pos::ProperNoun, Pos::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Verb => "VERB",
            Pos::Pronoun => "PRONOUN",
            Pos::ProperNoun => "PROPER_NOUN",
            Pos::Other => "OTHER",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Pos::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown coarse tag {s:?}"))
    }
}

/// Fine-grained tagset to coarse [`Pos`] mapping. The coarse tag names map to
/// themselves, unknown tags map to [`Pos::Other`].
#[derive(Debug, Clone)]
pub struct TagMap {
    map: HashMap<String, Pos>,
}

impl Default for TagMap {
    fn default() -> Self {
        Self::from_reader(DEFAULT_TAG_MAP.as_bytes(), "<default tag map>").expect("bundled tag map is well formed")
    }
}

impl TagMap {
    /// A map that only understands the four coarse tag names.
    pub fn coarse_only() -> Self {
        TagMap { map: HashMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_reader(tsv::open(path)?, &tsv::source_name(path))
    }

    /// Reads `fine_tag<TAB>coarse_tag` lines. Lines starting with `#` that
    /// contain no tab are comments.
    pub fn from_reader<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for line in tsv::numbered_lines(reader, source_name) {
            let (line_no, line) = line?;
            if line.starts_with('#') && !line.contains('\t') {
                continue;
            }
            let f = tsv::fields(&line, 2, source_name, line_no)?;
            let coarse: Pos = f[1]
                .trim()
                .parse()
                .map_err(|e: String| Error::parse(source_name, line_no, e))?;
            map.insert(f[0].trim().to_string(), coarse);
        }
        Ok(TagMap { map })
    }

    pub fn insert(&mut self, fine: impl Into<String>, coarse: Pos) {
        self.map.insert(fine.into(), coarse);
    }

    pub fn coarse(&self, tag: &str) -> Pos {
        if let Some(pos) = self.map.get(tag) {
            return *pos;
        }
        tag.parse().unwrap_or(Pos::Other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotatedToken {
    pub surface: String,
    /// Lowercased, non-empty, no whitespace.
    pub lemma: String,
    pub pos: Pos,
}

impl AnnotatedToken {
    /// Lowercases `lemma`. Returns `None` when the lemma is empty or contains
    /// whitespace.
    pub fn new(surface: impl Into<String>, lemma: &str, pos: Pos) -> Option<Self> {
        let lemma = lemma.to_lowercase();
        if lemma.is_empty() || lemma.chars().any(char::is_whitespace) {
            return None;
        }
        Some(AnnotatedToken {
            surface: surface.into(),
            lemma,
            pos,
        })
    }

    /// Identity-lemma fallback for unannotated text: lemma := lowercased surface.
    pub fn unlemmatized(surface: &str, pos: Pos) -> Option<Self> {
        Self::new(surface, surface, pos)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<AnnotatedToken>,
}

impl Sentence {
    pub fn new(tokens: Vec<AnnotatedToken>) -> Self {
        Sentence { tokens }
    }

    /// Builds a sentence from whitespace-separated raw text using the
    /// identity-lemma fallback; every token gets [`Pos::Other`].
    pub fn from_plain_text(text: &str) -> Self {
        Sentence {
            tokens: text
                .split_whitespace()
                .filter_map(|w| AnnotatedToken::unlemmatized(w, Pos::Other))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.lemma.as_str())
    }

    /// Vertical-format rendering, terminated by the blank sentence separator.
    pub fn to_vertical(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(&t.surface);
            out.push('\t');
            out.push_str(t.pos.as_str());
            out.push('\t');
            out.push_str(&t.lemma);
            out.push('\n');
        }
        out.push('\n');
        out
    }
}

/// A sentence read from a vertical file together with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentSentence {
    /// Identifier from the enclosing `#doc` line, if any.
    pub doc_id: Option<Arc<str>>,
    /// Position of the sentence in its document (or in the file when no
    /// document header precedes it).
    pub index: usize,
    pub sentence: Sentence,
}

impl DocumentSentence {
    /// Key used for per-record deduplication on the document path.
    pub fn record_key(&self) -> String {
        match &self.doc_id {
            Some(id) => id.to_string(),
            None => String::new(),
        }
    }
}

/// Lazy reader over the vertical document format.
pub struct DocumentStream<'a, R> {
    lines: std::io::Lines<R>,
    tag_map: &'a TagMap,
    source_name: String,
    line_no: usize,
    doc_id: Option<Arc<str>>,
    next_index: usize,
    fallback_lemmas: usize,
    done: bool,
}

pub fn parse_document_stream<R: BufRead>(reader: R, tag_map: &TagMap) -> DocumentStream<'_, R> {
    DocumentStream::new(reader, tag_map, "<input>")
}

impl<'a, R: BufRead> DocumentStream<'a, R> {
    pub fn new(reader: R, tag_map: &'a TagMap, source_name: &str) -> Self {
        DocumentStream {
            lines: reader.lines(),
            tag_map,
            source_name: source_name.to_string(),
            line_no: 0,
            doc_id: None,
            next_index: 0,
            fallback_lemmas: 0,
            done: false,
        }
    }

    /// Tokens whose lemma column was a placeholder and fell back to the surface.
    pub fn fallback_lemmas(&self) -> usize {
        self.fallback_lemmas
    }

    fn emit(&mut self, tokens: &mut Vec<AnnotatedToken>) -> Option<DocumentSentence> {
        if tokens.is_empty() {
            return None;
        }
        let index = self.next_index;
        self.next_index += 1;
        Some(DocumentSentence {
            doc_id: self.doc_id.clone(),
            index,
            sentence: Sentence::new(std::mem::take(tokens)),
        })
    }

    fn fail(&mut self, message: impl Into<String>) -> Option<Result<DocumentSentence>> {
        self.done = true;
        Some(Err(Error::parse(&self.source_name, self.line_no, message)))
    }
}

fn doc_header(line: &str) -> Option<&str> {
    let rest = line.strip_prefix("#doc")?;
    if line.contains('\t') {
        return None;
    }
    if rest.is_empty() {
        Some("")
    } else if rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

impl<R: BufRead> Iterator for DocumentStream<'_, R> {
    type Item = Result<DocumentSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut tokens = Vec::new();
        loop {
            let line = match self.lines.next() {
                None => {
                    self.done = true;
                    return self.emit(&mut tokens).map(Ok);
                }
                Some(Err(e)) => {
                    self.line_no += 1;
                    return self.fail(e.to_string());
                }
                Some(Ok(line)) => line,
            };
            self.line_no += 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);

            if line.trim().is_empty() {
                if let Some(s) = self.emit(&mut tokens) {
                    return Some(Ok(s));
                }
                continue;
            }
            if let Some(id) = doc_header(line) {
                let finished = self.emit(&mut tokens);
                self.doc_id = Some(Arc::from(id));
                self.next_index = 0;
                if let Some(s) = finished {
                    // the header belongs to the next sentence, which starts fresh
                    return Some(Ok(s));
                }
                continue;
            }

            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return self.fail(format!(
                    "expected 3 tab-separated columns (surface, pos, lemma), found {}",
                    cols.len()
                ));
            }
            let (surface, tag, lemma) = (cols[0], cols[1], cols[2]);
            if surface.is_empty() {
                return self.fail("empty surface form");
            }
            let pos = self.tag_map.coarse(tag);
            let token = if MISSING_LEMMA.contains(&lemma) {
                self.fallback_lemmas += 1;
                AnnotatedToken::unlemmatized(surface, pos)
            } else {
                AnnotatedToken::new(surface, lemma, pos)
            };
            match token {
                Some(t) => tokens.push(t),
                None => return self.fail(format!("invalid lemma {lemma:?}")),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub record_id: String,
    /// The full name field as given; identifies the user.
    pub author_name: String,
    /// First whitespace-delimited word of the name, lowercased.
    pub author_first_name: String,
    pub sentences: Vec<Sentence>,
}

impl TweetRecord {
    pub fn tokens(&self) -> impl Iterator<Item = &AnnotatedToken> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn to_line(&self) -> String {
        let mut text = Vec::new();
        for (i, s) in self.sentences.iter().enumerate() {
            if i > 0 {
                text.push(SENTENCE_BREAK.to_string());
            }
            for t in &s.tokens {
                text.push(format!("{}|{}|{}", t.surface, t.pos, t.lemma));
            }
        }
        format!("{}\t{}\t{}", self.record_id, self.author_name, text.join(" "))
    }
}

pub fn first_name(author_name: &str) -> String {
    author_name
        .split_whitespace()
        .next()
        .map(str::to_lowercase)
        .unwrap_or_default()
}

/// Lazy reader over tweet-record lines.
pub struct TweetStream<'a, R> {
    lines: std::io::Lines<R>,
    tag_map: &'a TagMap,
    source_name: String,
    line_no: usize,
    seen: HashSet<String>,
    fallback_lemmas: usize,
    done: bool,
}

pub fn parse_tweet_stream<R: BufRead>(reader: R, tag_map: &TagMap) -> TweetStream<'_, R> {
    TweetStream::new(reader, tag_map, "<input>")
}

impl<'a, R: BufRead> TweetStream<'a, R> {
    pub fn new(reader: R, tag_map: &'a TagMap, source_name: &str) -> Self {
        TweetStream {
            lines: reader.lines(),
            tag_map,
            source_name: source_name.to_string(),
            line_no: 0,
            seen: HashSet::new(),
            fallback_lemmas: 0,
            done: false,
        }
    }

    pub fn fallback_lemmas(&self) -> usize {
        self.fallback_lemmas
    }

    fn parse_line(&mut self, line: &str) -> std::result::Result<TweetRecord, String> {
        let mut parts = line.splitn(3, '\t');
        let (Some(record_id), Some(author_name), Some(text)) = (parts.next(), parts.next(), parts.next()) else {
            return Err("missing field: expected record_id, author_name and text".into());
        };
        if record_id.is_empty() {
            return Err("empty record_id".into());
        }
        if !self.seen.insert(record_id.to_string()) {
            return Err(format!("duplicate record_id {record_id:?}"));
        }

        let mut sentences = Vec::new();
        let mut current = Vec::new();
        for raw in text.split_whitespace() {
            if raw == SENTENCE_BREAK {
                if !current.is_empty() {
                    sentences.push(Sentence::new(std::mem::take(&mut current)));
                }
                continue;
            }
            // split from the right so surfaces such as ":|" survive
            let mut pieces = raw.rsplitn(3, '|');
            let (Some(lemma), Some(tag), Some(surface)) = (pieces.next(), pieces.next(), pieces.next()) else {
                return Err(format!("malformed token {raw:?}, expected surface|pos|lemma"));
            };
            if surface.is_empty() {
                return Err(format!("empty surface in token {raw:?}"));
            }
            let pos = self.tag_map.coarse(tag);
            let token = if MISSING_LEMMA.contains(&lemma) {
                self.fallback_lemmas += 1;
                AnnotatedToken::unlemmatized(surface, pos)
            } else {
                AnnotatedToken::new(surface, lemma, pos)
            };
            current.push(token.ok_or_else(|| format!("invalid lemma in token {raw:?}"))?);
        }
        if !current.is_empty() {
            sentences.push(Sentence::new(current));
        }

        Ok(TweetRecord {
            record_id: record_id.to_string(),
            author_name: author_name.trim().to_string(),
            author_first_name: first_name(author_name),
            sentences,
        })
    }
}

impl<R: BufRead> Iterator for TweetStream<'_, R> {
    type Item = Result<TweetRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let line = match self.lines.next() {
                None => {
                    self.done = true;
                    return None;
                }
                Some(Err(e)) => {
                    self.line_no += 1;
                    self.done = true;
                    return Some(Err(Error::parse(&self.source_name, self.line_no, e.to_string())));
                }
                Some(Ok(line)) => line,
            };
            self.line_no += 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            return Some(self.parse_line(line).map_err(|message| {
                self.done = true;
                Error::parse(&self.source_name, self.line_no, message)
            }));
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnglishFilterConfig {
    wordlist: HashSet<String>,
    max_nonenglish_ratio: f64,
}

impl EnglishFilterConfig {
    pub const DEFAULT_MAX_NONENGLISH_RATIO: f64 = 0.20;

    pub fn new(wordlist: HashSet<String>, max_nonenglish_ratio: f64) -> Result<Self> {
        if wordlist.is_empty() {
            return Err(Error::Config("English word list is empty".into()));
        }
        if !(0.0..=1.0).contains(&max_nonenglish_ratio) {
            return Err(Error::Config(format!(
                "max non-English ratio must lie in [0, 1], got {max_nonenglish_ratio}"
            )));
        }
        Ok(EnglishFilterConfig {
            wordlist: wordlist.into_iter().map(|w| w.to_lowercase()).collect(),
            max_nonenglish_ratio,
        })
    }

    /// The small word list bundled with the crate, with the default ratio.
    pub fn bundled() -> Self {
        let words = DEFAULT_WORDLIST
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect();
        Self::new(words, Self::DEFAULT_MAX_NONENGLISH_RATIO).expect("bundled word list is non-empty")
    }

    pub fn max_nonenglish_ratio(&self) -> f64 {
        self.max_nonenglish_ratio
    }

    pub fn with_ratio(mut self, ratio: f64) -> Result<Self> {
        self.max_nonenglish_ratio = ratio;
        Self::new(self.wordlist, ratio)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.wordlist.contains(word)
    }
}

pub fn load_wordlist(path: &Path) -> Result<HashSet<String>> {
    let name = tsv::source_name(path);
    let mut words = HashSet::new();
    for line in tsv::numbered_lines(tsv::open(path)?, &name) {
        let (_, line) = line?;
        words.insert(line.trim().to_lowercase());
    }
    Ok(words)
}

fn is_word(surface: &str) -> bool {
    !surface.is_empty() && surface.chars().all(char::is_alphabetic)
}

/// Running-word ratio rule: only purely alphabetic surfaces count, so
/// hashtags, mentions, emoticons and punctuation are ignored on both sides.
pub fn passes_english_filter(record: &TweetRecord, config: &EnglishFilterConfig) -> bool {
    let mut words = 0usize;
    let mut foreign = 0usize;
    for token in record.tokens().filter(|t| is_word(&t.surface)) {
        words += 1;
        if !config.contains(&token.surface.to_lowercase()) {
            foreign += 1;
        }
    }
    if words == 0 {
        return true;
    }
    (foreign as f64 / words as f64) <= config.max_nonenglish_ratio
}
