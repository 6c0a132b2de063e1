//! Gender attribution of phrase occurrences.

use crate::corpus_io::{Pos, Sentence, TweetRecord};
use crate::lexicons::{Gender, NameGenderLexicon};
use crate::matcher::{Match, PhraseId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttributionSource {
    AuthorMetadata,
    ContextHeuristic,
}

/// A phrase occurrence with a known gender. Never carries [`Gender::Unknown`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenderedOccurrence {
    phrase_id: PhraseId,
    gender: Gender,
    source: AttributionSource,
    record_id: String,
}

impl GenderedOccurrence {
    /// `None` for [`Gender::Unknown`].
    pub fn new(
        phrase_id: PhraseId,
        gender: Gender,
        source: AttributionSource,
        record_id: impl Into<String>,
    ) -> Option<Self> {
        gender.is_known().then(|| GenderedOccurrence {
            phrase_id,
            gender,
            source,
            record_id: record_id.into(),
        })
    }

    pub fn phrase_id(&self) -> PhraseId {
        self.phrase_id
    }

    pub fn gender(&self) -> Gender {
        self.gender
    }

    pub fn source(&self) -> AttributionSource {
        self.source
    }

    pub fn record_id(&self) -> &str {
        &self.record_id
    }
}

/// Every match of a record inherits the gender guessed from its author's
/// first name; records with an unknown author yield nothing.
pub fn attribute_by_author(
    record: &TweetRecord,
    matches: &[Match],
    lexicon: &NameGenderLexicon,
) -> Vec<GenderedOccurrence> {
    let gender = lexicon.guess_gender(&record.author_first_name);
    if !gender.is_known() {
        return Vec::new();
    }
    matches
        .iter()
        .filter_map(|m| {
            GenderedOccurrence::new(
                m.phrase_id,
                gender,
                AttributionSource::AuthorMetadata,
                &record.record_id,
            )
        })
        .collect()
}

/// Pronouns that carry a gender for the left-context heuristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronounRules {
    pub male: Vec<String>,
    pub female: Vec<String>,
}

impl Default for PronounRules {
    /// Nominative forms only: "he" and "she".
    fn default() -> Self {
        PronounRules {
            male: vec!["he".into()],
            female: vec!["she".into()],
        }
    }
}

impl PronounRules {
    /// Adds oblique, possessive and reflexive forms.
    pub fn extended() -> Self {
        PronounRules {
            male: ["he", "him", "his", "himself"].map(String::from).to_vec(),
            female: ["she", "her", "hers", "herself"].map(String::from).to_vec(),
        }
    }

    fn classify(&self, word: &str) -> Gender {
        if self.male.iter().any(|p| p == word) {
            Gender::Male
        } else if self.female.iter().any(|p| p == word) {
            Gender::Female
        } else {
            Gender::Unknown
        }
    }
}

/// Left-context heuristic with the default pronoun rules.
pub fn attribute_by_context(sentence: &Sentence, m: &Match, lexicon: &NameGenderLexicon) -> Gender {
    attribute_by_context_with(sentence, m, lexicon, &PronounRules::default())
}

/// The nearest pronoun or proper noun strictly left of the match decides; the
/// scan stops at that token whatever its outcome.
pub fn attribute_by_context_with(
    sentence: &Sentence,
    m: &Match,
    lexicon: &NameGenderLexicon,
    rules: &PronounRules,
) -> Gender {
    let left = &sentence.tokens[..m.start.min(sentence.tokens.len())];
    let Some(candidate) = left
        .iter()
        .rev()
        .find(|t| matches!(t.pos, Pos::Pronoun | Pos::ProperNoun))
    else {
        return Gender::Unknown;
    };
    let word = candidate.surface.to_lowercase();
    match candidate.pos {
        Pos::Pronoun => rules.classify(&word),
        _ => lexicon.guess_gender(&word),
    }
}

/// Context attribution for every match in a sentence; unattributed matches are dropped.
pub fn attribute_sentence(
    sentence: &Sentence,
    matches: &[Match],
    record_id: &str,
    lexicon: &NameGenderLexicon,
    rules: &PronounRules,
) -> Vec<GenderedOccurrence> {
    matches
        .iter()
        .filter_map(|m| {
            let g = attribute_by_context_with(sentence, m, lexicon, rules);
            GenderedOccurrence::new(m.phrase_id, g, AttributionSource::ContextHeuristic, record_id)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::AnnotatedToken;

    fn tok(surface: &str, pos: Pos, lemma: &str) -> AnnotatedToken {
        AnnotatedToken::new(surface, lemma, pos).unwrap()
    }

    fn lex() -> NameGenderLexicon {
        NameGenderLexicon::from_lists(["jack", "john"], ["mary", "lisa"])
    }

    fn at(start: usize, end: usize) -> Match {
        Match {
            phrase_id: 0,
            start,
            end,
            sentence_ref: 0,
        }
    }

    #[test]
    fn she_became_a_nurse() {
        let s = Sentence::new(vec![
            tok("She", Pos::Pronoun, "she"),
            tok("became", Pos::Verb, "become"),
            tok("a", Pos::Other, "a"),
            tok("nurse", Pos::Other, "nurse"),
            tok(".", Pos::Other, "."),
        ]);
        assert_eq!(attribute_by_context(&s, &at(1, 4), &lex()), Gender::Female);
    }

    #[test]
    fn jack_solves_the_problem() {
        let s = Sentence::new(vec![
            tok("Jack", Pos::ProperNoun, "jack"),
            tok("tried", Pos::Verb, "try"),
            tok("to", Pos::Other, "to"),
            tok("solve", Pos::Verb, "solve"),
            tok("the", Pos::Other, "the"),
            tok("problem", Pos::Other, "problem"),
        ]);
        assert_eq!(attribute_by_context(&s, &at(3, 6), &lex()), Gender::Male);
    }

    #[test]
    fn nearest_non_gendered_pronoun_stops_the_scan() {
        let s = Sentence::new(vec![
            tok("He", Pos::Pronoun, "he"),
            tok("asked", Pos::Verb, "ask"),
            tok("him", Pos::Pronoun, "him"),
            tok("to", Pos::Other, "to"),
            tok("solve", Pos::Verb, "solve"),
            tok("problems", Pos::Other, "problem"),
        ]);
        assert_eq!(attribute_by_context(&s, &at(4, 6), &lex()), Gender::Unknown);
        let wide = attribute_by_context_with(&s, &at(4, 6), &lex(), &PronounRules::extended());
        assert_eq!(wide, Gender::Male);
    }

    #[test]
    fn no_left_context() {
        let s = Sentence::new(vec![
            tok("Cook", Pos::Verb, "cook"),
            tok("dinner", Pos::Other, "dinner"),
        ]);
        assert_eq!(attribute_by_context(&s, &at(0, 2), &lex()), Gender::Unknown);
    }

    #[test]
    fn nearest_name_token_decides() {
        let s = Sentence::new(vec![
            tok("Mary", Pos::ProperNoun, "mary"),
            tok("Jane", Pos::ProperNoun, "jane"),
            tok("cooked", Pos::Verb, "cook"),
            tok("dinner", Pos::Other, "dinner"),
        ]);
        assert_eq!(attribute_by_context(&s, &at(2, 4), &lex()), Gender::Unknown);
    }

    fn record(name: &str) -> TweetRecord {
        TweetRecord {
            record_id: "t1".into(),
            author_name: name.into(),
            author_first_name: crate::corpus_io::first_name(name),
            sentences: vec![],
        }
    }

    #[test]
    fn author_attribution() {
        let matches = [at(0, 2), at(3, 5)];
        let occ = attribute_by_author(&record("Mary Smith"), &matches, &lex());
        assert_eq!(occ.len(), 2);
        assert!(occ.iter().all(|o| o.gender() == Gender::Female));
        assert!(occ.iter().all(|o| o.source() == AttributionSource::AuthorMetadata));
        assert!(attribute_by_author(&record("xq17"), &[at(0, 2); 5], &lex()).is_empty());
    }

    #[test]
    fn unknown_gender_cannot_be_constructed() {
        assert!(GenderedOccurrence::new(0, Gender::Unknown, AttributionSource::AuthorMetadata, "r").is_none());
    }
}
