//! Gap-tolerant multi-phrase matching over lemma sequences.
//!
//! A phrase `l0 l1 .. lk` occurs at `start` when `l0` sits at `start` and every
//! following lemma appears either right after the previous matched lemma or
//! one token further, so each of the `k` gaps holds zero or one token.
//!
//! Per start position and phrase at most one match is reported: the alignment
//! whose gap sequence is lexicographically smallest, i.e. the one that prefers
//! the adjacent continuation at every step and only skips a token when that is
//! the only way to complete the phrase. Matches at different starts are all
//! reported, overlapping or not.
//!
//! Phrases are stored in a trie over interned lemmas. Matching walks the trie
//! depth first from every start, adjacent continuation before gap
//! continuation, so the first time a phrase terminal is reached is exactly the
//! preferred alignment. `(node, position)` states already expanded from the
//! same start are skipped, which bounds the work by trie size times sentence
//! length.

use std::collections::HashMap;

use crate::corpus_io::Sentence;
use crate::error::{Error, Result};
use crate::lexicons::ActionPhrase;

/// Index of a phrase in the list passed to [`compile`].
pub type PhraseId = usize;

/// Largest token distance between consecutive matched lemmas.
const MAX_STEP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Match {
    pub phrase_id: PhraseId,
    /// Token index of the first matched lemma.
    pub start: usize,
    /// One past the last matched lemma.
    pub end: usize,
    /// Position of the sentence within its record.
    pub sentence_ref: usize,
}

impl Match {
    pub fn span(&self) -> usize {
        self.end - self.start
    }
}

impl AsRef<[String]> for ActionPhrase {
    fn as_ref(&self) -> &[String] {
        &self.lemmas
    }
}

#[derive(Debug, Clone, Default)]
struct Node {
    children: HashMap<u32, usize>,
    terminals: Vec<PhraseId>,
}

#[derive(Debug, Clone)]
pub struct PhraseAutomaton {
    symbols: HashMap<String, u32>,
    nodes: Vec<Node>,
    lengths: Vec<usize>,
}

const ROOT: usize = 0;

pub fn compile<P, S>(phrases: &[P]) -> Result<PhraseAutomaton>
where
    P: AsRef<[S]>,
    S: AsRef<str>,
{
    if phrases.is_empty() {
        return Err(Error::Config("cannot compile an empty phrase list".into()));
    }
    let mut automaton = PhraseAutomaton {
        symbols: HashMap::new(),
        nodes: vec![Node::default()],
        lengths: Vec::with_capacity(phrases.len()),
    };
    for (id, phrase) in phrases.iter().enumerate() {
        let lemmas = phrase.as_ref();
        if lemmas.is_empty() {
            return Err(Error::Config(format!("phrase #{id} is empty")));
        }
        let mut node = ROOT;
        for lemma in lemmas {
            let lemma = lemma.as_ref();
            if lemma.is_empty() || lemma.chars().any(char::is_whitespace) {
                return Err(Error::Config(format!("phrase #{id} has an invalid lemma {lemma:?}")));
            }
            let next_symbol = automaton.symbols.len() as u32;
            let sym = *automaton.symbols.entry(lemma.to_string()).or_insert(next_symbol);
            node = match automaton.nodes[node].children.get(&sym) {
                Some(&child) => child,
                None => {
                    let child = automaton.nodes.len();
                    automaton.nodes.push(Node::default());
                    automaton.nodes[node].children.insert(sym, child);
                    child
                }
            };
        }
        automaton.nodes[node].terminals.push(id);
        automaton.lengths.push(lemmas.len());
    }
    Ok(automaton)
}

impl PhraseAutomaton {
    pub fn phrase_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn phrase_len(&self, id: PhraseId) -> usize {
        self.lengths[id]
    }

    /// Number of distinct first lemmas.
    pub fn seed_count(&self) -> usize {
        self.nodes[ROOT].children.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Reconstructs the stored phrases from the trie, ordered by id.
    pub fn enumerate(&self) -> Vec<(PhraseId, Vec<String>)> {
        let mut names = vec![""; self.symbols.len()];
        for (lemma, &sym) in &self.symbols {
            names[sym as usize] = lemma;
        }
        let mut out = Vec::with_capacity(self.phrase_count());
        let mut stack = vec![(ROOT, Vec::<u32>::new())];
        while let Some((node, path)) = stack.pop() {
            for &id in &self.nodes[node].terminals {
                out.push((id, path.iter().map(|&s| names[s as usize].to_string()).collect()));
            }
            for (&sym, &child) in &self.nodes[node].children {
                let mut p = path.clone();
                p.push(sym);
                stack.push((child, p));
            }
        }
        out.sort();
        out
    }

    fn symbolize(&self, sentence: &Sentence) -> Vec<Option<u32>> {
        sentence.lemmas().map(|l| self.symbols.get(l).copied()).collect()
    }
}

/// All matches in one sentence, ordered by start then phrase id.
pub fn find_matches(sentence: &Sentence, automaton: &PhraseAutomaton) -> Vec<Match> {
    let mut out = Vec::new();
    let mut scratch = Scratch::default();
    collect_matches(sentence, 0, automaton, &mut scratch, &mut out);
    out
}

/// Matches over every sentence of a record, with `sentence_ref` filled in.
pub fn find_record_matches(sentences: &[Sentence], automaton: &PhraseAutomaton) -> Vec<Match> {
    let mut out = Vec::new();
    let mut scratch = Scratch::default();
    for (i, s) in sentences.iter().enumerate() {
        collect_matches(s, i, automaton, &mut scratch, &mut out);
    }
    out
}

#[derive(Default)]
struct Scratch {
    visited: Vec<(usize, usize)>,
    reached: Vec<(PhraseId, usize)>,
    stack: Vec<(usize, usize)>,
}

fn collect_matches(
    sentence: &Sentence,
    sentence_ref: usize,
    automaton: &PhraseAutomaton,
    scratch: &mut Scratch,
    out: &mut Vec<Match>,
) {
    let syms = automaton.symbolize(sentence);
    let n = syms.len();
    let root = &automaton.nodes[ROOT];
    for start in 0..n {
        let Some(first) = syms[start].and_then(|s| root.children.get(&s)) else {
            continue;
        };
        scratch.visited.clear();
        scratch.reached.clear();
        scratch.stack.clear();
        scratch.stack.push((*first, start));
        while let Some((node, pos)) = scratch.stack.pop() {
            // a handful of states per start, so a linear scan beats hashing
            if scratch.visited.contains(&(node, pos)) {
                continue;
            }
            scratch.visited.push((node, pos));
            let node_ref = &automaton.nodes[node];
            for &id in &node_ref.terminals {
                // each phrase has a single terminal node; the first arrival wins
                if !scratch.reached.iter().any(|&(r, _)| r == id) {
                    scratch.reached.push((id, pos + 1));
                }
            }
            // push the gap continuation first so the adjacent one is expanded first
            for step in (1..=MAX_STEP).rev() {
                let next = pos + step;
                if next >= n {
                    continue;
                }
                if let Some(child) = syms[next].and_then(|s| node_ref.children.get(&s)) {
                    scratch.stack.push((*child, next));
                }
            }
        }
        scratch.reached.sort_unstable();
        out.extend(scratch.reached.iter().map(|&(phrase_id, end)| Match {
            phrase_id,
            start,
            end,
            sentence_ref,
        }));
    }
}

/// Reference implementation: tries every start and every gap assignment in
/// lexicographic order and keeps the first valid one per start.
pub fn brute_force_matches<S: AsRef<str>>(sentence: &Sentence, phrase: &[S], phrase_id: PhraseId) -> Vec<Match> {
    let lemmas = &sentence.tokens;
    let k = phrase.len();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let gaps = k - 1;
    for start in 0..lemmas.len() {
        if lemmas[start].lemma != phrase[0].as_ref() {
            continue;
        }
        let mut mask = 0u64;
        while mask < 1u64 << gaps {
            // bit (gaps - i) is the gap before the i-th lemma, so counting up
            // walks the gap vectors in lexicographic order
            let mut pos = start;
            let mut failed_at = None;
            for (i, want) in phrase.iter().enumerate().skip(1) {
                pos += 1 + ((mask >> (gaps - i)) & 1) as usize;
                if pos >= lemmas.len() || lemmas[pos].lemma != want.as_ref() {
                    failed_at = Some(i);
                    break;
                }
            }
            match failed_at {
                None => {
                    out.push(Match {
                        phrase_id,
                        start,
                        end: pos + 1,
                        sentence_ref: 0,
                    });
                    break;
                }
                // every vector sharing the failed prefix fails the same way
                Some(i) => mask = ((mask >> (gaps - i)) + 1) << (gaps - i),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(words: &str) -> Sentence {
        Sentence::from_plain_text(words)
    }

    fn phrases(list: &[&str]) -> Vec<Vec<String>> {
        list.iter()
            .map(|p| p.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    fn spans(s: &str, list: &[&str]) -> Vec<(PhraseId, usize, usize)> {
        let a = compile(&phrases(list)).unwrap();
        find_matches(&sent(s), &a)
            .into_iter()
            .map(|m| (m.phrase_id, m.start, m.end))
            .collect()
    }

    #[test]
    fn adjacent_and_one_gap() {
        assert_eq!(spans("long holiday", &["long holiday"]), vec![(0, 0, 2)]);
        assert_eq!(spans("long for holiday", &["long holiday"]), vec![(0, 0, 3)]);
        assert!(spans("long of the holiday", &["long holiday"]).is_empty());
    }

    #[test]
    fn overlapping_starts() {
        assert_eq!(spans("a a b", &["a b"]), vec![(0, 0, 3), (0, 1, 3)]);
    }

    #[test]
    fn prefers_adjacent_but_backtracks_when_needed() {
        // adjacent b at 1 leads nowhere, gap b at 2 completes the phrase
        assert_eq!(spans("a b b x c", &["a b c"]), vec![(0, 0, 5)]);
        assert_eq!(spans("a b c b c", &["a b c"]), vec![(0, 0, 3)]);
    }

    #[test]
    fn shared_prefix_and_duplicates() {
        let a = compile(&phrases(&["make money", "make doll", "make money"])).unwrap();
        assert_eq!(a.seed_count(), 1);
        let m = find_matches(&sent("i make money"), &a);
        assert_eq!(m.iter().map(|m| m.phrase_id).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn empty_inputs() {
        assert!(compile::<Vec<String>, String>(&[]).is_err());
        assert!(compile(&[Vec::<String>::new()]).is_err());
        let a = compile(&phrases(&["a b"])).unwrap();
        assert!(find_matches(&Sentence::default(), &a).is_empty());
        assert!(brute_force_matches(&Sentence::default(), &["a", "b"], 0).is_empty());
    }

    #[test]
    fn record_matches_carry_sentence_index() {
        let a = compile(&phrases(&["a b"])).unwrap();
        let m = find_record_matches(&[sent("x"), sent("a b")], &a);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].sentence_ref, 1);
    }

    #[test]
    fn enumerate_round_trip() {
        let list = phrases(&["go bed", "go to bed", "make money", "go bed"]);
        let a = compile(&list).unwrap();
        let back: Vec<Vec<String>> = a.enumerate().into_iter().map(|(_, p)| p).collect();
        assert_eq!(back, list);
    }
}
