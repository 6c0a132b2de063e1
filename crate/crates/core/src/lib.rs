//! Mining stereotypical gender expectations of commonsense actions from text.
//!
//! The pipeline runs over pre-annotated corpora (lemma + part of speech):
//!
//! 1. [`corpus_io`] streams tweet records or vertical-format documents and
//!    applies the English word-ratio filter.
//! 2. [`lexicons`] builds the name/gender dictionary, the verb lexicon and the
//!    list of action phrases extracted from a concept file.
//! 3. [`matcher`] finds action phrases in lemma streams, tolerating at most one
//!    intermittent token between consecutive phrase lemmas.
//! 4. [`attribution`] assigns each occurrence a gender, from author metadata or
//!    from the nearest pronoun / proper name on the left.
//! 5. [`scoring`] tallies male and female occurrences and turns them into
//!    binomially standardized bias scores and z-scores.
//! 6. [`evaluation`] compares predictions against a human gold standard.
//!
//! The numeric routines are generic over the floating point type through
//! [`Real`]; the aliases at the crate root fix them to `f64`.

pub mod attribution;
pub mod cli;
pub mod corpus_io;
pub mod error;
pub mod evaluation;
pub mod lexicons;
pub mod matcher;
pub mod scalar;
pub mod scoring;
pub mod tsv;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default score precision used by the pipeline and the command line tool.
pub type Score = f64;

pub type BiasScore = scoring::BiasScore<Score>;
pub type ScoredSet = scoring::ScoredSet<Score>;
pub type GoldRating = evaluation::GoldRating<Score>;
pub type EvalReport = evaluation::EvalReport<Score>;
pub type SanityRow = evaluation::SanityRow<Score>;
