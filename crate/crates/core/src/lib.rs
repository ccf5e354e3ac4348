//! Weighted constraint dependency parsing.
//!
//! Sentences are described on two autonomous layers, a syntactic one with
//! functional labels (`SUBJ`, `OBJ`, ...) and a semantic one with thematic
//! roles (`AG`, `PAT`, ...). Each word receives one candidate relation per
//! layer. Penalty-weighted constraints score candidates and candidate pairs
//! multiplicatively, and an eliminative selection procedure prunes the
//! least-supported candidates until a single interpretation remains. Every
//! input receives an analysis; ill-formed input merely scores lower.
//!
//! ```
//! use wcdp::{disambiguate, fixtures, Layer, Sentence};
//!
//! let (grammar, lexicon) = fixtures::toy();
//! let sentence = Sentence::parse("Gras fressen Pferde.", &lexicon);
//! let analysis = disambiguate(&sentence, &grammar).unwrap();
//! assert_eq!(analysis.relation(3, Layer::Sem).label, "AG");
//! ```

pub mod cli;
pub mod disambiguator;
pub mod domains;
pub mod error;
pub mod fixtures;
pub mod grammar;
pub mod lexicon;
pub mod network;
pub mod oracle;
pub mod output;

pub use disambiguator::{
    activate_pinduced, diagnose, disambiguate, prune_cost, select_victim, Analysis, DiagnosisReport,
    Disambiguation, PruneDecision, Selection,
};
pub use domains::{generate_domains, DomainOptions, Variable};
pub use error::{Error, Result};
pub use grammar::{eval_binary, eval_unary, parse_grammar, Constraint, Grammar, Verdict};
pub use lexicon::{CandidateRelation, FeatureValue, Layer, LexicalEntry, Lexicon, Sentence};
pub use network::{build_network, ConstraintNetwork, TraceEvent};
pub use oracle::{best_k, score_analysis, ScoredAssignment, Violation};
