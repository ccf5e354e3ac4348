//! The two grammars shipped with the crate, embedded at compile time.

use crate::grammar::{parse_grammar, Grammar};
use crate::lexicon::Lexicon;

pub const TOY_GRAMMAR: &str = include_str!("../fixtures/toy.gram");
pub const TOY_LEXICON: &str = include_str!("../fixtures/toy.lex");
pub const PP_GRAMMAR: &str = include_str!("../fixtures/pp.gram");
pub const PP_LEXICON: &str = include_str!("../fixtures/pp.lex");
pub const CORPUS: &str = include_str!("../fixtures/corpus.txt");

/// Transitive-verb grammar over `fressen` with its lexicon.
pub fn toy() -> (Grammar, Lexicon) {
    (
        parse_grammar(TOY_GRAMMAR).expect("toy.gram parses"),
        Lexicon::parse(TOY_LEXICON).expect("toy.lex parses"),
    )
}

/// Toy grammar extended with determiners, adjectives, prepositional phrases
/// and preference-induced constraints.
pub fn pp() -> (Grammar, Lexicon) {
    (
        parse_grammar(PP_GRAMMAR).expect("pp.gram parses"),
        Lexicon::parse(PP_LEXICON).expect("pp.lex parses"),
    )
}

/// Arbitration sentences for the toy grammar with their expected agent and patient.
pub const ARBITRATION: &[(&str, &str, &str)] = &[
    ("Pferde fressen Gras", "Pferde", "Gras"),
    ("Gras fressen Pferde", "Pferde", "Gras"),
    ("Pferd fressen Gras", "Pferd", "Gras"),
    ("Gras fressen Pferd", "Pferd", "Gras"),
    ("Autos fressen Geld", "Autos", "Geld"),
    ("Geld fressen Autos", "Autos", "Geld"),
    ("Auto fressen Geld", "Auto", "Geld"),
    ("Geld fressen Auto", "Geld", "Auto"),
    ("Gräser fressen Pferd", "Gräser", "Pferd"),
];

/// Which shipped grammar a corpus sentence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureGrammar {
    Toy,
    Pp,
}

/// The sentences of `fixtures/corpus.txt` with their grammar.
pub fn corpus() -> Vec<(FixtureGrammar, &'static str)> {
    CORPUS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let (tag, text) = l.split_once(':')?;
            let g = match tag.trim() {
                "toy" => FixtureGrammar::Toy,
                "pp" => FixtureGrammar::Pp,
                _ => return None,
            };
            Some((g, text.trim()))
        })
        .collect()
}
