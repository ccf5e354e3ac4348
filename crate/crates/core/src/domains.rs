//! Variables (word × layer) and their initial candidate sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::grammar::{Grammar, Verdict};
use crate::lexicon::{CandidateRelation, Layer, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub position: usize,
    pub layer: Layer,
}

impl Variable {
    /// Dense index: words in order, syntax before semantics.
    pub fn index(self) -> usize {
        (self.position - 1) * 2 + self.layer.index()
    }

    pub fn from_index(i: usize) -> Variable {
        Variable {
            position: i / 2 + 1,
            layer: Layer::ALL[i % 2],
        }
    }

    pub fn of(rel: &CandidateRelation) -> Variable {
        Variable {
            position: rel.dep,
            layer: rel.layer,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.layer, self.position)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DomainOptions {
    /// Drop candidates violating a strict unary constraint up front.
    pub prefilter: bool,
}

impl Default for DomainOptions {
    fn default() -> Self {
        DomainOptions { prefilter: true }
    }
}

/// Candidate sets indexed by `Variable::index`.
pub type Domains = Vec<Vec<CandidateRelation>>;

fn all_candidates(sentence: &Sentence, grammar: &Grammar, var: Variable) -> Vec<CandidateRelation> {
    let n = sentence.len();
    let token = sentence.token(var.position).expect("variable inside sentence");
    let mut out = Vec::new();
    for reading in 0..token.readings.len() {
        for label in grammar.labels(var.layer) {
            for dom in (0..=n).filter(|&d| d != var.position) {
                out.push(CandidateRelation {
                    layer: var.layer,
                    label: label.clone(),
                    dep: var.position,
                    dom,
                    reading,
                });
            }
        }
    }
    out
}

/// Number of strict unary constraints `rel` violates.
pub fn strict_unary_violations(rel: &CandidateRelation, sentence: &Sentence, grammar: &Grammar) -> usize {
    grammar
        .constraints
        .iter()
        .filter(|c| c.is_strict() && c.applies_to(rel.layer))
        .filter(|c| c.check_unary(None, rel, sentence) == Verdict::Violated)
        .count()
}

/// Checks that every reading uses a category the grammar declares.
pub fn check_categories(sentence: &Sentence, grammar: &Grammar) -> Result<()> {
    for token in sentence.tokens() {
        for r in &token.readings {
            if !grammar.categories.contains(&r.cat) {
                return Err(Error::UndeclaredCategory {
                    form: token.form.clone(),
                    category: r.cat.clone(),
                });
            }
        }
    }
    Ok(())
}

pub fn generate_domains(sentence: &Sentence, grammar: &Grammar) -> Result<Domains> {
    generate_domains_with(sentence, grammar, DomainOptions::default())
}

/// Builds every (label, modifiee) candidate per variable. With prefiltering,
/// candidates violating a strict unary constraint are dropped; a domain that
/// would become empty keeps the candidates with the fewest strict violations.
pub fn generate_domains_with(
    sentence: &Sentence,
    grammar: &Grammar,
    opts: DomainOptions,
) -> Result<Domains> {
    if sentence.is_empty() {
        return Err(Error::EmptySentence);
    }
    for layer in Layer::ALL {
        if grammar.labels(layer).is_empty() {
            return Err(Error::MissingLabels(layer));
        }
    }
    check_categories(sentence, grammar)?;

    let mut domains = Vec::with_capacity(sentence.len() * 2);
    for i in 0..sentence.len() * 2 {
        let var = Variable::from_index(i);
        let mut cands = all_candidates(sentence, grammar, var);
        if opts.prefilter {
            let counts: Vec<usize> = cands
                .iter()
                .map(|c| strict_unary_violations(c, sentence, grammar))
                .collect();
            let least = counts.iter().copied().min().unwrap_or(0);
            let mut keep = counts.iter().map(|&k| k == least);
            cands.retain(|_| keep.next().unwrap());
        }
        cands.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        domains.push(cands);
    }
    Ok(domains)
}
