//! Exhaustive reference search over complete assignments.
//!
//! The score of an assignment is the product of the penalty factors of every
//! violated constraint instance: unary instances per relation, binary
//! instances per unordered pair of relations from distinct variables, and the
//! instantiated consequents of every preference-induced constraint whose
//! trigger holds in the assignment. Feature projections are applied to a copy
//! of the sentence before anything else is scored.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::domains::{generate_domains_with, DomainOptions, Variable};
use crate::error::{Error, Result};
use crate::grammar::{Bindings, Consequent, Grammar, Var, Verdict};
use crate::lexicon::{CandidateRelation, FeatureValue, Sentence};

/// Id recorded when two relations of one word disagree on its lexical reading.
pub const READING_CONFLICT: &str = "#reading";

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: String,
    pub relations: Vec<CandidateRelation>,
    pub pf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAssignment {
    /// One relation per variable, in `Variable::index` order.
    pub assignment: Vec<CandidateRelation>,
    pub score: f64,
    pub violations: Vec<Violation>,
}

/// Sorts `assignment` into variable order and checks that it is complete.
fn normalize(assignment: &[CandidateRelation], sentence: &Sentence) -> Result<Vec<CandidateRelation>> {
    let expected = sentence.len() * 2;
    let incomplete = || Error::IncompleteAssignment {
        expected,
        got: assignment.len(),
    };
    if assignment.len() != expected {
        return Err(incomplete());
    }
    let mut slots: Vec<Option<CandidateRelation>> = vec![None; expected];
    for rel in assignment {
        if rel.dep == 0 || rel.dep > sentence.len() {
            return Err(incomplete());
        }
        let slot = &mut slots[Variable::of(rel).index()];
        if slot.is_some() {
            return Err(incomplete());
        }
        *slot = Some(rel.clone());
    }
    Ok(slots.into_iter().map(|s| s.expect("all slots filled")).collect())
}

/// Applies every feature projection triggered by the assignment; returns the
/// projected sentence.
pub(crate) fn project_features(
    assignment: &[CandidateRelation],
    grammar: &Grammar,
    sentence: &Sentence,
) -> Sentence {
    let mut projected = sentence.clone();
    for p in &grammar.pinduced {
        let Consequent::Project { feature, node, value } = &p.consequent else {
            continue;
        };
        for x in assignment {
            if !p.triggered_by(x, &projected) {
                continue;
            }
            let b = Bindings::new().with(Var::X, x);
            let (Some(target), Some(v)) = (node.eval_node(&b, &projected), value.eval_set(&b, &projected))
            else {
                continue;
            };
            if v == FeatureValue::empty() {
                // empty intersection: leave the feature as it is
                continue;
            }
            projected.set_feature(target, feature, v);
        }
    }
    projected
}

/// Exact score and exhaustive violation list of a complete assignment.
pub fn score_analysis(
    assignment: &[CandidateRelation],
    grammar: &Grammar,
    sentence: &Sentence,
) -> Result<ScoredAssignment> {
    let assignment = normalize(assignment, sentence)?;
    let s = project_features(&assignment, grammar, sentence);
    let mut violations = Vec::new();
    let mut push = |constraint: &str, relations: Vec<CandidateRelation>, pf: f64| {
        violations.push(Violation {
            constraint: constraint.to_string(),
            relations,
            pf,
        })
    };

    for c in &grammar.constraints {
        if c.arity == 1 {
            for x in assignment.iter().filter(|x| c.applies_to(x.layer)) {
                if c.check_unary(None, x, &s) == Verdict::Violated {
                    push(&c.id, vec![x.clone()], c.pf);
                }
            }
        } else {
            for (i, x) in assignment.iter().enumerate() {
                for y in &assignment[i + 1..] {
                    if c.applies_to_pair(x.layer, y.layer)
                        && c.check_binary(None, x, y, &s) == Verdict::Violated
                    {
                        push(&c.id, vec![x.clone(), y.clone()], c.pf);
                    }
                }
            }
        }
    }
    for (i, x) in assignment.iter().enumerate() {
        for y in &assignment[i + 1..] {
            if x.dep == y.dep && x.reading != y.reading {
                push(READING_CONFLICT, vec![x.clone(), y.clone()], 0.0);
            }
        }
    }
    for p in &grammar.pinduced {
        let Consequent::Template(c) = &p.consequent else {
            continue;
        };
        for t in assignment.iter().filter(|t| p.triggered_by(t, &s)) {
            if c.arity == 1 {
                for y in assignment.iter().filter(|y| c.applies_to(y.layer)) {
                    if c.check_unary(Some(t), y, &s) == Verdict::Violated {
                        push(&p.id, vec![t.clone(), y.clone()], c.pf);
                    }
                }
            } else {
                for (i, y) in assignment.iter().enumerate() {
                    for z in &assignment[i + 1..] {
                        if c.applies_to_pair(y.layer, z.layer)
                            && c.check_binary(Some(t), y, z, &s) == Verdict::Violated
                        {
                            push(&p.id, vec![t.clone(), y.clone(), z.clone()], c.pf);
                        }
                    }
                }
            }
        }
    }

    let score = violations.iter().map(|v| v.pf).product();
    Ok(ScoredAssignment {
        assignment,
        score,
        violations,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub k: usize,
    /// Maximum number of expanded search nodes.
    pub budget: u64,
    /// Cut partial assignments that cannot reach the current k-th best.
    pub bound: bool,
    pub domains: DomainOptions,
}

impl SearchOptions {
    pub fn top(k: usize) -> Self {
        SearchOptions {
            k,
            ..Self::default()
        }
    }
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            k: 1,
            budget: DEFAULT_BUDGET,
            bound: true,
            domains: DomainOptions::default(),
        }
    }
}

const TIE_EPS: f64 = 1e-12;

/// Total order: higher score first, then relation keys in variable order.
pub fn rank(a: &ScoredAssignment, b: &ScoredAssignment) -> Ordering {
    if (a.score - b.score).abs() > TIE_EPS {
        return b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal);
    }
    let ka = a.assignment.iter().map(CandidateRelation::order_key);
    let kb = b.assignment.iter().map(CandidateRelation::order_key);
    ka.cmp(kb)
}

pub fn best_k(sentence: &Sentence, grammar: &Grammar, k: usize) -> Result<Vec<ScoredAssignment>> {
    search(sentence, grammar, SearchOptions::top(k))
}

struct Search<'a> {
    grammar: &'a Grammar,
    sentence: &'a Sentence,
    domains: Vec<Vec<CandidateRelation>>,
    /// Positions whose features some projection may change.
    volatile: BTreeSet<usize>,
    /// Constraints reading a feature that some projection writes.
    sensitive: Vec<bool>,
    /// Global candidate index of the first candidate of each variable.
    offset: Vec<usize>,
    unary: Vec<f64>,
    /// Dense table of pair factors over global candidate indices.
    pairs: Vec<f64>,
    total: usize,
    opts: SearchOptions,
    expanded: u64,
    best: Vec<ScoredAssignment>,
}

impl Search<'_> {
    fn is_volatile(&self, r: &CandidateRelation) -> bool {
        self.volatile.contains(&r.dep) || self.volatile.contains(&r.dom)
    }

    fn unary_factor(&self, r: &CandidateRelation) -> f64 {
        let volatile = self.is_volatile(r);
        self.grammar
            .constraints
            .iter()
            .zip(&self.sensitive)
            .filter(|(_, &sens)| !(sens && volatile))
            .map(|(c, _)| c)
            .filter(|c| c.applies_to(r.layer))
            .filter(|c| c.check_unary(None, r, self.sentence) == Verdict::Violated)
            .map(|c| c.pf)
            .product()
    }

    fn pair_factor(&self, x: &CandidateRelation, y: &CandidateRelation) -> f64 {
        if x.dep == y.dep && x.reading != y.reading {
            0.0
        } else {
            let volatile = self.is_volatile(x) || self.is_volatile(y);
            self.grammar
                .constraints
                .iter()
                .zip(&self.sensitive)
                .filter(|(_, &sens)| !(sens && volatile))
                .map(|(c, _)| c)
                .filter(|c| c.applies_to_pair(x.layer, y.layer))
                .filter(|c| c.check_binary(None, x, y, self.sentence) == Verdict::Violated)
                .map(|c| c.pf)
                .product()
        }
    }

    fn precompute(&mut self) {
        let flat: Vec<(usize, &CandidateRelation)> = self
            .domains
            .iter()
            .enumerate()
            .flat_map(|(v, d)| d.iter().map(move |r| (v, r)))
            .collect();
        self.total = flat.len();
        self.unary = flat.iter().map(|(_, r)| self.unary_factor(r)).collect();
        let mut pairs = vec![1.0; self.total * self.total];
        for (a, (va, x)) in flat.iter().enumerate() {
            for (b, (vb, y)) in flat.iter().enumerate().skip(a + 1) {
                if va != vb {
                    let f = self.pair_factor(x, y);
                    pairs[a * self.total + b] = f;
                    pairs[b * self.total + a] = f;
                }
            }
        }
        self.pairs = pairs;
    }

    fn pair(&self, a: usize, b: usize) -> f64 {
        self.pairs[a * self.total + b]
    }

    fn threshold(&self) -> Option<f64> {
        (self.best.len() >= self.opts.k).then(|| self.best[self.opts.k - 1].score)
    }

    /// Whether the partial assignment `chosen + [i]` could still sort before
    /// the current k-th entry under equal scores.
    fn prefix_precedes_kth(&self, chosen: &[usize], depth: usize, i: usize) -> bool {
        let kth = &self.best[self.opts.k - 1].assignment;
        let prefix = chosen.iter().copied().chain(std::iter::once(i));
        for (v, idx) in prefix.enumerate().take(depth + 1) {
            match self.domains[v][idx].order_key().cmp(&kth[v].order_key()) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        true
    }

    fn record(&mut self, chosen: &[usize]) -> Result<()> {
        let assignment: Vec<CandidateRelation> = chosen
            .iter()
            .enumerate()
            .map(|(v, &i)| self.domains[v][i].clone())
            .collect();
        let scored = score_analysis(&assignment, self.grammar, self.sentence)?;
        let at = self
            .best
            .binary_search_by(|probe| rank(probe, &scored))
            .unwrap_or_else(|e| e);
        if at < self.opts.k {
            self.best.insert(at, scored);
            self.best.truncate(self.opts.k);
        }
        Ok(())
    }

    /// `fc[w][j]`: unary factor of candidate `j` of variable `w` times its
    /// pair factors with everything chosen so far, for `w >= depth`.
    fn dfs(&mut self, chosen: &mut Vec<usize>, partial: f64, fc: &[Vec<f64>]) -> Result<()> {
        let depth = chosen.len();
        if depth == self.domains.len() {
            return self.record(chosen);
        }
        let mut order: Vec<usize> = (0..self.domains[depth].len()).collect();
        if self.opts.bound {
            order.sort_by(|&a, &b| fc[depth][b].total_cmp(&fc[depth][a]));
        }
        for i in order {
            self.expanded += 1;
            if self.expanded > self.opts.budget {
                return Err(Error::SearchBudgetExceeded(self.opts.budget));
            }
            let p = partial * fc[depth][i];
            let g = self.offset[depth] + i;
            let next: Vec<Vec<f64>> = (depth + 1..self.domains.len())
                .map(|w| {
                    fc[w]
                        .iter()
                        .enumerate()
                        .map(|(j, &f)| f * self.pair(g, self.offset[w] + j))
                        .collect()
                })
                .collect();
            if self.opts.bound {
                let bound = next
                    .iter()
                    .map(|row| row.iter().copied().fold(0.0, f64::max))
                    .fold(p, |acc, m| acc * m);
                if let Some(t) = self.threshold() {
                    if bound + TIE_EPS < t {
                        continue;
                    }
                    // a tie can still enter only if it sorts before the k-th entry
                    if bound <= t + TIE_EPS && !self.prefix_precedes_kth(chosen, depth, i) {
                        continue;
                    }
                }
            }
            // `next` is indexed from depth + 1; pad so indices stay global
            let mut padded = vec![Vec::new(); depth + 1];
            padded.extend(next);
            chosen.push(i);
            self.dfs(chosen, p, &padded)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Depth-first search over the domains with multiplicative bound pruning.
/// Every factor is at most one, so the partial product times the best
/// remaining factor of each open variable bounds all completions. Factors of
/// constraints that read a projected feature at a node the projection may
/// reach are left out of the bound and scored exactly at the leaves.
pub fn search(sentence: &Sentence, grammar: &Grammar, opts: SearchOptions) -> Result<Vec<ScoredAssignment>> {
    let domains = generate_domains_with(sentence, grammar, opts.domains)?;
    let mut volatile = BTreeSet::new();
    let mut projected = BTreeSet::new();
    for p in &grammar.pinduced {
        let Consequent::Project { feature, node, .. } = &p.consequent else {
            continue;
        };
        projected.insert(feature.clone());
        for x in domains.iter().flatten() {
            if p.triggered_by(x, sentence) {
                if let Some(pos) = node.eval_node(&Bindings::new().with(Var::X, x), sentence) {
                    volatile.insert(pos);
                }
            }
        }
    }
    let offset = domains
        .iter()
        .scan(0, |acc, d| {
            let start = *acc;
            *acc += d.len();
            Some(start)
        })
        .collect();
    let mut s = Search {
        grammar,
        sentence,
        domains,
        volatile,
        sensitive: grammar
            .constraints
            .iter()
            .map(|c| !c.expr.features().is_disjoint(&projected))
            .collect(),
        offset,
        unary: Vec::new(),
        pairs: Vec::new(),
        total: 0,
        opts: SearchOptions {
            k: opts.k.max(1),
            ..opts
        },
        expanded: 0,
        best: Vec::new(),
    };
    s.precompute();
    let fc: Vec<Vec<f64>> = (0..s.domains.len())
        .map(|v| (0..s.domains[v].len()).map(|i| s.unary[s.offset[v] + i]).collect())
        .collect();
    s.dfs(&mut Vec::new(), 1.0, &fc)?;
    Ok(s.best)
}
