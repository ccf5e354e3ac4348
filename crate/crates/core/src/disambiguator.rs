//! Eliminative selection: prune the least supported candidate until every
//! variable holds a single relation.

use std::cmp::Ordering;

use serde::Serialize;

use crate::domains::{DomainOptions, Variable};
use crate::error::Result;
use crate::grammar::Grammar;
use crate::lexicon::{CandidateRelation, Sentence};
use crate::network::{build_network_with, ConstraintNetwork, TraceEvent, SCORE_EPS};
use crate::oracle::{score_analysis, Violation};

/// One relation per word and layer, scored like the oracle scores it.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// In `Variable::index` order.
    pub relations: Vec<CandidateRelation>,
    pub score: f64,
    pub violations: Vec<Violation>,
}

impl Analysis {
    pub fn relation(&self, position: usize, layer: crate::lexicon::Layer) -> &CandidateRelation {
        &self.relations[Variable { position, layer }.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneDecision {
    pub candidate: usize,
    /// Optimistic bound on any complete analysis containing the candidate.
    pub support: f64,
    /// Squared score mass removed with the candidate.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Victim(PruneDecision),
    Done,
}

pub fn prune_cost(net: &ConstraintNetwork<'_>, id: usize) -> f64 {
    net.prune_cost(id)
}

/// Highest support among the other live candidates of `id`'s variable.
fn best_alternative(net: &ConstraintNetwork<'_>, id: usize) -> f64 {
    net.domain(net.variable_of(id))
        .iter()
        .filter(|&&c| c != id)
        .map(|&c| net.support(c))
        .fold(0.0, f64::max)
}

struct Ranked {
    id: usize,
    support: f64,
    alternative: f64,
    cost: f64,
}

fn cmp_eps(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= SCORE_EPS {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

fn victim_order(net: &ConstraintNetwork<'_>, a: &Ranked, b: &Ranked) -> Ordering {
    cmp_eps(a.support, b.support)
        .then_with(|| cmp_eps(b.alternative, a.alternative))
        .then_with(|| cmp_eps(a.cost, b.cost))
        .then_with(|| {
            net.candidate(a.id)
                .order_key()
                .cmp(&net.candidate(b.id).order_key())
        })
}

fn ranked_candidates(net: &ConstraintNetwork<'_>) -> Vec<Ranked> {
    let mut out: Vec<Ranked> = (0..net.num_variables())
        .filter(|&v| net.domain(v).len() > 1)
        .flat_map(|v| net.domain(v).iter().copied())
        .map(|id| Ranked {
            id,
            support: net.support(id),
            alternative: best_alternative(net, id),
            cost: net.prune_cost(id),
        })
        .collect();
    out.sort_by(|a, b| victim_order(net, a, b));
    out
}

/// The next candidate to prune: minimal support; ties go to the candidate
/// whose best same-variable alternative has the higher support, then to the
/// lower squared-score cost, then to the lower position, syntax before
/// semantics, and the lexicographically smaller label.
pub fn select_victim(net: &ConstraintNetwork<'_>) -> Selection {
    match ranked_candidates(net).into_iter().next() {
        Some(r) => Selection::Victim(PruneDecision {
            candidate: r.id,
            support: r.support,
            cost: r.cost,
        }),
        None => Selection::Done,
    }
}

/// Removes every candidate that cannot be part of a nonzero analysis, never
/// emptying a domain.
fn prune_zero_support(net: &mut ConstraintNetwork<'_>) -> Result<bool> {
    let zero: Vec<usize> = ranked_candidates(net)
        .into_iter()
        .filter(|r| r.support == 0.0)
        .map(|r| r.id)
        .collect();
    let mut removed = false;
    for id in zero {
        if net.domain(net.variable_of(id)).len() > 1 {
            net.remove(id)?;
            removed = true;
        }
    }
    Ok(removed)
}

/// Whether `id` is the sole survivor of its variable or dominates every
/// alternative by the grammar's activation threshold.
pub fn is_decided(net: &ConstraintNetwork<'_>, id: usize) -> bool {
    let dom = net.domain(net.variable_of(id));
    if dom.len() == 1 {
        return dom[0] == id;
    }
    let own = net.support(id);
    own > 0.0
        && dom
            .iter()
            .filter(|&&c| c != id)
            .all(|&c| own >= net.grammar().activation_threshold * net.support(c))
}

/// Activates preference-induced constraints whose trigger is matched by a
/// decided candidate. Returns the number of activations.
pub fn activate_pinduced(net: &mut ConstraintNetwork<'_>) -> usize {
    let grammar = net.grammar();
    let mut count = 0;
    for (pi, p) in grammar.pinduced.iter().enumerate() {
        for v in 0..net.num_variables() {
            let live: Vec<usize> = net.domain(v).to_vec();
            for id in live {
                if net.was_activated(pi, id)
                    || !p.triggered_by(net.candidate(id), net.sentence())
                    || !is_decided(net, id)
                {
                    continue;
                }
                net.activate(pi, id);
                count += 1;
            }
        }
    }
    count
}

/// Result of a full disambiguation run, with the final network for tracing
/// and diagnosis.
pub struct Disambiguation<'g> {
    pub analysis: Analysis,
    pub network: ConstraintNetwork<'g>,
}

pub fn disambiguate(sentence: &Sentence, grammar: &Grammar) -> Result<Analysis> {
    Ok(run(sentence, grammar, DomainOptions::default())?.analysis)
}

/// Builds the network, then alternates activation of preference-induced
/// constraints with pruning until every domain is a singleton.
pub fn run<'g>(sentence: &Sentence, grammar: &'g Grammar, opts: DomainOptions) -> Result<Disambiguation<'g>> {
    let mut net = build_network_with(sentence, grammar, opts)?;
    loop {
        activate_pinduced(&mut net);
        if prune_zero_support(&mut net)? {
            continue;
        }
        match select_victim(&net) {
            Selection::Done => break,
            Selection::Victim(d) => net.remove(d.candidate)?,
        }
    }
    let relations: Vec<CandidateRelation> = (0..net.num_variables())
        .map(|v| net.candidate(net.domain(v)[0]).clone())
        .collect();
    let scored = score_analysis(&relations, grammar, sentence)?;
    Ok(Disambiguation {
        analysis: Analysis {
            relations: scored.assignment,
            score: scored.score,
            violations: scored.violations,
        },
        network: net,
    })
}

/// A variable whose final relation was not among the best-supported
/// candidates of the initial network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationViolation {
    pub position: usize,
    pub layer: crate::lexicon::Layer,
    pub chosen: CandidateRelation,
    pub expected: Vec<CandidateRelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosisReport {
    pub violations: Vec<Violation>,
    pub expectation_violations: Vec<ExpectationViolation>,
}

impl DiagnosisReport {
    /// Ids of the violated constraints, sorted and deduplicated.
    pub fn violated_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.violations.iter().map(|v| v.constraint.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

pub fn diagnose(analysis: &Analysis, net: &ConstraintNetwork<'_>) -> DiagnosisReport {
    let mut flags = Vec::new();
    for (v, chosen) in analysis.relations.iter().enumerate() {
        let preferred = net.initial_preferred(v);
        if preferred.iter().any(|&c| net.candidate(c) == chosen) {
            continue;
        }
        let var = Variable::from_index(v);
        flags.push(ExpectationViolation {
            position: var.position,
            layer: var.layer,
            chosen: chosen.clone(),
            expected: preferred.iter().map(|&c| net.candidate(c).clone()).collect(),
        });
    }
    DiagnosisReport {
        violations: analysis.violations.clone(),
        expectation_violations: flags,
    }
}

/// Prune events recorded during a run.
pub fn prune_events<'a>(net: &'a ConstraintNetwork<'_>) -> impl Iterator<Item = &'a TraceEvent> {
    net.trace()
        .iter()
        .filter(|e| matches!(e, TraceEvent::Prune { .. }))
}
