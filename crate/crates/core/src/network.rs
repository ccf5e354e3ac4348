//! Constraint network with confidence-score tables.
//!
//! Every candidate carries a unary score and every pair of candidates from
//! distinct variables a binary score. A score is the product of the penalty
//! factors of the constraints the candidate (pair) violates, so it lies in
//! `[0, 1]` and is exactly zero after a strict violation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::domains::{generate_domains_with, DomainOptions, Variable};
use crate::error::{Error, Result};
use crate::grammar::{Bindings, Consequent, Constraint, Grammar, Var, Verdict};
use crate::lexicon::{CandidateRelation, FeatureValue, Sentence};

/// Tolerance for treating two scores as equal.
pub const SCORE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Prune {
        relation: CandidateRelation,
        cost: f64,
    },
    Activate {
        id: String,
        trigger: CandidateRelation,
    },
    Project {
        id: String,
        position: usize,
        feature: String,
        value: FeatureValue,
    },
    EmptyIntersection {
        id: String,
        position: usize,
        feature: String,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Prune { relation: r, cost } => write!(
                f,
                "PRUNE {} {} {} {} cost={cost}",
                r.layer, r.dep, r.label, r.dom
            ),
            TraceEvent::Activate { id, trigger: r } => {
                write!(f, "ACTIVATE {id} {} {} {} {}", r.layer, r.dep, r.label, r.dom)
            }
            TraceEvent::Project {
                id,
                position,
                feature,
                value,
            } => write!(f, "PROJECT {id} {position} {feature}={value}"),
            TraceEvent::EmptyIntersection {
                id,
                position,
                feature,
            } => write!(f, "EMPTY-INTERSECTION {id} {position} {feature}"),
        }
    }
}

/// An instantiated template consequent.
#[derive(Debug, Clone)]
struct ActiveTemplate {
    pinduced: usize,
    trigger: CandidateRelation,
}

/// Upper-triangular table over candidate ids.
#[derive(Debug, Clone)]
struct PairTable {
    data: Vec<f64>,
}

impl PairTable {
    fn new(n: usize) -> Self {
        PairTable {
            data: vec![1.0; n * n.saturating_sub(1) / 2],
        }
    }

    fn idx(a: usize, b: usize) -> usize {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        j * (j - 1) / 2 + i
    }

    fn get(&self, a: usize, b: usize) -> f64 {
        self.data[Self::idx(a, b)]
    }

    fn set(&mut self, a: usize, b: usize, v: f64) {
        self.data[Self::idx(a, b)] = v;
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintNetwork<'g> {
    grammar: &'g Grammar,
    /// Working copy; feature projections write here.
    sentence: Sentence,
    cands: Vec<CandidateRelation>,
    var_of: Vec<usize>,
    domains: Vec<Vec<usize>>,
    alive: Vec<bool>,
    unary: Vec<f64>,
    binary: PairTable,
    active: Vec<ActiveTemplate>,
    activated: HashSet<(usize, usize)>,
    initial_preferred: Vec<BTreeSet<usize>>,
    trace: Vec<TraceEvent>,
}

pub fn build_network<'g>(sentence: &Sentence, grammar: &'g Grammar) -> Result<ConstraintNetwork<'g>> {
    build_network_with(sentence, grammar, DomainOptions::default())
}

/// Generates the domains and computes all initial confidence scores.
pub fn build_network_with<'g>(
    sentence: &Sentence,
    grammar: &'g Grammar,
    opts: DomainOptions,
) -> Result<ConstraintNetwork<'g>> {
    let generated = generate_domains_with(sentence, grammar, opts)?;
    let mut cands = Vec::new();
    let mut var_of = Vec::new();
    let mut domains = Vec::with_capacity(generated.len());
    for (v, dom) in generated.into_iter().enumerate() {
        let mut ids = Vec::with_capacity(dom.len());
        for c in dom {
            ids.push(cands.len());
            cands.push(c);
            var_of.push(v);
        }
        domains.push(ids);
    }
    let n = cands.len();
    let mut net = ConstraintNetwork {
        grammar,
        sentence: sentence.clone(),
        cands,
        var_of,
        domains,
        alive: vec![true; n],
        unary: vec![1.0; n],
        binary: PairTable::new(n),
        active: Vec::new(),
        activated: HashSet::new(),
        initial_preferred: Vec::new(),
        trace: Vec::new(),
    };
    for a in 0..n {
        net.unary[a] = net.compute_unary(a);
        for b in 0..a {
            let v = net.compute_binary(a, b);
            net.binary.set(a, b, v);
        }
    }
    net.initial_preferred = (0..net.domains.len())
        .map(|v| {
            let supports: Vec<(usize, f64)> =
                net.domains[v].iter().map(|&c| (c, net.support(c))).collect();
            let best = supports.iter().map(|s| s.1).fold(0.0, f64::max);
            supports
                .into_iter()
                .filter(|&(_, s)| s >= best - SCORE_EPS)
                .map(|(c, _)| c)
                .collect()
        })
        .collect();
    Ok(net)
}

fn product_of_violations<'a>(
    constraints: impl Iterator<Item = &'a Constraint>,
    mut verdict: impl FnMut(&Constraint) -> Verdict,
) -> f64 {
    constraints
        .filter(|c| verdict(c) == Verdict::Violated)
        .map(|c| c.pf)
        .product()
}

impl<'g> ConstraintNetwork<'g> {
    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    /// The sentence with all feature projections applied so far.
    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn num_variables(&self) -> usize {
        self.domains.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.cands.len()
    }

    pub fn candidate(&self, id: usize) -> &CandidateRelation {
        &self.cands[id]
    }

    pub fn variable_of(&self, id: usize) -> usize {
        self.var_of[id]
    }

    /// Live candidate ids of a variable, in domain order.
    pub fn domain(&self, var: usize) -> &[usize] {
        &self.domains[var]
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.alive[id]
    }

    pub fn find(&self, rel: &CandidateRelation) -> Option<usize> {
        self.cands.iter().position(|c| c == rel)
    }

    pub fn unary(&self, id: usize) -> f64 {
        self.unary[id]
    }

    /// Score of a pair from distinct variables.
    pub fn binary(&self, a: usize, b: usize) -> f64 {
        debug_assert_ne!(self.var_of[a], self.var_of[b]);
        self.binary.get(a, b)
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn is_done(&self) -> bool {
        self.domains.iter().all(|d| d.len() == 1)
    }

    /// Candidates with maximal support in the initial network, per variable.
    pub fn initial_preferred(&self, var: usize) -> &BTreeSet<usize> {
        &self.initial_preferred[var]
    }

    fn compute_unary(&self, a: usize) -> f64 {
        let x = &self.cands[a];
        let s = &self.sentence;
        let base = product_of_violations(
            self.grammar.constraints.iter().filter(|c| c.applies_to(x.layer)),
            |c| c.check_unary(None, x, s),
        );
        self.active.iter().fold(base, |acc, t| match self.template(t) {
            Some(c) if c.applies_to(x.layer) => {
                if c.check_unary(Some(&t.trigger), x, s) == Verdict::Violated {
                    acc * c.pf
                } else {
                    acc
                }
            }
            _ => acc,
        })
    }

    fn compute_binary(&self, a: usize, b: usize) -> f64 {
        if self.var_of[a] == self.var_of[b] {
            return 1.0;
        }
        let (x, y) = (&self.cands[a], &self.cands[b]);
        if x.dep == y.dep && x.reading != y.reading {
            return 0.0;
        }
        let s = &self.sentence;
        let base = product_of_violations(
            self.grammar
                .constraints
                .iter()
                .filter(|c| c.applies_to_pair(x.layer, y.layer)),
            |c| c.check_binary(None, x, y, s),
        );
        self.active.iter().fold(base, |acc, t| match self.template(t) {
            Some(c) if c.applies_to_pair(x.layer, y.layer) => {
                if c.check_binary(Some(&t.trigger), x, y, s) == Verdict::Violated {
                    acc * c.pf
                } else {
                    acc
                }
            }
            _ => acc,
        })
    }

    fn template(&self, t: &ActiveTemplate) -> Option<&'g Constraint> {
        match &self.grammar.pinduced[t.pinduced].consequent {
            Consequent::Template(c) => Some(c),
            Consequent::Project { .. } => None,
        }
    }

    /// Optimistic bound on the score of any complete assignment containing
    /// `id`: its unary score times, for every other variable, the best
    /// pairing with a live candidate there (binary times that candidate's
    /// unary score).
    pub fn support(&self, id: usize) -> f64 {
        let own = self.var_of[id];
        let mut s = self.unary[id];
        for (v, dom) in self.domains.iter().enumerate() {
            if v == own || s == 0.0 {
                continue;
            }
            let best = dom
                .iter()
                .map(|&y| self.binary.get(id, y) * self.unary[y])
                .fold(0.0, f64::max);
            s *= best;
        }
        s
    }

    /// Squared score mass lost by removing `id`: its unary score plus every
    /// binary score against live candidates of other variables.
    pub fn prune_cost(&self, id: usize) -> f64 {
        let own = self.var_of[id];
        let mut cost = self.unary[id] * self.unary[id];
        for (v, dom) in self.domains.iter().enumerate() {
            if v == own {
                continue;
            }
            for &y in dom {
                let b = self.binary.get(id, y);
                cost += b * b;
            }
        }
        cost
    }

    /// Deletes a candidate from its domain and records the event.
    pub fn remove(&mut self, id: usize) -> Result<()> {
        let var = self.var_of[id];
        if !self.alive[id] {
            return Ok(());
        }
        if self.domains[var].len() <= 1 {
            return Err(Error::LastCandidate(Variable::from_index(var).to_string()));
        }
        let cost = self.prune_cost(id);
        self.alive[id] = false;
        self.domains[var].retain(|&c| c != id);
        self.trace.push(TraceEvent::Prune {
            relation: self.cands[id].clone(),
            cost,
        });
        Ok(())
    }

    pub(crate) fn was_activated(&self, pinduced: usize, trigger: usize) -> bool {
        self.activated.contains(&(pinduced, trigger))
    }

    /// Folds the consequent of preference-induced constraint `pinduced`,
    /// triggered by candidate `trigger`, into the network. Returns false if a
    /// projection produced an empty intersection and was skipped.
    pub(crate) fn activate(&mut self, pinduced: usize, trigger: usize) -> bool {
        if !self.activated.insert((pinduced, trigger)) {
            return true;
        }
        let p = &self.grammar.pinduced[pinduced];
        let t = self.cands[trigger].clone();
        self.trace.push(TraceEvent::Activate {
            id: p.id.clone(),
            trigger: t.clone(),
        });
        match &p.consequent {
            Consequent::Template(c) => {
                self.active.push(ActiveTemplate {
                    pinduced,
                    trigger: t.clone(),
                });
                let s = &self.sentence;
                let n = self.cands.len();
                for a in 0..n {
                    let x = &self.cands[a];
                    if c.arity == 1 {
                        if c.applies_to(x.layer) && c.check_unary(Some(&t), x, s) == Verdict::Violated {
                            self.unary[a] *= c.pf;
                        }
                        continue;
                    }
                    for b in 0..a {
                        let y = &self.cands[b];
                        if self.var_of[a] != self.var_of[b]
                            && c.applies_to_pair(x.layer, y.layer)
                            && c.check_binary(Some(&t), x, y, s) == Verdict::Violated
                        {
                            let v = self.binary.get(a, b) * c.pf;
                            self.binary.set(a, b, v);
                        }
                    }
                }
                true
            }
            Consequent::Project { feature, node, value } => {
                let b = Bindings::new().with(Var::X, &t);
                let (Some(pos), Some(v)) = (
                    node.eval_node(&b, &self.sentence),
                    value.eval_set(&b, &self.sentence),
                ) else {
                    return true;
                };
                if v == FeatureValue::empty() {
                    self.trace.push(TraceEvent::EmptyIntersection {
                        id: p.id.clone(),
                        position: pos,
                        feature: feature.clone(),
                    });
                    return false;
                }
                self.trace.push(TraceEvent::Project {
                    id: p.id.clone(),
                    position: pos,
                    feature: feature.clone(),
                    value: v.clone(),
                });
                self.sentence.set_feature(pos, feature, v);
                self.refresh_node(pos);
                true
            }
        }
    }

    /// Recomputes every score entry that mentions `pos`.
    fn refresh_node(&mut self, pos: usize) {
        let everything = self
            .active
            .iter()
            .any(|t| t.trigger.dep == pos || t.trigger.dom == pos);
        let touched: Vec<bool> = self
            .cands
            .iter()
            .map(|c| everything || c.dep == pos || c.dom == pos)
            .collect();
        let n = self.cands.len();
        for a in 0..n {
            if touched[a] {
                self.unary[a] = self.compute_unary(a);
            }
            for b in 0..a {
                if touched[a] || touched[b] {
                    let v = self.compute_binary(a, b);
                    self.binary.set(a, b, v);
                }
            }
        }
    }
}
