//! Analysis records in json-lines and text form.
//!
//! Both renderings are produced from the same [`Record`], so they carry the
//! same information. Field order is fixed by the struct layout.

use std::fmt::Write as _;

use serde::Serialize;

use crate::disambiguator::{Analysis, DiagnosisReport};
use crate::lexicon::{CandidateRelation, Layer, Sentence};
use crate::network::TraceEvent;
use crate::oracle::{ScoredAssignment, Violation};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct WordRecord {
    pub position: usize,
    pub form: String,
    pub syn_label: String,
    pub syn_head: usize,
    pub sem_label: String,
    pub sem_head: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRecord {
    pub constraint: String,
    pub pf: f64,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationRecord {
    pub position: usize,
    pub layer: Layer,
    pub chosen: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosisRecord {
    pub violated: Vec<String>,
    pub expectation_violations: Vec<ExpectationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub sentence: String,
    /// Rank among the oracle's top-k; absent for propagation results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub words: Vec<WordRecord>,
    pub score: f64,
    pub violations: Vec<ViolationRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<DiagnosisRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

fn relation_strings(rels: &[CandidateRelation]) -> Vec<String> {
    rels.iter().map(ToString::to_string).collect()
}

fn violation_records(violations: &[Violation]) -> Vec<ViolationRecord> {
    violations
        .iter()
        .map(|v| ViolationRecord {
            constraint: v.constraint.clone(),
            pf: v.pf,
            relations: relation_strings(&v.relations),
        })
        .collect()
}

impl Record {
    /// `relations` must be in variable order: syn then sem for each position.
    fn build(sentence: &Sentence, relations: &[CandidateRelation], score: f64, violations: &[Violation]) -> Record {
        let words = relations
            .chunks(2)
            .enumerate()
            .map(|(i, pair)| WordRecord {
                position: i + 1,
                form: sentence.form(i + 1).to_string(),
                syn_label: pair[0].label.clone(),
                syn_head: pair[0].dom,
                sem_label: pair[1].label.clone(),
                sem_head: pair[1].dom,
            })
            .collect();
        Record {
            sentence: sentence.text(),
            rank: None,
            words,
            score,
            violations: violation_records(violations),
            diagnosis: None,
            trace: None,
        }
    }

    pub fn from_analysis(sentence: &Sentence, analysis: &Analysis) -> Record {
        Record::build(sentence, &analysis.relations, analysis.score, &analysis.violations)
    }

    pub fn from_scored(sentence: &Sentence, scored: &ScoredAssignment, rank: usize) -> Record {
        Record {
            rank: Some(rank),
            ..Record::build(sentence, &scored.assignment, scored.score, &scored.violations)
        }
    }

    pub fn with_diagnosis(mut self, report: &DiagnosisReport) -> Record {
        self.diagnosis = Some(DiagnosisRecord {
            violated: report.violated_ids().into_iter().map(str::to_string).collect(),
            expectation_violations: report
                .expectation_violations
                .iter()
                .map(|e| ExpectationRecord {
                    position: e.position,
                    layer: e.layer,
                    chosen: e.chosen.to_string(),
                    expected: relation_strings(&e.expected),
                })
                .collect(),
        });
        self
    }

    pub fn with_trace(mut self, trace: &[TraceEvent]) -> Record {
        self.trace = Some(trace.iter().map(ToString::to_string).collect());
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentence: {}", self.sentence);
        if let Some(rank) = self.rank {
            let _ = writeln!(out, "rank: {rank}");
        }
        let _ = writeln!(out, "score: {:?}", self.score);
        let width = self.words.iter().map(|w| w.form.chars().count()).max().unwrap_or(0);
        for w in &self.words {
            let _ = writeln!(
                out,
                "  {:>2} {:<width$}  syn {} -> {}  sem {} -> {}",
                w.position, w.form, w.syn_label, w.syn_head, w.sem_label, w.sem_head
            );
        }
        let _ = writeln!(out, "violations: {}", self.violations.len());
        for v in &self.violations {
            let _ = writeln!(out, "  {} pf={:?} [{}]", v.constraint, v.pf, v.relations.join("; "));
        }
        if let Some(d) = &self.diagnosis {
            let _ = writeln!(out, "violated: {}", d.violated.join(" "));
            let _ = writeln!(out, "expectation violations: {}", d.expectation_violations.len());
            for e in &d.expectation_violations {
                let _ = writeln!(
                    out,
                    "  {} {}: chose [{}], expected [{}]",
                    e.layer,
                    e.position,
                    e.chosen,
                    e.expected.join("; ")
                );
            }
        }
        if let Some(trace) = &self.trace {
            let _ = writeln!(out, "trace: {}", trace.len());
            for line in trace {
                let _ = writeln!(out, "  {line}");
            }
        }
        out
    }
}
