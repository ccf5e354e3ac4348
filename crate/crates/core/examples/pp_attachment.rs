//! Prepositional attachment with and without the part-of preference.
//!
//! `cargo run --example pp_attachment -- "wir nehmen Gras im Mai"`

use wcdp::disambiguator::run;
use wcdp::{best_k, fixtures, DomainOptions, Grammar, Layer, Sentence};

fn report(label: &str, grammar: &Grammar, sentence: &Sentence) -> wcdp::Result<()> {
    let d = run(sentence, grammar, DomainOptions::default())?;
    println!("== {label}");
    for p in 1..=sentence.len() {
        let syn = d.analysis.relation(p, Layer::Syn);
        let sem = d.analysis.relation(p, Layer::Sem);
        println!(
            "  {:<8} {:<6} -> {:<8} {:<8} -> {}",
            sentence.form(p),
            syn.label,
            sentence.form(syn.dom),
            sem.label,
            sentence.form(sem.dom)
        );
    }
    println!("  score {:.4}", d.analysis.score);
    for event in d.network.trace().iter().filter(|e| !matches!(e, wcdp::TraceEvent::Prune { .. })) {
        println!("  {event}");
    }
    let top = best_k(sentence, grammar, 1)?;
    println!("  oracle {:.4}", top[0].score);
    Ok(())
}

fn main() -> wcdp::Result<()> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "Dann nehmen wir die erste Woche im Mai.".to_string());
    let (grammar, lexicon) = fixtures::pp();
    let sentence = Sentence::parse(&text, &lexicon);
    report("with pss1", &grammar, &sentence)?;
    report("without pss1", &grammar.without("pss1"), &sentence)?;
    Ok(())
}
