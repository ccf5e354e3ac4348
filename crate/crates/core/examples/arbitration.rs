//! Role assignment for transitive `fressen` sentences under the toy grammar.
//!
//! Prints the chosen agent and patient next to the two best oracle scores.

use std::time::Instant;

use wcdp::{best_k, disambiguate, fixtures, Layer, Sentence};

fn role_filler(analysis: &wcdp::Analysis, sentence: &Sentence, role: &str) -> String {
    (1..=sentence.len())
        .find(|&p| analysis.relation(p, Layer::Sem).label == role)
        .map(|p| sentence.form(p).to_string())
        .unwrap_or_else(|| "-".into())
}

fn main() -> wcdp::Result<()> {
    let (grammar, lexicon) = fixtures::toy();
    let start = Instant::now();
    println!("{:<24} {:<8} {:<8} {:>8} {:>8} {:>8}", "sentence", "AG", "PAT", "score", "top-1", "top-2");
    for (text, _, _) in fixtures::ARBITRATION {
        let sentence = Sentence::parse(text, &lexicon);
        let analysis = disambiguate(&sentence, &grammar)?;
        let top = best_k(&sentence, &grammar, 2)?;
        println!(
            "{:<24} {:<8} {:<8} {:>8.4} {:>8.4} {:>8.4}",
            text,
            role_filler(&analysis, &sentence, "AG"),
            role_filler(&analysis, &sentence, "PAT"),
            analysis.score,
            top[0].score,
            top.get(1).map_or(0.0, |t| t.score),
        );
    }
    println!("elapsed: {:?}", start.elapsed());
    Ok(())
}
