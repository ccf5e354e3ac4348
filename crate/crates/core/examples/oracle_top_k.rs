//! Ranked analyses from the exhaustive search.
//!
//! `cargo run --example oracle_top_k -- "Gräser fressen Pferd" 4`

use wcdp::{best_k, fixtures, Layer, Sentence};

fn main() -> wcdp::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "Gräser fressen Pferd".to_string());
    let k = args.next().and_then(|k| k.parse().ok()).unwrap_or(3);
    let (grammar, lexicon) = fixtures::toy();
    let sentence = Sentence::parse(&text, &lexicon);
    for (rank, scored) in best_k(&sentence, &grammar, k)?.iter().enumerate() {
        let roles: Vec<String> = scored
            .assignment
            .iter()
            .filter(|r| r.layer == Layer::Sem && r.dom != 0)
            .map(|r| format!("{}={}", sentence.form(r.dep), r.label))
            .collect();
        let violated: Vec<&str> = scored.violations.iter().map(|v| v.constraint.as_str()).collect();
        println!(
            "{}. {:.4}  {:<24} violates [{}]",
            rank + 1,
            scored.score,
            roles.join(" "),
            violated.join(", ")
        );
    }
    Ok(())
}
