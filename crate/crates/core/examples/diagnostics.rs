//! Error localization: violated constraints and expectation violations.

use wcdp::disambiguator::run;
use wcdp::{diagnose, fixtures, DomainOptions, Sentence};

fn main() -> wcdp::Result<()> {
    let (grammar, lexicon) = fixtures::toy();
    for text in ["Pferde fressen Gras.", "Pferd fressen Gras.", "Gräser fressen Pferd.", "Geld fressen Auto."] {
        let sentence = Sentence::parse(text, &lexicon);
        let d = run(&sentence, &grammar, DomainOptions::default())?;
        let report = diagnose(&d.analysis, &d.network);
        println!("{text}  score {:.4}", d.analysis.score);
        for v in &report.violations {
            let at: Vec<String> = v.relations.iter().map(ToString::to_string).collect();
            println!("  violated {} (pf {}) at {}", v.constraint, v.pf, at.join(", "));
        }
        for e in &report.expectation_violations {
            let expected: Vec<String> = e.expected.iter().map(ToString::to_string).collect();
            println!("  expectation: chose {}, locally preferred {}", e.chosen, expected.join(" / "));
        }
    }
    Ok(())
}
