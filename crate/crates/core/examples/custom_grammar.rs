//! A grammar written inline, with the pruning trace of one sentence.

use wcdp::disambiguator::run;
use wcdp::{parse_grammar, DomainOptions, Layer, Lexicon, Sentence};

const GRAMMAR: &str = "
label-set syn SUBJ OBJ ROOT
label-set sem AG PAT TOP

constraint nouns layer=syn arity=1 pf=0.0 :
    cat(dep(X))=N -> cat(dom(X))=V & lab(X) in {SUBJ,OBJ}
constraint root layer=syn arity=1 pf=0.0 :
    (cat(dom(X))=ROOTCAT <-> lab(X)=ROOT) & (cat(dep(X))=V -> lab(X)=ROOT)
constraint unique layer=syn arity=2 pf=0.0 :
    lab(X)=lab(Y) & dom(X)=dom(Y) -> dep(X)=dep(Y)
# case decides the subject outright
constraint nominative layer=syn arity=1 pf=0.2 :
    lab(X)=SUBJ -> nom in case(dep(X))

constraint roles layer=sem arity=1 pf=0.0 :
    cat(dep(X))=N -> cat(dom(X))=V & lab(X) in {AG,PAT}
constraint sem-root layer=sem arity=1 pf=0.0 :
    (cat(dom(X))=ROOTCAT <-> lab(X)=TOP) & (cat(dep(X))=V -> lab(X)=TOP)
constraint sem-unique layer=sem arity=2 pf=0.0 :
    lab(X)=lab(Y) & dom(X)=dom(Y) -> dep(X)=dep(Y)
constraint mapping layer=cross arity=2 pf=0.1 :
    dep(X)=dep(Y) -> (lab(X)=SUBJ <-> lab(Y)=AG)
";

const LEXICON: &str = "
den   cat=N case={acc}
Hund  cat=N case={nom,acc}
beisst cat=V
";

fn main() -> wcdp::Result<()> {
    let grammar = parse_grammar(GRAMMAR)?;
    let lexicon = Lexicon::parse(LEXICON)?;
    let sentence = Sentence::parse("den beisst Hund", &lexicon);
    let d = run(&sentence, &grammar, DomainOptions::default())?;
    for event in d.network.trace() {
        println!("{event}");
    }
    for p in 1..=sentence.len() {
        println!(
            "{:<7} {:<5} {}",
            sentence.form(p),
            d.analysis.relation(p, Layer::Syn).label,
            d.analysis.relation(p, Layer::Sem).label
        );
    }
    println!("score {}", d.analysis.score);
    Ok(())
}
