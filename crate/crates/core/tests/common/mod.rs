//! Reference enumeration used by the integration tests. It shares only the
//! constraint evaluator with the library: domains, scoring and search are
//! written out independently here.

#![allow(dead_code)]

use wcdp::{eval_binary, eval_unary, CandidateRelation, Grammar, Layer, Sentence, Verdict};

/// Every label on `layer` for the word at `pos`, towards every other node.
pub fn all_candidates(s: &Sentence, g: &Grammar, pos: usize, layer: Layer) -> Vec<CandidateRelation> {
    let readings = s.token(pos).unwrap().readings.len();
    let mut out = Vec::new();
    for label in g.labels(layer) {
        for dom in (0..=s.len()).filter(|&d| d != pos) {
            for reading in 0..readings {
                let mut r = CandidateRelation::new(layer, label.clone(), pos, dom);
                r.reading = reading;
                out.push(r);
            }
        }
    }
    out
}

pub fn unary_factor(g: &Grammar, x: &CandidateRelation, s: &Sentence) -> f64 {
    let mut f = 1.0;
    for c in g.constraints.iter().filter(|c| c.applies_to(x.layer)) {
        if eval_unary(c, x, s).unwrap() == Verdict::Violated {
            f *= c.pf;
        }
    }
    f
}

pub fn pair_factor(g: &Grammar, x: &CandidateRelation, y: &CandidateRelation, s: &Sentence) -> f64 {
    if x.dep == y.dep && x.reading != y.reading {
        return 0.0;
    }
    let mut f = 1.0;
    for c in g.constraints.iter().filter(|c| c.applies_to_pair(x.layer, y.layer)) {
        if eval_binary(c, x, y, s).unwrap() == Verdict::Violated {
            f *= c.pf;
        }
    }
    f
}

/// Score of a complete assignment by direct product; grammars without
/// preference-induced constraints only.
pub fn score(g: &Grammar, a: &[CandidateRelation], s: &Sentence) -> f64 {
    assert!(g.pinduced.is_empty());
    let mut f = 1.0;
    for (i, x) in a.iter().enumerate() {
        f *= unary_factor(g, x, s);
        for y in &a[i + 1..] {
            f *= pair_factor(g, x, y, s);
        }
    }
    f
}

/// All complete assignments with nonzero score, best first. Only exact
/// zeros are cut, so nothing with a positive score is lost.
pub fn enumerate(g: &Grammar, s: &Sentence) -> Vec<(Vec<CandidateRelation>, f64)> {
    assert!(g.pinduced.is_empty());
    let vars: Vec<Vec<(CandidateRelation, f64)>> = (1..=s.len())
        .flat_map(|p| [Layer::Syn, Layer::Sem].map(|l| (p, l)))
        .map(|(p, l)| {
            all_candidates(s, g, p, l)
                .into_iter()
                .map(|r| {
                    let u = unary_factor(g, &r, s);
                    (r, u)
                })
                .filter(|(_, u)| *u > 0.0)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<CandidateRelation> = Vec::new();
    walk(g, s, &vars, &mut chosen, 1.0, &mut out);
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

fn walk(
    g: &Grammar,
    s: &Sentence,
    vars: &[Vec<(CandidateRelation, f64)>],
    chosen: &mut Vec<CandidateRelation>,
    partial: f64,
    out: &mut Vec<(Vec<CandidateRelation>, f64)>,
) {
    let depth = chosen.len();
    if depth == vars.len() {
        out.push((chosen.clone(), partial));
        return;
    }
    for (r, u) in &vars[depth] {
        let mut p = partial * u;
        for c in chosen.iter() {
            if p == 0.0 {
                break;
            }
            p *= pair_factor(g, c, r, s);
        }
        if p == 0.0 {
            continue;
        }
        chosen.push(r.clone());
        walk(g, s, vars, chosen, p, out);
        chosen.pop();
    }
}

/// Form of the word carrying `role` on the semantic layer.
pub fn filler<'a>(a: &[CandidateRelation], s: &'a Sentence, role: &str) -> Option<&'a str> {
    a.iter()
        .find(|r| r.layer == Layer::Sem && r.label == role)
        .map(|r| s.form(r.dep))
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub mod random {
    //! Seeded generators for grammars, sentences and assignments over the
    //! toy vocabulary.

    use rand::rngs::StdRng;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use wcdp::{CandidateRelation, Grammar, Layer, Sentence};

    pub const WORDS: &[&str] = &["Pferde", "Pferd", "Gras", "Gräser", "Autos", "Auto", "Geld", "fressen"];
    const SYN: &[&str] = &["SUBJ", "OBJ", "ROOT"];
    const SEM: &[&str] = &["AG", "PAT", "TOP"];
    const PFS: &[&str] = &["0.0", "0.1", "0.2", "0.3", "0.5", "0.6", "0.7", "0.9"];

    fn labels(layer: &str) -> &'static [&'static str] {
        if layer == "syn" {
            SYN
        } else {
            SEM
        }
    }

    fn node(rng: &mut StdRng, v: &str) -> String {
        format!("{}({v})", ["dep", "dom"].choose(rng).unwrap())
    }

    /// An atomic comparison over `v`, whose relation lives on `layer`.
    fn unary_atom(rng: &mut StdRng, v: &str, layer: &str) -> String {
        let n = node(rng, v);
        match rng.gen_range(0..8) {
            0 => format!("lab({v})={}", labels(layer).choose(rng).unwrap()),
            1 => format!("cat({n})={}", ["N", "V", "ROOTCAT"].choose(rng).unwrap()),
            2 => format!("num(dep({v}))=num(dom({v}))"),
            3 => format!("pos(dep({v})) < pos(dom({v}))"),
            4 => format!("{} in semprop({n})", ["animal", "plant"].choose(rng).unwrap()),
            5 => format!("word({n})=fressen"),
            6 => format!("num({n})={}", ["sg", "pl"].choose(rng).unwrap()),
            _ => {
                let ls = labels(layer);
                format!("lab({v}) in {{{},{}}}", ls[0], ls[rng.gen_range(1..ls.len())])
            }
        }
    }

    fn binary_atom(rng: &mut StdRng, lx: &str, ly: &str) -> String {
        match rng.gen_range(0..6) {
            0 => "dep(X)=dep(Y)".into(),
            1 => "dom(X)=dom(Y)".into(),
            2 => "dep(X)=dom(Y)".into(),
            3 if lx == ly => "lab(X)=lab(Y)".into(),
            4 => unary_atom(rng, "Y", ly),
            _ => unary_atom(rng, "X", lx),
        }
    }

    fn expr(rng: &mut StdRng, depth: u32, lx: &str, ly: Option<&str>) -> String {
        if depth == 0 || rng.gen_bool(0.3) {
            return match ly {
                None => unary_atom(rng, "X", lx),
                Some(ly) => binary_atom(rng, lx, ly),
            };
        }
        let a = expr(rng, depth - 1, lx, ly);
        match rng.gen_range(0..5) {
            0 => format!("!({a})"),
            1 => format!("({a}) & ({})", expr(rng, depth - 1, lx, ly)),
            2 => format!("({a}) | ({})", expr(rng, depth - 1, lx, ly)),
            3 => format!("({a}) <-> ({})", expr(rng, depth - 1, lx, ly)),
            _ => format!("({a}) -> ({})", expr(rng, depth - 1, lx, ly)),
        }
    }

    /// One `constraint` statement with the given id.
    pub fn constraint(rng: &mut StdRng, id: &str) -> String {
        let scope = *["syn", "sem", "cross"].choose(rng).unwrap();
        let arity = if scope == "cross" { 2 } else { rng.gen_range(1..=2) };
        let (lx, ly) = match scope {
            "cross" => ("syn", Some("sem")),
            l if arity == 2 => (l, Some(l)),
            l => (l, None),
        };
        let pf = PFS.choose(rng).unwrap();
        let body = match rng.gen_range(0..3) {
            // guarded form, the common shape of grammar constraints
            0 | 1 => format!("{} -> {}", expr(rng, 1, lx, ly), expr(rng, 2, lx, ly)),
            _ => expr(rng, 3, lx, ly),
        };
        format!("constraint {id} layer={scope} arity={arity} pf={pf} :\n    {body}\n")
    }

    pub fn grammar_text(rng: &mut StdRng, max_constraints: usize) -> String {
        let mut text = String::from("label-set syn SUBJ OBJ ROOT\nlabel-set sem AG PAT TOP\n");
        for i in 0..rng.gen_range(0..=max_constraints) {
            text.push_str(&constraint(rng, &format!("r{i}")));
        }
        text
    }

    pub fn grammar(rng: &mut StdRng, max_constraints: usize) -> Grammar {
        let text = grammar_text(rng, max_constraints);
        wcdp::parse_grammar(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
    }

    pub fn words(rng: &mut StdRng, min: usize, max: usize) -> Vec<&'static str> {
        (0..rng.gen_range(min..=max))
            .map(|_| *WORDS.choose(rng).unwrap())
            .collect()
    }

    /// A complete assignment drawn from every label and head, ignoring
    /// the grammar's licensing.
    pub fn assignment(rng: &mut StdRng, g: &Grammar, s: &Sentence) -> Vec<CandidateRelation> {
        (1..=s.len())
            .flat_map(|p| [Layer::Syn, Layer::Sem].map(|l| (p, l)))
            .map(|(p, l)| super::all_candidates(s, g, p, l).choose(rng).unwrap().clone())
            .collect()
    }
}
