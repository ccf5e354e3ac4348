mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use wcdp::domains::DomainOptions;
use wcdp::network::build_network_with;
use wcdp::oracle::{search, SearchOptions};
use wcdp::{
    best_k, build_network, disambiguate, eval_binary, fixtures, parse_grammar, score_analysis,
    CandidateRelation, Grammar, Layer, Sentence,
};

use common::random;

fn toy_sentence(words: &[&str]) -> Sentence {
    let (_, lex) = fixtures::toy();
    Sentence::from_forms(words.iter().copied(), &lex)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn grammar_round_trips_through_display(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 6);
        let again = parse_grammar(&g.to_string()).unwrap();
        prop_assert_eq!(g, again);
    }

    #[test]
    fn same_layer_binary_evaluation_is_symmetric(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 6);
        let s = toy_sentence(&random::words(&mut rng, 2, 4));
        let a = random::assignment(&mut rng, &g, &s);
        for c in g.constraints.iter().filter(|c| c.arity == 2) {
            for x in &a {
                for y in &a {
                    if c.applies_to_pair(x.layer, y.layer) {
                        prop_assert_eq!(eval_binary(c, x, y, &s).unwrap(), eval_binary(c, y, x, &s).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn network_product_equals_oracle_score(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 6);
        let s = toy_sentence(&random::words(&mut rng, 1, 3));
        let net = build_network_with(&s, &g, DomainOptions { prefilter: false }).unwrap();
        let a = random::assignment(&mut rng, &g, &s);
        let ids: Vec<usize> = a.iter().map(|r| net.find(r).unwrap()).collect();
        let mut product = 1.0;
        for (i, &x) in ids.iter().enumerate() {
            product *= net.unary(x);
            for &y in &ids[i + 1..] {
                product *= net.binary(x, y);
            }
        }
        let exact = score_analysis(&a, &g, &s).unwrap().score;
        prop_assert!((product - exact).abs() <= 1e-12);
        prop_assert!((exact - common::score(&g, &a, &s)).abs() <= 1e-12);
    }

    #[test]
    fn scores_lie_in_unit_interval_and_strict_means_zero(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 6);
        let s = toy_sentence(&random::words(&mut rng, 1, 3));
        let net = build_network_with(&s, &g, DomainOptions { prefilter: false }).unwrap();
        for x in 0..net.num_candidates() {
            let u = net.unary(x);
            prop_assert!((0.0..=1.0).contains(&u));
            let rel = net.candidate(x);
            let strict = g.constraints.iter().any(|c| {
                c.is_strict() && c.applies_to(rel.layer)
                    && wcdp::eval_unary(c, rel, &s).unwrap() == wcdp::Verdict::Violated
            });
            prop_assert_eq!(strict, u == 0.0);
            prop_assert!((0.0..=1.0).contains(&net.support(x)));
        }
    }

    #[test]
    fn adding_a_constraint_never_raises_a_score(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let text = random::grammar_text(&mut rng, 5);
        let g = parse_grammar(&text).unwrap();
        let extended = parse_grammar(&(text + &random::constraint(&mut rng, "extra"))).unwrap();
        let s = toy_sentence(&random::words(&mut rng, 1, 3));
        for _ in 0..8 {
            let a = random::assignment(&mut rng, &g, &s);
            let before = score_analysis(&a, &g, &s).unwrap().score;
            let after = score_analysis(&a, &extended, &s).unwrap().score;
            prop_assert!(after <= before);
        }
    }

    #[test]
    fn best_k_is_a_prefix_of_best_k_plus_one(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 5);
        let s = toy_sentence(&random::words(&mut rng, 1, 3));
        let shorter = best_k(&s, &g, k).unwrap();
        let longer = best_k(&s, &g, k + 1).unwrap();
        prop_assert!(longer.len() >= shorter.len());
        prop_assert_eq!(&longer[..shorter.len()], &shorter[..]);
    }

    #[test]
    fn bound_pruning_matches_full_enumeration(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 5);
        let s = toy_sentence(&random::words(&mut rng, 1, 2));
        let opts = SearchOptions { domains: DomainOptions { prefilter: false }, ..SearchOptions::top(4) };
        let bounded = search(&s, &g, opts).unwrap();
        let naive = search(&s, &g, SearchOptions { bound: false, ..opts }).unwrap();
        prop_assert_eq!(&bounded, &naive);
        let reference = common::enumerate(&g, &s);
        for (i, r) in bounded.iter().enumerate() {
            let expected = reference.get(i).map_or(0.0, |e| e.1);
            prop_assert!((r.score - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn prefiltering_keeps_the_best_score(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 5);
        let s = toy_sentence(&random::words(&mut rng, 1, 3));
        let full = SearchOptions { domains: DomainOptions { prefilter: false }, ..SearchOptions::top(1) };
        let a = search(&s, &g, full).unwrap();
        let b = search(&s, &g, SearchOptions::top(1)).unwrap();
        prop_assert!((a[0].score - b[0].score).abs() <= 1e-12);
    }

    #[test]
    fn disambiguation_is_total_and_consistent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 6);
        let s = toy_sentence(&random::words(&mut rng, 1, 4));
        let a = disambiguate(&s, &g).unwrap();
        prop_assert_eq!(a.relations.len(), 2 * s.len());
        let exact = score_analysis(&a.relations, &g, &s).unwrap();
        prop_assert!((a.score - exact.score).abs() <= 1e-12);
        let product: f64 = a.violations.iter().map(|v| v.pf).product();
        prop_assert!((a.score - product).abs() <= 1e-12);
        prop_assert_eq!(a, disambiguate(&s, &g).unwrap());
    }

    #[test]
    fn removal_never_raises_support(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random::grammar(&mut rng, 6);
        let s = toy_sentence(&random::words(&mut rng, 2, 3));
        let mut net = build_network(&s, &g).unwrap();
        while let wcdp::Selection::Victim(d) = wcdp::select_victim(&net) {
            let before: Vec<f64> = (0..net.num_candidates()).map(|c| net.support(c)).collect();
            let unary: Vec<f64> = (0..net.num_candidates()).map(|c| net.unary(c)).collect();
            net.remove(d.candidate).unwrap();
            for c in (0..net.num_candidates()).filter(|&c| net.is_alive(c)) {
                prop_assert!(net.support(c) <= before[c] + 1e-15);
                prop_assert_eq!(net.unary(c), unary[c]);
            }
        }
    }
}

fn rel(layer: Layer, label: &str, dep: usize, dom: usize) -> CandidateRelation {
    CandidateRelation::new(layer, label, dep, dom)
}

#[test]
fn empty_grammar_scores_everything_one() {
    let g: Grammar = parse_grammar("label-set syn SUBJ OBJ ROOT\nlabel-set sem AG PAT TOP\n").unwrap();
    let s = toy_sentence(&["Pferde", "fressen"]);
    let net = build_network_with(&s, &g, DomainOptions { prefilter: false }).unwrap();
    for x in 0..net.num_candidates() {
        assert_eq!(net.unary(x), 1.0);
        for y in 0..x {
            if net.variable_of(x) != net.variable_of(y) {
                assert_eq!(net.binary(x, y), 1.0);
            }
        }
    }
    let a = vec![
        rel(Layer::Syn, "OBJ", 1, 2),
        rel(Layer::Sem, "TOP", 1, 0),
        rel(Layer::Syn, "SUBJ", 2, 1),
        rel(Layer::Sem, "AG", 2, 1),
    ];
    assert_eq!(score_analysis(&a, &g, &s).unwrap().score, 1.0);
}
