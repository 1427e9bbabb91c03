mod common;

use common::{Gen, Shape, VARS};
use dgl_core::kernel::{check_certificate, AssumeBackend, CheckResult, ProofCertificate};
use dgl_core::oracle::{
    adjoint_eval, adjoint_eval_term, eval_formula, eval_term, Budget, EvalError, TruthValue3,
};
use dgl_core::statics::{free_vars, StaticSemantics, VarSet};
use dgl_core::syntax::{parse_formula, parse_game, parse_term, Expression, Formula, Game, Variable};
use dgl_core::usubst::{parse_substitution, subst_free_vars, uniform_rename, UniformSubstitution};

const CASES: usize = 1_000;

fn budget() -> Budget {
    Budget::with_depth(4)
}

fn known(v: Result<TruthValue3, EvalError>) -> Option<TruthValue3> {
    v.ok().filter(|t| t.is_determinate())
}

#[test]
fn identity_substitution() {
    let mut g = Gen::new(101, Shape::full());
    let empty = UniformSubstitution::new();
    for _ in 0..CASES {
        let e: Expression = g.formula(4).into();
        assert_eq!(empty.apply(&e).unwrap(), e);
        let t = g.term(4);
        assert_eq!(empty.apply_term(&t).unwrap(), t);
    }
}

#[test]
fn rename_is_an_involution() {
    let mut g = Gen::new(102, Shape::full());
    for _ in 0..CASES {
        let x = g.base_var();
        let y = g.base_var();
        let f = g.formula(4);
        assert_eq!(uniform_rename(&x, &y, &uniform_rename(&x, &y, &f)), f);
        let a = g.game(3);
        assert_eq!(uniform_rename(&x, &y, &uniform_rename(&x, &y, &a)), a);
        assert_eq!(uniform_rename(&x, &x, &f), f);
    }
}

#[test]
fn rename_commutes_with_free_variables() {
    let mut g = Gen::new(103, Shape::full());
    for _ in 0..CASES {
        let x = g.base_var();
        let y = g.base_var();
        let f = g.formula(3);
        let renamed = free_vars(&uniform_rename(&x, &y, &f));
        match free_vars(&f).finite() {
            Some(vs) => {
                let expected = VarSet::of(vs.iter().map(|v| v.transpose(&x.name, &y.name)));
                assert_eq!(renamed, expected, "{f}");
            }
            None => assert!(renamed.is_top()),
        }
    }
}

#[test]
fn clashes_name_a_real_conflict() {
    let mut g = Gen::new(104, Shape::oracle());
    let mut clashes = 0;
    for _ in 0..CASES * 4 {
        let sigma = g.substitution();
        let phi = g.formula(3);
        let Err(c) = sigma.apply_formula(&phi) else { continue };
        clashes += 1;
        match &c.variable {
            Some(v) => assert!(c.taboo.contains(v), "{c}"),
            None => assert!(c.taboo.is_top(), "{c}"),
        }
        if let Some((name, arity)) = c.head.split_once('/') {
            let arity: usize = arity.parse().unwrap();
            let fv = match (sigma.function(name, arity), sigma.predicate(name, arity)) {
                (Some(t), _) => t.free_vars(),
                (_, Some(f)) => f.free_vars(),
                _ => panic!("clash names unknown head {}", c.head),
            };
            match &c.variable {
                Some(v) => assert!(fv.contains(v), "{c}"),
                None => assert!(!fv.is_empty(), "{c}"),
            }
        }
    }
    assert!(clashes > 100, "only {clashes} clashes generated");
}

#[test]
fn substitution_lemma_for_terms() {
    let mut g = Gen::new(105, Shape::oracle());
    let mut compared = 0;
    for _ in 0..CASES {
        let sigma = g.substitution();
        let t = g.term(3);
        let i = g.interpretation();
        let w = g.state();
        let Ok(st) = sigma.apply_term(&t) else { continue };
        let (Ok(a), Ok(b)) = (eval_term(&i, &w, &st), adjoint_eval_term(&i, &sigma, &w, &t)) else { continue };
        assert_eq!(a, b, "σ={sigma} θ={t} ω={w}");
        compared += 1;
    }
    assert!(compared > CASES / 2);
}

#[test]
fn substitution_lemma_for_games() {
    let mut g = Gen::new(106, Shape { loops: false, ..Shape::oracle() });
    let mut compared = 0;
    for _ in 0..CASES {
        let sigma = g.substitution();
        let alpha = g.game(3);
        let phi = g.formula(2);
        let i = g.interpretation();
        let w = g.state();
        let whole = Formula::diamond(alpha, phi);
        let Ok(applied) = sigma.apply_formula(&whole) else { continue };
        let a = known(eval_formula(&i, &w, &applied, &budget()));
        let b = known(adjoint_eval(&i, &sigma, &w, &whole, &budget()));
        if let (Some(a), Some(b)) = (a, b) {
            assert_eq!(a, b, "σ={sigma} φ={whole} ω={w}");
            compared += 1;
        }
    }
    assert!(compared > CASES / 2);
}

#[test]
fn empty_adjoint_is_plain_evaluation() {
    let mut g = Gen::new(107, Shape::oracle());
    let empty = UniformSubstitution::new();
    for _ in 0..CASES {
        let f = g.formula(3);
        let i = g.interpretation();
        let w = g.state();
        assert_eq!(adjoint_eval(&i, &empty, &w, &f, &budget()), eval_formula(&i, &w, &f, &budget()));
    }
}

#[test]
fn determinacy_by_duality() {
    let mut g = Gen::new(108, Shape::oracle());
    for _ in 0..CASES {
        let alpha = g.game(3);
        let phi = g.formula(2);
        let i = g.interpretation();
        let w = g.state();
        let dual = eval_formula(&i, &w, &Formula::diamond(Game::dual(alpha.clone()), phi.clone()), &budget()).unwrap();
        let direct = eval_formula(&i, &w, &Formula::diamond(alpha, Formula::not(phi)), &budget()).unwrap();
        assert_eq!(dual, direct.not());
    }
}

#[test]
fn deeper_unrolling_only_refines() {
    // Nested loops multiply the unrolling work, so the body is loop-free.
    let mut g = Gen::new(109, Shape { loops: false, ..Shape::oracle() });
    for _ in 0..CASES / 2 {
        let alpha = Game::repeat(g.game(2));
        let phi = g.formula(2);
        let f = Formula::diamond(alpha, phi);
        let i = g.interpretation();
        let w = g.state();
        let mut last = TruthValue3::Unknown;
        for depth in 0..6 {
            let now = eval_formula(&i, &w, &f, &Budget::with_depth(depth)).unwrap();
            if last.is_determinate() {
                assert_eq!(now, last, "{f} at depth {depth}");
            }
            last = now;
        }
    }
}

#[test]
fn adjoints_depend_only_on_free_variables_of_the_substitution() {
    let mut g = Gen::new(110, Shape::oracle());
    let mut compared = 0;
    for _ in 0..CASES {
        let sigma = g.substitution();
        let phi = g.formula(3);
        let i = g.interpretation();
        let w = g.state();
        let keep = subst_free_vars(&sigma, &sigma.heads()).union(&free_vars(&phi));
        let mut nu = w.clone();
        for x in VARS.iter().map(|n| Variable::new(*n)) {
            if !keep.contains(&x) {
                let r = g.value();
                nu.set(x, r);
            }
        }
        let a = known(adjoint_eval(&i, &sigma, &w, &phi, &budget()));
        let b = known(adjoint_eval(&i, &sigma, &nu, &phi, &budget()));
        if let (Some(a), Some(b)) = (a, b) {
            assert_eq!(a, b);
            compared += 1;
        }
    }
    assert!(compared > CASES / 2);
}

#[test]
fn placeholders_only_parse_inside_substitutions() {
    let mut g = Gen::new(111, Shape::oracle().with_dots(2));
    let mut seen = 0;
    for _ in 0..CASES {
        let t = g.term(3);
        if !dgl_core::statics::heads_with_dots(&t).dots.is_empty() {
            seen += 1;
            let text = t.to_string();
            assert!(parse_term(&text).is_err(), "{text}");
            assert!(parse_formula(&format!("{text}>=0")).is_err());
            assert!(parse_game(&format!("x:={text}")).is_err());
            assert!(parse_substitution(&format!("{{g(.0,.1) ~> {text}}}"), None).is_ok(), "{text}");
        }
    }
    assert!(seen > 100);
}

#[test]
fn expansion_preserves_meaning() {
    let mut g = Gen::new(112, Shape::oracle());
    for _ in 0..200 {
        let f = g.formula(3);
        let t = g.term(3);
        let fe = parse_formula(&f.expanded().to_string()).unwrap();
        let te = parse_term(&t.expanded().to_string()).unwrap();
        let i = g.interpretation();
        for _ in 0..100 {
            let w = g.state();
            assert_eq!(eval_term(&i, &w, &t).ok(), eval_term(&i, &w, &te).ok(), "{t}");
            let a = known(eval_formula(&i, &w, &f, &budget()));
            let b = known(eval_formula(&i, &w, &fe, &budget()));
            if let (Some(a), Some(b)) = (a, b) {
                assert_eq!(a, b, "{f}");
            }
        }
    }
}

/// Every schema instance of these axioms is reached by one substitution.
#[test]
fn structural_axioms_are_surjective() {
    let mut g = Gen::new(113, Shape::full());
    let axiom = |n: &str| dgl_core::kernel::axiom(n).unwrap();
    for _ in 0..CASES {
        let (a, b) = (g.game(3), g.game(3));
        let (p, q) = (g.formula(3), g.formula(3));
        let mut s = UniformSubstitution::new();
        s.insert_game("a", a.clone()).unwrap();
        s.insert_game("b", b.clone()).unwrap();
        s.insert_predicational("P", p.clone()).unwrap();
        let dia = |g: &Game, f: &Formula| Formula::diamond(g.clone(), f.clone());
        let cases = [
            ("box", Formula::equiv(Formula::boxed(a.clone(), p.clone()), Formula::not(dia(&a, &Formula::not(p.clone()))))),
            ("choice", Formula::equiv(dia(&Game::choice(a.clone(), b.clone()), &p), Formula::or(dia(&a, &p), dia(&b, &p)))),
            ("compose", Formula::equiv(dia(&Game::seq(a.clone(), b.clone()), &p), dia(&a, &dia(&b, &p)))),
            (
                "iterate",
                Formula::equiv(dia(&Game::repeat(a.clone()), &p), Formula::or(p.clone(), dia(&a, &dia(&Game::repeat(a.clone()), &p)))),
            ),
            ("dual", Formula::equiv(dia(&Game::dual(a.clone()), &p), Formula::not(dia(&a, &Formula::not(p.clone()))))),
        ];
        for (name, expected) in cases {
            assert_eq!(s.apply_formula(&axiom(name)).unwrap(), expected, "{name}");
        }
        let mut t = UniformSubstitution::new();
        t.insert_predicate("q", 0, q.clone()).unwrap();
        t.insert_predicate("p", 0, p.clone()).unwrap();
        let expected = Formula::equiv(dia(&Game::test(q.clone()), &p), Formula::and(q, p));
        assert_eq!(t.apply_formula(&axiom("test")).unwrap(), expected);
    }
}

const BUNDLED: &str = include_str!("../examples/angel_velocity.dgp");

#[test]
fn checking_is_deterministic() {
    let cert = ProofCertificate::parse(BUNDLED).unwrap();
    let first = check_certificate(&cert, &AssumeBackend);
    for _ in 0..5 {
        assert_eq!(check_certificate(&cert, &AssumeBackend), first);
    }
}

/// Perturbing any constant in the bundled proof breaks it.
#[test]
fn mutated_certificates_are_rejected() {
    let lines: Vec<&str> = BUNDLED.lines().collect();
    let mut mutants = 0;
    for (n, line) in lines.iter().enumerate() {
        let code = line.split('#').next().unwrap();
        for (from, to) in [("2", "3"), ("x>0", "x>1"), ("x'=v", "x'=x"), ("++", ";")] {
            let Some(at) = code.find(from) else { continue };
            let mut mutated = lines.clone();
            let changed = format!("{}{to}{}", &line[..at], &line[at + from.len()..]);
            mutated[n] = &changed;
            let text = mutated.join("\n");
            mutants += 1;
            if let Ok(cert) = ProofCertificate::parse(&text) {
                let result = check_certificate(&cert, &AssumeBackend);
                assert!(matches!(result, CheckResult::Rejected { .. }), "line {}: {changed}\n{result:?}", n + 1);
            }
        }
    }
    assert!(mutants > 40);
}

#[test]
fn ground_states_evaluate_closed_comparisons() {
    let mut g = Gen::new(114, Shape::ground());
    let empty = UniformSubstitution::new();
    for _ in 0..CASES {
        let f = g.decidable_formula(3);
        let w = g.state();
        // Without loops or quantifiers only ODEs could leave the value open.
        assert!(eval_formula(&empty, &w, &f, &budget()).unwrap().is_determinate(), "{f}");
    }
}
