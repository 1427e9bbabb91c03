use std::sync::OnceLock;

use thiserror::Error;

use crate::syntax::{parse_formula, Formula};

const AXIOMS: &[(&str, &str)] = &[
    ("box", "[a] P(||) <-> !<a> !P(||)"),
    ("assign", "<x:=f()> p(x) <-> p(f())"),
    ("DS", "<{x'=f()}> p(x) <-> \\exists t (t>=0 & <x:=x+f()*t> p(x))"),
    ("test", "<?q()> p() <-> q() & p()"),
    ("choice", "<a ++ b> P(||) <-> <a> P(||) | <b> P(||)"),
    ("compose", "<a;b> P(||) <-> <a><b> P(||)"),
    ("iterate", "<{a}*> P(||) <-> P(||) | <a><{a}*> P(||)"),
    ("dual", "<{a}^d> P(||) <-> !<a> !P(||)"),
    ("K-forall", "\\forall x (P(||) -> Q(||)) -> (\\forall x P(||) -> \\forall x Q(||))"),
    ("V-forall", "p() -> \\forall x p()"),
    ("inst", "\\forall x p(x) -> p(f())"),
];

const RULES: &[(&str, &[&str], &str)] = &[
    ("M", &["P(||) -> Q(||)"], "<a> P(||) -> <a> Q(||)"),
    ("FP", &["P(||) | <a> Q(||) -> Q(||)"], "<{a}*> P(||) -> Q(||)"),
    ("MP", &["p()", "p() -> q()"], "q()"),
    ("gen", &["p(x)"], "\\forall x p(x)"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: &'static str,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

/// The fixed axioms and axiomatic proof rules.
#[derive(Debug, Clone)]
pub struct AxiomBase {
    axioms: Vec<(&'static str, Formula)>,
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{name}`")]
pub struct UnknownName {
    pub kind: &'static str,
    pub name: String,
}

fn formula(text: &str) -> Formula {
    parse_formula(text).unwrap_or_else(|e| panic!("built-in formula `{text}` does not parse: {e}"))
}

impl AxiomBase {
    /// The shared base.
    pub fn get() -> &'static AxiomBase {
        static BASE: OnceLock<AxiomBase> = OnceLock::new();
        BASE.get_or_init(|| AxiomBase {
            axioms: AXIOMS.iter().map(|(n, t)| (*n, formula(t))).collect(),
            rules: RULES
                .iter()
                .map(|(n, ps, c)| Rule { name: n, premises: ps.iter().map(|p| formula(p)).collect(), conclusion: formula(c) })
                .collect(),
        })
    }

    pub fn axiom(&self, name: &str) -> Result<&Formula, UnknownName> {
        self.axioms
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| UnknownName { kind: "axiom", name: name.to_string() })
    }

    pub fn rule(&self, name: &str) -> Result<&Rule, UnknownName> {
        self.rules.iter().find(|r| r.name == name).ok_or_else(|| UnknownName { kind: "rule", name: name.to_string() })
    }

    pub fn axioms(&self) -> impl Iterator<Item = (&'static str, &Formula)> {
        self.axioms.iter().map(|(n, f)| (*n, f))
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter()
    }

    /// The source text of each axiom, in base order.
    pub fn axiom_texts() -> impl Iterator<Item = (&'static str, &'static str)> {
        AXIOMS.iter().copied()
    }

    pub fn rule_texts() -> impl Iterator<Item = (&'static str, &'static [&'static str], &'static str)> {
        RULES.iter().copied()
    }
}

/// The stored axiom of the given name.
pub fn axiom(name: &str) -> Result<Formula, UnknownName> {
    AxiomBase::get().axiom(name).cloned()
}
