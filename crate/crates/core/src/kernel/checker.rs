use std::collections::HashMap;
use std::fmt;

use crate::statics::{check_arities, StaticSemantics, SymbolSet};
use crate::syntax::{Expression, Formula};
use crate::usubst::{parse_substitution, uniform_rename, SubstError, UniformSubstitution};

use super::arith::{ArithmeticBackend, ArithmeticVerdict};
use super::axioms::AxiomBase;
use super::certificate::{Justification, ProofCertificate};
use super::prop::prop_tautology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReasonCode {
    Clash,
    Mismatch,
    Arity,
    UnknownRef,
    PropOverflow,
    RaFailed,
}

impl ReasonCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonCode::Clash => "clash",
            ReasonCode::Mismatch => "mismatch",
            ReasonCode::Arity => "arity",
            ReasonCode::UnknownRef => "unknown-ref",
            ReasonCode::PropOverflow => "prop-overflow",
            ReasonCode::RaFailed => "ra-failed",
        }
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Verified,
    /// Verified, given the listed arithmetic facts taken on trust.
    VerifiedModuloArithmetic(Vec<Formula>),
    Rejected { label: String, code: ReasonCode, message: String },
}

struct Rejection {
    code: ReasonCode,
    message: String,
}

fn reject<T>(code: ReasonCode, message: impl Into<String>) -> Result<T, Rejection> {
    Err(Rejection { code, message: message.into() })
}

fn premise<'p>(proved: &'p HashMap<String, Formula>, label: &str) -> Result<&'p Formula, Rejection> {
    match proved.get(label) {
        Some(f) => Ok(f),
        None => reject(ReasonCode::UnknownRef, format!("no earlier step `{label}`")),
    }
}

fn read_substitution(text: &str, hint: &SymbolSet) -> Result<UniformSubstitution, Rejection> {
    parse_substitution(text, Some(hint)).or_else(|e| match e {
        SubstError::Parse(p) if matches!(p.kind, crate::syntax::ParseErrorKind::ArityConflict { .. }) => {
            reject(ReasonCode::Arity, p.to_string())
        }
        e => reject(ReasonCode::Mismatch, e.to_string()),
    })
}

fn apply(sigma: &UniformSubstitution, f: &Formula) -> Result<Formula, Rejection> {
    sigma.apply_formula(f).or_else(|e| reject(ReasonCode::Clash, e.to_string()))
}

/// `Some(psi)` if `major` is `minor -> psi`, with both sides compared after
/// sugar expansion.
fn modus_ponens(minor: &Formula, major: &Formula) -> Option<Formula> {
    if let Formula::Imply(a, b) = major {
        if a.expanded() == minor.expanded() {
            return Some((**b).clone());
        }
    }
    match major.expanded() {
        Formula::Not(inner) => match *inner {
            Formula::And(a, not_b) if *a == minor.expanded() => Some(match *not_b {
                Formula::Not(b) => *b,
                other => Formula::not(other),
            }),
            _ => None,
        },
        _ => None,
    }
}

fn check_step(
    base: &AxiomBase,
    backend: &dyn ArithmeticBackend,
    proved: &HashMap<String, Formula>,
    obligations: &mut Vec<Formula>,
    j: &Justification,
) -> Result<Formula, Rejection> {
    let f = match j {
        Justification::Axiom(name) => match base.axiom(name) {
            Ok(f) => f.clone(),
            Err(e) => return reject(ReasonCode::UnknownRef, e.to_string()),
        },
        Justification::Us { subst, premise: l } => {
            let target = premise(proved, l)?;
            let sigma = read_substitution(subst, &target.signature())?;
            apply(&sigma, target)?
        }
        Justification::Ur { x, y, premise: l } => uniform_rename(x, y, premise(proved, l)?),
        Justification::Usr { subst, rule, premises } => {
            let rule = match base.rule(rule) {
                Ok(r) => r,
                Err(e) => return reject(ReasonCode::UnknownRef, e.to_string()),
            };
            let mut hint = rule.conclusion.signature();
            rule.premises.iter().for_each(|p| hint.union_with(&p.signature()));
            let sigma = read_substitution(subst, &hint)?;
            let fv = sigma.free_vars(&sigma.heads());
            if !fv.is_empty() {
                return reject(ReasonCode::Clash, format!("FV(σ)≠∅: substitution has free variables {fv}"));
            }
            if premises.len() != rule.premises.len() {
                return reject(
                    ReasonCode::Arity,
                    format!("rule {} has {} premises, {} given", rule.name, rule.premises.len(), premises.len()),
                );
            }
            for (schema, l) in rule.premises.iter().zip(premises) {
                let have = premise(proved, l)?;
                let want = apply(&sigma, schema)?;
                if want.expanded() != have.expanded() {
                    return reject(ReasonCode::Mismatch, format!("premise `{l}` is {have}, rule instance needs {want}"));
                }
            }
            apply(&sigma, &rule.conclusion)?
        }
        Justification::Mp { minor, major } => {
            let (a, b) = (premise(proved, minor)?, premise(proved, major)?);
            match modus_ponens(a, b) {
                Some(psi) => psi,
                None => return reject(ReasonCode::Mismatch, format!("`{major}` is not an implication from `{minor}`")),
            }
        }
        Justification::Gen { x, premise: l } => Formula::forall(x.clone(), premise(proved, l)?.clone()),
        Justification::Prop { formula, hyps } => {
            let hyps = hyps.iter().map(|l| premise(proved, l).cloned()).collect::<Result<Vec<_>, _>>()?;
            match prop_tautology(formula, &hyps) {
                Ok(true) => formula.clone(),
                Ok(false) => return reject(ReasonCode::Mismatch, "not a propositional consequence of the cited steps"),
                Err(e) => return reject(ReasonCode::PropOverflow, e.to_string()),
            }
        }
        Justification::Ra(formula) => match backend.decide(formula) {
            ArithmeticVerdict::Proved => formula.clone(),
            ArithmeticVerdict::Assumed => {
                obligations.push(formula.clone());
                formula.clone()
            }
            ArithmeticVerdict::Failed(why) => return reject(ReasonCode::RaFailed, format!("{} backend: {why}", backend.name())),
        },
    };
    if let Err((symbol, a, b)) = check_arities(&Expression::Formula(f.clone())) {
        return reject(ReasonCode::Arity, format!("symbol {symbol} used with arities {a} and {b}"));
    }
    Ok(f)
}

/// Checks every step in order and the final claim.
pub fn check_certificate(cert: &ProofCertificate, backend: &dyn ArithmeticBackend) -> CheckResult {
    let base = AxiomBase::get();
    let mut proved: HashMap<String, Formula> = HashMap::new();
    let mut obligations = Vec::new();
    let mut last = None;
    for step in &cert.steps {
        match check_step(base, backend, &proved, &mut obligations, &step.justification) {
            Ok(f) => {
                proved.insert(step.label.clone(), f.clone());
                last = Some(f);
            }
            Err(r) => return CheckResult::Rejected { label: step.label.clone(), code: r.code, message: r.message },
        }
    }
    let rejected_qed = |message: String| CheckResult::Rejected { label: "qed".into(), code: ReasonCode::Mismatch, message };
    match last {
        None => rejected_qed("certificate has no steps".into()),
        Some(f) if f != cert.claim => rejected_qed(format!("last step proves {f}, not the claim {}", cert.claim)),
        Some(_) if obligations.is_empty() => CheckResult::Verified,
        Some(_) => CheckResult::VerifiedModuloArithmetic(obligations),
    }
}

/// The formula proved by each step, for steps before the first failure.
pub fn step_formulas(cert: &ProofCertificate, backend: &dyn ArithmeticBackend) -> Vec<(String, Formula)> {
    let base = AxiomBase::get();
    let mut proved = HashMap::new();
    let mut obligations = Vec::new();
    let mut out = Vec::new();
    for step in &cert.steps {
        match check_step(base, backend, &proved, &mut obligations, &step.justification) {
            Ok(f) => {
                proved.insert(step.label.clone(), f.clone());
                out.push((step.label.clone(), f));
            }
            Err(_) => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::arith::{AssumeBackend, GroundBackend};
    use crate::syntax::parse_formula;

    fn check(text: &str) -> CheckResult {
        check_certificate(&ProofCertificate::parse(text).unwrap(), &GroundBackend)
    }

    fn code(r: CheckResult) -> (String, ReasonCode) {
        match r {
            CheckResult::Rejected { label, code, .. } => (label, code),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn compose_instance() {
        let r = check(
            "A: axiom compose\n\
             B: us {a ~> {v:=2 ++ v:=x^2+1}^d ;; b ~> {x'=v} ;; P(||) ~> x>0} A\n\
             qed: <{v:=2 ++ v:=x^2+1}^d; {x'=v}> x>0 <-> <{v:=2 ++ v:=x^2+1}^d><{x'=v}> x>0\n",
        );
        assert_eq!(r, CheckResult::Verified);
    }

    #[test]
    fn usr_requires_variable_free_substitution() {
        let cert = "A: prop p() -> p()\nB: usr {p() ~> x>0} M A\nqed: true\n";
        let r = check_certificate(&ProofCertificate::parse(cert).unwrap(), &GroundBackend);
        match r {
            CheckResult::Rejected { label, code, message } => {
                assert_eq!((label.as_str(), code), ("B", ReasonCode::Clash));
                assert!(message.contains("FV(σ)≠∅"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn usr_with_predicationals() {
        let r = check(
            "A: prop x>0 -> x>0\n\
             B: usr {a ~> x:=x+1 ;; P(||) ~> x>0 ;; Q(||) ~> x>0} M A\n\
             qed: <x:=x+1> x>0 -> <x:=x+1> x>0\n",
        );
        assert_eq!(r, CheckResult::Verified);
    }

    #[test]
    fn rejections() {
        assert_eq!(code(check("A: axiom nosuch\nqed: true")), ("A".into(), ReasonCode::UnknownRef));
        assert_eq!(code(check("A: us {f() ~> x} B\nqed: true")), ("A".into(), ReasonCode::UnknownRef));
        assert_eq!(code(check("A: axiom DS\nB: us {f() ~> x} A\nqed: true")), ("B".into(), ReasonCode::Clash));
        assert_eq!(code(check("A: prop x>0\nqed: x>0")), ("A".into(), ReasonCode::Mismatch));
        assert_eq!(code(check("A: ra 1>2\nqed: 1>2")), ("A".into(), ReasonCode::RaFailed));
        assert_eq!(code(check("A: axiom test\nqed: true")), ("qed".into(), ReasonCode::Mismatch));
        assert_eq!(code(check("A: axiom assign\nB: us {p(.) ~> f(.,.)>0} A\nqed: true")), ("B".into(), ReasonCode::Arity));
        let many = (0..25).map(|i| format!("x{i}>0")).collect::<Vec<_>>().join(" | ");
        assert_eq!(code(check(&format!("A: prop {many}\nqed: true"))), ("A".into(), ReasonCode::PropOverflow));
        assert_eq!(code(check("A: prop x>0 -> x>0\nB: usr {P(||) ~> x>0 ;; Q(||) ~> x>0} M A A\nqed: true")).1, ReasonCode::Arity);
    }

    #[test]
    fn modus_ponens_and_generalisation() {
        let r = check(
            "A: ra 2>1\n\
             B: prop 2>1 -> (1<2 | false)\n\
             C: mp A B\n\
             D: gen y C\n\
             qed: \\forall y (1<2 | false)\n",
        );
        assert_eq!(r, CheckResult::Verified);
        let minor = parse_formula("p()").unwrap();
        let major = parse_formula("!(p() & !q())").unwrap();
        assert_eq!(modus_ponens(&minor, &major), Some(parse_formula("q()").unwrap()));
    }

    #[test]
    fn assume_backend_collects_obligations() {
        let cert = ProofCertificate::parse("A: ra x^2>=0\nqed: x^2>=0").unwrap();
        assert_eq!(
            check_certificate(&cert, &AssumeBackend),
            CheckResult::VerifiedModuloArithmetic(vec![parse_formula("x^2>=0").unwrap()])
        );
        assert_eq!(check_certificate(&cert, &AssumeBackend), check_certificate(&cert, &AssumeBackend));
    }

    #[test]
    fn box_axiom_is_a_tautology() {
        assert_eq!(check("A: prop [a] P(||) <-> !<a> !P(||)\nqed: [a] P(||) <-> !<a> !P(||)"), CheckResult::Verified);
    }
}
