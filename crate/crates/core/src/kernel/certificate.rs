//! Line-oriented proof certificates.
//!
//! Each step is `label: kind arguments`; the file ends with `qed: formula`.
//! A step continues onto following lines while its braces are unbalanced.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{parse_formula, Formula, Variable};
use crate::usubst::parse_substitution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(String),
    /// Substitution source text, re-read against the premise's signature when checked.
    Us { subst: String, premise: String },
    Ur { x: Variable, y: Variable, premise: String },
    Usr { subst: String, rule: String, premises: Vec<String> },
    Mp { minor: String, major: String },
    Gen { x: Variable, premise: String },
    Prop { formula: Formula, hyps: Vec<String> },
    Ra(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub label: String,
    pub line: usize,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofCertificate {
    pub steps: Vec<Step>,
    pub claim: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CertificateError {
    pub line: usize,
    pub message: String,
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn base_variable(s: &str) -> Option<Variable> {
    let ok = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    ok.then(|| Variable::new(s))
}

/// Splits a leading `{...}` group (with nesting) off `s`.
fn split_braced(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start();
    if !s.starts_with('{') {
        return None;
    }
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some((&s[..=i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

fn brace_balance(s: &str) -> i64 {
    s.chars().map(|c| match c {
        '{' => 1,
        '}' => -1,
        _ => 0,
    })
    .sum()
}

impl ProofCertificate {
    pub fn parse(text: &str) -> Result<ProofCertificate, CertificateError> {
        let mut logical: Vec<(usize, String)> = Vec::new();
        let mut open: Option<(usize, String)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            match open.take() {
                Some((start, mut acc)) => {
                    acc.push(' ');
                    acc.push_str(line.trim());
                    if brace_balance(&acc) > 0 {
                        open = Some((start, acc));
                    } else {
                        logical.push((start, acc));
                    }
                }
                None if line.trim().is_empty() => {}
                None => {
                    let acc = line.trim().to_string();
                    if brace_balance(&acc) > 0 {
                        open = Some((i + 1, acc));
                    } else {
                        logical.push((i + 1, acc));
                    }
                }
            }
        }
        if let Some((line, _)) = open {
            return Err(CertificateError { line, message: "unbalanced `{`".into() });
        }

        let mut steps = Vec::new();
        let mut seen = HashSet::new();
        let mut claim = None;
        for (line, text) in logical {
            let err = |message: String| CertificateError { line, message };
            if claim.is_some() {
                return Err(err("text after `qed`".into()));
            }
            let (label, rest) = text.split_once(':').ok_or_else(|| err("expected `label: step`".into()))?;
            let label = label.trim();
            let rest = rest.trim();
            if label == "qed" {
                claim = Some(parse_formula(rest).map_err(|e| err(format!("claim: {e}")))?);
                continue;
            }
            if !is_label(label) {
                return Err(err(format!("invalid label `{label}`")));
            }
            if !seen.insert(label.to_string()) {
                return Err(err(format!("duplicate label `{label}`")));
            }
            let justification = parse_justification(rest).map_err(err)?;
            steps.push(Step { label: label.to_string(), line, justification });
        }
        let claim = claim.ok_or(CertificateError { line: text.lines().count().max(1), message: "missing `qed:` line".into() })?;
        Ok(ProofCertificate { steps, claim })
    }
}

fn labels(s: &str) -> Result<Vec<String>, String> {
    s.split_whitespace()
        .map(|l| if is_label(l) { Ok(l.to_string()) } else { Err(format!("invalid label `{l}`")) })
        .collect()
}

fn one_label(s: &str) -> Result<String, String> {
    match labels(s)?.as_slice() {
        [l] => Ok(l.clone()),
        _ => Err(format!("expected one label, found `{}`", s.trim())),
    }
}

fn variable(s: Option<&str>) -> Result<Variable, String> {
    let s = s.ok_or("missing variable")?;
    base_variable(s).ok_or_else(|| format!("invalid variable `{s}`"))
}

fn substitution(rest: &str) -> Result<(String, &str), String> {
    let (subst, after) = split_braced(rest).ok_or("expected `{...}` substitution")?;
    parse_substitution(subst, None).map_err(|e| format!("substitution: {e}"))?;
    Ok((subst.to_string(), after))
}

fn parse_justification(text: &str) -> Result<Justification, String> {
    let (kind, rest) = match text.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (text, ""),
    };
    Ok(match kind {
        "axiom" => Justification::Axiom(one_label(rest)?),
        "us" => {
            let (subst, after) = substitution(rest)?;
            Justification::Us { subst, premise: one_label(after)? }
        }
        "ur" => {
            let mut parts = rest.split_whitespace();
            let x = variable(parts.next())?;
            let y = variable(parts.next())?;
            let premise = one_label(&parts.collect::<Vec<_>>().join(" "))?;
            Justification::Ur { x, y, premise }
        }
        "usr" => {
            let (subst, after) = substitution(rest)?;
            let mut names = labels(after)?;
            if names.is_empty() {
                return Err("missing rule name".into());
            }
            let rule = names.remove(0);
            Justification::Usr { subst, rule, premises: names }
        }
        "mp" => match labels(rest)?.as_slice() {
            [minor, major] => Justification::Mp { minor: minor.clone(), major: major.clone() },
            _ => return Err("mp expects two labels".into()),
        },
        "gen" => {
            let mut parts = rest.split_whitespace();
            let x = variable(parts.next())?;
            let premise = one_label(&parts.collect::<Vec<_>>().join(" "))?;
            Justification::Gen { x, premise }
        }
        "prop" => {
            let (formula, hyps) = match rest.rfind(" from ") {
                Some(i) => (&rest[..i], labels(&rest[i + 6..])?),
                None => match rest.strip_suffix(" from") {
                    Some(f) => (f, Vec::new()),
                    None => (rest, Vec::new()),
                },
            };
            let formula = parse_formula(formula).map_err(|e| format!("formula: {e}"))?;
            Justification::Prop { formula, hyps }
        }
        "ra" => Justification::Ra(parse_formula(rest).map_err(|e| format!("formula: {e}"))?),
        other => return Err(format!("unknown step kind `{other}`")),
    })
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(n) => write!(f, "axiom {n}"),
            Justification::Us { subst, premise } => write!(f, "us {subst} {premise}"),
            Justification::Ur { x, y, premise } => write!(f, "ur {x} {y} {premise}"),
            Justification::Usr { subst, rule, premises } => write!(f, "usr {subst} {rule} {}", premises.join(" ")),
            Justification::Mp { minor, major } => write!(f, "mp {minor} {major}"),
            Justification::Gen { x, premise } => write!(f, "gen {x} {premise}"),
            Justification::Prop { formula, hyps } if hyps.is_empty() => write!(f, "prop {formula}"),
            Justification::Prop { formula, hyps } => write!(f, "prop {formula} from {}", hyps.join(" ")),
            Justification::Ra(formula) => write!(f, "ra {formula}"),
        }
    }
}

impl fmt::Display for ProofCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{}: {}", s.label, s.justification)?;
        }
        writeln!(f, "qed: {}", self.claim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_step_kinds() {
        let text = "\
# comment
A: axiom compose
B: us {a ~> x:=1 ;;
       P(||) ~> x>0} A
C: ur x v B
D: usr {a ~> v:=1} M C
E: mp C D
F: gen t E
G: prop x>0 -> x>0 from A B
H: ra 1>0
qed: 1>0
";
        let cert = ProofCertificate::parse(text).unwrap();
        assert_eq!(cert.steps.len(), 8);
        assert_eq!(cert.steps[1].line, 3);
        assert!(matches!(&cert.steps[1].justification, Justification::Us { premise, .. } if premise == "A"));
        assert!(matches!(&cert.steps[3].justification, Justification::Usr { rule, premises, .. } if rule == "M" && premises == &["C"]));
        assert!(matches!(&cert.steps[6].justification, Justification::Prop { hyps, .. } if hyps.len() == 2));
        assert_eq!(ProofCertificate::parse(&cert.to_string()).unwrap().steps.len(), 8);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(ProofCertificate::parse("A: axiom box\n").unwrap_err().message.contains("qed"));
        assert_eq!(ProofCertificate::parse("A: axiom box\nA: axiom box\nqed: true").unwrap_err().line, 2);
        assert!(ProofCertificate::parse("A: frobnicate\nqed: true").is_err());
        assert!(ProofCertificate::parse("A: us {f(.1) ~> x} B\nqed: true").is_err());
        assert!(ProofCertificate::parse("A: us {a ~> x:=1 B\nqed: true").is_err());
        assert!(ProofCertificate::parse("A: ur x' y B\nqed: true").is_err());
    }
}
