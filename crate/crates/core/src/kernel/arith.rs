//! Real-arithmetic backends: a trait with named implementations chosen at
//! runtime through [`BackendRegistry`].

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::{Command, Stdio};

use num_traits::Signed;
use thiserror::Error;

use crate::oracle::{eval_formula, Budget, State, SyntacticInterpretation, TruthValue3};
use crate::statics::StaticSemantics;
use crate::syntax::{CmpOp, Formula, Rational, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithmeticVerdict {
    Proved,
    /// Accepted without proof; recorded as an obligation.
    Assumed,
    Failed(String),
}

pub trait ArithmeticBackend {
    fn name(&self) -> &str;
    fn decide(&self, f: &Formula) -> ArithmeticVerdict;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not first-order real arithmetic: {0}")]
pub struct Unsupported(pub String);

fn is_quantifier_free_arithmetic(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False => true,
        Formula::Cmp(_, a, b) => is_arithmetic_term(a) && is_arithmetic_term(b),
        Formula::Not(a) => is_quantifier_free_arithmetic(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imply(a, b) | Formula::Equiv(a, b) => {
            is_quantifier_free_arithmetic(a) && is_quantifier_free_arithmetic(b)
        }
        _ => false,
    }
}

fn is_arithmetic_term(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Number(_) => true,
        Term::Plus(a, b) | Term::Times(a, b) | Term::Minus(a, b) => is_arithmetic_term(a) && is_arithmetic_term(b),
        Term::Neg(a) | Term::Power(a, _) => is_arithmetic_term(a),
        Term::Func(..) | Term::Dot(_) | Term::Differential(_) => false,
    }
}

/// Decides closed quantifier-free formulas by exact evaluation.
pub struct GroundBackend;

impl ArithmeticBackend for GroundBackend {
    fn name(&self) -> &str {
        "ground"
    }

    fn decide(&self, f: &Formula) -> ArithmeticVerdict {
        if !f.free_vars().is_empty() {
            return ArithmeticVerdict::Failed(format!("not closed: free variables {}", f.free_vars()));
        }
        if !is_quantifier_free_arithmetic(f) {
            return ArithmeticVerdict::Failed("not quantifier-free real arithmetic".into());
        }
        match eval_formula(&SyntacticInterpretation::new(), &State::new(), f, &Budget::default()) {
            Ok(TruthValue3::True) => ArithmeticVerdict::Proved,
            Ok(v) => ArithmeticVerdict::Failed(format!("evaluates to {v}")),
            Err(e) => ArithmeticVerdict::Failed(e.to_string()),
        }
    }
}

/// Hands the negated formula to an external solver run as `sh -c <command>`.
pub struct SmtBackend {
    command: Option<String>,
}

pub const SMT_COMMAND_VAR: &str = "DGL_SMT_CMD";

impl SmtBackend {
    pub fn new(command: Option<String>) -> Self {
        SmtBackend { command }
    }

    pub fn from_env() -> Self {
        SmtBackend::new(std::env::var(SMT_COMMAND_VAR).ok().filter(|c| !c.trim().is_empty()))
    }

    /// Like [`SmtBackend::from_env`], falling back to `z3 -in` when `z3` is on the PATH.
    pub fn detect() -> Self {
        let backend = SmtBackend::from_env();
        if backend.command.is_some() {
            return backend;
        }
        let found = Command::new("sh")
            .arg("-c")
            .arg("command -v z3")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status()
            .is_ok_and(|s| s.success());
        SmtBackend::new(found.then(|| "z3 -in".to_string()))
    }

    pub fn command(&self) -> Option<&str> {
        self.command.as_deref()
    }

    fn run(&self, command: &str, script: &str) -> Result<String, String> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot start solver: {e}"))?;
        child
            .stdin
            .take()
            .expect("stdin is piped")
            .write_all(script.as_bytes())
            .map_err(|e| format!("cannot write to solver: {e}"))?;
        let out = child.wait_with_output().map_err(|e| format!("solver failed: {e}"))?;
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }
}

impl ArithmeticBackend for SmtBackend {
    fn name(&self) -> &str {
        "smt"
    }

    fn decide(&self, f: &Formula) -> ArithmeticVerdict {
        let Some(command) = &self.command else {
            return ArithmeticVerdict::Failed(format!("no solver configured ({SMT_COMMAND_VAR} is unset)"));
        };
        let script = match smt_emit(f) {
            Ok(s) => s,
            Err(e) => return ArithmeticVerdict::Failed(e.to_string()),
        };
        match self.run(command, &script) {
            Ok(answer) => match answer.split_whitespace().next() {
                Some("unsat") => ArithmeticVerdict::Proved,
                Some(word) => ArithmeticVerdict::Failed(format!("solver answered {word}")),
                None => ArithmeticVerdict::Failed("solver gave no answer".into()),
            },
            Err(e) => ArithmeticVerdict::Failed(e),
        }
    }
}

/// Trusts every formula and records it.
pub struct AssumeBackend;

impl ArithmeticBackend for AssumeBackend {
    fn name(&self) -> &str {
        "assume"
    }

    fn decide(&self, _: &Formula) -> ArithmeticVerdict {
        ArithmeticVerdict::Assumed
    }
}

/// Backends by name.
pub struct BackendRegistry {
    backends: Vec<Box<dyn ArithmeticBackend>>,
}

impl BackendRegistry {
    pub fn empty() -> Self {
        BackendRegistry { backends: Vec::new() }
    }

    /// `ground`, `smt` (see [`SmtBackend::detect`]) and `assume`.
    pub fn standard() -> Self {
        let mut r = BackendRegistry::empty();
        r.register(Box::new(GroundBackend));
        r.register(Box::new(SmtBackend::detect()));
        r.register(Box::new(AssumeBackend));
        r
    }

    /// Adds a backend, replacing any with the same name.
    pub fn register(&mut self, backend: Box<dyn ArithmeticBackend>) {
        self.backends.retain(|b| b.name() != backend.name());
        self.backends.push(backend);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ArithmeticBackend> {
        self.backends.iter().find(|b| b.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&str> {
        self.backends.iter().map(|b| b.name()).collect()
    }
}

fn smt_var(x: &Variable) -> String {
    if x.primed {
        format!("|{x}|")
    } else {
        x.name.clone()
    }
}

fn smt_number(r: &Rational) -> String {
    if r.is_negative() {
        return format!("(- {})", smt_number(&-r.clone()));
    }
    if r.is_integer() {
        format!("{}.0", r.to_integer())
    } else {
        format!("(/ {}.0 {}.0)", r.numer(), r.denom())
    }
}

fn smt_term(out: &mut String, t: &Term) -> Result<(), Unsupported> {
    let bin = |out: &mut String, op: &str, a: &Term, b: &Term| -> Result<(), Unsupported> {
        write!(out, "({op} ").unwrap();
        smt_term(out, a)?;
        out.push(' ');
        smt_term(out, b)?;
        out.push(')');
        Ok(())
    };
    match t {
        Term::Var(x) => out.push_str(&smt_var(x)),
        Term::Number(r) => out.push_str(&smt_number(r)),
        Term::Plus(a, b) => bin(out, "+", a, b)?,
        Term::Times(a, b) => bin(out, "*", a, b)?,
        Term::Minus(a, b) => bin(out, "-", a, b)?,
        Term::Neg(a) => {
            out.push_str("(- ");
            smt_term(out, a)?;
            out.push(')');
        }
        Term::Power(_, 0) => out.push_str("1.0"),
        Term::Power(a, 1) => smt_term(out, a)?,
        Term::Power(a, n) => {
            out.push_str("(*");
            for _ in 0..*n {
                out.push(' ');
                smt_term(out, a)?;
            }
            out.push(')');
        }
        Term::Func(..) | Term::Dot(_) | Term::Differential(_) => return Err(Unsupported(t.to_string())),
    }
    Ok(())
}

fn smt_formula(out: &mut String, f: &Formula) -> Result<(), Unsupported> {
    let nary = |out: &mut String, op: &str, parts: &[&Formula]| -> Result<(), Unsupported> {
        write!(out, "({op}").unwrap();
        for p in parts {
            out.push(' ');
            smt_formula(out, p)?;
        }
        out.push(')');
        Ok(())
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Cmp(op, a, b) => {
            let (sym, negate) = match op {
                CmpOp::Geq => (">=", false),
                CmpOp::Leq => ("<=", false),
                CmpOp::Gt => (">", false),
                CmpOp::Lt => ("<", false),
                CmpOp::Eq => ("=", false),
                CmpOp::Neq => ("=", true),
            };
            if negate {
                out.push_str("(not ");
            }
            write!(out, "({sym} ").unwrap();
            smt_term(out, a)?;
            out.push(' ');
            smt_term(out, b)?;
            out.push(')');
            if negate {
                out.push(')');
            }
        }
        Formula::Not(a) => nary(out, "not", &[a])?,
        Formula::And(a, b) => nary(out, "and", &[a, b])?,
        Formula::Or(a, b) => nary(out, "or", &[a, b])?,
        Formula::Imply(a, b) => nary(out, "=>", &[a, b])?,
        Formula::Equiv(a, b) => nary(out, "=", &[a, b])?,
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            let q = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            write!(out, "({q} (({} Real)) ", smt_var(x)).unwrap();
            smt_formula(out, body)?;
            out.push(')');
        }
        Formula::Pred(..) | Formula::Predicational(_) | Formula::Diamond(..) | Formula::Box(..) => {
            return Err(Unsupported(f.to_string()))
        }
    }
    Ok(())
}

/// An SMT-LIB 2 script that is unsatisfiable iff `f` is valid over the reals.
pub fn smt_emit(f: &Formula) -> Result<String, Unsupported> {
    let mut body = String::new();
    smt_formula(&mut body, f)?;
    let mut script = String::from("(set-logic NRA)\n");
    let fv = f.free_vars();
    for x in fv.finite().expect("arithmetic formulas have finitely many free variables") {
        writeln!(script, "(declare-const {} Real)", smt_var(x)).unwrap();
    }
    writeln!(script, "(assert (not {body}))").unwrap();
    script.push_str("(check-sat)\n");
    Ok(script)
}
