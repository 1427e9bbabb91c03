//! The trusted core: axiom base, certificate checking and arithmetic backends.

mod arith;
mod axioms;
mod certificate;
mod checker;
mod prop;

pub use arith::{
    smt_emit, ArithmeticBackend, ArithmeticVerdict, AssumeBackend, BackendRegistry, GroundBackend, SmtBackend,
    Unsupported, SMT_COMMAND_VAR,
};
pub use axioms::{axiom, AxiomBase, Rule, UnknownName};
pub use certificate::{CertificateError, Justification, ProofCertificate, Step};
pub use checker::{check_certificate, step_formulas, CheckResult, ReasonCode};
pub use prop::{prop_tautology, PropOverflow, MAX_ATOMS};
