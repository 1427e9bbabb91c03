//! Uniform-substitution proof kernel for differential game logic.

pub mod kernel;
pub mod oracle;
pub mod statics;
pub mod syntax;
pub mod usubst;
