//! Exact verification engine for Artin–Schreier symbol algebras over iterated
//! Laurent series fields: value-group lattices, division certificates, trace-zero
//! value counting, and witness-checked Brauer class rewriting.

pub mod brauer;
pub mod element;
pub mod error;
pub mod fieldtower;
pub mod fp;
pub mod theorems;
pub mod valdiv;
pub mod valgroup;

pub use brauer::{RewriteChain, RewriteStep, Rule, SymbolKind, SymbolSum, SymbolTerm};
pub use element::{FormalElement, Monomial};
pub use error::{Error, Result};
pub use fieldtower::{ExtensionGenerator, FieldTower, GroundField, ValuationSpec};
pub use valgroup::{Lattice, ValueVector, Q};
