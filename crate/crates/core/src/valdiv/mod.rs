//! Valuation-theoretic analysis of symbol tensor products: value groups,
//! residues, defect, division certificates, w-invariants and trace-zero values.
//!
//! Certification is sound but incomplete. `NotCertified` never means
//! "not division"; only an explicit split chain yields `Refuted`.

mod certify;
mod residue;
mod trace;
mod values;
mod winv;

use serde::Serialize;

use crate::brauer::{SymbolSum, SymbolTerm};
use crate::element::FormalElement;
use crate::fieldtower::{FieldTower, ValuationSpec};
use crate::valgroup::{Lattice, ValueVector};

pub use certify::{
    certify_symbol, chain_division, independence_division, morandi_step, residue_tensor_division,
    strip_pth_powers,
    ResidueInput,
};
pub use residue::{certify_residue_field, residue_tensor_field_check};
pub use trace::{
    has_nonzero_trace, monomial_value_classes, trace_basis, trace_zero_value_classes,
    window_classes, BasisGenerator, MONOMIAL_LIMIT,
};
pub use values::{algebra_value_group, generator_value_data, symbol_values};
pub use winv::{
    shared_subfield_obstruction, subfield_obstruction, w_field_trace, w_field_trace_closed_form,
    w_reduced_trace, SharedSubfieldVerdict, SubfieldVerdict, WInvariant,
};

/// Value of a symbol generator under a valuation: ramified with a value outside
/// `Γ_F`, or a unit whose defining equation survives in the residue field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum GeneratorValue {
    Ramified(ValueVector),
    /// Residue of the right-hand side.
    Residual(FormalElement),
}

impl GeneratorValue {
    pub fn ramified(&self) -> Option<&ValueVector> {
        match self {
            GeneratorValue::Ramified(v) => Some(v),
            GeneratorValue::Residual(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolValues {
    pub symbol: SymbolTerm,
    /// `x^p - x = slot1`
    pub x: GeneratorValue,
    /// `y^p = slot2`
    pub y: GeneratorValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    ArtinSchreier,
    PthRoot,
}

/// A commuting generator of the residue algebra, over the residue tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueRoot {
    pub kind: RootKind,
    pub rhs: FormalElement,
    pub source: String,
}

/// A value obtained from a pair of commuting generators `x - y^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CombinedValue {
    pub source: String,
    pub value: ValueVector,
}

/// Residue algebra generated by the unit generators: a commutative part (the
/// roots) tensored with the symbols whose both slots are units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueDescriptor {
    pub tower: FieldTower,
    pub roots: Vec<ResidueRoot>,
    pub symbols: Vec<SymbolTerm>,
}

impl ResidueDescriptor {
    pub fn is_trivial(&self) -> bool {
        self.roots.is_empty() && self.symbols.is_empty()
    }

    /// Dimension over the residue field, assuming the roots generate a field.
    pub fn expected_degree(&self) -> u64 {
        let p = self.tower.prime as u64;
        p.pow((self.roots.len() + 2 * self.symbols.len()) as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraValueData {
    pub algebra: SymbolSum,
    pub spec: ValuationSpec,
    pub generators: Vec<SymbolValues>,
    pub combined: Vec<CombinedValue>,
    pub value_group: Lattice,
    /// `|Γ_A / Γ_F|` for the lattice generated by the recorded values.
    pub index: u64,
    pub residue: ResidueDescriptor,
    /// Certified lower bound for `[Ā : F̄]`, when the residue roots were certified
    /// to generate a field.
    pub residue_degree: Option<u64>,
    pub residue_certificate: DivisionCertificate,
    pub dim: u64,
    pub totally_ramified: bool,
    pub defectless: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertRule {
    Trivial,
    Independence,
    /// One generator ramified, the other a unit generating a residue field extension.
    ResidueRamified,
    /// Both slots units: division iff the residue symbol is.
    Inertial,
    Morandi,
    /// A residue field certified by the ramification of its generators.
    TotallyRamifiedOrderElement,
    WObstruction,
    GenericHypothesis,
    Hypothesis,
    Rebase,
    RewriteSplit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Certified,
    NotCertified,
    /// Shown not to be division (or not a field).
    Refuted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Peel {
    Last,
    First,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionCertificate {
    pub subject: String,
    pub rule: CertRule,
    pub status: CertStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peel: Option<Peel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_degree: Option<u64>,
    pub trace: Vec<String>,
    pub children: Vec<DivisionCertificate>,
}

impl DivisionCertificate {
    pub fn new(subject: impl Into<String>, rule: CertRule) -> Self {
        Self {
            subject: subject.into(),
            rule,
            status: CertStatus::NotCertified,
            peel: None,
            depth: None,
            index: None,
            residue_degree: None,
            trace: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    pub fn is_refuted(&self) -> bool {
        self.status == CertStatus::Refuted
    }

    pub(crate) fn note(mut self, line: impl Into<String>) -> Self {
        self.trace.push(line.into());
        self
    }

    pub(crate) fn with_status(mut self, status: CertStatus) -> Self {
        self.status = status;
        self
    }

    pub(crate) fn certified(self) -> Self {
        self.with_status(CertStatus::Certified)
    }

    pub(crate) fn child(mut self, c: DivisionCertificate) -> Self {
        self.children.push(c);
        self
    }

    /// Number of certificates in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Self::size).sum::<usize>()
    }

    /// Top-level Morandi bookkeeping `(peel, depth, |Γ_D/Γ_F|, [D̄:F̄])`.
    pub fn top_peel(&self) -> Option<(Peel, usize, u64, u64)> {
        Some((self.peel?, self.depth?, self.index?, self.residue_degree?))
    }
}
