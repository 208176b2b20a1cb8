//! Brauer classes as formal sums of degree-`p` symbols, and a kernel that checks
//! witness-annotated rewrite chains between them.
//!
//! Artin–Schreier symbols `[a, b)` are additive in `a` and multiplicative in `b`.
//! Two sums with the same [`BilinearForm`] are the same class; the kernel never
//! searches for witnesses, it only checks the ones it is handed.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::element::{parse_element_at, FormalElement, Monomial};
use crate::error::{Error, Result};
use crate::fieldtower::{ArtinSchreierAlgebra, FieldTower};
use crate::fp;
use crate::valgroup::{Lattice, ValueVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// `[a, b)`: `x^p - x = a`, `y^p = b`, `y x y^{-1} = x + 1`.
    ArtinSchreier,
    /// `(a, b)`: `i^p = a`, `j^p = b`, `j i = ρ i j` (characteristic not `p`).
    Power,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolTerm {
    pub kind: SymbolKind,
    pub slot1: FormalElement,
    pub slot2: FormalElement,
}

impl SymbolTerm {
    pub fn artin_schreier(slot1: FormalElement, slot2: FormalElement) -> Result<Self> {
        if slot2.single_term().is_none() {
            return Err(Error::NotInvertible(format!(
                "second slot {slot2} must be a nonzero monomial"
            )));
        }
        Ok(Self {
            kind: SymbolKind::ArtinSchreier,
            slot1,
            slot2,
        })
    }

    pub fn power(slot1: FormalElement, slot2: FormalElement) -> Result<Self> {
        if slot1.single_term().is_none() || slot2.single_term().is_none() {
            return Err(Error::NotInvertible(format!(
                "power symbol ({slot1}, {slot2}) needs monomial slots"
            )));
        }
        Ok(Self {
            kind: SymbolKind::Power,
            slot1,
            slot2,
        })
    }

    pub fn prime(&self) -> u32 {
        self.slot2.prime()
    }
}

impl fmt::Display for SymbolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::ArtinSchreier => write!(f, "[{}, {})", self.slot1, self.slot2),
            SymbolKind::Power => write!(f, "({}, {})", self.slot1, self.slot2),
        }
    }
}

impl serde::Serialize for SymbolTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A tensor product of symbols with prime-field multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolSum {
    p: u32,
    terms: Vec<(u32, SymbolTerm)>,
}

impl SymbolSum {
    pub fn trivial(p: u32) -> Self {
        Self { p, terms: Vec::new() }
    }

    pub fn from_terms(p: u32, terms: Vec<SymbolTerm>) -> Self {
        Self {
            p,
            terms: terms.into_iter().map(|t| (1, t)).collect(),
        }
    }

    pub fn with_multiplicities(p: u32, terms: Vec<(u32, SymbolTerm)>) -> Self {
        Self {
            p,
            terms: terms
                .into_iter()
                .map(|(k, t)| (k % p, t))
                .filter(|(k, _)| *k != 0)
                .collect(),
        }
    }

    pub fn parse(p: u32, s: &str) -> Result<Self> {
        parse_sum(p, s)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn terms(&self) -> &[(u32, SymbolTerm)] {
        &self.terms
    }

    pub fn symbols(&self) -> impl Iterator<Item = &SymbolTerm> {
        self.terms.iter().map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &SymbolSum) -> SymbolSum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SymbolSum { p: self.p, terms }
    }

    /// Degree of the tensor product as an algebra, `p^(number of symbols)`,
    /// counting multiplicities as repeated factors.
    pub fn symbol_count(&self) -> usize {
        self.terms.iter().map(|(k, _)| *k as usize).sum()
    }
}

impl fmt::Display for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, t)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *k != 1 {
                write!(f, "{k}*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl Serialize for SymbolSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Coefficient of `[m, g)` for each first-slot monomial `m` and second-slot atom `g`.
pub type BilinearForm = BTreeMap<(Monomial, String), u32>;

pub fn bilinear_form(s: &SymbolSum) -> Result<BilinearForm> {
    let p = s.p;
    let mut out = BilinearForm::new();
    for (k, t) in &s.terms {
        if t.kind != SymbolKind::ArtinSchreier {
            return Err(Error::Unsupported(
                "bilinear normal form covers Artin–Schreier symbols only".into(),
            ));
        }
        let (_, mono) = t
            .slot2
            .single_term()
            .ok_or_else(|| Error::NotInvertible(t.slot2.to_string()))?;
        for (atom, e) in mono.iter() {
            for (m1, c1) in t.slot1.terms() {
                let add = fp::mul(fp::mul(*k, c1, p), fp::reduce(e, p), p);
                let entry = out.entry((m1.clone(), atom.to_string())).or_insert(0);
                *entry = fp::add(*entry, add, p);
            }
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

pub fn same_class(a: &SymbolSum, b: &SymbolSum) -> Result<bool> {
    Ok(bilinear_form(a)? == bilinear_form(b)?)
}

/// Expands both slots and collects the result by second-slot atom, summing the
/// first slots. Prime-field scalars in the second slot are dropped (`[a, λ) = 0`).
pub fn normal_form(s: &SymbolSum) -> Result<SymbolSum> {
    let p = s.p;
    let form = bilinear_form(s)?;
    let mut by_atom: BTreeMap<String, FormalElement> = BTreeMap::new();
    for ((m, atom), c) in form {
        by_atom
            .entry(atom)
            .or_insert_with(|| FormalElement::zero(p))
            .add_term(c, m);
    }
    let terms = by_atom
        .into_iter()
        .filter(|(_, a)| !a.is_zero())
        .map(|(atom, a)| SymbolTerm::artin_schreier(a, FormalElement::atom(p, &atom, 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolSum::from_terms(p, terms))
}

pub fn scalar_power(s: &SymbolSum, k: i64) -> Result<SymbolSum> {
    let k = fp::reduce(k, s.p);
    let scaled = SymbolSum::with_multiplicities(
        s.p,
        s.terms.iter().map(|(m, t)| (fp::mul(*m, k, s.p), t.clone())).collect(),
    );
    normal_form(&scaled)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    #[serde(rename = "SLOT1-ADD")]
    Slot1Add,
    #[serde(rename = "SLOT2-MULT")]
    Slot2Mult,
    #[serde(rename = "AS-SHIFT")]
    AsShift,
    #[serde(rename = "SLOT2-NORM")]
    Slot2Norm,
    #[serde(rename = "SLOT2-PTHPOWER")]
    Slot2PthPower,
    #[serde(rename = "SLOT2-SELF")]
    Slot2Self,
    #[serde(rename = "NEGATE")]
    Negate,
    #[serde(rename = "SCALAR")]
    Scalar,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Slot1Add,
        Rule::Slot2Mult,
        Rule::AsShift,
        Rule::Slot2Norm,
        Rule::Slot2PthPower,
        Rule::Slot2Self,
        Rule::Negate,
        Rule::Scalar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Slot1Add => "SLOT1-ADD",
            Rule::Slot2Mult => "SLOT2-MULT",
            Rule::AsShift => "AS-SHIFT",
            Rule::Slot2Norm => "SLOT2-NORM",
            Rule::Slot2PthPower => "SLOT2-PTHPOWER",
            Rule::Slot2Self => "SLOT2-SELF",
            Rule::Negate => "NEGATE",
            Rule::Scalar => "SCALAR",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// Name of the local Artin–Schreier root in SLOT2-NORM witnesses.
pub const NORM_ROOT: &str = "x";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteStep {
    pub rule: Rule,
    /// 1-based index of the term of the previous expression the rule acts on.
    pub term: Option<usize>,
    pub witness: Option<FormalElement>,
    pub factor: Option<FormalElement>,
    pub after: SymbolSum,
}

impl RewriteStep {
    pub fn new(rule: Rule, after: SymbolSum) -> Self {
        Self {
            rule,
            term: None,
            witness: None,
            factor: None,
            after,
        }
    }

    pub fn on(mut self, term: usize) -> Self {
        self.term = Some(term);
        self
    }

    pub fn witness(mut self, w: FormalElement) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn factor(mut self, f: FormalElement) -> Self {
        self.factor = Some(f);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RewriteChain {
    pub tower: FieldTower,
    pub start: SymbolSum,
    pub steps: Vec<RewriteStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainVerdict {
    Verified,
    Rejected { step: usize, reason: String },
}

impl ChainVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, ChainVerdict::Verified)
    }
}

fn replace_term(s: &SymbolSum, idx: usize, t: Option<SymbolTerm>) -> SymbolSum {
    let mut terms = s.terms.clone();
    match t {
        Some(t) => terms[idx].1 = t,
        None => {
            terms.remove(idx);
        }
    }
    SymbolSum { p: s.p, terms }
}

impl RewriteChain {
    pub fn new(tower: FieldTower, start: SymbolSum) -> Self {
        Self {
            tower,
            start,
            steps: Vec::new(),
        }
    }

    pub fn then(mut self, step: RewriteStep) -> Self {
        self.steps.push(step);
        self
    }

    pub fn end(&self) -> &SymbolSum {
        self.steps.last().map_or(&self.start, |s| &s.after)
    }

    pub fn check(&self) -> ChainVerdict {
        let mut before = &self.start;
        for (i, step) in self.steps.iter().enumerate() {
            if let Err(reason) = self.check_step(before, step) {
                return ChainVerdict::Rejected { step: i + 1, reason };
            }
            before = &step.after;
        }
        ChainVerdict::Verified
    }

    /// Verified and ending in the trivial class.
    pub fn proves_split(&self) -> bool {
        self.check().is_verified()
            && bilinear_form(self.end()).map(|f| f.is_empty()).unwrap_or(false)
    }

    fn check_step(&self, before: &SymbolSum, step: &RewriteStep) -> Result<(), String> {
        let e = |err: Error| err.to_string();
        let same = |a: &SymbolSum, b: &SymbolSum| -> Result<(), String> {
            if same_class(a, b).map_err(e)? {
                Ok(())
            } else {
                Err(format!("{a} and {b} differ after bilinear expansion"))
            }
        };
        let target = || -> Result<(usize, &SymbolTerm), String> {
            let k = step
                .term
                .ok_or_else(|| format!("{} needs a term index", step.rule.name()))?;
            if k == 0 || k > before.terms.len() {
                return Err(format!("term index {k} out of range"));
            }
            Ok((k - 1, &before.terms[k - 1].1))
        };
        match step.rule {
            Rule::Slot1Add | Rule::Slot2Mult => same(before, &step.after),
            Rule::Negate | Rule::Scalar => {
                if step.term.is_some() {
                    let (i, t) = target()?;
                    let mult = before.terms[i].0;
                    let (expect, expect_mult) = if step.rule == Rule::Negate {
                        (
                            SymbolTerm::artin_schreier(t.slot1.neg(), t.slot2.inverse().map_err(e)?)
                                .map_err(e)?,
                            mult,
                        )
                    } else {
                        (
                            SymbolTerm::artin_schreier(t.slot1.scale(mult as i64), t.slot2.clone())
                                .map_err(e)?,
                            1,
                        )
                    };
                    let mut terms = before.terms.clone();
                    terms[i] = (expect_mult, expect);
                    let expected = SymbolSum { p: before.p, terms };
                    if expected != step.after {
                        return Err(format!(
                            "{} does not produce {}, expected {expected}",
                            step.rule.name(),
                            step.after
                        ));
                    }
                }
                same(before, &step.after)
            }
            Rule::AsShift => {
                let (i, t) = target()?;
                let u = step.witness.as_ref().ok_or("AS-SHIFT needs a witness")?;
                let shift = self.tower.wp(u).map_err(e)?;
                let slot1 = self.tower.reduce(&t.slot1.add(&shift)).map_err(e)?;
                let expected = replace_term(
                    before,
                    i,
                    Some(SymbolTerm::artin_schreier(slot1, t.slot2.clone()).map_err(e)?),
                );
                same(&expected, &step.after)
                    .map_err(|m| format!("℘({u}) = {shift} does not account for the change: {m}"))
            }
            Rule::Slot2Norm => {
                let (i, t) = target()?;
                let w = step.witness.as_ref().ok_or("SLOT2-NORM needs a witness")?;
                let (c, b) = crate::fieldtower::split_linear(w, NORM_ROOT).map_err(e)?;
                let norm = ArtinSchreierAlgebra::new(t.slot1.clone())
                    .norm_of_linear(&c, &b)
                    .map_err(e)?;
                let norm = self.tower.reduce(&norm).map_err(e)?;
                let factor = step.factor.clone().unwrap_or_else(|| norm.clone());
                if factor != norm {
                    return Err(format!("N({w}) = {norm}, not the claimed factor {factor}"));
                }
                let inv = factor.inverse().map_err(e)?;
                let expected = replace_term(
                    before,
                    i,
                    Some(SymbolTerm::artin_schreier(t.slot1.clone(), t.slot2.mul(&inv)).map_err(e)?),
                );
                same(&expected, &step.after)
            }
            Rule::Slot2PthPower => {
                let (i, t) = target()?;
                let r = step.witness.as_ref().ok_or("SLOT2-PTHPOWER needs a witness")?;
                let power = self.tower.reduce(&r.pow(before.p)).map_err(e)?;
                let factor = step.factor.clone().unwrap_or_else(|| power.clone());
                if factor != power {
                    return Err(format!("({r})^p = {power}, not the claimed factor {factor}"));
                }
                let inv = factor.inverse().map_err(e)?;
                let expected = replace_term(
                    before,
                    i,
                    Some(SymbolTerm::artin_schreier(t.slot1.clone(), t.slot2.mul(&inv)).map_err(e)?),
                );
                same(&expected, &step.after)
            }
            Rule::Slot2Self => {
                let (i, t) = target()?;
                if t.slot1 != t.slot2 {
                    return Err(format!("{t} is not of the form [u, u)"));
                }
                let one = FormalElement::one(before.p);
                let zero = FormalElement::zero(before.p);
                let n = ArtinSchreierAlgebra::new(t.slot1.clone())
                    .norm_of_linear(&one, &zero)
                    .map_err(e)?;
                if n != t.slot1 {
                    return Err(format!("N(x) = {n} differs from {}", t.slot1));
                }
                same(&replace_term(before, i, None), &step.after)
            }
        }
    }
}

/// `Σ v(a_i) ∧ v(b_i)` over the prime field, stored as the strict upper triangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bivector {
    pub dim: usize,
    pub prime: u32,
    pub entries: BTreeMap<(usize, usize), u32>,
}

impl Bivector {
    pub fn zero(dim: usize, prime: u32) -> Self {
        Self {
            dim,
            prime,
            entries: BTreeMap::new(),
        }
    }

    pub fn wedge(u: &[u32], v: &[u32], prime: u32) -> Self {
        let dim = u.len();
        let mut out = Self::zero(dim, prime);
        for i in 0..dim {
            for j in i + 1..dim {
                let c = fp::add(fp::mul(u[i], v[j], prime), fp::neg(fp::mul(u[j], v[i], prime), prime), prime);
                if c != 0 {
                    out.entries.insert((i, j), c);
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Bivector, k: u32) {
        for (&ij, &c) in &other.entries {
            let e = self.entries.entry(ij).or_insert(0);
            *e = fp::add(*e, fp::mul(c, k, self.prime), self.prime);
        }
        self.entries.retain(|_, c| *c != 0);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

fn power_slot_values(tower: &FieldTower, t: &SymbolTerm) -> Result<(ValueVector, ValueVector)> {
    if t.kind != SymbolKind::Power {
        return Err(Error::Unsupported("wedge model covers power symbols only".into()));
    }
    for slot in [&t.slot1, &t.slot2] {
        if slot.single_term().is_none() {
            return Err(Error::Unsupported(format!("non-monomial slot {slot}")));
        }
    }
    let full = tower.full();
    Ok((tower.value_of(&t.slot1, full)?, tower.value_of(&t.slot2, full)?))
}

fn check_wedge_tower(tower: &FieldTower) -> Result<()> {
    if !tower.ground.algebraically_closed || tower.ground.characteristic == tower.prime {
        return Err(Error::Unsupported(
            "wedge model needs an algebraically closed ground of characteristic not p".into(),
        ));
    }
    Ok(())
}

/// Wedge class of a power-symbol sum over `Z^n`.
pub fn wedge_class(s: &SymbolSum, tower: &FieldTower) -> Result<Bivector> {
    wedge_class_over(s, tower, &Lattice::integer(tower.n()))
}

/// Wedge class after extending scalars to a field with value group `lattice`:
/// the slot values are read in `lattice / p·lattice`.
pub fn wedge_class_over(s: &SymbolSum, tower: &FieldTower, lattice: &Lattice) -> Result<Bivector> {
    check_wedge_tower(tower)?;
    let p = tower.prime;
    let mut out = Bivector::zero(tower.n(), p);
    for (k, t) in s.terms() {
        let (va, vb) = power_slot_values(tower, t)?;
        let coords = |v: &ValueVector| -> Result<Vec<u32>> {
            Ok(lattice
                .coordinates(v)
                .ok_or_else(|| Error::NotContained(format!("{v} outside the lattice")))?
                .into_iter()
                .map(|x| fp::reduce(x, p))
                .collect())
        };
        out.add_scaled(&Bivector::wedge(&coords(&va)?, &coords(&vb)?, p), *k);
    }
    Ok(out)
}

fn parse_sum(p: u32, s: &str) -> Result<SymbolSum> {
    let src = s.trim();
    if src == "0" {
        return Ok(SymbolSum::trivial(p));
    }
    let bytes = s.as_bytes();
    let mut pos = 0usize;
    let mut terms = Vec::new();
    let err = |pos: usize, msg: &str| Error::Parse {
        col: pos + 1,
        msg: msg.to_string(),
    };
    let skip = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    loop {
        skip(&mut pos);
        let mut mult: i64 = 1;
        let start = pos;
        while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'-') {
            pos += 1;
        }
        if pos > start {
            mult = s[start..pos].parse().map_err(|_| err(start, "bad multiplicity"))?;
            skip(&mut pos);
            if bytes.get(pos) != Some(&b'*') {
                return Err(err(pos, "expected `*` after multiplicity"));
            }
            pos += 1;
            skip(&mut pos);
        }
        let kind = match bytes.get(pos) {
            Some(b'[') => SymbolKind::ArtinSchreier,
            Some(b'(') => SymbolKind::Power,
            _ => return Err(err(pos, "expected `[` or `(`")),
        };
        pos += 1;
        let comma = s[pos..]
            .find(',')
            .map(|i| pos + i)
            .ok_or_else(|| err(pos, "expected `,`"))?;
        let close = s[comma..]
            .find(')')
            .map(|i| comma + i)
            .ok_or_else(|| err(s.len(), "expected `)`"))?;
        let a = parse_element_at(p, &s[pos..comma], pos)?;
        let b = parse_element_at(p, &s[comma + 1..close], comma + 1)?;
        let t = match kind {
            SymbolKind::ArtinSchreier => SymbolTerm::artin_schreier(a, b)?,
            SymbolKind::Power => SymbolTerm::power(a, b)?,
        };
        terms.push((fp::reduce(mult, p), t));
        pos = close + 1;
        skip(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b'+') => pos += 1,
            Some(_) => return Err(err(pos, "expected `+` between symbols")),
        }
    }
    Ok(SymbolSum::with_multiplicities(p, terms))
}
