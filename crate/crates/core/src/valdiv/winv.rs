use std::cmp::Ordering;

use serde::Serialize;

use crate::brauer::{same_class, scalar_power, SymbolSum, SymbolTerm};
use crate::element::FormalElement;
use crate::error::{Error, Result};
use crate::fieldtower::{ArtinSchreierAlgebra, FieldTower};
use crate::valgroup::{lex_compare, q, ValueVector};

use super::certify::independence_division;
use super::DivisionCertificate;

/// `min v(Tr z) - v(z)` over nonzero `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WInvariant {
    pub value: ValueVector,
    pub method: String,
}

fn ramified_value(tower: &FieldTower, a: &FormalElement) -> Result<ValueVector> {
    let v = tower.value_of(a, tower.full())?;
    if !v.is_negative() || v.scale(q(1, tower.prime as i64)).is_integral() {
        return Err(Error::Unsupported(format!(
            "w closed form needs a negative value outside pΓ, got v({a}) = {v}"
        )));
    }
    Ok(v)
}

/// Reduced-trace invariant of a totally ramified symbol `[a, b)`. Only the
/// `x^{p-1}` coordinate has nonzero trace, so the minimum is `-(p-1)·v(x)`.
pub fn w_reduced_trace(tower: &FieldTower, s: &SymbolTerm) -> Result<WInvariant> {
    let cert = independence_division(tower, s, tower.full());
    if !cert.is_certified() {
        return Err(Error::Unsupported(format!("{s} is not certified division")));
    }
    let p = tower.prime as i64;
    let v = ramified_value(tower, &s.slot1)?;
    Ok(WInvariant {
        value: v.scale(q(-(p - 1), p)),
        method: format!("-(p-1)·v(x), v(x) = v({})/p", s.slot1),
    })
}

/// `-(p-1)/p · v(m)` for `℘(x) = m`.
pub fn w_field_trace_closed_form(tower: &FieldTower, m: &FormalElement) -> Result<ValueVector> {
    let p = tower.prime as i64;
    Ok(ramified_value(tower, m)?.scale(q(-(p - 1), p)))
}

/// Trace invariant of `F(x)`, `℘(x) = m`, minimised over the valued basis
/// `1, x, …, x^{p-1}` with traces from the brute-force oracle.
pub fn w_field_trace(tower: &FieldTower, m: &FormalElement) -> Result<WInvariant> {
    let p = tower.prime;
    let vm = ramified_value(tower, m)?;
    let vx = vm.scale(q(1, p as i64));
    let alg = ArtinSchreierAlgebra::new(m.clone());
    let mut best: Option<ValueVector> = None;
    for i in 0..p {
        let tr = alg.trace_of_power(i)?;
        if tr.is_zero() {
            continue;
        }
        let w = &tower.value_of(&tr, tower.full())? - &(&vx * i as i64);
        if best.as_ref().is_none_or(|b| w.lex_cmp(b) == Ordering::Less) {
            best = Some(w);
        }
    }
    let value = best.ok_or_else(|| Error::Unsupported("all traces vanish".into()))?;
    Ok(WInvariant {
        value,
        method: format!("min over i < p of v(Tr x^i) - i·v(x), ℘(x) = {m}"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubfieldVerdict {
    /// `w(D) > w(K)`: `K` does not embed; for degree-`p` `D`, `D ⊗ K` stays division.
    NotSubfield,
    Inconclusive,
}

pub fn subfield_obstruction(k: &WInvariant, d: &WInvariant) -> Result<SubfieldVerdict> {
    Ok(match lex_compare(&d.value, &k.value)? {
        Ordering::Greater => SubfieldVerdict::NotSubfield,
        _ => SubfieldVerdict::Inconclusive,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum SharedSubfieldVerdict {
    NoCommonMaximalSubfield(String),
    Inconclusive(String),
}

impl SharedSubfieldVerdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, SharedSubfieldVerdict::NoCommonMaximalSubfield(_))
    }
}

/// If `A^{⊗i} ⊗ B` is division for `i` prime to `p`, a common maximal subfield of
/// the degree-`p` algebras `A` and `B` would split it with degree `p`.
pub fn shared_subfield_obstruction(
    a: &SymbolSum,
    b: &SymbolSum,
    i: i64,
    certificate: Option<(&SymbolSum, &DivisionCertificate)>,
) -> Result<SharedSubfieldVerdict> {
    let p = a.prime() as i64;
    let Some((certified, cert)) = certificate else {
        return Ok(SharedSubfieldVerdict::Inconclusive("no division certificate supplied".into()));
    };
    if i.rem_euclid(p) == 0 {
        return Err(Error::InvalidParameters(format!("exponent {i} is divisible by {p}")));
    }
    for s in [a, b] {
        if s.len() != 1 || s.terms()[0].0 % a.prime() == 0 {
            return Err(Error::InvalidParameters(format!("{s} is not a single degree-p symbol")));
        }
    }
    if !cert.is_certified() {
        return Ok(SharedSubfieldVerdict::Inconclusive(format!(
            "{certified} is not certified division"
        )));
    }
    let lhs = scalar_power(a, i)?.plus(b);
    if !same_class(&lhs, certified)? {
        return Err(Error::Incompatible(format!(
            "certificate is for {certified}, not for A^{i} ⊗ B = {lhs}"
        )));
    }
    Ok(SharedSubfieldVerdict::NoCommonMaximalSubfield(format!(
        "{lhs} is division of degree p^2; a shared degree-p subfield would split it"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldtower::GroundField;

    fn dc(p: u32) -> FieldTower {
        FieldTower::new(p, GroundField::char_p(p, &[]), &["d", "c"]).unwrap()
    }

    #[test]
    fn lemma_values() {
        for p in [3u32, 5] {
            let t = dc(p);
            let s = SymbolTerm::artin_schreier(t.element("c^-1").unwrap(), t.element("d^-1").unwrap()).unwrap();
            let wd = w_reduced_trace(&t, &s).unwrap();
            assert_eq!(wd.value, ValueVector::new(vec![q(0, 1), q(p as i64 - 1, p as i64)]));
            let m = t.element("d^-1").unwrap();
            let wk = w_field_trace(&t, &m).unwrap();
            assert_eq!(wk.value, ValueVector::new(vec![q(p as i64 - 1, p as i64), q(0, 1)]));
            assert_eq!(wk.value, w_field_trace_closed_form(&t, &m).unwrap());
            assert_eq!(subfield_obstruction(&wk, &wd).unwrap(), SubfieldVerdict::NotSubfield);
        }
    }

    #[test]
    fn obstruction_edge_cases() {
        let w = |a: i64, b: i64| WInvariant {
            value: ValueVector::from_ints(&[a, b]),
            method: String::new(),
        };
        assert_eq!(subfield_obstruction(&w(1, 0), &w(1, 0)).unwrap(), SubfieldVerdict::Inconclusive);
        assert_eq!(subfield_obstruction(&w(1, 0), &w(0, 0)).unwrap(), SubfieldVerdict::Inconclusive);
        let t = FieldTower::laurent(3, 1).unwrap();
        let bad = SymbolTerm::artin_schreier(t.element("a1").unwrap(), t.element("a1^2").unwrap()).unwrap();
        assert!(w_reduced_trace(&t, &bad).is_err());
    }
}
