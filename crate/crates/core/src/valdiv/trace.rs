use std::collections::BTreeSet;

use serde::Serialize;

use crate::brauer::SymbolSum;
use crate::error::{Error, Result};
use crate::fieldtower::{FieldTower, ValuationSpec};
use crate::valgroup::{q, Lattice, ValueVector, Q};

use super::values::algebra_value_group;

/// Budget on the number of basis monomials `p^{2k}`.
pub const MONOMIAL_LIMIT: u128 = 1_000_000;

fn fractional(v: &ValueVector) -> ValueVector {
    ValueVector::new(v.coords().iter().map(|c| c - c.floor()).collect())
}

/// A generator of the valued basis used for traces: `x_j`, `y_j`, or `x_l - y_j^{-1}`
/// in place of `x_l` when `℘(x_l) = y_j^{-p}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisGenerator {
    pub name: String,
    pub value: ValueVector,
    /// Whether this generator plays the role of the Artin–Schreier root of its factor.
    pub artin_schreier: bool,
}

/// The basis generators, factor by factor: `(x'_1, y_1, …, x'_k, y_k)`.
///
/// Replacing `x_l` by `t = x_l - y_j^{-1}` keeps `Trd` of a basis monomial nonzero
/// only for `x'_1^{p-1} ⋯ x'_k^{p-1}`: expanding `t^c`, a nonzero-trace term needs
/// `x_l^{p-1}`, hence `c = p - 1` with no `y_j^{-1}` left over.
pub fn trace_basis(tower: &FieldTower, b: &SymbolSum, spec: ValuationSpec) -> Result<Vec<BasisGenerator>> {
    let p = tower.prime as i64;
    let data = algebra_value_group(tower, b, spec)?;
    let gens = &data.generators;
    let mut used_y = vec![false; gens.len()];
    let mut out = Vec::with_capacity(2 * gens.len());
    for (l, g) in gens.iter().enumerate() {
        let (Some(vx), Some(vy)) = (g.x.ramified(), g.y.ramified()) else {
            return Err(Error::Unsupported(format!(
                "{} is not totally ramified: unit generator",
                g.symbol
            )));
        };
        let mut x = BasisGenerator {
            name: format!("x{}", l + 1),
            value: vx.clone(),
            artin_schreier: true,
        };
        for (j, h) in gens.iter().enumerate() {
            if j == l || used_y[j] {
                continue;
            }
            if h.symbol.slot2.inverse().ok().as_ref() == Some(&g.symbol.slot1) {
                used_y[j] = true;
                let vm = tower.value_of(&g.symbol.slot1, spec)?;
                x = BasisGenerator {
                    name: format!("(x{} - y{}^-1)", l + 1, j + 1),
                    value: vm.scale(q(1, p * p)),
                    artin_schreier: true,
                };
                break;
            }
        }
        out.push(x);
        out.push(BasisGenerator {
            name: format!("y{}", l + 1),
            value: vy.clone(),
            artin_schreier: false,
        });
    }
    Ok(out)
}

/// Exponent vectors of the basis monomials over [`trace_basis`] with their value
/// classes modulo `Z^n`.
pub fn monomial_value_classes(
    tower: &FieldTower,
    b: &SymbolSum,
    spec: ValuationSpec,
) -> Result<Vec<(Vec<u32>, ValueVector)>> {
    let p = tower.prime;
    let gens = trace_basis(tower, b, spec)?;
    let work = (p as u128).checked_pow(gens.len() as u32).unwrap_or(u128::MAX);
    if work > MONOMIAL_LIMIT {
        return Err(Error::EnumerationBound(work, MONOMIAL_LIMIT));
    }
    let total = work as usize;
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let mut exps = Vec::with_capacity(gens.len());
        let mut v = ValueVector::zero(spec.depth);
        for g in &gens {
            let e = (c % p as usize) as u32;
            c /= p as usize;
            exps.push(e);
            if e != 0 {
                v = &v + &(&g.value * e as i64);
            }
        }
        out.push((exps, fractional(&v)));
    }
    Ok(out)
}

/// Whether a basis monomial has nonzero reduced trace: all Artin–Schreier
/// exponents `p - 1` and all radical exponents `0`.
pub fn has_nonzero_trace(exps: &[u32], p: u32) -> bool {
    exps.chunks(2).all(|de| de[0] == p - 1 && de[1] == 0)
}

/// Classes of `window / Z^n`.
pub fn window_classes(window: &Lattice) -> BTreeSet<ValueVector> {
    let n = window.dim();
    let den = window.denominator();
    let total = (den as usize).pow(n as u32);
    let mut out = BTreeSet::new();
    for code in 0..total {
        let mut c = code;
        let coords: Vec<Q> = (0..n)
            .map(|_| {
                let k = (c % den as usize) as i64;
                c /= den as usize;
                q(k, den)
            })
            .collect();
        let v = ValueVector::new(coords);
        if window.contains(&v) {
            out.insert(v);
        }
    }
    out
}

/// Value classes of trace-zero elements that lie in `window`.
///
/// The basis monomials have pairwise distinct classes (checked), so an element's
/// value is that of its leading monomial and the classes reached by trace-zero
/// elements are those of every basis monomial except the one of nonzero trace.
pub fn trace_zero_value_classes(
    tower: &FieldTower,
    b: &SymbolSum,
    spec: ValuationSpec,
    window: &Lattice,
) -> Result<BTreeSet<ValueVector>> {
    let p = tower.prime;
    let all = monomial_value_classes(tower, b, spec)?;
    let distinct: BTreeSet<&ValueVector> = all.iter().map(|(_, c)| c).collect();
    if distinct.len() != all.len() {
        return Err(Error::Unsupported(format!(
            "{b}: basis monomial classes collide ({} classes for {} monomials)",
            distinct.len(),
            all.len()
        )));
    }
    Ok(all
        .into_iter()
        .filter(|(exps, class)| !has_nonzero_trace(exps, p) && window.contains(class))
        .map(|(_, class)| class)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b01_at_n2() {
        let p = 2;
        let t = FieldTower::laurent(p, 2).unwrap();
        let b = SymbolSum::parse(p, "[a2^-1, a1)").unwrap();
        let w = Lattice::diagonal(&[2, 2]);
        let got = trace_zero_value_classes(&t, &b, t.full(), &w).unwrap();
        let want: BTreeSet<ValueVector> = [
            ValueVector::new(vec![q(0, 1), q(0, 1)]),
            ValueVector::new(vec![q(1, 2), q(0, 1)]),
            ValueVector::new(vec![q(1, 2), q(1, 2)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        let integral = trace_zero_value_classes(&t, &b, t.full(), &Lattice::integer(2)).unwrap();
        assert_eq!(integral.len(), 1);
    }

    #[test]
    fn classes_distinct_when_totally_ramified() {
        let p = 3;
        let t = FieldTower::laurent(p, 3).unwrap();
        let a2 = SymbolSum::parse(p, "[a3^-1, a1) + [a1^-1, a2)").unwrap();
        let all = monomial_value_classes(&t, &a2, t.full()).unwrap();
        let distinct: BTreeSet<_> = all.iter().map(|(_, c)| c.clone()).collect();
        assert_eq!(distinct.len(), 81);
        let w = Lattice::integer(3);
        let zero = trace_zero_value_classes(&t, &a2, t.full(), &w).unwrap();
        assert_eq!(zero.len(), 1);
    }

    #[test]
    fn window_class_count() {
        assert_eq!(window_classes(&Lattice::diagonal(&[3, 3, 1])).len(), 9);
    }
}
