use serde::Serialize;

use crate::brauer::{SymbolSum, SymbolTerm};
use crate::element::{FormalElement, Monomial};
use crate::error::{Error, Result};
use crate::fieldtower::FieldTower;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BForm {
    /// `d_n ≠ 0`: `[∏ α_k^{-d_k}, α_{n-1}) ⊗ [α_{n-1}^{-1}, α_{n-2}) ⊗ … ⊗ [α_2^{-1}, α_1)`.
    Chain,
    /// `d_n = 0`: the chain closes with `[α_1^{-1}, α_n)`.
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MemberKind {
    Shift { i: usize },
    B { d: Vec<u32>, form: BForm },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyMember {
    pub name: String,
    pub aliases: Vec<String>,
    pub kind: MemberKind,
    pub algebra: SymbolSum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySpec {
    pub n: usize,
    pub p: u32,
    pub tower: FieldTower,
    pub members: Vec<FamilyMember>,
}

/// `n - 2 + p^n - p^{n-2}`.
pub fn family_size(n: usize, p: u32) -> u128 {
    let p = p as u128;
    n as u128 - 2 + p.pow(n as u32) - p.pow(n as u32 - 2)
}

fn alpha(k: usize) -> String {
    format!("a{k}")
}

fn mono(p: u32, pairs: &[(String, i64)]) -> FormalElement {
    let refs: Vec<(&str, i64)> = pairs.iter().filter(|(_, e)| *e != 0).map(|(s, e)| (s.as_str(), *e)).collect();
    FormalElement::term(p, 1, Monomial::from_pairs(&refs))
}

fn var(p: u32, k: usize, e: i64) -> FormalElement {
    mono(p, &[(alpha(k), e)])
}

/// `[first, s_0) ⊗ [s_0^{-1}, s_1) ⊗ …` over the variable indices `s`.
fn chain(p: u32, first: FormalElement, s: &[usize]) -> Result<Vec<SymbolTerm>> {
    let mut out = Vec::with_capacity(s.len());
    let mut slot1 = first;
    for &k in s {
        out.push(SymbolTerm::artin_schreier(slot1, var(p, k, 1))?);
        slot1 = var(p, k, -1);
    }
    Ok(out)
}

/// `A_i` for `1 ≤ i ≤ n - 1`.
pub fn shift_algebra(n: usize, p: u32, i: usize) -> Result<SymbolSum> {
    if n < 2 || i == 0 || i >= n {
        return Err(Error::InvalidParameters(format!("A_{i} needs 1 ≤ i ≤ n-1, n = {n}")));
    }
    let mut s: Vec<usize> = (1..n).rev().filter(|&k| k != i).collect();
    s.push(i);
    Ok(SymbolSum::from_terms(p, chain(p, var(p, n, -1), &s)?))
}

/// `B_d` for `d ∈ {0..p-1}^n` with `(d_{n-1}, d_n) ≠ (0, 0)`. At `n = 2` the
/// closed form degenerates to `[α_1^{-d_1}, α_2)`.
pub fn b_algebra(n: usize, p: u32, d: &[u32]) -> Result<(SymbolSum, BForm)> {
    if d.len() != n || n < 2 || d.iter().any(|&x| x >= p) || (d[n - 2] == 0 && d[n - 1] == 0) {
        return Err(Error::InvalidParameters(format!("bad exponent vector {d:?} for n = {n}, p = {p}")));
    }
    let lead = |upto: usize| {
        let pairs: Vec<(String, i64)> = (1..=upto).map(|k| (alpha(k), -(d[k - 1] as i64))).collect();
        mono(p, &pairs)
    };
    let (terms, form) = if d[n - 1] != 0 {
        let s: Vec<usize> = (1..n).rev().collect();
        (chain(p, lead(n), &s)?, BForm::Chain)
    } else if n == 2 {
        (vec![SymbolTerm::artin_schreier(lead(1), var(p, 2, 1))?], BForm::Closed)
    } else {
        let mut s: Vec<usize> = (1..n - 1).rev().collect();
        let mut t = chain(p, lead(n - 1), &s)?;
        s.clear();
        t.push(SymbolTerm::artin_schreier(var(p, 1, -1), var(p, n, 1))?);
        (t, BForm::Closed)
    };
    Ok((SymbolSum::from_terms(p, terms), form))
}

fn name(d: &[u32]) -> String {
    let parts: Vec<String> = d.iter().map(u32::to_string).collect();
    format!("B_{{{}}}", parts.join(","))
}

/// `{A_i : 2 ≤ i ≤ n-1} ∪ {B_d}`; `A_1` appears once, as `B_{0,…,0,1}`.
pub fn build_family(n: usize, p: u32) -> Result<FamilySpec> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("n = {n} < 2")));
    }
    let tower = FieldTower::laurent(p, n)?;
    let mut members = Vec::new();
    for i in 2..n {
        members.push(FamilyMember {
            name: format!("A_{i}"),
            aliases: Vec::new(),
            kind: MemberKind::Shift { i },
            algebra: shift_algebra(n, p, i)?,
        });
    }
    let total = (p as usize).pow(n as u32);
    let a1 = if n >= 3 { Some(shift_algebra(n, p, 1)?) } else { None };
    for code in 0..total {
        // d_1 varies fastest
        let mut c = code;
        let d: Vec<u32> = (0..n)
            .map(|_| {
                let x = (c % p as usize) as u32;
                c /= p as usize;
                x
            })
            .collect();
        if d[n - 2] == 0 && d[n - 1] == 0 {
            continue;
        }
        let (algebra, form) = b_algebra(n, p, &d)?;
        let aliases = match &a1 {
            Some(a) if *a == algebra => vec!["A_1".to_string()],
            _ => Vec::new(),
        };
        members.push(FamilyMember {
            name: name(&d),
            aliases,
            kind: MemberKind::B { d, form },
            algebra,
        });
    }
    Ok(FamilySpec { n, p, tower, members })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        for (n, p, want) in [(3, 2, 7), (3, 3, 25), (2, 3, 8), (4, 2, 14), (2, 2, 3)] {
            let f = build_family(n, p).unwrap();
            assert_eq!(f.members.len() as u128, want);
            assert_eq!(family_size(n, p), want);
        }
    }

    #[test]
    fn shapes() {
        let p = 3;
        assert_eq!(shift_algebra(3, p, 2).unwrap().to_string(), "[a3^-1, a1) + [a1^-1, a2)");
        assert_eq!(shift_algebra(2, p, 1).unwrap().to_string(), "[a2^-1, a1)");
        assert_eq!(
            b_algebra(3, p, &[1, 0, 2]).unwrap().0.to_string(),
            "[a1^-1*a3^-2, a2) + [a2^-1, a1)"
        );
        assert_eq!(
            b_algebra(3, p, &[2, 1, 0]).unwrap().0.to_string(),
            "[a1^-2*a2^-1, a1) + [a1^-1, a3)"
        );
        assert_eq!(b_algebra(2, p, &[2, 0]).unwrap().0.to_string(), "[a1^-2, a2)");
        let f = build_family(4, 2).unwrap();
        let a1: Vec<_> = f.members.iter().filter(|m| !m.aliases.is_empty()).collect();
        assert_eq!(a1.len(), 1);
        assert_eq!(a1[0].name, "B_{0,0,0,1}");
        assert_eq!(a1[0].algebra, shift_algebra(4, 2, 1).unwrap());
    }
}
