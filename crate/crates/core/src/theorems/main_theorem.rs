use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fieldtower::FieldTower;
use crate::valdiv::{
    algebra_value_group, chain_division, trace_basis, trace_zero_value_classes, window_classes,
    DivisionCertificate,
};
use crate::valgroup::{lattice_intersect, q, Lattice, ValueVector};

use super::family::{build_family, family_size, shift_algebra};
use super::{Outcome, Verdict};

fn pow(p: u32, e: usize) -> u64 {
    (p as u64).pow(e as u32)
}

/// Chain-division certificate for `A_i`, with the Morandi bookkeeping of the top step.
pub fn verify_shift_lemma(n: usize, p: u32, i: usize) -> Result<Verdict> {
    let mut v = Verdict::new("shift").param("n", n).param("p", p).param("i", i);
    if n == 2 && i != 1 {
        return Err(Error::InvalidParameters("n = 2 only has A_1".into()));
    }
    let a = shift_algebra(n, p, i)?;
    let tower = FieldTower::laurent(p, n)?;
    v.put("algebra", a.to_string());
    let cert = chain_division(&tower, &a);
    v.step("chain_division", format!("{a}: {:?} by {:?}", cert.status, cert.rule), cert.is_certified());
    if n >= 3 {
        match cert.top_peel() {
            Some((peel, depth, index, res)) => {
                v.put("top_depth", depth);
                v.put("top_peel", format!("{peel:?}").to_lowercase());
                v.put("d_index", index);
                v.put("d_residue_degree", res);
                let want = pow(p, 2 * n - 5);
                v.put("d_index_expected", want);
                v.step(
                    "defect",
                    format!("depth {depth}: |Γ_D/Γ_F| = {index} (p^(2n-5) = {want}), [D̄:F̄] = {res}"),
                    index == want && res == p as u64,
                );
            }
            None => {
                v.step("defect", "no Morandi step at the top", false);
            }
        }
    }
    v.certificates.push(cert);
    Ok(v.conclude(Outcome::Inconclusive))
}

/// `diag(1/p², …, 1/p (place i), …, 1/p²,  1/p)`.
pub fn expected_shift_lattice(n: usize, p: u32, i: usize) -> Lattice {
    let pp = p as i64;
    let d: Vec<i64> = (1..=n).map(|k| if k == i || k == n { pp } else { pp * pp }).collect();
    Lattice::diagonal(&d)
}

pub fn verify_value_groups(n: usize, p: u32) -> Result<Verdict> {
    let expected: Vec<Lattice> = (1..n).map(|i| expected_shift_lattice(n, p, i)).collect();
    verify_value_groups_against(n, p, &expected)
}

/// As [`verify_value_groups`], against caller-supplied lattices for `A_1, …, A_{n-1}`.
pub fn verify_value_groups_against(n: usize, p: u32, expected: &[Lattice]) -> Result<Verdict> {
    if n < 2 || expected.len() != n - 1 {
        return Err(Error::InvalidParameters(format!("need n ≥ 2 and {} lattices", n.saturating_sub(1))));
    }
    let mut v = Verdict::new("value-groups").param("n", n).param("p", p);
    let tower = FieldTower::laurent(p, n)?;
    let mut meet: Option<Lattice> = None;
    let mut mismatch = false;
    for i in 1..n {
        let a = shift_algebra(n, p, i)?;
        let data = algebra_value_group(&tower, &a, tower.full())?;
        let want = &expected[i - 1];
        let ok = data.value_group == *want;
        mismatch |= !ok;
        v.step(
            "value_group",
            format!("Γ(A_{i}) = {} (expected {want}), index {} of dim {}", data.value_group, data.index, data.dim),
            ok,
        );
        v.step("totally_ramified", format!("A_{i}: index = dim = {}", data.dim), data.totally_ramified && data.index == pow(p, 2 * n - 2));
        v.put(&format!("gamma_A{i}"), data.value_group.to_string());
        meet = Some(match meet {
            None => data.value_group,
            Some(m) => lattice_intersect(&m, &data.value_group)?,
        });
    }
    let meet = meet.expect("n ≥ 2");
    let want = Lattice::diagonal(&vec![p as i64; n]);
    v.put("intersection", meet.to_string());
    v.step("intersection", format!("⋂ Γ(A_i) = {meet}"), meet == want);
    Ok(v.conclude(if mismatch { Outcome::Refuted } else { Outcome::Inconclusive }))
}

/// Classes of `window` not reached by trace-zero elements of `b`.
fn excluded(window: &BTreeSet<ValueVector>, zero: &BTreeSet<ValueVector>) -> Vec<ValueVector> {
    window.difference(zero).cloned().collect()
}

fn frac(v: &ValueVector) -> ValueVector {
    ValueVector::new(v.coords().iter().map(|c| c - c.floor()).collect())
}

/// Counting argument: every trace-zero value class of a common splitting field
/// must lie in `⋂ Γ(A_i)` and be reached by trace-zero elements of every `B_d`.
pub fn verify_no_common_splitting(n: usize, p: u32) -> Result<Verdict> {
    let mut v = Verdict::new("no-common-splitting").param("n", n).param("p", p);
    let fam = build_family(n, p)?;
    let tower = &fam.tower;
    let size = fam.members.len() as u128;
    v.put("family_size", size as i128);
    v.put("family_size_formula", family_size(n, p) as i128);
    v.step("family", format!("{size} members, n-2+p^n-p^(n-2) = {}", family_size(n, p)), size == family_size(n, p));

    let certs: Vec<DivisionCertificate> = fam.members.par_iter().map(|m| chain_division(tower, &m.algebra)).collect();
    let uncertified: Vec<String> = fam
        .members
        .iter()
        .zip(&certs)
        .filter(|(_, c)| !c.is_certified())
        .map(|(m, _)| m.name.clone())
        .collect();
    v.put("uncertified_members", uncertified.clone());
    v.step("division", format!("{} of {size} members certified division", size - uncertified.len() as u128), uncertified.is_empty());

    let mut meet = Lattice::diagonal(&vec![1; n]);
    let mut first = true;
    for i in 1..n {
        let g = algebra_value_group(tower, &shift_algebra(n, p, i)?, tower.full())?.value_group;
        meet = if first { g } else { lattice_intersect(&meet, &g)? };
        first = false;
    }
    v.put("window", meet.to_string());
    v.step("window", format!("Λ = ⋂ Γ(A_i) = {meet}"), meet == Lattice::diagonal(&vec![p as i64; n]));

    let window = window_classes(&meet);
    let zero_sets: Vec<Result<BTreeSet<ValueVector>>> = fam
        .members
        .par_iter()
        .map(|m| match m.kind {
            super::MemberKind::B { .. } => trace_zero_value_classes(tower, &m.algebra, tower.full(), &meet),
            super::MemberKind::Shift { .. } => Ok(window.clone()),
        })
        .collect();
    let mut allowed = window.clone();
    let mut excluded_total = BTreeSet::new();
    let mut excluded_predicted = BTreeSet::new();
    for (m, z) in fam.members.iter().zip(zero_sets) {
        let super::MemberKind::B { d, .. } = &m.kind else { continue };
        let z = z?;
        let ex = excluded(&window, &z);
        excluded_total.extend(ex.iter().cloned());
        excluded_predicted.insert(ValueVector::new(d.iter().map(|&x| q(x as i64, p as i64)).collect()));
        allowed = allowed.intersection(&z).cloned().collect();
    }
    let count = allowed.len() as u64;
    let predicted = pow(p, n - 2);
    let bound = pow(p, n - 1) - 1;
    v.put("window_classes", window.len());
    v.put("allowed", count);
    v.put("allowed_classes", allowed.iter().map(ToString::to_string).collect::<Vec<_>>());
    v.put("predicted_allowed", predicted);
    v.put("matches_prediction", count == predicted);
    v.put("bound", bound);
    v.put("excluded_by_engine", excluded_total.len());
    v.put("excluded_predicted", excluded_predicted.len());
    if count != predicted {
        v.info("prediction", format!("engine |allowed| = {count}, predicted p^(n-2) = {predicted}"));
        if let Some(w) = witness(tower, &fam.members, p)? {
            v.put("witness", w.clone());
            v.info("witness", w);
        }
    }
    let ok = count < bound;
    v.step("count", format!("|allowed| = {count} < p^(n-1)-1 = {bound}"), ok);
    Ok(v.conclude(Outcome::Inconclusive))
}

/// For a `B_d` with at least two symbols: `x_1^{p-1}` has zero reduced trace and
/// its value class is the class the counting argument excludes.
fn witness(tower: &FieldTower, members: &[super::FamilyMember], p: u32) -> Result<Option<String>> {
    let Some(m) = members.iter().find(|m| matches!(m.kind, super::MemberKind::B { .. }) && m.algebra.len() >= 2) else {
        return Ok(None);
    };
    let basis = trace_basis(tower, &m.algebra, tower.full())?;
    let s1 = &m.algebra.terms()[0].1;
    let vx = tower.value_of(&s1.slot1, tower.full())?.scale(q(1, p as i64));
    let class = frac(&(&vx * (p as i64 - 1)));
    let trace_class = frac(&basis.iter().filter(|g| g.artin_schreier).fold(ValueVector::zero(tower.n()), |acc, g| {
        &acc + &(&g.value * (p as i64 - 1))
    }));
    let super::MemberKind::B { d, .. } = &m.kind else { unreachable!() };
    let excluded = ValueVector::new(d.iter().map(|&x| q(x as i64, p as i64)).collect());
    Ok(Some(format!(
        "{}: x1^(p-1) has Trd 0 (Trd(1) = p = 0 in the other factors) and value class {class}{}; \
         the only basis monomial of nonzero trace is the product of the x'^(p-1), class {trace_class}",
        m.name,
        if class == excluded { ", which is the excluded class d/p" } else { "" }
    )))
}

/// `p^n - (p-1)(p^{n-1} + p^{n-2}) = p^{n-2}` and where `p^{n-2} < p^{n-1} - 1` fails.
pub fn verify_count_identities(ns: &[usize], ps: &[u32]) -> Result<Verdict> {
    let mut v = Verdict::new("counts")
        .param("n", ns.iter().map(|&x| x as i64).collect::<Vec<_>>())
        .param("p", ps.iter().map(|&x| x as i64).collect::<Vec<_>>());
    let mut failures = Vec::new();
    let mut pairs = 0usize;
    for &n in ns {
        if n < 2 {
            return Err(Error::InvalidParameters(format!("n = {n} < 2")));
        }
        for &p in ps {
            let (pn, p1, p2) = (pow(p, n) as i128, pow(p, n - 1) as i128, pow(p, n - 2) as i128);
            let lhs = pn - (p as i128 - 1) * (p1 + p2);
            v.step("identity", format!("n={n}, p={p}: {pn} - {}·{} = {lhs}", p - 1, p1 + p2), lhs == p2);
            if p2 >= p1 - 1 {
                failures.push(format!("({n},{p})"));
            }
            pairs += 1;
        }
    }
    v.put("pairs", pairs);
    v.put("inequality_failures", failures.clone());
    let expected: Vec<String> = if ns.contains(&2) && ps.contains(&2) { vec!["(2,2)".into()] } else { vec![] };
    v.step("inequality", format!("p^(n-2) < p^(n-1)-1 fails at {failures:?}"), failures == expected);
    Ok(v.conclude(Outcome::Refuted))
}
