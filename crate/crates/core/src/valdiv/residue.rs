use crate::fieldtower::{Atom, FieldTower};
use crate::fp;
use crate::valgroup::{lattice_canonicalize, lattice_index, q, Lattice, ValueVector};

use super::{CertRule, DivisionCertificate, ResidueRoot, RootKind};

fn constants_only(tower: &FieldTower, r: &ResidueRoot) -> bool {
    r.rhs
        .atoms()
        .all(|a| matches!(tower.atom(a), Ok(Atom::Constant)))
}

fn describe(roots: &[ResidueRoot]) -> String {
    let parts: Vec<String> = roots
        .iter()
        .map(|r| match r.kind {
            RootKind::ArtinSchreier => format!("℘({}) = {}", r.source, r.rhs),
            RootKind::PthRoot => format!("{}^p = {}", r.source, r.rhs),
        })
        .collect();
    format!("F̄[{}]", parts.join(", "))
}

/// Generic-constant rule: roots of `℘(x) = c_i` for prime-field independent,
/// non-scalar combinations `c_i` of constants, and `p`-th roots of constant
/// monomials with exponents independent mod `p`, generate a field of degree `p^k`.
fn generic_constant_roots(tower: &FieldTower, roots: &[&ResidueRoot]) -> Result<(), String> {
    let p = tower.prime;
    let (as_roots, radicals): (Vec<&ResidueRoot>, Vec<&ResidueRoot>) =
        roots.iter().partition(|r| r.kind == RootKind::ArtinSchreier);
    let mut monos = std::collections::BTreeSet::new();
    for r in &as_roots {
        for (m, _) in r.rhs.terms() {
            if !m.is_one() {
                monos.insert(m.clone());
            }
        }
    }
    let rows: Vec<Vec<u32>> = as_roots
        .iter()
        .map(|r| {
            monos
                .iter()
                .map(|m| r.rhs.terms().find(|(k, _)| *k == m).map_or(0, |(_, c)| c))
                .collect()
        })
        .collect();
    let rank = if monos.is_empty() { 0 } else { fp::rank(&rows, p) };
    if rank != as_roots.len() {
        return Err("constant right-hand sides are dependent modulo scalars".into());
    }
    let consts = &tower.ground.constants;
    let mut rows = Vec::with_capacity(radicals.len());
    for r in &radicals {
        let (_, m) = r
            .rhs
            .single_term()
            .ok_or_else(|| format!("p-th root of the non-monomial {}", r.rhs))?;
        rows.push(consts.iter().map(|c| fp::reduce(m.exponent(c), p)).collect::<Vec<u32>>());
    }
    let rank = if consts.is_empty() { 0 } else { fp::rank(&rows, p) };
    if rank != radicals.len() {
        return Err("constant monomials under p-th roots are dependent mod p".into());
    }
    Ok(())
}

/// Certifies that the residue roots generate a field of degree `p^k`.
///
/// Roots over constants only use the generic-constant hypothesis. The others
/// must be ramified in the residue tower; together with the combined values of
/// `℘(x) = m`, `y^p = m^{-1}` pairs their values must generate a lattice of
/// index `p^k`, so each adjoined generator raises the ramification.
pub fn certify_residue_field(tower: &FieldTower, roots: &[ResidueRoot]) -> DivisionCertificate {
    let p = tower.prime;
    let cert = DivisionCertificate::new(describe(roots), CertRule::Trivial);
    if roots.is_empty() {
        return cert.certified().note("no residue generators");
    }
    let (consts, rest): (Vec<&ResidueRoot>, Vec<&ResidueRoot>) =
        roots.iter().partition(|r| constants_only(tower, r));
    let mut cert = cert;
    if !consts.is_empty() {
        cert.rule = CertRule::GenericHypothesis;
        if let Err(m) = generic_constant_roots(tower, &consts) {
            return cert.note(m);
        }
        cert = cert.note(format!(
            "generic constants: {} independent roots over constants give degree p^{}",
            consts.len(),
            consts.len()
        ));
    }
    if rest.is_empty() {
        return cert.certified();
    }
    if tower.n() == 0 {
        return cert.note("no valuation on the residue tower");
    }
    let full = tower.full();
    let mut values: Vec<ValueVector> = Vec::new();
    for r in &rest {
        let v = match tower.value_of(&r.rhs, full) {
            Ok(v) => v,
            Err(e) => return cert.note(format!("{}: {e}", r.source)),
        };
        let ok = match r.kind {
            RootKind::ArtinSchreier => v.is_negative(),
            RootKind::PthRoot => r.rhs.single_term().is_some() && !v.is_zero(),
        };
        if !ok || v.scale(q(1, p as i64)).is_integral() {
            return cert.note(format!("{}: value {v} of {} is not usable", r.source, r.rhs));
        }
        let g = v.scale(q(1, p as i64));
        cert = cert.note(format!("v({}) = {g}", r.source));
        values.push(g);
    }
    for a in rest.iter().filter(|r| r.kind == RootKind::ArtinSchreier) {
        for b in rest.iter().filter(|r| r.kind == RootKind::PthRoot) {
            if a.rhs.inverse().ok().as_ref() != Some(&b.rhs) {
                continue;
            }
            let vm = tower.value_of(&a.rhs, full).expect("checked above");
            let z = vm.scale(q(1, (p * p) as i64));
            cert = cert.note(format!(
                "z = {} - {}: z^(p^2) - z^p = {}, v(z) = {z} of order {} mod Γ",
                a.source,
                b.source,
                a.rhs,
                z.order_mod_integers()
            ));
            values.push(z);
        }
    }
    let n = tower.n();
    let index = match lattice_canonicalize(n, &values)
        .and_then(|l| lattice_index(&l, &Lattice::integer(n)))
    {
        Ok(i) => i,
        Err(e) => return cert.note(e.to_string()),
    };
    let want = (p as u64).pow(rest.len() as u32);
    cert.rule = if consts.is_empty() {
        CertRule::TotallyRamifiedOrderElement
    } else {
        CertRule::GenericHypothesis
    };
    cert.index = Some(index);
    if index == want {
        cert.note(format!("ramification index {index} = p^{}", rest.len())).certified()
    } else {
        cert.note(format!("ramification index {index} < p^{}", rest.len()))
    }
}

/// Field check for the commutative residue parts of two algebras.
pub fn residue_tensor_field_check(
    tower: &FieldTower,
    a: &[ResidueRoot],
    b: &[ResidueRoot],
) -> DivisionCertificate {
    let all: Vec<ResidueRoot> = a.iter().chain(b).cloned().collect();
    certify_residue_field(tower, &all)
}
