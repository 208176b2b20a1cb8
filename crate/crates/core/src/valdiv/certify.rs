use crate::brauer::{same_class, RewriteChain, SymbolKind, SymbolSum, SymbolTerm};
use crate::element::{FormalElement, Monomial};
use crate::fieldtower::{rebase_element, rebase_pth_root, Atom, FieldTower, GeneratorKind, ValuationSpec};
use crate::valgroup::{lattice_intersect, modp_image_rank, Lattice};

use super::residue::certify_residue_field;
use super::values::{algebra_value_group, symbol_values, tensor_factors};
use super::winv::{subfield_obstruction, w_field_trace, w_reduced_trace, SubfieldVerdict};
use super::{
    AlgebraValueData, CertRule, CertStatus, DivisionCertificate, GeneratorValue, Peel,
    ResidueDescriptor, ResidueRoot, RootKind,
};

/// `[a, b)` is division when `v(a) < 0` and `v(a)`, `v(b)` are independent in `Γ/pΓ`.
pub fn independence_division(tower: &FieldTower, s: &SymbolTerm, spec: ValuationSpec) -> DivisionCertificate {
    let p = tower.prime;
    let cert = DivisionCertificate::new(s.to_string(), CertRule::Independence);
    if s.kind != SymbolKind::ArtinSchreier {
        return cert.note("not an Artin–Schreier symbol");
    }
    let (va, vb) = match (tower.value_of(&s.slot1, spec), tower.value_of(&s.slot2, spec)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return cert.note(e.to_string()),
    };
    let rank = match modp_image_rank(&[va.clone(), vb.clone()], &Lattice::integer(spec.depth), p) {
        Ok(r) => r,
        Err(e) => return cert.note(e.to_string()),
    };
    let mut cert = cert.note(format!("v({}) = {va}, v({}) = {vb}, rank mod p = {rank}", s.slot1, s.slot2));
    cert.depth = Some(spec.depth);
    if rank == 2 && va.is_negative() {
        cert.index = Some((p as u64).pow(2));
        cert.certified()
    } else if rank == 2 {
        cert.note("first slot value is not negative")
    } else {
        cert.note("values are dependent mod p")
    }
}

/// Division certificate for one symbol: independence at full depth, or at a
/// coarser valuation one generator ramified with the other generating a
/// certified residue field, or both slots units with a division residue symbol.
pub fn certify_symbol(tower: &FieldTower, s: &SymbolTerm) -> DivisionCertificate {
    if tower.n() == 0 {
        return DivisionCertificate::new(s.to_string(), CertRule::Independence)
            .note("no valuation on a tower without variables");
    }
    let full = independence_division(tower, s, tower.full());
    if full.is_certified() {
        return full;
    }
    let mut fail = DivisionCertificate::new(s.to_string(), CertRule::ResidueRamified);
    fail.trace.extend(full.trace);
    for depth in (1..=tower.n()).rev() {
        let spec = ValuationSpec::depth(depth);
        let sv = match symbol_values(tower, s, spec) {
            Ok(sv) => sv,
            Err(e) => {
                fail = fail.note(format!("depth {depth}: {e}"));
                continue;
            }
        };
        let res = match tower.residue_tower(spec) {
            Ok(r) => r,
            Err(e) => return fail.note(e.to_string()),
        };
        let root = |kind, rhs: &FormalElement, src: &str| ResidueRoot {
            kind,
            rhs: rhs.clone(),
            source: src.to_string(),
        };
        let (rule, child) = match (&sv.x, &sv.y) {
            (GeneratorValue::Residual(a), GeneratorValue::Ramified(_)) => (
                CertRule::ResidueRamified,
                certify_residue_field(&res, &[root(RootKind::ArtinSchreier, a, "x")]),
            ),
            (GeneratorValue::Ramified(_), GeneratorValue::Residual(b)) => (
                CertRule::ResidueRamified,
                certify_residue_field(&res, &[root(RootKind::PthRoot, b, "y")]),
            ),
            (GeneratorValue::Residual(a), GeneratorValue::Residual(b)) => {
                match SymbolTerm::artin_schreier(a.clone(), b.clone()) {
                    Ok(bar) => (CertRule::Inertial, certify_symbol(&res, &bar)),
                    Err(e) => {
                        fail = fail.note(format!("depth {depth}: {e}"));
                        continue;
                    }
                }
            }
            _ => continue,
        };
        if child.is_certified() {
            let mut c = DivisionCertificate::new(s.to_string(), rule)
                .note(format!("depth {depth}: x {:?}, y {:?}", sv.x, sv.y))
                .child(child)
                .certified();
            c.depth = Some(depth);
            return c;
        }
        fail = fail.note(format!("depth {depth}: residue not certified")).child(child);
    }
    fail
}

/// How the residue condition of a Morandi step is discharged.
#[derive(Clone, Debug)]
pub enum ResidueInput {
    /// Computed by [`residue_tensor_division`].
    Auto,
    Certificate(DivisionCertificate),
    /// Taken as an assumption: division (`true`) or not.
    Hypothesis(bool),
    /// A split chain for the residue symbols over the residue root field.
    Split(Box<RewriteChain>),
}

fn exact(a: &AlgebraValueData) -> bool {
    a.residue_degree.is_some_and(|r| a.index * r == a.dim)
}

/// `D ⊗ E` with `D` one symbol carrying a single unit root `K = F(r)` and `E` a
/// symbol of units: the centralizer of `K` is Brauer equivalent to `E_K`, which
/// is inertial with residue `Ē` over `F̄(r̄)`. A split residue there makes
/// `D ⊗ E` non-division.
fn refutation_applies(d: &AlgebraValueData, e: &AlgebraValueData) -> bool {
    d.generators.len() == 1
        && d.residue.roots.len() == 1
        && d.residue.symbols.is_empty()
        && e.generators.len() == 1
        && e.residue.roots.is_empty()
        && e.residue.symbols.len() == 1
}

fn split_residue(chain: &RewriteChain, d: &AlgebraValueData, e: &AlgebraValueData) -> DivisionCertificate {
    let p = d.residue.tower.prime;
    let symbols = SymbolSum::from_terms(p, e.residue.symbols.clone());
    let mut c = DivisionCertificate::new(symbols.to_string(), CertRule::RewriteSplit);
    if !chain.proves_split() {
        return c.note(format!("chain does not verify: {:?}", chain.check()));
    }
    match same_class(&chain.start, &symbols) {
        Ok(true) => {}
        _ => return c.note(format!("chain starts at {}, not at {symbols}", chain.start)),
    }
    let Some(root) = d.residue.roots.first() else {
        return c.note("no residue root");
    };
    let matches = chain.tower.generators.iter().any(|g| match (&g.kind, root.kind) {
        (GeneratorKind::ArtinSchreier { rhs }, RootKind::ArtinSchreier)
        | (GeneratorKind::PthRoot { rhs }, RootKind::PthRoot) => *rhs == root.rhs,
        _ => false,
    });
    if !matches {
        return c.note(format!("chain tower does not adjoin the residue root {}", root.rhs));
    }
    c.status = CertStatus::Refuted;
    c = c.note(format!("{symbols} splits over the residue root field, chain verified"));
    c
}

/// Morandi's criterion: `D` defectless division, `Γ_D ∩ Γ_E = Γ_F`, and `D̄ ⊗ Ē`
/// division give `D ⊗ E` division. A split residue in the refutable shape gives
/// non-division.
pub fn morandi_step(
    d: &AlgebraValueData,
    d_cert: &DivisionCertificate,
    e: &AlgebraValueData,
    residue: ResidueInput,
) -> DivisionCertificate {
    let mut c = DivisionCertificate::new(format!("{} ⊗ {}", d.algebra, e.algebra), CertRule::Morandi);
    c.depth = Some(d.spec.depth);
    c.index = Some(d.index);
    c.residue_degree = d.residue_degree;
    if d.spec != e.spec {
        return c.note("D and E are analysed under different valuations");
    }
    if !d_cert.is_certified() {
        return c.note("D is not certified division").child(d_cert.clone());
    }
    c = c.child(d_cert.clone());
    c = c.note(format!(
        "D: |Γ_D/Γ_F| = {}, [D̄:F̄] = {}, dim = {}",
        d.index,
        d.residue_degree.map_or("uncertified".into(), |r| r.to_string()),
        d.dim
    ));
    if !d.defectless || !exact(d) {
        return c.note("(i) D is not certified defectless");
    }
    if !exact(e) {
        return c.note(format!(
            "E: |Γ_E/Γ_F| = {} with residue {:?} does not account for dim {}",
            e.index, e.residue_degree, e.dim
        ));
    }
    let n = d.spec.depth;
    match lattice_intersect(&d.value_group, &e.value_group) {
        Ok(l) if l == Lattice::integer(n) => c = c.note("(ii) Γ_D ∩ Γ_E = Γ_F"),
        Ok(l) => return c.note(format!("(ii) Γ_D ∩ Γ_E = {l} is larger than Γ_F")),
        Err(err) => return c.note(err.to_string()),
    }
    let res = match residue {
        ResidueInput::Auto => residue_tensor_division(&d.residue, &e.residue),
        ResidueInput::Certificate(r) => r,
        ResidueInput::Hypothesis(h) => {
            let r = DivisionCertificate::new("D̄ ⊗ Ē", CertRule::Hypothesis).note(format!("assumed division: {h}"));
            if h {
                r.certified()
            } else {
                r.with_status(CertStatus::Refuted)
            }
        }
        ResidueInput::Split(chain) => split_residue(&chain, d, e),
    };
    let status = res.status;
    c = c.child(res);
    match status {
        CertStatus::Certified => c.note("(iii) D̄ ⊗ Ē is division").certified(),
        CertStatus::Refuted if refutation_applies(d, e) => {
            let field = certify_residue_field(&d.residue.tower, &d.residue.roots);
            if field.is_certified() {
                c.note("residue root field splits Ē: the centralizer of the root is not division")
                    .child(field)
                    .with_status(CertStatus::Refuted)
            } else {
                c.note("residue root field not certified").child(field)
            }
        }
        CertStatus::Refuted => c.note("residue split, but the algebra does not have the refutable shape"),
        CertStatus::NotCertified => c.note("(iii) residue not certified"),
    }
}

/// `F̄(m^{1/p}) = F̄(v^{1/p})` when `m = λ v^e u^p` with `p ∤ e`.
fn rebase_variable(tower: &FieldTower, r: &ResidueRoot) -> Option<String> {
    if r.kind != RootKind::PthRoot {
        return None;
    }
    let (_, m) = r.rhs.single_term()?;
    let p = tower.prime as i64;
    let mut found = None;
    for (name, e) in m.iter() {
        if e % p == 0 {
            continue;
        }
        if found.is_some() || !matches!(tower.atom(name), Ok(Atom::Variable(_))) {
            return None;
        }
        found = Some(name.to_string());
    }
    found
}

/// Strips `p`-th powers: `[c·m^p, b) = [c·m, b)` and `[a, b·u^p) = [a, b)`.
pub fn strip_pth_powers(s: &SymbolTerm, p: u32) -> crate::error::Result<SymbolTerm> {
    let pi = p as i64;
    let mut a = s.slot1.clone();
    loop {
        let next = a.map_monomials(|m| {
            if !m.is_one() && m.iter().all(|(_, e)| e % pi == 0) {
                let mut r = Monomial::one();
                for (n, e) in m.iter() {
                    r.set(n, e / pi);
                }
                r
            } else {
                m.clone()
            }
        });
        if next == a {
            break;
        }
        a = next;
    }
    let b = s.slot2.map_monomials(|m| {
        let mut r = Monomial::one();
        for (n, e) in m.iter() {
            r.set(n, e.rem_euclid(pi));
        }
        r
    });
    SymbolTerm::artin_schreier(a, b)
}

fn rebase_residue(
    tower: &FieldTower,
    roots: &[ResidueRoot],
    symbols: &[SymbolTerm],
) -> Option<DivisionCertificate> {
    let p = tower.prime;
    let vars: Vec<String> = roots
        .iter()
        .map(|r| rebase_variable(tower, r))
        .collect::<Option<Vec<_>>>()?;
    let mut c = DivisionCertificate::new(
        format!("{} over F̄[{}]", SymbolSum::from_terms(p, symbols.to_vec()), vars.join(", ")),
        CertRule::Rebase,
    );
    let mut t = tower.clone();
    let mut syms = symbols.to_vec();
    for v in &vars {
        let name = format!("{v}_r");
        let (nt, _) = match rebase_pth_root(&t, v, &name) {
            Ok(x) => x,
            Err(e) => return Some(c.note(e.to_string())),
        };
        t = nt;
        let mut next = Vec::with_capacity(syms.len());
        for s in &syms {
            let a = rebase_element(&s.slot1, v, &name);
            let b = rebase_element(&s.slot2, v, &name);
            match (a, b) {
                (Ok(a), Ok(b)) => match SymbolTerm::artin_schreier(a, b).and_then(|s| strip_pth_powers(&s, p)) {
                    Ok(s) => next.push(s),
                    Err(e) => return Some(c.note(e.to_string())),
                },
                (Err(e), _) | (_, Err(e)) => return Some(c.note(e.to_string())),
            }
        }
        syms = next;
        c = c.note(format!("{v} = {name}^{p}"));
    }
    let sum = SymbolSum::from_terms(p, syms);
    c = c.note(format!("residue symbols become {sum} over {t}"));
    let child = chain_division(&t, &sum);
    c.status = child.status;
    Some(c.child(child))
}

fn w_residue(tower: &FieldTower, root: &ResidueRoot, s: &SymbolTerm) -> DivisionCertificate {
    let c = DivisionCertificate::new(format!("{s} over F̄[℘^-1({})]", root.rhs), CertRule::WObstruction);
    let (wk, wd) = match (w_field_trace(tower, &root.rhs), w_reduced_trace(tower, s)) {
        (Ok(k), Ok(d)) => (k, d),
        (Err(e), _) | (_, Err(e)) => return c.note(e.to_string()),
    };
    let c = c.note(format!("w(Tr) = {}, w(Trd) = {}", wk.value, wd.value));
    match subfield_obstruction(&wk, &wd) {
        Ok(SubfieldVerdict::NotSubfield) => c
            .note("the root field is not a subfield, so the degree-p symbol stays division over it")
            .certified(),
        _ => c.note("w comparison inconclusive"),
    }
}

/// Certificate that `D̄ ⊗ Ē` is division: the residue roots must generate a
/// field `C`; residue symbols are then checked over `C` by re-basing along
/// `p`-th roots of variables, or by the w-obstruction for one Artin–Schreier root.
pub fn residue_tensor_division(d: &ResidueDescriptor, e: &ResidueDescriptor) -> DivisionCertificate {
    let tower = &d.tower;
    let roots: Vec<ResidueRoot> = d.roots.iter().chain(&e.roots).cloned().collect();
    let symbols: Vec<SymbolTerm> = d.symbols.iter().chain(&e.symbols).cloned().collect();
    let field = certify_residue_field(tower, &roots);
    if !field.is_certified() {
        return DivisionCertificate::new("D̄ ⊗ Ē", field.rule)
            .note("residue roots not certified to generate a field")
            .child(field);
    }
    if symbols.is_empty() {
        let mut c = field;
        c.subject = format!("D̄ ⊗ Ē = {}", c.subject);
        return c;
    }
    if let Some(c) = rebase_residue(tower, &roots, &symbols) {
        return c.child(field);
    }
    if roots.len() == 1 && symbols.len() == 1 && roots[0].kind == RootKind::ArtinSchreier {
        return w_residue(tower, &roots[0], &symbols[0]).child(field);
    }
    DivisionCertificate::new("D̄ ⊗ Ē", CertRule::Morandi)
        .note("unsupported residue configuration")
        .child(field)
}

/// Division certificate for a tensor product of symbols. One symbol goes through
/// [`certify_symbol`]; otherwise the last (then the first) factor is peeled off as
/// `E`, the rest is certified recursively, and Morandi's criterion is tried under
/// the valuations seeing the `n-1`, …, `1` outermost variables.
pub fn chain_division(tower: &FieldTower, a: &SymbolSum) -> DivisionCertificate {
    let p = tower.prime;
    let factors = tensor_factors(a);
    match factors.len() {
        0 => return DivisionCertificate::new("F", CertRule::Trivial).certified(),
        1 => return certify_symbol(tower, &factors[0]),
        _ => {}
    }
    let mut fail = DivisionCertificate::new(a.to_string(), CertRule::Morandi);
    for peel in [Peel::Last, Peel::First] {
        let mut rest = factors.clone();
        let e_term = match peel {
            Peel::Last => rest.pop().expect("k ≥ 2"),
            Peel::First => rest.remove(0),
        };
        let d_sum = SymbolSum::from_terms(p, rest);
        let e_sum = SymbolSum::from_terms(p, vec![e_term.clone()]);
        let d_cert = chain_division(tower, &d_sum);
        if !d_cert.is_certified() {
            fail = fail.note(format!("{peel:?} peel: D = {d_sum} not certified"));
            continue;
        }
        let e_cert = certify_symbol(tower, &e_term);
        if !e_cert.is_certified() {
            fail = fail.note(format!("{peel:?} peel: E = {e_sum} not certified"));
            continue;
        }
        for depth in (1..tower.n()).rev() {
            let spec = ValuationSpec::depth(depth);
            let (dv, ev) = match (algebra_value_group(tower, &d_sum, spec), algebra_value_group(tower, &e_sum, spec)) {
                (Ok(d), Ok(e)) => (d, e),
                (Err(err), _) | (_, Err(err)) => {
                    fail = fail.note(format!("{peel:?} peel, depth {depth}: {err}"));
                    continue;
                }
            };
            let mut step = morandi_step(&dv, &d_cert, &ev, ResidueInput::Auto);
            if step.is_certified() {
                step.subject = a.to_string();
                step.peel = Some(peel);
                return step
                    .note(format!("{peel:?} peel at depth {depth}"))
                    .child(e_cert);
            }
            let why = step.trace.last().cloned().unwrap_or_default();
            fail = fail.note(format!("{peel:?} peel, depth {depth}: {why}"));
        }
    }
    fail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldtower::GroundField;

    fn sum(p: u32, s: &str) -> SymbolSum {
        SymbolSum::parse(p, s).unwrap()
    }

    #[test]
    fn independence_examples() {
        let t = FieldTower::laurent(3, 2).unwrap();
        let s = |x: &str| sum(3, x).terms()[0].1.clone();
        assert!(independence_division(&t, &s("[a2^-1, a1)"), t.full()).is_certified());
        assert!(!independence_division(&t, &s("[a1, a1^2)"), t.full()).is_certified());
        let yc = FieldTower::new(3, GroundField::char_p(3, &[]), &["y", "c"]).unwrap();
        assert!(independence_division(&yc, &s("[y^-1, c)"), yc.full()).is_certified());
    }

    #[test]
    fn shift_lemma_n3() {
        for p in [2u32, 3] {
            let t = FieldTower::laurent(p, 3).unwrap();
            let a2 = sum(p, "[a3^-1, a1) + [a1^-1, a2)");
            let c = chain_division(&t, &a2);
            assert!(c.is_certified(), "{c:#?}");
            assert_eq!(c.top_peel(), Some((Peel::Last, 2, p as u64, p as u64)));
            let a1 = sum(p, "[a3^-1, a2) + [a2^-1, a1)");
            assert!(chain_division(&t, &a1).is_certified());
        }
    }

    #[test]
    fn value_group_examples() {
        let p = 2;
        let t = FieldTower::laurent(p, 3).unwrap();
        let a2 = sum(p, "[a3^-1, a1) + [a1^-1, a2)");
        let v = algebra_value_group(&t, &a2, t.full()).unwrap();
        assert_eq!(v.value_group, Lattice::diagonal(&[4, 2, 2]));
        assert_eq!(v.index, 16);
        assert!(v.totally_ramified);
        let d = algebra_value_group(&t, &sum(p, "[a3^-1, a1)"), ValuationSpec::depth(2)).unwrap();
        assert_eq!((d.index, d.residue_degree, d.defectless), (2, Some(2), true));
    }

    #[test]
    fn shared_ramification_blocks_morandi() {
        let p = 3;
        let t = FieldTower::laurent(p, 2).unwrap();
        let d_sum = sum(p, "[a2^-1, a1)");
        let e_sum = sum(p, "[a1^-1, a2)");
        let spec = t.full();
        let d = algebra_value_group(&t, &d_sum, spec).unwrap();
        let e = algebra_value_group(&t, &e_sum, spec).unwrap();
        let cert = chain_division(&t, &d_sum);
        let step = morandi_step(&d, &cert, &e, ResidueInput::Auto);
        assert_eq!(step.status, CertStatus::NotCertified);
        assert!(step.trace.iter().any(|l| l.starts_with("(ii)")));
    }
}
