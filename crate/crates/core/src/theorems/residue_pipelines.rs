use serde::Serialize;

use crate::brauer::{same_class, RewriteChain, RewriteStep, Rule, SymbolSum, SymbolTerm};
use crate::element::FormalElement;
use crate::error::{Error, Result};
use crate::fieldtower::{adjoin_artin_schreier, adjoin_pth_root, rebase_element, rebase_pth_root, FieldTower, GroundField, ValuationSpec};
use crate::valdiv::{
    algebra_value_group, certify_symbol, independence_division, morandi_step, shared_subfield_obstruction,
    subfield_obstruction, w_field_trace, w_field_trace_closed_form, w_reduced_trace, CertStatus,
    DivisionCertificate, ResidueInput, SubfieldVerdict,
};
use crate::valgroup::{q, ValueVector};

use super::{Outcome, Verdict};

fn odd(p: u32) -> Result<()> {
    if p == 2 {
        return Err(Error::InvalidParameters("the construction needs an odd prime".into()));
    }
    Ok(())
}

fn sym(p: u32, s: &str) -> Result<SymbolTerm> {
    let sum = SymbolSum::parse(p, s)?;
    match sum.terms() {
        [(1, t)] => Ok(t.clone()),
        _ => Err(Error::InvalidParameters(format!("{s} is not a single symbol"))),
    }
}

fn mentions(e: &FormalElement, name: &str) -> bool {
    e.atoms().any(|a| a == name)
}

/// `D`, `E` with `X ⊗ Y ≅ D ⊗ E` for the two shapes over `F_0((t))`:
/// `[a, t) ⊗ [c, dt)` gives `[a+c, t)`, `[c, d)`; `[t^{-1}, a) ⊗ [d + t^{-1}, c)`
/// gives `[t^{-1}, ac)`, `[d, c)`.
pub fn prop71_decompose(tower: &FieldTower, shape: u8, x: &SymbolTerm, y: &SymbolTerm) -> Result<(SymbolTerm, SymbolTerm)> {
    let p = tower.prime;
    let t = tower.variables.last().ok_or_else(|| Error::InvalidParameters("no outer variable".into()))?;
    let t1 = FormalElement::atom(p, t, 1);
    let tinv = FormalElement::atom(p, t, -1);
    let bad = |m: &str| Error::InvalidParameters(format!("{x} ⊗ {y} is not of shape {shape}: {m}"));
    match shape {
        1 => {
            if x.slot2 != t1 || mentions(&x.slot1, t) || mentions(&y.slot1, t) {
                return Err(bad("expected [a, t) ⊗ [c, d·t)"));
            }
            let d = y.slot2.mul(&tinv);
            if mentions(&d, t) {
                return Err(bad("second slot of Y is not d·t"));
            }
            Ok((
                SymbolTerm::artin_schreier(x.slot1.add(&y.slot1), t1)?,
                SymbolTerm::artin_schreier(y.slot1.clone(), d)?,
            ))
        }
        2 => {
            let d = y.slot1.sub(&tinv);
            if x.slot1 != tinv || mentions(&x.slot2, t) || mentions(&y.slot2, t) || mentions(&d, t) {
                return Err(bad("expected [t^-1, a) ⊗ [d + t^-1, c)"));
            }
            Ok((
                SymbolTerm::artin_schreier(tinv, x.slot2.mul(&y.slot2))?,
                SymbolTerm::artin_schreier(d, y.slot2.clone())?,
            ))
        }
        _ => Err(Error::InvalidParameters(format!("shape {shape} is not 1 or 2"))),
    }
}

/// Morandi step for `X ⊗ Y` under the `t`-adic valuation after the decomposition.
fn tensor_via_prop71(
    v: &mut Verdict,
    label: &str,
    tower: &FieldTower,
    shape: u8,
    x: &SymbolTerm,
    y: &SymbolTerm,
    residue: ResidueInput,
) -> Result<DivisionCertificate> {
    let p = tower.prime;
    let (d, e) = prop71_decompose(tower, shape, x, y)?;
    let xy = SymbolSum::from_terms(p, vec![x.clone(), y.clone()]);
    let de = SymbolSum::from_terms(p, vec![d.clone(), e.clone()]);
    v.step(&format!("{label}:decompose"), format!("{xy} ~ {de}"), same_class(&xy, &de)?);
    let spec = ValuationSpec::depth(1);
    let dv = algebra_value_group(tower, &SymbolSum::from_terms(p, vec![d.clone()]), spec)?;
    let ev = algebra_value_group(tower, &SymbolSum::from_terms(p, vec![e]), spec)?;
    let d_cert = certify_symbol(tower, &d);
    let mut cert = morandi_step(&dv, &d_cert, &ev, residue);
    cert.subject = xy.to_string();
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop71Toggle {
    /// The residue symbol over the root field is assumed division.
    Division,
    /// It is assumed split.
    Split,
}

/// Both directions of the residue criterion over `F_0((t))` with generic constants
/// `a, c, d`; `toggle = None` runs both hypotheses.
pub fn verify_prop71(variant: u8, p: u32, toggle: Option<Prop71Toggle>) -> Result<Verdict> {
    odd(p)?;
    let mut v = Verdict::new("prop71").param("variant", variant as u32).param("p", p);
    if let Some(t) = toggle {
        v = v.param("toggle", format!("{t:?}").to_lowercase());
    }
    let tower = FieldTower::new(p, GroundField::char_p(p, &["a", "c", "d"]), &["t"])?;
    let (x, y, dw, ew) = match variant {
        1 => ("[a, t)", "[c, d*t)", "[a + c, t)", "[c, d)"),
        2 => ("[t^-1, a)", "[d + t^-1, c)", "[t^-1, a*c)", "[d, c)"),
        _ => return Err(Error::InvalidParameters(format!("variant {variant} is not 1 or 2"))),
    };
    let (x, y) = (sym(p, x)?, sym(p, y)?);
    let (d, e) = prop71_decompose(&tower, variant, &x, &y)?;
    v.put("D", d.to_string());
    v.put("E", e.to_string());
    v.step("decomposition", format!("D = {d}, E = {e}"), d == sym(p, dw)? && e == sym(p, ew)?);
    let toggles = match toggle {
        Some(t) => vec![t],
        None => vec![Prop71Toggle::Division, Prop71Toggle::Split],
    };
    let mut last = CertStatus::NotCertified;
    for t in toggles {
        let h = t == Prop71Toggle::Division;
        let label = format!("{t:?}").to_lowercase();
        let cert = tensor_via_prop71(&mut v, &label, &tower, variant, &x, &y, ResidueInput::Hypothesis(h))?;
        let want = if h { CertStatus::Certified } else { CertStatus::Refuted };
        v.step(&label, format!("residue {label} ⟹ {x} ⊗ {y}: {:?}", cert.status), cert.status == want);
        v.put(&format!("conclusion_{label}"), format!("{:?}", cert.status).to_lowercase());
        last = cert.status;
        v.certificates.push(cert);
    }
    let v = v.conclude(Outcome::Inconclusive);
    Ok(match (toggle, v.outcome, last) {
        (Some(Prop71Toggle::Split), Outcome::Verified, CertStatus::Refuted) => v.finish(Outcome::Refuted),
        _ => v,
    })
}

fn tower_dc(p: u32) -> Result<FieldTower> {
    FieldTower::new(p, GroundField::char_p(p, &[]), &["d", "c"])
}

/// Trace invariants (part 1) or re-basing along `y^p = d` (part 2) over `k((d))((c))`.
pub fn verify_lemma72(part: u8, p: u32) -> Result<Verdict> {
    let mut v = Verdict::new("lemma72").param("part", part as u32).param("p", p);
    let t = tower_dc(p)?;
    let pi = p as i64;
    match part {
        1 => {
            let s = sym(p, "[c^-1, d^-1)")?;
            let m = t.element("d^-1")?;
            let div = independence_division(&t, &s, t.full());
            v.step("division", format!("{s}: {:?}", div.status), div.is_certified());
            v.certificates.push(div);
            let wd = w_reduced_trace(&t, &s)?;
            let wk = w_field_trace(&t, &m)?;
            let closed = w_field_trace_closed_form(&t, &m)?;
            v.put("w_trd", wd.value.to_string());
            v.put("w_tr", wk.value.to_string());
            let want_d = ValueVector::new(vec![q(0, 1), q(pi - 1, pi)]);
            let want_k = ValueVector::new(vec![q(pi - 1, pi), q(0, 1)]);
            v.step("w_trd", format!("w(Trd) = {} ({})", wd.value, wd.method), wd.value == want_d);
            v.step("w_tr", format!("w(Tr) = {} ({})", wk.value, wk.method), wk.value == want_k);
            v.step("closed_form", format!("closed form {closed}"), closed == wk.value);
            let verdict = subfield_obstruction(&wk, &wd)?;
            v.put("subfield", format!("{verdict:?}").to_lowercase());
            v.step("obstruction", format!("{} > {}: {verdict:?}", wd.value, wk.value), verdict == SubfieldVerdict::NotSubfield);
        }
        2 => {
            let s = sym(p, "[d^-1, c)")?;
            let (ty, _) = rebase_pth_root(&t, "d", "y")?;
            let a = rebase_element(&s.slot1, "d", "y")?;
            let b = rebase_element(&s.slot2, "d", "y")?;
            let raw = SymbolTerm::artin_schreier(a, b)?;
            let over_k = crate::valdiv::strip_pth_powers(&raw, p)?;
            v.put("tower", ty.to_string());
            v.put("symbol", over_k.to_string());
            v.step("rebase", format!("d = y^{p}: {s} = {raw} = {over_k}"), over_k == sym(p, "[y^-1, c)")?);
            let cert = independence_division(&ty, &over_k, ty.full());
            v.step("division", format!("{over_k} over {ty}: {:?}", cert.status), cert.is_certified());
            v.certificates.push(cert);
        }
        _ => return Err(Error::InvalidParameters(format!("part {part} is not 1 or 2"))),
    }
    Ok(v.conclude(Outcome::Inconclusive))
}

/// Inputs of the cyclic-algebra example; editable for negative controls.
#[derive(Clone, Debug, Serialize)]
pub struct Example73Scenario {
    pub part: u8,
    pub p: u32,
    pub tower: FieldTower,
    pub a: SymbolTerm,
    pub b: SymbolTerm,
    pub c: SymbolTerm,
    /// Split chain for the residue symbol over `L`.
    pub split_chain: RewriteChain,
}

fn sum(p: u32, s: &str) -> Result<SymbolSum> {
    SymbolSum::parse(p, s)
}

pub fn example73_scenario(part: u8, p: u32) -> Result<Example73Scenario> {
    odd(p)?;
    let tower = FieldTower::new(p, GroundField::char_p(p, &[]), &["d", "c", "t"])?;
    let base = tower_dc(p)?;
    let (a, b, c, chain) = match part {
        1 => {
            let (l, _) = adjoin_artin_schreier(&base, "xL", &base.element("2*d^-1 - c^-1")?, base.full())?;
            let chain = RewriteChain::new(l.clone(), sum(p, "[c^-1, d^-1)")?)
                .then(RewriteStep::new(Rule::Slot1Add, sum(p, "[c^-1 - 2*d^-1, d^-1) + 2*[d^-1, d^-1)")?))
                .then(RewriteStep::new(Rule::Slot2Self, sum(p, "[c^-1 - 2*d^-1, d^-1)")?).on(2))
                .then(RewriteStep::new(Rule::Negate, sum(p, "[2*d^-1 - c^-1, d)")?).on(1))
                .then(RewriteStep::new(Rule::AsShift, SymbolSum::trivial(p)).on(1).witness(l.element("-xL")?));
            ("[d^-1 - c^-1, t)", "[2*d^-1 - 2*c^-1, t)", "[c^-1, d^-1*t)", chain)
        }
        2 => {
            let (l, _) = adjoin_pth_root(&base, "w", &base.element("d^2*c^-1")?, base.full())?;
            let k = p - 2;
            let chain = RewriteChain::new(l.clone(), sum(p, "[d^-1, c)")?)
                .then(RewriteStep::new(Rule::Slot2Mult, sum(p, &format!("[d^-1, c*d^-2) + {k}*[d^-1, d^-1)"))?))
                .then(RewriteStep::new(Rule::Slot2Self, sum(p, "[d^-1, c*d^-2)")?).on(2))
                .then(RewriteStep::new(Rule::Negate, sum(p, "[-d^-1, d^2*c^-1)")?).on(1))
                .then(RewriteStep::new(Rule::Slot2PthPower, sum(p, "[-d^-1, 1)")?).on(1).witness(l.element("w")?));
            ("[t^-1, d*c^-1)", "[t^-1, d^2*c^-2)", "[d^-1 + t^-1, c)", chain)
        }
        _ => return Err(Error::InvalidParameters(format!("part {part} is not 1 or 2"))),
    };
    Ok(Example73Scenario {
        part,
        p,
        tower,
        a: sym(p, a)?,
        b: sym(p, b)?,
        c: sym(p, c)?,
        split_chain: chain,
    })
}

pub fn verify_example73(part: u8, p: u32) -> Result<Verdict> {
    verify_example73_with(&example73_scenario(part, p)?)
}

/// `A ⊗ C` division, `B ~ A^{⊗2}`, `B ⊗ C` non-division through the split chain,
/// and no shared maximal subfield for `(A, C)` and `(B, C)`.
pub fn verify_example73_with(s: &Example73Scenario) -> Result<Verdict> {
    let p = s.p;
    let mut v = Verdict::new("example73").param("part", s.part as u32).param("p", p);
    let one = |t: &SymbolTerm| SymbolSum::from_terms(p, vec![t.clone()]);
    let (a, b, c) = (one(&s.a), one(&s.b), one(&s.c));
    v.put("A", a.to_string());
    v.put("B", b.to_string());
    v.put("C", c.to_string());
    let a2 = crate::brauer::scalar_power(&a, 2)?;
    v.step("B=A^2", format!("{b} ~ {a2}"), same_class(&b, &a2)?);

    let ac = tensor_via_prop71(&mut v, "AC", &s.tower, s.part, &s.a, &s.c, ResidueInput::Auto)?;
    v.put("A⊗C", format!("{:?}", ac.status).to_lowercase());
    v.step("A⊗C", format!("{a} ⊗ {c}: {:?}", ac.status), ac.is_certified());

    let verdict = s.split_chain.check();
    v.step("split_chain", format!("{} over {}: {verdict:?}", s.split_chain.start, s.split_chain.tower), s.split_chain.proves_split());
    let bc = tensor_via_prop71(&mut v, "BC", &s.tower, s.part, &s.b, &s.c, ResidueInput::Split(Box::new(s.split_chain.clone())))?;
    v.put("B⊗C", format!("{:?}", bc.status).to_lowercase());
    v.step("B⊗C", format!("{b} ⊗ {c}: {:?}", bc.status), bc.is_refuted());

    let ac_sum = a.plus(&c);
    let inv2 = (p as i64 + 1) / 2;
    for (label, x, i) in [("A,C", &a, 1), ("B,C", &b, inv2)] {
        let r = shared_subfield_obstruction(x, &c, i, Some((&ac_sum, &ac)));
        let ok = matches!(&r, Ok(x) if x.is_obstructed());
        let text = match &r {
            Ok(x) => format!("{x:?}"),
            Err(e) => e.to_string(),
        };
        v.put(&format!("shared({label})"), if ok { "no_common_maximal_subfield" } else { "inconclusive" });
        v.step(&format!("shared({label})"), format!("i = {i}: {text}"), ok);
    }
    v.certificates.push(ac);
    v.certificates.push(bc);
    Ok(v.conclude(Outcome::Inconclusive))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prop71_both_variants() {
        for variant in [1, 2] {
            let v = verify_prop71(variant, 3, None).unwrap();
            assert!(v.is_verified(), "{variant}: {:#?}", v.trace);
        }
        assert_eq!(verify_prop71(1, 3, Some(Prop71Toggle::Split)).unwrap().outcome, Outcome::Refuted);
        assert!(verify_prop71(1, 2, None).is_err());
    }

    #[test]
    fn lemma72_parts() {
        for (part, p) in [(1, 3), (1, 5), (2, 3)] {
            let v = verify_lemma72(part, p).unwrap();
            assert!(v.is_verified(), "{part} {p}: {:#?}", v.trace);
        }
    }

    #[test]
    fn example73_trio() {
        for part in [1, 2] {
            for p in [3, 5] {
                let v = verify_example73(part, p).unwrap();
                assert!(v.is_verified(), "{part} {p}: {:#?}", v.trace);
            }
        }
    }
}
