//! Symbolic iterated Laurent series towers `F_0((α_1))…((α_n))`.
//!
//! Ground constants are generic: they satisfy no algebraic relations, so a
//! nonzero prime-field combination of distinct constant monomials is a unit
//! whose residue is itself.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::element::{FormalElement, Monomial};
use crate::error::{Error, Result};
use crate::fp;
use crate::valgroup::{q, ValueVector, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundField {
    /// `0` or a prime.
    pub characteristic: u32,
    pub perfect: bool,
    pub algebraically_closed: bool,
    pub constants: Vec<String>,
}

impl GroundField {
    /// A characteristic-`p` ground field with generic constants.
    pub fn char_p(p: u32, constants: &[&str]) -> Self {
        Self {
            characteristic: p,
            perfect: false,
            algebraically_closed: false,
            constants: constants.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Algebraically closed ground, e.g. for the characteristic-not-p model.
    pub fn algebraically_closed(characteristic: u32) -> Self {
        Self {
            characteristic,
            perfect: true,
            algebraically_closed: true,
            constants: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `g^p - g = rhs`
    ArtinSchreier { rhs: FormalElement },
    /// `g^p = rhs`
    PthRoot { rhs: FormalElement },
    /// `g^(p^power) - g^(p^(power-1)) = rhs`
    Composite { power: u32, rhs: FormalElement },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionGenerator {
    pub name: String,
    pub kind: GeneratorKind,
    /// Value under the full-depth valuation of the tower it was adjoined to.
    pub value: ValueVector,
    /// Expression of the generator in terms of earlier ones, when it has one.
    pub definition: Option<FormalElement>,
    pub residue_note: Option<String>,
}

impl ExtensionGenerator {
    pub fn rhs(&self) -> &FormalElement {
        match &self.kind {
            GeneratorKind::ArtinSchreier { rhs }
            | GeneratorKind::PthRoot { rhs }
            | GeneratorKind::Composite { rhs, .. } => rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationSpec {
    /// Number of outermost variables the valuation sees.
    pub depth: usize,
}

impl ValuationSpec {
    pub fn depth(depth: usize) -> Self {
        Self { depth }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    Constant,
    Variable(usize),
    Generator(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldTower {
    pub prime: u32,
    pub ground: GroundField,
    pub variables: Vec<String>,
    pub generators: Vec<ExtensionGenerator>,
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.ground;
        if g.algebraically_closed {
            write!(f, "closed({})", g.characteristic)?;
        } else if g.constants.is_empty() {
            write!(f, "F{}", g.characteristic)?;
        } else {
            write!(f, "F{}({})", g.characteristic, g.constants.join(","))?;
        }
        for v in &self.variables {
            write!(f, "(({v}))")?;
        }
        if !self.generators.is_empty() {
            let names: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
            write!(f, "[{}]", names.join(","))?;
        }
        Ok(())
    }
}

impl FieldTower {
    pub fn new(prime: u32, ground: GroundField, variables: &[&str]) -> Result<Self> {
        fp::check_prime(prime)?;
        let t = Self {
            prime,
            ground,
            variables: variables.iter().map(|s| s.to_string()).collect(),
            generators: Vec::new(),
        };
        t.check_names()?;
        Ok(t)
    }

    /// `F_0((α_1))…((α_n))` over a generic ground of characteristic `p`.
    pub fn laurent(p: u32, n: usize) -> Result<Self> {
        let names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::new(p, GroundField::char_p(p, &[]), &refs)
    }

    fn check_names(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        let all = self
            .ground
            .constants
            .iter()
            .chain(&self.variables)
            .chain(self.generators.iter().map(|g| &g.name));
        for n in all {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn full(&self) -> ValuationSpec {
        ValuationSpec::depth(self.n())
    }

    pub fn element(&self, s: &str) -> Result<FormalElement> {
        let e = FormalElement::parse(self.prime, s)?;
        for a in e.atoms() {
            self.atom(a)?;
        }
        Ok(e)
    }

    pub fn atom(&self, name: &str) -> Result<Atom> {
        if self.ground.constants.iter().any(|c| c == name) {
            return Ok(Atom::Constant);
        }
        if let Some(i) = self.variables.iter().position(|v| v == name) {
            return Ok(Atom::Variable(i));
        }
        if let Some(i) = self.generators.iter().position(|g| g.name == name) {
            return Ok(Atom::Generator(i));
        }
        Err(Error::UnknownName(name.to_string()))
    }

    pub fn generator(&self, name: &str) -> Result<&ExtensionGenerator> {
        match self.atom(name)? {
            Atom::Generator(i) => Ok(&self.generators[i]),
            _ => Err(Error::Incompatible(format!("`{name}` is not a generator"))),
        }
    }

    fn check_spec(&self, spec: ValuationSpec) -> Result<()> {
        if spec.depth == 0 || spec.depth > self.n() {
            return Err(Error::InvalidParameters(format!(
                "valuation depth {} outside 1..={}",
                spec.depth,
                self.n()
            )));
        }
        Ok(())
    }

    /// Full-depth value of a single atom.
    fn atom_value(&self, name: &str) -> Result<ValueVector> {
        Ok(match self.atom(name)? {
            Atom::Constant => ValueVector::zero(self.n()),
            Atom::Variable(i) => ValueVector::unit(self.n(), i),
            Atom::Generator(i) => self.generators[i].value.clone(),
        })
    }

    pub fn monomial_value(&self, m: &Monomial, spec: ValuationSpec) -> Result<ValueVector> {
        self.check_spec(spec)?;
        let mut v = ValueVector::zero(self.n());
        for (name, e) in m.iter() {
            v = &v + &(&self.atom_value(name)? * e);
        }
        Ok(v.project_outer(spec.depth))
    }

    /// Whether a term can sit among tied minimal terms without risking cancellation.
    fn tie_safe(&self, m: &Monomial, spec: ValuationSpec) -> Result<bool> {
        for (name, e) in m.iter() {
            if let Atom::Generator(i) = self.atom(name)? {
                let g = &self.generators[i];
                if !g.value.project_outer(spec.depth).is_zero() || e < 0 || e >= self.prime as i64 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn value_of(&self, e: &FormalElement, spec: ValuationSpec) -> Result<ValueVector> {
        self.check_spec(spec)?;
        if e.is_zero() {
            return Err(Error::ZeroElement);
        }
        let mut vals = Vec::with_capacity(e.len());
        for (m, _) in e.terms() {
            vals.push((self.monomial_value(m, spec)?, m));
        }
        let min = vals
            .iter()
            .map(|(v, _)| v)
            .min_by(|a, b| a.lex_cmp(b))
            .cloned()
            .expect("nonzero element");
        let tied: Vec<&Monomial> = vals
            .iter()
            .filter(|(v, _)| v.lex_cmp(&min) == Ordering::Equal)
            .map(|(_, m)| *m)
            .collect();
        if tied.len() > 1 {
            for m in &tied {
                if !self.tie_safe(m, spec)? {
                    return Err(Error::AmbiguousValuation(e.to_string()));
                }
            }
        }
        Ok(min)
    }

    fn is_active(&self, name: &str, spec: ValuationSpec) -> bool {
        matches!(self.atom(name), Ok(Atom::Variable(i)) if i >= self.n() - spec.depth)
    }

    pub fn residue_of(&self, e: &FormalElement, spec: ValuationSpec) -> Result<FormalElement> {
        let v = self.value_of(e, spec)?;
        if !v.is_zero() {
            return Err(Error::NonUnit(e.to_string()));
        }
        let mut out = FormalElement::zero(self.prime);
        for (m, c) in e.terms() {
            let mv = self.monomial_value(m, spec)?;
            if !mv.is_zero() {
                continue;
            }
            let rest = m.filter(|n| !self.is_active(n, spec));
            if rest != *m {
                return Err(Error::Unsupported(format!(
                    "unit term {m} mixes active variables with generators"
                )));
            }
            out.add_term(c, rest);
        }
        Ok(out)
    }

    /// The residue tower: the inner `n - depth` variables over the same ground.
    pub fn residue_tower(&self, spec: ValuationSpec) -> Result<FieldTower> {
        self.check_spec(spec)?;
        let keep = self.n() - spec.depth;
        Ok(FieldTower {
            prime: self.prime,
            ground: self.ground.clone(),
            variables: self.variables[..keep].to_vec(),
            generators: Vec::new(),
        })
    }

    fn push(&self, g: ExtensionGenerator) -> Result<FieldTower> {
        let mut t = self.clone();
        t.generators.push(g);
        t.check_names()?;
        Ok(t)
    }

    fn in_p_lattice(&self, v: &ValueVector) -> bool {
        v.scale(q(1, self.prime as i64)).is_integral()
    }

    /// Rewrites powers of generators through their defining equations until stable.
    pub fn reduce(&self, e: &FormalElement) -> Result<FormalElement> {
        let p = self.prime as i64;
        let mut cur = e.clone();
        for _ in 0..256 {
            let mut next = FormalElement::zero(self.prime);
            let mut changed = false;
            for (m, c) in cur.terms() {
                let mut hit = None;
                for (name, k) in m.iter() {
                    if let Ok(Atom::Generator(i)) = self.atom(name) {
                        match &self.generators[i].kind {
                            GeneratorKind::ArtinSchreier { rhs } if k >= p => {
                                // g^p = g + rhs
                                let g = FormalElement::atom(self.prime, name, 1);
                                hit = Some((name.to_string(), p, g.add(rhs)));
                            }
                            GeneratorKind::PthRoot { rhs } if k >= p || k <= -p => {
                                let step = if k > 0 { p } else { -p };
                                hit = Some((name.to_string(), step, rhs.powi(step / p)?));
                            }
                            _ => {}
                        }
                    }
                    if hit.is_some() {
                        break;
                    }
                }
                match hit {
                    Some((name, step, repl)) => {
                        changed = true;
                        let mut rest = m.clone();
                        rest.set(&name, m.exponent(&name) - step);
                        next = next.add(&FormalElement::term(self.prime, c as i64, rest).mul(&repl));
                    }
                    None => next.add_term(c, m.clone()),
                }
            }
            cur = next;
            if !changed {
                return Ok(cur);
            }
        }
        Err(Error::Unsupported(format!("reduction of {e} did not terminate")))
    }

    /// `℘(u) = u^p - u`, reduced in the tower.
    pub fn wp(&self, u: &FormalElement) -> Result<FormalElement> {
        self.reduce(&u.wp())
    }
}

/// Adjoins a root `name` of `g^p - g = rhs`.
pub fn adjoin_artin_schreier(
    tower: &FieldTower,
    name: &str,
    rhs: &FormalElement,
    spec: ValuationSpec,
) -> Result<(FieldTower, ExtensionGenerator)> {
    let p = tower.prime as i64;
    let v_spec = tower.value_of(rhs, spec)?;
    let mut residue_note = None;
    if v_spec.is_negative() {
        if tower.in_p_lattice(&v_spec) {
            return Err(Error::Unsupported(format!(
                "Artin–Schreier right-hand side {rhs} has negative value {v_spec} in pΓ"
            )));
        }
    } else if v_spec.is_zero() {
        let res = tower.residue_of(rhs, spec)?;
        residue_note = Some(format!("{name}^{p} - {name} = {res}"));
    } else {
        return Err(Error::Unsupported(format!(
            "Artin–Schreier right-hand side {rhs} has positive value"
        )));
    }
    let v_full = tower.value_of(rhs, tower.full())?;
    let value = if v_full.is_negative() {
        if tower.in_p_lattice(&v_full) {
            return Err(Error::Unsupported(format!(
                "full-depth value {v_full} of {rhs} lies in pΓ"
            )));
        }
        v_full.scale(q(1, p))
    } else if v_full.is_zero() {
        v_full
    } else {
        return Err(Error::Unsupported(format!(
            "Artin–Schreier right-hand side {rhs} has positive full-depth value"
        )));
    };
    let g = ExtensionGenerator {
        name: name.to_string(),
        kind: GeneratorKind::ArtinSchreier { rhs: rhs.clone() },
        value,
        definition: None,
        residue_note,
    };
    Ok((tower.push(g.clone())?, g))
}

/// Adjoins `name` with `name^p = rhs`.
pub fn adjoin_pth_root(
    tower: &FieldTower,
    name: &str,
    rhs: &FormalElement,
    spec: ValuationSpec,
) -> Result<(FieldTower, ExtensionGenerator)> {
    let p = tower.prime as i64;
    let (_, m) = rhs
        .single_term()
        .ok_or_else(|| Error::Unsupported(format!("p-th root of non-monomial {rhs}")))?;
    let declared = m.iter().all(|(n, e)| {
        e % p == 0
            || (tower.ground.perfect && matches!(tower.atom(n), Ok(Atom::Constant)))
    });
    if declared {
        return Err(Error::DeclaredPthPower(rhs.to_string()));
    }
    let v_full = tower.value_of(rhs, tower.full())?;
    let v_spec = tower.value_of(rhs, spec)?;
    let residue_note = if v_spec.is_zero() {
        Some(format!("{name}^{p} = {}", tower.residue_of(rhs, spec)?))
    } else {
        None
    };
    let g = ExtensionGenerator {
        name: name.to_string(),
        kind: GeneratorKind::PthRoot { rhs: rhs.clone() },
        value: v_full.scale(q(1, p)),
        definition: None,
        residue_note,
    };
    Ok((tower.push(g.clone())?, g))
}

/// Re-bases the tower along `var = name^p`: `name` replaces `var`, so
/// `F_0((..))((var))` becomes `F_0((..))((name))`. Returns the new tower and the
/// generator record in the old coordinates.
pub fn rebase_pth_root(
    tower: &FieldTower,
    var: &str,
    name: &str,
) -> Result<(FieldTower, ExtensionGenerator)> {
    let i = match tower.atom(var)? {
        Atom::Variable(i) => i,
        _ => {
            return Err(Error::Unsupported(format!(
                "re-basing needs a tower variable, got `{var}`"
            )))
        }
    };
    if !tower.generators.is_empty() {
        return Err(Error::Unsupported(
            "re-basing a tower that already carries generators".into(),
        ));
    }
    let g = ExtensionGenerator {
        name: name.to_string(),
        kind: GeneratorKind::PthRoot {
            rhs: FormalElement::atom(tower.prime, var, 1),
        },
        value: ValueVector::unit(tower.n(), i).scale(q(1, tower.prime as i64)),
        definition: None,
        residue_note: Some(format!("{var} = {name}^{}", tower.prime)),
    };
    let mut t = tower.clone();
    t.variables[i] = name.to_string();
    t.check_names()?;
    Ok((t, g))
}

/// Rewrites `e` along a re-basing `var = name^p`.
pub fn rebase_element(e: &FormalElement, var: &str, name: &str) -> Result<FormalElement> {
    let y = FormalElement::atom(e.prime(), name, e.prime() as i64);
    e.substitute(var, &y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// `t = x - y^{-1}` with `t^p - t = y^{-1}`.
    TTrick,
    /// `z = x - y^{-1}` with `z^{p^2} - z^p = ℘(x)`.
    ZTrick,
}

/// Combines an Artin–Schreier root `x` (`℘(x) = m`) and a radical `y`
/// (`y^p = m^{-1}`) into the element `x - y^{-1}` of value `v(m)/p²`.
pub fn combine_generators(
    tower: &FieldTower,
    x: &str,
    y: &str,
    mode: CombineMode,
    name: &str,
) -> Result<(FieldTower, ExtensionGenerator)> {
    let p = tower.prime;
    let gx = tower.generator(x)?;
    let gy = tower.generator(y)?;
    let (GeneratorKind::ArtinSchreier { rhs: m }, GeneratorKind::PthRoot { rhs: r }) =
        (&gx.kind, &gy.kind)
    else {
        return Err(Error::Incompatible(format!(
            "`{x}` must be Artin–Schreier and `{y}` a p-th root"
        )));
    };
    if m.single_term().is_none() || *r != m.inverse()? {
        return Err(Error::Incompatible(format!(
            "℘({x}) = {m} but {y}^{p} = {r}, expected {}",
            m.inverse().map(|e| e.to_string()).unwrap_or_default()
        )));
    }
    let vm = tower.value_of(m, tower.full())?;
    let value = vm.scale(Q::new(1, (p * p) as i64));
    let y_inv = FormalElement::atom(p, y, -1);
    let definition = FormalElement::atom(p, x, 1).sub(&y_inv);
    let kind = match mode {
        CombineMode::TTrick => GeneratorKind::ArtinSchreier { rhs: y_inv },
        CombineMode::ZTrick => GeneratorKind::Composite {
            power: 2,
            rhs: m.clone(),
        },
    };
    let g = ExtensionGenerator {
        name: name.to_string(),
        kind,
        value,
        definition: Some(definition),
        residue_note: None,
    };
    Ok((tower.push(g.clone())?, g))
}

/// Arithmetic in `R[x]/(x^p - x - m)` with coefficients formal elements; used as a
/// brute-force oracle for traces and norms of Artin–Schreier extensions.
#[derive(Clone, Debug)]
pub struct ArtinSchreierAlgebra {
    p: u32,
    m: FormalElement,
}

impl ArtinSchreierAlgebra {
    pub fn new(m: FormalElement) -> Self {
        Self { p: m.prime(), m }
    }

    pub fn from_generator(g: &ExtensionGenerator) -> Result<Self> {
        match &g.kind {
            GeneratorKind::ArtinSchreier { rhs } => Ok(Self::new(rhs.clone())),
            _ => Err(Error::Incompatible(format!(
                "`{}` is not an Artin–Schreier generator",
                g.name
            ))),
        }
    }

    fn zero(&self) -> Vec<FormalElement> {
        vec![FormalElement::zero(self.p); self.p as usize]
    }

    /// `c·x + b`.
    pub fn linear(&self, c: &FormalElement, b: &FormalElement) -> Vec<FormalElement> {
        let mut v = self.zero();
        v[0] = b.clone();
        if self.p > 1 {
            v[1] = v[1].add(c);
        }
        v
    }

    pub fn mul(&self, a: &[FormalElement], b: &[FormalElement]) -> Vec<FormalElement> {
        let p = self.p as usize;
        let mut wide = vec![FormalElement::zero(self.p); 2 * p - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                wide[i + j] = wide[i + j].add(&ai.mul(bj));
            }
        }
        // x^(p+j) = x^(j+1) + m·x^j
        for d in (p..2 * p - 1).rev() {
            let c = std::mem::replace(&mut wide[d], FormalElement::zero(self.p));
            let j = d - p;
            wide[j + 1] = wide[j + 1].add(&c);
            wide[j] = wide[j].add(&c.mul(&self.m));
        }
        wide.truncate(p);
        wide
    }

    fn constant_part(&self, v: Vec<FormalElement>) -> Result<FormalElement> {
        if v[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::Unsupported(
                "oracle result is not in the base field".into(),
            ));
        }
        Ok(v.into_iter().next().expect("p ≥ 2"))
    }

    /// `Σ_j (x + j)^i`: the trace of `x^i` as a sum over the conjugates.
    pub fn trace_of_power(&self, i: u32) -> Result<FormalElement> {
        let mut total = self.zero();
        for j in 0..self.p {
            let root = self.linear(&FormalElement::one(self.p), &FormalElement::scalar(self.p, j as i64));
            let mut acc = self.linear(&FormalElement::zero(self.p), &FormalElement::one(self.p));
            for _ in 0..i {
                acc = self.mul(&acc, &root);
            }
            for (t, a) in total.iter_mut().zip(acc) {
                *t = t.add(&a);
            }
        }
        self.constant_part(total)
    }

    /// `Π_j (c(x + j) + b)`: the norm of `c·x + b`.
    pub fn norm_of_linear(&self, c: &FormalElement, b: &FormalElement) -> Result<FormalElement> {
        let mut acc = self.linear(&FormalElement::zero(self.p), &FormalElement::one(self.p));
        for j in 0..self.p {
            let shifted = b.add(&c.scale(j as i64));
            acc = self.mul(&acc, &self.linear(c, &shifted));
        }
        self.constant_part(acc)
    }
}

pub fn trace_power_oracle(g: &ExtensionGenerator, i: u32) -> Result<FormalElement> {
    ArtinSchreierAlgebra::from_generator(g)?.trace_of_power(i)
}

/// Norm of `e = c·x + b` where `x` is the generator `g`; `e` must be linear in `x`.
pub fn norm_element_oracle(g: &ExtensionGenerator, e: &FormalElement) -> Result<FormalElement> {
    let alg = ArtinSchreierAlgebra::from_generator(g)?;
    let (c, b) = split_linear(e, &g.name)?;
    alg.norm_of_linear(&c, &b)
}

/// Splits `e` as `c·name + b` with `c`, `b` free of `name`.
pub fn split_linear(e: &FormalElement, name: &str) -> Result<(FormalElement, FormalElement)> {
    let p = e.prime();
    let mut c = FormalElement::zero(p);
    let mut b = FormalElement::zero(p);
    for (m, k) in e.terms() {
        match m.exponent(name) {
            0 => b.add_term(k, m.clone()),
            1 => c.add_term(k, m.filter(|n| n != name)),
            _ => {
                return Err(Error::Unsupported(format!(
                    "{e} is not linear in `{name}`"
                )))
            }
        }
    }
    Ok((c, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower3(p: u32) -> FieldTower {
        FieldTower::laurent(p, 3).unwrap()
    }

    #[test]
    fn value_examples() {
        let t = tower3(3);
        let full = t.full();
        assert_eq!(
            t.value_of(&t.element("a3^-1").unwrap(), full).unwrap(),
            ValueVector::from_ints(&[0, 0, -1])
        );
        assert_eq!(
            t.value_of(&t.element("a1^-2*a2").unwrap(), full).unwrap(),
            ValueVector::from_ints(&[-2, 1, 0])
        );
        assert_eq!(t.value_of(&FormalElement::zero(3), full), Err(Error::ZeroElement));
    }

    #[test]
    fn t_trick_value_and_ambiguity() {
        let p = 3;
        let t = tower3(p);
        let full = t.full();
        let (t, _) = adjoin_artin_schreier(&t, "x", &t.element("a2^-1").unwrap(), full).unwrap();
        let (t, _) = adjoin_pth_root(&t, "y", &t.element("a2").unwrap(), full).unwrap();
        // x and y^{-1} share their leading value; the naive valuation refuses.
        let naive = t.element("x - y^-1").unwrap();
        assert!(matches!(t.value_of(&naive, full), Err(Error::AmbiguousValuation(_))));
        let (t, g) = combine_generators(&t, "x", "y", CombineMode::TTrick, "tt").unwrap();
        let expect = ValueVector::new(vec![q(0, 1), q(-1, 9), q(0, 1)]);
        assert_eq!(g.value, expect);
        assert_eq!(t.value_of(&t.element("tt").unwrap(), full).unwrap(), expect);
        assert_eq!(g.value.order_mod_integers(), (p * p) as i64);
        // t^p - t = y^{-1}, checked through the defining expression x - y^{-1}.
        let def = g.definition.clone().unwrap();
        assert_eq!(t.wp(&def).unwrap(), t.element("y^-1").unwrap());
    }

    #[test]
    fn residue_examples() {
        let t = tower3(3);
        let outer2 = ValuationSpec::depth(2);
        let a1 = t.element("a1").unwrap();
        assert_eq!(t.residue_of(&a1, outer2).unwrap(), a1);
        let e = t.element("1 + a3").unwrap();
        assert_eq!(
            t.residue_of(&e, ValuationSpec::depth(1)).unwrap(),
            FormalElement::one(3)
        );
        let g = FieldTower::new(3, GroundField::char_p(3, &["a", "c"]), &["t"]).unwrap();
        let ac = g.element("a + c").unwrap();
        assert_eq!(g.residue_of(&ac, g.full()).unwrap(), ac);
        assert!(t.residue_of(&t.element("a3").unwrap(), outer2).is_err());
    }

    #[test]
    fn artin_schreier_adjoin() {
        let p = 5;
        let t = tower3(p);
        let (_, g) = adjoin_artin_schreier(&t, "x", &t.element("a3^-1").unwrap(), t.full()).unwrap();
        assert_eq!(g.value, ValueVector::new(vec![q(0, 1), q(0, 1), q(-1, 5)]));
        let (_, g) =
            adjoin_artin_schreier(&t, "x", &t.element("a1^-1").unwrap(), ValuationSpec::depth(2))
                .unwrap();
        assert!(g.residue_note.is_some());
        assert!(g.value.project_outer(2).is_zero());
        let k = FieldTower::new(p, GroundField::char_p(p, &[]), &["d", "c"]).unwrap();
        let (_, g) = adjoin_artin_schreier(&k, "x", &k.element("d^-1").unwrap(), k.full()).unwrap();
        assert_eq!(g.value, ValueVector::new(vec![q(-1, 5), q(0, 1)]));
        assert!(adjoin_artin_schreier(&t, "x", &t.element("a3^-5").unwrap(), t.full()).is_err());
    }

    #[test]
    fn pth_root_adjoin_and_rebase() {
        let p = 3;
        let t = tower3(p);
        let (_, g) = adjoin_pth_root(&t, "y", &t.element("a2").unwrap(), t.full()).unwrap();
        assert_eq!(g.value, ValueVector::new(vec![q(0, 1), q(1, 3), q(0, 1)]));
        assert!(matches!(
            adjoin_pth_root(&t, "y", &t.element("a1^3").unwrap(), t.full()),
            Err(Error::DeclaredPthPower(_))
        ));
        let k = FieldTower::new(p, GroundField::char_p(p, &[]), &["d", "c"]).unwrap();
        let (k2, _) = rebase_pth_root(&k, "d", "y").unwrap();
        assert_eq!(k2.variables, vec!["y".to_string(), "c".to_string()]);
        let e = rebase_element(&k.element("d^-1").unwrap(), "d", "y").unwrap();
        assert_eq!(e, k2.element("y^-3").unwrap());
    }

    #[test]
    fn z_trick() {
        let p = 3;
        let t = FieldTower::laurent(p, 1).unwrap();
        let full = t.full();
        let (t, _) = adjoin_artin_schreier(&t, "x", &t.element("a1^-1").unwrap(), full).unwrap();
        let (t, _) = adjoin_pth_root(&t, "y", &t.element("a1").unwrap(), full).unwrap();
        let (t, z) = combine_generators(&t, "x", "y", CombineMode::ZTrick, "z").unwrap();
        assert_eq!(z.value, ValueVector::new(vec![q(-1, 9)]));
        // z^p = x, hence z^{p²} - z^p = ℘(x) = a1^{-1}.
        let zdef = z.definition.clone().unwrap();
        assert_eq!(t.reduce(&zdef.frobenius()).unwrap(), t.element("x").unwrap());
        let (t2, _) = adjoin_pth_root(&t, "w", &t.element("a1^-1").unwrap(), full).unwrap();
        assert!(combine_generators(&t2, "x", "w", CombineMode::ZTrick, "z2").is_err());
    }

    #[test]
    fn trace_oracle_examples() {
        for p in [2u32, 3, 5, 7] {
            let alg = ArtinSchreierAlgebra::new(FormalElement::atom(p, "m", 1));
            assert_eq!(alg.trace_of_power(p - 1).unwrap(), FormalElement::scalar(p, -1));
            assert_eq!(alg.trace_of_power(0).unwrap(), FormalElement::zero(p));
        }
        // Σ_j (x+j)^2 = 3x^2 + 6x + 5 ≡ 2 (mod 3)
        let alg = ArtinSchreierAlgebra::new(FormalElement::atom(3, "m", 1));
        assert_eq!(alg.trace_of_power(2).unwrap(), FormalElement::scalar(3, 2));
    }

    #[test]
    fn norm_oracle_examples() {
        for p in [2u32, 3, 5] {
            let m = FormalElement::parse(p, "d^-1 + c").unwrap();
            let alg = ArtinSchreierAlgebra::new(m.clone());
            let one = FormalElement::one(p);
            let zero = FormalElement::zero(p);
            assert_eq!(alg.norm_of_linear(&one, &zero).unwrap(), m);
            let lam = FormalElement::scalar(p, 2);
            assert_eq!(alg.norm_of_linear(&zero, &lam).unwrap(), lam.pow(p));
        }
        let p = 3;
        let t = FieldTower::new(p, GroundField::char_p(p, &[]), &["d"]).unwrap();
        let (t, g) = adjoin_artin_schreier(&t, "x", &t.element("2*d^-1").unwrap(), t.full()).unwrap();
        let half_x = t.element("1/2*x").unwrap();
        assert_eq!(norm_element_oracle(&g, &half_x).unwrap(), t.element("d^-1").unwrap());
    }
}
