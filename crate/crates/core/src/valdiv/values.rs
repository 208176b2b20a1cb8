use crate::brauer::{SymbolKind, SymbolSum, SymbolTerm};
use crate::error::{Error, Result};
use crate::fieldtower::{FieldTower, ValuationSpec};
use crate::valgroup::{lattice_canonicalize, lattice_index, q, Lattice, ValueVector};

use super::residue::certify_residue_field;
use super::{
    AlgebraValueData, CombinedValue, GeneratorValue, ResidueDescriptor, ResidueRoot, RootKind,
    SymbolValues,
};

fn in_p_lattice(v: &ValueVector, p: u32) -> bool {
    v.scale(q(1, p as i64)).is_integral()
}

/// Values of `x` (`x^p - x = a`) and `y` (`y^p = b`) for `[a, b)`.
pub fn symbol_values(tower: &FieldTower, s: &SymbolTerm, spec: ValuationSpec) -> Result<SymbolValues> {
    if s.kind != SymbolKind::ArtinSchreier {
        return Err(Error::Unsupported(format!("{s} is not an Artin–Schreier symbol")));
    }
    let p = tower.prime;
    let va = tower.value_of(&s.slot1, spec)?;
    let x = if va.is_zero() {
        GeneratorValue::Residual(tower.residue_of(&s.slot1, spec)?)
    } else if va.is_negative() && !in_p_lattice(&va, p) {
        GeneratorValue::Ramified(va.scale(q(1, p as i64)))
    } else {
        return Err(Error::Unsupported(format!(
            "first slot of {s} has value {va}: positive or in pΓ"
        )));
    };
    let vb = tower.value_of(&s.slot2, spec)?;
    let y = if vb.is_zero() {
        GeneratorValue::Residual(tower.residue_of(&s.slot2, spec)?)
    } else if !in_p_lattice(&vb, p) {
        GeneratorValue::Ramified(vb.scale(q(1, p as i64)))
    } else {
        return Err(Error::Unsupported(format!(
            "second slot of {s} has value {vb} in pΓ"
        )));
    };
    Ok(SymbolValues {
        symbol: s.clone(),
        x,
        y,
    })
}

/// The symbols of a sum as a tensor list, multiplicities expanded.
pub(crate) fn tensor_factors(a: &SymbolSum) -> Vec<SymbolTerm> {
    a.terms()
        .iter()
        .flat_map(|(k, t)| std::iter::repeat_n(t.clone(), *k as usize))
        .collect()
}

pub fn generator_value_data(
    tower: &FieldTower,
    a: &SymbolSum,
    spec: ValuationSpec,
) -> Result<Vec<SymbolValues>> {
    tensor_factors(a)
        .iter()
        .map(|s| symbol_values(tower, s, spec))
        .collect()
}

/// `x_l - y_j^{-1}` for commuting `x_l`, `y_j` from different factors with
/// `℘(x_l) = y_j^{-p}`: an Artin–Schreier generator over `F(y_j)` of value `v(a_l)/p²`.
fn combined_values(gens: &[SymbolValues], tower: &FieldTower, spec: ValuationSpec) -> Result<Vec<CombinedValue>> {
    let p = tower.prime as i64;
    let mut out = Vec::new();
    for (j, gj) in gens.iter().enumerate() {
        if gj.y.ramified().is_none() {
            continue;
        }
        let inv = gj.symbol.slot2.inverse()?;
        for (l, gl) in gens.iter().enumerate() {
            if l == j || gl.x.ramified().is_none() || gl.symbol.slot1 != inv {
                continue;
            }
            let vm = tower.value_of(&gl.symbol.slot1, spec)?;
            out.push(CombinedValue {
                source: format!("x{} - y{}^-1", l + 1, j + 1),
                value: vm.scale(q(1, p * p)),
            });
        }
    }
    Ok(out)
}

fn residue_descriptor(gens: &[SymbolValues], tower: &FieldTower, spec: ValuationSpec) -> Result<ResidueDescriptor> {
    let mut roots = Vec::new();
    let mut symbols = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        match (&g.x, &g.y) {
            (GeneratorValue::Residual(a), GeneratorValue::Residual(b)) => {
                symbols.push(SymbolTerm::artin_schreier(a.clone(), b.clone())?);
            }
            (GeneratorValue::Residual(a), GeneratorValue::Ramified(_)) => roots.push(ResidueRoot {
                kind: RootKind::ArtinSchreier,
                rhs: a.clone(),
                source: format!("x{}", i + 1),
            }),
            (GeneratorValue::Ramified(_), GeneratorValue::Residual(b)) => roots.push(ResidueRoot {
                kind: RootKind::PthRoot,
                rhs: b.clone(),
                source: format!("y{}", i + 1),
            }),
            _ => {}
        }
    }
    Ok(ResidueDescriptor {
        tower: tower.residue_tower(spec)?,
        roots,
        symbols,
    })
}

/// Value group generated by `Γ_F`, the generator values and the combined values,
/// with the residue bookkeeping and the fundamental-inequality flags.
pub fn algebra_value_group(tower: &FieldTower, a: &SymbolSum, spec: ValuationSpec) -> Result<AlgebraValueData> {
    let p = tower.prime as u64;
    let gens = generator_value_data(tower, a, spec)?;
    let combined = combined_values(&gens, tower, spec)?;
    let mut values: Vec<ValueVector> = Vec::new();
    for g in &gens {
        values.extend(g.x.ramified().cloned());
        values.extend(g.y.ramified().cloned());
    }
    values.extend(combined.iter().map(|c| c.value.clone()));
    let d = spec.depth;
    let value_group = lattice_canonicalize(d, &values)?;
    let index = lattice_index(&value_group, &Lattice::integer(d))?;
    let residue = residue_descriptor(&gens, tower, spec)?;
    let residue_certificate = certify_residue_field(&residue.tower, &residue.roots);
    let residue_degree = residue_certificate
        .is_certified()
        .then(|| residue.expected_degree());
    let dim = p.pow(2 * gens.len() as u32);
    if let Some(r) = residue_degree {
        if index * r > dim {
            return Err(Error::Unsupported(format!(
                "index {index} times residue degree {r} exceeds dimension {dim}"
            )));
        }
    }
    Ok(AlgebraValueData {
        algebra: a.clone(),
        spec,
        generators: gens,
        combined,
        value_group,
        index,
        totally_ramified: index == dim,
        defectless: residue_degree.map_or(index == dim, |r| index * r == dim),
        residue,
        residue_degree,
        residue_certificate,
        dim,
    })
}
