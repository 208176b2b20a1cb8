use crate::brauer::{wedge_class_over, SymbolSum, SymbolTerm};
use crate::element::FormalElement;
use crate::error::{Error, Result};
use crate::fieldtower::{FieldTower, GroundField};
use crate::valgroup::{enumerate_overlattices, modp_image_rank, Lattice, ValueVector};

use super::{Outcome, Verdict};

fn power_symbol(p: u32, a: usize, b: usize) -> Result<SymbolSum> {
    let s = SymbolTerm::power(
        FormalElement::atom(p, &format!("a{a}"), 1),
        FormalElement::atom(p, &format!("a{b}"), 1),
    )?;
    Ok(SymbolSum::from_terms(p, vec![s]))
}

/// First pair `(α_a, α_b)` whose wedge class survives over `lattice`.
fn surviving_pair(tower: &FieldTower, lattice: &Lattice) -> Result<Option<(usize, usize)>> {
    let n = tower.n();
    for a in 1..=n {
        for b in a + 1..=n {
            if !wedge_class_over(&power_symbol(tower.prime, a, b)?, tower, lattice)?.is_zero() {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Lattice model of the characteristic-not-`p` bound, over a tame, totally
/// ramified extension with algebraically closed residue field.
pub fn verify_char_not_p(n: usize, p: u32) -> Result<Verdict> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("n = {n} < 2")));
    }
    let mut v = Verdict::new("char-not-p").param("n", n).param("p", p);
    v.info(
        "model",
        "a degree p^(n-2) tame extension with algebraically closed residue is defectless and \
         totally ramified, so it is described by its value lattice",
    );
    let tower = FieldTower::new(
        p,
        GroundField::algebraically_closed(0),
        &(1..=n).map(|i| format!("a{i}")).collect::<Vec<_>>().iter().map(String::as_str).collect::<Vec<_>>(),
    )?;
    let units: Vec<ValueVector> = (0..n).map(|i| ValueVector::unit(n, i)).collect();
    let bound = (p as u64).pow(n as u32 - 2);
    let lattices = enumerate_overlattices(n, p, bound)?;
    let mut min_rank = usize::MAX;
    let mut all_survive = true;
    for l in &lattices {
        let r = modp_image_rank(&units, l, p)?;
        min_rank = min_rank.min(r);
        all_survive &= surviving_pair(&tower, l)?.is_some();
    }
    v.put("overlattices", lattices.len());
    v.put("max_index", bound);
    v.put("min_image_rank", min_rank);
    v.step(
        "lower",
        format!("{} lattices of index ≤ {bound}: Z^n image rank ≥ {min_rank} in Λ/pΛ", lattices.len()),
        min_rank >= 2,
    );
    v.step("lower_wedge", "a symbol (α_a, α_b) survives over every such lattice", all_survive);

    let mut denoms = vec![p as i64; n - 1];
    denoms.push(1);
    let star = Lattice::diagonal(&denoms);
    let r = modp_image_rank(&units, &star, p)?;
    let survivor = surviving_pair(&tower, &star)?;
    v.put("upper_lattice", star.to_string());
    v.put("upper_image_rank", r);
    v.step("upper", format!("over {star}: Z^n image rank {r} ≤ 1"), r <= 1);
    v.step(
        "upper_wedge",
        match survivor {
            Some((a, b)) => format!("(α_{a}, α_{b}) survives"),
            None => "every (α_a, α_b) is killed, so all wedge classes vanish".into(),
        },
        survivor.is_none(),
    );
    Ok(v.conclude(Outcome::Refuted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        for (n, p) in [(2, 3), (3, 2), (3, 3), (4, 2)] {
            let v = verify_char_not_p(n, p).unwrap();
            assert!(v.is_verified(), "{n} {p}: {:#?}", v.trace);
        }
    }
}
