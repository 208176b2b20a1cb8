//! Exact value vectors and lattices between `Z^n` and `(1/m) Z^n`.
//!
//! Coordinate `i` of a [`ValueVector`] belongs to the tower variable `alpha_{i+1}`
//! (innermost first). Comparison is lexicographic starting from the *last*
//! coordinate, which is how the iterated Laurent valuation orders values.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fp;

/// Exact rational scalar.
pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ValueVector(Vec<Q>);

impl ValueVector {
    pub fn new(coords: Vec<Q>) -> Self {
        Self(coords)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![Q::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = Q::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Self(xs.iter().map(|&x| Q::from_integer(x)).collect())
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Strictly below zero in the right-to-left order.
    pub fn is_negative(&self) -> bool {
        self.lex_cmp(&Self::zero(self.len())) == Ordering::Less
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Ratio::is_integer)
    }

    pub fn scale(&self, s: Q) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    /// Last `k` coordinates: the value under the coarser valuation that only
    /// sees the `k` outermost variables.
    pub fn project_outer(&self, k: usize) -> Self {
        Self(self.0[self.0.len() - k..].to_vec())
    }

    /// First `k` coordinates.
    pub fn project_inner(&self, k: usize) -> Self {
        Self(self.0[..k].to_vec())
    }

    /// Right-to-left lexicographic comparison; panics on a length mismatch.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.len(), other.len(), "value vectors of different length");
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Order of the class of `self` in `Q^n / Z^n`.
    pub fn order_mod_integers(&self) -> i64 {
        self.0.iter().fold(1, |acc, c| acc.lcm(c.denom()))
    }
}

pub fn lex_compare(u: &ValueVector, v: &ValueVector) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(u.len(), v.len()));
    }
    Ok(u.lex_cmp(v))
}

impl PartialOrd for ValueVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValueVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.lex_cmp(other))
    }
}

impl Add for &ValueVector {
    type Output = ValueVector;
    fn add(self, rhs: &ValueVector) -> ValueVector {
        assert_eq!(self.len(), rhs.len());
        ValueVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ValueVector {
    type Output = ValueVector;
    fn sub(self, rhs: &ValueVector) -> ValueVector {
        assert_eq!(self.len(), rhs.len());
        ValueVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ValueVector {
    type Output = ValueVector;
    fn neg(self) -> ValueVector {
        ValueVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<i64> for &ValueVector {
    type Output = ValueVector;
    fn mul(self, k: i64) -> ValueVector {
        self.scale(Q::from_integer(k))
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for ValueVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        strs.serialize(s)
    }
}

/// A full-rank subgroup of `Q^n`, stored in row-echelon Hermite form.
///
/// Row `i` vanishes before coordinate `i`, has a positive pivot at `i`, and every
/// entry above a pivot lies in `[0, pivot)`. The form is unique for the subgroup.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub struct Lattice {
    basis: Vec<ValueVector>,
}

fn lcm_denoms<'a>(vs: impl IntoIterator<Item = &'a ValueVector>) -> i64 {
    vs.into_iter()
        .flat_map(|v| v.0.iter())
        .fold(1i64, |acc, c| acc.lcm(c.denom()))
}

/// Hermite form of the integer row span; `None` if the span is not full rank.
fn hermite(mut rows: Vec<Vec<i128>>, n: usize) -> Option<Vec<Vec<i128>>> {
    let mut out: Vec<Vec<i128>> = Vec::with_capacity(n);
    for c in 0..n {
        loop {
            let live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            if live.len() <= 1 {
                break;
            }
            let piv = *live.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            let prow = rows[piv].clone();
            for &i in &live {
                if i != piv {
                    let f = rows[i][c].div_euclid(prow[c]);
                    for j in 0..n {
                        rows[i][j] -= f * prow[j];
                    }
                }
            }
        }
        let i = rows.iter().position(|r| r[c] != 0)?;
        let mut r = rows.swap_remove(i);
        if r[c] < 0 {
            r.iter_mut().for_each(|x| *x = -*x);
        }
        out.push(r);
    }
    for i in 0..n {
        for k in 0..i {
            let f = out[k][i].div_euclid(out[i][i]);
            if f != 0 {
                let ri = out[i].clone();
                for j in 0..n {
                    out[k][j] -= f * ri[j];
                }
            }
        }
    }
    Some(out)
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_diagonal() {
            let d: Vec<String> = (0..self.dim()).map(|i| self.basis[i].0[i].to_string()).collect();
            return write!(f, "diag({})", d.join(","));
        }
        let b: Vec<String> = self.basis.iter().map(ToString::to_string).collect();
        write!(f, "<{}>", b.join(", "))
    }
}

impl Lattice {
    /// `Z^n`.
    pub fn integer(n: usize) -> Self {
        Self {
            basis: (0..n).map(|i| ValueVector::unit(n, i)).collect(),
        }
    }

    /// `diag(1/d_1, ..., 1/d_n)`.
    pub fn diagonal(denoms: &[i64]) -> Self {
        let n = denoms.len();
        Self {
            basis: (0..n)
                .map(|i| ValueVector::unit(n, i).scale(q(1, denoms[i])))
                .collect(),
        }
    }

    /// Subgroup generated by `gens` alone; must have full rank `n`.
    pub fn from_generators(n: usize, gens: &[ValueVector]) -> Result<Self> {
        for g in gens {
            if g.len() != n {
                return Err(Error::DimensionMismatch(g.len(), n));
            }
        }
        let den = lcm_denoms(gens);
        let rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| {
                g.0.iter()
                    .map(|c| (c * Q::from_integer(den)).to_integer() as i128)
                    .collect()
            })
            .collect();
        let h = hermite(rows, n)
            .ok_or_else(|| Error::Unsupported("generators do not span a full-rank lattice".into()))?;
        let basis = h
            .into_iter()
            .map(|r| {
                ValueVector(
                    r.into_iter()
                        .map(|x| Q::new(i64::try_from(x).expect("lattice entry overflow"), den))
                        .collect(),
                )
            })
            .collect();
        Ok(Self { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ValueVector] {
        &self.basis
    }

    /// Minimal `m` with `m L ⊆ Z^n`.
    pub fn denominator(&self) -> i64 {
        lcm_denoms(&self.basis)
    }

    /// Covolume: product of the pivots.
    pub fn determinant(&self) -> Q {
        (0..self.dim()).map(|i| self.basis[i].0[i]).product()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || self.basis[i].0[j].is_zero()))
    }

    /// Integer coordinates of `v` in the echelon basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &ValueVector) -> Option<Vec<i64>> {
        if v.len() != self.dim() {
            return None;
        }
        let mut rest = v.clone();
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let c = rest.0[i] / self.basis[i].0[i];
            if !c.is_integer() {
                return None;
            }
            let c = c.to_integer();
            rest = &rest - &(&self.basis[i] * c);
            out.push(c);
        }
        Some(out)
    }

    pub fn contains(&self, v: &ValueVector) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// The dual lattice `{y : y·x ∈ Z for all x ∈ L}`.
    fn dual(&self) -> Lattice {
        let n = self.dim();
        // Columns of B^{-1} are a basis of the dual.
        let mut inv = vec![vec![Q::zero(); n]; n];
        for col in 0..n {
            // Solve B^T-free: rows of B are basis vectors; solve x B = e_col.
            let mut x = vec![Q::zero(); n];
            for i in 0..n {
                let mut s = if i == col { Q::one() } else { Q::zero() };
                for k in 0..i {
                    s -= x[k] * self.basis[k].0[i];
                }
                x[i] = s / self.basis[i].0[i];
            }
            inv[col] = x;
        }
        // inv[col] is the coefficient row with sum_k inv[col][k] b_k = e_col, so the
        // matrix C with C_{col,k} = inv[col][k] satisfies C B = I and the dual basis
        // vectors are the columns of C.
        let gens: Vec<ValueVector> = (0..n)
            .map(|k| ValueVector((0..n).map(|col| inv[col][k]).collect()))
            .collect();
        Lattice::from_generators(n, &gens).expect("dual of full-rank lattice")
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let gens: Vec<ValueVector> = self.basis.iter().chain(&other.basis).cloned().collect();
        Lattice::from_generators(self.dim(), &gens)
    }
}

/// Canonical lattice generated by `gens` together with `Z^n`.
pub fn lattice_canonicalize(n: usize, generators: &[ValueVector]) -> Result<Lattice> {
    let mut gens: Vec<ValueVector> = (0..n).map(|i| ValueVector::unit(n, i)).collect();
    gens.extend_from_slice(generators);
    Lattice::from_generators(n, &gens)
}

pub fn lattice_intersect(l1: &Lattice, l2: &Lattice) -> Result<Lattice> {
    if l1.dim() != l2.dim() {
        return Err(Error::DimensionMismatch(l1.dim(), l2.dim()));
    }
    Ok(l1.dual().sum(&l2.dual())?.dual())
}

/// `|L / M|`; requires `M ⊆ L`.
pub fn lattice_index(l: &Lattice, m: &Lattice) -> Result<u64> {
    if l.dim() != m.dim() {
        return Err(Error::DimensionMismatch(l.dim(), m.dim()));
    }
    if !l.contains_lattice(m) {
        return Err(Error::NotContained(format!("{m:?} is not a sublattice")));
    }
    let r = m.determinant() / l.determinant();
    debug_assert!(r.is_integer() && r.is_positive());
    Ok(r.to_integer() as u64)
}

/// Image of `span(S)` in `L / pL`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModPImage {
    pub ambient: Lattice,
    pub prime: u32,
    pub rank: usize,
    /// Coordinates (in the ambient echelon basis, reduced mod p) of the generators.
    pub images: Vec<Vec<u32>>,
}

pub fn mod_p_image(s: &[ValueVector], l: &Lattice, p: u32) -> Result<ModPImage> {
    fp::check_prime(p)?;
    let mut images = Vec::with_capacity(s.len());
    for v in s {
        let c = l
            .coordinates(v)
            .ok_or_else(|| Error::NotContained(format!("{v} not in lattice")))?;
        images.push(c.into_iter().map(|x| fp::reduce(x, p)).collect::<Vec<_>>());
    }
    let rank = if images.is_empty() { 0 } else { fp::rank(&images, p) };
    Ok(ModPImage {
        ambient: l.clone(),
        prime: p,
        rank,
        images,
    })
}

pub fn modp_image_rank(s: &[ValueVector], l: &Lattice, p: u32) -> Result<usize> {
    Ok(mod_p_image(s, l, p)?.rank)
}

/// Candidate budget for [`enumerate_overlattices`].
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// All `L` with `Z^n ⊆ L` and `[L : Z^n]` dividing `max_index` (a power of `p`),
/// canonically sorted.
pub fn enumerate_overlattices(n: usize, p: u32, max_index: u64) -> Result<Vec<Lattice>> {
    fp::check_prime(p)?;
    let mut k = 0u32;
    let mut m = max_index;
    while m > 1 {
        if !m.is_multiple_of(p as u64) {
            return Err(Error::InvalidParameters(format!(
                "{max_index} is not a power of {p}"
            )));
        }
        m /= p as u64;
        k += 1;
    }
    let work = (p as u128)
        .checked_pow(k * n as u32)
        .unwrap_or(u128::MAX);
    if work > ENUMERATION_LIMIT {
        return Err(Error::EnumerationBound(work, ENUMERATION_LIMIT));
    }
    let base = Lattice::integer(n);
    let mut seen: BTreeSet<Lattice> = BTreeSet::new();
    seen.insert(base.clone());
    let mut queue = VecDeque::from([(base, 1u64)]);
    while let Some((l, idx)) = queue.pop_front() {
        if idx * p as u64 > max_index {
            continue;
        }
        // Every step of index p adds some g with pg ∈ L, i.e. g ∈ (1/p)L.
        let steps: Vec<ValueVector> = l.basis.iter().map(|b| b.scale(q(1, p as i64))).collect();
        let total = (p as usize).pow(n as u32);
        for code in 1..total {
            let mut g = ValueVector::zero(n);
            let mut c = code;
            for s in &steps {
                let digit = (c % p as usize) as i64;
                c /= p as usize;
                if digit != 0 {
                    g = &g + &(s * digit);
                }
            }
            if l.contains(&g) {
                continue;
            }
            let bigger = l.sum(&lattice_canonicalize(n, &[g])?)?;
            if seen.insert(bigger.clone()) {
                queue.push_back((bigger, idx * p as u64));
            }
        }
    }
    Ok(seen.into_iter().collect())
}
