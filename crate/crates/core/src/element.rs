//! Finite formal sums of monomials with prime-field coefficients.
//!
//! Atoms are names (ground constants, tower variables, adjoined generators); a
//! [`FieldTower`](crate::fieldtower::FieldTower) decides what each name means.
//! Literal syntax: `2*d^-1 + -2*c^-1`, `1/2*x`, `-t^-1`, `0`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fp;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(BTreeMap<String, i64>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn atom(name: &str, exp: i64) -> Self {
        let mut m = Self::default();
        m.set(name, exp);
        m
    }

    pub fn from_pairs(pairs: &[(&str, i64)]) -> Self {
        let mut m = Self::default();
        for &(n, e) in pairs {
            m.set(n, m.exponent(n) + e);
        }
        m
    }

    pub fn exponent(&self, name: &str) -> i64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn set(&mut self, name: &str, exp: i64) {
        if exp == 0 {
            self.0.remove(name);
        } else {
            self.0.insert(name.to_string(), exp);
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (n, e) in other.iter() {
            out.set(n, out.exponent(n) + e);
        }
        out
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial(self.0.iter().map(|(n, &e)| (n.clone(), e * k)).collect())
    }

    pub fn inverse(&self) -> Monomial {
        self.pow(-1)
    }

    /// Drops every atom for which `keep` is false.
    pub fn filter(&self, keep: impl Fn(&str) -> bool) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter(|(n, _)| keep(n))
                .map(|(n, &e)| (n.clone(), e))
                .collect(),
        )
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (n, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FormalElement {
    p: u32,
    terms: BTreeMap<Monomial, u32>,
}

impl FormalElement {
    pub fn zero(p: u32) -> Self {
        Self {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(p: u32, c: i64) -> Self {
        Self::term(p, c, Monomial::one())
    }

    pub fn one(p: u32) -> Self {
        Self::scalar(p, 1)
    }

    pub fn term(p: u32, c: i64, m: Monomial) -> Self {
        let mut e = Self::zero(p);
        e.add_term(fp::reduce(c, p), m);
        e
    }

    pub fn atom(p: u32, name: &str, exp: i64) -> Self {
        Self::term(p, 1, Monomial::atom(name, exp))
    }

    pub fn monomial(p: u32, pairs: &[(&str, i64)]) -> Self {
        Self::term(p, 1, Monomial::from_pairs(pairs))
    }

    pub fn parse(p: u32, s: &str) -> Result<Self> {
        parse_element(p, s)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// `(coefficient, monomial)` if the element is a single term.
    pub fn single_term(&self) -> Option<(u32, &Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, &c)| (c, m))
        } else {
            None
        }
    }

    /// Prime-field constant, if the element is one (zero included).
    pub fn as_scalar(&self) -> Option<u32> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Monomial::one()).copied(),
            _ => None,
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        let mut names: Vec<&str> = self
            .terms
            .keys()
            .flat_map(|m| m.0.keys().map(String::as_str))
            .collect();
        names.sort_unstable();
        names.dedup();
        names.into_iter()
    }

    pub fn add_term(&mut self, c: u32, m: Monomial) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = fp::add(*o.get(), c, self.p);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(c, m.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(self.p as i64 - 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = fp::reduce(k, self.p);
        let mut out = Self::zero(self.p);
        for (m, c) in self.terms() {
            out.add_term(fp::mul(c, k, self.p), m.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.p);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(fp::mul(c1, c2, self.p), m1.mul(m2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.p);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a single nonzero term.
    pub fn inverse(&self) -> Result<Self> {
        let (c, m) = self
            .single_term()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        let ic = fp::inv(c, self.p).expect("nonzero coefficient");
        Ok(Self::term(self.p, ic as i64, m.inverse()))
    }

    /// Integer power (negative allowed) of a single term.
    pub fn powi(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        Ok(self.inverse()?.pow((-k) as u32))
    }

    /// `self^p`, computed termwise (Frobenius is additive in characteristic p).
    pub fn frobenius(&self) -> Self {
        let mut out = Self::zero(self.p);
        for (m, c) in self.terms() {
            out.add_term(c, m.pow(self.p as i64));
        }
        out
    }

    /// Artin–Schreier map `u^p - u` before any tower reduction.
    pub fn wp(&self) -> Self {
        self.frobenius().sub(self)
    }

    /// Replaces `name^k` by `replacement^k` in every term; `replacement` must be a
    /// single term when negative exponents occur.
    pub fn substitute(&self, name: &str, replacement: &FormalElement) -> Result<Self> {
        let mut out = Self::zero(self.p);
        for (m, c) in self.terms() {
            let k = m.exponent(name);
            let rest = Self::term(self.p, c as i64, m.filter(|n| n != name));
            out = out.add(&rest.mul(&replacement.powi(k)?));
        }
        Ok(out)
    }

    /// Keeps only the terms selected by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Monomial) -> Self {
        let mut out = Self::zero(self.p);
        for (m, c) in self.terms() {
            out.add_term(c, f(m));
        }
        out
    }
}

impl fmt::Display for FormalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let (sign, mag) = if c == self.p - 1 && self.p > 2 {
                ("-", 1)
            } else {
                ("", c)
            };
            match (m.is_one(), mag) {
                (true, _) => write!(f, "{sign}{mag}")?,
                (false, 1) => write!(f, "{sign}{m}")?,
                (false, _) => write!(f, "{sign}{mag}*{m}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for FormalElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    offset: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            col: self.offset + self.pos + 1,
            msg: msg.into(),
        })
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let v: i64 = s.parse().or_else(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            return self.err("expected name");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .to_string())
    }
}

/// Parses an element; `offset` shifts reported columns for embedded literals.
pub fn parse_element_at(p: u32, s: &str, offset: usize) -> Result<FormalElement> {
    let mut lx = Lexer {
        src: s.as_bytes(),
        pos: 0,
        offset,
    };
    let mut out = FormalElement::zero(p);
    loop {
        let mut coef: i64 = 1;
        if lx.eat(b'-') {
            coef = -1;
        }
        let mut mono = Monomial::one();
        let mut first = true;
        loop {
            match lx.peek() {
                Some(b) if b.is_ascii_digit() || (b == b'-' && first) => {
                    let num = lx.int()?;
                    let mut c = fp::reduce(num, p);
                    if lx.eat(b'/') {
                        let den = lx.int()?;
                        match fp::inv(fp::reduce(den, p), p) {
                            Some(i) => c = fp::mul(c, i, p),
                            None => return lx.err("denominator divisible by p"),
                        }
                    }
                    coef = fp::mul(fp::reduce(coef, p), c, p) as i64;
                }
                Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                    let name = lx.ident()?;
                    let e = if lx.eat(b'^') { lx.int()? } else { 1 };
                    mono.set(&name, mono.exponent(&name) + e);
                }
                _ => return lx.err("expected coefficient or name"),
            }
            first = false;
            if !lx.eat(b'*') {
                break;
            }
        }
        out.add_term(fp::reduce(coef, p), mono);
        match lx.peek() {
            None => break,
            Some(b'+') => {
                lx.pos += 1;
            }
            Some(b'-') => {}
            Some(_) => return lx.err("unexpected character"),
        }
    }
    Ok(out)
}

pub fn parse_element(p: u32, s: &str) -> Result<FormalElement> {
    parse_element_at(p, s, 0)
}
