//! Arithmetic in the prime field with `p` elements, on plain `u32` residues.

use crate::error::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Canonical residue of an arbitrary integer.
pub fn reduce(k: i64, p: u32) -> u32 {
    k.rem_euclid(p as i64) as u32
}

pub fn add(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn neg(a: u32, p: u32) -> u32 {
    (p - a % p) % p
}

pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv(a: u32, p: u32) -> Option<u32> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow(a, (p - 2) as u64, p))
    }
}

/// Rank over the prime field of the given row vectors (entries already reduced).
pub fn rank(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let iv = inv(m[r][c], p).expect("nonzero pivot");
        for j in 0..cols {
            m[r][j] = mul(m[r][j], iv, p);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let t = mul(f, m[r][j], p);
                    m[i][j] = add(m[i][j], neg(t, p), p);
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(7));
        assert!(!is_prime(1) && !is_prime(9));
    }

    #[test]
    fn inverses() {
        for p in [2, 3, 5, 7] {
            for a in 1..p {
                assert_eq!(mul(a, inv(a, p).unwrap(), p), 1);
            }
        }
        assert_eq!(inv(0, 5), None);
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank(&[vec![1, 0], vec![2, 0]], 3), 1);
        assert_eq!(rank(&[vec![1, 1], vec![1, 2]], 3), 2);
        assert_eq!(rank(&[vec![1, 1], vec![1, 1]], 2), 1);
    }
}
