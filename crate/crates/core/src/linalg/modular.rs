//! Rank lower bounds modulo word-sized primes.
//!
//! After clearing denominators row by row the matrix is integral, so its
//! rank modulo any prime is at most its rank over the rationals. A bound
//! that reaches `min(rows, cols)` is exact: the pivot rows and columns pick
//! out a square minor with nonzero determinant modulo `p`, hence nonzero
//! over the integers.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::eliminate::{eliminate, ModArith, Row};
use super::SparseExactMatrix;

/// Three primes just below 2^31.
pub const DEFAULT_PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorCertificate {
    pub prime: u64,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl MinorCertificate {
    /// Recomputes the rank of the certified minor modulo its prime with a
    /// plain dense elimination.
    pub fn recheck(&self, m: &SparseExactMatrix) -> bool {
        let p = self.prime;
        let ints = m.integer_rows();
        let size = self.rows.len();
        let mut dense: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|&r| {
                self.cols
                    .iter()
                    .map(|&c| {
                        ints[r]
                            .iter()
                            .find(|e| e.0 == c)
                            .map_or(0, |e| reduce_mod(&e.1, p))
                    })
                    .collect()
            })
            .collect();
        for col in 0..size {
            let Some(pr) = (col..size).find(|&r| dense[r][col] != 0) else {
                return false;
            };
            dense.swap(col, pr);
            let inv = pow_mod(dense[col][col], p - 2, p);
            for r in col + 1..size {
                let f = mul_mod(dense[r][col], inv, p);
                if f == 0 {
                    continue;
                }
                let (head, tail) = dense.split_at_mut(r.max(col));
                let (pivot, target) = if r > col { (&head[col], &mut tail[0]) } else { (&tail[0], &mut head[r]) };
                for (t, &v) in target[col..size].iter_mut().zip(&pivot[col..size]) {
                    *t = (*t + p - mul_mod(f, v, p)) % p;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultimodularRank {
    /// Largest rank seen over the primes tried; never above the exact rank.
    pub bound: usize,
    pub per_prime: Vec<(u64, usize)>,
    /// Set only when the bound is proven equal to the exact rank.
    pub confirmed: bool,
    pub minor: Option<MinorCertificate>,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = r.to_i64().expect("residue fits");
    if r < 0 {
        (r + p as i64) as u64
    } else {
        r as u64
    }
}

pub fn rank_multimodular(m: &SparseExactMatrix, primes: &[u64]) -> MultimodularRank {
    let ints = m.integer_rows();
    let mut per_prime = Vec::with_capacity(primes.len());
    let mut best: Option<(usize, MinorCertificate)> = None;
    for &p in primes {
        let rows: Vec<Row<u64>> = ints
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, v)| (*c, reduce_mod(v, p)))
                    .filter(|e| e.1 != 0)
                    .collect()
            })
            .collect();
        let ech = eliminate(&ModArith { p }, rows, m.cols()).expect("modular arithmetic never overflows");
        let rank = ech.pivots.len();
        per_prime.push((p, rank));
        if best.as_ref().is_none_or(|(r, _)| rank > *r) {
            let mut pr: Vec<usize> = ech.pivots.iter().map(|x| x.0).collect();
            let mut pc: Vec<usize> = ech.pivots.iter().map(|x| x.1).collect();
            pr.sort_unstable();
            pc.sort_unstable();
            best = Some((
                rank,
                MinorCertificate {
                    prime: p,
                    rows: pr,
                    cols: pc,
                },
            ));
        }
    }
    let (bound, minor) = match best {
        Some((r, cert)) => (r, Some(cert)),
        None => (0, None),
    };
    let full = m.rows().min(m.cols());
    let confirmed = bound == full;
    MultimodularRank {
        bound,
        per_prime,
        confirmed,
        minor: if confirmed { minor } else { None },
    }
}
