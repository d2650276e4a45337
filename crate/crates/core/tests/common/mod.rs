//! Shared fixtures: a dense brute-force cohomology oracle that shares no
//! code with the library beyond reading generator data, and a catalog of
//! small models.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use sullivan::cohomology::{tensor_product_with, RenamePolicy};
use sullivan::lie::{chevalley_eilenberg, dual_homotopy_lie, u_n_presentation};
use sullivan::models::{borel_twist, degree_shift, split_at_k, torus_model, upper_tri_model, xr_model};
use sullivan::Cdga;

pub type Q = BigRational;

/// A word is a sorted list of generator indices, powers repeated.
type Word = Vec<usize>;

pub struct Oracle {
    degrees: Vec<u32>,
    /// `d` of each generator as (coefficient, word) pairs.
    d: Vec<Vec<(Q, Word)>>,
    top: u32,
}

impl Oracle {
    pub fn new(c: &Cdga) -> Self {
        let sig = c.signature();
        let degrees: Vec<u32> = sig.generators().iter().map(|g| g.degree()).collect();
        let d = c
            .differential()
            .iter()
            .map(|e| {
                e.terms()
                    .iter()
                    .map(|(m, q)| {
                        let word: Word = m
                            .exponents()
                            .into_iter()
                            .flat_map(|(i, e)| std::iter::repeat_n(i, e as usize))
                            .collect();
                        (q.clone(), word)
                    })
                    .collect()
            })
            .collect();
        let top = if degrees.iter().all(|d| d % 2 == 1) {
            degrees.iter().sum()
        } else {
            c.truncation().expect("truncated") - 1
        };
        Oracle { degrees, d, top }
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    /// Sorted words of total degree `n`.
    pub fn basis(&self, n: u32) -> Vec<Word> {
        let mut out = Vec::new();
        self.extend(0, n, &mut Vec::new(), &mut out);
        out
    }

    fn extend(&self, from: usize, left: u32, cur: &mut Word, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for g in from..self.degrees.len() {
            let dg = self.degrees[g];
            if dg > left {
                continue;
            }
            // odd letters at most once, so the next letter must differ
            let next = if dg % 2 == 1 { g + 1 } else { g };
            cur.push(g);
            self.extend(next, left - dg, cur, out);
            cur.pop();
        }
    }

    fn deg(&self, w: &[usize]) -> u32 {
        w.iter().map(|&g| self.degrees[g]).sum()
    }

    /// Bubble-sorts a word, tracking the Koszul sign. `None` when an odd
    /// letter repeats.
    fn normalize(&self, mut w: Word) -> Option<(bool, Word)> {
        let mut negative = false;
        let n = w.len();
        for i in 0..n {
            for j in 0..n - 1 - i {
                if w[j] > w[j + 1] {
                    if self.degrees[w[j]] % 2 == 1 && self.degrees[w[j + 1]] % 2 == 1 {
                        negative = !negative;
                    }
                    w.swap(j, j + 1);
                }
            }
        }
        if w.windows(2).any(|p| p[0] == p[1] && self.degrees[p[0]] % 2 == 1) {
            return None;
        }
        Some((negative, w))
    }

    /// `d` of a word by the Leibniz rule, letter by letter.
    pub fn d_word(&self, w: &[usize]) -> HashMap<Word, Q> {
        let mut out: HashMap<Word, Q> = HashMap::new();
        for p in 0..w.len() {
            let before_odd = self.deg(&w[..p]) % 2 == 1;
            for (c, image) in &self.d[w[p]] {
                let mut word = w[..p].to_vec();
                word.extend(image);
                word.extend(&w[p + 1..]);
                if let Some((neg, sorted)) = self.normalize(word) {
                    let mut c = c.clone();
                    if neg != before_odd {
                        c = -c;
                    }
                    *out.entry(sorted).or_insert_with(Q::zero) += c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Dense matrix of `d: C^n → C^{n+1}`, rows indexed by the target.
    pub fn matrix(&self, n: u32) -> Vec<Vec<Q>> {
        let src = self.basis(n);
        let tgt = self.basis(n + 1);
        let index: HashMap<&Word, usize> = tgt.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut m = vec![vec![Q::zero(); src.len()]; tgt.len()];
        for (j, w) in src.iter().enumerate() {
            for (img, c) in self.d_word(w) {
                m[index[&img]][j] = c;
            }
        }
        m
    }

    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.top).map(|n| dense_rank(self.matrix(n))).collect();
        (0..=self.top)
            .map(|n| {
                let dim = self.basis(n).len();
                let inc = if n == 0 { 0 } else { ranks[n as usize - 1] };
                dim - ranks[n as usize] - inc
            })
            .collect()
    }
}

pub fn dense_rank(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, v) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn dense_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn one() -> Q {
    Q::one()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Every named constructor output with at most `max_gens` generators.
pub fn catalog(max_gens: usize) -> Vec<(String, Cdga)> {
    let mut out: Vec<(String, Cdga)> = Vec::new();
    for r in 0..=8 {
        out.push((format!("xr:{r}"), xr_model(r)));
    }
    for n in 2..=5 {
        out.push((format!("upper-tri:{n}"), upper_tri_model(n)));
    }
    for k in 1..=8 {
        out.push((format!("torus:{k}"), torus_model(k)));
    }
    for n in 3..=6 {
        for k in 2..=n {
            let f = split_at_k(n, k).unwrap();
            out.push((format!("split-base:{n},{k}"), f.base));
            out.push((format!("split:{n},{k}"), f.fiber));
        }
    }
    for n in 2..=4 {
        for kappa in 0..=2 {
            out.push((format!("shift:{n},{kappa}"), degree_shift(&upper_tri_model(n), kappa).unwrap()));
        }
    }
    for r in 1..=5 {
        let x = format!("x{r}");
        out.push((format!("borel:{r}"), borel_twist(&xr_model(r), &x, "t", None).unwrap()));
    }
    out.push((
        "borel:u3".into(),
        borel_twist(&upper_tri_model(3), "x_3_1", "t", Some(6)).unwrap(),
    ));
    for n in 2..=4 {
        let l = u_n_presentation(n).unwrap();
        out.push((format!("ce-dual:{n}"), chevalley_eilenberg(&dual_homotopy_lie(&chevalley_eilenberg(&l).unwrap()).unwrap()).unwrap()));
    }
    let suffix = RenamePolicy::SuffixRight("_2".into());
    out.push(("xr:1*torus:2".into(), tensor_product_with(&xr_model(1), &torus_model(2), &suffix).unwrap()));
    out.push(("xr:2*xr:1".into(), tensor_product_with(&xr_model(2), &xr_model(1), &suffix).unwrap()));
    out.retain(|(_, c)| c.signature().len() <= max_gens);
    out
}
