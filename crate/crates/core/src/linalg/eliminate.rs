//! Sparse row elimination shared by the exact and the modular paths.
//!
//! Rows are kept primitive (content divided out) when working over the
//! integers, so entries stay small on the ±1-heavy cochain matrices. The
//! pivot is taken from a shortest active row; inside that row the column
//! with the smallest Markowitz cost `(row_len - 1) * (col_count - 1)` wins,
//! ties going to the lowest column index. Every choice depends only on the
//! matrix contents.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub(crate) type Row<E> = Vec<(usize, E)>;

/// Arithmetic used during elimination. `combine` returns `None` on
/// overflow, which makes the caller retry with a wider type.
pub(crate) trait Arith {
    type E: Clone;

    fn is_zero(&self, e: &Self::E) -> bool;

    /// Multipliers `(u, v)` such that `u * target - v * pivot_row` clears
    /// the pivot column, given pivot entry `p` and target entry `t`.
    fn multipliers(&self, p: &Self::E, t: &Self::E) -> (Self::E, Self::E);

    /// `u * a - v * b`.
    fn combine(&self, u: &Self::E, a: &Self::E, v: &Self::E, b: &Self::E) -> Option<Self::E>;

    /// `u * a`.
    fn mul(&self, u: &Self::E, a: &Self::E) -> Option<Self::E>;

    /// `-(v * b)`.
    fn neg_mul(&self, v: &Self::E, b: &Self::E) -> Option<Self::E>;

    /// Optional content removal after an update.
    fn normalize(&self, _row: &mut Row<Self::E>) {}
}

pub(crate) struct BigArith;

impl Arith for BigArith {
    type E = BigInt;

    fn is_zero(&self, e: &BigInt) -> bool {
        e.is_zero()
    }

    fn multipliers(&self, p: &BigInt, t: &BigInt) -> (BigInt, BigInt) {
        let g = p.gcd(t);
        (p / &g, t / &g)
    }

    fn combine(&self, u: &BigInt, a: &BigInt, v: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(u * a - v * b)
    }

    fn mul(&self, u: &BigInt, a: &BigInt) -> Option<BigInt> {
        Some(u * a)
    }

    fn neg_mul(&self, v: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(-(v * b))
    }

    fn normalize(&self, row: &mut Row<BigInt>) {
        let mut g = BigInt::zero();
        for (_, e) in row.iter() {
            g = g.gcd(e);
            if g.is_one() {
                return;
            }
        }
        if !g.is_zero() && !g.is_one() {
            for (_, e) in row.iter_mut() {
                *e = &*e / &g;
            }
        }
    }
}

pub(crate) struct SmallArith;

impl Arith for SmallArith {
    type E = i64;

    fn is_zero(&self, e: &i64) -> bool {
        *e == 0
    }

    fn multipliers(&self, p: &i64, t: &i64) -> (i64, i64) {
        let g = p.gcd(t);
        (p / g, t / g)
    }

    fn combine(&self, u: &i64, a: &i64, v: &i64, b: &i64) -> Option<i64> {
        u.checked_mul(*a)?.checked_sub(v.checked_mul(*b)?)
    }

    fn mul(&self, u: &i64, a: &i64) -> Option<i64> {
        u.checked_mul(*a)
    }

    fn neg_mul(&self, v: &i64, b: &i64) -> Option<i64> {
        v.checked_mul(*b)?.checked_neg()
    }

    fn normalize(&self, row: &mut Row<i64>) {
        let mut g = 0i64;
        for (_, e) in row.iter() {
            g = g.gcd(e);
            if g == 1 {
                return;
            }
        }
        if g > 1 {
            for (_, e) in row.iter_mut() {
                *e /= g;
            }
        }
    }
}

pub(crate) struct ModArith {
    pub p: u64,
}

impl ModArith {
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }
}

impl Arith for ModArith {
    type E = u64;

    fn is_zero(&self, e: &u64) -> bool {
        *e == 0
    }

    fn multipliers(&self, p: &u64, t: &u64) -> (u64, u64) {
        (*p, *t)
    }

    fn combine(&self, u: &u64, a: &u64, v: &u64, b: &u64) -> Option<u64> {
        let x = self.mulmod(*u, *a);
        let y = self.mulmod(*v, *b);
        Some((x + self.p - y) % self.p)
    }

    fn mul(&self, u: &u64, a: &u64) -> Option<u64> {
        Some(self.mulmod(*u, *a))
    }

    fn neg_mul(&self, v: &u64, b: &u64) -> Option<u64> {
        Some((self.p - self.mulmod(*v, *b)) % self.p)
    }
}

#[derive(Debug)]
pub(crate) struct Overflow;

/// Result of eliminating a row set: pivots in elimination order, each with
/// the row as it stood when it was chosen.
#[derive(Debug, Clone)]
pub(crate) struct Echelon<E> {
    pub pivots: Vec<(usize, usize, Row<E>)>,
}

pub(crate) fn eliminate<A: Arith>(
    arith: &A,
    mut rows: Vec<Row<A::E>>,
    cols: usize,
) -> Result<Echelon<A::E>, Overflow> {
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols];
    let mut queue: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c].insert(r);
        }
        if !row.is_empty() {
            queue.insert((row.len(), r));
        }
    }
    let mut pivots = Vec::new();

    while let Some((len, p)) = queue.pop_first() {
        let pivot_row = std::mem::take(&mut rows[p]);
        let &(pc, ref pv) = pivot_row
            .iter()
            .min_by_key(|(c, _)| ((len - 1) * (col_rows[*c].len() - 1), *c))
            .expect("queued rows are nonempty");
        let pv = pv.clone();
        for &(c, _) in &pivot_row {
            col_rows[c].remove(&p);
        }
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for t in targets {
            let target = std::mem::take(&mut rows[t]);
            queue.remove(&(target.len(), t));
            let tv = target
                .iter()
                .find(|(c, _)| *c == pc)
                .map(|(_, e)| e.clone())
                .expect("column index is consistent");
            let (u, v) = arith.multipliers(&pv, &tv);
            let updated = axpy(arith, &u, &target, &v, &pivot_row)?;
            for &(c, _) in &target {
                col_rows[c].remove(&t);
            }
            for &(c, _) in &updated {
                col_rows[c].insert(t);
            }
            if !updated.is_empty() {
                queue.insert((updated.len(), t));
            }
            rows[t] = updated;
        }
        pivots.push((p, pc, pivot_row));
    }
    Ok(Echelon { pivots })
}

/// `u * a - v * b` on sorted sparse rows.
fn axpy<A: Arith>(
    arith: &A,
    u: &A::E,
    a: &Row<A::E>,
    v: &A::E,
    b: &Row<A::E>,
) -> Result<Row<A::E>, Overflow> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|x| x.0);
        let cb = b.get(j).map(|x| x.0);
        let (c, val) = match (ca, cb) {
            (Some(x), Some(y)) if x == y => {
                let val = arith.combine(u, &a[i].1, v, &b[j].1).ok_or(Overflow)?;
                i += 1;
                j += 1;
                (x, val)
            }
            (Some(x), Some(y)) if x < y => {
                let val = arith.mul(u, &a[i].1).ok_or(Overflow)?;
                i += 1;
                (x, val)
            }
            (Some(x), None) => {
                let val = arith.mul(u, &a[i].1).ok_or(Overflow)?;
                i += 1;
                (x, val)
            }
            (_, Some(y)) => {
                let val = arith.neg_mul(v, &b[j].1).ok_or(Overflow)?;
                j += 1;
                (y, val)
            }
            (None, None) => unreachable!(),
        };
        if !arith.is_zero(&val) {
            out.push((c, val));
        }
    }
    arith.normalize(&mut out);
    Ok(out)
}

/// Connected components of the bipartite row/column incidence graph, as
/// lists of row indices. Each component can be eliminated on its own.
pub(crate) fn row_components<E>(rows: &[Row<E>], cols: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..cols).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for row in rows {
        if let Some(&(first, _)) = row.first() {
            for &(c, _) in &row[1..] {
                let root = find(&mut parent, first);
                let other = find(&mut parent, c);
                if other != root {
                    let (lo, hi) = if other < root { (other, root) } else { (root, other) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (r, row) in rows.iter().enumerate() {
        if let Some(&(first, _)) = row.first() {
            let root = find(&mut parent, first);
            groups.entry(root).or_default().push(r);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}
