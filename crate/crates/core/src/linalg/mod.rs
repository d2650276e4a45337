//! Exact linear algebra over the rationals for sparse matrices.

mod eliminate;
mod modular;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::Rational;
use eliminate::{eliminate, BigArith, Row, SmallArith};

pub use modular::{rank_multimodular, MinorCertificate, MultimodularRank, DEFAULT_PRIMES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("boundary vector {0} is not in the span of the cocycles")]
    BoundaryOutsideCocycles(usize),
}

/// Row-major sparse matrix with exact rational entries and no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rational)>>,
}

impl SparseExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseExactMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i].push((i, Rational::one()));
        }
        m
    }

    /// Duplicate positions are summed; zero results are dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            *acc[r].entry(c).or_insert_with(Rational::zero) += v;
        }
        let data = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(SparseExactMatrix { rows, cols, data })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|row| {
                assert_eq!(row.len(), cols, "ragged dense matrix");
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        SparseExactMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|k| self.data[r][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (r, c, v) in self.entries() {
            data[c].push((r, v.clone()));
        }
        SparseExactMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(c, _)| !v[*c].is_zero())
                    .fold(Rational::zero(), |acc, (c, a)| acc + a * &v[*c])
            })
            .collect())
    }

    pub fn mul(&self, rhs: &SparseExactMatrix) -> Result<SparseExactMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut triplets = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &rhs.data[*k] {
                    *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                }
            }
            triplets.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(self.rows, rhs.cols, triplets)
    }

    /// Rows scaled by the lcm of their denominators: same row space, integer
    /// entries.
    pub(crate) fn integer_rows(&self) -> Vec<Row<BigInt>> {
        self.data
            .iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
                row.iter()
                    .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankResult {
    pub rank: usize,
    pub kernel_basis: Vec<Vec<Rational>>,
    pub pivot_columns: Vec<usize>,
}

/// Echelon data of one connected block of the matrix.
struct Block {
    pivots: Vec<(usize, usize, Row<BigInt>)>,
}

fn eliminate_blocks(m: &SparseExactMatrix) -> Vec<Block> {
    let rows = m.integer_rows();
    let components = eliminate::row_components(&rows, m.cols);
    components
        .par_iter()
        .map(|component| eliminate_block(&rows, component))
        .collect()
}

fn eliminate_block(rows: &[Row<BigInt>], component: &[usize]) -> Block {
    let mut cols: Vec<usize> = component
        .iter()
        .flat_map(|&r| rows[r].iter().map(|e| e.0))
        .collect();
    cols.sort_unstable();
    cols.dedup();
    let local = |c: usize| cols.binary_search(&c).expect("column in block");

    let small: Option<Vec<Row<i64>>> = component
        .iter()
        .map(|&r| {
            rows[r]
                .iter()
                .map(|(c, v)| v.to_i64().map(|x| (local(*c), x)))
                .collect()
        })
        .collect();
    let pivots = small
        .and_then(|small_rows| eliminate(&SmallArith, small_rows, cols.len()).ok())
        .map(|ech| {
            ech.pivots
                .into_iter()
                .map(|(r, c, row)| {
                    (
                        r,
                        c,
                        row.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect(),
                    )
                })
                .collect::<Vec<_>>()
        })
        .unwrap_or_else(|| {
            let big_rows: Vec<Row<BigInt>> = component
                .iter()
                .map(|&r| rows[r].iter().map(|(c, v)| (local(*c), v.clone())).collect())
                .collect();
            eliminate(&BigArith, big_rows, cols.len())
                .expect("big-integer elimination cannot overflow")
                .pivots
        });
    Block {
        pivots: pivots
            .into_iter()
            .map(|(r, c, row)| {
                (
                    component[r],
                    cols[c],
                    row.into_iter().map(|(lc, v)| (cols[lc], v)).collect(),
                )
            })
            .collect(),
    }
}

/// Exact rank only; skips the kernel.
pub fn rank(m: &SparseExactMatrix) -> usize {
    eliminate_blocks(m).iter().map(|b| b.pivots.len()).sum()
}

/// Exact rank, a kernel basis, and the pivot columns. Kernel vectors are
/// indexed by the free columns in increasing order: the vector for free
/// column `f` has a 1 at `f` and 0 at every other free column.
pub fn rank_exact(m: &SparseExactMatrix) -> RankResult {
    let blocks = eliminate_blocks(m);
    let mut pivot_columns: Vec<usize> = blocks
        .iter()
        .flat_map(|b| b.pivots.iter().map(|p| p.1))
        .collect();
    pivot_columns.sort_unstable();

    let mut block_of_col: BTreeMap<usize, usize> = BTreeMap::new();
    for (bi, b) in blocks.iter().enumerate() {
        for (_, _, row) in &b.pivots {
            for (c, _) in row {
                block_of_col.insert(*c, bi);
            }
        }
    }

    let mut kernel_basis = Vec::new();
    for f in 0..m.cols {
        if pivot_columns.binary_search(&f).is_ok() {
            continue;
        }
        let mut x = vec![Rational::zero(); m.cols];
        x[f] = Rational::one();
        if let Some(&bi) = block_of_col.get(&f) {
            back_substitute(&blocks[bi], &mut x);
        }
        kernel_basis.push(x);
    }
    RankResult {
        rank: pivot_columns.len(),
        kernel_basis,
        pivot_columns,
    }
}

fn back_substitute(block: &Block, x: &mut [Rational]) {
    for (_, pc, row) in block.pivots.iter().rev() {
        let mut acc = Rational::zero();
        let mut pivot_value = None;
        for (c, v) in row {
            if c == pc {
                pivot_value = Some(v);
            } else if !x[*c].is_zero() {
                acc += &x[*c] * Rational::from_integer(v.clone());
            }
        }
        let pv = Rational::from_integer(pivot_value.expect("pivot present").clone());
        x[*pc] = -acc / pv;
    }
}

/// Incremental row echelon form over the rationals that remembers, for
/// every stored row, which tagged inputs it was built from.
#[derive(Debug, Clone)]
pub struct RowReducer {
    dim: usize,
    rows: Vec<ReducedRow>,
}

#[derive(Debug, Clone)]
struct ReducedRow {
    pivot: usize,
    values: Vec<Rational>,
    combo: BTreeMap<usize, Rational>,
}

/// Outcome of [`RowReducer::insert`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insertion {
    Independent,
    /// The input lies in the current span. `relation` lists coefficients
    /// `c_i` over tagged inputs with `Σ c_i v_i` in the span of the untagged
    /// inputs; the new input carries coefficient 1.
    Dependent { relation: BTreeMap<usize, Rational> },
}

impl RowReducer {
    pub fn new(dim: usize) -> Self {
        RowReducer {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_with_combo(&self, v: &[Rational]) -> (Vec<Rational>, BTreeMap<usize, Rational>) {
        let mut rem = v.to_vec();
        let mut used: BTreeMap<usize, Rational> = BTreeMap::new();
        for row in &self.rows {
            let factor = rem[row.pivot].clone();
            if factor.is_zero() {
                continue;
            }
            for (k, val) in row.values.iter().enumerate() {
                if !val.is_zero() {
                    rem[k] -= &factor * val;
                }
            }
            for (tag, c) in &row.combo {
                *used.entry(*tag).or_insert_with(Rational::zero) += &factor * c;
            }
        }
        used.retain(|_, c| !c.is_zero());
        (rem, used)
    }

    /// Remainder of `v` after reduction by the stored rows.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        self.reduce_with_combo(v).0
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn insert(&mut self, v: &[Rational], tag: Option<usize>) -> Insertion {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let (rem, used) = self.reduce_with_combo(v);
        let mut combo: BTreeMap<usize, Rational> = used.into_iter().map(|(t, c)| (t, -c)).collect();
        if let Some(t) = tag {
            *combo.entry(t).or_insert_with(Rational::zero) += Rational::one();
        }
        combo.retain(|_, c| !c.is_zero());
        match rem.iter().position(|x| !x.is_zero()) {
            None => Insertion::Dependent { relation: combo },
            Some(pivot) => {
                let inv = Rational::one() / &rem[pivot];
                let values = rem.iter().map(|x| x * &inv).collect();
                let combo = combo.into_iter().map(|(t, c)| (t, c * &inv)).collect();
                self.rows.push(ReducedRow {
                    pivot,
                    values,
                    combo,
                });
                Insertion::Independent
            }
        }
    }
}

/// Cocycle vectors whose classes form a basis of span(cocycles) modulo
/// span(boundaries). Boundaries are absorbed first, then cocycles are kept
/// in their given order whenever they enlarge the span.
pub fn quotient_representatives(
    cocycles: &[Vec<Rational>],
    boundaries: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>, LinalgError> {
    let dim = cocycles
        .first()
        .or_else(|| boundaries.first())
        .map_or(0, Vec::len);
    let mut cocycle_span = RowReducer::new(dim);
    for z in cocycles {
        if z.len() != dim {
            return Err(LinalgError::DimensionMismatch("ragged cocycle list".into()));
        }
        cocycle_span.insert(z, None);
    }
    let mut reducer = RowReducer::new(dim);
    for (k, b) in boundaries.iter().enumerate() {
        if b.len() != dim {
            return Err(LinalgError::DimensionMismatch("ragged boundary list".into()));
        }
        if !cocycle_span.contains(b) {
            return Err(LinalgError::BoundaryOutsideCocycles(k));
        }
        reducer.insert(b, None);
    }
    Ok(cocycles
        .iter()
        .filter(|z| reducer.insert(z, None) == Insertion::Independent)
        .cloned()
        .collect())
}

/// Makes a rational vector integral and primitive with a positive leading
/// entry. Used to present representatives without spurious fractions.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}
