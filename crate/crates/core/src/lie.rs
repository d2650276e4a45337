//! Finite-dimensional Lie algebras given by structure constants, and the
//! passage between Lie algebras and quadratic cochain algebras.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{format_rational, is_identifier, Element, Rational, Signature};
use crate::cdga::{Cdga, CdgaError};
use crate::linalg::{rank_exact, Insertion, RowReducer, SparseExactMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("invalid basis name '{0}'")]
    InvalidName(String),
    #[error("duplicate basis name '{0}'")]
    DuplicateName(String),
    #[error("basis index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("bracket of '{0}' with itself must vanish")]
    SelfBracket(String),
    #[error("Jacobi identity fails on ({0}, {1}, {2})")]
    Jacobi(String, String, String),
    #[error("bracket [{0}, {1}] is not homogeneous in the grading")]
    Inhomogeneous(String, String),
    #[error("the Lie algebra is not nilpotent")]
    NotNilpotent,
    #[error("u(n) needs n >= 2, got {0}")]
    TooSmall(usize),
    #[error("d({0}) is not a combination of products of two generators")]
    NotQuadratic(String),
    #[error("generator '{0}' has even degree")]
    EvenGenerator(String),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
}

/// Basis names plus structure constants `[X_i, X_j] = Σ_k c_{i,j}^k X_k`,
/// stored for `i < j` only.
///
/// `degrees` carries the grading of a homotopy Lie algebra read off from a
/// cochain algebra (generator degree minus one); for ordinary Lie algebras
/// every entry is 0. Brackets must respect it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiePresentation {
    basis: Vec<String>,
    degrees: Vec<u32>,
    constants: BTreeMap<(usize, usize), BTreeMap<usize, Rational>>,
    nilpotent: bool,
}

type Vector = Vec<Rational>;

impl LiePresentation {
    /// Builds and validates a presentation. Brackets may be given in either
    /// order; `(j, i, k, c)` is read as `[X_i, X_j] ∋ -c X_k`. Repeated
    /// entries add up.
    pub fn new<I>(basis: Vec<String>, brackets: I) -> Result<Self, LieError>
    where
        I: IntoIterator<Item = (usize, usize, usize, Rational)>,
    {
        let degrees = vec![0; basis.len()];
        Self::graded(basis, degrees, brackets)
    }

    pub fn graded<I>(basis: Vec<String>, degrees: Vec<u32>, brackets: I) -> Result<Self, LieError>
    where
        I: IntoIterator<Item = (usize, usize, usize, Rational)>,
    {
        let mut seen = HashSet::new();
        for name in &basis {
            if !is_identifier(name) {
                return Err(LieError::InvalidName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(LieError::DuplicateName(name.clone()));
            }
        }
        assert_eq!(degrees.len(), basis.len(), "one degree per basis element");
        let dim = basis.len();
        let mut constants: BTreeMap<(usize, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
        for (i, j, k, c) in brackets {
            for idx in [i, j, k] {
                if idx >= dim {
                    return Err(LieError::IndexOutOfRange(idx));
                }
            }
            if c.is_zero() {
                continue;
            }
            if i == j {
                return Err(LieError::SelfBracket(basis[i].clone()));
            }
            let (key, c) = if i < j { ((i, j), c) } else { ((j, i), -c) };
            if degrees[k] != degrees[i] + degrees[j] {
                return Err(LieError::Inhomogeneous(basis[i].clone(), basis[j].clone()));
            }
            *constants.entry(key).or_default().entry(k).or_insert_with(Rational::zero) += c;
        }
        for row in constants.values_mut() {
            row.retain(|_, c| !c.is_zero());
        }
        constants.retain(|_, row| !row.is_empty());

        let mut lie = LiePresentation {
            basis,
            degrees,
            constants,
            nilpotent: false,
        };
        lie.check_jacobi()?;
        lie.nilpotent = *lie.lower_central_series().last().unwrap_or(&0) == 0;
        Ok(lie)
    }

    pub fn abelian(k: usize) -> Self {
        let basis = (1..=k).map(|i| format!("X{i}")).collect();
        Self::new(basis, []).expect("abelian presentation is valid")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotent
    }

    /// Nonzero structure constants `(i, j, k, c_{i,j}^k)` with `i < j`, in
    /// increasing order.
    pub fn structure_constants(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> {
        self.constants
            .iter()
            .flat_map(|(&(i, j), row)| row.iter().map(move |(&k, c)| (i, j, k, c)))
    }

    /// `[X_i, X_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        let mut out = vec![Rational::zero(); self.dim()];
        let (key, flip) = if i < j { ((i, j), false) } else { ((j, i), true) };
        if let Some(row) = self.constants.get(&key) {
            for (&k, c) in row {
                out[k] = if flip { -c } else { c.clone() };
            }
        }
        out
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vector {
        let mut out = vec![Rational::zero(); self.dim()];
        for (&(i, j), row) in &self.constants {
            // [u, v] picks up u_i v_j - u_j v_i on the pair (i, j).
            let w = &u[i] * &v[j] - &u[j] * &v[i];
            if w.is_zero() {
                continue;
            }
            for (&k, c) in row {
                out[k] += &w * c;
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vector {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        let n = self.dim();
        let units: Vec<Vector> = (0..n).map(|i| self.unit(i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let ij = self.bracket(&units[i], &units[j]);
                for k in j + 1..n {
                    let jk = self.bracket(&units[j], &units[k]);
                    let ki = self.bracket(&units[k], &units[i]);
                    let a = self.bracket(&ij, &units[k]);
                    let b = self.bracket(&jk, &units[i]);
                    let c = self.bracket(&ki, &units[j]);
                    if (0..n).any(|t| !(&a[t] + &b[t] + &c[t]).is_zero()) {
                        return Err(LieError::Jacobi(
                            self.basis[i].clone(),
                            self.basis[j].clone(),
                            self.basis[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimensions of `L ⊇ [L,L] ⊇ [L,[L,L]] ⊇ ...`, ending at 0 for a
    /// nilpotent algebra or at the first repeated dimension otherwise.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let n = self.dim();
        let mut current: Vec<Vector> = (0..n).map(|i| self.unit(i)).collect();
        let mut dims = vec![n];
        while !current.is_empty() {
            let mut reducer = RowReducer::new(n);
            let mut next = Vec::new();
            for v in &current {
                for b in 0..n {
                    let w = self.bracket(v, &self.unit(b));
                    if reducer.insert(&w, None) == Insertion::Independent {
                        next.push(w);
                    }
                }
            }
            if next.len() == current.len() {
                break;
            }
            dims.push(next.len());
            current = next;
        }
        dims
    }

    /// Length of the lower central series down to 0; `None` if the algebra
    /// is not nilpotent.
    pub fn nilpotency_class(&self) -> Option<usize> {
        self.nilpotent
            .then(|| self.lower_central_series().len() - 1)
    }

    /// Kernel of the stacked adjoint maps `v ↦ [v, X_b]`.
    pub fn center(&self) -> Center {
        let n = self.dim();
        let mut triplets = Vec::new();
        for b in 0..n {
            for i in 0..n {
                for (k, c) in self.bracket_basis(i, b).into_iter().enumerate() {
                    if !c.is_zero() {
                        triplets.push((b * n + k, i, c));
                    }
                }
            }
        }
        let m = SparseExactMatrix::from_triplets(n * n, n, triplets)
            .expect("indices are in range");
        let basis = rank_exact(&m)
            .kernel_basis
            .iter()
            .map(|v| crate::linalg::primitive_integer_vector(v))
            .collect::<Vec<_>>();
        let display = basis.iter().map(|v| format_combination(&self.basis, v)).collect();
        Center {
            dimension: basis.len(),
            basis,
            display,
        }
    }
}

/// Center of a Lie algebra as an explicit rational basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Center {
    pub dimension: usize,
    #[serde(skip)]
    pub basis: Vec<Vec<Rational>>,
    /// Basis vectors written out in the basis names, e.g. `X_6_1`.
    #[serde(rename = "basis")]
    pub display: Vec<String>,
}

/// Renders `Σ v_i name_i` in the style of [`Element`]'s display.
pub fn format_combination(names: &[String], v: &[Rational]) -> String {
    let mut out = String::new();
    for (name, c) in names.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let negative = c < &Rational::zero();
        let abs = if negative { -c } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if !abs.is_one() {
            out.push_str(&format_rational(&abs));
            out.push('*');
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Strictly lower triangular `n × n` matrices with basis `X_i_j`
/// (`j < i`), ordered by off-diagonal `i - j`, then by `j`.
pub fn u_n_presentation(n: usize) -> Result<LiePresentation, LieError> {
    if n < 2 {
        return Err(LieError::TooSmall(n));
    }
    let labels: Vec<(usize, usize)> = (1..n)
        .flat_map(|k| (1..=n - k).map(move |j| (j + k, j)))
        .collect();
    let index: BTreeMap<(usize, usize), usize> =
        labels.iter().enumerate().map(|(p, &l)| (l, p)).collect();
    let mut brackets = Vec::new();
    for (p, &(i, j)) in labels.iter().enumerate() {
        for (q, &(s, t)) in labels.iter().enumerate().skip(p + 1) {
            if j == s && i != t {
                brackets.push((p, q, index[&(i, t)], -Rational::one()));
            } else if i == t && j != s {
                brackets.push((p, q, index[&(s, j)], Rational::one()));
            }
        }
    }
    let basis = labels.iter().map(|(i, j)| format!("X_{i}_{j}")).collect();
    LiePresentation::new(basis, brackets)
}

fn lower_first(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => c.to_lowercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn upper_first(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

/// Cochain algebra `Λ(L^*)` with `d x_k = -Σ_{i<j} c_{i,j}^k x_i x_j`.
/// Generator names lowercase the first letter of the basis names and
/// generator degrees are the Lie degrees plus one.
pub fn chevalley_eilenberg(l: &LiePresentation) -> Result<Cdga, LieError> {
    if !l.is_nilpotent() {
        return Err(LieError::NotNilpotent);
    }
    let names: Vec<String> = l.basis.iter().map(|b| lower_first(b)).collect();
    let sig = Signature::new(names.iter().zip(&l.degrees).map(|(n, &d)| (n.as_str(), d + 1)))
        .map_err(|e| LieError::InvalidName(e.to_string()))?;
    let mut diffs: Vec<Element> = (0..l.dim()).map(|_| Element::zero(&sig)).collect();
    for (i, j, k, c) in l.structure_constants() {
        let xi = Element::generator_at(&sig, i);
        let xj = Element::generator_at(&sig, j);
        diffs[k] = &diffs[k] - &(&xi * &xj).scale(c);
    }
    Ok(Cdga::new(sig, diffs)?)
}

/// Reads brackets off a quadratic differential on odd generators: a term
/// `c x_i x_j` (`i < j`) of `d x_k` gives `c_{i,j}^k = -c`. Basis names
/// uppercase the first letter of the generator names; the Lie degree of a
/// basis element is its generator's degree minus one.
pub fn dual_homotopy_lie(c: &Cdga) -> Result<LiePresentation, LieError> {
    let sig = c.signature();
    for g in sig.generators() {
        if !g.is_odd() {
            return Err(LieError::EvenGenerator(g.name().to_string()));
        }
    }
    let mut brackets = Vec::new();
    for (k, d) in c.differential().iter().enumerate() {
        for (m, coeff) in d.terms() {
            let letters = m.exponents();
            if letters.len() != 2 {
                return Err(LieError::NotQuadratic(sig.generator(k).name().to_string()));
            }
            brackets.push((letters[0].0, letters[1].0, k, -coeff));
        }
    }
    let basis = sig.generators().iter().map(|g| upper_first(g.name())).collect();
    let degrees = sig.generators().iter().map(|g| g.degree() - 1).collect();
    LiePresentation::graded(basis, degrees, brackets)
}
