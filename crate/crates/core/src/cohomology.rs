//! Betti numbers, cohomology representatives, class verification and
//! tensor products.

use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, OnceLock};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Element, Homogeneity, Rational, Signature};
use crate::cdga::{Cdga, CdgaError};
use crate::linalg::{
    self, primitive_integer_vector, quotient_representatives, rank_multimodular, Insertion,
    LinalgError, RowReducer, DEFAULT_PRIMES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("internal consistency failure: {0}")]
    Internal(#[from] LinalgError),
    #[error("element {index} is not homogeneous")]
    Inhomogeneous { index: usize },
    #[error("element {index} has degree {degree}, above the computed range 0..={top}")]
    OutOfRange { index: usize, degree: u32, top: u32 },
    #[error("element {index} lives over a different signature")]
    ForeignElement { index: usize },
    #[error("generator name '{0}' clashes in the tensor product")]
    NameClash(String),
}

/// Per-degree Betti numbers `b_0..b_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub per_degree: Vec<usize>,
    pub total: usize,
    /// Set for algebras with polynomial generators: cochains of this degree
    /// and above were never built, and `per_degree` stops one below it.
    pub truncated_at: Option<u32>,
}

impl BettiTable {
    pub fn new(per_degree: Vec<usize>, truncated_at: Option<u32>) -> Self {
        let total = per_degree.iter().sum();
        BettiTable {
            per_degree,
            total,
            truncated_at,
        }
    }

    pub fn get(&self, k: usize) -> usize {
        self.per_degree.get(k).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.per_degree
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn is_palindromic(&self) -> bool {
        self.per_degree.iter().eq(self.per_degree.iter().rev())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankStrategy {
    #[default]
    Exact,
    /// Try the modular bound first; fall back to exact elimination unless
    /// the bound is certified by a full-size minor.
    MultimodularPrefilter,
}

/// Rank cache over one algebra. Each differential rank is computed at most
/// once, and degrees are processed concurrently.
pub struct Cohomology<'a> {
    cdga: &'a Cdga,
    top: u32,
    strategy: RankStrategy,
    ranks: Vec<OnceLock<usize>>,
}

impl<'a> Cohomology<'a> {
    pub fn new(cdga: &'a Cdga) -> Result<Self, CohomologyError> {
        Self::with_strategy(cdga, RankStrategy::Exact)
    }

    pub fn with_strategy(cdga: &'a Cdga, strategy: RankStrategy) -> Result<Self, CohomologyError> {
        let top = cdga.top_degree()?;
        Ok(Cohomology {
            cdga,
            top,
            strategy,
            ranks: (0..=top).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn top_degree(&self) -> u32 {
        self.top
    }

    /// Rank of `d: C^n → C^{n+1}`.
    pub fn rank_of_d(&self, n: u32) -> Result<usize, CohomologyError> {
        if n > self.top {
            return Ok(0);
        }
        if let Some(&r) = self.ranks[n as usize].get() {
            return Ok(r);
        }
        let m = self.cdga.differential_matrix(n)?;
        let r = match self.strategy {
            RankStrategy::Exact => linalg::rank(&m),
            RankStrategy::MultimodularPrefilter => {
                let bound = rank_multimodular(&m, &DEFAULT_PRIMES);
                if bound.confirmed {
                    bound.bound
                } else {
                    let exact = linalg::rank(&m);
                    assert!(bound.bound <= exact, "modular bound above exact rank");
                    exact
                }
            }
        };
        Ok(*self.ranks[n as usize].get_or_init(|| r))
    }

    pub fn betti(&self) -> Result<BettiTable, CohomologyError> {
        (0..=self.top)
            .into_par_iter()
            .map(|n| self.rank_of_d(n).map(|_| ()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut per_degree = Vec::with_capacity(self.top as usize + 1);
        for n in 0..=self.top {
            let dim = self.cdga.basis(n).len();
            let out = self.rank_of_d(n)?;
            let inc = if n == 0 { 0 } else { self.rank_of_d(n - 1)? };
            per_degree.push(dim - out - inc);
        }
        Ok(BettiTable::new(per_degree, self.cdga.truncation()))
    }

    fn boundary_vectors(&self, n: u32) -> Result<Vec<Vec<Rational>>, CohomologyError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let prev = self.cdga.differential_matrix(n - 1)?.transpose();
        Ok((0..prev.rows())
            .filter(|&r| !prev.row(r).is_empty())
            .map(|r| {
                let mut v = vec![Rational::zero(); prev.cols()];
                for (c, x) in prev.row(r) {
                    v[*c] = x.clone();
                }
                v
            })
            .collect())
    }

    /// Closed elements whose classes form a basis of `H^n`.
    pub fn representatives(&self, n: u32) -> Result<Vec<Element>, CohomologyError> {
        if n > self.top {
            return Ok(Vec::new());
        }
        let cocycles = linalg::rank_exact(&self.cdga.differential_matrix(n)?).kernel_basis;
        let boundaries = self.boundary_vectors(n)?;
        let reps = quotient_representatives(&cocycles, &boundaries)?;
        Ok(reps
            .iter()
            .map(|v| {
                self.cdga
                    .element_from_coordinates(&primitive_integer_vector(v), n)
            })
            .collect())
    }
}

pub fn betti(cdga: &Cdga) -> Result<BettiTable, CohomologyError> {
    Cohomology::new(cdga)?.betti()
}

pub fn representatives(cdga: &Cdga, n: u32) -> Result<Vec<Element>, CohomologyError> {
    Cohomology::new(cdga)?.representatives(n)
}

/// Outcome of [`verify_classes`]. Witnesses point into the input list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassVerdict {
    pub all_closed: bool,
    pub independent: bool,
    pub spanning: bool,
    /// First element with nonzero differential.
    pub non_closed: Option<usize>,
    /// First linear relation found among classes, as `(element index,
    /// coefficient)` pairs; the classes combine to zero in cohomology.
    pub dependency: Option<Vec<(usize, String)>>,
    /// First degree in which the classes fall short of `b_n`.
    pub missing_degree: Option<u32>,
    /// `(degree, independent classes given, b_n)` for every degree.
    pub per_degree: Vec<(u32, usize, usize)>,
}

pub fn verify_classes(cdga: &Cdga, elems: &[Element]) -> Result<ClassVerdict, CohomologyError> {
    let coh = Cohomology::new(cdga)?;
    let table = coh.betti()?;
    let top = coh.top_degree();

    let mut by_degree: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut non_closed = None;
    let mut dependency: Option<BTreeMap<usize, Rational>> = None;
    for (i, e) in elems.iter().enumerate() {
        if !crate::algebra::same_signature(e.signature(), cdga.signature()) {
            return Err(CohomologyError::ForeignElement { index: i });
        }
        match e.homogeneity() {
            Homogeneity::Mixed => return Err(CohomologyError::Inhomogeneous { index: i }),
            Homogeneity::Zero => {
                dependency.get_or_insert_with(|| BTreeMap::from([(i, Rational::from_integer(1.into()))]));
            }
            Homogeneity::Degree(n) => {
                if n > top {
                    return Err(CohomologyError::OutOfRange {
                        index: i,
                        degree: n,
                        top,
                    });
                }
                if !cdga.apply_d(e).is_zero() {
                    non_closed.get_or_insert(i);
                    continue;
                }
                by_degree.entry(n).or_default().push(i);
            }
        }
    }

    let mut per_degree = Vec::new();
    let mut missing_degree = None;
    for n in 0..=top {
        let mut reducer = RowReducer::new(cdga.basis(n).len());
        for b in coh.boundary_vectors(n)? {
            reducer.insert(&b, None);
        }
        let mut count = 0;
        for &i in by_degree.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            match reducer.insert(&cdga.coordinates(&elems[i], n), Some(i)) {
                Insertion::Independent => count += 1,
                Insertion::Dependent { relation } => {
                    dependency.get_or_insert(relation);
                }
            }
        }
        let b = table.get(n as usize);
        if count < b && missing_degree.is_none() {
            missing_degree = Some(n);
        }
        per_degree.push((n, count, b));
    }

    let dependency = dependency.map(|rel| {
        let flip = rel.values().next().is_some_and(|c| c.is_negative());
        rel.into_iter()
            .map(|(i, c)| {
                let c = if flip { -c } else { c };
                (i, crate::algebra::format_rational(&c))
            })
            .collect()
    });
    Ok(ClassVerdict {
        all_closed: non_closed.is_none(),
        independent: dependency.is_none() && non_closed.is_none(),
        spanning: missing_degree.is_none(),
        non_closed,
        dependency,
        missing_degree,
        per_degree,
    })
}

/// How to resolve generator-name clashes in a tensor product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenamePolicy {
    /// Any clash is an error.
    Strict,
    /// On a clash, every generator of the right factor gets this suffix.
    SuffixRight(String),
}

impl Default for RenamePolicy {
    fn default() -> Self {
        RenamePolicy::SuffixRight("_2".to_string())
    }
}

pub fn tensor_product(a: &Cdga, b: &Cdga) -> Result<Cdga, CohomologyError> {
    tensor_product_with(a, b, &RenamePolicy::default())
}

pub fn tensor_product_with(
    a: &Cdga,
    b: &Cdga,
    policy: &RenamePolicy,
) -> Result<Cdga, CohomologyError> {
    let (sa, sb) = (a.signature(), b.signature());
    let left: HashSet<&str> = sa.generators().iter().map(|g| g.name()).collect();
    let clash = sb.generators().iter().any(|g| left.contains(g.name()));
    let rename = |name: &str| -> String {
        match policy {
            RenamePolicy::SuffixRight(s) if clash => format!("{name}{s}"),
            _ => name.to_string(),
        }
    };
    let mut gens: Vec<(String, u32)> = sa
        .generators()
        .iter()
        .map(|g| (g.name().to_string(), g.degree()))
        .collect();
    for g in sb.generators() {
        let name = rename(g.name());
        if left.contains(name.as_str()) {
            return Err(CohomologyError::NameClash(name));
        }
        gens.push((name, g.degree()));
    }
    let sig: Arc<Signature> = Signature::new(gens)?;
    let offset = sa.len();
    let map_a: Vec<usize> = (0..sa.len()).collect();
    let map_b: Vec<usize> = (0..sb.len()).map(|i| i + offset).collect();
    let mut diffs: Vec<Element> = a
        .differential()
        .iter()
        .map(|d| d.transport(&sig, &map_a))
        .collect();
    diffs.extend(b.differential().iter().map(|d| d.transport(&sig, &map_b)));
    Ok(Cdga::new(sig, diffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational_from_int as q;
    use crate::models::{torus_model, upper_tri_model, xr_model};

    #[test]
    fn torus_betti_is_binomial() {
        let t = betti(&torus_model(3)).unwrap();
        assert_eq!(t.per_degree, [1, 3, 3, 1]);
        assert_eq!(t.total, 8);
        assert_eq!(t.truncated_at, None);
    }

    #[test]
    fn x5_table() {
        let t = betti(&xr_model(5)).unwrap();
        assert_eq!(t.total, 26);
        assert_eq!(t.per_degree, [1, 2, 4, 6, 6, 4, 2, 1]);
        assert_eq!(betti(&xr_model(4)).unwrap().total, 16);
    }

    #[test]
    fn low_degree_representatives() {
        let x5 = xr_model(5);
        let sig = x5.signature().clone();
        assert_eq!(representatives(&x5, 0).unwrap(), vec![Element::one(&sig)]);
        let r1 = representatives(&x5, 1).unwrap();
        assert_eq!(
            r1,
            vec![
                Element::generator(&sig, "a").unwrap(),
                Element::generator(&sig, "b").unwrap()
            ]
        );
        let u3 = upper_tri_model(3);
        let s3 = u3.signature().clone();
        assert_eq!(
            representatives(&u3, 1).unwrap(),
            vec![
                Element::generator(&s3, "x_2_1").unwrap(),
                Element::generator(&s3, "x_3_2").unwrap()
            ]
        );
    }

    #[test]
    fn top_class_of_x5() {
        let x5 = xr_model(5);
        let reps = representatives(&x5, 7).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].to_string(), "a*b*x1*x2*x3*x4*x5");
    }

    #[test]
    fn dependent_pair_has_witness() {
        let x5 = xr_model(5);
        let sig = x5.signature().clone();
        let a = Element::generator(&sig, "a").unwrap();
        let v = verify_classes(&x5, &[a.clone(), a.scale(&q(2))]).unwrap();
        assert!(v.all_closed);
        assert!(!v.independent);
        assert_eq!(
            v.dependency,
            Some(vec![(0, "2".to_string()), (1, "-1".to_string())])
        );
    }

    #[test]
    fn exact_class_is_dependent() {
        let x5 = xr_model(5);
        let ab = Element::word(x5.signature(), q(1), &["a", "b"]).unwrap();
        let v = verify_classes(&x5, &[ab]).unwrap();
        assert!(v.all_closed);
        assert!(!v.independent);
        assert!(!v.spanning);
        assert_eq!(v.missing_degree, Some(0));
    }

    #[test]
    fn non_closed_element_is_flagged() {
        let x5 = xr_model(5);
        let x1 = Element::generator(x5.signature(), "x1").unwrap();
        let v = verify_classes(&x5, &[x1]).unwrap();
        assert!(!v.all_closed);
        assert_eq!(v.non_closed, Some(0));
    }

    #[test]
    fn inhomogeneous_input_is_an_error() {
        let x5 = xr_model(5);
        let sig = x5.signature();
        let e = &Element::one(sig) + &Element::generator(sig, "a").unwrap();
        assert_eq!(
            verify_classes(&x5, &[e]),
            Err(CohomologyError::Inhomogeneous { index: 0 })
        );
    }

    #[test]
    fn circle_products() {
        let t1 = torus_model(1);
        let t = betti(&tensor_product(&t1, &t1).unwrap()).unwrap();
        assert_eq!(t.per_degree, [1, 2, 1]);
        let x5t = tensor_product(&xr_model(5), &t1).unwrap();
        assert_eq!(betti(&x5t).unwrap().total, 52);
    }

    #[test]
    fn strict_policy_rejects_clash() {
        let t1 = torus_model(1);
        assert!(matches!(
            tensor_product_with(&t1, &t1, &RenamePolicy::Strict),
            Err(CohomologyError::NameClash(_))
        ));
    }

    #[test]
    fn untruncated_even_algebra_is_refused() {
        let c = crate::models::borel_twist(&torus_model(1), "x1", "t", None)
            .unwrap()
            .with_truncation(None);
        assert!(matches!(
            betti(&c),
            Err(CohomologyError::Cdga(CdgaError::Untruncated))
        ));
    }

    #[test]
    fn prefilter_agrees_with_exact() {
        let u4 = upper_tri_model(4);
        let exact = betti(&u4).unwrap();
        let fast = Cohomology::with_strategy(&u4, RankStrategy::MultimodularPrefilter)
            .unwrap()
            .betti()
            .unwrap();
        assert_eq!(exact, fast);
        assert_eq!(exact.total, 24);
    }

    #[test]
    fn betti_table_json_shape() {
        let t = betti(&torus_model(2)).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"per_degree":[1,2,1],"total":4,"truncated_at":null}"#);
    }
}
