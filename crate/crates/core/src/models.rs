//! Model constructors: upper triangular nilpotent groups, their
//! fibrations, the `X_r` family, and the two realizability probes.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, Element, Monomial, Rational, Sign, Signature};
use crate::cdga::{default_truncation, Cdga, CdgaError};
use crate::cohomology::{betti, BettiTable, CohomologyError};
use crate::linalg::{rank_exact, SparseExactMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("generator '{0}' is not labelled x_i_j")]
    Unlabelled(String),
    #[error("generator '{generator}' has degree {degree}; the twist needs an odd degree")]
    ParityMismatch { generator: String, degree: u32 },
    #[error("generator '{generator}' has degree {degree}; only degree-1 fiber generators are supported")]
    FiberDegree { generator: String, degree: u32 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn x_name(i: usize, j: usize) -> String {
    format!("x_{i}_{j}")
}

/// Labels `(i, j)` with `1 <= j < i <= n`, ordered by `i - j`, then `j`.
fn labels(n: usize) -> Vec<(usize, usize)> {
    (1..n)
        .flat_map(|k| (1..=n - k).map(move |j| (j + k, j)))
        .collect()
}

/// Builds `d x_{i,j} = -Σ x_{l,j} x_{i,l}` over the given labels, keeping
/// only the pairs accepted by `keep(l)`.
fn triangular_cdga(
    labels: &[(usize, usize)],
    keep: impl Fn(usize, usize, usize) -> bool,
) -> Result<Cdga, ModelError> {
    let sig = Signature::new(labels.iter().map(|&(i, j)| (x_name(i, j), 1)))?;
    let diffs = labels
        .iter()
        .map(|&(i, j)| {
            let mut d = Element::zero(&sig);
            for l in j + 1..i {
                if keep(i, j, l) {
                    let w = Element::word(&sig, q(-1), &[&x_name(l, j), &x_name(i, l)])?;
                    d = &d + &w;
                }
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>, AlgebraError>>()?;
    Ok(Cdga::new(sig, diffs)?)
}

/// Largest `n` for which `u(n)` fits the generator limit.
pub const MAX_UPPER_TRI: usize = 11;

/// Cochain model of the strictly upper triangular group `U(n)`:
/// `d x_{i,j} = -Σ_{j<l<i} x_{l,j} x_{i,l}`.
///
/// # Panics
/// If `n < 2` or `n > MAX_UPPER_TRI`.
pub fn upper_tri_model(n: usize) -> Cdga {
    assert!((2..=MAX_UPPER_TRI).contains(&n), "upper_tri_model needs 2 <= n <= {MAX_UPPER_TRI}");
    triangular_cdga(&labels(n), |_, _, _| true).expect("upper triangular model is valid")
}

/// Exterior algebra on `k` closed degree-1 generators `x1..xk`.
pub fn torus_model(k: usize) -> Cdga {
    let sig = Signature::new((1..=k).map(|i| (format!("x{i}"), 1))).expect("torus signature");
    let diffs = (0..k).map(|_| Element::zero(&sig)).collect();
    Cdga::new(sig, diffs).expect("zero differential")
}

/// Generators `a, b, x1..xr` in degree 1 with `da = db = 0`, `dx1 = ab`
/// and `dx_i = a x_{i-1}`.
///
/// # Panics
/// If `r > 62`.
pub fn xr_model(r: usize) -> Cdga {
    let mut names = vec!["a".to_string(), "b".to_string()];
    names.extend((1..=r).map(|i| format!("x{i}")));
    let sig = Signature::new(names.iter().map(|n| (n.as_str(), 1))).expect("X_r signature");
    let diffs = names
        .iter()
        .map(|n| match n.as_str() {
            "a" | "b" => Element::zero(&sig),
            "x1" => Element::word(&sig, q(1), &["a", "b"]).unwrap(),
            _ => {
                let i: usize = n[1..].parse().unwrap();
                Element::word(&sig, q(1), &["a", &format!("x{}", i - 1)]).unwrap()
            }
        })
        .collect();
    Cdga::new(sig, diffs).expect("X_r model is valid")
}

/// Fiber torus rank `(n-k+1)(n-k+2)/2`.
pub fn d_formula(n: usize, k: usize) -> Result<u64, ModelError> {
    check_nk(n, k)?;
    let m = (n - k) as u64;
    Ok((m + 1) * (m + 2) / 2)
}

/// `n(n-1)/2 - d(n,k)`, cross-checked against the closed form
/// `(2-k)(k-1-2n)/2`.
pub fn c_formula(n: usize, k: usize) -> Result<u64, ModelError> {
    let d = d_formula(n, k)?;
    let c = (n * (n - 1) / 2) as u64 - d;
    let (n, k) = (n as i64, k as i64);
    assert_eq!(c as i64, (2 - k) * (k - 1 - 2 * n) / 2, "c(n,k) closed form");
    Ok(c)
}

fn check_nk(n: usize, k: usize) -> Result<(), ModelError> {
    if k < 2 || k > n {
        return Err(ModelError::OutOfRange(format!("need 2 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// The fibration `base → total → fiber` of `u(n)` at off-diagonal `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationTriple {
    pub n: usize,
    pub k: usize,
    /// Generators with `1 <= i-j < k-1`.
    pub base: Cdga,
    pub total: Cdga,
    /// Generators with `i-j >= k-1`, differential reduced modulo the base.
    pub fiber: Cdga,
    /// Index in `total` of each base generator.
    pub base_inclusion: Vec<usize>,
    /// Index in `fiber` of each total generator, `None` for base generators.
    pub fiber_projection: Vec<Option<usize>>,
}

impl FibrationTriple {
    pub fn fiber_is_abelian(&self) -> bool {
        self.fiber.differential().iter().all(Element::is_zero)
    }
}

pub fn split_at_k(n: usize, k: usize) -> Result<FibrationTriple, ModelError> {
    check_nk(n, k)?;
    if n > MAX_UPPER_TRI {
        return Err(ModelError::OutOfRange(format!("n = {n} exceeds {MAX_UPPER_TRI}")));
    }
    let all = labels(n);
    let (base_labels, fiber_labels): (Vec<_>, Vec<_>) =
        all.iter().partition(|&&(i, j)| i - j < k - 1);
    let base = triangular_cdga(&base_labels, |_, _, _| true)?;
    let fiber = triangular_cdga(&fiber_labels, |i, j, l| l - j >= k - 1 && i - l >= k - 1)?;
    let total = upper_tri_model(n);
    let base_inclusion = base_labels
        .iter()
        .map(|l| all.iter().position(|m| m == l).unwrap())
        .collect();
    let fiber_projection = all
        .iter()
        .map(|l| fiber_labels.iter().position(|m| m == l))
        .collect();
    Ok(FibrationTriple {
        n,
        k,
        base,
        total,
        fiber,
        base_inclusion,
        fiber_projection,
    })
}

fn parse_label(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("x_")?;
    let (i, j) = rest.split_once('_')?;
    Some((i.parse().ok()?, j.parse().ok()?))
}

/// Regrades a model on `x_i_j` generators by `|x_{i,j}| = (i-j)·2κ + 1`.
pub fn degree_shift(model: &Cdga, kappa: u32) -> Result<Cdga, ModelError> {
    let sig = model.signature();
    let mut gens = Vec::with_capacity(sig.len());
    for g in sig.generators() {
        let (i, j) = parse_label(g.name())
            .filter(|(i, j)| i > j)
            .ok_or_else(|| ModelError::Unlabelled(g.name().to_string()))?;
        gens.push((g.name().to_string(), (i - j) as u32 * 2 * kappa + 1));
    }
    let target = Signature::new(gens)?;
    let map: Vec<usize> = (0..sig.len()).collect();
    let diffs = model
        .differential()
        .iter()
        .map(|d| d.transport(&target, &map))
        .collect();
    Ok(Cdga::new(target, diffs)?)
}

/// Adds an even generator `t` of degree `|g|+1` with `dt = 0` and replaces
/// `d g` by `d g + t`. The result is truncated at `truncation`, or at the
/// default truncation when `None`.
pub fn borel_twist(
    c: &Cdga,
    g: &str,
    t_name: &str,
    truncation: Option<u32>,
) -> Result<Cdga, ModelError> {
    let sig = c.signature();
    let gi = sig
        .index_of(g)
        .ok_or_else(|| AlgebraError::UnknownGenerator(g.to_string()))?;
    let deg = sig.generator(gi).degree();
    if deg.is_multiple_of(2) {
        return Err(ModelError::ParityMismatch {
            generator: g.to_string(),
            degree: deg,
        });
    }
    let mut gens: Vec<(String, u32)> = sig
        .generators()
        .iter()
        .map(|s| (s.name().to_string(), s.degree()))
        .collect();
    gens.push((t_name.to_string(), deg + 1));
    let target = Signature::new(gens)?;
    let map: Vec<usize> = (0..sig.len()).collect();
    let mut diffs: Vec<Element> = c
        .differential()
        .iter()
        .map(|d| d.transport(&target, &map))
        .collect();
    let t = Element::generator_at(&target, sig.len());
    diffs[gi] = &diffs[gi] + &t;
    diffs.push(Element::zero(&target));
    let twisted = Cdga::new(target, diffs)?;
    let truncation = truncation.or_else(|| default_truncation(twisted.signature()));
    Ok(twisted.with_truncation(truncation))
}

/// Truncated Betti numbers of a twisted model next to those of the model
/// it is predicted to reduce to, compared in degrees `0..=truncation-2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BorelWindow {
    pub truncation: u32,
    pub compared_through: u32,
    pub twisted: BettiTable,
    pub comparison: BettiTable,
    pub agrees: bool,
    pub first_mismatch: Option<u32>,
}

pub fn borel_window(twisted: &Cdga, comparison: &Cdga) -> Result<BorelWindow, ModelError> {
    let truncation = twisted.truncation().ok_or(CdgaError::Untruncated)?;
    let tw = betti(twisted)?;
    let cmp = betti(comparison)?;
    let through = truncation.saturating_sub(2);
    let first_mismatch = (0..=through).find(|&k| tw.get(k as usize) != cmp.get(k as usize));
    Ok(BorelWindow {
        truncation,
        compared_through: through,
        twisted: tw,
        comparison: cmp,
        agrees: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Result of the principal-bundle twist analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub torus_rank: usize,
    /// Number of unknowns: one coefficient per degree-1 generator and
    /// polynomial generator `t_s`.
    pub ansatz_dimension: usize,
    /// Coefficients that vanish on every solution, as `generator:t_s`.
    pub forced: Vec<String>,
    pub free: Vec<String>,
    pub solution_dimension: usize,
    /// Degree-1 generators all of whose coefficients are forced to zero.
    pub forced_generators: Vec<String>,
    /// Degree-1 generators that admit a nonzero twist.
    pub free_generators: Vec<String>,
    pub fiber_generators: Vec<String>,
    /// The fiber generators among `free_generators`.
    pub free_fiber_generators: Vec<String>,
}

/// Solves for all twists `d' g = d g + Σ_s λ_{g,s} t_s` (one for every
/// degree-1 generator `g`, with `t_1..t_r` central of degree 2) such that
/// `d'² = 0`.
///
/// `d'² g = d'(d g)` is linear in the `λ`: replacing a degree-1 letter `h`
/// of a monomial `p·h·s` by `λ_h t` contributes `(-1)^{#odd letters in p}
/// λ_{h,s} p·s·t_s`. An empty `fiber_gens` means all degree-1 generators.
pub fn principal_obstruction(
    c: &Cdga,
    fiber_gens: &[&str],
    r: usize,
) -> Result<ObstructionReport, ModelError> {
    let sig = c.signature();
    let twisted: Vec<usize> = (0..sig.len())
        .filter(|&i| sig.generator(i).degree() == 1)
        .collect();
    let slot: BTreeMap<usize, usize> = twisted.iter().enumerate().map(|(p, &g)| (g, p)).collect();
    let fiber: Vec<String> = if fiber_gens.is_empty() {
        twisted.iter().map(|&i| sig.generator(i).name().to_string()).collect()
    } else {
        let mut out = Vec::new();
        for &name in fiber_gens {
            let i = sig
                .index_of(name)
                .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
            let degree = sig.generator(i).degree();
            if degree != 1 {
                return Err(ModelError::FiberDegree {
                    generator: name.to_string(),
                    degree,
                });
            }
            out.push(name.to_string());
        }
        out
    };

    // Equations for a single t; different t_s decouple into identical
    // copies of the same system.
    let mut rows: BTreeMap<(usize, Monomial), BTreeMap<usize, Rational>> = BTreeMap::new();
    for (g, d) in c.differential().iter().enumerate() {
        for (m, coeff) in d.terms() {
            let mut odd_before = 0u32;
            for (h, _) in m.exponents() {
                if let Some(&p) = slot.get(&h) {
                    let (prefix, _, suffix) = m.split_at(h);
                    let (_, rest) = crate::algebra::mono_mul_unchecked(&prefix, &suffix)
                        .expect("prefix and suffix are disjoint");
                    let sign = Sign::from_parity(odd_before % 2 == 1);
                    *rows
                        .entry((g, rest))
                        .or_default()
                        .entry(p)
                        .or_insert_with(Rational::zero) += sign.apply(coeff.clone());
                }
                if sig.generator(h).is_odd() {
                    odd_before += 1;
                }
            }
        }
    }
    let triplets: Vec<(usize, usize, Rational)> = rows
        .values()
        .enumerate()
        .flat_map(|(row, eq)| eq.iter().map(move |(&p, v)| (row, p, v.clone())))
        .collect();
    let m = SparseExactMatrix::from_triplets(rows.len(), twisted.len(), triplets)
        .expect("indices are in range");
    let kernel = rank_exact(&m).kernel_basis;
    let generator_free: Vec<bool> = (0..twisted.len())
        .map(|p| kernel.iter().any(|v| !v[p].is_zero()))
        .collect();

    let name = |p: usize| sig.generator(twisted[p]).name().to_string();
    let mut forced = Vec::new();
    let mut free = Vec::new();
    for (p, &is_free) in generator_free.iter().enumerate() {
        for s in 1..=r {
            let label = format!("{}:t{s}", name(p));
            if is_free {
                free.push(label);
            } else {
                forced.push(label);
            }
        }
    }
    let free_generators: Vec<String> = (0..twisted.len())
        .filter(|&p| generator_free[p])
        .map(name)
        .collect();
    let forced_generators = (0..twisted.len())
        .filter(|&p| !generator_free[p])
        .map(name)
        .collect();
    let free_fiber_generators = fiber
        .iter()
        .filter(|f| free_generators.contains(f))
        .cloned()
        .collect();
    Ok(ObstructionReport {
        torus_rank: r,
        ansatz_dimension: twisted.len() * r,
        forced,
        free,
        solution_dimension: kernel.len() * r,
        forced_generators,
        free_generators,
        fiber_generators: fiber,
        free_fiber_generators,
    })
}

/// Applies one twist found by [`principal_obstruction`] and returns the
/// twisted algebra, or the `d²` violation if the choice is not a solution.
pub fn twist_with(
    c: &Cdga,
    twists: &[(&str, usize, Rational)],
    r: usize,
) -> Result<Cdga, ModelError> {
    let sig = c.signature();
    let mut gens: Vec<(String, u32)> = sig
        .generators()
        .iter()
        .map(|g| (g.name().to_string(), g.degree()))
        .collect();
    gens.extend((1..=r).map(|s| (format!("t{s}"), 2)));
    let target: Arc<Signature> = Signature::new(gens)?;
    let map: Vec<usize> = (0..sig.len()).collect();
    let mut diffs: Vec<Element> = c
        .differential()
        .iter()
        .map(|d| d.transport(&target, &map))
        .collect();
    diffs.extend((0..r).map(|_| Element::zero(&target)));
    for (g, s, lambda) in twists {
        let gi = sig
            .index_of(g)
            .ok_or_else(|| AlgebraError::UnknownGenerator(g.to_string()))?;
        if *s == 0 || *s > r {
            return Err(ModelError::OutOfRange(format!("t{s} with torus rank {r}")));
        }
        let t = Element::generator_at(&target, sig.len() + s - 1).scale(lambda);
        diffs[gi] = &diffs[gi] + &t;
    }
    Ok(Cdga::new(target, diffs)?)
}

/// Reference values of `dim H*(X_r)` for `r = 0..=9`.
pub const XR_REFERENCE_TOTALS: [usize; 10] = [3, 6, 8, 12, 16, 26, 40, 64, 104, 180];

pub const XR_ZERO_NOTE: &str = "X_0 is the exterior algebra on two closed degree-1 generators \
     (the 2-torus), so its total Betti number is 4; the reference value 3 does not match this model";

/// One row of the `X_r` table: computed total against `2^r` and the
/// reference value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XrRow {
    pub r: usize,
    pub torus_bound: u64,
    pub total: usize,
    pub reference: Option<usize>,
    pub matches_reference: Option<bool>,
    /// `total < 2^r`.
    pub below_bound: bool,
    pub note: Option<&'static str>,
}

pub fn xr_row(r: usize) -> Result<XrRow, ModelError> {
    if r > 62 {
        return Err(ModelError::OutOfRange(format!("r = {r} exceeds 62")));
    }
    let total = betti(&xr_model(r))?.total;
    let reference = XR_REFERENCE_TOTALS.get(r).copied();
    let torus_bound = 1u64 << r;
    Ok(XrRow {
        r,
        torus_bound,
        total,
        reference,
        matches_reference: reference.map(|x| x == total),
        below_bound: (total as u64) < torus_bound,
        note: (r == 0).then_some(XR_ZERO_NOTE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xr_rows() {
        let zero = xr_row(0).unwrap();
        assert_eq!((zero.total, zero.matches_reference), (4, Some(false)));
        assert!(zero.note.is_some());
        let five = xr_row(5).unwrap();
        assert_eq!((five.total, five.torus_bound, five.below_bound), (26, 32, true));
        assert!(!xr_row(4).unwrap().below_bound);
    }
    use crate::cohomology::betti;

    #[test]
    fn low_rank_upper_triangular_models() {
        // x_4_3 precedes x_3_1 in the signature, so -x_3_1*x_4_3 prints
        // as +x_4_3*x_3_1.
        let u2 = upper_tri_model(2);
        assert_eq!(u2.signature().len(), 1);
        assert!(u2.differential()[0].is_zero());
        let u4 = upper_tri_model(4);
        assert_eq!(
            u4.d_of("x_4_1").unwrap().to_string(),
            "-x_2_1*x_4_2 + x_4_3*x_3_1"
        );
    }

    #[test]
    fn split_5_4_has_abelian_fiber() {
        let t = split_at_k(5, 4).unwrap();
        let names: Vec<&str> = t.fiber.signature().generators().iter().map(|g| g.name()).collect();
        assert_eq!(names, ["x_4_1", "x_5_2", "x_5_1"]);
        assert!(t.fiber_is_abelian());
        assert_eq!(names.len() as u64, d_formula(5, 4).unwrap());
    }

    #[test]
    fn split_5_3_fiber_differential() {
        let t = split_at_k(5, 3).unwrap();
        assert!(!t.fiber_is_abelian());
        assert_eq!(t.fiber.d_of("x_5_1").unwrap().to_string(), "-x_3_1*x_5_3");
    }

    #[test]
    fn split_3_3_bookkeeping() {
        let t = split_at_k(3, 3).unwrap();
        let base: Vec<&str> = t.base.signature().generators().iter().map(|g| g.name()).collect();
        assert_eq!(base, ["x_2_1", "x_3_2"]);
        assert_eq!(t.fiber.signature().len(), 1);
        assert_eq!(t.base_inclusion, [0, 1]);
        assert_eq!(t.fiber_projection, [None, None, Some(0)]);
    }

    #[test]
    fn fiber_is_total_modulo_base() {
        for (n, k) in [(5, 3), (6, 3), (6, 4), (5, 2)] {
            let t = split_at_k(n, k).unwrap();
            let mask: Vec<bool> = t.fiber_projection.iter().map(Option::is_none).collect();
            let fsig = t.fiber.signature();
            for (g, p) in t.fiber_projection.iter().enumerate() {
                let Some(p) = p else { continue };
                let killed = t.total.differential()[g].kill_generators(&mask);
                let map: Vec<usize> = t.fiber_projection.iter().map(|x| x.unwrap_or(0)).collect();
                assert_eq!(killed.transport(fsig, &map), t.fiber.differential()[*p]);
            }
            for (bi, &ti) in t.base_inclusion.iter().enumerate() {
                let map = &t.base_inclusion;
                assert_eq!(
                    t.base.differential()[bi].transport(t.total.signature(), map),
                    t.total.differential()[ti]
                );
            }
        }
    }

    #[test]
    fn formulas() {
        assert_eq!(d_formula(5, 4).unwrap(), 3);
        assert_eq!(c_formula(5, 4).unwrap(), 7);
        for n in 2..20 {
            assert_eq!(d_formula(n, 2).unwrap() as usize, n * (n - 1) / 2);
            assert_eq!(c_formula(n, 2).unwrap(), 0);
        }
        assert!(d_formula(5, 6).is_err());
        assert!(c_formula(5, 1).is_err());
    }

    #[test]
    fn degree_shift_grading() {
        let s = degree_shift(&upper_tri_model(3), 1).unwrap();
        let degs: Vec<u32> = s.signature().generators().iter().map(|g| g.degree()).collect();
        assert_eq!(degs, [3, 3, 5]);
        assert_eq!(degree_shift(&upper_tri_model(4), 0).unwrap(), upper_tri_model(4));
        assert!(matches!(degree_shift(&xr_model(2), 1), Err(ModelError::Unlabelled(_))));
    }

    #[test]
    fn twist_of_a_circle_is_contractible() {
        let c = borel_twist(&torus_model(1), "x1", "t", None).unwrap();
        let t = betti(&c).unwrap();
        assert_eq!(t.truncated_at, Some(5));
        assert_eq!(t.per_degree, [1, 0, 0, 0, 0]);
    }

    #[test]
    fn twist_of_heisenberg_leaves_a_two_torus() {
        let c = borel_twist(&upper_tri_model(3), "x_3_1", "t", None).unwrap();
        let w = borel_window(&c, &torus_model(2)).unwrap();
        assert!(w.agrees, "{w:?}");
        assert_eq!(w.twisted.total, 4);
    }

    #[test]
    fn twist_parity_is_checked() {
        let c = borel_twist(&torus_model(1), "x1", "t", None).unwrap();
        assert!(matches!(
            borel_twist(&c, "t", "s", None),
            Err(ModelError::ParityMismatch { .. })
        ));
    }

    #[test]
    fn x5_obstruction() {
        let r = principal_obstruction(&xr_model(5), &["x5"], 1).unwrap();
        assert_eq!(r.ansatz_dimension, 7);
        assert_eq!(r.forced_generators, ["a", "b", "x1", "x2", "x3", "x4"]);
        assert_eq!(r.free, ["x5:t1"]);
        assert_eq!(r.solution_dimension, 1);
        assert_eq!(r.free_fiber_generators, ["x5"]);
    }

    #[test]
    fn torus_obstruction_is_unconstrained() {
        let r = principal_obstruction(&torus_model(3), &[], 3).unwrap();
        assert_eq!(r.ansatz_dimension, 9);
        assert!(r.forced.is_empty());
        assert_eq!(r.solution_dimension, 9);
    }

    #[test]
    fn u4_obstruction_keeps_the_corner() {
        let r = principal_obstruction(&upper_tri_model(4), &[], 1).unwrap();
        assert_eq!(r.free_generators, ["x_4_1"]);
        assert_eq!(r.solution_dimension, 1);
    }

    #[test]
    fn forced_twist_breaks_d_squared() {
        let x3 = xr_model(3);
        assert!(twist_with(&x3, &[("x3", 1, q(1))], 1).is_ok());
        let err = twist_with(&x3, &[("x2", 1, q(1))], 1).unwrap_err();
        let ModelError::Cdga(CdgaError::DSquared(v)) = err else {
            panic!("expected d² failure");
        };
        assert_eq!(v.generator, "x3");
    }

    #[test]
    fn obstruction_rejects_high_degree_fiber() {
        let c = degree_shift(&upper_tri_model(3), 1).unwrap();
        assert!(matches!(
            principal_obstruction(&c, &["x_3_1"], 1),
            Err(ModelError::FiberDegree { .. })
        ));
    }
}
