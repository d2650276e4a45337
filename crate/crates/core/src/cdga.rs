//! Differentials on free graded-commutative algebras.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{
    mono_mul_unchecked, same_signature, Element, Homogeneity, Monomial, Rational, Sign, Signature,
};
use crate::linalg::SparseExactMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSquaredViolation {
    pub generator: String,
    pub residue: Element,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CdgaError {
    #[error("{expected} differential values expected, {found} given")]
    WrongArity { expected: usize, found: usize },
    #[error("differential of '{generator}' lives over a different signature")]
    SignatureMismatch { generator: String },
    #[error("d({generator}) must be homogeneous of degree {expected}, found {found:?}")]
    Inhomogeneous {
        generator: String,
        expected: u32,
        found: Homogeneity,
    },
    #[error("d² ≠ 0: d(d({})) = {}", .0.generator, .0.residue)]
    DSquared(Box<DSquaredViolation>),
    #[error("degree {degree} exceeds the truncation degree {truncation}")]
    TruncationExceeded { degree: u32, truncation: u32 },
    #[error("signature has even generators but no truncation degree")]
    Untruncated,
}

/// Applies the derivation determined by `diffs` (one value per generator)
/// to a single monomial, accumulating `coeff * d(m)` into `out`.
pub(crate) fn derive_monomial(
    sig: &Signature,
    diffs: &[Element],
    m: &Monomial,
    coeff: &Rational,
    out: &mut Element,
) {
    let mut odd_before = 0u32;
    for (g, e) in m.exponents() {
        let (prefix, _, suffix) = m.split_at(g);
        let odd = sig.generator(g).is_odd();
        // d(g^e) = e g^{e-1} dg for even g; for odd g, e = 1.
        let lead = Monomial::power_of(sig, g, e - 1);
        let sign = Sign::from_parity(odd_before % 2 == 1);
        let scale = Rational::from_integer(e.into()) * coeff;
        for (dm, dc) in diffs[g].terms() {
            let product = mono_mul_unchecked(&prefix, &lead)
                .and_then(|(s1, w)| mono_mul_unchecked(&w, dm).map(|(s2, w)| (s1 * s2, w)))
                .and_then(|(s, w)| mono_mul_unchecked(&w, &suffix).map(|(s3, w)| (s * s3, w)));
            if let Some((s, w)) = product {
                out.add_term(w, (sign * s).apply(dc * &scale));
            }
        }
        if odd {
            odd_before += 1;
        }
    }
}

pub(crate) fn derive(sig: &Arc<Signature>, diffs: &[Element], e: &Element) -> Element {
    let mut out = Element::zero(sig);
    for (m, c) in e.terms() {
        derive_monomial(sig, diffs, m, c, &mut out);
    }
    out
}

fn check_shape(sig: &Arc<Signature>, diffs: &[Element]) -> Result<(), CdgaError> {
    if diffs.len() != sig.len() {
        return Err(CdgaError::WrongArity {
            expected: sig.len(),
            found: diffs.len(),
        });
    }
    for (g, d) in sig.generators().iter().zip(diffs) {
        if !same_signature(sig, d.signature()) {
            return Err(CdgaError::SignatureMismatch {
                generator: g.name().to_string(),
            });
        }
    }
    Ok(())
}

fn check_degrees(sig: &Signature, diffs: &[Element]) -> Result<(), CdgaError> {
    for (g, d) in sig.generators().iter().zip(diffs) {
        match d.homogeneity() {
            Homogeneity::Zero => {}
            Homogeneity::Degree(k) if k == g.degree() + 1 => {}
            found => {
                return Err(CdgaError::Inhomogeneous {
                    generator: g.name().to_string(),
                    expected: g.degree() + 1,
                    found,
                })
            }
        }
    }
    Ok(())
}

/// Checks that `d(d(g)) = 0` for every generator, which suffices for a
/// derivation. The error names the first failing generator and carries its
/// residue. Degrees are not looked at here.
pub fn check_d_squared(sig: &Arc<Signature>, diffs: &[Element]) -> Result<(), CdgaError> {
    check_shape(sig, diffs)?;
    for (g, d) in sig.generators().iter().zip(diffs) {
        let residue = derive(sig, diffs, d);
        if !residue.is_zero() {
            return Err(CdgaError::DSquared(Box::new(DSquaredViolation {
                generator: g.name().to_string(),
                residue,
            })));
        }
    }
    Ok(())
}

/// A validated commutative differential graded algebra. The only way to
/// obtain one is through [`Cdga::new`], which checks homogeneity and
/// `d² = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdga {
    sig: Arc<Signature>,
    differential: Vec<Element>,
    truncation: Option<u32>,
}

impl Cdga {
    pub fn new(sig: Arc<Signature>, differential: Vec<Element>) -> Result<Cdga, CdgaError> {
        // d² first: a non-nilpotent differential is the more useful report
        // even when some value also has the wrong degree.
        check_d_squared(&sig, &differential)?;
        check_degrees(&sig, &differential)?;
        let truncation = default_truncation(&sig);
        Ok(Cdga {
            sig,
            differential,
            truncation,
        })
    }

    /// Convenience constructor from `(name, degree, d)` triples, where `d`
    /// is built against the finished signature.
    pub fn from_fn<F>(generators: &[(&str, u32)], d: F) -> Result<Cdga, crate::Error>
    where
        F: Fn(&Arc<Signature>, &str) -> Result<Element, crate::algebra::AlgebraError>,
    {
        let sig = Signature::new(generators.iter().map(|&(n, k)| (n, k)))?;
        let diffs = generators
            .iter()
            .map(|&(n, _)| d(&sig, n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Cdga::new(sig, diffs)?)
    }

    /// Replaces the truncation degree. `None` on a signature with even
    /// generators leaves the algebra infinite; cohomology then refuses it.
    pub fn with_truncation(mut self, truncation: Option<u32>) -> Cdga {
        self.truncation = truncation;
        self
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn differential(&self) -> &[Element] {
        &self.differential
    }

    pub fn d_of(&self, name: &str) -> Option<&Element> {
        self.sig.index_of(name).map(|i| &self.differential[i])
    }

    pub fn truncation(&self) -> Option<u32> {
        if self.sig.is_purely_odd() {
            None
        } else {
            self.truncation
        }
    }

    pub fn is_default_truncation(&self) -> bool {
        self.truncation() == default_truncation(&self.sig)
    }

    pub fn is_finite(&self) -> bool {
        self.sig.is_purely_odd()
    }

    /// Highest degree whose cohomology is computed: the top exterior degree
    /// for purely odd signatures, one below the truncation otherwise.
    pub fn top_degree(&self) -> Result<u32, CdgaError> {
        if self.sig.is_purely_odd() {
            Ok(self.sig.odd_degree_sum())
        } else {
            self.truncation
                .map(|t| t.saturating_sub(1))
                .ok_or(CdgaError::Untruncated)
        }
    }

    pub fn apply_d(&self, e: &Element) -> Element {
        derive(&self.sig, &self.differential, e)
    }

    pub fn basis(&self, n: u32) -> Vec<Monomial> {
        self.sig.basis_of_degree(n)
    }

    fn check_range(&self, degree: u32) -> Result<(), CdgaError> {
        if self.sig.is_purely_odd() {
            return Ok(());
        }
        match self.truncation {
            None => Err(CdgaError::Untruncated),
            Some(t) if degree > t => Err(CdgaError::TruncationExceeded {
                degree,
                truncation: t,
            }),
            Some(_) => Ok(()),
        }
    }

    /// Matrix of `d: C^n → C^{n+1}` in the canonical bases; column `j` is
    /// the image of the `j`-th degree-`n` monomial.
    pub fn differential_matrix(&self, n: u32) -> Result<SparseExactMatrix, CdgaError> {
        self.check_range(n + 1)?;
        let source = self.basis(n);
        let target = self.basis(n + 1);
        let index: HashMap<&Monomial, usize> =
            target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let one = Rational::one();
        let mut triplets = Vec::new();
        for (j, m) in source.iter().enumerate() {
            let mut image = Element::zero(&self.sig);
            derive_monomial(&self.sig, &self.differential, m, &one, &mut image);
            for (w, c) in image.terms() {
                triplets.push((index[w], j, c.clone()));
            }
        }
        Ok(SparseExactMatrix::from_triplets(target.len(), source.len(), triplets)
            .expect("indices come from the bases"))
    }

    /// Coordinates of a homogeneous element in the canonical basis of
    /// degree `n`.
    pub fn coordinates(&self, e: &Element, n: u32) -> Vec<Rational> {
        let basis = self.basis(n);
        let index: HashMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![Rational::zero(); basis.len()];
        for (m, c) in e.terms() {
            if let Some(&i) = index.get(m) {
                v[i] = c.clone();
            }
        }
        v
    }

    pub fn element_from_coordinates(&self, v: &[Rational], n: u32) -> Element {
        let mut e = Element::zero(&self.sig);
        for (m, c) in self.basis(n).into_iter().zip(v) {
            e.add_term(m, c.clone());
        }
        e
    }
}

/// Odd-degree sum plus twice the largest even degree; `None` when there are
/// no even generators.
pub fn default_truncation(sig: &Signature) -> Option<u32> {
    sig.max_even_degree()
        .map(|m| sig.odd_degree_sum() + 2 * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational_from_int as q;
    use proptest::prelude::*;

    fn x5() -> Cdga {
        let names = ["a", "b", "x1", "x2", "x3", "x4", "x5"];
        let gens: Vec<(&str, u32)> = names.iter().map(|&n| (n, 1)).collect();
        Cdga::from_fn(&gens, |sig, n| match n {
            "a" | "b" => Ok(Element::zero(sig)),
            "x1" => Element::word(sig, q(1), &["a", "b"]),
            _ => {
                let i: usize = n[1..].parse().unwrap();
                Element::word(sig, q(1), &["a", &format!("x{}", i - 1)])
            }
        })
        .unwrap()
    }

    fn heisenberg() -> Cdga {
        Cdga::from_fn(&[("x_2_1", 1), ("x_3_2", 1), ("x_3_1", 1)], |sig, n| {
            if n == "x_3_1" {
                Element::word(sig, q(-1), &["x_2_1", "x_3_2"])
            } else {
                Ok(Element::zero(sig))
            }
        })
        .unwrap()
    }

    #[test]
    fn x5_cocycle_is_closed() {
        let c = x5();
        let sig = c.signature();
        let z = &Element::word(sig, q(1), &["x1", "x2"]).unwrap()
            - &Element::word(sig, q(1), &["b", "x3"]).unwrap();
        assert!(c.apply_d(&z).is_zero());
        assert!(c.apply_d(&Element::one(sig)).is_zero());
    }

    #[test]
    fn heisenberg_differential() {
        let c = heisenberg();
        let sig = c.signature();
        let d = c.apply_d(&Element::generator(sig, "x_3_1").unwrap());
        assert_eq!(d, Element::word(sig, q(-1), &["x_2_1", "x_3_2"]).unwrap());
        let m = c.differential_matrix(1).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 3));
        assert_eq!(crate::linalg::rank(&m), 1);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn failing_d_squared_reports_residue() {
        let result = Cdga::from_fn(&[("u", 2), ("a", 1), ("v", 3)], |sig, n| match n {
            "u" => Ok(Element::zero(sig)),
            "a" => Element::generator(sig, "u"),
            _ => Element::word(sig, q(1), &["u", "a"]),
        });
        let Err(crate::Error::Cdga(CdgaError::DSquared(v))) = result else {
            panic!("expected a d² violation, got {result:?}");
        };
        assert_eq!(v.generator, "v");
        let sig = v.residue.signature().clone();
        // d(u*a) = du*a + u*da = u², the Leibniz sign is + since |u| is even.
        assert_eq!(v.residue, Element::word(&sig, q(1), &["u", "u"]).unwrap());
    }

    #[test]
    fn inhomogeneous_value_is_rejected() {
        let result = Cdga::from_fn(&[("a", 1), ("b", 1)], |sig, n| match n {
            "a" => Element::generator(sig, "b"),
            _ => Ok(Element::zero(sig)),
        });
        assert!(matches!(
            result,
            Err(crate::Error::Cdga(CdgaError::Inhomogeneous { .. }))
        ));
    }

    #[test]
    fn torus_matrices_vanish() {
        let c = Cdga::from_fn(&[("x", 1), ("y", 1), ("z", 1)], |sig, _| Ok(Element::zero(sig)))
            .unwrap();
        for n in 0..=3 {
            assert!(c.differential_matrix(n).unwrap().is_zero());
        }
    }

    #[test]
    fn unit_column_is_zero() {
        let m = x5().differential_matrix(0).unwrap();
        assert_eq!((m.rows(), m.cols()), (7, 1));
        assert!(m.is_zero());
    }

    #[test]
    fn truncation_guards_matrices() {
        let c = Cdga::from_fn(&[("x", 1), ("t", 2)], |sig, n| match n {
            "x" => Element::generator(sig, "t"),
            _ => Ok(Element::zero(sig)),
        })
        .unwrap();
        assert_eq!(c.truncation(), Some(5));
        assert!(c.differential_matrix(4).is_ok());
        assert_eq!(
            c.differential_matrix(5),
            Err(CdgaError::TruncationExceeded {
                degree: 6,
                truncation: 5
            })
        );
        let open = c.with_truncation(None);
        assert_eq!(open.differential_matrix(0), Err(CdgaError::Untruncated));
    }

    #[test]
    fn euler_characteristic_of_odd_complex_vanishes() {
        let c = x5();
        let chi: i64 = (0..=7)
            .map(|n| (-1i64).pow(n) * c.basis(n).len() as i64)
            .sum();
        assert_eq!(chi, 0);
    }

    #[test]
    fn matrices_compose_to_zero() {
        let c = x5();
        for n in 0..7 {
            let dn = c.differential_matrix(n).unwrap();
            let dn1 = c.differential_matrix(n + 1).unwrap();
            assert!(dn1.mul(&dn).unwrap().is_zero(), "degree {n}");
        }
    }

    proptest! {
        #[test]
        fn leibniz_rule_on_x5(
            a in proptest::collection::vec((0u64..128, -2i64..3), 1..4),
            b in proptest::collection::vec((0u64..128, -2i64..3), 1..4),
            da in 0u32..4,
            db in 0u32..4,
        ) {
            let c = x5();
            let sig = c.signature().clone();
            let build = |terms: &[(u64, i64)], deg: u32| {
                let mut e = Element::zero(&sig);
                for &(mask, k) in terms {
                    let exps: Vec<u32> = (0..7).map(|i| (mask >> i & 1) as u32).collect();
                    let m = Monomial::from_exponents(&sig, &exps).unwrap();
                    if sig.degree_of(&m) == deg {
                        e.add_term(m, q(k));
                    }
                }
                e
            };
            let x = build(&a, da);
            let y = build(&b, db);
            let lhs = c.apply_d(&(&x * &y));
            let sign = if da % 2 == 1 { q(-1) } else { q(1) };
            let rhs = &(&c.apply_d(&x) * &y) + &(&x * &c.apply_d(&y)).scale(&sign);
            prop_assert_eq!(lhs, rhs);
            // linearity
            prop_assert_eq!(c.apply_d(&(&x + &y)), &c.apply_d(&x) + &c.apply_d(&y));
        }
    }
}
