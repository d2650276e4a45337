//! Free graded-commutative algebras on named generators.
//!
//! Odd-degree generators are exterior and live in a 64-bit mask indexed by
//! signature position; even-degree generators are polynomial and carry
//! explicit exponents. Every monomial is stored in canonical word order
//! (signature order), so the sign produced by reordering a product is
//! absorbed into the coefficient of the owning [`Element`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Hard limit imposed by the bitmask representation.
pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator '{0}' has degree 0; degrees must be positive")]
    NonPositiveDegree(String),
    #[error("duplicate generator name '{0}'")]
    DuplicateName(String),
    #[error("invalid generator name '{0}'")]
    InvalidName(String),
    #[error("{0} generators requested; at most {MAX_GENERATORS} are supported")]
    TooManyGenerators(usize),
    #[error("operands belong to different signatures")]
    SignatureMismatch,
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    name: String,
    degree: u32,
    index: usize,
}

impl GeneratorSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// Ordered list of generators. Construct through [`Signature::new`], which
/// hands back an `Arc` so that elements can share it cheaply.
#[derive(Debug, Clone)]
pub struct Signature {
    generators: Vec<GeneratorSpec>,
    odd_mask: u64,
    by_name: HashMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new<I, S>(generators: I) -> Result<Arc<Signature>, AlgebraError>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut specs = Vec::new();
        let mut by_name = HashMap::new();
        let mut odd_mask = 0u64;
        for (index, (name, degree)) in generators.into_iter().enumerate() {
            let name = name.into();
            if index >= MAX_GENERATORS {
                return Err(AlgebraError::TooManyGenerators(index + 1));
            }
            if !is_identifier(&name) {
                return Err(AlgebraError::InvalidName(name));
            }
            if degree == 0 {
                return Err(AlgebraError::NonPositiveDegree(name));
            }
            if by_name.insert(name.clone(), index).is_some() {
                return Err(AlgebraError::DuplicateName(name));
            }
            if degree % 2 == 1 {
                odd_mask |= 1 << index;
            }
            specs.push(GeneratorSpec { name, degree, index });
        }
        Ok(Arc::new(Signature {
            generators: specs,
            odd_mask,
            by_name,
        }))
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, index: usize) -> &GeneratorSpec {
        &self.generators[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn odd_mask(&self) -> u64 {
        self.odd_mask
    }

    pub fn is_purely_odd(&self) -> bool {
        self.generators.iter().all(GeneratorSpec::is_odd)
    }

    pub fn has_even(&self) -> bool {
        !self.is_purely_odd()
    }

    /// Sum of the degrees of the odd generators: the top degree of the
    /// exterior part.
    pub fn odd_degree_sum(&self) -> u32 {
        self.generators
            .iter()
            .filter(|g| g.is_odd())
            .map(|g| g.degree)
            .sum()
    }

    pub fn max_even_degree(&self) -> Option<u32> {
        self.generators
            .iter()
            .filter(|g| !g.is_odd())
            .map(|g| g.degree)
            .max()
    }

    /// The monomial consisting of the single generator `index`.
    pub fn generator_monomial(&self, index: usize) -> Monomial {
        if self.generators[index].is_odd() {
            Monomial {
                odd: 1 << index,
                even: Vec::new(),
            }
        } else {
            Monomial {
                odd: 0,
                even: vec![(index as u32, 1)],
            }
        }
    }

    pub fn degree_of(&self, m: &Monomial) -> u32 {
        let odd: u32 = bits(m.odd).map(|i| self.generators[i].degree).sum();
        let even: u32 = m
            .even
            .iter()
            .map(|&(i, e)| self.generators[i as usize].degree * e)
            .sum();
        odd + even
    }

    fn contains(&self, m: &Monomial) -> bool {
        m.odd & !self.odd_mask == 0
            && m.even.iter().all(|&(i, _)| {
                (i as usize) < self.generators.len() && !self.generators[i as usize].is_odd()
            })
    }

    /// Product of two canonical monomials. `Ok(None)` means the product
    /// vanishes because an odd generator occurs in both factors.
    pub fn mono_mul(
        &self,
        a: &Monomial,
        b: &Monomial,
    ) -> Result<Option<(Sign, Monomial)>, AlgebraError> {
        if !self.contains(a) || !self.contains(b) {
            return Err(AlgebraError::SignatureMismatch);
        }
        Ok(mono_mul_unchecked(a, b))
    }

    /// All monomials of total degree `n`, ordered canonically.
    pub fn basis_of_degree(&self, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut odd = 0u64;
        let mut even = Vec::new();
        self.enumerate(0, n, &mut odd, &mut even, &mut out);
        out
    }

    fn enumerate(
        &self,
        index: usize,
        remaining: u32,
        odd: &mut u64,
        even: &mut Vec<(u32, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if remaining == 0 {
            out.push(Monomial {
                odd: *odd,
                even: even.clone(),
            });
            return;
        }
        if index == self.generators.len() {
            return;
        }
        let g = &self.generators[index];
        // Larger exponents first: this is exactly the canonical monomial order.
        if g.is_odd() {
            if g.degree <= remaining {
                *odd |= 1 << index;
                self.enumerate(index + 1, remaining - g.degree, odd, even, out);
                *odd &= !(1 << index);
            }
            self.enumerate(index + 1, remaining, odd, even, out);
        } else {
            let max = remaining / g.degree;
            for e in (1..=max).rev() {
                even.push((index as u32, e));
                self.enumerate(index + 1, remaining - e * g.degree, odd, even, out);
                even.pop();
            }
            self.enumerate(index + 1, remaining, odd, even, out);
        }
    }

    /// Renders a monomial as a `*`-separated word; the unit is `1`.
    pub fn format_monomial(&self, m: &Monomial) -> String {
        let names = self.monomial_word(m);
        if names.is_empty() {
            "1".to_string()
        } else {
            names.join("*")
        }
    }

    /// Generator names of the canonical word, with even powers repeated.
    pub fn monomial_word(&self, m: &Monomial) -> Vec<&str> {
        let mut word = Vec::new();
        for (i, e) in m.exponents() {
            for _ in 0..e {
                word.push(self.generators[i].name.as_str());
            }
        }
        word
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn apply(self, c: Rational) -> Rational {
        match self {
            Sign::Plus => c,
            Sign::Minus => -c,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self.is_minus() != rhs.is_minus())
    }
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// A monomial in canonical form: odd generators as a bitmask, even
/// generators as sorted `(index, exponent)` pairs with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    odd: u64,
    even: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.odd == 0 && self.even.is_empty()
    }

    /// Builds a monomial from an exponent vector indexed by generator.
    pub fn from_exponents(sig: &Signature, exponents: &[u32]) -> Option<Monomial> {
        if exponents.len() != sig.len() {
            return None;
        }
        let mut m = Monomial::one();
        for (i, &e) in exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if sig.generators[i].is_odd() {
                if e > 1 {
                    return None;
                }
                m.odd |= 1 << i;
            } else {
                m.even.push((i as u32, e));
            }
        }
        Some(m)
    }

    pub fn odd_mask(&self) -> u64 {
        self.odd
    }

    pub fn exponent(&self, index: usize) -> u32 {
        if self.odd >> index & 1 == 1 {
            return 1;
        }
        self.even
            .iter()
            .find(|&&(i, _)| i as usize == index)
            .map_or(0, |&(_, e)| e)
    }

    /// Nonzero `(generator index, exponent)` pairs in signature order.
    pub fn exponents(&self) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = bits(self.odd).map(|i| (i, 1)).collect();
        out.extend(self.even.iter().map(|&(i, e)| (i as usize, e)));
        out.sort_unstable();
        out
    }

    pub fn contains_generator(&self, index: usize) -> bool {
        self.exponent(index) > 0
    }

    /// Number of odd generators in the word.
    pub fn odd_count(&self) -> u32 {
        self.odd.count_ones()
    }

    /// Splits the word around generator `index` (which must occur):
    /// returns the factors strictly before and strictly after it, plus its
    /// exponent.
    pub(crate) fn split_at(&self, index: usize) -> (Monomial, u32, Monomial) {
        let below = (1u64 << index) - 1;
        let above = !below & !(1u64 << index);
        let prefix = Monomial {
            odd: self.odd & below,
            even: self
                .even
                .iter()
                .copied()
                .filter(|&(i, _)| (i as usize) < index)
                .collect(),
        };
        let suffix = Monomial {
            odd: self.odd & above,
            even: self
                .even
                .iter()
                .copied()
                .filter(|&(i, _)| (i as usize) > index)
                .collect(),
        };
        (prefix, self.exponent(index), suffix)
    }

    pub(crate) fn power_of(sig: &Signature, index: usize, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else if sig.generators[index].is_odd() {
            debug_assert_eq!(e, 1);
            Monomial {
                odd: 1 << index,
                even: Vec::new(),
            }
        } else {
            Monomial {
                odd: 0,
                even: vec![(index as u32, e)],
            }
        }
    }
}

impl Ord for Monomial {
    /// Lexicographic on exponent vectors in signature order, larger exponent
    /// first, so `x1*x2 < x1*x3 < x2*x3`.
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.odd ^ other.odd;
        let odd_pos = (diff != 0).then(|| diff.trailing_zeros());

        let mut even_pos: Option<(u32, Ordering)> = None;
        let (a, b) = (&self.even, &other.even);
        let mut k = 0;
        loop {
            match (a.get(k), b.get(k)) {
                (None, None) => break,
                (Some(&(i, _)), None) => {
                    even_pos = Some((i, Ordering::Less));
                    break;
                }
                (None, Some(&(j, _))) => {
                    even_pos = Some((j, Ordering::Greater));
                    break;
                }
                (Some(&(i, ea)), Some(&(j, eb))) => {
                    if i < j {
                        even_pos = Some((i, Ordering::Less));
                        break;
                    }
                    if j < i {
                        even_pos = Some((j, Ordering::Greater));
                        break;
                    }
                    if ea != eb {
                        even_pos = Some((i, eb.cmp(&ea)));
                        break;
                    }
                }
            }
            k += 1;
        }

        let odd_decision = odd_pos.map(|q| {
            let ord = if self.odd >> q & 1 == 1 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
            (q, ord)
        });
        match (odd_decision, even_pos) {
            (None, None) => Ordering::Equal,
            (Some((_, o)), None) | (None, Some((_, o))) => o,
            (Some((q, oq)), Some((p, op))) => {
                if q < p {
                    oq
                } else {
                    op
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn mono_mul_unchecked(a: &Monomial, b: &Monomial) -> Option<(Sign, Monomial)> {
    if a.odd & b.odd != 0 {
        return None;
    }
    // Inversions between the odd letters of `a` and those of `b`: for every
    // letter of `b`, count the letters of `a` sitting above it.
    let mut transpositions = 0u32;
    for j in bits(b.odd) {
        transpositions += (a.odd >> j >> 1).count_ones();
    }
    let even = if b.even.is_empty() {
        a.even.clone()
    } else if a.even.is_empty() {
        b.even.clone()
    } else {
        let mut merged: BTreeMap<u32, u32> = a.even.iter().copied().collect();
        for &(i, e) in &b.even {
            *merged.entry(i).or_insert(0) += e;
        }
        merged.into_iter().collect()
    };
    Some((
        Sign::from_parity(transpositions % 2 == 1),
        Monomial {
            odd: a.odd | b.odd,
            even,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Degree(u32),
    Mixed,
}

/// A finite rational combination of canonical monomials.
#[derive(Debug, Clone)]
pub struct Element {
    sig: Arc<Signature>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_signature(&self.sig, &other.sig) && self.terms == other.terms
    }
}

impl Eq for Element {}

pub(crate) fn same_signature(a: &Arc<Signature>, b: &Arc<Signature>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Element {
    pub fn zero(sig: &Arc<Signature>) -> Element {
        Element {
            sig: Arc::clone(sig),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(sig: &Arc<Signature>) -> Element {
        Element::term(sig, Monomial::one(), Rational::one())
    }

    pub fn term(sig: &Arc<Signature>, m: Monomial, c: Rational) -> Element {
        let mut e = Element::zero(sig);
        e.add_term(m, c);
        e
    }

    pub fn generator(sig: &Arc<Signature>, name: &str) -> Result<Element, AlgebraError> {
        let index = sig
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))?;
        Ok(Element::generator_at(sig, index))
    }

    pub fn generator_at(sig: &Arc<Signature>, index: usize) -> Element {
        Element::term(sig, sig.generator_monomial(index), Rational::one())
    }

    /// Product of the named generators in the given order (signs included),
    /// scaled by `c`.
    pub fn word(sig: &Arc<Signature>, c: Rational, names: &[&str]) -> Result<Element, AlgebraError> {
        let mut acc = Element::term(sig, Monomial::one(), c);
        for name in names {
            acc = acc.try_mul(&Element::generator(sig, name)?)?;
        }
        Ok(acc)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
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

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degrees = self.terms.keys().map(|m| self.sig.degree_of(m));
        match degrees.next() {
            None => Homogeneity::Zero,
            Some(d) => {
                if degrees.all(|e| e == d) {
                    Homogeneity::Degree(d)
                } else {
                    Homogeneity::Mixed
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero(&self.sig);
        }
        Element {
            sig: Arc::clone(&self.sig),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element, AlgebraError> {
        if !same_signature(&self.sig, &other.sig) {
            return Err(AlgebraError::SignatureMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element, AlgebraError> {
        if !same_signature(&self.sig, &other.sig) {
            return Err(AlgebraError::SignatureMismatch);
        }
        let mut out = Element::zero(&self.sig);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = mono_mul_unchecked(ma, mb) {
                    out.add_term(m, sign.apply(ca * cb));
                }
            }
        }
        Ok(out)
    }

    /// Rewrites the element over another signature, sending generator `i`
    /// to generator `map[i]`. Words are re-multiplied in their original
    /// order so that any reordering picks up the correct Koszul sign.
    pub fn transport(&self, target: &Arc<Signature>, map: &[usize]) -> Element {
        let mut out = Element::zero(target);
        for (m, c) in &self.terms {
            let mut acc = Some((Sign::Plus, Monomial::one()));
            for (i, e) in m.exponents() {
                let factor = Monomial::power_of(target, map[i], e);
                acc = acc.and_then(|(s, w)| {
                    mono_mul_unchecked(&w, &factor).map(|(s2, w2)| (s * s2, w2))
                });
            }
            if let Some((s, w)) = acc {
                out.add_term(w, s.apply(c.clone()));
            }
        }
        out
    }

    /// Drops every term that involves one of the listed generators.
    pub fn kill_generators(&self, mask: &[bool]) -> Element {
        Element {
            sig: Arc::clone(&self.sig),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponents().iter().all(|&(i, _)| !mask[i]))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl std::ops::Add for &Element {
    type Output = Element;

    /// # Panics
    /// If the operands live over different signatures.
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("signature mismatch in Element addition")
    }
}

impl std::ops::Sub for &Element {
    type Output = Element;

    fn sub(self, rhs: &Element) -> Element {
        self.try_add(&-rhs)
            .expect("signature mismatch in Element subtraction")
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;

    fn neg(self) -> Element {
        Element {
            sig: Arc::clone(&self.sig),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Mul for &Element {
    type Output = Element;

    /// # Panics
    /// If the operands live over different signatures.
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs)
            .expect("signature mismatch in Element multiplication")
    }
}

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let word = self.sig.format_monomial(m);
            if abs.is_one() {
                write!(f, "{word}")?;
            } else if m.is_one() {
                write!(f, "{}", format_rational(&abs))?;
            } else {
                write!(f, "{}*{word}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

pub fn rational_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
