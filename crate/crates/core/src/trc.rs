//! Exact counterexample certificates: `n!` against `2^{d(n,k)}`, the
//! threshold `2^{(n-k)^2} >= n^{2n}`, ratio tables, and Betti totals of
//! the `X_r` family against `2^r`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cohomology::{betti, tensor_product_with, CohomologyError, RenamePolicy};
use crate::models::{d_formula, upper_tri_model, xr_model, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrcError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
}

/// Statements over `Z_(p)` are not covered by these certificates.
pub const SCOPE_NOTE: &str =
    "rational coefficients only; statements over Z_(p) and torsion are not certified";

/// Largest `n` for which [`TrcCertificate::with_computed_betti`] runs the
/// cohomology of `u(n)`.
pub const MAX_COMPUTED_N: usize = 5;

fn as_decimal<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrcCertificate {
    pub n: usize,
    pub k: usize,
    pub d_nk: u64,
    #[serde(serialize_with = "as_decimal")]
    pub factorial: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub power: BigUint,
    /// `n! < 2^{d(n,k)}`.
    pub inequality_holds: bool,
    /// `2^{(n-k)^2} >= n^{2n}`.
    pub stirling_threshold_holds: bool,
    pub fiber_rank: u64,
    pub computed_total_betti: Option<usize>,
    pub scope: &'static str,
}

impl TrcCertificate {
    /// Fills `computed_total_betti` with the Betti total of `u(n)` when
    /// `n <= MAX_COMPUTED_N`.
    pub fn with_computed_betti(mut self) -> Result<Self, TrcError> {
        if self.n <= MAX_COMPUTED_N {
            self.computed_total_betti = Some(betti(&upper_tri_model(self.n))?.total);
        }
        Ok(self)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// `n!` by recursive halving of the product range.
pub fn factorial_tree(n: usize) -> BigUint {
    fn product(lo: u64, hi: u64) -> BigUint {
        match hi - lo {
            0 => BigUint::from(lo),
            1 => BigUint::from(lo) * hi,
            _ => {
                let mid = lo + (hi - lo) / 2;
                product(lo, mid) * product(mid + 1, hi)
            }
        }
    }
    if n < 2 {
        BigUint::one()
    } else {
        product(2, n as u64)
    }
}

/// `⌈n/2⌉ + 1`, the smallest `k` with abelian fiber.
pub fn default_k(n: usize) -> usize {
    n.div_ceil(2) + 1
}

fn check(n: usize, k: usize) -> Result<(), TrcError> {
    if k < 2 || k > n {
        return Err(TrcError::OutOfRange(format!("need 2 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

pub fn stirling_threshold(n: usize, k: usize) -> Result<bool, TrcError> {
    check(n, k)?;
    let lhs = BigUint::one() << ((n - k) * (n - k));
    let rhs = BigUint::from(n).pow(2 * n as u32);
    Ok(lhs >= rhs)
}

pub fn trc_inequality(n: usize, k: usize) -> Result<TrcCertificate, TrcError> {
    check(n, k)?;
    let d = d_formula(n, k)?;
    let factorial = factorial(n);
    let power = BigUint::one() << d;
    Ok(TrcCertificate {
        n,
        k,
        d_nk: d,
        inequality_holds: factorial < power,
        stirling_threshold_holds: stirling_threshold(n, k)?,
        factorial,
        power,
        fiber_rank: d,
        computed_total_betti: None,
        scope: SCOPE_NOTE,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossoverScan {
    pub max_n: usize,
    /// Smallest `n` with `n! < 2^{d(n, ⌈n/2⌉+1)}`.
    pub minimal_n: Option<usize>,
    /// Every `n` in `2..=max_n` where the inequality holds.
    pub holds_at: Vec<usize>,
}

pub fn scan_min_crossover(max_n: usize) -> Result<CrossoverScan, TrcError> {
    let holds_at: Vec<usize> = (2..=max_n)
        .into_par_iter()
        .map(|n| trc_inequality(n, default_k(n)).map(|c| (n, c.inequality_holds)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter_map(|(n, holds)| holds.then_some(n))
        .collect();
    Ok(CrossoverScan {
        max_n,
        minimal_n: holds_at.first().copied(),
        holds_at,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioEntry {
    pub n: usize,
    pub k: usize,
    /// Exact `n! / 2^{d(n,k)}` in lowest terms, as `p/q`.
    #[serde(serialize_with = "as_fraction")]
    pub ratio: BigRational,
    /// Scientific notation, mantissa truncated to [`RATIO_DIGITS`] digits.
    pub decimal: String,
}

pub const RATIO_DIGITS: usize = 30;

fn as_fraction<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
}

/// Exact ratios `n! / 2^{d(n, k(n))}` for each `n` in the range, with
/// `k(n) = ⌈n/2⌉ + 1`.
pub fn ratio_table(ns: std::ops::RangeInclusive<usize>) -> Result<Vec<RatioEntry>, TrcError> {
    ns.into_par_iter()
        .map(|n| {
            let k = default_k(n);
            let c = trc_inequality(n, k)?;
            let ratio = BigRational::new(c.factorial.into(), c.power.into());
            let decimal = scientific(&ratio, RATIO_DIGITS);
            Ok(RatioEntry {
                n,
                k,
                ratio,
                decimal,
            })
        })
        .collect()
}

/// First `n` (paired with its predecessor) where the table fails to
/// decrease strictly, if any.
pub fn first_non_decrease(table: &[RatioEntry]) -> Option<(usize, usize)> {
    table
        .windows(2)
        .find(|w| w[1].ratio >= w[0].ratio)
        .map(|w| (w[0].n, w[1].n))
}

/// Scientific notation with `digits` significant digits, truncated toward
/// zero.
pub fn scientific(x: &BigRational, digits: usize) -> String {
    assert!(digits > 0);
    if x.is_zero() {
        return "0".to_string();
    }
    let (num, den) = (x.numer().magnitude().clone(), x.denom().magnitude().clone());
    let pow10 = |k: i64| BigUint::from(10u32).pow(k as u32);
    // e = floor(log10 x), found from the digit counts and fixed by one step.
    let mut e = num.to_str_radix(10).len() as i64 - den.to_str_radix(10).len() as i64;
    let scaled = |e: i64| -> (BigUint, BigUint) {
        if e >= 0 {
            (num.clone(), &den * pow10(e))
        } else {
            (&num * pow10(-e), den.clone())
        }
    };
    let (a, b) = scaled(e);
    if a < b {
        e -= 1;
    }
    let shift = digits as i64 - 1 - e;
    let (a, b) = if shift >= 0 {
        (&num * pow10(shift), den.clone())
    } else {
        (num.clone(), &den * pow10(-shift))
    };
    let mantissa = a.div_floor(&b).to_str_radix(10);
    let sign = if x.numer() < &num_bigint::BigInt::zero() { "-" } else { "" };
    let (lead, rest) = mantissa.split_at(1);
    if rest.is_empty() {
        format!("{sign}{lead}e{e}")
    } else {
        format!("{sign}{lead}.{rest}e{e}")
    }
}

/// Betti total of a model fibering over an `r`-torus, against `2^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XrCertificate {
    /// `X_r` factors; a single entry for `X_r` itself.
    pub factors: Vec<usize>,
    pub fiber_rank: usize,
    pub total_betti: usize,
    #[serde(serialize_with = "as_decimal")]
    pub torus_bound: BigUint,
    /// `total_betti < 2^r`.
    pub verdict: bool,
}

pub fn certificate_xr(r: usize) -> Result<XrCertificate, TrcError> {
    certificate_product(&[r])
}

/// Certificate for `X_{r_1} ⊗ ... ⊗ X_{r_m}`, computed directly on the
/// tensor product model.
pub fn certificate_product(factors: &[usize]) -> Result<XrCertificate, TrcError> {
    let Some((&first, rest)) = factors.split_first() else {
        return Err(TrcError::OutOfRange("no factors".into()));
    };
    let mut model = xr_model(first);
    for (p, &r) in rest.iter().enumerate() {
        let next = xr_model(r);
        let suffixed = RenamePolicy::SuffixRight(format!("_{}", p + 2));
        model = tensor_product_with(&model, &next, &suffixed)?;
    }
    let fiber_rank: usize = factors.iter().sum();
    let total_betti = betti(&model)?.total;
    let torus_bound = BigUint::one() << fiber_rank;
    Ok(XrCertificate {
        factors: factors.to_vec(),
        fiber_rank,
        total_betti,
        verdict: BigUint::from(total_betti) < torus_bound,
        torus_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let c = trc_inequality(5, 4).unwrap();
        assert_eq!(c.factorial, BigUint::from(120u32));
        assert_eq!(c.power, BigUint::from(8u32));
        assert!(!c.inequality_holds);
        assert!(!stirling_threshold(10, 9).unwrap());
        assert!(trc_inequality(5, 6).is_err());
    }

    #[test]
    fn n49() {
        let c = trc_inequality(49, 26).unwrap();
        assert_eq!(c.d_nk, 300);
        assert!(c.inequality_holds);
        // 2^{23^2} = 2^529 falls short of 49^98 ≈ 2^550.2.
        assert!(!c.stirling_threshold_holds);
        assert!(stirling_threshold(50, 26).unwrap());
        assert!(!stirling_threshold(51, 27).unwrap());
        assert!((52..=120).all(|n| stirling_threshold(n, default_k(n)).unwrap()));
    }

    #[test]
    fn factorials_agree() {
        for n in 0..=200 {
            assert_eq!(factorial(n), factorial_tree(n), "n = {n}");
        }
    }

    #[test]
    fn crossover() {
        let scan = scan_min_crossover(60).unwrap();
        assert_eq!(scan.minimal_n, Some(26));
        assert!(!scan.holds_at.contains(&27));
        assert!((28..=60).all(|n| scan.holds_at.contains(&n)));
    }

    #[test]
    fn ratio_values() {
        let t = ratio_table(5..=5).unwrap();
        assert_eq!(t[0].decimal, "1.50000000000000000000000000000e1");
        let t = ratio_table(49..=49).unwrap();
        assert!(t[0].ratio < BigRational::one());
    }

    #[test]
    fn scientific_rendering() {
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        assert_eq!(scientific(&r(1, 3), 4), "3.333e-1");
        assert_eq!(scientific(&r(100, 1), 1), "1e2");
        assert_eq!(scientific(&r(999, 1000), 2), "9.9e-1");
        assert_eq!(scientific(&r(-5, 2), 3), "-2.50e0");
    }

    #[test]
    fn xr_certificates() {
        let c = certificate_xr(5).unwrap();
        assert_eq!((c.total_betti, c.verdict), (26, true));
        let c = certificate_xr(4).unwrap();
        assert_eq!((c.total_betti, c.verdict), (16, false));
    }

    #[test]
    fn certificate_json_uses_strings() {
        let c = trc_inequality(5, 4).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["factorial"], "120");
        assert_eq!(v["power"], "8");
    }
}
