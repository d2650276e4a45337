//! `family:params` model names, joined with `*` for tensor products.

use sullivan::cohomology::tensor_product_with;
use sullivan::cohomology::RenamePolicy;
use sullivan::lie::{chevalley_eilenberg, dual_homotopy_lie, u_n_presentation};
use sullivan::models::{degree_shift, split_at_k, torus_model, upper_tri_model, xr_model, MAX_UPPER_TRI};
use sullivan::{Cdga, LiePresentation};

use crate::Failure;

pub const FAMILIES: &str =
    "xr:R, upper-tri:N, torus:K, split:N,K, shift:N,K, upper-tri-lie:N, xr-lie:R";

pub enum Builtin {
    Algebra(Cdga),
    Lie(LiePresentation),
}

impl Builtin {
    pub fn into_cdga(self) -> Result<Cdga, Failure> {
        match self {
            Builtin::Algebra(c) => Ok(c),
            Builtin::Lie(l) => chevalley_eilenberg(&l).map_err(|e| Failure::Usage(e.to_string())),
        }
    }

    pub fn into_lie(self) -> Result<LiePresentation, Failure> {
        match self {
            Builtin::Lie(l) => Ok(l),
            Builtin::Algebra(c) => dual_homotopy_lie(&c).map_err(|e| Failure::Usage(e.to_string())),
        }
    }
}

fn params(name: &str, family: &str, raw: &str, count: usize) -> Result<Vec<usize>, Failure> {
    let out: Vec<usize> = raw
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("'{name}': {family} takes {count} non-negative integer parameter(s)")))?;
    if out.len() != count {
        return Err(Failure::Usage(format!("'{name}': {family} takes {count} parameter(s)")));
    }
    Ok(out)
}

fn upper_n(name: &str, n: usize) -> Result<usize, Failure> {
    if (2..=MAX_UPPER_TRI).contains(&n) {
        Ok(n)
    } else {
        Err(Failure::Usage(format!("'{name}': n must lie in 2..={MAX_UPPER_TRI}")))
    }
}

fn single(name: &str) -> Result<Builtin, Failure> {
    let (family, raw) = name
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("'{name}': expected family:params, one of {FAMILIES}")))?;
    let usage = |e: &dyn std::fmt::Display| Failure::Usage(format!("'{name}': {e}"));
    Ok(match family {
        "xr" | "xr-lie" => {
            let r = params(name, family, raw, 1)?[0];
            if r > 62 {
                return Err(Failure::Usage(format!("'{name}': r must be at most 62")));
            }
            if family == "xr" {
                Builtin::Algebra(xr_model(r))
            } else {
                Builtin::Lie(dual_homotopy_lie(&xr_model(r)).map_err(|e| usage(&e))?)
            }
        }
        "upper-tri" => Builtin::Algebra(upper_tri_model(upper_n(name, params(name, family, raw, 1)?[0])?)),
        "upper-tri-lie" => {
            let n = upper_n(name, params(name, family, raw, 1)?[0])?;
            Builtin::Lie(u_n_presentation(n).map_err(|e| usage(&e))?)
        }
        "torus" => {
            let k = params(name, family, raw, 1)?[0];
            if k > 64 {
                return Err(Failure::Usage(format!("'{name}': k must be at most 64")));
            }
            Builtin::Algebra(torus_model(k))
        }
        "split" => {
            let p = params(name, family, raw, 2)?;
            Builtin::Algebra(split_at_k(p[0], p[1]).map_err(|e| usage(&e))?.fiber)
        }
        "shift" => {
            let p = params(name, family, raw, 2)?;
            let n = upper_n(name, p[0])?;
            let kappa = u32::try_from(p[1]).map_err(|e| usage(&e))?;
            Builtin::Algebra(degree_shift(&upper_tri_model(n), kappa).map_err(|e| usage(&e))?)
        }
        _ => return Err(Failure::Usage(format!("unknown builtin family '{family}'; known: {FAMILIES}"))),
    })
}

/// Resolves `name`. Factors of a product are algebras; Lie factors go
/// through the Chevalley-Eilenberg complex, and clashing names get the
/// suffix `_2`, `_3`, ... by factor position.
pub fn resolve(name: &str) -> Result<Builtin, Failure> {
    let parts: Vec<&str> = name.split('*').map(str::trim).collect();
    if parts.len() == 1 {
        return single(parts[0]);
    }
    let mut acc = single(parts[0])?.into_cdga()?;
    for (p, part) in parts.iter().enumerate().skip(1) {
        let next = single(part)?.into_cdga()?;
        let policy = RenamePolicy::SuffixRight(format!("_{}", p + 1));
        acc = tensor_product_with(&acc, &next, &policy).map_err(|e| Failure::Usage(format!("'{name}': {e}")))?;
    }
    Ok(Builtin::Algebra(acc))
}
