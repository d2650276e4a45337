use std::fmt::Write;

use num_traits::Signed;

use crate::algebra::{format_rational, Rational};
use crate::cdga::Cdga;
use crate::lie::LiePresentation;

/// `c * w1 * w2 + c * ...`, coefficients always written, `0` for the
/// empty sum.
fn write_sum<'a, I>(out: &mut String, terms: I)
where
    I: IntoIterator<Item = (Rational, Vec<&'a str>)>,
{
    let mut first = true;
    for (c, words) in terms {
        let negative = c.is_negative();
        let abs = c.abs();
        if first {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&format_rational(&abs));
        for w in words {
            out.push_str(" * ");
            out.push_str(w);
        }
        first = false;
    }
    if first {
        out.push('0');
    }
}

pub fn serialize_cdga(c: &Cdga, name: &str) -> String {
    let sig = c.signature();
    let mut out = String::new();
    writeln!(out, "algebra {name}").unwrap();
    if sig.has_even() && !c.is_default_truncation() {
        if let Some(t) = c.truncation() {
            writeln!(out, "truncate {t}").unwrap();
        }
    }
    for g in sig.generators() {
        writeln!(out, "gen {} : {}", g.name(), g.degree()).unwrap();
    }
    for (g, d) in sig.generators().iter().zip(c.differential()) {
        write!(out, "d {} = ", g.name()).unwrap();
        write_sum(
            &mut out,
            d.terms().iter().map(|(m, coeff)| (coeff.clone(), sig.monomial_word(m))),
        );
        out.push('\n');
    }
    out
}

/// Each stored bracket `[X_i, X_j]` (`i < j`) is written as `bracket X_j
/// X_i = ...` with the signs flipped.
pub fn serialize_lie(l: &LiePresentation, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "lie {name}").unwrap();
    out.push_str("basis");
    for (b, &d) in l.basis().iter().zip(l.degrees()) {
        if d == 0 {
            write!(out, " {b}").unwrap();
        } else {
            write!(out, " {b}:{d}").unwrap();
        }
    }
    out.push('\n');
    let mut current: Option<(usize, usize)> = None;
    let mut terms: Vec<(Rational, Vec<&str>)> = Vec::new();
    let flush = |out: &mut String, pair: (usize, usize), terms: &mut Vec<(Rational, Vec<&str>)>| {
        write!(out, "bracket {} {} = ", l.basis()[pair.1], l.basis()[pair.0]).unwrap();
        write_sum(out, terms.drain(..));
        out.push('\n');
    };
    for (i, j, k, c) in l.structure_constants() {
        if current.is_some_and(|p| p != (i, j)) {
            flush(&mut out, current.unwrap(), &mut terms);
        }
        current = Some((i, j));
        terms.push((-c, vec![l.basis()[k].as_str()]));
    }
    if let Some(p) = current {
        flush(&mut out, p, &mut terms);
    }
    out
}
