//! The `.cdga` text format.
//!
//! ```text
//! # comments run to the end of the line
//! algebra X2
//! gen a : 1
//! gen b : 1
//! gen x1 : 1
//! gen x2 : 1
//! d a = 0
//! d b = 0
//! d x1 = a*b
//! d x2 = a*x1
//! ```
//!
//! An optional `truncate D` line sets the truncation degree for algebras
//! with even generators. A Lie algebra is written as a `lie NAME` header,
//! one or more `basis` lines (entries `NAME` or `NAME:DEGREE`) and
//! `bracket A B = EXPR` lines.

mod parse;
mod serialize;

use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::algebra::{Element, Rational, Signature};
use crate::cdga::Cdga;
use crate::lie::{LieError, LiePresentation};

pub use parse::{parse, parse_bytes, parse_element};
pub use serialize::{serialize_cdga, serialize_lie};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiagCode {
    Syntax,
    UnknownGenerator,
    DuplicateGenerator,
    NonPositiveDegree,
    MalformedRational,
    InhomogeneousDifferential,
    MissingDifferential,
    DuplicateDifferential,
    MissingHeader,
    DuplicateHeader,
    TooManyGenerators,
    DuplicateBracket,
    InvalidUtf8,
}

impl DiagCode {
    pub fn code(self) -> &'static str {
        match self {
            DiagCode::Syntax => "E001",
            DiagCode::UnknownGenerator => "E002",
            DiagCode::DuplicateGenerator => "E003",
            DiagCode::NonPositiveDegree => "E004",
            DiagCode::MalformedRational => "E005",
            DiagCode::InhomogeneousDifferential => "E006",
            DiagCode::MissingDifferential => "E007",
            DiagCode::DuplicateDifferential => "E008",
            DiagCode::MissingHeader => "E009",
            DiagCode::DuplicateHeader => "E010",
            DiagCode::TooManyGenerators => "E011",
            DiagCode::DuplicateBracket => "E012",
            DiagCode::InvalidUtf8 => "E013",
        }
    }
}

/// A parse error anchored in the source. `span` is a byte range into the
/// text; `line` and `column` are 1-based, the column counted in characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub span: Range<usize>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: error[{}]: {}",
            self.line,
            self.column,
            self.code.code(),
            self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Rational,
    pub names: Vec<Spanned<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub terms: Vec<Term>,
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenDecl {
    pub name: Spanned<String>,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffDecl {
    pub target: Spanned<String>,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: Spanned<String>,
    pub truncation: Option<u32>,
    pub generators: Vec<GenDecl>,
    pub differentials: Vec<DiffDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketDecl {
    pub left: Spanned<String>,
    pub right: Spanned<String>,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieDecl {
    pub name: Spanned<String>,
    pub basis: Vec<(Spanned<String>, u32)>,
    pub brackets: Vec<BracketDecl>,
}

/// Parsed source: at most one algebra and at most one Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    pub text: String,
    pub algebra: Option<AlgebraDecl>,
    pub lie: Option<LieDecl>,
}

impl SourceDocument {
    /// Builds and validates the algebra, including the `d² = 0` check.
    /// `Ok(None)` when the document declares no algebra.
    pub fn cdga(&self) -> Result<Option<Cdga>, crate::Error> {
        let Some(alg) = &self.algebra else {
            return Ok(None);
        };
        let sig = Signature::new(alg.generators.iter().map(|g| (g.name.value.as_str(), g.degree)))?;
        let mut diffs: Vec<Element> = (0..sig.len()).map(|_| Element::zero(&sig)).collect();
        for d in &alg.differentials {
            let i = sig.index_of(&d.target.value).expect("checked by the parser");
            for term in &d.expr.terms {
                let names: Vec<&str> = term.names.iter().map(|n| n.value.as_str()).collect();
                let w = Element::word(&sig, term.coefficient.clone(), &names)?;
                diffs[i] = &diffs[i] + &w;
            }
        }
        let mut c = Cdga::new(sig, diffs)?;
        if let Some(t) = alg.truncation {
            c = c.with_truncation(Some(t));
        }
        Ok(Some(c))
    }

    /// Builds and validates the Lie algebra, including the Jacobi check.
    pub fn lie(&self) -> Result<Option<LiePresentation>, LieError> {
        let Some(decl) = &self.lie else {
            return Ok(None);
        };
        let basis: Vec<String> = decl.basis.iter().map(|(n, _)| n.value.clone()).collect();
        let degrees = decl.basis.iter().map(|(_, d)| *d).collect();
        let index = |name: &str| basis.iter().position(|b| b == name).expect("checked by the parser");
        let mut entries = Vec::new();
        for b in &decl.brackets {
            let (i, j) = (index(&b.left.value), index(&b.right.value));
            for term in &b.expr.terms {
                entries.push((i, j, index(&term.names[0].value), term.coefficient.clone()));
            }
        }
        LiePresentation::graded(basis.clone(), degrees, entries).map(Some)
    }

    pub fn algebra_name(&self) -> Option<&str> {
        self.algebra.as_ref().map(|a| a.name.value.as_str())
    }
}
