use std::collections::{HashMap, HashSet};
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{
    AlgebraDecl, BracketDecl, DiagCode, Diagnostic, DiffDecl, Expr, GenDecl, LieDecl,
    SourceDocument, Spanned, Term,
};
use std::sync::Arc;

use crate::algebra::{Element, Rational, Signature, MAX_GENERATORS};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    /// Digits run straight into letters or a dot, as in `2x` or `1.5`.
    BadNumber(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Range<usize>,
}

/// Maps byte offsets to 1-based line and character column.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn at(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let start = before.rfind('\n').map_or(0, |p| p + 1);
        (line, before[start..].chars().count() + 1)
    }

    fn diag(&self, code: DiagCode, message: impl Into<String>, span: Range<usize>) -> Diagnostic {
        let (line, column) = self.at(span.start);
        Diagnostic {
            code,
            message: message.into(),
            line,
            column,
            span,
        }
    }
}

fn tokenize(line: &str, offset: usize) -> Result<Vec<Token>, (String, Range<usize>)> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = j + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(line[i..end].to_string()),
                span: offset + i..offset + end,
            });
        } else if c.is_ascii_digit() {
            let mut end = i;
            let mut bad = false;
            while let Some(&(j, c)) = chars.peek() {
                if c.is_ascii_digit() {
                    end = j + 1;
                } else if c.is_ascii_alphabetic() || c == '.' || c == '_' {
                    bad = true;
                    end = j + 1;
                } else {
                    break;
                }
                chars.next();
            }
            let text = line[i..end].to_string();
            out.push(Token {
                tok: if bad { Tok::BadNumber(text) } else { Tok::Number(text) },
                span: offset + i..offset + end,
            });
        } else if "+-*/=:".contains(c) {
            chars.next();
            out.push(Token {
                tok: Tok::Sym(c),
                span: offset + i..offset + i + 1,
            });
        } else {
            let end = i + c.len_utf8();
            return Err((format!("unexpected character '{}'", c.escape_debug()), offset + i..offset + end));
        }
    }
    Ok(out)
}

type PResult<T> = Result<T, Diagnostic>;

struct Cursor<'t, 'l> {
    toks: &'t [Token],
    pos: usize,
    /// End of the line, for errors at end of input.
    eol: usize,
    loc: &'l Locator<'l>,
}

impl Cursor<'_, '_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> Range<usize> {
        self.peek().map_or(self.eol..self.eol, |t| t.span.clone())
    }

    fn syntax(&self, message: impl Into<String>) -> Diagnostic {
        self.loc.diag(DiagCode::Syntax, message, self.here())
    }

    fn is_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}'")))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), span }) => {
                let out = Spanned {
                    value: s.clone(),
                    span: span.clone(),
                };
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn expect_end(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax("unexpected trailing input"))
        }
    }

    /// Positive integer, used for degrees and truncation.
    fn positive_integer(&mut self, what: &str) -> PResult<u32> {
        let start = self.here();
        let negative = self.eat_sym('-');
        match self.peek().cloned() {
            Some(Token { tok: Tok::Number(digits), span }) => {
                self.pos += 1;
                let full = start.start..span.end;
                let value: BigInt = digits.parse().expect("digits");
                if negative || value.is_zero() {
                    return Err(self.loc.diag(
                        DiagCode::NonPositiveDegree,
                        format!("{what} must be positive, got {}{digits}", if negative { "-" } else { "" }),
                        full,
                    ));
                }
                if self.is_sym('/') {
                    return Err(self.syntax(format!("{what} must be an integer")));
                }
                u32::try_from(value)
                    .ok()
                    .filter(|&v| v <= 1 << 20)
                    .ok_or_else(|| self.loc.diag(DiagCode::Syntax, format!("{what} is too large"), full))
            }
            Some(Token { tok: Tok::BadNumber(s), span }) => Err(self.loc.diag(
                DiagCode::Syntax,
                format!("{what} must be an integer, got '{s}'"),
                span,
            )),
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn rational(&mut self) -> PResult<Rational> {
        let Some(Token { tok, span }) = self.peek().cloned() else {
            return Err(self.syntax("expected a number"));
        };
        let numer = match tok {
            Tok::Number(d) => d,
            Tok::BadNumber(s) => {
                return Err(self.loc.diag(
                    DiagCode::MalformedRational,
                    format!("malformed rational '{s}'"),
                    span,
                ))
            }
            _ => return Err(self.syntax("expected a number")),
        };
        self.pos += 1;
        let numer: BigInt = numer.parse().expect("digits");
        if !self.is_sym('/') {
            return Ok(Rational::from_integer(numer));
        }
        let slash = self.here();
        self.pos += 1;
        match self.peek().cloned() {
            Some(Token { tok: Tok::Number(d), span: dspan }) => {
                self.pos += 1;
                let denom: BigInt = d.parse().expect("digits");
                if denom.is_zero() {
                    return Err(self.loc.diag(
                        DiagCode::MalformedRational,
                        "zero denominator",
                        span.start..dspan.end,
                    ));
                }
                Ok(Rational::new(numer, denom))
            }
            other => {
                let end = other.map_or(slash.end, |t| t.span.end);
                Err(self.loc.diag(
                    DiagCode::MalformedRational,
                    "malformed rational: expected a denominator after '/'",
                    span.start..end,
                ))
            }
        }
    }

    fn term(&mut self, sign: bool) -> PResult<Term> {
        let mut names = Vec::new();
        let coefficient = if matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Number(_) | Tok::BadNumber(_),
                ..
            })
        ) {
            let c = self.rational()?;
            if self.eat_sym('*') {
                names.push(self.expect_ident("a generator name")?);
            }
            c
        } else {
            names.push(self.expect_ident("a term")?);
            Rational::from_integer(1.into())
        };
        while self.eat_sym('*') {
            names.push(self.expect_ident("a generator name")?);
        }
        Ok(Term {
            coefficient: if sign { -coefficient } else { coefficient },
            names,
        })
    }

    /// `[±] term {± term}`; zero terms are dropped.
    fn expr(&mut self) -> PResult<Expr> {
        let start = self.here().start;
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let mut negative = false;
            if !first {
                if self.at_end() {
                    break;
                }
                if self.eat_sym('-') {
                    negative = true;
                } else if !self.eat_sym('+') {
                    return Err(self.syntax("expected '+' or '-'"));
                }
            }
            if self.eat_sym('-') {
                negative = !negative;
            } else {
                self.eat_sym('+');
            }
            let t = self.term(negative)?;
            if !t.coefficient.is_zero() {
                terms.push(t);
            }
            first = false;
        }
        let end = self.toks.last().map_or(start, |t| t.span.end);
        Ok(Expr {
            terms,
            span: start..end.max(start),
        })
    }
}

struct State<'a> {
    loc: Locator<'a>,
    diags: Vec<Diagnostic>,
    algebra: Option<AlgebraDecl>,
    lie: Option<LieDecl>,
    degrees: HashMap<String, u32>,
    have_d: HashSet<String>,
    // targets of `d` lines, including ones that failed to parse
    tried_d: HashSet<String>,
    basis: HashSet<String>,
    pairs: HashSet<(String, String)>,
}

impl<'a> State<'a> {
    fn line(&mut self, toks: &[Token], eol: usize) -> PResult<()> {
        let loc = Locator { text: self.loc.text };
        let mut cur = Cursor {
            toks,
            pos: 0,
            eol,
            loc: &loc,
        };
        let keyword = cur.expect_ident("a declaration keyword")?;
        match keyword.value.as_str() {
            "algebra" => {
                let name = cur.expect_ident("an algebra name")?;
                cur.expect_end()?;
                if self.algebra.is_some() {
                    return Err(loc.diag(DiagCode::DuplicateHeader, "second 'algebra' header", keyword.span));
                }
                self.algebra = Some(AlgebraDecl {
                    name,
                    truncation: None,
                    generators: Vec::new(),
                    differentials: Vec::new(),
                });
            }
            "truncate" => {
                let t = cur.positive_integer("truncation degree")?;
                cur.expect_end()?;
                let alg = self.need_algebra(&keyword)?;
                if alg.truncation.is_some() {
                    return Err(loc.diag(DiagCode::DuplicateHeader, "second 'truncate' line", keyword.span));
                }
                alg.truncation = Some(t);
            }
            "gen" => {
                let name = cur.expect_ident("a generator name")?;
                cur.expect_sym(':')?;
                let degree = cur.positive_integer("degree")?;
                cur.expect_end()?;
                self.need_algebra(&keyword)?;
                if self.degrees.contains_key(&name.value) {
                    return Err(loc.diag(
                        DiagCode::DuplicateGenerator,
                        format!("duplicate generator '{}'", name.value),
                        name.span,
                    ));
                }
                if self.degrees.len() >= MAX_GENERATORS {
                    return Err(loc.diag(
                        DiagCode::TooManyGenerators,
                        format!("more than {MAX_GENERATORS} generators"),
                        name.span,
                    ));
                }
                self.degrees.insert(name.value.clone(), degree);
                self.algebra
                    .as_mut()
                    .expect("checked above")
                    .generators
                    .push(GenDecl { name, degree });
            }
            "d" => {
                let target = cur.expect_ident("a generator name")?;
                self.tried_d.insert(target.value.clone());
                cur.expect_sym('=')?;
                let expr = cur.expr()?;
                self.need_algebra(&keyword)?;
                if !self.degrees.contains_key(&target.value) {
                    return Err(unknown(&loc, &target));
                }
                let mut term_degrees = Vec::new();
                for term in &expr.terms {
                    let mut deg = 0u64;
                    for n in &term.names {
                        match self.degrees.get(&n.value) {
                            Some(&d) => deg += u64::from(d),
                            None => return Err(unknown(&loc, n)),
                        }
                    }
                    term_degrees.push(deg);
                }
                if term_degrees.windows(2).any(|w| w[0] != w[1]) {
                    return Err(loc.diag(
                        DiagCode::InhomogeneousDifferential,
                        format!("d {} mixes terms of degrees {:?}", target.value, term_degrees),
                        expr.span,
                    ));
                }
                if !self.have_d.insert(target.value.clone()) {
                    return Err(loc.diag(
                        DiagCode::DuplicateDifferential,
                        format!("second differential for '{}'", target.value),
                        target.span,
                    ));
                }
                self.algebra
                    .as_mut()
                    .expect("checked above")
                    .differentials
                    .push(DiffDecl { target, expr });
            }
            "lie" => {
                let name = cur.expect_ident("a Lie algebra name")?;
                cur.expect_end()?;
                if self.lie.is_some() {
                    return Err(loc.diag(DiagCode::DuplicateHeader, "second 'lie' header", keyword.span));
                }
                self.lie = Some(LieDecl {
                    name,
                    basis: Vec::new(),
                    brackets: Vec::new(),
                });
            }
            "basis" => {
                let mut entries = Vec::new();
                while !cur.at_end() {
                    let name = cur.expect_ident("a basis name")?;
                    let degree = if cur.eat_sym(':') {
                        match cur.peek().cloned() {
                            Some(Token { tok: Tok::Number(d), span }) => {
                                cur.pos += 1;
                                d.parse::<u32>().ok().filter(|&v| v <= 1 << 20).ok_or_else(|| {
                                    loc.diag(DiagCode::Syntax, "degree is too large", span)
                                })?
                            }
                            _ => return Err(cur.syntax("expected a degree")),
                        }
                    } else {
                        0
                    };
                    entries.push((name, degree));
                }
                self.need_lie(&keyword)?;
                for (name, degree) in entries {
                    if !self.basis.insert(name.value.clone()) {
                        return Err(loc.diag(
                            DiagCode::DuplicateGenerator,
                            format!("duplicate basis element '{}'", name.value),
                            name.span,
                        ));
                    }
                    if self.basis.len() > MAX_GENERATORS {
                        return Err(loc.diag(
                            DiagCode::TooManyGenerators,
                            format!("more than {MAX_GENERATORS} basis elements"),
                            name.span,
                        ));
                    }
                    self.lie.as_mut().expect("checked").basis.push((name, degree));
                }
            }
            "bracket" => {
                let left = cur.expect_ident("a basis name")?;
                let right = cur.expect_ident("a basis name")?;
                cur.expect_sym('=')?;
                let expr = cur.expr()?;
                self.need_lie(&keyword)?;
                for n in [&left, &right] {
                    if !self.basis.contains(&n.value) {
                        return Err(unknown(&loc, n));
                    }
                }
                for term in &expr.terms {
                    if term.names.len() != 1 {
                        return Err(loc.diag(
                            DiagCode::Syntax,
                            "bracket terms must have the form c * NAME",
                            expr.span.clone(),
                        ));
                    }
                    if !self.basis.contains(&term.names[0].value) {
                        return Err(unknown(&loc, &term.names[0]));
                    }
                }
                let key = if left.value <= right.value {
                    (left.value.clone(), right.value.clone())
                } else {
                    (right.value.clone(), left.value.clone())
                };
                if !self.pairs.insert(key) {
                    return Err(loc.diag(
                        DiagCode::DuplicateBracket,
                        format!("second bracket for {} and {}", left.value, right.value),
                        left.span.start..right.span.end,
                    ));
                }
                self.lie
                    .as_mut()
                    .expect("checked")
                    .brackets
                    .push(BracketDecl { left, right, expr });
            }
            other => {
                return Err(loc.diag(
                    DiagCode::Syntax,
                    format!("unknown declaration '{other}'"),
                    keyword.span,
                ))
            }
        }
        Ok(())
    }

    fn need_algebra(&mut self, keyword: &Spanned<String>) -> PResult<&mut AlgebraDecl> {
        match self.algebra.as_mut() {
            Some(a) => Ok(a),
            None => Err(self.loc.diag(
                DiagCode::MissingHeader,
                format!("'{}' before the 'algebra' header", keyword.value),
                keyword.span.clone(),
            )),
        }
    }

    fn need_lie(&mut self, keyword: &Spanned<String>) -> PResult<()> {
        if self.lie.is_none() {
            return Err(self.loc.diag(
                DiagCode::MissingHeader,
                format!("'{}' before the 'lie' header", keyword.value),
                keyword.span.clone(),
            ));
        }
        Ok(())
    }
}

fn unknown(loc: &Locator<'_>, name: &Spanned<String>) -> Diagnostic {
    loc.diag(
        DiagCode::UnknownGenerator,
        format!("unknown generator '{}'", name.value),
        name.span.clone(),
    )
}

/// Parses a document, collecting every diagnostic rather than stopping at
/// the first. Structural validation (`d² = 0`, Jacobi) is left to
/// [`SourceDocument::cdga`] and [`SourceDocument::lie`].
pub fn parse(text: &str) -> Result<SourceDocument, Vec<Diagnostic>> {
    let mut st = State {
        loc: Locator { text },
        diags: Vec::new(),
        algebra: None,
        lie: None,
        degrees: HashMap::new(),
        have_d: HashSet::new(),
        tried_d: HashSet::new(),
        basis: HashSet::new(),
        pairs: HashSet::new(),
    };
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let body = raw.split('#').next().unwrap_or("");
        let body = body.trim_end_matches(['\n', '\r']);
        let toks = match tokenize(body, line_start) {
            Ok(t) => t,
            Err((message, span)) => {
                let d = st.loc.diag(DiagCode::Syntax, message, span);
                st.diags.push(d);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        if let Err(d) = st.line(&toks, line_start + body.len()) {
            st.diags.push(d);
        }
    }

    if let Some(alg) = &st.algebra {
        for g in &alg.generators {
            if !st.tried_d.contains(&g.name.value) {
                st.diags.push(st.loc.diag(
                    DiagCode::MissingDifferential,
                    format!("no differential for '{}' (write 'd {} = 0' if it is closed)", g.name.value, g.name.value),
                    g.name.span.clone(),
                ));
            }
        }
    }
    if st.algebra.is_none() && st.lie.is_none() && st.diags.is_empty() {
        st.diags.push(st.loc.diag(
            DiagCode::MissingHeader,
            "no 'algebra' or 'lie' declaration",
            0..0,
        ));
    }
    if !st.diags.is_empty() {
        st.diags.sort_by_key(|d| d.span.start);
        return Err(st.diags);
    }
    Ok(SourceDocument {
        text: text.to_string(),
        algebra: st.algebra,
        lie: st.lie,
    })
}

/// As [`parse`], rejecting input that is not UTF-8.
pub fn parse_bytes(bytes: &[u8]) -> Result<SourceDocument, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
            let loc = Locator { text: valid };
            let at = e.valid_up_to();
            Err(vec![loc.diag(
                DiagCode::InvalidUtf8,
                format!("invalid UTF-8 at byte {at}"),
                at..at + e.error_len().unwrap_or(1).min(bytes.len() - at),
            )])
        }
    }
}

/// Parses a single expression such as `a*x1 - 2/3 * b*x2` over `sig`.
pub fn parse_element(sig: &Arc<Signature>, text: &str) -> Result<Element, Vec<Diagnostic>> {
    let loc = Locator { text };
    let toks = tokenize(text, 0).map_err(|(m, span)| vec![loc.diag(DiagCode::Syntax, m, span)])?;
    let mut cur = Cursor {
        toks: &toks,
        pos: 0,
        eol: text.len(),
        loc: &loc,
    };
    let expr = cur.expr().map_err(|d| vec![d])?;
    let mut out = Element::zero(sig);
    let mut diags = Vec::new();
    for term in &expr.terms {
        let names: Vec<&str> = term.names.iter().map(|n| n.value.as_str()).collect();
        match Element::word(sig, term.coefficient.clone(), &names) {
            Ok(w) => out = &out + &w,
            Err(_) => diags.extend(
                term.names
                    .iter()
                    .filter(|n| sig.index_of(&n.value).is_none())
                    .map(|n| unknown(&loc, n)),
            ),
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}
