//! The .qfs text format: parse and serialize form systems.
//!
//! A document is line-oriented: a leading block of `#` comments kept as
//! metadata, one `field` header, one `vars` line, then one `form` line
//! per form.  Every term of every expression must have total degree
//! exactly 2; the single token `0` denotes the zero form.  Canonical
//! serialization is byte-deterministic: LF endings, single spaces,
//! terms ordered by index pair, unit coefficients omitted.
//!
//! Headers:
//! * `field Fq <p>` or `field Fq <p> poly=c0,c1,...,1` (modulus
//!   coefficients ascending; enables `t` literals in expressions)
//! * `field Qp <p>` or `field Qp <p> prec=<k>` (default precision 8)
//! * `field Zpk <p> <k>`

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement, FieldKind};
use crate::quadform::{FormSystem, QuadraticForm};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use std::collections::HashSet;
use std::str::FromStr;

/// Default precision for `Qp` headers without `prec=`.
pub const DEFAULT_QP_PRECISION: u32 = 8;

/// A parsed .qfs document: leading comments, form names in order, and
/// the system itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDocument {
    pub comments: Vec<String>,
    pub names: Vec<String>,
    pub system: FormSystem,
}

impl SystemDocument {
    pub fn new(comments: Vec<String>, names: Vec<String>, system: FormSystem) -> Result<Self> {
        if names.len() != system.r() {
            return Err(Error::DimensionMismatch("one name per form".into()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(Error::SyntaxError {
                    line: 0,
                    col: 0,
                    msg: format!("duplicate form name {n}"),
                });
            }
        }
        Ok(SystemDocument {
            comments,
            names,
            system,
        })
    }

    pub fn form_by_name(&self, name: &str) -> Option<&QuadraticForm> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.system.forms()[i])
    }
}

// ---------------------------------------------------------------------
// Tokenizer

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokKind {
    Word,
    Int,
    Sym(char),
}

#[derive(Debug, Clone)]
pub(crate) struct Tok {
    pub kind: TokKind,
    pub text: String,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(line: &str, lineno: usize) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok {
                kind: TokKind::Word,
                text: chars[start..i].iter().collect(),
                line: lineno,
                col,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            toks.push(Tok {
                kind: TokKind::Int,
                text: chars[start..i].iter().collect(),
                line: lineno,
                col,
            });
            continue;
        }
        if "=+-*^/(),".contains(c) {
            toks.push(Tok {
                kind: TokKind::Sym(c),
                text: c.to_string(),
                line: lineno,
                col,
            });
            i += 1;
            continue;
        }
        return Err(Error::SyntaxError {
            line: lineno,
            col,
            msg: format!("unexpected character {c:?}"),
        });
    }
    Ok(toks)
}

pub(crate) fn syntax_at(tok: Option<&Tok>, line: usize, msg: &str) -> Error {
    match tok {
        Some(t) => Error::SyntaxError {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        },
        None => Error::SyntaxError {
            line,
            col: 0,
            msg: format!("{msg} (line ended early)"),
        },
    }
}

// ---------------------------------------------------------------------
// Document splitting (shared with the function-field parser)

pub(crate) struct RawDocument {
    pub comments: Vec<String>,
    pub header: Vec<Tok>,
    pub vars: Vec<Tok>,
    pub forms: Vec<(String, Vec<Tok>, usize)>,
}

pub(crate) fn split_document(text: &str) -> Result<RawDocument> {
    let mut comments = Vec::new();
    let mut header: Option<Vec<Tok>> = None;
    let mut vars: Option<Vec<Tok>> = None;
    let mut forms: Vec<(String, Vec<Tok>, usize)> = Vec::new();
    let mut names = HashSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.starts_with('#') {
            if header.is_none() {
                comments.push(trimmed.to_string());
            }
            continue;
        }
        let toks = tokenize(raw_line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let head = &toks[0];
        if head.kind != TokKind::Word {
            return Err(syntax_at(Some(head), lineno, "expected a keyword"));
        }
        match head.text.as_str() {
            "field" => {
                if header.is_some() {
                    return Err(syntax_at(Some(head), lineno, "second field header"));
                }
                if vars.is_some() || !forms.is_empty() {
                    return Err(syntax_at(Some(head), lineno, "field header must come first"));
                }
                header = Some(toks);
            }
            "vars" => {
                if header.is_none() {
                    return Err(syntax_at(Some(head), lineno, "vars before field header"));
                }
                if vars.is_some() {
                    return Err(syntax_at(Some(head), lineno, "second vars line"));
                }
                vars = Some(toks);
            }
            "form" => {
                if vars.is_none() {
                    return Err(syntax_at(Some(head), lineno, "form before vars line"));
                }
                if toks.len() < 4 {
                    return Err(syntax_at(toks.get(1), lineno, "expected: form <name> = <expr>"));
                }
                let name_tok = &toks[1];
                if name_tok.kind != TokKind::Word {
                    return Err(syntax_at(Some(name_tok), lineno, "form name must be a word"));
                }
                if toks[2].kind != TokKind::Sym('=') {
                    return Err(syntax_at(Some(&toks[2]), lineno, "expected = after form name"));
                }
                if !names.insert(name_tok.text.clone()) {
                    return Err(syntax_at(Some(name_tok), lineno, "duplicate form name"));
                }
                forms.push((name_tok.text.clone(), toks[3..].to_vec(), lineno));
            }
            other => {
                return Err(syntax_at(
                    Some(head),
                    lineno,
                    &format!("unknown keyword {other:?}"),
                ));
            }
        }
    }
    let header = header.ok_or(Error::SyntaxError {
        line: 0,
        col: 0,
        msg: "missing field header".into(),
    })?;
    let vars = vars.ok_or(Error::SyntaxError {
        line: 0,
        col: 0,
        msg: "missing vars line".into(),
    })?;
    if forms.is_empty() {
        return Err(Error::SyntaxError {
            line: 0,
            col: 0,
            msg: "document has no forms".into(),
        });
    }
    Ok(RawDocument {
        comments,
        header,
        vars,
        forms,
    })
}

fn parse_uint(tok: &Tok, what: &str) -> Result<u64> {
    if tok.kind != TokKind::Int {
        return Err(syntax_at(Some(tok), tok.line, &format!("expected {what}")));
    }
    tok.text.parse::<u64>().map_err(|_| Error::SyntaxError {
        line: tok.line,
        col: tok.col,
        msg: format!("{what} out of range"),
    })
}

pub(crate) fn parse_header(toks: &[Tok]) -> Result<FieldDesc> {
    let line = toks[0].line;
    let kind = toks.get(1).ok_or_else(|| syntax_at(None, line, "expected field kind"))?;
    if kind.kind != TokKind::Word {
        return Err(syntax_at(Some(kind), line, "expected field kind"));
    }
    match kind.text.as_str() {
        "Fq" => {
            let p = parse_uint(
                toks.get(2).ok_or_else(|| syntax_at(None, line, "expected prime"))?,
                "prime",
            )?;
            match toks.get(3) {
                None => FieldDesc::prime(p),
                Some(t) if t.kind == TokKind::Word && t.text == "poly" => {
                    let eq = toks.get(4);
                    if !matches!(eq.map(|t| &t.kind), Some(TokKind::Sym('='))) {
                        return Err(syntax_at(eq, line, "expected = after poly"));
                    }
                    let mut coeffs = Vec::new();
                    let mut i = 5;
                    loop {
                        let c = toks
                            .get(i)
                            .ok_or_else(|| syntax_at(None, line, "expected modulus coefficient"))?;
                        coeffs.push(parse_uint(c, "modulus coefficient")?);
                        i += 1;
                        match toks.get(i) {
                            None => break,
                            Some(t) if t.kind == TokKind::Sym(',') => i += 1,
                            Some(t) => {
                                return Err(syntax_at(Some(t), line, "expected , in poly list"))
                            }
                        }
                    }
                    FieldDesc::extension(p, &coeffs)
                }
                Some(t) => Err(syntax_at(Some(t), line, "unexpected token after prime")),
            }
        }
        "Qp" => {
            let p = parse_uint(
                toks.get(2).ok_or_else(|| syntax_at(None, line, "expected prime"))?,
                "prime",
            )?;
            let prec = match toks.get(3) {
                None => DEFAULT_QP_PRECISION as u64,
                Some(t) if t.kind == TokKind::Word && t.text == "prec" => {
                    let eq = toks.get(4);
                    if !matches!(eq.map(|t| &t.kind), Some(TokKind::Sym('='))) {
                        return Err(syntax_at(eq, line, "expected = after prec"));
                    }
                    let v = parse_uint(
                        toks.get(5).ok_or_else(|| syntax_at(None, line, "expected precision"))?,
                        "precision",
                    )?;
                    if toks.len() > 6 {
                        return Err(syntax_at(toks.get(6), line, "unexpected trailing token"));
                    }
                    v
                }
                Some(t) => return Err(syntax_at(Some(t), line, "unexpected token after prime")),
            };
            FieldDesc::padic(p, prec as u32)
        }
        "Zpk" => {
            let p = parse_uint(
                toks.get(2).ok_or_else(|| syntax_at(None, line, "expected prime"))?,
                "prime",
            )?;
            let k = parse_uint(
                toks.get(3).ok_or_else(|| syntax_at(None, line, "expected exponent"))?,
                "exponent",
            )?;
            if toks.len() > 4 {
                return Err(syntax_at(toks.get(4), line, "unexpected trailing token"));
            }
            FieldDesc::mod_pk(p, k as u32)
        }
        other => Err(syntax_at(
            Some(kind),
            line,
            &format!("unknown field kind {other:?} (expected Fq, Qp or Zpk)"),
        )),
    }
}

pub(crate) fn parse_vars(toks: &[Tok]) -> Result<usize> {
    let line = toks[0].line;
    let n = parse_uint(
        toks.get(1).ok_or_else(|| syntax_at(None, line, "expected variable count"))?,
        "variable count",
    )?;
    if toks.len() > 2 {
        return Err(syntax_at(toks.get(2), line, "unexpected trailing token"));
    }
    if n == 0 || n > 4096 {
        return Err(Error::SyntaxError {
            line,
            col: toks[1].col,
            msg: "variable count must be between 1 and 4096".into(),
        });
    }
    Ok(n as usize)
}

// ---------------------------------------------------------------------
// Expression grammar (shared raw layer)

#[derive(Debug, Clone)]
pub(crate) enum RawAtom {
    /// Unsigned integer literal.
    Int(String),
    /// `num/den`.
    Ratio(String, String),
    /// `x<k>` (1-based index).
    Var(u64),
    /// Generator letter: `t` (false) or `T` (true), with exponent folded
    /// in by the factor.
    Gen(bool),
    /// Parenthesized polynomial in one generator letter.
    Poly(Vec<RawMono>, bool),
}

#[derive(Debug, Clone)]
pub(crate) struct RawMono {
    pub neg: bool,
    pub coeff: Option<String>,
    pub pow: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct RawFactor {
    pub atom: RawAtom,
    pub pow: u32,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct RawTerm {
    pub neg: bool,
    pub factors: Vec<RawFactor>,
    pub line: usize,
    pub col: usize,
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(t) if t.kind == TokKind::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

fn parse_exponent(cur: &mut Cursor) -> Result<u32> {
    if !cur.eat_sym('^') {
        return Ok(1);
    }
    let t = cur
        .peek()
        .ok_or_else(|| syntax_at(None, cur.line, "expected exponent"))?;
    let v = parse_uint(t, "exponent")?;
    cur.next();
    if v > 64 {
        return Err(Error::SyntaxError {
            line: t.line,
            col: t.col,
            msg: "exponent too large".into(),
        });
    }
    Ok(v as u32)
}

fn parse_mono(cur: &mut Cursor) -> Result<RawMono> {
    let mut neg = false;
    loop {
        if cur.eat_sym('-') {
            neg = !neg;
        } else if cur.eat_sym('+') {
        } else {
            break;
        }
    }
    let t = cur
        .peek()
        .ok_or_else(|| syntax_at(None, cur.line, "expected monomial"))?;
    match (&t.kind, t.text.as_str()) {
        (TokKind::Int, _) => {
            let coeff = t.text.clone();
            cur.next();
            if cur.eat_sym('*') {
                let g = cur
                    .peek()
                    .ok_or_else(|| syntax_at(None, cur.line, "expected generator"))?;
                if g.kind != TokKind::Word || (g.text != "t" && g.text != "T") {
                    return Err(syntax_at(Some(g), cur.line, "expected t or T"));
                }
                cur.next();
                let pow = parse_exponent(cur)?;
                Ok(RawMono {
                    neg,
                    coeff: Some(coeff),
                    pow,
                })
            } else {
                Ok(RawMono {
                    neg,
                    coeff: Some(coeff),
                    pow: 0,
                })
            }
        }
        (TokKind::Word, "t") | (TokKind::Word, "T") => {
            cur.next();
            let pow = parse_exponent(cur)?;
            Ok(RawMono {
                neg,
                coeff: None,
                pow,
            })
        }
        _ => Err(syntax_at(Some(t), cur.line, "expected monomial")),
    }
}

fn parse_factor(cur: &mut Cursor) -> Result<RawFactor> {
    let t = cur
        .peek()
        .ok_or_else(|| syntax_at(None, cur.line, "expected a factor"))?
        .clone();
    let atom = match (&t.kind, t.text.as_str()) {
        (TokKind::Int, _) => {
            cur.next();
            if cur.eat_sym('/') {
                let d = cur
                    .peek()
                    .ok_or_else(|| syntax_at(None, cur.line, "expected denominator"))?;
                if d.kind != TokKind::Int {
                    return Err(syntax_at(Some(d), cur.line, "expected denominator"));
                }
                let den = d.text.clone();
                cur.next();
                RawAtom::Ratio(t.text.clone(), den)
            } else {
                RawAtom::Int(t.text.clone())
            }
        }
        (TokKind::Word, "t") => {
            cur.next();
            RawAtom::Gen(false)
        }
        (TokKind::Word, "T") => {
            cur.next();
            RawAtom::Gen(true)
        }
        (TokKind::Word, w) if w.starts_with('x') && w[1..].chars().all(|c| c.is_ascii_digit()) && w.len() > 1 => {
            cur.next();
            let idx: u64 = w[1..].parse().map_err(|_| Error::SyntaxError {
                line: t.line,
                col: t.col,
                msg: "variable index out of range".into(),
            })?;
            RawAtom::Var(idx)
        }
        (TokKind::Sym('('), _) => {
            cur.next();
            let mut monos = Vec::new();
            let mut letter: Option<bool> = None;
            loop {
                let before = cur.pos;
                let m = parse_mono(cur)?;
                if m.pow > 0 {
                    let this = cur.toks[before..cur.pos]
                        .iter()
                        .any(|t| t.kind == TokKind::Word && t.text == "T");
                    match letter {
                        None => letter = Some(this),
                        Some(prev) if prev != this => {
                            return Err(syntax_at(
                                cur.toks.get(before),
                                cur.line,
                                "mixed t and T in one polynomial",
                            ))
                        }
                        _ => {}
                    }
                }
                monos.push(m);
                if cur.eat_sym(')') {
                    break;
                }
                match cur.peek() {
                    Some(t) if t.kind == TokKind::Sym('+') || t.kind == TokKind::Sym('-') => {}
                    other => return Err(syntax_at(other, cur.line, "expected + - or ) in polynomial")),
                }
            }
            RawAtom::Poly(monos, letter.unwrap_or(false))
        }
        _ => return Err(syntax_at(Some(&t), cur.line, "expected a factor")),
    };
    let pow = parse_exponent(cur)?;
    Ok(RawFactor {
        atom,
        pow,
        line: t.line,
        col: t.col,
    })
}

pub(crate) fn parse_raw_expr(toks: &[Tok], line: usize) -> Result<Vec<RawTerm>> {
    let mut cur = Cursor { toks, pos: 0, line };
    let mut terms = Vec::new();
    let mut first = true;
    while cur.peek().is_some() {
        let mut neg = false;
        if !first {
            if cur.eat_sym('+') {
            } else if cur.eat_sym('-') {
                neg = true;
            } else {
                return Err(syntax_at(cur.peek(), line, "expected + or - between terms"));
            }
        } else {
            while let Some(t) = cur.peek() {
                match t.kind {
                    TokKind::Sym('-') => {
                        neg = !neg;
                        cur.next();
                    }
                    TokKind::Sym('+') => {
                        cur.next();
                    }
                    _ => break,
                }
            }
        }
        let start = cur
            .peek()
            .ok_or_else(|| syntax_at(None, line, "expected a term"))?;
        let (tl, tc) = (start.line, start.col);
        let mut factors = vec![parse_factor(&mut cur)?];
        while cur.eat_sym('*') {
            factors.push(parse_factor(&mut cur)?);
        }
        terms.push(RawTerm {
            neg,
            factors,
            line: tl,
            col: tc,
        });
        first = false;
    }
    if terms.is_empty() {
        return Err(syntax_at(None, line, "empty expression"));
    }
    Ok(terms)
}

pub(crate) fn bigint_of(text: &str, line: usize, col: usize) -> Result<BigInt> {
    BigInt::from_str(text).map_err(|_| Error::SyntaxError {
        line,
        col,
        msg: "integer out of range".into(),
    })
}

/// Is this exactly the zero expression `0`?
pub(crate) fn is_zero_expr(terms: &[RawTerm]) -> bool {
    terms.len() == 1
        && !terms[0].neg
        && terms[0].factors.len() == 1
        && terms[0].factors[0].pow == 1
        && matches!(&terms[0].factors[0].atom, RawAtom::Int(s) if s == "0")
}

pub(crate) fn gen_element(field: &FieldDesc, tok_line: usize, tok_col: usize) -> Result<FieldElement> {
    if field.kind() != FieldKind::Extension {
        return Err(Error::SyntaxError {
            line: tok_line,
            col: tok_col,
            msg: "t literals need a poly= field header".into(),
        });
    }
    let mut c = vec![0u64; field.ext_degree() as usize];
    if c.len() < 2 {
        return Err(Error::SyntaxError {
            line: tok_line,
            col: tok_col,
            msg: "t literals need extension degree at least 2".into(),
        });
    }
    c[1] = 1;
    field.from_ext_coeffs(&c)
}

pub(crate) fn fold_poly_atom(
    field: &FieldDesc,
    monos: &[RawMono],
    upper: bool,
    line: usize,
    col: usize,
) -> Result<FieldElement> {
    if upper {
        return Err(Error::SyntaxError {
            line,
            col,
            msg: "T literals are only valid in function-field input".into(),
        });
    }
    let mut acc = field.zero();
    for m in monos {
        let mut v = match &m.coeff {
            Some(s) => field.from_bigint(&bigint_of(s, line, col)?),
            None => field.one(),
        };
        if m.pow > 0 {
            let t = gen_element(field, line, col)?;
            v = field.mul(&v, &field.pow(&t, m.pow as u64));
        }
        if m.neg {
            v = field.neg(&v);
        }
        acc = field.add(&acc, &v);
    }
    Ok(acc)
}

/// Folds raw terms into a form over `field` with `n` variables.
pub(crate) fn fold_field_expr(
    field: &FieldDesc,
    n: usize,
    terms: &[RawTerm],
) -> Result<QuadraticForm> {
    let mut q = QuadraticForm::zero(field.clone(), n);
    if is_zero_expr(terms) {
        return Ok(q);
    }
    for term in terms {
        let mut coeff = field.one();
        let mut vars: Vec<usize> = Vec::new();
        for f in &term.factors {
            match &f.atom {
                RawAtom::Int(s) => {
                    let v = field.from_bigint(&bigint_of(s, f.line, f.col)?);
                    coeff = field.mul(&coeff, &field.pow(&v, f.pow as u64));
                }
                RawAtom::Ratio(ns, ds) => {
                    let num = bigint_of(ns, f.line, f.col)?;
                    let den = bigint_of(ds, f.line, f.col)?;
                    let v = field.from_ratio(&num, &den)?;
                    coeff = field.mul(&coeff, &field.pow(&v, f.pow as u64));
                }
                RawAtom::Var(k) => {
                    if *k == 0 || *k as usize > n {
                        return Err(Error::UnknownVariable {
                            line: f.line,
                            col: f.col,
                            msg: format!("x{k} with vars {n}"),
                        });
                    }
                    for _ in 0..f.pow {
                        vars.push(*k as usize - 1);
                    }
                }
                RawAtom::Gen(upper) => {
                    if *upper {
                        return Err(Error::SyntaxError {
                            line: f.line,
                            col: f.col,
                            msg: "T literals are only valid in function-field input".into(),
                        });
                    }
                    let t = gen_element(field, f.line, f.col)?;
                    coeff = field.mul(&coeff, &field.pow(&t, f.pow as u64));
                }
                RawAtom::Poly(monos, upper) => {
                    let v = fold_poly_atom(field, monos, *upper, f.line, f.col)?;
                    coeff = field.mul(&coeff, &field.pow(&v, f.pow as u64));
                }
            }
        }
        if vars.len() != 2 {
            return Err(Error::NonHomogeneous {
                line: term.line,
                col: term.col,
                msg: format!("term degree {} (every term must be degree 2)", vars.len()),
            });
        }
        if term.neg {
            coeff = field.neg(&coeff);
        }
        vars.sort_unstable();
        let cur = q.coeff(vars[0], vars[1]).clone();
        q.set_coeff(vars[0], vars[1], field.add(&cur, &coeff));
    }
    Ok(q)
}

/// Parses a complete .qfs document.
pub fn parse_system(text: &str) -> Result<SystemDocument> {
    let raw = split_document(text)?;
    let field = parse_header(&raw.header)?;
    let n = parse_vars(&raw.vars)?;
    let mut names = Vec::new();
    let mut forms = Vec::new();
    for (name, toks, line) in &raw.forms {
        let terms = parse_raw_expr(toks, *line)?;
        forms.push(fold_field_expr(&field, n, &terms)?);
        names.push(name.clone());
    }
    let system = FormSystem::new(field, n, forms)?;
    SystemDocument::new(raw.comments, names, system)
}

// ---------------------------------------------------------------------
// Serialization

/// Formats one coefficient as a prefix like `"3*"`, `""` (unit) or
/// `"(t+1)*"`, together with its sign (rational domains only).
pub(crate) fn coeff_prefix(field: &FieldDesc, c: &FieldElement) -> (bool, String) {
    match c {
        FieldElement::Rat(r) => {
            let neg = r.is_negative();
            let a = if neg { -r.clone() } else { r.clone() };
            if a.is_one() {
                (neg, String::new())
            } else if a.denom().is_one() {
                (neg, format!("{}*", a.numer()))
            } else {
                (neg, format!("{}/{}*", a.numer(), a.denom()))
            }
        }
        _ => {
            let s = field.fmt_element(c);
            if s == "1" {
                (false, String::new())
            } else if s.contains('+') || s.contains('-') {
                (false, format!("({s})*"))
            } else {
                (false, format!("{s}*"))
            }
        }
    }
}

fn serialize_form(field: &FieldDesc, q: &QuadraticForm) -> String {
    let terms = q.terms();
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (i, j, c)) in terms.iter().enumerate() {
        let (neg, prefix) = coeff_prefix(field, c);
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&prefix);
        if i == j {
            out.push_str(&format!("x{}^2", i + 1));
        } else {
            out.push_str(&format!("x{}*x{}", i + 1, j + 1));
        }
    }
    out
}

pub(crate) fn serialize_header(field: &FieldDesc) -> String {
    match field.kind() {
        FieldKind::Prime => format!("field Fq {}", field.p()),
        FieldKind::Extension => {
            let coeffs: Vec<String> = field
                .modulus_coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect();
            format!("field Fq {} poly={}", field.p(), coeffs.join(","))
        }
        FieldKind::PadicRational => format!("field Qp {} prec={}", field.p(), field.precision()),
        FieldKind::ModPk => format!("field Zpk {} {}", field.p(), field.precision()),
    }
}

/// Canonical text for a document: byte-deterministic, LF endings.
pub fn serialize_system(doc: &SystemDocument) -> String {
    let mut out = String::new();
    for c in &doc.comments {
        out.push_str(c);
        out.push('\n');
    }
    let field = doc.system.field();
    out.push_str(&serialize_header(field));
    out.push('\n');
    out.push_str(&format!("vars {}\n", doc.system.n()));
    for (name, q) in doc.names.iter().zip(doc.system.forms().iter()) {
        out.push_str(&format!("form {name} = {}\n", serialize_form(field, q)));
    }
    out
}
