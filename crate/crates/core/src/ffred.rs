//! Compiles zero-finding for a quadratic form over K(T) into a system
//! of quadratic forms over K.
//!
//! Substituting the polynomial ansatz x_i(T) = sum_e c_{i,e} T^e of
//! degree at most d into a form whose coefficients have T-degree at
//! most D, and collecting powers of T, yields R = 2d + D + 1 forms in
//! N = n(d + 1) unknowns: the ansatz solves f(x(T)) = 0 identically
//! exactly when its coefficient vector is a common zero of the
//! compiled system.  For n large, N outgrows 4R as d grows, which is
//! what makes the compiled systems worthwhile targets for the
//! quadratic-system machinery over the base field.
//!
//! Exports:
//! * [`FTForm`]: a quadratic form with polynomial coefficients in a
//!   single transcendental T, plus direct polynomial evaluation (the
//!   independent route the compiler is tested against).
//! * [`reduce_ft_form`] / [`ReductionResult`]: the compiler and the
//!   (variable, T-power) -> unknown index map.
//! * [`solution_to_polynomials`]: maps common zeros of the compiled
//!   system back to polynomial vectors.
//! * [`ansatz_threshold`]: least d with N > 4R, if any.
//! * [`parse_ft_document`]: the .qfs grammar extended with `T`.

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement};
use crate::formlang::{
    bigint_of, fold_poly_atom, gen_element, is_zero_expr, parse_header, parse_raw_expr,
    parse_vars, split_document, RawAtom, RawMono, RawTerm,
};
use crate::quadform::{tri_index, FormSystem, QuadraticForm};

fn poly_trim(field: &FieldDesc, v: &mut Vec<FieldElement>) {
    while v.last().is_some_and(|c| field.is_zero(c)) {
        v.pop();
    }
}

fn poly_add_into(field: &FieldDesc, acc: &mut Vec<FieldElement>, b: &[FieldElement]) {
    if acc.len() < b.len() {
        acc.resize(b.len(), field.zero());
    }
    for (i, c) in b.iter().enumerate() {
        acc[i] = field.add(&acc[i], c);
    }
    poly_trim(field, acc);
}

fn poly_mul(field: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if field.is_zero(ca) {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] = field.add(&out[i + j], &field.mul(ca, cb));
        }
    }
    poly_trim(field, &mut out);
    out
}

fn poly_scale(field: &FieldDesc, a: &mut [FieldElement], c: &FieldElement) {
    for v in a.iter_mut() {
        *v = field.mul(v, c);
    }
}

/// A homogeneous quadratic form whose coefficients are polynomials in
/// one transcendental T over any supported base field.  Coefficient
/// polynomials are stored in ascending T-powers, trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FTForm {
    field: FieldDesc,
    n: usize,
    coeffs: Vec<Vec<FieldElement>>,
}

impl FTForm {
    pub fn zero(field: FieldDesc, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::PreconditionViolated("at least one variable".into()));
        }
        Ok(FTForm {
            field,
            n,
            coeffs: vec![Vec::new(); n * (n + 1) / 2],
        })
    }

    pub fn new(field: FieldDesc, n: usize, coeffs: Vec<Vec<FieldElement>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::PreconditionViolated("at least one variable".into()));
        }
        if coeffs.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient polynomials for {} variables",
                coeffs.len(),
                n
            )));
        }
        let mut coeffs = coeffs;
        for p in &mut coeffs {
            for c in p.iter() {
                field.check_element(c)?;
            }
            poly_trim(&field, p);
        }
        Ok(FTForm { field, n, coeffs })
    }

    /// Adds `c * T^e * x_{i+1} x_{j+1}` terms given as integers.
    pub fn from_terms(
        field: FieldDesc,
        n: usize,
        terms: &[(usize, usize, u32, i64)],
    ) -> Result<Self> {
        let mut f = FTForm::zero(field, n)?;
        for &(i, j, e, c) in terms {
            if i > j || j >= n {
                return Err(Error::DimensionMismatch(format!("term ({i}, {j}) with n = {n}")));
            }
            let mut p = vec![f.field.zero(); e as usize + 1];
            p[e as usize] = f.field.from_int(c);
            f.add_to_coeff(i, j, &p);
        }
        Ok(f)
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest T-degree actually present; 0 for the zero form.
    pub fn t_degree(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|p| p.len().saturating_sub(1) as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn coeff_poly(&self, i: usize, j: usize) -> &[FieldElement] {
        let (a, b) = (i.min(j), i.max(j));
        &self.coeffs[tri_index(self.n, a, b)]
    }

    pub fn add_to_coeff(&mut self, i: usize, j: usize, p: &[FieldElement]) {
        let (a, b) = (i.min(j), i.max(j));
        let idx = tri_index(self.n, a, b);
        let mut acc = std::mem::take(&mut self.coeffs[idx]);
        poly_add_into(&self.field, &mut acc, p);
        self.coeffs[idx] = acc;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|p| p.is_empty())
    }

    /// T-coefficient vector of f(x(T)) by direct polynomial
    /// arithmetic, with each x_i given as an ascending coefficient
    /// list.  This is the route the compiler is validated against.
    pub fn evaluate_poly(&self, x: &[Vec<FieldElement>]) -> Result<Vec<FieldElement>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} polynomials for {} variables",
                x.len(),
                self.n
            )));
        }
        for p in x {
            for c in p {
                self.field.check_element(c)?;
            }
        }
        let mut acc: Vec<FieldElement> = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let c = self.coeff_poly(i, j);
                if c.is_empty() {
                    continue;
                }
                let prod = poly_mul(&self.field, &x[i], &x[j]);
                poly_add_into(&self.field, &mut acc, &poly_mul(&self.field, c, &prod));
            }
        }
        Ok(acc)
    }
}

/// The compiled system together with the unknown index map: unknown
/// i(d+1) + e holds the T^e coefficient of x_{i+1}.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    n: usize,
    pub d: u32,
    pub t_degree: u32,
    pub system: FormSystem,
}

impl ReductionResult {
    /// N = n(d+1).
    pub fn unknowns(&self) -> usize {
        self.system.n()
    }

    /// R = 2d + D + 1.
    pub fn form_count(&self) -> usize {
        self.system.r()
    }

    pub fn source_vars(&self) -> usize {
        self.n
    }

    pub fn unknown_index(&self, i: usize, e: u32) -> usize {
        debug_assert!(i < self.n && e <= self.d);
        i * (self.d as usize + 1) + e as usize
    }

    /// Inverse of [`Self::unknown_index`].
    pub fn unknown_of(&self, u: usize) -> (usize, u32) {
        let w = self.d as usize + 1;
        (u / w, (u % w) as u32)
    }

    /// Coefficient vector of a polynomial ansatz (degrees must be at
    /// most d).
    pub fn encode(&self, xs: &[Vec<FieldElement>]) -> Result<Vec<FieldElement>> {
        if xs.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} polynomials for {} variables",
                xs.len(),
                self.n
            )));
        }
        let field = self.system.field();
        let w = self.d as usize + 1;
        let mut c = vec![field.zero(); self.unknowns()];
        for (i, p) in xs.iter().enumerate() {
            if p.len() > w {
                return Err(Error::TooLarge(format!(
                    "ansatz degree {} exceeds d = {}",
                    p.len() - 1,
                    self.d
                )));
            }
            for (e, v) in p.iter().enumerate() {
                field.check_element(v)?;
                c[i * w + e] = v.clone();
            }
        }
        Ok(c)
    }
}

/// Compiles the degree-d ansatz: form t of the result is the T^t
/// coefficient of f(x(T)) as a quadratic form in the c_{i,e}.
pub fn reduce_ft_form(f: &FTForm, d: u32) -> Result<ReductionResult> {
    let field = f.field().clone();
    let n = f.n();
    let dd = d as usize;
    let unknowns = n * (dd + 1);
    let t_degree = f.t_degree();
    let r = 2 * dd + t_degree as usize + 1;
    let mut forms = vec![QuadraticForm::zero(field.clone(), unknowns); r];
    let bump = |form: &mut QuadraticForm, u: usize, v: usize, g: &FieldElement| {
        let cur = form.coeff(u, v).clone();
        form.set_coeff(u, v, field.add(&cur, g));
    };
    for i in 0..n {
        for j in i..n {
            let poly = f.coeff_poly(i, j);
            for (s, g) in poly.iter().enumerate() {
                if field.is_zero(g) {
                    continue;
                }
                if i == j {
                    // (sum_e c_e T^e)^2: diagonal in c_e at T^2e, and
                    // doubled cross terms at T^(e1+e2)
                    for e1 in 0..=dd {
                        for e2 in e1..=dd {
                            let t = e1 + e2 + s;
                            let u = i * (dd + 1) + e1;
                            let v = i * (dd + 1) + e2;
                            let add = if e1 == e2 { g.clone() } else { field.add(g, g) };
                            bump(&mut forms[t], u, v, &add);
                        }
                    }
                } else {
                    for e1 in 0..=dd {
                        for e2 in 0..=dd {
                            let t = e1 + e2 + s;
                            let u = i * (dd + 1) + e1;
                            let v = j * (dd + 1) + e2;
                            bump(&mut forms[t], u, v, g);
                        }
                    }
                }
            }
        }
    }
    Ok(ReductionResult {
        n,
        d,
        t_degree,
        system: FormSystem::new(field, unknowns, forms)?,
    })
}

/// Maps a common zero of the compiled system back to the polynomial
/// vector it encodes (trailing zero coefficients trimmed).
pub fn solution_to_polynomials(
    res: &ReductionResult,
    c: &[FieldElement],
) -> Result<Vec<Vec<FieldElement>>> {
    if c.len() != res.unknowns() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for {} unknowns",
            c.len(),
            res.unknowns()
        )));
    }
    if !res.system.is_zero_at(c)? {
        return Err(Error::NotAZero(
            "the vector is not a common zero of the compiled system".into(),
        ));
    }
    let field = res.system.field();
    let w = res.d as usize + 1;
    Ok((0..res.n)
        .map(|i| {
            let mut p: Vec<FieldElement> = c[i * w..(i + 1) * w].to_vec();
            poly_trim(field, &mut p);
            p
        })
        .collect())
}

/// Least d with n(d+1) > 4(2d + t_degree + 1), when one exists: for
/// n >= 8 the margin grows with d, below that it only shrinks.
pub fn ansatz_threshold(n: usize, t_degree: u32) -> Option<u32> {
    (0..=10_000u32).find(|&d| {
        let unknowns = n as u64 * (d as u64 + 1);
        let forms = 2 * d as u64 + t_degree as u64 + 1;
        unknowns > 4 * forms
    })
}

/// A parsed function-field document: the .qfs grammar with `T` allowed
/// in coefficients.
#[derive(Debug, Clone)]
pub struct FTDocument {
    pub comments: Vec<String>,
    pub names: Vec<String>,
    pub field: FieldDesc,
    pub n: usize,
    pub forms: Vec<FTForm>,
}

impl FTDocument {
    pub fn form_by_name(&self, name: &str) -> Option<&FTForm> {
        self.names
            .iter()
            .position(|x| x == name)
            .map(|i| &self.forms[i])
    }
}

fn poly_of_monos(
    field: &FieldDesc,
    monos: &[RawMono],
    line: usize,
    col: usize,
) -> Result<Vec<FieldElement>> {
    let mut out: Vec<FieldElement> = Vec::new();
    for m in monos {
        let mut v = match &m.coeff {
            Some(s) => field.from_bigint(&bigint_of(s, line, col)?),
            None => field.one(),
        };
        if m.neg {
            v = field.neg(&v);
        }
        let pw = m.pow as usize;
        if out.len() <= pw {
            out.resize(pw + 1, field.zero());
        }
        out[pw] = field.add(&out[pw], &v);
    }
    poly_trim(field, &mut out);
    Ok(out)
}

fn poly_pow(field: &FieldDesc, base: &[FieldElement], pow: u32) -> Vec<FieldElement> {
    let mut acc = vec![field.one()];
    for _ in 0..pow {
        acc = poly_mul(field, &acc, base);
    }
    acc
}

fn fold_ft_expr(field: &FieldDesc, n: usize, terms: &[RawTerm]) -> Result<FTForm> {
    let mut f = FTForm::zero(field.clone(), n)?;
    if is_zero_expr(terms) {
        return Ok(f);
    }
    for term in terms {
        let mut coeff: Vec<FieldElement> = vec![field.one()];
        let mut vars: Vec<usize> = Vec::new();
        for fac in &term.factors {
            match &fac.atom {
                RawAtom::Int(s) => {
                    let v = field.from_bigint(&bigint_of(s, fac.line, fac.col)?);
                    poly_scale(field, &mut coeff, &field.pow(&v, fac.pow as u64));
                }
                RawAtom::Ratio(ns, ds) => {
                    let num = bigint_of(ns, fac.line, fac.col)?;
                    let den = bigint_of(ds, fac.line, fac.col)?;
                    let v = field.from_ratio(&num, &den)?;
                    poly_scale(field, &mut coeff, &field.pow(&v, fac.pow as u64));
                }
                RawAtom::Var(k) => {
                    if *k == 0 || *k as usize > n {
                        return Err(Error::UnknownVariable {
                            line: fac.line,
                            col: fac.col,
                            msg: format!("x{k} with vars {n}"),
                        });
                    }
                    for _ in 0..fac.pow {
                        vars.push(*k as usize - 1);
                    }
                }
                RawAtom::Gen(false) => {
                    let t = gen_element(field, fac.line, fac.col)?;
                    poly_scale(field, &mut coeff, &field.pow(&t, fac.pow as u64));
                }
                RawAtom::Gen(true) => {
                    // multiply by T^pow: shift coefficients up
                    let mut shifted = vec![field.zero(); fac.pow as usize];
                    shifted.append(&mut coeff);
                    coeff = shifted;
                }
                RawAtom::Poly(monos, false) => {
                    let v = fold_poly_atom(field, monos, false, fac.line, fac.col)?;
                    poly_scale(field, &mut coeff, &field.pow(&v, fac.pow as u64));
                }
                RawAtom::Poly(monos, true) => {
                    let base = poly_of_monos(field, monos, fac.line, fac.col)?;
                    coeff = poly_mul(field, &coeff, &poly_pow(field, &base, fac.pow));
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
            for v in coeff.iter_mut() {
                *v = field.neg(v);
            }
        }
        vars.sort_unstable();
        f.add_to_coeff(vars[0], vars[1], &coeff);
    }
    Ok(f)
}

/// Parses a .qfs document whose form expressions may use `T`.
pub fn parse_ft_document(text: &str) -> Result<FTDocument> {
    let raw = split_document(text)?;
    let field = parse_header(&raw.header)?;
    let n = parse_vars(&raw.vars)?;
    let mut names = Vec::new();
    let mut forms = Vec::new();
    for (name, toks, line) in &raw.forms {
        let terms = parse_raw_expr(toks, *line)?;
        forms.push(fold_ft_expr(&field, n, &terms)?);
        names.push(name.clone());
    }
    if forms.is_empty() {
        return Err(Error::SyntaxError {
            line: 1,
            col: 1,
            msg: "a document needs at least one form".into(),
        });
    }
    Ok(FTDocument {
        comments: raw.comments,
        names,
        field,
        n,
        forms,
    })
}

/// Canonical text for a T-coefficient document: byte-deterministic,
/// LF endings, same header and sign conventions as the base
/// serializer.  A coefficient polynomial is split across terms, one
/// per nonzero T-power, so the output stays inside the grammar even
/// over extension fields (a parenthesized group is pure in t or T,
/// never mixed).
pub fn serialize_ft_document(doc: &FTDocument) -> String {
    let mut out = String::new();
    for c in &doc.comments {
        out.push_str(c);
        out.push('\n');
    }
    let field = &doc.field;
    out.push_str(&crate::formlang::serialize_header(field));
    out.push('\n');
    out.push_str(&format!("vars {}\n", doc.n));
    for (name, f) in doc.names.iter().zip(&doc.forms) {
        out.push_str(&format!("form {name} = {}\n", serialize_ft_form(field, f)));
    }
    out
}

fn serialize_ft_form(field: &FieldDesc, f: &FTForm) -> String {
    let n = f.n();
    let mut parts: Vec<(bool, String)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let vars = if i == j {
                format!("x{}^2", i + 1)
            } else {
                format!("x{}*x{}", i + 1, j + 1)
            };
            for (e, c) in f.coeff_poly(i, j).iter().enumerate() {
                if field.is_zero(c) {
                    continue;
                }
                let (neg, prefix) = crate::formlang::coeff_prefix(field, c);
                let shift = match e {
                    0 => String::new(),
                    1 => "T*".into(),
                    _ => format!("T^{e}*"),
                };
                parts.push((neg, format!("{prefix}{shift}{vars}")));
            }
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (neg, term)) in parts.iter().enumerate() {
        if k == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(term);
    }
    out
}
