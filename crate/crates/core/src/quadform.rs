//! Quadratic forms and form systems in upper-triangular storage.
//!
//! A form in n variables keeps one coefficient c_ij per index pair
//! i <= j, so characteristic 2 is first-class: nothing ever divides by
//! 2, and the associated bilinear form is always the polarization
//! `b(x, y) = q(x+y) - q(x) - q(y)` (alternating when char = 2).
//!
//! Exports:
//! * [`QuadraticForm`], [`FormSystem`]: coefficients plus their domain.
//! * [`TransformPair`]: a variable change M and a form change P over the
//!   rationals with cached p-valuations of their determinants.
//! * radicals, ranks, effective-variable reduction, rank distributions
//!   and restriction to subspaces.

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement, FieldKind, MatrixF};
use crate::field::f2::F2Form;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Cap on q^r in [`FormSystem::rank_distribution`].
pub const MAX_SPAN_ENUM: u64 = 1_000_000;
/// Cap on |kernel| for the exhaustive char-2 radical path.
pub const MAX_RADICAL_ENUM: u64 = 1 << 20;

/// A single quadratic form: coefficients c_ij for i <= j, row-major in
/// the packed upper triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    field: FieldDesc,
    n: usize,
    coeffs: Vec<FieldElement>,
}

/// Packed index of the pair (i, j), i <= j.
pub(crate) fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

impl QuadraticForm {
    pub fn zero(field: FieldDesc, n: usize) -> Self {
        let z = field.zero();
        QuadraticForm {
            field,
            n,
            coeffs: vec![z; n * (n + 1) / 2],
        }
    }

    /// Builds a form from a packed upper triangle, validating entries.
    pub fn from_coeffs(field: FieldDesc, n: usize, coeffs: Vec<FieldElement>) -> Result<Self> {
        if coeffs.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients for n = {n}",
                n * (n + 1) / 2
            )));
        }
        for c in &coeffs {
            field.check_element(c)?;
        }
        Ok(QuadraticForm { field, n, coeffs })
    }

    /// Builds a form from sparse integer terms `(i, j, c)` (0-based,
    /// any order of i and j; duplicate pairs accumulate).
    pub fn from_terms(field: FieldDesc, n: usize, terms: &[(usize, usize, i64)]) -> Result<Self> {
        let mut q = Self::zero(field, n);
        for &(i, j, c) in terms {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch(format!(
                    "term index ({i},{j}) outside n = {n}"
                )));
            }
            let (a, b) = (i.min(j), i.max(j));
            let add = q.field.from_int(c);
            let cur = q.coeff(a, b).clone();
            q.set_coeff(a, b, q.field.add(&cur, &add));
        }
        Ok(q)
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> &FieldElement {
        let (a, b) = (i.min(j), i.max(j));
        &self.coeffs[tri_index(self.n, a, b)]
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: FieldElement) {
        let (a, b) = (i.min(j), i.max(j));
        self.coeffs[tri_index(self.n, a, b)] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    /// Nonzero terms `(i, j, c)` in (i, j) order.
    pub fn terms(&self) -> Vec<(usize, usize, &FieldElement)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let c = &self.coeffs[tri_index(self.n, i, j)];
                if !self.field.is_zero(c) {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// q(x).
    pub fn evaluate(&self, x: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch("evaluation point length".into()));
        }
        for v in x {
            self.field.check_element(v)?;
        }
        let f = &self.field;
        let mut acc = f.zero();
        for i in 0..self.n {
            if f.is_zero(&x[i]) {
                continue;
            }
            for j in i..self.n {
                let c = &self.coeffs[tri_index(self.n, i, j)];
                if f.is_zero(c) || f.is_zero(&x[j]) {
                    continue;
                }
                acc = f.add(&acc, &f.mul(c, &f.mul(&x[i], &x[j])));
            }
        }
        Ok(acc)
    }

    /// Polarization b(x, y) = q(x+y) - q(x) - q(y), computed directly
    /// from the coefficients:
    /// `b = sum_{i<j} c_ij (x_i y_j + x_j y_i) + sum_i 2 c_ii x_i y_i`.
    pub fn bilinear(&self, x: &[FieldElement], y: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::DimensionMismatch("bilinear point length".into()));
        }
        for v in x.iter().chain(y.iter()) {
            self.field.check_element(v)?;
        }
        let f = &self.field;
        let two = f.from_int(2);
        let mut acc = f.zero();
        for i in 0..self.n {
            for j in i..self.n {
                let c = &self.coeffs[tri_index(self.n, i, j)];
                if f.is_zero(c) {
                    continue;
                }
                let term = if i == j {
                    f.mul(&two, &f.mul(c, &f.mul(&x[i], &y[i])))
                } else {
                    let cross = f.add(&f.mul(&x[i], &y[j]), &f.mul(&x[j], &y[i]));
                    f.mul(c, &cross)
                };
                acc = f.add(&acc, &term);
            }
        }
        Ok(acc)
    }

    /// Gram matrix of the polarization bilinear form.
    pub fn bilinear_gram(&self) -> MatrixF {
        let f = &self.field;
        let two = f.from_int(2);
        let mut g = MatrixF::zero(f.clone(), self.n, self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let c = &self.coeffs[tri_index(self.n, i, j)];
                if f.is_zero(c) {
                    continue;
                }
                if i == j {
                    g.set(i, i, f.mul(&two, c));
                } else {
                    g.set(i, j, c.clone());
                    g.set(j, i, c.clone());
                }
            }
        }
        g
    }

    /// Gradient of q at x: the vector `(b(e_j, x))_j`.
    pub fn gradient(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch("gradient point length".into()));
        }
        let f = &self.field;
        let two = f.from_int(2);
        let mut g = vec![f.zero(); self.n];
        for i in 0..self.n {
            for j in i..self.n {
                let c = &self.coeffs[tri_index(self.n, i, j)];
                if f.is_zero(c) {
                    continue;
                }
                if i == j {
                    let t = f.mul(&two, &f.mul(c, &x[i]));
                    g[i] = f.add(&g[i], &t);
                } else {
                    let ti = f.mul(c, &x[j]);
                    g[i] = f.add(&g[i], &ti);
                    let tj = f.mul(c, &x[i]);
                    g[j] = f.add(&g[j], &tj);
                }
            }
        }
        Ok(g)
    }

    /// The form q(Mx) for an n x n matrix M over the same domain.
    pub fn apply_variable_change(&self, m: &MatrixF) -> Result<QuadraticForm> {
        if m.field() != &self.field {
            return Err(Error::FieldMismatch("variable change matrix".into()));
        }
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::DimensionMismatch("variable change shape".into()));
        }
        let f = &self.field;
        let mut out = QuadraticForm::zero(f.clone(), self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let c = &self.coeffs[tri_index(self.n, i, j)];
                if f.is_zero(c) {
                    continue;
                }
                for a in 0..self.n {
                    let mia = m.get(i, a);
                    if f.is_zero(mia) {
                        continue;
                    }
                    for b in 0..self.n {
                        let mjb = m.get(j, b);
                        if f.is_zero(mjb) {
                            continue;
                        }
                        let add = f.mul(c, &f.mul(mia, mjb));
                        let (u, v) = (a.min(b), a.max(b));
                        let cur = out.coeff(u, v).clone();
                        out.set_coeff(u, v, f.add(&cur, &add));
                    }
                }
            }
        }
        Ok(out)
    }

    /// c * q.
    pub fn scale(&self, c: &FieldElement) -> Result<QuadraticForm> {
        self.field.check_element(c)?;
        let f = &self.field;
        Ok(QuadraticForm {
            field: f.clone(),
            n: self.n,
            coeffs: self.coeffs.iter().map(|v| f.mul(v, c)).collect(),
        })
    }

    pub fn add(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        if self.field != other.field || self.n != other.n {
            return Err(Error::FieldMismatch("form addition".into()));
        }
        let f = &self.field;
        Ok(QuadraticForm {
            field: f.clone(),
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| f.add(a, b))
                .collect(),
        })
    }

    /// Variables with at least one nonzero coefficient.
    pub fn active_variables(&self) -> Vec<usize> {
        let mut active = vec![false; self.n];
        for (i, j, _) in self.terms() {
            active[i] = true;
            active[j] = true;
        }
        (0..self.n).filter(|&i| active[i]).collect()
    }

    /// Radical basis (canonical echelon form) and rank.
    ///
    /// The radical is the set of v with b(v, .) = 0 and q(v) = 0; in odd
    /// or zero characteristic the second condition is automatic and the
    /// radical is the kernel of the Gram matrix.  In characteristic 2
    /// the restriction of q to that kernel is Frobenius-semilinear and
    /// its zero set is found exhaustively for small kernels, otherwise
    /// through one square-root elimination step.  rank = n - dim radical.
    pub fn radical_and_rank(&self) -> Result<(Vec<Vec<FieldElement>>, usize)> {
        if !self.field.is_field() {
            return Err(Error::PreconditionViolated(
                "radical needs a field domain".into(),
            ));
        }
        let f = &self.field;
        let kernel = self.bilinear_gram().kernel_basis()?;
        if f.characteristic() != 2 {
            let rank = self.n - kernel.len();
            return Ok((canonical_basis(f, self.n, kernel)?, rank));
        }
        // char 2: cut the kernel down to the zero set of q.
        let d = kernel.len() as u32;
        let q = f.order().expect("finite characteristic-2 field");
        let radical = if (q as u128).pow(d) <= MAX_RADICAL_ENUM as u128 {
            let mut zeros = Vec::new();
            let total = (q as u128).pow(d) as u64;
            for idx in 0..total {
                let mut v = vec![f.zero(); self.n];
                let mut t = idx;
                for kvec in &kernel {
                    let c = f.element_from_index(t % q);
                    t /= q;
                    if !f.is_zero(&c) {
                        for (vi, ki) in v.iter_mut().zip(kvec.iter()) {
                            *vi = f.add(vi, &f.mul(&c, ki));
                        }
                    }
                }
                if f.is_zero(&self.evaluate(&v)?) {
                    zeros.push(v);
                }
            }
            canonical_basis(f, self.n, zeros)?
        } else {
            let vals: Vec<FieldElement> = kernel
                .iter()
                .map(|k| self.evaluate(k))
                .collect::<Result<_>>()?;
            match vals.iter().position(|v| !f.is_zero(v)) {
                None => canonical_basis(f, self.n, kernel.clone())?,
                Some(i0) => {
                    let s0inv = f.inverse(&vals[i0])?;
                    let mut gens = Vec::new();
                    for (j, kvec) in kernel.iter().enumerate() {
                        if j == i0 {
                            continue;
                        }
                        // q(k_j + c k_i0) = q(k_j) + c^2 q(k_i0) = 0
                        let c = f.sqrt_char2(&f.mul(&vals[j], &s0inv));
                        let adjusted: Vec<FieldElement> = kvec
                            .iter()
                            .zip(kernel[i0].iter())
                            .map(|(a, b)| f.add(a, &f.mul(&c, b)))
                            .collect();
                        gens.push(adjusted);
                    }
                    canonical_basis(f, self.n, gens)?
                }
            }
        };
        let rank = self.n - radical.len();
        Ok((radical, rank))
    }

    /// Rank = n - dim radical.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.radical_and_rank()?.1)
    }

    /// Expresses q in as few variables as possible: returns the minimal
    /// count m, a basis-change matrix N (columns: a complement of the
    /// radical followed by a radical basis) and the reduced form q* on m
    /// variables, so that q(N y) = q*(y_1..y_m) identically.
    pub fn reduce_effective_variables(&self) -> Result<EffectiveReduction> {
        let f = &self.field;
        let (radical, rank) = self.radical_and_rank()?;
        // Complement: standard basis vectors away from the radical pivots.
        let pivot_cols: Vec<usize> = radical
            .iter()
            .map(|row| row.iter().position(|c| !f.is_zero(c)).expect("nonzero row"))
            .collect();
        let mut columns: Vec<Vec<FieldElement>> = Vec::with_capacity(self.n);
        for j in 0..self.n {
            if !pivot_cols.contains(&j) {
                let mut e = vec![f.zero(); self.n];
                e[j] = f.one();
                columns.push(e);
            }
        }
        debug_assert_eq!(columns.len(), rank);
        columns.extend(radical.iter().cloned());
        let mut nmat = MatrixF::zero(f.clone(), self.n, self.n);
        for (cidx, col) in columns.iter().enumerate() {
            for i in 0..self.n {
                nmat.set(i, cidx, col[i].clone());
            }
        }
        let complement: Vec<Vec<FieldElement>> = columns[..rank].to_vec();
        let reduced = self.restrict(&complement)?;
        Ok(EffectiveReduction {
            effective: rank,
            basis_change: nmat,
            reduced,
        })
    }

    /// Restriction of q to the span of `basis`: the form on d variables
    /// with `c'_aa = q(v_a)` and `c'_ab = b(v_a, v_b)` for a < b.
    pub fn restrict(&self, basis: &[Vec<FieldElement>]) -> Result<QuadraticForm> {
        let f = &self.field;
        let d = basis.len();
        for v in basis {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch("restriction basis vector".into()));
            }
        }
        let mut out = QuadraticForm::zero(f.clone(), d);
        for a in 0..d {
            out.set_coeff(a, a, self.evaluate(&basis[a])?);
            for b in (a + 1)..d {
                out.set_coeff(a, b, self.bilinear(&basis[a], &basis[b])?);
            }
        }
        Ok(out)
    }

    /// Bit-packed view for F_2 forms with n <= 64.
    pub fn to_f2(&self) -> Option<F2Form> {
        if self.field.kind() != FieldKind::Prime || self.field.p() != 2 || self.n > 64 {
            return None;
        }
        let f = &self.field;
        let mut rows = vec![0u64; self.n];
        for i in 0..self.n {
            for j in i..self.n {
                if !f.is_zero(self.coeff(i, j)) {
                    rows[i] |= 1 << j;
                }
            }
        }
        Some(F2Form::new(self.n, rows))
    }

    /// Minimum p-valuation over nonzero coefficients of a rational form;
    /// `None` for the zero form.
    pub fn min_valuation(&self) -> Result<Option<i64>> {
        if self.field.kind() != FieldKind::PadicRational {
            return Err(Error::FieldMismatch("valuations need a rational form".into()));
        }
        let mut best: Option<i64> = None;
        for c in &self.coeffs {
            if let Some(v) = self.field.valuation(c) {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        Ok(best)
    }

    /// Reduction of an integral rational form mod p (or mod p^k when
    /// `target` is a ModPk description).  Errors with `NonIntegral` if
    /// any coefficient has negative valuation.
    pub fn reduce_mod(&self, target: &FieldDesc) -> Result<QuadraticForm> {
        if self.field.kind() != FieldKind::PadicRational {
            return Err(Error::FieldMismatch("reduction needs a rational form".into()));
        }
        if target.p() != self.field.p()
            || !matches!(target.kind(), FieldKind::Prime | FieldKind::ModPk)
        {
            return Err(Error::FieldMismatch(
                "reduction target must be F_p or Z/p^k at the same prime".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let r = self.field.as_rational(c)?;
                residue_of_rational(target, r)
            })
            .collect::<Result<Vec<_>>>()?;
        QuadraticForm::from_coeffs(target.clone(), self.n, coeffs)
    }
}

/// Canonical residue of a rational with v_p >= 0 in F_p or Z/p^k.
pub fn residue_of_rational(target: &FieldDesc, r: &BigRational) -> Result<FieldElement> {
    let p = BigInt::from(target.p());
    let mut den = r.denom().clone();
    if r.is_zero() {
        return Ok(target.zero());
    }
    let mut num = r.numer().clone();
    while (&num % &p).is_zero() && (&den % &p).is_zero() {
        num /= &p;
        den /= &p;
    }
    if (&den % &p).is_zero() {
        return Err(Error::NonIntegral(format!("coefficient {r} at p = {}", target.p())));
    }
    let dinv = target.inverse(&target.from_bigint(&den))?;
    Ok(target.mul(&target.from_bigint(&num), &dinv))
}

/// Result of [`QuadraticForm::reduce_effective_variables`].
#[derive(Debug, Clone)]
pub struct EffectiveReduction {
    /// Minimal number of variables (the rank).
    pub effective: usize,
    /// n x n basis change N with q(N y) = reduced(y_1..y_m).
    pub basis_change: MatrixF,
    /// The reduced form on `effective` variables.
    pub reduced: QuadraticForm,
}

/// Echelon-canonical basis of the span of `vectors` (RREF rows).
pub fn canonical_basis(
    field: &FieldDesc,
    n: usize,
    vectors: Vec<Vec<FieldElement>>,
) -> Result<Vec<Vec<FieldElement>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let m = MatrixF::from_rows(field.clone(), vectors)?;
    if m.cols() != n {
        return Err(Error::DimensionMismatch("basis vector length".into()));
    }
    let red = m.row_reduce()?;
    let mut rows = Vec::with_capacity(red.rank);
    for i in 0..red.rank {
        rows.push(red.matrix.row(i).to_vec());
    }
    Ok(rows)
}

/// A system of r >= 1 forms over a common domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSystem {
    field: FieldDesc,
    n: usize,
    forms: Vec<QuadraticForm>,
}

impl FormSystem {
    pub fn new(field: FieldDesc, n: usize, forms: Vec<QuadraticForm>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::DimensionMismatch("a system needs at least one form".into()));
        }
        for q in &forms {
            if q.field() != &field || q.n() != n {
                return Err(Error::FieldMismatch("system forms share field and n".into()));
            }
        }
        Ok(FormSystem { field, n, forms })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    pub fn evaluate_all(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.forms.iter().map(|q| q.evaluate(x)).collect()
    }

    pub fn is_zero_at(&self, x: &[FieldElement]) -> Result<bool> {
        for q in &self.forms {
            if !self.field.is_zero(&q.evaluate(x)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn apply_variable_change(&self, m: &MatrixF) -> Result<FormSystem> {
        let forms = self
            .forms
            .iter()
            .map(|q| q.apply_variable_change(m))
            .collect::<Result<Vec<_>>>()?;
        FormSystem::new(self.field.clone(), self.n, forms)
    }

    /// Replaces the forms by P * (q_1..q_r)^T for invertible r x r P.
    pub fn apply_form_change(&self, p: &MatrixF) -> Result<FormSystem> {
        if p.field() != &self.field {
            return Err(Error::FieldMismatch("form change matrix".into()));
        }
        let r = self.r();
        if p.rows() != r || p.cols() != r {
            return Err(Error::DimensionMismatch("form change shape".into()));
        }
        if self.field.is_zero(&p.det()?) {
            return Err(Error::SingularTransform);
        }
        let f = &self.field;
        let mut forms = Vec::with_capacity(r);
        for i in 0..r {
            let mut acc = QuadraticForm::zero(f.clone(), self.n);
            for j in 0..r {
                let c = p.get(i, j);
                if f.is_zero(c) {
                    continue;
                }
                acc = acc.add(&self.forms[j].scale(c)?)?;
            }
            forms.push(acc);
        }
        FormSystem::new(f.clone(), self.n, forms)
    }

    /// The combination a_1 q_1 + ... + a_r q_r.
    pub fn linear_combination(&self, a: &[FieldElement]) -> Result<QuadraticForm> {
        if a.len() != self.r() {
            return Err(Error::DimensionMismatch("combination length".into()));
        }
        let f = &self.field;
        let mut acc = QuadraticForm::zero(f.clone(), self.n);
        for (c, q) in a.iter().zip(self.forms.iter()) {
            f.check_element(c)?;
            if f.is_zero(c) {
                continue;
            }
            acc = acc.add(&q.scale(c)?)?;
        }
        Ok(acc)
    }

    /// Histogram rank -> count over all q^r combinations (finite fields,
    /// q^r capped).
    pub fn rank_distribution(&self) -> Result<BTreeMap<usize, u64>> {
        if !matches!(self.field.kind(), FieldKind::Prime | FieldKind::Extension) {
            return Err(Error::PreconditionViolated(
                "rank distribution needs a finite field".into(),
            ));
        }
        let q = self.field.order().expect("finite");
        let r = self.r() as u32;
        let total = (q as u128).pow(r);
        if total > MAX_SPAN_ENUM as u128 {
            return Err(Error::TooLarge(format!(
                "q^r = {total} exceeds {MAX_SPAN_ENUM}"
            )));
        }
        let mut hist = BTreeMap::new();
        for idx in 0..total as u64 {
            let mut t = idx;
            let mut a = Vec::with_capacity(self.r());
            for _ in 0..r {
                a.push(self.field.element_from_index(t % q));
                t /= q;
            }
            let comb = self.linear_combination(&a)?;
            let rank = comb.rank()?;
            *hist.entry(rank).or_insert(0u64) += 1;
        }
        Ok(hist)
    }

    pub fn restrict(&self, basis: &[Vec<FieldElement>]) -> Result<FormSystem> {
        let forms = self
            .forms
            .iter()
            .map(|q| q.restrict(basis))
            .collect::<Result<Vec<_>>>()?;
        FormSystem::new(self.field.clone(), basis.len(), forms)
    }

    /// Union of the forms' active variables, ascending.
    pub fn active_variables(&self) -> Vec<usize> {
        let mut active = vec![false; self.n];
        for q in &self.forms {
            for i in q.active_variables() {
                active[i] = true;
            }
        }
        (0..self.n).filter(|&i| active[i]).collect()
    }

    /// Minimum coefficient valuation per form (rational systems).
    pub fn min_valuations(&self) -> Result<Vec<Option<i64>>> {
        self.forms.iter().map(|q| q.min_valuation()).collect()
    }

    /// Coefficient-wise reduction of an integral rational system.
    pub fn reduce_mod(&self, target: &FieldDesc) -> Result<FormSystem> {
        let forms = self
            .forms
            .iter()
            .map(|q| q.reduce_mod(target))
            .collect::<Result<Vec<_>>>()?;
        FormSystem::new(target.clone(), self.n, forms)
    }
}

/// A pair (M, P): variable change M in GL_n(Q) and form change P in
/// GL_r(Q), with the p-valuations of their determinants cached.
#[derive(Debug, Clone)]
pub struct TransformPair {
    prime: u64,
    m: MatrixF,
    p_mat: MatrixF,
    vm: i64,
    vp: i64,
}

impl TransformPair {
    pub fn new(prime: u64, m: MatrixF, p_mat: MatrixF) -> Result<Self> {
        for mat in [&m, &p_mat] {
            if mat.field().kind() != FieldKind::PadicRational || mat.field().p() != prime {
                return Err(Error::FieldMismatch(
                    "transform matrices live over the rationals at the given prime".into(),
                ));
            }
            if mat.rows() != mat.cols() {
                return Err(Error::DimensionMismatch("transform matrices are square".into()));
            }
        }
        let dm = m.det()?;
        let dp = p_mat.det()?;
        let fm = m.field().clone();
        if fm.is_zero(&dm) || fm.is_zero(&dp) {
            return Err(Error::SingularTransform);
        }
        let vm = fm.valuation(&dm).expect("nonzero det");
        let vp = fm.valuation(&dp).expect("nonzero det");
        Ok(TransformPair {
            prime,
            m,
            p_mat,
            vm,
            vp,
        })
    }

    pub fn identity(prime: u64, n: usize, r: usize) -> Result<Self> {
        let f = FieldDesc::padic(prime, 1)?;
        Self::new(prime, MatrixF::identity(f.clone(), n), MatrixF::identity(f, r))
    }

    /// Identity pair whose matrices share `field`, so it can be applied
    /// to systems over that exact field.
    pub fn identity_over(field: &FieldDesc, n: usize, r: usize) -> Result<Self> {
        if field.kind() != FieldKind::PadicRational {
            return Err(Error::FieldMismatch(
                "transform pairs live over the rationals at a prime".into(),
            ));
        }
        Self::new(
            field.p(),
            MatrixF::identity(field.clone(), n),
            MatrixF::identity(field.clone(), r),
        )
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn variable_change(&self) -> &MatrixF {
        &self.m
    }

    pub fn form_change(&self) -> &MatrixF {
        &self.p_mat
    }

    /// v_p(det M).
    pub fn vm(&self) -> i64 {
        self.vm
    }

    /// v_p(det P).
    pub fn vp(&self) -> i64 {
        self.vp
    }

    /// Applies the pair to a rational system: P * (S o M).
    pub fn apply(&self, system: &FormSystem) -> Result<FormSystem> {
        let changed = system.apply_variable_change(&self.m)?;
        changed.apply_form_change(&self.p_mat)
    }

    /// Composition: apply `self` first, then `next`.
    pub fn then(&self, next: &TransformPair) -> Result<TransformPair> {
        if self.prime != next.prime {
            return Err(Error::FieldMismatch("transform primes differ".into()));
        }
        // (P2 ((P1 (S o M1)) o M2)) = (P2 P1) (S o (M1 M2))
        let m = self.m.mul(&next.m)?;
        let p_mat = next.p_mat.mul(&self.p_mat)?;
        TransformPair::new(self.prime, m, p_mat)
    }
}
