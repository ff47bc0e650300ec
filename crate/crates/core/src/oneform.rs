//! Single quadratic forms over Q_p: diagonalization, Hilbert symbols,
//! Hasse invariants, the rank-by-rank isotropy decision, and the
//! anisotropic witness constructions.
//!
//! Exports:
//! * [`diagonalize`]: congruence diagonalization over the rationals;
//!   the returned basis replays to an exact polynomial identity.
//! * [`square_class`] / [`hilbert_symbol`] / [`hasse_invariant`]: the
//!   local square-class and symbol arithmetic, exact for every p
//!   including p = 2 (mod-8 unit characters).
//! * [`is_isotropic_qp`]: the standard criteria per rank: degenerate
//!   and rank >= 5 forms are isotropic, rank 1 is not, rank 2 asks
//!   whether -disc is a square, rank 3 compares the Hasse invariant
//!   with (-1,-disc), rank 4 is anisotropic exactly for square
//!   discriminant and the exceptional Hasse value.
//! * [`anisotropic_quaternary`] / [`block_witness`]: the forms showing
//!   that four variables are not enough for one form, nor 4r for r.
//! * [`primitive_zero_mod`]: an exhaustive digit-refinement search for
//!   primitive zeros mod p^m, the validation oracle behind the symbol
//!   and isotropy decisions.

use crate::error::{Error, Result};
use crate::field::{rational_valuation, FieldDesc, FieldElement, FieldKind, MatrixF};
use crate::quadform::{FormSystem, QuadraticForm};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Node cap for [`primitive_zero_mod`] callers that do not care.
pub const ORACLE_BUDGET: u64 = 10_000_000;

fn p_power(p: u64, e: i64) -> BigRational {
    let pk = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from(pk)
    } else {
        BigRational::new(BigInt::one(), pk)
    }
}

fn require_padic(field: &FieldDesc) -> Result<u64> {
    if field.kind() != FieldKind::PadicRational {
        return Err(Error::FieldMismatch(format!(
            "this analysis runs over Q_p, got {}",
            field.name()
        )));
    }
    Ok(field.p())
}

fn nonzero(label: &str, a: &BigRational) -> Result<()> {
    if a.is_zero() {
        return Err(Error::PreconditionViolated(format!("{label} must be nonzero")));
    }
    Ok(())
}

/// Residue mod p of the unit part of a nonzero rational (p odd), or
/// mod 8 when p = 2.
fn unit_residue(p: u64, a: &BigRational) -> Result<u64> {
    let v = rational_valuation(a, p).expect("nonzero");
    let u = a * p_power(p, -v);
    let target = if p == 2 {
        FieldDesc::mod_pk(2, 3)?
    } else {
        FieldDesc::prime(p)?
    };
    let r = crate::quadform::residue_of_rational(&target, &u)?;
    Ok(target.element_index(&r))
}

/// Legendre symbol of a unit residue, by Euler's criterion.
fn legendre(p: u64, r: u64) -> i32 {
    debug_assert!(p % 2 == 1 && r % p != 0);
    let fp = FieldDesc::prime(p).unwrap();
    let e = fp.pow(&fp.element_from_index(r % p), (p - 1) / 2);
    if fp.element_index(&e) == 1 {
        1
    } else {
        -1
    }
}

/// True when a nonzero rational is a square in Q_p: even valuation and
/// a square unit part (quadratic residue mod p, or 1 mod 8 at p = 2).
pub fn is_square(p: u64, a: &BigRational) -> Result<bool> {
    nonzero("square test argument", a)?;
    let v = rational_valuation(a, p).expect("nonzero");
    if v % 2 != 0 {
        return Ok(false);
    }
    let u = unit_residue(p, a)?;
    Ok(if p == 2 { u == 1 } else { legendre(p, u) == 1 })
}

/// Smallest positive representative of the square class of a nonzero
/// rational in Q_p: p^(v mod 2) times a reduced unit (1 or the least
/// non-residue for odd p; 1, 3, 5 or 7 for p = 2).
pub fn square_class(p: u64, a: &BigRational) -> Result<BigRational> {
    nonzero("square class argument", a)?;
    let v = rational_valuation(a, p).expect("nonzero");
    let u = unit_residue(p, a)?;
    let unit = if p == 2 {
        u
    } else if legendre(p, u) == 1 {
        1
    } else {
        least_nonresidue(p)
    };
    Ok(BigRational::from(BigInt::from(unit)) * p_power(p, v.rem_euclid(2)))
}

/// Least quadratic non-residue mod an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&k| legendre(p, k) == -1).expect("p > 2")
}

/// The Hilbert symbol (a, b)_p: +1 exactly when z^2 = a x^2 + b y^2
/// has a nontrivial solution over Q_p.
pub fn hilbert_symbol(p: u64, a: &BigRational, b: &BigRational) -> Result<i32> {
    nonzero("Hilbert symbol argument", a)?;
    nonzero("Hilbert symbol argument", b)?;
    let alpha = rational_valuation(a, p).expect("nonzero").rem_euclid(2);
    let beta = rational_valuation(b, p).expect("nonzero").rem_euclid(2);
    let u = unit_residue(p, a)?;
    let w = unit_residue(p, b)?;
    if p == 2 {
        // eps(u) = (u-1)/2 and omega(u) = (u^2-1)/8 mod 2, read off u mod 8
        let eps = |r: u64| (r % 4 == 3) as i64;
        let omega = |r: u64| (r == 3 || r == 5) as i64;
        let e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
        Ok(if e % 2 == 0 { 1 } else { -1 })
    } else {
        let mut s = 1i32;
        if alpha * beta * (((p - 1) / 2) as i64) % 2 == 1 {
            s = -s;
        }
        if beta == 1 {
            s *= legendre(p, u);
        }
        if alpha == 1 {
            s *= legendre(p, w);
        }
        Ok(s)
    }
}

/// Product of (d_i, d_j)_p over i < j; zero entries are skipped.
pub fn hasse_invariant(p: u64, diagonal: &[BigRational]) -> Result<i32> {
    let nz: Vec<&BigRational> = diagonal.iter().filter(|d| !d.is_zero()).collect();
    let mut s = 1;
    for i in 0..nz.len() {
        for j in i + 1..nz.len() {
            s *= hilbert_symbol(p, nz[i], nz[j])?;
        }
    }
    Ok(s)
}

/// A congruence diagonalization: q(basis x) = sum diagonal_i x_i^2 as
/// an exact polynomial identity.  Zero diagonal entries sit at the
/// trailing positions of the radical.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub diagonal: Vec<BigRational>,
    pub basis: MatrixF,
}

pub fn diagonalize(q: &QuadraticForm) -> Result<Diagonalization> {
    let field = q.field().clone();
    require_padic(&field)?;
    let n = q.n();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    // symmetric Gram matrix: q(x) = x^T A x
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for (i, j, c) in q.terms() {
        let c = field.as_rational(c)?.clone();
        if i == j {
            a[i][i] = c;
        } else {
            a[i][j] = &c * &half;
            a[j][i] = a[i][j].clone();
        }
    }
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    let swap_cols = |a: &mut Vec<Vec<BigRational>>, m: &mut Vec<Vec<BigRational>>, x: usize, y: usize| {
        a.swap(x, y);
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    // col_dst += t * col_src, congruently on a
    let add_col = |a: &mut Vec<Vec<BigRational>>,
                   m: &mut Vec<Vec<BigRational>>,
                   dst: usize,
                   src: usize,
                   t: &BigRational| {
        for r in 0..a.len() {
            let v = &a[r][src] * t;
            a[r][dst] += v;
        }
        for c in 0..a.len() {
            let v = &a[src][c] * t;
            a[dst][c] += v;
        }
        for row in m.iter_mut() {
            let v = &row[src] * t;
            row[dst] += v;
        }
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                swap_cols(&mut a, &mut m, k, i);
            } else if let Some((i, j)) = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_zero())
            {
                // q(e_i + e_j) = 2 a_ij != 0 repairs the pivot
                add_col(&mut a, &mut m, i, j, &BigRational::one());
                if i != k {
                    swap_cols(&mut a, &mut m, k, i);
                }
            } else {
                break;
            }
        }
        let d = a[k][k].clone();
        for j in k + 1..n {
            if !a[k][j].is_zero() {
                let t = -(&a[k][j] / &d);
                add_col(&mut a, &mut m, j, k, &t);
            }
        }
    }
    let diagonal: Vec<BigRational> = (0..n).map(|i| a[i][i].clone()).collect();
    let rows: Vec<Vec<FieldElement>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| field.from_rational(v.clone()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Diagonalization {
        diagonal,
        basis: MatrixF::from_rows(field, rows)?,
    })
}

/// Square-class data of a form over Q_p, fully recomputable.
#[derive(Debug, Clone)]
pub struct FormInvariants {
    pub p: u64,
    pub rank: usize,
    /// Square-class representatives of the nonzero diagonal entries.
    pub diagonal: Vec<BigRational>,
    /// Square class of the product of the diagonal (1 for rank 0).
    pub discriminant: BigRational,
    /// Product of the pairwise Hilbert symbols.
    pub hasse: i32,
}

pub fn invariants(q: &QuadraticForm) -> Result<FormInvariants> {
    let p = require_padic(q.field())?;
    let diag = diagonalize(q)?;
    let reduced: Vec<BigRational> = diag
        .diagonal
        .iter()
        .filter(|d| !d.is_zero())
        .map(|d| square_class(p, d))
        .collect::<Result<_>>()?;
    let rank = reduced.len();
    let discriminant = if rank == 0 {
        BigRational::one()
    } else {
        square_class(p, &reduced.iter().product())?
    };
    let hasse = hasse_invariant(p, &reduced)?;
    Ok(FormInvariants {
        p,
        rank,
        diagonal: reduced,
        discriminant,
        hasse,
    })
}

/// An isotropy decision together with the rule that produced it.
#[derive(Debug, Clone)]
pub struct IsotropyReport {
    pub isotropic: bool,
    pub criterion: String,
    pub invariants: FormInvariants,
}

/// Decides whether a form over Q_p has a nontrivial zero.
pub fn is_isotropic_qp(q: &QuadraticForm) -> Result<IsotropyReport> {
    let p = require_padic(q.field())?;
    let inv = invariants(q)?;
    let minus_one = -BigRational::one();
    let (isotropic, criterion) = if inv.rank < q.n() {
        (
            true,
            "degenerate: the radical of the polar form is made of zeros".to_string(),
        )
    } else {
        match inv.rank {
            0 => unreachable!("rank 0 with n = 0 has no variables"),
            1 => (false, "rank 1: a single square vanishes only at zero".into()),
            2 => {
                let s = is_square(p, &(&minus_one * &inv.discriminant))?;
                (
                    s,
                    format!(
                        "rank 2: -disc is {}a square in Q_{p}",
                        if s { "" } else { "not " }
                    ),
                )
            }
            3 => {
                let t = hilbert_symbol(p, &minus_one, &(&minus_one * &inv.discriminant))?;
                (
                    inv.hasse == t,
                    format!("rank 3: Hasse invariant {} vs (-1,-disc) = {t}", inv.hasse),
                )
            }
            4 => {
                let square_disc = is_square(p, &inv.discriminant)?;
                let bad = -hilbert_symbol(p, &minus_one, &minus_one)?;
                let aniso = square_disc && inv.hasse == bad;
                (
                    !aniso,
                    if aniso {
                        format!("rank 4: square disc and Hasse invariant {bad}, the anisotropic pair")
                    } else {
                        "rank 4: disc or Hasse invariant is generic".to_string()
                    },
                )
            }
            _ => (true, "rank 5 or more: always isotropic over Q_p".into()),
        }
    };
    Ok(IsotropyReport {
        isotropic,
        criterion,
        invariants: inv,
    })
}

/// x1^2 - k x2^2 + p(x3^2 - k x4^2) with k the least non-residue for
/// odd p; the sum of four squares for p = 2.  Anisotropic either way.
pub fn anisotropic_quaternary(p: u64) -> Result<QuadraticForm> {
    let field = FieldDesc::padic(p, 8)?;
    if p == 2 {
        return QuadraticForm::from_terms(field, 4, &[(0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1)]);
    }
    let k = least_nonresidue(p) as i64;
    QuadraticForm::from_terms(
        field,
        4,
        &[
            (0, 0, 1),
            (1, 1, -k),
            (2, 2, p as i64),
            (3, 3, -k * p as i64),
        ],
    )
}

/// r disjoint copies of the anisotropic quaternary on consecutive
/// 4-variable blocks: a system in 4r variables whose only common zero
/// over Q_p is trivial.
pub fn block_witness(r: usize, p: u64) -> Result<FormSystem> {
    if r == 0 {
        return Err(Error::PreconditionViolated("at least one block".into()));
    }
    let quaternary = anisotropic_quaternary(p)?;
    let field = quaternary.field().clone();
    let n = 4 * r;
    let forms: Vec<QuadraticForm> = (0..r)
        .map(|b| {
            let mut f = QuadraticForm::zero(field.clone(), n);
            for (i, j, c) in quaternary.terms() {
                f.set_coeff(4 * b + i, 4 * b + j, c.clone());
            }
            f
        })
        .collect();
    FormSystem::new(field, n, forms)
}

/// Exhaustive search for a primitive zero of q mod p^m (coefficients
/// must be p-integral).  Residues are refined digit by digit: a class
/// x mod p^t survives when v_p(q(x)) >= t, so the search visits every
/// primitive class that could still become a zero and nothing else.
/// Exceeding `budget` visited classes is an error, never a verdict.
pub fn primitive_zero_mod(
    q: &QuadraticForm,
    m: u32,
    budget: u64,
) -> Result<Option<Vec<BigUint>>> {
    let p = require_padic(q.field())?;
    if m < 1 {
        return Err(Error::PreconditionViolated("precision must be positive".into()));
    }
    let n = q.n();
    let digits = (p as u128).checked_pow(n as u32).filter(|&d| d <= 10_000_000);
    let Some(digit_count) = digits else {
        return Err(Error::TooLarge(format!("p^n = {p}^{n} digit layers")));
    };
    let digit_count = digit_count as u64;
    let zk = FieldDesc::mod_pk(p, m)?;
    let qm = q.reduce_mod(&zk)?;
    let mut spent = 0u64;

    struct Dfs<'a> {
        zk: &'a FieldDesc,
        qm: &'a QuadraticForm,
        p: u64,
        n: usize,
        m: u32,
        digit_count: u64,
        budget: u64,
    }
    impl Dfs<'_> {
        fn digit_vector(&self, idx: u64) -> Vec<u64> {
            let mut d = vec![0u64; self.n];
            let mut t = idx;
            for slot in d.iter_mut() {
                *slot = t % self.p;
                t /= self.p;
            }
            d
        }
        fn rec(
            &self,
            x: &[FieldElement],
            t: u32,
            spent: &mut u64,
        ) -> Result<Option<Vec<FieldElement>>> {
            *spent += 1;
            if *spent > self.budget {
                return Err(Error::BudgetExhausted(format!(
                    "{} digit classes visited",
                    self.budget
                )));
            }
            let v = self.zk.valuation(&self.qm.evaluate(x)?);
            if v.is_some_and(|v| (v as u32) < t) {
                return Ok(None);
            }
            if t == self.m {
                return Ok(Some(x.to_vec()));
            }
            let pt = self.zk.from_bigint(&BigInt::from(BigUint::from(self.p).pow(t)));
            for idx in 0..self.digit_count {
                let d = self.digit_vector(idx);
                let child: Vec<FieldElement> = x
                    .iter()
                    .zip(&d)
                    .map(|(xi, &di)| {
                        self.zk
                            .add(xi, &self.zk.mul(&pt, &self.zk.element_from_index(di)))
                    })
                    .collect();
                if let Some(found) = self.rec(&child, t + 1, spent)? {
                    return Ok(Some(found));
                }
            }
            Ok(None)
        }
    }
    let dfs = Dfs {
        zk: &zk,
        qm: &qm,
        p,
        n,
        m,
        digit_count,
        budget,
    };
    for idx in 1..digit_count {
        let root: Vec<FieldElement> = dfs
            .digit_vector(idx)
            .into_iter()
            .map(|d| zk.element_from_index(d))
            .collect();
        if let Some(found) = dfs.rec(&root, 1, &mut spent)? {
            return Ok(Some(
                found
                    .iter()
                    .map(|e| match e {
                        FieldElement::Res(u) => u.clone(),
                        _ => unreachable!("residue domain"),
                    })
                    .collect(),
            ));
        }
    }
    Ok(None)
}

/// Isotropy decided by exhaustive search instead of symbols: the form
/// is scaled entrywise to square-class representatives (valuations in
/// {0, 1}), where a primitive zero mod p^5 exists if and only if the
/// form is isotropic: one-variable Newton at a unit coordinate needs
/// v(q(x)) > 2 v(2 d_i), and 2 v(2 d_i) + 1 <= 5 both for odd p and
/// for p = 2.
pub fn isotropic_by_search(q: &QuadraticForm, budget: u64) -> Result<bool> {
    let p = require_padic(q.field())?;
    let field = q.field().clone();
    let diag = diagonalize(q)?;
    let mut f = QuadraticForm::zero(field.clone(), q.n());
    for (i, d) in diag.diagonal.iter().enumerate() {
        if d.is_zero() {
            // a radical direction is already a zero
            return Ok(true);
        }
        f.set_coeff(i, i, field.from_rational(square_class(p, d)?)?);
    }
    Ok(primitive_zero_mod(&f, 5, budget)?.is_some())
}
