//! Integral models at a prime: the residue-field minimized verdict, an
//! exact valuation test for transform pairs, and a heuristic loop that
//! strips excess powers of p from a rational system.
//!
//! A system over F_q fails the minimized condition when some
//! k-dimensional subspace of the form span vanishes identically on a
//! subspace of dimension n - 2k: in suitable coordinates those k
//! combinations lose all but 2k variables, so scaling the surviving 2k
//! variables by p and dividing the k combinations by p keeps the system
//! integral while shifting the determinant valuations by (vM, vP) =
//! (2k, -k).  The exact integer comparison n*vP + 2r*vM against 0
//! classifies any transform pair as improving, neutral, or compliant;
//! no floating point is involved anywhere.

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement, FieldKind, MatrixF};
use crate::quadform::{FormSystem, QuadraticForm, TransformPair};
use crate::subspace::{
    find_totally_singular, vanishes_on, walk_singular_tree, SearchBudget, SingularSearch,
    Subspace,
};
use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Cap on the number of span subspaces examined per k.
const MAX_SPAN_SUBSPACES: u64 = 10_000;

/// Evidence that a system is not minimized: k independent combinations
/// of the forms vanish identically on a subspace of dimension n - 2k.
#[derive(Debug, Clone)]
pub struct MinimizeWitness {
    pub k: usize,
    /// k independent coefficient rows in the form span.
    pub combinations: Vec<Vec<FieldElement>>,
    /// The combined forms themselves.
    pub combined: FormSystem,
    /// Common totally singular subspace of dimension n - 2k.
    pub v: Subspace,
}

#[derive(Debug, Clone)]
pub struct MinimizeVerdict {
    pub minimized: bool,
    pub witness: Option<MinimizeWitness>,
}

/// Number of k-dimensional subspaces of F_q^r.
fn gaussian_binomial(r: usize, k: usize, q: u64) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let q = BigUint::from(q);
    for i in 0..k {
        num *= q.pow((r - i) as u32) - BigUint::one();
        den *= q.pow((i + 1) as u32) - BigUint::one();
    }
    num / den
}

/// Canonical echelon bases of all k-dimensional subspaces of F_q^r,
/// enumerated with the subspace walker over a zero form (for which
/// every subspace is totally singular).
fn span_subspaces(field: &FieldDesc, r: usize, k: usize) -> Result<Vec<Vec<Vec<FieldElement>>>> {
    let zero = QuadraticForm::zero(field.clone(), r);
    let sys = FormSystem::new(field.clone(), r, vec![zero])?;
    let mut bases = Vec::new();
    walk_singular_tree(
        &sys,
        k,
        true,
        &SearchBudget {
            max_nodes: u64::MAX,
        },
        &mut |rows| {
            if rows.len() == k {
                bases.push(rows.to_vec());
            }
            Ok(false)
        },
    )?;
    Ok(bases)
}

pub fn is_fq_minimized(system: &FormSystem) -> Result<MinimizeVerdict> {
    is_fq_minimized_with(system, &SearchBudget::default())
}

/// The minimized verdict over a finite field: true iff no k
/// combinations of the forms (k = 1..r) vanish identically on a
/// subspace of dimension n - 2k.  A budget overrun surfaces as
/// BudgetExhausted, never as a false verdict.
pub fn is_fq_minimized_with(
    system: &FormSystem,
    budget: &SearchBudget,
) -> Result<MinimizeVerdict> {
    let field = system.field();
    let q = field.order().ok_or_else(|| {
        Error::PreconditionViolated("minimized verdict runs over finite fields".into())
    })?;
    let r = system.forms().len();
    if r > 4 {
        return Err(Error::PreconditionViolated(format!(
            "minimized verdict supports up to 4 forms, got {r}"
        )));
    }
    let n = system.n();
    for k in 1..=r {
        if 2 * k > n {
            // More variables to kill than exist.
            continue;
        }
        let count = gaussian_binomial(r, k, q);
        if count > BigUint::from(MAX_SPAN_SUBSPACES) {
            return Err(Error::TooLarge(format!(
                "{count} span subspaces at k = {k} exceed the enumeration cap"
            )));
        }
        for basis in span_subspaces(field, r, k)? {
            let combined_forms = basis
                .iter()
                .map(|row| system.linear_combination(row))
                .collect::<Result<Vec<_>>>()?;
            let combined = FormSystem::new(field.clone(), n, combined_forms)?;
            match find_totally_singular(&combined, n - 2 * k, budget)? {
                SingularSearch::Found(v) => {
                    return Ok(MinimizeVerdict {
                        minimized: false,
                        witness: Some(MinimizeWitness {
                            k,
                            combinations: basis,
                            combined,
                            v,
                        }),
                    });
                }
                SingularSearch::NotFound { certified: true, .. } => {}
                SingularSearch::NotFound { certified: false, .. } => {
                    return Err(Error::BudgetExhausted(
                        "minimized verdict ran out of search budget".into(),
                    ));
                }
            }
        }
    }
    Ok(MinimizeVerdict {
        minimized: true,
        witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformClass {
    /// n*vP + 2r*vM < 0: the pair contradicts minimality of the model.
    Improving,
    Neutral,
    Compliant,
}

#[derive(Debug, Clone)]
pub struct TransformCheck {
    /// Every coefficient of P (S o M) has valuation >= 0.
    pub integral: bool,
    pub class: TransformClass,
    /// The exact comparison value n*vP + 2r*vM.
    pub score: i128,
}

/// Applies the pair exactly over the rationals and classifies it by
/// determinant valuations.
pub fn check_transform(system: &FormSystem, pair: &TransformPair) -> Result<TransformCheck> {
    let field = system.field();
    if field.kind() != FieldKind::PadicRational || field.p() != pair.prime() {
        return Err(Error::FieldMismatch(
            "transform check needs a rational system at the pair's prime".into(),
        ));
    }
    let transformed = pair.apply(system)?;
    let integral = transformed
        .min_valuations()?
        .iter()
        .all(|v| v.map_or(true, |v| v >= 0));
    let n = system.n() as i128;
    let r = system.forms().len() as i128;
    let score = n * pair.vp() as i128 + 2 * r * pair.vm() as i128;
    let class = match score.cmp(&0) {
        std::cmp::Ordering::Less => TransformClass::Improving,
        std::cmp::Ordering::Equal => TransformClass::Neutral,
        std::cmp::Ordering::Greater => TransformClass::Compliant,
    };
    Ok(TransformCheck {
        integral,
        class,
        score,
    })
}

fn lift_residue(qp: &FieldDesc, residue: &FieldDesc, x: &FieldElement) -> FieldElement {
    qp.from_bigint(&BigInt::from(residue.element_index(x)))
}

/// Builds the transform pair suggested by a witness: M sends the first
/// 2k coordinates (scaled by p) to a complement of V and the rest to
/// lifts of V's basis; P moves the k witness combinations first and
/// divides them by p.  The result has vM = 2k and vP = -k.
pub fn witness_to_transform(
    system: &FormSystem,
    witness: &MinimizeWitness,
) -> Result<TransformPair> {
    let qp = system.field();
    if qp.kind() != FieldKind::PadicRational {
        return Err(Error::FieldMismatch(
            "witness transforms apply to rational systems".into(),
        ));
    }
    let p = qp.p();
    let residue = FieldDesc::prime(p)?;
    let n = system.n();
    let r = system.forms().len();
    let k = witness.k;
    if k == 0 || k > r || witness.combinations.len() != k {
        return Err(Error::WitnessInvalid("combination count".into()));
    }
    if witness.v.n() != n || witness.v.dim() + 2 * k != n {
        return Err(Error::WitnessInvalid("subspace dimension".into()));
    }
    if witness.v.field() != &residue {
        return Err(Error::WitnessInvalid("witness lives over the wrong residue field".into()));
    }
    // Replay: the combinations, applied to the reduction of the system,
    // must vanish identically on V.
    let reduced = system.reduce_mod(&residue)?;
    let combined_forms = witness
        .combinations
        .iter()
        .map(|row| {
            if row.len() != r {
                return Err(Error::WitnessInvalid("combination row length".into()));
            }
            reduced.linear_combination(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let combined = FormSystem::new(residue.clone(), n, combined_forms)?;
    if !vanishes_on(&combined, &witness.v)? {
        return Err(Error::WitnessInvalid(
            "combinations do not vanish on the claimed subspace".into(),
        ));
    }
    let comb_reduced = MatrixF::from_rows(residue.clone(), witness.combinations.clone())?
        .row_reduce()?;
    if comb_reduced.rank != k {
        return Err(Error::WitnessInvalid("combinations are dependent".into()));
    }

    let pivots = witness.v.pivots();
    let complement: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let p_elem = qp.from_bigint(&BigInt::from(p));
    let mut m_rows = vec![vec![qp.zero(); n]; n];
    for (col, &c) in complement.iter().enumerate() {
        m_rows[c][col] = p_elem.clone();
    }
    for (t, row) in witness.v.basis().iter().enumerate() {
        for i in 0..n {
            m_rows[i][2 * k + t] = lift_residue(qp, &residue, &row[i]);
        }
    }
    let mut p_rows = Vec::with_capacity(r);
    for row in &witness.combinations {
        let mut out = Vec::with_capacity(r);
        for c in row {
            let num = BigInt::from(residue.element_index(c));
            out.push(qp.from_ratio(&num, &BigInt::from(p))?);
        }
        p_rows.push(out);
    }
    for t in 0..r {
        if !comb_reduced.pivots.contains(&t) {
            let mut e = vec![qp.zero(); r];
            e[t] = qp.one();
            p_rows.push(e);
        }
    }
    let pair = TransformPair::new(
        p,
        MatrixF::from_rows(qp.clone(), m_rows)?,
        MatrixF::from_rows(qp.clone(), p_rows)?,
    )?;
    if !check_transform(system, &pair)?.integral {
        return Err(Error::WitnessInvalid(
            "suggested transform does not keep the system integral".into(),
        ));
    }
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The residue system passed the minimized verdict.
    Minimized,
    /// The verdict failed but its witness transform does not improve
    /// (possible when n <= 4r).
    NoImprovingStep,
    /// The verdict ran out of budget; the model may or may not be
    /// minimal.
    VerdictUnknown,
    IterationLimit,
}

#[derive(Debug)]
pub struct Minimization {
    pub model: FormSystem,
    /// Denominator clearing and per-form primitivization, if any.
    pub normalization: Option<TransformPair>,
    /// Improving steps, in application order.
    pub log: Vec<TransformPair>,
    pub converged: bool,
    pub reason: StopReason,
}

/// A variable all of whose coefficients carry excess p-valuation
/// (diagonal >= 2, cross terms >= 1), so x_j -> x_j / p keeps the
/// system integral.  Inactive variables do not count.
fn excess_variable(model: &FormSystem) -> Result<Option<usize>> {
    let field = model.field();
    let n = model.n();
    for j in 0..n {
        let mut touched = false;
        let mut ok = true;
        'forms: for form in model.forms() {
            for i in 0..n {
                let c = form.coeff(i.min(j), i.max(j));
                if field.is_zero(c) {
                    continue;
                }
                touched = true;
                let v = field.valuation(c).expect("nonzero coefficient");
                let need = if i == j { 2 } else { 1 };
                if v < need {
                    ok = false;
                    break 'forms;
                }
            }
        }
        if touched && ok {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

fn rescale_variable(model: &FormSystem, j: usize) -> Result<TransformPair> {
    let qp = model.field();
    let p = qp.p();
    let n = model.n();
    let r = model.forms().len();
    let mut m = MatrixF::identity(qp.clone(), n);
    m.set(j, j, qp.from_ratio(&BigInt::one(), &BigInt::from(p))?);
    TransformPair::new(p, m, MatrixF::identity(qp.clone(), r))
}

/// Starts from a primitive integral model (denominators and common
/// p-powers cleared per form) and repeatedly applies improving
/// transforms: excess-valuation variable rescalings, then transforms
/// suggested by minimized-verdict witnesses.  Stops at a minimized
/// reduction (converged), at a witness whose transform does not
/// improve, at an unknown verdict, or at max_iter.
pub fn minimize_heuristic(system: &FormSystem, max_iter: usize) -> Result<Minimization> {
    let qp = system.field().clone();
    if qp.kind() != FieldKind::PadicRational {
        return Err(Error::FieldMismatch(
            "minimization runs over the rationals at a prime".into(),
        ));
    }
    let p = qp.p();
    let r = system.forms().len();
    let mut vals = Vec::with_capacity(r);
    for (i, form) in system.forms().iter().enumerate() {
        match form.min_valuation()? {
            Some(v) => vals.push(v),
            None => {
                return Err(Error::DegenerateSystem(format!(
                    "form {} is identically zero",
                    i + 1
                )));
            }
        }
    }
    let mut model = system.clone();
    let mut normalization = None;
    if vals.iter().any(|&v| v != 0) {
        let mut p_mat = MatrixF::identity(qp.clone(), r);
        for (i, &v) in vals.iter().enumerate() {
            let pow = BigInt::from(p).pow(v.unsigned_abs() as u32);
            let c = if v >= 0 {
                qp.from_ratio(&BigInt::one(), &pow)?
            } else {
                qp.from_bigint(&pow)
            };
            p_mat.set(i, i, c);
        }
        let pair = TransformPair::new(p, MatrixF::identity(qp.clone(), model.n()), p_mat)?;
        model = pair.apply(&model)?;
        normalization = Some(pair);
    }
    let residue = FieldDesc::prime(p)?;
    let mut log = Vec::new();
    let mut reason = StopReason::IterationLimit;
    for _ in 0..max_iter {
        if let Some(j) = excess_variable(&model)? {
            let pair = rescale_variable(&model, j)?;
            let chk = check_transform(&model, &pair)?;
            debug_assert!(chk.integral && chk.class == TransformClass::Improving);
            model = pair.apply(&model)?;
            log.push(pair);
            continue;
        }
        let reduced = model.reduce_mod(&residue)?;
        match is_fq_minimized(&reduced) {
            Err(Error::BudgetExhausted(_)) => {
                reason = StopReason::VerdictUnknown;
                break;
            }
            Err(e) => return Err(e),
            Ok(verdict) => {
                if verdict.minimized {
                    reason = StopReason::Minimized;
                    break;
                }
                let witness = verdict.witness.expect("non-minimized verdict carries a witness");
                let pair = witness_to_transform(&model, &witness)?;
                let chk = check_transform(&model, &pair)?;
                if chk.integral && chk.class == TransformClass::Improving {
                    model = pair.apply(&model)?;
                    log.push(pair);
                } else {
                    reason = StopReason::NoImprovingStep;
                    break;
                }
            }
        }
    }
    Ok(Minimization {
        model,
        normalization,
        log,
        converged: reason == StopReason::Minimized,
        reason,
    })
}
