//! Newton lifting of nonsingular common zeros from F_p to Z/p^k and the
//! end-to-end p-adic solver: minimize, reduce mod p, search for a
//! nonsingular seed, lift, map back.
//!
//! Exports:
//! * [`PadicVector`]: a lifted zero together with its provenance (the
//!   mod-p seed, the pivot columns Newton moved, the iteration count)
//!   and base-p digit serialization.
//! * [`lift_nonsingular`]: the core lifting step.  It freezes n - r
//!   coordinates at their seed representatives and Newton-iterates the
//!   r coordinates whose Jacobian submatrix is invertible mod p, with
//!   precision doubling p, p^2, p^4, ... up to p^k.
//! * [`padic_solve`] / [`PadicSolve`]: the pipeline.  A missing
//!   nonsingular seed is reported as exactly that and never as a proof
//!   of insolubility: systems whose mod-p zeros are all singular fall
//!   outside the reach of this method.
//!
//! All Newton arithmetic happens in Z/p^k, so every intermediate value
//! is exact.  The achieved precision of a pipeline answer is verified
//! from scratch by evaluating the original forms over the exact
//! rationals at the mapped-back point.

use crate::error::{Error, Result};
use crate::field::{rational_valuation, FieldDesc, FieldElement, FieldKind, MatrixF};
use crate::minimize::minimize_heuristic;
use crate::quadform::{residue_of_rational, FormSystem, TransformPair};
use crate::zerofinder::{find_nonsingular_zero, jacobian_at, NonsingularSearch, SearchOptions};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// Largest accepted target precision p^k.
pub const MAX_LIFT_PRECISION: u32 = 1 << 16;

/// A vector over Z_p known modulo p^precision, with the provenance of
/// the Newton run that produced it.
///
/// Invariants: at least one coordinate is a p-adic unit, and reduction
/// mod p equals `seed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicVector {
    pub p: u64,
    /// Coordinates are known modulo p^precision.
    pub precision: u32,
    /// Canonical residues in [0, p^precision).
    pub coords: Vec<BigUint>,
    /// Reduction mod p, the seed the lift started from.
    pub seed: Vec<u64>,
    /// Columns Newton moved; the complementary coordinates stayed at
    /// their integer seed representatives.
    pub pivot_cols: Vec<usize>,
    pub iterations: u32,
}

impl PadicVector {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Some coordinate is a unit mod p.
    pub fn is_primitive(&self) -> bool {
        let p = BigUint::from(self.p);
        self.coords.iter().any(|c| !(c % &p).is_zero())
    }

    pub fn reduction_mod_p(&self) -> Vec<u64> {
        let p = BigUint::from(self.p);
        self.coords
            .iter()
            .map(|c| (c % &p).to_u64().expect("digit fits"))
            .collect()
    }

    /// Base-p digits of coordinate `i`, most significant first, exactly
    /// `precision` digits; dot-separated when p > 10.
    pub fn digit_string(&self, i: usize) -> String {
        let p = BigUint::from(self.p);
        let mut digits = Vec::with_capacity(self.precision as usize);
        let mut v = self.coords[i].clone();
        for _ in 0..self.precision {
            let (q, rem) = v.div_rem(&p);
            digits.push(rem.to_u64().expect("digit fits").to_string());
            v = q;
        }
        digits.reverse();
        if self.p > 10 {
            digits.join(".")
        } else {
            digits.concat()
        }
    }
}

impl fmt::Display for PadicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.n()).map(|i| self.digit_string(i)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn residue_biguint(v: &FieldElement) -> &BigUint {
    match v {
        FieldElement::Res(u) => u,
        _ => unreachable!("residue domains hold Res elements"),
    }
}

fn check_precision(k: u32) -> Result<()> {
    if k < 1 || k > MAX_LIFT_PRECISION {
        return Err(Error::PreconditionViolated(format!(
            "precision {k} outside 1..={MAX_LIFT_PRECISION}"
        )));
    }
    Ok(())
}

/// Lifts a nonsingular common zero mod p of an integral system over Q_p
/// to a common zero mod p^k.
///
/// The Jacobian of the mod-p reduction must have rank r at `x0`.  The
/// lift moves only the r coordinates of the lexicographically first
/// invertible column set; after t iterations the residual valuation is
/// at least min(2^t, k), which the loop asserts before every step.
pub fn lift_nonsingular(system: &FormSystem, x0: &[FieldElement], k: u32) -> Result<PadicVector> {
    let field = system.field();
    if field.kind() != FieldKind::PadicRational {
        return Err(Error::FieldMismatch(format!(
            "lifting needs a system over Q_p, got {}",
            field.name()
        )));
    }
    check_precision(k)?;
    let p = field.p();
    let n = system.n();
    let r = system.r();
    if r == 0 {
        return Err(Error::PreconditionViolated("empty system".into()));
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "seed has {} coordinates, the system {}",
            x0.len(),
            n
        )));
    }
    let fp = FieldDesc::prime(p)?;
    let zk = FieldDesc::mod_pk(p, k)?;
    // NonIntegral surfaces here when a coefficient has p in the denominator.
    let s1 = system.reduce_mod(&fp)?;
    let sk = system.reduce_mod(&zk)?;
    if !s1.is_zero_at(x0)? {
        return Err(Error::NotAZero(format!("seed is not a common zero mod {p}")));
    }
    let reduced = jacobian_at(&s1, x0)?.row_reduce()?;
    if reduced.rank < r {
        return Err(Error::SingularSeed(format!(
            "Jacobian rank {} < {} at the seed mod {}",
            reduced.rank, r, p
        )));
    }
    let cols = reduced.pivots;

    let seed: Vec<u64> = x0.iter().map(|e| fp.element_index(e)).collect();
    let mut x: Vec<FieldElement> = seed
        .iter()
        .map(|&i| zk.element_from_index(i))
        .collect();
    let mut reached = 1u32;
    let mut iterations = 0u32;
    while reached < k {
        let vals = sk.evaluate_all(&x)?;
        for v in &vals {
            // after t iterations: residual valuation >= min(2^t, k) = reached
            if zk.valuation(v).is_some_and(|t| (t as u32) < reached) {
                return Err(Error::PreconditionViolated(
                    "Newton residual lost valuation".into(),
                ));
            }
        }
        let pm = BigUint::from(p).pow(reached);
        // u solves J_sel(x) u = -F(x)/p^reached; representatives are exact
        // mod p^(k-reached), which the p^reached-scaled update absorbs.
        let rhs: Vec<FieldElement> = vals
            .iter()
            .map(|v| zk.neg(&zk.from_bigint(&BigInt::from(residue_biguint(v) / &pm))))
            .collect();
        let jx = jacobian_at(&sk, &x)?;
        let rows: Vec<Vec<FieldElement>> = (0..r)
            .map(|i| cols.iter().map(|&c| jx.get(i, c).clone()).collect())
            .collect();
        let sub = MatrixF::from_rows(zk.clone(), rows)?;
        let u = sub.solve_unit(&rhs)?;
        let step = zk.from_bigint(&BigInt::from(pm));
        for (j, &c) in cols.iter().enumerate() {
            x[c] = zk.add(&x[c], &zk.mul(&step, &u[j]));
        }
        reached = (reached * 2).min(k);
        iterations += 1;
    }
    for v in sk.evaluate_all(&x)? {
        if !zk.is_zero(&v) {
            return Err(Error::PreconditionViolated(
                "lift fell short of the target precision".into(),
            ));
        }
    }
    Ok(PadicVector {
        p,
        precision: k,
        coords: x.iter().map(|e| residue_biguint(e).clone()).collect(),
        seed,
        pivot_cols: cols,
        iterations,
    })
}

/// A pipeline answer with everything needed to audit it.
#[derive(Debug, Clone)]
pub struct SolvedZero {
    /// Primitive zero of the input system, coordinates mod p^k.
    pub zero: PadicVector,
    /// The model that was actually lifted.
    pub model: FormSystem,
    /// The lift in model coordinates, at internal (>= k) precision.
    pub model_zero: PadicVector,
    /// Composed change of variables: input coordinates are M * (model
    /// coordinates).  None when the input was already its own model.
    pub transform: Option<TransformPair>,
    /// Whether minimization converged; a lift from a non-minimal model
    /// is still a valid zero.
    pub model_minimized: bool,
    /// Verified valuation floor of the input forms at `zero`, from
    /// exact rational evaluation (capped at the internal precision).
    pub achieved: u32,
}

/// Outcome of [`padic_solve`].
#[derive(Debug, Clone)]
pub enum PadicSolve {
    Solved(Box<SolvedZero>),
    /// The reduced model has a nonsingular zero mod p or it does not;
    /// `certified` records whether the search was exhaustive.  Either
    /// way this is not a proof of insolubility over Q_p: all mod-p
    /// zeros being singular says the method does not apply, not that
    /// no zero exists.
    NoNonsingularSeed {
        certified: bool,
        attempts: u64,
        model_minimized: bool,
    },
    /// Sampling was inconclusive and the model may not be minimal.
    Unknown { attempts: u64 },
}

fn power_of_p(p: u64, e: i64) -> BigRational {
    let pk = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from(pk)
    } else {
        BigRational::new(BigInt::one(), pk)
    }
}

/// Maps a model zero back through x = M y, makes it primitive, and
/// verifies the requested precision by exact rational evaluation of the
/// original forms.  None means the verified floor fell short and the
/// caller should lift with more slack.
fn map_back(
    original: &FormSystem,
    model: &FormSystem,
    model_zero: &PadicVector,
    transform: Option<&TransformPair>,
    k: u32,
) -> Result<Option<SolvedZero>> {
    let field = original.field();
    let p = model_zero.p;
    let n = original.n();
    let y: Vec<BigRational> = model_zero
        .coords
        .iter()
        .map(|c| BigRational::from(BigInt::from(c.clone())))
        .collect();
    let x: Vec<BigRational> = match transform {
        None => y,
        Some(t) => {
            let m = t.variable_change();
            (0..n)
                .map(|i| {
                    let mut acc = BigRational::zero();
                    for (j, yj) in y.iter().enumerate() {
                        acc += field.as_rational(m.get(i, j))? * yj;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let jmin = x
        .iter()
        .filter_map(|c| rational_valuation(c, p))
        .min()
        .ok_or_else(|| Error::DegenerateSystem("the lift mapped to the origin".into()))?;
    let shift = power_of_p(p, -jmin);
    let xs: Vec<BigRational> = x.iter().map(|c| c * &shift).collect();

    let point: Vec<FieldElement> = xs
        .iter()
        .map(|c| field.from_rational(c.clone()))
        .collect::<Result<_>>()?;
    let mut achieved = u32::MAX;
    for form in original.forms() {
        match field.valuation(&form.evaluate(&point)?) {
            None => {}
            Some(t) if t >= k as i64 => {
                achieved = achieved.min(t.min(model_zero.precision as i64) as u32);
            }
            Some(_) => return Ok(None),
        }
    }
    if achieved == u32::MAX {
        achieved = model_zero.precision;
    }

    let zk = FieldDesc::mod_pk(p, k)?;
    let coords: Vec<BigUint> = xs
        .iter()
        .map(|c| Ok(residue_biguint(&residue_of_rational(&zk, c)?).clone()))
        .collect::<Result<_>>()?;
    let pb = BigUint::from(p);
    let seed: Vec<u64> = coords
        .iter()
        .map(|c| (c % &pb).to_u64().expect("digit fits"))
        .collect();
    Ok(Some(SolvedZero {
        zero: PadicVector {
            p,
            precision: k,
            coords,
            seed,
            pivot_cols: model_zero.pivot_cols.clone(),
            iterations: model_zero.iterations,
        },
        model: model.clone(),
        model_zero: model_zero.clone(),
        transform: transform.cloned(),
        model_minimized: false,
        achieved,
    }))
}

/// End-to-end solver over Q_p: minimize, reduce mod p, search for a
/// nonsingular seed (exhaustively when feasible, else by sampling),
/// lift, map the lift back to the input coordinates.
///
/// Found seeds always produce `Solved`, even from a model that did not
/// certify as minimal.  A certified seedless reduction is reported as
/// `NoNonsingularSeed` with `certified: true`; an uncertified one only
/// when the model is known minimal, since on a non-minimal model an
/// inconclusive sample proves nothing at all (`Unknown`).
pub fn padic_solve(system: &FormSystem, k: u32, opts: &SearchOptions) -> Result<PadicSolve> {
    let field = system.field();
    if field.kind() != FieldKind::PadicRational {
        return Err(Error::FieldMismatch(format!(
            "the pipeline runs over Q_p, got {}",
            field.name()
        )));
    }
    check_precision(k)?;
    let p = field.p();
    let min = minimize_heuristic(system, 64)?;
    let mut composed: Option<TransformPair> = min.normalization.clone();
    for step in &min.log {
        composed = Some(match &composed {
            Some(t) => t.then(step)?,
            None => step.clone(),
        });
    }
    let reduced = min.model.reduce_mod(&FieldDesc::prime(p)?)?;
    match find_nonsingular_zero(&reduced, opts)? {
        NonsingularSearch::Found(report) => {
            // Slack absorbs the valuations lost to the coordinate map
            // and the primitive scaling; the exact re-verification in
            // map_back keeps the answer honest regardless.
            let mut slack = match &composed {
                Some(t) => (2 * (t.vm().unsigned_abs() + t.vp().unsigned_abs()) as u32 + 2).min(64),
                None => 0,
            };
            for _ in 0..4 {
                let model_zero = lift_nonsingular(&min.model, &report.point, k + slack)?;
                if let Some(mut solved) =
                    map_back(system, &min.model, &model_zero, composed.as_ref(), k)?
                {
                    solved.model_minimized = min.converged;
                    return Ok(PadicSolve::Solved(Box::new(solved)));
                }
                slack = slack * 2 + 4;
            }
            Err(Error::PreconditionViolated(
                "precision slack exhausted while mapping the lift back".into(),
            ))
        }
        NonsingularSearch::NotFound {
            certified: true,
            attempts,
        } => Ok(PadicSolve::NoNonsingularSeed {
            certified: true,
            attempts,
            model_minimized: min.converged,
        }),
        NonsingularSearch::NotFound {
            certified: false,
            attempts,
        } => {
            if min.converged {
                Ok(PadicSolve::NoNonsingularSeed {
                    certified: false,
                    attempts,
                    model_minimized: true,
                })
            } else {
                Ok(PadicSolve::Unknown { attempts })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimize::is_fq_minimized;
    use crate::quadform::QuadraticForm;
    use crate::seeded_rng;
    use crate::zerofinder::{enumerate_common_zeros, EnumOptions};
    use rand::Rng;

    fn qp(p: u64, prec: u32) -> FieldDesc {
        FieldDesc::padic(p, prec).unwrap()
    }

    fn single(field: FieldDesc, n: usize, terms: &[(usize, usize, i64)]) -> FormSystem {
        let q = QuadraticForm::from_terms(field.clone(), n, terms).unwrap();
        FormSystem::new(field, n, vec![q]).unwrap()
    }

    fn fe(field: &FieldDesc, vals: &[i64]) -> Vec<FieldElement> {
        vals.iter().map(|&v| field.from_int(v)).collect()
    }

    // x1^2 + x2^2 + x3x4 + 9x5^2 over Q_3.
    fn scaled_form(prec: u32) -> FormSystem {
        single(
            qp(3, prec),
            5,
            &[(0, 0, 1), (1, 1, 1), (2, 3, 1), (4, 4, 9)],
        )
    }

    fn triple_f2_over_q2() -> FormSystem {
        let field = qp(2, 8);
        let forms = vec![
            QuadraticForm::from_terms(
                field.clone(),
                13,
                &[(0, 1, 1), (2, 2, 1), (2, 3, 1), (3, 3, 1)],
            )
            .unwrap(),
            QuadraticForm::from_terms(
                field.clone(),
                13,
                &[(4, 5, 1), (6, 6, 1), (6, 7, 1), (7, 7, 1)],
            )
            .unwrap(),
            QuadraticForm::from_terms(
                field.clone(),
                13,
                &[
                    (0, 0, 1),
                    (0, 1, 1),
                    (1, 1, 1),
                    (4, 6, 1),
                    (5, 7, 1),
                    (6, 6, 1),
                    (7, 7, 1),
                ],
            )
            .unwrap(),
        ];
        FormSystem::new(field, 13, forms).unwrap()
    }

    /// Valuation floor of the forms at an integer point, evaluated over
    /// the exact rationals, independent of all Newton code.
    fn exact_floor(system: &FormSystem, coords: &[BigUint]) -> i64 {
        let field = system.field();
        let point: Vec<FieldElement> = coords
            .iter()
            .map(|c| field.from_rational(BigRational::from(BigInt::from(c.clone()))))
            .collect::<Result<_>>()
            .unwrap();
        system
            .evaluate_all(&point)
            .unwrap()
            .iter()
            .map(|v| field.valuation(v).unwrap_or(i64::MAX))
            .min()
            .unwrap()
    }

    #[test]
    fn lift_reaches_the_requested_precision() {
        let s = scaled_form(8);
        let f3 = FieldDesc::prime(3).unwrap();
        let lifted = lift_nonsingular(&s, &fe(&f3, &[1, 1, 1, 1, 0]), 8).unwrap();
        assert_eq!(lifted.p, 3);
        assert_eq!(lifted.precision, 8);
        assert_eq!(lifted.seed, vec![1, 1, 1, 1, 0]);
        assert_eq!(lifted.reduction_mod_p(), lifted.seed);
        assert!(lifted.is_primitive());
        // gradient (2, 2, 1, 1, 0) mod 3: first invertible column is x1
        assert_eq!(lifted.pivot_cols, vec![0]);
        // doubling 1 -> 2 -> 4 -> 8
        assert_eq!(lifted.iterations, 3);
        assert!(exact_floor(&s, &lifted.coords) >= 8);
    }

    #[test]
    fn exact_zeros_are_fixed_points() {
        let s = single(qp(5, 10), 2, &[(0, 1, 1)]);
        let f5 = FieldDesc::prime(5).unwrap();
        let lifted = lift_nonsingular(&s, &fe(&f5, &[0, 1]), 10).unwrap();
        // every Newton correction is zero, so the representatives stay put
        assert_eq!(lifted.coords, vec![BigUint::ZERO, BigUint::from(1u32)]);
        assert_eq!(lifted.iterations, 4);
    }

    #[test]
    fn lift_rejections() {
        let s = scaled_form(8);
        let f3 = FieldDesc::prime(3).unwrap();
        // not a zero mod 3
        assert!(matches!(
            lift_nonsingular(&s, &fe(&f3, &[1, 0, 0, 0, 0]), 4),
            Err(Error::NotAZero(_))
        ));
        // the origin is a zero of every form, and always singular
        let triple = triple_f2_over_q2();
        let f2 = FieldDesc::prime(2).unwrap();
        assert!(matches!(
            lift_nonsingular(&triple, &fe(&f2, &[0; 13]), 4),
            Err(Error::SingularSeed(_))
        ));
        // denominators divisible by p never reduce
        let field = qp(3, 6);
        let third = field.from_ratio(&BigInt::from(1), &BigInt::from(3)).unwrap();
        let q = QuadraticForm::from_coeffs(field.clone(), 2, vec![third, field.zero(), field.one()])
            .unwrap();
        let s = FormSystem::new(field.clone(), 2, vec![q]).unwrap();
        assert!(matches!(
            lift_nonsingular(&s, &fe(&FieldDesc::prime(3).unwrap(), &[0, 1]), 4),
            Err(Error::NonIntegral(_))
        ));
    }

    #[test]
    fn every_zero_of_the_reduced_triple_is_singular() {
        let triple = triple_f2_over_q2();
        let f2 = FieldDesc::prime(2).unwrap();
        let red = triple.reduce_mod(&f2).unwrap();
        let scan = enumerate_common_zeros(&red, &EnumOptions::default()).unwrap();
        assert!(scan.count > 0);
        assert_eq!(scan.nonsingular_count, 0);
        // so the pipeline reports a certified missing seed
        match padic_solve(&triple, 4, &SearchOptions::default()).unwrap() {
            PadicSolve::NoNonsingularSeed { certified, .. } => assert!(certified),
            other => panic!("expected a certified missing seed, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_solves_the_scaled_form() {
        let s = scaled_form(8);
        let solved = match padic_solve(&s, 8, &SearchOptions::default()).unwrap() {
            PadicSolve::Solved(z) => z,
            other => panic!("expected Solved, got {other:?}"),
        };
        assert!(solved.model_minimized);
        assert!(solved.transform.is_some());
        assert!(solved.achieved >= 8);
        let z = &solved.zero;
        assert_eq!(z.precision, 8);
        assert!(z.is_primitive());
        assert_eq!(z.reduction_mod_p(), z.seed);
        // independent replay over the exact rationals
        assert!(exact_floor(&s, &z.coords) >= 8);
        // the minimized model swapped 9 x5^2 for x5^2
        let expect = single(qp(3, 8), 5, &[(0, 0, 1), (1, 1, 1), (2, 3, 1), (4, 4, 1)]);
        assert_eq!(solved.model, expect);
    }

    #[test]
    fn anisotropic_quaternaries_report_a_certified_missing_seed() {
        // x1^2 - 2x2^2 + 3(x3^2 - 2x4^2) over Q_3
        let s3 = single(
            qp(3, 6),
            4,
            &[(0, 0, 1), (1, 1, -2), (2, 2, 3), (3, 3, -6)],
        );
        match padic_solve(&s3, 4, &SearchOptions::default()).unwrap() {
            PadicSolve::NoNonsingularSeed {
                certified,
                model_minimized,
                ..
            } => {
                assert!(certified);
                assert!(!model_minimized);
            }
            other => panic!("expected a missing seed, got {other:?}"),
        }
        // sum of four squares over Q_2
        let s2 = single(qp(2, 6), 4, &[(0, 0, 1), (1, 1, 1), (2, 2, 1), (3, 3, 1)]);
        match padic_solve(&s2, 4, &SearchOptions::default()).unwrap() {
            PadicSolve::NoNonsingularSeed { certified, .. } => assert!(certified),
            other => panic!("expected a missing seed, got {other:?}"),
        }
    }

    #[test]
    fn visible_hyperbolic_plane_solves_from_any_model() {
        // x1x2 + x3^2 is not minimal mod 5 (e1 spans an isotropic line)
        // yet its nonsingular seeds are everywhere
        let s = single(qp(5, 8), 3, &[(0, 1, 1), (2, 2, 1)]);
        let solved = match padic_solve(&s, 6, &SearchOptions::default()).unwrap() {
            PadicSolve::Solved(z) => z,
            other => panic!("expected Solved, got {other:?}"),
        };
        assert!(!solved.model_minimized);
        assert!(exact_floor(&s, &solved.zero.coords) >= 6);
    }

    #[test]
    fn inconclusive_sampling_on_a_stuck_model_is_unknown() {
        // x1^2 + x2^2 in 17 variables over Q_3: every mod-3 zero is
        // singular, 3^17 is beyond exhaustion, and minimization chases
        // the 15 untouched variables without ever converging.
        let s = single(qp(3, 6), 17, &[(0, 0, 1), (1, 1, 1)]);
        match padic_solve(&s, 2, &SearchOptions::default()).unwrap() {
            PadicSolve::Unknown { attempts } => assert!(attempts > 0),
            other => panic!("expected Unknown, got {other:?}"),
        }
    }

    #[test]
    fn lift_and_pipeline_are_deterministic() {
        let s = scaled_form(8);
        let f3 = FieldDesc::prime(3).unwrap();
        let seed = fe(&f3, &[1, 1, 1, 1, 0]);
        assert_eq!(
            lift_nonsingular(&s, &seed, 8).unwrap(),
            lift_nonsingular(&s, &seed, 8).unwrap()
        );
        let opts = SearchOptions {
            seed: 11,
            ..SearchOptions::default()
        };
        let a = match padic_solve(&s, 6, &opts).unwrap() {
            PadicSolve::Solved(z) => z,
            other => panic!("expected Solved, got {other:?}"),
        };
        let b = match padic_solve(&s, 6, &opts).unwrap() {
            PadicSolve::Solved(z) => z,
            other => panic!("expected Solved, got {other:?}"),
        };
        assert_eq!(a.zero, b.zero);
    }

    #[test]
    fn minimized_single_forms_in_five_variables_always_solve() {
        // fifty minimized samples at each of p = 3 and p = 5
        for p in [3u64, 5] {
            let fp = FieldDesc::prime(p).unwrap();
            let field = qp(p, 6);
            let mut rng = seeded_rng(900 + p);
            let mut solved = 0;
            let mut draws = 0;
            while solved < 50 {
                draws += 1;
                assert!(draws < 500, "minimized forms should be common");
                let mut q = QuadraticForm::zero(fp.clone(), 5);
                for i in 0..5 {
                    for j in i..5 {
                        q.set_coeff(i, j, fp.element_from_index(rng.gen_range(0..p)));
                    }
                }
                if q.is_zero() {
                    continue;
                }
                let over_fp = FormSystem::new(fp.clone(), 5, vec![q.clone()]).unwrap();
                if !is_fq_minimized(&over_fp).unwrap().minimized {
                    continue;
                }
                let coeffs: Vec<FieldElement> = q
                    .coeffs()
                    .iter()
                    .map(|c| field.from_int(fp.element_index(c) as i64))
                    .collect();
                let lifted = QuadraticForm::from_coeffs(field.clone(), 5, coeffs).unwrap();
                let s = FormSystem::new(field.clone(), 5, vec![lifted]).unwrap();
                match padic_solve(&s, 6, &SearchOptions::default()).unwrap() {
                    PadicSolve::Solved(z) => {
                        assert!(z.achieved >= 6);
                        assert!(exact_floor(&s, &z.zero.coords) >= 6);
                        solved += 1;
                    }
                    other => panic!("minimized form failed to solve: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn digit_strings_read_most_significant_first() {
        let v = PadicVector {
            p: 3,
            precision: 4,
            coords: vec![BigUint::from(5u32), BigUint::from(80u32)],
            seed: vec![2, 2],
            pivot_cols: vec![0],
            iterations: 0,
        };
        // 5 = 0*27 + 0*9 + 1*3 + 2,  80 = 2*27 + 2*9 + 2*3 + 2
        assert_eq!(v.digit_string(0), "0012");
        assert_eq!(v.digit_string(1), "2222");
        assert_eq!(v.to_string(), "(0012, 2222)");
        let w = PadicVector {
            p: 13,
            precision: 3,
            coords: vec![BigUint::from(14u32)],
            seed: vec![1],
            pivot_cols: vec![0],
            iterations: 0,
        };
        assert_eq!(w.digit_string(0), "0.1.1");
    }
}
