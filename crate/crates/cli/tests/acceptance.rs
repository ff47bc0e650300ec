//! The acceptance gate: thirteen numbered criteria covering the whole
//! stack, each with its own test and one printed pass line (visible
//! under --nocapture; failures panic with the criterion number).
//! Criteria with a stated runtime cap assert it on a wall clock.

use num_bigint::{BigInt, BigUint};
use qforms_cli::corpus::{
    DOCUMENTS, F2_PAIR, F2_TRIPLE, F3_MINIMIZED, FT_NONSQUARE, FT_SQUARE, Q3_WORKED,
};
use qforms_core::ffred::{self, FTForm};
use qforms_core::field::{FieldDesc, FieldElement, MatrixF};
use qforms_core::formlang::{parse_system, serialize_system, SystemDocument};
use qforms_core::hensel::{padic_solve, PadicSolve};
use qforms_core::minimize::{
    check_transform, is_fq_minimized, minimize_heuristic, StopReason, TransformClass,
};
use qforms_core::oneform::{
    anisotropic_quaternary, is_isotropic_qp, isotropic_by_search, primitive_zero_mod,
    ORACLE_BUDGET,
};
use qforms_core::quadform::{FormSystem, QuadraticForm, TransformPair};
use qforms_core::subspace::{find_totally_singular, SearchBudget, SingularSearch};
use qforms_core::zerofinder::{
    chevalley_warning_check, count_zeros_exact, enumerate_common_zeros, find_nonsingular_zero,
    EnumOptions, NonsingularSearch, SearchOptions,
};
use qforms_core::{seeded_rng, Error};
use rand::Rng;
use std::time::Instant;

fn parse(text: &str) -> SystemDocument {
    parse_system(text).expect("corpus documents parse")
}

fn pass(criterion: u32, started: Instant, cap_secs: Option<f64>, what: &str) {
    let secs = started.elapsed().as_secs_f64();
    if let Some(cap) = cap_secs {
        assert!(
            secs < cap,
            "criterion {criterion}: {secs:.2}s exceeded the {cap:.0}s cap"
        );
    }
    eprintln!("criterion {criterion:>2} PASS ({secs:>6.2}s): {what}");
}

#[test]
fn criterion_01_bound_table_exactness() {
    let t = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_qforms"))
        .args(["bounds", "--table", "100"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "criterion 1: table run failed");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        let r: u64 = cols[0].parse().unwrap();
        let lower: u64 = cols[1].parse().unwrap();
        let upper: u64 = cols[2].parse().unwrap();
        rows.push((r, lower, upper));
    }
    assert_eq!(rows.len(), 100, "criterion 1: expected 100 rows");
    for (r, lower, upper) in &rows {
        assert_eq!(*lower, 4 * r, "criterion 1: lower bound at r={r}");
        let want = match r {
            1 => 4,
            2 => 8,
            3 => 16,
            4 => 24,
            5 => 40,
            6 => 56,
            7 => 84,
            _ if r % 2 == 0 => 2 * r * r - 16,
            _ => 2 * r * r - 14,
        };
        assert_eq!(*upper, want, "criterion 1: upper bound at r={r}");
    }
    let bracket = std::process::Command::new(env!("CARGO_BIN_EXE_qforms"))
        .args(["bounds", "--r", "3"])
        .output()
        .expect("binary runs");
    assert_eq!(
        String::from_utf8(bracket.stdout).unwrap(),
        "12 <= beta(3;Qp) <= 16\n",
        "criterion 1: bracket line"
    );
    pass(1, t, Some(1.0), "bound table rows 1..=100 and the r=3 bracket match exactly");
}

#[test]
fn criterion_02_f2_triple_singularity() {
    let t = Instant::now();
    let doc = parse(F2_TRIPLE);
    assert_eq!(doc.system.n(), 13);
    assert_eq!(doc.system.r(), 3);
    let scan = enumerate_common_zeros(&doc.system, &EnumOptions::default()).unwrap();
    assert_eq!(scan.count, 192, "criterion 2: frozen zero count");
    assert!(scan.count > 1, "criterion 2: a nontrivial zero exists");
    assert_eq!(scan.count % 2, 0, "criterion 2: count is even");
    assert_eq!(scan.reports.len(), 192, "criterion 2: all zeros collected");
    for rep in &scan.reports {
        assert!(
            rep.singular && rep.jacobian_rank <= 2,
            "criterion 2: a zero of Jacobian rank {} appeared",
            rep.jacobian_rank
        );
    }
    match find_nonsingular_zero(&doc.system, &SearchOptions::default()).unwrap() {
        NonsingularSearch::NotFound { certified: true, .. } => {}
        other => panic!("criterion 2: expected a certified miss, got {other:?}"),
    }
    pass(2, t, Some(1.0), "all 192 common zeros in F_2^13 are singular, certified");
}

fn add_forms(a: &QuadraticForm, b: &QuadraticForm) -> QuadraticForm {
    let field = a.field().clone();
    let mut s = QuadraticForm::zero(field.clone(), a.n());
    for i in 0..a.n() {
        for j in i..a.n() {
            s.set_coeff(i, j, field.add(a.coeff(i, j), b.coeff(i, j)));
        }
    }
    s
}

#[test]
fn criterion_03_f2_triple_minimization() {
    let t = Instant::now();
    let doc = parse(F2_TRIPLE);
    let verdict = is_fq_minimized(&doc.system).unwrap();
    assert!(verdict.minimized, "criterion 3: the triple is minimized");
    assert!(verdict.witness.is_none());

    // cross-check the hardest pair by hand: (Q1+Q3, Q2+Q3) restricted
    // to the active eight variables matches the bundled pair document
    // and admits no 4-dimensional totally singular subspace
    let field = doc.system.field().clone();
    let forms = doc.system.forms();
    let sums = [add_forms(&forms[0], &forms[2]), add_forms(&forms[1], &forms[2])];
    let basis: Vec<Vec<FieldElement>> = (0..8)
        .map(|i| {
            let mut v = vec![field.zero(); 13];
            v[i] = field.one();
            v
        })
        .collect();
    let pair_doc = parse(F2_PAIR);
    for (sum, expected) in sums.iter().zip(pair_doc.system.forms()) {
        assert_eq!(
            &sum.restrict(&basis).unwrap(),
            expected,
            "criterion 3: pair document matches the combination"
        );
    }
    match find_totally_singular(&pair_doc.system, 4, &SearchBudget::default()).unwrap() {
        SingularSearch::NotFound { certified: true, .. } => {}
        other => panic!("criterion 3: expected a certified miss, got {other:?}"),
    }
    pass(3, t, Some(60.0), "triple certified minimized; the pair has no TS subspace of dim 4");
}

#[test]
fn criterion_04_q3_worked_example() {
    let t = Instant::now();
    let doc = parse(Q3_WORKED);
    let qp = doc.system.field().clone();

    let mut m = MatrixF::identity(qp.clone(), 5);
    m.set(4, 4, qp.from_ratio(&BigInt::from(1), &BigInt::from(3)).unwrap());
    let pair = TransformPair::new(3, m, MatrixF::identity(qp.clone(), 1)).unwrap();
    let check = check_transform(&doc.system, &pair).unwrap();
    assert!(check.integral, "criterion 4: the rescaling stays integral");
    assert!(
        matches!(check.class, TransformClass::Improving),
        "criterion 4: the rescaling improves"
    );
    assert_eq!(check.score, -2, "criterion 4: score 5*0 + 2*(-1)");

    let min = minimize_heuristic(&doc.system, 64).unwrap();
    assert!(min.converged, "criterion 4: one step converges");
    assert_eq!(min.log.len(), 1, "criterion 4: exactly one improving step");
    assert!(matches!(min.reason, StopReason::Minimized));
    let model = FormSystem::new(
        qp.clone(),
        5,
        vec![QuadraticForm::from_terms(
            qp.clone(),
            5,
            &[(0, 0, 1), (1, 1, 1), (2, 3, 1), (4, 4, 1)],
        )
        .unwrap()],
    )
    .unwrap();
    assert_eq!(min.model, model, "criterion 4: the minimized model");

    // the original form already reduces mod 3 to the certified model
    let residue = doc.system.reduce_mod(&FieldDesc::prime(3).unwrap()).unwrap();
    let expected = parse(F3_MINIMIZED);
    assert_eq!(residue, expected.system, "criterion 4: residue form");
    assert!(
        is_fq_minimized(&residue).unwrap().minimized,
        "criterion 4: residue is minimized over F_3"
    );
    pass(4, t, Some(1.0), "improving step scores -2, one step converges, residue certified");
}

#[test]
fn criterion_05_hensel_lift() {
    let t = Instant::now();
    let doc = parse(Q3_WORKED);
    let sz = match padic_solve(&doc.system, 8, &SearchOptions::default()).unwrap() {
        PadicSolve::Solved(sz) => sz,
        other => panic!("criterion 5: expected Solved, got {other:?}"),
    };
    assert!(sz.achieved >= 8, "criterion 5: residual valuation");
    assert!(sz.zero.is_primitive(), "criterion 5: primitive zero");

    // independent re-evaluation over Z/3^8
    let zk = FieldDesc::mod_pk(3, 8).unwrap();
    let reduced = doc.system.reduce_mod(&zk).unwrap();
    let point: Vec<FieldElement> = sz
        .zero
        .coords
        .iter()
        .map(|c| zk.from_bigint(&BigInt::from(c.clone())))
        .collect();
    assert!(
        reduced.is_zero_at(&point).unwrap(),
        "criterion 5: the zero re-evaluates to 0 mod 3^8"
    );

    // the lift stayed congruent to its residue seed mod 3, and the
    // seed really is a zero of the reduced model
    assert_eq!(
        sz.model_zero.reduction_mod_p(),
        sz.model_zero.seed,
        "criterion 5: seed congruence"
    );
    let f3 = FieldDesc::prime(3).unwrap();
    let model_res = sz.model.reduce_mod(&f3).unwrap();
    let seed_point: Vec<FieldElement> = sz
        .model_zero
        .seed
        .iter()
        .map(|&d| f3.from_int(d as i64))
        .collect();
    assert!(
        model_res.is_zero_at(&seed_point).unwrap(),
        "criterion 5: the recorded seed is a residue zero"
    );
    pass(5, t, Some(1.0), "padic_solve lifts to valuation >= 8, congruent to its seed mod 3");
}

#[test]
fn criterion_06_anisotropy_witnesses() {
    let t = Instant::now();
    for p in [3u64, 5, 7] {
        let q = anisotropic_quaternary(p).unwrap();
        let rep = is_isotropic_qp(&q).unwrap();
        assert!(!rep.isotropic, "criterion 6: p={p} decision");
        assert!(
            primitive_zero_mod(&q, 2, ORACLE_BUDGET).unwrap().is_none(),
            "criterion 6: p={p} has no primitive zero mod {}",
            p * p
        );
    }
    let q2 = anisotropic_quaternary(2).unwrap();
    assert!(!is_isotropic_qp(&q2).unwrap().isotropic, "criterion 6: p=2 decision");
    assert!(
        primitive_zero_mod(&q2, 4, ORACLE_BUDGET).unwrap().is_none(),
        "criterion 6: p=2 has no primitive zero mod 16"
    );
    pass(6, t, Some(60.0), "quaternaries for p in {2,3,5,7} fail both the symbol and residue routes");
}

fn random_qp_form(rng: &mut impl Rng, field: &FieldDesc, n: usize, span: i64) -> QuadraticForm {
    let mut q = QuadraticForm::zero(field.clone(), n);
    for i in 0..n {
        for j in i..n {
            q.set_coeff(i, j, field.from_int(rng.gen_range(-span..=span)));
        }
    }
    q
}

#[test]
fn criterion_07_isotropy_oracle_equivalence() {
    let t = Instant::now();
    let mut rng = seeded_rng(4007);
    let mut tested = 0u32;
    while tested < 300 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(1..=4usize);
        let field = FieldDesc::padic(p, 8).unwrap();
        let q = random_qp_form(&mut rng, &field, n, 20);
        if q.is_zero() {
            continue;
        }
        let decided = is_isotropic_qp(&q).unwrap().isotropic;
        let searched = isotropic_by_search(&q, ORACLE_BUDGET).unwrap();
        assert_eq!(
            decided, searched,
            "criterion 7: disagreement at p={p}, n={n}, form {q:?}"
        );
        tested += 1;
    }
    pass(7, t, None, "300 random forms: symbol decision equals the search oracle");
}

#[test]
fn criterion_08_chevalley_warning_property() {
    let t = Instant::now();
    let mut rng = seeded_rng(4008);
    for round in 0..200 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let r = match p {
            2 | 3 => rng.gen_range(1..=3usize),
            _ => rng.gen_range(1..=2usize),
        };
        // n > 2r with p^n <= 10^5
        let n_max = match p {
            2 => 16,
            3 => 10,
            _ => 7,
        };
        let n = rng.gen_range(2 * r + 1..=(2 * r + 2).max(n_max.min(2 * r + 3)));
        let field = FieldDesc::prime(p).unwrap();
        let order = field.order().unwrap();
        let forms: Vec<QuadraticForm> = (0..r)
            .map(|_| {
                let mut q = QuadraticForm::zero(field.clone(), n);
                for i in 0..n {
                    for j in i..n {
                        q.set_coeff(i, j, field.element_from_index(rng.gen_range(0..order)));
                    }
                }
                q
            })
            .collect();
        let system = FormSystem::new(field, n, forms).unwrap();
        let (count, congruent) = chevalley_warning_check(&system).unwrap();
        assert!(congruent, "criterion 8: round {round} count {count} mod {p}");
        assert!(count > 1, "criterion 8: round {round} has a nontrivial zero");
    }
    pass(8, t, None, "200 random systems with n > 2r: count divisible by p, nontrivial zero");
}

#[test]
fn criterion_09_exact_count_oracle() {
    let t = Instant::now();
    let check = |q: &QuadraticForm| {
        let system = FormSystem::new(q.field().clone(), q.n(), vec![q.clone()]).unwrap();
        let opts = EnumOptions { count_only: true, ..EnumOptions::default() };
        let scanned = enumerate_common_zeros(&system, &opts).unwrap().count;
        let exact = count_zeros_exact(q).unwrap();
        assert_eq!(exact, BigUint::from(scanned), "count mismatch for {q:?}");
    };

    // every form over F_3 and F_2 in three variables
    for (p, reps) in [(3u64, 729u64), (2, 64)] {
        let field = FieldDesc::prime(p).unwrap();
        for idx in 0..reps {
            let mut q = QuadraticForm::zero(field.clone(), 3);
            let mut rest = idx;
            for i in 0..3 {
                for j in i..3 {
                    q.set_coeff(i, j, field.element_from_index(rest % p));
                    rest /= p;
                }
            }
            check(&q);
        }
    }

    // 500 random larger instances, prime and extension bases
    let mut rng = seeded_rng(4009);
    let f4 = FieldDesc::extension(2, &[1, 1, 1]).unwrap();
    let f9 = FieldDesc::extension(3, &[1, 0, 1]).unwrap();
    for round in 0..500 {
        let (field, n) = match round % 5 {
            0 => (FieldDesc::prime(2).unwrap(), rng.gen_range(4..=10usize)),
            1 => (FieldDesc::prime(3).unwrap(), rng.gen_range(4..=7usize)),
            2 => (FieldDesc::prime(5).unwrap(), rng.gen_range(4..=6usize)),
            3 => (f4.clone(), rng.gen_range(4..=5usize)),
            _ => (f9.clone(), 4usize),
        };
        let order = field.order().unwrap();
        let mut q = QuadraticForm::zero(field.clone(), n);
        for i in 0..n {
            for j in i..n {
                q.set_coeff(i, j, field.element_from_index(rng.gen_range(0..order)));
            }
        }
        check(&q);
    }
    pass(9, t, None, "closed-form counts equal exhaustive enumeration on 1293 forms");
}

#[test]
fn criterion_10_single_form_solubility() {
    let t = Instant::now();
    for p in [3u64, 5] {
        let field = FieldDesc::padic(p, 8).unwrap();
        let residue_field = FieldDesc::prime(p).unwrap();
        let mut rng = seeded_rng(4010 + p);
        let mut accepted = 0u64;
        while accepted < 100 {
            let q = random_qp_form(&mut rng, &field, 5, (p * p) as i64);
            let system = FormSystem::new(field.clone(), 5, vec![q]).unwrap();
            let residue = system.reduce_mod(&residue_field).unwrap();
            if residue.forms()[0].is_zero() {
                continue;
            }
            if !is_fq_minimized(&residue).unwrap().minimized {
                continue;
            }
            accepted += 1;
            let opts = SearchOptions { seed: accepted, ..SearchOptions::default() };
            match padic_solve(&system, 8, &opts).unwrap() {
                PadicSolve::Solved(sz) => {
                    assert!(sz.zero.is_primitive(), "criterion 10: primitive zero at p={p}")
                }
                other => panic!(
                    "criterion 10: p={p} sample {accepted} not solved: {other:?}"
                ),
            }
        }
    }
    pass(10, t, None, "100 residue-minimized quinary forms solve for each of p=3 and p=5");
}

#[test]
fn criterion_11_pair_subspace_guarantee() {
    let t = Instant::now();
    let field = FieldDesc::prime(3).unwrap();
    let mut rng = seeded_rng(4011);
    for round in 0..100 {
        let forms: Vec<QuadraticForm> = (0..2)
            .map(|_| {
                let mut q = QuadraticForm::zero(field.clone(), 7);
                for i in 0..7 {
                    for j in i..7 {
                        q.set_coeff(i, j, field.element_from_index(rng.gen_range(0..3)));
                    }
                }
                q
            })
            .collect();
        let system = FormSystem::new(field.clone(), 7, forms).unwrap();
        match find_totally_singular(&system, 2, &SearchBudget::default()).unwrap() {
            SingularSearch::Found(v) => assert_eq!(v.dim(), 2),
            other => panic!("criterion 11: round {round} found no plane: {other:?}"),
        }
    }
    pass(11, t, None, "100 random pairs in 7 variables over F_3 vanish on a plane");
}

#[test]
fn criterion_12_function_field_reduction() {
    let t = Instant::now();
    // dimension bookkeeping on random shapes
    let f3 = FieldDesc::prime(3).unwrap();
    let mut rng = seeded_rng(4012);
    for &n in &[2usize, 3, 5, 9] {
        for cap_d in 0..=2u32 {
            for d in 0..=2u32 {
                let mut terms = vec![(0, n - 1, cap_d, 1i64)];
                for _ in 0..4 {
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n);
                    terms.push((i.min(j), i.max(j), rng.gen_range(0..=cap_d), rng.gen_range(1..3)));
                }
                let f = FTForm::from_terms(f3.clone(), n, &terms).unwrap();
                assert_eq!(f.t_degree(), cap_d);
                let res = ffred::reduce_ft_form(&f, d).unwrap();
                assert_eq!(res.unknowns(), n * (d as usize + 1), "criterion 12: N = n(d+1)");
                assert_eq!(
                    res.form_count(),
                    (2 * d + cap_d + 1) as usize,
                    "criterion 12: R = 2d+D+1"
                );
            }
        }
    }
    // the nine-variable ansatz crossing: 45 unknowns versus 44 forms
    assert_eq!(ffred::ansatz_threshold(9, 2), Some(4), "criterion 12: crossing at d=4");
    assert_eq!(9 * (4 + 1), 45);
    assert_eq!(4 * (2 * 4 + 2 + 1), 44);
    assert_eq!(ffred::ansatz_threshold(9, 1), Some(0));

    // roundtrip: x1^2 - T^2 x2^2 has the degree-one solution (T, 1)
    let doc = ffred::parse_ft_document(FT_SQUARE).unwrap();
    let res = ffred::reduce_ft_form(&doc.forms[0], 1).unwrap();
    let scan = enumerate_common_zeros(&res.system, &EnumOptions::default()).unwrap();
    assert_eq!(scan.count, 5, "criterion 12: four nontrivial solutions and the origin");
    let target = vec![vec![f3.zero(), f3.one()], vec![f3.one()]];
    let mut seen = false;
    for rep in &scan.reports {
        if rep.point.iter().all(|c| f3.is_zero(c)) {
            continue;
        }
        let polys = ffred::solution_to_polynomials(&res, &rep.point).unwrap();
        if polys == target {
            seen = true;
        }
    }
    assert!(seen, "criterion 12: (T, 1) decoded among the solutions");

    // while x1^2 - T x2^2 only has the trivial one, over all 3^4 vectors
    let doc = ffred::parse_ft_document(FT_NONSQUARE).unwrap();
    let res = ffred::reduce_ft_form(&doc.forms[0], 1).unwrap();
    let opts = EnumOptions { count_only: true, ..EnumOptions::default() };
    assert_eq!(res.unknowns(), 4);
    assert_eq!(enumerate_common_zeros(&res.system, &opts).unwrap().count, 1);
    pass(12, t, Some(5.0), "dimension formulas, the 45 > 44 crossing and the (T, 1) roundtrip");
}

fn positioned(err: &Error) -> Option<(usize, usize)> {
    match err {
        Error::SyntaxError { line, col, .. }
        | Error::NonHomogeneous { line, col, .. }
        | Error::UnknownVariable { line, col, .. } => Some((*line, *col)),
        _ => None,
    }
}

fn random_field(rng: &mut impl Rng) -> FieldDesc {
    match rng.gen_range(0..6) {
        0 => FieldDesc::prime([2u64, 3, 5, 7, 13][rng.gen_range(0..5)]).unwrap(),
        1 => FieldDesc::extension(2, &[1, 1, 1]).unwrap(),
        2 => FieldDesc::extension(3, &[1, 0, 1]).unwrap(),
        3 => FieldDesc::padic([2u64, 3, 5][rng.gen_range(0..3)], rng.gen_range(1..=12)).unwrap(),
        4 => FieldDesc::mod_pk([2u64, 3, 5][rng.gen_range(0..3)], rng.gen_range(1..=4)).unwrap(),
        _ => FieldDesc::prime(3).unwrap(),
    }
}

fn random_document(rng: &mut impl Rng) -> SystemDocument {
    let field = random_field(rng);
    let n = rng.gen_range(1..=6usize);
    let r = rng.gen_range(1..=3usize);
    let forms: Vec<QuadraticForm> = (0..r)
        .map(|_| {
            let mut q = QuadraticForm::zero(field.clone(), n);
            for i in 0..n {
                for j in i..n {
                    if rng.gen_bool(0.3) {
                        continue;
                    }
                    let c = match field.order() {
                        Some(order) => field.element_from_index(rng.gen_range(0..order)),
                        None => {
                            if rng.gen_bool(0.2) {
                                field
                                    .from_ratio(
                                        &BigInt::from(rng.gen_range(-9i64..=9)),
                                        &BigInt::from([1i64, 2, 3][rng.gen_range(0..3)]),
                                    )
                                    .unwrap()
                            } else {
                                field.from_int(rng.gen_range(-9i64..=9))
                            }
                        }
                    };
                    q.set_coeff(i, j, c);
                }
            }
            q
        })
        .collect();
    let names = (0..r).map(|i| format!("q{}", i + 1)).collect();
    let system = FormSystem::new(field, n, forms).unwrap();
    SystemDocument::new(vec![], names, system).unwrap()
}

#[test]
fn criterion_13_parser_roundtrip_and_fuzz() {
    let t = Instant::now();
    // roundtrip identity on every bundled document
    for (name, text) in DOCUMENTS {
        if name.starts_with("ft-") {
            let doc = ffred::parse_ft_document(text).unwrap();
            let out = ffred::serialize_ft_document(&doc);
            let back = ffred::parse_ft_document(&out).unwrap();
            assert_eq!(doc.forms, back.forms, "criterion 13: {name}");
            assert_eq!(doc.names, back.names, "criterion 13: {name}");
            assert_eq!(out, ffred::serialize_ft_document(&back), "criterion 13: {name}");
        } else {
            let doc = parse(text);
            let out = serialize_system(&doc);
            let back = parse(&out);
            assert_eq!(doc.system, back.system, "criterion 13: {name}");
            assert_eq!(doc.names, back.names, "criterion 13: {name}");
            assert_eq!(out, serialize_system(&back), "criterion 13: {name}");
        }
    }

    // 200 fuzzed documents roundtrip, and a malformed mutation of each
    // fails with a positioned error instead of crashing
    let mut rng = seeded_rng(4013);
    for round in 0..200 {
        let doc = random_document(&mut rng);
        let out = serialize_system(&doc);
        let back = parse_system(&out)
            .unwrap_or_else(|e| panic!("criterion 13: round {round} failed to reparse: {e}\n{out}"));
        assert_eq!(doc.system, back.system, "criterion 13: round {round}\n{out}");
        assert_eq!(doc.names, back.names);
        assert_eq!(out, serialize_system(&back));

        let n = doc.system.n();
        let mutated = match round % 5 {
            0 => format!("{out}form zz9 = x1^3\n"),
            1 => format!("{out}form zz9 = x{}^2\n", n + 1),
            2 => format!("{out}form zz9 = x1^2 + @\n"),
            3 => out.replacen("form ", "from ", 1),
            _ => out.replacen("field ", "feld ", 1),
        };
        let err = parse_system(&mutated).expect_err("criterion 13: mutation must not parse");
        let (line, col) = positioned(&err).unwrap_or_else(|| {
            panic!("criterion 13: round {round} error carries no position: {err:?}")
        });
        assert!(line >= 1 && col >= 1);
    }
    pass(13, t, None, "full corpus and 200 fuzzed documents roundtrip; mutations fail with positions");
}
