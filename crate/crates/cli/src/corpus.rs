//! The bundled example corpus and the `verify-paper` runner.
//!
//! Every entry pairs a `.qfs` document (embedded at compile time) with
//! one module operation, a frozen expected-outcome descriptor and a
//! one-line statement of the mathematical claim it checks.  An entry
//! passes when the operation's actual outcome string equals the frozen
//! descriptor, so a failing entry reports exactly what changed.
//!
//! Slow certifications can be cached by input hash under
//! `.qforms-cache/`; the cache stores outcome strings, never verdicts,
//! so a stale or tampered cache shows up as a mismatch.

use qforms_core::bounds::{bound_table, lower_bound, lower_bound_witness, upper_bound, upper_bound_values};
use qforms_core::field::MatrixF;
use qforms_core::formlang::{parse_system, SystemDocument};
use qforms_core::hensel::{padic_solve, PadicSolve};
use qforms_core::minimize::{check_transform, is_fq_minimized, minimize_heuristic, TransformClass};
use qforms_core::oneform::{is_isotropic_qp, primitive_zero_mod};
use qforms_core::quadform::TransformPair;
use qforms_core::subspace::{find_totally_singular, SearchBudget, SingularSearch};
use qforms_core::zerofinder::{
    chevalley_warning_check, count_zeros_exact, enumerate_common_zeros, find_nonsingular_zero,
    EnumOptions, NonsingularSearch, SearchOptions,
};
use qforms_core::{ffred, Result};
use sha2::{Digest, Sha256};

pub const F2_TRIPLE: &str = include_str!("../../../corpus/f2-triple.qfs");
pub const F2_PAIR: &str = include_str!("../../../corpus/f2-pair.qfs");
pub const Q3_WORKED: &str = include_str!("../../../corpus/q3-worked.qfs");
pub const F3_MINIMIZED: &str = include_str!("../../../corpus/f3-minimized.qfs");
pub const ANISOTROPIC_P2: &str = include_str!("../../../corpus/anisotropic-p2.qfs");
pub const ANISOTROPIC_P3: &str = include_str!("../../../corpus/anisotropic-p3.qfs");
pub const ANISOTROPIC_P5: &str = include_str!("../../../corpus/anisotropic-p5.qfs");
pub const ANISOTROPIC_P7: &str = include_str!("../../../corpus/anisotropic-p7.qfs");
pub const FT_SQUARE: &str = include_str!("../../../corpus/ft-square.qfs");
pub const FT_NONSQUARE: &str = include_str!("../../../corpus/ft-nonsquare.qfs");
pub const HYPERBOLIC: &str = include_str!("../../../corpus/hyperbolic.qfs");
pub const BLOCK_2: &str = include_str!("../../../corpus/block-2.qfs");
pub const ZMOD_9: &str = include_str!("../../../corpus/zmod-9.qfs");
pub const F4_CONIC: &str = include_str!("../../../corpus/f4-conic.qfs");
pub const F9_TWO_LINES: &str = include_str!("../../../corpus/f9-two-lines.qfs");

/// Name/text pairs for every bundled document, for listing and for
/// parser roundtrip tests.
pub const DOCUMENTS: &[(&str, &str)] = &[
    ("f2-triple.qfs", F2_TRIPLE),
    ("f2-pair.qfs", F2_PAIR),
    ("q3-worked.qfs", Q3_WORKED),
    ("f3-minimized.qfs", F3_MINIMIZED),
    ("anisotropic-p2.qfs", ANISOTROPIC_P2),
    ("anisotropic-p3.qfs", ANISOTROPIC_P3),
    ("anisotropic-p5.qfs", ANISOTROPIC_P5),
    ("anisotropic-p7.qfs", ANISOTROPIC_P7),
    ("ft-square.qfs", FT_SQUARE),
    ("ft-nonsquare.qfs", FT_NONSQUARE),
    ("hyperbolic.qfs", HYPERBOLIC),
    ("block-2.qfs", BLOCK_2),
    ("zmod-9.qfs", ZMOD_9),
    ("f4-conic.qfs", F4_CONIC),
    ("f9-two-lines.qfs", F9_TWO_LINES),
];

/// Context handed to every entry runner.
pub struct EntryCtx {
    pub seed: u64,
}

/// One checkable claim: a document, one module operation, the frozen
/// outcome and a statement of the claim.
pub struct CorpusEntry {
    pub id: &'static str,
    /// Bundled document the entry reads, if any (bound entries have
    /// none).
    pub doc: Option<&'static str>,
    /// The claim in one line.
    pub anchor: &'static str,
    /// Frozen outcome descriptor the runner must reproduce.
    pub expected: &'static str,
    /// Worth caching by input hash (certified searches).
    pub cacheable: bool,
    pub run: fn(&EntryCtx) -> Result<String>,
}

fn doc(text: &str) -> Result<SystemDocument> {
    parse_system(text)
}

fn solve_outcome(text: &str, seed: u64) -> Result<String> {
    let d = doc(text)?;
    let opts = SearchOptions { seed, ..SearchOptions::default() };
    Ok(match padic_solve(&d.system, 8, &opts)? {
        PadicSolve::Solved(sz) => format!(
            "solved achieved>={} primitive={}",
            if sz.achieved >= 8 { 8 } else { sz.achieved },
            sz.zero.is_primitive()
        ),
        PadicSolve::NoNonsingularSeed { certified, .. } => {
            format!("no nonsingular seed (certified={certified})")
        }
        PadicSolve::Unknown { attempts } => format!("unknown after {attempts} attempts"),
    })
}

fn minimized_outcome(text: &str) -> Result<String> {
    let d = doc(text)?;
    let verdict = is_fq_minimized(&d.system)?;
    Ok(if verdict.minimized {
        "minimized (certified)".into()
    } else {
        let w = verdict.witness.expect("non-minimized verdicts carry a witness");
        format!("witness: k={} dim={}", w.k, w.v.dim())
    })
}

fn anisotropic_decision(text: &str) -> Result<String> {
    let d = doc(text)?;
    let report = is_isotropic_qp(&d.system.forms()[0])?;
    Ok(if report.isotropic { "isotropic".into() } else { "anisotropic".into() })
}

fn anisotropic_residue(text: &str, m: u32) -> Result<String> {
    let d = doc(text)?;
    let q = &d.system.forms()[0];
    let modulus = d.system.field().p().pow(m);
    Ok(match primitive_zero_mod(q, m, 1 << 26)? {
        None => format!("no primitive zero mod {modulus}"),
        Some(x) => format!(
            "primitive zero mod {modulus}: ({})",
            x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
        ),
    })
}

fn count_outcome(text: &str) -> Result<String> {
    let d = doc(text)?;
    let q = &d.system.forms()[0];
    Ok(format!("count={}", count_zeros_exact(q)?))
}

pub fn entries() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            id: "f2-triple-zero-count",
            doc: Some(F2_TRIPLE),
            anchor: "the triple has 192 common zeros among the 8192 points of F_2^13, so a nontrivial one exists",
            expected: "count=192 nontrivial=true even=true",
            cacheable: false,
            run: |_| {
                let d = doc(F2_TRIPLE)?;
                let opts = EnumOptions { count_only: true, ..EnumOptions::default() };
                let scan = enumerate_common_zeros(&d.system, &opts)?;
                Ok(format!(
                    "count={} nontrivial={} even={}",
                    scan.count,
                    scan.count > 1,
                    scan.count % 2 == 0
                ))
            },
        },
        CorpusEntry {
            id: "f2-triple-singularity",
            doc: Some(F2_TRIPLE),
            anchor: "every common zero of the triple is singular for the system",
            expected: "no nonsingular common zero (certified)",
            cacheable: false,
            run: |ctx| {
                let d = doc(F2_TRIPLE)?;
                let opts = SearchOptions { seed: ctx.seed, ..SearchOptions::default() };
                Ok(match find_nonsingular_zero(&d.system, &opts)? {
                    NonsingularSearch::Found(rep) => {
                        format!("found a nonsingular zero of jacobian rank {}", rep.jacobian_rank)
                    }
                    NonsingularSearch::NotFound { certified: true, .. } => {
                        "no nonsingular common zero (certified)".into()
                    }
                    NonsingularSearch::NotFound { certified: false, attempts } => {
                        format!("no nonsingular zero in {attempts} samples (inconclusive)")
                    }
                })
            },
        },
        CorpusEntry {
            id: "f2-triple-parity",
            doc: Some(F2_TRIPLE),
            anchor: "with 13 > 2*3 variables the common zero count is divisible by 2",
            expected: "count=192 congruent=true",
            cacheable: false,
            run: |_| {
                let d = doc(F2_TRIPLE)?;
                let (count, congruent) = chevalley_warning_check(&d.system)?;
                Ok(format!("count={count} congruent={congruent}"))
            },
        },
        CorpusEntry {
            id: "f2-triple-minimized",
            doc: Some(F2_TRIPLE),
            anchor: "no combination of k of the three forms vanishes on a (13-2k)-dimensional subspace, for k = 1, 2, 3",
            expected: "minimized (certified)",
            cacheable: true,
            run: |_| minimized_outcome(F2_TRIPLE),
        },
        CorpusEntry {
            id: "f2-pair-no-ts4",
            doc: Some(F2_PAIR),
            anchor: "the two sums vanish on no common 4-dimensional totally singular subspace of F_2^8",
            expected: "no totally singular subspace of dimension 4 (certified)",
            cacheable: true,
            run: |_| {
                let d = doc(F2_PAIR)?;
                Ok(match find_totally_singular(&d.system, 4, &SearchBudget::default())? {
                    SingularSearch::Found(v) => format!("found one of dimension {}", v.dim()),
                    SingularSearch::NotFound { certified: true, .. } => {
                        "no totally singular subspace of dimension 4 (certified)".into()
                    }
                    SingularSearch::NotFound { certified: false, nodes } => {
                        format!("not found within {nodes} nodes (inconclusive)")
                    }
                })
            },
        },
        CorpusEntry {
            id: "q3-worked-improving",
            doc: Some(Q3_WORKED),
            anchor: "rescaling x5 by 1/3 keeps the model integral and scores 5*0 + 2*(-1) = -2 < 0",
            expected: "integral=true class=improving score=-2",
            cacheable: false,
            run: |_| {
                let d = doc(Q3_WORKED)?;
                let qp = d.system.field().clone();
                let mut m = MatrixF::identity(qp.clone(), 5);
                m.set(4, 4, qp.from_ratio(&1.into(), &3.into())?);
                let pair = TransformPair::new(3, m, MatrixF::identity(qp, 1))?;
                let check = check_transform(&d.system, &pair)?;
                let class = match check.class {
                    TransformClass::Improving => "improving",
                    TransformClass::Neutral => "neutral",
                    TransformClass::Compliant => "compliant",
                };
                Ok(format!(
                    "integral={} class={class} score={}",
                    check.integral, check.score
                ))
            },
        },
        CorpusEntry {
            id: "q3-worked-one-step",
            doc: Some(Q3_WORKED),
            anchor: "one improving step already reaches a minimized model",
            expected: "converged=true steps=1",
            cacheable: false,
            run: |_| {
                let d = doc(Q3_WORKED)?;
                let min = minimize_heuristic(&d.system, 64)?;
                Ok(format!("converged={} steps={}", min.converged, min.log.len()))
            },
        },
        CorpusEntry {
            id: "q3-residue-minimized",
            doc: Some(F3_MINIMIZED),
            anchor: "the residue form x1^2 + x2^2 + x3*x4 is minimized over F_3 in five variables",
            expected: "minimized (certified)",
            cacheable: false,
            run: |_| minimized_outcome(F3_MINIMIZED),
        },
        CorpusEntry {
            id: "q3-worked-solve",
            doc: Some(Q3_WORKED),
            anchor: "the worked form has a primitive 3-adic zero correct to precision 8",
            expected: "solved achieved>=8 primitive=true",
            cacheable: false,
            run: |ctx| solve_outcome(Q3_WORKED, ctx.seed),
        },
        CorpusEntry {
            id: "aniso-2-decision",
            doc: Some(ANISOTROPIC_P2),
            anchor: "the four-square form has only the trivial zero over Q_2",
            expected: "anisotropic",
            cacheable: false,
            run: |_| anisotropic_decision(ANISOTROPIC_P2),
        },
        CorpusEntry {
            id: "aniso-2-residue",
            doc: Some(ANISOTROPIC_P2),
            anchor: "the four-square form has no primitive zero mod 16",
            expected: "no primitive zero mod 16",
            cacheable: false,
            run: |_| anisotropic_residue(ANISOTROPIC_P2, 4),
        },
        CorpusEntry {
            id: "aniso-3-decision",
            doc: Some(ANISOTROPIC_P3),
            anchor: "the quaternary (1, -2, 3, -6) has only the trivial zero over Q_3",
            expected: "anisotropic",
            cacheable: false,
            run: |_| anisotropic_decision(ANISOTROPIC_P3),
        },
        CorpusEntry {
            id: "aniso-3-residue",
            doc: Some(ANISOTROPIC_P3),
            anchor: "the quaternary (1, -2, 3, -6) has no primitive zero mod 9",
            expected: "no primitive zero mod 9",
            cacheable: false,
            run: |_| anisotropic_residue(ANISOTROPIC_P3, 2),
        },
        CorpusEntry {
            id: "aniso-5-decision",
            doc: Some(ANISOTROPIC_P5),
            anchor: "the quaternary (1, -2, 5, -10) has only the trivial zero over Q_5",
            expected: "anisotropic",
            cacheable: false,
            run: |_| anisotropic_decision(ANISOTROPIC_P5),
        },
        CorpusEntry {
            id: "aniso-5-residue",
            doc: Some(ANISOTROPIC_P5),
            anchor: "the quaternary (1, -2, 5, -10) has no primitive zero mod 25",
            expected: "no primitive zero mod 25",
            cacheable: false,
            run: |_| anisotropic_residue(ANISOTROPIC_P5, 2),
        },
        CorpusEntry {
            id: "aniso-7-decision",
            doc: Some(ANISOTROPIC_P7),
            anchor: "the quaternary (1, -3, 7, -21) has only the trivial zero over Q_7",
            expected: "anisotropic",
            cacheable: false,
            run: |_| anisotropic_decision(ANISOTROPIC_P7),
        },
        CorpusEntry {
            id: "aniso-7-residue",
            doc: Some(ANISOTROPIC_P7),
            anchor: "the quaternary (1, -3, 7, -21) has no primitive zero mod 49",
            expected: "no primitive zero mod 49",
            cacheable: false,
            run: |_| anisotropic_residue(ANISOTROPIC_P7, 2),
        },
        CorpusEntry {
            id: "hyperbolic-solve",
            doc: Some(HYPERBOLIC),
            anchor: "a visible hyperbolic plane solves at any precision from the residue seed (0, 1, 0)",
            expected: "solved achieved>=8 primitive=true",
            cacheable: false,
            run: |ctx| solve_outcome(HYPERBOLIC, ctx.seed),
        },
        CorpusEntry {
            id: "ft-square-ansatz",
            doc: Some(FT_SQUARE),
            anchor: "x1 = T, x2 = 1 solves x1^2 - T^2 x2^2 over F_3(T) at ansatz degree one",
            expected: "the vector of (T, 1) is a common zero of the compiled system",
            cacheable: false,
            run: |_| {
                let d = ffred::parse_ft_document(FT_SQUARE)?;
                let res = ffred::reduce_ft_form(&d.forms[0], 1)?;
                let field = d.field.clone();
                let ansatz = vec![vec![field.zero(), field.one()], vec![field.one()]];
                let c = res.encode(&ansatz)?;
                Ok(if res.system.is_zero_at(&c)? {
                    "the vector of (T, 1) is a common zero of the compiled system".into()
                } else {
                    "the vector of (T, 1) is not a zero of the compiled system".into()
                })
            },
        },
        CorpusEntry {
            id: "ft-nonsquare-trivial",
            doc: Some(FT_NONSQUARE),
            anchor: "x1^2 - T x2^2 has no nonzero polynomial solution of degree at most one over F_3(T)",
            expected: "compiled zeros: 1 (trivial only)",
            cacheable: false,
            run: |_| {
                let d = ffred::parse_ft_document(FT_NONSQUARE)?;
                let res = ffred::reduce_ft_form(&d.forms[0], 1)?;
                let opts = EnumOptions { count_only: true, ..EnumOptions::default() };
                let scan = enumerate_common_zeros(&res.system, &opts)?;
                Ok(if scan.count == 1 {
                    "compiled zeros: 1 (trivial only)".into()
                } else {
                    format!("compiled zeros: {}", scan.count)
                })
            },
        },
        CorpusEntry {
            id: "block-2-witness",
            doc: Some(BLOCK_2),
            anchor: "two disjoint anisotropic blocks give two forms in 8 = 4*2 variables with only the trivial zero",
            expected: "generated witness matches the document",
            cacheable: false,
            run: |_| {
                let d = doc(BLOCK_2)?;
                let w = lower_bound_witness(2, 3)?;
                Ok(if w == d.system {
                    "generated witness matches the document".into()
                } else {
                    "generated witness differs from the document".into()
                })
            },
        },
        CorpusEntry {
            id: "bounds-first-seven",
            doc: None,
            anchor: "the first seven upper bounds are 4, 8, 16, 24, 40, 56, 84",
            expected: "upper=4,8,16,24,40,56,84",
            cacheable: false,
            run: |_| {
                let rows = bound_table(7)?;
                Ok(format!(
                    "upper={}",
                    rows.iter().map(|r| r.upper.to_string()).collect::<Vec<_>>().join(",")
                ))
            },
        },
        CorpusEntry {
            id: "bounds-closed-forms",
            doc: None,
            anchor: "from r = 6 the engine's bound is 2r^2-16 (even) or 2r^2-14 (odd), beating the quadratic envelope by 16",
            expected: "piecewise closed forms hold for r = 6..=100 with margin 16",
            cacheable: false,
            run: |_| {
                let v = upper_bound_values(100)?;
                for r in 6u64..=100 {
                    let want = if r % 2 == 0 { 2 * r * r - 16 } else { 2 * r * r - 14 };
                    let envelope = if r % 2 == 0 { 2 * r * r } else { 2 * r * r + 2 };
                    if v[r as usize] != want || envelope - v[r as usize] != 16 {
                        return Ok(format!("first failure at r={r}: value {}", v[r as usize]));
                    }
                }
                Ok("piecewise closed forms hold for r = 6..=100 with margin 16".into())
            },
        },
        CorpusEntry {
            id: "bounds-bracket-3",
            doc: None,
            anchor: "for three forms the threshold lies between 12 and 16; no single value is known",
            expected: "12 <= beta(3;Qp) <= 16",
            cacheable: false,
            run: |_| {
                let lo = lower_bound(3)?;
                let up = upper_bound(3)?.value;
                Ok(format!("{lo} <= beta(3;Qp) <= {up}"))
            },
        },
        CorpusEntry {
            id: "zmod9-count",
            doc: Some(ZMOD_9),
            anchor: "x1^2 + x2^2 + x3*x4 has exactly 5589 zeros among the 9^5 vectors over Z/9",
            expected: "count=5589",
            cacheable: false,
            run: |_| {
                let d = doc(ZMOD_9)?;
                let opts = EnumOptions { count_only: true, ..EnumOptions::default() };
                let scan = enumerate_common_zeros(&d.system, &opts)?;
                Ok(format!("count={}", scan.count))
            },
        },
        CorpusEntry {
            id: "f4-conic-count",
            doc: Some(F4_CONIC),
            anchor: "a smooth conic over F_q has q^2 affine zeros; over F_4 that is 16",
            expected: "count=16",
            cacheable: false,
            run: |_| count_outcome(F4_CONIC),
        },
        CorpusEntry {
            id: "f9-two-lines",
            doc: Some(F9_TWO_LINES),
            anchor: "x1^2 + x2^2 splits into two lines over F_9, giving 2*9 - 1 = 17 zeros",
            expected: "count=17",
            cacheable: false,
            run: |_| count_outcome(F9_TWO_LINES),
        },
    ]
}

/// Outcome of one entry replay.
#[derive(Debug, Clone)]
pub struct EntryOutcome {
    pub id: &'static str,
    pub anchor: &'static str,
    pub expected: &'static str,
    pub actual: String,
    pub pass: bool,
    pub cached: bool,
}

fn cache_key(e: &CorpusEntry) -> String {
    let mut h = Sha256::new();
    h.update(e.id.as_bytes());
    h.update([0]);
    h.update(e.doc.unwrap_or("").as_bytes());
    h.update([0]);
    h.update(e.expected.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_path(e: &CorpusEntry) -> std::path::PathBuf {
    std::path::Path::new(".qforms-cache").join(format!("{}.txt", cache_key(e)))
}

fn cache_load(e: &CorpusEntry) -> Option<String> {
    std::fs::read_to_string(cache_path(e)).ok()
}

fn cache_store(e: &CorpusEntry, actual: &str) {
    // best effort: an unwritable cache only costs recomputation
    if std::fs::create_dir_all(".qforms-cache").is_ok() {
        let _ = std::fs::write(cache_path(e), actual);
    }
}

/// Replays every entry whose id contains `filter` (all when empty),
/// using cached outcomes for cacheable entries unless `use_cache` is
/// off.
pub fn run_corpus(filter: Option<&str>, use_cache: bool, seed: u64) -> Vec<EntryOutcome> {
    let ctx = EntryCtx { seed };
    entries()
        .iter()
        .filter(|e| filter.map_or(true, |f| e.id.contains(f)))
        .map(|e| {
            if e.cacheable && use_cache {
                if let Some(actual) = cache_load(e) {
                    let pass = actual == e.expected;
                    return EntryOutcome {
                        id: e.id,
                        anchor: e.anchor,
                        expected: e.expected,
                        actual,
                        pass,
                        cached: true,
                    };
                }
            }
            let actual = match (e.run)(&ctx) {
                Ok(s) => s,
                Err(err) => format!("error: {err}"),
            };
            if e.cacheable && !actual.starts_with("error:") {
                cache_store(e, &actual);
            }
            let pass = actual == e.expected;
            EntryOutcome {
                id: e.id,
                anchor: e.anchor,
                expected: e.expected,
                actual,
                pass,
                cached: false,
            }
        })
        .collect()
}
