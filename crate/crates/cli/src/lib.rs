//! Command-line front end over the core crate.
//!
//! Every subcommand reads a `.qfs` document from a file or standard
//! input ("-"), runs one module operation and writes a deterministic
//! report as text or JSON.  Exit codes separate outcomes from
//! failures: 0 for a positive result, 1 for a negative mathematical
//! verdict (nothing found, anisotropic, not minimized), 2 for errors
//! of any kind including bad usage.

pub mod corpus;

use clap::{Parser, Subcommand, ValueEnum};
use qforms_core::bounds::{annotations, bound_table, lower_bound, lower_bound_derivation, upper_bound};
use qforms_core::ffred;
use qforms_core::field::{FieldDesc, FieldElement, MatrixF};
use qforms_core::formlang::{parse_system, serialize_system, SystemDocument};
use qforms_core::hensel::{lift_nonsingular, padic_solve, PadicSolve, PadicVector};
use qforms_core::minimize::{is_fq_minimized, minimize_heuristic, StopReason};
use qforms_core::oneform::is_isotropic_qp;
use qforms_core::quadform::{FormSystem, TransformPair};
use qforms_core::subspace::{explore_beta, find_totally_singular, SearchBudget, SingularSearch, Subspace};
use qforms_core::zerofinder::{
    enumerate_common_zeros, find_nonsingular_zero, EnumOptions, NonsingularSearch, SearchOptions,
    ZeroReport,
};
use qforms_core::{Error, Result};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::io::Read;

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "qforms",
    version,
    about = "Exact zero finding, minimization and local solubility for systems of quadratic forms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized searches, fixed for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Target precision for p-adic lifting (default: the document's).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Cap on collected reports or decoded witnesses.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Include derivation traces and transform logs in reports.
    #[arg(long, global = true)]
    trace: bool,
    /// Recompute cached certifications instead of replaying them.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate or count the common zeros of a system over a finite base
    Zeros {
        /// Path to a .qfs document, or "-" for standard input
        input: String,
        /// Search for a certified nonsingular common zero instead
        #[arg(long)]
        nonsingular: bool,
        /// Scan one representative per projective class
        #[arg(long)]
        projective: bool,
        /// Count without collecting points
        #[arg(long)]
        count_only: bool,
    },
    /// Search for a totally singular subspace of a given dimension
    Subspace {
        input: String,
        /// Target dimension
        #[arg(long)]
        dim: usize,
    },
    /// Sample random systems to probe a subspace guarantee at n variables
    ExploreBeta {
        /// Base prime
        #[arg(long)]
        p: u64,
        /// Number of forms per sampled system
        #[arg(long)]
        r: usize,
        /// Required subspace dimension
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Variable count to test
        #[arg(long)]
        n: usize,
        /// Systems to sample
        #[arg(long, default_value_t = 20)]
        trials: u64,
    },
    /// Certify minimality of a system over a finite field
    Minimized { input: String },
    /// Drive a system over Q_p to an integral model no improving step leaves
    Minimize { input: String },
    /// Lift a given nonsingular residue zero to full precision
    Lift {
        input: String,
        /// Residue seed, comma-separated integers, e.g. "1,1,1,1,0"
        #[arg(long)]
        point: String,
    },
    /// Find a primitive p-adic zero end to end (minimize, seed, lift)
    Solve { input: String },
    /// Decide isotropy of a single form over Q_p from its invariants
    Isotropy { input: String },
    /// Compile a form with polynomial coefficients in T down to the base field
    Ffreduce {
        input: String,
        /// Ansatz degree for the unknowns' coefficient polynomials
        #[arg(long, default_value_t = 1)]
        degree: u32,
        /// Enumerate compiled zeros and decode them back to polynomials
        #[arg(long)]
        solve: bool,
    },
    /// Print variable-count bounds, one bracket or the full table
    Bounds {
        /// Single form count: print the bracket for this r
        #[arg(long, conflicts_with = "table")]
        r: Option<u64>,
        /// Print rows for every r up to this value
        #[arg(long)]
        table: Option<u64>,
    },
    /// Replay the bundled corpus of checked claims
    VerifyPaper {
        /// Only run entries whose id contains this substring
        #[arg(long)]
        filter: Option<String>,
    },
}

/// A finished report: rendered text, its JSON form and the exit code.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

/// Entry point shared by the binary and the tests: parse `argv`, run
/// the subcommand, print the report and return the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(rep) => {
            match cli.format {
                Format::Text => println!("{}", rep.text),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&rep.json).expect("reports serialize")
                ),
            }
            rep.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.cmd {
        Cmd::Zeros { input, nonsingular, projective, count_only } => {
            cmd_zeros(cli, input, *nonsingular, *projective, *count_only)
        }
        Cmd::Subspace { input, dim } => cmd_subspace(input, *dim),
        Cmd::ExploreBeta { p, r, m, n, trials } => cmd_explore_beta(cli, *p, *r, *m, *n, *trials),
        Cmd::Minimized { input } => cmd_minimized(input),
        Cmd::Minimize { input } => cmd_minimize(cli, input),
        Cmd::Lift { input, point } => cmd_lift(cli, input, point),
        Cmd::Solve { input } => cmd_solve(cli, input),
        Cmd::Isotropy { input } => cmd_isotropy(cli, input),
        Cmd::Ffreduce { input, degree, solve } => cmd_ffreduce(cli, input, *degree, *solve),
        Cmd::Bounds { r, table } => cmd_bounds(cli, *r, *table),
        Cmd::VerifyPaper { filter } => cmd_verify_paper(cli, filter.as_deref()),
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Io(format!("standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
    }
}

fn load_document(path: &str) -> Result<SystemDocument> {
    parse_system(&read_input(path)?)
}

fn fmt_point(field: &FieldDesc, point: &[FieldElement]) -> String {
    let coords: Vec<String> = point.iter().map(|c| field.fmt_element(c)).collect();
    format!("({})", coords.join(", "))
}

fn json_point(field: &FieldDesc, point: &[FieldElement]) -> Value {
    Value::Array(
        point
            .iter()
            .map(|c| Value::String(field.fmt_element(c)))
            .collect(),
    )
}

fn report_line(field: &FieldDesc, rep: &ZeroReport) -> String {
    format!(
        "zero: {} jacobian_rank={} singular={}",
        fmt_point(field, &rep.point),
        rep.jacobian_rank,
        rep.singular
    )
}

fn basis_lines(field: &FieldDesc, v: &Subspace) -> String {
    let mut out = String::new();
    for b in v.basis() {
        let coords: Vec<String> = b.iter().map(|c| field.fmt_element(c)).collect();
        let _ = writeln!(out, "basis {}", coords.join(" "));
    }
    out
}

fn json_basis(field: &FieldDesc, v: &Subspace) -> Value {
    Value::Array(v.basis().iter().map(|b| json_point(field, b)).collect())
}

fn matrix_rows(m: &MatrixF) -> Vec<String> {
    let field = m.field();
    (0..m.rows())
        .map(|i| {
            let row: Vec<String> = m.row(i).iter().map(|c| field.fmt_element(c)).collect();
            row.join(" ")
        })
        .collect()
}

fn transform_block(label: &str, pair: &TransformPair) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{label}: variable change M, then form mixing P");
    for row in matrix_rows(pair.variable_change()) {
        let _ = writeln!(out, "  M {row}");
    }
    for row in matrix_rows(pair.form_change()) {
        let _ = writeln!(out, "  P {row}");
    }
    out
}

fn json_transform(pair: &TransformPair) -> Value {
    json!({
        "variable_change": matrix_rows(pair.variable_change()),
        "form_mixing": matrix_rows(pair.form_change()),
    })
}

fn padic_lines(x: &PadicVector) -> String {
    let mut out = String::new();
    for i in 0..x.coords.len() {
        let _ = writeln!(out, "x{} = {}", i + 1, x.digit_string(i));
    }
    out
}

fn json_padic(x: &PadicVector) -> Value {
    json!({
        "p": x.p,
        "precision": x.precision,
        "digits": (0..x.coords.len()).map(|i| x.digit_string(i)).collect::<Vec<_>>(),
        "primitive": x.is_primitive(),
    })
}

fn cmd_zeros(
    cli: &Cli,
    input: &str,
    nonsingular: bool,
    projective: bool,
    count_only: bool,
) -> Result<Report> {
    let doc = load_document(input)?;
    let field = doc.system.field().clone();
    if nonsingular {
        let opts = SearchOptions { seed: cli.seed, ..SearchOptions::default() };
        return Ok(match find_nonsingular_zero(&doc.system, &opts)? {
            NonsingularSearch::Found(rep) => Report {
                text: format!(
                    "nonsingular common zero found\n{}",
                    report_line(&field, &rep)
                ),
                json: json!({
                    "found": true,
                    "point": json_point(&field, &rep.point),
                    "jacobian_rank": rep.jacobian_rank,
                }),
                code: 0,
            },
            NonsingularSearch::NotFound { certified: true, .. } => Report {
                text: "no nonsingular common zero (certified)".into(),
                json: json!({ "found": false, "certified": true }),
                code: 1,
            },
            NonsingularSearch::NotFound { certified: false, attempts } => Report {
                text: format!("no nonsingular common zero in {attempts} samples (inconclusive)"),
                json: json!({ "found": false, "certified": false, "attempts": attempts }),
                code: 1,
            },
        });
    }
    let opts = EnumOptions {
        count_only,
        projective,
        limit: Some(cli.limit.unwrap_or(10)),
        ..EnumOptions::default()
    };
    let scan = enumerate_common_zeros(&doc.system, &opts)?;
    let nontrivial = if projective { scan.count > 0 } else { scan.count > 1 };
    let mut text = format!(
        "count={} nonsingular_count={} nontrivial={}",
        scan.count, scan.nonsingular_count, nontrivial
    );
    for rep in &scan.reports {
        let _ = write!(text, "\n{}", report_line(&field, rep));
    }
    if scan.truncated {
        text.push_str("\n(report list truncated)");
    }
    Ok(Report {
        json: json!({
            "count": scan.count,
            "nonsingular_count": scan.nonsingular_count,
            "nontrivial": nontrivial,
            "truncated": scan.truncated,
            "zeros": scan.reports.iter().map(|r| json!({
                "point": json_point(&field, &r.point),
                "jacobian_rank": r.jacobian_rank,
                "singular": r.singular,
            })).collect::<Vec<_>>(),
        }),
        text,
        code: if nontrivial { 0 } else { 1 },
    })
}

fn cmd_subspace(input: &str, dim: usize) -> Result<Report> {
    let doc = load_document(input)?;
    let field = doc.system.field().clone();
    Ok(match find_totally_singular(&doc.system, dim, &SearchBudget::default())? {
        SingularSearch::Found(v) => Report {
            text: format!(
                "totally singular subspace of dimension {} found\n{}",
                v.dim(),
                basis_lines(&field, &v).trim_end()
            ),
            json: json!({
                "found": true,
                "dim": v.dim(),
                "basis": json_basis(&field, &v),
            }),
            code: 0,
        },
        SingularSearch::NotFound { certified: true, nodes } => Report {
            text: format!("no totally singular subspace of dimension {dim} (certified)"),
            json: json!({ "found": false, "certified": true, "nodes": nodes }),
            code: 1,
        },
        SingularSearch::NotFound { certified: false, nodes } => Report {
            text: format!(
                "no totally singular subspace of dimension {dim} within {nodes} nodes (inconclusive)"
            ),
            json: json!({ "found": false, "certified": false, "nodes": nodes }),
            code: 1,
        },
    })
}

fn cmd_explore_beta(cli: &Cli, p: u64, r: usize, m: usize, n: usize, trials: u64) -> Result<Report> {
    let field = FieldDesc::prime(p)?;
    let exp = explore_beta(&field, r, m, n, trials, cli.seed, &SearchBudget::default())?;
    let mut text = format!(
        "r={} m={} n={} trials={} seed={}\nguarantee_holds={} failures_at_n={} unknown_at_n={}",
        exp.r, exp.m, exp.n, exp.trials, exp.seed, exp.guarantee_holds, exp.failures_at_n,
        exp.unknown_at_n
    );
    let witness = exp.witness_at_prev.as_ref().map(|w| {
        let names = (0..w.r()).map(|i| format!("Q{}", i + 1)).collect();
        SystemDocument::new(vec![], names, w.clone()).map(|d| serialize_system(&d))
    });
    if let Some(w) = &witness {
        match w {
            Ok(s) => {
                let _ = write!(
                    text,
                    "\nsampled system at n-1 with a certified miss:\n{}",
                    s.trim_end()
                );
            }
            Err(e) => return Err(e.clone()),
        }
    }
    Ok(Report {
        json: json!({
            "r": exp.r, "m": exp.m, "n": exp.n,
            "trials": exp.trials, "seed": exp.seed,
            "guarantee_holds": exp.guarantee_holds,
            "failures_at_n": exp.failures_at_n,
            "unknown_at_n": exp.unknown_at_n,
            "witness_at_prev": witness.map(|w| w.expect("checked above")),
        }),
        text,
        code: if exp.guarantee_holds { 0 } else { 1 },
    })
}

fn cmd_minimized(input: &str) -> Result<Report> {
    let doc = load_document(input)?;
    let field = doc.system.field().clone();
    let verdict = is_fq_minimized(&doc.system)?;
    Ok(if verdict.minimized {
        Report {
            text: "minimized (certified)".into(),
            json: json!({ "minimized": true, "certified": true }),
            code: 0,
        }
    } else {
        let w = verdict.witness.expect("non-minimized verdicts carry a witness");
        let combos: Vec<String> = w
            .combinations
            .iter()
            .map(|c| {
                let row: Vec<String> = c.iter().map(|x| field.fmt_element(x)).collect();
                row.join(" ")
            })
            .collect();
        let mut text = format!(
            "not minimized: {} independent combinations vanish on a {}-dimensional subspace",
            w.k,
            w.v.dim()
        );
        for c in &combos {
            let _ = write!(text, "\ncombination {c}");
        }
        let _ = write!(text, "\n{}", basis_lines(&field, &w.v).trim_end());
        Report {
            json: json!({
                "minimized": false,
                "k": w.k,
                "combinations": combos,
                "subspace_dim": w.v.dim(),
                "basis": json_basis(&field, &w.v),
            }),
            text,
            code: 1,
        }
    })
}

fn stop_reason_name(reason: &StopReason) -> &'static str {
    match reason {
        StopReason::Minimized => "minimized",
        StopReason::NoImprovingStep => "no-improving-step",
        StopReason::VerdictUnknown => "verdict-unknown",
        StopReason::IterationLimit => "iteration-limit",
    }
}

fn cmd_minimize(cli: &Cli, input: &str) -> Result<Report> {
    let doc = load_document(input)?;
    let max_iter = cli.limit.unwrap_or(64);
    let min = minimize_heuristic(&doc.system, max_iter)?;
    let model_doc = SystemDocument::new(vec![], doc.names.clone(), min.model.clone())?;
    let model_text = serialize_system(&model_doc);
    let mut text = format!(
        "converged={} steps={} reason={}",
        min.converged,
        min.log.len(),
        stop_reason_name(&min.reason)
    );
    if cli.trace {
        if let Some(norm) = &min.normalization {
            let _ = write!(text, "\n{}", transform_block("normalization", norm).trim_end());
        }
        for (i, step) in min.log.iter().enumerate() {
            let _ = write!(
                text,
                "\n{}",
                transform_block(&format!("step {}", i + 1), step).trim_end()
            );
        }
    }
    let _ = write!(text, "\nmodel:\n{}", model_text.trim_end());
    Ok(Report {
        json: json!({
            "converged": min.converged,
            "steps": min.log.len(),
            "reason": stop_reason_name(&min.reason),
            "normalization": min.normalization.as_ref().map(json_transform),
            "log": min.log.iter().map(json_transform).collect::<Vec<_>>(),
            "model": model_text,
        }),
        text,
        code: if min.converged { 0 } else { 1 },
    })
}

fn parse_point(field: &FieldDesc, spec: &str) -> Result<Vec<FieldElement>> {
    spec.split(',')
        .map(|t| {
            let v: i64 = t.trim().parse().map_err(|_| {
                Error::Io(format!("point coordinate {:?} is not an integer", t.trim()))
            })?;
            Ok(field.from_int(v))
        })
        .collect()
}

fn cmd_lift(cli: &Cli, input: &str, point: &str) -> Result<Report> {
    let doc = load_document(input)?;
    let field = doc.system.field().clone();
    let k = cli.precision.unwrap_or(field.precision());
    // the seed lives in the residue field
    let x0 = parse_point(&FieldDesc::prime(field.p())?, point)?;
    let lifted = lift_nonsingular(&doc.system, &x0, k)?;
    let text = format!(
        "lifted to precision {} in {} iterations (base-{} digits, most significant first)\n{}",
        lifted.precision,
        lifted.iterations,
        lifted.p,
        padic_lines(&lifted).trim_end()
    );
    Ok(Report {
        json: json!({
            "lifted": json_padic(&lifted),
            "iterations": lifted.iterations,
        }),
        text,
        code: 0,
    })
}

fn cmd_solve(cli: &Cli, input: &str) -> Result<Report> {
    let doc = load_document(input)?;
    let field = doc.system.field().clone();
    let k = cli.precision.unwrap_or(field.precision());
    let opts = SearchOptions { seed: cli.seed, ..SearchOptions::default() };
    Ok(match padic_solve(&doc.system, k, &opts)? {
        PadicSolve::Solved(sz) => {
            let mut text = format!(
                "solved: primitive zero mod {}^{} with residual valuation >= {} (base-{} digits, most significant first)\n{}",
                sz.zero.p,
                sz.zero.precision,
                sz.achieved,
                sz.zero.p,
                padic_lines(&sz.zero).trim_end()
            );
            let _ = write!(text, "\nmodel_minimized={}", sz.model_minimized);
            if cli.trace {
                if let Some(t) = &sz.transform {
                    let _ = write!(text, "\n{}", transform_block("model transform", t).trim_end());
                }
                let _ = write!(
                    text,
                    "\nmodel zero mod {}^{}\n{}",
                    sz.model_zero.p,
                    sz.model_zero.precision,
                    padic_lines(&sz.model_zero).trim_end()
                );
            }
            Report {
                json: json!({
                    "solved": true,
                    "achieved": sz.achieved,
                    "zero": json_padic(&sz.zero),
                    "model_minimized": sz.model_minimized,
                    "transform": sz.transform.as_ref().map(json_transform),
                }),
                text,
                code: 0,
            }
        }
        PadicSolve::NoNonsingularSeed { certified, attempts, model_minimized } => Report {
            text: format!(
                "no nonsingular residue seed (certified={certified}, attempts={attempts}, model_minimized={model_minimized})"
            ),
            json: json!({
                "solved": false,
                "certified": certified,
                "attempts": attempts,
                "model_minimized": model_minimized,
            }),
            code: 1,
        },
        PadicSolve::Unknown { attempts } => Report {
            text: format!("unknown: no seed found in {attempts} samples (inconclusive)"),
            json: json!({ "solved": false, "certified": false, "attempts": attempts }),
            code: 1,
        },
    })
}

fn cmd_isotropy(cli: &Cli, input: &str) -> Result<Report> {
    let doc = load_document(input)?;
    if doc.system.r() != 1 {
        return Err(Error::PreconditionViolated(format!(
            "isotropy reads a single form, the document has {}",
            doc.system.r()
        )));
    }
    let q = &doc.system.forms()[0];
    let report = is_isotropic_qp(q)?;
    let inv = &report.invariants;
    let diag: Vec<String> = inv.diagonal.iter().map(|d| d.to_string()).collect();
    let mut text = format!(
        "{}\ncriterion: {}\np={} rank={} diagonal=({}) discriminant={} hasse={}",
        if report.isotropic { "isotropic" } else { "anisotropic" },
        report.criterion,
        inv.p,
        inv.rank,
        diag.join(", "),
        inv.discriminant,
        inv.hasse
    );
    let mut zero_json = None;
    if report.isotropic && q.n() <= 6 {
        let k = cli.precision.unwrap_or(doc.system.field().precision());
        let opts = SearchOptions { seed: cli.seed, ..SearchOptions::default() };
        if let PadicSolve::Solved(sz) = padic_solve(&doc.system, k, &opts)? {
            let _ = write!(
                text,
                "\nexplicit zero mod {}^{} (base-{} digits, most significant first)\n{}",
                sz.zero.p,
                sz.zero.precision,
                sz.zero.p,
                padic_lines(&sz.zero).trim_end()
            );
            zero_json = Some(json_padic(&sz.zero));
        }
    }
    Ok(Report {
        json: json!({
            "isotropic": report.isotropic,
            "criterion": report.criterion,
            "invariants": {
                "p": inv.p,
                "rank": inv.rank,
                "diagonal": diag,
                "discriminant": inv.discriminant.to_string(),
                "hasse": inv.hasse,
            },
            "zero": zero_json,
        }),
        text,
        code: if report.isotropic { 0 } else { 1 },
    })
}

fn poly_string(field: &FieldDesc, coeffs: &[FieldElement]) -> String {
    let mut parts = Vec::new();
    for (e, c) in coeffs.iter().enumerate() {
        if field.is_zero(c) {
            continue;
        }
        let cs = field.fmt_element(c);
        parts.push(match (e, cs.as_str()) {
            (0, _) => cs,
            (1, "1") => "T".into(),
            (1, _) => format!("{cs}*T"),
            (_, "1") => format!("T^{e}"),
            (_, _) => format!("{cs}*T^{e}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn cmd_ffreduce(cli: &Cli, input: &str, degree: u32, solve: bool) -> Result<Report> {
    let doc = ffred::parse_ft_document(&read_input(input)?)?;
    let field = doc.field.clone();
    let n = doc.n;
    let mut text = String::new();
    let mut sections = Vec::new();
    let mut compiled_forms = Vec::new();
    let mut compiled_names = Vec::new();
    let mut first_reduction = None;
    for (name, form) in doc.names.iter().zip(&doc.forms) {
        let res = ffred::reduce_ft_form(form, degree)?;
        let threshold = ffred::ansatz_threshold(n, form.t_degree());
        let _ = writeln!(
            text,
            "form {name}: n={n} D={} d={degree} unknowns N={} compiled forms R={}",
            form.t_degree(),
            res.unknowns(),
            res.form_count()
        );
        let _ = writeln!(
            text,
            "  first d with N > 4R at this (n, D): {}",
            threshold.map_or("none".into(), |t| t.to_string())
        );
        sections.push(json!({
            "name": name,
            "n": n,
            "coefficient_degree": form.t_degree(),
            "ansatz_degree": degree,
            "unknowns": res.unknowns(),
            "compiled_forms": res.form_count(),
            "threshold": threshold,
        }));
        for (t, f) in res.system.forms().iter().enumerate() {
            compiled_forms.push(f.clone());
            compiled_names.push(format!("{name}_t{t}"));
        }
        if first_reduction.is_none() {
            first_reduction = Some(res);
        }
    }
    let res = first_reduction.ok_or_else(|| Error::DegenerateSystem("empty document".into()))?;
    let _ = writeln!(text, "index map (unknown = coefficient of T^e in a source variable):");
    for i in 0..n {
        for e in 0..=degree {
            let _ = writeln!(text, "  y{} = x{}[T^{e}]", res.unknown_index(i, e) + 1, i + 1);
        }
    }
    let combined = FormSystem::new(field.clone(), res.unknowns(), compiled_forms)?;
    let combined_doc = SystemDocument::new(vec![], compiled_names, combined.clone())?;
    let compiled_text = serialize_system(&combined_doc);
    let _ = write!(text, "compiled system:\n{}", compiled_text.trim_end());
    let mut solutions = Vec::new();
    let mut code = 0;
    if solve {
        let opts = EnumOptions {
            limit: Some(cli.limit.unwrap_or(5)),
            ..EnumOptions::default()
        };
        let scan = enumerate_common_zeros(&combined, &opts)?;
        let nontrivial = scan.count > 1;
        let _ = write!(text, "\ncompiled zeros: {}", scan.count);
        if !nontrivial {
            let _ = write!(text, " (trivial only)");
        }
        for rep in &scan.reports {
            if rep.point.iter().all(|c| field.is_zero(c)) {
                continue;
            }
            let polys = ffred::solution_to_polynomials(&res, &rep.point)?;
            let rendered: Vec<String> =
                polys.iter().map(|p| poly_string(&field, p)).collect();
            let _ = write!(text, "\nsolution: ({})", rendered.join(", "));
            solutions.push(rendered);
        }
        code = if nontrivial { 0 } else { 1 };
    }
    Ok(Report {
        json: json!({
            "forms": sections,
            "compiled": compiled_text,
            "solutions": solutions,
        }),
        text,
        code,
    })
}

fn cmd_bounds(cli: &Cli, r: Option<u64>, table: Option<u64>) -> Result<Report> {
    if let Some(r) = r {
        let lo = lower_bound(r)?;
        let up = upper_bound(r)?;
        let mut text = format!("{} <= beta({};Qp) <= {}", lo, r, up.value);
        if cli.trace {
            let _ = write!(text, "\n{}", up.render().trim_end());
            let _ = write!(text, "\n{}", lower_bound_derivation(r)?.render().trim_end());
            for a in annotations(r) {
                let _ = write!(text, "\nnote: {} {}", a.hypothesis, a.statement);
            }
        }
        return Ok(Report {
            json: json!({
                "r": r,
                "lower": lo,
                "upper": up.value,
                "rule": up.rule.tag(),
                "trace": if cli.trace { Some(up.render()) } else { None },
            }),
            text,
            code: 0,
        });
    }
    let r_max = table.ok_or_else(|| {
        Error::PreconditionViolated("bounds needs --r N or --table N".into())
    })?;
    let rows = bound_table(r_max)?;
    let mut text = String::from("r\tlower\tupper\trule\tcomparison");
    for row in &rows {
        let _ = write!(
            text,
            "\n{}\t{}\t{}\t{}\t{}",
            row.r, row.lower, row.upper, row.rule, row.comparison
        );
    }
    if cli.trace {
        for row in &rows {
            let _ = write!(text, "\n{}", upper_bound(row.r)?.render().trim_end());
        }
    }
    Ok(Report {
        json: json!({
            "rows": rows.iter().map(|row| json!({
                "r": row.r,
                "lower": row.lower,
                "upper": row.upper,
                "rule": row.rule,
                "comparison": row.comparison,
            })).collect::<Vec<_>>(),
        }),
        text,
        code: 0,
    })
}

fn cmd_verify_paper(cli: &Cli, filter: Option<&str>) -> Result<Report> {
    let outcomes = corpus::run_corpus(filter, !cli.no_cache, cli.seed);
    if outcomes.is_empty() {
        return Err(Error::PreconditionViolated(format!(
            "filter {:?} matched no corpus entries",
            filter.unwrap_or("")
        )));
    }
    let mut text = String::new();
    let mut passed = 0usize;
    for o in &outcomes {
        if o.pass {
            passed += 1;
            let _ = writeln!(
                text,
                "PASS {}{}",
                o.id,
                if o.cached { " (cached)" } else { "" }
            );
        } else {
            let _ = writeln!(text, "FAIL {}", o.id);
            let _ = writeln!(text, "  claim:    {}", o.anchor);
            let _ = writeln!(text, "  expected: {}", o.expected);
            let _ = writeln!(text, "  actual:   {}", o.actual);
        }
    }
    let _ = write!(text, "summary: {passed}/{} passed", outcomes.len());
    Ok(Report {
        json: json!({
            "entries": outcomes.iter().map(|o| json!({
                "id": o.id,
                "pass": o.pass,
                "cached": o.cached,
                "claim": o.anchor,
                "expected": o.expected,
                "actual": o.actual,
            })).collect::<Vec<_>>(),
            "passed": passed,
            "total": outcomes.len(),
        }),
        text,
        code: if passed == outcomes.len() { 0 } else { 1 },
    })
}
