//! Common zeros of form systems over finite domains.
//!
//! Exhaustive enumeration walks F_q^n (or (Z/p^k)^n) with incremental
//! form values: descending one coordinate costs an update from cached
//! linear parts instead of a fresh evaluation.  Three engines share one
//! zero sink: a bit-packed gray-code walk for F_2, a u64 engine for
//! residues and small extension fields (index tables), and a generic
//! engine for everything else.  The cap is 10^8 visited points; beyond
//! it only seeded sampling is available.
//!
//! A zero is singular when the Jacobian has rank < r.  Over Z/p^k the
//! Jacobian is classified mod p, which is the rank that decides whether
//! a zero lifts.  [`count_zeros_exact`] counts zeros of a single form
//! from its rank and type without any enumeration.

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement, FieldKind, MatrixF};
use crate::quadform::{FormSystem, QuadraticForm};
use num_bigint::BigUint;
use num_traits::Zero;

/// Cap on points visited by one exhaustive scan.
pub const MAX_ENUM_POINTS: u64 = 100_000_000;
/// Extension fields up to this order get index tables.
pub const MAX_TABLE_ORDER: u64 = 512;

/// A verified common zero together with its Jacobian classification.
#[derive(Debug, Clone)]
pub struct ZeroReport {
    pub point: Vec<FieldElement>,
    /// Per-form values at the point (all zero, re-checked on emission).
    pub values: Vec<FieldElement>,
    /// Rank of the Jacobian at the point; over Z/p^k the rank mod p.
    pub jacobian_rank: usize,
    /// jacobian_rank < r.
    pub singular: bool,
    /// Seed of the sampling run that produced this report, if any.
    pub seed: Option<u64>,
}

/// Options for [`enumerate_common_zeros`].
#[derive(Debug, Clone, Default)]
pub struct EnumOptions {
    /// Count zeros but collect no reports.
    pub count_only: bool,
    /// Collect reports only for nonsingular zeros.
    pub nonsingular_only: bool,
    /// Stop collecting reports after this many (counting continues).
    pub limit: Option<usize>,
    /// One representative per projective class (first nonzero
    /// coordinate normalized to 1); the origin is not visited.
    pub projective: bool,
    /// Fix the leading coordinates to these values and scan the rest.
    pub prefix: Vec<FieldElement>,
}

/// Outcome of an exhaustive scan.
#[derive(Debug, Clone)]
pub struct ZeroScan {
    /// Exact number of common zeros in the scanned range.
    pub count: u64,
    /// How many of them are nonsingular.
    pub nonsingular_count: u64,
    pub reports: Vec<ZeroReport>,
    /// True when `limit` stopped report collection early.
    pub truncated: bool,
}

/// Options for [`find_nonsingular_zero`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub seed: u64,
    /// Sampling attempts when the space is too large to scan.
    pub max_attempts: u64,
    /// Refuse to fall back to sampling (TooLarge instead).
    pub require_certified: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0,
            max_attempts: 20_000,
            require_certified: false,
        }
    }
}

/// Result of [`find_nonsingular_zero`].
#[derive(Debug, Clone)]
pub enum NonsingularSearch {
    Found(ZeroReport),
    /// `certified` is true only after an exhaustive scan.
    NotFound { certified: bool, attempts: u64 },
}

fn require_finite_domain(field: &FieldDesc) -> Result<()> {
    match field.kind() {
        FieldKind::Prime | FieldKind::Extension | FieldKind::ModPk => Ok(()),
        FieldKind::PadicRational => Err(Error::PreconditionViolated(
            "enumeration needs a finite coefficient domain".into(),
        )),
    }
}

/// The r x n matrix of formal partials ∂q_i/∂x_j at x.
pub fn jacobian_at(system: &FormSystem, x: &[FieldElement]) -> Result<MatrixF> {
    let rows = system
        .forms()
        .iter()
        .map(|q| q.gradient(x))
        .collect::<Result<Vec<_>>>()?;
    MatrixF::from_rows(system.field().clone(), rows)
}

/// Jacobian rank; for Z/p^k systems the rank of the reduction mod p.
fn jacobian_rank_at(
    system: &FormSystem,
    residue_system: Option<&FormSystem>,
    x: &[FieldElement],
) -> Result<usize> {
    match residue_system {
        None => jacobian_at(system, x)?.rank(),
        Some(rs) => {
            let fp = rs.field();
            let xr: Vec<FieldElement> = x
                .iter()
                .map(|v| match v {
                    FieldElement::Res(b) => fp.from_bigint(&b.clone().into()),
                    _ => unreachable!("Z/p^k points are residues"),
                })
                .collect();
            jacobian_at(rs, &xr)?.rank()
        }
    }
}

/// For Z/p^k systems, the companion system over F_p used to classify
/// Jacobians.
fn residue_companion(system: &FormSystem) -> Result<Option<FormSystem>> {
    if system.field().kind() != FieldKind::ModPk {
        return Ok(None);
    }
    let fp = FieldDesc::prime(system.field().p())?;
    let n = system.n();
    let forms = system
        .forms()
        .iter()
        .map(|q| {
            let mut out = QuadraticForm::zero(fp.clone(), n);
            for (i, j, c) in q.terms() {
                if let FieldElement::Res(b) = c {
                    out.set_coeff(i, j, fp.from_bigint(&b.clone().into()));
                }
            }
            out
        })
        .collect();
    Ok(Some(FormSystem::new(fp, n, forms)?))
}

struct Sink<'a> {
    system: &'a FormSystem,
    residue_system: Option<FormSystem>,
    opts: &'a EnumOptions,
    count: u64,
    nonsingular_count: u64,
    reports: Vec<ZeroReport>,
    truncated: bool,
    stop_on_nonsingular: bool,
}

impl<'a> Sink<'a> {
    fn new(system: &'a FormSystem, opts: &'a EnumOptions, stop_on_nonsingular: bool) -> Result<Self> {
        Ok(Sink {
            system,
            residue_system: residue_companion(system)?,
            opts,
            count: 0,
            nonsingular_count: 0,
            reports: Vec::new(),
            truncated: false,
            stop_on_nonsingular,
        })
    }

    /// Processes one common zero; returns false to stop the scan.
    fn accept(&mut self, point: Vec<FieldElement>) -> Result<bool> {
        self.count += 1;
        let rank = jacobian_rank_at(self.system, self.residue_system.as_ref(), &point)?;
        let singular = rank < self.system.r();
        if !singular {
            self.nonsingular_count += 1;
        }
        let wanted = !self.opts.count_only && (!self.opts.nonsingular_only || !singular);
        if wanted {
            if self.opts.limit.map_or(true, |l| self.reports.len() < l) {
                let values = self.system.evaluate_all(&point)?;
                let f = self.system.field();
                if values.iter().any(|v| !f.is_zero(v)) {
                    return Err(Error::PreconditionViolated(
                        "zero sink given a non-zero (engine bug)".into(),
                    ));
                }
                self.reports.push(ZeroReport {
                    point,
                    values,
                    jacobian_rank: rank,
                    singular,
                    seed: None,
                });
            } else {
                self.truncated = true;
            }
        }
        if self.stop_on_nonsingular && !singular {
            return Ok(false);
        }
        Ok(true)
    }

    fn into_scan(self) -> ZeroScan {
        ZeroScan {
            count: self.count,
            nonsingular_count: self.nonsingular_count,
            reports: self.reports,
            truncated: self.truncated,
        }
    }
}

// ---------------------------------------------------------------------
// Engines

enum Arith {
    /// Residues mod m (m^2 must fit in u64).
    Mod(u64),
    /// Index tables for small extension fields.
    Table { q: u64, add: Vec<u16>, mul: Vec<u16> },
}

impl Arith {
    fn size(&self) -> u64 {
        match self {
            Arith::Mod(m) => *m,
            Arith::Table { q, .. } => *q,
        }
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            Arith::Mod(m) => {
                let s = a + b;
                if s >= *m {
                    s - m
                } else {
                    s
                }
            }
            Arith::Table { q, add, .. } => add[(a * q + b) as usize] as u64,
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            Arith::Mod(m) => a * b % m,
            Arith::Table { q, mul, .. } => mul[(a * q + b) as usize] as u64,
        }
    }
}

fn build_arith(field: &FieldDesc) -> Option<Arith> {
    match field.kind() {
        FieldKind::Prime | FieldKind::ModPk => {
            let m = field.order()?;
            if m < (1u64 << 31) {
                Some(Arith::Mod(m))
            } else {
                None
            }
        }
        FieldKind::Extension => {
            let q = field.order()?;
            if q > MAX_TABLE_ORDER {
                return None;
            }
            let mut add = vec![0u16; (q * q) as usize];
            let mut mul = vec![0u16; (q * q) as usize];
            let elems: Vec<FieldElement> =
                (0..q).map(|i| field.element_from_index(i)).collect();
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] =
                        field.element_index(&field.add(&elems[a as usize], &elems[b as usize])) as u16;
                    mul[(a * q + b) as usize] =
                        field.element_index(&field.mul(&elems[a as usize], &elems[b as usize])) as u16;
                }
            }
            Some(Arith::Table { q, add, mul })
        }
        FieldKind::PadicRational => None,
    }
}

/// u64 engine: incremental values plus cached linear parts, with an
/// undo stack so each descent touches O(n r) state.
struct IdxEngine<'a> {
    arith: &'a Arith,
    n: usize,
    r: usize,
    /// coeff[f][i][j] for i <= j.
    coeff: Vec<Vec<Vec<u64>>>,
    x: Vec<u64>,
    /// val[f]: value of form f at (x_0..x_{d-1}, 0..0).
    val: Vec<u64>,
    /// lin[f][j]: sum over assigned i < j of c[f][i][j] x_i.
    lin: Vec<Vec<u64>>,
}

impl<'a> IdxEngine<'a> {
    fn new(arith: &'a Arith, field: &FieldDesc, system: &FormSystem) -> Self {
        let n = system.n();
        let r = system.r();
        let coeff = system
            .forms()
            .iter()
            .map(|q| {
                (0..n)
                    .map(|i| (i..n).map(|j| field.element_index(q.coeff(i, j))).collect())
                    .collect()
            })
            .collect();
        IdxEngine {
            arith,
            n,
            r,
            coeff,
            x: vec![0; n],
            val: vec![0; r],
            lin: vec![vec![0; n]; r],
        }
    }

    #[inline]
    fn c(&self, f: usize, i: usize, j: usize) -> u64 {
        self.coeff[f][i][j - i]
    }
}

fn scan_index(
    arith: &Arith,
    field: &FieldDesc,
    system: &FormSystem,
    start_assign: &[u64],
    sink: &mut Sink,
) -> Result<bool> {
    let mut eng = IdxEngine::new(arith, field, system);
    let n = eng.n;
    // Depth-first walk; each descent snapshots the form values and the
    // lin segments it can touch (O(n r) per depth, n depths live).
    struct Frame {
        val: Vec<u64>,
        lin_tail: Vec<Vec<u64>>, // lin[f][d+1..] before descent
    }
    let q = arith.size();
    let mut frames: Vec<Frame> = Vec::with_capacity(n + 1);

    // Pre-assign fixed coordinates (prefix or projective lead-in).
    let fixed = start_assign.len();
    for (d, &v) in start_assign.iter().enumerate() {
        descend_simple(&mut eng, d, v);
    }

    // Iterative DFS over the remaining coordinates.
    let mut depth = fixed;
    let mut next_choice: Vec<u64> = vec![0; n + 1];
    loop {
        if depth == n {
            if eng.val.iter().all(|&v| v == 0) {
                let point: Vec<FieldElement> = eng
                    .x
                    .iter()
                    .map(|&v| field.element_from_index(v))
                    .collect();
                if !sink.accept(point)? {
                    return Ok(false);
                }
            }
            // Backtrack to the deepest depth with values left to try.
            loop {
                if depth == fixed {
                    return Ok(true);
                }
                depth -= 1;
                let frame = frames.pop().unwrap();
                eng.val = frame.val;
                for f in 0..eng.r {
                    eng.lin[f][depth + 1..].clone_from_slice(&frame.lin_tail[f]);
                }
                if next_choice[depth] < q {
                    break;
                }
            }
        }
        let v = next_choice[depth];
        next_choice[depth] += 1;
        frames.push(Frame {
            val: eng.val.clone(),
            lin_tail: (0..eng.r).map(|f| eng.lin[f][depth + 1..].to_vec()).collect(),
        });
        descend_simple(&mut eng, depth, v);
        depth += 1;
        next_choice[depth] = 0;
    }
}

fn descend_simple(eng: &mut IdxEngine, d: usize, v: u64) {
    eng.x[d] = v;
    for f in 0..eng.r {
        let vv = eng.arith.mul(v, v);
        let mut nv = eng.arith.add(eng.val[f], eng.arith.mul(v, eng.lin[f][d]));
        nv = eng.arith.add(nv, eng.arith.mul(vv, eng.c(f, d, d)));
        eng.val[f] = nv;
        if v != 0 {
            for j in (d + 1)..eng.n {
                let cij = eng.c(f, d, j);
                if cij != 0 {
                    eng.lin[f][j] = eng.arith.add(eng.lin[f][j], eng.arith.mul(v, cij));
                }
            }
        }
    }
}

/// Gray-code engine over F_2 with bit-packed forms: flipping bit b
/// changes q(x) by q(e_b) + b(e_b, x).
fn scan_gray(system: &FormSystem, sink: &mut Sink) -> Result<bool> {
    let f2 = system.field().clone();
    let n = system.n();
    let packed: Vec<crate::field::f2::F2Form> = system
        .forms()
        .iter()
        .map(|q| q.to_f2().expect("F_2 system with n <= 64"))
        .collect();
    let r = packed.len();
    let mut x: u64 = 0;
    let mut val: u64 = 0; // bit f = current value of form f
    let diag: Vec<u64> = packed
        .iter()
        .map(|p| {
            let mut d = 0u64;
            for (i, row) in p.rows().iter().enumerate() {
                d |= ((row >> i) & 1) << i;
            }
            d
        })
        .collect();
    let emit = |x: u64, sink: &mut Sink| -> Result<bool> {
        let point: Vec<FieldElement> = (0..n)
            .map(|i| f2.from_int(((x >> i) & 1) as i64))
            .collect();
        sink.accept(point)
    };
    if !emit(0, sink)? {
        return Ok(false);
    }
    let total: u64 = 1 << n;
    for k in 1..total {
        let b = k.trailing_zeros() as usize;
        for f in 0..r {
            let flip = ((diag[f] >> b) & 1) ^ (packed[f].bilinear(1 << b, x) as u64);
            val ^= flip << f;
        }
        x ^= 1 << b;
        if val == 0 && !emit(x, sink)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generic engine: FieldElement arithmetic, plain recursion.
fn scan_generic(
    system: &FormSystem,
    start_assign: &[FieldElement],
    domain: u64,
    sink: &mut Sink,
) -> Result<bool> {
    let field = system.field().clone();
    let n = system.n();
    let mut x: Vec<FieldElement> = vec![field.zero(); n];
    x[..start_assign.len()].clone_from_slice(start_assign);
    fn rec(
        system: &FormSystem,
        field: &FieldDesc,
        q: u64,
        x: &mut Vec<FieldElement>,
        d: usize,
        sink: &mut Sink,
    ) -> Result<bool> {
        let n = system.n();
        if d == n {
            if system.is_zero_at(x)? && !sink.accept(x.clone())? {
                return Ok(false);
            }
            return Ok(true);
        }
        for idx in 0..q {
            x[d] = field.element_from_index(idx);
            if !rec(system, field, q, x, d + 1, sink)? {
                return Ok(false);
            }
        }
        x[d] = field.zero();
        Ok(true)
    }
    rec(system, &field, domain, &mut x, start_assign.len(), sink)
}

/// Size of the coefficient domain as an enumeration range.
fn domain_size(field: &FieldDesc) -> Result<u64> {
    field.order().ok_or_else(|| {
        Error::TooLarge("coefficient domain larger than 2^64".into())
    })
}

fn points_to_scan(q: u64, free: usize, projective: bool) -> BigUint {
    let qb = BigUint::from(q);
    if projective {
        let mut total = BigUint::zero();
        for i in 0..free {
            total += qb.pow((free - 1 - i) as u32);
        }
        total
    } else {
        qb.pow(free as u32)
    }
}

/// Exhaustively scans for common zeros.
pub fn enumerate_common_zeros(system: &FormSystem, opts: &EnumOptions) -> Result<ZeroScan> {
    let mut sink = Sink::new(system, opts, false)?;
    run_scan(system, opts, &mut sink)?;
    Ok(sink.into_scan())
}

fn run_scan(system: &FormSystem, opts: &EnumOptions, sink: &mut Sink) -> Result<()> {
    let field = system.field();
    require_finite_domain(field)?;
    let n = system.n();
    if opts.prefix.len() > n {
        return Err(Error::DimensionMismatch("prefix longer than n".into()));
    }
    if opts.projective && !opts.prefix.is_empty() {
        return Err(Error::PreconditionViolated(
            "projective mode does not combine with a prefix".into(),
        ));
    }
    for v in &opts.prefix {
        field.check_element(v)?;
    }
    let q = domain_size(field)?;
    let free = n - opts.prefix.len();
    let points = points_to_scan(q, free, opts.projective);
    if points > BigUint::from(MAX_ENUM_POINTS) {
        return Err(Error::TooLarge(format!(
            "scan of {points} points exceeds the cap of {MAX_ENUM_POINTS}"
        )));
    }
    let arith = build_arith(field);
    if opts.projective {
        // Leading coordinate 1 at position i, zeros before it.
        for i in 0..n {
            let mut assign: Vec<FieldElement> = vec![field.zero(); i];
            assign.push(field.one());
            let more = match &arith {
                Some(a) => {
                    let idx: Vec<u64> = assign.iter().map(|e| field.element_index(e)).collect();
                    scan_index(a, field, system, &idx, sink)?
                }
                None => scan_generic(system, &assign, q, sink)?,
            };
            if !more {
                return Ok(());
            }
        }
        return Ok(());
    }
    if field.kind() == FieldKind::Prime && field.p() == 2 && n <= 64 && opts.prefix.is_empty() {
        scan_gray(system, sink)?;
        return Ok(());
    }
    match &arith {
        Some(a) => {
            let idx: Vec<u64> = opts.prefix.iter().map(|e| field.element_index(e)).collect();
            scan_index(a, field, system, &idx, sink)?;
        }
        None => {
            scan_generic(system, &opts.prefix, q, sink)?;
        }
    }
    Ok(())
}

/// Finds a nonsingular common zero, exhaustively when the space fits
/// under the cap, by seeded sampling otherwise.
pub fn find_nonsingular_zero(
    system: &FormSystem,
    opts: &SearchOptions,
) -> Result<NonsingularSearch> {
    let field = system.field();
    require_finite_domain(field)?;
    let n = system.n();
    let exhaustible = match field.order() {
        Some(q) => BigUint::from(q).pow(n as u32) <= BigUint::from(MAX_ENUM_POINTS),
        None => false,
    };
    if exhaustible {
        let enum_opts = EnumOptions {
            nonsingular_only: true,
            limit: Some(1),
            ..EnumOptions::default()
        };
        let mut sink = Sink::new(system, &enum_opts, true)?;
        run_scan(system, &enum_opts, &mut sink)?;
        let scan = sink.into_scan();
        return Ok(match scan.reports.into_iter().next() {
            Some(rep) => NonsingularSearch::Found(rep),
            None => NonsingularSearch::NotFound {
                certified: true,
                attempts: 0,
            },
        });
    }
    if opts.require_certified {
        return Err(Error::TooLarge(format!(
            "certified search needs q^n <= {MAX_ENUM_POINTS}"
        )));
    }
    let residue_system = residue_companion(system)?;
    let mut rng = crate::seeded_rng(opts.seed);
    for attempt in 0..opts.max_attempts {
        let point: Vec<FieldElement> = (0..n).map(|_| field.random_element(&mut rng)).collect();
        if !system.is_zero_at(&point)? {
            continue;
        }
        let rank = jacobian_rank_at(system, residue_system.as_ref(), &point)?;
        if rank == system.r() {
            let values = system.evaluate_all(&point)?;
            return Ok(NonsingularSearch::Found(ZeroReport {
                point,
                values,
                jacobian_rank: rank,
                singular: false,
                seed: Some(opts.seed),
            }));
        }
        let _ = attempt;
    }
    Ok(NonsingularSearch::NotFound {
        certified: false,
        attempts: opts.max_attempts,
    })
}

/// Chevalley–Warning diagnostic over a prime field: total zero count
/// and whether it is divisible by p.  Needs n > 2r; when that holds the
/// count is ≡ 0 mod p and at least p, so a nontrivial zero exists.
pub fn chevalley_warning_check(system: &FormSystem) -> Result<(u64, bool)> {
    let field = system.field();
    if field.kind() != FieldKind::Prime {
        return Err(Error::PreconditionViolated(
            "Chevalley-Warning check runs over prime fields".into(),
        ));
    }
    if system.n() <= 2 * system.r() {
        return Err(Error::PreconditionViolated(format!(
            "not applicable: n = {} <= 2r = {}",
            system.n(),
            2 * system.r()
        )));
    }
    let scan = enumerate_common_zeros(
        system,
        &EnumOptions {
            count_only: true,
            ..EnumOptions::default()
        },
    )?;
    Ok((scan.count, scan.count % field.p() == 0))
}

// ---------------------------------------------------------------------
// Exact counts for a single form

/// Exact number of zeros of one form in F_q^n, from rank and type:
/// q^(n-m) zeros of the nondegenerate part times the radical, where the
/// nondegenerate part of rank m has q^(m-1) zeros for odd m, and
/// q^(m-1) + eps (q^s - q^(s-1)) for m = 2s, eps = +1 for the
/// hyperbolic type and -1 otherwise.
pub fn count_zeros_exact(q: &QuadraticForm) -> Result<BigUint> {
    let field = q.field();
    if !matches!(field.kind(), FieldKind::Prime | FieldKind::Extension) {
        return Err(Error::PreconditionViolated(
            "exact counting runs over finite fields".into(),
        ));
    }
    let size = BigUint::from(field.order().expect("finite field"));
    let n = q.n();
    let red = q.reduce_effective_variables()?;
    let m = red.effective;
    let radical_factor = size.pow((n - m) as u32);
    if m == 0 {
        return Ok(radical_factor);
    }
    let nd = &red.reduced;
    let count_nd = if m % 2 == 1 {
        size.pow((m - 1) as u32)
    } else {
        let s = m / 2;
        let eps = if field.characteristic() == 2 {
            if arf_trace(nd)? {
                -1
            } else {
                1
            }
        } else {
            discriminant_class(nd)?
        };
        let base = size.pow((m - 1) as u32);
        let swing = size.pow(s as u32) - size.pow((s - 1) as u32);
        if eps > 0 {
            base + swing
        } else {
            base - swing
        }
    };
    Ok(radical_factor * count_nd)
}

/// Rank decomposition of a single form over a finite field: the
/// maximal totally singular subspace has dimension radical_dim +
/// witt_index, with witt_index s for odd rank 2s+1 and s or s-1 for
/// even rank 2s depending on the type eps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticType {
    pub radical_dim: usize,
    pub rank: usize,
    pub witt_index: usize,
    /// +1 hyperbolic, -1 elliptic; None for odd rank.
    pub eps: Option<i32>,
}

pub fn quadratic_type(q: &QuadraticForm) -> Result<QuadraticType> {
    let field = q.field();
    if !matches!(field.kind(), FieldKind::Prime | FieldKind::Extension) {
        return Err(Error::PreconditionViolated(
            "type classification runs over finite fields".into(),
        ));
    }
    let red = q.reduce_effective_variables()?;
    let m = red.effective;
    let radical_dim = q.n() - m;
    if m == 0 {
        return Ok(QuadraticType {
            radical_dim,
            rank: 0,
            witt_index: 0,
            eps: None,
        });
    }
    let s = m / 2;
    if m % 2 == 1 {
        return Ok(QuadraticType {
            radical_dim,
            rank: m,
            witt_index: s,
            eps: None,
        });
    }
    let eps = if field.characteristic() == 2 {
        if arf_trace(&red.reduced)? {
            -1
        } else {
            1
        }
    } else {
        discriminant_class(&red.reduced)?
    };
    Ok(QuadraticType {
        radical_dim,
        rank: m,
        witt_index: if eps > 0 { s } else { s - 1 },
        eps: Some(eps),
    })
}

/// Odd characteristic, even rank m = 2s: +1 when (-1)^s det(B/2) is a
/// square, -1 otherwise.
fn discriminant_class(nd: &QuadraticForm) -> Result<i32> {
    let field = nd.field();
    let m = nd.n();
    let s = m / 2;
    let det = nd.bilinear_gram().det()?;
    // det(B) = 2^m det(A); dividing by 2^m and multiplying by (-1)^s
    // keeps the square class decision exact.
    let two_m = field.pow(&field.from_int(2), m as u64);
    let a_det = field.div(&det, &two_m)?;
    let signed = if s % 2 == 1 {
        field.neg(&a_det)
    } else {
        a_det
    };
    let chi = field.quadratic_character(&signed);
    debug_assert!(chi != 0, "nondegenerate part has nonzero determinant");
    Ok(chi)
}

/// Characteristic 2, even rank: the F_2-trace of the Arf element
/// sum q(u_i) q(v_i) over a symplectic basis; true means trace 1
/// (the non-hyperbolic type).
fn arf_trace(nd: &QuadraticForm) -> Result<bool> {
    let field = nd.field().clone();
    let m = nd.n();
    let mut basis: Vec<Vec<FieldElement>> = (0..m)
        .map(|i| {
            let mut e = vec![field.zero(); m];
            e[i] = field.one();
            e
        })
        .collect();
    let mut arf = field.zero();
    while !basis.is_empty() {
        let u = basis.remove(0);
        let j = basis
            .iter()
            .position(|w| !field.is_zero(&nd.bilinear(&u, w).unwrap()))
            .ok_or_else(|| {
                Error::PreconditionViolated("degenerate form in symplectic split".into())
            })?;
        let mut v = basis.remove(j);
        let scale = field.inverse(&nd.bilinear(&u, &v)?)?;
        for c in v.iter_mut() {
            *c = field.mul(c, &scale);
        }
        for w in basis.iter_mut() {
            let a = nd.bilinear(w, &v)?; // coefficient of u
            let b = nd.bilinear(w, &u)?; // coefficient of v
            for k in 0..m {
                let mut adj = field.mul(&a, &u[k]);
                adj = field.add(&adj, &field.mul(&b, &v[k]));
                w[k] = field.add(&w[k], &adj);
            }
        }
        let qu = nd.evaluate(&u)?;
        let qv = nd.evaluate(&v)?;
        arf = field.add(&arf, &field.mul(&qu, &qv));
    }
    Ok(field.trace_to_f2(&arf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn f(p: u64) -> FieldDesc {
        FieldDesc::prime(p).unwrap()
    }

    fn fe(field: &FieldDesc, vals: &[i64]) -> Vec<FieldElement> {
        vals.iter().map(|&v| field.from_int(v)).collect()
    }

    fn single(field: FieldDesc, n: usize, terms: &[(usize, usize, i64)]) -> FormSystem {
        let q = QuadraticForm::from_terms(field.clone(), n, terms).unwrap();
        FormSystem::new(field, n, vec![q]).unwrap()
    }

    fn f2_triple() -> FormSystem {
        let field = f(2);
        let q1 = QuadraticForm::from_terms(field.clone(), 13, &[(0, 1, 1), (2, 2, 1), (2, 3, 1), (3, 3, 1)]).unwrap();
        let q2 = QuadraticForm::from_terms(field.clone(), 13, &[(4, 5, 1), (6, 6, 1), (6, 7, 1), (7, 7, 1)]).unwrap();
        let q3 = QuadraticForm::from_terms(
            field.clone(),
            13,
            &[(0, 0, 1), (0, 1, 1), (1, 1, 1), (4, 6, 1), (5, 7, 1), (6, 6, 1), (7, 7, 1)],
        )
        .unwrap();
        FormSystem::new(field, 13, vec![q1, q2, q3]).unwrap()
    }

    #[test]
    fn jacobian_examples() {
        let field = f(2);
        let s = single(field.clone(), 4, &[(0, 1, 1), (2, 2, 1), (2, 3, 1), (3, 3, 1)]);
        let j = jacobian_at(&s, &fe(&field, &[0, 0, 0, 0])).unwrap();
        assert!((0..4).all(|c| field.is_zero(j.get(0, c))));
        let j = jacobian_at(&s, &fe(&field, &[1, 1, 0, 0])).unwrap();
        let row: Vec<_> = (0..4).map(|c| field.element_index(j.get(0, c))).collect();
        assert_eq!(row, vec![1, 1, 0, 0]);

        let f3 = f(3);
        let s = single(f3.clone(), 2, &[(0, 0, 1)]);
        let j = jacobian_at(&s, &fe(&f3, &[1, 0])).unwrap();
        assert_eq!(
            (0..2).map(|c| f3.element_index(j.get(0, c))).collect::<Vec<_>>(),
            vec![2, 0]
        );
    }

    #[test]
    fn six_zeros_of_the_norm_plus_hyperbolic_form() {
        let s = single(f(2), 4, &[(0, 1, 1), (2, 2, 1), (2, 3, 1), (3, 3, 1)]);
        let scan = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
        assert_eq!(scan.count, 6);
        assert_eq!(scan.reports.len(), 6);
        for rep in &scan.reports {
            assert_eq!(rep.singular, rep.jacobian_rank < 1);
        }
        // The origin is singular; (1,1,0,1) is not.
        assert!(scan.reports.iter().any(|r| !r.singular));
    }

    #[test]
    fn zero_system_counts_the_whole_space() {
        let field = f(3);
        let q = QuadraticForm::zero(field.clone(), 3);
        let s = FormSystem::new(field, 3, vec![q]).unwrap();
        let scan = enumerate_common_zeros(
            &s,
            &EnumOptions {
                count_only: true,
                ..EnumOptions::default()
            },
        )
        .unwrap();
        assert_eq!(scan.count, 27);
        assert!(scan.reports.is_empty());
    }

    #[test]
    fn triple_system_zeros_are_all_singular() {
        let s = f2_triple();
        let scan = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
        assert!(scan.count > 0);
        assert!(scan.reports.iter().all(|r| r.singular));
        assert_eq!(scan.nonsingular_count, 0);
        match find_nonsingular_zero(&s, &SearchOptions::default()).unwrap() {
            NonsingularSearch::NotFound { certified, .. } => assert!(certified),
            other => panic!("expected certified NotFound, got {other:?}"),
        }
    }

    #[test]
    fn nonsingular_zero_found_in_five_variables() {
        let f3 = f(3);
        let s = single(f3.clone(), 5, &[(0, 0, 1), (1, 1, 1), (2, 3, 1)]);
        match find_nonsingular_zero(&s, &SearchOptions::default()).unwrap() {
            NonsingularSearch::Found(rep) => {
                assert!(!rep.singular);
                assert!(s.is_zero_at(&rep.point).unwrap());
            }
            other => panic!("expected Found, got {other:?}"),
        }
        // Hand-checked witness: (1,1,1,1,0) has value 1+1+1 = 0 and
        // gradient (2,2,1,1,0).
        let x = fe(&f3, &[1, 1, 1, 1, 0]);
        assert!(s.is_zero_at(&x).unwrap());
        assert_eq!(jacobian_at(&s, &x).unwrap().rank().unwrap(), 1);
    }

    #[test]
    fn zero_system_has_no_nonsingular_zero() {
        let field = f(2);
        let q = QuadraticForm::zero(field.clone(), 3);
        let s = FormSystem::new(field, 3, vec![q]).unwrap();
        match find_nonsingular_zero(&s, &SearchOptions::default()).unwrap() {
            NonsingularSearch::NotFound { certified, .. } => assert!(certified),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chevalley_warning_examples() {
        let field = f(2);
        let z = QuadraticForm::zero(field.clone(), 3);
        let s = FormSystem::new(field, 3, vec![z]).unwrap();
        assert_eq!(chevalley_warning_check(&s).unwrap(), (8, true));

        let s = single(f(3), 3, &[(0, 1, 1), (2, 2, 1)]);
        let (count, congruent) = chevalley_warning_check(&s).unwrap();
        assert!(congruent && count > 1 && count % 3 == 0);

        let (count, congruent) = chevalley_warning_check(&f2_triple()).unwrap();
        assert!(congruent && count % 2 == 0 && count > 1);

        // n <= 2r is not applicable.
        let s = single(f(3), 2, &[(0, 1, 1)]);
        assert!(matches!(
            chevalley_warning_check(&s),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn exact_count_examples() {
        let field = f(5);
        let z = QuadraticForm::zero(field.clone(), 3);
        assert_eq!(count_zeros_exact(&z).unwrap(), BigUint::from(125u32));

        for p in [2u64, 3, 5, 7] {
            let field = f(p);
            let q = QuadraticForm::from_terms(field, 2, &[(0, 1, 1)]).unwrap();
            assert_eq!(count_zeros_exact(&q).unwrap(), BigUint::from(2 * p - 1));
        }

        let q = QuadraticForm::from_terms(f(2), 4, &[(0, 1, 1), (2, 2, 1), (2, 3, 1), (3, 3, 1)]).unwrap();
        assert_eq!(count_zeros_exact(&q).unwrap(), BigUint::from(6u32));
    }

    fn random_form(field: &FieldDesc, n: usize, rng: &mut impl Rng) -> QuadraticForm {
        let q = field.order().unwrap();
        let mut form = QuadraticForm::zero(field.clone(), n);
        for i in 0..n {
            for j in i..n {
                form.set_coeff(i, j, field.element_from_index(rng.gen_range(0..q)));
            }
        }
        form
    }

    #[test]
    fn exact_count_matches_enumeration_for_all_small_forms() {
        for p in [2u64, 3] {
            let field = f(p);
            for n in 1..=3usize {
                let slots = n * (n + 1) / 2;
                let total = (p as u64).pow(slots as u32);
                for idx in 0..total {
                    let mut t = idx;
                    let mut form = QuadraticForm::zero(field.clone(), n);
                    for i in 0..n {
                        for j in i..n {
                            form.set_coeff(i, j, field.element_from_index(t % p));
                            t /= p;
                        }
                    }
                    let s = FormSystem::new(field.clone(), n, vec![form.clone()]).unwrap();
                    let scan = enumerate_common_zeros(
                        &s,
                        &EnumOptions {
                            count_only: true,
                            ..EnumOptions::default()
                        },
                    )
                    .unwrap();
                    assert_eq!(
                        count_zeros_exact(&form).unwrap(),
                        BigUint::from(scan.count),
                        "p={p} n={n} form={form:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_count_matches_enumeration_on_random_forms() {
        let mut rng = crate::seeded_rng(404);
        let f4 = FieldDesc::extension(2, &[1, 1, 1]).unwrap();
        let f5 = f(5);
        let f2 = f(2);
        let f3 = f(3);
        let cases: [(&FieldDesc, usize, usize); 4] =
            [(&f4, 5, 200), (&f5, 5, 200), (&f2, 4, 250), (&f3, 4, 250)];
        for (field, max_n, reps) in cases {
            for _ in 0..reps {
                let n = rng.gen_range(1..=max_n);
                let form = random_form(field, n, &mut rng);
                let s = FormSystem::new(field.clone(), n, vec![form.clone()]).unwrap();
                let scan = enumerate_common_zeros(
                    &s,
                    &EnumOptions {
                        count_only: true,
                        ..EnumOptions::default()
                    },
                )
                .unwrap();
                assert_eq!(
                    count_zeros_exact(&form).unwrap(),
                    BigUint::from(scan.count),
                    "{field:?} {form:?}"
                );
            }
        }
    }

    #[test]
    fn counts_respect_chevalley_on_random_systems() {
        let mut rng = crate::seeded_rng(808);
        for p in [2u64, 3, 5] {
            let field = f(p);
            for _ in 0..40 {
                let r = rng.gen_range(1..3usize);
                let min_n = 2 * r + 1;
                let mut n = min_n;
                while (p as u128).pow((n + 1) as u32) <= 100_000 && rng.gen_bool(0.5) {
                    n += 1;
                }
                if (p as u128).pow(n as u32) > 100_000 {
                    continue;
                }
                let forms: Vec<QuadraticForm> =
                    (0..r).map(|_| random_form(&field, n, &mut rng)).collect();
                let s = FormSystem::new(field.clone(), n, forms).unwrap();
                let (count, congruent) = chevalley_warning_check(&s).unwrap();
                assert!(congruent, "p={p} n={n} r={r} count={count}");
            }
        }
    }

    #[test]
    fn zero_census_is_invariant_under_invertible_changes() {
        let mut rng = crate::seeded_rng(112);
        let mut done = 0;
        while done < 50 {
            let p = [2u64, 3][rng.gen_range(0..2)];
            let field = f(p);
            let n = rng.gen_range(2..5usize);
            let r = rng.gen_range(1..3usize);
            let forms: Vec<QuadraticForm> = (0..r).map(|_| random_form(&field, n, &mut rng)).collect();
            let s = FormSystem::new(field.clone(), n, forms).unwrap();
            let mut m = MatrixF::zero(field.clone(), n, n);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, field.element_from_index(rng.gen_range(0..p)));
                }
            }
            if field.is_zero(&m.det().unwrap()) {
                continue;
            }
            done += 1;
            let changed = s.apply_variable_change(&m).unwrap();
            let a = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
            let b = enumerate_common_zeros(&changed, &EnumOptions::default()).unwrap();
            assert_eq!(a.count, b.count);
            assert_eq!(a.nonsingular_count, b.nonsingular_count);
        }
    }

    #[test]
    fn prefix_partitions_merge_to_the_full_count() {
        let field = f(3);
        let s = single(field.clone(), 4, &[(0, 0, 1), (1, 2, 1), (3, 3, 2)]);
        let full = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
        let mut total = 0;
        let mut nonsingular = 0;
        for v in 0..3 {
            let part = enumerate_common_zeros(
                &s,
                &EnumOptions {
                    prefix: vec![field.from_int(v)],
                    ..EnumOptions::default()
                },
            )
            .unwrap();
            total += part.count;
            nonsingular += part.nonsingular_count;
        }
        assert_eq!(total, full.count);
        assert_eq!(nonsingular, full.nonsingular_count);
    }

    #[test]
    fn projective_enumeration_counts_classes() {
        // x1x2 over F_3: affine zeros 2q-1 = 5, so (5-1)/(3-1) = 2
        // projective classes.
        let field = f(3);
        let s = single(field.clone(), 2, &[(0, 1, 1)]);
        let scan = enumerate_common_zeros(
            &s,
            &EnumOptions {
                projective: true,
                ..EnumOptions::default()
            },
        )
        .unwrap();
        assert_eq!(scan.count, 2);
        for rep in &scan.reports {
            let first = rep.point.iter().find(|e| !field.is_zero(e)).unwrap();
            assert_eq!(field.element_index(first), 1);
        }
    }

    #[test]
    fn modpk_zeros_classify_against_the_residue_field() {
        // x1^2 + x2^2 over Z/9: zeros include (0,0) (singular) and
        // e.g. (3,0) maps to residue (0,0): all zeros here are singular
        // because the gradient (2a, 2b) mod 3 vanishes iff 3 | a,b, and
        // nonsingular otherwise; (a,b) nonzero mod 3 with a^2+b^2 ≡ 0
        // mod 9 needs a^2+b^2 ≡ 0 mod 3 first: only (0,0) mod 3.
        let field = FieldDesc::mod_pk(3, 2).unwrap();
        let s = single(field.clone(), 2, &[(0, 0, 1), (1, 1, 1)]);
        let scan = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
        assert!(scan.count > 0);
        assert!(scan.reports.iter().all(|r| r.singular));
        // x1*x2 over Z/9 has nonsingular zeros like (1, 0).
        let s = single(field.clone(), 2, &[(0, 1, 1)]);
        let scan = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
        assert!(scan.nonsingular_count > 0);
    }

    #[test]
    fn large_spaces_are_rejected() {
        let field = f(3);
        let q = QuadraticForm::zero(field.clone(), 20);
        let s = FormSystem::new(field, 20, vec![q]).unwrap();
        assert!(matches!(
            enumerate_common_zeros(&s, &EnumOptions::default()),
            Err(Error::TooLarge(_))
        ));
        assert!(matches!(
            find_nonsingular_zero(
                &s,
                &SearchOptions {
                    require_certified: true,
                    ..SearchOptions::default()
                }
            ),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn sampling_finds_zeros_beyond_the_cap() {
        // x1*x2 over a space deliberately past the cap: zeros with
        // x1 = 0 are dense enough for sampling to hit one.
        let field = f(3);
        let n = 18; // 3^18 ≈ 3.9e8 > cap
        let q = QuadraticForm::from_terms(field.clone(), n, &[(0, 1, 1)]).unwrap();
        let s = FormSystem::new(field.clone(), n, vec![q]).unwrap();
        match find_nonsingular_zero(
            &s,
            &SearchOptions {
                seed: 11,
                max_attempts: 2000,
                require_certified: false,
            },
        )
        .unwrap()
        {
            NonsingularSearch::Found(rep) => {
                assert_eq!(rep.seed, Some(11));
                assert!(!rep.singular);
            }
            NonsingularSearch::NotFound { certified, .. } => {
                assert!(!certified);
                panic!("sampling should find a zero of x1*x2 here");
            }
        }
    }

    #[test]
    fn engines_agree_on_extension_fields() {
        let f4 = FieldDesc::extension(2, &[1, 1, 1]).unwrap();
        let mut rng = crate::seeded_rng(55);
        for _ in 0..25 {
            let n = rng.gen_range(1..4usize);
            let form = random_form(&f4, n, &mut rng);
            let s = FormSystem::new(f4.clone(), n, vec![form]).unwrap();
            // Index-table engine.
            let a = enumerate_common_zeros(&s, &EnumOptions::default()).unwrap();
            // Generic engine via prefix-free manual recount.
            let q = f4.order().unwrap();
            let mut count = 0u64;
            let total = q.pow(n as u32);
            for idx in 0..total {
                let mut x = Vec::with_capacity(n);
                let mut t = idx;
                for _ in 0..n {
                    x.push(f4.element_from_index(t % q));
                    t /= q;
                }
                if s.is_zero_at(&x).unwrap() {
                    count += 1;
                }
            }
            assert_eq!(a.count, count);
        }
    }
}
