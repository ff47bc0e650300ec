//! Totally singular subspaces: spaces on which every form of a system
//! vanishes identically.
//!
//! The search walks reduced-row-echelon bases directly.  A (k+1)-row
//! echelon basis drops its last row to give the unique echelon basis of
//! a k-dimensional subspace, so the tree below visits every subspace
//! exactly once with no seen-set: a child row must keep the pivot
//! sequence strictly increasing, be zero at the parent pivots, have a
//! leading column where the parent rows are zero, and satisfy the
//! vanishing conditions (bilinear against every basis row for every
//! form, and each form zero on the row itself).
//!
//! Variables that appear in no form are factored out first: they are
//! free directions, and the maximal totally singular dimension in the
//! ambient space is the active-space maximum plus the number of free
//! directions.

use crate::error::{Error, Result};
use crate::field::{FieldDesc, FieldElement, MatrixF};
use crate::quadform::{canonical_basis, FormSystem, QuadraticForm};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use std::collections::BTreeSet;

/// Cap on vectors enumerated per linear-solution set.
const MAX_STEP_ENUM: u64 = 10_000_000;

/// A subspace of F^n held as canonical reduced-row-echelon basis rows
/// with strictly increasing pivots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: FieldDesc,
    n: usize,
    basis: Vec<Vec<FieldElement>>,
}

impl Subspace {
    pub fn zero(field: FieldDesc, n: usize) -> Self {
        Subspace {
            field,
            n,
            basis: Vec::new(),
        }
    }

    /// Canonicalizes arbitrary spanning vectors into echelon form.
    pub fn from_vectors(field: FieldDesc, n: usize, vectors: Vec<Vec<FieldElement>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch("subspace vector length".into()));
            }
            for c in v {
                field.check_element(c)?;
            }
        }
        let basis = canonical_basis(&field, n, vectors)?;
        Ok(Subspace { field, n, basis })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|row| row.iter().position(|c| !self.field.is_zero(c)).expect("nonzero row"))
            .collect()
    }

    /// Membership test by reduction against the echelon rows.
    pub fn contains(&self, v: &[FieldElement]) -> Result<bool> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch("membership vector length".into()));
        }
        let mut w = v.to_vec();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            let c = w[p].clone();
            if self.field.is_zero(&c) {
                continue;
            }
            for i in 0..self.n {
                let t = self.field.mul(&c, &row[i]);
                w[i] = self.field.sub(&w[i], &t);
            }
        }
        Ok(w.iter().all(|c| self.field.is_zero(c)))
    }
}

/// True iff every form vanishes identically on V: the restriction has
/// an all-zero coefficient table (a polynomial identity, not sampling).
pub fn vanishes_on(system: &FormSystem, v: &Subspace) -> Result<bool> {
    if v.n() != system.n() || v.field() != system.field() {
        return Err(Error::DimensionMismatch("subspace does not fit the system".into()));
    }
    if v.dim() == 0 {
        return Ok(true);
    }
    let restricted = system.restrict(v.basis())?;
    Ok(restricted.forms().iter().all(|q| q.is_zero()))
}

/// A fully reduced solution basis with strictly increasing leading
/// columns.  Every line of the span has exactly one representative of
/// the shape row_i + (combination of later rows), with a 1 at lead_i.
struct LineBasis {
    rows: Vec<Vec<FieldElement>>,
    leads: Vec<usize>,
}

fn line_basis(field: &FieldDesc, kernel: Vec<Vec<FieldElement>>) -> Result<LineBasis> {
    if kernel.is_empty() {
        return Ok(LineBasis {
            rows: Vec::new(),
            leads: Vec::new(),
        });
    }
    let reduced = MatrixF::from_rows(field.clone(), kernel)?.row_reduce()?;
    let mut rows = Vec::with_capacity(reduced.rank);
    for i in 0..reduced.rank {
        rows.push(reduced.matrix.row(i).to_vec());
    }
    Ok(LineBasis {
        rows,
        leads: reduced.pivots,
    })
}

/// Enumerates one normalized representative per line of the span whose
/// leading column lies in [min_lead, max_lead] and passes `lead_ok`.
/// Returns false if the budget ran out.
fn for_each_line(
    field: &FieldDesc,
    basis: &LineBasis,
    min_lead: usize,
    max_lead: usize,
    lead_ok: &dyn Fn(usize) -> bool,
    budget: &mut u64,
    f: &mut impl FnMut(Vec<FieldElement>, usize) -> Result<()>,
) -> Result<bool> {
    let q = field.order().ok_or_else(|| {
        Error::PreconditionViolated("subspace search needs a finite field".into())
    })?;
    let t = basis.rows.len();
    let mut planned = BigUint::zero();
    let mut open: Vec<usize> = Vec::new();
    for i in 0..t {
        let l = basis.leads[i];
        if l < min_lead || l > max_lead || !lead_ok(l) {
            continue;
        }
        planned += BigUint::from(q).pow((t - 1 - i) as u32);
        open.push(i);
    }
    if planned > BigUint::from(MAX_STEP_ENUM) {
        return Err(Error::TooLarge(format!(
            "{planned} candidate lines exceed the step cap"
        )));
    }
    let n = basis.rows.first().map_or(0, |r| r.len());
    for i in open {
        let tail = q.pow((t - 1 - i) as u32);
        for combo in 0..tail {
            if *budget == 0 {
                return Ok(false);
            }
            *budget -= 1;
            let mut e = basis.rows[i].clone();
            let mut rem = combo;
            for j in i + 1..t {
                let c = field.element_from_index(rem % q);
                rem /= q;
                if !field.is_zero(&c) {
                    for k in 0..n {
                        let term = field.mul(&c, &basis.rows[j][k]);
                        e[k] = field.add(&e[k], &term);
                    }
                }
            }
            f(e, basis.leads[i])?;
        }
    }
    Ok(true)
}

/// Linear conditions for extending `rows`: zero at each existing pivot,
/// and bilinear-orthogonal to every row for every form.
fn extension_kernel(
    system: &FormSystem,
    rows: &[Vec<FieldElement>],
    pivots: &[usize],
) -> Result<Vec<Vec<FieldElement>>> {
    let field = system.field();
    let n = system.n();
    let mut cond: Vec<Vec<FieldElement>> = Vec::new();
    for &p in pivots {
        let mut row = vec![field.zero(); n];
        row[p] = field.one();
        cond.push(row);
    }
    let units: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            let mut e = vec![field.zero(); n];
            e[i] = field.one();
            e
        })
        .collect();
    for form in system.forms() {
        for r in rows {
            let mut row = Vec::with_capacity(n);
            for u in &units {
                row.push(form.bilinear(r, u)?);
            }
            cond.push(row);
        }
    }
    if cond.is_empty() {
        // No conditions: the kernel is everything.
        return Ok(units);
    }
    MatrixF::from_rows(field.clone(), cond)?.kernel_basis()
}

fn satisfies_quadratics(system: &FormSystem, e: &[FieldElement]) -> Result<bool> {
    let field = system.field();
    for form in system.forms() {
        if !field.is_zero(&form.evaluate(e)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All canonical candidate vectors e outside V with b(q_i, v_j, e) = 0
/// and q_i(e) = 0, reduced modulo V and scaled to leading 1 (one per
/// coset line).  Requires vanishes_on(S, V).
pub fn extend_basis_step(system: &FormSystem, v: &Subspace) -> Result<Vec<Vec<FieldElement>>> {
    if !vanishes_on(system, v)? {
        return Err(Error::PreconditionViolated(
            "extension requires a totally singular base subspace".into(),
        ));
    }
    let field = system.field();
    let kernel = extension_kernel(system, v.basis(), &v.pivots())?;
    let basis = line_basis(field, kernel)?;
    let mut out: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut budget = u64::MAX;
    for_each_line(
        field,
        &basis,
        0,
        system.n().saturating_sub(1),
        &|_| true,
        &mut budget,
        &mut |e, _| {
            if satisfies_quadratics(system, &e)? {
                out.insert(e.iter().map(|c| field.element_index(c)).collect());
            }
            Ok(())
        },
    )?;
    Ok(out
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| field.element_from_index(i)).collect())
        .collect())
}

/// Search budget: total candidate vectors examined across all nodes.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 20_000_000,
        }
    }
}

/// Result of [`find_totally_singular`].
#[derive(Debug, Clone)]
pub enum SingularSearch {
    Found(Subspace),
    /// `certified` means the canonical search tree was exhausted.
    NotFound { certified: bool, nodes: u64 },
}

/// Upper bound on the common totally singular dimension from
/// single-form theory: such a space is totally singular for every form
/// in the span, and one form admits at most radical + witt_index.
/// None when the span has too many lines to enumerate.
fn span_line_ceiling(system: &FormSystem) -> Result<Option<usize>> {
    let field = system.field();
    let q = match field.order() {
        Some(q) => q,
        None => return Ok(None),
    };
    let r = system.forms().len() as u32;
    let total = BigUint::from(q).pow(r);
    if total > BigUint::from(4096u32) {
        return Ok(None);
    }
    let total = total.to_u64().unwrap();
    let mut best: Option<usize> = None;
    for idx in 1..total {
        let mut tuple = Vec::with_capacity(r as usize);
        let mut rem = idx;
        for _ in 0..r {
            tuple.push(field.element_from_index(rem % q));
            rem /= q;
        }
        let lead = tuple.iter().position(|c| !field.is_zero(c)).unwrap();
        if field.element_index(&tuple[lead]) != 1 {
            continue;
        }
        let combo = system.linear_combination(&tuple)?;
        let t = crate::zerofinder::quadratic_type(&combo)?;
        let cap = t.radical_dim + t.witt_index;
        best = Some(best.map_or(cap, |b| b.min(cap)));
    }
    Ok(best)
}

struct ActiveSplit {
    active: Vec<usize>,
    reduced: Option<FormSystem>,
}

fn split_active(system: &FormSystem) -> Result<ActiveSplit> {
    let active = system.active_variables();
    if active.len() == system.n() {
        return Ok(ActiveSplit {
            active,
            reduced: Some(system.clone()),
        });
    }
    if active.is_empty() {
        return Ok(ActiveSplit {
            active,
            reduced: None,
        });
    }
    let field = system.field();
    let n2 = active.len();
    let forms = system
        .forms()
        .iter()
        .map(|q| {
            let mut out = QuadraticForm::zero(field.clone(), n2);
            for (a, &va) in active.iter().enumerate() {
                for (b, &vb) in active.iter().enumerate().skip(a) {
                    out.set_coeff(a, b, q.coeff(va, vb).clone());
                }
            }
            out
        })
        .collect();
    Ok(ActiveSplit {
        active: active.clone(),
        reduced: Some(FormSystem::new(field.clone(), n2, forms)?),
    })
}

/// The DFS over echelon bases in the active space.  Calls `on_node` for
/// every totally singular subspace visited (including the root), and
/// stops early when `on_node` returns true.  With `prune_to_target` the
/// walk skips pivots too large to still reach dimension max_dim (sound
/// for a targeted search, but the walk then no longer visits every
/// smaller subspace).  Returns (exhausted, nodes_spent).
pub(crate) fn walk_singular_tree(
    system: &FormSystem,
    max_dim: usize,
    prune_to_target: bool,
    budget: &SearchBudget,
    on_node: &mut impl FnMut(&[Vec<FieldElement>]) -> Result<bool>,
) -> Result<(bool, u64)> {
    let field = system.field().clone();
    let n = system.n();
    let mut spent: u64 = 0;
    let mut remaining = budget.max_nodes;

    struct Dfs<'a> {
        system: &'a FormSystem,
        field: FieldDesc,
        n: usize,
        max_dim: usize,
        prune_to_target: bool,
    }

    impl<'a> Dfs<'a> {
        /// Returns Some(true) on early stop, None when exhausted.
        fn rec(
            &self,
            rows: &mut Vec<Vec<FieldElement>>,
            pivots: &mut Vec<usize>,
            remaining: &mut u64,
            spent: &mut u64,
            on_node: &mut impl FnMut(&[Vec<FieldElement>]) -> Result<bool>,
        ) -> Result<Option<bool>> {
            if on_node(rows)? {
                return Ok(Some(true));
            }
            let k = rows.len();
            if k == self.max_dim {
                return Ok(None);
            }
            let min_next = pivots.last().map_or(0, |p| p + 1);
            // A dim-max_dim space has j-th pivot at most n - max_dim + j,
            // so a targeted search can cap the next pivot column.
            let max_next = if self.prune_to_target {
                self.n - self.max_dim + k
            } else {
                self.n - 1
            };
            if min_next > max_next {
                return Ok(None);
            }
            let kernel = extension_kernel(self.system, rows, pivots)?;
            let basis = line_basis(&self.field, kernel)?;
            let mut children: BTreeSet<Vec<u64>> = BTreeSet::new();
            let parent_rows = rows.clone();
            let fld = &self.field;
            let lead_ok =
                move |l: usize| parent_rows.iter().all(|r| fld.is_zero(&r[l]));
            let ok = for_each_line(
                &self.field,
                &basis,
                min_next,
                max_next,
                &lead_ok,
                remaining,
                &mut |e, _| {
                    *spent += 1;
                    if satisfies_quadratics(self.system, &e)? {
                        children.insert(e.iter().map(|c| self.field.element_index(c)).collect());
                    }
                    Ok(())
                },
            )?;
            if !ok {
                return Ok(Some(false)); // budget exhausted
            }
            for idx in children {
                let e: Vec<FieldElement> = idx
                    .iter()
                    .map(|&i| self.field.element_from_index(i))
                    .collect();
                let lead = e
                    .iter()
                    .position(|c| !self.field.is_zero(c))
                    .expect("nonzero child");
                rows.push(e);
                pivots.push(lead);
                let res = self.rec(rows, pivots, remaining, spent, on_node)?;
                rows.pop();
                pivots.pop();
                if let Some(stop) = res {
                    return Ok(Some(stop));
                }
            }
            Ok(None)
        }
    }

    let dfs = Dfs {
        system,
        field,
        n,
        max_dim,
        prune_to_target,
    };
    let mut rows = Vec::new();
    let mut pivots = Vec::new();
    match dfs.rec(&mut rows, &mut pivots, &mut remaining, &mut spent, on_node)? {
        None => Ok((true, spent)),
        Some(true) => Ok((true, spent)),
        Some(false) => Ok((false, spent)),
    }
}

/// Searches for a dim-d totally singular subspace.  Inactive variables
/// are factored out first; certified NotFound means the echelon search
/// tree over the active space was exhausted.
pub fn find_totally_singular(
    system: &FormSystem,
    d: usize,
    budget: &SearchBudget,
) -> Result<SingularSearch> {
    let field = system.field().clone();
    if !field.is_field() || field.order().is_none() {
        return Err(Error::PreconditionViolated(
            "totally singular search needs a finite field".into(),
        ));
    }
    let n = system.n();
    if d == 0 {
        return Ok(SingularSearch::Found(Subspace::zero(field, n)));
    }
    if d > n {
        return Ok(SingularSearch::NotFound {
            certified: true,
            nodes: 0,
        });
    }
    let split = split_active(system)?;
    let free: Vec<usize> = (0..n).filter(|i| !split.active.contains(i)).collect();
    let mut ambient_rows: Vec<Vec<FieldElement>> = Vec::new();
    if d <= free.len() {
        for &j in free.iter().take(d) {
            let mut e = vec![field.zero(); n];
            e[j] = field.one();
            ambient_rows.push(e);
        }
        return Ok(SingularSearch::Found(Subspace::from_vectors(
            field,
            n,
            ambient_rows,
        )?));
    }
    let reduced = match &split.reduced {
        Some(r) => r,
        None => {
            // No active variables and d > free = n: impossible.
            return Ok(SingularSearch::NotFound {
                certified: true,
                nodes: 0,
            });
        }
    };
    let d_active = d - free.len();
    if d_active > reduced.n() {
        return Ok(SingularSearch::NotFound {
            certified: true,
            nodes: 0,
        });
    }
    if let Some(ceiling) = span_line_ceiling(reduced)? {
        if d_active > ceiling {
            return Ok(SingularSearch::NotFound {
                certified: true,
                nodes: 0,
            });
        }
    }
    let mut found: Option<Vec<Vec<FieldElement>>> = None;
    let (exhausted, nodes) = walk_singular_tree(reduced, d_active, true, budget, &mut |rows| {
        if rows.len() == d_active {
            found = Some(rows.to_vec());
            Ok(true)
        } else {
            Ok(false)
        }
    })?;
    match found {
        Some(rows) => {
            for row in rows {
                let mut e = vec![field.zero(); n];
                for (a, &va) in split.active.iter().enumerate() {
                    e[va] = row[a].clone();
                }
                ambient_rows.push(e);
            }
            for &j in &free {
                let mut e = vec![field.zero(); n];
                e[j] = field.one();
                ambient_rows.push(e);
            }
            let sub = Subspace::from_vectors(field, n, ambient_rows)?;
            debug_assert_eq!(sub.dim(), d);
            Ok(SingularSearch::Found(sub))
        }
        None => {
            if !exhausted {
                return Err(Error::BudgetExhausted(format!(
                    "singular-subspace search stopped after {nodes} candidates"
                )));
            }
            Ok(SingularSearch::NotFound {
                certified: true,
                nodes,
            })
        }
    }
}

/// Largest d with a totally singular subspace of dimension d, searched
/// upward from 0.  Also returns whether the maximum is certified.
pub fn max_totally_singular(
    system: &FormSystem,
    budget: &SearchBudget,
) -> Result<(usize, bool)> {
    let mut best = 0;
    for d in 1..=system.n() {
        match find_totally_singular(system, d, budget) {
            Ok(SingularSearch::Found(_)) => best = d,
            Ok(SingularSearch::NotFound { certified, .. }) => return Ok((best, certified)),
            Err(Error::BudgetExhausted(_)) => return Ok((best, false)),
            Err(e) => return Err(e),
        }
    }
    Ok((best, true))
}

/// Empirical exploration of the subspace guarantee: at dimension n,
/// does every sampled r-form system vanish on some linear subspace of
/// dimension m+1 (projective dimension m)?  Also hunts for a certified
/// witness at n−1 showing the guarantee cannot be lowered.
#[derive(Debug, Clone)]
pub struct BetaExploration {
    pub r: usize,
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Every trial at n found an (m+1)-dimensional subspace.
    pub guarantee_holds: bool,
    /// Trials at n with a certified miss (would refute the guarantee).
    pub failures_at_n: u64,
    /// Trials at n stopped by budget (uncertified).
    pub unknown_at_n: u64,
    /// A sampled system at n−1 with certified NotFound, if one turned up.
    pub witness_at_prev: Option<FormSystem>,
}

pub fn explore_beta(
    field: &FieldDesc,
    r: usize,
    m: usize,
    n: usize,
    trials: u64,
    seed: u64,
    budget: &SearchBudget,
) -> Result<BetaExploration> {
    if r == 0 || n == 0 {
        return Err(Error::PreconditionViolated("explore needs r >= 1, n >= 1".into()));
    }
    let q = field.order().ok_or_else(|| {
        Error::PreconditionViolated("exploration needs a finite field".into())
    })?;
    let d = m + 1;
    let mut rng = crate::seeded_rng(seed);
    let mut failures_at_n = 0;
    let mut unknown_at_n = 0;
    let mut witness_at_prev: Option<FormSystem> = None;
    let sample = |rng: &mut rand_chacha::ChaCha8Rng, nn: usize| -> Result<FormSystem> {
        let forms: Vec<QuadraticForm> = (0..r)
            .map(|_| {
                let mut form = QuadraticForm::zero(field.clone(), nn);
                for i in 0..nn {
                    for j in i..nn {
                        form.set_coeff(i, j, field.element_from_index(rng.gen_range(0..q)));
                    }
                }
                form
            })
            .collect();
        FormSystem::new(field.clone(), nn, forms)
    };
    for _ in 0..trials {
        let s = sample(&mut rng, n)?;
        match find_totally_singular(&s, d, budget) {
            Ok(SingularSearch::Found(_)) => {}
            Ok(SingularSearch::NotFound { certified: true, .. }) => failures_at_n += 1,
            Ok(SingularSearch::NotFound { certified: false, .. })
            | Err(Error::BudgetExhausted(_)) => unknown_at_n += 1,
            Err(e) => return Err(e),
        }
    }
    if n > 1 {
        for _ in 0..trials {
            let s = sample(&mut rng, n - 1)?;
            match find_totally_singular(&s, d, budget) {
                Ok(SingularSearch::NotFound { certified: true, .. }) => {
                    witness_at_prev = Some(s);
                    break;
                }
                Ok(_) | Err(Error::BudgetExhausted(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(BetaExploration {
        r,
        m,
        n,
        trials,
        seed,
        guarantee_holds: failures_at_n == 0 && unknown_at_n == 0,
        failures_at_n,
        unknown_at_n,
        witness_at_prev,
    })
}
