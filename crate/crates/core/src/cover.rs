//! Minimum biclique cover as set covering over maximal bicliques.
//!
//! Columns are maximal bicliques, rows are the active edges; picking a
//! minimum number of columns covering every row yields the minimum number
//! of roles for the reduced instance. Easy instances are solved exactly by
//! an internal branch-and-bound; [`emit_lp`] writes the same model in
//! CPLEX-LP text form for an external MILP solver.
//!
//! [`solve_decision_binary_search`] is the older baseline: binary search on
//! the role count `k`, each decision answered by backtracking assignment of
//! edges to at most `k` pairwise-adjacent groups. It scales poorly and is
//! kept for comparison.

use std::collections::HashMap;
use std::io::Write;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use crate::enumeration::{enumerate_maximal_bicliques, EnumContext};
use crate::error::{Error, Result};
use crate::graph::{AccessMatrix, Biclique, EdgeId, EdgeSet};
use crate::lp::solve_covering_lp_within;
use crate::policy::{Provenance, RbacPolicy, Role};
use crate::progress::Progress;
use crate::reduction::{expand_roles, reduce};
use crate::report::MineStats;

/// Set-cover instance: maximal bicliques (columns) versus active edges (rows).
#[derive(Debug)]
pub struct CoverInstance {
    pub columns: Vec<Biclique>,
    pub rows: Vec<EdgeId>,
    /// Per column: covered row indices, ascending.
    col_rows: Vec<Vec<u32>>,
    /// Per row: incident column indices, ascending.
    row_cols: Vec<Vec<u32>>,
}

impl CoverInstance {
    /// Builds an instance from explicit rows and columns. Every row must be
    /// covered and every column must cover at least one row; duplicate
    /// columns (as row sets) are rejected.
    pub fn from_bicliques(rows: Vec<EdgeId>, columns: Vec<Biclique>) -> Result<Self> {
        let row_of: HashMap<EdgeId, u32> = rows
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();
        let mut col_rows = Vec::with_capacity(columns.len());
        let mut seen = std::collections::HashSet::new();
        for (j, col) in columns.iter().enumerate() {
            let mut covered: Vec<u32> = col
                .edges()
                .iter()
                .filter_map(|e| row_of.get(e).copied())
                .collect();
            covered.sort_unstable();
            covered.dedup();
            if covered.is_empty() {
                return Err(Error::Contract(format!("column {j} covers no row")));
            }
            if !seen.insert(covered.clone()) {
                return Err(Error::Contract(format!("column {j} duplicates another")));
            }
            col_rows.push(covered);
        }
        let mut row_cols = vec![Vec::new(); rows.len()];
        for (j, covered) in col_rows.iter().enumerate() {
            for &r in covered {
                row_cols[r as usize].push(j as u32);
            }
        }
        if let Some(r) = row_cols.iter().position(|c| c.is_empty()) {
            return Err(Error::Contract(format!("row {r} ({}) is uncovered", rows[r])));
        }
        Ok(CoverInstance {
            columns,
            rows,
            col_rows,
            row_cols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_rows(&self, j: usize) -> &[u32] {
        &self.col_rows[j]
    }

    /// Row indices covered by each column, in column order.
    pub fn incidence(&self) -> &[Vec<u32>] {
        &self.col_rows
    }

    pub fn row_columns(&self, r: usize) -> &[u32] {
        &self.row_cols[r]
    }
}

/// Proof status of a cover solution.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Proof {
    Optimal,
    /// Search stopped early: optimum lies in `lower..=upper` and the
    /// returned selection realizes `upper`.
    Bound { lower: usize, upper: usize },
}

#[derive(Clone, Debug)]
pub struct CoverSolution {
    /// Selected column indices, ascending.
    pub selected: Vec<usize>,
    pub objective: usize,
    pub proof: Proof,
}

/// Enumerates all maximal bicliques of an easy context into a cover
/// instance. Refuses hard instances: callers must go through the
/// large-biclique phase instead.
pub fn build_cover_instance(ctx: &EnumContext, progress: &mut Progress) -> Result<CoverInstance> {
    let mut columns = Vec::new();
    for b in enumerate_maximal_bicliques(ctx) {
        columns.push(b);
        if columns.len() as u64 > ctx.count_threshold {
            return Err(Error::InstanceHard {
                threshold: ctx.count_threshold,
            });
        }
        if columns.len() % 4096 == 0 {
            progress.heartbeat("enumerate", columns.len() as u64, "maximal bicliques");
        }
    }
    let rows: Vec<EdgeId> = ctx.active.iter().collect();
    CoverInstance::from_bicliques(rows, columns)
}

/// Knobs for the exact solver.
pub struct SolveOptions {
    pub time_budget: Option<Duration>,
    /// Break ties among optimal solutions toward the lexicographically
    /// smallest selected index set. `None` enables it automatically on
    /// instances small enough for the refinement pass.
    pub lexicographic: Option<bool>,
    /// Column dominance elimination at the root (a column whose row set is
    /// contained in another's can be dropped).
    pub column_dominance: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            time_budget: None,
            lexicographic: None,
            column_dominance: true,
        }
    }
}

const LEX_AUTO_MAX_COLS: usize = 4096;
const LEX_NODE_BUDGET: u64 = 500_000;
const DOMINANCE_MAX_COLS: usize = 4096;
/// The LP bound costs a dense basis in the number of rows; columns only
/// enter linearly through pricing scans.
const LP_BOUND_MAX_ROWS: usize = 2048;

/// Exact minimum cover by branch-and-bound over column choices, with greedy
/// and LP lower bounds, unit-row propagation and column dominance
/// elimination. Budget exhaustion yields a `Bound` result, never an error.
pub fn solve_min_cover_exact(
    inst: &CoverInstance,
    time_budget: Option<Duration>,
    progress: &mut Progress,
) -> CoverSolution {
    solve_min_cover(
        inst,
        &SolveOptions {
            time_budget,
            ..SolveOptions::default()
        },
        progress,
    )
}

pub fn solve_min_cover(
    inst: &CoverInstance,
    opts: &SolveOptions,
    progress: &mut Progress,
) -> CoverSolution {
    if inst.n_rows() == 0 {
        return CoverSolution {
            selected: vec![],
            objective: 0,
            proof: Proof::Optimal,
        };
    }

    let deadline = opts.time_budget.map(|b| Instant::now() + b);
    let mut search = Search::new(inst, deadline, opts.column_dominance);

    let greedy = search.greedy_cover();
    search.best = Some(greedy);

    // LP relaxation at the root sharpens the lower bound. It must respect
    // the solve deadline; without one it still gets only a generous slice
    // of time, since it is an accelerator, not the answer.
    if inst.n_rows() <= LP_BOUND_MAX_ROWS {
        let lp_deadline = deadline
            .unwrap_or_else(|| Instant::now() + Duration::from_secs(600))
            .min(Instant::now() + Duration::from_secs(600));
        if let Ok(lp) =
            solve_covering_lp_within(inst.n_rows(), &inst.col_rows, Some(lp_deadline))
        {
            search.root_lower = search
                .root_lower
                .max((lp.objective - 1e-6).ceil() as usize);
        }
    }

    let mut uncovered = FixedBitSet::with_capacity(inst.n_rows());
    uncovered.insert_range(..);
    let mut selected = Vec::new();
    let completed = search.branch(&mut uncovered, &mut selected, progress);

    let (mut best_sel, best_len) = match &search.best {
        Some(sel) => (sel.clone(), sel.len()),
        None => unreachable!("greedy cover always exists"),
    };

    let proof = if completed {
        Proof::Optimal
    } else {
        Proof::Bound {
            lower: search.root_lower.min(best_len),
            upper: best_len,
        }
    };

    let lex = opts
        .lexicographic
        .unwrap_or(inst.n_cols() <= LEX_AUTO_MAX_COLS);
    if completed && lex {
        if let Some(sel) = search.lex_smallest(best_len, progress) {
            best_sel = sel;
        }
    }

    best_sel.sort_unstable();
    debug_assert!(covers_all(inst, &best_sel));
    CoverSolution {
        objective: best_sel.len(),
        selected: best_sel.iter().map(|&j| j as usize).collect(),
        proof,
    }
}

fn covers_all(inst: &CoverInstance, sel: &[u32]) -> bool {
    let mut covered = FixedBitSet::with_capacity(inst.n_rows());
    for &j in sel {
        for &r in &inst.col_rows[j as usize] {
            covered.insert(r as usize);
        }
    }
    covered.count_ones(..) == inst.n_rows()
}

struct Search<'a> {
    inst: &'a CoverInstance,
    /// Columns dropped by dominance at the root.
    disabled: FixedBitSet,
    best: Option<Vec<u32>>,
    root_lower: usize,
    /// Largest column cardinality; bounds any column's fresh coverage.
    max_col_len: usize,
    deadline: Option<Instant>,
    timed_out: bool,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a CoverInstance, deadline: Option<Instant>, dominance: bool) -> Self {
        let mut disabled = FixedBitSet::with_capacity(inst.n_cols());
        if dominance && inst.n_cols() <= DOMINANCE_MAX_COLS {
            root_dominance(inst, &mut disabled);
        }
        let max_col_len = inst.col_rows.iter().map(Vec::len).max().unwrap_or(1);
        let mut s = Search {
            inst,
            disabled,
            best: None,
            root_lower: 1,
            max_col_len,
            deadline,
            timed_out: false,
            nodes: 0,
        };
        let mut all = FixedBitSet::with_capacity(inst.n_rows());
        all.insert_range(..);
        s.root_lower = s.lower_bound(&all).max(1);
        s
    }

    /// Cheap per-node bound: the column-disjoint rows bound and the
    /// coverage-ratio bound, whichever is stronger.
    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        let u = uncovered.count_ones(..);
        if u == 0 {
            return 0;
        }
        let ratio = u.div_ceil(self.max_col_len);
        ratio.max(self.disjoint_rows_bound(uncovered, None))
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if let Some(d) = self.deadline {
            if self.nodes % 512 == 0 && Instant::now() >= d {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    fn fresh_coverage(&self, j: u32, uncovered: &FixedBitSet) -> usize {
        self.inst.col_rows[j as usize]
            .iter()
            .filter(|&&r| uncovered.contains(r as usize))
            .count()
    }

    /// Max-coverage greedy cover; also the initial incumbent.
    fn greedy_cover(&self) -> Vec<u32> {
        let inst = self.inst;
        let mut uncovered = FixedBitSet::with_capacity(inst.n_rows());
        uncovered.insert_range(..);
        let mut sel = Vec::new();
        while uncovered.count_ones(..) > 0 {
            let mut best: Option<(usize, u32)> = None;
            for j in 0..inst.n_cols() as u32 {
                if self.disabled.contains(j as usize) {
                    continue;
                }
                let gain = self.fresh_coverage(j, &uncovered);
                if gain > 0 && best.map_or(true, |(g, _)| gain > g) {
                    best = Some((gain, j));
                }
            }
            let (_, j) = best.expect("some column must cover an uncovered row");
            for &r in &inst.col_rows[j as usize] {
                uncovered.set(r as usize, false);
            }
            sel.push(j);
        }
        sel
    }

    /// Rows that pairwise share no available column each need a distinct
    /// column: a cheap, sound lower bound.
    fn disjoint_rows_bound(&self, uncovered: &FixedBitSet, forbidden: Option<&FixedBitSet>) -> usize {
        let inst = self.inst;
        let mut used = FixedBitSet::with_capacity(inst.n_cols());
        let mut count = 0usize;
        let mut rows: Vec<u32> = uncovered.ones().map(|r| r as u32).collect();
        rows.sort_by_key(|&r| inst.row_cols[r as usize].len());
        for r in rows {
            let avail = inst.row_cols[r as usize].iter().filter(|&&j| {
                !self.disabled.contains(j as usize)
                    && forbidden.map_or(true, |f| !f.contains(j as usize))
            });
            let mut any = false;
            let mut clash = false;
            let mut cols = Vec::new();
            for &j in avail.clone() {
                any = true;
                if used.contains(j as usize) {
                    clash = true;
                    break;
                }
                cols.push(j);
            }
            let _ = avail;
            if !any {
                // Dead row: no cover exists down this branch. Signal with an
                // effectively infinite bound.
                return usize::MAX / 2;
            }
            if !clash {
                count += 1;
                for j in cols {
                    used.insert(j as usize);
                }
            }
        }
        count
    }

    /// Depth-first search. Returns true when the subtree was fully explored
    /// (i.e. the incumbent is proven optimal if this was the root call).
    fn branch(
        &mut self,
        uncovered: &mut FixedBitSet,
        selected: &mut Vec<u32>,
        progress: &mut Progress,
    ) -> bool {
        self.nodes += 1;
        if self.nodes % 8192 == 0 {
            progress.heartbeat("cover-bnb", self.nodes, "nodes");
        }
        if self.out_of_time() {
            return false;
        }
        let mut undo: Vec<(u32, Vec<u32>)> = Vec::new();
        let result = self.branch_body(uncovered, selected, &mut undo, progress);
        for (j, newly) in undo.into_iter().rev() {
            let popped = selected.pop();
            debug_assert_eq!(popped, Some(j));
            for r in newly {
                uncovered.insert(r as usize);
            }
        }
        result
    }

    fn branch_body(
        &mut self,
        uncovered: &mut FixedBitSet,
        selected: &mut Vec<u32>,
        undo: &mut Vec<(u32, Vec<u32>)>,
        progress: &mut Progress,
    ) -> bool {
        // Unit-row propagation: a row with a single remaining column forces
        // it; a row with none kills the subtree.
        loop {
            let best_len = self.best.as_ref().map(|b| b.len()).unwrap_or(usize::MAX);
            if best_len <= self.root_lower {
                // The incumbent already meets the global lower bound.
                return true;
            }
            if uncovered.count_ones(..) == 0 {
                if selected.len() < best_len {
                    self.best = Some(selected.clone());
                }
                return true;
            }
            let mut unit: Option<u32> = None;
            for r in uncovered.ones() {
                let mut avail = self.inst.row_cols[r]
                    .iter()
                    .filter(|&&j| !self.disabled.contains(j as usize));
                match avail.next() {
                    None => return true, // dead row: no cover down here
                    Some(&j) => {
                        if avail.next().is_none() {
                            unit = Some(j);
                            break;
                        }
                    }
                }
            }
            let Some(j) = unit else { break };
            if selected.len() + 1 >= best_len {
                return true;
            }
            let newly: Vec<u32> = self.inst.col_rows[j as usize]
                .iter()
                .copied()
                .filter(|&r| uncovered.contains(r as usize))
                .collect();
            for &r in &newly {
                uncovered.set(r as usize, false);
            }
            selected.push(j);
            undo.push((j, newly));
        }

        let best_len = self.best.as_ref().map(|b| b.len()).unwrap_or(usize::MAX);
        if selected.len() + 1 >= best_len {
            return true;
        }
        let lb = self.lower_bound(uncovered);
        if selected.len() + lb >= best_len {
            return true;
        }

        // Fail-first: branch on the uncovered row with fewest columns.
        let row = uncovered
            .ones()
            .min_by_key(|&r| {
                self.inst.row_cols[r]
                    .iter()
                    .filter(|&&j| !self.disabled.contains(j as usize))
                    .count()
            })
            .unwrap();
        let mut choices: Vec<u32> = self.inst.row_cols[row]
            .iter()
            .copied()
            .filter(|&j| !self.disabled.contains(j as usize))
            .collect();
        choices.sort_by_key(|&j| {
            (
                std::cmp::Reverse(self.fresh_coverage(j, uncovered)),
                j,
            )
        });

        let mut complete = true;
        // Mutually exclusive branches: later branches forbid the columns
        // already tried for this row.
        let mut tried = Vec::new();
        for &j in &choices {
            let newly: Vec<u32> = self.inst.col_rows[j as usize]
                .iter()
                .copied()
                .filter(|&r| uncovered.contains(r as usize))
                .collect();
            for &r in &newly {
                uncovered.set(r as usize, false);
            }
            selected.push(j);
            self.disabled.insert(j as usize); // do not reuse along this path
            complete &= self.branch(uncovered, selected, progress);
            self.disabled.set(j as usize, false);
            selected.pop();
            for &r in &newly {
                uncovered.insert(r as usize);
            }
            if self.out_of_time() {
                complete = false;
                break;
            }
            // Forbid j in the remaining branches for this row.
            self.disabled.insert(j as usize);
            tried.push(j);
        }
        for j in tried {
            self.disabled.set(j as usize, false);
        }
        complete
    }

    /// Second pass: the lexicographically smallest cover of the proven
    /// optimal size, built by trying column indices in ascending order.
    /// Falls back to the incumbent when the node budget or the wall budget
    /// runs out (the node budget keeps the fallback deterministic).
    fn lex_smallest(&mut self, k: usize, progress: &mut Progress) -> Option<Vec<u32>> {
        let mut uncovered = FixedBitSet::with_capacity(self.inst.n_rows());
        uncovered.insert_range(..);
        let mut prefix = Vec::new();
        let mut lex_nodes = 0u64;
        if self.lex_dfs(&mut uncovered, &mut prefix, 0, k, &mut lex_nodes, progress) {
            Some(prefix)
        } else {
            None
        }
    }

    fn lex_dfs(
        &mut self,
        uncovered: &mut FixedBitSet,
        prefix: &mut Vec<u32>,
        min_col: u32,
        k: usize,
        lex_nodes: &mut u64,
        progress: &mut Progress,
    ) -> bool {
        *lex_nodes += 1;
        if *lex_nodes % 8192 == 0 {
            progress.heartbeat("cover-lex", *lex_nodes, "nodes");
        }
        if uncovered.count_ones(..) == 0 {
            return true;
        }
        if prefix.len() >= k || *lex_nodes > LEX_NODE_BUDGET || self.out_of_time() {
            return false;
        }
        for j in min_col..self.inst.n_cols() as u32 {
            if self.disabled.contains(j as usize) {
                continue;
            }
            let newly: Vec<u32> = self.inst.col_rows[j as usize]
                .iter()
                .copied()
                .filter(|&r| uncovered.contains(r as usize))
                .collect();
            if newly.is_empty() {
                continue;
            }
            for &r in &newly {
                uncovered.set(r as usize, false);
            }
            prefix.push(j);
            let lb = self
                .disjoint_rows_bound_from(uncovered, j + 1)
                .max(uncovered.count_ones(..).div_ceil(self.max_col_len));
            let feasible_here = prefix.len() + lb <= k
                && self.lex_dfs(uncovered, prefix, j + 1, k, lex_nodes, progress);
            if feasible_here {
                return true;
            }
            prefix.pop();
            for &r in &newly {
                uncovered.insert(r as usize);
            }
        }
        false
    }

    /// Disjoint-rows bound restricted to columns with index >= min_col.
    fn disjoint_rows_bound_from(&self, uncovered: &FixedBitSet, min_col: u32) -> usize {
        let inst = self.inst;
        let mut used = FixedBitSet::with_capacity(inst.n_cols());
        let mut count = 0usize;
        for r in uncovered.ones() {
            let mut any = false;
            let mut clash = false;
            let mut cols = Vec::new();
            for &j in &inst.row_cols[r] {
                if j < min_col || self.disabled.contains(j as usize) {
                    continue;
                }
                any = true;
                if used.contains(j as usize) {
                    clash = true;
                    break;
                }
                cols.push(j);
            }
            if !any {
                return usize::MAX / 2;
            }
            if !clash {
                count += 1;
                for j in cols {
                    used.insert(j as usize);
                }
            }
        }
        count
    }
}

/// Drops columns whose row set is contained in another column's row set.
/// Never changes the optimum. Ties (equal row sets cannot occur here, they
/// are rejected at construction) keep the smaller index.
fn root_dominance(inst: &CoverInstance, disabled: &mut FixedBitSet) {
    let n = inst.n_cols();
    for j in 0..n {
        if disabled.contains(j) {
            continue;
        }
        let rows_j = &inst.col_rows[j];
        // Candidate dominators: columns incident to rows_j[0].
        for &k in &inst.row_cols[rows_j[0] as usize] {
            let k = k as usize;
            if k == j || disabled.contains(k) {
                continue;
            }
            let rows_k = &inst.col_rows[k];
            if rows_k.len() > rows_j.len() && is_subset_sorted(rows_j, rows_k) {
                disabled.insert(j);
                break;
            }
        }
    }
}

fn is_subset_sorted(a: &[u32], b: &[u32]) -> bool {
    let mut it = b.iter();
    'outer: for &x in a {
        for &y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Writes the cover instance in CPLEX-LP text form.
///
/// Layout (documented, deterministic): `Minimize` with objective `obj:`
/// summing every column variable, `Subject To` with one `c{row}: ... >= 1`
/// constraint per row, `Binary` declaring every `x{col}`, then `End`.
/// Long expressions wrap at 72 characters with a leading space on
/// continuation lines.
pub fn emit_lp<W: Write>(inst: &CoverInstance, w: &mut W) -> Result<()> {
    writeln!(w, "Minimize")?;
    let terms: Vec<String> = (0..inst.n_cols()).map(|j| format!("x{j}")).collect();
    write_wrapped(w, &format!("obj: {}", terms.join(" + ")))?;
    writeln!(w, "Subject To")?;
    for (r, cols) in inst.row_cols.iter().enumerate() {
        let terms: Vec<String> = cols.iter().map(|j| format!("x{j}")).collect();
        write_wrapped(w, &format!("c{r}: {} >= 1", terms.join(" + ")))?;
    }
    writeln!(w, "Binary")?;
    for j in 0..inst.n_cols() {
        writeln!(w, " x{j}")?;
    }
    writeln!(w, "End")?;
    Ok(())
}

/// Emits `line` with a single leading space, wrapping at 72 characters;
/// continuation lines also start with a space.
fn write_wrapped<W: Write>(w: &mut W, line: &str) -> Result<()> {
    const WIDTH: usize = 72;
    let mut cur = String::new();
    for piece in line.split(' ') {
        if cur.is_empty() {
            cur = format!(" {piece}");
        } else if cur.len() + 1 + piece.len() > WIDTH {
            writeln!(w, "{cur}")?;
            cur = format!(" {piece}");
        } else {
            cur.push(' ');
            cur.push_str(piece);
        }
    }
    if !cur.is_empty() {
        writeln!(w, "{cur}")?;
    }
    Ok(())
}

/// Configuration shared by the mining pipelines.
#[derive(Clone, Debug)]
pub struct MineConfig {
    pub count_threshold: u64,
    pub time_budget: Option<Duration>,
    pub large_edge_threshold: usize,
    pub pieces: usize,
    pub seed: u64,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            count_threshold: crate::enumeration::DEFAULT_COUNT_THRESHOLD,
            time_budget: None,
            large_edge_threshold: 200,
            pieces: 1,
            seed: 0,
        }
    }
}

/// The exact pipeline: reduce, enumerate, solve the cover, play the removal
/// log back. Fails with [`Error::InstanceHard`] when the maximal-biclique
/// count exceeds the threshold; callers must then use the hard pipeline.
pub fn mine_exact(
    m: &AccessMatrix,
    config: &MineConfig,
    progress: &mut Progress,
) -> Result<(RbacPolicy, MineStats)> {
    let mut stats = MineStats::new(m.edge_count());

    let t = Instant::now();
    let state = reduce(m, progress);
    stats.reduction_secs = t.elapsed().as_secs_f64();
    stats.active_edges = state.active().len();
    stats.forced_roles = state.forced_roles().len();

    let remainder = if state.active().is_empty() {
        stats.maximal_bicliques = Some(0);
        RbacPolicy::default()
    } else {
        let ctx = EnumContext::new(m, state.active().clone(), m.full_edge_set())
            .with_threshold(config.count_threshold);
        let t = Instant::now();
        let inst = build_cover_instance(&ctx, progress)?;
        stats.enumeration_secs = t.elapsed().as_secs_f64();
        stats.maximal_bicliques = Some(inst.n_cols() as u64);

        let t = Instant::now();
        let sol = solve_min_cover_exact(&inst, config.time_budget, progress);
        stats.solve_secs = t.elapsed().as_secs_f64();
        stats.proof = Some(sol.proof);
        stats.cover_roles = sol.objective;
        RbacPolicy::new(
            sol.selected
                .iter()
                .map(|&j| Role::from_biclique(&inst.columns[j], Provenance::ExactCover))
                .collect(),
        )
    };

    let policy = expand_roles(m, &state, &remainder)?;
    stats.total_roles = policy.role_count();
    Ok((policy, stats))
}

/// Decision-version baseline: binary search on the role count `k`, each
/// feasibility question answered by backtracking assignment of the active
/// edges to at most `k` pairwise-adjacent groups. Returns the groups found
/// for the smallest feasible `k` along with the solution record.
pub fn solve_decision_binary_search(
    m: &AccessMatrix,
    active: &EdgeSet,
    time_budget: Option<Duration>,
    progress: &mut Progress,
) -> (CoverSolution, Vec<Biclique>) {
    let edges: Vec<EdgeId> = active.iter().collect();
    if edges.is_empty() {
        return (
            CoverSolution {
                selected: vec![],
                objective: 0,
                proof: Proof::Optimal,
            },
            vec![],
        );
    }
    let universe = m.full_edge_set();

    // Adjacency among active edges, materialized (the baseline is only run
    // on small remainders).
    let nbrs: Vec<FixedBitSet> = edges
        .iter()
        .map(|&e| {
            let mut bits = FixedBitSet::with_capacity(m.edge_count());
            m.neighbours_into(e, &universe, active, &mut bits);
            let mut local = FixedBitSet::with_capacity(edges.len());
            for (i, &f) in edges.iter().enumerate() {
                if bits.contains(f.index()) {
                    local.insert(i);
                }
            }
            local
        })
        .collect();

    let users: std::collections::HashSet<u32> =
        edges.iter().map(|&e| m.endpoints(e).0).collect();
    let perms: std::collections::HashSet<u32> =
        edges.iter().map(|&e| m.endpoints(e).1).collect();
    let mut lo = 1usize;
    let mut hi = users.len().min(perms.len()).min(edges.len());
    let deadline = time_budget.map(|b| Instant::now() + b);

    let mut best: Option<Vec<usize>> = None; // group index per edge
    let mut timed_out = false;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        progress.heartbeat("decision-search", (hi - lo) as u64, "k-range");
        match feasible_partition(&nbrs, mid, deadline) {
            Some(assignment) => {
                let k = assignment.iter().copied().max().unwrap() + 1;
                best = Some(assignment);
                hi = k.min(mid);
            }
            None => {
                if deadline.map_or(false, |d| Instant::now() >= d) {
                    timed_out = true;
                    break;
                }
                lo = mid + 1;
            }
        }
    }
    if best.is_none() && !timed_out {
        best = feasible_partition(&nbrs, hi, deadline);
        if best.is_none() {
            timed_out = true;
        }
    }

    let (assignment, proof) = match best {
        Some(a) => {
            let k = a.iter().copied().max().unwrap() + 1;
            let proof = if timed_out {
                Proof::Bound { lower: lo, upper: k }
            } else {
                Proof::Optimal
            };
            (a, proof)
        }
        None => {
            // Budget gone before any assignment: fall back to one group per
            // edge, which is always feasible.
            ((0..edges.len()).collect(), Proof::Bound { lower: lo, upper: edges.len() })
        }
    };

    let k = assignment.iter().copied().max().unwrap() + 1;
    let mut groups: Vec<Vec<EdgeId>> = vec![Vec::new(); k];
    for (i, &g) in assignment.iter().enumerate() {
        groups[g].push(edges[i]);
    }
    let bicliques: Vec<Biclique> = groups
        .into_iter()
        .map(|g| Biclique::from_edges(m, g, &universe))
        .collect();
    (
        CoverSolution {
            selected: (0..k).collect(),
            objective: k,
            proof,
        },
        bicliques,
    )
}

/// Backtracking: assign each edge to a pairwise-adjacent group, opening at
/// most `k` groups. Group order is symmetry-broken: a new group may only be
/// opened with the next unused index.
fn feasible_partition(
    nbrs: &[FixedBitSet],
    k: usize,
    deadline: Option<Instant>,
) -> Option<Vec<usize>> {
    let n = nbrs.len();
    let mut assignment = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut steps = 0u64;
    fn rec(
        i: usize,
        n: usize,
        k: usize,
        nbrs: &[FixedBitSet],
        assignment: &mut Vec<usize>,
        groups: &mut Vec<Vec<usize>>,
        steps: &mut u64,
        deadline: Option<Instant>,
    ) -> bool {
        if i == n {
            return true;
        }
        *steps += 1;
        if *steps % 4096 == 0 && deadline.map_or(false, |d| Instant::now() >= d) {
            return false;
        }
        for g in 0..groups.len() {
            if groups[g].iter().all(|&j| nbrs[i].contains(j)) {
                groups[g].push(i);
                assignment[i] = g;
                if rec(i + 1, n, k, nbrs, assignment, groups, steps, deadline) {
                    return true;
                }
                groups[g].pop();
                assignment[i] = usize::MAX;
            }
        }
        if groups.len() < k {
            groups.push(vec![i]);
            assignment[i] = groups.len() - 1;
            if rec(i + 1, n, k, nbrs, assignment, groups, steps, deadline) {
                return true;
            }
            groups.pop();
            assignment[i] = usize::MAX;
        }
        false
    }
    if rec(
        0,
        n,
        k,
        nbrs,
        &mut assignment,
        &mut groups,
        &mut steps,
        deadline,
    ) {
        Some(assignment)
    } else {
        None
    }
}
