//! Branch-and-price over maximal-biclique columns.
//!
//! Instead of enumerating every maximal biclique up front, keep a working
//! set of columns, solve the LP relaxation of the cover over it, and ask the
//! pricing subproblem — a maximum-weight set of pairwise-adjacent edges
//! under the row duals — whether any column prices out (dual weight above
//! one). When none does, the relaxation value is the true LP bound over
//! *all* maximal bicliques. Convergence can be slow on hard instances; the
//! trace of (elapsed seconds, objective) pairs is the primary output and the
//! module is experimental by design.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use crate::cover::{CoverInstance, CoverSolution, Proof};
use crate::error::Result;
use crate::graph::{AccessMatrix, Biclique, EdgeId, EdgeSet};
use crate::lp::{solve_covering_lp, solve_covering_lp_within};
use crate::progress::Progress;
use crate::reduction::ReductionState;

/// Tolerances: dual feasibility / integrality recognition, and the pricing
/// convergence slack ("maximum objective value <= 1").
pub const FEAS_TOL: f64 = 1e-7;
pub const CONVERGENCE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PricingOptions {
    pub time_budget: Option<Duration>,
    /// Cap on new columns admitted per pricing round.
    pub max_new_columns: usize,
}

impl Default for PricingOptions {
    fn default() -> Self {
        PricingOptions {
            time_budget: None,
            max_new_columns: 50,
        }
    }
}

/// State of the column-generation loop, including the convergence trace.
pub struct PricingState {
    pub working_columns: Vec<Biclique>,
    /// Active edges, one LP row each, ascending.
    pub rows: Vec<EdgeId>,
    pub relaxation_objective: f64,
    /// Dual per row, aligned with `rows`.
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// (elapsed seconds, relaxation objective) per round; non-increasing.
    pub trace: Vec<(f64, f64)>,
    pub converged: bool,
}

impl PricingState {
    pub fn dual_of(&self, e: EdgeId) -> Option<f64> {
        self.rows
            .binary_search(&e)
            .ok()
            .map(|i| self.duals[i])
    }
}

/// Solves the LP relaxation of a cover instance: optimal value and the row
/// duals of the covering constraints.
pub fn solve_lp_relaxation(inst: &CoverInstance) -> Result<(f64, Vec<f64>)> {
    let out = solve_covering_lp(inst.n_rows(), inst.incidence())?;
    Ok((out.objective, out.duals))
}

/// Pricing subproblem: a maximum-total-weight set of pairwise-adjacent
/// active edges under nonnegative duals. Solved by branch-and-bound with
/// weight-sum upper bounds; zero-weight edges never pad the result.
pub fn price(
    m: &AccessMatrix,
    active: &EdgeSet,
    universe: &EdgeSet,
    duals: &HashMap<EdgeId, f64>,
) -> (f64, Vec<EdgeId>) {
    let edges: Vec<EdgeId> = active.iter().collect();
    if edges.is_empty() {
        return (0.0, vec![]);
    }
    let weight: HashMap<EdgeId, f64> = edges
        .iter()
        .map(|&e| (e, duals.get(&e).copied().unwrap_or(0.0).max(0.0)))
        .collect();

    // Neighbourhoods of active edges, adjacency judged against the universe.
    let mut nbrs: HashMap<EdgeId, FixedBitSet> = HashMap::with_capacity(edges.len());
    for &e in &edges {
        let mut bits = FixedBitSet::with_capacity(m.edge_count());
        m.neighbours_into(e, universe, active, &mut bits);
        nbrs.insert(e, bits);
    }

    // Candidates ordered by weight descending, id ascending.
    let mut order = edges.clone();
    order.sort_by(|a, b| {
        weight[b]
            .partial_cmp(&weight[a])
            .unwrap()
            .then(a.cmp(b))
    });

    struct Mwc<'a> {
        nbrs: &'a HashMap<EdgeId, FixedBitSet>,
        weight: &'a HashMap<EdgeId, f64>,
        best_w: f64,
        best: Vec<EdgeId>,
    }

    impl Mwc<'_> {
        fn consider(&mut self, cur: &[EdgeId], w: f64) {
            if w > self.best_w + CONVERGENCE_SLACK {
                self.best_w = w;
                self.best = cur.to_vec();
                self.best.sort_unstable();
            } else if (w - self.best_w).abs() <= CONVERGENCE_SLACK && !cur.is_empty() {
                let mut sorted = cur.to_vec();
                sorted.sort_unstable();
                if sorted < self.best {
                    self.best = sorted;
                }
            }
        }

        fn expand(&mut self, cur: &mut Vec<EdgeId>, cur_w: f64, cands: &[EdgeId]) {
            let mut remaining: f64 = cands.iter().map(|e| self.weight[e]).sum();
            for (i, &v) in cands.iter().enumerate() {
                if cur_w + remaining <= self.best_w + CONVERGENCE_SLACK {
                    return;
                }
                let nv = &self.nbrs[&v];
                let next: Vec<EdgeId> = cands[i + 1..]
                    .iter()
                    .copied()
                    .filter(|f| nv.contains(f.index()))
                    .collect();
                cur.push(v);
                let w = cur_w + self.weight[&v];
                self.consider(cur, w);
                self.expand(cur, w, &next);
                cur.pop();
                remaining -= self.weight[&v];
            }
        }
    }

    let mut search = Mwc {
        nbrs: &nbrs,
        weight: &weight,
        best_w: 0.0,
        best: vec![],
    };
    search.expand(&mut Vec::new(), 0.0, &order);
    (search.best_w, search.best)
}

/// Greedily extends a pairwise-adjacent seed to a maximal biclique over the
/// active edges, preferring high-dual edges (ascending id on ties; plain
/// ascending id when no duals are given).
fn greedy_maximal(
    m: &AccessMatrix,
    active: &EdgeSet,
    universe: &EdgeSet,
    seed: &[EdgeId],
    duals: Option<&HashMap<EdgeId, f64>>,
) -> Biclique {
    let mut members = seed.to_vec();
    let mut cand = FixedBitSet::with_capacity(m.edge_count());
    let mut nb = FixedBitSet::with_capacity(m.edge_count());
    m.neighbours_into(seed[0], universe, active, &mut cand);
    for &e in &members[1..] {
        m.neighbours_into(e, universe, active, &mut nb);
        cand.intersect_with(&nb);
    }
    for &e in &members {
        cand.set(e.index(), false);
    }
    while cand.count_ones(..) > 0 {
        let pick = match duals {
            None => EdgeId(cand.ones().next().unwrap() as u32),
            Some(d) => {
                let mut best: Option<(f64, EdgeId)> = None;
                for i in cand.ones() {
                    let e = EdgeId(i as u32);
                    let w = d.get(&e).copied().unwrap_or(0.0);
                    if best.map_or(true, |(bw, _)| w > bw + CONVERGENCE_SLACK) {
                        best = Some((w, e));
                    }
                }
                best.unwrap().1
            }
        };
        members.push(pick);
        m.neighbours_into(pick, universe, active, &mut nb);
        cand.intersect_with(&nb);
        cand.set(pick.index(), false);
    }
    Biclique::from_edges(m, members, universe)
}

/// Column generation at the root: relax, price, add columns, repeat until
/// the pricing value drops to one or the budget runs out. On convergence
/// with an integral relaxation, the selected columns are also returned as
/// an exact cover of the active edges.
pub fn branch_and_price(
    m: &AccessMatrix,
    state: &ReductionState,
    opts: &PricingOptions,
    progress: &mut Progress,
) -> Result<(PricingState, Option<CoverSolution>)> {
    let universe = m.full_edge_set();
    let active = state.active();
    let rows: Vec<EdgeId> = active.iter().collect();
    let started = Instant::now();
    let deadline = opts.time_budget.map(|b| started + b);

    // Initial working set: one greedy maximal biclique per active edge.
    let mut seen: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut columns: Vec<Biclique> = Vec::new();
    for &e in &rows {
        let b = greedy_maximal(m, active, &universe, &[e], None);
        if seen.insert(b.edges().to_vec()) {
            columns.push(b);
        }
    }

    let mut out = PricingState {
        working_columns: columns,
        rows,
        relaxation_objective: f64::INFINITY,
        duals: vec![],
        iterations: 0,
        trace: vec![],
        converged: false,
    };
    if out.rows.is_empty() {
        out.relaxation_objective = 0.0;
        out.converged = true;
        return Ok((
            out,
            Some(CoverSolution {
                selected: vec![],
                objective: 0,
                proof: Proof::Optimal,
            }),
        ));
    }

    loop {
        out.iterations += 1;
        let inst = CoverInstance::from_bicliques(out.rows.clone(), out.working_columns.clone())?;
        let lp = solve_covering_lp_within(inst.n_rows(), inst.incidence(), deadline)?;
        out.relaxation_objective = lp.objective;
        out.duals = lp.duals.clone();
        out.trace
            .push((started.elapsed().as_secs_f64(), lp.objective));
        progress.heartbeat("branch-and-price", out.iterations as u64, "rounds");

        let dual_map: HashMap<EdgeId, f64> = out
            .rows
            .iter()
            .zip(&lp.duals)
            .map(|(&e, &d)| (e, d))
            .collect();
        let (value, priced) = price(m, active, &universe, &dual_map);

        if value <= 1.0 + CONVERGENCE_SLACK {
            out.converged = true;
            let integral = lp
                .x
                .iter()
                .all(|&v| v <= FEAS_TOL || (v - 1.0).abs() <= FEAS_TOL);
            let solution = integral.then(|| {
                let selected: Vec<usize> = lp
                    .x
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| (v - 1.0).abs() <= FEAS_TOL)
                    .map(|(j, _)| j)
                    .collect();
                CoverSolution {
                    objective: selected.len(),
                    selected,
                    proof: Proof::Optimal,
                }
            });
            return Ok((out, solution));
        }

        if deadline.map_or(false, |d| Instant::now() >= d) {
            return Ok((out, None));
        }

        // New columns: the priced set extended to maximal, plus one maximal
        // biclique grown around each priced edge, biased by the duals.
        let mut added = 0usize;
        let admit = |b: Biclique,
                         seen: &mut HashSet<Vec<EdgeId>>,
                         columns: &mut Vec<Biclique>| {
            if seen.insert(b.edges().to_vec()) {
                columns.push(b);
                true
            } else {
                false
            }
        };
        if !priced.is_empty() {
            let b = greedy_maximal(m, active, &universe, &priced, Some(&dual_map));
            if admit(b, &mut seen, &mut out.working_columns) {
                added += 1;
            }
            for &e in &priced {
                if added >= opts.max_new_columns {
                    break;
                }
                let b = greedy_maximal(m, active, &universe, &[e], Some(&dual_map));
                if admit(b, &mut seen, &mut out.working_columns) {
                    added += 1;
                }
            }
        }
        if added == 0 {
            // Numerically stuck: the priced column already exists although
            // its dual weight exceeds one. Stop rather than spin.
            return Ok((out, None));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AccessMatrix;
    use crate::reduction::reduce;

    fn pairs(m: &AccessMatrix) -> HashMap<EdgeId, f64> {
        m.edge_ids().map(|e| (e, 0.0)).collect()
    }

    #[test]
    fn zero_duals_price_to_zero() {
        let m = AccessMatrix::from_pairs([("u", "p"), ("u", "q")]).unwrap();
        let full = m.full_edge_set();
        let (v, set) = price(&m, &full, &full, &pairs(&m));
        assert_eq!(v, 0.0);
        assert!(set.is_empty());
    }

    #[test]
    fn planted_biclique_is_found() {
        // K_{2,2} plus a pendant edge; weight 1 on the K_{2,2} edges.
        let m = AccessMatrix::from_pairs([
            ("u0", "p0"),
            ("u0", "p1"),
            ("u1", "p0"),
            ("u1", "p1"),
            ("u2", "p2"),
        ])
        .unwrap();
        let full = m.full_edge_set();
        let mut duals = pairs(&m);
        for i in 0..4 {
            duals.insert(EdgeId(i), 1.0);
        }
        let (v, set) = price(&m, &full, &full, &duals);
        assert!((v - 4.0).abs() < 1e-9);
        assert_eq!(set, vec![EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)]);
    }

    #[test]
    fn converges_on_complete_bipartite() {
        let m = AccessMatrix::from_pairs([
            ("u0", "p0"),
            ("u0", "p1"),
            ("u1", "p0"),
            ("u1", "p1"),
        ])
        .unwrap();
        let state = reduce(&m, &mut Progress::silent());
        // Fully reduced: zero rows, trivially converged.
        let (ps, sol) = branch_and_price(
            &m,
            &state,
            &PricingOptions::default(),
            &mut Progress::silent(),
        )
        .unwrap();
        assert!(ps.converged);
        assert_eq!(sol.unwrap().objective, 0);
    }

    #[test]
    fn trace_is_monotone_non_increasing() {
        let m = AccessMatrix::from_pairs([
            ("u0", "p0"),
            ("u0", "p1"),
            ("u1", "p1"),
            ("u1", "p2"),
            ("u2", "p2"),
            ("u2", "p0"),
        ])
        .unwrap();
        let state = reduce(&m, &mut Progress::silent());
        let (ps, _) = branch_and_price(
            &m,
            &state,
            &PricingOptions::default(),
            &mut Progress::silent(),
        )
        .unwrap();
        for w in ps.trace.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-9);
        }
        assert!(ps.converged);
    }
}
