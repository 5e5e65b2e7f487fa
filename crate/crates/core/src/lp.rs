//! Linear relaxation of covering instances.
//!
//! Solves `min sum(x)  s.t.  A x >= 1, x >= 0` for a 0/1 incidence matrix
//! given column-wise, returning the optimal objective, a primal solution and
//! the row duals. This is a small two-phase revised simplex with a dense
//! basis inverse: adequate for desk-scale working sets (thousands of rows
//! and columns) and kept behind this module's interface so an external LP
//! engine could be swapped in.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Optimal relaxation data for a covering instance.
#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub objective: f64,
    /// Value per structural column.
    pub x: Vec<f64>,
    /// Dual value per row; nonnegative at optimality up to tolerance.
    pub duals: Vec<f64>,
}

const EPS: f64 = 1e-9;

/// Solves the covering relaxation. `cols[j]` lists the rows covered by
/// column `j`. Every row must be covered by at least one column.
pub fn solve_covering_lp(n_rows: usize, cols: &[Vec<u32>]) -> Result<LpOutcome> {
    solve_covering_lp_within(n_rows, cols, None)
}

/// As [`solve_covering_lp`], giving up with an error once `deadline`
/// passes.
pub fn solve_covering_lp_within(
    n_rows: usize,
    cols: &[Vec<u32>],
    deadline: Option<Instant>,
) -> Result<LpOutcome> {
    if n_rows == 0 {
        return Ok(LpOutcome {
            objective: 0.0,
            x: vec![0.0; cols.len()],
            duals: vec![],
        });
    }
    let mut covered = vec![false; n_rows];
    for col in cols {
        for &r in col {
            covered[r as usize] = true;
        }
    }
    if let Some(r) = covered.iter().position(|&c| !c) {
        return Err(Error::Contract(format!(
            "covering LP: row {r} is covered by no column"
        )));
    }

    // Rows with identical column sets are one constraint; collapsing them
    // shrinks the basis considerably on cover instances, where many edges
    // sit in exactly the same maximal bicliques. The representative row
    // keeps the dual, duplicates get zero, which leaves every column's dual
    // sum unchanged.
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); n_rows];
    for (j, col) in cols.iter().enumerate() {
        for &r in col {
            row_cols[r as usize].push(j as u32);
        }
    }
    let mut rep_of: std::collections::HashMap<&[u32], u32> = Default::default();
    let mut to_compact: Vec<u32> = vec![0; n_rows];
    let mut n_compact = 0u32;
    for r in 0..n_rows {
        let key: &[u32] = &row_cols[r];
        match rep_of.get(key) {
            Some(&c) => to_compact[r] = c,
            None => {
                rep_of.insert(key, n_compact);
                to_compact[r] = n_compact;
                n_compact += 1;
            }
        }
    }
    let solve_rows = n_compact as usize;
    let compact_cols: Vec<Vec<u32>>;
    let cols_ref: &[Vec<u32>] = if solve_rows == n_rows {
        cols
    } else {
        compact_cols = cols
            .iter()
            .map(|col| {
                let mut mapped: Vec<u32> =
                    col.iter().map(|&r| to_compact[r as usize]).collect();
                mapped.sort_unstable();
                mapped.dedup();
                mapped
            })
            .collect();
        &compact_cols
    };

    let out = Simplex::new(solve_rows, cols_ref, deadline).solve()?;
    if solve_rows == n_rows {
        return Ok(out);
    }
    let mut duals = vec![0.0; n_rows];
    let mut seen = vec![false; solve_rows];
    for r in 0..n_rows {
        let c = to_compact[r] as usize;
        if !seen[c] {
            seen[c] = true;
            duals[r] = out.duals[c];
        }
    }
    Ok(LpOutcome {
        objective: out.objective,
        x: out.x,
        duals,
    })
}

/// Variable layout: structural columns, then one surplus and one artificial
/// per row.
struct Simplex<'a> {
    m: usize,
    n: usize,
    cols: &'a [Vec<u32>],
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    b_inv: Vec<Vec<f64>>,
    x_b: Vec<f64>,
    deadline: Option<Instant>,
    /// Right-hand side. Starts as all-ones plus a deterministic jitter that
    /// breaks the pervasive ratio-test ties of covering LPs (unit RHS makes
    /// almost every vertex degenerate); the jitter is removed again before
    /// results are extracted. It perturbs only primal values, never dual
    /// feasibility, so the final duals stay exact bounds.
    b: Vec<f64>,
}

fn jitter(r: usize) -> f64 {
    // Deterministic, distinct, tiny.
    let h = (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 40;
    1e-9 * (1.0 + (h % 1024) as f64 / 1024.0)
}

#[derive(Copy, Clone, PartialEq)]
enum Phase {
    One,
    Two,
}

impl<'a> Simplex<'a> {
    fn new(m: usize, cols: &'a [Vec<u32>], deadline: Option<Instant>) -> Self {
        let n = cols.len();
        let total = n + 2 * m;
        let mut basis = Vec::with_capacity(m);
        let mut in_basis = vec![false; total];
        for r in 0..m {
            let a = n + m + r;
            basis.push(a);
            in_basis[a] = true;
        }
        let mut b_inv = vec![vec![0.0; m]; m];
        for (r, row) in b_inv.iter_mut().enumerate() {
            row[r] = 1.0;
        }
        let b: Vec<f64> = (0..m).map(|r| 1.0 + jitter(r)).collect();
        Simplex {
            m,
            n,
            cols,
            basis,
            in_basis,
            b_inv,
            x_b: b.clone(),
            deadline,
            b,
        }
    }

    fn cost(&self, var: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if var >= self.n + self.m {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if var < self.n {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= self.n + self.m
    }

    /// Applies a sparse column to `out += coeff-weighted rows of B^-1`, i.e.
    /// computes w = B^-1 A_j.
    fn ftran(&self, var: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut add = |row: usize, coeff: f64| {
            for i in 0..self.m {
                out[i] += coeff * self.b_inv[i][row];
            }
        };
        if var < self.n {
            for &r in &self.cols[var] {
                add(r as usize, 1.0);
            }
        } else if var < self.n + self.m {
            add(var - self.n, -1.0);
        } else {
            add(var - self.n - self.m, 1.0);
        }
    }

    fn duals(&self, phase: Phase) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (i, &var) in self.basis.iter().enumerate() {
            let c = self.cost(var, phase);
            if c != 0.0 {
                for r in 0..self.m {
                    y[r] += c * self.b_inv[i][r];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, var: usize, y: &[f64], phase: Phase) -> f64 {
        let mut dot = 0.0;
        if var < self.n {
            for &r in &self.cols[var] {
                dot += y[r as usize];
            }
        } else if var < self.n + self.m {
            dot = -y[var - self.n];
        } else {
            dot = y[var - self.n - self.m];
        }
        self.cost(var, phase) - dot
    }

    /// Rebuilds the basis inverse from scratch (Gauss-Jordan with partial
    /// pivoting) and recomputes the basic values; eta updates drift after
    /// enough pivots.
    fn refactorize(&mut self) -> Result<()> {
        let m = self.m;
        let mut mat = vec![vec![0.0f64; m]; m];
        for (i, &var) in self.basis.iter().enumerate() {
            if var < self.n {
                for &r in &self.cols[var] {
                    mat[r as usize][i] = 1.0;
                }
            } else if var < self.n + self.m {
                mat[var - self.n][i] = -1.0;
            } else {
                mat[var - self.n - self.m][i] = 1.0;
            }
        }
        let mut inv = vec![vec![0.0f64; m]; m];
        for (r, row) in inv.iter_mut().enumerate() {
            row[r] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
                .unwrap();
            if mat[piv][col].abs() < 1e-12 {
                return Err(Error::Contract("covering LP: singular basis".into()));
            }
            mat.swap(col, piv);
            inv.swap(col, piv);
            let p = mat[col][col];
            for c in 0..m {
                mat[col][c] /= p;
                inv[col][c] /= p;
            }
            for r in 0..m {
                if r != col && mat[r][col].abs() > 0.0 {
                    let f = mat[r][col];
                    for c in 0..m {
                        mat[r][c] -= f * mat[col][c];
                        inv[r][c] -= f * inv[col][c];
                    }
                }
            }
        }
        self.b_inv = inv;
        for i in 0..m {
            let v: f64 = (0..m).map(|c| self.b_inv[i][c] * self.b[c]).sum();
            self.x_b[i] = if v < 0.0 && v > -1e-9 { 0.0 } else { v };
        }
        Ok(())
    }

    /// Lexicographic ratio test: among minimum-ratio rows, pick the one
    /// whose scaled basis-inverse row is lexicographically smallest. This
    /// rules out cycling under heavy degeneracy (covering LPs have unit
    /// right-hand sides, so ties are the norm). Pivots below `PIVOT_TOL`
    /// destabilize the basis and are used only as a last resort.
    fn choose_leaving(&self, w: &[f64]) -> Option<usize> {
        const PIVOT_TOL: f64 = 1e-7;
        for threshold in [PIVOT_TOL, EPS] {
            let mut best: Option<usize> = None;
            for i in 0..self.m {
                if w[i] <= threshold {
                    continue;
                }
                let Some(b) = best else {
                    best = Some(i);
                    continue;
                };
                let ri = self.x_b[i].max(0.0) / w[i];
                let rb = self.x_b[b].max(0.0) / w[b];
                if ri < rb {
                    best = Some(i);
                } else if ri == rb {
                    for c in 0..self.m {
                        let a = self.b_inv[i][c] / w[i];
                        let d = self.b_inv[b][c] / w[b];
                        if a < d {
                            best = Some(i);
                            break;
                        }
                        if a > d {
                            break;
                        }
                    }
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    /// Entering selection: Dantzig normally; a seeded random choice among
    /// the eligible variables once the walk is stuck on a degenerate
    /// plateau, where the most-negative rule keeps revisiting the same
    /// cluster of bases. Random edges escape such plateaus in practice;
    /// the fixed seed keeps results deterministic.
    fn pick_entering(&self, phase: Phase, rng: Option<&mut ChaCha8Rng>) -> Option<usize> {
        let total = self.n + 2 * self.m;
        let y = self.duals(phase);
        let mut eligible: Vec<usize> = Vec::new();
        let mut entering: Option<(usize, f64)> = None;
        for var in 0..total {
            if self.in_basis[var] {
                continue;
            }
            if phase == Phase::Two && self.is_artificial(var) {
                continue;
            }
            let d = self.reduced_cost(var, &y, phase);
            if d < -1e-7 {
                if rng.is_some() {
                    eligible.push(var);
                } else if entering.map_or(true, |(_, best)| d < best) {
                    entering = Some((var, d));
                }
            }
        }
        match rng {
            Some(rng) if !eligible.is_empty() => {
                Some(eligible[rng.gen_range(0..eligible.len())])
            }
            Some(_) => None,
            None => entering.map(|(var, _)| var),
        }
    }

    fn run_phase(&mut self, phase: Phase) -> Result<()> {
        let max_iters = 5000 + 20 * self.m + self.n / 8;
        let mut degenerate_streak = 0usize;
        let mut since_refactor = 0usize;
        let mut w = vec![0.0; self.m];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ea3);

        for it in 0..max_iters {
            if it % 64 == 0 {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return Err(Error::Contract(
                            "covering LP: time budget exhausted".into(),
                        ));
                    }
                }
            }
            let stuck = degenerate_streak > 32;
            let rng_opt = stuck.then_some(&mut rng);
            let entering = match self.pick_entering(phase, rng_opt) {
                Some(var) => Some(var),
                None => {
                    // Confirm optimality against a fresh factorization.
                    self.refactorize()?;
                    since_refactor = 0;
                    self.pick_entering(phase, None)
                }
            };
            let Some(var_in) = entering else {
                return Ok(());
            };

            self.ftran(var_in, &mut w);

            let Some(row) = self.choose_leaving(&w) else {
                return Err(Error::Contract(
                    "covering LP: unbounded direction encountered".into(),
                ));
            };
            let theta = self.x_b[row].max(0.0) / w[row];

            degenerate_streak = if theta < 1e-7 { degenerate_streak + 1 } else { 0 };

            // Pivot: update basis inverse and basic values.
            let piv = w[row];
            for c in 0..self.m {
                self.b_inv[row][c] /= piv;
            }
            self.x_b[row] = theta;
            for i in 0..self.m {
                if i != row && w[i].abs() > 0.0 {
                    let f = w[i];
                    for c in 0..self.m {
                        self.b_inv[i][c] -= f * self.b_inv[row][c];
                    }
                    self.x_b[i] -= f * theta;
                    if self.x_b[i] < 0.0 && self.x_b[i] > -1e-12 {
                        self.x_b[i] = 0.0;
                    }
                }
            }
            self.in_basis[self.basis[row]] = false;
            self.basis[row] = var_in;
            self.in_basis[var_in] = true;

            since_refactor += 1;
            if since_refactor >= 128 {
                self.refactorize()?;
                since_refactor = 0;
            }
        }
        Err(Error::Contract(
            "covering LP: simplex iteration limit reached".into(),
        ))
    }

    fn objective(&self, phase: Phase) -> f64 {
        self.basis
            .iter()
            .zip(&self.x_b)
            .map(|(&var, &v)| self.cost(var, phase) * v)
            .sum()
    }

    fn solve(mut self) -> Result<LpOutcome> {
        self.run_phase(Phase::One)?;
        if self.objective(Phase::One) > 1e-6 {
            return Err(Error::Contract(
                "covering LP: phase 1 failed to reach feasibility".into(),
            ));
        }
        self.run_phase(Phase::Two)?;

        // Drop the anti-degeneracy jitter and polish from the warm basis.
        self.b = vec![1.0; self.m];
        self.refactorize()?;
        self.run_phase(Phase::Two)?;
        self.refactorize()?;

        let mut x = vec![0.0; self.n];
        for (i, &var) in self.basis.iter().enumerate() {
            if var < self.n {
                x[var] = self.x_b[i].max(0.0);
            }
        }
        let duals = self.duals(Phase::Two);
        Ok(LpOutcome {
            objective: self.objective(Phase::Two),
            x,
            duals,
        })
    }
}
