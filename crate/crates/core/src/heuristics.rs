//! Heuristics: the prior greedy + lattice baseline, the large-biclique
//! phase for hard instances, and user-partition pieces for the hardest.
//!
//! The greedy baseline repeatedly picks a vertex by degree, adopts the
//! biclique spanned by its neighbourhood as a role and deletes those edges.
//! It runs on the original matrix (it cannot use dominator bookkeeping).
//! The large-biclique phase runs after the reduction instead: while the
//! instance stays hard, it adopts any maximal biclique with enough fresh
//! edges as a role and removes them, until the remainder is easy enough for
//! the exact solver.


use std::time::Instant;

use fixedbitset::FixedBitSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cover::{build_cover_instance, mine_exact, solve_min_cover_exact, MineConfig};
use crate::enumeration::{enumerate_maximal_bicliques, EnumContext};
use crate::error::{Error, Result};
use crate::graph::{AccessMatrix, Biclique, EdgeSet};
use crate::policy::{verify_policy, Provenance, RbacPolicy, Role};
use crate::progress::Progress;
use crate::reduction::{expand_roles, reduce};
use crate::report::MineStats;

/// Vertex-selection rule for the greedy baseline.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum GreedyStrategy {
    SmallestDegree,
    LargestDegree,
}

/// Greedy role extraction: pick a vertex `v` by residual degree (ties
/// broken by a seeded uniform choice), take `S` = its residual neighbours,
/// `T` = every vertex adjacent to all of `S`, adopt `T x S` as a role,
/// delete its edges, repeat until no edge remains.
pub fn greedy_cover(m: &AccessMatrix, strategy: GreedyStrategy, seed: u64) -> RbacPolicy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual = m.full_edge_set();
    let nu = m.user_count();
    let np = m.perm_count();
    let mut user_deg: Vec<usize> = (0..nu as u32).map(|u| m.user_degree(u)).collect();
    let mut perm_deg: Vec<usize> = (0..np as u32).map(|p| m.perm_degree(p)).collect();
    let mut remaining = m.edge_count();

    let mut roles = Vec::new();
    while remaining > 0 {
        // Users and permissions share one candidate pool; vertex index v in
        // 0..nu is a user, nu..nu+np a permission.
        let mut best: Option<usize> = None;
        let mut ties: Vec<usize> = Vec::new();
        for v in 0..nu + np {
            let d = if v < nu {
                user_deg[v]
            } else {
                perm_deg[v - nu]
            };
            if d == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => match strategy {
                    GreedyStrategy::SmallestDegree => d < b,
                    GreedyStrategy::LargestDegree => d > b,
                },
            };
            if better {
                best = Some(d);
                ties.clear();
                ties.push(v);
            } else if best == Some(d) {
                ties.push(v);
            }
        }
        let v = ties[rng.gen_range(0..ties.len())];

        let (users, perms) = if v < nu {
            let u = v as u32;
            // S: permissions of u; T: users holding all of S.
            let s: Vec<u32> = residual.perms_of_user(u).ones().map(|p| p as u32).collect();
            let mut t: FixedBitSet = residual.users_of_perm(s[0]).clone();
            for &p in &s[1..] {
                t.intersect_with(residual.users_of_perm(p));
            }
            (t.ones().map(|x| x as u32).collect::<Vec<_>>(), s)
        } else {
            let p = (v - nu) as u32;
            let s: Vec<u32> = residual.users_of_perm(p).ones().map(|u| u as u32).collect();
            let mut t: FixedBitSet = residual.perms_of_user(s[0]).clone();
            for &u in &s[1..] {
                t.intersect_with(residual.perms_of_user(u));
            }
            (s, t.ones().map(|x| x as u32).collect::<Vec<_>>())
        };

        for &u in &users {
            for &p in &perms {
                let e = m.edge_between(u, p).expect("role edge must exist");
                if residual.contains(e) {
                    residual.remove(m, e);
                    user_deg[u as usize] -= 1;
                    perm_deg[p as usize] -= 1;
                    remaining -= 1;
                }
            }
        }
        roles.push(Role::new(users, perms, Provenance::Greedy));
    }
    RbacPolicy::new(roles)
}

/// Fixpoint rewrite: whenever some role's permission set contains the union
/// of other roles' permission sets, narrow it to the uncovered remainder
/// (dropping it entirely when nothing remains) and hand its users to the
/// covering roles. Role count never increases; soundness is preserved.
pub fn lattice_postprocess(m: &AccessMatrix, pol: &RbacPolicy) -> Result<RbacPolicy> {
    if !verify_policy(m, pol).is_sound() {
        return Err(Error::Contract(
            "lattice postprocessing requires a sound input policy".into(),
        ));
    }

    struct Entry {
        users: Vec<u32>,
        perms: FixedBitSet,
        sig: u64,
        provenance: Provenance,
        alive: bool,
    }
    fn signature(perms: &FixedBitSet) -> u64 {
        perms.ones().fold(0u64, |acc, p| acc | 1 << (p % 64))
    }

    let np = m.perm_count();
    let mut entries: Vec<Entry> = pol
        .roles
        .iter()
        .map(|r| {
            let mut bits = FixedBitSet::with_capacity(np);
            for &p in &r.perms {
                bits.insert(p as usize);
            }
            let sig = signature(&bits);
            Entry {
                users: r.users.clone(),
                perms: bits,
                sig,
                provenance: r.provenance,
                alive: true,
            }
        })
        .collect();

    loop {
        let mut changed = false;
        // Scan candidates r by descending permission count.
        let mut order: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].alive).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(entries[i].perms.count_ones(..)), i));
        for &ri in &order {
            if !entries[ri].alive || entries[ri].perms.count_ones(..) == 0 {
                continue;
            }
            // Subset roles, largest first, greedily while they add coverage.
            let mut cands: Vec<usize> = (0..entries.len())
                .filter(|&k| {
                    k != ri
                        && entries[k].alive
                        && entries[k].perms.count_ones(..) > 0
                        && entries[k].sig & !entries[ri].sig == 0
                        && entries[k].perms.is_subset(&entries[ri].perms)
                })
                .collect();
            if cands.is_empty() {
                continue;
            }
            cands.sort_by_key(|&k| (std::cmp::Reverse(entries[k].perms.count_ones(..)), k));
            let mut remainder = entries[ri].perms.clone();
            let mut chosen = Vec::new();
            for k in cands {
                if entries[k].perms.ones().any(|p| remainder.contains(p)) {
                    remainder.difference_with(&entries[k].perms);
                    chosen.push(k);
                }
            }
            if chosen.is_empty() {
                continue;
            }
            let users = entries[ri].users.clone();
            for k in &chosen {
                let merged = &mut entries[*k].users;
                merged.extend(users.iter().copied());
                merged.sort_unstable();
                merged.dedup();
            }
            if remainder.count_ones(..) == 0 {
                entries[ri].alive = false;
            } else {
                entries[ri].sig = signature(&remainder);
                entries[ri].perms = remainder;
                entries[ri].provenance = Provenance::Lattice;
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let roles = entries
        .into_iter()
        .filter(|e| e.alive)
        .map(|e| {
            Role::new(
                e.users,
                e.perms.ones().map(|p| p as u32).collect(),
                e.provenance,
            )
        })
        .collect();
    let out = RbacPolicy::new(roles);
    debug_assert!(verify_policy(m, &out).is_sound());
    debug_assert!(out.role_count() <= pol.role_count());
    Ok(out)
}

/// Role counts from both greedy strategies, before and after the lattice
/// pass.
#[derive(Clone, Debug)]
pub struct PriorHeuristicStats {
    pub smallest_greedy: usize,
    pub smallest_lattice: usize,
    pub largest_greedy: usize,
    pub largest_lattice: usize,
}

/// The prior baseline: run greedy with both degree strategies, post-process
/// each with the lattice rewrite, keep whichever ends smaller.
pub fn run_prior_heuristic(
    m: &AccessMatrix,
    seed: u64,
) -> Result<(RbacPolicy, PriorHeuristicStats)> {
    let g_small = greedy_cover(m, GreedyStrategy::SmallestDegree, seed);
    let l_small = lattice_postprocess(m, &g_small)?;
    let g_large = greedy_cover(m, GreedyStrategy::LargestDegree, seed);
    let l_large = lattice_postprocess(m, &g_large)?;
    let stats = PriorHeuristicStats {
        smallest_greedy: g_small.role_count(),
        smallest_lattice: l_small.role_count(),
        largest_greedy: g_large.role_count(),
        largest_lattice: l_large.role_count(),
    };
    let best = if l_small.role_count() <= l_large.role_count() {
        l_small
    } else {
        l_large
    };
    Ok((best, stats))
}

/// While the instance is hard (more maximal bicliques than the threshold),
/// adopt a maximal biclique with at least `large_edge_threshold` fresh
/// edges as a role, remove its edges, and re-check. The count and the
/// search for a large biclique share one enumeration pass per round.
/// Returns the adopted roles and the shrunken active set.
pub fn large_biclique_phase(
    m: &AccessMatrix,
    mut active: EdgeSet,
    universe: &EdgeSet,
    cfg: &MineConfig,
    progress: &mut Progress,
) -> (Vec<Biclique>, EdgeSet) {
    let mut adopted: Vec<Biclique> = Vec::new();
    loop {
        if active.is_empty() {
            break;
        }
        let ctx = EnumContext::new(m, active.clone(), universe.clone())
            .with_threshold(cfg.count_threshold);
        let mut count = 0u64;
        let mut tripped = false;
        let mut large: Option<Biclique> = None;
        let mut biggest: Option<Biclique> = None;
        for b in enumerate_maximal_bicliques(&ctx) {
            count += 1;
            if count % 4096 == 0 {
                progress.heartbeat("large-bicliques", count, "maximal bicliques");
            }
            if b.edge_count() >= cfg.large_edge_threshold && large.is_none() {
                large = Some(b.clone());
            }
            if biggest
                .as_ref()
                .map_or(true, |best| b.edge_count() > best.edge_count())
            {
                biggest = Some(b);
            }
            if count > cfg.count_threshold {
                tripped = true;
                if large.is_some() {
                    break;
                }
            }
        }
        if !tripped {
            break; // easy now
        }
        // Adopt the first sufficiently large biclique; if none exists at
        // all, fall back to the biggest seen so the phase still terminates.
        let role = large.or(biggest).expect("nonempty active set");
        for &e in role.edges() {
            active.remove(m, e);
        }
        progress.trace(|| {
            format!(
                "adopt large maximal biclique: {} edges, {} active left",
                role.edge_count(),
                active.len()
            )
        });
        adopted.push(role);
    }
    (adopted, active)
}

/// Pipeline for hard instances: reduce, peel large maximal bicliques until
/// the remainder is easy, solve the remainder exactly, play the log back.
pub fn mine_hard(
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

    let universe = m.full_edge_set();
    let t = Instant::now();
    let (large_roles, remaining) =
        large_biclique_phase(m, state.active().clone(), &universe, config, progress);
    stats.heuristic_secs = t.elapsed().as_secs_f64();
    stats.large_roles = large_roles.len();

    let mut roles: Vec<Role> = large_roles
        .iter()
        .map(|b| Role::from_biclique(b, Provenance::LargeBiclique))
        .collect();

    if !remaining.is_empty() {
        let ctx = EnumContext::new(m, remaining, universe.clone())
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
        roles.extend(
            sol.selected
                .iter()
                .map(|&j| Role::from_biclique(&inst.columns[j], Provenance::ExactCover)),
        );
    }

    let policy = expand_roles(m, &state, &RbacPolicy::new(roles))?;
    stats.total_roles = policy.role_count();
    Ok((policy, stats))
}

/// Splits the users into `n_pieces` contiguous blocks of near-equal size
/// (remainder spread over the first blocks); each piece carries its users'
/// edges and the permissions they touch.
pub fn split_pieces(m: &AccessMatrix, n_pieces: usize) -> Result<Vec<AccessMatrix>> {
    if n_pieces < 1 {
        return Err(Error::InvalidArgument("piece count must be at least 1".into()));
    }
    if n_pieces > m.user_count() {
        return Err(Error::InvalidArgument(format!(
            "cannot split {} users into {n_pieces} pieces",
            m.user_count()
        )));
    }
    let nu = m.user_count();
    let base = nu / n_pieces;
    let extra = nu % n_pieces;
    let mut pieces = Vec::with_capacity(n_pieces);
    let mut start = 0usize;
    for i in 0..n_pieces {
        let len = base + usize::from(i < extra);
        let mut pairs = Vec::new();
        for u in start..start + len {
            for p in m.perms_of_user(u as u32).ones() {
                pairs.push((
                    m.user_name(u as u32).to_owned(),
                    m.perm_name(p as u32).to_owned(),
                ));
            }
        }
        pieces.push(AccessMatrix::from_pairs(pairs)?);
        start += len;
    }
    Ok(pieces)
}

/// Pipeline for the hardest instances: mine each user-piece independently
/// (in parallel), combine the role sets, then reduce the union with the
/// lattice rewrite.
pub fn mine_hardest(
    m: &AccessMatrix,
    config: &MineConfig,
    progress: &mut Progress,
) -> Result<(RbacPolicy, MineStats)> {
    if config.pieces < 2 {
        return Err(Error::InvalidArgument(
            "piece mining requires at least 2 pieces".into(),
        ));
    }
    let mut stats = MineStats::new(m.edge_count());
    let pieces = split_pieces(m, config.pieces)?;

    let t = Instant::now();
    let mined: Vec<(RbacPolicy, MineStats)> = pieces
        .par_iter()
        .map(|piece| mine_hard(piece, config, &mut Progress::silent()))
        .collect::<Result<Vec<_>>>()?;
    stats.heuristic_secs = t.elapsed().as_secs_f64();

    // Re-resolve piece-local indices through identifier names.
    let mut roles = Vec::new();
    for (piece, (policy, piece_stats)) in pieces.iter().zip(&mined) {
        stats.active_edges += piece_stats.active_edges;
        stats.forced_roles += piece_stats.forced_roles;
        stats.large_roles += piece_stats.large_roles;
        stats.cover_roles += piece_stats.cover_roles;
        for role in &policy.roles {
            let users = role
                .users
                .iter()
                .map(|&u| m.user_id(piece.user_name(u)).expect("piece user in parent"))
                .collect();
            let perms = role
                .perms
                .iter()
                .map(|&p| m.perm_id(piece.perm_name(p)).expect("piece perm in parent"))
                .collect();
            roles.push(Role::new(users, perms, role.provenance));
        }
    }
    let combined = RbacPolicy::new(roles);
    stats.greedy_roles = Some(combined.role_count());
    progress.heartbeat("combine", combined.role_count() as u64, "roles");

    let t = Instant::now();
    let out = lattice_postprocess(m, &combined)?;
    stats.solve_secs = t.elapsed().as_secs_f64();
    stats.lattice_roles = Some(out.role_count());
    stats.total_roles = out.role_count();
    Ok((out, stats))
}

/// Percentage error of a role count against a known bound.
pub fn error_pct(found: usize, bound: usize) -> Result<f64> {
    if bound < 1 {
        return Err(Error::InvalidArgument("known bound must be at least 1".into()));
    }
    Ok((found as f64 - bound as f64) * 100.0 / bound as f64)
}

/// Convenience for callers routing on instance difficulty: exact pipeline
/// when easy, hard pipeline otherwise.
pub fn mine_auto(
    m: &AccessMatrix,
    config: &MineConfig,
    progress: &mut Progress,
) -> Result<(RbacPolicy, MineStats)> {
    match mine_exact(m, config, progress) {
        Err(Error::InstanceHard { .. }) => mine_hard(m, config, progress),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(mu: usize, np: usize) -> AccessMatrix {
        let mut pairs = Vec::new();
        for u in 0..mu {
            for p in 0..np {
                pairs.push((format!("u{u}"), format!("p{p}")));
            }
        }
        AccessMatrix::from_pairs(pairs).unwrap()
    }

    #[test]
    fn greedy_on_complete_bipartite_is_one_role() {
        let m = complete(3, 4);
        for strategy in [GreedyStrategy::SmallestDegree, GreedyStrategy::LargestDegree] {
            let pol = greedy_cover(&m, strategy, 7);
            assert_eq!(pol.role_count(), 1);
            assert!(verify_policy(&m, &pol).is_sound());
        }
    }

    #[test]
    fn greedy_single_edge() {
        let m = AccessMatrix::from_pairs([("u", "p")]).unwrap();
        let pol = greedy_cover(&m, GreedyStrategy::SmallestDegree, 0);
        assert_eq!(pol.role_count(), 1);
    }

    #[test]
    fn lattice_drops_exactly_partitioned_role() {
        // r grants {p0,p1}; r1 grants {p0}; r2 grants {p1}: r is redundant.
        let m = AccessMatrix::from_pairs([
            ("u0", "p0"),
            ("u0", "p1"),
            ("u1", "p0"),
            ("u2", "p1"),
        ])
        .unwrap();
        let pol = RbacPolicy::new(vec![
            Role::new(vec![0], vec![0, 1], Provenance::Greedy),
            Role::new(vec![1], vec![0], Provenance::Greedy),
            Role::new(vec![2], vec![1], Provenance::Greedy),
        ]);
        let out = lattice_postprocess(&m, &pol).unwrap();
        assert_eq!(out.role_count(), 2);
        assert!(verify_policy(&m, &out).is_sound());
    }

    #[test]
    fn lattice_fixpoint_is_stable() {
        let m = complete(2, 2);
        let pol = RbacPolicy::new(vec![Role::new(vec![0, 1], vec![0, 1], Provenance::Greedy)]);
        let out = lattice_postprocess(&m, &pol).unwrap();
        assert_eq!(out.role_count(), 1);
    }

    #[test]
    fn lattice_rejects_unsound_input() {
        let m = complete(2, 2);
        let pol = RbacPolicy::new(vec![Role::new(vec![0], vec![0], Provenance::Greedy)]);
        assert!(matches!(
            lattice_postprocess(&m, &pol),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn split_pieces_partitions_users_and_edges() {
        let m = complete(10, 3);
        let pieces = split_pieces(&m, 3).unwrap();
        let sizes: Vec<usize> = pieces.iter().map(|p| p.user_count()).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        let total_edges: usize = pieces.iter().map(|p| p.edge_count()).sum();
        assert_eq!(total_edges, m.edge_count());
    }

    #[test]
    fn split_single_piece_is_identity() {
        let m = complete(4, 2);
        let pieces = split_pieces(&m, 1).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].edge_count(), m.edge_count());
    }

    #[test]
    fn split_rejects_bad_counts() {
        let m = complete(2, 2);
        assert!(split_pieces(&m, 0).is_err());
        assert!(split_pieces(&m, 3).is_err());
    }

    #[test]
    fn error_pct_examples() {
        assert_eq!(error_pct(99, 30).unwrap(), 230.0);
        assert_eq!(error_pct(30, 30).unwrap(), 0.0);
        assert!(error_pct(1, 0).is_err());
        let e = error_pct(3012, 2000).unwrap();
        assert_eq!(e.round() as i64, 51);
    }

    #[test]
    fn large_phase_is_noop_on_easy_instances() {
        let m = complete(3, 3);
        let universe = m.full_edge_set();
        let cfg = MineConfig::default();
        let (roles, active) =
            large_biclique_phase(&m, m.full_edge_set(), &universe, &cfg, &mut Progress::silent());
        assert!(roles.is_empty());
        assert_eq!(active.len(), m.edge_count());
    }

    #[test]
    fn mine_hard_equals_exact_on_easy_instance() {
        let m = complete(3, 3);
        let cfg = MineConfig::default();
        let (exact, _) = mine_exact(&m, &cfg, &mut Progress::silent()).unwrap();
        let (hard, stats) = mine_hard(&m, &cfg, &mut Progress::silent()).unwrap();
        assert_eq!(exact.role_count(), hard.role_count());
        assert_eq!(stats.large_roles, 0);
        assert!(verify_policy(&m, &hard).is_sound());
    }

    #[test]
    fn mine_hardest_is_sound_with_pieces() {
        let m = complete(6, 3);
        let cfg = MineConfig {
            pieces: 2,
            ..MineConfig::default()
        };
        let (pol, stats) = mine_hardest(&m, &cfg, &mut Progress::silent()).unwrap();
        assert!(verify_policy(&m, &pol).is_sound());
        assert!(stats.total_roles >= 1);
    }
}
