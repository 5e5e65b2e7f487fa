//! Dominator-based edge reduction.
//!
//! An edge `d` dominates an edge `e` when `d` belongs to every maximal
//! biclique containing `e`; equivalently (and how we test it), when the
//! closed neighbourhood of `d` contains the closed neighbourhood of `e`.
//! A dominator can be dropped from the instance: in any minimum policy its
//! user/permission can ride along on a role through which `e` is granted.
//!
//! [`reduce`] runs the removal to a fixpoint. Neighbourhoods shrink as
//! dominators are removed, so new dominators keep appearing; adjacency
//! itself is always judged against the full edge set, which is also what
//! the downstream enumeration expects. Edges left with no neighbours get a
//! role of their own immediately ("forced" roles). [`expand_roles`] plays
//! the removal log back onto a policy that covers the surviving edges.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{AccessMatrix, Biclique, EdgeId, EdgeSet};
use crate::policy::{GrantIndex, Provenance, RbacPolicy, Role};
use crate::progress::Progress;

/// Outcome of the reduction fixpoint.
pub struct ReductionState {
    active: EdgeSet,
    /// (dominator removed, edge it dominated), in removal order.
    removal_log: Vec<(EdgeId, EdgeId)>,
    forced: Vec<Biclique>,
}

impl ReductionState {
    /// Edges that survived the reduction.
    pub fn active(&self) -> &EdgeSet {
        &self.active
    }

    pub fn removal_log(&self) -> &[(EdgeId, EdgeId)] {
        &self.removal_log
    }

    /// Single-edge roles created for edges that lost all neighbours.
    pub fn forced_roles(&self) -> &[Biclique] {
        &self.forced
    }
}

/// True iff `d` dominates `e`: the closed neighbourhood of `d` contains the
/// closed neighbourhood of `e`, with neighbour sets restricted to `active`
/// and adjacency judged against `universe`.
///
/// Every neighbour of `e` is active by construction, so the containment
/// reduces to pairwise adjacency probes against `d` - two bitset lookups
/// per neighbour, no neighbourhood materialization for `d`.
pub fn dominates(
    m: &AccessMatrix,
    d: EdgeId,
    e: EdgeId,
    active: &EdgeSet,
    universe: &EdgeSet,
) -> bool {
    debug_assert!(d != e && active.contains(d) && active.contains(e));
    let mut nb_e = FixedBitSet::with_capacity(m.edge_count());
    m.neighbours_into(e, universe, active, &mut nb_e);
    if !nb_e.contains(d.index()) {
        return false; // d not adjacent to e, so e itself is not covered
    }
    dominates_given_neighbourhood(m, d, &nb_e, universe)
}

/// The containment check with `e`'s active neighbourhood already in hand.
/// `d` must be one of those neighbours.
fn dominates_given_neighbourhood(
    m: &AccessMatrix,
    d: EdgeId,
    nb_e: &FixedBitSet,
    universe: &EdgeSet,
) -> bool {
    nb_e.ones()
        .all(|f| f == d.index() || m.edges_adjacent(d, EdgeId(f as u32), universe))
}

/// Runs the dominator removal to a fixpoint over `m`.
///
/// Scan order: edges ascending by id; for each edge the first dominating
/// neighbour (ascending) is removed and the edge is re-tested until no
/// neighbour dominates it. Removals take effect immediately. After each
/// sweep, edges with no remaining neighbours become forced roles. The
/// result is deterministic.
pub fn reduce(m: &AccessMatrix, progress: &mut Progress) -> ReductionState {
    let universe = m.full_edge_set();
    let mut active = m.full_edge_set();
    let mut removal_log = Vec::new();
    let mut forced = Vec::new();

    let n = m.edge_count();
    let mut nb_e = FixedBitSet::with_capacity(n);

    let mut iteration = 0usize;
    loop {
        iteration += 1;
        let mut changed = false;

        for idx in 0..n {
            let e = EdgeId(idx as u32);
            if !active.contains(e) {
                continue;
            }
            // Remove dominating neighbours of e until none is left.
            'retest: loop {
                m.neighbours_into(e, &universe, &active, &mut nb_e);
                for cand_idx in nb_e.ones() {
                    let cand = EdgeId(cand_idx as u32);
                    if dominates_given_neighbourhood(m, cand, &nb_e, &universe) {
                        active.remove(m, cand);
                        removal_log.push((cand, e));
                        progress.trace(|| {
                            let (ud, pd) = m.endpoints(cand);
                            let (ue, pe) = m.endpoints(e);
                            format!(
                                "iteration {iteration}: remove ({}, {}) dominating ({}, {})",
                                m.user_name(ud),
                                m.perm_name(pd),
                                m.user_name(ue),
                                m.perm_name(pe)
                            )
                        });
                        changed = true;
                        continue 'retest;
                    }
                }
                break;
            }
            progress.heartbeat("reduce", removal_log.len() as u64, "edges removed");
        }

        // Edges with no neighbours left admit exactly one maximal biclique
        // (themselves); give them a role now.
        for idx in 0..n {
            let e = EdgeId(idx as u32);
            if !active.contains(e) {
                continue;
            }
            m.neighbours_into(e, &universe, &active, &mut nb_e);
            if nb_e.is_clear() {
                active.remove(m, e);
                forced.push(Biclique::single(m, e));
                changed = true;
            }
        }

        if !changed {
            break;
        }
    }

    debug_assert_eq!(
        active.len() + removal_log.len() + forced.len(),
        m.edge_count()
    );
    ReductionState {
        active,
        removal_log,
        forced,
    }
}

/// Attaches every removed dominator back onto a policy that covers the
/// surviving edges, in reverse removal order, and appends the forced roles.
///
/// For a log entry `(d, e)`, the user and permission of `d` are assigned to
/// one role through which `e`'s user acquires `e`'s permission. Reverse
/// order matters: `e` itself may have been removed later than `d`, in which
/// case it has already been re-attached by the time `d` is processed.
pub fn expand_roles(
    m: &AccessMatrix,
    state: &ReductionState,
    remainder_policy: &RbacPolicy,
) -> Result<RbacPolicy> {
    // Contract: the remainder covers every active edge and grants nothing
    // outside the matrix.
    let mut roles: Vec<Role> = remainder_policy.roles.clone();
    roles.extend(
        state
            .forced
            .iter()
            .map(|b| Role::from_biclique(b, Provenance::ReductionForced)),
    );
    let provenance: Vec<Provenance> = roles.iter().map(|r| r.provenance).collect();
    let combined = RbacPolicy::new(roles);
    for role in &combined.roles {
        if role.users.is_empty() || role.perms.is_empty() {
            return Err(Error::Contract("remainder policy has an empty role".into()));
        }
        for &u in &role.users {
            for &p in &role.perms {
                if !m.has_edge(u, p) {
                    return Err(Error::Contract(format!(
                        "remainder policy over-grants ({}, {})",
                        m.user_name(u),
                        m.perm_name(p)
                    )));
                }
            }
        }
    }
    let mut grants = GrantIndex::new(m, &combined);
    for e in state.active.iter() {
        let (u, p) = m.endpoints(e);
        if grants.find(u, p).is_none() {
            return Err(Error::Contract(format!(
                "remainder policy leaves active edge ({}, {}) uncovered",
                m.user_name(u),
                m.perm_name(p)
            )));
        }
    }

    for &(d, e) in state.removal_log.iter().rev() {
        let (ue, pe) = m.endpoints(e);
        let (ud, pd) = m.endpoints(d);
        let role = grants.find(ue, pe).ok_or_else(|| {
            Error::Contract(format!(
                "no role grants ({}, {}) during playback",
                m.user_name(ue),
                m.perm_name(pe)
            ))
        })?;
        grants.add_grant(role, ud, pd);
    }

    Ok(RbacPolicy::new(grants.into_roles(provenance)))
}
