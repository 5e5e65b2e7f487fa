//! Bipartite access-matrix data model and edge adjacency.
//!
//! An access matrix is a bipartite graph: users on one side, permissions on
//! the other, an edge meaning "user holds permission". Most algorithms in
//! this crate work on *edges* as first-class items, with adjacency in the
//! sense of [`AccessMatrix::edges_adjacent`]: two edges are adjacent exactly
//! when the subgraph induced by their four endpoints is complete bipartite.
//! A set of pairwise-adjacent edges always spans a biclique, which is what
//! makes edge adjacency the right primitive for role mining.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Dense handle for one (user, permission) edge, stable for the lifetime of
/// its [`AccessMatrix`]. Ids are contiguous in `0..matrix.edge_count()`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Immutable bipartite graph of users and permissions.
///
/// Vertices are interned to dense indices in first-appearance order; edges
/// get dense [`EdgeId`]s in insertion order. Per-vertex adjacency is kept as
/// bitsets so that adjacency and neighbourhood queries reduce to word-level
/// intersections.
#[derive(Debug)]
pub struct AccessMatrix {
    users: Vec<String>,
    perms: Vec<String>,
    user_index: HashMap<String, u32>,
    perm_index: HashMap<String, u32>,
    /// Endpoints by edge id: (user index, perm index).
    edges: Vec<(u32, u32)>,
    edge_index: HashMap<(u32, u32), u32>,
    /// Per user: bitset over permission indices.
    user_perms: Vec<FixedBitSet>,
    /// Per permission: bitset over user indices.
    perm_users: Vec<FixedBitSet>,
    /// Vertices present in the input but dropped because they had no edges.
    dropped_users: Vec<String>,
    dropped_perms: Vec<String>,
}

impl AccessMatrix {
    /// Builds a matrix from (user, permission) name pairs. Duplicates are
    /// merged; vertex and edge order is first appearance.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut b = Builder::default();
        for (u, p) in pairs {
            b.add_edge(u.as_ref(), p.as_ref());
        }
        b.finish()
    }

    pub(crate) fn builder() -> Builder {
        Builder::default()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn perm_count(&self) -> usize {
        self.perms.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn user_name(&self, u: u32) -> &str {
        &self.users[u as usize]
    }

    pub fn perm_name(&self, p: u32) -> &str {
        &self.perms[p as usize]
    }

    pub fn user_id(&self, name: &str) -> Option<u32> {
        self.user_index.get(name).copied()
    }

    pub fn perm_id(&self, name: &str) -> Option<u32> {
        self.perm_index.get(name).copied()
    }

    /// Endpoints of an edge as (user index, perm index).
    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (u32, u32) {
        self.edges[e.index()]
    }

    #[inline]
    pub fn edge_between(&self, user: u32, perm: u32) -> Option<EdgeId> {
        self.edge_index.get(&(user, perm)).map(|&i| EdgeId(i))
    }

    #[inline]
    pub fn has_edge(&self, user: u32, perm: u32) -> bool {
        self.user_perms[user as usize].contains(perm as usize)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    /// Permission bitset of one user (full graph).
    pub fn perms_of_user(&self, u: u32) -> &FixedBitSet {
        &self.user_perms[u as usize]
    }

    /// User bitset of one permission (full graph).
    pub fn users_of_perm(&self, p: u32) -> &FixedBitSet {
        &self.perm_users[p as usize]
    }

    pub fn user_degree(&self, u: u32) -> usize {
        self.user_perms[u as usize].count_ones(..)
    }

    pub fn perm_degree(&self, p: u32) -> usize {
        self.perm_users[p as usize].count_ones(..)
    }

    /// Input vertices dropped during ingestion because they had no edges.
    pub fn dropped_vertices(&self) -> (&[String], &[String]) {
        (&self.dropped_users, &self.dropped_perms)
    }

    /// Edge set containing every edge of the matrix.
    pub fn full_edge_set(&self) -> EdgeSet {
        EdgeSet {
            bits: {
                let mut b = FixedBitSet::with_capacity(self.edges.len());
                b.insert_range(..);
                b
            },
            user_perms: self.user_perms.clone(),
            perm_users: self.perm_users.clone(),
            len: self.edges.len(),
        }
    }

    /// Empty edge set sized for this matrix.
    pub fn empty_edge_set(&self) -> EdgeSet {
        EdgeSet {
            bits: FixedBitSet::with_capacity(self.edges.len()),
            user_perms: vec![FixedBitSet::with_capacity(self.perms.len()); self.users.len()],
            perm_users: vec![FixedBitSet::with_capacity(self.users.len()); self.perms.len()],
            len: 0,
        }
    }

    /// True iff edges `e` and `f` are adjacent when membership is judged
    /// against `universe`: all (at most four) edges among their endpoint
    /// combinations lie in `universe`. Reflexive by definition.
    ///
    /// Both `e` and `f` are expected to be members of `universe`.
    pub fn edges_adjacent(&self, e: EdgeId, f: EdgeId, universe: &EdgeSet) -> bool {
        debug_assert!(universe.contains(e) && universe.contains(f));
        if e == f {
            return true;
        }
        let (a, b) = self.endpoints(e);
        let (c, d) = self.endpoints(f);
        universe.has_pair(a, d) && universe.has_pair(c, b)
    }

    /// Writes into `out` the set `{ f in within : f != e, adjacent(e, f) }`
    /// with adjacency judged against `universe`. `out` is cleared first.
    pub fn neighbours_into(
        &self,
        e: EdgeId,
        universe: &EdgeSet,
        within: &EdgeSet,
        out: &mut FixedBitSet,
    ) {
        out.clear();
        let (a, b) = self.endpoints(e);
        let a_perms = &universe.user_perms[a as usize];
        for c in universe.perm_users[b as usize].ones() {
            // (c, b) in universe; candidates f = (c, d) with d held by both.
            for d in within.user_perms[c].intersection(a_perms) {
                let id = self.edge_index[&(c as u32, d as u32)];
                out.insert(id as usize);
            }
        }
        out.set(e.index(), false);
    }

    /// Neighbour edges of `e` in ascending id order; see [`Self::neighbours_into`].
    pub fn neighbours(&self, e: EdgeId, universe: &EdgeSet, within: &EdgeSet) -> Vec<EdgeId> {
        let mut bits = FixedBitSet::with_capacity(self.edges.len());
        self.neighbours_into(e, universe, within, &mut bits);
        bits.ones().map(|i| EdgeId(i as u32)).collect()
    }

    /// True iff every (user, perm) pair of `users x perms` is an edge of
    /// `universe`, i.e. the induced subgraph is complete bipartite.
    pub fn induced_is_biclique(&self, users: &[u32], perms: &[u32], universe: &EdgeSet) -> bool {
        users
            .iter()
            .all(|&u| perms.iter().all(|&p| universe.has_pair(u, p)))
    }
}

/// Incremental builder used by the ingestion routines.
#[derive(Default)]
pub(crate) struct Builder {
    users: Vec<String>,
    perms: Vec<String>,
    user_index: HashMap<String, u32>,
    perm_index: HashMap<String, u32>,
    edges: Vec<(u32, u32)>,
    edge_index: HashMap<(u32, u32), u32>,
    dropped_users: Vec<String>,
    dropped_perms: Vec<String>,
}

impl Builder {
    pub(crate) fn add_edge(&mut self, user: &str, perm: &str) {
        let u = intern(&mut self.users, &mut self.user_index, user);
        let p = intern(&mut self.perms, &mut self.perm_index, perm);
        if !self.edge_index.contains_key(&(u, p)) {
            self.edge_index.insert((u, p), self.edges.len() as u32);
            self.edges.push((u, p));
        }
    }

    /// Records a vertex that appeared in the input without any edge.
    pub(crate) fn add_isolated_user(&mut self, name: &str) {
        self.dropped_users.push(name.to_owned());
    }

    pub(crate) fn add_isolated_perm(&mut self, name: &str) {
        self.dropped_perms.push(name.to_owned());
    }

    pub(crate) fn finish(self) -> Result<AccessMatrix> {
        if self.edges.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let nu = self.users.len();
        let np = self.perms.len();
        let mut user_perms = vec![FixedBitSet::with_capacity(np); nu];
        let mut perm_users = vec![FixedBitSet::with_capacity(nu); np];
        for &(u, p) in &self.edges {
            user_perms[u as usize].insert(p as usize);
            perm_users[p as usize].insert(u as usize);
        }
        let m = AccessMatrix {
            users: self.users,
            perms: self.perms,
            user_index: self.user_index,
            perm_index: self.perm_index,
            edges: self.edges,
            edge_index: self.edge_index,
            user_perms,
            perm_users,
            dropped_users: self.dropped_users,
            dropped_perms: self.dropped_perms,
        };
        debug_assert_eq!(
            m.edge_count(),
            (0..m.user_count() as u32)
                .map(|u| m.user_degree(u))
                .sum::<usize>()
        );
        debug_assert_eq!(
            m.edge_count(),
            (0..m.perm_count() as u32)
                .map(|p| m.perm_degree(p))
                .sum::<usize>()
        );
        Ok(m)
    }
}

fn intern(names: &mut Vec<String>, index: &mut HashMap<String, u32>, name: &str) -> u32 {
    if let Some(&i) = index.get(name) {
        return i;
    }
    let i = names.len() as u32;
    names.push(name.to_owned());
    index.insert(name.to_owned(), i);
    i
}

/// A subset of the edges of one [`AccessMatrix`], with per-vertex adjacency
/// bitsets kept in sync so neighbourhood queries restricted to the subset
/// stay word-parallel. Used for both "active" sets and adjacency universes.
#[derive(Clone)]
pub struct EdgeSet {
    bits: FixedBitSet,
    user_perms: Vec<FixedBitSet>,
    perm_users: Vec<FixedBitSet>,
    len: usize,
}

impl EdgeSet {
    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.bits.contains(e.index())
    }

    #[inline]
    pub fn has_pair(&self, user: u32, perm: u32) -> bool {
        self.user_perms[user as usize].contains(perm as usize)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, m: &AccessMatrix, e: EdgeId) {
        if !self.bits.contains(e.index()) {
            let (u, p) = m.endpoints(e);
            self.bits.insert(e.index());
            self.user_perms[u as usize].insert(p as usize);
            self.perm_users[p as usize].insert(u as usize);
            self.len += 1;
        }
    }

    pub fn remove(&mut self, m: &AccessMatrix, e: EdgeId) {
        if self.bits.contains(e.index()) {
            let (u, p) = m.endpoints(e);
            self.bits.set(e.index(), false);
            self.user_perms[u as usize].set(p as usize, false);
            self.perm_users[p as usize].set(u as usize, false);
            self.len -= 1;
        }
    }

    /// Member edges in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits.ones().map(|i| EdgeId(i as u32))
    }

    /// Raw membership bitset over edge ids.
    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    /// Permissions of `u` restricted to this subset.
    pub fn perms_of_user(&self, u: u32) -> &FixedBitSet {
        &self.user_perms[u as usize]
    }

    /// Users of `p` restricted to this subset.
    pub fn users_of_perm(&self, p: u32) -> &FixedBitSet {
        &self.perm_users[p as usize]
    }

    /// Number of distinct endpoint vertices (users + permissions) touched by
    /// member edges.
    pub fn vertex_count(&self) -> usize {
        let users = self.user_perms.iter().filter(|b| b.count_ones(..) > 0).count();
        let perms = self.perm_users.iter().filter(|b| b.count_ones(..) > 0).count();
        users + perms
    }
}

/// A set of edges whose endpoints induce a complete bipartite subgraph.
///
/// `edges` holds the member edges the biclique was built from (for covers
/// over a reduced instance these are the *active* members only); `users` and
/// `perms` are the derived endpoint sets. The full grant of the biclique as
/// a role is `users x perms`, all of which are edges of the source matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Biclique {
    edges: Vec<EdgeId>,
    users: Vec<u32>,
    perms: Vec<u32>,
}

impl Biclique {
    /// Builds a biclique from member edges. Under debug assertions, verifies
    /// that the endpoints induce a complete bipartite subgraph of `universe`.
    pub fn from_edges(m: &AccessMatrix, mut edges: Vec<EdgeId>, universe: &EdgeSet) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut users: Vec<u32> = edges.iter().map(|&e| m.endpoints(e).0).collect();
        let mut perms: Vec<u32> = edges.iter().map(|&e| m.endpoints(e).1).collect();
        users.sort_unstable();
        users.dedup();
        perms.sort_unstable();
        perms.dedup();
        debug_assert!(
            m.induced_is_biclique(&users, &perms, universe),
            "edge set does not span a biclique"
        );
        Biclique { edges, users, perms }
    }

    pub fn single(m: &AccessMatrix, e: EdgeId) -> Self {
        let (u, p) = m.endpoints(e);
        Biclique {
            edges: vec![e],
            users: vec![u],
            perms: vec![p],
        }
    }

    /// Member edges, ascending.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn users(&self) -> &[u32] {
        &self.users
    }

    pub fn perms(&self) -> &[u32] {
        &self.perms
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}
