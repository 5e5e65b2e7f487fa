//! Shared fixtures and independent brute-force oracles for integration and
//! acceptance tests.
//!
//! The oracles here deliberately avoid the production code paths: edge sets
//! are `u64` masks, bicliques are found by literal subset enumeration (or a
//! plain pivot-less recursion for slightly larger graphs, itself validated
//! against the literal method), and minimum covers come from a
//! subset-lattice dynamic program.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rolemine_core::graph::{AccessMatrix, EdgeId, EdgeSet};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

/// The 5x5 worked example shipped in `data/demo.edges`.
pub fn demo_matrix() -> AccessMatrix {
    rolemine_core::io::load_edge_list(&data_path("demo.edges")).unwrap()
}

/// Random bipartite graph with up to `max_edges` edges on small vertex sets.
pub fn random_matrix(rng: &mut ChaCha8Rng, max_users: usize, max_perms: usize, max_edges: usize) -> AccessMatrix {
    loop {
        let nu = rng.gen_range(1..=max_users);
        let np = rng.gen_range(1..=max_perms);
        let want = rng.gen_range(1..=max_edges.min(nu * np));
        let mut pairs = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..want * 3 {
            if pairs.len() >= want {
                break;
            }
            let u = rng.gen_range(0..nu);
            let p = rng.gen_range(0..np);
            if seen.insert((u, p)) {
                pairs.push((format!("u{u}"), format!("p{p}")));
            }
        }
        if !pairs.is_empty() {
            return AccessMatrix::from_pairs(pairs).unwrap();
        }
    }
}

/// Pairwise adjacency among `items`, judged against `universe`, as one u64
/// mask per item (bit j set iff items[i] ~ items[j], i != j).
pub fn adjacency_masks(m: &AccessMatrix, items: &[EdgeId], universe: &EdgeSet) -> Vec<u64> {
    assert!(items.len() <= 64);
    let mut adj = vec![0u64; items.len()];
    for i in 0..items.len() {
        for j in 0..items.len() {
            if i != j && m.edges_adjacent(items[i], items[j], universe) {
                adj[i] |= 1 << j;
            }
        }
    }
    adj
}

fn mask_is_pairwise_adjacent(mask: u64, adj: &[u64]) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (mask & !(1 << i)) & !adj[i] != 0 {
            return false;
        }
    }
    true
}

/// Every nonempty pairwise-adjacent subset of `items` (i.e. every biclique,
/// encoded as a mask), by literal enumeration of all subsets. Items count
/// must stay small.
pub fn all_biclique_masks(adj: &[u64]) -> Vec<u64> {
    let n = adj.len();
    assert!(n <= 16, "subset enumeration: {n} items is too many");
    let mut out = Vec::new();
    for mask in 1..(1u64 << n) {
        if mask_is_pairwise_adjacent(mask, adj) {
            out.push(mask);
        }
    }
    out
}

/// Maximal pairwise-adjacent subsets via the literal method: enumerate all
/// bicliques, keep those with no strict superset among them.
pub fn maximal_biclique_masks_subsets(adj: &[u64]) -> Vec<u64> {
    let all = all_biclique_masks(adj);
    let set: std::collections::HashSet<u64> = all.iter().copied().collect();
    let n = adj.len();
    all.into_iter()
        .filter(|&mask| {
            (0..n).all(|v| mask & (1 << v) != 0 || !set.contains(&(mask | (1 << v))))
        })
        .collect()
}

/// Maximal pairwise-adjacent subsets via a plain pivot-less recursion over
/// masks; handles up to 64 items. Cross-validated against the subset method
/// in the acceptance suite.
pub fn maximal_biclique_masks(adj: &[u64]) -> Vec<u64> {
    fn rec(r: u64, p: u64, x: u64, adj: &[u64], out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            if r != 0 {
                out.push(r);
            }
            return;
        }
        let mut iter = p;
        let mut p = p;
        let mut x = x;
        while iter != 0 {
            let v = iter.trailing_zeros() as usize;
            iter &= iter - 1;
            rec(r | 1 << v, p & adj[v], x & adj[v], adj, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    let mut out = Vec::new();
    let full = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    rec(0, full, 0, adj, &mut out);
    out.sort_unstable();
    out
}

/// Minimum number of candidate masks needed to cover `full`, by dynamic
/// programming over the subset lattice. `full` must use the low bits
/// contiguously (items are indexed 0..n).
pub fn min_cover_dp(full: u64, candidates: &[u64]) -> usize {
    if full == 0 {
        return 0;
    }
    let n = 64 - full.leading_zeros() as usize;
    assert!(full == (1u64 << n) - 1, "items must be dense in 0..n");
    let mut by_bit: Vec<Vec<u64>> = vec![Vec::new(); n];
    for &c in candidates {
        let c = c & full;
        if c != 0 {
            by_bit[c.trailing_zeros() as usize].push(c);
        }
    }
    // Every item must be coverable.
    for (b, bucket) in by_bit.iter().enumerate() {
        assert!(
            candidates.iter().any(|&c| c & (1 << b) != 0),
            "item {b} is not coverable"
        );
        let _ = bucket;
    }
    let size = 1usize << n;
    let mut f = vec![u32::MAX; size];
    f[0] = 0;
    for mask in 1..size as u64 {
        let low = mask.trailing_zeros() as usize;
        let mut best = u32::MAX;
        for &c in candidates {
            if c & (1 << low) != 0 {
                let rest = mask & !c;
                let sub = f[rest as usize];
                if sub != u32::MAX && sub + 1 < best {
                    best = sub + 1;
                }
            }
        }
        f[mask as usize] = best;
    }
    f[full as usize] as usize
}

/// Def-style dominance oracle: `d` dominates `e` iff every maximal biclique
/// containing `e` also contains `d` (indices into `items`).
pub fn dominates_oracle(maximal: &[u64], d: usize, e: usize) -> bool {
    maximal
        .iter()
        .filter(|&&c| c & (1 << e) != 0)
        .all(|&c| c & (1 << d) != 0)
}

/// Brute-force minimum biclique cover of a whole matrix, searching over all
/// pairwise-adjacent edge subsets.
pub fn min_cover_bruteforce(m: &AccessMatrix) -> usize {
    let items: Vec<EdgeId> = m.edge_ids().collect();
    let universe = m.full_edge_set();
    let adj = adjacency_masks(m, &items, &universe);
    let candidates = all_biclique_masks(&adj);
    let full = if items.len() == 64 {
        u64::MAX
    } else {
        (1u64 << items.len()) - 1
    };
    min_cover_dp(full, &candidates)
}
