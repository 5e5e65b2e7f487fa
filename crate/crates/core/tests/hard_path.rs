//! The hard-instance pipeline on constructed and benchmark-shaped inputs.

mod common;

use common::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rolemine_core::cover::{mine_exact, MineConfig};
use rolemine_core::enumeration::{count_with_threshold, CountResult, EnumContext};
use rolemine_core::graph::{AccessMatrix, EdgeId};
use rolemine_core::heuristics::{large_biclique_phase, mine_hard, mine_hardest};
use rolemine_core::policy::verify_policy;
use rolemine_core::reduction::reduce;
use rolemine_core::Progress;

fn quiet() -> Progress {
    Progress::silent()
}

/// Two disjoint 15x15 complete blocks plus a handful of stray edges. With
/// the large-edge threshold at 200, the phase must adopt exactly the two
/// blocks (225 fresh edges each) and stop once the remainder counts below
/// the hardness threshold.
#[test]
fn two_complete_blocks_are_adopted_as_large_roles() {
    let mut pairs = Vec::new();
    for u in 0..15 {
        for p in 0..15 {
            pairs.push((format!("a{u}"), format!("q{p}")));
            pairs.push((format!("b{u}"), format!("r{p}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        // Stray edges from block-a users into block-b permissions.
        pairs.push((
            format!("a{}", rng.gen_range(0..15)),
            format!("r{}", rng.gen_range(0..15)),
        ));
    }
    let m = AccessMatrix::from_pairs(pairs).unwrap();
    let universe = m.full_edge_set();

    // Independent oracle: how many maximal bicliques remain once the two
    // blocks are removed? That count, used as the hardness threshold, makes
    // the phase stop exactly after the two block adoptions.
    let mut after_blocks = m.full_edge_set();
    for e in m.edge_ids() {
        let (u, p) = m.endpoints(e);
        let (un, pn) = (m.user_name(u), m.perm_name(p));
        if (un.starts_with('a') && pn.starts_with('q'))
            || (un.starts_with('b') && pn.starts_with('r'))
        {
            after_blocks.remove(&m, e);
        }
    }
    let strays: Vec<EdgeId> = after_blocks.iter().collect();
    assert!(strays.len() <= 10);
    let adj = adjacency_masks(&m, &strays, &universe);
    let remainder_count = maximal_biclique_masks_subsets(&adj).len() as u64;

    let cfg = MineConfig {
        count_threshold: remainder_count.max(1),
        large_edge_threshold: 200,
        ..MineConfig::default()
    };
    let (roles, left) = large_biclique_phase(&m, m.full_edge_set(), &universe, &cfg, &mut quiet());
    assert_eq!(roles.len(), 2, "exactly the two blocks");
    for role in &roles {
        assert_eq!(role.edge_count(), 225);
    }
    assert_eq!(left.len(), strays.len());
}

/// Benchmark-shaped planted instance: the exact pipeline recovers at most
/// the planted role count (the construction bound) and verifies sound.
#[test]
fn planted_instances_mine_to_at_most_the_generator_bound() {
    for (seed, users, perms, roles, ru, rp) in [
        (1u64, 50usize, 120usize, 25usize, 5usize, 10usize),
        (2, 80, 200, 50, 6, 12),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for _ in 0..roles {
            let us: Vec<usize> = (0..ru).map(|_| rng.gen_range(0..users)).collect();
            let ps: Vec<usize> = (0..rp).map(|_| rng.gen_range(0..perms)).collect();
            for &u in &us {
                for &p in &ps {
                    pairs.push((format!("u{u}"), format!("p{p}")));
                }
            }
        }
        let m = AccessMatrix::from_pairs(pairs).unwrap();
        let (policy, stats) = mine_exact(&m, &MineConfig::default(), &mut quiet()).unwrap();
        assert!(verify_policy(&m, &policy).is_sound(), "seed {seed}");
        assert!(
            policy.role_count() <= roles,
            "seed {seed}: {} roles vs planted {roles}",
            policy.role_count()
        );
        assert!(stats.total_roles >= 1);
    }
}

/// A denser instance pushed through the hard pipeline with a tight count
/// threshold: the large-biclique phase shrinks the instance until it is
/// easy, and the result stays sound.
#[test]
fn dense_instance_through_the_hard_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = Vec::new();
    for u in 0..40 {
        for p in 0..40 {
            if rng.gen_bool(0.3) {
                pairs.push((format!("u{u}"), format!("p{p}")));
            }
        }
    }
    let m = AccessMatrix::from_pairs(pairs).unwrap();

    let state = reduce(&m, &mut quiet());
    let ctx = EnumContext::new(&m, state.active().clone(), m.full_edge_set()).with_threshold(400);
    let hard = matches!(
        count_with_threshold(&ctx, &mut quiet()),
        CountResult::ExceededThreshold(_)
    );
    assert!(hard, "instance should trip a 400-biclique threshold");

    let cfg = MineConfig {
        count_threshold: 400,
        large_edge_threshold: 12,
        time_budget: Some(std::time::Duration::from_secs(60)),
        ..MineConfig::default()
    };
    let (policy, stats) = mine_hard(&m, &cfg, &mut quiet()).unwrap();
    assert!(verify_policy(&m, &policy).is_sound());
    assert!(stats.large_roles >= 1, "large phase should fire");
}

/// Piece mining on a mid-size planted instance: union of per-piece roles,
/// then the lattice pass, stays sound and within a sane range.
#[test]
fn piece_mining_matches_full_instance_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pairs = Vec::new();
    for _ in 0..30 {
        let us: Vec<usize> = (0..5).map(|_| rng.gen_range(0..60)).collect();
        let ps: Vec<usize> = (0..8).map(|_| rng.gen_range(0..150)).collect();
        for &u in &us {
            for &p in &ps {
                pairs.push((format!("u{u}"), format!("p{p}")));
            }
        }
    }
    let m = AccessMatrix::from_pairs(pairs).unwrap();
    let cfg = MineConfig {
        pieces: 3,
        ..MineConfig::default()
    };
    let (policy, stats) = mine_hardest(&m, &cfg, &mut quiet()).unwrap();
    assert!(verify_policy(&m, &policy).is_sound());
    // Piece mining cannot beat the true optimum of the full instance; the
    // exact pipeline gives that reference here.
    let (exact, _) = mine_exact(&m, &MineConfig::default(), &mut quiet()).unwrap();
    assert!(policy.role_count() >= exact.role_count());
    assert!(stats.lattice_roles.unwrap() <= stats.greedy_roles.unwrap());
}
