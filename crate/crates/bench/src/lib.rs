//! Synthetic instance generators for benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rolemine_core::AccessMatrix;

/// Access matrix generated from a planted role set, the way the public
/// benchmark suites are built: `roles` random (users x perms) blocks whose
/// union is the matrix. The planted role count is an upper bound on the
/// minimum cover.
pub fn planted_instance(
    seed: u64,
    users: usize,
    perms: usize,
    roles: usize,
    role_users: usize,
    role_perms: usize,
) -> AccessMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for _ in 0..roles {
        let us: Vec<usize> = (0..role_users).map(|_| rng.gen_range(0..users)).collect();
        let ps: Vec<usize> = (0..role_perms).map(|_| rng.gen_range(0..perms)).collect();
        for &u in &us {
            for &p in &ps {
                pairs.push((format!("u{u}"), format!("p{p}")));
            }
        }
    }
    AccessMatrix::from_pairs(pairs).expect("planted instance is nonempty")
}

/// Uniform random bipartite graph with roughly `edges` edges.
pub fn random_instance(seed: u64, users: usize, perms: usize, edges: usize) -> AccessMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for _ in 0..edges {
        pairs.push((
            format!("u{}", rng.gen_range(0..users)),
            format!("p{}", rng.gen_range(0..perms)),
        ));
    }
    AccessMatrix::from_pairs(pairs).expect("random instance is nonempty")
}

/// Planted roles plus uniform noise edges: keeps the planted structure (so
/// exact solving stays tractable) while leaving a nontrivial remainder
/// after the reduction.
pub fn noisy_planted_instance(
    seed: u64,
    users: usize,
    perms: usize,
    roles: usize,
    role_users: usize,
    role_perms: usize,
    noise_edges: usize,
) -> AccessMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for _ in 0..roles {
        let us: Vec<usize> = (0..role_users).map(|_| rng.gen_range(0..users)).collect();
        let ps: Vec<usize> = (0..role_perms).map(|_| rng.gen_range(0..perms)).collect();
        for &u in &us {
            for &p in &ps {
                pairs.push((format!("u{u}"), format!("p{p}")));
            }
        }
    }
    for _ in 0..noise_edges {
        pairs.push((
            format!("u{}", rng.gen_range(0..users)),
            format!("p{}", rng.gen_range(0..perms)),
        ));
    }
    AccessMatrix::from_pairs(pairs).expect("instance is nonempty")
}
