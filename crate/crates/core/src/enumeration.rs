//! Lazy enumeration of maximal bicliques, and the hardness measure.
//!
//! Maximal bicliques of the (possibly reduced) instance are exactly the
//! maximal cliques of the edge-adjacency structure: items are the *active*
//! edges, adjacency is judged against the full `universe` (removed edges
//! still count for adjacency, not for membership). The enumerator is the
//! classic R/P/X scheme with degree-based pivoting, converted to an
//! explicit stack so results stream on demand and consumers can stop early.
//!
//! The number of maximal bicliques is the hardness measure of an instance:
//! counting stops the moment it passes the threshold, holding no bicliques
//! in memory.

use fixedbitset::FixedBitSet;

use crate::graph::{AccessMatrix, Biclique, EdgeId, EdgeSet};
use crate::progress::Progress;

/// Default hardness threshold on the number of maximal bicliques. Machine
/// dependent by nature; override via [`EnumContext::with_threshold`].
pub const DEFAULT_COUNT_THRESHOLD: u64 = 3_000_000;

/// How edge neighbourhoods are obtained during enumeration.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum AdjacencyMode {
    /// Materialize per-edge neighbourhood bitsets when they fit in memory,
    /// compute on the fly otherwise.
    #[default]
    Auto,
    Lazy,
    Materialized,
}

/// Everything the enumerator needs: the matrix, the active edges to build
/// bicliques from, the adjacency universe, and the hardness threshold.
pub struct EnumContext<'a> {
    pub matrix: &'a AccessMatrix,
    pub active: EdgeSet,
    pub universe: EdgeSet,
    pub count_threshold: u64,
    pub adjacency: AdjacencyMode,
}

impl<'a> EnumContext<'a> {
    pub fn new(matrix: &'a AccessMatrix, active: EdgeSet, universe: EdgeSet) -> Self {
        debug_assert!(active.bits().is_subset(universe.bits()));
        EnumContext {
            matrix,
            active,
            universe,
            count_threshold: DEFAULT_COUNT_THRESHOLD,
            adjacency: AdjacencyMode::Auto,
        }
    }

    /// Context over the whole matrix: active = universe = all edges.
    pub fn full(matrix: &'a AccessMatrix) -> Self {
        Self::new(matrix, matrix.full_edge_set(), matrix.full_edge_set())
    }

    pub fn with_threshold(mut self, threshold: u64) -> Self {
        assert!(threshold >= 1);
        self.count_threshold = threshold;
        self
    }

    pub fn with_adjacency(mut self, mode: AdjacencyMode) -> Self {
        self.adjacency = mode;
        self
    }
}

/// Result of counting against the hardness threshold.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum CountResult {
    /// The true number of maximal bicliques.
    Exact(u64),
    /// Counting stopped as soon as the threshold was passed.
    ExceededThreshold(u64),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Hardness {
    Easy,
    Hard,
}

/// Neighbourhood provider: cached bitsets or lazy recomputation.
struct Adjacency<'a> {
    m: &'a AccessMatrix,
    universe: &'a EdgeSet,
    active: &'a EdgeSet,
    cache: Option<Vec<FixedBitSet>>,
}

/// Materialize when the full table stays under ~256 MiB.
const MATERIALIZE_BIT_BUDGET: u64 = 1 << 31;

impl<'a> Adjacency<'a> {
    fn new(ctx: &'a EnumContext) -> Self {
        let m = ctx.matrix;
        let materialize = match ctx.adjacency {
            AdjacencyMode::Materialized => true,
            AdjacencyMode::Lazy => false,
            AdjacencyMode::Auto => {
                ctx.active.len() as u64 * m.edge_count() as u64 <= MATERIALIZE_BIT_BUDGET
            }
        };
        let cache = materialize.then(|| {
            let mut table = vec![FixedBitSet::new(); m.edge_count()];
            for e in ctx.active.iter() {
                let mut bits = FixedBitSet::with_capacity(m.edge_count());
                m.neighbours_into(e, &ctx.universe, &ctx.active, &mut bits);
                table[e.index()] = bits;
            }
            table
        });
        Adjacency {
            m,
            universe: &ctx.universe,
            active: &ctx.active,
            cache,
        }
    }

    /// Neighbourhood of `e` among active edges; `scratch` is used in lazy mode.
    fn neighbourhood<'s>(&'s self, e: EdgeId, scratch: &'s mut FixedBitSet) -> &'s FixedBitSet {
        match &self.cache {
            Some(table) => &table[e.index()],
            None => {
                self.m.neighbours_into(e, self.universe, self.active, scratch);
                scratch
            }
        }
    }
}

struct Frame {
    p: FixedBitSet,
    x: FixedBitSet,
    /// Expansion candidates: P minus the pivot's neighbourhood, snapshotted.
    ext: Vec<u32>,
    pos: usize,
    /// Length of the shared R path when this frame was created.
    parent_r_len: usize,
}

/// Demand-driven stream of all maximal bicliques of a context. Each is
/// yielded exactly once; order is deterministic.
pub struct MaximalBicliques<'a> {
    ctx: &'a EnumContext<'a>,
    adjacency: Adjacency<'a>,
    stack: Vec<Frame>,
    r: Vec<u32>,
    scratch: FixedBitSet,
}

pub fn enumerate_maximal_bicliques<'a>(ctx: &'a EnumContext<'a>) -> MaximalBicliques<'a> {
    let n = ctx.matrix.edge_count();
    let adjacency = Adjacency::new(ctx);
    let mut stream = MaximalBicliques {
        ctx,
        adjacency,
        stack: Vec::new(),
        r: Vec::new(),
        scratch: FixedBitSet::with_capacity(n),
    };
    if !ctx.active.is_empty() {
        let p = ctx.active.bits().clone();
        let x = FixedBitSet::with_capacity(n);
        let ext = stream.pivot_candidates(&p, &x);
        stream.stack.push(Frame {
            p,
            x,
            ext,
            pos: 0,
            parent_r_len: 0,
        });
    }
    stream
}

impl<'a> MaximalBicliques<'a> {
    /// Picks the pivot in P union X maximizing |P intersect N(pivot)| and
    /// returns P minus N(pivot), ascending.
    fn pivot_candidates(&mut self, p: &FixedBitSet, x: &FixedBitSet) -> Vec<u32> {
        let mut best: Option<(usize, usize)> = None; // (gain, pivot index)
        for u in p.ones().chain(x.ones()) {
            let nb = self
                .adjacency
                .neighbourhood(EdgeId(u as u32), &mut self.scratch);
            let gain = p.intersection_count(nb);
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, u));
            }
        }
        match best {
            None => Vec::new(),
            Some((_, pivot)) => {
                let nb = self
                    .adjacency
                    .neighbourhood(EdgeId(pivot as u32), &mut self.scratch);
                p.difference(nb).map(|i| i as u32).collect()
            }
        }
    }
}

impl<'a> Iterator for MaximalBicliques<'a> {
    type Item = Biclique;

    fn next(&mut self) -> Option<Biclique> {
        loop {
            let top = self.stack.last_mut()?;
            if top.pos >= top.ext.len() {
                let done = self.stack.pop().unwrap();
                self.r.truncate(done.parent_r_len);
                continue;
            }
            let v = top.ext[top.pos];
            top.pos += 1;

            let nv = self
                .adjacency
                .neighbourhood(EdgeId(v), &mut self.scratch)
                .clone();
            let mut child_p = top.p.clone();
            child_p.intersect_with(&nv);
            let mut child_x = top.x.clone();
            child_x.intersect_with(&nv);
            top.p.set(v as usize, false);
            top.x.insert(v as usize);

            if child_p.is_clear() {
                if child_x.is_clear() {
                    // R + v is maximal.
                    let mut edges: Vec<EdgeId> =
                        self.r.iter().map(|&i| EdgeId(i)).collect();
                    edges.push(EdgeId(v));
                    return Some(Biclique::from_edges(
                        self.ctx.matrix,
                        edges,
                        &self.ctx.universe,
                    ));
                }
                continue;
            }

            let parent_r_len = self.r.len();
            self.r.push(v);
            let ext = self.pivot_candidates(&child_p, &child_x);
            self.stack.push(Frame {
                p: child_p,
                x: child_x,
                ext,
                pos: 0,
                parent_r_len,
            });
        }
    }
}

/// Counts maximal bicliques, stopping as soon as the count passes the
/// context threshold. Peak memory is independent of the count.
pub fn count_with_threshold(ctx: &EnumContext, progress: &mut Progress) -> CountResult {
    let mut count = 0u64;
    for _ in enumerate_maximal_bicliques(ctx) {
        count += 1;
        if count > ctx.count_threshold {
            return CountResult::ExceededThreshold(ctx.count_threshold);
        }
        if count % 4096 == 0 {
            progress.heartbeat("count-bicliques", count, "maximal bicliques");
        }
    }
    CountResult::Exact(count)
}

/// Easy iff the count stays within the threshold.
pub fn classify_hardness(ctx: &EnumContext, progress: &mut Progress) -> Hardness {
    match count_with_threshold(ctx, progress) {
        CountResult::Exact(_) => Hardness::Easy,
        CountResult::ExceededThreshold(_) => Hardness::Hard,
    }
}
