//! Enumeration of triangulations by reverse search over the flip graph.
//!
//! Every triangulation except the root has a unique predecessor: its flip
//! neighbor with the lexicographically largest GKZ-vector, provided that
//! neighbor is lex-larger than itself. Reverse search walks the resulting
//! tree depth-first from the root and keeps only the current path in memory.
//!
//! In regular mode only regular flips are edges. Whether a flip is regular
//! is a property of the flip, so the flip cache stores per-flip verdicts.
//! `CacheSemantics::TargetRegularity` instead trusts a remembered set of
//! regular triangulations to validate flips into them; it exists only to
//! reproduce the resulting enumeration bug.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;
use std::num::NonZeroUsize;
use std::ops::ControlFlow;
use std::rc::Rc;

use lru::LruCache;
use num_bigint::BigInt;
use thiserror::Error;

use crate::config::PointConfiguration;
use crate::flip::{apply_flip, flipped_gkz, Flip, FlipFinder};
use crate::regularity::{regular_flips, RayError, ScreeningStats};
use crate::triangulation::{gkz, placing_triangulation, GkzVector, Triangulation};

pub const DEFAULT_FLIP_CACHE: usize = 40_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("node budget of {0} exceeded")]
    Budget(usize),
    #[error("flip regularity: {0}")]
    Ray(#[from] RayError),
    #[error("two flip neighbors share a GKZ-vector")]
    GkzTie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    RegularOnly,
    AllFlips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CacheSemantics {
    /// Flips are validated by their own regularity.
    #[default]
    FlipVerdicts,
    /// Flips into a triangulation remembered as regular are accepted
    /// unchecked. Incorrect; for demonstration only.
    TargetRegularity,
}

/// A flip seen from its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move<N> {
    pub target: N,
    pub gkz: GkzVector,
    pub delta: Vec<BigInt>,
}

/// A flip graph whose nodes carry GKZ-vectors.
pub trait FlipGraph {
    type Node: Clone + Eq + Hash + Debug;

    /// All flips out of `node`, whose GKZ-vector is `gkz`.
    fn moves(&mut self, node: &Self::Node, gkz: &GkzVector) -> Vec<Move<Self::Node>>;

    /// Regularity of each of `moves`, all out of the regular `node`.
    fn classify(
        &mut self,
        node: &Self::Node,
        moves: &[Move<Self::Node>],
    ) -> Result<Vec<bool>, SearchError>;

    fn screening_stats(&self) -> ScreeningStats {
        ScreeningStats::default()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub flips_evaluated: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub screening: ScreeningStats,
}

type Neighbors<N> = Rc<[Move<N>]>;

/// Mode-aware neighbor oracle with an LRU flip cache.
pub struct CachedOracle<G: FlipGraph> {
    graph: G,
    mode: SearchMode,
    semantics: CacheSemantics,
    cache: Option<LruCache<G::Node, Rc<[(Move<G::Node>, bool)]>>>,
    known_regular: HashSet<G::Node>,
    stats: SearchStats,
}

impl<G: FlipGraph> CachedOracle<G> {
    pub fn new(graph: G, mode: SearchMode, capacity: usize) -> Self {
        Self {
            graph,
            mode,
            semantics: CacheSemantics::FlipVerdicts,
            cache: NonZeroUsize::new(capacity).map(LruCache::new),
            known_regular: HashSet::new(),
            stats: SearchStats::default(),
        }
    }

    pub fn with_semantics(mut self, semantics: CacheSemantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn mode(&self) -> SearchMode {
        self.mode
    }

    pub fn graph(&self) -> &G {
        &self.graph
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            screening: self.graph.screening_stats(),
            ..self.stats
        }
    }

    /// Flips out of `node` that are edges in the active mode.
    pub fn neighbors(
        &mut self,
        node: &G::Node,
        gkz: &GkzVector,
    ) -> Result<Neighbors<G::Node>, SearchError> {
        if self.mode == SearchMode::RegularOnly
            && self.semantics == CacheSemantics::TargetRegularity
        {
            return self.neighbors_by_target(node, gkz);
        }
        let classified = match self.cache.as_mut().and_then(|c| c.get(node)) {
            Some(hit) => {
                self.stats.cache_hits += 1;
                hit.clone()
            }
            None => {
                self.stats.cache_misses += 1;
                let moves = self.graph.moves(node, gkz);
                self.stats.flips_evaluated += moves.len() as u64;
                let verdicts = match self.mode {
                    SearchMode::AllFlips => vec![true; moves.len()],
                    SearchMode::RegularOnly => self.graph.classify(node, &moves)?,
                };
                let entry: Rc<[(Move<G::Node>, bool)]> = moves.into_iter().zip(verdicts).collect();
                if let Some(cache) = self.cache.as_mut() {
                    cache.put(node.clone(), entry.clone());
                }
                entry
            }
        };
        Ok(classified
            .iter()
            .filter(|(_, ok)| *ok)
            .map(|(m, _)| m.clone())
            .collect())
    }

    fn neighbors_by_target(
        &mut self,
        node: &G::Node,
        gkz: &GkzVector,
    ) -> Result<Neighbors<G::Node>, SearchError> {
        self.stats.cache_misses += 1;
        self.known_regular.insert(node.clone());
        let moves = self.graph.moves(node, gkz);
        self.stats.flips_evaluated += moves.len() as u64;
        let unknown: Vec<Move<G::Node>> = moves
            .iter()
            .filter(|m| !self.known_regular.contains(&m.target))
            .cloned()
            .collect();
        let verdicts = self.graph.classify(node, &unknown)?;
        for (m, ok) in unknown.iter().zip(verdicts) {
            if ok {
                self.known_regular.insert(m.target.clone());
            }
        }
        Ok(moves
            .into_iter()
            .filter(|m| self.known_regular.contains(&m.target))
            .collect())
    }
}

/// The lex-largest neighbor of `node` if it is an upflip.
pub fn predecessor<G: FlipGraph>(
    oracle: &mut CachedOracle<G>,
    node: &G::Node,
    gkz: &GkzVector,
) -> Result<Option<Move<G::Node>>, SearchError> {
    let neighbors = oracle.neighbors(node, gkz)?;
    let mut best: Option<&Move<G::Node>> = None;
    for m in neighbors.iter() {
        match best {
            Some(b) if m.gkz == b.gkz => return Err(SearchError::GkzTie),
            Some(b) if m.gkz < b.gkz => {}
            _ => best = Some(m),
        }
    }
    Ok(best.filter(|m| m.gkz > *gkz).cloned())
}

/// Follows predecessors from `seed` to the sink of its chain.
pub fn find_root<G: FlipGraph>(
    oracle: &mut CachedOracle<G>,
    seed: G::Node,
    seed_gkz: GkzVector,
) -> Result<(G::Node, GkzVector), SearchError> {
    let (mut node, mut gkz) = (seed, seed_gkz);
    while let Some(up) = predecessor(oracle, &node, &gkz)? {
        node = up.target;
        gkz = up.gkz;
    }
    Ok((node, gkz))
}

/// Visits every node of the reverse search tree rooted at the sink reached
/// from `seed`, calling `visit(node, gkz, depth)` once per node. The
/// visitor may stop the search early.
///
/// In regular mode this is every regular triangulation. In all-flips mode
/// the graph may have several sinks and only the tree of the reached one is
/// visited.
pub fn reverse_search<G, F>(
    oracle: &mut CachedOracle<G>,
    seed: G::Node,
    seed_gkz: GkzVector,
    mut visit: F,
) -> Result<SearchStats, SearchError>
where
    G: FlipGraph,
    F: FnMut(&G::Node, &GkzVector, usize) -> ControlFlow<()>,
{
    struct Frame<N> {
        node: N,
        gkz: GkzVector,
        neighbors: Neighbors<N>,
        next: usize,
    }

    let (root, root_gkz) = find_root(oracle, seed, seed_gkz)?;
    let mut nodes = 1;
    if visit(&root, &root_gkz, 0).is_break() {
        return Ok(SearchStats { nodes, ..oracle.stats() });
    }
    let neighbors = oracle.neighbors(&root, &root_gkz)?;
    let mut stack = vec![Frame {
        node: root,
        gkz: root_gkz,
        neighbors,
        next: 0,
    }];
    while let Some(top) = stack.last_mut() {
        let Some(m) = top.neighbors.get(top.next).cloned() else {
            stack.pop();
            continue;
        };
        top.next += 1;
        if m.gkz >= top.gkz {
            continue;
        }
        let parent = top.node.clone();
        let is_child = predecessor(oracle, &m.target, &m.gkz)?
            .is_some_and(|p| p.target == parent);
        if !is_child {
            continue;
        }
        nodes += 1;
        if visit(&m.target, &m.gkz, stack.len()).is_break() {
            break;
        }
        let neighbors = oracle.neighbors(&m.target, &m.gkz)?;
        stack.push(Frame {
            node: m.target,
            gkz: m.gkz,
            neighbors,
            next: 0,
        });
    }
    Ok(SearchStats { nodes, ..oracle.stats() })
}

/// Every node reachable from `seed`, by a depth-first search with a visited
/// set. Fails once more than `budget` nodes are found.
pub fn baseline_dfs<G: FlipGraph>(
    oracle: &mut CachedOracle<G>,
    seed: G::Node,
    seed_gkz: GkzVector,
    budget: usize,
) -> Result<Vec<(G::Node, GkzVector)>, SearchError> {
    let mut seen: HashSet<G::Node> = HashSet::new();
    let mut found = Vec::new();
    let mut stack = vec![(seed, seed_gkz)];
    while let Some((node, gkz)) = stack.pop() {
        if !seen.insert(node.clone()) {
            continue;
        }
        if seen.len() > budget {
            return Err(SearchError::Budget(budget));
        }
        for m in oracle.neighbors(&node, &gkz)?.iter().rev() {
            if !seen.contains(&m.target) {
                stack.push((m.target.clone(), m.gkz.clone()));
            }
        }
        found.push((node, gkz));
    }
    Ok(found)
}

/// The flip graph of a point configuration.
pub struct GeometricGraph<'a> {
    finder: FlipFinder<'a>,
    screening: ScreeningStats,
}

impl<'a> GeometricGraph<'a> {
    pub fn new(config: &'a PointConfiguration) -> Self {
        Self {
            finder: FlipFinder::new(config),
            screening: ScreeningStats::default(),
        }
    }

    pub fn config(&self) -> &'a PointConfiguration {
        self.finder.config()
    }

    /// Flips of `t` paired with their targets.
    pub fn flips(&mut self, t: &Triangulation) -> Vec<(Flip, Triangulation)> {
        self.finder
            .find(t)
            .into_iter()
            .map(|f| {
                let target = apply_flip(t, &f).expect("flips found in t apply to t");
                (f, target)
            })
            .collect()
    }
}

impl FlipGraph for GeometricGraph<'_> {
    type Node = Triangulation;

    fn moves(&mut self, node: &Triangulation, gkz: &GkzVector) -> Vec<Move<Triangulation>> {
        self.flips(node)
            .into_iter()
            .map(|(f, target)| Move {
                target,
                gkz: flipped_gkz(gkz, &f),
                delta: f.delta,
            })
            .collect()
    }

    fn classify(
        &mut self,
        _node: &Triangulation,
        moves: &[Move<Triangulation>],
    ) -> Result<Vec<bool>, SearchError> {
        let deltas: Vec<Vec<BigInt>> = moves.iter().map(|m| m.delta.clone()).collect();
        let verdict = crate::regularity::extremal_rays(&deltas)?;
        self.screening.merge(&verdict.stats);
        Ok((0..moves.len()).map(|k| verdict.extremal.contains(&k)).collect())
    }

    fn screening_stats(&self) -> ScreeningStats {
        self.screening
    }
}

/// A flip oracle over the triangulations of `config`.
pub fn geometric_oracle(
    config: &PointConfiguration,
    mode: SearchMode,
    capacity: usize,
) -> CachedOracle<GeometricGraph<'_>> {
    CachedOracle::new(GeometricGraph::new(config), mode, capacity)
}

/// The placing triangulation and its GKZ-vector, a regular starting point.
pub fn seed(config: &PointConfiguration) -> (Triangulation, GkzVector) {
    let t = placing_triangulation(config);
    let g = gkz(config, &t);
    (t, g)
}

/// Regular flips of `t` among all its flips, in the order `FlipFinder`
/// returns them.
pub fn classified_flips(
    config: &PointConfiguration,
    t: &Triangulation,
) -> Result<Vec<(Flip, bool)>, SearchError> {
    let flips = FlipFinder::new(config).find(t);
    let verdict = regular_flips(&flips)?;
    Ok(flips
        .into_iter()
        .enumerate()
        .map(|(k, f)| (f, verdict.extremal.contains(&k)))
        .collect())
}
