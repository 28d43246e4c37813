//! The bipartite unit graph between positive and negative imbalance
//! units, and the augmenting-path matching that selects which sampled
//! paths will carry the imbalance.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::cube::RngStream;

use super::blocks::Block;
use super::paths::SampledPath;
use super::PipelineConfig;

/// One unit of imbalance of a block: index `0..units(B)` on the side of
/// the block's sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unit {
    pub block: u32,
    pub index: u32,
}

/// An edge of the unit multigraph, remembering the path that created it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitEdge {
    /// Index into [`UnitGraph::pos_units`].
    pub pos: u32,
    /// Index into [`UnitGraph::neg_units`].
    pub neg: u32,
    /// Index into the sampled path list.
    pub path: u32,
}

#[derive(Clone, Debug, Default)]
pub struct UnitGraph {
    pub pos_units: Vec<Unit>,
    pub neg_units: Vec<Unit>,
    /// Edge multiset in path order.
    pub edges: Vec<UnitEdge>,
    /// Paths that survived the discard draw.
    pub paths_surviving: usize,
    /// Blocks whose |imbalance| exceeded the unit cap; their residual
    /// imbalance cannot be moved and the pipeline reports them instead
    /// of retrying.
    pub capped_blocks: Vec<u32>,
}

impl UnitGraph {
    pub fn distinct_edge_count(&self) -> usize {
        let mut seen: Vec<(u32, u32)> = self.edges.iter().map(|e| (e.pos, e.neg)).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Builds the unit graph: every block contributes `min(|imbalance|,
/// unit_cap)` units on the side of its sign; every surviving path with
/// endpoint blocks `B1`, `B2` draws unit indices `i`, `j` uniformly below
/// the cap and contributes the edge `(v_i^B1, v_j^B2)` when both units
/// exist with opposite signs.
///
/// With a discard exponent `e`, a path between blocks of sizes `s1`, `s2`
/// first survives a keep-draw with probability `min(1, n^e / (s1 s2))`;
/// by default every path is kept.
pub fn build_unit_graph(
    blocks: &[Block],
    paths: &[SampledPath],
    cfg: &PipelineConfig,
    rng: &mut RngStream,
) -> UnitGraph {
    let mut g = UnitGraph::default();
    // unit index offsets per block, on the side of the block's sign
    let mut pos_offset = alloc::vec![u32::MAX; blocks.len()];
    let mut neg_offset = alloc::vec![u32::MAX; blocks.len()];
    let mut pos_count = alloc::vec![0u32; blocks.len()];
    let mut neg_count = alloc::vec![0u32; blocks.len()];
    for b in blocks {
        let units = b.imbalance.unsigned_abs().min(cfg.unit_cap as u64) as u32;
        if (b.imbalance.unsigned_abs()) > cfg.unit_cap as u64 {
            g.capped_blocks.push(b.id);
        }
        if b.imbalance > 0 {
            pos_offset[b.id as usize] = g.pos_units.len() as u32;
            pos_count[b.id as usize] = units;
            for index in 0..units {
                g.pos_units.push(Unit { block: b.id, index });
            }
        } else if b.imbalance < 0 {
            neg_offset[b.id as usize] = g.neg_units.len() as u32;
            neg_count[b.id as usize] = units;
            for index in 0..units {
                g.neg_units.push(Unit { block: b.id, index });
            }
        }
    }

    for (path_id, path) in paths.iter().enumerate() {
        let (b1, b2) = (path.first_block() as usize, path.last_block() as usize);
        if let Some(e) = cfg.discard_exponent {
            let keep = libm::pow(cfg.n as f64, e as f64)
                / (blocks[b1].len() as f64 * blocks[b2].len() as f64);
            if !rng.bernoulli(keep) {
                continue;
            }
        }
        g.paths_surviving += 1;
        let i = rng.below(cfg.unit_cap as u64) as u32;
        let j = rng.below(cfg.unit_cap as u64) as u32;
        // the edge needs opposite signs; orient it positive -> negative
        let (pos, neg) = if pos_count[b1] > 0 && neg_count[b2] > 0 {
            ((b1, i), (b2, j))
        } else if neg_count[b1] > 0 && pos_count[b2] > 0 {
            ((b2, j), (b1, i))
        } else {
            continue;
        };
        if pos.1 < pos_count[pos.0] && neg.1 < neg_count[neg.0] {
            g.edges.push(UnitEdge {
                pos: pos_offset[pos.0] + pos.1,
                neg: neg_offset[neg.0] + neg.1,
                path: path_id as u32,
            });
        }
    }
    g
}

/// A matched unit pair together with the sampled path that realizes it.
#[derive(Clone, Copy, Debug)]
pub struct MatchedEdge {
    pub pos: Unit,
    pub neg: Unit,
    pub path: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingFailure {
    /// Unit counts differ, so no perfect matching can exist.
    SideMismatch { pos: usize, neg: usize },
    /// The maximum matching leaves units unsaturated.
    NotPerfect { matched: usize, needed: usize },
}

/// Maximum bipartite matching by augmenting paths. `adjacency[u]` lists
/// the right-side neighbours of left vertex `u`; the result maps each
/// right vertex to its matched left vertex.
pub fn max_bipartite_matching(adjacency: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    let mut right_match: Vec<Option<usize>> = alloc::vec![None; right_count];
    let mut visited = alloc::vec![false; right_count];
    for u in 0..adjacency.len() {
        visited.iter_mut().for_each(|v| *v = false);
        augment(u, adjacency, &mut right_match, &mut visited);
    }
    right_match
}

fn augment(
    u: usize,
    adjacency: &[Vec<usize>],
    right_match: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &v in &adjacency[u] {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        if right_match[v].is_none()
            || augment(right_match[v].unwrap(), adjacency, right_match, visited)
        {
            right_match[v] = Some(u);
            return true;
        }
    }
    false
}

/// Finds a perfect matching of the unit graph, or reports failure so the
/// pipeline can retry with fresh paths. Each matched pair keeps the
/// lowest-id path among the parallel edges supporting it.
pub fn find_perfect_matching(g: &UnitGraph) -> Result<Vec<MatchedEdge>, MatchingFailure> {
    if g.pos_units.len() != g.neg_units.len() {
        return Err(MatchingFailure::SideMismatch {
            pos: g.pos_units.len(),
            neg: g.neg_units.len(),
        });
    }
    let needed = g.pos_units.len();
    if needed == 0 {
        return Ok(Vec::new());
    }

    // dedupe parallel edges, keeping the first (= lowest path id)
    let mut support: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for e in &g.edges {
        support.entry((e.pos, e.neg)).or_insert(e.path);
    }
    let mut adjacency = alloc::vec![Vec::new(); needed];
    for &(pos, neg) in support.keys() {
        adjacency[pos as usize].push(neg as usize);
    }

    let right_match = max_bipartite_matching(&adjacency, needed);
    let matched = right_match.iter().flatten().count();
    if matched < needed {
        return Err(MatchingFailure::NotPerfect { matched, needed });
    }
    let mut result = Vec::with_capacity(needed);
    for (neg, pos) in right_match.iter().enumerate() {
        let pos = pos.unwrap() as u32;
        let neg = neg as u32;
        result.push(MatchedEdge {
            pos: g.pos_units[pos as usize],
            neg: g.neg_units[neg as usize],
            path: support[&(pos, neg)],
        });
    }
    // deterministic processing order for the shift stage
    result.sort_unstable_by_key(|e| (e.pos.block, e.pos.index));
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{random_balanced_function, BooleanFunction};
    use crate::randmap::blocks::{block_index, build_blocks, compute_imbalances};
    use crate::randmap::paths::sample_paths;

    #[test]
    fn balanced_blocks_give_empty_graph() {
        let cfg = PipelineConfig::desk(8, 5);
        let mut blocks = build_blocks(&cfg).unwrap();
        compute_imbalances(&mut blocks, &BooleanFunction::dictator(8)).unwrap();
        let block_of = block_index(cfg.n, &blocks);
        let rng = crate::cube::RngStream::new(5);
        let paths = sample_paths(&cfg, &block_of, &mut rng.substream(1));
        let g = build_unit_graph(&blocks, &paths, &cfg, &mut rng.substream(2));
        assert!(g.pos_units.is_empty() && g.neg_units.is_empty() && g.edges.is_empty());
        assert!(find_perfect_matching(&g).unwrap().is_empty());
    }

    #[test]
    fn unit_counts_halve_the_total_imbalance() {
        let cfg = PipelineConfig::desk(12, 77);
        let mut blocks = build_blocks(&cfg).unwrap();
        let f = random_balanced_function(12, &mut crate::cube::RngStream::new(77));
        compute_imbalances(&mut blocks, &f).unwrap();
        let block_of = block_index(cfg.n, &blocks);
        let rng = crate::cube::RngStream::new(77);
        let paths = sample_paths(&cfg, &block_of, &mut rng.substream(1));
        let g = build_unit_graph(&blocks, &paths, &cfg, &mut rng.substream(2));
        let total: u64 = blocks.iter().map(|b| b.imbalance.unsigned_abs()).sum();
        assert!(g.capped_blocks.is_empty());
        assert_eq!(g.pos_units.len() + g.neg_units.len(), total as usize);
        assert_eq!(g.pos_units.len(), g.neg_units.len());
        // every edge joins opposite signs by construction
        for e in &g.edges {
            assert!(blocks[g.pos_units[e.pos as usize].block as usize].imbalance > 0);
            assert!(blocks[g.neg_units[e.neg as usize].block as usize].imbalance < 0);
        }
    }

    #[test]
    fn two_block_unit_cap_one_hits_the_single_edge() {
        // hand-built scenario: +1 and -1 blocks, one path between them,
        // cap 1 means the index draw always lands on the existing units
        let blocks = alloc::vec![
            Block {
                id: 0,
                center: 0,
                members: alloc::vec![0, 1],
                diameter: 1,
                imbalance: 1,
            },
            Block {
                id: 1,
                center: 1,
                members: alloc::vec![2, 3],
                diameter: 1,
                imbalance: -1,
            },
        ];
        let paths = alloc::vec![SampledPath {
            vertices: alloc::vec![0, 2],
            blocks: alloc::vec![0, 1],
        }];
        let cfg = PipelineConfig {
            unit_cap: 1,
            ..PipelineConfig::desk(3, 0)
        };
        let mut rng = crate::cube::RngStream::new(0);
        let g = build_unit_graph(&blocks, &paths, &cfg, &mut rng);
        assert_eq!(g.edges.len(), 1);
        let m = find_perfect_matching(&g).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].pos.block, 0);
        assert_eq!(m[0].neg.block, 1);
        assert_eq!(m[0].path, 0);
    }

    #[test]
    fn matching_on_complete_bipartite_graph_is_perfect() {
        let adjacency: Vec<Vec<usize>> = (0..3).map(|_| alloc::vec![0, 1, 2]).collect();
        let m = max_bipartite_matching(&adjacency, 3);
        assert_eq!(m.iter().flatten().count(), 3);
    }

    #[test]
    fn matching_agrees_with_exhaustive_oracle_on_random_graphs() {
        let mut rng = crate::cube::RngStream::new(123);
        for _ in 0..60 {
            let left = 1 + rng.below(8) as usize;
            let right = 1 + rng.below(8) as usize;
            let mut adjacency = alloc::vec![Vec::new(); left];
            for (u, adj) in adjacency.iter_mut().enumerate() {
                for v in 0..right {
                    if rng.bernoulli(0.3) {
                        adj.push(v);
                    }
                }
                let _ = u;
            }
            let fast = max_bipartite_matching(&adjacency, right)
                .iter()
                .flatten()
                .count();
            let exact = crate::oracle::matching_max_exhaustive(&adjacency, right);
            assert_eq!(fast, exact);
        }
    }

    #[test]
    fn discard_exponent_thins_or_keeps_paths() {
        let mut cfg = PipelineConfig::desk(10, 21);
        let mut blocks = build_blocks(&cfg).unwrap();
        let f = random_balanced_function(10, &mut crate::cube::RngStream::new(21));
        compute_imbalances(&mut blocks, &f).unwrap();
        let block_of = block_index(cfg.n, &blocks);
        let rng = crate::cube::RngStream::new(21);
        let paths = sample_paths(&cfg, &block_of, &mut rng.substream(1));

        // exponent 0 keeps each path with probability 1/(|B1||B2|): the
        // graph ends up nearly empty
        cfg.discard_exponent = Some(0);
        let sparse = build_unit_graph(&blocks, &paths, &cfg, &mut rng.substream(2));
        // a huge exponent clamps the keep probability to 1
        cfg.discard_exponent = Some(80);
        let full = build_unit_graph(&blocks, &paths, &cfg, &mut rng.substream(3));
        cfg.discard_exponent = None;
        let keep_all = build_unit_graph(&blocks, &paths, &cfg, &mut rng.substream(4));

        assert!(sparse.paths_surviving * 50 < paths.len());
        assert_eq!(full.paths_surviving, paths.len());
        assert_eq!(keep_all.paths_surviving, paths.len());
        assert!(sparse.edges.len() * 10 < full.edges.len());
        assert!(!keep_all.edges.is_empty());
    }

    #[test]
    fn side_mismatch_is_reported() {
        let g = UnitGraph {
            pos_units: alloc::vec![Unit { block: 0, index: 0 }],
            neg_units: Vec::new(),
            ..UnitGraph::default()
        };
        assert!(matches!(
            find_perfect_matching(&g),
            Err(MatchingFailure::SideMismatch { pos: 1, neg: 0 })
        ));
    }

    #[test]
    fn missing_edges_fail_the_matching() {
        let g = UnitGraph {
            pos_units: alloc::vec![Unit { block: 0, index: 0 }],
            neg_units: alloc::vec![Unit { block: 1, index: 0 }],
            ..UnitGraph::default()
        };
        assert!(matches!(
            find_perfect_matching(&g),
            Err(MatchingFailure::NotPerfect { matched: 0, needed: 1 })
        ));
    }
}
