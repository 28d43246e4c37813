//! Random geodesics between uniform endpoint pairs and the loop-free
//! block paths they induce.

use alloc::vec::Vec;

use crate::cube::RngStream;

use super::PipelineConfig;

/// A sampled shortest path: the vertex geodesic and the loop-free
/// sequence of blocks it visits.
#[derive(Clone, Debug)]
pub struct SampledPath {
    /// `dist(u, v) + 1` vertex encodings from `u` to `v`.
    pub vertices: Vec<u64>,
    /// Distinct block ids; consecutive entries contain adjacent vertices.
    pub blocks: Vec<u32>,
}

impl SampledPath {
    pub fn first_block(&self) -> u32 {
        self.blocks[0]
    }

    pub fn last_block(&self) -> u32 {
        *self.blocks.last().unwrap()
    }
}

/// Samples up to `cfg.path_count` paths: each draws a uniform endpoint
/// pair, realizes a geodesic by flipping the differing coordinates in a
/// uniformly random order, and extracts the visited-block sequence with
/// loops removed. Pairs with equal endpoints yield no path and are
/// dropped.
pub fn sample_paths(
    cfg: &PipelineConfig,
    block_of: &[u32],
    rng: &mut RngStream,
) -> Vec<SampledPath> {
    let n = cfg.n;
    let size = 1u64 << n;
    let mut paths = Vec::new();
    for _ in 0..cfg.path_count {
        let u = rng.below(size);
        let v = rng.below(size);
        if u == v {
            continue;
        }
        let mut flips: Vec<u32> = (0..n).filter(|c| (u ^ v) >> c & 1 == 1).collect();
        rng.shuffle(&mut flips);

        let mut vertices = Vec::with_capacity(flips.len() + 1);
        let mut blocks: Vec<u32> = Vec::new();
        let mut cur = u;
        vertices.push(cur);
        push_block(&mut blocks, block_of[cur as usize]);
        for &c in &flips {
            cur ^= 1 << c;
            vertices.push(cur);
            push_block(&mut blocks, block_of[cur as usize]);
        }
        paths.push(SampledPath { vertices, blocks });
    }
    paths
}

/// Appends a block to the walk, cutting the loop if it was seen before.
fn push_block(blocks: &mut Vec<u32>, b: u32) {
    if let Some(pos) = blocks.iter().position(|&x| x == b) {
        blocks.truncate(pos + 1);
    } else {
        blocks.push(b);
    }
}
