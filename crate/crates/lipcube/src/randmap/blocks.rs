//! Block partition of the cube: a greedy maximal code over `{0,1}^{n-1}`
//! picks well-separated centers, every point joins its nearest center
//! (ties to the lowest center id), oversized cells are split into
//! contiguous runs, and each cell is doubled along the first coordinate
//! so every block holds equally many 0s and 1s of the dictator.

use alloc::vec::Vec;

use crate::cube::{BooleanFunction, Point};

use super::{PipelineConfig, PipelineError};

/// One cell of the partition, doubled along coordinate 1.
#[derive(Clone, Debug)]
pub struct Block {
    pub id: u32,
    /// Center of the parent cell, an encoding in `{0,1}^{n-1}`.
    pub center: u64,
    /// Sorted member encodings in `{0,1}^n`.
    pub members: Vec<u64>,
    /// Max pairwise Hamming distance between members.
    pub diameter: u32,
    /// Signed imbalance of `f` over the block: ones minus `|B|/2`.
    /// Zero until [`compute_imbalances`] runs.
    pub imbalance: i64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Builds the deterministic block partition of `{0,1}^n` for the given
/// configuration. Every block has even size with exactly half its
/// members dictator-1s, and diameter at most `2 (d0 - 1) + 1`.
pub fn build_blocks(cfg: &PipelineConfig) -> Result<Vec<Block>, PipelineError> {
    cfg.validate()?;
    let half_n = cfg.n - 1;
    let half_size = 1u64 << half_n;
    let d0 = cfg.min_center_distance;

    // greedy maximal code: scan in encoding order
    let mut centers: Vec<u64> = Vec::new();
    for p in 0..half_size {
        if centers.iter().all(|&c| (c ^ p).count_ones() >= d0) {
            centers.push(p);
        }
    }

    // nearest-center cells, ties to the lowest center id
    let mut cells: Vec<Vec<u64>> = alloc::vec![Vec::new(); centers.len()];
    for p in 0..half_size {
        let mut best = 0usize;
        let mut best_d = u32::MAX;
        for (i, &c) in centers.iter().enumerate() {
            let d = (c ^ p).count_ones();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        cells[best].push(p);
    }

    // split oversized cells into contiguous runs of the sorted points
    let mut blocks: Vec<Block> = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        if cell.is_empty() {
            continue;
        }
        let pieces = if (cell.len() as u64) > cfg.split_threshold {
            ((cell.len() as u64) / cfg.split_target).max(1) as usize
        } else {
            1
        };
        let base = cell.len() / pieces;
        let extra = cell.len() % pieces;
        let mut start = 0usize;
        for piece in 0..pieces {
            let size = base + usize::from(piece < extra);
            let slice = &cell[start..start + size];
            start += size;
            let mut members = Vec::with_capacity(2 * slice.len());
            for &a in slice {
                members.push(a << 1);
                members.push((a << 1) | 1);
            }
            blocks.push(Block {
                id: blocks.len() as u32,
                center: centers[i],
                members,
                diameter: cell_diameter(slice) + 1,
                imbalance: 0,
            });
        }
    }
    Ok(blocks)
}

fn cell_diameter(cell: &[u64]) -> u32 {
    let mut d = 0;
    for (i, &a) in cell.iter().enumerate() {
        for &b in &cell[i + 1..] {
            d = d.max((a ^ b).count_ones());
        }
    }
    d
}

/// Index from point encoding to block id.
pub fn block_index(n: u32, blocks: &[Block]) -> Vec<u32> {
    let mut idx = alloc::vec![u32::MAX; 1usize << n];
    for b in blocks {
        for &m in &b.members {
            idx[m as usize] = b.id;
        }
    }
    idx
}

/// Fills in the signed imbalance of `f` over every block. Requires `f`
/// balanced; the signed imbalances then sum to zero.
pub fn compute_imbalances(blocks: &mut [Block], f: &BooleanFunction) -> Result<(), PipelineError> {
    if !f.is_balanced() {
        return Err(PipelineError::UnbalancedFunction);
    }
    let n = f.dim();
    let mut total: i64 = 0;
    for b in blocks.iter_mut() {
        let ones = b
            .members
            .iter()
            .filter(|&&m| f.eval(Point::new(m, n)))
            .count() as i64;
        b.imbalance = ones - (b.members.len() / 2) as i64;
        total += b.imbalance;
    }
    assert_eq!(total, 0, "balanced f over a partition conserves imbalance");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::TruthTable;

    fn desk_cfg(n: u32, d0: u32) -> PipelineConfig {
        PipelineConfig {
            min_center_distance: d0,
            ..PipelineConfig::desk(n, 0)
        }
    }

    fn check_partition(n: u32, blocks: &[Block]) {
        let mut seen = alloc::vec![0u32; 1usize << n];
        for b in blocks {
            assert!(!b.members.is_empty());
            assert!(b.members.windows(2).all(|w| w[0] < w[1]), "members sorted");
            let ones = b.members.iter().filter(|&&m| m & 1 == 1).count();
            assert_eq!(2 * ones, b.members.len(), "dictator balance");
            for &m in &b.members {
                seen[m as usize] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "blocks must partition the cube");
    }

    #[test]
    fn partition_and_balance_hold_exhaustively() {
        for n in 3..=12u32 {
            for d0 in [3u32, 4] {
                let blocks = build_blocks(&desk_cfg(n, d0)).unwrap();
                check_partition(n, &blocks);
            }
        }
    }

    #[test]
    fn diameter_bound_holds_by_pairwise_scan() {
        for n in [6u32, 10, 12] {
            for d0 in [3u32, 4] {
                let blocks = build_blocks(&desk_cfg(n, d0)).unwrap();
                for b in &blocks {
                    let mut diam = 0;
                    for (i, &x) in b.members.iter().enumerate() {
                        for &y in &b.members[i + 1..] {
                            diam = diam.max((x ^ y).count_ones());
                        }
                    }
                    assert_eq!(diam, b.diameter, "cached diameter is exact");
                    assert!(
                        diam <= 2 * (d0 - 1) + 1,
                        "diameter {diam} above bound at n={n} d0={d0}"
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_distance_gives_one_giant_block() {
        let n = 8;
        let blocks = build_blocks(&desk_cfg(n, n)).unwrap();
        check_partition(n, &blocks);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].len(), 1 << n);
    }

    #[test]
    fn oversized_cells_split_into_bounded_runs() {
        let n = 9;
        let cfg = PipelineConfig {
            min_center_distance: n, // single giant cell of 2^(n-1) = 256 points
            split_threshold: 64,
            split_target: 32,
            ..PipelineConfig::desk(n, 0)
        };
        let blocks = build_blocks(&cfg).unwrap();
        check_partition(n, &blocks);
        assert!(blocks.len() > 1, "cell should have been split");
        for b in &blocks {
            let cell = b.members.len() / 2;
            assert!(
                cell as u64 >= cfg.split_target && cell as u64 <= 2 * cfg.split_target,
                "piece size {cell} outside target range"
            );
        }
    }

    #[test]
    fn imbalances_of_dictator_are_zero() {
        let n = 10;
        let mut blocks = build_blocks(&desk_cfg(n, 3)).unwrap();
        compute_imbalances(&mut blocks, &BooleanFunction::dictator(n)).unwrap();
        assert!(blocks.iter().all(|b| b.imbalance == 0));
    }

    #[test]
    fn single_cross_block_swap_moves_unit_imbalance() {
        let n = 10;
        let mut blocks = build_blocks(&desk_cfg(n, 3)).unwrap();
        assert!(blocks.len() >= 2);
        // dictator, except one 0-of-dic in block 0 answers 1 and one
        // 1-of-dic in block 1 answers 0
        let a = *blocks[0].members.iter().find(|&&m| m & 1 == 0).unwrap();
        let b = *blocks[1].members.iter().find(|&&m| m & 1 == 1).unwrap();
        let mut t = TruthTable::zeros(n);
        for i in 0..t.len() {
            t.set(i, i & 1 == 1);
        }
        t.set(a, true);
        t.set(b, false);
        let f = BooleanFunction::from_table(t);
        compute_imbalances(&mut blocks, &f).unwrap();
        assert_eq!(blocks[0].imbalance, 1);
        assert_eq!(blocks[1].imbalance, -1);
        assert!(blocks[2..].iter().all(|blk| blk.imbalance == 0));
    }

    #[test]
    fn random_balanced_imbalances_sum_to_zero() {
        let n = 12;
        let mut blocks = build_blocks(&desk_cfg(n, 4)).unwrap();
        let f = crate::cube::random_balanced_function(n, &mut crate::cube::RngStream::new(1));
        compute_imbalances(&mut blocks, &f).unwrap();
        assert_eq!(blocks.iter().map(|b| b.imbalance).sum::<i64>(), 0);
        assert!(blocks.iter().any(|b| b.imbalance != 0), "seed 1 is not exactly flat");
    }

    #[test]
    fn unbalanced_function_is_rejected() {
        let n = 4;
        let mut blocks = build_blocks(&desk_cfg(n, 3)).unwrap();
        let mut t = TruthTable::zeros(n);
        t.set(0, true);
        let f = BooleanFunction::from_table(t);
        assert!(matches!(
            compute_imbalances(&mut blocks, &f),
            Err(PipelineError::UnbalancedFunction)
        ));
    }
}
