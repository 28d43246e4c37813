//! The set/used ledger and the greedy assignment stages: shifting one
//! unit of imbalance along each matched block path, then completing the
//! bijection inside every block.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cube::{BooleanFunction, Point};
use crate::mappings::Mapping;

use super::blocks::Block;
use super::paths::SampledPath;
use super::units::MatchedEdge;
use super::PipelineError;

/// Partial bijection under construction: a domain point is *set* once
/// its image is chosen, a codomain point is *used* once something maps
/// to it. Set and used counts stay equal at all times and the partial
/// table stays injective.
#[derive(Clone, Debug)]
pub struct AssignmentState {
    dim: u32,
    image: Vec<u64>, // u64::MAX = unset
    used: Vec<bool>,
    assigned: u64,
}

impl AssignmentState {
    pub fn new(dim: u32) -> Self {
        AssignmentState {
            dim,
            image: alloc::vec![u64::MAX; 1usize << dim],
            used: alloc::vec![false; 1usize << dim],
            assigned: 0,
        }
    }

    pub fn is_set(&self, x: u64) -> bool {
        self.image[x as usize] != u64::MAX
    }

    pub fn is_used(&self, y: u64) -> bool {
        self.used[y as usize]
    }

    pub fn assigned(&self) -> u64 {
        self.assigned
    }

    pub fn image_of(&self, x: u64) -> Option<u64> {
        let y = self.image[x as usize];
        (y != u64::MAX).then_some(y)
    }

    fn assign(&mut self, x: u64, y: u64) {
        debug_assert!(!self.is_set(x) && !self.is_used(y));
        self.image[x as usize] = y;
        self.used[y as usize] = true;
        self.assigned += 1;
    }

    fn into_mapping(self, name: String) -> Result<Mapping, PipelineError> {
        if self.assigned != 1u64 << self.dim {
            return Err(PipelineError::IncompleteAssignment {
                assigned: self.assigned,
            });
        }
        Mapping::from_table(name, self.dim, self.image)
            .map_err(|_| PipelineError::IncompleteAssignment { assigned: 0 })
    }
}

/// Capacity exhaustion inside a block: the path shifts demanded a point
/// of some class that was no longer available. Retrying with fresh paths
/// usually avoids the collision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapacityExhausted {
    pub block: u32,
}

/// Lowest unset member of the block with the given dictator value.
fn lowest_unset(block: &Block, state: &AssignmentState, dic: bool) -> Option<u64> {
    block
        .members
        .iter()
        .copied()
        .find(|&m| (m & 1 == 1) == dic && !state.is_set(m))
}

/// Lowest unused member of the block with the given f value.
fn lowest_unused(
    block: &Block,
    state: &AssignmentState,
    f: &BooleanFunction,
    value: bool,
) -> Option<u64> {
    block
        .members
        .iter()
        .copied()
        .find(|&m| f.eval(Point::new(m, f.dim())) == value && !state.is_used(m))
}

/// Walks every matched edge's block path from its positive end to its
/// negative end, shifting one dictator-0 forward and one dictator-1
/// backward across each consecutive block pair. Afterwards every block
/// has as many unset dictator-0s as unused f-0s, and likewise for 1s.
pub fn apply_shifts(
    matching: &[MatchedEdge],
    paths: &[SampledPath],
    blocks: &[Block],
    f: &BooleanFunction,
    state: &mut AssignmentState,
) -> Result<(), CapacityExhausted> {
    for edge in matching {
        let path = &paths[edge.path as usize];
        let seq: Vec<u32> = if path.first_block() == edge.pos.block {
            path.blocks.clone()
        } else {
            path.blocks.iter().rev().copied().collect()
        };
        debug_assert_eq!(seq[0], edge.pos.block);
        debug_assert_eq!(*seq.last().unwrap(), edge.neg.block);
        for w in seq.windows(2) {
            let (here, next) = (&blocks[w[0] as usize], &blocks[w[1] as usize]);
            // one 0 of dic moves forward onto a 0 of f
            let x = lowest_unset(here, state, false)
                .ok_or(CapacityExhausted { block: here.id })?;
            let y = lowest_unused(next, state, f, false)
                .ok_or(CapacityExhausted { block: next.id })?;
            state.assign(x, y);
            // one 1 of dic moves backward onto a 1 of f
            let x = lowest_unset(next, state, true)
                .ok_or(CapacityExhausted { block: next.id })?;
            let y = lowest_unused(here, state, f, true)
                .ok_or(CapacityExhausted { block: here.id })?;
            state.assign(x, y);
        }
    }
    Ok(())
}

/// Per-block ledger: (unset dictator-0s, unset dictator-1s, unused f-0s,
/// unused f-1s).
pub fn block_ledger(
    block: &Block,
    f: &BooleanFunction,
    state: &AssignmentState,
) -> (usize, usize, usize, usize) {
    let mut unset = [0usize; 2];
    let mut unused = [0usize; 2];
    for &m in &block.members {
        if !state.is_set(m) {
            unset[(m & 1) as usize] += 1;
        }
        if !state.is_used(m) {
            unused[f.eval(Point::new(m, f.dim())) as usize] += 1;
        }
    }
    (unset[0], unset[1], unused[0], unused[1])
}

/// Greedily completes the bijection inside every block, pairing unset
/// and unused points of matching function value in increasing encoding
/// order. Fails if some block's ledger is out of balance, which would be
/// an invariant violation upstream.
pub fn complete_within_blocks(
    blocks: &[Block],
    f: &BooleanFunction,
    mut state: AssignmentState,
    name: String,
) -> Result<Mapping, PipelineError> {
    for b in blocks {
        let (unset0, unset1, unused0, unused1) = block_ledger(b, f, &state);
        if unset0 != unused0 || unset1 != unused1 {
            return Err(PipelineError::LedgerImbalance { block: b.id });
        }
        for value in [false, true] {
            let xs: Vec<u64> = b
                .members
                .iter()
                .copied()
                .filter(|&m| (m & 1 == 1) == value && !state.is_set(m))
                .collect();
            let ys: Vec<u64> = b
                .members
                .iter()
                .copied()
                .filter(|&m| f.eval(Point::new(m, f.dim())) == value && !state.is_used(m))
                .collect();
            debug_assert_eq!(xs.len(), ys.len());
            for (x, y) in xs.into_iter().zip(ys) {
                state.assign(x, y);
            }
        }
    }
    state.into_mapping(name)
}
