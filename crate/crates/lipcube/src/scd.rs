//! Symmetric chain decompositions of the cube and the chain-partner map.
//!
//! The canonical decomposition is the bracket-matching construction:
//! read coordinates 1..n, treat a 1 as an opening bracket and a 0 as a
//! closing bracket, and match them like parentheses. The matched
//! coordinates of a point are frozen; its chain consists of the points
//! whose unmatched coordinates carry the pattern 0..01..1, ordered by
//! weight. Walking up the chain turns the rightmost unmatched 0 into a 1,
//! so consecutive chain elements differ in exactly one coordinate.
//!
//! This fixes one decomposition among many. The partner of a point is
//! computable in O(n) straight from the bracket matching, without
//! materializing the decomposition.

use alloc::vec::Vec;
use core::fmt;

use crate::cube::{binomial, Point};

/// Largest dimension for which [`decompose`] materializes the chains.
/// [`chain_partner`] has no such limit (word size only).
pub const MAX_DECOMPOSE_DIM: u32 = 24;

/// A symmetric chain: a path `c_k, ..., c_{n-k}` in the cube with
/// `|c_i| = i`, symmetric about weight `n/2`.
#[derive(Clone, PartialEq, Eq)]
pub struct Chain {
    points: Vec<Point>,
}

impl Chain {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lowest-weight element.
    pub fn bottom(&self) -> Point {
        self.points[0]
    }

    /// Highest-weight element.
    pub fn top(&self) -> Point {
        *self.points.last().unwrap()
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.points.iter()).finish()
    }
}

/// A partition of `{0,1}^n` into symmetric chains.
#[derive(Clone, Debug)]
pub struct ChainDecomposition {
    dim: u32,
    chains: Vec<Chain>,
}

impl ChainDecomposition {
    /// Wraps caller-supplied chains, validating every decomposition
    /// invariant: weights consecutive and symmetric about `n/2`, chain
    /// steps along cube edges, and the chains partitioning `{0,1}^n`.
    pub fn from_chains(dim: u32, chains: Vec<Vec<Point>>) -> Result<Self, ScdError> {
        if !(1..=MAX_DECOMPOSE_DIM).contains(&dim) {
            return Err(ScdError::DimOutOfRange { dim });
        }
        let mut seen = alloc::vec![false; 1usize << dim];
        for points in &chains {
            let Some(first) = points.first() else {
                return Err(ScdError::InvalidChains { reason: "empty chain" });
            };
            let k = first.weight();
            if points.last().unwrap().weight() != dim - k {
                return Err(ScdError::InvalidChains {
                    reason: "end weights are not symmetric about n/2",
                });
            }
            for (i, p) in points.iter().enumerate() {
                if p.dim() != dim {
                    return Err(ScdError::InvalidChains { reason: "dimension mismatch" });
                }
                if p.weight() != k + i as u32 {
                    return Err(ScdError::InvalidChains {
                        reason: "weights are not consecutive",
                    });
                }
                if i > 0 && p.dist(points[i - 1]) != 1 {
                    return Err(ScdError::InvalidChains { reason: "chain is not a path" });
                }
                if core::mem::replace(&mut seen[p.index() as usize], true) {
                    return Err(ScdError::InvalidChains {
                        reason: "a point appears in two chains",
                    });
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(ScdError::InvalidChains {
                reason: "chains do not cover the cube",
            });
        }
        Ok(ChainDecomposition {
            dim,
            chains: chains.into_iter().map(|points| Chain { points }).collect(),
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    /// Index vector mapping each point encoding to the id of its chain.
    pub fn point_to_chain(&self) -> Vec<usize> {
        let mut idx = alloc::vec![usize::MAX; 1usize << self.dim];
        for (c, chain) in self.chains.iter().enumerate() {
            for p in chain.points() {
                idx[p.index() as usize] = c;
            }
        }
        idx
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScdError {
    DimOutOfRange { dim: u32 },
    InvalidChains { reason: &'static str },
}

impl fmt::Display for ScdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScdError::DimOutOfRange { dim } => {
                write!(f, "dimension {dim} outside 1..={MAX_DECOMPOSE_DIM}")
            }
            ScdError::InvalidChains { reason } => {
                write!(f, "not a symmetric chain decomposition: {reason}")
            }
        }
    }
}

/// Bitmask of the coordinates of `x` left unmatched by bracket matching
/// (bit `i-1` for coordinate `i`).
fn unmatched_mask(x: Point) -> u64 {
    let bits = x.index();
    let mut mask = 0u64;
    let mut stack: u64 = 0; // bitmask of currently open (unmatched) 1s
    for i in 0..x.dim() {
        if (bits >> i) & 1 == 1 {
            stack |= 1 << i;
        } else if stack != 0 {
            // close the most recent open bracket
            let top = 63 - stack.leading_zeros();
            stack &= !(1u64 << top);
        } else {
            mask |= 1 << i; // unmatched closing bracket
        }
    }
    mask | stack
}

/// The unique point in the canonical chain of `x` with weight `n - |x|`.
///
/// Involution; agrees with the chain structure of [`decompose`] and works
/// for any dimension up to the word size.
pub fn chain_partner(x: Point) -> Point {
    let free = unmatched_mask(x);
    let total = free.count_ones();
    let ones = (x.index() & free).count_ones();
    let target = total - ones;
    with_top_free_ones(x, free, target)
}

/// Rewrites the unmatched coordinates of `x` to hold `count` ones in the
/// highest unmatched positions (the canonical 0..01..1 pattern).
fn with_top_free_ones(x: Point, free: u64, count: u32) -> Point {
    let mut bits = x.index() & !free;
    let mut remaining = count;
    let mut m = free;
    while remaining > 0 {
        let top = 63 - m.leading_zeros();
        bits |= 1 << top;
        m &= !(1u64 << top);
        remaining -= 1;
    }
    Point::new(bits, x.dim())
}

/// Materializes the canonical symmetric chain decomposition of `{0,1}^n`.
///
/// Chains are emitted in increasing order of their bottom element's
/// integer encoding; within a chain, points are ordered by weight.
pub fn decompose(n: u32) -> Result<ChainDecomposition, ScdError> {
    if !(1..=MAX_DECOMPOSE_DIM).contains(&n) {
        return Err(ScdError::DimOutOfRange { dim: n });
    }
    let mut chains = Vec::with_capacity(binomial(n as u64, (n / 2) as u64) as usize);
    for bits in 0..1u64 << n {
        let x = Point::new(bits, n);
        let free = unmatched_mask(x);
        if x.index() & free != 0 {
            continue; // not the bottom of its chain
        }
        let total = free.count_ones();
        let points = (0..=total).map(|k| with_top_free_ones(x, free, k)).collect();
        chains.push(Chain { points });
    }
    Ok(ChainDecomposition { dim: n, chains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn check_decomposition(d: &ChainDecomposition) {
        let n = d.dim();
        // partition: every point in exactly one chain
        let mut seen = alloc::vec![0u32; 1usize << n];
        for chain in d.chains() {
            let pts = chain.points();
            let k = pts[0].weight();
            assert_eq!(pts.last().unwrap().weight(), n - k, "not symmetric");
            for (i, p) in pts.iter().enumerate() {
                assert_eq!(p.weight(), k + i as u32, "weights not consecutive");
                seen[p.index() as usize] += 1;
                if i > 0 {
                    assert_eq!(p.dist(pts[i - 1]), 1, "chain is not a path");
                }
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "chains do not partition");
        assert_eq!(
            d.chains().len() as u64,
            binomial(n as u64, (n / 2) as u64),
            "wrong chain count"
        );
    }

    #[test]
    fn decompose_n1_is_single_full_chain() {
        let d = decompose(1).unwrap();
        assert_eq!(d.chains().len(), 1);
        assert_eq!(
            d.chains()[0].points(),
            &[Point::new(0, 1), Point::new(1, 1)]
        );
    }

    #[test]
    fn decompose_n2_matches_canonical_convention() {
        let d = decompose(2).unwrap();
        check_decomposition(&d);
        let encodings: Vec<Vec<u64>> = d
            .chains()
            .iter()
            .map(|c| c.points().iter().map(|p| p.index()).collect())
            .collect();
        // {00 -> 01 -> 11} and {10}; coordinate 1 is the low bit
        assert_eq!(encodings, alloc::vec![alloc::vec![0, 2, 3], alloc::vec![1]]);
    }

    #[test]
    fn decompose_n3_matches_documented_chains() {
        let d = decompose(3).unwrap();
        check_decomposition(&d);
        let encodings: Vec<Vec<u64>> = d
            .chains()
            .iter()
            .map(|c| c.points().iter().map(|p| p.index()).collect())
            .collect();
        // {000,001,011,111}, {100,101}, {010,110} as coordinate strings
        assert_eq!(
            encodings,
            alloc::vec![alloc::vec![0, 4, 6, 7], alloc::vec![1, 5], alloc::vec![2, 3]]
        );
    }

    #[test]
    fn decompose_n4_length_multiset() {
        let d = decompose(4).unwrap();
        check_decomposition(&d);
        let mut lengths: Vec<usize> = d.chains().iter().map(|c| c.len()).collect();
        lengths.sort_unstable();
        assert_eq!(lengths, alloc::vec![1, 1, 3, 3, 3, 5]);
    }

    #[test]
    fn decompose_length_counts_match_binomial_formula() {
        // chains of length n+1-2k appear binom(n,k) - binom(n,k-1) times
        for n in 1..=10u32 {
            let d = decompose(n).unwrap();
            let mut by_len: BTreeMap<usize, u64> = BTreeMap::new();
            for c in d.chains() {
                *by_len.entry(c.len()).or_default() += 1;
            }
            for k in 0..=(n / 2) as u64 {
                let len = (n as u64 + 1 - 2 * k) as usize;
                let expect = binomial(n as u64, k)
                    - if k == 0 { 0 } else { binomial(n as u64, k - 1) };
                if expect > 0 {
                    assert_eq!(by_len.get(&len).copied().unwrap_or(0), expect, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn decompose_invariants_exhaustive() {
        for n in 1..=12u32 {
            check_decomposition(&decompose(n).unwrap());
        }
    }

    #[test]
    fn decompose_rejects_out_of_range() {
        assert!(decompose(0).is_err());
        assert!(decompose(MAX_DECOMPOSE_DIM + 1).is_err());
    }

    #[test]
    fn partner_examples() {
        // n=3: 001 -> 011 under the canonical decomposition
        assert_eq!(chain_partner(Point::new(4, 3)), Point::new(6, 3));
        // all-zeros -> all-ones
        for n in 1..=16u32 {
            assert_eq!(chain_partner(Point::zero(n)), Point::ones(n));
        }
        // midpoints of even cubes are fixed
        for n in [2u32, 4, 6, 8] {
            for bits in 0..1u64 << n {
                let x = Point::new(bits, n);
                if x.weight() == n / 2 {
                    assert_eq!(chain_partner(x), x);
                }
            }
        }
    }

    #[test]
    fn partner_is_involution_with_complementary_weight() {
        for n in 1..=16u32 {
            for bits in 0..1u64 << n {
                let x = Point::new(bits, n);
                let y = chain_partner(x);
                assert_eq!(x.weight() + y.weight(), n);
                assert_eq!(chain_partner(y), x);
            }
        }
    }

    #[test]
    fn partner_lies_in_same_materialized_chain() {
        for n in 1..=16u32 {
            let d = decompose(n).unwrap();
            let idx = d.point_to_chain();
            for bits in 0..1u64 << n {
                let x = Point::new(bits, n);
                let y = chain_partner(x);
                assert_eq!(
                    idx[x.index() as usize],
                    idx[y.index() as usize],
                    "partner left its chain at n={n}, x={x}"
                );
            }
        }
    }

    #[test]
    fn partner_agrees_with_materialized_partner() {
        for n in 1..=12u32 {
            let d = decompose(n).unwrap();
            for chain in d.chains() {
                let pts = chain.points();
                for p in pts {
                    let want = pts
                        .iter()
                        .find(|q| q.weight() == n - p.weight())
                        .copied()
                        .unwrap();
                    assert_eq!(chain_partner(*p), want);
                }
            }
        }
    }

    #[test]
    fn from_chains_accepts_a_relabelled_decomposition() {
        // reversing the coordinate order maps chains to chains but
        // produces a different decomposition from the canonical one
        let n = 5;
        let canonical = decompose(n).unwrap();
        let reversed: Vec<Vec<Point>> = canonical
            .chains()
            .iter()
            .map(|c| {
                c.points()
                    .iter()
                    .map(|p| {
                        Point::new((p.index().reverse_bits() >> (64 - n)) & ((1 << n) - 1), n)
                    })
                    .collect()
            })
            .collect();
        let custom = ChainDecomposition::from_chains(n, reversed).unwrap();
        assert_ne!(
            custom.point_to_chain(),
            canonical.point_to_chain(),
            "relabelling should change the decomposition"
        );
    }

    #[test]
    fn from_chains_rejects_invalid_input() {
        let n = 2;
        let p = |bits| Point::new(bits, n);
        // weight skip
        assert!(matches!(
            ChainDecomposition::from_chains(n, alloc::vec![alloc::vec![p(0), p(3)]]),
            Err(ScdError::InvalidChains { .. })
        ));
        // valid chains but not a cover
        assert!(matches!(
            ChainDecomposition::from_chains(n, alloc::vec![alloc::vec![p(0), p(2), p(3)]]),
            Err(ScdError::InvalidChains { .. })
        ));
        // duplicate point
        assert!(matches!(
            ChainDecomposition::from_chains(
                n,
                alloc::vec![alloc::vec![p(0), p(2), p(3)], alloc::vec![p(2)]]
            ),
            Err(ScdError::InvalidChains { .. })
        ));
        // asymmetric end weights
        assert!(matches!(
            ChainDecomposition::from_chains(
                n,
                alloc::vec![alloc::vec![p(0), p(2)], alloc::vec![p(1), p(3)]]
            ),
            Err(ScdError::InvalidChains { .. })
        ));
    }

    #[test]
    fn partner_works_at_large_dimension() {
        // streaming partner has no materialization limit
        let x = Point::new(0b1010_1100_1111_0000_1010_1010, 40);
        let y = chain_partner(x);
        assert_eq!(x.weight() + y.weight(), 40);
        assert_eq!(chain_partner(y), x);
    }
}
