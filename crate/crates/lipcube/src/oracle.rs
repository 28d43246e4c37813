//! Brute-force ground truth for tiny instances: exact dissimilarity
//! between boolean functions, pairwise Lipschitz verification, and
//! exhaustive matching sizes. These deliberately avoid the shortcuts the
//! main modules take, so they can certify them.

use alloc::vec::Vec;
use core::fmt;

use crate::cube::BooleanFunction;
use crate::mappings::{Mapping, MappingError};

/// Full enumeration is offered up to this dimension.
pub const MAX_ENUMERATION_DIM: u32 = 3;

/// Branch-and-bound is offered up to this dimension.
pub const MAX_BRANCH_AND_BOUND_DIM: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// No mapping from `f` to `g` exists: their level sets differ in size.
    LevelSetMismatch { f_ones: u64, g_ones: u64 },
    DimTooLarge { dim: u32, max: u32 },
    DimensionMismatch { left: u32, right: u32 },
    /// The node budget ran out before the search completed; the result
    /// would not be exact.
    BudgetExhausted { explored: u64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::LevelSetMismatch { f_ones, g_ones } => {
                write!(f, "level sets differ: {f_ones} ones vs {g_ones} ones")
            }
            OracleError::DimTooLarge { dim, max } => {
                write!(f, "dimension {dim} above oracle limit {max}")
            }
            OracleError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            OracleError::BudgetExhausted { explored } => {
                write!(f, "search budget exhausted after {explored} nodes")
            }
        }
    }
}

/// Exact dissimilarity between two boolean functions: the minimum over
/// all mappings from `f` to `g` of the product of the Lipschitz
/// constants of the map and its inverse, with an optimal witness.
#[derive(Clone, Debug)]
pub struct DlipResult {
    pub value: u64,
    pub witness: Mapping,
    /// Number of candidate bijections examined.
    pub candidates: u64,
}

/// Computes the exact dissimilarity by enumerating every level-set
/// bijection in lexicographic order (so the witness is deterministic).
pub fn dlip_exact(f: &BooleanFunction, g: &BooleanFunction) -> Result<DlipResult, OracleError> {
    let n = check_pair(f, g, MAX_ENUMERATION_DIM)?;
    let (ones_f, zeros_f) = level_sets(f);
    let (ones_g, zeros_g) = level_sets(g);

    let mut best: Option<(u64, Vec<u64>)> = None;
    let mut candidates = 0u64;
    let mut table = alloc::vec![0u64; 1 << n];
    let mut inverse = alloc::vec![0u64; 1 << n];

    let mut ones_perm = ones_g.clone();
    loop {
        let mut zeros_perm = zeros_g.clone();
        loop {
            candidates += 1;
            for (i, &x) in ones_f.iter().enumerate() {
                table[x as usize] = ones_perm[i];
            }
            for (i, &x) in zeros_f.iter().enumerate() {
                table[x as usize] = zeros_perm[i];
            }
            for (x, &y) in table.iter().enumerate() {
                inverse[y as usize] = x as u64;
            }
            let value =
                edge_lipschitz(&table, n) as u64 * edge_lipschitz(&inverse, n) as u64;
            if best.as_ref().is_none_or(|(v, _)| value < *v) {
                best = Some((value, table.clone()));
            }
            if !next_permutation(&mut zeros_perm) {
                break;
            }
        }
        if !next_permutation(&mut ones_perm) {
            break;
        }
    }

    let (value, table) = best.expect("at least one bijection exists");
    let witness = Mapping::from_table(alloc::format!("dlip-witness(n={n})"), n, table)
        .expect("enumerated tables are bijections");
    Ok(DlipResult {
        value,
        witness,
        candidates,
    })
}

/// Branch-and-bound variant for one dimension beyond full enumeration.
/// Prunes a partial assignment as soon as the product of its pairwise
/// stretch lower bounds reaches the incumbent. `node_budget` caps the
/// number of search nodes so runtime stays deterministic; exceeding it
/// is an error rather than an inexact answer.
pub fn dlip_branch_and_bound(
    f: &BooleanFunction,
    g: &BooleanFunction,
    node_budget: u64,
) -> Result<DlipResult, OracleError> {
    let n = check_pair(f, g, MAX_BRANCH_AND_BOUND_DIM)?;
    let (ones_f, zeros_f) = level_sets(f);
    let (ones_g, zeros_g) = level_sets(g);

    // domain points in assignment order: ones first, then zeros
    let domain: Vec<u64> = ones_f.iter().chain(zeros_f.iter()).copied().collect();
    let mut search = Search {
        domain,
        ones_count: ones_f.len(),
        ones_g,
        zeros_g,
        assigned: alloc::vec![u64::MAX; 1 << n],
        best_value: u64::MAX,
        best_table: None,
        nodes: 0,
        node_budget,
    };
    let mut used_ones = alloc::vec![false; search.ones_g.len()];
    let mut used_zeros = alloc::vec![false; search.zeros_g.len()];
    search.descend(0, 1, 1, &mut used_ones, &mut used_zeros)?;

    let table = search.best_table.expect("at least one bijection exists");
    let witness = Mapping::from_table(alloc::format!("dlip-witness(n={n})"), n, table)
        .expect("search tables are bijections");
    Ok(DlipResult {
        value: search.best_value,
        witness,
        candidates: search.nodes,
    })
}

struct Search {
    domain: Vec<u64>,
    ones_count: usize,
    ones_g: Vec<u64>,
    zeros_g: Vec<u64>,
    assigned: Vec<u64>, // domain point -> image, MAX when unset
    best_value: u64,
    best_table: Option<Vec<u64>>,
    nodes: u64,
    node_budget: u64,
}

impl Search {
    fn descend(
        &mut self,
        depth: usize,
        fwd: u32,
        bwd: u32,
        used_ones: &mut [bool],
        used_zeros: &mut [bool],
    ) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(OracleError::BudgetExhausted {
                explored: self.nodes,
            });
        }
        if depth == self.domain.len() {
            let value = fwd as u64 * bwd as u64;
            if value < self.best_value {
                self.best_value = value;
                self.best_table = Some(self.assigned.clone());
            }
            return Ok(());
        }
        let x = self.domain[depth];
        let in_ones = depth < self.ones_count;
        let codomain: Vec<u64> = if in_ones {
            self.ones_g.clone()
        } else {
            self.zeros_g.clone()
        };
        for (slot, &y) in codomain.iter().enumerate() {
            let used = if in_ones {
                &mut used_ones[slot]
            } else {
                &mut used_zeros[slot]
            };
            if *used {
                continue;
            }
            // tighten both constants against all already-assigned points
            let mut new_fwd = fwd;
            let mut new_bwd = bwd;
            for d in 0..depth {
                let x2 = self.domain[d];
                let y2 = self.assigned[x2 as usize];
                let dx = (x ^ x2).count_ones();
                let dy = (y ^ y2).count_ones();
                new_fwd = new_fwd.max(dy.div_ceil(dx));
                new_bwd = new_bwd.max(dx.div_ceil(dy));
            }
            if (new_fwd as u64) * (new_bwd as u64) >= self.best_value {
                continue; // prune
            }
            *if in_ones {
                &mut used_ones[slot]
            } else {
                &mut used_zeros[slot]
            } = true;
            self.assigned[x as usize] = y;
            self.descend(depth + 1, new_fwd, new_bwd, used_ones, used_zeros)?;
            self.assigned[x as usize] = u64::MAX;
            *if in_ones {
                &mut used_ones[slot]
            } else {
                &mut used_zeros[slot]
            } = false;
        }
        Ok(())
    }
}

fn check_pair(
    f: &BooleanFunction,
    g: &BooleanFunction,
    max_dim: u32,
) -> Result<u32, OracleError> {
    if f.dim() != g.dim() {
        return Err(OracleError::DimensionMismatch {
            left: f.dim(),
            right: g.dim(),
        });
    }
    let n = f.dim();
    if n > max_dim {
        return Err(OracleError::DimTooLarge { dim: n, max: max_dim });
    }
    if f.ones_count() != g.ones_count() {
        return Err(OracleError::LevelSetMismatch {
            f_ones: f.ones_count(),
            g_ones: g.ones_count(),
        });
    }
    Ok(n)
}

fn level_sets(f: &BooleanFunction) -> (Vec<u64>, Vec<u64>) {
    let n = f.dim();
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for i in 0..1u64 << n {
        if f.eval(crate::cube::Point::new(i, n)) {
            ones.push(i);
        } else {
            zeros.push(i);
        }
    }
    (ones, zeros)
}

fn edge_lipschitz(table: &[u64], n: u32) -> u32 {
    let mut max = 0;
    for x in 0..table.len() as u64 {
        let image = table[x as usize];
        for c in 0..n {
            max = max.max((image ^ table[(x ^ (1 << c)) as usize]).count_ones());
        }
    }
    max
}

fn next_permutation(xs: &mut [u64]) -> bool {
    if xs.len() <= 1 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// The minimal integer `C` with `dist(phi(x), phi(y)) <= C dist(x, y)`
/// for every unordered pair, computed without the edge-scan shortcut.
/// Certifies `analysis::lipschitz_constant`.
pub fn lipschitz_all_pairs(phi: &Mapping) -> Result<u32, MappingError> {
    if phi.dim() > 8 {
        return Err(MappingError::DimOutOfRange {
            dim: phi.dim(),
            min: 1,
            max: 8,
        });
    }
    let table = phi.require_table()?;
    let mut c = 0u32;
    for x in 0..table.len() as u64 {
        for y in x + 1..table.len() as u64 {
            let dx = (x ^ y).count_ones();
            let dy = (table[x as usize] ^ table[y as usize]).count_ones();
            c = c.max(dy.div_ceil(dx));
        }
    }
    Ok(c)
}

/// True maximum matching size of a small bipartite graph, by dynamic
/// programming over subsets of the right side. `adjacency[u]` lists the
/// right-side neighbours of left vertex `u`.
pub fn matching_max_exhaustive(adjacency: &[Vec<usize>], right_count: usize) -> usize {
    assert!(adjacency.len() <= 16 && right_count <= 16, "oracle is for tiny graphs");
    let left = adjacency.len();
    if left == 0 || right_count == 0 {
        return 0;
    }
    let masks: Vec<u32> = adjacency
        .iter()
        .map(|ns| {
            ns.iter().fold(0u32, |m, &j| {
                assert!(j < right_count, "edge endpoint out of range");
                m | 1 << j
            })
        })
        .collect();
    // dp[mask] = best matching among left vertices processed so far with
    // used-right set `mask`
    let mut dp = alloc::vec![0u8; 1 << right_count];
    for &adj in &masks {
        let mut next = dp.clone();
        for mask in 0..dp.len() as u32 {
            let base = dp[mask as usize];
            let mut free = adj & !mask;
            while free != 0 {
                let j = free.trailing_zeros();
                free &= free - 1;
                let with = mask | 1 << j;
                next[with as usize] = next[with as usize].max(base + 1);
            }
        }
        dp = next;
    }
    dp.iter().copied().max().unwrap_or(0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{self, is_mapping};
    use crate::cube::{random_balanced_function, Point, RngStream, TruthTable};

    #[test]
    fn dlip_of_function_with_itself_is_one() {
        let f = BooleanFunction::xor(3);
        let r = dlip_exact(&f, &f).unwrap();
        assert_eq!(r.value, 1);
        // identity is the lexicographically first witness achieving 1
        let id: Vec<u64> = (0..8).collect();
        assert_eq!(r.witness.require_table().unwrap(), &id[..]);
    }

    #[test]
    fn dlip_dict_xor_enumeration() {
        for n in [2u32, 3] {
            let (dic, xor) = (BooleanFunction::dictator(n), BooleanFunction::xor(n));
            let r = dlip_exact(&dic, &xor).unwrap();
            assert!(r.value <= 4, "n={n}: {}", r.value);
            assert!(r.value >= 1);
            assert!(is_mapping(&r.witness, &dic, &xor).unwrap());
            if n == 3 {
                assert_eq!(r.candidates, 576); // 4! * 4!
            }
        }
    }

    #[test]
    fn dlip_rejects_level_set_mismatch() {
        let mut t = TruthTable::zeros(2);
        t.set(0, true); // one 1 vs two for xor
        let f = BooleanFunction::from_table(t);
        assert!(matches!(
            dlip_exact(&f, &BooleanFunction::xor(2)),
            Err(OracleError::LevelSetMismatch { .. })
        ));
    }

    #[test]
    fn dlip_rejects_large_dimension() {
        let f = BooleanFunction::xor(4);
        assert!(matches!(
            dlip_exact(&f, &f),
            Err(OracleError::DimTooLarge { .. })
        ));
    }

    #[test]
    fn dlip_symmetry_all_balanced_pairs_small_n() {
        for n in [1u32, 2] {
            let functions = balanced_functions(n);
            for f in &functions {
                for g in &functions {
                    let fg = dlip_exact(f, g).unwrap().value;
                    let gf = dlip_exact(g, f).unwrap().value;
                    assert_eq!(fg, gf);
                }
            }
        }
    }

    #[test]
    fn dlip_symmetry_all_balanced_pairs_n3() {
        let functions = balanced_functions(3);
        assert_eq!(functions.len(), 70);
        for (a, f) in functions.iter().enumerate() {
            for g in &functions[a..] {
                let fg = dlip_exact(f, g).unwrap().value;
                let gf = dlip_exact(g, f).unwrap().value;
                assert_eq!(fg, gf);
            }
        }
    }

    #[test]
    fn dlip_submultiplicative_on_sampled_triples() {
        let functions = balanced_functions(3);
        let mut rng = RngStream::new(11);
        for _ in 0..25 {
            let f = &functions[rng.below(70) as usize];
            let g = &functions[rng.below(70) as usize];
            let h = &functions[rng.below(70) as usize];
            let fg = dlip_exact(f, g).unwrap().value;
            let fh = dlip_exact(f, h).unwrap().value;
            let hg = dlip_exact(h, g).unwrap().value;
            assert!(fg <= fh * hg, "dlip(f,g)={fg} > {fh} * {hg}");
        }
    }

    #[test]
    fn branch_and_bound_agrees_with_enumeration_at_n3() {
        let functions = balanced_functions(3);
        let mut rng = RngStream::new(5);
        for _ in 0..12 {
            let f = &functions[rng.below(70) as usize];
            let g = &functions[rng.below(70) as usize];
            let exact = dlip_exact(f, g).unwrap();
            let bb = dlip_branch_and_bound(f, g, u64::MAX).unwrap();
            assert_eq!(exact.value, bb.value);
            assert!(is_mapping(&bb.witness, f, g).unwrap());
        }
    }

    #[test]
    fn branch_and_bound_dict_xor_n4() {
        let (dic, xor) = (BooleanFunction::dictator(4), BooleanFunction::xor(4));
        let r = dlip_branch_and_bound(&dic, &xor, 500_000_000).unwrap();
        assert!(r.value <= 4, "value {}", r.value);
        assert!(is_mapping(&r.witness, &dic, &xor).unwrap());
    }

    #[test]
    fn branch_and_bound_budget_is_enforced() {
        let (dic, xor) = (BooleanFunction::dictator(4), BooleanFunction::xor(4));
        assert!(matches!(
            dlip_branch_and_bound(&dic, &xor, 10),
            Err(OracleError::BudgetExhausted { .. })
        ));
    }

    fn balanced_functions(n: u32) -> Vec<BooleanFunction> {
        let len = 1u64 << n;
        let mut out = Vec::new();
        for bits in 0..1u64 << len {
            if bits.count_ones() as u64 == len / 2 {
                let t = TruthTable::from_bits(n, (0..len).map(|i| (bits >> i) & 1 == 1));
                out.push(BooleanFunction::from_table(t));
            }
        }
        out
    }

    #[test]
    fn all_pairs_lipschitz_examples() {
        assert_eq!(lipschitz_all_pairs(&Mapping::identity(5).unwrap()).unwrap(), 1);
        let n = 5;
        let table: Vec<u64> = (0..1u64 << n).map(|i| i ^ ((1 << n) - 1)).collect();
        let complement = Mapping::from_table("complement".into(), n, table).unwrap();
        assert_eq!(lipschitz_all_pairs(&complement).unwrap(), 1);
    }

    #[test]
    fn all_pairs_agrees_with_edge_scan_on_random_permutations() {
        let n = 6;
        for seed in 0..50u64 {
            let mut rng = RngStream::new(seed);
            let mut table: Vec<u64> = (0..1u64 << n).collect();
            rng.shuffle(&mut table);
            let m = Mapping::from_table(alloc::format!("perm-{seed}"), n, table).unwrap();
            assert_eq!(
                lipschitz_all_pairs(&m).unwrap(),
                analysis::lipschitz_constant(&m).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn matching_oracle_examples() {
        assert_eq!(matching_max_exhaustive(&[], 0), 0);
        let k33: Vec<Vec<usize>> = (0..3).map(|_| alloc::vec![0, 1, 2]).collect();
        assert_eq!(matching_max_exhaustive(&k33, 3), 3);
        // path a0-b0, a1-b0: only one can match
        assert_eq!(
            matching_max_exhaustive(&[alloc::vec![0], alloc::vec![0]], 1),
            1
        );
    }

    #[test]
    fn dlip_value_is_at_least_one_for_random_balanced() {
        let mut rng = RngStream::new(2024);
        for _ in 0..10 {
            let f = random_balanced_function(3, &mut rng);
            let r = dlip_exact(&f, &f).unwrap();
            assert_eq!(r.value, 1);
            assert!(is_mapping(&r.witness, &f, &f).unwrap());
            // sanity: the witness is a permutation hitting every point
            let mut hit = [false; 8];
            for i in 0..8u64 {
                hit[r.witness.eval(Point::new(i, 3)).index() as usize] = true;
            }
            assert!(hit.iter().all(|&h| h));
        }
    }
}
