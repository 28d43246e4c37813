//! Randomized pipeline building a constant-displacement bijection from
//! the dictator to a balanced function: partition the cube into small
//! balanced blocks, sample random geodesics, match positive against
//! negative imbalance units through the sampled block paths, shift one
//! unit of imbalance along every matched path, and complete greedily
//! inside each block.
//!
//! Every stage is deterministic given the configuration: the same
//! `(config, seed)` reproduces the same mapping bit for bit.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use core::fmt;

use crate::cube::{random_balanced_function, BooleanFunction, RngStream, MAX_EXHAUSTIVE_DIM};
use crate::mappings::Mapping;

pub mod assign;
pub mod blocks;
pub mod paths;
pub mod units;

pub use assign::{apply_shifts, block_ledger, complete_within_blocks, AssignmentState};
pub use blocks::{block_index, build_blocks, compute_imbalances, Block};
pub use paths::{sample_paths, SampledPath};
pub use units::{
    build_unit_graph, find_perfect_matching, max_bipartite_matching, MatchedEdge,
    MatchingFailure, Unit, UnitEdge, UnitGraph,
};

/// The parameter regime in which the construction's probabilistic
/// guarantees are proved. The polynomial exponents are meaningful only as
/// `n` grows without bound; desk-scale runs use [`PipelineConfig::desk`],
/// which keeps the pipeline's structure but rescales every knob.
pub mod asymptotic {
    /// Minimum pairwise distance between block centers.
    pub const MIN_CENTER_DISTANCE: u32 = 42;
    /// Resulting bound on the diameter of a block.
    pub const BLOCK_DIAMETER_BOUND: u32 = 168;
    /// Resulting bound on `dist(x, phi(x))`.
    pub const DISPLACEMENT_BOUND: u32 = 337;
    /// Cells above `2 n^e` points split into pieces of `n^e .. 2 n^e`.
    pub const SPLIT_EXPONENT: u32 = 42;
    /// Unit indices are drawn from `[n^e]`.
    pub const UNIT_CAP_EXPONENT: u32 = 22;
    /// Paths survive with probability `n^e / (|B1| |B2|)`.
    pub const DISCARD_EXPONENT: u32 = 80;
    /// `K = 2^n / n^e` endpoint pairs are sampled.
    pub const PATH_COUNT_DIVISOR_EXPONENT: u32 = 4;
    /// No block's imbalance should exceed `n^e`.
    pub const IMBALANCE_BOUND_EXPONENT: u32 = 22;
    /// No block should meet more than `8 n^e` sampled paths.
    pub const PATHS_PER_BLOCK_EXPONENT: u32 = 39;
}

/// Tunable parameters of the pipeline. [`PipelineConfig::desk`] gives
/// desk-scale defaults; the [`asymptotic`] constants record the regime
/// the guarantees are proved in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub n: u32,
    /// Minimum pairwise distance between block centers (`d0 >= 2`).
    pub min_center_distance: u32,
    /// Cells larger than this are split.
    pub split_threshold: u64,
    /// Split pieces hold between this and twice this many cell points.
    pub split_target: u64,
    /// Number of endpoint pairs to sample.
    pub path_count: u64,
    /// `Some(e)` keeps a path with probability `n^e / (|B1| |B2|)`
    /// (clamped); `None` keeps every path.
    pub discard_exponent: Option<u32>,
    /// Units per block are capped here; a block whose imbalance exceeds
    /// the cap cannot be repaired and fails the run immediately.
    pub unit_cap: u32,
    /// Fresh path samples drawn before giving up.
    pub max_retries: u32,
    pub seed: u64,
}

impl PipelineConfig {
    /// Desk-scale defaults, sized so that runs at `n <= 16` succeed with
    /// comfortable margins. Two constraints pull against each other: the
    /// unit cap must clear the worst block imbalance (a capped block can
    /// never be repaired) yet stay small enough that the uniform
    /// unit-index draws actually hit existing units, and each block must
    /// hold enough points of either dictator value to absorb the shifts
    /// of every path routed through it. Distance-3 centers keep blocks a
    /// few dozen points, which suffices through n = 14; beyond that the
    /// per-block path load outgrows those blocks, so the centers move to
    /// distance 4 and the resulting large cells are split into runs of
    /// 32..64 points. The splitting serves two purposes: it bounds every
    /// block's imbalance spread well below the cap, and it keeps block
    /// sizes in a narrow band, so no block's units see too few index
    /// hits to join the matching (every unit needs an expected edge
    /// count past roughly ln of the unit total, or some unit starves and
    /// no retry saturates). A `64 * 2^n` path budget then yields a
    /// perfect matching within an attempt or two.
    pub fn desk(n: u32, seed: u64) -> Self {
        let no_split = u64::MAX;
        let (min_center_distance, unit_cap, split_threshold, split_target) = if n <= 14 {
            (3, 16, no_split, 1u64 << n.min(30))
        } else {
            (4, 24, 64, 32)
        };
        PipelineConfig {
            n,
            min_center_distance,
            split_threshold,
            split_target,
            path_count: 64u64 << n.min(30),
            discard_exponent: None,
            unit_cap,
            max_retries: 8,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.n < 3 || self.n > MAX_EXHAUSTIVE_DIM {
            return Err(PipelineError::InvalidConfig("dimension must lie in 3..=30"));
        }
        if self.min_center_distance < 2 {
            return Err(PipelineError::InvalidConfig(
                "min_center_distance must be >= 2",
            ));
        }
        if self.unit_cap == 0 {
            return Err(PipelineError::InvalidConfig("unit_cap must be >= 1"));
        }
        if self.split_target == 0 || self.split_threshold == 0 {
            return Err(PipelineError::InvalidConfig("split sizes must be positive"));
        }
        if self.path_count == 0 {
            return Err(PipelineError::InvalidConfig("path_count must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineError {
    InvalidConfig(&'static str),
    UnbalancedFunction,
    DimensionMismatch { expected: u32, got: u32 },
    /// A block's imbalance exceeds the unit cap; no amount of path
    /// resampling can move the residual, so the run fails up front.
    UnitCapBelowImbalance { block: u32, imbalance: u64, cap: u32 },
    /// A block's ledger went out of balance: an upstream invariant broke.
    LedgerImbalance { block: u32 },
    IncompleteAssignment { assigned: u64 },
    /// Every retry failed; diagnostics describe the final attempt.
    Exhausted {
        attempts: u32,
        last_failure: FailureReason,
        diagnostics: Box<PipelineDiagnostics>,
    },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            PipelineError::UnbalancedFunction => write!(f, "target function is not balanced"),
            PipelineError::DimensionMismatch { expected, got } => {
                write!(f, "target function has dimension {got}, config says {expected}")
            }
            PipelineError::UnitCapBelowImbalance { block, imbalance, cap } => write!(
                f,
                "block {block} carries imbalance {imbalance} above the unit cap {cap}"
            ),
            PipelineError::LedgerImbalance { block } => {
                write!(f, "ledger imbalance in block {block}")
            }
            PipelineError::IncompleteAssignment { assigned } => {
                write!(f, "assignment incomplete ({assigned} points set)")
            }
            PipelineError::Exhausted { attempts, last_failure, .. } => {
                write!(f, "all {attempts} attempts failed; last: {last_failure}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    NoPerfectMatching { matched: usize, needed: usize },
    UnitSideMismatch { pos: usize, neg: usize },
    CapacityExhausted { block: u32 },
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NoPerfectMatching { matched, needed } => {
                write!(f, "matching saturated {matched} of {needed} units")
            }
            FailureReason::UnitSideMismatch { pos, neg } => {
                write!(f, "unit sides differ: {pos} positive vs {neg} negative")
            }
            FailureReason::CapacityExhausted { block } => {
                write!(f, "block {block} ran out of shiftable points")
            }
        }
    }
}

/// Per-run measurements, including the desk-scale analogues of the
/// quantities the probabilistic argument controls: the largest block
/// imbalance, the total imbalance, and the worst path load per block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineDiagnostics {
    pub block_count: usize,
    pub min_block_size: usize,
    pub max_block_size: usize,
    pub max_block_diameter: u32,
    /// Largest |imbalance| over blocks.
    pub max_imbalance: u64,
    /// Sum of |imbalance| over blocks.
    pub total_imbalance: u64,
    pub positive_units: usize,
    pub negative_units: usize,
    pub paths_kept: usize,
    /// Largest number of sampled paths meeting a single block.
    pub max_paths_through_block: u64,
    pub unit_edges: usize,
    pub distinct_unit_edges: usize,
    pub matching_size: usize,
    pub attempts: u32,
    /// `2 * max block diameter + 1`: the displacement guarantee.
    pub displacement_bound: u32,
    /// Measured `max_x dist(x, phi(x))` of the result (successful runs).
    pub max_displacement: Option<u32>,
}

/// A successful pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub mapping: Mapping,
    pub target: BooleanFunction,
    pub diagnostics: PipelineDiagnostics,
}

/// Runs the full pipeline. When `f` is absent a uniformly random
/// balanced function is drawn from the seed's stream 0. Path sampling
/// retries with fresh substreams on matching failure or capacity
/// exhaustion; blocks are deterministic given the configuration and are
/// never resampled.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    f: Option<&BooleanFunction>,
) -> Result<PipelineRun, PipelineError> {
    cfg.validate()?;
    let root = RngStream::new(cfg.seed);
    let target: BooleanFunction = match f {
        Some(f) => {
            if f.dim() != cfg.n {
                return Err(PipelineError::DimensionMismatch {
                    expected: cfg.n,
                    got: f.dim(),
                });
            }
            if !f.is_balanced() {
                return Err(PipelineError::UnbalancedFunction);
            }
            f.clone()
        }
        None => random_balanced_function(cfg.n, &mut root.substream(0)),
    };

    let mut blocks = build_blocks(cfg)?;
    compute_imbalances(&mut blocks, &target)?;
    let block_of = block_index(cfg.n, &blocks);

    let mut diagnostics = PipelineDiagnostics {
        block_count: blocks.len(),
        min_block_size: blocks.iter().map(Block::len).min().unwrap_or(0),
        max_block_size: blocks.iter().map(Block::len).max().unwrap_or(0),
        max_block_diameter: blocks.iter().map(|b| b.diameter).max().unwrap_or(0),
        max_imbalance: blocks
            .iter()
            .map(|b| b.imbalance.unsigned_abs())
            .max()
            .unwrap_or(0),
        total_imbalance: blocks.iter().map(|b| b.imbalance.unsigned_abs()).sum(),
        ..PipelineDiagnostics::default()
    };
    diagnostics.displacement_bound = 2 * diagnostics.max_block_diameter + 1;

    if let Some(b) = blocks
        .iter()
        .find(|b| b.imbalance.unsigned_abs() > cfg.unit_cap as u64)
    {
        return Err(PipelineError::UnitCapBelowImbalance {
            block: b.id,
            imbalance: b.imbalance.unsigned_abs(),
            cap: cfg.unit_cap,
        });
    }

    let mut last_failure = FailureReason::NoPerfectMatching { matched: 0, needed: 0 };
    for attempt in 0..cfg.max_retries.max(1) {
        diagnostics.attempts = attempt + 1;
        let mut path_rng = root.substream(1 + 2 * attempt as u64);
        let mut unit_rng = root.substream(2 + 2 * attempt as u64);
        let paths = sample_paths(cfg, &block_of, &mut path_rng);

        let mut per_block = alloc::vec![0u64; blocks.len()];
        for p in &paths {
            for &b in &p.blocks {
                per_block[b as usize] += 1;
            }
        }
        diagnostics.paths_kept = paths.len();
        diagnostics.max_paths_through_block = per_block.iter().copied().max().unwrap_or(0);

        let graph = build_unit_graph(&blocks, &paths, cfg, &mut unit_rng);
        diagnostics.positive_units = graph.pos_units.len();
        diagnostics.negative_units = graph.neg_units.len();
        diagnostics.unit_edges = graph.edges.len();
        diagnostics.distinct_unit_edges = graph.distinct_edge_count();

        let matching = match find_perfect_matching(&graph) {
            Ok(m) => m,
            Err(MatchingFailure::NotPerfect { matched, needed }) => {
                last_failure = FailureReason::NoPerfectMatching { matched, needed };
                continue;
            }
            Err(MatchingFailure::SideMismatch { pos, neg }) => {
                last_failure = FailureReason::UnitSideMismatch { pos, neg };
                continue;
            }
        };
        diagnostics.matching_size = matching.len();

        let mut state = AssignmentState::new(cfg.n);
        if let Err(e) = apply_shifts(&matching, &paths, &blocks, &target, &mut state) {
            last_failure = FailureReason::CapacityExhausted { block: e.block };
            continue;
        }
        let mapping = complete_within_blocks(&blocks, &target, state, run_name(cfg))?;
        diagnostics.max_displacement = Some(
            crate::analysis::max_displacement(&mapping)
                .expect("pipeline mappings are materialized"),
        );
        return Ok(PipelineRun {
            mapping,
            target,
            diagnostics,
        });
    }
    Err(PipelineError::Exhausted {
        attempts: cfg.max_retries.max(1),
        last_failure,
        diagnostics: Box::new(diagnostics),
    })
}

fn run_name(cfg: &PipelineConfig) -> String {
    format!("dict-to-random(n={},seed={})", cfg.n, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{is_mapping, max_displacement};
    use crate::cube::BooleanFunction;

    #[test]
    fn dictator_target_succeeds_trivially() {
        let cfg = PipelineConfig::desk(8, 1);
        let f = BooleanFunction::dictator(8);
        let run = run_pipeline(&cfg, Some(&f)).unwrap();
        assert_eq!(run.diagnostics.total_imbalance, 0);
        assert_eq!(run.diagnostics.matching_size, 0);
        assert!(is_mapping(&run.mapping, &BooleanFunction::dictator(8), &f).unwrap());
        assert_eq!(max_displacement(&run.mapping).unwrap(), 0);
    }

    #[test]
    fn random_targets_succeed_and_verify_at_n10() {
        for seed in 0..5u64 {
            let cfg = PipelineConfig::desk(10, seed);
            let run = run_pipeline(&cfg, None).unwrap();
            assert!(
                is_mapping(&run.mapping, &BooleanFunction::dictator(10), &run.target).unwrap(),
                "seed {seed}"
            );
            let disp = run.diagnostics.max_displacement.unwrap();
            assert!(disp <= run.diagnostics.displacement_bound, "seed {seed}");
        }
    }

    #[test]
    fn runs_are_bit_for_bit_deterministic() {
        let cfg = PipelineConfig::desk(10, 42);
        let a = run_pipeline(&cfg, None).unwrap();
        let b = run_pipeline(&cfg, None).unwrap();
        assert_eq!(
            a.mapping.require_table().unwrap(),
            b.mapping.require_table().unwrap()
        );
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    #[test]
    fn conservation_holds_throughout() {
        let cfg = PipelineConfig::desk(10, 3);
        let run = run_pipeline(&cfg, None).unwrap();
        let d = &run.diagnostics;
        assert_eq!(d.positive_units + d.negative_units, d.total_imbalance as usize);
        assert_eq!(d.positive_units, d.negative_units);
        assert_eq!(d.matching_size, d.positive_units);
        let table = run.mapping.require_table().unwrap();
        assert_eq!(table.len(), 1 << 10);
    }

    #[test]
    fn cap_below_imbalance_fails_fast() {
        let cfg = PipelineConfig {
            unit_cap: 1,
            ..PipelineConfig::desk(10, 5)
        };
        match run_pipeline(&cfg, None) {
            Err(PipelineError::UnitCapBelowImbalance { imbalance, cap: 1, .. }) => {
                assert!(imbalance > 1);
            }
            other => panic!("expected UnitCapBelowImbalance, got {other:?}"),
        }
    }

    #[test]
    fn too_few_paths_exhausts_retries_with_diagnostics() {
        let cfg = PipelineConfig {
            path_count: 4,
            max_retries: 2,
            ..PipelineConfig::desk(10, 5)
        };
        match run_pipeline(&cfg, None) {
            Err(PipelineError::Exhausted { attempts, diagnostics, .. }) => {
                assert_eq!(attempts, 2);
                assert!(diagnostics.total_imbalance > 0);
            }
            other => panic!("expected Exhausted, got {other:?}"),
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = PipelineConfig::desk(10, 0);
        cfg.min_center_distance = 1;
        assert!(matches!(
            run_pipeline(&cfg, None),
            Err(PipelineError::InvalidConfig(_))
        ));
        let cfg = PipelineConfig::desk(2, 0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn mismatched_target_dimension_is_rejected() {
        let cfg = PipelineConfig::desk(8, 0);
        let f = BooleanFunction::dictator(9);
        assert!(matches!(
            run_pipeline(&cfg, Some(&f)),
            Err(PipelineError::DimensionMismatch { expected: 8, got: 9 })
        ));
    }
}
