//! Metric and structural measurement of mappings: Lipschitz constants,
//! average stretch, dependency graphs, locality, displacement, and the
//! certificates that pin the lower-bound arguments to concrete instances.

use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::cube::{BooleanFunction, FunctionKind, Point, RngStream, MAX_EXHAUSTIVE_DIM};
use crate::mappings::{Mapping, MappingError};

/// Exact nonnegative rational; average stretch values keep their raw
/// numerator/denominator pair so exhaustive results report the
/// denominator `n * 2^n` unreduced.
pub type Rational = Ratio<u128>;

/// Lossy decimal view of an exact rational, for display only.
pub fn approx_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisError {
    Mapping(MappingError),
    /// The operation's hypothesis does not hold for the given inputs.
    Hypothesis(&'static str),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::Mapping(e) => write!(f, "{e}"),
            AnalysisError::Hypothesis(reason) => write!(f, "hypothesis not satisfied: {reason}"),
        }
    }
}

impl From<MappingError> for AnalysisError {
    fn from(e: MappingError) -> Self {
        AnalysisError::Mapping(e)
    }
}

/// The Lipschitz constant of a materialized bijection: the maximum of
/// `dist(phi(x), phi(x + e_i))` over all points and directions.
///
/// Scanning edges suffices for the global constant: any pair is joined by
/// a geodesic edge path, so pairwise ratios never exceed the worst edge.
/// `oracle::lipschitz_all_pairs` certifies this shortcut independently.
pub fn lipschitz_constant(phi: &Mapping) -> Result<u32, AnalysisError> {
    let table = phi.require_table()?;
    let n = phi.dim();
    let mut max = 0u32;
    for x in 0..table.len() as u64 {
        let image = table[x as usize];
        for c in 0..n {
            let stretch = (image ^ table[(x ^ (1 << c)) as usize]).count_ones();
            max = max.max(stretch);
        }
    }
    Ok(max)
}

/// Exact average stretch `E_{x,i}[dist(phi(x), phi(x+e_i))]` as a
/// rational with denominator `n * 2^n`. Each directed `(x, i)` pair
/// contributes once, so every undirected edge is counted twice, matching
/// the expectation over independent uniform `x` and `i`.
pub fn avg_stretch_exhaustive(phi: &Mapping) -> Result<Rational, AnalysisError> {
    let table = phi.require_table()?;
    let n = phi.dim();
    let mut total: u128 = 0;
    for x in 0..table.len() as u64 {
        let image = table[x as usize];
        for c in 0..n {
            total += (image ^ table[(x ^ (1 << c)) as usize]).count_ones() as u128;
        }
    }
    Ok(Rational::new_raw(total, (n as u128) << n))
}

/// Mean stretch over independently drawn `(x, i)` pairs; reported with
/// the sample count. Works for streaming mappings at any dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledStretch {
    pub mean: f64,
    pub samples: u64,
    pub max_observed: u32,
}

pub fn avg_stretch_sampled(phi: &Mapping, samples: u64, rng: &mut RngStream) -> SampledStretch {
    assert!(samples > 0, "sample count must be explicit and positive");
    let n = phi.dim();
    let mut total: u64 = 0;
    let mut max_observed = 0u32;
    for _ in 0..samples {
        let x = rng.point(n);
        let i = rng.below(n as u64) as u32 + 1;
        let stretch = phi.eval(x).dist(phi.eval(x.flip(i)));
        total += stretch as u64;
        max_observed = max_observed.max(stretch);
    }
    SampledStretch {
        mean: total as f64 / samples as f64,
        samples,
        max_observed,
    }
}

/// Maximum displacement `max_x dist(x, phi(x))`.
pub fn max_displacement(phi: &Mapping) -> Result<u32, AnalysisError> {
    let table = phi.require_table()?;
    Ok(table
        .iter()
        .enumerate()
        .map(|(x, &y)| (x as u64 ^ y).count_ones())
        .max()
        .unwrap_or(0))
}

/// A bijection whose displacement is at most `c` is automatically
/// `(2c + 1)`-bi-Lipschitz, by the triangle inequality along any edge.
pub fn displacement_bilipschitz_bound(c: u32) -> u32 {
    2 * c + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StretchMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AvgStretch {
    Exact(Rational),
    Sampled { mean: f64, samples: u64 },
}

/// Summary of a mapping's metric behaviour.
#[derive(Clone, Debug)]
pub struct StretchReport {
    pub n: u32,
    pub lipschitz_constant: u32,
    pub avg_stretch: AvgStretch,
    pub max_displacement: u32,
    pub mode: StretchMode,
}

pub fn stretch_report_exhaustive(phi: &Mapping) -> Result<StretchReport, AnalysisError> {
    Ok(StretchReport {
        n: phi.dim(),
        lipschitz_constant: lipschitz_constant(phi)?,
        avg_stretch: AvgStretch::Exact(avg_stretch_exhaustive(phi)?),
        max_displacement: max_displacement(phi)?,
        mode: StretchMode::Exhaustive,
    })
}

/// Sampled counterpart of [`stretch_report_exhaustive`]: the Lipschitz
/// and displacement fields are maxima over the same sampled draws.
pub fn stretch_report_sampled(
    phi: &Mapping,
    samples: u64,
    rng: &mut RngStream,
) -> StretchReport {
    assert!(samples > 0, "sample count must be explicit and positive");
    let n = phi.dim();
    let mut total: u64 = 0;
    let mut max_stretch = 0u32;
    let mut max_disp = 0u32;
    for _ in 0..samples {
        let x = rng.point(n);
        let i = rng.below(n as u64) as u32 + 1;
        let image = phi.eval(x);
        let stretch = image.dist(phi.eval(x.flip(i)));
        total += stretch as u64;
        max_stretch = max_stretch.max(stretch);
        max_disp = max_disp.max(x.dist(image));
    }
    StretchReport {
        n,
        lipschitz_constant: max_stretch,
        avg_stretch: AvgStretch::Sampled {
            mean: total as f64 / samples as f64,
            samples,
        },
        max_displacement: max_disp,
        mode: StretchMode::Sampled,
    }
}

/// The average-stretch bound for any chain-swap parity-to-majority map:
/// `3 + 2^{-n} * sum_m |2m - n| * binom(n, m)`, exact.
pub fn chain_swap_avg_stretch_bound(n: u32) -> Rational {
    let mut sum: u128 = 0;
    for m in 0..=n as u64 {
        sum += (2 * m as i128 - n as i128).unsigned_abs()
            * crate::cube::binomial(n as u64, m) as u128;
    }
    Rational::new_raw(3 * (1u128 << n) + sum, 1u128 << n)
}

/// Bipartite dependency structure of a mapping: an edge between input
/// bit `i` and output bit `j` when some point `x` has
/// `phi_j(x) != phi_j(x + e_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    dim: u32,
    /// `deps[j]` is the mask of input bits output `j+1` depends on.
    deps: Vec<u64>,
}

impl DependencyGraph {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Whether output bit `j` depends on input bit `i` (1-based).
    pub fn depends(&self, j: u32, i: u32) -> bool {
        assert!(j >= 1 && j <= self.dim && i >= 1 && i <= self.dim);
        (self.deps[(j - 1) as usize] >> (i - 1)) & 1 == 1
    }

    /// Mask of the input bits output `j` depends on (bit `i-1` set for
    /// input `i`).
    pub fn input_mask(&self, j: u32) -> u64 {
        self.deps[(j - 1) as usize]
    }

    /// Number of inputs output `j` reads.
    pub fn output_degree(&self, j: u32) -> u32 {
        self.input_mask(j).count_ones()
    }

    /// Number of outputs depending on input `i`.
    pub fn input_degree(&self, i: u32) -> u32 {
        assert!(i >= 1 && i <= self.dim);
        self.deps
            .iter()
            .filter(|&&mask| (mask >> (i - 1)) & 1 == 1)
            .count() as u32
    }

    /// `max_j |deps(j)|`: the smallest `k` such that the map is k-local.
    pub fn locality(&self) -> u32 {
        (1..=self.dim).map(|j| self.output_degree(j)).max().unwrap_or(0)
    }

    /// BFS distances from input vertex `a_i` to every vertex of the
    /// bipartite graph. Entry `0..n` is `a_1..a_n`, entry `n..2n` is
    /// `b_1..b_n`; `None` marks unreachable vertices.
    pub fn distances_from_input(&self, i: u32) -> Vec<Option<u32>> {
        assert!(i >= 1 && i <= self.dim);
        let n = self.dim as usize;
        let mut dist = alloc::vec![None; 2 * n];
        let mut queue = alloc::collections::VecDeque::new();
        dist[(i - 1) as usize] = Some(0);
        queue.push_back((i - 1) as usize);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            if v < n {
                // input vertex a_{v+1}: neighbours are outputs reading it
                for j in 0..n {
                    if (self.deps[j] >> v) & 1 == 1 && dist[n + j].is_none() {
                        dist[n + j] = Some(d + 1);
                        queue.push_back(n + j);
                    }
                }
            } else {
                // output vertex b_{v-n+1}: neighbours are the inputs it reads
                let mut mask = self.deps[v - n];
                while mask != 0 {
                    let u = mask.trailing_zeros() as usize;
                    mask &= mask - 1;
                    if dist[u].is_none() {
                        dist[u] = Some(d + 1);
                        queue.push_back(u);
                    }
                }
            }
        }
        dist
    }
}

/// Computes the exact dependency relation by exhaustive existence tests.
pub fn dependency_graph(phi: &Mapping) -> Result<DependencyGraph, AnalysisError> {
    let table = phi.require_table()?;
    let n = phi.dim();
    let mut deps = alloc::vec![0u64; n as usize];
    for x in 0..table.len() as u64 {
        let image = table[x as usize];
        for c in 0..n {
            let mut changed = image ^ table[(x ^ (1 << c)) as usize];
            while changed != 0 {
                let j = changed.trailing_zeros() as usize;
                changed &= changed - 1;
                deps[j] |= 1 << c;
            }
        }
    }
    Ok(DependencyGraph { dim: n, deps })
}

/// `max_j |deps(j)|` for a materialized mapping.
pub fn locality(phi: &Mapping) -> Result<u32, AnalysisError> {
    Ok(dependency_graph(phi)?.locality())
}

/// Whether `phi` is a mapping from `f` to `g`, i.e. `f(x) = g(phi(x))`
/// for every point, checked exhaustively.
pub fn is_mapping(
    phi: &Mapping,
    f: &BooleanFunction,
    g: &BooleanFunction,
) -> Result<bool, AnalysisError> {
    if phi.dim() != f.dim() || phi.dim() != g.dim() {
        return Err(MappingError::DimensionMismatch {
            left: phi.dim(),
            right: if phi.dim() != f.dim() { f.dim() } else { g.dim() },
        }
        .into());
    }
    if !phi.is_materialized() && phi.dim() > MAX_EXHAUSTIVE_DIM {
        return Err(MappingError::NotMaterialized.into());
    }
    let n = phi.dim();
    for i in 0..1u64 << n {
        let x = Point::new(i, n);
        if f.eval(x) != g.eval(phi.eval(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sampled counterpart of [`is_mapping`] for streaming mappings at
/// dimensions where the exhaustive scan is unavailable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampledCheck {
    pub consistent: bool,
    pub samples: u64,
    pub failures: u64,
}

pub fn is_mapping_sampled(
    phi: &Mapping,
    f: &BooleanFunction,
    g: &BooleanFunction,
    samples: u64,
    rng: &mut RngStream,
) -> SampledCheck {
    assert!(samples > 0, "sample count must be explicit and positive");
    assert_eq!(phi.dim(), f.dim(), "dimension mismatch");
    assert_eq!(phi.dim(), g.dim(), "dimension mismatch");
    let mut failures = 0u64;
    for _ in 0..samples {
        let x = rng.point(phi.dim());
        if f.eval(x) != g.eval(phi.eval(x)) {
            failures += 1;
        }
    }
    SampledCheck {
        consistent: failures == 0,
        samples,
        failures,
    }
}

/// Per-output-bit lower bound on the inverse map's stretch, derived from
/// BFS distances in the dependency graph.
#[derive(Clone, Copy, Debug)]
pub struct InverseStretchBound {
    /// Output bit `j`, 1-based.
    pub output: u32,
    /// BFS distance from `a_1` to `b_j`; `None` when `b_j` is
    /// unreachable, which predicts an infinite bound.
    pub dependency_distance: Option<u32>,
    /// `min_y dist(phi^{-1}(y), phi^{-1}(y + e_j))`, measured.
    pub min_inverse_stretch: u32,
    /// Whether `min_inverse_stretch >= (d + 1) / 2` was verified.
    pub certified: bool,
}

/// Certificate that flipping output bit `j` moves the preimage by at
/// least `(d_j + 1)/2`, where `d_j` is the `a_1`-to-`b_j` distance in the
/// dependency graph. Applies to mappings from dictator to parity.
#[derive(Clone, Debug)]
pub struct InverseStretchCertificate {
    pub dim: u32,
    pub bounds: Vec<InverseStretchBound>,
    pub all_certified: bool,
    /// Output bits whose vertex is disconnected from `a_1`. For a true
    /// dictator-to-parity bijection this cannot happen; it is surfaced as
    /// a diagnostic rather than asserted away because callers may probe
    /// tables that only barely satisfy the hypothesis.
    pub disconnected_outputs: Vec<u32>,
}

pub fn inverse_stretch_bounds(phi: &Mapping) -> Result<InverseStretchCertificate, AnalysisError> {
    let n = phi.dim();
    if !is_mapping(phi, &BooleanFunction::dictator(n), &BooleanFunction::xor(n))? {
        return Err(AnalysisError::Hypothesis(
            "the bound applies to mappings from dictator to parity",
        ));
    }
    let graph = dependency_graph(phi)?;
    let dist = graph.distances_from_input(1);
    let inverse = phi.invert()?;
    let inv_table = inverse.require_table()?;

    let mut bounds = Vec::with_capacity(n as usize);
    let mut disconnected = Vec::new();
    let mut all_certified = true;
    for j in 1..=n {
        let d = dist[(n + j - 1) as usize];
        let mut min_stretch = u32::MAX;
        for y in 0..inv_table.len() as u64 {
            let s = (inv_table[y as usize] ^ inv_table[(y ^ (1 << (j - 1))) as usize])
                .count_ones();
            min_stretch = min_stretch.min(s);
        }
        let certified = match d {
            // 2 * min >= d + 1 is the integer form of min >= (d+1)/2
            Some(d) => 2 * min_stretch > d,
            None => {
                disconnected.push(j);
                false
            }
        };
        all_certified &= certified;
        bounds.push(InverseStretchBound {
            output: j,
            dependency_distance: d,
            min_inverse_stretch: min_stretch,
            certified,
        });
    }
    Ok(InverseStretchCertificate {
        dim: n,
        bounds,
        all_certified,
        disconnected_outputs: disconnected,
    })
}

/// Empirical certificate that a C-Lipschitz, k-local mapping from
/// dictator to parity has an inverse obeying the logarithmic lower
/// bound. Records every intermediate quantity of the argument.
#[derive(Clone, Debug)]
pub struct LocalMapCertificate {
    pub dim: u32,
    pub lipschitz: u32,
    pub locality: u32,
    /// `C * 2^(k-1)`: the cap on the degree of every input vertex.
    pub input_degree_cap: u64,
    pub input_degrees: Vec<u32>,
    pub degrees_ok: bool,
    /// `max(k, C * 2^(k-1))`: degree bound for every vertex.
    pub delta: u64,
    /// Maximum BFS distance from `a_1` over reachable vertices.
    pub eccentricity: u32,
    pub all_reachable: bool,
    /// `log(2n) / log(delta + 1)`: forced eccentricity.
    pub eccentricity_bound: f64,
    /// `log(2n) / (2 log(delta + 1))`: forced inverse Lipschitz constant.
    pub inverse_lower_bound: f64,
    pub inverse_lipschitz: u32,
    pub certified: bool,
}

/// Float comparisons carry this slack; the certified inequalities are
/// strict asymptotics, so a boundary tie must not flip the verdict.
const FLOAT_SLACK: f64 = 1e-12;

pub fn certify_local_map(phi: &Mapping) -> Result<LocalMapCertificate, AnalysisError> {
    let n = phi.dim();
    if !is_mapping(phi, &BooleanFunction::dictator(n), &BooleanFunction::xor(n))? {
        return Err(AnalysisError::Hypothesis(
            "certificate applies to mappings from dictator to parity",
        ));
    }
    let lipschitz = lipschitz_constant(phi)?;
    let graph = dependency_graph(phi)?;
    let locality = graph.locality();
    let input_degree_cap = (lipschitz as u64) << (locality - 1);
    let input_degrees: Vec<u32> = (1..=n).map(|i| graph.input_degree(i)).collect();
    let degrees_ok = input_degrees.iter().all(|&d| d as u64 <= input_degree_cap);
    let delta = (locality as u64).max(input_degree_cap);

    let dist = graph.distances_from_input(1);
    let eccentricity = dist.iter().flatten().copied().max().unwrap_or(0);
    let all_reachable = dist.iter().all(|d| d.is_some());

    let log2n = libm::log(2.0 * n as f64);
    let log_delta = libm::log(delta as f64 + 1.0);
    let eccentricity_bound = log2n / log_delta;
    let inverse_lower_bound = log2n / (2.0 * log_delta);
    let inverse_lipschitz = lipschitz_constant(&phi.invert()?)?;

    // a disconnected vertex means unbounded eccentricity, so that leg
    // holds vacuously
    let eccentricity_ok =
        !all_reachable || eccentricity as f64 >= eccentricity_bound - FLOAT_SLACK;
    let certified = degrees_ok
        && inverse_lipschitz as f64 >= inverse_lower_bound - FLOAT_SLACK
        && eccentricity_ok;
    Ok(LocalMapCertificate {
        dim: n,
        lipschitz,
        locality,
        input_degree_cap,
        input_degrees,
        degrees_ok,
        delta,
        eccentricity,
        all_reachable,
        eccentricity_bound,
        inverse_lower_bound,
        inverse_lipschitz,
        certified,
    })
}

/// Witness that a mapping onto majority stretches some edge by at least
/// `n/2`: the preimage of the all-ones point and the flip of its first
/// coordinate.
#[derive(Clone, Copy, Debug)]
pub struct MajLowerBoundWitness {
    pub dim: u32,
    /// The point `x` with `phi(x) = 1^n`.
    pub preimage_of_ones: Point,
    /// Flipped coordinate (1 works for both dictator and parity sources).
    pub direction: u32,
    /// `dist(phi(x), phi(x + e_i))`, at least `ceil(n/2)`.
    pub stretch: u32,
    pub holds: bool,
}

pub fn maj_lower_bound_check(
    phi: &Mapping,
    source: &BooleanFunction,
) -> Result<MajLowerBoundWitness, AnalysisError> {
    let n = phi.dim();
    if n.is_multiple_of(2) {
        return Err(AnalysisError::Hypothesis(
            "majority is balanced only for odd n",
        ));
    }
    if !matches!(source.kind(), FunctionKind::Dictator | FunctionKind::Xor) {
        return Err(AnalysisError::Hypothesis(
            "source must be dictator or parity",
        ));
    }
    if !is_mapping(phi, source, &BooleanFunction::maj(n))? {
        return Err(AnalysisError::Hypothesis("not a mapping onto majority"));
    }
    let table = phi.require_table()?;
    let ones = (1u64 << n) - 1;
    let x = table
        .iter()
        .position(|&y| y == ones)
        .expect("a bijection hits the all-ones point") as u64;
    let x = Point::new(x, n);
    let direction = 1;
    let stretch = phi.eval(x).dist(phi.eval(x.flip(direction)));
    Ok(MajLowerBoundWitness {
        dim: n,
        preimage_of_ones: x,
        direction,
        stretch,
        holds: 2 * stretch >= n,
    })
}
