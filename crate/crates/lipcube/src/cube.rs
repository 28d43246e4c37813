//! Points of the Hamming cube, boolean functions, and seeded randomness.
//!
//! A point `x = (x_1, ..., x_n)` is packed into a `u64` with coordinate 1
//! stored in the lowest-order bit, so the integer encoding of a point is
//! `sum x_i * 2^(i-1)`. All serialized forms use this convention.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Largest dimension for which exhaustive (table-building) operations are
/// offered. Above this only streaming or sampled modes exist.
pub const MAX_EXHAUSTIVE_DIM: u32 = 30;

/// Largest dimension representable by a packed [`Point`].
pub const MAX_POINT_DIM: u32 = 63;

/// A vertex of the Hamming cube `{0,1}^n`, word-packed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    bits: u64,
    dim: u32,
}

impl Point {
    /// Builds the point with the given integer encoding.
    pub fn new(bits: u64, dim: u32) -> Self {
        assert!(
            (1..=MAX_POINT_DIM).contains(&dim),
            "dimension {dim} out of range 1..={MAX_POINT_DIM}"
        );
        assert!(
            bits >> dim == 0,
            "encoding {bits} has bits beyond position {dim}"
        );
        Point { bits, dim }
    }

    /// All-zeros point.
    pub fn zero(dim: u32) -> Self {
        Point::new(0, dim)
    }

    /// All-ones point.
    pub fn ones(dim: u32) -> Self {
        Point::new(mask(dim), dim)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Integer encoding; decoding it with [`Point::new`] round-trips.
    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Coordinate `x_i` for `1 <= i <= n`.
    pub fn coord(&self, i: u32) -> bool {
        assert!(i >= 1 && i <= self.dim, "coordinate {i} out of range");
        (self.bits >> (i - 1)) & 1 == 1
    }

    /// The point `x + e_i`, differing from `x` exactly at coordinate `i`.
    /// Involution: `x.flip(i).flip(i) == x`.
    pub fn flip(&self, i: u32) -> Point {
        assert!(i >= 1 && i <= self.dim, "coordinate {i} out of range");
        Point {
            bits: self.bits ^ (1 << (i - 1)),
            dim: self.dim,
        }
    }

    /// Hamming weight `|x|`.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Bitwise complement `x^c`.
    pub fn complement(&self) -> Point {
        Point {
            bits: self.bits ^ mask(self.dim),
            dim: self.dim,
        }
    }

    /// Parity of the Hamming weight, i.e. `xor(x)`.
    pub fn parity(&self) -> bool {
        self.weight() & 1 == 1
    }

    /// Hamming distance to `y`. Symmetric and satisfies the triangle
    /// inequality; equals the weight of the coordinatewise xor.
    pub fn dist(&self, y: Point) -> u32 {
        assert_eq!(self.dim, y.dim, "dimension mismatch");
        (self.bits ^ y.bits).count_ones()
    }

    /// Coordinatewise xor `x + y`.
    pub fn xor(&self, y: Point) -> Point {
        assert_eq!(self.dim, y.dim, "dimension mismatch");
        Point {
            bits: self.bits ^ y.bits,
            dim: self.dim,
        }
    }
}

impl fmt::Display for Point {
    /// Writes the coordinate string `x_1 x_2 ... x_n` left to right.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            write!(f, "{}", if self.coord(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({}, n={})", self, self.dim)
    }
}

fn mask(dim: u32) -> u64 {
    (1u64 << dim) - 1
}

/// A packed truth table over `{0,1}^n`: bit `i` holds the value at the
/// point with integer encoding `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    dim: u32,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(dim: u32) -> Self {
        assert!(
            (1..=MAX_EXHAUSTIVE_DIM).contains(&dim),
            "dimension {dim} out of range 1..={MAX_EXHAUSTIVE_DIM}"
        );
        let len = 1u64 << dim;
        let words = len.div_ceil(64) as usize;
        TruthTable {
            dim,
            words: alloc::vec![0u64; words],
        }
    }

    /// Builds a table from an iterator of `2^n` bits in index order.
    pub fn from_bits(dim: u32, bits: impl IntoIterator<Item = bool>) -> Self {
        let mut t = TruthTable::zeros(dim);
        let mut count = 0u64;
        for (i, b) in bits.into_iter().enumerate() {
            t.set(i as u64, b);
            count += 1;
        }
        assert_eq!(count, t.len(), "expected {} bits", t.len());
        t
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> u64 {
        1u64 << self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.len(), "index {i} out of range");
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: u64, v: bool) {
        assert!(i < self.len(), "index {i} out of range");
        let w = &mut self.words[(i / 64) as usize];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, ones={})", self.dim, self.count_ones())
    }
}

/// A boolean function on `{0,1}^n`: one of the named families or an
/// explicit truth table.
#[derive(Clone, Debug)]
pub struct BooleanFunction {
    dim: u32,
    kind: FunctionKind,
}

#[derive(Clone, Debug)]
pub enum FunctionKind {
    /// `dic(x) = x_1`.
    Dictator,
    /// `xor(x) = sum x_i mod 2`.
    Xor,
    /// `maj(x) = 1` iff `|x| > n/2`.
    Maj,
    /// Explicit table of `2^n` bits.
    Table(TruthTable),
}

impl BooleanFunction {
    pub fn dictator(dim: u32) -> Self {
        assert!((1..=MAX_POINT_DIM).contains(&dim));
        BooleanFunction {
            dim,
            kind: FunctionKind::Dictator,
        }
    }

    pub fn xor(dim: u32) -> Self {
        assert!((1..=MAX_POINT_DIM).contains(&dim));
        BooleanFunction {
            dim,
            kind: FunctionKind::Xor,
        }
    }

    pub fn maj(dim: u32) -> Self {
        assert!((1..=MAX_POINT_DIM).contains(&dim));
        BooleanFunction {
            dim,
            kind: FunctionKind::Maj,
        }
    }

    pub fn from_table(table: TruthTable) -> Self {
        BooleanFunction {
            dim: table.dim(),
            kind: FunctionKind::Table(table),
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FunctionKind::Dictator => "dictator",
            FunctionKind::Xor => "xor",
            FunctionKind::Maj => "maj",
            FunctionKind::Table(_) => "table",
        }
    }

    pub fn eval(&self, x: Point) -> bool {
        assert_eq!(self.dim, x.dim(), "dimension mismatch");
        match &self.kind {
            FunctionKind::Dictator => x.coord(1),
            FunctionKind::Xor => x.parity(),
            FunctionKind::Maj => 2 * x.weight() > self.dim,
            FunctionKind::Table(t) => t.get(x.index()),
        }
    }

    /// Size of the level set `f^{-1}(1)`.
    pub fn ones_count(&self) -> u64 {
        match &self.kind {
            FunctionKind::Dictator | FunctionKind::Xor => 1u64 << (self.dim - 1),
            FunctionKind::Maj => {
                let half = 1u64 << (self.dim - 1);
                if self.dim % 2 == 1 {
                    half
                } else {
                    // even n: points of weight exactly n/2 are 0s of maj
                    let mid = binomial(self.dim as u64, (self.dim / 2) as u64);
                    half - mid / 2
                }
            }
            FunctionKind::Table(t) => t.count_ones(),
        }
    }

    /// A function is balanced when its level sets have equal size.
    pub fn is_balanced(&self) -> bool {
        match &self.kind {
            FunctionKind::Dictator | FunctionKind::Xor => true,
            FunctionKind::Maj => self.dim % 2 == 1,
            FunctionKind::Table(t) => 2 * t.count_ones() == t.len(),
        }
    }

    /// Materializes the function as an explicit table.
    pub fn to_table(&self) -> TruthTable {
        match &self.kind {
            FunctionKind::Table(t) => t.clone(),
            _ => {
                let mut t = TruthTable::zeros(self.dim);
                for i in 0..t.len() {
                    t.set(i, self.eval(Point::new(i, self.dim)));
                }
                t
            }
        }
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A seeded, stream-addressed random source. Identical `(seed, stream)`
/// pairs produce identical draw sequences on every platform; the
/// generator is ChaCha12 with the stream id mapped to the ChaCha stream
/// parameter. Parallel tasks should each own a substream.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh stream addressed by `id` relative to this one. The child
    /// stream id is a splitmix64 mix of the parent id and `id`, so nested
    /// derivations stay disjoint in practice.
    pub fn substream(&self, id: u64) -> RngStream {
        RngStream::with_stream(self.seed, splitmix64(self.stream ^ splitmix64(id)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw from `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.rng.gen_range(0..bound)
    }

    /// Bernoulli draw with success probability `p` clamped to `[0,1]`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        let p = p.clamp(0.0, 1.0);
        self.rng.gen::<f64>() < p
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// Uniform random point of `{0,1}^n`.
    pub fn point(&mut self, dim: u32) -> Point {
        Point::new(self.below(1u64 << dim), dim)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Draws a uniformly random balanced table: exactly `2^(n-1)` ones,
/// uniform over all balanced tables (a uniform shuffle of a half-ones
/// bit sequence).
pub fn random_balanced_function(dim: u32, rng: &mut RngStream) -> BooleanFunction {
    assert!((1..=MAX_EXHAUSTIVE_DIM).contains(&dim));
    let mut t = TruthTable::zeros(dim);
    let len = t.len();
    for i in 0..len / 2 {
        t.set(i, true);
    }
    for i in (1..len).rev() {
        let j = rng.below(i + 1);
        let (a, b) = (t.get(i), t.get(j));
        t.set(i, b);
        t.set(j, a);
    }
    BooleanFunction::from_table(t)
}
