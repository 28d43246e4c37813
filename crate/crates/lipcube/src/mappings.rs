//! The explicit bijections and embeddings between named boolean
//! functions, plus composition and inversion.
//!
//! A [`Mapping`] is a bijection of `{0,1}^n`. Up to dimension
//! [`AUTO_MATERIALIZE_DIM`] constructors store the full image table; the
//! named constructions also keep a streaming form so single points can be
//! evaluated at dimensions where the table would not fit.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cube::{Point, MAX_EXHAUSTIVE_DIM, MAX_POINT_DIM};
use crate::scd::{self, ChainDecomposition};

/// Constructors materialize the image table up to this dimension.
pub const AUTO_MATERIALIZE_DIM: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MappingError {
    DimOutOfRange { dim: u32, min: u32, max: u32 },
    EvenDimension { dim: u32 },
    DimensionMismatch { left: u32, right: u32 },
    NotBijective,
    NotMaterialized,
}

impl fmt::Display for MappingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MappingError::DimOutOfRange { dim, min, max } => {
                write!(f, "dimension {dim} outside {min}..={max}")
            }
            MappingError::EvenDimension { dim } => {
                write!(f, "dimension {dim} is even; majority is balanced only for odd n")
            }
            MappingError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            MappingError::NotBijective => write!(f, "image table is not a permutation"),
            MappingError::NotMaterialized => {
                write!(f, "operation needs a materialized image table")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NamedForm {
    Identity,
    DictToXorPrefix,
    DictToXorLocal,
    XorToMajScd,
}

impl NamedForm {
    fn apply(self, x: Point) -> Point {
        let n = x.dim();
        match self {
            NamedForm::Identity => x,
            // (xor(x), x_2, ..., x_n)
            NamedForm::DictToXorPrefix => {
                let parity = x.parity() as u64;
                Point::new((x.index() & !1) | parity, n)
            }
            // (x_1 + x_2, x_2 + x_3, ..., x_{n-1} + x_n, x_n)
            NamedForm::DictToXorLocal => Point::new(x.index() ^ (x.index() >> 1), n),
            // x if xor(x) = maj(x), otherwise the chain partner of x
            NamedForm::XorToMajScd => {
                let xor = x.parity();
                let maj = 2 * x.weight() > n;
                if xor == maj {
                    x
                } else {
                    scd::chain_partner(x)
                }
            }
        }
    }
}

/// A bijection of `{0,1}^n`, stored as an explicit image table and/or a
/// named functional form.
#[derive(Clone)]
pub struct Mapping {
    dim: u32,
    name: String,
    table: Option<Vec<u64>>,
    form: Option<NamedForm>,
}

impl fmt::Debug for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mapping({}, n={}, {})",
            self.name,
            self.dim,
            if self.table.is_some() { "table" } else { "streaming" }
        )
    }
}

impl Mapping {
    fn from_form(name: String, dim: u32, form: NamedForm) -> Self {
        let mut m = Mapping {
            dim,
            name,
            table: None,
            form: Some(form),
        };
        if dim <= AUTO_MATERIALIZE_DIM {
            m.table = Some(m.build_table());
        }
        m
    }

    fn build_table(&self) -> Vec<u64> {
        let form = self.form.expect("streaming form required");
        (0..1u64 << self.dim)
            .map(|i| form.apply(Point::new(i, self.dim)).index())
            .collect()
    }

    /// The identity bijection.
    pub fn identity(n: u32) -> Result<Mapping, MappingError> {
        check_dim(n, 1)?;
        Ok(Mapping::from_form(String::from("identity"), n, NamedForm::Identity))
    }

    /// The map `x -> (xor(x), x_2, ..., x_n)`: a self-inverse,
    /// 2-bi-Lipschitz mapping from dictator to parity whose first output
    /// bit reads every input bit.
    pub fn dict_to_xor_prefix(n: u32) -> Result<Mapping, MappingError> {
        check_dim(n, 1)?;
        Ok(Mapping::from_form(
            String::from("dict-to-xor-prefix"),
            n,
            NamedForm::DictToXorPrefix,
        ))
    }

    /// The map `x -> (x_1 + x_2, ..., x_{n-1} + x_n, x_n)`: a 2-Lipschitz,
    /// 2-local mapping from dictator to parity. Its inverse recovers bit
    /// `i` as the parity of output bits `i..n` and is exactly n-Lipschitz.
    pub fn dict_to_xor_local(n: u32) -> Result<Mapping, MappingError> {
        check_dim(n, 2)?;
        Ok(Mapping::from_form(
            String::from("dict-to-xor-local"),
            n,
            NamedForm::DictToXorLocal,
        ))
    }

    /// The chain-swap mapping from parity to majority: fixes every `x`
    /// with `xor(x) = maj(x)` and otherwise swaps `x` with its partner in
    /// the canonical symmetric chain decomposition. An involution; only
    /// defined for odd `n` where majority is balanced.
    pub fn xor_to_maj_scd(n: u32) -> Result<Mapping, MappingError> {
        check_dim(n, 1)?;
        if n.is_multiple_of(2) {
            return Err(MappingError::EvenDimension { dim: n });
        }
        Ok(Mapping::from_form(
            String::from("xor-to-maj-scd"),
            n,
            NamedForm::XorToMajScd,
        ))
    }

    /// The chain-swap mapping built on a caller-supplied symmetric chain
    /// decomposition instead of the canonical one.
    pub fn xor_to_maj_with(decomposition: &ChainDecomposition) -> Result<Mapping, MappingError> {
        let n = decomposition.dim();
        if n.is_multiple_of(2) {
            return Err(MappingError::EvenDimension { dim: n });
        }
        let mut table = alloc::vec![u64::MAX; 1usize << n];
        for chain in decomposition.chains() {
            let pts = chain.points();
            for p in pts {
                let xor = p.parity();
                let maj = 2 * p.weight() > n;
                let image = if xor == maj {
                    *p
                } else {
                    pts.iter()
                        .find(|q| q.weight() == n - p.weight())
                        .copied()
                        .expect("symmetric chain has the mirror weight")
                };
                table[p.index() as usize] = image.index();
            }
        }
        Mapping::from_table(String::from("xor-to-maj-scd[custom]"), n, table)
    }

    /// Wraps an explicit image table, validating bijectivity.
    pub fn from_table(name: String, n: u32, table: Vec<u64>) -> Result<Mapping, MappingError> {
        check_dim(n, 1)?;
        let len = 1u64 << n;
        if table.len() as u64 != len {
            return Err(MappingError::NotBijective);
        }
        let mut seen = alloc::vec![0u64; len.div_ceil(64) as usize];
        for &y in &table {
            if y >= len || seen[(y / 64) as usize] >> (y % 64) & 1 == 1 {
                return Err(MappingError::NotBijective);
            }
            seen[(y / 64) as usize] |= 1 << (y % 64);
        }
        Ok(Mapping {
            dim: n,
            name,
            table: Some(table),
            form: None,
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Image of a single point; works in both streaming and table modes.
    pub fn eval(&self, x: Point) -> Point {
        assert_eq!(self.dim, x.dim(), "dimension mismatch");
        match (&self.table, self.form) {
            (Some(t), _) => Point::new(t[x.index() as usize], self.dim),
            (None, Some(f)) => f.apply(x),
            (None, None) => unreachable!("mapping has neither table nor form"),
        }
    }

    /// Image encoding of the point with encoding `i`.
    pub fn eval_index(&self, i: u64) -> u64 {
        self.eval(Point::new(i, self.dim)).index()
    }

    pub fn is_materialized(&self) -> bool {
        self.table.is_some()
    }

    pub fn table(&self) -> Option<&[u64]> {
        self.table.as_deref()
    }

    pub fn require_table(&self) -> Result<&[u64], MappingError> {
        self.table.as_deref().ok_or(MappingError::NotMaterialized)
    }

    /// A copy with the image table built, for dimensions up to
    /// [`MAX_EXHAUSTIVE_DIM`].
    pub fn materialize(&self) -> Result<Mapping, MappingError> {
        if self.table.is_some() {
            return Ok(self.clone());
        }
        if self.dim > MAX_EXHAUSTIVE_DIM {
            return Err(MappingError::DimOutOfRange {
                dim: self.dim,
                min: 1,
                max: MAX_EXHAUSTIVE_DIM,
            });
        }
        let mut m = self.clone();
        m.table = Some(m.build_table());
        Ok(m)
    }

    /// The inverse bijection. Needs the image table.
    pub fn invert(&self) -> Result<Mapping, MappingError> {
        let table = self.require_table()?;
        let mut inv = alloc::vec![0u64; table.len()];
        for (x, &y) in table.iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        Ok(Mapping {
            dim: self.dim,
            name: format!("inverse({})", self.name),
            table: Some(inv),
            form: None,
        })
    }

    /// The composition `self . inner`, sending `x` to `self(inner(x))`.
    /// If `inner` maps `f` to `h` and `self` maps `h` to `g`, the result
    /// maps `f` to `g`. Needs both image tables.
    pub fn compose(&self, inner: &Mapping) -> Result<Mapping, MappingError> {
        if self.dim != inner.dim {
            return Err(MappingError::DimensionMismatch {
                left: self.dim,
                right: inner.dim,
            });
        }
        let outer = self.require_table()?;
        let inner_t = inner.require_table()?;
        let table = inner_t.iter().map(|&y| outer[y as usize]).collect();
        Ok(Mapping {
            dim: self.dim,
            name: format!("compose({},{})", self.name, inner.name),
            table: Some(table),
            form: None,
        })
    }
}

/// Per-edge stretch bound for the chain-swap parity-to-majority map at a
/// source point of weight `m`: `|n - 2m| + 3`.
pub fn chain_swap_stretch_bound(n: u32, m: u32) -> u32 {
    (n as i64 - 2 * m as i64).unsigned_abs() as u32 + 3
}

fn check_dim(n: u32, min: u32) -> Result<(), MappingError> {
    if n < min || n > MAX_POINT_DIM {
        return Err(MappingError::DimOutOfRange {
            dim: n,
            min,
            max: MAX_POINT_DIM,
        });
    }
    Ok(())
}

/// An injection of `{0,1}^n` into a higher-dimensional cube.
#[derive(Clone, Debug)]
pub struct Embedding {
    in_dim: u32,
    out_dim: u32,
}

impl Embedding {
    /// The embedding `x -> (x^c, xor(x), x)` of `{0,1}^n` into
    /// `{0,1}^{2n+1}`. The image has Hamming weight `n + xor(x)`, so
    /// `maj(phi(x)) = xor(x)`, and distances obey the exact law
    /// `dist(phi(x), phi(y)) = 2 dist(x,y) + xor(x+y)`, making the map
    /// 3-Lipschitz.
    pub fn xor_to_maj(n: u32) -> Result<Embedding, MappingError> {
        if n < 1 || 2 * n + 1 > MAX_POINT_DIM {
            return Err(MappingError::DimOutOfRange {
                dim: n,
                min: 1,
                max: (MAX_POINT_DIM - 1) / 2,
            });
        }
        Ok(Embedding {
            in_dim: n,
            out_dim: 2 * n + 1,
        })
    }

    pub fn in_dim(&self) -> u32 {
        self.in_dim
    }

    pub fn out_dim(&self) -> u32 {
        self.out_dim
    }

    /// Output coordinates 1..n hold `x^c`, coordinate n+1 holds `xor(x)`,
    /// and coordinates n+2..2n+1 hold `x`.
    pub fn eval(&self, x: Point) -> Point {
        assert_eq!(self.in_dim, x.dim(), "dimension mismatch");
        let n = self.in_dim;
        let complement = x.complement().index();
        let parity = x.parity() as u64;
        let bits = complement | (parity << n) | (x.index() << (n + 1));
        Point::new(bits, self.out_dim)
    }
}
