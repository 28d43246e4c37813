//! Lipschitz bijections and embeddings between boolean functions on the
//! Hamming cube `{0,1}^n`, together with the machinery to measure and
//! certify their metric properties exhaustively at desk scale.
//!
//! The crate is organised around a handful of constructions:
//!
//! * explicit 2-bi-Lipschitz and 2-local bijections between the dictator
//!   and parity functions ([`mappings::Mapping::dict_to_xor_prefix`],
//!   [`mappings::Mapping::dict_to_xor_local`]);
//! * a chain-swap bijection from parity to majority built on a symmetric
//!   chain decomposition ([`mappings::Mapping::xor_to_maj_scd`]);
//! * a 3-Lipschitz embedding of parity into majority on a cube of
//!   dimension `2n + 1` ([`mappings::Embedding::xor_to_maj`]);
//! * a randomized pipeline producing constant-displacement bijections
//!   from the dictator to a random balanced function ([`randmap`]).
//!
//! The [`analysis`] module measures Lipschitz constants, average stretch,
//! locality and displacement, and produces the certificates that pin the
//! lower-bound arguments to concrete instances. The [`oracle`] module
//! holds independent brute-force checks used to validate the faster
//! routines.
//!
//! ```
//! use lipcube::analysis;
//! use lipcube::Mapping;
//!
//! let phi = Mapping::xor_to_maj_scd(7)?;
//! assert!(analysis::lipschitz_constant(&phi)? >= 4); // forced: >= ceil(n/2)
//! let avg = analysis::avg_stretch_exhaustive(&phi)?;
//! assert!(avg <= analysis::chain_swap_avg_stretch_bound(7));
//! # Ok::<(), lipcube::analysis::AnalysisError>(())
//! ```
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI
//! live in the companion crate `lipcube-cli`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod cube;
pub mod mappings;
pub mod oracle;
pub mod randmap;
pub mod scd;

pub use cube::{BooleanFunction, Point, RngStream, TruthTable};
pub use mappings::{Embedding, Mapping};
