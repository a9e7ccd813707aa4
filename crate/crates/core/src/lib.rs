//! Exhaustive third-order epistasis detection.
//!
//! Case-control genotype data is packed into per-class bit planes. For every
//! SNP triple a 27x2 genotype frequency table is built from word-level logic
//! and population counts, then scored with the Bayesian K2 objective. The
//! triple with the lowest score wins.
//!
//! Five table-construction strategies live in [`kernels`], all producing
//! identical tables. [`oracle`] holds slow reference implementations used to
//! check them, and [`bench`] reports throughput in combinations x samples per
//! second.

pub mod bench;
pub mod cli;
pub mod datamodel;
pub mod error;
pub mod kernels;
pub mod oracle;
pub mod scoring;
pub mod search;

pub use datamodel::{
    binarize, generate_synthetic, infer_plane2, transpose_tile, BitPlaneDataset, Class, GenotypeMatrix,
    PlantSpec, ThreePlaneDataset, TiledDataset, Word, WORD_BITS,
};
pub use error::{Error, Result};
pub use kernels::{derive_block_params, BlockParams, CacheSpec, KernelVariant};
pub use scoring::{k2_score, FrequencyTable, LogSumTable};
pub use search::{num_combinations, run_search, Candidate, SearchConfig, SearchResult, Triple};
