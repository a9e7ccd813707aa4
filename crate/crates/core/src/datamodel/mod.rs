//! Dataset representations: raw genotype matrices, per-class bit planes, the
//! three-plane layout used by the baseline kernel, and the SNP-tiled layout
//! used by the combination kernel. Also file I/O and synthetic generation.

mod bitplane;
pub mod io;
mod matrix;
mod synth;
mod threeplane;
mod tiled;

pub use bitplane::{binarize, infer_plane2, pad_mask, words_for, BitPlaneDataset, Class, Word, WORD_BITS};
pub use matrix::{GenotypeMatrix, MAX_SAMPLES};
pub use synth::{generate_synthetic, PlantSpec};
pub use threeplane::ThreePlaneDataset;
pub use tiled::{transpose_tile, TiledDataset};
