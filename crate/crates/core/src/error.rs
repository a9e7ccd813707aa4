use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A genotype outside {0,1,2} or a phenotype outside {0,1}.
    #[error("value out of domain at snp {snp}, sample {sample}")]
    Domain { snp: usize, sample: usize },

    #[error("phenotype value out of domain at sample {sample}")]
    PhenotypeDomain { sample: usize },

    #[error("bad dimensions: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("packed file magic mismatch")]
    MagicMismatch,

    #[error("unsupported packed format version {0}")]
    UnsupportedVersion(u32),

    #[error("truncated file: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: u64, found: u64 },

    #[error("corrupt packed data: {0}")]
    CorruptData(String),

    #[error("snp triple {0:?} out of range for {1} snps")]
    Index([usize; 3], usize),

    #[error("cache geometry cannot hold one block: {0}")]
    InfeasibleCache(String),

    #[error("oracle limited to {cap} snps, dataset has {snps}")]
    CapExceeded { cap: usize, snps: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
