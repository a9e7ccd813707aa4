//! Frequency-table construction for SNP triples.
//!
//! | variant | layout | inner loop |
//! |---|---|---|
//! | `NaivePhenotype` | three stored planes + phenotype | 27 x (3-way AND, AND/ANDN phenotype, 2 POPCNT) |
//! | `ReducedSplit` | two planes per class | 3 NOR, then 27 x (AND, POPCNT) |
//! | `Blocked` | two planes per class | as above, tiled over SNP blocks and sample strips |
//! | `BlockedWide` | two planes per class | blocked, `L` words per step with per-lane counters |
//! | `ThreadPerCombination` | SNP-tiled | one private table per grid point |
//!
//! Every variant yields the same table for the same triple.

mod blocked;
mod combination;
mod model;
mod naive;
mod params;
mod reduced;
mod wide;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use blocked::{blocked_pass, blocked_pass_wide, table_slot};
pub use combination::combination_kernel;
pub use model::{instruction_count_model, InstructionModel};
pub use naive::freq_table_naive;
pub use params::{block_bounds, derive_block_params, BlockParams, CacheSpec, DEFAULT_LANE_INTS};
pub use reduced::freq_table_reduced;
pub use wide::{freq_table_wide, DEFAULT_LANES, SUPPORTED_LANES};

pub(crate) use blocked::for_each_valid_slot;
pub(crate) use naive::naive_table;
pub(crate) use reduced::reduced_table;
pub(crate) use wide::check_lanes;

/// Ascending SNP indices.
pub type Triple = [usize; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    NaivePhenotype,
    ReducedSplit,
    Blocked,
    BlockedWide,
    ThreadPerCombination,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 5] = [
        KernelVariant::NaivePhenotype,
        KernelVariant::ReducedSplit,
        KernelVariant::Blocked,
        KernelVariant::BlockedWide,
        KernelVariant::ThreadPerCombination,
    ];

    /// Short name used on the command line and in reports.
    pub fn short_name(self) -> &'static str {
        match self {
            KernelVariant::NaivePhenotype => "v1",
            KernelVariant::ReducedSplit => "v2",
            KernelVariant::Blocked => "v3",
            KernelVariant::BlockedWide => "v4",
            KernelVariant::ThreadPerCombination => "tpc",
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelVariant::ALL
            .into_iter()
            .find(|v| v.short_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel variant {s:?}")))
    }
}

pub(crate) fn check_triple(triple: Triple, num_snps: usize) -> Result<()> {
    let [a, b, c] = triple;
    if a < b && b < c && c < num_snps {
        Ok(())
    } else {
        Err(Error::Index(triple, num_snps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in KernelVariant::ALL {
            assert_eq!(v.short_name().parse::<KernelVariant>().unwrap(), v);
        }
        assert!("v5".parse::<KernelVariant>().is_err());
    }

    #[test]
    fn triple_checks() {
        assert!(check_triple([0, 1, 2], 3).is_ok());
        assert!(check_triple([0, 1, 3], 3).is_err());
        assert!(check_triple([1, 1, 2], 3).is_err());
        assert!(check_triple([2, 1, 0], 3).is_err());
    }
}
