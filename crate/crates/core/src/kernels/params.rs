use crate::datamodel::WORD_BITS;
use crate::error::{Error, Result};
use crate::scoring::COMBINATIONS;

/// 32-bit integers per 512-bit vector register; the default rounding unit
/// for the sample-strip length.
pub const DEFAULT_LANE_INTS: usize = 16;

/// L1 data cache geometry and how its ways are split between the frequency
/// tables and the sample block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheSpec {
    pub l1_bytes: usize,
    pub l1_ways: usize,
    pub ft_ways: usize,
    pub block_ways: usize,
    /// Bytes per frequency count and per packed sample word.
    pub count_bytes: usize,
}

impl Default for CacheSpec {
    /// 48 KiB, 12-way L1 with 7 ways for tables and 4 for the block.
    fn default() -> Self {
        Self {
            l1_bytes: 48 * 1024,
            l1_ways: 12,
            ft_ways: 7,
            block_ways: 4,
            count_bytes: 4,
        }
    }
}

impl CacheSpec {
    pub fn new(l1_bytes: usize, l1_ways: usize, ft_ways: usize, block_ways: usize) -> Self {
        Self {
            l1_bytes,
            l1_ways,
            ft_ways,
            block_ways,
            count_bytes: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l1_bytes == 0
            || self.l1_ways == 0
            || self.ft_ways == 0
            || self.block_ways == 0
            || self.count_bytes == 0
        {
            return Err(Error::InfeasibleCache(format!(
                "all fields must be positive: {self:?}"
            )));
        }
        if self.ft_ways + self.block_ways > self.l1_ways {
            return Err(Error::InfeasibleCache(format!(
                "{} + {} ways exceed the {}-way cache",
                self.ft_ways, self.block_ways, self.l1_ways
            )));
        }
        Ok(())
    }

    /// Bytes reserved for the `B_S^3` frequency tables.
    pub fn table_bytes(&self) -> usize {
        self.l1_bytes * self.ft_ways / self.l1_ways
    }

    /// Bytes reserved for one `B_S x B_P` sample block.
    pub fn block_bytes(&self) -> usize {
        self.l1_bytes * self.block_ways / self.l1_ways
    }
}

/// Tiling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockParams {
    /// `B_S`: SNPs per block.
    pub snps_per_block: usize,
    /// `B_P`: 32-bit packed sample words per SNP plane in one strip.
    pub words_per_block: usize,
    /// `B_Sched`: grid edge for the thread-per-combination kernel.
    pub sched_edge: usize,
}

impl Default for BlockParams {
    fn default() -> Self {
        derive_block_params(&CacheSpec::default(), DEFAULT_LANE_INTS)
            .expect("default cache geometry is feasible")
    }
}

impl BlockParams {
    pub const DEFAULT_SCHED_EDGE: usize = 256;

    /// Strip length in native words.
    pub fn strip_words(&self) -> usize {
        (self.words_per_block * 32 / WORD_BITS).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snps_per_block == 0 || self.words_per_block == 0 || self.sched_edge == 0 {
            return Err(Error::InvalidParameter(format!(
                "block parameters must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Real-valued upper bounds `(B_S, B_P)` from the two capacity inequalities;
/// the `B_P` bound uses the integer `B_S`.
pub fn block_bounds(cs: &CacheSpec) -> Result<(f64, f64)> {
    cs.validate()?;
    let per_snp3 = (2 * COMBINATIONS * cs.count_bytes) as f64;
    let bs_bound = (cs.table_bytes() as f64 / per_snp3).cbrt();
    let bs = max_snps_per_block(cs);
    if bs == 0 {
        return Err(Error::InfeasibleCache("frequency tables do not fit".into()));
    }
    let bp_bound = cs.block_bytes() as f64 / (bs * 2 * cs.count_bytes) as f64;
    Ok((bs_bound, bp_bound))
}

fn max_snps_per_block(cs: &CacheSpec) -> usize {
    let per_snp3 = 2 * COMBINATIONS * cs.count_bytes;
    let mut bs = 0;
    while (bs + 1usize).pow(3) * per_snp3 <= cs.table_bytes() {
        bs += 1;
    }
    bs
}

/// Largest `B_S` with `B_S^3 * 2 * 27 * beta <= size_FT`, then the largest
/// `B_P` with `B_S * B_P * 2 * beta <= size_Block`, rounded down to a multiple
/// of `lane_ints`. `sched_edge` takes its default.
pub fn derive_block_params(cs: &CacheSpec, lane_ints: usize) -> Result<BlockParams> {
    cs.validate()?;
    if lane_ints == 0 {
        return Err(Error::InvalidParameter("lane width must be positive".into()));
    }
    let bs = max_snps_per_block(cs);
    if bs == 0 {
        return Err(Error::InfeasibleCache(format!(
            "{} bytes cannot hold one 27x2 table",
            cs.table_bytes()
        )));
    }
    let bp = cs.block_bytes() / (bs * 2 * cs.count_bytes) / lane_ints * lane_ints;
    if bp < lane_ints {
        return Err(Error::InfeasibleCache(format!(
            "{} bytes cannot hold {lane_ints} words for {bs} snps",
            cs.block_bytes()
        )));
    }
    Ok(BlockParams {
        snps_per_block: bs,
        words_per_block: bp,
        sched_edge: BlockParams::DEFAULT_SCHED_EDGE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ice_lake_geometry() {
        let cs = CacheSpec::default();
        assert_eq!(cs.table_bytes(), 28 * 1024);
        assert_eq!(cs.block_bytes(), 16 * 1024);
        let (bs, bp) = block_bounds(&cs).unwrap();
        assert!((bs - 5.1).abs() < 0.05, "{bs}");
        assert!((bp - 409.6).abs() < 1e-9, "{bp}");
        let p = derive_block_params(&cs, 16).unwrap();
        assert_eq!((p.snps_per_block, p.words_per_block), (5, 400));
    }

    #[test]
    fn eight_way_geometry() {
        let cs = CacheSpec::new(32 * 1024, 8, 7, 1);
        let p = derive_block_params(&cs, 16).unwrap();
        assert_eq!((p.snps_per_block, p.words_per_block), (5, 96));
        let p = derive_block_params(&cs, 8).unwrap();
        assert_eq!((p.snps_per_block, p.words_per_block), (5, 96));
    }

    #[test]
    fn tiny_cache_is_infeasible() {
        let cs = CacheSpec::new(128, 12, 7, 4);
        assert!(matches!(
            derive_block_params(&cs, 16),
            Err(Error::InfeasibleCache(_))
        ));
        let cs = CacheSpec::new(48 * 1024, 12, 8, 5);
        assert!(matches!(
            derive_block_params(&cs, 16),
            Err(Error::InfeasibleCache(_))
        ));
    }

    #[test]
    fn outputs_satisfy_capacity() {
        for kb in [16, 32, 48, 64, 128] {
            for (ways, ft, blk) in [(8, 7, 1), (12, 7, 4), (16, 8, 8)] {
                let cs = CacheSpec::new(kb * 1024, ways, ft, blk);
                if let Ok(p) = derive_block_params(&cs, 8) {
                    let bs = p.snps_per_block;
                    assert!(bs.pow(3) * 2 * 27 * 4 <= cs.table_bytes());
                    assert!((bs + 1).pow(3) * 2 * 27 * 4 > cs.table_bytes());
                    assert!(bs * p.words_per_block * 2 * 4 <= cs.block_bytes());
                    assert_eq!(p.words_per_block % 8, 0);
                }
            }
        }
    }

    #[test]
    fn strip_in_native_words() {
        let p = BlockParams::default();
        assert_eq!(p.strip_words(), 400 * 32 / WORD_BITS);
        assert_eq!(p.sched_edge, 256);
    }
}
