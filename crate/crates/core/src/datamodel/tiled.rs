use crate::error::{Error, Result};

use super::bitplane::{BitPlaneDataset, Class, Word};

/// SNP-tiled relayout of a [`BitPlaneDataset`].
///
/// SNPs are grouped in blocks of `block_snps`. Within a class the storage is
/// ordered `[block][word][plane][snp-in-block]`, so the same sample word of
/// `block_snps` consecutive SNPs sits side by side. SNP slots past the end of
/// the final block are zero-filled and reported invalid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TiledDataset {
    num_snps: usize,
    block_snps: usize,
    num_blocks: usize,
    class_len: [usize; 2],
    words: [usize; 2],
    masks: [Word; 2],
    data: [Vec<Word>; 2],
}

pub fn transpose_tile(ds: &BitPlaneDataset, block_snps: usize) -> Result<TiledDataset> {
    if block_snps == 0 {
        return Err(Error::InvalidParameter("block size must be at least 1".into()));
    }
    let m = ds.num_snps();
    let num_blocks = m.div_ceil(block_snps);
    let data = Class::ALL.map(|class| {
        let w = ds.words(class);
        let mut out = vec![0 as Word; num_blocks * w * 2 * block_snps];
        for snp in 0..m {
            let (b, ii) = (snp / block_snps, snp % block_snps);
            let (p0, p1) = ds.planes(snp, class);
            for k in 0..w {
                let base = ((b * w + k) * 2) * block_snps;
                out[base + ii] = p0[k];
                out[base + block_snps + ii] = p1[k];
            }
        }
        out
    });
    Ok(TiledDataset {
        num_snps: m,
        block_snps,
        num_blocks,
        class_len: [ds.class_len(Class::Control), ds.class_len(Class::Case)],
        words: [ds.words(Class::Control), ds.words(Class::Case)],
        masks: [ds.pad_mask(Class::Control), ds.pad_mask(Class::Case)],
        data,
    })
}

impl TiledDataset {
    pub fn num_snps(&self) -> usize {
        self.num_snps
    }

    pub fn block_snps(&self) -> usize {
        self.block_snps
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn class_len(&self, class: Class) -> usize {
        self.class_len[class.index()]
    }

    pub fn words(&self, class: Class) -> usize {
        self.words[class.index()]
    }

    pub fn pad_mask(&self, class: Class) -> Word {
        self.masks[class.index()]
    }

    /// Slot index inside the padded block grid; false for zero-filled slots.
    pub fn is_valid(&self, padded_snp: usize) -> bool {
        padded_snp < self.num_snps
    }

    /// Word `word` of plane `genotype` (0 or 1) for `snp`. Valid for any slot
    /// in the padded grid.
    #[inline]
    pub fn word(&self, snp: usize, class: Class, genotype: usize, word: usize) -> Word {
        let (b, ii) = (snp / self.block_snps, snp % self.block_snps);
        let w = self.words[class.index()];
        self.data[class.index()][((b * w + word) * 2 + genotype) * self.block_snps + ii]
    }

    /// Plane 0 then plane 1 for every SNP of `block` at one sample word.
    #[inline]
    pub fn block_words(&self, block: usize, class: Class, word: usize) -> &[Word] {
        let w = self.words[class.index()];
        let base = (block * w + word) * 2 * self.block_snps;
        &self.data[class.index()][base..base + 2 * self.block_snps]
    }

    pub fn storage(&self, class: Class) -> &[Word] {
        &self.data[class.index()]
    }

    /// Inverse of [`transpose_tile`].
    pub fn untile(&self) -> BitPlaneDataset {
        let planes = Class::ALL.map(|class| {
            let w = self.words(class);
            let mut out = vec![0 as Word; 2 * w * self.num_snps];
            for snp in 0..self.num_snps {
                for k in 0..w {
                    out[2 * snp * w + k] = self.word(snp, class, 0, k);
                    out[2 * snp * w + w + k] = self.word(snp, class, 1, k);
                }
            }
            out
        });
        BitPlaneDataset::from_planes(self.num_snps, self.class_len, planes)
            .expect("tiled data came from a valid dataset")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{binarize, generate_synthetic};

    #[test]
    fn unit_block_interleaves_planes_per_word() {
        let m = generate_synthetic(5, 150, 0.4, 3, None).unwrap();
        let ds = binarize(&m);
        let t = transpose_tile(&ds, 1).unwrap();
        for class in Class::ALL {
            let mut expected = Vec::new();
            for snp in 0..ds.num_snps() {
                let (p0, p1) = ds.planes(snp, class);
                for k in 0..ds.words(class) {
                    expected.extend([p0[k], p1[k]]);
                }
            }
            assert_eq!(t.storage(class), &expected[..]);
        }
    }

    #[test]
    fn partial_block_flags_invalid() {
        let m = generate_synthetic(4, 70, 0.4, 3, None).unwrap();
        let t = transpose_tile(&binarize(&m), 64).unwrap();
        assert_eq!(t.num_blocks(), 1);
        assert!((0..4).all(|i| t.is_valid(i)));
        assert!((4..64).all(|i| !t.is_valid(i)));
        for class in Class::ALL {
            for k in 0..t.words(class) {
                assert!((4..64).all(|i| t.word(i, class, 0, k) == 0 && t.word(i, class, 1, k) == 0));
            }
        }
    }

    #[test]
    fn round_trip_and_reads_match() {
        for seed in 0..5 {
            let m = generate_synthetic(70, 300, 0.3, seed, None).unwrap();
            let ds = binarize(&m);
            let t = transpose_tile(&ds, 32).unwrap();
            assert_eq!(t.num_blocks(), 3);
            assert_eq!(t.untile(), ds);
            for class in Class::ALL {
                for snp in [0, 31, 32, 69] {
                    for g in 0..2 {
                        let plane = ds.plane(snp, class, g);
                        for (k, &w) in plane.iter().enumerate() {
                            assert_eq!(t.word(snp, class, g, k), w);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_block_rejected() {
        let m = generate_synthetic(4, 10, 0.4, 3, None).unwrap();
        assert!(transpose_tile(&binarize(&m), 0).is_err());
    }
}
