use crate::error::{Error, Result};

use super::matrix::{GenotypeMatrix, MAX_SAMPLES};

/// Native packing word. One bit per sample.
pub type Word = u64;
pub const WORD_BITS: usize = Word::BITS as usize;

/// Phenotype class. Controls come first in every split layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Control = 0,
    Case = 1,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::Control, Class::Case];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

#[inline]
pub fn words_for(samples: usize) -> usize {
    samples.div_ceil(WORD_BITS)
}

/// Mask for the final word of a plane holding `samples` bits: the low
/// `samples % WORD_BITS` bits, or every bit when the count is a multiple of
/// the word width.
#[inline]
pub fn pad_mask(samples: usize) -> Word {
    match samples % WORD_BITS {
        0 => !0,
        r => (1 << r) - 1,
    }
}

/// Genotype-2 plane from the genotype-0 and genotype-1 planes.
///
/// Padding positions outside `mask` are forced to zero, otherwise they would
/// all land in the (2,2,2) cell.
#[inline(always)]
pub fn infer_plane2(w0: Word, w1: Word, mask: Word) -> Word {
    debug_assert_eq!(w0 & w1 & mask, 0, "genotype planes overlap");
    debug_assert_eq!((w0 | w1) & !mask, 0, "padding bits set");
    !(w0 | w1) & mask
}

/// Phenotype-split bit planes for genotypes 0 and 1. Genotype 2 is never
/// stored; kernels infer it with [`infer_plane2`].
///
/// Per class the storage is SNP-major: for SNP `i`, plane 0 occupies words
/// `[2*i*W, 2*i*W + W)` and plane 1 the following `W` words, where `W` is
/// [`BitPlaneDataset::words`] for that class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitPlaneDataset {
    num_snps: usize,
    class_len: [usize; 2],
    words: [usize; 2],
    masks: [Word; 2],
    planes: [Vec<Word>; 2],
}

impl BitPlaneDataset {
    /// Assembles a dataset from raw per-class plane storage, checking sizes,
    /// genotype exclusivity and zero padding.
    pub fn from_planes(num_snps: usize, class_len: [usize; 2], planes: [Vec<Word>; 2]) -> Result<Self> {
        if num_snps < 3 {
            return Err(Error::Dimension(format!(
                "third-order search needs at least 3 snps, got {num_snps}"
            )));
        }
        if class_len[0] + class_len[1] == 0 {
            return Err(Error::Dimension("no samples".into()));
        }
        if class_len.iter().any(|&n| n > MAX_SAMPLES) {
            return Err(Error::Dimension("class exceeds the 32-bit count cap".into()));
        }
        let words = class_len.map(words_for);
        for c in 0..2 {
            if planes[c].len() != 2 * words[c] * num_snps {
                return Err(Error::Dimension(format!(
                    "class {c}: expected {} words, got {}",
                    2 * words[c] * num_snps,
                    planes[c].len()
                )));
            }
        }
        let ds = Self {
            num_snps,
            class_len,
            words,
            masks: class_len.map(pad_mask),
            planes,
        };
        ds.check_invariants()?;
        Ok(ds)
    }

    pub fn num_snps(&self) -> usize {
        self.num_snps
    }

    pub fn num_samples(&self) -> usize {
        self.class_len[0] + self.class_len[1]
    }

    #[inline]
    pub fn class_len(&self, class: Class) -> usize {
        self.class_len[class.index()]
    }

    #[inline]
    pub fn words(&self, class: Class) -> usize {
        self.words[class.index()]
    }

    #[inline]
    pub fn pad_mask(&self, class: Class) -> Word {
        self.masks[class.index()]
    }

    /// `(plane0, plane1)` for one SNP and class.
    #[inline]
    pub fn planes(&self, snp: usize, class: Class) -> (&[Word], &[Word]) {
        let w = self.words[class.index()];
        let base = 2 * snp * w;
        let store = &self.planes[class.index()];
        (&store[base..base + w], &store[base + w..base + 2 * w])
    }

    #[inline]
    pub fn plane(&self, snp: usize, class: Class, genotype: usize) -> &[Word] {
        let (p0, p1) = self.planes(snp, class);
        match genotype {
            0 => p0,
            1 => p1,
            _ => panic!("genotype 2 is not stored"),
        }
    }

    /// Whole per-class storage, in on-disk order.
    pub fn class_storage(&self, class: Class) -> &[Word] {
        &self.planes[class.index()]
    }

    /// Rebuilds a genotype matrix with controls first, then cases.
    pub fn decode(&self) -> GenotypeMatrix {
        let n = self.num_samples();
        let mut genotypes = vec![0u8; self.num_snps * n];
        for snp in 0..self.num_snps {
            let row = &mut genotypes[snp * n..(snp + 1) * n];
            let mut offset = 0;
            for class in Class::ALL {
                let (p0, p1) = self.planes(snp, class);
                for j in 0..self.class_len(class) {
                    let (w, b) = (j / WORD_BITS, j % WORD_BITS);
                    row[offset + j] = if p0[w] >> b & 1 == 1 {
                        0
                    } else if p1[w] >> b & 1 == 1 {
                        1
                    } else {
                        2
                    };
                }
                offset += self.class_len(class);
            }
        }
        let mut phenotype = vec![0u8; self.class_len[0]];
        phenotype.resize(n, 1);
        GenotypeMatrix::new(self.num_snps, n, genotypes, phenotype)
            .expect("decoded planes always form a valid matrix")
    }

    /// Genotype exclusivity and zero padding in every stored plane.
    pub fn check_invariants(&self) -> Result<()> {
        for class in Class::ALL {
            let w = self.words(class);
            if w == 0 {
                continue;
            }
            let mask = self.pad_mask(class);
            for snp in 0..self.num_snps {
                let (p0, p1) = self.planes(snp, class);
                for (k, (&a, &b)) in p0.iter().zip(p1).enumerate() {
                    if a & b != 0 {
                        return Err(Error::CorruptData(format!(
                            "snp {snp}, {class:?} word {k}: genotype 0 and 1 both set"
                        )));
                    }
                    if k == w - 1 && (a | b) & !mask != 0 {
                        return Err(Error::CorruptData(format!(
                            "snp {snp}, {class:?}: padding bits set"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Splits samples by phenotype and packs genotype 0 and 1 planes.
///
/// Within each class samples keep their order of appearance.
pub fn binarize(matrix: &GenotypeMatrix) -> BitPlaneDataset {
    let class_len = matrix.class_counts();
    let words = class_len.map(words_for);
    let m = matrix.num_snps();
    let mut planes = [
        vec![0 as Word; 2 * words[0] * m],
        vec![0 as Word; 2 * words[1] * m],
    ];
    let phenotype = matrix.phenotype();
    for snp in 0..m {
        let row = matrix.snp_row(snp);
        let mut pos = [0usize; 2];
        for (sample, &g) in row.iter().enumerate() {
            let c = phenotype[sample] as usize;
            let j = pos[c];
            pos[c] += 1;
            if g < 2 {
                let idx = 2 * snp * words[c] + g as usize * words[c] + j / WORD_BITS;
                planes[c][idx] |= 1 << (j % WORD_BITS);
            }
        }
    }
    BitPlaneDataset {
        num_snps: m,
        class_len,
        words,
        masks: class_len.map(pad_mask),
        planes,
    }
}
