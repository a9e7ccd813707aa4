use super::bitplane::{pad_mask, words_for, BitPlaneDataset, Class, Word, WORD_BITS};
use super::matrix::GenotypeMatrix;

/// Baseline layout: all three genotype planes stored for every SNP, classes
/// not split, plus a packed phenotype vector (bit set = case).
///
/// Per SNP, planes 0, 1 and 2 each take `words` consecutive words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreePlaneDataset {
    num_snps: usize,
    num_samples: usize,
    words: usize,
    mask: Word,
    planes: Vec<Word>,
    phenotype: Vec<Word>,
}

impl ThreePlaneDataset {
    pub fn from_matrix(matrix: &GenotypeMatrix) -> Self {
        let (m, n) = (matrix.num_snps(), matrix.num_samples());
        let words = words_for(n);
        let mut planes = vec![0 as Word; 3 * words * m];
        for snp in 0..m {
            for (j, &g) in matrix.snp_row(snp).iter().enumerate() {
                planes[(3 * snp + g as usize) * words + j / WORD_BITS] |= 1 << (j % WORD_BITS);
            }
        }
        let mut phenotype = vec![0 as Word; words];
        for (j, &p) in matrix.phenotype().iter().enumerate() {
            phenotype[j / WORD_BITS] |= (p as Word) << (j % WORD_BITS);
        }
        Self {
            num_snps: m,
            num_samples: n,
            words,
            mask: pad_mask(n),
            planes,
            phenotype,
        }
    }

    /// Same samples as `ds`, controls first.
    pub fn from_bitplanes(ds: &BitPlaneDataset) -> Self {
        Self::from_matrix(&ds.decode())
    }

    pub fn num_snps(&self) -> usize {
        self.num_snps
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn pad_mask(&self) -> Word {
        self.mask
    }

    #[inline]
    pub fn plane(&self, snp: usize, genotype: usize) -> &[Word] {
        let base = (3 * snp + genotype) * self.words;
        &self.planes[base..base + self.words]
    }

    pub fn phenotype(&self) -> &[Word] {
        &self.phenotype
    }

    /// Number of samples in each class, recovered from the phenotype vector.
    pub fn class_counts(&self) -> [usize; 2] {
        let cases: usize = self.phenotype.iter().map(|w| w.count_ones() as usize).sum();
        [self.num_samples - cases, cases]
    }

    pub fn class_of(&self, sample: usize) -> Class {
        if self.phenotype[sample / WORD_BITS] >> (sample % WORD_BITS) & 1 == 1 {
            Class::Case
        } else {
            Class::Control
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planes_and_phenotype() {
        let m = GenotypeMatrix::new(3, 3, vec![0, 1, 2, 2, 2, 2, 0, 0, 0], vec![1, 0, 1]).unwrap();
        let ds = ThreePlaneDataset::from_matrix(&m);
        assert_eq!(ds.plane(0, 0), &[0b001]);
        assert_eq!(ds.plane(0, 1), &[0b010]);
        assert_eq!(ds.plane(0, 2), &[0b100]);
        assert_eq!(ds.plane(1, 2), &[0b111]);
        assert_eq!(ds.phenotype(), &[0b101]);
        assert_eq!(ds.class_counts(), [1, 2]);
        assert_eq!(ds.class_of(1), Class::Control);
    }
}
