use crate::error::{Error, Result};

/// Frequency counts are 32-bit, so a class can never exceed this many samples.
pub const MAX_SAMPLES: usize = u32::MAX as usize;

/// Raw case-control genotype data, SNP-major.
///
/// `genotypes[snp * num_samples + sample]` is in {0,1,2} and `phenotype[sample]`
/// is 0 for a control and 1 for a case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenotypeMatrix {
    num_snps: usize,
    num_samples: usize,
    genotypes: Vec<u8>,
    phenotype: Vec<u8>,
}

impl GenotypeMatrix {
    /// Builds a matrix and runs [`GenotypeMatrix::validate`] on it.
    pub fn new(num_snps: usize, num_samples: usize, genotypes: Vec<u8>, phenotype: Vec<u8>) -> Result<Self> {
        let expected = num_snps
            .checked_mul(num_samples)
            .ok_or_else(|| Error::Dimension("snps x samples overflows".into()))?;
        if genotypes.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} genotype values, got {}",
                genotypes.len()
            )));
        }
        if phenotype.len() != num_samples {
            return Err(Error::Dimension(format!(
                "expected {num_samples} phenotype values, got {}",
                phenotype.len()
            )));
        }
        Self {
            num_snps,
            num_samples,
            genotypes,
            phenotype,
        }
        .validate()
    }

    /// Checks dimensions (at least 3 SNPs, at least one sample) and value
    /// domains. Reports the first offending coordinate in SNP-major order.
    pub fn validate(self) -> Result<Self> {
        if self.num_snps < 3 {
            return Err(Error::Dimension(format!(
                "third-order search needs at least 3 snps, got {}",
                self.num_snps
            )));
        }
        if self.num_samples == 0 {
            return Err(Error::Dimension("no samples".into()));
        }
        if self.num_samples > MAX_SAMPLES {
            return Err(Error::Dimension(format!(
                "{} samples exceeds the 32-bit count cap",
                self.num_samples
            )));
        }
        if let Some(pos) = self.genotypes.iter().position(|&g| g > 2) {
            return Err(Error::Domain {
                snp: pos / self.num_samples,
                sample: pos % self.num_samples,
            });
        }
        if let Some(sample) = self.phenotype.iter().position(|&p| p > 1) {
            return Err(Error::PhenotypeDomain { sample });
        }
        Ok(self)
    }

    pub fn num_snps(&self) -> usize {
        self.num_snps
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    #[inline]
    pub fn genotype(&self, snp: usize, sample: usize) -> u8 {
        self.genotypes[snp * self.num_samples + sample]
    }

    pub fn snp_row(&self, snp: usize) -> &[u8] {
        &self.genotypes[snp * self.num_samples..(snp + 1) * self.num_samples]
    }

    pub fn genotypes(&self) -> &[u8] {
        &self.genotypes
    }

    pub fn phenotype(&self) -> &[u8] {
        &self.phenotype
    }

    /// `[controls, cases]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let cases = self.phenotype.iter().filter(|&&p| p == 1).count();
        [self.num_samples - cases, cases]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_accepted() {
        let m = GenotypeMatrix::new(3, 4, vec![0; 12], vec![0, 0, 1, 1]).unwrap();
        assert_eq!(m.class_counts(), [2, 2]);
    }

    #[test]
    fn out_of_domain_reports_coordinate() {
        let mut g = vec![0; 12];
        g[4 + 2] = 3;
        let err = GenotypeMatrix::new(3, 4, g, vec![0; 4]).unwrap_err();
        assert!(matches!(err, Error::Domain { snp: 1, sample: 2 }), "{err}");
    }

    #[test]
    fn too_few_snps() {
        let err = GenotypeMatrix::new(2, 4, vec![0; 8], vec![0; 4]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn no_samples() {
        let err = GenotypeMatrix::new(3, 0, vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn bad_phenotype() {
        let err = GenotypeMatrix::new(3, 2, vec![0; 6], vec![0, 2]).unwrap_err();
        assert!(matches!(err, Error::PhenotypeDomain { sample: 1 }));
    }

    #[test]
    fn length_mismatch() {
        let err = GenotypeMatrix::new(3, 2, vec![0; 5], vec![0, 1]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }
}
