use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::matrix::GenotypeMatrix;

/// A planted three-way interaction: samples carrying `target_genotypes` at
/// `triple` become cases with probability `p_case_match`, everyone else with
/// `p_case_other`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantSpec {
    pub triple: [usize; 3],
    pub target_genotypes: [u8; 3],
    pub p_case_match: f64,
    pub p_case_other: f64,
}

impl PlantSpec {
    pub fn validate(&self, num_snps: usize) -> Result<()> {
        let [a, b, c] = self.triple;
        if a == b || b == c || a == c {
            return Err(Error::InvalidParameter(format!(
                "plant indices must be distinct: {:?}",
                self.triple
            )));
        }
        if self.triple.iter().any(|&i| i >= num_snps) {
            return Err(Error::InvalidParameter(format!(
                "plant indices {:?} out of range for {num_snps} snps",
                self.triple
            )));
        }
        if self.target_genotypes.iter().any(|&g| g > 2) {
            return Err(Error::InvalidParameter(
                "plant genotypes must be 0, 1 or 2".into(),
            ));
        }
        for p in [self.p_case_match, self.p_case_other] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("probability {p} outside [0,1]")));
            }
        }
        if self.p_case_match <= self.p_case_other {
            return Err(Error::InvalidParameter(
                "p_case_match must exceed p_case_other".into(),
            ));
        }
        Ok(())
    }

    /// Planted indices in ascending order.
    pub fn sorted_triple(&self) -> [usize; 3] {
        let mut t = self.triple;
        t.sort_unstable();
        t
    }
}

/// Hardy-Weinberg genotype draws with minor allele frequency `maf`, and a
/// phenotype that is either a fair coin or driven by `plant`.
///
/// Pure function of its arguments.
pub fn generate_synthetic(
    num_snps: usize,
    num_samples: usize,
    maf: f64,
    seed: u64,
    plant: Option<&PlantSpec>,
) -> Result<GenotypeMatrix> {
    if !(maf > 0.0 && maf <= 0.5) {
        return Err(Error::InvalidParameter(format!("maf {maf} outside (0, 0.5]")));
    }
    if num_snps < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 snps, got {num_snps}"
        )));
    }
    if num_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if let Some(p) = plant {
        p.validate(num_snps)?;
    }

    let p0 = (1.0 - maf) * (1.0 - maf);
    let p01 = p0 + 2.0 * maf * (1.0 - maf);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let genotypes: Vec<u8> = (0..num_snps * num_samples)
        .map(|_| {
            let u: f64 = rng.random();
            if u < p0 {
                0
            } else if u < p01 {
                1
            } else {
                2
            }
        })
        .collect();

    let phenotype = (0..num_samples)
        .map(|s| {
            let p = match plant {
                None => 0.5,
                Some(plant) => {
                    let hit = plant
                        .triple
                        .iter()
                        .zip(plant.target_genotypes)
                        .all(|(&snp, g)| genotypes[snp * num_samples + s] == g);
                    if hit {
                        plant.p_case_match
                    } else {
                        plant.p_case_other
                    }
                }
            };
            rng.random_bool(p) as u8
        })
        .collect();

    GenotypeMatrix::new(num_snps, num_samples, genotypes, phenotype)
}
