use crate::datamodel::{Class, ThreePlaneDataset, Word};
use crate::error::Result;
use crate::scoring::{FrequencyTable, COMBINATIONS};

use super::{check_triple, Triple};

#[allow(clippy::needless_range_loop)]
pub(crate) fn naive_table(ds: &ThreePlaneDataset, [a, b, c]: Triple) -> FrequencyTable {
    let xs = [ds.plane(a, 0), ds.plane(a, 1), ds.plane(a, 2)];
    let ys = [ds.plane(b, 0), ds.plane(b, 1), ds.plane(b, 2)];
    let zs = [ds.plane(c, 0), ds.plane(c, 1), ds.plane(c, 2)];
    let phenotype = ds.phenotype();
    let words = ds.words();
    let mut controls = [0u32; COMBINATIONS];
    let mut cases = [0u32; COMBINATIONS];
    for k in 0..words {
        let case_mask = phenotype[k];
        let control_mask = if k + 1 == words {
            !case_mask & ds.pad_mask()
        } else {
            !case_mask
        };
        let x: [Word; 3] = [xs[0][k], xs[1][k], xs[2][k]];
        let y: [Word; 3] = [ys[0][k], ys[1][k], ys[2][k]];
        let z: [Word; 3] = [zs[0][k], zs[1][k], zs[2][k]];
        for gx in 0..3 {
            for gy in 0..3 {
                for gz in 0..3 {
                    let i = gx * 9 + gy * 3 + gz;
                    let t = x[gx] & y[gy] & z[gz];
                    controls[i] = controls[i].wrapping_add((t & control_mask).count_ones());
                    cases[i] = cases[i].wrapping_add((t & case_mask).count_ones());
                }
            }
        }
    }
    let mut table = FrequencyTable::zero();
    *table.column_mut(Class::Control) = controls;
    *table.column_mut(Class::Case) = cases;
    table
}

/// Baseline frequency table: three stored planes per SNP and a phenotype
/// mask, classes not split.
pub fn freq_table_naive(ds: &ThreePlaneDataset, triple: Triple) -> Result<FrequencyTable> {
    check_triple(triple, ds.num_snps())?;
    Ok(naive_table(ds, triple))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{generate_synthetic, GenotypeMatrix};
    use crate::oracle::oracle_freq_table;
    use crate::scoring::combo_index;

    #[test]
    fn single_control_sample() {
        let m = GenotypeMatrix::new(3, 1, vec![0, 1, 2], vec![0]).unwrap();
        let t = freq_table_naive(&ThreePlaneDataset::from_matrix(&m), [0, 1, 2]).unwrap();
        assert_eq!(t.get(combo_index(0, 1, 2), Class::Control), 1);
        assert_eq!(t.class_total(Class::Control), 1);
        assert_eq!(t.class_total(Class::Case), 0);
    }

    #[test]
    fn all_zero_genotypes() {
        let m = GenotypeMatrix::new(3, 8, vec![0; 24], vec![1, 0, 0, 1, 0, 1, 0, 0]).unwrap();
        let t = freq_table_naive(&ThreePlaneDataset::from_matrix(&m), [0, 1, 2]).unwrap();
        assert_eq!((t.get(0, Class::Control), t.get(0, Class::Case)), (5, 3));
        assert_eq!(t.class_total(Class::Control) + t.class_total(Class::Case), 8);
    }

    #[test]
    fn matches_oracle_random() {
        for seed in 0..20 {
            let m = generate_synthetic(3, 130, 0.4, seed, None).unwrap();
            let ds = ThreePlaneDataset::from_matrix(&m);
            assert_eq!(
                freq_table_naive(&ds, [0, 1, 2]).unwrap(),
                oracle_freq_table(&m, [0, 1, 2]).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_triple() {
        let m = generate_synthetic(3, 10, 0.4, 1, None).unwrap();
        assert!(freq_table_naive(&ThreePlaneDataset::from_matrix(&m), [0, 1, 3]).is_err());
    }
}
