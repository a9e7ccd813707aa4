//! Brute-force references. Deliberately slow and free of bit tricks; the
//! optimized kernels and the search driver are tested against these.

use std::time::Instant;

use crate::datamodel::{Class, GenotypeMatrix};
use crate::error::{Error, Result};
use crate::kernels::Triple;
use crate::scoring::FrequencyTable;
use crate::search::{Candidate, SearchResult, SearchStats};

pub const DEFAULT_ORACLE_CAP: usize = 64;

/// Per-sample counting: `counts[gx*9 + gy*3 + gz][phenotype] += 1`.
pub fn oracle_freq_table(matrix: &GenotypeMatrix, triple: Triple) -> Result<FrequencyTable> {
    let [a, b, c] = triple;
    if !(a < b && b < c && c < matrix.num_snps()) {
        return Err(Error::Index(triple, matrix.num_snps()));
    }
    let mut table = FrequencyTable::zero();
    for s in 0..matrix.num_samples() {
        let row = matrix.genotype(a, s) as usize * 9
            + matrix.genotype(b, s) as usize * 3
            + matrix.genotype(c, s) as usize;
        let class = if matrix.phenotype()[s] == 1 {
            Class::Case
        } else {
            Class::Control
        };
        table.set(row, class, table.get(row, class) + 1);
    }
    Ok(table)
}

/// `ln(n!)` summed term by term.
fn ln_factorial(n: u32) -> f64 {
    let mut acc = 0.0;
    for d in 1..=n {
        acc += (d as f64).ln();
    }
    acc
}

/// K2 in factorial form, `sum_i ln((r_i+1)!) - sum_j ln(r_ij!)`, with no
/// shared precomputation.
pub fn oracle_k2(table: &FrequencyTable) -> f64 {
    table
        .rows()
        .map(|(r0, r1)| ln_factorial(r0 + r1 + 1) - ln_factorial(r0) - ln_factorial(r1))
        .sum()
}

/// Exhaustive triple-nested search. Ties go to the lexicographically
/// smallest triple.
pub fn oracle_search(matrix: &GenotypeMatrix, cap: usize, top_k: usize) -> Result<SearchResult> {
    let m = matrix.num_snps();
    if m > cap {
        return Err(Error::CapExceeded { cap, snps: m });
    }
    let start = Instant::now();
    let mut all = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let table = oracle_freq_table(matrix, [a, b, c])?;
                all.push(Candidate {
                    score: oracle_k2(&table),
                    triple: [a, b, c],
                });
            }
        }
    }
    all.sort_by(|x, y| x.score.total_cmp(&y.score).then(x.triple.cmp(&y.triple)));
    let evaluated = all.len() as u64;
    all.truncate(top_k.max(1));
    Ok(SearchResult {
        best: all[0],
        top: all,
        stats: SearchStats {
            combinations_evaluated: evaluated,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            per_thread: vec![evaluated],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::generate_synthetic;
    use crate::scoring::combo_index;

    #[test]
    fn single_case_sample() {
        let m = GenotypeMatrix::new(3, 1, vec![0, 0, 0], vec![1]).unwrap();
        let t = oracle_freq_table(&m, [0, 1, 2]).unwrap();
        assert_eq!(t.get(combo_index(0, 0, 0), Class::Case), 1);
        assert_eq!(t.class_total(Class::Control), 0);
    }

    #[test]
    fn column_sums_conserved() {
        let m = generate_synthetic(5, 311, 0.3, 8, None).unwrap();
        let [n0, n1] = m.class_counts();
        let t = oracle_freq_table(&m, [0, 3, 4]).unwrap();
        assert_eq!(t.class_total(Class::Control), n0 as u64);
        assert_eq!(t.class_total(Class::Case), n1 as u64);
    }

    #[test]
    fn k2_factorial_form() {
        let mut t = FrequencyTable::zero();
        t.set(0, Class::Control, 2);
        t.set(0, Class::Case, 1);
        assert!((oracle_k2(&t) - 12f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn three_snps_one_triple() {
        let m = generate_synthetic(3, 40, 0.3, 8, None).unwrap();
        let r = oracle_search(&m, 64, 10).unwrap();
        assert_eq!(r.stats.combinations_evaluated, 1);
        assert_eq!(r.best.triple, [0, 1, 2]);
        assert_eq!(r.top.len(), 1);
    }

    #[test]
    fn cap_enforced() {
        let m = generate_synthetic(65, 4, 0.3, 8, None).unwrap();
        assert!(matches!(oracle_search(&m, 64, 1), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn bad_triple() {
        let m = generate_synthetic(4, 4, 0.3, 8, None).unwrap();
        assert!(oracle_freq_table(&m, [0, 0, 1]).is_err());
    }
}
