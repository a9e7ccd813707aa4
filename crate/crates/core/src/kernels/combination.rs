use crate::datamodel::{Class, TiledDataset};
use crate::scoring::FrequencyTable;

use super::reduced::accumulate_word;
use super::Triple;

/// Host-thread analogue of the one-thread-per-combination kernel.
///
/// Walks a `sched_edge`^3 grid of logical threads anchored at `base` (each
/// coordinate a multiple of `sched_edge`). Grid points with strictly
/// increasing, in-range indices build a private table over all sample words
/// and hand it to `emit`; every other point emits nothing.
pub fn combination_kernel(
    ts: &TiledDataset,
    sched_edge: usize,
    base: [usize; 3],
    mut emit: impl FnMut(Triple, &FrequencyTable),
) {
    assert!(sched_edge > 0, "grid edge must be positive");
    assert!(
        base.iter().all(|b| b % sched_edge == 0),
        "grid base {base:?} not aligned to {sched_edge}"
    );
    let m = ts.num_snps();
    let end = base.map(|b| (b + sched_edge).min(m));
    for i0 in base[0]..end[0] {
        for i1 in base[1].max(i0 + 1)..end[1] {
            for i2 in base[2].max(i1 + 1)..end[2] {
                let mut ft = FrequencyTable::zero();
                for class in Class::ALL {
                    let words = ts.words(class);
                    let pad = ts.pad_mask(class);
                    let acc = ft.column_mut(class);
                    for p in 0..words {
                        let mask = if p + 1 == words { pad } else { !0 };
                        let read = |snp| [ts.word(snp, class, 0, p), ts.word(snp, class, 1, p)];
                        accumulate_word(read(i0), read(i1), read(i2), mask, acc);
                    }
                }
                emit([i0, i1, i2], &ft);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{binarize, generate_synthetic, transpose_tile};
    use crate::kernels::freq_table_reduced;

    #[test]
    fn covers_small_dataset_once() {
        let m = generate_synthetic(6, 90, 0.4, 1, None).unwrap();
        let ds = binarize(&m);
        let ts = transpose_tile(&ds, 4).unwrap();
        let mut out = Vec::new();
        combination_kernel(&ts, 8, [0, 0, 0], |t, ft| out.push((t, *ft)));
        assert_eq!(out.len(), 20);
        for (t, ft) in out {
            assert_eq!(ft, freq_table_reduced(&ds, t).unwrap());
        }
    }

    #[test]
    fn offset_grids_partition_triples() {
        let m = generate_synthetic(11, 200, 0.3, 2, None).unwrap();
        let ds = binarize(&m);
        let ts = transpose_tile(&ds, 3).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for b0 in 0..3 {
            for b1 in b0..3 {
                for b2 in b1..3 {
                    combination_kernel(&ts, 4, [b0 * 4, b1 * 4, b2 * 4], |t, ft| {
                        assert!(seen.insert(t));
                        assert_eq!(*ft, freq_table_reduced(&ds, t).unwrap());
                    });
                }
            }
        }
        assert_eq!(seen.len(), 165);
    }

    #[test]
    fn sched_256_with_tile_64() {
        let m = generate_synthetic(70, 100, 0.4, 3, None).unwrap();
        let ds = binarize(&m);
        let ts = transpose_tile(&ds, 64).unwrap();
        let mut n = 0;
        combination_kernel(&ts, 256, [0, 0, 0], |_, _| n += 1);
        assert_eq!(n, 70 * 69 * 68 / 6);
    }
}
