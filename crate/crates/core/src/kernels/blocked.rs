use crate::datamodel::{BitPlaneDataset, Class};
use crate::scoring::{FrequencyTable, COMBINATIONS};

use super::reduced::{accumulate_range, TriplePlanes};
use super::wide::{accumulate_range_wide, check_lanes};
use super::{BlockParams, Triple};

/// Slot of in-block offsets `(ii0, ii1, ii2)` in a `B_S^3` table array.
#[inline]
pub fn table_slot(ii: [usize; 3], block_snps: usize) -> usize {
    (ii[0] * block_snps + ii[1]) * block_snps + ii[2]
}

/// Calls `f(in-block offsets, global triple)` for every slot of a block
/// triple whose global indices are strictly increasing and in range.
#[inline]
pub(crate) fn for_each_valid_slot(
    blocks: [usize; 3],
    block_snps: usize,
    num_snps: usize,
    mut f: impl FnMut([usize; 3], Triple),
) {
    let base = blocks.map(|b| b * block_snps);
    for ii0 in 0..block_snps {
        let g0 = base[0] + ii0;
        if g0 >= num_snps {
            break;
        }
        for ii1 in 0..block_snps {
            let g1 = base[1] + ii1;
            if g1 >= num_snps {
                break;
            }
            if g1 <= g0 {
                continue;
            }
            for ii2 in 0..block_snps {
                let g2 = base[2] + ii2;
                if g2 >= num_snps {
                    break;
                }
                if g2 <= g1 {
                    continue;
                }
                f([ii0, ii1, ii2], [g0, g1, g2]);
            }
        }
    }
}

fn pass(
    ds: &BitPlaneDataset,
    params: &BlockParams,
    blocks: [usize; 3],
    tables: &mut [FrequencyTable],
    mut strip: impl FnMut(TriplePlanes<'_>, usize, usize, usize, u64, &mut [u32; COMBINATIONS]),
) {
    let bs = params.snps_per_block;
    assert!(tables.len() >= bs * bs * bs, "need B_S^3 tables");
    let strip_words = params.strip_words();
    for class in Class::ALL {
        let words = ds.words(class);
        let pad = ds.pad_mask(class);
        for p0 in (0..words).step_by(strip_words) {
            let p1 = (p0 + strip_words).min(words);
            for_each_valid_slot(blocks, bs, ds.num_snps(), |ii, triple| {
                let planes = TriplePlanes::new(ds, triple, class);
                let column = tables[table_slot(ii, bs)].column_mut(class);
                strip(planes, p0, p1, words, pad, column);
            });
        }
    }
}

/// One block triple of the cache-blocked kernel.
///
/// `blocks` holds SNP block indices (`b0 <= b1 <= b2`). For every in-block
/// slot whose global triple is strictly increasing, adds that triple's counts
/// into `tables[table_slot(..)]`, sweeping samples in strips of
/// [`BlockParams::strip_words`]. Tables must start zeroed; other slots are
/// left untouched.
pub fn blocked_pass(
    ds: &BitPlaneDataset,
    params: &BlockParams,
    blocks: [usize; 3],
    tables: &mut [FrequencyTable],
) {
    pass(ds, params, blocks, tables, |p, start, end, words, pad, column| {
        accumulate_range(p, start..end, words, pad, column)
    });
}

/// [`blocked_pass`] with a lane-parallel strip loop of `lanes` words.
pub fn blocked_pass_wide(
    ds: &BitPlaneDataset,
    params: &BlockParams,
    blocks: [usize; 3],
    tables: &mut [FrequencyTable],
    lanes: usize,
) -> crate::Result<()> {
    check_lanes(lanes)?;
    macro_rules! run {
        ($l:literal) => {
            pass(ds, params, blocks, tables, |p, s, e, w, pad, col| {
                accumulate_range_wide::<$l>(p, s, e, w, pad, col)
            })
        };
    }
    match lanes {
        1 => run!(1),
        2 => run!(2),
        4 => run!(4),
        8 => run!(8),
        _ => run!(16),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{binarize, generate_synthetic};
    use crate::kernels::freq_table_reduced;

    fn params(bs: usize, words_per_block: usize) -> BlockParams {
        BlockParams {
            snps_per_block: bs,
            words_per_block,
            sched_edge: 256,
        }
    }

    fn count_slots(blocks: [usize; 3], bs: usize, m: usize) -> usize {
        let mut n = 0;
        for_each_valid_slot(blocks, bs, m, |_, _| n += 1);
        n
    }

    #[test]
    fn diagonal_block_has_choose_three_slots() {
        assert_eq!(count_slots([0, 0, 0], 5, 5), 10);
        assert_eq!(count_slots([1, 1, 1], 5, 100), 10);
        assert_eq!(count_slots([0, 0, 1], 5, 10), 10 * 5);
        assert_eq!(count_slots([0, 1, 2], 5, 15), 125);
        assert_eq!(count_slots([0, 1, 1], 5, 8), 5 * 3);
    }

    #[test]
    fn single_block_matches_reduced() {
        let m = generate_synthetic(6, 700, 0.3, 2, None).unwrap();
        let ds = binarize(&m);
        let p = params(6, 4);
        for lanes in [None, Some(1), Some(4), Some(8)] {
            let mut tables = vec![FrequencyTable::zero(); 216];
            match lanes {
                None => blocked_pass(&ds, &p, [0, 0, 0], &mut tables),
                Some(l) => blocked_pass_wide(&ds, &p, [0, 0, 0], &mut tables, l).unwrap(),
            }
            let mut seen = 0;
            for_each_valid_slot([0, 0, 0], 6, 6, |ii, t| {
                seen += 1;
                assert_eq!(tables[table_slot(ii, 6)], freq_table_reduced(&ds, t).unwrap());
            });
            assert_eq!(seen, 20);
        }
    }

    #[test]
    fn cross_block_triples_cover_all() {
        let m = generate_synthetic(8, 333, 0.4, 5, None).unwrap();
        let ds = binarize(&m);
        let p = params(5, 2);
        let mut covered = std::collections::BTreeSet::new();
        for b0 in 0..2 {
            for b1 in b0..2 {
                for b2 in b1..2 {
                    let mut tables = vec![FrequencyTable::zero(); 125];
                    blocked_pass_wide(&ds, &p, [b0, b1, b2], &mut tables, 2).unwrap();
                    for_each_valid_slot([b0, b1, b2], 5, 8, |ii, t| {
                        assert!(covered.insert(t), "{t:?} twice");
                        assert_eq!(tables[table_slot(ii, 5)], freq_table_reduced(&ds, t).unwrap());
                    });
                }
            }
        }
        assert_eq!(covered.len(), 56);
    }
}
