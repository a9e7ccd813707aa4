use std::ops::Range;

use crate::datamodel::{BitPlaneDataset, Class, Word};
use crate::error::Result;
use crate::scoring::{FrequencyTable, COMBINATIONS};

use super::{check_triple, Triple};

/// Genotype-0/1 planes of the three SNPs for one class.
#[derive(Clone, Copy)]
pub(crate) struct TriplePlanes<'a> {
    pub x: (&'a [Word], &'a [Word]),
    pub y: (&'a [Word], &'a [Word]),
    pub z: (&'a [Word], &'a [Word]),
}

impl<'a> TriplePlanes<'a> {
    #[inline]
    pub fn new(ds: &'a BitPlaneDataset, [a, b, c]: Triple, class: Class) -> Self {
        Self {
            x: ds.planes(a, class),
            y: ds.planes(b, class),
            z: ds.planes(c, class),
        }
    }
}

/// Plane 2 without the debug overlap check; callers hold validated datasets.
#[inline(always)]
pub(crate) fn nor(w0: Word, w1: Word, mask: Word) -> Word {
    !(w0 | w1) & mask
}

/// One word position: 3 NOR, then AND + POPCNT for each of the 27 cells.
#[inline(always)]
pub(crate) fn accumulate_word(
    x: [Word; 2],
    y: [Word; 2],
    z: [Word; 2],
    mask: Word,
    acc: &mut [u32; COMBINATIONS],
) {
    let xs = [x[0], x[1], nor(x[0], x[1], mask)];
    let ys = [y[0], y[1], nor(y[0], y[1], mask)];
    let zs = [z[0], z[1], nor(z[0], z[1], mask)];
    for gx in 0..3 {
        for gy in 0..3 {
            let xy = xs[gx] & ys[gy];
            for gz in 0..3 {
                let cell = &mut acc[gx * 9 + gy * 3 + gz];
                *cell = cell.wrapping_add((xy & zs[gz]).count_ones());
            }
        }
    }
}

/// Accumulates words `range` of one class. `words` and `pad` describe the
/// class so the final word gets masked.
#[inline(always)]
pub(crate) fn accumulate_range(
    p: TriplePlanes<'_>,
    range: Range<usize>,
    words: usize,
    pad: Word,
    acc: &mut [u32; COMBINATIONS],
) {
    for k in range {
        let mask = if k + 1 == words { pad } else { !0 };
        accumulate_word(
            [p.x.0[k], p.x.1[k]],
            [p.y.0[k], p.y.1[k]],
            [p.z.0[k], p.z.1[k]],
            mask,
            acc,
        );
    }
}

pub(crate) fn reduced_table(ds: &BitPlaneDataset, triple: Triple) -> FrequencyTable {
    let mut table = FrequencyTable::zero();
    for class in Class::ALL {
        let w = ds.words(class);
        let planes = TriplePlanes::new(ds, triple, class);
        accumulate_range(planes, 0..w, w, ds.pad_mask(class), table.column_mut(class));
    }
    table
}

/// Frequency table from the phenotype-split two-plane layout.
pub fn freq_table_reduced(ds: &BitPlaneDataset, triple: Triple) -> Result<FrequencyTable> {
    check_triple(triple, ds.num_snps())?;
    Ok(reduced_table(ds, triple))
}
