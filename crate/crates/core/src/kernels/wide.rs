use crate::datamodel::{BitPlaneDataset, Class, Word};
use crate::error::{Error, Result};
use crate::scoring::{FrequencyTable, COMBINATIONS};

use super::reduced::{accumulate_range, TriplePlanes};
use super::{check_triple, Triple};

pub const SUPPORTED_LANES: [usize; 5] = [1, 2, 4, 8, 16];

/// One word per step leaves the mask-free loop to the compiler's vectorizer,
/// which beats explicit unrolling on the hardware measured.
pub const DEFAULT_LANES: usize = 1;

/// Full `L`-word groups over `[start, end)`, accumulated into one `u64` per
/// cell. Returns where the groups stop. The range must not include the padded
/// final word, so the loop body carries no mask.
#[inline(always)]
pub(crate) fn accumulate_lanes<const L: usize>(
    p: TriplePlanes<'_>,
    start: usize,
    end: usize,
    acc: &mut [u64; COMBINATIONS],
) -> usize {
    let stop = start + (end - start) / L * L;
    let r = start..stop;
    let (x0, x1) = (&p.x.0[r.clone()], &p.x.1[r.clone()]);
    let (y0, y1) = (&p.y.0[r.clone()], &p.y.1[r.clone()]);
    let (z0, z1) = (&p.z.0[r.clone()], &p.z.1[r]);
    for o in (0..stop - start).step_by(L) {
        for l in o..o + L {
            let xs = [x0[l], x1[l], !(x0[l] | x1[l])];
            let ys = [y0[l], y1[l], !(y0[l] | y1[l])];
            let zs = [z0[l], z1[l], !(z0[l] | z1[l])];
            for gx in 0..3 {
                for gy in 0..3 {
                    let xy = xs[gx] & ys[gy];
                    for gz in 0..3 {
                        let cell = &mut acc[gx * 9 + gy * 3 + gz];
                        *cell = cell.wrapping_add((xy & zs[gz]).count_ones() as u64);
                    }
                }
            }
        }
    }
    stop
}

/// Lane-parallel pass over words `[start, end)` of one class, with a scalar
/// masked tail for leftovers and the padded final word.
#[inline(always)]
pub(crate) fn accumulate_range_wide<const L: usize>(
    p: TriplePlanes<'_>,
    start: usize,
    end: usize,
    words: usize,
    pad: Word,
    out: &mut [u32; COMBINATIONS],
) {
    // the final word only joins a lane group when it carries no padding
    let full_end = if end == words && pad != !0 { end - 1 } else { end };
    let mut acc = [0u64; COMBINATIONS];
    let done = accumulate_lanes::<L>(p, start, full_end.max(start), &mut acc);
    for (cell, a) in out.iter_mut().zip(acc) {
        *cell = cell.wrapping_add(a as u32);
    }
    accumulate_range(p, done..end, words, pad, out);
}

fn wide_table<const L: usize>(ds: &BitPlaneDataset, triple: Triple) -> FrequencyTable {
    let mut table = FrequencyTable::zero();
    for class in Class::ALL {
        let w = ds.words(class);
        let p = TriplePlanes::new(ds, triple, class);
        accumulate_range_wide::<L>(p, 0, w, w, ds.pad_mask(class), table.column_mut(class));
    }
    table
}

pub(crate) fn check_lanes(lanes: usize) -> Result<()> {
    if SUPPORTED_LANES.contains(&lanes) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lane count {lanes} not in {SUPPORTED_LANES:?}"
        )))
    }
}

/// Same table as [`super::freq_table_reduced`], processing `lanes` words per step.
pub fn freq_table_wide(ds: &BitPlaneDataset, triple: Triple, lanes: usize) -> Result<FrequencyTable> {
    check_triple(triple, ds.num_snps())?;
    check_lanes(lanes)?;
    Ok(match lanes {
        1 => wide_table::<1>(ds, triple),
        2 => wide_table::<2>(ds, triple),
        4 => wide_table::<4>(ds, triple),
        8 => wide_table::<8>(ds, triple),
        _ => wide_table::<16>(ds, triple),
    })
}
