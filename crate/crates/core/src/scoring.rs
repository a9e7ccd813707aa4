//! Bayesian K2 score over 27x2 genotype frequency tables.

use crate::datamodel::Class;

/// Genotype combinations for three SNPs.
pub const COMBINATIONS: usize = 27;

/// Row index of genotype combination `(gx, gy, gz)`.
#[inline]
pub const fn combo_index(gx: usize, gy: usize, gz: usize) -> usize {
    gx * 9 + gy * 3 + gz
}

/// Counts of each genotype combination per class, stored class-major so a
/// kernel can accumulate one class column in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrequencyTable {
    counts: [[u32; COMBINATIONS]; 2],
}

impl Default for FrequencyTable {
    fn default() -> Self {
        Self::zero()
    }
}

impl FrequencyTable {
    pub const fn zero() -> Self {
        Self {
            counts: [[0; COMBINATIONS]; 2],
        }
    }

    /// From `[controls, cases]` columns.
    pub fn from_columns(controls: [u32; COMBINATIONS], cases: [u32; COMBINATIONS]) -> Self {
        Self {
            counts: [controls, cases],
        }
    }

    #[inline]
    pub fn get(&self, combo: usize, class: Class) -> u32 {
        self.counts[class.index()][combo]
    }

    #[inline]
    pub fn set(&mut self, combo: usize, class: Class, value: u32) {
        self.counts[class.index()][combo] = value;
    }

    #[inline]
    pub fn column(&self, class: Class) -> &[u32; COMBINATIONS] {
        &self.counts[class.index()]
    }

    #[inline]
    pub fn column_mut(&mut self, class: Class) -> &mut [u32; COMBINATIONS] {
        &mut self.counts[class.index()]
    }

    /// Samples counted in `class`.
    pub fn class_total(&self, class: Class) -> u64 {
        self.column(class).iter().map(|&c| c as u64).sum()
    }

    /// `(controls, cases)` for each of the 27 rows.
    pub fn rows(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..COMBINATIONS).map(|i| (self.counts[0][i], self.counts[1][i]))
    }

    /// The largest row sum.
    pub fn max_row(&self) -> u32 {
        self.rows().map(|(a, b)| a + b).max().unwrap_or(0)
    }
}

/// `prefix[n] = ln(1) + ln(2) + ... + ln(n)`, i.e. `ln(n!)`, as `f64` and as
/// fixed point with `frac_bits` fractional bits.
#[derive(Clone, Debug)]
pub struct LogSumTable {
    prefix: Vec<f64>,
    fixed: Vec<i64>,
    frac_bits: i32,
}

/// Headroom below `i64::MAX` so a 27-row sum cannot overflow.
const FIXED_TOP_BITS: f64 = 57.0;
const MAX_FRAC_BITS: i32 = 52;

impl LogSumTable {
    /// Covers `0..=n_max`. A search over `N` samples needs `n_max >= N + 1`.
    pub fn new(n_max: usize) -> Self {
        let mut prefix = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0f64;
        prefix.push(acc);
        for b in 1..=n_max {
            acc += (b as f64).ln();
            prefix.push(acc);
        }
        let top = acc.max(1.0).log2().ceil();
        let frac_bits = ((FIXED_TOP_BITS - top) as i32).min(MAX_FRAC_BITS);
        let scale = (frac_bits as f64).exp2();
        let fixed = prefix.iter().map(|&v| (v * scale).round() as i64).collect();
        Self {
            prefix,
            fixed,
            frac_bits,
        }
    }

    pub fn n_max(&self) -> usize {
        self.prefix.len() - 1
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.prefix[n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.prefix
    }

    /// Fractional bits of the fixed-point prefix; the per-entry rounding
    /// error is at most `2^-(frac_bits + 1)`.
    pub fn frac_bits(&self) -> i32 {
        self.frac_bits
    }
}

pub fn build_log_table(n_max: usize) -> LogSumTable {
    LogSumTable::new(n_max)
}

/// K2 score of one table; lower means a more likely interaction.
///
/// `sum_i ( ln((r_i + 1)!) - ln(r_i0!) - ln(r_i1!) )`, accumulated in fixed
/// point. Integer addition is associative, so tables that differ only by a
/// permutation of rows or by swapping the classes score bit-identically.
#[inline]
pub fn k2_score(table: &FrequencyTable, logs: &LogSumTable) -> f64 {
    debug_assert!(logs.n_max() > table.max_row() as usize);
    let p = &logs.fixed;
    let mut score = 0i64;
    for (r0, r1) in table.rows() {
        let (r0, r1) = (r0 as usize, r1 as usize);
        score += p[r0 + r1 + 1] - p[r0] - p[r1];
    }
    score as f64 * (-logs.frac_bits as f64).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// ln(n!) as an explicit product-free log sum, written independently.
    fn ln_factorial(n: u64) -> f64 {
        (2..=n).map(|b| (b as f64).ln()).sum()
    }

    #[test]
    fn log_table_values() {
        let t = build_log_table(20);
        assert_eq!(t.get(0), 0.0);
        assert_eq!(t.get(1), 0.0);
        assert!((t.get(2) - std::f64::consts::LN_2).abs() < 1e-15);
        // 10! = 3628800
        assert!((t.get(10) - 3628800f64.ln()).abs() < 1e-12);
        for n in 1..=20 {
            assert!((t.get(n) - t.get(n - 1) - (n as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn k2_unit_values() {
        let logs = build_log_table(16);
        assert_eq!(k2_score(&FrequencyTable::zero(), &logs), 0.0);

        let mut t = FrequencyTable::zero();
        t.set(5, Class::Control, 1);
        assert!((k2_score(&t, &logs) - 2f64.ln()).abs() < 1e-12);

        let mut t = FrequencyTable::zero();
        t.set(13, Class::Control, 2);
        t.set(13, Class::Case, 1);
        // ln(4!) - ln(2!) - ln(1!) = ln 12
        let expected = ln_factorial(4) - ln_factorial(2) - ln_factorial(1);
        assert!((expected - 12f64.ln()).abs() < 1e-12);
        assert!((k2_score(&t, &logs) - expected).abs() < 1e-9);
        assert!((k2_score(&t, &logs) - 2.484907).abs() < 1e-6);
    }

    fn table_strategy() -> impl Strategy<Value = FrequencyTable> {
        (
            proptest::array::uniform27(0u32..50),
            proptest::array::uniform27(0u32..50),
        )
            .prop_map(|(a, b)| FrequencyTable::from_columns(a, b))
    }

    #[test]
    fn fixed_point_precision_at_large_n() {
        // 16384 samples spread over a few rows
        let mut t = FrequencyTable::zero();
        for (i, (a, b)) in [(4000u32, 100u32), (3000, 2000), (1, 7000), (200, 83)]
            .into_iter()
            .enumerate()
        {
            t.set(i * 5, Class::Control, a);
            t.set(i * 5, Class::Case, b);
        }
        let logs = build_log_table(16385);
        assert_eq!(logs.frac_bits(), 39);
        let direct: f64 = t
            .rows()
            .map(|(a, b)| ln_factorial((a + b + 1) as u64) - ln_factorial(a as u64) - ln_factorial(b as u64))
            .sum();
        assert!((k2_score(&t, &logs) - direct).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn matches_factorial_form(t in table_strategy()) {
            let logs = build_log_table(101);
            let direct: f64 = t
                .rows()
                .map(|(a, b)| {
                    ln_factorial((a + b + 1) as u64) - ln_factorial(a as u64) - ln_factorial(b as u64)
                })
                .sum();
            prop_assert!((k2_score(&t, &logs) - direct).abs() < 1e-9);
        }

        #[test]
        fn symmetric_and_nonnegative(t in table_strategy(), rot in 0usize..27) {
            let logs = build_log_table(101);
            let s = k2_score(&t, &logs);
            prop_assert!(s >= 0.0);

            let swapped = FrequencyTable::from_columns(*t.column(Class::Case), *t.column(Class::Control));
            prop_assert_eq!(k2_score(&swapped, &logs), s);

            let mut a = *t.column(Class::Control);
            let mut b = *t.column(Class::Case);
            a.rotate_left(rot);
            b.rotate_left(rot);
            let permuted = FrequencyTable::from_columns(a, b);
            prop_assert_eq!(k2_score(&permuted, &logs).to_bits(), s.to_bits());
        }
    }
}
