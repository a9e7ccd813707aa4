use super::KernelVariant;

/// Analytic per-element cost of a kernel variant.
///
/// An element is one packed word position of the three SNPs. `bytes` counts
/// the genotype planes loaded per element (three SNPs x stored planes x 4
/// bytes); the phenotype word is amortized away.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstructionModel {
    pub ops_per_element: u32,
    pub bytes_per_element: u32,
    /// Memory traffic relative to the baseline variant.
    pub relative_memory: f64,
}

impl InstructionModel {
    pub fn arithmetic_intensity(&self) -> f64 {
        self.ops_per_element as f64 / self.bytes_per_element as f64
    }
}

/// Baseline: 27 cells x (2 AND for the triple, 1 AND + 1 ANDN with the
/// phenotype, 2 POPCNT) = 162. Split layout: 3 NOR shared by all cells plus
/// 27 x (AND + POPCNT) = 57, loading two of three planes.
pub fn instruction_count_model(variant: KernelVariant) -> InstructionModel {
    match variant {
        KernelVariant::NaivePhenotype => InstructionModel {
            ops_per_element: 27 * 6,
            bytes_per_element: 3 * 3 * 4,
            relative_memory: 1.0,
        },
        _ => InstructionModel {
            ops_per_element: 3 + 27 * (1 + 1),
            bytes_per_element: 3 * 2 * 4,
            relative_memory: 2.0 / 3.0,
        },
    }
}
