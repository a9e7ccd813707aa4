use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;

use epi3::datamodel::io::{read_any, write_packed, write_text};
use epi3::kernels::{freq_table_naive, freq_table_reduced, freq_table_wide};
use epi3::oracle::oracle_freq_table;
use epi3::scoring::COMBINATIONS;
use epi3::{
    binarize, derive_block_params, generate_synthetic, k2_score, BitPlaneDataset, CacheSpec, Class, Error,
    FrequencyTable, GenotypeMatrix, KernelVariant, LogSumTable, PlantSpec, SearchConfig, SearchResult,
    ThreePlaneDataset,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::Index(..) => PyIndexError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A case-control genotype dataset held both as a matrix and as bit planes.
#[pyclass(frozen, module = "epi3_py")]
pub struct Dataset {
    matrix: GenotypeMatrix,
    planes: BitPlaneDataset,
}

impl Dataset {
    fn from_matrix(matrix: GenotypeMatrix) -> Self {
        let planes = binarize(&matrix);
        Self { matrix, planes }
    }
}

#[pymethods]
impl Dataset {
    /// Build from SNP-major genotypes (values 0..=2) and a 0/1 phenotype.
    #[new]
    fn new(genotypes: Vec<Vec<u8>>, phenotype: Vec<u8>) -> PyResult<Self> {
        let m = genotypes.len();
        let n = phenotype.len();
        if let Some(row) = genotypes.iter().position(|r| r.len() != n) {
            return Err(PyValueError::new_err(format!(
                "SNP {row} has {} samples, phenotype has {n}",
                genotypes[row].len()
            )));
        }
        let flat = genotypes.into_iter().flatten().collect();
        GenotypeMatrix::new(m, n, flat, phenotype)
            .map(Self::from_matrix)
            .map_err(to_py)
    }

    /// Read a text or packed file, detected by its first bytes.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let loaded = read_any(path).map_err(to_py)?;
        Ok(Self {
            matrix: loaded.to_matrix(),
            planes: loaded.to_bitplanes(),
        })
    }

    /// Seeded synthetic data. `plant` is `(triple, genotypes, p_match, p_other)`.
    #[staticmethod]
    #[pyo3(signature = (snps, samples, maf, seed, plant=None))]
    fn synthetic(
        snps: usize,
        samples: usize,
        maf: f64,
        seed: u64,
        plant: Option<([usize; 3], [u8; 3], f64, f64)>,
    ) -> PyResult<Self> {
        let plant = plant.map(
            |(triple, target_genotypes, p_case_match, p_case_other)| PlantSpec {
                triple,
                target_genotypes,
                p_case_match,
                p_case_other,
            },
        );
        generate_synthetic(snps, samples, maf, seed, plant.as_ref())
            .map(Self::from_matrix)
            .map_err(to_py)
    }

    #[pyo3(signature = (path, packed=false))]
    fn save(&self, path: &str, packed: bool) -> PyResult<()> {
        if packed {
            write_packed(path, &self.planes)
        } else {
            write_text(path, &self.matrix)
        }
        .map_err(to_py)
    }

    #[getter]
    fn num_snps(&self) -> usize {
        self.matrix.num_snps()
    }

    #[getter]
    fn num_samples(&self) -> usize {
        self.matrix.num_samples()
    }

    /// `(controls, cases)`.
    #[getter]
    fn class_counts(&self) -> (usize, usize) {
        let [a, b] = self.matrix.class_counts();
        (a, b)
    }

    fn genotype(&self, snp: usize, sample: usize) -> PyResult<u8> {
        if snp >= self.num_snps() || sample >= self.num_samples() {
            return Err(PyIndexError::new_err(format!("({snp}, {sample}) out of range")));
        }
        Ok(self.matrix.genotype(snp, sample))
    }

    /// 0 for controls, 1 for cases, in sample order.
    fn phenotype(&self) -> Vec<u32> {
        self.matrix.phenotype().iter().map(|&p| p as u32).collect()
    }

    fn __repr__(&self) -> String {
        let (n0, n1) = self.class_counts();
        format!("Dataset(snps={}, controls={n0}, cases={n1})", self.num_snps())
    }
}

fn columns(t: &FrequencyTable) -> (Vec<u32>, Vec<u32>) {
    (t.column(Class::Control).to_vec(), t.column(Class::Case).to_vec())
}

/// 27x2 frequency table of `triple` as `(controls, cases)` columns, indexed
/// `gx*9 + gy*3 + gz`. `method` is a variant name or `"oracle"`; v2, v3
/// and tpc share the reduced single-triple kernel.
#[pyfunction]
#[pyo3(signature = (dataset, triple, method="v2"))]
fn frequency_table(dataset: &Dataset, triple: [usize; 3], method: &str) -> PyResult<(Vec<u32>, Vec<u32>)> {
    let table = match method {
        "oracle" => oracle_freq_table(&dataset.matrix, triple),
        "v1" => freq_table_naive(&ThreePlaneDataset::from_bitplanes(&dataset.planes), triple),
        "v4" => freq_table_wide(&dataset.planes, triple, 8),
        _ => {
            method.parse::<KernelVariant>().map_err(to_py)?;
            freq_table_reduced(&dataset.planes, triple)
        }
    }
    .map_err(to_py)?;
    Ok(columns(&table))
}

/// K2 score of a table given as two 27-entry columns.
#[pyfunction]
fn k2(controls: Vec<u32>, cases: Vec<u32>) -> PyResult<f64> {
    let (Ok(a), Ok(b)) = (
        <[u32; COMBINATIONS]>::try_from(controls),
        <[u32; COMBINATIONS]>::try_from(cases),
    ) else {
        return Err(PyValueError::new_err("both columns need 27 entries"));
    };
    let table = FrequencyTable::from_columns(a, b);
    let logs = LogSumTable::new(table.max_row() as usize + 1);
    Ok(k2_score(&table, &logs))
}

/// `(B_S, B_P)` for an L1 data cache described in KiB and ways.
#[pyfunction]
#[pyo3(signature = (l1_kb=48, l1_ways=12, ft_ways=7, block_ways=4, lane_ints=16))]
fn block_params(
    l1_kb: usize,
    l1_ways: usize,
    ft_ways: usize,
    block_ways: usize,
    lane_ints: usize,
) -> PyResult<(usize, usize)> {
    let p = derive_block_params(
        &CacheSpec::new(l1_kb * 1024, l1_ways, ft_ways, block_ways),
        lane_ints,
    )
    .map_err(to_py)?;
    Ok((p.snps_per_block, p.words_per_block))
}

#[pyclass(frozen, get_all, module = "epi3_py")]
pub struct SearchOutcome {
    best: ([usize; 3], f64),
    top: Vec<([usize; 3], f64)>,
    combinations_evaluated: u64,
    elapsed_seconds: f64,
}

#[pymethods]
impl SearchOutcome {
    fn __repr__(&self) -> String {
        format!("SearchOutcome(best={:?}, score={:.9})", self.best.0, self.best.1)
    }
}

impl From<SearchResult> for SearchOutcome {
    fn from(r: SearchResult) -> Self {
        Self {
            best: (r.best.triple, r.best.score),
            top: r.top.iter().map(|c| (c.triple, c.score)).collect(),
            combinations_evaluated: r.stats.combinations_evaluated,
            elapsed_seconds: r.stats.elapsed_seconds,
        }
    }
}

/// Exhaustive search for the triple with the lowest K2 score.
#[pyfunction]
#[pyo3(signature = (dataset, variant="v4", threads=None, top_k=10))]
fn search(
    py: Python<'_>,
    dataset: &Dataset,
    variant: &str,
    threads: Option<usize>,
    top_k: usize,
) -> PyResult<SearchOutcome> {
    let defaults = SearchConfig::default();
    let cfg = SearchConfig {
        variant: variant.parse().map_err(to_py)?,
        threads: threads.unwrap_or(defaults.threads),
        top_k,
        ..defaults
    };
    let planes = &dataset.planes;
    py.detach(|| epi3::run_search(planes, &cfg))
        .map(SearchOutcome::from)
        .map_err(to_py)
}

/// Brute-force reference search, limited to `cap` SNPs.
#[pyfunction]
#[pyo3(signature = (dataset, top_k=10, cap=epi3::oracle::DEFAULT_ORACLE_CAP))]
fn oracle_search(dataset: &Dataset, top_k: usize, cap: usize) -> PyResult<SearchOutcome> {
    epi3::oracle::oracle_search(&dataset.matrix, cap, top_k)
        .map(SearchOutcome::from)
        .map_err(to_py)
}

#[pymodule]
fn epi3_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<SearchOutcome>()?;
    m.add_function(wrap_pyfunction!(frequency_table, m)?)?;
    m.add_function(wrap_pyfunction!(k2, m)?)?;
    m.add_function(wrap_pyfunction!(block_params, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_search, m)?)?;
    m.add("VARIANTS", KernelVariant::ALL.map(|v| v.short_name()).to_vec())?;
    Ok(())
}
