//! `epi3` command line: `generate`, `detect`, `verify` and `bench`.
//!
//! Exit codes: 0 success, 1 runtime or verification failure, 2 usage or
//! parameter error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bench::{emit_report, measure, ReportFormat};
use crate::datamodel::io::{read_any, write_packed, write_text};
use crate::datamodel::{binarize, generate_synthetic, Class, PlantSpec};
use crate::error::{Error, Result};
use crate::kernels::{derive_block_params, BlockParams, CacheSpec, KernelVariant, DEFAULT_LANE_INTS};
use crate::oracle::{oracle_freq_table, oracle_search};
use crate::scoring::FrequencyTable;
use crate::search::{num_combinations, run_search, run_search_observed, SearchConfig, Triple};

#[derive(Parser, Debug)]
#[command(name = "epi3", version, about = "Exhaustive third-order epistasis detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic case-control dataset.
    Generate(GenerateArgs),
    /// Find the SNP triple with the lowest K2 score.
    Detect(DetectArgs),
    /// Check every kernel variant against the brute-force oracle.
    Verify(VerifyArgs),
    /// Time a search and report elements per second.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FileFormat {
    Text,
    Packed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    snps: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    maf: f64,
    #[arg(long)]
    seed: u64,
    /// i0,i1,i2:gx,gy,gz:pmatch,pother
    #[arg(long)]
    plant: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: FileFormat,
}

#[derive(Args, Debug, Clone)]
struct KernelArgs {
    #[arg(long, default_value = "v4")]
    variant: String,
    #[arg(long)]
    threads: Option<usize>,
    /// L1 data cache size in KiB.
    #[arg(long, default_value_t = 48)]
    l1_kb: usize,
    #[arg(long, default_value_t = 12)]
    l1_ways: usize,
    /// Ways reserved for the frequency tables.
    #[arg(long, default_value_t = 7)]
    ft_ways: usize,
    /// Ways reserved for the sample block.
    #[arg(long, default_value_t = 4)]
    block_ways: usize,
    /// 32-bit integers per vector register; B_P is rounded down to a multiple.
    #[arg(long, default_value_t = DEFAULT_LANE_INTS)]
    lane_ints: usize,
    /// Grid edge for the thread-per-combination kernel.
    #[arg(long, default_value_t = BlockParams::DEFAULT_SCHED_EDGE)]
    sched: usize,
    /// SNPs per tile in the transposed layout.
    #[arg(long, default_value_t = 64)]
    tile_snps: usize,
    /// Words per step in the lane-parallel kernel.
    #[arg(long, default_value_t = crate::kernels::DEFAULT_LANES)]
    lanes: usize,
}

impl KernelArgs {
    fn config(&self, top_k: usize) -> Result<SearchConfig> {
        let cache = CacheSpec::new(self.l1_kb * 1024, self.l1_ways, self.ft_ways, self.block_ways);
        let mut block = derive_block_params(&cache, self.lane_ints)?;
        block.sched_edge = self.sched;
        let defaults = SearchConfig::default();
        let cfg = SearchConfig {
            variant: self.variant.parse()?,
            block,
            threads: self.threads.unwrap_or(defaults.threads),
            top_k,
            chunk: 1,
            lanes: self.lanes,
            tile_snps: self.tile_snps,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    /// Print one JSON document instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = crate::oracle::DEFAULT_ORACLE_CAP)]
    max_snps: usize,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::InfeasibleCache(_) | Error::CapExceeded { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Detect(a) => detect(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Bench(a) => bench(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn parse_triple<T: std::str::FromStr>(s: &str) -> Option<[T; 3]> {
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse().ok())
        .collect::<Option<_>>()?;
    parts.try_into().ok()
}

pub fn parse_plant(text: &str) -> Result<PlantSpec> {
    let bad = || {
        Error::InvalidParameter(format!(
            "bad plant {text:?}, expected i0,i1,i2:gx,gy,gz:pmatch,pother"
        ))
    };
    let mut fields = text.split(':');
    let (Some(idx), Some(geno), Some(probs), None) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(bad());
    };
    let triple = parse_triple::<usize>(idx).ok_or_else(bad)?;
    let target_genotypes = parse_triple::<u8>(geno).ok_or_else(bad)?;
    let (pm, po) = probs.split_once(',').ok_or_else(bad)?;
    Ok(PlantSpec {
        triple,
        target_genotypes,
        p_case_match: pm.trim().parse().map_err(|_| bad())?,
        p_case_other: po.trim().parse().map_err(|_| bad())?,
    })
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Result<i32> {
    let plant = a.plant.as_deref().map(parse_plant).transpose()?;
    let matrix = generate_synthetic(a.snps, a.samples, a.maf, a.seed, plant.as_ref())?;
    match a.format {
        FileFormat::Text => write_text(&a.out, &matrix)?,
        FileFormat::Packed => write_packed(&a.out, &binarize(&matrix))?,
    }
    let [n0, n1] = matrix.class_counts();
    writeln!(
        out,
        "wrote {}: snps={} samples={} controls={n0} cases={n1}",
        a.out.display(),
        a.snps,
        a.samples
    )?;
    if let Some(p) = plant {
        writeln!(
            out,
            "planted triple {:?} genotypes {:?} p_case_match={} p_case_other={}",
            p.triple, p.target_genotypes, p.p_case_match, p.p_case_other
        )?;
    }
    Ok(0)
}

fn fmt_triple(t: Triple) -> String {
    format!("{} {} {}", t[0], t[1], t[2])
}

fn detect(a: DetectArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = a.kernel.config(a.top_k)?;
    let ds = read_any(&a.input)?.to_bitplanes();
    let r = run_search(&ds, &cfg)?;
    let (n0, n1) = (ds.class_len(Class::Control), ds.class_len(Class::Case));
    if a.json {
        let doc = json!({
            "dataset": { "snps": ds.num_snps(), "samples": ds.num_samples(), "controls": n0, "cases": n1 },
            "variant": cfg.variant.short_name(),
            "block": {
                "snps_per_block": cfg.block.snps_per_block,
                "words_per_block": cfg.block.words_per_block,
                "sched_edge": cfg.block.sched_edge,
            },
            "threads": cfg.threads,
            "best": r.best,
            "top": r.top,
            "stats": r.stats,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        return Ok(0);
    }
    writeln!(
        out,
        "dataset: snps={} samples={} (controls {n0}, cases {n1})",
        ds.num_snps(),
        ds.num_samples()
    )?;
    writeln!(
        out,
        "variant: {}  block: B_S={} B_P={} B_Sched={}  threads: {}",
        cfg.variant, cfg.block.snps_per_block, cfg.block.words_per_block, cfg.block.sched_edge, cfg.threads
    )?;
    writeln!(out, "best: {}  K2={:.9}", fmt_triple(r.best.triple), r.best.score)?;
    writeln!(out, "top {}:", r.top.len())?;
    for (rank, c) in r.top.iter().enumerate() {
        writeln!(
            out,
            "  {:>3}. {:<20} {:.9}",
            rank + 1,
            fmt_triple(c.triple),
            c.score
        )?;
    }
    writeln!(
        out,
        "combinations: {}  elapsed: {:.6} s",
        r.stats.combinations_evaluated, r.stats.elapsed_seconds
    )?;
    Ok(0)
}

struct Mismatch {
    triple: Triple,
    got: FrequencyTable,
    want: FrequencyTable,
}

fn describe_cells(m: &Mismatch) -> String {
    let mut cells = Vec::new();
    for class in Class::ALL {
        for i in 0..27 {
            let (g, w) = (m.got.get(i, class), m.want.get(i, class));
            if g != w {
                cells.push(format!(
                    "({},{},{})/{class:?}: got {g} want {w}",
                    i / 9,
                    i / 3 % 3,
                    i % 3
                ));
            }
        }
    }
    cells.join("; ")
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let loaded = read_any(&a.input)?;
    let matrix = loaded.to_matrix();
    if matrix.num_snps() > a.max_snps {
        return Err(Error::CapExceeded {
            cap: a.max_snps,
            snps: matrix.num_snps(),
        });
    }
    let ds = loaded.to_bitplanes();
    let mut failures = 0;
    let mut check = |out: &mut dyn Write, name: String, ok: bool, detail: String| -> Result<()> {
        if ok {
            writeln!(out, "PASS {name}")?;
        } else {
            failures += 1;
            writeln!(out, "FAIL {name}: {detail}")?;
        }
        Ok(())
    };

    let inv = ds.check_invariants();
    check(
        out,
        "dataset invariants".into(),
        inv.is_ok(),
        inv.err().map(|e| e.to_string()).unwrap_or_default(),
    )?;

    let oracle = oracle_search(&matrix, a.max_snps, 1)?;
    let expected = num_combinations(matrix.num_snps() as u64, 3)?;
    for variant in KernelVariant::ALL {
        let cfg = SearchConfig {
            variant,
            threads: a.threads.unwrap_or(SearchConfig::default().threads),
            top_k: 1,
            ..SearchConfig::default()
        };
        let first: Mutex<Option<Mismatch>> = Mutex::new(None);
        let observer = |triple: Triple, table: &FrequencyTable| {
            let want = oracle_freq_table(&matrix, triple).expect("search emits valid triples");
            if *table != want {
                let mut slot = first.lock().unwrap();
                if slot.as_ref().is_none_or(|m| triple < m.triple) {
                    *slot = Some(Mismatch {
                        triple,
                        got: *table,
                        want,
                    });
                }
            }
        };
        let r = run_search_observed(&ds, &cfg, Some(&observer))?;
        let mismatch = first.into_inner().unwrap();
        check(
            out,
            format!("tables {variant}"),
            mismatch.is_none(),
            mismatch
                .map(|m| {
                    format!(
                        "first differing triple {}: {}",
                        fmt_triple(m.triple),
                        describe_cells(&m)
                    )
                })
                .unwrap_or_default(),
        )?;
        check(
            out,
            format!("coverage {variant}"),
            r.stats.combinations_evaluated == expected,
            format!("evaluated {} of {expected}", r.stats.combinations_evaluated),
        )?;
        let same = r.best.triple == oracle.best.triple && (r.best.score - oracle.best.score).abs() <= 1e-9;
        check(
            out,
            format!("search {variant}"),
            same,
            format!(
                "best {} ({:.12}) vs oracle {} ({:.12})",
                fmt_triple(r.best.triple),
                r.best.score,
                fmt_triple(oracle.best.triple),
                oracle.best.score
            ),
        )?;
    }
    writeln!(
        out,
        "{}",
        if failures == 0 {
            "verify: PASS"
        } else {
            "verify: FAIL"
        }
    )?;
    Ok(if failures == 0 { 0 } else { 1 })
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = a.kernel.config(10)?;
    let ds = read_any(&a.input)?.to_bitplanes();
    let (report, _) = measure(&ds, &cfg, a.repeats)?;
    let format = match a.format {
        OutputFormat::Csv => ReportFormat::Csv,
        OutputFormat::Json => ReportFormat::Json,
    };
    let bytes = emit_report(&report, format);
    match a.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => out.write_all(&bytes)?,
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plant_parsing() {
        let p = parse_plant("1,5,9:0,1,2:0.9,0.1").unwrap();
        assert_eq!(p.triple, [1, 5, 9]);
        assert_eq!(p.target_genotypes, [0, 1, 2]);
        assert_eq!((p.p_case_match, p.p_case_other), (0.9, 0.1));
        assert!(parse_plant("1,5:0,1,2:0.9,0.1").is_err());
        assert!(parse_plant("1,5,9:0,1,2:0.9").is_err());
        assert!(parse_plant("1,5,9:0,1,2:0.9,0.1:x").is_err());
    }

    #[test]
    fn default_cache_flags_give_5_by_400_blocking() {
        let args = KernelArgs::parse_from_defaults();
        let cfg = args.config(10).unwrap();
        assert_eq!((cfg.block.snps_per_block, cfg.block.words_per_block), (5, 400));
        assert_eq!(cfg.block.sched_edge, 256);
        assert_eq!(cfg.variant, KernelVariant::BlockedWide);
    }

    impl KernelArgs {
        fn parse_from_defaults() -> Self {
            #[derive(Parser)]
            struct Wrap {
                #[command(flatten)]
                k: KernelArgs,
            }
            Wrap::parse_from(["x"]).k
        }
    }
}
