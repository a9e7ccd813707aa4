//! Exhaustive search over all SNP triples.
//!
//! The triple space is cut into block triples `(b0 <= b1 <= b2)` and
//! linearized in lexicographic order. Workers pull runs of block triples from
//! a shared atomic counter into private top-k buffers, which are merged once
//! all workers join. Candidates are totally ordered by
//! `(score, triple)`, so the result does not depend on the thread count.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::time::Instant;

use serde::Serialize;

use crate::datamodel::{transpose_tile, BitPlaneDataset, ThreePlaneDataset, TiledDataset};
use crate::error::{Error, Result};
use crate::kernels::{
    blocked_pass, blocked_pass_wide, combination_kernel, for_each_valid_slot, naive_table, reduced_table,
    table_slot, BlockParams, KernelVariant, DEFAULT_LANES,
};
use crate::scoring::{k2_score, FrequencyTable, LogSumTable};

pub use crate::kernels::Triple;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub score: f64,
    pub triple: Triple,
}

impl Candidate {
    /// Ascending score, then lexicographic triple.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| self.triple.cmp(&other.triple))
    }

    /// Equality including the exact bit pattern of the score.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.score.to_bits() == other.score.to_bits() && self.triple == other.triple
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub combinations_evaluated: u64,
    pub elapsed_seconds: f64,
    /// Combinations evaluated by each worker.
    pub per_thread: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best: Candidate,
    /// Up to `top_k` candidates, best first.
    pub top: Vec<Candidate>,
    pub stats: SearchStats,
}

impl SearchResult {
    /// Same best, same top list (bit-exact scores) and same coverage.
    /// Timing and per-thread split are ignored.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.best.bit_eq(&other.best)
            && self.top.len() == other.top.len()
            && self.top.iter().zip(&other.top).all(|(a, b)| a.bit_eq(b))
            && self.stats.combinations_evaluated == other.stats.combinations_evaluated
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub variant: KernelVariant,
    pub block: BlockParams,
    pub threads: usize,
    pub top_k: usize,
    /// Block triples fetched per counter increment.
    pub chunk: usize,
    /// Words per step in the lane-parallel kernel.
    pub lanes: usize,
    /// SNPs per tile in the transposed layout of the combination kernel.
    pub tile_snps: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            variant: KernelVariant::BlockedWide,
            block: BlockParams::default(),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            top_k: 10,
            chunk: 1,
            lanes: DEFAULT_LANES,
            tile_snps: 64,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        self.block.validate()?;
        if self.threads == 0 || self.chunk == 0 || self.top_k == 0 || self.tile_snps == 0 {
            return Err(Error::InvalidParameter(
                "threads, chunk, top_k and tile_snps must be at least 1".into(),
            ));
        }
        crate::kernels::check_lanes(self.lanes)
    }

    /// SNPs per scheduling block for this variant.
    fn unit_edge(&self) -> usize {
        match self.variant {
            KernelVariant::ThreadPerCombination => self.block.sched_edge,
            _ => self.block.snps_per_block,
        }
    }
}

/// `C(n, k)`, exact.
pub fn num_combinations(n: u64, k: u64) -> Result<u64> {
    if n < k {
        return Err(Error::InvalidParameter(format!("cannot choose {k} of {n}")));
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).map_err(|_| Error::InvalidParameter(format!("C({n},{k}) overflows u64")))
}

/// Block triples `b0 <= b1 <= b2 < nb`, lexicographic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct BlockCursor {
    nb: usize,
    b: [usize; 3],
}

impl BlockCursor {
    fn total(nb: usize) -> usize {
        nb * (nb + 1) * (nb + 2) / 6
    }

    fn unrank(nb: usize, mut rank: usize) -> Self {
        let mut b0 = 0;
        loop {
            let rest = nb - b0;
            let here = rest * (rest + 1) / 2;
            if rank < here {
                break;
            }
            rank -= here;
            b0 += 1;
        }
        let mut b1 = b0;
        while rank >= nb - b1 {
            rank -= nb - b1;
            b1 += 1;
        }
        Self {
            nb,
            b: [b0, b1, b1 + rank],
        }
    }

    fn advance(&mut self) {
        let [b0, b1, b2] = &mut self.b;
        *b2 += 1;
        if *b2 == self.nb {
            *b1 += 1;
            if *b1 == self.nb {
                *b0 += 1;
                *b1 = *b0;
            }
            *b2 = *b1;
        }
    }
}

/// Fixed-capacity buffer of the best candidates, best first.
#[derive(Clone, Debug)]
struct TopK {
    k: usize,
    items: Vec<Candidate>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    #[inline]
    fn push(&mut self, c: Candidate) {
        if self.items.len() == self.k {
            match self.items.last() {
                Some(worst) if c.total_cmp(worst) == Ordering::Less => {}
                _ => return,
            }
        }
        let pos = self.items.partition_point(|x| x.total_cmp(&c) == Ordering::Less);
        if self.items.get(pos).is_some_and(|x| x.triple == c.triple) {
            return;
        }
        self.items.insert(pos, c);
        self.items.truncate(self.k);
    }
}

enum Prepared<'a> {
    Naive(ThreePlaneDataset),
    Split(&'a BitPlaneDataset),
    Tiled(TiledDataset),
}

/// Per-triple callback used by tests and `verify` to observe every table.
pub type Observer<'a> = &'a (dyn Fn(Triple, &FrequencyTable) + Sync);

struct Worker<'a> {
    prepared: &'a Prepared<'a>,
    cfg: &'a SearchConfig,
    logs: &'a LogSumTable,
    observer: Option<Observer<'a>>,
    top: TopK,
    evaluated: u64,
    tables: Vec<FrequencyTable>,
}

impl<'a> Worker<'a> {
    #[inline]
    fn record(&mut self, triple: Triple, table: &FrequencyTable) {
        if let Some(obs) = self.observer {
            obs(triple, table);
        }
        self.evaluated += 1;
        self.top.push(Candidate {
            score: k2_score(table, self.logs),
            triple,
        });
    }

    fn process(&mut self, blocks: [usize; 3]) -> Result<()> {
        let cfg = self.cfg;
        let edge = cfg.unit_edge();
        match (self.prepared, cfg.variant) {
            (Prepared::Naive(ds), _) => {
                let m = ds.num_snps();
                for_each_valid_slot(blocks, edge, m, |_, t| {
                    let table = naive_table(ds, t);
                    self.record(t, &table);
                });
            }
            (Prepared::Split(ds), KernelVariant::ReducedSplit) => {
                for_each_valid_slot(blocks, edge, ds.num_snps(), |_, t| {
                    let table = reduced_table(ds, t);
                    self.record(t, &table);
                });
            }
            (Prepared::Split(ds), variant) => {
                let mut tables = std::mem::take(&mut self.tables);
                tables.fill(FrequencyTable::zero());
                if variant == KernelVariant::Blocked {
                    blocked_pass(ds, &cfg.block, blocks, &mut tables);
                } else {
                    blocked_pass_wide(ds, &cfg.block, blocks, &mut tables, cfg.lanes)?;
                }
                for_each_valid_slot(blocks, edge, ds.num_snps(), |ii, t| {
                    self.record(t, &tables[table_slot(ii, edge)]);
                });
                self.tables = tables;
            }
            (Prepared::Tiled(ts), _) => {
                let base = blocks.map(|b| b * edge);
                combination_kernel(ts, edge, base, |t, table| self.record(t, table));
            }
        }
        Ok(())
    }
}

/// Merges partial results over disjoint triple sets: lowest `(score,
/// triple)` wins, top lists merge and truncate to `top_k`, counts add up.
pub fn reduce_results(partials: Vec<SearchResult>, top_k: usize) -> Option<SearchResult> {
    let mut top = TopK::new(top_k.max(1));
    let mut stats = SearchStats::default();
    for p in partials {
        for c in &p.top {
            top.push(*c);
        }
        stats.combinations_evaluated += p.stats.combinations_evaluated;
        stats.elapsed_seconds = stats.elapsed_seconds.max(p.stats.elapsed_seconds);
        stats.per_thread.extend(p.stats.per_thread);
    }
    Some(SearchResult {
        best: *top.items.first()?,
        top: top.items,
        stats,
    })
}

pub fn run_search(ds: &BitPlaneDataset, cfg: &SearchConfig) -> Result<SearchResult> {
    run_search_observed(ds, cfg, None)
}

/// [`run_search`] that also reports every evaluated triple and its table.
pub fn run_search_observed(
    ds: &BitPlaneDataset,
    cfg: &SearchConfig,
    observer: Option<Observer<'_>>,
) -> Result<SearchResult> {
    cfg.validate()?;
    let start = Instant::now();
    let prepared = match cfg.variant {
        KernelVariant::NaivePhenotype => Prepared::Naive(ThreePlaneDataset::from_bitplanes(ds)),
        KernelVariant::ThreadPerCombination => Prepared::Tiled(transpose_tile(ds, cfg.tile_snps)?),
        _ => Prepared::Split(ds),
    };
    let logs = LogSumTable::new(ds.num_samples() + 1);
    let edge = cfg.unit_edge();
    let nb = ds.num_snps().div_ceil(edge);
    let total = BlockCursor::total(nb);
    let counter = AtomicUsize::new(0);
    let table_slots = match cfg.variant {
        KernelVariant::Blocked | KernelVariant::BlockedWide => edge.pow(3),
        _ => 0,
    };

    let work = || -> Result<SearchResult> {
        let mut w = Worker {
            prepared: &prepared,
            cfg,
            logs: &logs,
            observer,
            top: TopK::new(cfg.top_k),
            evaluated: 0,
            tables: vec![FrequencyTable::zero(); table_slots],
        };
        loop {
            let first = counter.fetch_add(cfg.chunk, AtomicOrdering::Relaxed);
            if first >= total {
                break;
            }
            let mut cursor = BlockCursor::unrank(nb, first);
            for _ in first..(first + cfg.chunk).min(total) {
                w.process(cursor.b)?;
                cursor.advance();
            }
        }
        let best = w.top.items.first().copied().unwrap_or(Candidate {
            score: f64::INFINITY,
            triple: [usize::MAX; 3],
        });
        Ok(SearchResult {
            best,
            top: w.top.items,
            stats: SearchStats {
                combinations_evaluated: w.evaluated,
                elapsed_seconds: 0.0,
                per_thread: vec![w.evaluated],
            },
        })
    };

    let partials: Vec<SearchResult> = if cfg.threads == 1 {
        vec![work()?]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..cfg.threads).map(|_| s.spawn(work)).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    };
    let mut result = reduce_results(partials, cfg.top_k)
        .ok_or_else(|| Error::Dimension("no triples to evaluate".into()))?;
    result.stats.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}
