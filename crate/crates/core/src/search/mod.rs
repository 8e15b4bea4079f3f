//! (1+λ) approximation search over CGP chromosomes.
//!
//! Offspring are accepted when their worst-case error stays within the
//! threshold and their active gate count does not exceed the parent's.
//! Equal-size offspring replace the parent, which lets the search drift
//! across neutral networks.

use std::fmt::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::export::{CgpChromosome, CgpError};
use crate::sim::{ExhaustiveTable, Program, RefFn, SimError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("seed chromosome has WCE {wce}, above the threshold {threshold}")]
    SeedViolatesThreshold { wce: String, threshold: u128 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cgp(#[from] CgpError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub wce_threshold: u128,
    /// Offspring per generation.
    pub lambda: usize,
    pub mutations_per_offspring: usize,
    /// Candidate evaluations, the seed included.
    pub max_evaluations: u64,
    /// Optional wall-clock limit; results are only reproducible without it.
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            wce_threshold: 0,
            lambda: 4,
            mutations_per_offspring: 5,
            max_evaluations: 10_000,
            time_limit: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HistoryEntry {
    pub evaluation: u64,
    pub active_gates: usize,
    pub wce: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best: CgpChromosome,
    pub best_active_gates: usize,
    pub best_wce: u128,
    pub evaluations: u64,
    pub history: Vec<HistoryEntry>,
}

impl SearchResult {
    /// `evaluation gates wce` records, one per acceptance.
    pub fn history_text(&self) -> String {
        let mut s = String::from("# evaluation active_gates wce\n");
        for h in &self.history {
            let _ = writeln!(s, "{} {} {}", h.evaluation, h.active_gates, h.wce);
        }
        s
    }
}

/// Seed of run `run` in a batch of independent runs.
pub fn derive_seed(seed: u64, run: u64) -> u64 {
    seed.wrapping_add(run.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Nodes reachable backwards from the outputs.
pub fn active_nodes(c: &CgpChromosome) -> Vec<bool> {
    let n_in = c.n_inputs;
    let mut active = vec![false; c.nodes.len()];
    for &o in &c.outputs {
        if o >= n_in {
            active[o - n_in] = true;
        }
    }
    for k in (0..c.nodes.len()).rev() {
        if !active[k] {
            continue;
        }
        let node = c.nodes[k];
        let unary = node.function < 2;
        for (i, index) in [node.a, node.b].into_iter().enumerate() {
            if i == 1 && unary {
                break;
            }
            if index >= n_in {
                active[index - n_in] = true;
            }
        }
    }
    active
}

pub fn active_gate_count(c: &CgpChromosome) -> usize {
    active_nodes(c).into_iter().filter(|&a| a).count()
}

/// Random value in `0..n` other than `current`, when `n > 1`.
fn different(rng: &mut impl Rng, n: usize, current: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let v = rng.gen_range(0..n - 1);
    if v >= current {
        v + 1
    } else {
        v
    }
}

/// Changes `n_mutations` loci drawn uniformly from node inputs, node
/// functions and output indices. New connections always point at primary
/// inputs or earlier nodes.
pub fn mutate(c: &CgpChromosome, rng: &mut impl Rng, n_mutations: usize) -> CgpChromosome {
    let mut m = c.clone();
    let node_loci = 3 * m.nodes.len();
    let total = node_loci + m.outputs.len();
    if total == 0 {
        return m;
    }
    for _ in 0..n_mutations {
        let locus = rng.gen_range(0..total);
        if locus < node_loci {
            let k = locus / 3;
            let limit = m.n_inputs + k;
            let node = &mut m.nodes[k];
            match locus % 3 {
                0 => node.a = different(rng, limit, node.a),
                1 => node.b = different(rng, limit, node.b),
                _ => node.function = different(rng, 8, node.function as usize) as u8,
            }
        } else {
            let o = locus - node_loci;
            m.outputs[o] = different(rng, m.n_inputs + m.nodes.len(), m.outputs[o]);
        }
    }
    m
}

/// Chromosome compiled with its inactive nodes removed.
fn compile(c: &CgpChromosome) -> Result<Program, SearchError> {
    let net = c.to_netlist("candidate", None)?.strip_dead();
    Ok(Program::new(&net)?)
}

struct Evaluator<'a> {
    table: &'a ExhaustiveTable,
    threshold: u128,
}

impl Evaluator<'_> {
    /// Worst-case error, or `None` above the threshold.
    fn wce(&self, c: &CgpChromosome) -> Result<Option<u128>, SearchError> {
        Ok(self.table.wce(&compile(c)?, Some(self.threshold))?)
    }
}

/// Runs the search from `seed`, whose input bits are split into buses of
/// `input_widths` for the `reference`.
pub fn approximate(
    seed: &CgpChromosome,
    reference: RefFn,
    input_widths: &[usize],
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    approximate_with_observer(seed, reference, input_widths, config, |_, _| {})
}

/// As [`approximate`], calling `observer` on every accepted parent.
pub fn approximate_with_observer(
    seed: &CgpChromosome,
    reference: RefFn,
    input_widths: &[usize],
    config: &SearchConfig,
    mut observer: impl FnMut(&HistoryEntry, &CgpChromosome),
) -> Result<SearchResult, SearchError> {
    if config.lambda == 0 || config.mutations_per_offspring == 0 || config.max_evaluations == 0 {
        return Err(SearchError::Config(
            "lambda, mutations and evaluations must be positive".into(),
        ));
    }
    seed.validate()?;
    if input_widths.iter().sum::<usize>() != seed.n_inputs {
        return Err(SearchError::Config(format!(
            "input widths {input_widths:?} do not cover {} chromosome inputs",
            seed.n_inputs
        )));
    }
    let table = ExhaustiveTable::new(input_widths, seed.n_outputs, reference)?;
    let eval = Evaluator {
        table: &table,
        threshold: config.wce_threshold,
    };
    let start = Instant::now();

    let mut parent = seed.clone();
    let mut parent_gates = active_gate_count(&parent);
    let mut parent_wce = match eval.wce(&parent)? {
        Some(w) => w,
        None => {
            let actual = table
                .wce(&compile(&parent)?, None)?
                .map_or("?".into(), |w| w.to_string());
            return Err(SearchError::SeedViolatesThreshold {
                wce: actual,
                threshold: config.wce_threshold,
            });
        }
    };
    let mut evaluations = 1u64;
    let first = HistoryEntry {
        evaluation: 0,
        active_gates: parent_gates,
        wce: parent_wce,
    };
    observer(&first, &parent);
    let mut history = vec![first];

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    while evaluations < config.max_evaluations {
        if config.time_limit.is_some_and(|t| start.elapsed() >= t) {
            break;
        }
        let count = (config.max_evaluations - evaluations).min(config.lambda as u64) as usize;
        let offspring: Vec<CgpChromosome> = (0..count)
            .map(|_| mutate(&parent, &mut rng, config.mutations_per_offspring))
            .collect();
        let scored: Vec<Result<Option<(usize, u128)>, SearchError>> = offspring
            .par_iter()
            .map(|child| {
                let gates = active_gate_count(child);
                if gates > parent_gates {
                    return Ok(None);
                }
                Ok(eval.wce(child)?.map(|w| (gates, w)))
            })
            .collect();
        let base = evaluations;
        evaluations += count as u64;
        let mut best: Option<(usize, usize, u128)> = None;
        for (i, s) in scored.into_iter().enumerate() {
            if let Some((gates, wce)) = s? {
                if best.map_or(true, |(_, g, _)| gates < g) {
                    best = Some((i, gates, wce));
                }
            }
        }
        if let Some((i, gates, wce)) = best {
            parent = offspring.into_iter().nth(i).expect("index from enumerate");
            parent_gates = gates;
            parent_wce = wce;
            let entry = HistoryEntry {
                evaluation: base + i as u64,
                active_gates: gates,
                wce,
            };
            observer(&entry, &parent);
            history.push(entry);
        }
    }

    Ok(SearchResult {
        best: parent,
        best_active_gates: parent_gates,
        best_wce: parent_wce,
        evaluations,
        history,
    })
}
