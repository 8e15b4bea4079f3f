use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::program::{batch_shape, exhaustive_inputs, lane_value, slice_lanes};
use super::{input_widths, mask, pack, unpack, Program, RefFn, Result, SimError, EXHAUSTIVE_LIMIT};
use crate::netlist::FlatNetlist;

/// Accurate behaviour an approximate netlist is compared with.
#[derive(Clone, Copy)]
pub enum Exact<'a> {
    Function(RefFn<'a>),
    Netlist(&'a FlatNetlist),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSpace {
    Exhaustive,
    Random { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub wce: u128,
    pub mae: f64,
    /// Mean of `|err| / exact` over inputs whose exact output is nonzero.
    pub mre: f64,
    pub error_rate: f64,
    pub inputs_evaluated: u64,
    pub erroneous_inputs: u64,
    /// Inputs left out of the relative error because the exact output is 0.
    pub zero_exact_outputs: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

impl ErrorReport {
    /// One `key=value` pair per line.
    pub fn to_key_value(&self) -> String {
        let mut s = format!(
            "wce={}\nmae={}\nmre={}\nerror_rate={}\ninputs_evaluated={}\nerroneous_inputs={}\nzero_exact_outputs={}\nexhaustive={}\n",
            self.wce,
            self.mae,
            self.mre,
            self.error_rate,
            self.inputs_evaluated,
            self.erroneous_inputs,
            self.zero_exact_outputs,
            self.exhaustive
        );
        if let Some(seed) = self.seed {
            s.push_str(&format!("seed={seed}\n"));
        }
        s
    }
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_key_value())
    }
}

#[derive(Default, Clone, Copy)]
struct Partial {
    wce: u128,
    abs_sum: u128,
    rel_sum: f64,
    evaluated: u64,
    erroneous: u64,
    zeros: u64,
}

impl Partial {
    fn add(&mut self, exact: u128, approx: u128) {
        let err = exact.abs_diff(approx);
        self.evaluated += 1;
        self.wce = self.wce.max(err);
        self.abs_sum += err;
        if err != 0 {
            self.erroneous += 1;
        }
        if exact == 0 {
            self.zeros += 1;
        } else {
            self.rel_sum += err as f64 / exact as f64;
        }
    }

    fn merge(mut self, o: &Partial) -> Partial {
        self.wce = self.wce.max(o.wce);
        self.abs_sum += o.abs_sum;
        self.rel_sum += o.rel_sum;
        self.evaluated += o.evaluated;
        self.erroneous += o.erroneous;
        self.zeros += o.zeros;
        self
    }
}

struct ExactEval<'a> {
    exact: Exact<'a>,
    prog: Option<Program>,
    widths: Vec<usize>,
}

impl ExactEval<'_> {
    /// Exact outputs of the given packed input vectors.
    fn outputs(&self, packed: &[u128], words: Option<&[u64]>) -> Vec<Option<u128>> {
        match (&self.exact, &self.prog) {
            (Exact::Function(f), _) => packed.iter().map(|&p| f(&unpack(p, &self.widths))).collect(),
            (Exact::Netlist(_), Some(prog)) => {
                let sliced;
                let words = match words {
                    Some(w) => w,
                    None => {
                        sliced = slice_lanes(packed, prog.input_bits());
                        &sliced
                    }
                };
                let out = prog.run(words);
                (0..packed.len()).map(|lane| Some(lane_value(&out, lane))).collect()
            }
            (Exact::Netlist(_), None) => unreachable!("netlist reference is compiled up front"),
        }
    }
}

fn check_signatures(approx: &FlatNetlist, exact: &FlatNetlist) -> Result<()> {
    if input_widths(approx) != input_widths(exact) {
        return Err(SimError::SignatureMismatch(format!(
            "input widths {:?} vs {:?}",
            input_widths(approx),
            input_widths(exact)
        )));
    }
    if approx.output_bits() != exact.output_bits() {
        return Err(SimError::SignatureMismatch(format!(
            "{} vs {} output bits",
            approx.output_bits(),
            exact.output_bits()
        )));
    }
    Ok(())
}

/// WCE, MAE, MRE and error rate of `approx` against `exact`.
///
/// Inputs on which a function reference returns `None` are skipped.
pub fn error_metrics(approx: &FlatNetlist, exact: Exact, space: InputSpace) -> Result<ErrorReport> {
    let prog = Program::new(approx)?;
    let exact_prog = match exact {
        Exact::Netlist(e) => {
            check_signatures(approx, e)?;
            Some(Program::new(e)?)
        }
        Exact::Function(_) => None,
    };
    let eval = ExactEval {
        exact,
        prog: exact_prog,
        widths: input_widths(approx),
    };
    let out_mask = mask(approx.output_bits());
    let compare = |packed: &[u128], words: &[u64], out: &[u64]| -> Partial {
        let mut p = Partial::default();
        for (lane, e) in eval.outputs(packed, Some(words)).into_iter().enumerate() {
            if let Some(e) = e {
                p.add(e & out_mask, lane_value(out, lane));
            }
        }
        p
    };

    let (total, exhaustive, seed) = match space {
        InputSpace::Exhaustive => {
            let bits = approx.input_bits();
            if bits > EXHAUSTIVE_LIMIT {
                return Err(SimError::TooManyInputs {
                    bits,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            let (batches, lanes) = batch_shape(bits);
            // collected in batch order so the float sums are schedule independent
            let parts: Vec<Partial> = (0..batches)
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new(), vec![0u64; prog.output_bits()]),
                    |(words, slots, out), index| {
                        exhaustive_inputs(bits, index, words);
                        prog.run_into(words, slots, out);
                        let packed: Vec<u128> = (0..lanes as u128).map(|t| index as u128 * 64 + t).collect();
                        compare(&packed, words, out)
                    },
                )
                .collect();
            (parts.iter().fold(Partial::default(), Partial::merge), true, None)
        }
        InputSpace::Random { trials, seed } => {
            if trials == 0 {
                return Err(SimError::NoTrials);
            }
            let widths = input_widths(approx);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut total = Partial::default();
            let mut remaining = trials;
            while remaining > 0 {
                let n = remaining.min(64) as usize;
                remaining -= n as u64;
                let packed: Vec<u128> = (0..n)
                    .map(|_| {
                        let values: Vec<u128> = widths.iter().map(|&w| rng.gen::<u128>() & mask(w)).collect();
                        pack(&values, &widths)
                    })
                    .collect();
                let words = slice_lanes(&packed, prog.input_bits());
                let out = prog.run(&words);
                total = total.merge(&compare(&packed, &words, &out));
            }
            (total, false, Some(seed))
        }
    };

    let n = total.evaluated.max(1) as f64;
    let nonzero = (total.evaluated - total.zeros).max(1) as f64;
    Ok(ErrorReport {
        wce: total.wce,
        mae: total.abs_sum as f64 / n,
        mre: total.rel_sum / nonzero,
        error_rate: total.erroneous as f64 / n,
        inputs_evaluated: total.evaluated,
        erroneous_inputs: total.erroneous,
        zero_exact_outputs: total.zeros,
        exhaustive,
        seed,
    })
}

/// Exact outputs of a whole input space, stored bit-sliced per batch, for
/// repeated worst-case-error checks of candidate netlists.
#[derive(Debug, Clone)]
pub struct ExhaustiveTable {
    input_bits: usize,
    output_bits: usize,
    lanes: usize,
    /// `output_bits` words per batch.
    words: Vec<u64>,
    /// Lanes with a defined exact output, one word per batch.
    care: Vec<u64>,
}

impl ExhaustiveTable {
    pub fn new(input_widths: &[usize], output_bits: usize, reference: RefFn) -> Result<ExhaustiveTable> {
        let input_bits: usize = input_widths.iter().sum();
        if input_bits > EXHAUSTIVE_LIMIT {
            return Err(SimError::TooManyInputs {
                bits: input_bits,
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        if output_bits > 128 {
            return Err(SimError::TooWide(output_bits));
        }
        let (batches, lanes) = batch_shape(input_bits);
        let per_batch: Vec<(Vec<u64>, u64)> = (0..batches)
            .into_par_iter()
            .map(|index| {
                let mut words = vec![0u64; output_bits];
                let mut care = 0u64;
                for lane in 0..lanes {
                    let packed = index as u128 * 64 + lane as u128;
                    if let Some(v) = reference(&unpack(packed, input_widths)) {
                        care |= 1 << lane;
                        for (i, w) in words.iter_mut().enumerate() {
                            *w |= (((v >> i) & 1) as u64) << lane;
                        }
                    }
                }
                (words, care)
            })
            .collect();
        let mut words = Vec::with_capacity(per_batch.len() * output_bits);
        let mut care = Vec::with_capacity(per_batch.len());
        for (w, c) in per_batch {
            words.extend(w);
            care.push(c);
        }
        Ok(ExhaustiveTable {
            input_bits,
            output_bits,
            lanes,
            words,
            care,
        })
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    /// Worst-case error of `prog`, or `None` once it exceeds `limit`.
    pub fn wce(&self, prog: &Program, limit: Option<u128>) -> Result<Option<u128>> {
        if prog.input_bits() != self.input_bits || prog.output_bits() != self.output_bits {
            return Err(SimError::SignatureMismatch(format!(
                "{}/{} input/output bits vs {}/{}",
                prog.input_bits(),
                prog.output_bits(),
                self.input_bits,
                self.output_bits
            )));
        }
        let limit = limit.unwrap_or(u128::MAX);
        let batches = self.care.len() as u64;
        let ob = self.output_bits;
        let found = (0..batches)
            .into_par_iter()
            .map_init(
                || (Vec::new(), Vec::new(), vec![0u64; ob]),
                |(words, slots, out), index| {
                    exhaustive_inputs(self.input_bits, index, words);
                    prog.run_into(words, slots, out);
                    let i = index as usize;
                    let exact = &self.words[i * ob..(i + 1) * ob];
                    let lane_mask = if self.lanes == 64 {
                        u64::MAX
                    } else {
                        (1u64 << self.lanes) - 1
                    };
                    let mut diff = 0u64;
                    for (a, e) in out.iter().zip(exact) {
                        diff |= a ^ e;
                    }
                    diff &= self.care[i] & lane_mask;
                    let mut worst = 0u128;
                    while diff != 0 {
                        let lane = diff.trailing_zeros() as usize;
                        diff &= diff - 1;
                        let err = lane_value(out, lane).abs_diff(lane_value(exact, lane));
                        if err > limit {
                            return None;
                        }
                        worst = worst.max(err);
                    }
                    Some(worst)
                },
            )
            .try_reduce(|| 0, |a, b| Some(a.max(b)));
        Ok(found)
    }
}
