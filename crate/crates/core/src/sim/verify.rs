use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::program::{batch_shape, exhaustive_inputs, lane_value, slice_lanes};
use super::{input_widths, mask, unpack, Program, RefFn, Result, SimError};
use crate::netlist::FlatNetlist;

/// Input assignment on which a circuit disagrees with its reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<(String, u128)>,
    pub expected: u128,
    pub actual: u128,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in &self.inputs {
            write!(f, "{name}={v} ")?;
        }
        write!(f, "expected={} actual={}", self.expected, self.actual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub passed: bool,
    /// Vectors compared against the reference (don't-cares excluded).
    pub vectors: u64,
    pub counterexample: Option<Counterexample>,
    pub seed: Option<u64>,
}

fn counterexample(net: &FlatNetlist, packed: u128, expected: u128, actual: u128) -> Counterexample {
    let values = unpack(packed, &input_widths(net));
    Counterexample {
        inputs: net.inputs.iter().map(|b| b.name.clone()).zip(values).collect(),
        expected,
        actual,
    }
}

/// Compares one batch; returns the vectors checked and the first mismatch
/// as `(packed input, expected, actual)`.
fn check_batch(
    net: &FlatNetlist,
    reference: RefFn,
    packed: &[u128],
    outputs: &[u64],
) -> (u64, Option<(u128, u128, u128)>) {
    let widths = input_widths(net);
    let mut checked = 0;
    for (lane, &p) in packed.iter().enumerate() {
        let Some(expected) = reference(&unpack(p, &widths)) else {
            continue;
        };
        checked += 1;
        let expected = expected & super::mask(outputs.len());
        let actual = lane_value(outputs, lane);
        if actual != expected {
            return (checked, Some((p, expected, actual)));
        }
    }
    (checked, None)
}

/// Checks every input vector against `reference`.
pub fn verify_exhaustive(net: &FlatNetlist, reference: RefFn, max_input_bits: usize) -> Result<Verdict> {
    let bits = net.input_bits();
    if bits > max_input_bits {
        return Err(SimError::TooManyInputs {
            bits,
            limit: max_input_bits,
        });
    }
    let prog = Program::new(net)?;
    let (batches, lanes) = batch_shape(bits);
    let results: Vec<(u64, Option<(u128, u128, u128)>)> = (0..batches)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), vec![0u64; prog.output_bits()]),
            |(words, slots, out), index| {
                exhaustive_inputs(bits, index, words);
                prog.run_into(words, slots, out);
                let packed: Vec<u128> = (0..lanes as u128).map(|t| index as u128 * 64 + t).collect();
                check_batch(net, reference, &packed, out)
            },
        )
        .collect();
    let mut vectors = 0;
    for (checked, fail) in results {
        vectors += checked;
        if let Some((p, e, a)) = fail {
            return Ok(Verdict {
                passed: false,
                vectors,
                counterexample: Some(counterexample(net, p, e, a)),
                seed: None,
            });
        }
    }
    Ok(Verdict {
        passed: true,
        vectors,
        counterexample: None,
        seed: None,
    })
}

/// Checks `trials` uniformly drawn input vectors; deterministic in `seed`.
pub fn verify_random(net: &FlatNetlist, reference: RefFn, trials: u64, seed: u64) -> Result<Verdict> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let prog = Program::new(net)?;
    let widths = input_widths(net);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = 0;
    let mut remaining = trials;
    while remaining > 0 {
        let n = remaining.min(64) as usize;
        remaining -= n as u64;
        let packed: Vec<u128> = (0..n)
            .map(|_| {
                let values: Vec<u128> = widths.iter().map(|&w| rng.gen::<u128>() & mask(w)).collect();
                super::pack(&values, &widths)
            })
            .collect();
        let out = prog.run(&slice_lanes(&packed, prog.input_bits()));
        let (checked, fail) = check_batch(net, reference, &packed, &out);
        vectors += checked;
        if let Some((p, e, a)) = fail {
            return Ok(Verdict {
                passed: false,
                vectors,
                counterexample: Some(counterexample(net, p, e, a)),
                seed: Some(seed),
            });
        }
    }
    Ok(Verdict {
        passed: true,
        vectors,
        counterexample: None,
        seed: Some(seed),
    })
}
