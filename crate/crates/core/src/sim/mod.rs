//! Simulation, verification, error metrics and structural statistics.
//!
//! Bus values are `u128`, LSB first. Where a circuit has several output
//! buses they are concatenated in declaration order into one packed value.

mod hier;
mod metrics;
mod program;
mod stats;
mod verify;

use thiserror::Error;

use crate::netlist::{FlatNetlist, NetlistError};

pub use crate::arith::{from_signed, to_signed};
pub use hier::simulate_hierarchical;
pub use metrics::{error_metrics, ErrorReport, Exact, ExhaustiveTable, InputSpace};
pub use program::Program;
pub use stats::{stats, NetlistStats};
pub use verify::{verify_exhaustive, verify_random, Counterexample, Verdict};

/// Largest input space swept exhaustively by default.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Integer semantics of a circuit: bus values in, packed output or `None`
/// (don't care) out.
pub type RefFn<'a> = &'a (dyn Fn(&[u128]) -> Option<u128> + Sync);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("expected {expected} input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("value {value} does not fit input bus `{bus}`")]
    InputOutOfRange { bus: String, value: u128 },
    #[error("{bits} input bits exceed the exhaustive limit of {limit}")]
    TooManyInputs { bits: usize, limit: usize },
    #[error("{0} bits do not fit a 128-bit word")]
    TooWide(usize),
    #[error("at most 64 vectors per batch, got {0}")]
    BatchTooLarge(usize),
    #[error("signatures differ: {0}")]
    SignatureMismatch(String),
    #[error("trials must be at least 1")]
    NoTrials,
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

pub(crate) fn mask(bits: usize) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// Concatenates bus values LSB first.
pub fn pack(values: &[u128], widths: &[usize]) -> u128 {
    let mut out = 0u128;
    let mut shift = 0;
    for (&v, &w) in values.iter().zip(widths) {
        if shift < 128 {
            out |= (v & mask(w)) << shift;
        }
        shift += w;
    }
    out
}

/// Splits a packed value into bus values.
pub fn unpack(mut packed: u128, widths: &[usize]) -> Vec<u128> {
    widths
        .iter()
        .map(|&w| {
            let v = packed & mask(w);
            packed = if w >= 128 { 0 } else { packed >> w };
            v
        })
        .collect()
}

fn input_widths(net: &FlatNetlist) -> Vec<usize> {
    net.inputs.iter().map(|b| b.width).collect()
}

fn output_widths(net: &FlatNetlist) -> Vec<usize> {
    net.outputs.iter().map(|b| b.bits.len()).collect()
}

fn check_inputs(net: &FlatNetlist, inputs: &[u128]) -> Result<()> {
    if inputs.len() != net.inputs.len() {
        return Err(SimError::InputCount {
            expected: net.inputs.len(),
            got: inputs.len(),
        });
    }
    for (bus, &v) in net.inputs.iter().zip(inputs) {
        if v & !mask(bus.width) != 0 {
            return Err(SimError::InputOutOfRange {
                bus: bus.name.clone(),
                value: v,
            });
        }
    }
    Ok(())
}

/// Evaluates one input assignment gate by gate; one value per output bus.
pub fn evaluate(net: &FlatNetlist, inputs: &[u128]) -> Result<Vec<u128>> {
    check_inputs(net, inputs)?;
    let mut bits = Vec::with_capacity(net.input_bits());
    for (bus, &v) in net.inputs.iter().zip(inputs) {
        bits.extend((0..bus.width).map(|i| (v >> i) & 1 == 1));
    }
    let out = net.eval_bits(&bits)?;
    let mut values = Vec::with_capacity(net.outputs.len());
    let mut it = out.into_iter();
    for bus in &net.outputs {
        let mut v = 0u128;
        for i in 0..bus.bits.len() {
            if it.next().unwrap_or(false) {
                v |= 1 << i;
            }
        }
        values.push(v);
    }
    Ok(values)
}

/// Evaluates up to 64 input assignments at once, bit-sliced.
pub fn evaluate_batch(net: &FlatNetlist, vectors: &[Vec<u128>]) -> Result<Vec<Vec<u128>>> {
    if vectors.len() > 64 {
        return Err(SimError::BatchTooLarge(vectors.len()));
    }
    for v in vectors {
        check_inputs(net, v)?;
    }
    let prog = Program::new(net)?;
    let widths = input_widths(net);
    let packed: Vec<u128> = vectors.iter().map(|v| pack(v, &widths)).collect();
    let words = prog.run(&program::slice_lanes(&packed, prog.input_bits()));
    let out_widths = output_widths(net);
    Ok((0..vectors.len())
        .map(|lane| unpack(program::lane_value(&words, lane), &out_widths))
        .collect())
}
