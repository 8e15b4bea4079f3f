use crate::netlist::{FlatNetlist, GateKind, Signal};

use super::{Result, SimError};

/// Lane patterns of the six lowest input bits within a 64-vector batch.
const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Debug, Clone, Copy)]
struct Op {
    kind: GateKind,
    a: u32,
    b: u32,
}

/// A flat netlist compiled for word-parallel evaluation.
///
/// Slot layout: constant 0, constant 1, input bits, gate outputs.
#[derive(Debug, Clone)]
pub struct Program {
    input_bits: usize,
    ops: Vec<Op>,
    outputs: Vec<u32>,
}

impl Program {
    pub fn new(net: &FlatNetlist) -> Result<Program> {
        net.check()?;
        let input_bits = net.input_bits();
        let output_bits = net.output_bits();
        if input_bits > 128 {
            return Err(SimError::TooWide(input_bits));
        }
        if output_bits > 128 {
            return Err(SimError::TooWide(output_bits));
        }
        let base = 2 + input_bits;
        let slot = |s: Signal| -> u32 {
            (match s {
                Signal::Const(v) => v as usize,
                Signal::Input(i) => 2 + i,
                Signal::Gate(g) => base + g,
            }) as u32
        };
        let ops = net
            .gates
            .iter()
            .map(|g| {
                let a = slot(g.a);
                Op {
                    kind: g.kind,
                    a,
                    b: g.b.map(slot).unwrap_or(a),
                }
            })
            .collect();
        let outputs = net.output_signals().map(slot).collect();
        Ok(Program {
            input_bits,
            ops,
            outputs,
        })
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.outputs.len()
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    /// Runs the program on one word per input bit, returning one word per
    /// output bit.
    pub fn run(&self, inputs: &[u64]) -> Vec<u64> {
        let mut slots = Vec::new();
        let mut out = vec![0; self.outputs.len()];
        self.run_into(inputs, &mut slots, &mut out);
        out
    }

    /// As [`Program::run`], reusing caller buffers.
    pub fn run_into(&self, inputs: &[u64], slots: &mut Vec<u64>, out: &mut [u64]) {
        debug_assert_eq!(inputs.len(), self.input_bits);
        slots.clear();
        slots.reserve(2 + self.input_bits + self.ops.len());
        slots.push(0);
        slots.push(u64::MAX);
        slots.extend_from_slice(inputs);
        for op in &self.ops {
            let v = op.kind.eval_word(slots[op.a as usize], slots[op.b as usize]);
            slots.push(v);
        }
        for (o, &s) in out.iter_mut().zip(&self.outputs) {
            *o = slots[s as usize];
        }
    }
}

/// Number of batches and lanes per batch covering `bits` input bits.
pub(crate) fn batch_shape(bits: usize) -> (u64, usize) {
    if bits >= 6 {
        (1u64 << (bits - 6), 64)
    } else {
        (1, 1 << bits)
    }
}

/// Input words of exhaustive batch `index`: lane `t` carries the packed
/// input vector `index * 64 + t`.
pub(crate) fn exhaustive_inputs(bits: usize, index: u64, words: &mut Vec<u64>) {
    words.clear();
    for i in 0..bits {
        words.push(if i < 6 {
            LANE_PATTERNS[i]
        } else if (index >> (i - 6)) & 1 == 1 {
            u64::MAX
        } else {
            0
        });
    }
}

/// Transposes packed vectors (one per lane) into one word per bit.
pub(crate) fn slice_lanes(packed: &[u128], bits: usize) -> Vec<u64> {
    let mut words = vec![0u64; bits];
    for (lane, &v) in packed.iter().enumerate() {
        for (i, w) in words.iter_mut().enumerate() {
            *w |= (((v >> i) & 1) as u64) << lane;
        }
    }
    words
}

/// Packed value carried by `lane` across the given bit words.
pub(crate) fn lane_value(words: &[u64], lane: usize) -> u128 {
    words
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &w)| acc | ((((w >> lane) & 1) as u128) << i))
}
