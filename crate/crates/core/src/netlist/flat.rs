use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::{Circuit, GateId, GateKind, NetlistError, Result, Wire, WireSource};

/// Reference to a net in a [`FlatNetlist`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Const(bool),
    /// Global primary-input bit: bus offsets are concatenated in bus order.
    Input(usize),
    /// Output of the gate at this position in [`FlatNetlist::gates`].
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatBus {
    pub name: String,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputBus {
    pub name: String,
    pub bits: Vec<Signal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatGate {
    pub kind: GateKind,
    pub a: Signal,
    pub b: Option<Signal>,
    pub name: String,
}

impl FlatGate {
    pub fn inputs(&self) -> impl Iterator<Item = Signal> + '_ {
        std::iter::once(self.a).chain(self.b)
    }
}

/// Port names and widths of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub inputs: Vec<(String, usize)>,
    pub outputs: Vec<(String, usize)>,
}

impl Signature {
    pub fn input_bits(&self) -> usize {
        self.inputs.iter().map(|(_, w)| w).sum()
    }

    pub fn output_bits(&self) -> usize {
        self.outputs.iter().map(|(_, w)| w).sum()
    }
}

/// Gate-level netlist in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatNetlist {
    pub name: String,
    pub inputs: Vec<FlatBus>,
    pub outputs: Vec<OutputBus>,
    pub gates: Vec<FlatGate>,
}

impl FlatNetlist {
    pub fn input_bits(&self) -> usize {
        self.inputs.iter().map(|b| b.width).sum()
    }

    pub fn output_bits(&self) -> usize {
        self.outputs.iter().map(|b| b.bits.len()).sum()
    }

    pub fn signature(&self) -> Signature {
        Signature {
            inputs: self.inputs.iter().map(|b| (b.name.clone(), b.width)).collect(),
            outputs: self.outputs.iter().map(|b| (b.name.clone(), b.bits.len())).collect(),
        }
    }

    /// Bus index and bit position of a global input index.
    pub fn input_position(&self, mut index: usize) -> Option<(usize, usize)> {
        for (i, bus) in self.inputs.iter().enumerate() {
            if index < bus.width {
                return Some((i, index));
            }
            index -= bus.width;
        }
        None
    }

    pub fn input_name(&self, index: usize) -> Option<String> {
        self.input_position(index)
            .map(|(bus, bit)| format!("{}_{}", self.inputs[bus].name, bit))
    }

    /// Output signals concatenated in bus order, LSB first.
    pub fn output_signals(&self) -> impl Iterator<Item = Signal> + '_ {
        self.outputs.iter().flat_map(|b| b.bits.iter().copied())
    }

    /// Constant values referenced by gates or outputs.
    pub fn constants_used(&self) -> BTreeSet<bool> {
        self.gates
            .iter()
            .flat_map(|g| g.inputs())
            .chain(self.output_signals())
            .filter_map(|s| match s {
                Signal::Const(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    /// Checks feed-forward ordering, arity and index ranges.
    pub fn check(&self) -> Result<()> {
        let n_in = self.input_bits();
        let in_range = |s: Signal, limit: usize| match s {
            Signal::Const(_) => Ok(()),
            Signal::Input(i) if i < n_in => Ok(()),
            Signal::Input(i) => Err(NetlistError::InputOutOfRange(i)),
            Signal::Gate(j) if j < limit => Ok(()),
            Signal::Gate(_) => Err(NetlistError::Unordered(limit)),
        };
        for (i, g) in self.gates.iter().enumerate() {
            if (g.kind.arity() == 2) != g.b.is_some() {
                return Err(NetlistError::Arity {
                    kind: g.kind,
                    expected: g.kind.arity(),
                });
            }
            for s in g.inputs() {
                in_range(s, i)?;
            }
        }
        for s in self.output_signals() {
            in_range(s, self.gates.len())?;
        }
        Ok(())
    }

    /// Marks gates reachable backwards from the outputs.
    pub fn live_gates(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        let mut stack: Vec<usize> = self
            .output_signals()
            .filter_map(|s| match s {
                Signal::Gate(j) => Some(j),
                _ => None,
            })
            .collect();
        while let Some(j) = stack.pop() {
            if std::mem::replace(&mut live[j], true) {
                continue;
            }
            for s in self.gates[j].inputs() {
                if let Signal::Gate(k) = s {
                    if !live[k] {
                        stack.push(k);
                    }
                }
            }
        }
        live
    }

    /// Copy without gates that cannot reach an output.
    pub fn strip_dead(&self) -> FlatNetlist {
        let live = self.live_gates();
        let mut remap = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        let map = |s: Signal, remap: &[usize]| match s {
            Signal::Gate(j) => Signal::Gate(remap[j]),
            other => other,
        };
        for (j, g) in self.gates.iter().enumerate() {
            if live[j] {
                remap[j] = gates.len();
                gates.push(FlatGate {
                    kind: g.kind,
                    a: map(g.a, &remap),
                    b: g.b.map(|b| map(b, &remap)),
                    name: g.name.clone(),
                });
            }
        }
        FlatNetlist {
            name: self.name.clone(),
            inputs: self.inputs.clone(),
            outputs: self
                .outputs
                .iter()
                .map(|o| OutputBus {
                    name: o.name.clone(),
                    bits: o.bits.iter().map(|&s| map(s, &remap)).collect(),
                })
                .collect(),
            gates,
        }
    }

    /// Straightforward one-vector evaluation over individual bits, returning
    /// output bits in bus order.
    pub fn eval_bits(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        if inputs.len() != self.input_bits() {
            return Err(NetlistError::InputOutOfRange(inputs.len()));
        }
        let mut values = Vec::with_capacity(self.gates.len());
        let get = |s: Signal, values: &[bool]| match s {
            Signal::Const(v) => v,
            Signal::Input(i) => inputs[i],
            Signal::Gate(j) => values[j],
        };
        for g in &self.gates {
            let a = get(g.a, &values);
            let b = g.b.map_or(false, |b| get(b, &values));
            values.push(g.kind.eval(a, b));
        }
        Ok(self.output_signals().map(|s| get(s, &values)).collect())
    }
}

impl Circuit {
    /// Kahn ordering of all gates, ties broken by creation order. On a cycle
    /// returns the gates that could not be scheduled.
    pub(crate) fn topo_order(&self) -> std::result::Result<Vec<GateId>, Vec<GateId>> {
        let n = self.gates.len();
        let mut indegree = vec![0usize; n];
        let mut fanout: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, g) in self.gates.iter().enumerate() {
            for w in g.inputs() {
                if let WireSource::Gate(src) = self.wire(self.resolve(w)).source {
                    indegree[i] += 1;
                    fanout[src.index()].push(i as u32);
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<u32>> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| Reverse(i as u32))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(i)) = ready.pop() {
            order.push(GateId(i));
            for &j in &fanout[i as usize] {
                indegree[j as usize] -= 1;
                if indegree[j as usize] == 0 {
                    ready.push(Reverse(j));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err((0..n as u32)
                .filter(|&i| indegree[i as usize] > 0)
                .map(GateId)
                .collect())
        }
    }

    fn input_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.inputs()
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.width();
                o
            })
            .collect()
    }

    /// Recursively inlines every component down to gates.
    ///
    /// Port aliases are resolved, gates keep their unique hierarchical wire
    /// names, and the gate order is deterministic.
    pub fn flatten(&self) -> Result<FlatNetlist> {
        let order = self
            .topo_order()
            .map_err(|stuck| NetlistError::Cycle(self.wire_name(self.gate(stuck[0]).output).to_string()))?;
        let mut position = vec![0usize; self.gates.len()];
        for (pos, id) in order.iter().enumerate() {
            position[id.index()] = pos;
        }
        let offsets = self.input_offsets();
        let signal = |w: Wire| -> Result<Signal> {
            let root = self.resolve(w);
            match self.wire(root).source {
                WireSource::Input { bus, bit } => Ok(Signal::Input(offsets[bus] + bit)),
                WireSource::Gate(g) => Ok(Signal::Gate(position[g.index()])),
                WireSource::Const(v) => Ok(Signal::Const(v)),
                WireSource::Floating | WireSource::Alias(_) => {
                    Err(NetlistError::Undriven(self.wire_name(w).to_string()))
                }
            }
        };
        let mut gates = Vec::with_capacity(order.len());
        for id in &order {
            let g = self.gate(*id);
            gates.push(FlatGate {
                kind: g.kind,
                a: signal(g.a)?,
                b: g.b.map(signal).transpose()?,
                name: self.wire_name(g.output).to_string(),
            });
        }
        let outputs = self
            .outputs()
            .iter()
            .map(|bus| {
                Ok(OutputBus {
                    name: bus.name().to_string(),
                    bits: bus.wires().iter().map(|&w| signal(w)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(FlatNetlist {
            name: self.name().to_string(),
            inputs: self
                .inputs()
                .iter()
                .map(|b| FlatBus {
                    name: b.name().to_string(),
                    width: b.width(),
                })
                .collect(),
            outputs,
            gates,
        })
    }
}
