use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::netlist::{FlatNetlist, GateKind, Signal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetlistStats {
    pub gate_counts: BTreeMap<GateKind, usize>,
    pub total_gates: usize,
    /// Gates on the longest path from any input or constant.
    pub depth: usize,
    /// Input bits, gate outputs and constant nets.
    pub wire_count: usize,
}

impl NetlistStats {
    /// One `key=value` pair per line; gate kinds use their upper-case names.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (kind, n) in &self.gate_counts {
            s.push_str(&format!("{kind}={n}\n"));
        }
        s.push_str(&format!(
            "total_gates={}\ndepth={}\nwire_count={}\n",
            self.total_gates, self.depth, self.wire_count
        ));
        s
    }
}

impl fmt::Display for NetlistStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_key_value())
    }
}

pub fn stats(net: &FlatNetlist) -> NetlistStats {
    let mut gate_counts = BTreeMap::new();
    let mut levels = Vec::with_capacity(net.gates.len());
    for g in &net.gates {
        *gate_counts.entry(g.kind).or_insert(0) += 1;
        let level = g
            .inputs()
            .map(|s| match s {
                Signal::Gate(i) => levels.get(i).copied().unwrap_or(0),
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        levels.push(level + 1);
    }
    NetlistStats {
        gate_counts,
        total_gates: net.gates.len(),
        depth: levels.iter().copied().max().unwrap_or(0),
        wire_count: net.input_bits() + net.gates.len() + net.constants_used().len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{AdderFamily, AdderSpec, CircuitSpec, Signedness};

    fn of(spec: CircuitSpec) -> NetlistStats {
        stats(&spec.build().unwrap().flatten().unwrap())
    }

    #[test]
    fn half_adder() {
        let s = of(CircuitSpec::HalfAdder);
        assert_eq!(s.gate_counts, BTreeMap::from([(GateKind::And, 1), (GateKind::Xor, 1)]));
        assert_eq!(s.depth, 1);
        assert_eq!(s.wire_count, 4);
        assert_eq!(s.to_key_value(), "AND=1\nXOR=1\ntotal_gates=2\ndepth=1\nwire_count=4\n");
    }

    #[test]
    fn full_adder() {
        let s = of(CircuitSpec::FullAdder);
        assert_eq!((s.total_gates, s.depth), (5, 3));
    }

    #[test]
    fn rca8() {
        let s = of(CircuitSpec::Adder(AdderSpec::new(
            AdderFamily::Rca,
            Signedness::Unsigned,
            8,
        )));
        assert_eq!(s.total_gates, 37);
        // carry chain: 1 AND, then AND + OR per full adder, final sum XOR
        assert_eq!(s.depth, 1 + 2 * 7);
    }
}
