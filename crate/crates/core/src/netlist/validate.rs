use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Child, Circuit, ComponentId, Wire, WireSource};

/// Structural problem found by [`Circuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// Gates that sit on, or downstream of, a combinational loop.
    Cycle {
        wires: Vec<String>,
    },
    Undriven {
        wire: String,
    },
    Arity {
        wire: String,
    },
    DuplicateName {
        name: String,
    },
    /// A gate references a wire outside its component's interface.
    NotVisible {
        wire: String,
        component: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Cycle { wires } => write!(f, "combinational cycle through {}", wires.join(", ")),
            Diagnostic::Undriven { wire } => write!(f, "wire `{wire}` is not driven"),
            Diagnostic::Arity { wire } => write!(f, "gate driving `{wire}` has the wrong number of inputs"),
            Diagnostic::DuplicateName { name } => write!(f, "wire name `{name}` is used more than once"),
            Diagnostic::NotVisible { wire, component } => {
                write!(f, "wire `{wire}` is referenced outside its scope in `{component}`")
            }
        }
    }
}

impl Circuit {
    /// Lists structural problems; an empty list means the circuit can be
    /// flattened and exported.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();

        for g in &self.gates {
            if (g.kind.arity() == 2) != g.b.is_some() {
                out.push(Diagnostic::Arity {
                    wire: self.wire_name(g.output).to_string(),
                });
            }
        }

        let mut reported = HashSet::new();
        let mut undriven = |w: Wire, out: &mut Vec<Diagnostic>| {
            let root = self.resolve(w);
            if self.wire(root).source == WireSource::Floating && reported.insert(root) {
                out.push(Diagnostic::Undriven {
                    wire: self.wire_name(root).to_string(),
                });
            }
        };
        for g in &self.gates {
            for w in g.inputs() {
                undriven(w, &mut out);
            }
        }
        for c in &self.components {
            for bus in &c.outputs {
                for &w in bus.wires() {
                    undriven(w, &mut out);
                }
            }
        }

        if let Err(stuck) = self.topo_order() {
            out.push(Diagnostic::Cycle {
                wires: stuck
                    .iter()
                    .map(|&g| self.wire_name(self.gate(g).output).to_string())
                    .collect(),
            });
        }

        let mut counts: HashMap<&str, usize> = HashMap::new();
        for w in self.wires.iter().filter(|w| w.scope.is_some()) {
            *counts.entry(w.name.as_str()).or_default() += 1;
        }
        let mut dups: Vec<_> = counts.into_iter().filter(|&(_, n)| n > 1).map(|(k, _)| k).collect();
        dups.sort_unstable();
        out.extend(
            dups.into_iter()
                .map(|name| Diagnostic::DuplicateName { name: name.to_string() }),
        );

        for (i, c) in self.components.iter().enumerate() {
            let id = ComponentId(i as u32);
            let ports: HashSet<Wire> = c.inputs.iter().flat_map(|b| b.wires().iter().copied()).collect();
            for child in &c.children {
                if let Child::Gate(g) = child {
                    for w in self.gate(*g).inputs() {
                        let data = self.wire(w);
                        let ok =
                            matches!(data.source, WireSource::Const(_)) || data.scope == Some(id) || ports.contains(&w);
                        if !ok {
                            out.push(Diagnostic::NotVisible {
                                wire: data.name.clone(),
                                component: c.full_prefix.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{Builder, Bus, NetlistError};

    #[test]
    fn self_loop_is_reported_as_cycle() {
        let mut b = Builder::new("loop").unwrap();
        let x = b.input_bus("x", 1).unwrap().wire(0);
        let y = b.input_bus("y", 1).unwrap().wire(0);
        let g = b.and(x, y).unwrap();
        b.rewire(g, 1, g).unwrap();
        let c = b.finish(vec![Bus::single("o", g).unwrap()]).unwrap();
        let diags = c.validate();
        assert_eq!(diags.len(), 1);
        assert!(matches!(&diags[0], Diagnostic::Cycle { wires } if wires == &["loop_and0"]));
        assert!(matches!(c.flatten(), Err(NetlistError::Cycle(_))));
    }

    #[test]
    fn undriven_output_is_reported() {
        let mut b = Builder::new("open").unwrap();
        let x = b.input_bus("x", 1).unwrap().wire(0);
        let loose = b.floating_wire("nc");
        let c = b.finish(vec![Bus::new("o", vec![x, loose]).unwrap()]).unwrap();
        assert_eq!(c.validate(), vec![Diagnostic::Undriven { wire: "open_nc".into() }]);
        assert!(matches!(c.flatten(), Err(NetlistError::Undriven(_))));
    }

    #[test]
    fn clean_circuit_has_no_diagnostics() {
        let mut b = Builder::new("ok").unwrap();
        let x = b.input_bus("x", 2).unwrap();
        let g = b.xor(x.wire(0), x.wire(1)).unwrap();
        let c = b.finish(vec![Bus::single("o", g).unwrap()]).unwrap();
        assert!(c.validate().is_empty());
    }
}
