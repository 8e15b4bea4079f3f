//! Per-component view of a circuit shared by the hierarchical writers.

use std::collections::HashMap;

use crate::netlist::{Child, Circuit, ComponentId, GateKind, Wire, WireSource};

/// A signal as seen from inside one module.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Ref {
    Const(bool),
    Port {
        bus: String,
        bit: usize,
    },
    /// Gate output declared in this module, by local name.
    Net(String),
    /// Output port bit of a child instance.
    Child {
        prefix: String,
        bus: String,
        bit: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct GateView {
    pub kind: GateKind,
    pub out: String,
    pub a: Ref,
    pub b: Option<Ref>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct InstView {
    pub module: String,
    pub prefix: String,
    pub inputs: Vec<(String, Vec<Ref>)>,
    pub outputs: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Item {
    Gate(GateView),
    Inst(InstView),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct ModuleView {
    pub name: String,
    pub inputs: Vec<(String, usize)>,
    pub outputs: Vec<(String, Vec<Ref>)>,
    pub items: Vec<Item>,
}

impl ModuleView {
    pub fn gates(&self) -> impl Iterator<Item = &GateView> {
        self.items.iter().filter_map(|i| match i {
            Item::Gate(g) => Some(g),
            Item::Inst(_) => None,
        })
    }

    pub fn instances(&self) -> impl Iterator<Item = &InstView> {
        self.items.iter().filter_map(|i| match i {
            Item::Inst(c) => Some(c),
            Item::Gate(_) => None,
        })
    }
}

struct Collector<'a> {
    circuit: &'a Circuit,
    /// Distinct bodies seen per component type, with their module names.
    variants: HashMap<String, Vec<ModuleView>>,
    names: HashMap<ComponentId, String>,
    order: Vec<ModuleView>,
}

impl Collector<'_> {
    fn visit(&mut self, id: ComponentId) -> String {
        if let Some(name) = self.names.get(&id) {
            return name.clone();
        }
        let c = self.circuit;
        let comp = c.component(id);
        let mut ports: HashMap<Wire, (String, usize)> = HashMap::new();
        for bus in &comp.inputs {
            for (bit, &w) in bus.wires().iter().enumerate() {
                ports.entry(w).or_insert_with(|| (bus.name().to_string(), bit));
            }
        }
        let mut child_ports: HashMap<Wire, (String, String, usize)> = HashMap::new();
        let mut items = Vec::new();
        for child in &comp.children {
            match *child {
                Child::Gate(g) => {
                    let gate = c.gate(g);
                    items.push(Item::Gate(GateView {
                        kind: gate.kind,
                        out: c.relative_name(gate.output, id).to_string(),
                        a: self.reference(id, &ports, &child_ports, gate.a),
                        b: gate.b.map(|b| self.reference(id, &ports, &child_ports, b)),
                    }));
                }
                Child::Component(sub) => {
                    let module = self.visit(sub);
                    let sc = c.component(sub);
                    let inputs = sc
                        .inputs
                        .iter()
                        .map(|bus| {
                            let refs = bus
                                .wires()
                                .iter()
                                .map(|&w| self.reference(id, &ports, &child_ports, w))
                                .collect();
                            (bus.name().to_string(), refs)
                        })
                        .collect();
                    for bus in &sc.outputs {
                        for (bit, &w) in bus.wires().iter().enumerate() {
                            child_ports.insert(w, (sc.prefix.clone(), bus.name().to_string(), bit));
                        }
                    }
                    items.push(Item::Inst(InstView {
                        module,
                        prefix: sc.prefix.clone(),
                        inputs,
                        outputs: sc.outputs.iter().map(|b| (b.name().to_string(), b.width())).collect(),
                    }));
                }
            }
        }
        let outputs = comp
            .outputs
            .iter()
            .map(|bus| {
                let refs = bus
                    .wires()
                    .iter()
                    .map(|&port| {
                        let WireSource::Alias(inner) = c.wire(port).source else {
                            unreachable!("output ports alias their driver")
                        };
                        self.reference(id, &ports, &child_ports, inner)
                    })
                    .collect();
                (bus.name().to_string(), refs)
            })
            .collect();
        let mut view = ModuleView {
            name: String::new(),
            inputs: comp.inputs.iter().map(|b| (b.name().to_string(), b.width())).collect(),
            outputs,
            items,
        };
        let seen = self.variants.entry(comp.type_name.clone()).or_default();
        let name = match seen
            .iter()
            .find(|v| v.inputs == view.inputs && v.outputs == view.outputs && v.items == view.items)
        {
            Some(v) => v.name.clone(),
            None => {
                view.name = if seen.is_empty() {
                    comp.type_name.clone()
                } else {
                    format!("{}_v{}", comp.type_name, seen.len())
                };
                seen.push(view.clone());
                self.order.push(view.clone());
                view.name
            }
        };
        self.names.insert(id, name.clone());
        name
    }

    fn reference(
        &self,
        scope: ComponentId,
        ports: &HashMap<Wire, (String, usize)>,
        child_ports: &HashMap<Wire, (String, String, usize)>,
        w: Wire,
    ) -> Ref {
        let c = self.circuit;
        if let WireSource::Const(v) = c.wire(w).source {
            return Ref::Const(v);
        }
        if let Some((bus, bit)) = ports.get(&w) {
            return Ref::Port {
                bus: bus.clone(),
                bit: *bit,
            };
        }
        if let Some((prefix, bus, bit)) = child_ports.get(&w) {
            return Ref::Child {
                prefix: prefix.clone(),
                bus: bus.clone(),
                bit: *bit,
            };
        }
        Ref::Net(c.relative_name(w, scope).to_string())
    }
}

/// Distinct modules in dependency order, the top module last.
///
/// Instances of one component type whose bodies differ (for example a
/// full adder with a constant input folded away) become separate modules
/// named `<type>_v<k>`.
pub(crate) fn module_views(circuit: &Circuit) -> Vec<ModuleView> {
    let mut col = Collector {
        circuit,
        variants: HashMap::new(),
        names: HashMap::new(),
        order: Vec::new(),
    };
    col.visit(circuit.top_id());
    col.order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{AdderFamily, AdderSpec, CircuitSpec, Signedness};

    #[test]
    fn rca_modules() {
        let c = CircuitSpec::Adder(AdderSpec::new(AdderFamily::Rca, Signedness::Unsigned, 8))
            .build()
            .unwrap();
        let views = module_views(&c);
        let names: Vec<&str> = views.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["ha", "fa", "u_rca8"]);
        let top = views.last().unwrap();
        let count = |m: &str| top.instances().filter(|i| i.module == m).count();
        assert_eq!((count("ha"), count("fa")), (1, 7));
        assert_eq!(
            top.outputs[0].1[8],
            Ref::Child {
                prefix: "fa7".into(),
                bus: "cout".into(),
                bit: 0
            }
        );
    }
}
