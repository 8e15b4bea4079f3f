use std::collections::{HashMap, HashSet};

use super::{
    check_identifier, Bus, Child, Circuit, Component, ComponentId, Gate, GateId, GateKind, NetlistError, Result, Wire,
    WireData, WireSource,
};

struct Frame {
    comp: ComponentId,
    inputs: HashSet<Wire>,
    counters: HashMap<GateKind, usize>,
    prefixes: HashSet<String>,
}

/// Incremental circuit constructor.
///
/// The builder keeps a stack of open components. Gates are added to the
/// innermost one, and [`Builder::instance`] opens a nested component for the
/// duration of a closure. Constant inputs are folded away as gates are added,
/// so no gate in a finished circuit has a constant input.
pub struct Builder {
    circuit: Circuit,
    stack: Vec<Frame>,
    names: HashSet<String>,
}

impl Builder {
    pub fn new(type_name: &str) -> Result<Builder> {
        check_identifier(type_name)?;
        let constant = |v: bool| WireData {
            name: format!("const{}", v as u8),
            scope: None,
            source: WireSource::Const(v),
        };
        let top = Component {
            type_name: type_name.to_string(),
            prefix: type_name.to_string(),
            full_prefix: type_name.to_string(),
            parent: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            children: Vec::new(),
        };
        Ok(Builder {
            circuit: Circuit {
                wires: vec![constant(false), constant(true)],
                gates: Vec::new(),
                components: vec![top],
            },
            stack: vec![Frame {
                comp: ComponentId(0),
                inputs: HashSet::new(),
                counters: HashMap::new(),
                prefixes: HashSet::new(),
            }],
            names: HashSet::new(),
        })
    }

    /// Declares a primary input bus with wires `name_0 .. name_{width-1}`.
    pub fn input_bus(&mut self, name: &str, width: usize) -> Result<Bus> {
        check_identifier(name)?;
        if width == 0 {
            return Err(NetlistError::ZeroWidth(name.to_string()));
        }
        if self.stack.len() != 1 {
            return Err(NetlistError::NestedInput);
        }
        let top = &self.circuit.components[0];
        if top.inputs.iter().any(|b| b.name() == name) {
            return Err(NetlistError::DuplicateBus(name.to_string()));
        }
        let bus_index = top.inputs.len();
        let wires = (0..width)
            .map(|bit| {
                self.new_wire(
                    format!("{name}_{bit}"),
                    Some(ComponentId(0)),
                    WireSource::Input { bus: bus_index, bit },
                )
            })
            .collect();
        let bus = Bus::new(name, wires)?;
        self.circuit.components[0].inputs.push(bus.clone());
        Ok(bus)
    }

    pub fn constant(&self, value: bool) -> Wire {
        Wire::constant(value)
    }

    pub fn const_value(&self, w: Wire) -> Option<bool> {
        self.circuit.const_value(w)
    }

    pub fn is_const0(&self, w: Wire) -> bool {
        self.const_value(w) == Some(false)
    }

    pub fn wire_name(&self, w: Wire) -> &str {
        self.circuit.wire_name(w)
    }

    pub fn gate_count(&self) -> usize {
        self.circuit.gates.len()
    }

    fn frame(&self) -> &Frame {
        self.stack.last().expect("top frame is never popped")
    }

    fn current(&self) -> ComponentId {
        self.frame().comp
    }

    fn visible(&self, w: Wire) -> bool {
        let data = &self.circuit.wires[w.index()];
        matches!(data.source, WireSource::Const(_))
            || data.scope == Some(self.current())
            || self.frame().inputs.contains(&w)
    }

    fn check_visible(&self, w: Wire) -> Result<()> {
        if self.visible(w) {
            Ok(())
        } else {
            Err(NetlistError::NotVisible(
                self.circuit.wire_name(w).to_string(),
                self.circuit.component(self.current()).full_prefix.clone(),
            ))
        }
    }

    fn unique_name(&mut self, base: String) -> String {
        if self.names.insert(base.clone()) {
            return base;
        }
        let mut k = 1;
        loop {
            let candidate = format!("{base}_{k}");
            if self.names.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }

    fn new_wire(&mut self, base: String, scope: Option<ComponentId>, source: WireSource) -> Wire {
        let name = self.unique_name(base);
        let id = Wire(self.circuit.wires.len() as u32);
        self.circuit.wires.push(WireData { name, scope, source });
        id
    }

    /// Adds a gate, folding constant and repeated inputs where the result is
    /// an existing wire, a constant, or a single inverter.
    pub fn gate(&mut self, kind: GateKind, a: Wire, b: Option<Wire>) -> Result<Wire> {
        if (kind.arity() == 2) != b.is_some() {
            return Err(NetlistError::Arity {
                kind,
                expected: kind.arity(),
            });
        }
        self.check_visible(a)?;
        if let Some(b) = b {
            self.check_visible(b)?;
        }
        if let Some(folded) = self.fold(kind, a, b)? {
            return Ok(folded);
        }
        Ok(self.push_gate(kind, a, b))
    }

    fn fold(&mut self, kind: GateKind, a: Wire, b: Option<Wire>) -> Result<Option<Wire>> {
        use GateKind::*;
        let ca = self.const_value(a);
        let Some(b) = b else {
            return Ok(match (kind, ca) {
                (Buf, _) => Some(a),
                (_, Some(v)) => Some(Wire::constant(!v)),
                _ => None,
            });
        };
        let cb = self.const_value(b);
        if let (Some(x), Some(y)) = (ca, cb) {
            return Ok(Some(Wire::constant(kind.eval(x, y))));
        }
        let (x, c) = match (ca, cb) {
            (Some(c), None) => (b, Some(c)),
            (None, Some(c)) => (a, Some(c)),
            _ => (a, None),
        };
        if let Some(c) = c {
            return Ok(Some(match (kind, c) {
                (And, false) | (Nor, true) => Wire::CONST0,
                (Or, true) | (Nand, false) => Wire::CONST1,
                (And, true) | (Or, false) | (Xor, false) | (Xnor, true) => x,
                (Xor, true) | (Nand, true) | (Nor, false) | (Xnor, false) => self.push_gate(Not, x, None),
                (Buf | Not, _) => unreachable!("unary kinds handled above"),
            }));
        }
        if self.circuit.resolve(a) == self.circuit.resolve(b) {
            return Ok(Some(match kind {
                Xor => Wire::CONST0,
                Xnor => Wire::CONST1,
                And | Or => a,
                Nand | Nor => self.push_gate(Not, a, None),
                Buf | Not => unreachable!(),
            }));
        }
        Ok(None)
    }

    fn push_gate(&mut self, kind: GateKind, a: Wire, b: Option<Wire>) -> Wire {
        let scope = self.current();
        let frame = self.stack.last_mut().unwrap();
        let n = frame.counters.entry(kind).or_insert(0);
        let local = format!("{}{}", kind.mnemonic(), n);
        *n += 1;
        let base = format!("{}_{}", self.circuit.component(scope).full_prefix, local);
        let id = GateId(self.circuit.gates.len() as u32);
        let output = self.new_wire(base, Some(scope), WireSource::Gate(id));
        self.circuit.gates.push(Gate {
            kind,
            a,
            b,
            output,
            scope,
        });
        self.circuit.components[scope.index()].children.push(Child::Gate(id));
        output
    }

    pub fn not(&mut self, a: Wire) -> Result<Wire> {
        self.gate(GateKind::Not, a, None)
    }

    pub fn buf(&mut self, a: Wire) -> Result<Wire> {
        self.gate(GateKind::Buf, a, None)
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Result<Wire> {
        self.gate(GateKind::And, a, Some(b))
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Result<Wire> {
        self.gate(GateKind::Or, a, Some(b))
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Result<Wire> {
        self.gate(GateKind::Xor, a, Some(b))
    }

    pub fn nand(&mut self, a: Wire, b: Wire) -> Result<Wire> {
        self.gate(GateKind::Nand, a, Some(b))
    }

    pub fn nor(&mut self, a: Wire, b: Wire) -> Result<Wire> {
        self.gate(GateKind::Nor, a, Some(b))
    }

    pub fn xnor(&mut self, a: Wire, b: Wire) -> Result<Wire> {
        self.gate(GateKind::Xnor, a, Some(b))
    }

    /// Opens a child component of type `type_name`, runs `body` inside it and
    /// returns the child's output port buses as seen from the parent.
    ///
    /// `inputs` carry the child's formal port names; their wires must be
    /// driven and visible in the current component. Wire names inside the
    /// child are prefixed with `prefix` (made unique among siblings).
    pub fn instance<F, E>(&mut self, type_name: &str, prefix: &str, inputs: Vec<Bus>, body: F) -> Result<Vec<Bus>, E>
    where
        F: FnOnce(&mut Builder, &[Bus]) -> Result<Vec<Bus>, E>,
        E: From<NetlistError>,
    {
        check_identifier(type_name)?;
        check_identifier(prefix)?;
        let mut seen = HashSet::new();
        for bus in &inputs {
            if !seen.insert(bus.name()) {
                return Err(NetlistError::DuplicateBus(bus.name().to_string()).into());
            }
            for &w in bus.wires() {
                self.check_visible(w)?;
                if self.circuit.wires[self.circuit.resolve(w).index()].source == WireSource::Floating {
                    return Err(NetlistError::Undriven(self.wire_name(w).to_string()).into());
                }
            }
        }

        let parent = self.current();
        let prefix = {
            let frame = self.stack.last_mut().unwrap();
            let mut candidate = prefix.to_string();
            let mut k = 1;
            while !frame.prefixes.insert(candidate.clone()) {
                candidate = format!("{prefix}_{k}");
                k += 1;
            }
            candidate
        };
        let full_prefix = format!("{}_{}", self.circuit.component(parent).full_prefix, prefix);
        let id = ComponentId(self.circuit.components.len() as u32);
        self.circuit.components.push(Component {
            type_name: type_name.to_string(),
            prefix,
            full_prefix: full_prefix.clone(),
            parent: Some(parent),
            inputs: inputs.clone(),
            outputs: Vec::new(),
            children: Vec::new(),
        });
        self.circuit.components[parent.index()]
            .children
            .push(Child::Component(id));

        self.stack.push(Frame {
            comp: id,
            inputs: inputs.iter().flat_map(|b| b.wires().iter().copied()).collect(),
            counters: HashMap::new(),
            prefixes: HashSet::new(),
        });
        let result = body(self, &inputs).and_then(|outs| {
            for bus in &outs {
                for &w in bus.wires() {
                    self.check_visible(w)?;
                }
            }
            Ok::<_, E>(outs)
        });
        self.stack.pop();
        let outs = result?;

        let mut ports = Vec::with_capacity(outs.len());
        for bus in &outs {
            let wires = bus
                .wires()
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    self.new_wire(
                        format!("{full_prefix}_{}_{i}", bus.name()),
                        Some(parent),
                        WireSource::Alias(w),
                    )
                })
                .collect();
            ports.push(Bus::new(bus.name(), wires)?);
        }
        self.circuit.components[id.index()].outputs = ports.clone();
        Ok(ports)
    }

    /// Creates an undriven wire in the current component.
    pub fn floating_wire(&mut self, local: &str) -> Wire {
        let scope = self.current();
        let base = format!("{}_{}", self.circuit.component(scope).full_prefix, local);
        self.new_wire(base, Some(scope), WireSource::Floating)
    }

    /// Reconnects input `index` of the gate driving `gate_output`.
    ///
    /// No folding or visibility checks are applied, so this can produce
    /// circuits that fail [`Circuit::validate`].
    pub fn rewire(&mut self, gate_output: Wire, index: usize, new_input: Wire) -> Result<()> {
        let WireSource::Gate(id) = self.circuit.wires[gate_output.index()].source else {
            return Err(NetlistError::NotAGate(self.wire_name(gate_output).to_string()));
        };
        let gate = &mut self.circuit.gates[id.index()];
        match (index, gate.b.is_some()) {
            (0, _) => gate.a = new_input,
            (1, true) => gate.b = Some(new_input),
            _ => {
                return Err(NetlistError::NoSuchInput(
                    self.circuit.wires[gate_output.index()].name.clone(),
                    index,
                ))
            }
        }
        Ok(())
    }

    /// Closes the top component with the given output buses.
    pub fn finish(mut self, outputs: Vec<Bus>) -> Result<Circuit> {
        assert_eq!(self.stack.len(), 1, "finish called inside an open instance");
        let mut seen = HashSet::new();
        let mut ports = Vec::with_capacity(outputs.len());
        for bus in &outputs {
            if !seen.insert(bus.name().to_string()) || self.circuit.top().inputs.iter().any(|b| b.name() == bus.name())
            {
                return Err(NetlistError::DuplicateBus(bus.name().to_string()));
            }
            for &w in bus.wires() {
                self.check_visible(w)?;
            }
            let wires = bus
                .wires()
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    self.new_wire(
                        format!("{}_{i}", bus.name()),
                        Some(ComponentId(0)),
                        WireSource::Alias(w),
                    )
                })
                .collect();
            ports.push(Bus::new(bus.name(), wires)?);
        }
        self.circuit.components[0].outputs = ports;
        Ok(self.circuit)
    }
}
