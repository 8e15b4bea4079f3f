//! Structural circuit model: wires, buses, gates and hierarchical components.
//!
//! Circuits are built through a [`Builder`], which folds constants eagerly and
//! keeps every wire name unique. A finished [`Circuit`] is immutable; it can be
//! [validated](Circuit::validate), [flattened](Circuit::flatten) into a
//! [`FlatNetlist`], or handed to the exporters as-is for hierarchical output.

mod builder;
mod flat;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builder::Builder;
pub use flat::{FlatBus, FlatGate, FlatNetlist, OutputBus, Signal, Signature};
pub use validate::Diagnostic;

/// Errors raised while building or flattening a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("bus `{0}` must be at least one bit wide")]
    ZeroWidth(String),
    #[error("{kind} expects {expected} input(s)")]
    Arity { kind: GateKind, expected: usize },
    #[error("wire `{0}` is not visible in component `{1}`")]
    NotVisible(String, String),
    #[error("wire `{0}` has no driver")]
    Undriven(String),
    #[error("combinational cycle through `{0}`")]
    Cycle(String),
    #[error("duplicate bus name `{0}`")]
    DuplicateBus(String),
    #[error("primary inputs can only be declared at the top level")]
    NestedInput,
    #[error("wire `{0}` is not driven by a gate")]
    NotAGate(String),
    #[error("gate `{0}` has no input {1}")]
    NoSuchInput(String, usize),
    #[error("netlist is not topologically ordered at gate {0}")]
    Unordered(usize),
    #[error("input index {0} out of range")]
    InputOutOfRange(usize),
}

pub type Result<T, E = NetlistError> = std::result::Result<T, E>;

/// Two-input (or one-input) logic primitive.
///
/// The declaration order matches the CGP function codes 0..=7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Buf,
    Not,
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::Buf,
        GateKind::Not,
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xnor,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Buf | GateKind::Not => 1,
            _ => 2,
        }
    }

    /// Lower-case mnemonic, also used for auto-generated wire names.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::Buf => "buf",
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Xor => "xor",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xnor => "xnor",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<GateKind> {
        GateKind::ALL.get(code as usize).copied()
    }

    /// Bitwise evaluation; `b` is ignored for unary kinds.
    #[inline]
    pub fn eval_word(self, a: u64, b: u64) -> u64 {
        match self {
            GateKind::Buf => a,
            GateKind::Not => !a,
            GateKind::And => a & b,
            GateKind::Or => a | b,
            GateKind::Xor => a ^ b,
            GateKind::Nand => !(a & b),
            GateKind::Nor => !(a | b),
            GateKind::Xnor => !(a ^ b),
        }
    }

    #[inline]
    pub fn eval(self, a: bool, b: bool) -> bool {
        self.eval_word(a as u64, b as u64) & 1 == 1
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mnemonic().to_uppercase())
    }
}

/// Handle to a wire inside a circuit arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wire(pub(crate) u32);

impl Wire {
    pub const CONST0: Wire = Wire(0);
    pub const CONST1: Wire = Wire(1);

    pub fn constant(value: bool) -> Wire {
        if value {
            Wire::CONST1
        } else {
            Wire::CONST0
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateId(pub(crate) u32);

impl GateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId(pub(crate) u32);

impl ComponentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// What drives a wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireSource {
    /// Bit `bit` of primary input bus `bus`.
    Input {
        bus: usize,
        bit: usize,
    },
    Gate(GateId),
    Const(bool),
    /// Component output port forwarding another wire.
    Alias(Wire),
    /// Deliberately unconnected.
    Floating,
}

#[derive(Debug, Clone)]
pub struct WireData {
    pub name: String,
    /// Component whose namespace the wire lives in; `None` for constants.
    pub scope: Option<ComponentId>,
    pub source: WireSource,
}

#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    pub a: Wire,
    pub b: Option<Wire>,
    pub output: Wire,
    pub scope: ComponentId,
}

impl Gate {
    pub fn inputs(&self) -> impl Iterator<Item = Wire> + '_ {
        std::iter::once(self.a).chain(self.b)
    }
}

/// Ordered LSB-first group of wires.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bus {
    name: String,
    wires: Vec<Wire>,
}

impl Bus {
    pub fn new(name: impl Into<String>, wires: Vec<Wire>) -> Result<Bus> {
        let name = name.into();
        check_identifier(&name)?;
        if wires.is_empty() {
            return Err(NetlistError::ZeroWidth(name));
        }
        Ok(Bus { name, wires })
    }

    pub fn single(name: impl Into<String>, wire: Wire) -> Result<Bus> {
        Bus::new(name, vec![wire])
    }

    /// Same wires under another port name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Bus> {
        Bus::new(name, self.wires.clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.wires.len()
    }

    pub fn wire(&self, i: usize) -> Wire {
        self.wires[i]
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    /// Most significant wire.
    pub fn msb(&self) -> Wire {
        *self.wires.last().expect("buses are never empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Child {
    Gate(GateId),
    Component(ComponentId),
}

/// One instance in the component tree.
#[derive(Debug, Clone)]
pub struct Component {
    pub type_name: String,
    pub prefix: String,
    pub full_prefix: String,
    pub parent: Option<ComponentId>,
    pub inputs: Vec<Bus>,
    pub outputs: Vec<Bus>,
    pub children: Vec<Child>,
}

/// Immutable hierarchical circuit.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub(crate) wires: Vec<WireData>,
    pub(crate) gates: Vec<Gate>,
    pub(crate) components: Vec<Component>,
}

impl Circuit {
    pub fn top_id(&self) -> ComponentId {
        ComponentId(0)
    }

    pub fn top(&self) -> &Component {
        &self.components[0]
    }

    pub fn name(&self) -> &str {
        &self.top().type_name
    }

    pub fn inputs(&self) -> &[Bus] {
        &self.top().inputs
    }

    pub fn outputs(&self) -> &[Bus] {
        &self.top().outputs
    }

    pub fn component(&self, id: ComponentId) -> &Component {
        &self.components[id.index()]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn wire(&self, w: Wire) -> &WireData {
        &self.wires[w.index()]
    }

    pub fn wire_name(&self, w: Wire) -> &str {
        &self.wires[w.index()].name
    }

    pub fn wire_count(&self) -> usize {
        self.wires.len()
    }

    /// All wire handles, constants included.
    pub fn wire_ids(&self) -> impl Iterator<Item = Wire> {
        (0..self.wires.len() as u32).map(Wire)
    }

    /// Follows port aliases to the wire that actually carries the signal.
    pub fn resolve(&self, mut w: Wire) -> Wire {
        while let WireSource::Alias(next) = self.wires[w.index()].source {
            w = next;
        }
        w
    }

    pub fn const_value(&self, w: Wire) -> Option<bool> {
        match self.wires[self.resolve(w).index()].source {
            WireSource::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn signature(&self) -> Signature {
        Signature {
            inputs: self
                .inputs()
                .iter()
                .map(|b| (b.name().to_string(), b.width()))
                .collect(),
            outputs: self
                .outputs()
                .iter()
                .map(|b| (b.name().to_string(), b.width()))
                .collect(),
        }
    }

    /// Name of `w` relative to the namespace of component `scope`.
    pub fn relative_name(&self, w: Wire, scope: ComponentId) -> &str {
        let name = self.wire_name(w);
        let prefix = &self.component(scope).full_prefix;
        name.strip_prefix(prefix.as_str())
            .and_then(|rest| rest.strip_prefix('_'))
            .unwrap_or(name)
    }
}

pub(crate) fn check_identifier(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let valid = match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    };
    if valid {
        Ok(())
    } else {
        Err(NetlistError::InvalidIdentifier(name.to_string()))
    }
}
