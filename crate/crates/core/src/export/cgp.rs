//! Integer netlist (CGP chromosome) text format.
//!
//! `{n_in,n_out,1,n_nodes,2,1,8}` followed by one `([idx]a,b,fn)` per node
//! and the output list `(o_1,...,o_k)`. Indices below `n_in` are primary
//! input bits; node `k` has index `n_in + k`.

use std::fmt::Write;

use thiserror::Error;

use crate::netlist::{FlatBus, FlatGate, FlatNetlist, GateKind, OutputBus, Signal, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CgpError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("malformed chromosome at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("node {node}: index {index} is not an input or an earlier node")]
    IndexOutOfRange { node: usize, index: usize },
    #[error("output index {0} out of range")]
    OutputOutOfRange(usize),
    #[error("node {node}: unknown function code {code}")]
    UnknownFunction { node: usize, code: u64 },
    #[error("expected {expected} output indices, found {found}")]
    OutputCount { expected: usize, found: usize },
    #[error("signature expects {expected} {what} bits, chromosome has {found}")]
    SignatureMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("constants need at least one primary input")]
    NoInputs,
    #[error("netlist is not topologically ordered: {0}")]
    Unordered(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CgpNode {
    pub a: usize,
    pub b: usize,
    pub function: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CgpChromosome {
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub nodes: Vec<CgpNode>,
    pub outputs: Vec<usize>,
}

impl CgpChromosome {
    /// Encodes a flat netlist. Constant 0 and 1 become the leading nodes
    /// `XOR(0,0)` and `XNOR(0,0)`, each only when referenced.
    pub fn from_netlist(net: &FlatNetlist) -> Result<CgpChromosome, CgpError> {
        net.check().map_err(|e| CgpError::Unordered(e.to_string()))?;
        let n_in = net.input_bits();
        let consts = net.constants_used();
        if !consts.is_empty() && n_in == 0 {
            return Err(CgpError::NoInputs);
        }
        let mut nodes = Vec::with_capacity(consts.len() + net.gates.len());
        let mut const_index = [0usize; 2];
        for &v in &consts {
            const_index[v as usize] = n_in + nodes.len();
            let kind = if v { GateKind::Xnor } else { GateKind::Xor };
            nodes.push(CgpNode {
                a: 0,
                b: 0,
                function: kind.code(),
            });
        }
        let base = n_in + nodes.len();
        let index = |s: Signal| match s {
            Signal::Const(v) => const_index[v as usize],
            Signal::Input(i) => i,
            Signal::Gate(g) => base + g,
        };
        for g in &net.gates {
            let a = index(g.a);
            nodes.push(CgpNode {
                a,
                b: g.b.map(index).unwrap_or(a),
                function: g.kind.code(),
            });
        }
        let outputs: Vec<usize> = net.output_signals().map(index).collect();
        Ok(CgpChromosome {
            n_inputs: n_in,
            n_outputs: outputs.len(),
            nodes,
            outputs,
        })
    }

    /// Checks the feed-forward and range invariants.
    pub fn validate(&self) -> Result<(), CgpError> {
        for (k, node) in self.nodes.iter().enumerate() {
            let limit = self.n_inputs + k;
            for index in [node.a, node.b] {
                if index >= limit {
                    return Err(CgpError::IndexOutOfRange { node: limit, index });
                }
            }
            if GateKind::from_code(node.function).is_none() {
                return Err(CgpError::UnknownFunction {
                    node: limit,
                    code: node.function as u64,
                });
            }
        }
        if self.outputs.len() != self.n_outputs {
            return Err(CgpError::OutputCount {
                expected: self.n_outputs,
                found: self.outputs.len(),
            });
        }
        let total = self.n_inputs + self.nodes.len();
        if let Some(&o) = self.outputs.iter().find(|&&o| o >= total) {
            return Err(CgpError::OutputOutOfRange(o));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{{{},{},1,{},2,1,8}}", self.n_inputs, self.n_outputs, self.nodes.len());
        for (k, n) in self.nodes.iter().enumerate() {
            let _ = write!(s, "([{}]{},{},{})", self.n_inputs + k, n.a, n.b, n.function);
        }
        let outs: Vec<String> = self.outputs.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(s, "({})", outs.join(","));
        s
    }

    pub fn parse(text: &str) -> Result<CgpChromosome, CgpError> {
        let mut p = Parser {
            s: text.trim().as_bytes(),
            pos: 0,
        };
        p.expect(b'{')?;
        let mut header = Vec::with_capacity(7);
        loop {
            header.push(p.number()?);
            if p.eat(b'}') {
                break;
            }
            p.expect(b',')?;
        }
        let &[n_in, n_out, rows, n_nodes, arity, node_outs, functions] = header.as_slice() else {
            return Err(CgpError::Header(format!("expected 7 fields, found {}", header.len())));
        };
        if (rows, arity, node_outs, functions) != (1, 2, 1, 8) {
            return Err(CgpError::Header(format!(
                "unsupported layout {rows},{arity},{node_outs},{functions} (want 1,2,1,8)"
            )));
        }
        let (n_in, n_out, n_nodes) = (n_in as usize, n_out as usize, n_nodes as usize);
        let mut nodes = Vec::with_capacity(n_nodes);
        for k in 0..n_nodes {
            let idx = n_in + k;
            p.expect(b'(')?;
            p.expect(b'[')?;
            let label = p.number()? as usize;
            if label != idx {
                return Err(p.error(format!("node label {label}, expected {idx}")));
            }
            p.expect(b']')?;
            let a = p.number()? as usize;
            p.expect(b',')?;
            let b = p.number()? as usize;
            p.expect(b',')?;
            let code = p.number()?;
            p.expect(b')')?;
            for index in [a, b] {
                if index >= idx {
                    return Err(CgpError::IndexOutOfRange { node: idx, index });
                }
            }
            if code > 7 {
                return Err(CgpError::UnknownFunction { node: idx, code });
            }
            nodes.push(CgpNode {
                a,
                b,
                function: code as u8,
            });
        }
        p.expect(b'(')?;
        let mut outputs = Vec::with_capacity(n_out);
        if !p.eat(b')') {
            loop {
                outputs.push(p.number()? as usize);
                if p.eat(b')') {
                    break;
                }
                p.expect(b',')?;
            }
        }
        if p.pos != p.s.len() {
            return Err(p.error("trailing characters".into()));
        }
        let c = CgpChromosome {
            n_inputs: n_in,
            n_outputs: n_out,
            nodes,
            outputs,
        };
        c.validate()?;
        Ok(c)
    }

    /// Decodes into a flat netlist with bus names and widths taken from
    /// `signature`, or a single `in` and `out` bus when none is given.
    pub fn to_netlist(&self, name: &str, signature: Option<&Signature>) -> Result<FlatNetlist, CgpError> {
        self.validate()?;
        let sig = match signature {
            Some(s) => s.clone(),
            None => Signature {
                inputs: if self.n_inputs > 0 {
                    vec![("in".into(), self.n_inputs)]
                } else {
                    vec![]
                },
                outputs: if self.n_outputs > 0 {
                    vec![("out".into(), self.n_outputs)]
                } else {
                    vec![]
                },
            },
        };
        if sig.input_bits() != self.n_inputs {
            return Err(CgpError::SignatureMismatch {
                what: "input",
                expected: sig.input_bits(),
                found: self.n_inputs,
            });
        }
        if sig.output_bits() != self.n_outputs {
            return Err(CgpError::SignatureMismatch {
                what: "output",
                expected: sig.output_bits(),
                found: self.n_outputs,
            });
        }
        let n_in = self.n_inputs;
        let signal = |i: usize| {
            if i < n_in {
                Signal::Input(i)
            } else {
                Signal::Gate(i - n_in)
            }
        };
        let gates = self
            .nodes
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let kind = GateKind::from_code(n.function).expect("validated");
                FlatGate {
                    kind,
                    a: signal(n.a),
                    b: (kind.arity() == 2).then(|| signal(n.b)),
                    name: format!("n{}", n_in + k),
                }
            })
            .collect();
        let mut outs = self.outputs.iter().copied();
        let outputs = sig
            .outputs
            .iter()
            .map(|(bus, w)| OutputBus {
                name: bus.clone(),
                bits: outs.by_ref().take(*w).map(signal).collect(),
            })
            .collect();
        Ok(FlatNetlist {
            name: name.to_string(),
            inputs: sig
                .inputs
                .iter()
                .map(|(n, w)| FlatBus {
                    name: n.clone(),
                    width: *w,
                })
                .collect(),
            outputs,
            gates,
        })
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: String) -> CgpError {
        CgpError::Syntax { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), CgpError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn number(&mut self) -> Result<u64, CgpError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CgpError::Syntax {
                pos: start,
                msg: "expected a number".into(),
            })
    }
}

/// Parses chromosome text into a flat netlist; see [`CgpChromosome::to_netlist`].
pub fn parse_cgp(text: &str, signature: Option<&Signature>) -> Result<FlatNetlist, CgpError> {
    CgpChromosome::parse(text)?.to_netlist("cgp", signature)
}
