use std::fmt::Write;

use super::view::{module_views, Item, ModuleView, Ref};
use super::{flat_output_names, Signal};
use crate::netlist::{FlatNetlist, GateKind};

fn expr(kind: GateKind, a: &str, b: &str) -> String {
    match kind {
        GateKind::Buf => a.to_string(),
        GateKind::Not => format!("~{a}"),
        GateKind::And => format!("{a} & {b}"),
        GateKind::Or => format!("{a} | {b}"),
        GateKind::Xor => format!("{a} ^ {b}"),
        GateKind::Nand => format!("~({a} & {b})"),
        GateKind::Nor => format!("~({a} | {b})"),
        GateKind::Xnor => format!("~({a} ^ {b})"),
    }
}

fn constant(v: bool) -> &'static str {
    if v {
        "1'b1"
    } else {
        "1'b0"
    }
}

fn header(out: &mut String, name: &str, inputs: &[(String, usize)], outputs: &[(String, usize)]) {
    let ports: Vec<String> = inputs
        .iter()
        .map(|(n, w)| format!("input [{}:0] {n}", w - 1))
        .chain(outputs.iter().map(|(n, w)| format!("output [{}:0] {n}", w - 1)))
        .collect();
    let _ = writeln!(out, "module {name}({});", ports.join(", "));
}

pub(crate) fn flat(net: &FlatNetlist) -> String {
    let names = flat_output_names(net, |bus, bit| format!("{bus}[{bit}]"));
    let signal = |s: Signal| -> String {
        match s {
            Signal::Const(v) => constant(v).to_string(),
            Signal::Input(i) => {
                let (bus, bit) = net.input_position(i).expect("input index in range");
                format!("{}[{bit}]", net.inputs[bus].name)
            }
            Signal::Gate(g) => names.gate[g].clone(),
        }
    };
    let mut out = String::new();
    let inputs: Vec<(String, usize)> = net.inputs.iter().map(|b| (b.name.clone(), b.width)).collect();
    let outputs: Vec<(String, usize)> = net.outputs.iter().map(|b| (b.name.clone(), b.bits.len())).collect();
    header(&mut out, &net.name, &inputs, &outputs);
    for (name, &is_port) in names.gate.iter().zip(&names.is_port) {
        if !is_port {
            let _ = writeln!(out, "  wire {name};");
        }
    }
    for (g, name) in net.gates.iter().zip(&names.gate) {
        let a = signal(g.a);
        let b = g.b.map(signal).unwrap_or_default();
        let _ = writeln!(out, "  assign {name} = {};", expr(g.kind, &a, &b));
    }
    for (bus, bits) in net.outputs.iter().zip(&names.extra) {
        for &(bit, s) in bits {
            let _ = writeln!(out, "  assign {}[{bit}] = {};", bus.name, signal(s));
        }
    }
    out.push_str("endmodule\n");
    out
}

fn reference(r: &Ref) -> String {
    match r {
        Ref::Const(v) => constant(*v).to_string(),
        Ref::Port { bus, bit } => format!("{bus}[{bit}]"),
        Ref::Net(n) => n.clone(),
        Ref::Child { prefix, bus, bit } => format!("{prefix}_{bus}[{bit}]"),
    }
}

fn module(out: &mut String, m: &ModuleView) {
    let outputs: Vec<(String, usize)> = m.outputs.iter().map(|(n, r)| (n.clone(), r.len())).collect();
    header(out, &m.name, &m.inputs, &outputs);
    for g in m.gates() {
        let _ = writeln!(out, "  wire {};", g.out);
    }
    for inst in m.instances() {
        for (bus, w) in &inst.outputs {
            let _ = writeln!(out, "  wire [{}:0] {}_{bus};", w - 1, inst.prefix);
        }
    }
    for item in &m.items {
        match item {
            Item::Gate(g) => {
                let a = reference(&g.a);
                let b = g.b.as_ref().map(reference).unwrap_or_default();
                let _ = writeln!(out, "  assign {} = {};", g.out, expr(g.kind, &a, &b));
            }
            Item::Inst(inst) => {
                let mut conns: Vec<String> = inst
                    .inputs
                    .iter()
                    .map(|(port, refs)| {
                        let bits: Vec<String> = refs.iter().rev().map(reference).collect();
                        if bits.len() == 1 {
                            format!(".{port}({})", bits[0])
                        } else {
                            format!(".{port}({{{}}})", bits.join(", "))
                        }
                    })
                    .collect();
                conns.extend(
                    inst.outputs
                        .iter()
                        .map(|(bus, _)| format!(".{bus}({}_{bus})", inst.prefix)),
                );
                let _ = writeln!(out, "  {} {}({});", inst.module, inst.prefix, conns.join(", "));
            }
        }
    }
    for (bus, refs) in &m.outputs {
        for (bit, r) in refs.iter().enumerate() {
            let _ = writeln!(out, "  assign {bus}[{bit}] = {};", reference(r));
        }
    }
    out.push_str("endmodule\n");
}

pub(crate) fn hierarchical(circuit: &crate::netlist::Circuit) -> String {
    let mut out = String::new();
    for (i, m) in module_views(circuit).iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        module(&mut out, m);
    }
    out
}
