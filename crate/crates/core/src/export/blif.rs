use std::fmt::Write;

use super::view::{module_views, Item, ModuleView, Ref};
use super::{flat_output_names, Signal};
use crate::netlist::{Circuit, FlatNetlist, GateKind};

fn cover(kind: GateKind) -> &'static [&'static str] {
    match kind {
        GateKind::Buf => &["1 1"],
        GateKind::Not => &["0 1"],
        GateKind::And => &["11 1"],
        GateKind::Or => &["1- 1", "-1 1"],
        GateKind::Xor => &["01 1", "10 1"],
        GateKind::Nand => &["0- 1", "-0 1"],
        GateKind::Nor => &["00 1"],
        GateKind::Xnor => &["00 1", "11 1"],
    }
}

fn names(out: &mut String, kind: GateKind, a: &str, b: Option<&str>, y: &str) {
    match b {
        Some(b) => {
            let _ = writeln!(out, ".names {a} {b} {y}");
        }
        None => {
            let _ = writeln!(out, ".names {a} {y}");
        }
    }
    for line in cover(kind) {
        out.push_str(line);
        out.push('\n');
    }
}

fn const_net(out: &mut String, name: &str, v: bool) {
    let _ = writeln!(out, ".names {name}");
    if v {
        out.push_str("1\n");
    }
}

fn const_name(v: bool) -> &'static str {
    if v {
        "const1"
    } else {
        "const0"
    }
}

fn bits(buses: impl Iterator<Item = (String, usize)>) -> String {
    let mut v = Vec::new();
    for (name, w) in buses {
        v.extend((0..w).map(|i| format!("{name}[{i}]")));
    }
    v.join(" ")
}

pub(crate) fn flat(net: &FlatNetlist) -> String {
    let names_map = flat_output_names(net, |bus, bit| format!("{bus}[{bit}]"));
    let mut used = [false; 2];
    let mut signal = |s: Signal| -> String {
        match s {
            Signal::Const(v) => {
                used[v as usize] = true;
                const_name(v).to_string()
            }
            Signal::Input(i) => {
                let (bus, bit) = net.input_position(i).expect("input index in range");
                format!("{}[{bit}]", net.inputs[bus].name)
            }
            Signal::Gate(g) => names_map.gate[g].clone(),
        }
    };
    let mut body = String::new();
    for (g, y) in net.gates.iter().zip(&names_map.gate) {
        let a = signal(g.a);
        let b = g.b.map(&mut signal);
        names(&mut body, g.kind, &a, b.as_deref(), y);
    }
    for (bus, extra) in net.outputs.iter().zip(&names_map.extra) {
        for &(bit, s) in extra {
            let y = format!("{}[{bit}]", bus.name);
            match s {
                Signal::Const(v) => const_net(&mut body, &y, v),
                _ => {
                    let a = signal(s);
                    names(&mut body, GateKind::Buf, &a, None, &y);
                }
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, ".model {}", net.name);
    let _ = writeln!(
        out,
        ".inputs {}",
        bits(net.inputs.iter().map(|b| (b.name.clone(), b.width)))
    );
    let _ = writeln!(
        out,
        ".outputs {}",
        bits(net.outputs.iter().map(|b| (b.name.clone(), b.bits.len())))
    );
    for v in [false, true] {
        if used[v as usize] {
            const_net(&mut out, const_name(v), v);
        }
    }
    out.push_str(&body);
    out.push_str(".end\n");
    out
}

fn model(out: &mut String, m: &ModuleView) {
    let mut used = [false; 2];
    let mut reference = |r: &Ref| -> String {
        match r {
            Ref::Const(v) => {
                used[*v as usize] = true;
                const_name(*v).to_string()
            }
            Ref::Port { bus, bit } => format!("{bus}[{bit}]"),
            Ref::Net(n) => n.clone(),
            Ref::Child { prefix, bus, bit } => format!("{prefix}_{bus}[{bit}]"),
        }
    };
    let mut body = String::new();
    for item in &m.items {
        match item {
            Item::Gate(g) => {
                let a = reference(&g.a);
                let b = g.b.as_ref().map(&mut reference);
                names(&mut body, g.kind, &a, b.as_deref(), &g.out);
            }
            Item::Inst(inst) => {
                let mut conns = Vec::new();
                for (port, refs) in &inst.inputs {
                    for (bit, r) in refs.iter().enumerate() {
                        conns.push(format!("{port}[{bit}]={}", reference(r)));
                    }
                }
                for (bus, w) in &inst.outputs {
                    conns.extend((0..*w).map(|bit| format!("{bus}[{bit}]={}_{bus}[{bit}]", inst.prefix)));
                }
                let _ = writeln!(body, ".subckt {} {}", inst.module, conns.join(" "));
            }
        }
    }
    for (bus, refs) in &m.outputs {
        for (bit, r) in refs.iter().enumerate() {
            let y = format!("{bus}[{bit}]");
            match r {
                Ref::Const(v) => const_net(&mut body, &y, *v),
                _ => {
                    let a = reference(r);
                    names(&mut body, GateKind::Buf, &a, None, &y);
                }
            }
        }
    }
    let _ = writeln!(out, ".model {}", m.name);
    let _ = writeln!(out, ".inputs {}", bits(m.inputs.iter().cloned()));
    let _ = writeln!(
        out,
        ".outputs {}",
        bits(m.outputs.iter().map(|(n, r)| (n.clone(), r.len())))
    );
    for v in [false, true] {
        if used[v as usize] {
            const_net(out, const_name(v), v);
        }
    }
    out.push_str(&body);
    out.push_str(".end\n");
}

/// Top model first, then every submodel.
pub(crate) fn hierarchical(circuit: &Circuit) -> String {
    let mut views = module_views(circuit);
    let top = views.pop().expect("top module");
    let mut out = String::new();
    model(&mut out, &top);
    for m in &views {
        out.push('\n');
        model(&mut out, m);
    }
    out
}
