use std::fmt::Write;

use super::view::{module_views, Item, ModuleView, Ref};
use super::{ExportError, Signal};
use crate::netlist::{Circuit, FlatNetlist, GateKind};

const PRELUDE: &str = "#include <stdint.h>\n";

/// C type holding `bits` bits.
fn word(bits: usize) -> Result<&'static str, ExportError> {
    match bits {
        0..=64 => Ok("uint64_t"),
        65..=128 => Ok("unsigned __int128"),
        _ => Err(ExportError::TooWide(bits)),
    }
}

fn expr(kind: GateKind, a: &str, b: &str) -> String {
    match kind {
        GateKind::Buf => a.to_string(),
        GateKind::Not => format!("~{a} & 0x01"),
        GateKind::And => format!("{a} & {b}"),
        GateKind::Or => format!("{a} | {b}"),
        GateKind::Xor => format!("{a} ^ {b}"),
        GateKind::Nand => format!("~({a} & {b}) & 0x01"),
        GateKind::Nor => format!("~({a} | {b}) & 0x01"),
        GateKind::Xnor => format!("~({a} ^ {b}) & 0x01"),
    }
}

fn signature(name: &str, inputs: &[(String, usize)], out_bits: usize) -> Result<String, ExportError> {
    let params = inputs
        .iter()
        .map(|(n, w)| Ok(format!("{} {n}", word(*w)?)))
        .collect::<Result<Vec<_>, ExportError>>()?;
    Ok(format!("{} {name}({})", word(out_bits)?, params.join(", ")))
}

fn unpack_inputs(out: &mut String, inputs: &[(String, usize)]) {
    for (name, w) in inputs {
        for i in 0..*w {
            let _ = writeln!(out, "  uint8_t {name}_{i} = (uint8_t)(({name} >> {i}) & 0x01);");
        }
    }
}

fn pack_outputs(out: &mut String, ty: &str, bits: &[String]) {
    let _ = writeln!(out, "  {ty} packed = 0;");
    for (k, s) in bits.iter().enumerate() {
        let _ = writeln!(out, "  packed |= ({ty}){s} << {k};");
    }
    out.push_str("  return packed;\n}\n");
}

pub(crate) fn flat(net: &FlatNetlist) -> Result<String, ExportError> {
    let inputs: Vec<(String, usize)> = net.inputs.iter().map(|b| (b.name.clone(), b.width)).collect();
    let out_bits = net.output_bits();
    let signal = |s: Signal| -> String {
        match s {
            Signal::Const(v) => (v as u8).to_string(),
            Signal::Input(i) => net.input_name(i).expect("input index in range"),
            Signal::Gate(g) => net.gates[g].name.clone(),
        }
    };
    let mut out = String::from(PRELUDE);
    let _ = writeln!(out, "\n{} {{", signature(&net.name, &inputs, out_bits)?);
    unpack_inputs(&mut out, &inputs);
    for g in &net.gates {
        let a = signal(g.a);
        let b = g.b.map(signal).unwrap_or_default();
        let _ = writeln!(out, "  uint8_t {} = {};", g.name, expr(g.kind, &a, &b));
    }
    let bits: Vec<String> = net.output_signals().map(signal).collect();
    pack_outputs(&mut out, word(out_bits)?, &bits);
    Ok(out)
}

fn reference(r: &Ref) -> String {
    match r {
        Ref::Const(v) => (*v as u8).to_string(),
        Ref::Port { bus, bit } => format!("{bus}_{bit}"),
        Ref::Net(n) => n.clone(),
        Ref::Child { prefix, bus, bit } => format!("{prefix}_{bus}_{bit}"),
    }
}

fn function(out: &mut String, m: &ModuleView, modules: &[ModuleView]) -> Result<(), ExportError> {
    let out_bits: usize = m.outputs.iter().map(|(_, r)| r.len()).sum();
    let _ = writeln!(out, "\n{} {{", signature(&m.name, &m.inputs, out_bits)?);
    unpack_inputs(out, &m.inputs);
    for item in &m.items {
        match item {
            Item::Gate(g) => {
                let a = reference(&g.a);
                let b = g.b.as_ref().map(reference).unwrap_or_default();
                let _ = writeln!(out, "  uint8_t {} = {};", g.out, expr(g.kind, &a, &b));
            }
            Item::Inst(inst) => {
                let callee = modules
                    .iter()
                    .find(|v| v.name == inst.module)
                    .expect("child module emitted");
                let args = inst
                    .inputs
                    .iter()
                    .map(|(_, refs)| {
                        let ty = word(refs.len())?;
                        let parts: Vec<String> = refs
                            .iter()
                            .enumerate()
                            .map(|(k, r)| format!("(({ty}){} << {k})", reference(r)))
                            .collect();
                        Ok(parts.join(" | "))
                    })
                    .collect::<Result<Vec<_>, ExportError>>()?;
                let ret_bits: usize = callee.outputs.iter().map(|(_, r)| r.len()).sum();
                let _ = writeln!(
                    out,
                    "  {} {} = {}({});",
                    word(ret_bits)?,
                    inst.prefix,
                    inst.module,
                    args.join(", ")
                );
                let mut shift = 0;
                for (bus, w) in &inst.outputs {
                    for bit in 0..*w {
                        let _ = writeln!(
                            out,
                            "  uint8_t {p}_{bus}_{bit} = (uint8_t)(({p} >> {shift}) & 0x01);",
                            p = inst.prefix
                        );
                        shift += 1;
                    }
                }
            }
        }
    }
    let bits: Vec<String> = m
        .outputs
        .iter()
        .flat_map(|(_, refs)| refs.iter().map(reference))
        .collect();
    pack_outputs(out, word(out_bits)?, &bits);
    Ok(())
}

/// One function per distinct module, callees first.
pub(crate) fn hierarchical(circuit: &Circuit) -> Result<String, ExportError> {
    let views = module_views(circuit);
    let mut out = String::from(PRELUDE);
    for m in &views {
        function(&mut out, m, &views)?;
    }
    Ok(out)
}
