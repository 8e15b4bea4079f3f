//! One-bit building blocks.

use crate::netlist::{Builder, Bus, Result, Wire};

fn ports(names: &[&str], wires: &[Wire]) -> Result<Vec<Bus>> {
    names.iter().zip(wires).map(|(n, &w)| Bus::single(*n, w)).collect()
}

/// `!x & y`, skipping the inverter when `y` is a known zero.
pub(crate) fn and_not(b: &mut Builder, x: Wire, y: Wire) -> Result<Wire> {
    if b.is_const0(y) {
        return Ok(Wire::CONST0);
    }
    let nx = b.not(x)?;
    b.and(nx, y)
}

pub(crate) fn half_adder_body(b: &mut Builder, x: Wire, y: Wire) -> Result<(Wire, Wire)> {
    let sum = b.xor(x, y)?;
    let carry = b.and(x, y)?;
    Ok((sum, carry))
}

pub(crate) fn full_adder_body(b: &mut Builder, x: Wire, y: Wire, cin: Wire) -> Result<(Wire, Wire)> {
    let (p, g) = half_adder_body(b, x, y)?;
    let (sum, t) = half_adder_body(b, p, cin)?;
    let cout = b.or(g, t)?;
    Ok((sum, cout))
}

pub(crate) fn half_subtractor_body(b: &mut Builder, x: Wire, y: Wire) -> Result<(Wire, Wire)> {
    let diff = b.xor(x, y)?;
    let borrow = and_not(b, x, y)?;
    Ok((diff, borrow))
}

pub(crate) fn full_subtractor_body(b: &mut Builder, x: Wire, y: Wire, bin: Wire) -> Result<(Wire, Wire)> {
    let (p, b1) = half_subtractor_body(b, x, y)?;
    let (diff, b2) = half_subtractor_body(b, p, bin)?;
    let bout = b.or(b1, b2)?;
    Ok((diff, bout))
}

/// Half adder instance: `(sum, carry)`.
pub fn half_adder(b: &mut Builder, prefix: &str, x: Wire, y: Wire) -> Result<(Wire, Wire)> {
    let outs = b.instance("ha", prefix, ports(&["a", "b"], &[x, y])?, |b, ins| {
        let (s, c) = half_adder_body(b, ins[0].wire(0), ins[1].wire(0))?;
        ports(&["sum", "carry"], &[s, c])
    })?;
    Ok((outs[0].wire(0), outs[1].wire(0)))
}

/// Full adder instance: `(sum, cout)`, two chained half adders plus an OR.
pub fn full_adder(b: &mut Builder, prefix: &str, x: Wire, y: Wire, cin: Wire) -> Result<(Wire, Wire)> {
    let outs = b.instance("fa", prefix, ports(&["a", "b", "cin"], &[x, y, cin])?, |b, ins| {
        let (s, c) = full_adder_body(b, ins[0].wire(0), ins[1].wire(0), ins[2].wire(0))?;
        ports(&["sum", "cout"], &[s, c])
    })?;
    Ok((outs[0].wire(0), outs[1].wire(0)))
}

/// Half subtractor instance: `(diff, borrow)` with `borrow = !a & b`.
pub fn half_subtractor(b: &mut Builder, prefix: &str, x: Wire, y: Wire) -> Result<(Wire, Wire)> {
    let outs = b.instance("hs", prefix, ports(&["a", "b"], &[x, y])?, |b, ins| {
        let (d, bo) = half_subtractor_body(b, ins[0].wire(0), ins[1].wire(0))?;
        ports(&["diff", "borrow"], &[d, bo])
    })?;
    Ok((outs[0].wire(0), outs[1].wire(0)))
}

/// Full subtractor instance: `(diff, bout)`.
pub fn full_subtractor(b: &mut Builder, prefix: &str, x: Wire, y: Wire, bin: Wire) -> Result<(Wire, Wire)> {
    let outs = b.instance("fs", prefix, ports(&["a", "b", "bin"], &[x, y, bin])?, |b, ins| {
        let (d, bo) = full_subtractor_body(b, ins[0].wire(0), ins[1].wire(0), ins[2].wire(0))?;
        ports(&["diff", "bout"], &[d, bo])
    })?;
    Ok((outs[0].wire(0), outs[1].wire(0)))
}

/// Two-way multiplexer: `sel ? d1 : d0`.
pub fn mux2(b: &mut Builder, prefix: &str, sel: Wire, d0: Wire, d1: Wire) -> Result<Wire> {
    let outs = b.instance(
        "mux2to1",
        prefix,
        ports(&["d0", "d1", "sel"], &[d0, d1, sel])?,
        |b, ins| {
            let (d0, d1, sel) = (ins[0].wire(0), ins[1].wire(0), ins[2].wire(0));
            let hi = b.and(sel, d1)?;
            let lo = and_not(b, sel, d0)?;
            let y = b.or(hi, lo)?;
            ports(&["y"], &[y])
        },
    )?;
    Ok(outs[0].wire(0))
}

/// Adds up to three bits of equal weight, ignoring known zeros.
///
/// Returns the sum bit and, when one can occur, the carry bit. A half or
/// full adder instance named `ha<tag>` / `fa<tag>` is created only when at
/// least two non-constant-zero operands remain.
pub(crate) fn compress(b: &mut Builder, tag: &str, bits: &[Wire]) -> Result<(Wire, Option<Wire>)> {
    let live: Vec<Wire> = bits.iter().copied().filter(|&w| !b.is_const0(w)).collect();
    if live.iter().all(|&w| b.const_value(w).is_some()) {
        let ones = live.len();
        return Ok((Wire::constant(ones % 2 == 1), (ones >= 2).then_some(Wire::CONST1)));
    }
    match live.as_slice() {
        [x] => Ok((*x, None)),
        [x, y] => {
            let (s, c) = half_adder(b, &format!("ha{tag}"), *x, *y)?;
            Ok((s, Some(c)))
        }
        [x, y, z] => {
            let (s, c) = full_adder(b, &format!("fa{tag}"), *x, *y, *z)?;
            Ok((s, Some(c)))
        }
        _ => panic!("compress takes at most three bits, got {}", live.len()),
    }
}

/// Parity of the given bits, for positions whose carry is discarded.
pub(crate) fn sum_only(b: &mut Builder, bits: &[Wire]) -> Result<Wire> {
    let mut acc = Wire::CONST0;
    for &w in bits {
        acc = b.xor(acc, w)?;
    }
    Ok(acc)
}
