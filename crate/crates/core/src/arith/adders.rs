//! Ripple-carry, carry-lookahead and carry-skip adders.

use super::cells::{full_adder, half_adder, mux2, sum_only};
use super::{AdderFamily, AdderSpec, ArithError, Signedness};
use crate::netlist::{Builder, Bus, Wire};

type Result<T> = std::result::Result<T, ArithError>;

/// Adds two operand buses inside the current component.
///
/// The result always has `N + 1` bits: the carry-out for unsigned operands,
/// or the sign-extended two's-complement sum for signed ones.
pub(crate) fn adder_body(b: &mut Builder, spec: &AdderSpec, x: &Bus, y: &Bus) -> Result<Bus> {
    if x.width() != spec.width || y.width() != spec.width {
        return Err(ArithError::WidthMismatch);
    }
    let (xs, ys, carry_out) = match spec.signedness {
        Signedness::Unsigned => (x.wires().to_vec(), y.wires().to_vec(), true),
        Signedness::Signed => {
            let mut xs = x.wires().to_vec();
            let mut ys = y.wires().to_vec();
            xs.push(x.msb());
            ys.push(y.msb());
            (xs, ys, false)
        }
    };
    let sum = match spec.family {
        AdderFamily::Rca => ripple(b, &xs, &ys, Wire::CONST0, 0, carry_out)?,
        AdderFamily::Cla => lookahead(b, &xs, &ys, spec.block_size, carry_out)?,
        AdderFamily::Cska => carry_skip(b, &xs, &ys, spec.block_size, carry_out)?,
    };
    Ok(Bus::new("out", sum)?)
}

/// Adder as a child component of the current one.
pub fn adder(b: &mut Builder, spec: &AdderSpec, prefix: &str, x: &Bus, y: &Bus) -> Result<Bus> {
    if x.width() != spec.width || y.width() != spec.width {
        return Err(ArithError::WidthMismatch);
    }
    let inputs = vec![x.renamed("a")?, y.renamed("b")?];
    let outs = b.instance::<_, ArithError>(&spec.type_name(), prefix, inputs, |b, ins| {
        Ok(vec![adder_body(b, spec, &ins[0], &ins[1])?])
    })?;
    Ok(outs.into_iter().next().expect("adder has one output bus"))
}

/// Ripple chain over bit positions `offset..`, starting from `cin`.
///
/// Returns the sum bits followed by the carry-out when `carry_out` is set.
fn ripple(b: &mut Builder, xs: &[Wire], ys: &[Wire], cin: Wire, offset: usize, carry_out: bool) -> Result<Vec<Wire>> {
    let (sums, cout) = ripple_segment(b, xs, ys, cin, offset, carry_out)?;
    Ok(sums.into_iter().chain(cout).collect())
}

fn ripple_segment(
    b: &mut Builder,
    xs: &[Wire],
    ys: &[Wire],
    cin: Wire,
    offset: usize,
    need_cout: bool,
) -> Result<(Vec<Wire>, Option<Wire>)> {
    let n = xs.len();
    let mut carry = cin;
    let mut sums = Vec::with_capacity(n + 1);
    for i in 0..n {
        let pos = offset + i;
        if i == n - 1 && !need_cout {
            sums.push(sum_only(b, &[xs[i], ys[i], carry])?);
            return Ok((sums, None));
        }
        let (s, c) = if b.is_const0(carry) {
            half_adder(b, &format!("ha{pos}"), xs[i], ys[i])?
        } else {
            full_adder(b, &format!("fa{pos}"), xs[i], ys[i], carry)?
        };
        sums.push(s);
        carry = c;
    }
    Ok((sums, Some(carry)))
}

fn or_reduce(b: &mut Builder, terms: &[Wire]) -> Result<Wire> {
    let mut acc = Wire::CONST0;
    for &t in terms {
        acc = b.or(acc, t)?;
    }
    Ok(acc)
}

/// Carry-lookahead: carries inside each group are expanded sum-of-products of
/// generate/propagate terms; group carries ripple from group to group.
fn lookahead(b: &mut Builder, xs: &[Wire], ys: &[Wire], group: usize, carry_out: bool) -> Result<Vec<Wire>> {
    let n = xs.len();
    let mut p = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        p.push(b.xor(xs[i], ys[i])?);
        // the generate term of the top bit only feeds the discarded carry
        if i + 1 < n || carry_out {
            g.push(b.and(xs[i], ys[i])?);
        }
    }
    let mut sums = Vec::with_capacity(n + 1);
    let mut cin = Wire::CONST0;
    for start in (0..n).step_by(group) {
        let end = (start + group).min(n);
        // terms[t] covers the product chain that ends at the current bit
        let mut terms: Vec<Wire> = vec![cin];
        let mut carry = cin;
        for j in start..end {
            sums.push(b.xor(p[j], carry)?);
            if j + 1 == n && !carry_out {
                break;
            }
            for t in terms.iter_mut() {
                *t = b.and(*t, p[j])?;
            }
            terms.push(g[j]);
            carry = or_reduce(b, &terms)?;
        }
        cin = carry;
    }
    if carry_out {
        sums.push(cin);
    }
    Ok(sums)
}

/// Carry-skip: ripple blocks whose carry-out is bypassed by the block
/// carry-in when every bit of the block propagates.
fn carry_skip(b: &mut Builder, xs: &[Wire], ys: &[Wire], block: usize, carry_out: bool) -> Result<Vec<Wire>> {
    let n = xs.len();
    let mut sums = Vec::with_capacity(n + 1);
    let mut cin = Wire::CONST0;
    for (k, start) in (0..n).step_by(block).enumerate() {
        let end = (start + block).min(n);
        let last = end == n;
        let need_cout = !last || carry_out;
        let (s, ripple_cout) = ripple_segment(b, &xs[start..end], &ys[start..end], cin, start, need_cout)?;
        sums.extend(s);
        let Some(ripple_cout) = ripple_cout else { break };
        if b.is_const0(cin) {
            // nothing to skip over
            cin = ripple_cout;
            continue;
        }
        let mut all_propagate = Wire::CONST1;
        for i in start..end {
            let p = b.xor(xs[i], ys[i])?;
            all_propagate = b.and(all_propagate, p)?;
        }
        cin = mux2(b, &format!("skip{k}"), all_propagate, ripple_cout, cin)?;
    }
    if carry_out {
        sums.push(cin);
    }
    Ok(sums)
}
