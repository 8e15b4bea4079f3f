//! Restoring array divider.

use super::cells::{and_not, full_subtractor, half_subtractor, mux2};
use super::ArithError;
use crate::netlist::{Builder, Bus, Wire};

type Result<T> = std::result::Result<T, ArithError>;

/// Quotient of `dividend / divisor`, one subtract-and-restore row per
/// quotient bit, most significant first.
///
/// Each row shifts the next dividend bit into the partial remainder and
/// subtracts the divisor. The quotient bit is the inverted borrow-out, and it
/// selects between the difference and the unchanged remainder for the next
/// row. A zero divisor never borrows, so every quotient bit is one.
pub(crate) fn divider_body(b: &mut Builder, dividend: &Bus, divisor: &Bus) -> Result<Bus> {
    let n = dividend.width();
    if divisor.width() != n {
        return Err(ArithError::WidthMismatch);
    }
    let mut remainder = vec![Wire::CONST0; n];
    let mut quotient = vec![Wire::CONST0; n];
    for row in 0..n {
        let qbit = n - 1 - row;
        // shifted remainder, n + 1 bits
        let trial: Vec<Wire> = std::iter::once(dividend.wire(qbit))
            .chain(remainder.iter().copied())
            .collect();
        let mut diff = Vec::with_capacity(n);
        let (d0, mut borrow) = half_subtractor(b, &format!("hs{row}_0"), trial[0], divisor.wire(0))?;
        diff.push(d0);
        for k in 1..n {
            let (d, bo) = full_subtractor(b, &format!("fs{row}_{k}"), trial[k], divisor.wire(k), borrow)?;
            diff.push(d);
            borrow = bo;
        }
        // top trial bit against an implicit zero divisor bit
        let borrow = and_not(b, trial[n], borrow)?;
        let q = b.not(borrow)?;
        quotient[qbit] = q;
        if row + 1 < n {
            for k in 0..n {
                remainder[k] = mux2(b, &format!("mux{row}_{k}"), q, trial[k], diff[k])?;
            }
        }
    }
    Ok(Bus::new("out", quotient)?)
}
