//! Multiply-accumulate built from an array multiplier and a ripple-carry adder.

use super::adders::adder;
use super::multipliers::array_body;
use super::{AdderFamily, AdderSpec, ArithError, Signedness};
use crate::netlist::{Builder, Bus};

type Result<T> = std::result::Result<T, ArithError>;

/// `a * b + r` with an `N`-bit array multiplier feeding a `2N`-bit RCA.
pub(crate) fn mac_body(b: &mut Builder, x: &Bus, y: &Bus, r: &Bus) -> Result<Bus> {
    let n = x.width();
    if y.width() != n || r.width() != 2 * n {
        return Err(ArithError::WidthMismatch);
    }
    let inputs = vec![x.renamed("a")?, y.renamed("b")?];
    let product = b
        .instance(&format!("u_arrmul{n}"), "arrmul", inputs, |b, ins| {
            Ok::<_, ArithError>(vec![array_body(b, &ins[0], &ins[1], Signedness::Unsigned, |_, _| {
                false
            })?])
        })?
        .remove(0);
    let spec = AdderSpec::new(AdderFamily::Rca, Signedness::Unsigned, 2 * n);
    let sum = adder(b, &spec, "rca", &product, r)?;
    Ok(sum.renamed("out")?)
}
