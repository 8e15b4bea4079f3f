//! Array, Dadda and Wallace multipliers, plus the broken-array and truncated
//! approximations of the array multiplier.

use super::adders::adder;
use super::cells::{compress, full_adder, half_adder, sum_only};
use super::{AdderSpec, ArithError, Signedness};
use crate::netlist::{Builder, Bus, Wire};

type Result<T> = std::result::Result<T, ArithError>;

/// Partial products grouped by weight.
#[derive(Debug, Clone)]
pub struct PartialProductArray {
    pub width: usize,
    /// `columns[w]` holds the bits of weight `2^w`, `w` in `0..2N`.
    pub columns: Vec<Vec<Wire>>,
}

impl PartialProductArray {
    pub fn max_height(&self) -> usize {
        self.columns.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn heights(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }
}

/// Partial product `a_i * b_j`, complemented on the Baugh-Wooley border
/// cells of a signed multiplier.
fn partial_product(b: &mut Builder, x: &Bus, y: &Bus, i: usize, j: usize, signedness: Signedness) -> Result<Wire> {
    let n = x.width();
    let border = (i == n - 1) != (j == n - 1);
    Ok(if signedness == Signedness::Signed && border {
        b.nand(x.wire(i), y.wire(j))?
    } else {
        b.and(x.wire(i), y.wire(j))?
    })
}

fn check_operands(x: &Bus, y: &Bus) -> Result<usize> {
    if x.width() != y.width() {
        return Err(ArithError::WidthMismatch);
    }
    Ok(x.width())
}

/// Generates the full partial-product array. Signed arrays carry the two
/// Baugh-Wooley correction ones at weights `N` and `2N - 1`.
pub fn generate_pp(b: &mut Builder, x: &Bus, y: &Bus, signedness: Signedness) -> Result<PartialProductArray> {
    let n = check_operands(x, y)?;
    let mut columns = vec![Vec::new(); 2 * n];
    for j in 0..n {
        for i in 0..n {
            columns[i + j].push(partial_product(b, x, y, i, j, signedness)?);
        }
    }
    if signedness == Signedness::Signed {
        columns[n].push(Wire::CONST1);
        columns[2 * n - 1].push(Wire::CONST1);
    }
    Ok(PartialProductArray { width: n, columns })
}

/// Array multiplier body with an optional set of omitted cells.
///
/// Rows are accumulated in carry-save form: each cell of row `j` adds the
/// partial product `a_i b_j` to the sum and carry left at its weight by the
/// previous row. The upper half is merged by a final ripple row.
pub(crate) fn array_body(
    b: &mut Builder,
    x: &Bus,
    y: &Bus,
    signedness: Signedness,
    omit: impl Fn(usize, usize) -> bool,
) -> Result<Bus> {
    let n = check_operands(x, y)?;
    let pp = |b: &mut Builder, i: usize, j: usize| -> Result<Wire> {
        if omit(i, j) {
            Ok(Wire::CONST0)
        } else {
            partial_product(b, x, y, i, j, signedness)
        }
    };
    let mut pending: Vec<Vec<Wire>> = vec![Vec::new(); 2 * n + 1];
    for i in 0..n {
        let p = pp(b, i, 0)?;
        pending[i].push(p);
    }
    if signedness == Signedness::Signed {
        pending[n].push(Wire::CONST1);
        pending[2 * n - 1].push(Wire::CONST1);
    }
    for j in 1..n {
        let mut carries: Vec<(usize, Wire)> = Vec::new();
        for w in j..j + n {
            let mut bits = std::mem::take(&mut pending[w]);
            bits.push(pp(b, w - j, j)?);
            let (s, c) = compress(b, &format!("{}_{}", w - j, j), &bits)?;
            pending[w].push(s);
            if let Some(c) = c {
                carries.push((w + 1, c));
            }
        }
        for (w, c) in carries {
            pending[w].push(c);
        }
    }
    let mut out = Vec::with_capacity(2 * n);
    for bits in pending.iter().take(n) {
        out.push(bits.first().copied().unwrap_or(Wire::CONST0));
    }
    let mut carry: Option<Wire> = None;
    for w in n..2 * n {
        let mut bits = std::mem::take(&mut pending[w]);
        bits.extend(carry.take());
        if w == 2 * n - 1 {
            out.push(sum_only(b, &bits)?);
        } else {
            let (s, c) = compress(b, &format!("{w}_{n}"), &bits)?;
            out.push(s);
            carry = c;
        }
    }
    Ok(Bus::new("out", out)?)
}

fn counter(b: &mut Builder, tag: &str, bits: &[Wire]) -> Result<(Wire, Wire)> {
    Ok(match *bits {
        [p, q] => half_adder(b, &format!("ha{tag}"), p, q)?,
        [p, q, r] => full_adder(b, &format!("fa{tag}"), p, q, r)?,
        _ => unreachable!("counters take two or three bits"),
    })
}

/// Dadda height sequence 2, 3, 4, 6, 9, 13, ... below `max_height`, largest first.
pub fn dadda_targets(max_height: usize) -> Vec<usize> {
    let mut seq = vec![2usize];
    while *seq.last().unwrap() < max_height {
        let d = *seq.last().unwrap();
        seq.push(d * 3 / 2);
    }
    seq.into_iter().filter(|&d| d < max_height).rev().collect()
}

/// Dadda reduction: each stage applies the fewest counters needed to bring
/// every column down to the next target height.
pub fn reduce_dadda(b: &mut Builder, mut pp: PartialProductArray, final_adder: &AdderSpec) -> Result<Bus> {
    let cols = pp.columns.len();
    for (stage, target) in dadda_targets(pp.max_height()).into_iter().enumerate() {
        let mut next = vec![Vec::new(); cols];
        let mut incoming: Vec<Wire> = Vec::new();
        for w in 0..cols {
            let mut pool = std::mem::take(&mut pp.columns[w]);
            pool.append(&mut incoming);
            let mut height = pool.len();
            let mut taken = 0;
            let mut k = 0;
            while height > target {
                let arity = if height - target >= 2 { 3 } else { 2 };
                let arity = arity.min(pool.len() - taken);
                if arity < 2 {
                    return Err(ArithError::Internal(format!("dadda stage {stage} stuck at column {w}")));
                }
                let (s, c) = counter(b, &format!("{w}_{stage}_{k}"), &pool[taken..taken + arity])?;
                taken += arity;
                height -= arity - 1;
                k += 1;
                next[w].push(s);
                if w + 1 < cols {
                    incoming.push(c);
                }
            }
            next[w].extend_from_slice(&pool[taken..]);
        }
        pp.columns = next;
    }
    final_addition(b, pp, final_adder)
}

/// Wallace reduction: every column is split into groups of three (full
/// adders), a leftover pair (half adder) and a leftover single bit, stage
/// after stage until at most two bits remain per column.
pub fn reduce_wallace(b: &mut Builder, mut pp: PartialProductArray, final_adder: &AdderSpec) -> Result<Bus> {
    let cols = pp.columns.len();
    let mut stage = 0;
    while pp.max_height() > 2 {
        let mut next = vec![Vec::new(); cols];
        for w in 0..cols {
            let bits = std::mem::take(&mut pp.columns[w]);
            for (k, group) in bits.chunks(3).enumerate() {
                if group.len() == 1 {
                    next[w].push(group[0]);
                    continue;
                }
                let (s, c) = counter(b, &format!("{w}_{stage}_{k}"), group)?;
                next[w].push(s);
                if w + 1 < cols {
                    next[w + 1].push(c);
                }
            }
        }
        pp.columns = next;
        stage += 1;
    }
    final_addition(b, pp, final_adder)
}

/// Sums the two remaining rows from the lowest column of height two up to
/// weight `2N - 1`; lower columns pass straight through.
fn final_addition(b: &mut Builder, pp: PartialProductArray, final_adder: &AdderSpec) -> Result<Bus> {
    let cols = pp.columns.len();
    let first = pp.columns.iter().position(|c| c.len() == 2).unwrap_or(cols);
    let mut out: Vec<Wire> = pp.columns[..first]
        .iter()
        .map(|c| c.first().copied().unwrap_or(Wire::CONST0))
        .collect();
    if first < cols {
        let row = |k: usize| -> Vec<Wire> {
            pp.columns[first..]
                .iter()
                .map(|c| c.get(k).copied().unwrap_or(Wire::CONST0))
                .collect()
        };
        let spec = AdderSpec {
            family: final_adder.family,
            signedness: Signedness::Unsigned,
            width: cols - first,
            block_size: final_adder.block_size,
        };
        let lhs = Bus::new("a", row(0))?;
        let rhs = Bus::new("b", row(1))?;
        let sum = adder(b, &spec, "final_adder", &lhs, &rhs)?;
        out.extend_from_slice(&sum.wires()[..spec.width]);
    }
    Ok(Bus::new("out", out)?)
}

pub(crate) fn dadda_body(
    b: &mut Builder,
    x: &Bus,
    y: &Bus,
    signedness: Signedness,
    final_adder: &AdderSpec,
) -> Result<Bus> {
    let pp = generate_pp(b, x, y, signedness)?;
    reduce_dadda(b, pp, final_adder)
}

pub(crate) fn wallace_body(
    b: &mut Builder,
    x: &Bus,
    y: &Bus,
    signedness: Signedness,
    final_adder: &AdderSpec,
) -> Result<Bus> {
    let pp = generate_pp(b, x, y, signedness)?;
    reduce_wallace(b, pp, final_adder)
}

/// Broken-array multiplier: cell `(i, j)` is dropped when `i + j < v` or `j < h`.
pub(crate) fn bam_body(b: &mut Builder, x: &Bus, y: &Bus, h: usize, v: usize) -> Result<Bus> {
    let n = check_operands(x, y)?;
    if h > n || v > 2 * n - 1 {
        return Err(ArithError::ParameterOutOfRange(format!(
            "broken-array cut h={h}, v={v} outside h <= {n}, v <= {}",
            2 * n - 1
        )));
    }
    array_body(b, x, y, Signedness::Unsigned, |i, j| i + j < v || j < h)
}

/// Truncated multiplier: the `k` least significant columns are dropped and
/// the corresponding outputs tied to zero.
pub(crate) fn tm_body(b: &mut Builder, x: &Bus, y: &Bus, k: usize) -> Result<Bus> {
    let n = check_operands(x, y)?;
    if k > 2 * n - 1 {
        return Err(ArithError::ParameterOutOfRange(format!(
            "truncation k={k} outside k <= {}",
            2 * n - 1
        )));
    }
    let out = array_body(b, x, y, Signedness::Unsigned, |i, j| i + j < k)?;
    let wires = out
        .wires()
        .iter()
        .enumerate()
        .map(|(w, &wire)| if w < k { Wire::CONST0 } else { wire })
        .collect();
    Ok(Bus::new("out", wires)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dadda_sequence() {
        assert_eq!(dadda_targets(2), Vec::<usize>::new());
        assert_eq!(dadda_targets(3), vec![2]);
        assert_eq!(dadda_targets(8), vec![6, 4, 3, 2]);
        assert_eq!(dadda_targets(29), vec![28, 19, 13, 9, 6, 4, 3, 2]);
    }

    #[test]
    fn unsigned_pp_column_heights() {
        for n in 1..=6 {
            let mut b = Builder::new("t").unwrap();
            let x = b.input_bus("a", n).unwrap();
            let y = b.input_bus("b", n).unwrap();
            let pp = generate_pp(&mut b, &x, &y, Signedness::Unsigned).unwrap();
            for w in 0..2 * n - 1 {
                assert_eq!(pp.columns[w].len(), (w + 1).min(n).min(2 * n - 1 - w), "n={n} w={w}");
            }
            assert!(pp.columns[2 * n - 1].is_empty());
        }
    }

    #[test]
    fn bam_parameter_range() {
        let mut b = Builder::new("t").unwrap();
        let x = b.input_bus("a", 4).unwrap();
        let y = b.input_bus("b", 4).unwrap();
        assert!(matches!(
            bam_body(&mut b, &x, &y, 5, 0),
            Err(ArithError::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            bam_body(&mut b, &x, &y, 0, 8),
            Err(ArithError::ParameterOutOfRange(_))
        ));
        assert!(matches!(
            tm_body(&mut b, &x, &y, 8),
            Err(ArithError::ParameterOutOfRange(_))
        ));
    }
}
