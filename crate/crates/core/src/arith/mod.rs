//! Parametric arithmetic circuits built on [`crate::netlist`].
//!
//! Every circuit is described by a [`CircuitSpec`]. [`CircuitSpec::build`]
//! instantiates it as a top-level [`Circuit`], and
//! [`CircuitSpec::reference`] gives the integer function it must compute.

mod adders;
mod cells;
mod divider;
mod mac;
mod multipliers;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::netlist::{Builder, Bus, Circuit, NetlistError};

pub use adders::adder;
pub use cells::{full_adder, full_subtractor, half_adder, half_subtractor, mux2};
pub use multipliers::{dadda_targets, generate_pp, reduce_dadda, reduce_wallace, PartialProductArray};

pub const DEFAULT_BLOCK_SIZE: usize = 4;

/// Interprets the low `bits` bits of `v` as a two's-complement number.
pub fn to_signed(v: u128, bits: u32) -> i128 {
    if bits == 0 {
        return 0;
    }
    let shift = 128 - bits;
    ((v << shift) as i128) >> shift
}

/// Two's-complement encoding of `v` in `bits` bits.
pub fn from_signed(v: i128, bits: u32) -> u128 {
    if bits >= 128 {
        v as u128
    } else {
        (v as u128) & ((1u128 << bits) - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("operand widths do not match")]
    WidthMismatch,
    #[error("{0}")]
    ParameterOutOfRange(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("internal construction error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signedness {
    Unsigned,
    Signed,
}

impl Signedness {
    fn tag(self) -> &'static str {
        match self {
            Signedness::Unsigned => "u",
            Signedness::Signed => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdderFamily {
    Rca,
    Cla,
    Cska,
}

impl AdderFamily {
    pub const ALL: [AdderFamily; 3] = [AdderFamily::Rca, AdderFamily::Cla, AdderFamily::Cska];

    pub fn name(self) -> &'static str {
        match self {
            AdderFamily::Rca => "rca",
            AdderFamily::Cla => "cla",
            AdderFamily::Cska => "cska",
        }
    }
}

impl FromStr for AdderFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rca" => Ok(AdderFamily::Rca),
            "cla" => Ok(AdderFamily::Cla),
            "cska" => Ok(AdderFamily::Cska),
            other => Err(format!("unknown adder family `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdderSpec {
    pub family: AdderFamily,
    pub signedness: Signedness,
    pub width: usize,
    /// Carry-skip block size or lookahead group size.
    pub block_size: usize,
}

impl AdderSpec {
    pub fn new(family: AdderFamily, signedness: Signedness, width: usize) -> AdderSpec {
        AdderSpec {
            family,
            signedness,
            width,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }

    pub fn with_block_size(mut self, block_size: usize) -> AdderSpec {
        self.block_size = block_size;
        self
    }

    pub fn type_name(&self) -> String {
        format!("{}_{}{}", self.signedness.tag(), self.family.name(), self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultiplierFamily {
    Array,
    Dadda,
    Wallace,
    /// Broken array: `h` rows and `v` diagonals of cells cut.
    Bam {
        h: usize,
        v: usize,
    },
    /// Truncated: `k` least significant columns dropped.
    Tm {
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiplierSpec {
    pub family: MultiplierFamily,
    pub signedness: Signedness,
    pub width: usize,
    /// Final adder family of Dadda and Wallace trees (always unsigned).
    pub final_adder: AdderFamily,
    pub block_size: usize,
}

impl MultiplierSpec {
    pub fn new(family: MultiplierFamily, signedness: Signedness, width: usize) -> MultiplierSpec {
        MultiplierSpec {
            family,
            signedness,
            width,
            final_adder: AdderFamily::Rca,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }

    pub fn with_final_adder(mut self, family: AdderFamily) -> MultiplierSpec {
        self.final_adder = family;
        self
    }

    pub fn with_block_size(mut self, block_size: usize) -> MultiplierSpec {
        self.block_size = block_size;
        self
    }

    pub fn type_name(&self) -> String {
        let s = self.signedness.tag();
        let n = self.width;
        match self.family {
            MultiplierFamily::Array => format!("{s}_arrmul{n}"),
            MultiplierFamily::Dadda => format!("{s}_dadda_{}{n}", self.final_adder.name()),
            MultiplierFamily::Wallace => format!("{s}_wallace_{}{n}", self.final_adder.name()),
            MultiplierFamily::Bam { h, v } => format!("{s}_bam{n}_h{h}_v{v}"),
            MultiplierFamily::Tm { k } => format!("{s}_tm{n}_k{k}"),
        }
    }

    fn final_adder_spec(&self) -> AdderSpec {
        AdderSpec::new(self.final_adder, Signedness::Unsigned, self.width).with_block_size(self.block_size)
    }
}

/// Any circuit of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitSpec {
    HalfAdder,
    FullAdder,
    Adder(AdderSpec),
    Multiplier(MultiplierSpec),
    Divider { width: usize },
    Mac { width: usize },
}

/// Integer function of a circuit over raw input bus values, returning the
/// packed output (buses concatenated LSB first). `None` marks a don't-care
/// input such as division by zero.
pub type Reference = Box<dyn Fn(&[u128]) -> Option<u128> + Send + Sync>;

impl CircuitSpec {
    pub fn type_name(&self) -> String {
        match self {
            CircuitSpec::HalfAdder => "ha".into(),
            CircuitSpec::FullAdder => "fa".into(),
            CircuitSpec::Adder(a) => a.type_name(),
            CircuitSpec::Multiplier(m) => m.type_name(),
            CircuitSpec::Divider { width } => format!("u_arrdiv{width}"),
            CircuitSpec::Mac { width } => format!("u_mac{width}"),
        }
    }

    /// Operand width `N`.
    pub fn width(&self) -> usize {
        match self {
            CircuitSpec::HalfAdder | CircuitSpec::FullAdder => 1,
            CircuitSpec::Adder(a) => a.width,
            CircuitSpec::Multiplier(m) => m.width,
            CircuitSpec::Divider { width } | CircuitSpec::Mac { width } => *width,
        }
    }

    pub fn signedness(&self) -> Signedness {
        match self {
            CircuitSpec::Adder(a) => a.signedness,
            CircuitSpec::Multiplier(m) => m.signedness,
            _ => Signedness::Unsigned,
        }
    }

    /// Whether the circuit intentionally deviates from its reference.
    pub fn is_approximate(&self) -> bool {
        matches!(
            self,
            CircuitSpec::Multiplier(MultiplierSpec {
                family: MultiplierFamily::Bam { .. } | MultiplierFamily::Tm { .. },
                ..
            })
        )
    }

    pub fn check(&self) -> Result<(), ArithError> {
        let n = self.width();
        if n == 0 {
            return Err(ArithError::ParameterOutOfRange("width must be at least 1".into()));
        }
        match self {
            CircuitSpec::Adder(a) if a.block_size == 0 => {
                Err(ArithError::ParameterOutOfRange("block size must be at least 1".into()))
            }
            CircuitSpec::Multiplier(m) => {
                if m.block_size == 0 {
                    return Err(ArithError::ParameterOutOfRange("block size must be at least 1".into()));
                }
                match m.family {
                    MultiplierFamily::Bam { .. } | MultiplierFamily::Tm { .. }
                        if m.signedness == Signedness::Signed =>
                    {
                        Err(ArithError::Unsupported(
                            "approximate multipliers are unsigned only".into(),
                        ))
                    }
                    MultiplierFamily::Bam { h, v } if h > n || v > 2 * n - 1 => Err(ArithError::ParameterOutOfRange(
                        format!("broken-array cut h={h}, v={v} outside h <= {n}, v <= {}", 2 * n - 1),
                    )),
                    MultiplierFamily::Tm { k } if k > 2 * n - 1 => Err(ArithError::ParameterOutOfRange(format!(
                        "truncation k={k} outside k <= {}",
                        2 * n - 1
                    ))),
                    _ => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Builds the circuit as a top-level component.
    pub fn build(&self) -> Result<Circuit, ArithError> {
        self.check()?;
        let n = self.width();
        let mut b = Builder::new(&self.type_name())?;
        let outputs = match *self {
            CircuitSpec::HalfAdder => {
                let x = b.input_bus("a", 1)?.wire(0);
                let y = b.input_bus("b", 1)?.wire(0);
                let (s, c) = cells::half_adder_body(&mut b, x, y)?;
                vec![Bus::single("sum", s)?, Bus::single("carry", c)?]
            }
            CircuitSpec::FullAdder => {
                let x = b.input_bus("a", 1)?.wire(0);
                let y = b.input_bus("b", 1)?.wire(0);
                let z = b.input_bus("cin", 1)?.wire(0);
                let (s, c) = cells::full_adder_body(&mut b, x, y, z)?;
                vec![Bus::single("sum", s)?, Bus::single("cout", c)?]
            }
            CircuitSpec::Adder(spec) => {
                let x = b.input_bus("a", n)?;
                let y = b.input_bus("b", n)?;
                vec![adders::adder_body(&mut b, &spec, &x, &y)?]
            }
            CircuitSpec::Multiplier(spec) => {
                let x = b.input_bus("a", n)?;
                let y = b.input_bus("b", n)?;
                let out = match spec.family {
                    MultiplierFamily::Array => multipliers::array_body(&mut b, &x, &y, spec.signedness, |_, _| false)?,
                    MultiplierFamily::Dadda => {
                        multipliers::dadda_body(&mut b, &x, &y, spec.signedness, &spec.final_adder_spec())?
                    }
                    MultiplierFamily::Wallace => {
                        multipliers::wallace_body(&mut b, &x, &y, spec.signedness, &spec.final_adder_spec())?
                    }
                    MultiplierFamily::Bam { h, v } => multipliers::bam_body(&mut b, &x, &y, h, v)?,
                    MultiplierFamily::Tm { k } => multipliers::tm_body(&mut b, &x, &y, k)?,
                };
                vec![out]
            }
            CircuitSpec::Divider { .. } => {
                let x = b.input_bus("a", n)?;
                let y = b.input_bus("b", n)?;
                vec![divider::divider_body(&mut b, &x, &y)?]
            }
            CircuitSpec::Mac { .. } => {
                let x = b.input_bus("a", n)?;
                let y = b.input_bus("b", n)?;
                let r = b.input_bus("r", 2 * n)?;
                vec![mac::mac_body(&mut b, &x, &y, &r)?]
            }
        };
        Ok(b.finish(outputs)?)
    }

    /// Exact integer semantics; approximate multipliers map to the exact product.
    pub fn reference(&self) -> Reference {
        let n = self.width() as u32;
        match *self {
            CircuitSpec::HalfAdder => Box::new(|v| Some((v[0] ^ v[1]) | ((v[0] & v[1]) << 1))),
            CircuitSpec::FullAdder => Box::new(|v| {
                let s = v[0] + v[1] + v[2];
                Some((s & 1) | ((s >> 1) << 1))
            }),
            CircuitSpec::Adder(a) => match a.signedness {
                Signedness::Unsigned => Box::new(|v| Some(v[0] + v[1])),
                Signedness::Signed => {
                    Box::new(move |v| Some(from_signed(to_signed(v[0], n) + to_signed(v[1], n), n + 1)))
                }
            },
            CircuitSpec::Multiplier(m) => match m.signedness {
                Signedness::Unsigned => Box::new(|v| Some(v[0] * v[1])),
                Signedness::Signed => {
                    Box::new(move |v| Some(from_signed(to_signed(v[0], n) * to_signed(v[1], n), 2 * n)))
                }
            },
            CircuitSpec::Divider { .. } => Box::new(|v| (v[1] != 0).then(|| v[0] / v[1])),
            CircuitSpec::Mac { .. } => Box::new(|v| Some(v[0] * v[1] + v[2])),
        }
    }
}

impl fmt::Display for CircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.type_name())
    }
}

/// Every accurate and approximate circuit family at operand width `n`, with
/// default block sizes. Approximate multipliers use `h = 0, v = 1` and `k = 2`
/// (clamped to their parameter ranges).
pub fn catalog(n: usize) -> Vec<CircuitSpec> {
    use Signedness::*;
    let mut out = Vec::new();
    for s in [Unsigned, Signed] {
        for f in AdderFamily::ALL {
            out.push(CircuitSpec::Adder(AdderSpec::new(f, s, n)));
        }
    }
    for s in [Unsigned, Signed] {
        out.push(CircuitSpec::Multiplier(MultiplierSpec::new(
            MultiplierFamily::Array,
            s,
            n,
        )));
        for fam in [MultiplierFamily::Dadda, MultiplierFamily::Wallace] {
            for f in AdderFamily::ALL {
                out.push(CircuitSpec::Multiplier(
                    MultiplierSpec::new(fam, s, n).with_final_adder(f),
                ));
            }
        }
    }
    let max_cut = 2 * n - 1;
    out.push(CircuitSpec::Multiplier(MultiplierSpec::new(
        MultiplierFamily::Bam {
            h: 0,
            v: 1.min(max_cut),
        },
        Unsigned,
        n,
    )));
    out.push(CircuitSpec::Multiplier(MultiplierSpec::new(
        MultiplierFamily::Tm { k: 2.min(max_cut) },
        Unsigned,
        n,
    )));
    out.push(CircuitSpec::Divider { width: n });
    out.push(CircuitSpec::Mac { width: n });
    out
}
