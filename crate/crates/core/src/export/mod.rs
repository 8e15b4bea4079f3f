//! Verilog, BLIF, C and CGP writers.
//!
//! Every format except CGP has a flat variant (one module of gates) and a
//! hierarchical one (one module per distinct component body). Output is
//! deterministic and LF-terminated.

mod blif;
mod c;
mod cgp;
mod verilog;
mod view;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::netlist::{Circuit, Diagnostic, FlatNetlist, NetlistError, Signal};

pub use cgp::{parse_cgp, CgpChromosome, CgpError, CgpNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("circuit is not valid: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Cgp(#[from] CgpError),
    #[error("{0} bits exceed the 128-bit words of the C export")]
    TooWide(usize),
    #[error("the CGP format has no hierarchical variant")]
    CgpHierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Verilog,
    Blif,
    C,
    Cgp,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::Verilog, Format::Blif, Format::C, Format::Cgp];

    pub fn extension(self) -> &'static str {
        match self {
            Format::Verilog => "v",
            Format::Blif => "blif",
            Format::C => "c",
            Format::Cgp => "cgp",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "verilog" | "v" => Ok(Format::Verilog),
            "blif" => Ok(Format::Blif),
            "c" => Ok(Format::C),
            "cgp" => Ok(Format::Cgp),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Verilog => "verilog",
            Format::Blif => "blif",
            Format::C => "c",
            Format::Cgp => "cgp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Flat,
    Hier,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "flat" => Ok(Variant::Flat),
            "hier" | "hierarchical" => Ok(Variant::Hier),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExportFormat {
    pub kind: Format,
    pub variant: Variant,
}

impl ExportFormat {
    pub fn new(kind: Format, variant: Variant) -> Result<ExportFormat, ExportError> {
        if kind == Format::Cgp && variant == Variant::Hier {
            return Err(ExportError::CgpHierarchical);
        }
        Ok(ExportFormat { kind, variant })
    }
}

fn validated(circuit: &Circuit) -> Result<(), ExportError> {
    let diags = circuit.validate();
    if diags.is_empty() {
        Ok(())
    } else {
        Err(ExportError::Invalid(diags))
    }
}

pub fn to_verilog(circuit: &Circuit, variant: Variant) -> Result<String, ExportError> {
    validated(circuit)?;
    Ok(match variant {
        Variant::Flat => verilog::flat(&circuit.flatten()?),
        Variant::Hier => verilog::hierarchical(circuit),
    })
}

pub fn to_blif(circuit: &Circuit, variant: Variant) -> Result<String, ExportError> {
    validated(circuit)?;
    Ok(match variant {
        Variant::Flat => blif::flat(&circuit.flatten()?),
        Variant::Hier => blif::hierarchical(circuit),
    })
}

pub fn to_c(circuit: &Circuit, variant: Variant) -> Result<String, ExportError> {
    validated(circuit)?;
    match variant {
        Variant::Flat => c::flat(&circuit.flatten()?),
        Variant::Hier => c::hierarchical(circuit),
    }
}

pub fn to_cgp(net: &FlatNetlist) -> Result<String, ExportError> {
    Ok(CgpChromosome::from_netlist(net)?.to_text())
}

/// Writers for netlists that have no hierarchy, such as search results.
pub fn flat_verilog(net: &FlatNetlist) -> Result<String, ExportError> {
    net.check()?;
    Ok(verilog::flat(net))
}

pub fn flat_blif(net: &FlatNetlist) -> Result<String, ExportError> {
    net.check()?;
    Ok(blif::flat(net))
}

pub fn flat_c(net: &FlatNetlist) -> Result<String, ExportError> {
    net.check()?;
    c::flat(net)
}

pub fn export(circuit: &Circuit, format: ExportFormat) -> Result<String, ExportError> {
    match format.kind {
        Format::Verilog => to_verilog(circuit, format.variant),
        Format::Blif => to_blif(circuit, format.variant),
        Format::C => to_c(circuit, format.variant),
        Format::Cgp => {
            if format.variant == Variant::Hier {
                return Err(ExportError::CgpHierarchical);
            }
            validated(circuit)?;
            to_cgp(&circuit.flatten()?)
        }
    }
}

/// Net names of a flat netlist in formats that address port bits directly.
struct FlatNames {
    /// Per gate: the first output port bit it drives, else its own name.
    gate: Vec<String>,
    is_port: Vec<bool>,
    /// Per output bus: bits not named after a gate, with their drivers.
    extra: Vec<Vec<(usize, Signal)>>,
}

fn flat_output_names(net: &FlatNetlist, port: impl Fn(&str, usize) -> String) -> FlatNames {
    let mut gate: Vec<String> = net.gates.iter().map(|g| g.name.clone()).collect();
    let mut is_port = vec![false; net.gates.len()];
    let mut extra = Vec::with_capacity(net.outputs.len());
    for bus in &net.outputs {
        let mut rest = Vec::new();
        for (bit, &s) in bus.bits.iter().enumerate() {
            match s {
                Signal::Gate(g) if !is_port[g] => {
                    gate[g] = port(&bus.name, bit);
                    is_port[g] = true;
                }
                _ => rest.push((bit, s)),
            }
        }
        extra.push(rest);
    }
    FlatNames { gate, is_port, extra }
}
