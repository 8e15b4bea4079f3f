//! Gate-level arithmetic circuit generator.
//!
//! Circuits are built hierarchically with [`netlist::Builder`], flattened
//! into [`netlist::FlatNetlist`], simulated bit-parallel by [`sim`] and
//! written out by [`export`] as Verilog, BLIF, C or CGP chromosomes.
//! [`search`] shrinks CGP chromosomes under a worst-case error bound.

pub mod arith;
pub mod export;
pub mod netlist;
pub mod search;
pub mod sim;
