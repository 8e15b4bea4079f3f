//! Test-side oracles: integer semantics written independently of the
//! library, a small BLIF interpreter and a harness that compiles emitted C.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use arithgen::arith::{AdderFamily, CircuitSpec, MultiplierFamily, Signedness};

/// Value of the low `n` bits of `v` read as two's complement.
pub fn sext(v: u128, n: usize) -> i128 {
    let v = v & ((1u128 << n) - 1);
    if (v >> (n - 1)) & 1 == 1 {
        v as i128 - (1i128 << n)
    } else {
        v as i128
    }
}

/// `v` encoded in `n` bits of two's complement.
pub fn enc(v: i128, n: usize) -> u128 {
    v.rem_euclid(1i128 << n) as u128
}

/// Expected packed output, `None` for don't-care inputs. Approximate
/// multipliers are modelled by their cell-omission rule.
pub fn oracle(spec: &CircuitSpec, x: &[u128]) -> Option<u128> {
    let n = spec.width();
    match spec {
        CircuitSpec::HalfAdder => Some((x[0] ^ x[1]) | ((x[0] & x[1]) << 1)),
        CircuitSpec::FullAdder => {
            let s = x[0] + x[1] + x[2];
            Some((s & 1) | ((s >> 1) << 1))
        }
        CircuitSpec::Adder(a) => Some(match a.signedness {
            Signedness::Unsigned => x[0] + x[1],
            Signedness::Signed => enc(sext(x[0], n) + sext(x[1], n), n + 1),
        }),
        CircuitSpec::Multiplier(m) => Some(match (m.family, m.signedness) {
            (MultiplierFamily::Bam { h, v }, _) => kept_cells(x[0], x[1], n, |i, j| i + j >= v && j >= h),
            (MultiplierFamily::Tm { k }, _) => kept_cells(x[0], x[1], n, |i, j| i + j >= k),
            (_, Signedness::Unsigned) => x[0] * x[1],
            (_, Signedness::Signed) => enc(sext(x[0], n) * sext(x[1], n), 2 * n),
        }),
        CircuitSpec::Divider { .. } => (x[1] != 0).then(|| x[0] / x[1]),
        CircuitSpec::Mac { .. } => Some(x[0] * x[1] + x[2]),
    }
}

/// Exact product for any multiplier, used to measure approximation error.
pub fn exact_product(spec: &CircuitSpec, x: &[u128]) -> u128 {
    x[0] * x[1] & ((1u128 << (2 * spec.width())) - 1)
}

/// Sum of the partial products `a_i b_j 2^(i+j)` whose cell is kept.
pub fn kept_cells(a: u128, b: u128, n: usize, keep: impl Fn(usize, usize) -> bool) -> u128 {
    let mut s = 0;
    for i in 0..n {
        for j in 0..n {
            if keep(i, j) {
                s += (((a >> i) & 1) * ((b >> j) & 1)) << (i + j);
            }
        }
    }
    s
}

pub fn input_widths(spec: &CircuitSpec) -> Vec<usize> {
    let n = spec.width();
    match spec {
        CircuitSpec::HalfAdder => vec![1, 1],
        CircuitSpec::FullAdder => vec![1, 1, 1],
        CircuitSpec::Mac { .. } => vec![n, n, 2 * n],
        _ => vec![n, n],
    }
}

/// Every input vector of the given bus widths, enumerated with bus 0 as the
/// least significant digit.
pub fn all_vectors(widths: &[usize]) -> impl Iterator<Item = Vec<u128>> + '_ {
    let total: usize = widths.iter().sum();
    (0u128..1 << total).map(move |mut p| {
        widths
            .iter()
            .map(|&w| {
                let v = p & ((1 << w) - 1);
                p >>= w;
                v
            })
            .collect()
    })
}

pub fn adder_families() -> [AdderFamily; 3] {
    [AdderFamily::Rca, AdderFamily::Cla, AdderFamily::Cska]
}

// ---------------------------------------------------------------- BLIF

#[derive(Debug, Default)]
struct Model {
    inputs: Vec<String>,
    outputs: Vec<String>,
    /// net -> (fan-in nets, cover rows)
    names: HashMap<String, (Vec<String>, Vec<String>)>,
    subckts: Vec<(String, Vec<(String, String)>)>,
    /// net -> (subckt index, formal port)
    driven_by_subckt: HashMap<String, (usize, String)>,
}

/// A parsed BLIF file; the first model is the top.
#[derive(Debug)]
pub struct Blif {
    models: HashMap<String, Model>,
    top: String,
}

impl Blif {
    pub fn parse(text: &str) -> Blif {
        let mut models = HashMap::new();
        let mut top = None;
        let mut cur: Option<(String, Model)> = None;
        let mut pending: Option<(String, Vec<String>, Vec<String>)> = None;
        let flush = |cur: &mut Option<(String, Model)>, pending: &mut Option<(String, Vec<String>, Vec<String>)>| {
            if let (Some((_, m)), Some((out, ins, rows))) = (cur.as_mut(), pending.take()) {
                assert!(
                    m.names.insert(out.clone(), (ins, rows)).is_none(),
                    "net {out} driven twice"
                );
            }
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().unwrap();
            if !head.starts_with('.') {
                pending
                    .as_mut()
                    .expect("cover row outside .names")
                    .2
                    .push(line.to_string());
                continue;
            }
            flush(&mut cur, &mut pending);
            match head {
                ".model" => {
                    let name = tok.next().unwrap().to_string();
                    top.get_or_insert(name.clone());
                    cur = Some((name, Model::default()));
                }
                ".inputs" => cur.as_mut().unwrap().1.inputs.extend(tok.map(String::from)),
                ".outputs" => cur.as_mut().unwrap().1.outputs.extend(tok.map(String::from)),
                ".names" => {
                    let mut nets: Vec<String> = tok.map(String::from).collect();
                    let out = nets.pop().expect(".names needs an output");
                    pending = Some((out, nets, Vec::new()));
                }
                ".subckt" => {
                    let m = &mut cur.as_mut().unwrap().1;
                    let model = tok.next().unwrap().to_string();
                    let conns: Vec<(String, String)> = tok
                        .map(|c| {
                            let (f, a) = c.split_once('=').expect("formal=actual");
                            (f.to_string(), a.to_string())
                        })
                        .collect();
                    m.subckts.push((model, conns));
                }
                ".end" => {
                    let (name, m) = cur.take().expect(".end without .model");
                    models.insert(name, m);
                }
                other => panic!("unsupported BLIF construct {other}"),
            }
        }
        // outputs of subcircuits are resolved once all models are known
        let formal_outputs: HashMap<String, Vec<String>> =
            models.iter().map(|(k, m)| (k.clone(), m.outputs.clone())).collect();
        for m in models.values_mut() {
            for (idx, (model, conns)) in m.subckts.iter().enumerate() {
                let outs = &formal_outputs[model];
                for (f, a) in conns {
                    if outs.contains(f) {
                        m.driven_by_subckt.insert(a.clone(), (idx, f.clone()));
                    }
                }
            }
        }
        Blif {
            models,
            top: top.expect("no model"),
        }
    }

    pub fn top_inputs(&self) -> &[String] {
        &self.models[&self.top].inputs
    }

    /// Evaluates the top model on 64 vectors at once (one word per input).
    pub fn eval(&self, inputs: &[u64]) -> Vec<u64> {
        self.eval_model(&self.top, inputs)
    }

    fn eval_model(&self, name: &str, inputs: &[u64]) -> Vec<u64> {
        let m = &self.models[name];
        assert_eq!(inputs.len(), m.inputs.len());
        let mut env: HashMap<String, u64> = m.inputs.iter().cloned().zip(inputs.iter().copied()).collect();
        let mut subs: HashMap<usize, HashMap<String, u64>> = HashMap::new();
        m.outputs.iter().map(|o| self.net(m, o, &mut env, &mut subs)).collect()
    }

    fn net(
        &self,
        m: &Model,
        net: &str,
        env: &mut HashMap<String, u64>,
        subs: &mut HashMap<usize, HashMap<String, u64>>,
    ) -> u64 {
        if let Some(&v) = env.get(net) {
            return v;
        }
        let v = if let Some((ins, rows)) = m.names.get(net) {
            let vals: Vec<u64> = ins.iter().map(|i| self.net(m, i, env, subs)).collect();
            let mut acc = 0u64;
            for row in rows {
                let (pattern, out) = match row.split_once(' ') {
                    Some((p, o)) => (p, o),
                    None => ("", row.as_str()),
                };
                assert_eq!(out, "1", "only ON-set covers are emitted");
                let mut term = u64::MAX;
                for (c, v) in pattern.chars().zip(&vals) {
                    term &= match c {
                        '1' => *v,
                        '0' => !*v,
                        '-' => u64::MAX,
                        other => panic!("bad cover literal {other}"),
                    };
                }
                acc |= term;
            }
            acc
        } else if let Some((idx, formal)) = m.driven_by_subckt.get(net) {
            if !subs.contains_key(idx) {
                let (model, conns) = &m.subckts[*idx];
                let sub = &self.models[model];
                let args: Vec<u64> = sub
                    .inputs
                    .iter()
                    .map(|f| {
                        let actual = &conns.iter().find(|(cf, _)| cf == f).expect("input connected").1;
                        self.net(m, actual, env, subs)
                    })
                    .collect();
                let outs = self.eval_model(model, &args);
                subs.insert(*idx, sub.outputs.iter().cloned().zip(outs).collect());
            }
            subs[idx][formal]
        } else {
            panic!("net {net} has no driver");
        };
        env.insert(net.to_string(), v);
        v
    }
}

// ---------------------------------------------------------------- C

fn c_type(bits: usize) -> &'static str {
    if bits <= 64 {
        "uint64_t"
    } else {
        "unsigned __int128"
    }
}

/// Compiles `source` with a driver that calls `function` on every input
/// vector (bus 0 least significant) and returns the outputs in order.
pub fn run_c(dir: &Path, source: &str, function: &str, widths: &[usize]) -> Vec<u128> {
    let total: usize = widths.iter().sum();
    let mut driver = String::from(source);
    driver.push_str("\n#include <stdio.h>\nint main(void) {\n");
    driver.push_str(&format!(
        "  for (unsigned long long v = 0; v < (1ULL << {total}); v++) {{\n"
    ));
    let mut args = Vec::new();
    let mut shift = 0;
    for &w in widths {
        args.push(format!("({})((v >> {shift}) & ((1ULL << {w}) - 1))", c_type(w)));
        shift += w;
    }
    driver.push_str(&format!("    unsigned __int128 r = {function}({});\n", args.join(", ")));
    driver.push_str(
        "    printf(\"%016llx%016llx\\n\", (unsigned long long)(r >> 64), (unsigned long long)r);\n  }\n  return 0;\n}\n",
    );
    let src = dir.join(format!("{function}.c"));
    let exe = dir.join(function);
    std::fs::write(&src, driver).unwrap();
    let status = Command::new("cc")
        .args(["-O0", "-w", "-o"])
        .arg(&exe)
        .arg(&src)
        .status()
        .expect("a C compiler (`cc`) is required");
    assert!(status.success(), "C compilation failed for {function}");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| u128::from_str_radix(l, 16).unwrap())
        .collect()
}

// ---------------------------------------------------------------- simulation

use arithgen::netlist::FlatNetlist;
use arithgen::sim::Program;

/// Input words for lanes `64 * batch ..` of an exhaustive sweep: lane `l`
/// carries vector number `64 * batch + l`.
pub fn sweep_words(total_bits: usize, batch: u128) -> Vec<u64> {
    (0..total_bits)
        .map(|bit| (0..64).fold(0u64, |w, l| w | ((((batch * 64 + l as u128) >> bit) & 1) as u64) << l))
        .collect()
}

/// Number of live lanes in the given batch of a sweep over `total_bits`.
pub fn sweep_lanes(total_bits: usize, batch: u128) -> usize {
    ((1u128 << total_bits) - batch * 64).min(64) as usize
}

/// Packs lane `l` of a list of output words into an integer.
pub fn lane(words: &[u64], l: usize) -> u128 {
    words
        .iter()
        .enumerate()
        .fold(0u128, |acc, (k, w)| acc | (((w >> l) & 1) as u128) << k)
}

/// Packed outputs of the internal simulator for every input vector, in the
/// order of [`all_vectors`].
pub fn simulate_all(net: &FlatNetlist, widths: &[usize]) -> Vec<u128> {
    let total: usize = widths.iter().sum();
    assert_eq!(total, net.input_bits());
    let prog = Program::new(net).unwrap();
    let mut res = Vec::with_capacity(1 << total);
    for batch in 0..(1u128 << total).div_ceil(64) {
        let out = prog.run(&sweep_words(total, batch));
        res.extend((0..sweep_lanes(total, batch)).map(|l| lane(&out, l)));
    }
    res
}

/// Compares a circuit with [`oracle`] on every input vector.
pub fn check_exhaustive(spec: &CircuitSpec) -> Result<u64, String> {
    let net = spec
        .build()
        .map_err(|e| e.to_string())?
        .flatten()
        .map_err(|e| e.to_string())?;
    let widths = input_widths(spec);
    let got = simulate_all(&net, &widths);
    let mut checked = 0;
    for (x, y) in all_vectors(&widths).zip(got) {
        if let Some(want) = oracle(spec, &x) {
            if want != y {
                return Err(format!("{spec}: inputs {x:?} expected {want} got {y}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Runs a flat BLIF text on every input vector, returning packed outputs.
pub fn blif_all(text: &str, widths: &[usize]) -> Vec<u128> {
    let blif = Blif::parse(text);
    let total: usize = widths.iter().sum();
    assert_eq!(blif.top_inputs().len(), total);
    let mut res = Vec::with_capacity(1 << total);
    for batch in 0..(1u128 << total).div_ceil(64) {
        let out = blif.eval(&sweep_words(total, batch));
        res.extend((0..sweep_lanes(total, batch)).map(|l| lane(&out, l)));
    }
    res
}
