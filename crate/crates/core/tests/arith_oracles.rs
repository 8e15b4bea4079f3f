mod common;

use std::collections::HashSet;

use arithgen::arith::{
    catalog, dadda_targets, full_adder, full_subtractor, generate_pp, half_adder, half_subtractor, AdderFamily,
    AdderSpec, CircuitSpec, MultiplierFamily, MultiplierSpec, Signedness,
};
use arithgen::netlist::{Builder, Bus, Circuit, Diagnostic, FlatNetlist, Wire};
use arithgen::sim::{evaluate, stats};
use common::*;

use Signedness::{Signed, Unsigned};

fn flat(spec: &CircuitSpec) -> FlatNetlist {
    spec.build().unwrap().flatten().unwrap()
}

fn eval_packed(net: &FlatNetlist, x: &[u128]) -> u128 {
    let outs = evaluate(net, x).unwrap();
    let mut packed = 0;
    let mut shift = 0;
    for (o, v) in net.outputs.iter().zip(outs) {
        packed |= v << shift;
        shift += o.bits.len();
    }
    packed
}

fn mul(family: MultiplierFamily, s: Signedness, n: usize) -> CircuitSpec {
    CircuitSpec::Multiplier(MultiplierSpec::new(family, s, n))
}

#[test]
fn rca_examples() {
    let u = flat(&CircuitSpec::Adder(AdderSpec::new(AdderFamily::Rca, Unsigned, 8)));
    assert_eq!(eval_packed(&u, &[200, 100]), 300);
    let s = flat(&CircuitSpec::Adder(AdderSpec::new(AdderFamily::Rca, Signed, 8)));
    let out = eval_packed(&s, &[enc(-5, 8), 3]);
    assert_eq!(sext(out, 9), -2);
    assert_eq!(out, 0b1_1111_1110);
}

#[test]
fn adders_exhaustive() {
    for n in [1, 2, 3, 4] {
        for fam in adder_families() {
            for s in [Unsigned, Signed] {
                for block in 1..=n {
                    let spec = CircuitSpec::Adder(AdderSpec::new(fam, s, n).with_block_size(block));
                    let checked = check_exhaustive(&spec).unwrap();
                    assert_eq!(checked, 1 << (2 * n));
                }
            }
        }
    }
}

#[test]
fn array_multiplier_examples() {
    let u = flat(&mul(MultiplierFamily::Array, Unsigned, 4));
    assert_eq!(eval_packed(&u, &[3, 5]), 15);
    let s = flat(&mul(MultiplierFamily::Array, Signed, 4));
    assert_eq!(eval_packed(&s, &[enc(-8, 4), enc(-8, 4)]), 64);
    assert_eq!(sext(eval_packed(&s, &[enc(-8, 4), 7]), 8), -56);
}

#[test]
fn multipliers_exhaustive_n4() {
    for s in [Unsigned, Signed] {
        check_exhaustive(&mul(MultiplierFamily::Array, s, 4)).unwrap();
        for fa in adder_families() {
            for fam in [MultiplierFamily::Dadda, MultiplierFamily::Wallace] {
                let spec = CircuitSpec::Multiplier(MultiplierSpec::new(fam, s, 4).with_final_adder(fa));
                assert_eq!(check_exhaustive(&spec).unwrap(), 256);
            }
        }
    }
}

#[test]
fn dadda_n2_has_no_reduction_stage() {
    assert!(dadda_targets(2).is_empty());
    let mut b = Builder::new("t").unwrap();
    let x = b.input_bus("a", 2).unwrap();
    let y = b.input_bus("b", 2).unwrap();
    let pp = generate_pp(&mut b, &x, &y, Unsigned).unwrap();
    assert_eq!(pp.max_height(), 2);
    // no counters: the circuit is 4 AND cells plus the final adder only
    let circuit = flat(&mul(MultiplierFamily::Dadda, Unsigned, 2));
    let tree = circuit.gates.iter().filter(|g| !g.name.contains("final_adder")).count();
    assert_eq!(tree, 4);
    check_exhaustive(&mul(MultiplierFamily::Dadda, Unsigned, 2)).unwrap();
}

#[test]
fn bam_examples() {
    let exact = flat(&mul(MultiplierFamily::Array, Unsigned, 4));
    let bam00 = flat(&mul(MultiplierFamily::Bam { h: 0, v: 0 }, Unsigned, 4));
    let bam10 = flat(&mul(MultiplierFamily::Bam { h: 1, v: 0 }, Unsigned, 4));
    for x in all_vectors(&[4, 4]) {
        let p = x[0] * x[1];
        assert_eq!(eval_packed(&exact, &x), p);
        assert_eq!(eval_packed(&bam00, &x), p);
        assert_eq!(p - eval_packed(&bam10, &x), p - x[0] * (x[1] & !1));
    }
    for h in 0..=4 {
        for v in 0..=7 {
            check_exhaustive(&mul(MultiplierFamily::Bam { h, v }, Unsigned, 4)).unwrap();
        }
    }
}

#[test]
fn tm_examples() {
    let tm0 = flat(&mul(MultiplierFamily::Tm { k: 0 }, Unsigned, 4));
    for x in all_vectors(&[4, 4]) {
        assert_eq!(eval_packed(&tm0, &x), x[0] * x[1]);
    }
    let tm2 = flat(&mul(MultiplierFamily::Tm { k: 2 }, Unsigned, 8));
    assert_eq!(eval_packed(&tm2, &[255, 255]), 65025 - 5);
    let mut wce = 0;
    for x in all_vectors(&[8, 8]).step_by(7) {
        let y = eval_packed(&tm2, &x);
        assert_eq!(y & 0b11, 0);
        wce = wce.max(x[0] * x[1] - y);
    }
    assert!(wce <= 5);
}

#[test]
fn divider_examples() {
    let d = flat(&CircuitSpec::Divider { width: 4 });
    assert_eq!(eval_packed(&d, &[13, 4]), 3);
    assert_eq!(eval_packed(&d, &[5, 0]), 15);
    assert_eq!(check_exhaustive(&CircuitSpec::Divider { width: 4 }).unwrap(), 240);
    for n in 1..=3 {
        check_exhaustive(&CircuitSpec::Divider { width: n }).unwrap();
    }
}

#[test]
fn mac_examples() {
    let m = flat(&CircuitSpec::Mac { width: 4 });
    assert_eq!(eval_packed(&m, &[3, 5, 7]), 22);
    for x in 0..16 {
        for r in 0..256 {
            assert_eq!(eval_packed(&m, &[0, x, r]), r);
        }
    }
    for n in 1..=3 {
        check_exhaustive(&CircuitSpec::Mac { width: n }).unwrap();
    }
}

/// Builds a two-output circuit around one of the bit-level cells.
fn cell(arity: usize, f: impl FnOnce(&mut Builder, &[Bus]) -> (Wire, Wire)) -> Circuit {
    let mut b = Builder::new("cell").unwrap();
    let ins: Vec<Bus> = ["x", "y", "z"][..arity]
        .iter()
        .map(|n| b.input_bus(n, 1).unwrap())
        .collect();
    let (o0, o1) = f(&mut b, &ins);
    b.finish(vec![Bus::single("o0", o0).unwrap(), Bus::single("o1", o1).unwrap()])
        .unwrap()
}

#[test]
fn bit_cell_truth_tables() {
    let ha = cell(2, |b, i| half_adder(b, "ha", i[0].wire(0), i[1].wire(0)).unwrap())
        .flatten()
        .unwrap();
    let fa = cell(3, |b, i| {
        full_adder(b, "fa", i[0].wire(0), i[1].wire(0), i[2].wire(0)).unwrap()
    })
    .flatten()
    .unwrap();
    let hs = cell(2, |b, i| half_subtractor(b, "hs", i[0].wire(0), i[1].wire(0)).unwrap())
        .flatten()
        .unwrap();
    let fs = cell(3, |b, i| {
        full_subtractor(b, "fs", i[0].wire(0), i[1].wire(0), i[2].wire(0)).unwrap()
    })
    .flatten()
    .unwrap();
    assert_eq!(evaluate(&ha, &[1, 1]).unwrap(), vec![0, 1]);
    assert_eq!(evaluate(&ha, &[0, 0]).unwrap(), vec![0, 0]);
    assert_eq!(evaluate(&ha, &[1, 0]).unwrap(), vec![1, 0]);
    assert_eq!(evaluate(&fa, &[1, 1, 1]).unwrap(), vec![1, 1]);
    assert_eq!(evaluate(&fa, &[1, 1, 0]).unwrap(), vec![0, 1]);
    assert_eq!(evaluate(&fa, &[0, 0, 0]).unwrap(), vec![0, 0]);
    assert_eq!(evaluate(&hs, &[0, 1]).unwrap(), vec![1, 1]);
    assert_eq!(evaluate(&fs, &[0, 1, 1]).unwrap(), vec![0, 1]);
    assert_eq!(evaluate(&fs, &[1, 1, 0]).unwrap(), vec![0, 0]);
    for x in all_vectors(&[1, 1, 1]) {
        let s = x[0] + x[1] + x[2];
        assert_eq!(evaluate(&fa, &x).unwrap(), vec![s & 1, s >> 1]);
        let d = x[0] as i128 - x[1] as i128 - x[2] as i128;
        assert_eq!(
            evaluate(&fs, &x).unwrap(),
            vec![d.rem_euclid(2) as u128, (d < 0) as u128]
        );
    }
}

#[test]
fn flatten_gate_counts() {
    let ha = flat(&CircuitSpec::HalfAdder);
    assert_eq!(ha.gates.len(), 2);
    let fa = stats(&flat(&CircuitSpec::FullAdder));
    assert_eq!(fa.total_gates, 5);
    let kinds: Vec<(String, usize)> = fa
        .gate_counts
        .iter()
        .map(|(k, c)| (k.mnemonic().to_string(), *c))
        .collect();
    assert!(kinds.contains(&("xor".into(), 2)));
    assert!(kinds.contains(&("and".into(), 2)));
    assert!(kinds.contains(&("or".into(), 1)));
    // one HA cell, then N-1 FA cells
    for n in 1..=16 {
        let rca = flat(&CircuitSpec::Adder(AdderSpec::new(AdderFamily::Rca, Unsigned, n)));
        assert_eq!(rca.gates.len(), 2 + 5 * (n - 1), "n={n}");
    }
}

#[test]
fn flattened_names_are_unique() {
    for n in [1, 3, 4, 8] {
        for spec in catalog(n) {
            let net = flat(&spec);
            let mut names: HashSet<&str> = net.inputs.iter().map(|b| b.name.as_str()).collect();
            for g in &net.gates {
                assert!(names.insert(&g.name), "{spec}: duplicate {}", g.name);
            }
            let circuit = spec.build().unwrap();
            let all: HashSet<&str> = circuit.wire_ids().map(|w| circuit.wire_name(w)).collect();
            assert_eq!(all.len(), circuit.wire_count(), "{spec}");
        }
    }
}

#[test]
fn flatten_is_deterministic() {
    for spec in catalog(6) {
        assert_eq!(flat(&spec), flat(&spec));
    }
}

#[test]
fn catalog_validates() {
    for n in [1, 2, 5, 8, 16] {
        for spec in catalog(n) {
            assert_eq!(spec.build().unwrap().validate(), Vec::<Diagnostic>::new(), "{spec}");
        }
    }
}

#[test]
fn constructed_violations_are_diagnosed() {
    // a gate whose output loops back through one more gate
    let mut b = Builder::new("loop").unwrap();
    let x = b.input_bus("a", 2).unwrap();
    let g1 = b.and(x.wire(0), x.wire(1)).unwrap();
    let g2 = b.or(g1, x.wire(1)).unwrap();
    b.rewire(g1, 1, g2).unwrap();
    let c = b.finish(vec![Bus::single("o", g2).unwrap()]).unwrap();
    let diags = c.validate();
    assert!(diags.iter().any(|d| matches!(d, Diagnostic::Cycle { .. })), "{diags:?}");
    assert!(c.flatten().is_err());

    let mut b = Builder::new("open").unwrap();
    let x = b.input_bus("a", 1).unwrap();
    let f = b.floating_wire("dangling");
    let c = b.finish(vec![Bus::new("o", vec![x.wire(0), f]).unwrap()]).unwrap();
    let diags = c.validate();
    assert!(
        diags.iter().any(|d| matches!(d, Diagnostic::Undriven { .. })),
        "{diags:?}"
    );
}

#[test]
fn unconnected_child_input_rejected() {
    let mut b = Builder::new("top").unwrap();
    let f = b.floating_wire("x");
    let y = b.input_bus("b", 1).unwrap();
    assert!(half_adder(&mut b, "ha0", f, y.wire(0)).is_err());
}

#[test]
fn signed_dadda_wallace_n8_random_sample() {
    for fam in [MultiplierFamily::Dadda, MultiplierFamily::Wallace] {
        let spec = CircuitSpec::Multiplier(MultiplierSpec::new(fam, Signed, 8).with_final_adder(AdderFamily::Cska));
        let net = flat(&spec);
        for x in all_vectors(&[8, 8]).step_by(97) {
            assert_eq!(Some(eval_packed(&net, &x)), oracle(&spec, &x), "{spec} {x:?}");
        }
    }
}
