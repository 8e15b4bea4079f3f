use crate::netlist::{Child, Circuit, ComponentId, NetlistError, Wire, WireSource};

use super::{Result, SimError};

/// Evaluates a circuit by walking its component tree, without flattening.
///
/// Takes and returns one word per bit (inputs and outputs concatenated in
/// bus order), so 64 vectors are simulated at once.
pub fn simulate_hierarchical(circuit: &Circuit, inputs: &[u64]) -> Result<Vec<u64>> {
    let bits: usize = circuit.inputs().iter().map(|b| b.width()).sum();
    if inputs.len() != bits {
        return Err(SimError::InputCount {
            expected: bits,
            got: inputs.len(),
        });
    }
    let mut env: Vec<Option<u64>> = vec![None; circuit.wire_count()];
    env[Wire::CONST0.index()] = Some(0);
    env[Wire::CONST1.index()] = Some(u64::MAX);
    let mut k = 0;
    for bus in circuit.inputs() {
        for &w in bus.wires() {
            env[w.index()] = Some(inputs[k]);
            k += 1;
        }
    }
    eval_component(circuit, circuit.top_id(), &mut env)?;
    let mut out = Vec::new();
    for bus in circuit.outputs() {
        for &w in bus.wires() {
            out.push(read(circuit, &env, w)?);
        }
    }
    Ok(out)
}

fn read(circuit: &Circuit, env: &[Option<u64>], w: Wire) -> Result<u64> {
    if let Some(v) = env[w.index()] {
        return Ok(v);
    }
    // top-level output ports alias a body wire
    match circuit.wire(w).source {
        WireSource::Alias(t) => read(circuit, env, t),
        _ => Err(NetlistError::Undriven(circuit.wire_name(w).to_string()).into()),
    }
}

fn eval_component(circuit: &Circuit, id: ComponentId, env: &mut Vec<Option<u64>>) -> Result<()> {
    let comp = circuit.component(id);
    for child in &comp.children {
        match *child {
            Child::Gate(g) => {
                let gate = circuit.gate(g);
                let a = read(circuit, env, gate.a)?;
                let b = match gate.b {
                    Some(b) => read(circuit, env, b)?,
                    None => a,
                };
                env[gate.output.index()] = Some(gate.kind.eval_word(a, b));
            }
            Child::Component(c) => {
                eval_component(circuit, c, env)?;
                for bus in &circuit.component(c).outputs {
                    for &port in bus.wires() {
                        let WireSource::Alias(inner) = circuit.wire(port).source else {
                            return Err(NetlistError::Undriven(circuit.wire_name(port).to_string()).into());
                        };
                        env[port.index()] = Some(read(circuit, env, inner)?);
                    }
                }
            }
        }
    }
    Ok(())
}
