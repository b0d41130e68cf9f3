//! Qubit-register preparation of the initial purified state
//! |W(0)> = sum_i sqrt(p_i) |i>|i> from binary-tree-parameterized weights,
//! a small statevector simulator over the doubled register, and the register
//! version of the meridian protocol.
//!
//! Register layout: 2n qubits, system on the high-order n bits, ancilla on
//! the low-order n bits. Qubit pair k addresses bit (n-1-k) of each register,
//! so pair 0 is the most significant. Weight index i maps the spin states
//! ascending in m (p_0 = lambda_{-j}); `ascending_index` is the single place
//! that converts to the descending-m matrix basis used elsewhere.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holonomy::chi;
use crate::linalg::CMatrix;
use crate::protocol::ProtocolSchedule;
use crate::spin::{hermitian_exp, SpinOperators};
use crate::thermal::ThermalSpec;

/// 2^n nonnegative weights summing to one; trailing entries beyond the spin
/// dimension are zero padding.
#[derive(Debug, Clone)]
pub struct WeightVector {
    p: Vec<f64>,
    n: usize,
}

impl WeightVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let len = p.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidWeights(len as f64));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || p.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidWeights(sum));
        }
        Ok(Self {
            p,
            n: len.trailing_zeros() as usize,
        })
    }

    /// Boltzmann weights of the thermal state, ascending in m
    /// (p_0 = lambda_{-j}), padded with zeros to the next power of two.
    pub fn from_thermal(spec: &ThermalSpec) -> Result<Self> {
        let mut p: Vec<f64> = spec.boltzmann_weights();
        p.reverse();
        let len = p.len().next_power_of_two().max(2);
        p.resize(len, 0.0);
        Self::new(p)
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }

    /// Qubits per register.
    pub fn qubits(&self) -> usize {
        self.n
    }
}

/// Register (ascending-m) index of descending-m matrix row `k`.
fn ascending_index(dim: usize, k: usize) -> usize {
    dim - 1 - k
}

/// Binary-tree angles reproducing sqrt(p_i) as products of cosines and sines:
/// the node at heap index v splits the probability mass of its index range.
#[derive(Debug, Clone)]
pub struct AngleTree {
    alphas: Vec<f64>,
    n: usize,
}

impl AngleTree {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Forward evaluation of the parameterization: the reconstruction oracle.
    pub fn reconstruct_weights(&self) -> Vec<f64> {
        let count = 1usize << self.n;
        (0..count)
            .map(|i| {
                let mut node = 0usize;
                let mut amp = 1.0;
                for level in 0..self.n {
                    let bit = (i >> (self.n - 1 - level)) & 1;
                    let alpha = self.alphas[node];
                    amp *= if bit == 0 { alpha.cos() } else { alpha.sin() };
                    node = 2 * node + 1 + bit;
                }
                amp * amp
            })
            .collect()
    }
}

/// Inverts the cos/sin product parameterization by recursive binary splits
/// of the probability mass; exhausted (zero-mass) branches get alpha = 0.
pub fn angles_from_weights(w: &WeightVector) -> AngleTree {
    let count = 1usize << w.n;
    let mut alphas = vec![0.0; count - 1];
    // Heap order: node v covers a contiguous index range; children at 2v+1, 2v+2.
    let mut stack = vec![(0usize, 0usize, count)];
    while let Some((node, lo, hi)) = stack.pop() {
        if hi - lo < 2 {
            continue;
        }
        let half = (lo + hi) / 2;
        let left: f64 = w.p[lo..half].iter().sum();
        let right: f64 = w.p[half..hi].iter().sum();
        alphas[node] = right.sqrt().atan2(left.sqrt());
        stack.push((2 * node + 1, lo, half));
        stack.push((2 * node + 2, half, hi));
    }
    AngleTree { alphas, n: w.n }
}

/// One controlled rotation on a qubit pair: acts jointly on the system and
/// ancilla qubits of `pair`, rotating within span{|00>, |11>}, conditioned on
/// the earlier pairs matching `controls` (one bit per pair, both qubits).
#[derive(Debug, Clone)]
pub struct Gate {
    pub pair: usize,
    pub controls: Vec<u8>,
    pub alpha: f64,
}

/// The preparation circuit: 2^n - 1 gates in tree-level order, control
/// patterns ascending within each level.
#[derive(Debug, Clone)]
pub struct PrepCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

pub fn build_prep_circuit(tree: &AngleTree) -> PrepCircuit {
    let mut gates = Vec::with_capacity((1 << tree.n) - 1);
    for level in 0..tree.n {
        let first = (1usize << level) - 1;
        for offset in 0..(1usize << level) {
            let controls = (0..level)
                .map(|q| ((offset >> (level - 1 - q)) & 1) as u8)
                .collect();
            gates.push(Gate {
                pair: level,
                controls,
                alpha: tree.alphas[first + offset],
            });
        }
    }
    PrepCircuit { n: tree.n, gates }
}

/// Full register state, 2^(2n) amplitudes.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub qubits: usize,
}

impl StateVector {
    fn zero_state(qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes, qubits }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn apply_gate(state: &mut StateVector, gate: &Gate, n: usize) {
    let sys_bit = 1usize << (2 * n - 1 - gate.pair);
    let anc_bit = 1usize << (n - 1 - gate.pair);
    let (cos_a, sin_a) = (gate.alpha.cos(), gate.alpha.sin());
    for f in 0..state.amplitudes.len() {
        if f & sys_bit != 0 || f & anc_bit != 0 {
            continue;
        }
        let controls_ok = gate.controls.iter().enumerate().all(|(q, &bit)| {
            let s = (f >> (2 * n - 1 - q)) & 1;
            let a = (f >> (n - 1 - q)) & 1;
            s == bit as usize && a == bit as usize
        });
        if !controls_ok {
            continue;
        }
        let partner = f | sys_bit | anc_bit;
        let lo = state.amplitudes[f];
        let hi = state.amplitudes[partner];
        state.amplitudes[f] = lo * cos_a - hi * sin_a;
        state.amplitudes[partner] = lo * sin_a + hi * cos_a;
    }
}

/// Runs the preparation circuit on |0...0>. The output carries sqrt(p_i) on
/// the doubled basis indices (i, i) and nothing elsewhere.
pub fn simulate(circ: &PrepCircuit) -> Result<StateVector> {
    let qubits = 2 * circ.n;
    if qubits > 24 {
        return Err(Error::RegisterTooLarge { qubits });
    }
    let mut state = StateVector::zero_state(qubits);
    for gate in &circ.gates {
        apply_gate(&mut state, gate, circ.n);
    }
    Ok(state)
}

/// J_y of the spin embedded in the 2^n register basis (ascending-m indices,
/// zero action on padding states).
fn embedded_jy(ops: &SpinOperators, n: usize) -> Result<CMatrix> {
    let dim = ops.j.dim();
    let register = 1usize << n;
    if dim > register {
        return Err(Error::EmbeddingMismatch { dim, register });
    }
    let mut jy = CMatrix::zeros(register, register);
    for k in 0..dim {
        for kp in 0..dim {
            jy[(ascending_index(dim, k), ascending_index(dim, kp))] = ops.jy[(k, kp)];
        }
    }
    Ok(jy)
}

/// Register states at uniformly sampled t under U_S(t) (x) U_A(t) applied to
/// the circuit-prepared |W(0)>, per the digital-simulation protocol.
pub fn register_trajectory(
    circ: &PrepCircuit,
    spec: &ThermalSpec,
    sched: &ProtocolSchedule,
    n_steps: usize,
) -> Result<Vec<(f64, StateVector)>> {
    let prepared = simulate(circ)?;
    let ops = SpinOperators::new(spec.j());
    let jy = embedded_jy(&ops, circ.n)?;
    let eta = 1.0 - chi(spec);
    let register = 1usize << circ.n;
    let m0 = CMatrix::from_fn(register, register, |i, l| prepared.amplitudes[i * register + l]);
    let mut out = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let t = k as f64 / n_steps as f64;
        let theta = sched.theta(t);
        let us = hermitian_exp(&jy, theta)?;
        let ua = hermitian_exp(&jy, eta * theta)?;
        let mt = &us * &m0 * ua.transpose();
        let amplitudes = (0..register * register)
            .map(|f| mt[(f / register, f % register)])
            .collect();
        out.push((
            t,
            StateVector {
                amplitudes,
                qubits: prepared.qubits,
            },
        ));
    }
    Ok(out)
}

/// End-to-end overlap <W(0)|W(1)> of the register protocol; equals the
/// analytic great-circle Loschmidt amplitude.
pub fn run_protocol_on_register(
    circ: &PrepCircuit,
    spec: &ThermalSpec,
    sched: &ProtocolSchedule,
) -> Result<Complex64> {
    let ends = register_trajectory(circ, spec, sched, 1)?;
    let v0 = &ends.first().unwrap().1.amplitudes;
    let v1 = &ends.last().unwrap().1.amplitudes;
    Ok(v0.iter().zip(v1.iter()).map(|(a, b)| a.conj() * b).sum())
}

/// Line-oriented circuit export, one gate per line:
/// `ROT pair=<k> controls=<bitpattern|-> alpha=<radians, 12 sig figs>`.
pub fn circuit_to_text(circ: &PrepCircuit) -> String {
    let mut out = String::new();
    for gate in &circ.gates {
        let controls = if gate.controls.is_empty() {
            "-".to_string()
        } else {
            gate.controls.iter().map(|b| b.to_string()).collect()
        };
        out.push_str(&format!(
            "ROT pair={} controls={} alpha={:.11e}\n",
            gate.pair, controls, gate.alpha
        ));
    }
    out
}
