//! Kraus channels and a gate-level noise model.
//!
//! After every gate the model applies depolarizing noise on the touched qubits
//! (one- or two-qubit channel), then amplitude damping and phase damping on
//! each touched qubit. Channels with zero strength are skipped.

use serde::{Deserialize, Serialize};

use crate::circuits::{apply_gate_to_matrix, Circuit};
use crate::error::{Error, Result};
use crate::qmat::{pauli_pair, sandwich_local, ComplexMatrix, DensityMatrix, Pauli, C64};
use crate::rng::stream_rng;
use crate::tomography::{sample_multinomial, ShotRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub p_depol_1q: f64,
    pub p_depol_2q: f64,
    pub gamma_ad: f64,
    pub gamma_pd: f64,
    pub p_readout: f64,
}

impl Default for NoiseModel {
    /// Typical superconducting-device magnitudes.
    fn default() -> Self {
        NoiseModel {
            p_depol_1q: 0.001,
            p_depol_2q: 0.01,
            gamma_ad: 0.001,
            gamma_pd: 0.001,
            p_readout: 0.02,
        }
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        NoiseModel {
            p_depol_1q: 0.0,
            p_depol_2q: 0.0,
            gamma_ad: 0.0,
            gamma_pd: 0.0,
            p_readout: 0.0,
        }
    }

    pub fn is_ideal(&self) -> bool {
        *self == Self::ideal()
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_depol_1q", self.p_depol_1q),
            ("p_depol_2q", self.p_depol_2q),
            ("gamma_ad", self.gamma_ad),
            ("gamma_pd", self.gamma_pd),
            ("p_readout", self.p_readout),
        ];
        for (name, v) in fields {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn depolarizing_1q(p: f64) -> Vec<ComplexMatrix> {
    let mut k = vec![Pauli::I.matrix().scale_real((1.0 - 0.75 * p).sqrt())];
    for s in [Pauli::X, Pauli::Y, Pauli::Z] {
        k.push(s.matrix().scale_real((p / 4.0).sqrt()));
    }
    k
}

pub fn depolarizing_2q(p: f64) -> Vec<ComplexMatrix> {
    let mut k = Vec::with_capacity(16);
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let w = if a == Pauli::I && b == Pauli::I {
                1.0 - 15.0 * p / 16.0
            } else {
                p / 16.0
            };
            k.push(pauli_pair(a, b).scale_real(w.sqrt()));
        }
    }
    k
}

pub fn amplitude_damping(gamma: f64) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::from_rows(&[[real(1.0), real(0.0)], [real(0.0), real((1.0 - gamma).sqrt())]]),
        ComplexMatrix::from_rows(&[[real(0.0), real(gamma.sqrt())], [real(0.0), real(0.0)]]),
    ]
}

pub fn phase_damping(gamma: f64) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::from_rows(&[[real(1.0), real(0.0)], [real(0.0), real((1.0 - gamma).sqrt())]]),
        ComplexMatrix::from_rows(&[[real(0.0), real(0.0)], [real(0.0), real(gamma.sqrt())]]),
    ]
}

/// `‖Σ K†K − I‖_max`
pub fn completeness_error(kraus: &[ComplexMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let n = first.rows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for k in kraus {
        if k.rows() != n || k.cols() != n {
            return f64::INFINITY;
        }
        acc = &acc + &k.adjoint().matmul(k);
    }
    acc.max_abs_diff(&ComplexMatrix::identity(n))
}

/// `Σ K ρ K†` with the Kraus operators acting on `qubits`.
pub fn apply_channel(rho: &DensityMatrix, kraus: &[ComplexMatrix], qubits: &[usize]) -> Result<DensityMatrix> {
    let err = completeness_error(kraus);
    if err > 1e-10 {
        return Err(Error::NotCptp(err));
    }
    Ok(DensityMatrix::from_trusted(apply_unchecked(rho.mat(), kraus, qubits)?))
}

fn apply_unchecked(rho: &ComplexMatrix, kraus: &[ComplexMatrix], qubits: &[usize]) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for k in kraus {
        out = &out + &sandwich_local(rho, k, k, qubits)?;
    }
    Ok(out)
}

/// Runs `c` on `input` with `model` noise after each gate.
pub fn run_noisy(c: &Circuit, input: &DensityMatrix, model: &NoiseModel) -> Result<DensityMatrix> {
    model.validate()?;
    if input.dim() != c.dim() {
        return Err(Error::Dimension(format!(
            "circuit of dim {} on state of dim {}",
            c.dim(),
            input.dim()
        )));
    }
    let d1 = depolarizing_1q(model.p_depol_1q);
    let d2 = depolarizing_2q(model.p_depol_2q);
    let ad = amplitude_damping(model.gamma_ad);
    let pd = phase_damping(model.gamma_pd);
    let mut rho = input.mat().clone();
    for g in c.gates() {
        rho = apply_gate_to_matrix(&rho, g)?;
        let qs = g.qubits();
        if g.is_two_qubit() {
            if model.p_depol_2q > 0.0 {
                rho = apply_unchecked(&rho, &d2, &qs)?;
            }
        } else if model.p_depol_1q > 0.0 {
            rho = apply_unchecked(&rho, &d1, &qs)?;
        }
        for &q in &qs {
            if model.gamma_ad > 0.0 {
                rho = apply_unchecked(&rho, &ad, &[q])?;
            }
            if model.gamma_pd > 0.0 {
                rho = apply_unchecked(&rho, &pd, &[q])?;
            }
        }
    }
    Ok(DensityMatrix::from_trusted(rho))
}

/// Flip-pattern weights: none, second bit, first bit, both.
fn flip_weights(p: f64) -> [f64; 4] {
    [(1.0 - p) * (1.0 - p), (1.0 - p) * p, p * (1.0 - p), p * p]
}

/// Exact outcome distribution after independent bit flips of probability `p`.
pub fn readout_flip_probabilities(probs: &[f64; 4], p: f64) -> [f64; 4] {
    let w = flip_weights(p);
    let mut out = [0.0; 4];
    for (k, &pk) in probs.iter().enumerate() {
        for (f, &wf) in w.iter().enumerate() {
            out[k ^ f] += pk * wf;
        }
    }
    out
}

/// Applies independent readout bit flips to recorded counts.
pub fn readout_flip(rec: &ShotRecord, p: f64, seed: u64) -> Result<ShotRecord> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("readout flip probability {p} is outside [0, 1]")));
    }
    let w = flip_weights(p);
    let mut rng = stream_rng(seed, 0);
    let mut counts = [0u64; 4];
    for (k, &n) in rec.counts.iter().enumerate() {
        let split = sample_multinomial(&mut rng, n, &w);
        for (f, &m) in split.iter().enumerate() {
            counts[k ^ f] += m;
        }
    }
    ShotRecord::new(rec.setting, counts)
}
