//! Gates, circuits, ideal execution, and the circuit constructions for
//! X-state preparation and X-shaped two-qubit unitaries.
//!
//! Circuits are stored in application order (first gate applied first).
//! Qubit 0 is the most significant bit of a basis index.
//!
//! Conventions, as explicit matrices:
//!
//! | gate          | matrix                                                       |
//! |---------------|--------------------------------------------------------------|
//! | `RX(θ)`       | `[[cos θ/2, −i sin θ/2], [−i sin θ/2, cos θ/2]]`             |
//! | `RY(θ)`       | `[[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`                  |
//! | `RZ(θ)`       | `diag(e^{−iθ/2}, e^{iθ/2})`                                  |
//! | `U_LAMBDA(λ)` | `(1/√2) [[√(1+λ), −√(1−λ)], [√(1−λ), √(1+λ)]]`               |
//! | `W(x)`        | `diag(e^{−ix}, i e^{ix})`                                    |
//! | `PAULI_Z`     | `diag(1, −1)`                                                |
//! | `CNOT`        | flips `target` when `control` is 1                           |

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{HeisenbergParams, Sector};
use crate::qmat::{
    apply_local_vec, embed_local, qubit_count, sandwich_local, ComplexMatrix, DensityMatrix,
    UnitaryMatrix, C64, I, ONE, ZERO,
};
use crate::xstate::validate_probabilities;

/// Gate type together with its real parameter, if any.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Rx(f64),
    Ry(f64),
    Rz(f64),
    ULambda(f64),
    W(f64),
    PauliZ,
    Cnot,
    Generic1q(ComplexMatrix),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::ULambda(_) => "U_LAMBDA",
            GateKind::W(_) => "W",
            GateKind::PauliZ => "PAULI_Z",
            GateKind::Cnot => "CNOT",
            GateKind::Generic1q(_) => "GENERIC_1Q",
        }
    }

    fn params(&self) -> Vec<f64> {
        match self {
            GateKind::Rx(v)
            | GateKind::Ry(v)
            | GateKind::Rz(v)
            | GateKind::ULambda(v)
            | GateKind::W(v) => vec![*v],
            GateKind::PauliZ | GateKind::Cnot => vec![],
            GateKind::Generic1q(m) => m.data().iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// One gate on a register. `control` is set for CNOT only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub struct Gate {
    kind: GateKind,
    target: usize,
    control: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: String,
    #[serde(default)]
    params: Vec<f64>,
    target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<usize>,
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        GateRecord {
            kind: g.kind.name().to_string(),
            params: g.kind.params(),
            target: g.target,
            control: g.control,
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = Error;

    fn try_from(r: GateRecord) -> Result<Self> {
        let one = |p: &[f64]| -> Result<f64> {
            match p {
                [v] if v.is_finite() => Ok(*v),
                _ => Err(Error::InvalidGate(format!(
                    "{} expects one finite parameter, got {:?}",
                    r.kind, p
                ))),
            }
        };
        let none = |p: &[f64]| -> Result<()> {
            if p.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidGate(format!("{} takes no parameters", r.kind)))
            }
        };
        let kind = match r.kind.as_str() {
            "RX" => GateKind::Rx(one(&r.params)?),
            "RY" => GateKind::Ry(one(&r.params)?),
            "RZ" => GateKind::Rz(one(&r.params)?),
            "U_LAMBDA" => GateKind::ULambda(one(&r.params)?),
            "W" => GateKind::W(one(&r.params)?),
            "PAULI_Z" => {
                none(&r.params)?;
                GateKind::PauliZ
            }
            "CNOT" => {
                none(&r.params)?;
                GateKind::Cnot
            }
            "GENERIC_1Q" => {
                if r.params.len() != 8 {
                    return Err(Error::InvalidGate(
                        "GENERIC_1Q expects 8 parameters (re, im of a row-major 2x2)".into(),
                    ));
                }
                let z: Vec<C64> = r.params.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
                GateKind::Generic1q(ComplexMatrix::from_rows(&[[z[0], z[1]], [z[2], z[3]]]))
            }
            other => return Err(Error::InvalidGate(format!("unknown gate kind {other:?}"))),
        };
        match (&kind, r.control) {
            (GateKind::Cnot, Some(c)) => Gate::cnot(c, r.target),
            (GateKind::Cnot, None) => Err(Error::InvalidGate("CNOT needs a control".into())),
            (_, Some(_)) => Err(Error::InvalidGate(format!("{} takes no control", r.kind))),
            (GateKind::Generic1q(m), None) => Gate::generic(r.target, m.clone()),
            (_, None) => Ok(Gate {
                kind,
                target: r.target,
                control: None,
            }),
        }
    }
}

impl Gate {
    fn single(kind: GateKind, target: usize) -> Self {
        Gate {
            kind,
            target,
            control: None,
        }
    }

    pub fn rx(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Rx(theta), target)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry(theta), target)
    }

    pub fn rz(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Rz(theta), target)
    }

    pub fn u_lambda(target: usize, lambda: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidGate(format!("U_LAMBDA needs λ in [-1, 1], got {lambda}")));
        }
        Ok(Self::single(GateKind::ULambda(lambda), target))
    }

    pub fn w(target: usize, x: f64) -> Self {
        Self::single(GateKind::W(x), target)
    }

    pub fn pauli_z(target: usize) -> Self {
        Self::single(GateKind::PauliZ, target)
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        if control == target {
            return Err(Error::InvalidGate(format!("CNOT control and target both {target}")));
        }
        Ok(Gate {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
        })
    }

    pub fn generic(target: usize, m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::InvalidGate("GENERIC_1Q payload must be 2x2".into()));
        }
        UnitaryMatrix::new(m.clone())?;
        Ok(Self::single(GateKind::Generic1q(m), target))
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn control(&self) -> Option<usize> {
        self.control
    }

    /// Qubits touched, control first for CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match self.control {
            Some(c) => vec![c, self.target],
            None => vec![self.target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.control.is_some()
    }

    /// Matrix on the touched qubits (ordered as in [`Gate::qubits`]).
    pub fn local_matrix(&self) -> ComplexMatrix {
        let r = |x: f64| C64::new(x, 0.0);
        match &self.kind {
            GateKind::Rx(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                ComplexMatrix::from_rows(&[[r(c), C64::new(0.0, -s)], [C64::new(0.0, -s), r(c)]])
            }
            GateKind::Ry(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                ComplexMatrix::from_real_rows(&[[c, -s], [s, c]])
            }
            GateKind::Rz(t) => ComplexMatrix::diag(&[
                C64::from_polar(1.0, -t / 2.0),
                C64::from_polar(1.0, t / 2.0),
            ]),
            GateKind::ULambda(l) => {
                let p = ((1.0 + l).max(0.0)).sqrt() * FRAC_1_SQRT_2;
                let m = ((1.0 - l).max(0.0)).sqrt() * FRAC_1_SQRT_2;
                ComplexMatrix::from_real_rows(&[[p, -m], [m, p]])
            }
            GateKind::W(x) => {
                ComplexMatrix::diag(&[C64::from_polar(1.0, -x), I * C64::from_polar(1.0, *x)])
            }
            GateKind::PauliZ => ComplexMatrix::diag(&[ONE, -ONE]),
            GateKind::Cnot => ComplexMatrix::from_real_rows(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]),
            GateKind::Generic1q(m) => m.clone(),
        }
    }
}

/// Full `2^width` unitary of one gate.
pub fn gate_matrix(g: &Gate, width: usize) -> Result<UnitaryMatrix> {
    if g.qubits().iter().any(|&q| q >= width) {
        return Err(Error::InvalidGate(format!(
            "gate on {:?} does not fit {width} qubit(s)",
            g.qubits()
        )));
    }
    if width == 1 {
        return Ok(UnitaryMatrix::new_unchecked(g.local_matrix()));
    }
    Ok(UnitaryMatrix::new_unchecked(embed_local(
        &g.local_matrix(),
        &g.qubits(),
        width,
    )?))
}

/// Ordered gate list on `width` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord", into = "CircuitRecord")]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    width: usize,
    gates: Vec<Gate>,
}

impl From<Circuit> for CircuitRecord {
    fn from(c: Circuit) -> Self {
        CircuitRecord {
            width: c.width,
            gates: c.gates,
        }
    }
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        Circuit::from_gates(r.width, r.gates)
    }
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if !(1..=4).contains(&width) {
            return Err(Error::InvalidGate(format!("circuit width {width} outside 1..=4")));
        }
        Ok(Circuit {
            width,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(width: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Circuit::new(width)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.width) {
            return Err(Error::InvalidGate(format!(
                "{} on qubit {q} in a {}-qubit circuit",
                g.kind.name(),
                self.width
            )));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn dim(&self) -> usize {
        1 << self.width
    }

    /// Product of the full gate matrices, last gate leftmost.
    pub fn unitary(&self) -> UnitaryMatrix {
        let mut u = ComplexMatrix::identity(self.dim());
        for g in &self.gates {
            let m = gate_matrix(g, self.width).expect("gates validated on push");
            u = m.mat().matmul(&u);
        }
        UnitaryMatrix::new_unchecked(u)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Executes `c` on the computational basis state `input`.
pub fn run_pure(c: &Circuit, input: usize) -> Result<Vec<C64>> {
    if input >= c.dim() {
        return Err(Error::Dimension(format!(
            "basis index {input} out of range for {} qubits",
            c.width
        )));
    }
    let mut psi = vec![ZERO; c.dim()];
    psi[input] = ONE;
    if c.width == 1 {
        for g in &c.gates {
            psi = g.local_matrix().matvec(&psi);
        }
        return Ok(psi);
    }
    for g in &c.gates {
        apply_local_vec(&mut psi, &g.local_matrix(), &g.qubits())?;
    }
    Ok(psi)
}

/// `U ρ U†` gate by gate.
pub fn run_density(c: &Circuit, input: &DensityMatrix) -> Result<DensityMatrix> {
    if input.dim() != c.dim() {
        return Err(Error::Dimension(format!(
            "circuit of dim {} on state of dim {}",
            c.dim(),
            input.dim()
        )));
    }
    let mut rho = input.mat().clone();
    for g in &c.gates {
        rho = apply_gate_to_matrix(&rho, g)?;
    }
    Ok(DensityMatrix::from_trusted(rho))
}

pub(crate) fn apply_gate_to_matrix(rho: &ComplexMatrix, g: &Gate) -> Result<ComplexMatrix> {
    let k = g.local_matrix();
    if rho.rows() == 2 {
        return Ok(k.matmul(rho).matmul(&k.adjoint()));
    }
    qubit_count(rho.rows())?;
    sandwich_local(rho, &k, &k, &g.qubits())
}

/// Rotation angles `(α, β, γ)` of the classical-state block for weights
/// `p = (p00, p01, p10, p11)`.
///
/// The amplitude matrix `M = [[√p00, √p01], [√p10, √p11]]` is factored as
/// `RY(β) · diag(cos α/2, sin α/2) · RY(γ)ᵀ` with a closed-form signed 2×2 SVD.
pub fn classical_block_angles(p: [f64; 4]) -> Result<(f64, f64, f64)> {
    validate_probabilities(&p)?;
    let m: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
    let e = 0.5 * (m00 + m11);
    let f = 0.5 * (m00 - m11);
    let g = 0.5 * (m10 + m01);
    let h = 0.5 * (m10 - m01);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let (s1, s2) = (q + r, q - r);
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let theta = 0.5 * (a2 - a1);
    let phi = 0.5 * (a2 + a1);
    Ok((2.0 * s2.atan2(s1), 2.0 * phi, -2.0 * theta))
}

/// Classical block on qubits 0..3: prepares `Σ √p_ij |i,j⟩|i,j⟩` from `|0000⟩`.
pub fn classical_block(p: [f64; 4]) -> Result<Vec<Gate>> {
    let (alpha, beta, gamma) = classical_block_angles(p)?;
    Ok(vec![
        Gate::ry(0, alpha),
        Gate::cnot(0, 1)?,
        Gate::ry(0, beta),
        Gate::ry(1, gamma),
        Gate::cnot(0, 2)?,
        Gate::cnot(1, 3)?,
    ])
}

/// Second block `U(θ, φ)` on qubits `(hi, lo)`, mapping `|i,j⟩ → |ψ_{i,i⊕j}⟩` with
/// `ψ00 = cos θ|00⟩ + sin θ|11⟩`, `ψ11 = −sin θ|00⟩ + cos θ|11⟩`,
/// `ψ01 = sin φ|01⟩ + cos φ|10⟩`, `ψ10 = cos φ|01⟩ − sin φ|10⟩`.
pub fn eigenbasis_block(hi: usize, lo: usize, theta: f64, phi: f64) -> Result<Vec<Gate>> {
    Ok(vec![
        Gate::ry(hi, theta + phi),
        Gate::cnot(lo, hi)?,
        Gate::ry(hi, theta - phi),
        Gate::cnot(hi, lo)?,
    ])
}

/// Three-CNOT alternative to [`eigenbasis_block`]; `U′(θ, φ)` yields the same
/// mixed state as `U(θ, π/2 − φ)`.
pub fn eigenbasis_block_alt(hi: usize, lo: usize, theta: f64, phi: f64) -> Result<Vec<Gate>> {
    Ok(vec![
        Gate::ry(hi, theta + phi),
        Gate::cnot(lo, hi)?,
        Gate::ry(hi, theta - phi),
        Gate::cnot(lo, hi)?,
        Gate::cnot(hi, lo)?,
    ])
}

/// Four-qubit preparation circuit; qubits 2 and 3 end in the real X-state
/// with spectral data `(p, θ, φ)`.
pub fn build_xstate_circuit(p: [f64; 4], theta: f64, phi: f64) -> Result<Circuit> {
    let mut gates = classical_block(p)?;
    gates.extend(eigenbasis_block(2, 3, theta, phi)?);
    Circuit::from_gates(4, gates)
}

/// As [`build_xstate_circuit`] with the three-CNOT second block.
pub fn build_xstate_circuit_alt(p: [f64; 4], theta: f64, phi: f64) -> Result<Circuit> {
    let mut gates = classical_block(p)?;
    gates.extend(eigenbasis_block_alt(2, 3, theta, phi)?);
    Circuit::from_gates(4, gates)
}

/// Equi-entangled case θ = φ of the three-CNOT block, reduced to one rotation and one CNOT.
/// Produces the same state as `build_xstate_circuit(p, θ, π/2 − θ)`; θ = π/4 gives
/// Bell-diagonal states.
pub fn build_equi_entangled_circuit(p: [f64; 4], theta: f64) -> Result<Circuit> {
    let mut gates = classical_block(p)?;
    gates.push(Gate::ry(2, 2.0 * theta));
    gates.push(Gate::cnot(2, 3)?);
    Circuit::from_gates(4, gates)
}

/// Two-qubit sector circuit: `U_LAMBDA(λ)` on qubit 0, `CNOT(0→1)`, `RX(θ)` on qubit 1.
/// Qubit 1 alone then holds the sector state `½(I + λσz)` rotated by `RX(θ)`.
pub fn build_sector_circuit(lambda: f64, theta: f64) -> Result<Circuit> {
    Circuit::from_gates(
        2,
        vec![Gate::u_lambda(0, lambda)?, Gate::cnot(0, 1)?, Gate::rx(1, theta)],
    )
}

/// Sector circuit whose last module is the sector propagator `e^{−iωt n·σ}`
/// (up to global phase) realised as `RY(−δ) RZ(2ωt) RY(δ)`. For the even sector
/// `ω = ξ`, `cos δ = B/ξ`, `sin δ = Jκ/ξ`; for the odd sector `ω = η`,
/// `cos δ = b/η`, `sin δ = J/η`.
pub fn build_sector_evolution_circuit(
    lambda: f64,
    params: &HeisenbergParams,
    t: f64,
    sector: Sector,
) -> Result<Circuit> {
    let (omega, delta) = params.sector_rotation(sector);
    Circuit::from_gates(
        2,
        vec![
            Gate::u_lambda(0, lambda)?,
            Gate::cnot(0, 1)?,
            Gate::ry(1, -delta),
            Gate::rz(1, 2.0 * omega * t),
            Gate::ry(1, delta),
        ],
    )
}

/// Seven real parameters of an X-shaped special unitary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XUnitaryParams {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub x: f64,
    pub t1: f64,
    pub t2: f64,
}

impl XUnitaryParams {
    /// Parameters whose assembled matrix is the identity.
    pub fn identity() -> Self {
        XUnitaryParams {
            a1: 0.0,
            b1: 0.0,
            a2: std::f64::consts::PI,
            b2: 0.0,
            x: 0.0,
            t1: 0.0,
            t2: FRAC_PI_2,
        }
    }

    /// Rz angles `(s1, s2, s3, s4)` of the decomposition.
    pub fn rz_angles(&self) -> [f64; 4] {
        let (a1, b1, a2, b2) = (self.a1, self.b1, self.a2, self.b2);
        [
            -0.25 * (a1 + b1 + a2 + b2),
            -0.25 * (a1 + b1 - a2 - b2),
            -0.25 * (a2 - b2 + a1 - b1),
            -0.25 * (a1 - b1 - a2 + b2),
        ]
    }
}

/// The 4×4 X-shaped special unitary for `params`.
pub fn assemble_x_unitary(params: &XUnitaryParams) -> UnitaryMatrix {
    let XUnitaryParams {
        a1,
        b1,
        a2,
        b2,
        x,
        t1,
        t2,
    } = *params;
    let e = |phase: f64| C64::from_polar(1.0, 0.5 * phase);
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let mut u = ComplexMatrix::zeros(4, 4);
    u[(0, 0)] = e(a1 - x) * c1;
    u[(0, 3)] = -e(b1 - x) * s1;
    u[(1, 1)] = -I * e(a2 + x) * s2;
    u[(1, 2)] = I * e(b2 + x) * c2;
    u[(2, 1)] = I * e(-(b2 - x)) * c2;
    u[(2, 2)] = I * e(-(a2 - x)) * s2;
    u[(3, 0)] = e(-(b1 + x)) * s1;
    u[(3, 3)] = e(-(a1 + x)) * c1;
    UnitaryMatrix::new_unchecked(u)
}

/// Three-CNOT circuit equal to [`assemble_x_unitary`] up to a global phase.
///
/// In operator order the circuit is
/// `(Rz(s1)⊗Rz(s2)) C1 (Ry(t1+t2)⊗W(x/2)) C2 (Ry(t1−t2)⊗I) C1 (Rz(s3)⊗Rz(s4))`,
/// C1 controlled by qubit 0 and C2 by qubit 1.
pub fn decompose_x_unitary(params: &XUnitaryParams) -> Circuit {
    let [s1, s2, s3, s4] = params.rz_angles();
    let c1 = || Gate::cnot(0, 1).expect("distinct qubits");
    let c2 = Gate::cnot(1, 0).expect("distinct qubits");
    Circuit::from_gates(
        2,
        vec![
            Gate::rz(0, s3),
            Gate::rz(1, s4),
            c1(),
            Gate::ry(0, params.t1 - params.t2),
            c2,
            Gate::ry(0, params.t1 + params.t2),
            Gate::w(1, 0.5 * params.x),
            c1(),
            Gate::rz(0, s1),
            Gate::rz(1, s2),
        ],
    )
    .expect("two-qubit layout")
}

/// Zero-field map onto the X-unitary family:
/// `x = Jz t, a1 = b2 = 0, a2 = b1 = π, t1 = Jκ t, t2 = J t + π/2`.
pub fn x_params_zero_field(j: f64, j_kappa: f64, jz: f64, t: f64) -> XUnitaryParams {
    XUnitaryParams {
        a1: 0.0,
        b1: std::f64::consts::PI,
        a2: std::f64::consts::PI,
        b2: 0.0,
        x: jz * t,
        t1: j_kappa * t,
        t2: j * t + FRAC_PI_2,
    }
}

/// X-unitary parameters reproducing the full propagator, field included.
pub fn x_params_for_heisenberg(p: &HeisenbergParams, t: f64) -> XUnitaryParams {
    let x = p.jz * t;
    let (u, c) = p.even_block_coefficients(t);
    let (u2, c2) = p.odd_block_coefficients(t);
    let arg = |z: C64| if z.norm() == 0.0 { 0.0 } else { z.arg() };
    XUnitaryParams {
        a1: 2.0 * arg(u),
        b1: 2.0 * arg(-c),
        a2: 2.0 * arg(I * u2),
        b2: 2.0 * arg(-I * c2),
        x,
        t1: c.norm().atan2(u.norm()),
        t2: u2.norm().atan2(c2.norm()),
    }
}

/// Decomposition circuit for the Heisenberg propagator at time `t`.
pub fn heisenberg_circuit(p: &HeisenbergParams, t: f64) -> Circuit {
    decompose_x_unitary(&x_params_for_heisenberg(p, t))
}
