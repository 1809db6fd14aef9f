//! X-states: the six-parameter family
//!
//! ```text
//!     ⎡ a  0  0  w ⎤
//! ρ = ⎢ 0  b  z  0 ⎥
//!     ⎢ 0  z* c  0 ⎥
//!     ⎣ w* 0  0  d ⎦
//! ```
//!
//! in the basis |00⟩, |01⟩, |10⟩, |11⟩, together with the spectral form
//! `(p00, p01, p10, p11, θ, φ)` produced by the preparation circuit, the inverse
//! map, local phase removal and concurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{herm_eig, sqrt_psd, ComplexMatrix, DensityMatrix, Pauli, C64, ZERO};

const SUM_TOL: f64 = 1e-12;
const POP_TOL: f64 = 1e-12;
const BLOCK_TOL: f64 = 1e-10;
const DEGENERATE_TOL: f64 = 1e-12;
const FEASIBILITY_TOL: f64 = 1e-10;
const SHAPE_TOL: f64 = 1e-9;

/// Non-X entries of a 4×4 matrix, upper and lower triangle.
pub const NON_X_ENTRIES: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (1, 0),
    (1, 3),
    (2, 0),
    (2, 3),
    (3, 1),
    (3, 2),
];

/// Sum of absolute values of the eight non-X entries.
pub fn non_x_mass(m: &ComplexMatrix) -> f64 {
    NON_X_ENTRIES.iter().map(|&(r, c)| m[(r, c)].norm()).sum()
}

/// Checks a probability vector: entries ≥ −1e-12, sum 1 within 1e-12.
pub fn validate_probabilities(p: &[f64]) -> Result<()> {
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < -POP_TOL) {
        return Err(Error::InvalidProbabilities(format!("entry {x} in {p:?}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidProbabilities(format!("sum {s} in {p:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "XStateRecord", into = "XStateRecord")]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub w: C64,
    pub z: C64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct XStateRecord {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    #[serde(default)]
    w_re: f64,
    #[serde(default)]
    w_im: f64,
    #[serde(default)]
    z_re: f64,
    #[serde(default)]
    z_im: f64,
}

impl From<XState> for XStateRecord {
    fn from(x: XState) -> Self {
        XStateRecord {
            a: x.a,
            b: x.b,
            c: x.c,
            d: x.d,
            w_re: x.w.re,
            w_im: x.w.im,
            z_re: x.z.re,
            z_im: x.z.im,
        }
    }
}

impl TryFrom<XStateRecord> for XState {
    type Error = Error;

    fn try_from(r: XStateRecord) -> Result<Self> {
        XState::new(
            r.a,
            r.b,
            r.c,
            r.d,
            C64::new(r.w_re, r.w_im),
            C64::new(r.z_re, r.z_im),
        )
    }
}

impl XState {
    pub fn new(a: f64, b: f64, c: f64, d: f64, w: C64, z: C64) -> Result<Self> {
        let x = XState { a, b, c, d, w, z };
        x.validate()?;
        Ok(x)
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64, w: f64, z: f64) -> Result<Self> {
        Self::new(a, b, c, d, C64::new(w, 0.0), C64::new(z, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        let pops = [self.a, self.b, self.c, self.d];
        if pops.iter().chain([self.w.re, self.w.im, self.z.re, self.z.im].iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidXState("non-finite parameter".into()));
        }
        if let Some(x) = pops.iter().find(|x| **x < -POP_TOL) {
            return Err(Error::InvalidXState(format!("negative population {x}")));
        }
        let s: f64 = pops.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidXState(format!("populations sum to {s}")));
        }
        let outer = (self.a.max(0.0) * self.d.max(0.0)).sqrt();
        if self.w.norm() > outer + BLOCK_TOL {
            return Err(Error::InvalidXState(format!(
                "|w| = {} exceeds √(ad) = {outer}",
                self.w.norm()
            )));
        }
        let inner = (self.b.max(0.0) * self.c.max(0.0)).sqrt();
        if self.z.norm() > inner + BLOCK_TOL {
            return Err(Error::InvalidXState(format!(
                "|z| = {} exceeds √(bc) = {inner}",
                self.z.norm()
            )));
        }
        Ok(())
    }

    pub fn maximally_mixed() -> Self {
        XState {
            a: 0.25,
            b: 0.25,
            c: 0.25,
            d: 0.25,
            w: ZERO,
            z: ZERO,
        }
    }

    pub fn is_real(&self) -> bool {
        self.w.im == 0.0 && self.z.im == 0.0
    }

    pub fn to_matrix(&self) -> DensityMatrix {
        let r = |x: f64| C64::new(x, 0.0);
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = r(self.a);
        m[(1, 1)] = r(self.b);
        m[(2, 2)] = r(self.c);
        m[(3, 3)] = r(self.d);
        m[(0, 3)] = self.w;
        m[(3, 0)] = self.w.conj();
        m[(1, 2)] = self.z;
        m[(2, 1)] = self.z.conj();
        DensityMatrix::from_trusted(m)
    }

    /// Reads the X entries of `rho`; fails if the non-X mass exceeds 1e-9.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::Dimension(format!("X-state needs dim 4, got {}", rho.dim())));
        }
        let m = rho.mat();
        let leakage = non_x_mass(m);
        if leakage > SHAPE_TOL {
            return Err(Error::NotXShaped { leakage });
        }
        XState::new(
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(2, 2)].re,
            m[(3, 3)].re,
            m[(0, 3)],
            m[(1, 2)],
        )
    }

    /// X part of any 4×4 state (non-X entries dropped).
    pub fn project(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::Dimension(format!("X-state needs dim 4, got {}", rho.dim())));
        }
        let m = rho.mat();
        XState::new(
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(2, 2)].re,
            m[(3, 3)].re,
            m[(0, 3)],
            m[(1, 2)],
        )
    }

    /// Largest absolute parameter difference.
    pub fn max_diff(&self, o: &XState) -> f64 {
        [
            (self.a - o.a).abs(),
            (self.b - o.b).abs(),
            (self.c - o.c).abs(),
            (self.d - o.d).abs(),
            (self.w - o.w).norm(),
            (self.z - o.z).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Mixture weights and eigenbasis angles of a real X-state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "XSpectralRecord", into = "XSpectralRecord")]
pub struct XSpectral {
    /// (p00, p01, p10, p11)
    pub p: [f64; 4],
    pub theta: f64,
    pub phi: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct XSpectralRecord {
    p: [f64; 4],
    theta: f64,
    phi: f64,
}

impl From<XSpectral> for XSpectralRecord {
    fn from(s: XSpectral) -> Self {
        XSpectralRecord {
            p: s.p,
            theta: s.theta,
            phi: s.phi,
        }
    }
}

impl TryFrom<XSpectralRecord> for XSpectral {
    type Error = Error;

    fn try_from(r: XSpectralRecord) -> Result<Self> {
        XSpectral::new(r.p, r.theta, r.phi)
    }
}

impl XSpectral {
    pub fn new(p: [f64; 4], theta: f64, phi: f64) -> Result<Self> {
        validate_probabilities(&p)?;
        let range = 0.0..=std::f64::consts::FRAC_PI_2;
        if !range.contains(&theta) || !range.contains(&phi) {
            return Err(Error::InvalidXState(format!(
                "angles must lie in [0, π/2], got θ={theta}, φ={phi}"
            )));
        }
        Ok(XSpectral { p, theta, phi })
    }
}

/// Real X-state with spectral data `s`:
/// `a = p00 cos²θ + p10 sin²θ`, `d = p00 sin²θ + p10 cos²θ`, `w = (p00 − p10) cos θ sin θ`,
/// `b = p01 sin²φ + p11 cos²φ`, `c = p01 cos²φ + p11 sin²φ`, `z = (p01 − p11) cos φ sin φ`.
pub fn from_spectral(s: &XSpectral) -> XState {
    let [p00, p01, p10, p11] = s.p;
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    XState {
        a: p00 * ct * ct + p10 * st * st,
        d: p00 * st * st + p10 * ct * ct,
        b: p01 * sp * sp + p11 * cp * cp,
        c: p01 * cp * cp + p11 * sp * sp,
        w: C64::new((p00 - p10) * ct * st, 0.0),
        z: C64::new((p01 - p11) * cp * sp, 0.0),
    }
}

/// Solves one 2×2 block: given populations `(top, bottom)` and real coherence `coh`
/// of `q0 |v⟩⟨v| + q1 |v⊥⟩⟨v⊥|` with `v = (cos ϑ, sin ϑ)`, returns `(ϑ, q0, q1)`, ϑ ∈ [0, π/2].
fn invert_block(top: f64, bottom: f64, coh: f64) -> (f64, f64, f64) {
    let diff = top - bottom;
    if diff.abs() < DEGENERATE_TOL {
        let mean = 0.5 * (top + bottom);
        if coh.abs() < DEGENERATE_TOL {
            return (0.0, mean, mean);
        }
        return (std::f64::consts::FRAC_PI_4, mean + coh, mean - coh);
    }
    let raw = 0.5 * (2.0 * coh).atan2(diff);
    let r = diff.hypot(2.0 * coh);
    let sum = top + bottom;
    if raw >= 0.0 {
        (raw, 0.5 * (sum + r), 0.5 * (sum - r))
    } else {
        (raw + std::f64::consts::FRAC_PI_2, 0.5 * (sum - r), 0.5 * (sum + r))
    }
}

/// Inverse of [`from_spectral`] for X-states with real coherences.
///
/// The outer block `(a, d, w)` fixes `(θ, p00, p10)`; the inner block plays the
/// same role with `c` in place of `a`, `b` in place of `d` and `z` in place of `w`,
/// giving `(φ, p01, p11)`.
pub fn to_spectral(x: &XState) -> Result<XSpectral> {
    x.validate()?;
    if x.w.im.abs() > DEGENERATE_TOL || x.z.im.abs() > DEGENERATE_TOL {
        return Err(Error::InvalidXState(
            "coherences must be real; strip phases first".into(),
        ));
    }
    let (theta, p00, p10) = invert_block(x.a, x.d, x.w.re);
    let (phi, p01, p11) = invert_block(x.c, x.b, x.z.re);
    let p = [p00, p01, p10, p11];
    if let Some(bad) = p
        .iter()
        .find(|&&q| !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&q))
    {
        return Err(Error::Infeasible(format!(
            "probability {bad} outside [0, 1] (p = {p:?})"
        )));
    }
    Ok(XSpectral {
        p: p.map(|q| q.clamp(0.0, 1.0)),
        theta,
        phi,
    })
}

/// Angles of the diagonal local unitaries `diag(1, e^{iα}) ⊗ diag(1, e^{iβ})`
/// that make the coherences of an X-state real and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub alpha: f64,
    pub beta: f64,
}

impl PhaseRecord {
    /// Gates on `(qa, qb)` that undo the stripping, up to global phase.
    pub fn restore_gates(&self, qa: usize, qb: usize) -> Vec<crate::circuits::Gate> {
        use crate::circuits::Gate;
        vec![Gate::rz(qa, -self.alpha), Gate::rz(qb, -self.beta)]
    }

    /// Re-applies the phases to a stripped state.
    pub fn restore(&self, x: &XState) -> XState {
        XState {
            w: x.w * C64::from_polar(1.0, self.alpha + self.beta),
            z: x.z * C64::from_polar(1.0, self.alpha - self.beta),
            ..*x
        }
    }
}

/// Removes the phases of `w` and `z` with a local diagonal unitary.
pub fn strip_phases(rho: &DensityMatrix) -> Result<(XState, PhaseRecord)> {
    let x = XState::from_density(rho)?;
    Ok(strip_xstate_phases(&x))
}

pub fn strip_xstate_phases(x: &XState) -> (XState, PhaseRecord) {
    let arg = |z: C64| if z.norm() == 0.0 { 0.0 } else { z.arg() };
    let (mu, nu) = (arg(x.w), arg(x.z));
    let rec = PhaseRecord {
        alpha: 0.5 * (mu + nu),
        beta: 0.5 * (mu - nu),
    };
    let stripped = XState {
        w: C64::new(x.w.norm(), 0.0),
        z: C64::new(x.z.norm(), 0.0),
        ..*x
    };
    (stripped, rec)
}

/// Closed-form X-state concurrence `2 max{0, |w| − √(bc), |z| − √(ad)}`.
pub fn concurrence_x(x: &XState) -> f64 {
    let bc = (x.b.max(0.0) * x.c.max(0.0)).sqrt();
    let ad = (x.a.max(0.0) * x.d.max(0.0)).sqrt();
    (2.0 * (x.w.norm() - bc).max(x.z.norm() - ad).max(0.0)).min(1.0)
}

/// Wootters concurrence `max{0, λ1 − λ2 − λ3 − λ4}`, where `λ_i²` are the
/// eigenvalues of `√ρ ρ̃ √ρ` and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence_wootters_oracle(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!(
            "concurrence needs a two-qubit state, got dim {}",
            rho.dim()
        )));
    }
    let yy = crate::qmat::pauli_pair(Pauli::Y, Pauli::Y);
    let tilde = yy.matmul(&rho.mat().conj()).matmul(&yy);
    let s = sqrt_psd(rho.mat())?;
    let r = s.matmul(&tilde).matmul(&s).hermitian_part();
    let lam: Vec<f64> = herm_eig(&r)?.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

/// l1 coherence in the Bell-pair basis of the sector state `½(I + λσz)`: `|λ|`.
pub fn bell_coherence(lambda: f64) -> f64 {
    lambda.abs()
}

/// l1 coherence of a 2×2 sector block in that sector's Bell-pair basis.
pub fn bell_coherence_block(block: &ComplexMatrix) -> f64 {
    let h = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [1.0, -1.0]])
        .scale_real(std::f64::consts::FRAC_1_SQRT_2);
    let in_bell = h.matmul(block).matmul(&h);
    2.0 * in_bell[(0, 1)].norm()
}
