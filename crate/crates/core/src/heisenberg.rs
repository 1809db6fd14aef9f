//! Two-spin XYZ Heisenberg model in an inhomogeneous z-field,
//!
//! `H = ½ (Jx σx⊗σx + Jy σy⊗σy + Jz σz⊗σz + (B+b) σz⊗I + (B−b) I⊗σz)`.
//!
//! `H` commutes with `σz⊗σz`, so it splits into the even sector
//! span{|00⟩, |11⟩} and the odd sector span{|01⟩, |10⟩}:
//!
//! ```text
//! even: ½Jz·I + [[B, Jκ], [Jκ, −B]]      ξ = √(B² + (Jκ)²)
//! odd: −½Jz·I + [[b, J ], [J , −b]]      η = √(b² + J²)
//! ```
//!
//! with `J = (Jx+Jy)/2` and `Jκ = (Jx−Jy)/2`. Units: ħ = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{pauli_pair, ComplexMatrix, DensityMatrix, Pauli, UnitaryMatrix, C64, ONE, ZERO};
use crate::xstate::{concurrence_x, XState};

/// Couplings and fields. Only the five primary quantities are stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeisenbergParams {
    #[serde(rename = "Jx")]
    pub jx: f64,
    #[serde(rename = "Jy")]
    pub jy: f64,
    #[serde(rename = "Jz")]
    pub jz: f64,
    /// Average field.
    #[serde(rename = "B")]
    pub b_avg: f64,
    /// Field inhomogeneity: local fields are B+b and B−b.
    #[serde(rename = "b")]
    pub b_inh: f64,
}

/// Parity sector of the two-qubit space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    /// Basis indices spanned by the sector.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Sector::Even => (0, 3),
            Sector::Odd => (1, 2),
        }
    }
}

impl HeisenbergParams {
    pub fn new(jx: f64, jy: f64, jz: f64, b_avg: f64, b_inh: f64) -> Self {
        HeisenbergParams {
            jx,
            jy,
            jz,
            b_avg,
            b_inh,
        }
    }

    /// From `J = (Jx+Jy)/2` and `κ = (Jx−Jy)/(Jx+Jy)`.
    pub fn from_j_kappa(j: f64, kappa: f64, jz: f64, b_avg: f64, b_inh: f64) -> Self {
        Self::new(j * (1.0 + kappa), j * (1.0 - kappa), jz, b_avg, b_inh)
    }

    pub fn j(&self) -> f64 {
        0.5 * (self.jx + self.jy)
    }

    /// The product Jκ = (Jx − Jy)/2, defined even when Jx + Jy = 0.
    pub fn j_kappa(&self) -> f64 {
        0.5 * (self.jx - self.jy)
    }

    pub fn kappa(&self) -> Option<f64> {
        let s = self.jx + self.jy;
        (s != 0.0).then(|| (self.jx - self.jy) / s)
    }

    pub fn xi(&self) -> f64 {
        self.b_avg.hypot(self.j_kappa())
    }

    pub fn eta(&self) -> f64 {
        self.b_inh.hypot(self.j())
    }

    /// Angle δ with cos δ = B/ξ, sin δ = Jκ/ξ; `None` when ξ = 0.
    pub fn delta(&self) -> Option<f64> {
        (self.xi() > 0.0).then(|| self.j_kappa().atan2(self.b_avg))
    }

    /// `(ω, δ)` such that the sector block of `H` (minus its ±½Jz shift) is
    /// `ω (cos δ σz + sin δ σx)`.
    pub fn sector_rotation(&self, sector: Sector) -> (f64, f64) {
        let (field, coupling) = self.sector_terms(sector);
        (field.hypot(coupling), coupling.atan2(field))
    }

    fn sector_terms(&self, sector: Sector) -> (f64, f64) {
        match sector {
            Sector::Even => (self.b_avg, self.j_kappa()),
            Sector::Odd => (self.b_inh, self.j()),
        }
    }

    fn block_coefficients(&self, sector: Sector, t: f64) -> (C64, C64) {
        let (field, coupling) = self.sector_terms(sector);
        let omega = field.hypot(coupling);
        let (s, c) = (omega * t).sin_cos();
        // sin(ωt)/ω with its ω → 0 limit
        let sinc = if omega == 0.0 { t } else { s / omega };
        (C64::new(c, -field * sinc), C64::new(0.0, -coupling * sinc))
    }

    /// `(u, c)` of the even block, `u = cos ξt − i(B/ξ) sin ξt`, `c = −i(Jκ/ξ) sin ξt`.
    pub fn even_block_coefficients(&self, t: f64) -> (C64, C64) {
        self.block_coefficients(Sector::Even, t)
    }

    /// `(u′, c′)` of the odd block, `u′ = cos ηt − i(b/η) sin ηt`, `c′ = −i(J/η) sin ηt`.
    pub fn odd_block_coefficients(&self, t: f64) -> (C64, C64) {
        self.block_coefficients(Sector::Odd, t)
    }

    /// Largest sector frequency, used for default time windows.
    pub fn max_frequency(&self) -> f64 {
        [self.j().abs(), self.j_kappa().abs(), self.xi(), self.eta()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Hamiltonian built from Pauli products.
pub fn hamiltonian(p: &HeisenbergParams) -> ComplexMatrix {
    let terms = [
        (p.jx, Pauli::X, Pauli::X),
        (p.jy, Pauli::Y, Pauli::Y),
        (p.jz, Pauli::Z, Pauli::Z),
        (p.b_avg + p.b_inh, Pauli::Z, Pauli::I),
        (p.b_avg - p.b_inh, Pauli::I, Pauli::Z),
    ];
    let mut h = ComplexMatrix::zeros(4, 4);
    for (coef, a, b) in terms {
        h = &h + &pauli_pair(a, b).scale_real(0.5 * coef);
    }
    h
}

/// Closed-form eigen-decomposition.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// `[½Jz + ξ, ½Jz − ξ, −½Jz + η, −½Jz − η]`
    pub energies: [f64; 4],
    /// Normalised eigenvectors in the order of `energies`.
    pub vectors: [[C64; 4]; 4],
}

/// Eigenvector of `[[f, g], [g, −f]]` for eigenvalue `sign·ω`, normalised.
fn sector_eigvec(field: f64, coupling: f64, sign: f64) -> (f64, f64) {
    let omega = field.hypot(coupling);
    if omega == 0.0 {
        return if sign > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let v1 = (field + sign * omega, coupling);
    let v2 = (coupling, sign * omega - field);
    let n1 = v1.0.hypot(v1.1);
    let n2 = v2.0.hypot(v2.1);
    if n1 >= n2 {
        (v1.0 / n1, v1.1 / n1)
    } else {
        (v2.0 / n2, v2.1 / n2)
    }
}

pub fn spectrum(p: &HeisenbergParams) -> Spectrum {
    let (xi, eta) = (p.xi(), p.eta());
    let energies = [
        0.5 * p.jz + xi,
        0.5 * p.jz - xi,
        -0.5 * p.jz + eta,
        -0.5 * p.jz - eta,
    ];
    let mut vectors = [[ZERO; 4]; 4];
    for (k, (sector, sign)) in [
        (Sector::Even, 1.0),
        (Sector::Even, -1.0),
        (Sector::Odd, 1.0),
        (Sector::Odd, -1.0),
    ]
    .into_iter()
    .enumerate()
    {
        let (field, coupling) = p.sector_terms(sector);
        let (x, y) = sector_eigvec(field, coupling, sign);
        let (i0, i1) = sector.indices();
        vectors[k][i0] = C64::new(x, 0.0);
        vectors[k][i1] = C64::new(y, 0.0);
    }
    Spectrum { energies, vectors }
}

/// `e^{−iHt}` in closed form: `e^{−iJz t/2} [[u, c], [−c*, u*]]` on the even sector
/// and `e^{iJz t/2} [[u′, c′], [−c′*, u′*]]` on the odd sector.
pub fn propagator(p: &HeisenbergParams, t: f64) -> UnitaryMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (sector, phase) in [
        (Sector::Even, C64::from_polar(1.0, -0.5 * p.jz * t)),
        (Sector::Odd, C64::from_polar(1.0, 0.5 * p.jz * t)),
    ] {
        let (u, c) = p.block_coefficients(sector, t);
        let (i0, i1) = sector.indices();
        m[(i0, i0)] = phase * u;
        m[(i0, i1)] = phase * c;
        m[(i1, i0)] = -phase * c.conj();
        m[(i1, i1)] = phase * u.conj();
    }
    UnitaryMatrix::new_unchecked(m)
}

/// State of one parity sector as a 2×2 block.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    sector: Sector,
    block: ComplexMatrix,
}

impl SectorState {
    pub fn new(sector: Sector, block: ComplexMatrix) -> Result<Self> {
        if block.rows() != 2 || block.cols() != 2 {
            return Err(Error::Dimension("sector block must be 2x2".into()));
        }
        let herr = block.hermiticity_error();
        if herr > 1e-12 {
            return Err(Error::NotHermitian(herr));
        }
        let tr = block.trace();
        if (tr - ONE).norm() > 1e-12 {
            return Err(Error::Trace(tr.re));
        }
        let det = (block[(0, 0)] * block[(1, 1)] - block[(0, 1)] * block[(1, 0)]).re;
        let min_eig = 0.5 * (1.0 - (1.0 - 4.0 * det).max(0.0).sqrt());
        if min_eig < -1e-12 || block[(0, 0)].re < -1e-12 || block[(1, 1)].re < -1e-12 {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(SectorState { sector, block })
    }

    /// `½(I + λσz)` in `sector`.
    pub fn initial(sector: Sector, lambda: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidProbabilities(format!("λ = {lambda} outside [-1, 1]")));
        }
        Self::new(sector, ComplexMatrix::real_diag(&[0.5 * (1.0 + lambda), 0.5 * (1.0 - lambda)]))
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn block(&self) -> &ComplexMatrix {
        &self.block
    }
}

/// Evolved sector block for the initial state `diag(q, 1 − q)`, `q = (1+λ)/2`:
/// `[[q|u|² + (1−q)|c|², (1−2q) u c], [(1−2q) u* c*, (1−q)|u|² + q|c|²]]`.
fn evolve_sector(sector: Sector, lambda: f64, p: &HeisenbergParams, t: f64) -> Result<SectorState> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidProbabilities(format!("λ = {lambda} outside [-1, 1]")));
    }
    let q = 0.5 * (1.0 + lambda);
    let (u, c) = p.block_coefficients(sector, t);
    let (uu, cc) = (u.norm_sqr(), c.norm_sqr());
    let off = u * c * (1.0 - 2.0 * q);
    let block = ComplexMatrix::from_rows(&[
        [C64::new(q * uu + (1.0 - q) * cc, 0.0), off],
        [off.conj(), C64::new((1.0 - q) * uu + q * cc, 0.0)],
    ]);
    Ok(SectorState { sector, block })
}

/// Even-sector state at time `t` from `½(I + λσz)` on {|00⟩, |11⟩}.
pub fn evolve_even(lambda: f64, p: &HeisenbergParams, t: f64) -> Result<SectorState> {
    evolve_sector(Sector::Even, lambda, p, t)
}

/// Odd-sector state at time `t` from `½(I + μσz)` on {|01⟩, |10⟩}.
pub fn evolve_odd(mu: f64, p: &HeisenbergParams, t: f64) -> Result<SectorState> {
    evolve_sector(Sector::Odd, mu, p, t)
}

/// Places the block at indices (0, 3) for the even sector or (1, 2) for the odd one.
pub fn embed_sector(s: &SectorState) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    let (i0, i1) = s.sector.indices();
    let idx = [i0, i1];
    for r in 0..2 {
        for c in 0..2 {
            m[(idx[r], idx[c])] = s.block[(r, c)];
        }
    }
    DensityMatrix::from_trusted(m)
}

/// Initial sector and coherence parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorInitial {
    Even(f64),
    Odd(f64),
}

/// `2|λ| (|g|/ω) |sin ωt| √(cos²ωt + (f²/ω²) sin²ωt)` with `(f, g, ω) = (B, Jκ, ξ)` in the
/// even sector and `(b, J, η)` in the odd sector. Zero when ω = 0.
pub fn concurrence_analytic(initial: SectorInitial, p: &HeisenbergParams, t: f64) -> f64 {
    let (sector, lambda) = match initial {
        SectorInitial::Even(l) => (Sector::Even, l),
        SectorInitial::Odd(m) => (Sector::Odd, m),
    };
    let (field, coupling) = p.sector_terms(sector);
    let omega = field.hypot(coupling);
    if omega == 0.0 {
        return 0.0;
    }
    let (s, c) = (omega * t).sin_cos();
    let ratio = field / omega;
    let value = 2.0 * lambda.abs() * (coupling.abs() / omega) * s.abs() * (c * c + ratio * ratio * s * s).sqrt();
    value.clamp(0.0, 1.0)
}

/// Concurrence of the embedded evolved sector state, via the X-state formula.
pub fn concurrence_of_sector(s: &SectorState) -> f64 {
    let x = XState::from_density(&embed_sector(s)).expect("embedded sector is X-shaped");
    concurrence_x(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{expm_oracle, herm_eig};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn displayed(jz: f64, j: f64, jk: f64, b_avg: f64, b_inh: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            [0.5 * jz + b_avg, 0.0, 0.0, jk],
            [0.0, -0.5 * jz + b_inh, j, 0.0],
            [0.0, j, -0.5 * jz - b_inh, 0.0],
            [jk, 0.0, 0.0, 0.5 * jz - b_avg],
        ])
    }

    #[test]
    fn hamiltonian_matches_displayed_matrix() {
        let p = HeisenbergParams::new(1.3, -0.4, 0.7, 0.9, -0.2);
        let h = hamiltonian(&p);
        assert!(h.max_abs_diff(&displayed(0.7, p.j(), p.j_kappa(), 0.9, -0.2)) < 1e-15);
        let zz = pauli_pair(Pauli::Z, Pauli::Z);
        assert!(h.commutator(&zz).max_abs() < 1e-15);

        let zero = HeisenbergParams::new(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(hamiltonian(&zero).max_abs(), 0.0);
    }

    #[test]
    fn isotropic_zero_field_case() {
        let p = HeisenbergParams::new(0.8, 0.8, 1.0, 0.0, 0.0);
        assert!(hamiltonian(&p).max_abs_diff(&displayed(1.0, 0.8, 0.0, 0.0, 0.0)) < 1e-15);
        assert_eq!(p.kappa(), Some(0.0));
    }

    #[test]
    fn eigensolver_examples() {
        let p = HeisenbergParams::from_j_kappa(1.0, 0.5, 1.0, 0.0, 0.0);
        let e = herm_eig(&hamiltonian(&p)).unwrap();
        for (got, want) in e.values.iter().zip([1.0, 0.5, 0.0, -1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let p = HeisenbergParams::from_j_kappa(1.0, 0.75, 1.0, 1.0, 0.5);
        let mut want = vec![
            0.5 + 1.5625f64.sqrt(),
            0.5 - 1.5625f64.sqrt(),
            -0.5 + 1.25f64.sqrt(),
            -0.5 - 1.25f64.sqrt(),
        ];
        want.sort_by(|a, b| b.total_cmp(a));
        let got = herm_eig(&hamiltonian(&p)).unwrap().values;
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_eigenvectors_are_bell_states() {
        let p = HeisenbergParams::from_j_kappa(1.0, 0.5, 0.3, 0.0, 0.0);
        let s = spectrum(&p);
        let s2 = FRAC_1_SQRT_2;
        let bell = [
            [s2, 0.0, 0.0, s2],
            [s2, 0.0, 0.0, -s2],
            [0.0, s2, s2, 0.0],
            [0.0, s2, -s2, 0.0],
        ];
        for (k, (v, b)) in s.vectors.iter().zip(&bell).enumerate() {
            let overlap: C64 = v.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12, "vector {k}");
        }
        assert!((s.energies[0] - (0.15 + 0.5)).abs() < 1e-15);
        assert!((s.energies[3] - (-0.15 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_even_sector_uses_computational_basis() {
        let p = HeisenbergParams::new(0.0, 0.0, 0.4, 2.0, 0.0);
        let s = spectrum(&p);
        assert!((s.energies[0] - 2.2).abs() < 1e-15);
        assert!((s.energies[1] + 1.8).abs() < 1e-15);
        assert_eq!(s.vectors[0][0].norm(), 1.0);
        assert_eq!(s.vectors[1][3].norm(), 1.0);
        let flat = HeisenbergParams::new(0.0, 0.0, 0.4, 0.0, 0.0);
        let s = spectrum(&flat);
        assert_eq!(s.vectors[0][0], ONE);
        assert_eq!(s.vectors[1][3], ONE);
        assert_eq!(s.vectors[2][1], ONE);
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let p = HeisenbergParams::new(0.3, 1.7, -0.6, -0.8, 0.45);
        let h = hamiltonian(&p);
        let s = spectrum(&p);
        for k in 0..4 {
            let hv = h.matvec(&s.vectors[k]);
            for (a, v) in hv.iter().zip(&s.vectors[k]) {
                assert!((a - v * s.energies[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn propagator_examples() {
        let p = HeisenbergParams::new(1.1, 0.2, 0.3, 0.4, 0.5);
        assert!(propagator(&p, 0.0).mat().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);

        // J = 1, κ = 1: Jx = 2, Jy = 0
        let p = HeisenbergParams::from_j_kappa(1.0, 1.0, 0.0, 0.0, 0.0);
        let u = propagator(&p, FRAC_PI_4);
        let (s, c) = FRAC_PI_4.sin_cos();
        assert!((u.mat()[(0, 0)] - C64::new(c, 0.0)).norm() < 1e-15);
        assert!((u.mat()[(0, 3)] - C64::new(0.0, -s)).norm() < 1e-15);
        assert!((u.mat()[(3, 0)] - C64::new(0.0, -s)).norm() < 1e-15);
    }

    #[test]
    fn sinc_limit() {
        let p = HeisenbergParams::new(0.0, 0.0, 0.7, 0.0, 0.0);
        let u = propagator(&p, 1.3);
        let expect = expm_oracle(&hamiltonian(&p), 1.3).unwrap();
        assert!(u.mat().max_abs_diff(expect.mat()) < 1e-14);
    }

    #[test]
    fn evolve_examples() {
        let p = HeisenbergParams::from_j_kappa(1.0, 0.5, 0.0, 0.0, 0.0);
        let half = ComplexMatrix::real_diag(&[0.5, 0.5]);
        assert!(evolve_even(0.0, &p, 0.77).unwrap().block().max_abs_diff(&half) < 1e-15);
        assert!(evolve_odd(0.0, &p, 0.77).unwrap().block().max_abs_diff(&half) < 1e-15);

        // 2Jκt = π/2
        let t = PI / 4.0 / p.j_kappa();
        let got = evolve_even(1.0, &p, t).unwrap();
        let expect = ComplexMatrix::from_rows(&[
            [C64::new(0.5, 0.0), C64::new(0.0, 0.5)],
            [C64::new(0.0, -0.5), C64::new(0.5, 0.0)],
        ]);
        assert!(got.block().max_abs_diff(&expect) < 1e-15);

        // 2Jt = π
        let t = PI / 2.0 / p.j();
        let got = evolve_odd(1.0, &p, t).unwrap();
        assert!(got.block().max_abs_diff(&ComplexMatrix::real_diag(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn field_case_lambda_one() {
        let p = HeisenbergParams::from_j_kappa(1.0, 0.95, 0.2, 1.0, 0.5);
        let t = 0.83;
        let (u, c) = p.even_block_coefficients(t);
        let got = evolve_even(1.0, &p, t).unwrap();
        assert!((got.block()[(0, 0)].re - u.norm_sqr()).abs() < 1e-15);
        assert!((got.block()[(1, 1)].re - c.norm_sqr()).abs() < 1e-15);
        assert!((got.block()[(0, 1)] + u * c).norm() < 1e-15);
    }

    #[test]
    fn embed_examples() {
        let half = |s| SectorState::new(s, ComplexMatrix::real_diag(&[0.5, 0.5])).unwrap();
        let e = embed_sector(&half(Sector::Even));
        assert!(e.mat().max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
        let o = embed_sector(&half(Sector::Odd));
        assert!(o.mat().max_abs_diff(&ComplexMatrix::real_diag(&[0.0, 0.5, 0.5, 0.0])) < 1e-15);

        let blk = ComplexMatrix::from_rows(&[
            [C64::new(0.5, 0.0), C64::new(0.0, 0.5)],
            [C64::new(0.0, -0.5), C64::new(0.5, 0.0)],
        ]);
        let s = SectorState::new(Sector::Even, blk).unwrap();
        let x = XState::from_density(&embed_sector(&s)).unwrap();
        assert_eq!(x.w, C64::new(0.0, 0.5));
        assert!((concurrence_x(&x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sector_state_validation() {
        assert!(SectorState::new(Sector::Even, ComplexMatrix::real_diag(&[1.2, -0.2])).is_err());
        assert!(SectorState::new(Sector::Even, ComplexMatrix::real_diag(&[0.6, 0.6])).is_err());
        assert!(SectorState::initial(Sector::Odd, 1.5).is_err());
    }

    #[test]
    fn analytic_concurrence_examples() {
        let p = HeisenbergParams::from_j_kappa(1.0, 0.6, 0.0, 0.0, 0.0);
        let t = PI / (4.0 * p.j_kappa());
        assert!((concurrence_analytic(SectorInitial::Even(1.0), &p, t) - 1.0).abs() < 1e-15);

        let iso = HeisenbergParams::from_j_kappa(1.0, 0.0, 0.4, 0.0, 0.0);
        for k in 0..20 {
            assert_eq!(concurrence_analytic(SectorInitial::Even(1.0), &iso, 0.3 * k as f64), 0.0);
        }

        let tiny = HeisenbergParams::from_j_kappa(1.0, 0.6, 0.0, 1e-8, 0.0);
        for k in 0..20 {
            let t = 0.17 * k as f64;
            let c = concurrence_analytic(SectorInitial::Even(0.8), &tiny, t);
            let limit = 0.8 * (2.0 * tiny.j_kappa() * t).sin().abs();
            assert!((c - limit).abs() < 1e-12);
        }
    }

    fn params() -> impl Strategy<Value = (HeisenbergParams, f64)> {
        (
            proptest::array::uniform5(-2.0f64..2.0),
            -3.0f64..3.0,
        )
            .prop_map(|(v, t)| (HeisenbergParams::new(v[0], v[1], v[2], v[3], v[4]), t))
    }

    proptest! {
        #[test]
        fn propagator_matches_oracle((p, t) in params()) {
            let closed = propagator(&p, t);
            let oracle = expm_oracle(&hamiltonian(&p), t).unwrap();
            prop_assert!(closed.mat().max_abs_diff(oracle.mat()) < 1e-10);
        }

        #[test]
        fn propagator_group_law((p, t) in params(), s in -3.0f64..3.0) {
            let lhs = propagator(&p, t).mat().matmul(propagator(&p, s).mat());
            prop_assert!(lhs.max_abs_diff(propagator(&p, t + s).mat()) < 1e-10);
        }

        #[test]
        fn spectrum_matches_eigensolver((p, _t) in params()) {
            let mut closed = spectrum(&p).energies.to_vec();
            closed.sort_by(|a, b| b.total_cmp(a));
            let num = herm_eig(&hamiltonian(&p)).unwrap().values;
            for (a, b) in closed.iter().zip(&num) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn sector_evolution_matches_conjugation((p, t) in params(), l in -1.0f64..1.0) {
            let u = propagator(&p, t);
            for s in [Sector::Even, Sector::Odd] {
                let init = embed_sector(&SectorState::initial(s, l).unwrap());
                let full = init.conjugate(&u).unwrap();
                let closed = match s {
                    Sector::Even => evolve_even(l, &p, t).unwrap(),
                    Sector::Odd => evolve_odd(l, &p, t).unwrap(),
                };
                prop_assert!(embed_sector(&closed).mat().max_abs_diff(full.mat()) < 1e-12);
            }
        }

        #[test]
        fn analytic_concurrence_matches_pipeline((p, t) in params(), l in -1.0f64..1.0) {
            let even = concurrence_of_sector(&evolve_even(l, &p, t).unwrap());
            prop_assert!((even - concurrence_analytic(SectorInitial::Even(l), &p, t)).abs() < 1e-10);
            let odd = concurrence_of_sector(&evolve_odd(l, &p, t).unwrap());
            prop_assert!((odd - concurrence_analytic(SectorInitial::Odd(l), &p, t)).abs() < 1e-10);
        }

        #[test]
        fn zero_field_concurrence_factorises(j in 0.1f64..2.0, k in -1.0f64..1.0, jz in -1.0f64..1.0, t in 0.0f64..5.0, l in -1.0f64..1.0) {
            let p = HeisenbergParams::from_j_kappa(j, k, jz, 0.0, 0.0);
            let c1 = concurrence_of_sector(&evolve_even(1.0, &p, t).unwrap());
            let cl = concurrence_of_sector(&evolve_even(l, &p, t).unwrap());
            prop_assert!((cl - l.abs() * c1).abs() < 1e-12);
            if p.j_kappa().abs() > 1e-3 {
                let period = PI / (2.0 * p.j_kappa().abs());
                let shifted = concurrence_analytic(SectorInitial::Even(l), &p, t + period);
                prop_assert!((shifted - concurrence_analytic(SectorInitial::Even(l), &p, t)).abs() < 1e-10);
            }
        }
    }
}
