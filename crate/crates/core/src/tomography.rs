//! Two-qubit Pauli-pair measurements, shot sampling and state reconstruction.
//!
//! Outcomes of a setting `P1⊗P2` are indexed `0 = ++, 1 = +−, 2 = −+, 3 = −−`
//! (first sign for qubit 0). Three protocols are supported:
//!
//! * `Full`: all nine settings, linear inversion then PSD repair.
//! * `Partial5`: XX, YY, ZZ, XY, YX, enough for any X-state.
//! * `Partial3`: XX, YY, ZZ, enough for X-states with real coherences.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{fidelity, herm_eig, pauli_pair, ComplexMatrix, DensityMatrix, Pauli, C64};
use crate::rng::{split_seed, stream_rng};
use crate::xstate::{concurrence_wootters_oracle, concurrence_x, non_x_mass, XState};

/// Measured Pauli pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservableSetting {
    pub first: Pauli,
    pub second: Pauli,
}

impl ObservableSetting {
    pub const fn new(first: Pauli, second: Pauli) -> Self {
        ObservableSetting { first, second }
    }

    pub fn label(&self) -> String {
        format!("{:?}{:?}", self.first, self.second)
    }

    /// Position in [`FULL`]; also the RNG stream of the setting.
    pub fn full_index(&self) -> Result<usize> {
        FULL.iter()
            .position(|s| s == self)
            .ok_or_else(|| Error::Protocol(format!("{} is not a measurable setting", self.label())))
    }
}

use Pauli::{X, Y, Z};

pub const FULL: [ObservableSetting; 9] = [
    ObservableSetting::new(X, X),
    ObservableSetting::new(X, Y),
    ObservableSetting::new(X, Z),
    ObservableSetting::new(Y, X),
    ObservableSetting::new(Y, Y),
    ObservableSetting::new(Y, Z),
    ObservableSetting::new(Z, X),
    ObservableSetting::new(Z, Y),
    ObservableSetting::new(Z, Z),
];

pub const PARTIAL5: [ObservableSetting; 5] = [
    ObservableSetting::new(X, X),
    ObservableSetting::new(Y, Y),
    ObservableSetting::new(Z, Z),
    ObservableSetting::new(X, Y),
    ObservableSetting::new(Y, X),
];

pub const PARTIAL3: [ObservableSetting; 3] = [
    ObservableSetting::new(X, X),
    ObservableSetting::new(Y, Y),
    ObservableSetting::new(Z, Z),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Full,
    Partial5,
    Partial3,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Full, Protocol::Partial5, Protocol::Partial3];

    pub fn settings(self) -> &'static [ObservableSetting] {
        match self {
            Protocol::Full => &FULL,
            Protocol::Partial5 => &PARTIAL5,
            Protocol::Partial3 => &PARTIAL3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Full => "full",
            Protocol::Partial5 => "partial5",
            Protocol::Partial3 => "partial3",
        }
    }
}

/// Shot counts for one setting, ordered ++, +−, −+, −−.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub setting: ObservableSetting,
    pub shots: u64,
    pub counts: [u64; 4],
}

impl ShotRecord {
    pub fn new(setting: ObservableSetting, counts: [u64; 4]) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::Protocol("a shot record needs at least one shot".into()));
        }
        Ok(ShotRecord {
            setting,
            shots,
            counts,
        })
    }
}

/// Outcome frequencies of one setting, from counts or from exact probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingData {
    pub setting: ObservableSetting,
    pub freqs: [f64; 4],
}

impl From<&ShotRecord> for SettingData {
    fn from(r: &ShotRecord) -> Self {
        let n = r.shots as f64;
        SettingData {
            setting: r.setting,
            freqs: r.counts.map(|k| k as f64 / n),
        }
    }
}

impl SettingData {
    /// `(⟨P1⊗P2⟩, ⟨P1⊗I⟩, ⟨I⊗P2⟩)`
    pub fn expectations(&self) -> (f64, f64, f64) {
        let [pp, pm, mp, mm] = self.freqs;
        (pp - pm - mp + mm, pp + pm - mp - mm, pp - pm + mp - mm)
    }
}

/// `(joint, marginal of qubit 0, marginal of qubit 1)` from a shot record.
pub fn expectations_from_counts(rec: &ShotRecord) -> (f64, f64, f64) {
    SettingData::from(rec).expectations()
}

fn projector(p: Pauli, sign: f64) -> ComplexMatrix {
    (&ComplexMatrix::identity(2) + &p.matrix().scale_real(sign)).scale_real(0.5)
}

/// Born probabilities `Tr(ρ Π_{s1} ⊗ Π_{s2})` for the four outcomes.
pub fn outcome_probabilities(rho: &DensityMatrix, setting: ObservableSetting) -> Result<[f64; 4]> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!("tomography needs dim 4, got {}", rho.dim())));
    }
    setting.full_index()?;
    let mut out = [0.0; 4];
    for (k, (s1, s2)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        let proj = projector(setting.first, s1).kron(&projector(setting.second, s2));
        out[k] = rho.expectation(&proj).re.max(0.0);
    }
    let s: f64 = out.iter().sum();
    Ok(out.map(|p| p / s))
}

/// Multinomial draw by sequential binomials.
pub(crate) fn sample_multinomial<R: Rng>(rng: &mut R, n: u64, probs: &[f64; 4]) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut left = n;
    let mut mass = 1.0f64;
    for k in 0..3 {
        if left == 0 {
            break;
        }
        let q = if mass > 0.0 { (probs[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, q).expect("probability in [0, 1]").sample(rng);
        counts[k] = draw;
        left -= draw;
        mass -= probs[k];
    }
    counts[3] = left;
    counts
}

/// Draws `shots` outcomes of `setting`. The stream is the setting's index in
/// [`FULL`], so protocols sharing a setting see the same counts for a given seed.
pub fn sample_setting(
    rho: &DensityMatrix,
    setting: ObservableSetting,
    shots: u64,
    seed: u64,
) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::Protocol("shots must be at least 1".into()));
    }
    let probs = outcome_probabilities(rho, setting)?;
    let mut rng = stream_rng(seed, setting.full_index()? as u64);
    ShotRecord::new(setting, sample_multinomial(&mut rng, shots, &probs))
}

fn find(data: &[SettingData], s: ObservableSetting) -> Result<&SettingData> {
    data.iter()
        .find(|d| d.setting == s)
        .ok_or_else(|| Error::Protocol(format!("missing setting {}", s.label())))
}

/// Linear inversion `¼ Σ T_ij σi⊗σj` from the nine settings, without PSD repair.
/// Single-qubit terms are averaged over the three settings that contain them.
pub fn linear_inversion_full(data: &[SettingData]) -> Result<ComplexMatrix> {
    let axes = [X, Y, Z];
    let mut t = [[0.0f64; 4]; 4];
    t[0][0] = 1.0;
    for (i, &a) in axes.iter().enumerate() {
        for (j, &b) in axes.iter().enumerate() {
            let (joint, m1, m2) = find(data, ObservableSetting::new(a, b))?.expectations();
            t[i + 1][j + 1] = joint;
            t[i + 1][0] += m1 / 3.0;
            t[0][j + 1] += m2 / 3.0;
        }
    }
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (i, &pa) in Pauli::ALL.iter().enumerate() {
        for (j, &pb) in Pauli::ALL.iter().enumerate() {
            rho = &rho + &pauli_pair(pa, pb).scale_real(0.25 * t[i][j]);
        }
    }
    Ok(rho.hermitian_part())
}

pub fn reconstruct_full_data(data: &[SettingData]) -> Result<DensityMatrix> {
    psd_project(&linear_inversion_full(data)?)
}

/// Full tomography from the nine shot records.
pub fn reconstruct_full(records: &[ShotRecord]) -> Result<DensityMatrix> {
    let data: Vec<SettingData> = records.iter().map(SettingData::from).collect();
    reconstruct_full_data(&data)
}

fn clamp_coherence(v: C64, bound: f64) -> C64 {
    let n = v.norm();
    if n > bound {
        if n == 0.0 {
            v
        } else {
            v * (bound / n)
        }
    } else {
        v
    }
}

fn x_from_parts(zz: &SettingData, w: C64, z: C64) -> Result<XState> {
    let [a, b, c, d] = zz.freqs;
    let w = clamp_coherence(w, (a * d).sqrt());
    let z = clamp_coherence(z, (b * c).sqrt());
    XState::new(a, b, c, d, w, z)
}

/// X-state from XX, YY, ZZ, XY, YX.
///
/// With `Tr(ρ XX) = 2Re w + 2Re z`, `Tr(ρ YY) = −2Re w + 2Re z`,
/// `Tr(ρ XY) = 2(Im z − Im w)` and `Tr(ρ YX) = −2(Im w + Im z)`.
pub fn reconstruct_x5_data(data: &[SettingData]) -> Result<XState> {
    let xx = find(data, ObservableSetting::new(X, X))?.expectations().0;
    let yy = find(data, ObservableSetting::new(Y, Y))?.expectations().0;
    let xy = find(data, ObservableSetting::new(X, Y))?.expectations().0;
    let yx = find(data, ObservableSetting::new(Y, X))?.expectations().0;
    let zz = find(data, ObservableSetting::new(Z, Z))?;
    let w = C64::new(0.25 * (xx - yy), -0.25 * (xy + yx));
    let z = C64::new(0.25 * (xx + yy), 0.25 * (xy - yx));
    x_from_parts(zz, w, z)
}

/// Real X-state from XX, YY, ZZ.
pub fn reconstruct_x3_data(data: &[SettingData]) -> Result<XState> {
    let xx = find(data, ObservableSetting::new(X, X))?.expectations().0;
    let yy = find(data, ObservableSetting::new(Y, Y))?.expectations().0;
    let zz = find(data, ObservableSetting::new(Z, Z))?;
    x_from_parts(zz, C64::new(0.25 * (xx - yy), 0.0), C64::new(0.25 * (xx + yy), 0.0))
}

pub fn reconstruct_x5(records: &[ShotRecord]) -> Result<XState> {
    let data: Vec<SettingData> = records.iter().map(SettingData::from).collect();
    reconstruct_x5_data(&data)
}

pub fn reconstruct_x3(records: &[ShotRecord]) -> Result<XState> {
    let data: Vec<SettingData> = records.iter().map(SettingData::from).collect();
    reconstruct_x3_data(&data)
}

/// Nearest density matrix by eigenvalue truncation: negative eigenvalues are
/// zeroed from the smallest up and their mass spread evenly over the rest.
pub fn psd_project(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let herr = m.hermiticity_error();
    if herr > 1e-10 {
        return Err(Error::NotHermitian(herr));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::Trace(tr.re));
    }
    let h = m.hermitian_part();
    let eig = herm_eig(&h)?;
    if eig.values.iter().all(|&l| l >= 0.0) {
        return Ok(DensityMatrix::from_trusted(h.scale_real(1.0 / tr.re)));
    }
    let mut lam = eig.values.clone();
    let mut acc = 0.0;
    let mut i = lam.len();
    while i > 0 && lam[i - 1] + acc / (i as f64) < 0.0 {
        acc += lam[i - 1];
        lam[i - 1] = 0.0;
        i -= 1;
    }
    for l in lam.iter_mut().take(i) {
        *l += acc / i as f64;
    }
    let s: f64 = lam.iter().sum();
    let v = &eig.vectors;
    let n = lam.len();
    let projected = ComplexMatrix::from_fn(n, n, |r, c| {
        (0..n).map(|k| v[(r, k)] * (lam[k] / s) * v[(c, k)].conj()).sum()
    });
    Ok(DensityMatrix::from_trusted(projected))
}

/// Total modulus of the eight non-X entries.
pub fn leakage(rho: &DensityMatrix) -> f64 {
    non_x_mass(rho.mat())
}

/// Exact probabilities or a finite number of shots per setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Exact,
    Shots(u64),
}

impl Sampling {
    pub fn shots(&self) -> Option<u64> {
        match self {
            Sampling::Exact => None,
            Sampling::Shots(n) => Some(*n),
        }
    }
}

/// Frequencies for one setting, with symmetric readout bit flips of probability `p_readout`.
pub fn measure(
    rho: &DensityMatrix,
    setting: ObservableSetting,
    sampling: Sampling,
    seed: u64,
    p_readout: f64,
) -> Result<SettingData> {
    match sampling {
        Sampling::Exact => {
            let probs = outcome_probabilities(rho, setting)?;
            Ok(SettingData {
                setting,
                freqs: crate::noise::readout_flip_probabilities(&probs, p_readout),
            })
        }
        Sampling::Shots(n) => {
            let rec = sample_setting(rho, setting, n, seed)?;
            let rec = if p_readout > 0.0 {
                let stream = 16 + setting.full_index()? as u64;
                crate::noise::readout_flip(&rec, p_readout, split_seed(seed, stream))?
            } else {
                rec
            };
            Ok(SettingData::from(&rec))
        }
    }
}

/// Outcome of one protocol applied to one state.
#[derive(Debug, Clone, Serialize)]
pub struct TomographyReport {
    pub protocol: Protocol,
    pub reconstructed: ComplexMatrix,
    pub fidelity_to_target: f64,
    pub concurrence_estimate: f64,
    /// Non-X mass of the measured (pre-tomography) state.
    pub leakage: f64,
    pub shots: Option<u64>,
    pub seed: u64,
    pub fidelity_convention: &'static str,
}

pub const FIDELITY_CONVENTION: &str = "uhlmann_squared";

/// Reconstruction by `protocol` from already measured data.
pub fn reconstruct(protocol: Protocol, data: &[SettingData]) -> Result<(DensityMatrix, f64)> {
    match protocol {
        Protocol::Full => {
            let rho = reconstruct_full_data(data)?;
            let c = concurrence_wootters_oracle(&rho)?;
            Ok((rho, c))
        }
        Protocol::Partial5 => {
            let x = reconstruct_x5_data(data)?;
            Ok((x.to_matrix(), concurrence_x(&x)))
        }
        Protocol::Partial3 => {
            let x = reconstruct_x3_data(data)?;
            Ok((x.to_matrix(), concurrence_x(&x)))
        }
    }
}

/// Runs `protocols` on `measured` and compares each reconstruction with `target`.
/// All settings are measured once and shared between protocols.
pub fn run_protocols(
    target: &DensityMatrix,
    measured: &DensityMatrix,
    protocols: &[Protocol],
    sampling: Sampling,
    seed: u64,
    p_readout: f64,
) -> Result<Vec<TomographyReport>> {
    let needed: Vec<ObservableSetting> = FULL
        .iter()
        .copied()
        .filter(|s| protocols.iter().any(|p| p.settings().contains(s)))
        .collect();
    let data = needed
        .iter()
        .map(|&s| measure(measured, s, sampling, seed, p_readout))
        .collect::<Result<Vec<_>>>()?;
    let leak = leakage(measured);
    protocols
        .iter()
        .map(|&protocol| {
            let (rho, c) = reconstruct(protocol, &data)?;
            Ok(TomographyReport {
                protocol,
                fidelity_to_target: fidelity(target, &rho)?,
                reconstructed: rho.into_inner(),
                concurrence_estimate: c,
                leakage: leak,
                shots: sampling.shots(),
                seed,
                fidelity_convention: FIDELITY_CONVENTION,
            })
        })
        .collect()
}

/// `(F^f, F^p5, F^p3)` reports for one state.
pub fn robustness_report(
    target: &DensityMatrix,
    noisy_output: &DensityMatrix,
    sampling: Sampling,
    seed: u64,
    p_readout: f64,
) -> Result<[TomographyReport; 3]> {
    let v = run_protocols(target, noisy_output, &Protocol::ALL, sampling, seed, p_readout)?;
    Ok(v.try_into().expect("three protocols"))
}

/// Median trace distance between `rho` and its full reconstruction over `seeds`.
pub fn median_full_error(rho: &DensityMatrix, shots: u64, seeds: &[u64]) -> Result<f64> {
    let mut errs = seeds
        .par_iter()
        .map(|&s| {
            let data = FULL
                .iter()
                .map(|&st| measure(rho, st, Sampling::Shots(shots), s, 0.0))
                .collect::<Result<Vec<_>>>()?;
            crate::qmat::trace_distance(rho, &reconstruct_full_data(&data)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    errs.sort_by(f64::total_cmp);
    Ok(median_sorted(&errs))
}

pub fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xstate::{from_spectral, XSpectral};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> DensityMatrix {
        let s = FRAC_1_SQRT_2;
        DensityMatrix::from_pure(&[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)])
            .unwrap()
    }

    fn exact(rho: &DensityMatrix, settings: &[ObservableSetting]) -> Vec<SettingData> {
        settings
            .iter()
            .map(|&s| measure(rho, s, Sampling::Exact, 0, 0.0).unwrap())
            .collect()
    }

    #[test]
    fn sampling_examples() {
        let zero = DensityMatrix::basis_state(4, 0).unwrap();
        let rec = sample_setting(&zero, ObservableSetting::new(Z, Z), 500, 3).unwrap();
        assert_eq!(rec.counts, [500, 0, 0, 0]);

        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let rec = sample_setting(&mixed, ObservableSetting::new(X, X), 1_000_000, 9).unwrap();
        for k in rec.counts {
            assert!((k as f64 / 1e6 - 0.25).abs() < 0.01);
        }

        let rec = sample_setting(&bell(), ObservableSetting::new(X, X), 8000, 1).unwrap();
        assert_eq!(rec.counts[1] + rec.counts[2], 0);
        assert_eq!(rec.counts.iter().sum::<u64>(), 8000);
    }

    #[test]
    fn sampling_is_seeded() {
        let rho = XState::maximally_mixed().to_matrix();
        let s = ObservableSetting::new(Y, Y);
        assert_eq!(sample_setting(&rho, s, 1000, 5).unwrap(), sample_setting(&rho, s, 1000, 5).unwrap());
        assert_ne!(sample_setting(&rho, s, 1000, 5).unwrap(), sample_setting(&rho, s, 1000, 6).unwrap());
        assert!(sample_setting(&rho, s, 0, 5).is_err());
        assert!(sample_setting(&rho, ObservableSetting::new(Pauli::I, Z), 10, 5).is_err());
    }

    #[test]
    fn expectation_examples() {
        let s = ObservableSetting::new(Z, Z);
        assert_eq!(expectations_from_counts(&ShotRecord::new(s, [10, 0, 0, 0]).unwrap()), (1.0, 1.0, 1.0));
        assert_eq!(expectations_from_counts(&ShotRecord::new(s, [5, 5, 5, 5]).unwrap()), (0.0, 0.0, 0.0));
        assert_eq!(
            expectations_from_counts(&ShotRecord::new(s, [4000, 0, 0, 4000]).unwrap()),
            (1.0, 0.0, 0.0)
        );
    }

    #[test]
    fn x_coherence_trace_formulas() {
        let x = XState::new(0.3, 0.2, 0.25, 0.25, C64::new(0.1, -0.15), C64::new(-0.05, 0.12)).unwrap();
        let rho = x.to_matrix();
        let tr = |a, b| rho.expectation(&pauli_pair(a, b)).re;
        assert!((tr(X, X) - 2.0 * (x.w.re + x.z.re)).abs() < 1e-15);
        assert!((tr(Y, Y) - 2.0 * (x.z.re - x.w.re)).abs() < 1e-15);
        assert!((tr(X, Y) - 2.0 * (x.z.im - x.w.im)).abs() < 1e-15);
        assert!((tr(Y, X) + 2.0 * (x.w.im + x.z.im)).abs() < 1e-15);
    }

    #[test]
    fn x5_bell_and_mixed() {
        let x = reconstruct_x5_data(&exact(&bell(), &PARTIAL5)).unwrap();
        assert!(x.max_diff(&XState::real(0.5, 0.0, 0.0, 0.5, 0.5, 0.0).unwrap()) < 1e-12);
        let m = XState::maximally_mixed().to_matrix();
        let x = reconstruct_x5_data(&exact(&m, &PARTIAL5)).unwrap();
        assert!(x.max_diff(&XState::maximally_mixed()) < 1e-15);
    }

    #[test]
    fn x3_drops_imaginary_parts() {
        let x = XState::new(0.5, 0.0, 0.0, 0.5, C64::new(0.0, 0.4), C64::new(0.0, 0.0)).unwrap();
        let r = reconstruct_x3_data(&exact(&x.to_matrix(), &PARTIAL3)).unwrap();
        assert!(r.w.norm() < 1e-15);
    }

    #[test]
    fn missing_settings_rejected() {
        let rho = bell();
        assert!(matches!(reconstruct_x5_data(&exact(&rho, &PARTIAL3)), Err(Error::Protocol(_))));
        assert!(matches!(reconstruct_full_data(&exact(&rho, &PARTIAL5)), Err(Error::Protocol(_))));
        assert!(matches!(reconstruct_x3_data(&exact(&rho, &PARTIAL3[..2])), Err(Error::Protocol(_))));
    }

    #[test]
    fn psd_projection_examples() {
        let out = psd_project(&ComplexMatrix::real_diag(&[1.1, -0.1, 0.0, 0.0])).unwrap();
        assert!(out.mat().max_abs_diff(&ComplexMatrix::real_diag(&[1.0, 0.0, 0.0, 0.0])) < 1e-12);
        let out = psd_project(&ComplexMatrix::real_diag(&[0.7, 0.5, -0.1, -0.1])).unwrap();
        assert!(out.mat().max_abs_diff(&ComplexMatrix::real_diag(&[0.6, 0.4, 0.0, 0.0])) < 1e-12);
        let ok = bell();
        assert!(psd_project(ok.mat()).unwrap().mat().max_abs_diff(ok.mat()) < 1e-12);
        assert!(psd_project(&ComplexMatrix::real_diag(&[0.5, 0.4])).is_err());
    }

    #[test]
    fn leakage_examples() {
        assert_eq!(leakage(&XState::maximally_mixed().to_matrix()), 0.0);
        let s = FRAC_1_SQRT_2;
        let plus0 = DensityMatrix::from_pure(&[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)])
            .unwrap();
        assert!((leakage(&plus0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_exact_report_is_perfect() {
        let x = from_spectral(&XSpectral::new([0.4, 0.3, 0.2, 0.1], 0.5, 0.9).unwrap());
        let rho = x.to_matrix();
        let reps = robustness_report(&rho, &rho, Sampling::Exact, 0, 0.0).unwrap();
        for r in &reps {
            assert!((r.fidelity_to_target - 1.0).abs() < 1e-9, "{:?}", r.protocol);
            assert_eq!(r.fidelity_convention, "uhlmann_squared");
        }
    }

    #[test]
    fn shared_settings_share_counts() {
        let rho = bell();
        let a = measure(&rho, ObservableSetting::new(X, X), Sampling::Shots(800), 11, 0.02).unwrap();
        let b = measure(&rho, ObservableSetting::new(X, X), Sampling::Shots(800), 11, 0.02).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn error_shrinks_with_shots() {
        let x = from_spectral(&XSpectral::new([0.4, 0.3, 0.2, 0.1], 0.5, 0.9).unwrap());
        let seeds: Vec<u64> = (0..50).collect();
        let lo = median_full_error(&x.to_matrix(), 1000, &seeds).unwrap();
        let hi = median_full_error(&x.to_matrix(), 64000, &seeds).unwrap();
        assert!(hi < lo, "{hi} !< {lo}");
    }

    fn random_state() -> impl Strategy<Value = DensityMatrix> {
        proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
            let g = ComplexMatrix::from_fn(4, 4, |r, c| C64::new(v[2 * (4 * r + c)], v[2 * (4 * r + c) + 1]));
            let m = g.matmul(&g.adjoint());
            let tr = m.trace().re;
            DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn full_inversion_is_exact(rho in random_state()) {
            let raw = linear_inversion_full(&exact(&rho, &FULL)).unwrap();
            prop_assert!(raw.max_abs_diff(rho.mat()) < 1e-12);
        }

        #[test]
        fn psd_project_idempotent(rho in random_state(), shift in 0.0f64..0.3) {
            let bent = &rho.mat().clone() - &ComplexMatrix::real_diag(&[shift, -shift, shift, -shift]);
            let once = psd_project(&bent).unwrap();
            let twice = psd_project(once.mat()).unwrap();
            prop_assert!(once.mat().max_abs_diff(twice.mat()) < 1e-12);
            prop_assert!((once.mat().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(once.eigenvalues().iter().all(|&l| l > -1e-12));
        }
    }
}
