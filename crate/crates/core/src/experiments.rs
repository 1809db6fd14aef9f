//! Experiment drivers behind the `xsim` binary.
//!
//! Each experiment reads an [`ExperimentConfig`], evaluates independent grid or
//! time points in parallel with per-point seeds, and returns rows in a fixed
//! order so reruns are byte-identical.
//!
//! The zero-field experiments prepare the two-sector state directly: a product
//! of `diag((1+λ)/2, (1−λ)/2)` and `diag(cos²γ/2, sin²γ/2)` is copied onto qubits
//! 2 and 3, and the eigenbasis block with `θ = Jκt`, `φ = Jt` is applied. The
//! first rotation and CNOT of the general classical block act trivially on this
//! input and are left out. The result is a real X-state with the same
//! concurrence as the Heisenberg-evolved state.
//!
//! The field experiments evolve the same initial weights with the exact
//! propagator, strip the coherence phases, invert the real part into spectral
//! data, and append the phase-restoring `RZ` pair.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::circuits::{build_xstate_circuit, eigenbasis_block, run_density, Circuit, Gate};
use crate::error::{Error, Result};
use crate::heisenberg::{propagator, HeisenbergParams};
use crate::noise::{run_noisy, NoiseModel};
use crate::qmat::{ComplexMatrix, DensityMatrix};
use crate::rng::split_seed;
use crate::tomography::{run_protocols, Protocol, Sampling, FIDELITY_CONVENTION};
use crate::xstate::{
    concurrence_wootters_oracle, concurrence_x, from_spectral, strip_xstate_phases, to_spectral,
    PhaseRecord, XSpectral, XState,
};

pub const DEFAULT_SHOTS: u64 = 8000;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TIME_POINTS: usize = 64;
pub const DEFAULT_RESOLUTION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TetraSweep,
    HeisenbergConc,
    HeisenbergFidelity,
    FieldConc,
    FieldFidelity,
    XprepSingle,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::TetraSweep,
        ExperimentKind::HeisenbergConc,
        ExperimentKind::HeisenbergFidelity,
        ExperimentKind::FieldConc,
        ExperimentKind::FieldFidelity,
        ExperimentKind::XprepSingle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TetraSweep => "tetra_sweep",
            ExperimentKind::HeisenbergConc => "heisenberg_conc",
            ExperimentKind::HeisenbergFidelity => "heisenberg_fidelity",
            ExperimentKind::FieldConc => "field_conc",
            ExperimentKind::FieldFidelity => "field_fidelity",
            ExperimentKind::XprepSingle => "xprep_single",
        }
    }

    fn has_field(self) -> bool {
        matches!(self, ExperimentKind::FieldConc | ExperimentKind::FieldFidelity)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown output format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePreset {
    Ideal,
    Default,
}

/// Either a named preset or explicit channel strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Preset(NoisePreset),
    Model(NoiseModel),
}

impl NoiseSpec {
    pub fn model(&self) -> NoiseModel {
        match self {
            NoiseSpec::Preset(NoisePreset::Ideal) => NoiseModel::ideal(),
            NoiseSpec::Preset(NoisePreset::Default) => NoiseModel::default(),
            NoiseSpec::Model(m) => *m,
        }
    }
}

/// Experiment parameters; every key is optional and falls back to the
/// experiment's default bundle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub kappa: Option<f64>,
    #[serde(rename = "Jz")]
    pub jz: Option<f64>,
    #[serde(rename = "B")]
    pub b_avg: Option<f64>,
    #[serde(rename = "b")]
    pub b_inh: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub resolution: Option<usize>,
    pub t_max: Option<f64>,
    pub time_points: Option<usize>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub exact: Option<bool>,
    pub noise: Option<NoiseSpec>,
    pub protocols: Option<Vec<Protocol>>,
    pub xstate: Option<XState>,
    pub spectral: Option<XSpectral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub exact: bool,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.params.validate(cfg.experiment)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) -> Result<()> {
        if let Some(s) = o.seed {
            self.params.seed = Some(s);
        }
        if let Some(n) = o.shots {
            self.params.shots = Some(n);
        }
        if o.exact {
            self.params.exact = Some(true);
        }
        self.params.validate(self.experiment)
    }
}

fn check(name: &str, v: Option<f64>, ok: impl Fn(f64) -> bool, want: &str) -> Result<()> {
    match v {
        Some(x) if !x.is_finite() || !ok(x) => {
            Err(Error::Config(format!("{name} = {x} is invalid; expected {want}")))
        }
        _ => Ok(()),
    }
}

impl Params {
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        check("lambda", self.lambda, |x| (-1.0..=1.0).contains(&x), "a value in [-1, 1]")?;
        let any = |_: f64| true;
        for (name, v) in [
            ("gamma", self.gamma),
            ("J", self.j),
            ("kappa", self.kappa),
            ("Jz", self.jz),
            ("B", self.b_avg),
            ("b", self.b_inh),
            ("theta", self.theta),
            ("phi", self.phi),
        ] {
            check(name, v, any, "a finite number")?;
        }
        check("t_max", self.t_max, |x| x > 0.0, "a positive number")?;
        if self.resolution == Some(0) || self.resolution.is_some_and(|r| r > 64) {
            return Err(Error::Config("resolution must lie in 1..=64".into()));
        }
        if self.time_points == Some(0) {
            return Err(Error::Config("time_points must be at least 1".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if let Some(NoiseSpec::Model(m)) = &self.noise {
            m.validate()?;
        }
        if !kind.has_field() && kind != ExperimentKind::XprepSingle
            && (self.b_avg.is_some() || self.b_inh.is_some())
        {
            return Err(Error::Config(format!(
                "B and b apply only to field experiments, not {}",
                kind.name()
            )));
        }
        if let Some(ps) = &self.protocols {
            if ps.is_empty() {
                return Err(Error::Config("protocols must not be empty".into()));
            }
            if kind.has_field() && ps.contains(&Protocol::Partial3) {
                return Err(Error::Config(
                    "partial3 assumes real coherences and is not available with a field".into(),
                ));
            }
        }
        if self.xstate.is_some() && self.spectral.is_some() {
            return Err(Error::Config("give either xstate or spectral, not both".into()));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn sampling(&self) -> Sampling {
        if self.exact.unwrap_or(false) {
            Sampling::Exact
        } else {
            Sampling::Shots(self.shots.unwrap_or(DEFAULT_SHOTS))
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise.map(|n| n.model()).unwrap_or_default()
    }
}

/// Physics parameters of the time-dependent experiments after defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsSetup {
    pub lambda: f64,
    pub gamma: f64,
    pub hamiltonian: HeisenbergParams,
    pub times: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub t_max: f64,
    pub points: usize,
}

impl Grid {
    pub fn times(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![0.0];
        }
        let n = (self.points - 1) as f64;
        (0..self.points).map(|k| self.t_max * k as f64 / n).collect()
    }
}

/// `γ` giving `cos²(γ/2) = q`.
pub fn gamma_for_weight(q: f64) -> f64 {
    2.0 * q.sqrt().acos()
}

impl DynamicsSetup {
    pub fn resolve(kind: ExperimentKind, p: &Params) -> Self {
        let field = kind.has_field();
        let (gamma, kappa, b_avg, b_inh) = if field {
            (gamma_for_weight(0.75), 0.95, 1.0, 0.5)
        } else {
            (gamma_for_weight(0.875), 0.75, 0.0, 0.0)
        };
        let hamiltonian = HeisenbergParams::from_j_kappa(
            p.j.unwrap_or(1.0),
            p.kappa.unwrap_or(kappa),
            p.jz.unwrap_or(0.0),
            p.b_avg.unwrap_or(b_avg),
            p.b_inh.unwrap_or(b_inh),
        );
        let f = hamiltonian.max_frequency();
        let t_max = p.t_max.unwrap_or(if f > 0.0 { 2.0 * PI / f } else { 2.0 * PI });
        DynamicsSetup {
            lambda: p.lambda.unwrap_or(1.0),
            gamma: p.gamma.unwrap_or(gamma),
            hamiltonian,
            times: Grid {
                t_max,
                points: p.time_points.unwrap_or(DEFAULT_TIME_POINTS),
            },
        }
    }

    /// Classical weights `(p00, p01, p10, p11)` of the initial product state.
    pub fn weights(&self) -> [f64; 4] {
        let (l, g) = (self.lambda, self.gamma);
        let (c2, s2) = ((g / 2.0).cos().powi(2), (g / 2.0).sin().powi(2));
        let (up, down) = ((1.0 + l) / 2.0, (1.0 - l) / 2.0);
        [up * c2, up * s2, down * c2, down * s2]
    }
}

/// Target and preparation circuit of the zero-field two-sector state at time `t`.
pub fn zero_field_point(s: &DynamicsSetup, t: f64) -> Result<(XState, Circuit)> {
    let h = &s.hamiltonian;
    let (theta, phi) = (h.j_kappa() * t, h.j() * t);
    let target = from_spectral(&XSpectral {
        p: s.weights(),
        theta,
        phi,
    });
    let beta = 2.0 * ((1.0 + s.lambda) / 2.0).sqrt().acos();
    let mut gates = vec![
        Gate::ry(0, beta),
        Gate::ry(1, s.gamma),
        Gate::cnot(0, 2)?,
        Gate::cnot(1, 3)?,
    ];
    gates.extend(eigenbasis_block(2, 3, theta, phi)?);
    Ok((target, Circuit::from_gates(4, gates)?))
}

/// Exactly evolved state with field at time `t`. The initial weights are placed
/// so that each circuit label `|i,j⟩` starts in the sector of `ψ_{i,i⊕j}`.
pub fn field_target(s: &DynamicsSetup, t: f64) -> Result<XState> {
    let [p00, p01, p10, p11] = s.weights();
    let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&[p00, p01, p11, p10]))?;
    XState::from_density(&rho0.conjugate(&propagator(&s.hamiltonian, t))?)
}

/// Preparation circuit for an arbitrary X-state target on qubits 2 and 3.
pub fn xstate_circuit(target: &XState) -> Result<(Circuit, XSpectral, PhaseRecord)> {
    let (stripped, rec) = strip_xstate_phases(target);
    let spec = to_spectral(&stripped)?;
    let mut c = build_xstate_circuit(spec.p, spec.theta, spec.phi)?;
    if rec.alpha != 0.0 || rec.beta != 0.0 {
        c.extend(rec.restore_gates(2, 3))?;
    }
    Ok((c, spec, rec))
}

pub fn field_point(s: &DynamicsSetup, t: f64) -> Result<(XState, Circuit)> {
    let target = field_target(s, t)?;
    let (c, _, _) = xstate_circuit(&target)?;
    Ok((target, c))
}

/// Output of the preparation circuit on `|0000⟩`, reduced to qubits 2 and 3.
pub fn prepared_state(c: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    let input = DensityMatrix::basis_state(c.dim(), 0)?;
    let out = if noise.is_ideal() {
        run_density(c, &input)?
    } else {
        run_noisy(c, &input, noise)?
    };
    out.partial_trace(&[2, 3])
}

/// Probability 4-vectors with components in multiples of `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexGrid {
    pub resolution: usize,
}

impl SimplexGrid {
    pub fn points(&self) -> Vec<[f64; 4]> {
        let n = self.resolution;
        let nf = n as f64;
        let mut out = Vec::new();
        for i in 0..=n {
            for j in 0..=n - i {
                for k in 0..=n - i - j {
                    let l = n - i - j - k;
                    out.push([i as f64 / nf, j as f64 / nf, k as f64 / nf, l as f64 / nf]);
                }
            }
        }
        out
    }
}

/// Rows with named columns and `key: value` metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(skip)]
    pub circuits: Vec<Circuit>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Table),
    Report(serde_json::Value),
}

/// `x` with 12 significant digits, fixed notation for moderate magnitudes.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

impl Output {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match (self, format) {
            (Output::Table(t), OutputFormat::Csv) => {
                let mut s = String::new();
                for (k, v) in &t.meta {
                    writeln!(s, "# {k}: {v}").expect("write to string");
                }
                writeln!(s, "{}", t.columns.join(",")).expect("write to string");
                for r in &t.rows {
                    let cells: Vec<String> = r.iter().map(|&x| format_sig12(x)).collect();
                    writeln!(s, "{}", cells.join(",")).expect("write to string");
                }
                Ok(s)
            }
            (Output::Table(t), OutputFormat::Json) => {
                let meta: serde_json::Map<String, serde_json::Value> = t
                    .meta
                    .iter()
                    .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                    .collect();
                let v = json!({"meta": meta, "columns": t.columns, "rows": t.rows});
                Ok(serde_json::to_string_pretty(&v)? + "\n")
            }
            (Output::Report(v), OutputFormat::Json) => Ok(serde_json::to_string_pretty(v)? + "\n"),
            (Output::Report(_), OutputFormat::Csv) => Err(Error::Config(
                "xprep_single produces a JSON report; use --format json".into(),
            )),
        }
    }

    pub fn circuits(&self) -> Vec<Circuit> {
        match self {
            Output::Table(t) => t.circuits.clone(),
            Output::Report(v) => v
                .get("circuit")
                .and_then(|c| serde_json::from_value::<Circuit>(c.clone()).ok())
                .into_iter()
                .collect(),
        }
    }
}

fn base_meta(kind: ExperimentKind, p: &Params) -> Result<Vec<(String, String)>> {
    let sampling = match p.sampling() {
        Sampling::Exact => "exact".to_string(),
        Sampling::Shots(n) => format!("shots={n}"),
    };
    Ok(vec![
        ("experiment".into(), kind.name().into()),
        ("seed".into(), p.seed().to_string()),
        ("sampling".into(), sampling),
        ("noise".into(), serde_json::to_string(&p.noise_model())?),
    ])
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output> {
    cfg.params.validate(cfg.experiment)?;
    match cfg.experiment {
        ExperimentKind::TetraSweep => run_tetra_sweep(&cfg.params).map(Output::Table),
        ExperimentKind::HeisenbergConc | ExperimentKind::FieldConc => {
            run_concurrence(cfg.experiment, &cfg.params).map(Output::Table)
        }
        ExperimentKind::HeisenbergFidelity | ExperimentKind::FieldFidelity => {
            run_fidelity(cfg.experiment, &cfg.params).map(Output::Table)
        }
        ExperimentKind::XprepSingle => run_xprep_single(&cfg.params).map(Output::Report),
    }
}

/// Columns `p00,p01,p10,p11,C_analytic,C_noisy_sim,C_shot_tomo,leakage`.
pub fn run_tetra_sweep(p: &Params) -> Result<Table> {
    let theta = p.theta.unwrap_or(PI / 6.0);
    let phi = p.phi.unwrap_or(PI / 6.0);
    let grid = SimplexGrid {
        resolution: p.resolution.unwrap_or(DEFAULT_RESOLUTION),
    };
    let (noise, sampling, seed) = (p.noise_model(), p.sampling(), p.seed());
    let points = grid.points();
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(k, &w)| {
            let target = from_spectral(&XSpectral { p: w, theta, phi });
            let circuit = build_xstate_circuit(w, theta, phi)?;
            let out = prepared_state(&circuit, &noise)?;
            let c_noisy = concurrence_wootters_oracle(&out)?;
            let rep = run_protocols(
                &target.to_matrix(),
                &out,
                &[Protocol::Partial3],
                sampling,
                split_seed(seed, k as u64),
                noise.p_readout,
            )?;
            let row = vec![
                w[0],
                w[1],
                w[2],
                w[3],
                concurrence_x(&target),
                c_noisy,
                rep[0].concurrence_estimate,
                rep[0].leakage,
            ];
            Ok((row, circuit))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = base_meta(ExperimentKind::TetraSweep, p)?;
    meta.push(("theta".into(), format_sig12(theta)));
    meta.push(("phi".into(), format_sig12(phi)));
    meta.push(("resolution".into(), grid.resolution.to_string()));
    let (rows, circuits) = rows.into_iter().unzip();
    Ok(Table {
        meta,
        columns: ["p00", "p01", "p10", "p11", "C_analytic", "C_noisy_sim", "C_shot_tomo", "leakage"]
            .map(String::from)
            .to_vec(),
        rows,
        circuits,
    })
}

fn dynamics_meta(kind: ExperimentKind, p: &Params, s: &DynamicsSetup) -> Result<Vec<(String, String)>> {
    let h = &s.hamiltonian;
    let mut meta = base_meta(kind, p)?;
    for (k, v) in [
        ("lambda", s.lambda),
        ("gamma", s.gamma),
        ("J", h.j()),
        ("Jkappa", h.j_kappa()),
        ("Jz", h.jz),
        ("B", h.b_avg),
        ("b", h.b_inh),
        ("t_max", s.times.t_max),
    ] {
        meta.push((k.into(), format_sig12(v)));
    }
    meta.push(("time_points".into(), s.times.points.to_string()));
    Ok(meta)
}

fn point(kind: ExperimentKind, s: &DynamicsSetup, t: f64) -> Result<(XState, Circuit)> {
    if kind.has_field() {
        field_point(s, t)
    } else {
        zero_field_point(s, t)
    }
}

/// Columns `t,C_analytic,C_reconstructed`. Zero-field runs reconstruct with
/// three settings, field runs with five.
pub fn run_concurrence(kind: ExperimentKind, p: &Params) -> Result<Table> {
    let s = DynamicsSetup::resolve(kind, p);
    let protocol = if kind.has_field() {
        Protocol::Partial5
    } else {
        Protocol::Partial3
    };
    let (noise, sampling, seed) = (p.noise_model(), p.sampling(), p.seed());
    let times = s.times.times();
    let rows = times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let (target, circuit) = point(kind, &s, t)?;
            let rho = target.to_matrix();
            let c_analytic = concurrence_x(&target);
            let out = prepared_state(&circuit, &noise)?;
            let rep = run_protocols(&rho, &out, &[protocol], sampling, split_seed(seed, k as u64), noise.p_readout)?;
            Ok((vec![t, c_analytic, rep[0].concurrence_estimate], circuit))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = dynamics_meta(kind, p, &s)?;
    meta.push(("protocol".into(), protocol.name().into()));
    let (rows, circuits) = rows.into_iter().unzip();
    Ok(Table {
        meta,
        columns: ["t", "C_analytic", "C_reconstructed"].map(String::from).to_vec(),
        rows,
        circuits,
    })
}

fn fidelity_column(p: Protocol) -> &'static str {
    match p {
        Protocol::Full => "F_f",
        Protocol::Partial5 => "F_p5",
        Protocol::Partial3 => "F_p3",
    }
}

/// Columns `t`, one fidelity per protocol (`F_f,F_p5[,F_p3]`), then `leakage`.
pub fn run_fidelity(kind: ExperimentKind, p: &Params) -> Result<Table> {
    let s = DynamicsSetup::resolve(kind, p);
    let protocols = p.protocols.clone().unwrap_or_else(|| {
        if kind.has_field() {
            vec![Protocol::Full, Protocol::Partial5]
        } else {
            Protocol::ALL.to_vec()
        }
    });
    let (noise, sampling, seed) = (p.noise_model(), p.sampling(), p.seed());
    let times = s.times.times();
    let rows = times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let (target, circuit) = point(kind, &s, t)?;
            let out = prepared_state(&circuit, &noise)?;
            let reps = run_protocols(
                &target.to_matrix(),
                &out,
                &protocols,
                sampling,
                split_seed(seed, k as u64),
                noise.p_readout,
            )?;
            let mut row = vec![t];
            row.extend(reps.iter().map(|r| r.fidelity_to_target));
            row.push(reps[0].leakage);
            Ok((row, circuit))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = dynamics_meta(kind, p, &s)?;
    meta.push(("fidelity".into(), FIDELITY_CONVENTION.into()));
    let mut columns = vec!["t".to_string()];
    columns.extend(protocols.iter().map(|&p| fidelity_column(p).to_string()));
    columns.push("leakage".into());
    let (rows, circuits) = rows.into_iter().unzip();
    Ok(Table {
        meta,
        columns,
        rows,
        circuits,
    })
}

/// Full pipeline for one target: inversion, circuit, ideal and noisy outputs,
/// reconstructions and concurrences.
pub fn run_xprep_single(p: &Params) -> Result<serde_json::Value> {
    let target = match (&p.xstate, &p.spectral) {
        (Some(x), _) => *x,
        (None, Some(s)) => from_spectral(s),
        (None, None) => from_spectral(&XSpectral::new([0.7, 0.1, 0.1, 0.1], FRAC_PI_4, FRAC_PI_4)?),
    };
    let (circuit, spectral, phases) = xstate_circuit(&target)?;
    let (noise, sampling, seed) = (p.noise_model(), p.sampling(), p.seed());
    let rho = target.to_matrix();
    let ideal = prepared_state(&circuit, &NoiseModel::ideal())?;
    let noisy = prepared_state(&circuit, &noise)?;
    let reports = run_protocols(&rho, &noisy, &Protocol::ALL, sampling, seed, noise.p_readout)?;
    let concurrence = json!({
        "analytic": concurrence_x(&target),
        "ideal": concurrence_wootters_oracle(&ideal)?,
        "noisy": concurrence_wootters_oracle(&noisy)?,
        "reconstructed": reports.iter().map(|r| (r.protocol.name(), r.concurrence_estimate)).collect::<std::collections::BTreeMap<_, _>>(),
    });
    Ok(json!({
        "experiment": ExperimentKind::XprepSingle.name(),
        "seed": seed,
        "sampling": sampling,
        "noise": noise,
        "target": target,
        "phase_record": phases,
        "spectral": spectral,
        "circuit": circuit,
        "ideal_output": ideal.mat(),
        "ideal_error": ideal.mat().max_abs_diff(rho.mat()),
        "noisy_output": noisy.mat(),
        "leakage": reports[0].leakage,
        "reconstructions": reports,
        "concurrence": concurrence,
    }))
}
