#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xsim::{ComplexMatrix, DensityMatrix, C64};
use xsim::xstate::XState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability 4-vector with every entry at least `floor`.
pub fn probs(r: &mut impl Rng, floor: f64) -> [f64; 4] {
    let e: Vec<f64> = (0..4).map(|_| -r.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = e.iter().sum();
    let scale = 1.0 - 4.0 * floor;
    [0, 1, 2, 3].map(|k| floor + scale * e[k] / s)
}

/// Full-rank X-state with complex coherences.
pub fn x_state(r: &mut impl Rng) -> XState {
    let [a, b, c, d] = probs(r, 0.02);
    let w = C64::from_polar(r.random_range(0.0..0.95) * (a * d).sqrt(), r.random_range(-PI..PI));
    let z = C64::from_polar(r.random_range(0.0..0.95) * (b * c).sqrt(), r.random_range(-PI..PI));
    XState::new(a, b, c, d, w, z).unwrap()
}

pub fn real_x_state(r: &mut impl Rng) -> XState {
    let [a, b, c, d] = probs(r, 0.02);
    let w = r.random_range(-0.95..0.95) * (a * d).sqrt();
    let z = r.random_range(-0.95..0.95) * (b * c).sqrt();
    XState::real(a, b, c, d, w, z).unwrap()
}

/// Ginibre-distributed two-qubit state.
pub fn density(r: &mut impl Rng) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

/// `e^{−iHt}` by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = h.rows();
    let a = h.scale(C64::new(0.0, -t));
    let norm = a.frobenius_norm();
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let a = a.scale_real(f64::powi(2.0, -s));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = term.matmul(&a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Eigenbasis states with the (i, j) labels used for the second preparation block.
pub fn psi(i: usize, j: usize, theta: f64, phi: f64) -> [C64; 4] {
    let r = |x: f64| C64::new(x, 0.0);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    match (i, j) {
        (0, 0) => [r(ct), r(0.0), r(0.0), r(st)],
        (0, 1) => [r(0.0), r(sp), r(cp), r(0.0)],
        (1, 0) => [r(0.0), r(cp), r(-sp), r(0.0)],
        (1, 1) => [r(-st), r(0.0), r(0.0), r(ct)],
        _ => unreachable!(),
    }
}

/// `Σ p_ij |ψ_{i,i⊕j}⟩⟨ψ_{i,i⊕j}|` built from the state vectors.
pub fn mixture_of_psi(p: [f64; 4], theta: f64, phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let v = psi(i, i ^ j, theta, phi);
            m = &m + &ComplexMatrix::outer(&v, &v).scale_real(p[2 * i + j]);
        }
    }
    m
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
