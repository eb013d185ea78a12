//! Closed-form dynamics of the homogeneous model
//!
//! ```text
//! H = B s0z + A (s0⁺ J⁻ + s0⁻ J⁺) + 2Δ s0z Jz
//! ```
//!
//! started from `|↑⟩₀ ⊗ |θ⟩_bath` with a spin coherent bath. The flip-flop term
//! only couples `|↑⟩₀|n⟩` to `|↓⟩₀|n+1⟩`, so each Dicke component performs an
//! independent Rabi oscillation:
//!
//! ```text
//! |ψ(t)⟩ = Σ_n c_n [ P↓ⁿ(t) |↓⟩₀|n+1⟩ + P↑ⁿ(t) |↑⟩₀|n⟩ ]
//! P↑ⁿ = cos(Ω_{n+1}t/2) − i (Δ_{n+1}/Ω_{n+1}) sin(Ω_{n+1}t/2)
//! P↓ⁿ = −2i (√b_{n+1} A/Ω_{n+1}) sin(Ω_{n+1}t/2)
//! Δ_n = B + (2n − 1 − N)Δ,   Ω_n² = Δ_n² + 4 b_n A²
//! ```
//!
//! up to the global phase `e^{iΔt/2}` that every block shares (see
//! [`AmplitudeTable::global_phase`]).

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::analysis::{TimeGrid, TimeSeries};
use crate::dicke::{coherent_weights, ladder_coefficient, BathSize, CoherentAngle, CoherentWeights};
use crate::{Error, Result, C64};

/// Homogeneous model parameters `(N, B, A, Δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: BathSize,
    /// Effective field `B` on the central spin.
    pub field: f64,
    /// Transverse (flip-flop) coupling `A`.
    pub coupling: f64,
    /// Longitudinal coupling `Δ`.
    pub longitudinal: f64,
}

impl ModelParams {
    pub fn new(n: usize, field: f64, coupling: f64, longitudinal: f64) -> Result<Self> {
        let n = BathSize::new(n)?;
        for (name, v) in [("B", field), ("A", coupling), ("Δ", longitudinal)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self {
            n,
            field,
            coupling,
            longitudinal,
        })
    }

    /// The resonant point `B = Δ = A`.
    pub fn resonant(n: usize, a: f64) -> Result<Self> {
        Self::new(n, a, a, a)
    }

    pub fn is_resonant(&self) -> bool {
        self.field == self.coupling && self.coupling == self.longitudinal
    }
}

/// Detunings `Δ_n` and Rabi frequencies `Ω_n` for `n = 0..=N+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFrequencies {
    pub detuning: Vec<f64>,
    pub rabi: Vec<f64>,
}

pub fn mode_frequencies(p: &ModelParams) -> ModeFrequencies {
    let big_n = p.n.get();
    let a2 = p.coupling * p.coupling;
    let (detuning, rabi) = (0..=big_n + 1)
        .map(|k| {
            let d = p.field + (2.0 * k as f64 - 1.0 - big_n as f64) * p.longitudinal;
            let omega = (d * d + 4.0 * ladder_coefficient(k, p.n) * a2).sqrt();
            (d, omega)
        })
        .unzip();
    ModeFrequencies { detuning, rabi }
}

/// The time-evolved wavefunction in the `{|↑⟩₀|n⟩, |↓⟩₀|n+1⟩}` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    pub t: f64,
    /// `P↑ⁿ(t)`, `n = 0..=N`.
    pub up: Vec<C64>,
    /// `P↓ⁿ(t)`, `n = 0..=N`.
    pub down: Vec<C64>,
    /// Coherent amplitudes `c_n`.
    pub coherent: Vec<f64>,
    global_phase: C64,
}

impl AmplitudeTable {
    /// Common phase `e^{iΔt/2}` dropped from `P↑`, `P↓`. The amplitude of
    /// `e^{−iHt}|Φ₀⟩` on `|↑⟩₀|n⟩` is `global_phase · c_n · P↑ⁿ`.
    pub fn global_phase(&self) -> C64 {
        self.global_phase
    }

    /// `Σ_n c_n² (|P↑ⁿ|² + |P↓ⁿ|²)`.
    pub fn norm_sqr(&self) -> f64 {
        self.coherent
            .iter()
            .zip(self.up.iter().zip(&self.down))
            .map(|(c, (u, d))| c * c * (u.norm_sqr() + d.norm_sqr()))
            .sum()
    }
}

/// Central-spin reduced density matrix `[[a, b], [b*, 1 − a]]` in the
/// `(↑, ↓)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    /// Population of `|↑⟩₀`.
    pub a: f64,
    /// Coherence `⟨↑|ρ|↓⟩`.
    pub b: C64,
}

impl QubitState {
    pub fn new(a: f64, b: C64) -> Self {
        Self { a, b }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [
            [C64::new(self.a, 0.0), self.b],
            [self.b.conj(), C64::new(1.0 - self.a, 0.0)],
        ]
    }

    /// Eigenvalues `(λ₊, λ₋)`, clamped to `[0, 1]`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = ((self.a - 0.5).powi(2) + self.b.norm_sqr()).sqrt();
        ((0.5 + r).clamp(0.0, 1.0), (0.5 - r).clamp(0.0, 1.0))
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    pub fn fidelity(&self, phase: EquatorialPhase) -> f64 {
        fidelity(self, phase)
    }
}

/// Phase φ of the equatorial target `(|↑⟩ + e^{−iφ}|↓⟩)/√2`, kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EquatorialPhase(f64);

impl EquatorialPhase {
    /// Wraps any finite angle into `[0, 2π)`.
    pub fn new(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::Domain(format!("phase φ = {phi} is not finite")));
        }
        let w = phi.rem_euclid(TAU);
        Ok(Self(if w >= TAU { 0.0 } else { w }))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }
}

/// `γ = Tr ρ² = a² + (1−a)² + 2|b|²`.
pub fn purity(rho: &QubitState) -> f64 {
    rho.a * rho.a + (1.0 - rho.a).powi(2) + 2.0 * rho.b.norm_sqr()
}

/// `S = −Tr ρ ln ρ` from the closed-form 2×2 eigenvalues, `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &QubitState) -> f64 {
    let (hi, lo) = rho.eigenvalues();
    [hi, lo]
        .into_iter()
        .filter(|&l| l > 0.0)
        .fold(0.0, |s, l| s - l * l.ln())
}

/// `F = √⟨φ|ρ|φ⟩ = √((1 + 2 Re(b e^{−iφ}))/2)`.
pub fn fidelity(rho: &QubitState, phase: EquatorialPhase) -> f64 {
    let rot = C64::from_polar(1.0, -phase.radians());
    let overlap = 0.5 * (1.0 + 2.0 * (rho.b * rot).re);
    overlap.clamp(0.0, 1.0).sqrt()
}

/// `sin(x)/x`, finite at the origin.
#[inline]
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Precomputed evolution for one `(params, θ)` pair.
///
/// Evaluating observables at many times reuses the weights and frequencies;
/// every method is a pure function of `t`.
#[derive(Debug, Clone)]
pub struct HomogeneousDynamics {
    params: ModelParams,
    theta: CoherentAngle,
    weights: CoherentWeights,
    freqs: ModeFrequencies,
    /// Per-mode flip-flop fraction `4bA²/Ω²`.
    flip: Vec<f64>,
    /// Indices with non-zero weight.
    support: std::ops::RangeInclusive<usize>,
}

impl HomogeneousDynamics {
    pub fn new(params: ModelParams, theta: CoherentAngle) -> Self {
        let weights = coherent_weights(params.n, theta);
        let freqs = mode_frequencies(&params);
        let big_n = params.n.get();
        let a2 = params.coupling * params.coupling;
        let flip = (0..=big_n)
            .map(|k| {
                let o2 = freqs.rabi[k + 1].powi(2);
                if o2 == 0.0 {
                    0.0
                } else {
                    4.0 * ladder_coefficient(k + 1, params.n) * a2 / o2
                }
            })
            .collect();
        let w = weights.weights();
        let lo = w.iter().position(|&x| x > 0.0).unwrap_or(0);
        let hi = w.iter().rposition(|&x| x > 0.0).unwrap_or(big_n);
        Self {
            params,
            theta,
            weights,
            freqs,
            flip,
            support: lo..=hi,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn theta(&self) -> CoherentAngle {
        self.theta
    }

    pub fn weights(&self) -> &CoherentWeights {
        &self.weights
    }

    pub fn frequencies(&self) -> &ModeFrequencies {
        &self.freqs
    }

    /// `(P↑ⁿ, P↓ⁿ)` for one Dicke component.
    #[inline]
    fn mode(&self, k: usize, t: f64) -> (C64, C64) {
        let omega = self.freqs.rabi[k + 1];
        let d = self.freqs.detuning[k + 1];
        let half = 0.5 * omega * t;
        // sin(Ωt/2)/Ω, finite as Ω → 0
        let s = 0.5 * t * sinc(half);
        let up = C64::new(half.cos(), -d * s);
        let flip = 2.0 * ladder_coefficient(k + 1, self.params.n).sqrt() * self.params.coupling;
        let down = C64::new(0.0, -flip * s);
        (up, down)
    }

    pub fn amplitudes(&self, t: f64) -> AmplitudeTable {
        let (up, down) = (0..=self.params.n.get()).map(|k| self.mode(k, t)).unzip();
        AmplitudeTable {
            t,
            up,
            down,
            coherent: self.weights.amplitudes().to_vec(),
            global_phase: C64::from_polar(1.0, 0.5 * self.params.longitudinal * t),
        }
    }

    /// `S₀ᶻ(t) = ½ Σ_n w_n [Δ²_{n+1}/Ω²_{n+1} + (4b_{n+1}A²/Ω²_{n+1}) cos(Ω_{n+1}t)]`,
    /// evaluated as `½ − Σ_n w_n (4b_{n+1}A²/Ω²_{n+1}) sin²(Ω_{n+1}t/2)` so that
    /// `S₀ᶻ(0) = ½` holds exactly.
    pub fn polarization(&self, t: f64) -> f64 {
        let w = self.weights.weights();
        let mut acc = 0.0;
        for k in self.support.clone() {
            let y = self.flip[k];
            let s = (0.5 * self.freqs.rabi[k + 1] * t).sin();
            acc += w[k] * y * s * s;
        }
        0.5 - acc
    }

    /// Central-spin reduced density matrix at `t`.
    pub fn density_matrix(&self, t: f64) -> QubitState {
        let w = self.weights.weights();
        let c = self.weights.amplitudes();
        let mut a = 0.0;
        let mut b = C64::new(0.0, 0.0);
        let mut prev: Option<(usize, C64)> = None;
        for k in self.support.clone() {
            let (up, down) = self.mode(k, t);
            a += w[k] * up.norm_sqr();
            // coherence pairs ⟨↑,k| with ⟨↓,k| = P↓^{k−1}|↓⟩|k⟩
            if let Some((j, down_prev)) = prev {
                debug_assert_eq!(j + 1, k);
                b += c[j] * c[k] * up * down_prev.conj();
            }
            prev = Some((k, down));
        }
        QubitState { a, b }
    }

    pub fn polarization_series(&self, grid: &TimeGrid) -> Result<TimeSeries> {
        let y = grid.points().iter().map(|&t| self.polarization(t)).collect();
        TimeSeries::from_grid(grid, y, "sz0")
    }

    /// Data-parallel variant; bitwise identical to [`Self::polarization_series`].
    pub fn polarization_series_par(&self, grid: &TimeGrid) -> Result<TimeSeries> {
        let y = grid.points().par_iter().map(|&t| self.polarization(t)).collect();
        TimeSeries::from_grid(grid, y, "sz0")
    }

    /// Predicted m-th revival time from `(Ω_{n*+1} − Ω_{n*}) t = 2πm` at the
    /// dominant Dicke component `n*`.
    pub fn revival_time(&self, m: usize) -> Result<f64> {
        if m == 0 {
            return Err(Error::Domain("revival index m must be ≥ 1".into()));
        }
        if self.params.coupling == 0.0 {
            return Err(Error::NoRevival("A = 0: no flip-flop dynamics".into()));
        }
        let star = self.weights.dominant();
        let gap = (self.freqs.rabi[star + 1] - self.freqs.rabi[star]).abs();
        if !(gap > 0.0) {
            return Err(Error::NoRevival(format!(
                "degenerate Rabi frequencies at the dominant mode n* = {star}"
            )));
        }
        Ok(TAU * m as f64 / gap)
    }
}

/// Wavefunction amplitudes at time `t`.
pub fn amplitudes(p: &ModelParams, theta: CoherentAngle, t: f64) -> AmplitudeTable {
    HomogeneousDynamics::new(*p, theta).amplitudes(t)
}

pub fn central_polarization(p: &ModelParams, theta: CoherentAngle, t: f64) -> f64 {
    HomogeneousDynamics::new(*p, theta).polarization(t)
}

pub fn polarization_series(p: &ModelParams, theta: CoherentAngle, grid: &TimeGrid) -> Result<TimeSeries> {
    HomogeneousDynamics::new(*p, theta).polarization_series(grid)
}

pub fn reduced_density_matrix(p: &ModelParams, theta: CoherentAngle, t: f64) -> QubitState {
    HomogeneousDynamics::new(*p, theta).density_matrix(t)
}

pub fn revival_time(p: &ModelParams, theta: CoherentAngle, m: usize) -> Result<f64> {
    HomogeneousDynamics::new(*p, theta).revival_time(m)
}

/// Large-bath resonance law `t_r ≈ πNm/A`.
pub fn large_n_revival_time(p: &ModelParams, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("revival index m must be ≥ 1".into()));
    }
    if p.coupling == 0.0 {
        return Err(Error::NoRevival("A = 0: no flip-flop dynamics".into()));
    }
    Ok(PI * p.n.get() as f64 * m as f64 / p.coupling.abs())
}

/// Fidelity with equatorial states, maximized over time for each phase of an
/// equally spaced grid `φ_k = 2πk/K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    pub phases: Vec<f64>,
    /// `max_t F(t, φ_k)`.
    pub max_fidelity: Vec<f64>,
    /// Time at which each maximum occurs.
    pub argmax_time: Vec<f64>,
}

impl PhaseScan {
    /// `(φ, F, t)` of the overall maximum (first phase on ties).
    pub fn best(&self) -> (f64, f64, f64) {
        let mut k = 0;
        for (i, &f) in self.max_fidelity.iter().enumerate() {
            if f > self.max_fidelity[k] {
                k = i;
            }
        }
        (self.phases[k], self.max_fidelity[k], self.argmax_time[k])
    }
}

pub fn phase_scan(dynamics: &HomogeneousDynamics, times: &[f64], n_phases: usize) -> Result<PhaseScan> {
    if n_phases == 0 || times.is_empty() {
        return Err(Error::Domain("phase scan needs at least one phase and one time".into()));
    }
    let phases: Vec<f64> = (0..n_phases).map(|k| TAU * k as f64 / n_phases as f64).collect();
    let states: Vec<QubitState> = times.par_iter().map(|&t| dynamics.density_matrix(t)).collect();
    let mut max_fidelity = vec![f64::NEG_INFINITY; n_phases];
    let mut argmax_time = vec![times[0]; n_phases];
    for (rho, &t) in states.iter().zip(times) {
        for (k, &phi) in phases.iter().enumerate() {
            let f = rho.fidelity(EquatorialPhase::new(phi)?);
            if f > max_fidelity[k] {
                max_fidelity[k] = f;
                argmax_time[k] = t;
            }
        }
    }
    Ok(PhaseScan {
        phases,
        max_fidelity,
        argmax_time,
    })
}
