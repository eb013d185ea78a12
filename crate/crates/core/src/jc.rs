//! Generalized Jaynes–Cummings limit.
//!
//! For a large bath prepared close to the fully-down state (θ → 0) the
//! Holstein–Primakoff boson picture applies and the binomial Dicke weights
//! become Poissonian with mean `ζ² = N sin²(θ/2)`. The central spin inversion
//! then reads
//!
//! ```text
//! W(t) = Σ_n e^{−ζ²} ζ^{2n}/n! [Δ'²/Ω²_{n+1} + (4(n+1)NA²/Ω²_{n+1}) cos(Ω_{n+1} t)]
//! Δ' = B − NΔ,   Ω²_{n+1} = Δ'² + 4(n+1)NA²
//! ```
//!
//! with the correspondence `B → Δ_JC`, `√N A → g`, `ζ² → ⟨n⟩`. At `Δ = 0` this
//! is the textbook Jaynes–Cummings inversion.

use statrs::function::factorial::ln_factorial;

use crate::analysis::TimeGrid;
use crate::closed_form::{HomogeneousDynamics, ModelParams};
use crate::dicke::{coherent_weights, CoherentAngle};
use crate::{Error, Result};

/// Default Poisson tail mass left out of the truncated sums.
pub const DEFAULT_TAIL: f64 = 1e-12;

/// Jaynes–Cummings parameters obtained from the central spin model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    /// Atomic detuning `Δ_JC` (the central spin field `B`, plus any light shift).
    pub detuning: f64,
    /// Atom–field coupling `g = √N·A`.
    pub coupling: f64,
    /// Mean photon number `⟨n⟩ = ζ² = N sin²(θ/2)`.
    pub mean_photons: f64,
    /// Longitudinal coupling `Δ` of the generalized model.
    pub longitudinal: f64,
    /// Bath size `N` of the originating model.
    pub bath: usize,
}

impl JcParams {
    /// `Δ' = Δ_JC − NΔ`, the photon-number independent detuning of the
    /// generalized model.
    pub fn effective_detuning(&self) -> f64 {
        self.detuning - self.bath as f64 * self.longitudinal
    }
}

/// `B → Δ_JC`, `√N A → g`, `N sin²(θ/2) → ⟨n⟩`.
pub fn correspondence(p: &ModelParams, theta: CoherentAngle) -> JcParams {
    correspondence_with_shift(p, theta, 0.0)
}

/// As [`correspondence`], with the field shifted to `B' = B + h` by the
/// boson frequency `h`.
pub fn correspondence_with_shift(p: &ModelParams, theta: CoherentAngle, light_shift: f64) -> JcParams {
    let n = p.n.get() as f64;
    JcParams {
        detuning: p.field + light_shift,
        coupling: n.sqrt() * p.coupling,
        mean_photons: n * theta.up_probability(),
        longitudinal: p.longitudinal,
        bath: p.n.get(),
    }
}

/// Truncated Poisson distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub mean: f64,
    /// `p[n] = e^{−λ} λⁿ / n!` for `n = 0..=n_max`.
    pub probs: Vec<f64>,
    /// Smallest index whose cumulative mass reaches `1 − ε_tail`.
    pub n_max: usize,
}

impl PoissonWeights {
    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[inline]
fn poisson_pmf(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + n as f64 * lambda.ln() - ln_factorial(n as u64)).exp()
}

/// Log-space Poisson weights truncated once the cumulative mass reaches
/// `1 − eps_tail`.
pub fn poisson_weights(lambda: f64, eps_tail: f64) -> Result<PoissonWeights> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("Poisson mean {lambda} must be ≥ 0")));
    }
    if !(eps_tail > 0.0 && eps_tail < 1.0) {
        return Err(Error::Domain(format!("tail mass {eps_tail} outside (0, 1)")));
    }
    let mut probs = Vec::new();
    let mut cumulative = 0.0;
    // hard stop far beyond any reachable quantile
    let limit = (lambda + 50.0 * (lambda.sqrt() + 1.0) + 100.0) as usize;
    for n in 0..=limit {
        let p = poisson_pmf(lambda, n);
        probs.push(p);
        cumulative += p;
        if cumulative >= 1.0 - eps_tail {
            break;
        }
    }
    let n_max = probs.len() - 1;
    Ok(PoissonWeights {
        mean: lambda,
        probs,
        n_max,
    })
}

/// Jaynes–Cummings inversion evaluator for fixed parameters.
#[derive(Debug, Clone)]
pub struct JcInversion {
    params: JcParams,
    weights: PoissonWeights,
    /// Per-term `(Δ'²/Ω², 4(n+1)g²/Ω², Ω)`.
    terms: Vec<(f64, f64, f64)>,
}

impl JcInversion {
    pub fn new(params: JcParams, eps_tail: f64) -> Result<Self> {
        let weights = poisson_weights(params.mean_photons, eps_tail)?;
        Ok(Self::with_weights(params, weights))
    }

    /// Uses a caller-provided truncation.
    pub fn with_weights(params: JcParams, weights: PoissonWeights) -> Self {
        let d = params.effective_detuning();
        let g2 = params.coupling * params.coupling;
        let terms = (0..weights.probs.len())
            .map(|n| {
                let flip = 4.0 * (n + 1) as f64 * g2;
                let o2 = d * d + flip;
                if o2 == 0.0 {
                    (1.0, 0.0, 0.0)
                } else {
                    (d * d / o2, flip / o2, o2.sqrt())
                }
            })
            .collect();
        Self {
            params,
            weights,
            terms,
        }
    }

    pub fn params(&self) -> &JcParams {
        &self.params
    }

    pub fn weights(&self) -> &PoissonWeights {
        &self.weights
    }

    pub fn at(&self, t: f64) -> f64 {
        self.weights
            .probs
            .iter()
            .zip(&self.terms)
            .map(|(p, (x, y, omega))| p * (x + y * (omega * t).cos()))
            .sum()
    }
}

/// `W_cs(t)` with the default tail mass.
pub fn jc_inversion(jc: &JcParams, t: f64) -> Result<f64> {
    Ok(JcInversion::new(*jc, DEFAULT_TAIL)?.at(t))
}

/// `max_t |2 S₀ᶻ(t) − W(t)|` between the finite-N closed form and its
/// Jaynes–Cummings limit under the parameter correspondence.
pub fn finite_n_deviation(
    p: &ModelParams,
    theta: CoherentAngle,
    grid: &TimeGrid,
    eps_tail: f64,
) -> Result<f64> {
    let exact = HomogeneousDynamics::new(*p, theta);
    let limit = JcInversion::new(correspondence(p, theta), eps_tail)?;
    Ok(grid
        .points()
        .iter()
        .map(|&t| (2.0 * exact.polarization(t) - limit.at(t)).abs())
        .fold(0.0, f64::max))
}

/// Total-variation distance between Binomial(N, sin²(θ/2)) and Poisson(ζ²).
pub fn binomial_poisson_distance(p: &ModelParams, theta: CoherentAngle) -> f64 {
    let n = p.n.get();
    let binom = coherent_weights(p.n, theta);
    let lambda = n as f64 * theta.up_probability();
    let mut within = 0.0;
    let mut poisson_mass = 0.0;
    for (k, b) in binom.weights().iter().enumerate() {
        let q = poisson_pmf(lambda, k);
        poisson_mass += q;
        within += (b - q).abs();
    }
    // Poisson mass above N has no binomial counterpart
    0.5 * (within + (1.0 - poisson_mass).max(0.0))
}
