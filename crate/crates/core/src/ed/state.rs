use super::{check_capacity, Config};
use crate::closed_form::QubitState;
use crate::dicke::{log_binomial, BathSize, CoherentAngle};
use crate::{Error, Result, C64};

/// Dense state of central spin plus bath, indexed by full configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    n_bath: usize,
    amps: Vec<C64>,
}

impl FullState {
    pub fn zeros(n_bath: usize, cap: usize) -> Result<Self> {
        check_capacity(n_bath, cap)?;
        Ok(Self {
            n_bath,
            amps: vec![C64::new(0.0, 0.0); 1 << (n_bath + 1)],
        })
    }

    pub fn from_amplitudes(n_bath: usize, amps: Vec<C64>) -> Result<Self> {
        if n_bath == 0 || n_bath >= Config::BITS as usize || amps.len() != 1 << (n_bath + 1) {
            return Err(Error::Validation(format!(
                "{} amplitudes do not describe a central spin with {n_bath} bath spins",
                amps.len()
            )));
        }
        Ok(Self { n_bath, amps })
    }

    #[inline]
    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    #[inline]
    pub fn amplitude(&self, config: Config) -> C64 {
        self.amps[config as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Down-spin count `M` of every sector with non-zero amplitude.
    pub fn occupied_sectors(&self) -> Vec<usize> {
        let spins = self.n_bath + 1;
        let mut seen = vec![false; spins + 1];
        for (cfg, a) in self.amps.iter().enumerate() {
            if a.re != 0.0 || a.im != 0.0 {
                seen[spins - cfg.count_ones() as usize] = true;
            }
        }
        (0..=spins).filter(|&m| seen[m]).collect()
    }
}

/// `|↑⟩₀ ⊗_j [sin(θ/2)|↑⟩_j + cos(θ/2)|↓⟩_j]`.
pub fn initial_state(n: BathSize, theta: CoherentAngle, cap: usize) -> Result<FullState> {
    let n_bath = n.get();
    let mut state = FullState::zeros(n_bath, cap)?;
    let s = theta.up_amplitude();
    let c = theta.down_amplitude();
    let amp: Vec<f64> = (0..=n_bath)
        .map(|k| s.powi(k as i32) * c.powi((n_bath - k) as i32))
        .collect();
    for bath in 0..1usize << n_bath {
        state.amps[(bath << 1) | 1] = C64::new(amp[bath.count_ones() as usize], 0.0);
    }
    Ok(state)
}

/// `⟨S₀ᶻ⟩`.
pub fn measure_sz0(state: &FullState) -> f64 {
    state
        .amps
        .iter()
        .enumerate()
        .map(|(cfg, a)| if cfg & 1 == 1 { 0.5 } else { -0.5 } * a.norm_sqr())
        .sum()
}

/// `⟨Σ_i s_iᶻ⟩` over central spin and bath.
pub fn measure_sz_total(state: &FullState) -> f64 {
    let half = 0.5 * (state.n_bath + 1) as f64;
    state
        .amps
        .iter()
        .enumerate()
        .map(|(cfg, a)| (cfg.count_ones() as f64 - half) * a.norm_sqr())
        .sum()
}

/// Probability that the bath is in the symmetric (Dicke) subspace:
/// `Σ_{s,n} |⟨s, D_n|ψ⟩|²`.
pub fn measure_pbath(state: &FullState) -> f64 {
    let n = state.n_bath;
    let zero = C64::new(0.0, 0.0);
    let mut overlap = vec![[zero; 2]; n + 1];
    for (cfg, a) in state.amps.iter().enumerate() {
        overlap[(cfg >> 1).count_ones() as usize][cfg & 1] += a;
    }
    overlap
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let inv = (-log_binomial(n as u64, k as u64).expect("k ≤ N")).exp();
            (o[0].norm_sqr() + o[1].norm_sqr()) * inv
        })
        .sum()
}

/// Central-spin reduced density matrix, normalized to unit trace.
pub fn measure_partial_trace(state: &FullState) -> QubitState {
    let mut up = 0.0;
    let mut down = 0.0;
    let mut coherence = C64::new(0.0, 0.0);
    for pair in state.amps.chunks_exact(2) {
        let (d, u) = (pair[0], pair[1]);
        up += u.norm_sqr();
        down += d.norm_sqr();
        coherence += u * d.conj();
    }
    let total = up + down;
    QubitState::new(up / total, coherence / total)
}
