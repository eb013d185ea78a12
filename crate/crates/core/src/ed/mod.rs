//! Exact diagonalization of the (possibly inhomogeneous) central spin model.
//!
//! The total magnetization is conserved, so the `2^{N+1}` dimensional
//! Hilbert space splits into `N + 2` sectors labelled by the number `M` of
//! down spins. Each sector block is diagonalized once; evolution and
//! observables are then dense linear algebra on the eigenbases.

mod basis;
mod cache;
mod profile;
mod spectrum;
mod state;

use std::sync::Arc;

use faer::Mat;
use rayon::prelude::*;

use crate::analysis::{TimeGrid, TimeSeries};
use crate::closed_form::QubitState;
use crate::{Error, Result, C64};

pub use basis::{build_hamiltonian, build_sector_basis, SectorBasis, SectorMatrix};
pub use cache::{SpectrumCache, SpectrumKey};
pub use profile::{CouplingProfile, ProfileKind};
pub use spectrum::{diagonalize, SectorSpectrum, SYMMETRY_TOLERANCE};
pub use state::{
    initial_state, measure_partial_trace, measure_pbath, measure_sz0, measure_sz_total, FullState,
};

/// Bit string of a full configuration (bit 0 is the central spin).
pub type Config = u32;

/// Default largest bath handled by exact diagonalization.
pub const DEFAULT_ED_CAP: usize = 14;

/// Hard limit regardless of the configured cap; the dense state alone is
/// 512 MiB beyond it.
pub const MAX_ED_BATH: usize = 24;

/// Drift allowed by [`conserved_checks`].
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_capacity(n_bath: usize, cap: usize) -> Result<()> {
    if n_bath == 0 {
        return Err(Error::Domain("bath size must be at least 1".into()));
    }
    let limit = cap.min(MAX_ED_BATH);
    if n_bath > limit {
        return Err(Error::Capacity { n: n_bath, cap: limit });
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Sector {
    basis: SectorBasis,
    spectrum: Arc<SectorSpectrum>,
}

/// Diagonalized sectors of one Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectrumSet {
    profile: CouplingProfile,
    field: f64,
    sectors: Vec<Option<Sector>>,
}

impl SpectrumSet {
    /// Diagonalizes the sectors listed in `downs`, in parallel, reusing and
    /// filling `cache` when given.
    pub fn for_sectors(
        profile: &CouplingProfile,
        field: f64,
        downs: &[usize],
        cap: usize,
        cache: Option<&SpectrumCache>,
    ) -> Result<Self> {
        let n = profile.bath_size();
        check_capacity(n, cap)?;
        if !field.is_finite() {
            return Err(Error::Validation(format!("field B = {field} is not finite")));
        }
        let built: Vec<(usize, Sector)> = downs
            .par_iter()
            .map(|&m| {
                let basis = SectorBasis::new(n, m, cap)?;
                let key = SpectrumKey::new(profile, field, m);
                let spectrum = match cache.and_then(|c| c.get(&key)) {
                    Some(s) => s,
                    None => {
                        let h = build_hamiltonian(profile, field, &basis)?;
                        let s = Arc::new(diagonalize(&h, m)?);
                        match cache {
                            Some(c) => c.insert(key, s),
                            None => s,
                        }
                    }
                };
                Ok((m, Sector { basis, spectrum }))
            })
            .collect::<Result<_>>()?;
        let mut sectors = vec![None; n + 2];
        for (m, s) in built {
            sectors[m] = Some(s);
        }
        Ok(Self {
            profile: profile.clone(),
            field,
            sectors,
        })
    }

    /// Only the sectors on which `state` has support.
    pub fn for_state(
        profile: &CouplingProfile,
        field: f64,
        state: &FullState,
        cap: usize,
        cache: Option<&SpectrumCache>,
    ) -> Result<Self> {
        if state.n_bath() != profile.bath_size() {
            return Err(Error::Validation(format!(
                "state has {} bath spins, profile has {}",
                state.n_bath(),
                profile.bath_size()
            )));
        }
        Self::for_sectors(profile, field, &state.occupied_sectors(), cap, cache)
    }

    pub fn all_sectors(
        profile: &CouplingProfile,
        field: f64,
        cap: usize,
        cache: Option<&SpectrumCache>,
    ) -> Result<Self> {
        let downs: Vec<usize> = (0..=profile.bath_size() + 1).collect();
        Self::for_sectors(profile, field, &downs, cap, cache)
    }

    #[inline]
    pub fn profile(&self) -> &CouplingProfile {
        &self.profile
    }

    #[inline]
    pub fn field(&self) -> f64 {
        self.field
    }

    #[inline]
    pub fn n_bath(&self) -> usize {
        self.profile.bath_size()
    }

    pub fn sector(&self, down: usize) -> Option<(&SectorBasis, &SectorSpectrum)> {
        self.sectors
            .get(down)?
            .as_ref()
            .map(|s| (&s.basis, s.spectrum.as_ref()))
    }

    /// Every eigenvalue of the diagonalized sectors, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .sectors
            .iter()
            .flatten()
            .flat_map(|s| s.spectrum.energies().iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// `H|ψ⟩`, applied configuration by configuration.
    pub fn apply_hamiltonian(&self, state: &FullState) -> FullState {
        let mut out = vec![C64::new(0.0, 0.0); state.amplitudes().len()];
        for (cfg, &a) in state.amplitudes().iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let cfg = cfg as Config;
            out[cfg as usize] += a * basis::diagonal_energy(&self.profile, self.field, cfg);
            basis::for_each_flip(&self.profile, cfg, |target, aj| out[target as usize] += a * aj);
        }
        FullState::from_amplitudes(state.n_bath(), out).expect("same shape")
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy(&self, state: &FullState) -> f64 {
        let h = self.apply_hamiltonian(state);
        state
            .amplitudes()
            .iter()
            .zip(h.amplitudes())
            .map(|(a, ha)| (a.conj() * ha).re)
            .sum()
    }

    fn check_support(&self, state: &FullState) -> Result<()> {
        if state.n_bath() != self.n_bath() {
            return Err(Error::Precondition(format!(
                "state has {} bath spins, spectra were built for {}",
                state.n_bath(),
                self.n_bath()
            )));
        }
        for m in state.occupied_sectors() {
            if self.sectors[m].is_none() {
                return Err(Error::Precondition(format!(
                    "no spectrum for the sector with {m} down spins"
                )));
            }
        }
        Ok(())
    }

    /// `e^{−iHt}|ψ⟩`.
    pub fn evolve(&self, state: &FullState, t: f64) -> Result<FullState> {
        self.check_support(state)?;
        let mut out = state.clone();
        for sector in self.sectors.iter().flatten() {
            let (coeff, any) = project(sector, state);
            if !any {
                continue;
            }
            let v = sector.spectrum.vectors();
            let e = sector.spectrum.energies();
            let d = sector.basis.dim();
            let rotated: Vec<C64> = (0..d)
                .map(|k| coeff[k] * C64::from_polar(1.0, -e[k] * t))
                .collect();
            let amps = out.amplitudes_mut();
            for (i, &cfg) in sector.basis.states().iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (k, c) in rotated.iter().enumerate() {
                    acc += c * v[(i, k)];
                }
                amps[cfg as usize] = acc;
            }
        }
        Ok(out)
    }

    /// Observables of `e^{−iHt}|ψ⟩` on every grid time. Times are processed
    /// in blocks so each sector costs two matrix products per block.
    pub fn trajectory(&self, state: &FullState, grid: &TimeGrid) -> Result<Trajectory> {
        self.check_support(state)?;
        let dim_full = state.amplitudes().len();
        let block = ((1usize << 21) / dim_full).clamp(1, 256);
        let occupied: Vec<(&Sector, Vec<C64>)> = self
            .sectors
            .iter()
            .flatten()
            .filter_map(|s| {
                let (coeff, any) = project(s, state);
                any.then_some((s, coeff))
            })
            .collect();

        let mut traj = Trajectory::default();
        for times in grid.points().chunks(block) {
            let mut states = vec![vec![C64::new(0.0, 0.0); dim_full]; times.len()];
            for (sector, coeff) in &occupied {
                let e = sector.spectrum.energies();
                let d = e.len();
                let phase_re = Mat::from_fn(d, times.len(), |k, j| (coeff[k] * C64::from_polar(1.0, -e[k] * times[j])).re);
                let phase_im = Mat::from_fn(d, times.len(), |k, j| (coeff[k] * C64::from_polar(1.0, -e[k] * times[j])).im);
                let v = sector.spectrum.vectors();
                let re = v * &phase_re;
                let im = v * &phase_im;
                for (i, &cfg) in sector.basis.states().iter().enumerate() {
                    for (j, s) in states.iter_mut().enumerate() {
                        s[cfg as usize] = C64::new(re[(i, j)], im[(i, j)]);
                    }
                }
            }
            for (&t, amps) in times.iter().zip(states) {
                let psi = FullState::from_amplitudes(state.n_bath(), amps)?;
                traj.record(self, t, &psi);
            }
        }
        Ok(traj)
    }
}

/// Eigenbasis coefficients `Vᵀ a` of the sector part of `state`.
fn project(sector: &Sector, state: &FullState) -> (Vec<C64>, bool) {
    let amps: Vec<C64> = sector
        .basis
        .states()
        .iter()
        .map(|&c| state.amplitude(c))
        .collect();
    let any = amps.iter().any(|a| a.re != 0.0 || a.im != 0.0);
    if !any {
        return (amps, false);
    }
    let v = sector.spectrum.vectors();
    let d = amps.len();
    let coeff = (0..d)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (i, a) in amps.iter().enumerate() {
                acc += a * v[(i, k)];
            }
            acc
        })
        .collect();
    (coeff, true)
}

/// `e^{−iHt}|ψ⟩` using precomputed sector spectra.
pub fn evolve(state: &FullState, spectra: &SpectrumSet, t: f64) -> Result<FullState> {
    spectra.evolve(state, t)
}

/// Recorded observables along a time evolution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub sz0: Vec<f64>,
    pub pbath: Vec<f64>,
    pub rho: Vec<QubitState>,
    pub norm: Vec<f64>,
    pub sz_total: Vec<f64>,
    pub energy: Vec<f64>,
}

impl Trajectory {
    /// Appends the observables of `state` at time `t`.
    pub fn record(&mut self, spectra: &SpectrumSet, t: f64, state: &FullState) {
        self.times.push(t);
        self.sz0.push(measure_sz0(state));
        self.pbath.push(measure_pbath(state));
        self.rho.push(measure_partial_trace(state));
        self.norm.push(state.norm());
        self.sz_total.push(measure_sz_total(state));
        self.energy.push(spectra.energy(state));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sz0_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.times.clone(), self.sz0.clone(), "sz0")
    }

    pub fn pbath_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.times.clone(), self.pbath.clone(), "pbath")
    }

    pub fn entropy_series(&self) -> Result<TimeSeries> {
        let s = self.rho.iter().map(|r| r.von_neumann_entropy()).collect();
        TimeSeries::new(self.times.clone(), s, "entropy")
    }
}

/// Largest deviations of the conserved quantities along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport {
    /// `max |‖ψ‖ − 1|`.
    pub norm_drift: f64,
    /// `max |⟨Sᶻ_tot⟩(t) − ⟨Sᶻ_tot⟩(t₀)|`.
    pub sz_total_drift: f64,
    /// `max |⟨H⟩(t) − ⟨H⟩(t₀)|`.
    pub energy_drift: f64,
    pub tolerance: f64,
}

impl ConservationReport {
    pub fn norm_violated(&self) -> bool {
        !(self.norm_drift <= self.tolerance)
    }

    pub fn sz_total_violated(&self) -> bool {
        !(self.sz_total_drift <= self.tolerance)
    }

    pub fn energy_violated(&self) -> bool {
        !(self.energy_drift <= self.tolerance)
    }

    pub fn passed(&self) -> bool {
        !(self.norm_violated() || self.sz_total_violated() || self.energy_violated())
    }
}

fn drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    values.iter().fold(0.0, |m, v| m.max((v - first).abs()))
}

pub fn conserved_checks(trajectory: &Trajectory) -> ConservationReport {
    conserved_checks_with(trajectory, CONSERVATION_TOLERANCE)
}

pub fn conserved_checks_with(trajectory: &Trajectory, tolerance: f64) -> ConservationReport {
    ConservationReport {
        norm_drift: trajectory
            .norm
            .iter()
            .fold(0.0, |m, n| m.max((n - 1.0).abs())),
        sz_total_drift: drift(&trajectory.sz_total),
        energy_drift: drift(&trajectory.energy),
        tolerance,
    }
}
