use super::profile::CouplingProfile;
use super::{check_capacity, Config};
use crate::{Error, Result};

/// Fixed-magnetization sector of the central spin plus bath.
///
/// A full configuration keeps the central spin in bit 0 and bath spin `j` in
/// bit `j`; set bits are up spins. Sector `M` holds every configuration with
/// exactly `M` down spins among the `N + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n_bath: usize,
    down: usize,
    states: Vec<Config>,
}

impl SectorBasis {
    pub fn new(n_bath: usize, down: usize, cap: usize) -> Result<Self> {
        check_capacity(n_bath, cap)?;
        let spins = n_bath + 1;
        if down > spins {
            return Err(Error::Domain(format!(
                "sector with {down} down spins in a system of {spins}"
            )));
        }
        let up = (spins - down) as u32;
        // ascending by construction
        let states = (0..(1 as Config) << spins)
            .filter(|c| c.count_ones() == up)
            .collect();
        Ok(Self {
            n_bath,
            down,
            states,
        })
    }

    #[inline]
    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    /// Number of down spins `M`.
    #[inline]
    pub fn down(&self) -> usize {
        self.down
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Sorted full configurations.
    #[inline]
    pub fn states(&self) -> &[Config] {
        &self.states
    }

    #[inline]
    pub fn index_of(&self, config: Config) -> Option<usize> {
        self.states.binary_search(&config).ok()
    }
}

/// `build_sector_basis(N, M)`.
pub fn build_sector_basis(n_bath: usize, down: usize, cap: usize) -> Result<SectorBasis> {
    SectorBasis::new(n_bath, down, cap)
}

/// Dense real symmetric sector Hamiltonian, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SectorMatrix {
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Validation(format!(
                "{} entries for a {dim}×{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Diagonal energy `B s₀ᶻ + 2 Σ_j Δ_j s₀ᶻ s_jᶻ` of a full configuration.
pub(crate) fn diagonal_energy(profile: &CouplingProfile, field: f64, config: Config) -> f64 {
    let s0 = if config & 1 == 1 { 0.5 } else { -0.5 };
    let zz: f64 = profile
        .longitudinal()
        .iter()
        .enumerate()
        .map(|(j, d)| if config >> (j + 1) & 1 == 1 { 0.5 * d } else { -0.5 * d })
        .sum();
    field * s0 + 2.0 * s0 * zz
}

/// Calls `f(target, A_j)` for every flip-flop partner of `config`.
#[inline]
pub(crate) fn for_each_flip(profile: &CouplingProfile, config: Config, mut f: impl FnMut(Config, f64)) {
    let central = config & 1;
    for (j, &a) in profile.transverse().iter().enumerate() {
        let bit = (config >> (j + 1)) & 1;
        if bit != central && a != 0.0 {
            f(config ^ 1 ^ ((1 as Config) << (j + 1)), a);
        }
    }
}

/// Sector block of `H = B s₀ᶻ + 2 Σ_j [A_j (s₀ˣ s_jˣ + s₀ʸ s_jʸ) + Δ_j s₀ᶻ s_jᶻ]`.
pub fn build_hamiltonian(profile: &CouplingProfile, field: f64, basis: &SectorBasis) -> Result<SectorMatrix> {
    if profile.bath_size() != basis.n_bath() {
        return Err(Error::Validation(format!(
            "profile has {} bath spins, basis has {}",
            profile.bath_size(),
            basis.n_bath()
        )));
    }
    let dim = basis.dim();
    let mut data = vec![0.0; dim * dim];
    for (col, &cfg) in basis.states().iter().enumerate() {
        data[col * dim + col] = diagonal_energy(profile, field, cfg);
        for_each_flip(profile, cfg, |target, a| {
            // flip-flops preserve the number of down spins
            let row = basis.index_of(target).expect("target in sector");
            data[row * dim + col] += a;
        });
    }
    Ok(SectorMatrix { dim, data })
}
