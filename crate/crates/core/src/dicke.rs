//! Collective-spin combinatorics.
//!
//! Dicke states `|n⟩ = |N/2, n − N/2⟩` are the symmetric states of `N` spins-1/2
//! with `n` spins up. A spin coherent bath
//! `⊗_j [sin(θ/2)|↑⟩ + cos(θ/2)|↓⟩]` expands over them with binomial weights,
//! which are evaluated in log space so that baths of 10³ spins and beyond stay
//! finite.
//!
//! Bath configurations are bit strings: bath spin `j` (1-based) is bit `j − 1`
//! and an up spin is a set bit.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Number of spins in the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BathSize(usize);

impl BathSize {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("bath size must be at least 1".into()));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for BathSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Polar angle θ ∈ [0, π] of the spin coherent bath state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CoherentAngle(f64);

impl CoherentAngle {
    /// Angles outside `[0, π]` are rejected, not wrapped.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!(
                "coherent angle θ = {theta} outside [0, π]"
            )));
        }
        Ok(Self(theta))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Single-spin up amplitude sin(θ/2).
    #[inline]
    pub fn up_amplitude(self) -> f64 {
        (0.5 * self.0).sin()
    }

    /// Single-spin down amplitude cos(θ/2); exactly zero at θ = π.
    #[inline]
    pub fn down_amplitude(self) -> f64 {
        if self.0 == PI {
            0.0
        } else {
            (0.5 * self.0).cos()
        }
    }

    /// Up-spin probability sin²(θ/2).
    #[inline]
    pub fn up_probability(self) -> f64 {
        let s = self.up_amplitude();
        s * s
    }
}

/// Binomial Dicke weights of a spin coherent bath state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentWeights {
    weights: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl CoherentWeights {
    /// `w[n] = C(N,n) sin²ⁿ(θ/2) cos²⁽ᴺ⁻ⁿ⁾(θ/2)` for `n = 0..=N`.
    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `c[n] = √w[n]`, the Dicke amplitudes of the bath state.
    #[inline]
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Index of the largest weight (lowest index on ties).
    pub fn dominant(&self) -> usize {
        let mut best = 0;
        for (n, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = n;
            }
        }
        best
    }
}

/// `ln C(n, k)`.
///
/// Exact (up to the final logarithm) whenever the binomial fits in a `u128`,
/// log-gamma otherwise.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("log_binomial: k = {k} > n = {n}")));
    }
    if let Some(c) = exact_binomial(n, k) {
        return Ok((c as f64).ln());
    }
    let (n, k) = (n as f64, k as f64);
    Ok(ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0))
}

fn exact_binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) is an integer at every step
        c = c.checked_mul(n - i)? / (i + 1);
    }
    Some(c)
}

/// Dicke weights of the coherent bath state, computed as
/// `exp(ln C + n ln sin² + (N−n) ln cos²)` with `0·ln 0 = 0`.
pub fn coherent_weights(n: BathSize, theta: CoherentAngle) -> CoherentWeights {
    let big_n = n.get();
    let s = theta.up_amplitude();
    let c = theta.down_amplitude();
    let ln_up = 2.0 * s.abs().ln();
    let ln_down = 2.0 * c.abs().ln();

    let mut weights: Vec<f64> = (0..=big_n)
        .map(|k| {
            let up = k as f64;
            let down = (big_n - k) as f64;
            let mut lw = log_binomial(big_n as u64, k as u64).expect("k ≤ N");
            if k > 0 {
                lw += up * ln_up;
            }
            if big_n > k {
                lw += down * ln_down;
            }
            lw.exp()
        })
        .collect();

    // the exact distribution sums to one; remove the log-gamma drift
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    let amplitudes = weights.iter().map(|w| w.sqrt()).collect();
    CoherentWeights {
        weights,
        amplitudes,
    }
}

/// Dicke ladder coefficient `b_n = n(N − n + 1)`, so that
/// `J⁻|n⟩ = √b_n |n−1⟩` and `J⁺|n⟩ = √b_{n+1} |n+1⟩`.
///
/// Zero at both ends of the ladder (`n = 0` and `n = N + 1`) and outside it.
#[inline]
pub fn ladder_coefficient(k: usize, n: BathSize) -> f64 {
    let big_n = n.get();
    if k > big_n + 1 {
        return 0.0;
    }
    (k * (big_n + 1 - k)) as f64
}

/// The Dicke state `|k⟩` of an `N`-spin bath as a dense vector of dimension
/// `2^N` in the bit-string basis.
pub fn dicke_vector(n: BathSize, k: usize, cap: usize) -> Result<Vec<f64>> {
    let big_n = n.get();
    if big_n > cap {
        return Err(Error::Capacity { n: big_n, cap });
    }
    if big_n >= usize::BITS as usize - 1 {
        return Err(Error::Capacity {
            n: big_n,
            cap: usize::BITS as usize - 2,
        });
    }
    if k > big_n {
        return Err(Error::Domain(format!(
            "Dicke index {k} exceeds bath size {big_n}"
        )));
    }
    let amp = (-0.5 * log_binomial(big_n as u64, k as u64)?).exp();
    Ok((0..1usize << big_n)
        .map(|cfg| {
            if cfg.count_ones() as usize == k {
                amp
            } else {
                0.0
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bath(n: usize) -> BathSize {
        BathSize::new(n).unwrap()
    }

    #[test]
    fn log_binomial_small_cases() {
        assert_eq!(log_binomial(8, 0).unwrap(), 0.0);
        assert!((log_binomial(8, 4).unwrap() - 70f64.ln()).abs() < 1e-15);
        assert!(log_binomial(3, 4).is_err());
    }

    #[test]
    fn weights_at_the_poles() {
        for n in [1, 5, 40] {
            let down = coherent_weights(bath(n), CoherentAngle::new(0.0).unwrap());
            assert_eq!(down.weights()[0], 1.0);
            assert!(down.weights()[1..].iter().all(|&w| w == 0.0));

            let up = coherent_weights(bath(n), CoherentAngle::new(PI).unwrap());
            assert_eq!(up.weights()[n], 1.0);
            assert!(up.weights()[..n].iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn weights_two_spins_equator() {
        let w = coherent_weights(bath(2), CoherentAngle::new(PI / 2.0).unwrap());
        let expect = [0.25, 0.5, 0.25];
        for (a, b) in w.weights().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(w.dominant(), 1);
    }

    #[test]
    fn angle_outside_range_is_rejected() {
        assert!(CoherentAngle::new(-0.1).is_err());
        assert!(CoherentAngle::new(3.2).is_err());
        assert!(CoherentAngle::new(f64::NAN).is_err());
        assert!(BathSize::new(0).is_err());
    }

    #[test]
    fn ladder_edges() {
        assert_eq!(ladder_coefficient(0, bath(8)), 0.0);
        assert_eq!(ladder_coefficient(9, bath(8)), 0.0);
        assert_eq!(ladder_coefficient(1, bath(8)), 8.0);
        assert_eq!(ladder_coefficient(12, bath(8)), 0.0);
    }

    #[test]
    fn dicke_vectors_small() {
        let v = dicke_vector(bath(2), 1, 14).unwrap();
        let r = 0.5f64.sqrt();
        // configurations 00, 01, 10, 11
        let expect = [0.0, r, r, 0.0];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let v = dicke_vector(bath(3), 0, 14).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            dicke_vector(bath(15), 0, 14),
            Err(Error::Capacity { n: 15, cap: 14 })
        ));
        assert!(dicke_vector(bath(3), 4, 14).is_err());
    }
}
