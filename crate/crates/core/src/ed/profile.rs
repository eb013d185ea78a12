use crate::{Error, Result};

/// How a [`CouplingProfile`] was generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Uniform,
    /// `A_j = A·exp(−α(j−1)/N)`, `Δ_j = Δ·exp(−α(j−1)/N)`.
    Exponential { alpha: f64 },
    /// Exponential transverse profile with `Δ_j = √(A_j² + constant)`, so that
    /// `Δ_j² − A_j²` is the same for every bath spin.
    Integrable { alpha: f64, constant: f64 },
    Explicit,
}

/// Per-bath-spin couplings `(A_j, Δ_j)`, `j = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    transverse: Vec<f64>,
    longitudinal: Vec<f64>,
    kind: ProfileKind,
}

fn decay(n: usize, alpha: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (-alpha * j as f64 / n as f64).exp())
}

impl CouplingProfile {
    pub fn uniform(n: usize, a: f64, delta: f64) -> Result<Self> {
        Self::checked(vec![a; n], vec![delta; n], ProfileKind::Uniform)
    }

    pub fn exponential(n: usize, a: f64, delta: f64, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Validation(format!("inhomogeneity α = {alpha} is not finite")));
        }
        let transverse = decay(n, alpha).map(|f| a * f).collect();
        let longitudinal = decay(n, alpha).map(|f| delta * f).collect();
        Self::checked(transverse, longitudinal, ProfileKind::Exponential { alpha })
    }

    pub fn integrable(n: usize, a: f64, alpha: f64, constant: f64) -> Result<Self> {
        if !alpha.is_finite() || !constant.is_finite() {
            return Err(Error::Validation("integrable profile parameters must be finite".into()));
        }
        let transverse: Vec<f64> = decay(n, alpha).map(|f| a * f).collect();
        let longitudinal = transverse
            .iter()
            .map(|aj| {
                let d2 = aj * aj + constant;
                if d2 < 0.0 {
                    Err(Error::Validation(format!(
                        "Δ_j² = A_j² + {constant} is negative for A_j = {aj}"
                    )))
                } else {
                    Ok(d2.sqrt())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::checked(transverse, longitudinal, ProfileKind::Integrable { alpha, constant })
    }

    pub fn explicit(transverse: Vec<f64>, longitudinal: Vec<f64>) -> Result<Self> {
        Self::checked(transverse, longitudinal, ProfileKind::Explicit)
    }

    /// Builds a generated profile. Explicit profiles go through
    /// [`CouplingProfile::explicit`].
    pub fn build(kind: ProfileKind, n: usize, a: f64, delta: f64) -> Result<Self> {
        match kind {
            ProfileKind::Uniform => Self::uniform(n, a, delta),
            ProfileKind::Exponential { alpha } => Self::exponential(n, a, delta, alpha),
            ProfileKind::Integrable { alpha, constant } => Self::integrable(n, a, alpha, constant),
            ProfileKind::Explicit => Err(Error::Validation(
                "explicit profiles need coupling arrays".into(),
            )),
        }
    }

    fn checked(transverse: Vec<f64>, longitudinal: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if transverse.is_empty() {
            return Err(Error::Validation("coupling profile needs at least one bath spin".into()));
        }
        if transverse.len() != longitudinal.len() {
            return Err(Error::Validation(format!(
                "{} transverse couplings but {} longitudinal couplings",
                transverse.len(),
                longitudinal.len()
            )));
        }
        if transverse.iter().chain(&longitudinal).any(|v| !v.is_finite()) {
            return Err(Error::Validation("couplings must be finite".into()));
        }
        Ok(Self {
            transverse,
            longitudinal,
            kind,
        })
    }

    #[inline]
    pub fn bath_size(&self) -> usize {
        self.transverse.len()
    }

    /// `A_j`, index `j − 1`.
    #[inline]
    pub fn transverse(&self) -> &[f64] {
        &self.transverse
    }

    /// `Δ_j`, index `j − 1`.
    #[inline]
    pub fn longitudinal(&self) -> &[f64] {
        &self.longitudinal
    }

    #[inline]
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// Whether all bath spins couple identically.
    pub fn is_uniform(&self) -> bool {
        self.transverse.iter().all(|&a| a == self.transverse[0])
            && self.longitudinal.iter().all(|&d| d == self.longitudinal[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_profiles() {
        let flat = CouplingProfile::exponential(12, 1.0, 1.0, 0.0).unwrap();
        assert!(flat.is_uniform());
        assert!(flat.transverse().iter().all(|&a| a == 1.0));

        let steep = CouplingProfile::exponential(12, 1.0, 1.0, 5.0).unwrap();
        assert!((steep.transverse()[11] - (-55.0f64 / 12.0).exp()).abs() < 1e-16);
        assert_eq!(steep.transverse(), steep.longitudinal());
        assert_eq!(steep.kind(), ProfileKind::Exponential { alpha: 5.0 });
    }

    #[test]
    fn integrable_condition_holds() {
        let p = CouplingProfile::integrable(9, 1.3, 2.0, 0.0).unwrap();
        for (a, d) in p.transverse().iter().zip(p.longitudinal()) {
            assert_eq!(a.abs(), d.abs());
        }
        let p = CouplingProfile::integrable(9, 1.3, 2.0, 0.4).unwrap();
        for (a, d) in p.transverse().iter().zip(p.longitudinal()) {
            assert!((d * d - a * a - 0.4).abs() < 1e-12);
        }
        assert!(CouplingProfile::integrable(9, 1.0, 0.0, -2.0).is_err());
    }

    #[test]
    fn explicit_validation() {
        assert!(CouplingProfile::explicit(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(CouplingProfile::explicit(vec![], vec![]).is_err());
        assert!(CouplingProfile::explicit(vec![f64::NAN], vec![1.0]).is_err());
        assert!(CouplingProfile::build(ProfileKind::Explicit, 3, 1.0, 1.0).is_err());
        let p = CouplingProfile::explicit(vec![1.0, 0.5], vec![0.0, 0.2]).unwrap();
        assert_eq!(p.bath_size(), 2);
        assert!(!p.is_uniform());
    }
}
