//! Characters of the subgroup `Σ ℤ λ_n` of a prefix.
//!
//! A finitely generated torsion-free subgroup of ℝ is free, so a character
//! is exactly one angle per HNF generator; `ω(λ_n) = exp(i Σ_j c_nj θ_j)`.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::FrequencyLattice;

#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    lattice: Arc<FrequencyLattice>,
    angles: Vec<f64>,
}

impl Character {
    /// Builds a character from explicit angles, reduced into `[0, 2π)`.
    pub fn from_angles(lattice: Arc<FrequencyLattice>, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != lattice.rank() {
            return Err(Error::LatticeMismatch(format!(
                "{} angles for a rank {} lattice",
                angles.len(),
                lattice.rank()
            )));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        let angles = angles.into_iter().map(|a| a.rem_euclid(TAU)).map(|a| if a >= TAU { 0.0 } else { a }).collect();
        Ok(Character { lattice, angles })
    }

    pub fn trivial(lattice: Arc<FrequencyLattice>) -> Self {
        let angles = vec![0.0; lattice.rank()];
        Character { lattice, angles }
    }

    /// The vertical translation `β(τ)`: `ω(λ_n) = e^{-iτλ_n}`.
    pub fn from_real(lattice: Arc<FrequencyLattice>, tau: f64) -> Self {
        let angles = lattice.generator_values.iter().map(|g| (-tau * g).rem_euclid(TAU)).collect();
        Character::from_angles(lattice, angles).expect("rank matches")
    }

    /// Haar-random character: independent uniform angles, deterministic in `seed`.
    pub fn random(lattice: Arc<FrequencyLattice>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Character::random_with(lattice, &mut rng)
    }

    pub fn random_with(lattice: Arc<FrequencyLattice>, rng: &mut impl Rng) -> Self {
        let angles = (0..lattice.rank()).map(|_| rng.random::<f64>() * TAU).collect();
        Character { lattice, angles }
    }

    pub fn lattice(&self) -> &Arc<FrequencyLattice> {
        &self.lattice
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `Σ_j c_nj θ_j`, not reduced.
    pub fn phase(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.lattice.prefix_len {
            return Err(Error::IndexOutOfRange { index: n, len: self.lattice.prefix_len });
        }
        Ok(self.lattice.coords_f64[n - 1].iter().zip(&self.angles).map(|(c, a)| c * a).sum())
    }

    /// `ω(λ_n)`, a unit complex number.
    pub fn apply(&self, n: usize) -> Result<Complex64> {
        let phase = self.phase(n)?;
        Ok(Complex64::from_polar(1.0, phase.rem_euclid(TAU)))
    }

    /// Pointwise product `(ω·ω')(x) = ω(x) ω'(x)`.
    pub fn compose(&self, other: &Character) -> Result<Character> {
        if !Arc::ptr_eq(&self.lattice, &other.lattice) && self.lattice != other.lattice {
            return Err(Error::LatticeMismatch("characters live on different lattices".into()));
        }
        let angles = self.angles.iter().zip(&other.angles).map(|(a, b)| a + b).collect();
        Character::from_angles(self.lattice.clone(), angles)
    }
}
