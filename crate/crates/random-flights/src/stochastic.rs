//! Seeded randomness: Poisson arrival paths, sphere-distributed directions,
//! and exact Gamma moments used as analytic oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Master seed for any sampling operation.
///
/// Identical seed + identical request sequence gives bit-identical outputs.
/// Parallel replicas derive their own seeds through [`RandomSeed::child`],
/// which is the documented splitting rule for every multi-replica operation
/// in this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// Seed of the `index`-th child stream.
    ///
    /// Equals the `index`-th output of a SplitMix64 generator seeded at this
    /// value, computed in constant time.
    pub fn child(self, index: u64) -> RandomSeed {
        RandomSeed(splitmix_finalize(
            self.0
                .wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)),
        ))
    }

    /// Counter-based generator owned by this seed.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RandomSeed {
    fn from(value: u64) -> Self {
        RandomSeed(value)
    }
}

/// One realization of the standard Poisson arrival sequence `Γ_1 < … < Γ_n`
/// together with the i.i.d. unit-exponential spacings `γ_k`.
///
/// The convention `Γ_0 = 0` is implicit: [`GammaPath::arrival`] of `0` is `0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPath {
    /// Unit-exponential spacings `γ_1, …, γ_n`.
    pub spacings: Vec<f64>,
    /// Prefix sums `Γ_k = γ_1 + … + γ_k`, strictly increasing.
    pub arrivals: Vec<f64>,
}

impl GammaPath {
    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    /// `Γ_k`, with `Γ_0 = 0`.
    pub fn arrival(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.arrivals[k - 1]
        }
    }

    /// `γ_k` for `k = 1..=n`.
    pub fn spacing(&self, k: usize) -> f64 {
        self.spacings[k - 1]
    }
}

/// Draws `n` unit-rate exponential spacings and their prefix sums.
///
/// `n = 0` returns an empty path. Deterministic per seed.
pub fn sample_gamma_path(n: usize, seed: RandomSeed) -> GammaPath {
    let mut rng = seed.rng();
    let mut spacings = Vec::with_capacity(n);
    let mut arrivals = Vec::with_capacity(n);
    let mut total = 0.0f64;
    for _ in 0..n {
        let mut g: f64 = rng.sample(Exp1);
        // Exp1 can in principle return 0.0; spacings must be strictly positive.
        while g <= 0.0 {
            g = rng.sample(Exp1);
        }
        total += g;
        spacings.push(g);
        arrivals.push(total);
    }
    GammaPath { spacings, arrivals }
}

/// How a batch of directions was distributed on the sphere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionLaw {
    UniformSphere,
    /// Axis-symmetric custom law, identified by its label.
    Custom(String),
}

/// I.i.d. unit vectors `ε_1, …, ε_n` in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSequence {
    pub dim: usize,
    /// Flat storage, `dim` entries per vector.
    vectors: Vec<f64>,
    pub law: DirectionLaw,
}

impl DirectionSequence {
    pub fn len(&self) -> usize {
        self.vectors.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `ε_i` for `i = 1..=n`.
    pub fn vector(&self, i: usize) -> &[f64] {
        let start = (i - 1) * self.dim;
        &self.vectors[start..start + self.dim]
    }

    /// Basis projection `⟨ε_i, e_j⟩` with `j = 1..=d`.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        self.vectors[(i - 1) * self.dim + (j - 1)]
    }

    /// Coordinate-wise empirical mean, for symmetry spot checks.
    pub fn empirical_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim];
        for i in 1..=self.len() {
            for (m, &x) in mean.iter_mut().zip(self.vector(i)) {
                *m += x;
            }
        }
        let inv = 1.0 / self.len() as f64;
        mean.iter_mut().for_each(|m| *m *= inv);
        mean
    }
}

/// A pluggable direction law on the unit sphere.
///
/// Implementations must declare that their law is centered (`Eε = 0`); the
/// sampler rejects laws that do not. The declaration is spot-checked
/// empirically in the test suite, not at run time.
pub trait SphereLaw {
    fn label(&self) -> &str;
    fn declares_zero_mean(&self) -> bool;
    /// Fills `out` (length `d`) with one draw. Must return a unit vector.
    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]);
}

/// The uniform law on `S^{d-1}`, sampled as a normalized standard Gaussian.
/// Exact in every dimension; in `d = 1` it degenerates to a Rademacher sign.
pub struct UniformSphere;

impl SphereLaw for UniformSphere {
    fn label(&self) -> &str {
        "uniform-sphere"
    }

    fn declares_zero_mean(&self) -> bool {
        true
    }

    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        loop {
            let mut norm_sq = 0.0;
            for x in out.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *x = g;
                norm_sq += g * g;
            }
            if norm_sq > 1e-24 {
                let inv = 1.0 / norm_sq.sqrt();
                out.iter_mut().for_each(|x| *x *= inv);
                return;
            }
        }
    }
}

/// `n` i.i.d. uniform-sphere directions in `R^d`. Deterministic per seed.
pub fn sample_directions(n: usize, d: usize, seed: RandomSeed) -> Result<DirectionSequence> {
    sample_directions_with(&UniformSphere, n, d, seed)
}

/// Directions under a custom sphere law. The law must declare `Eε = 0` and
/// must produce unit vectors (checked to `1e-12`).
pub fn sample_directions_with(
    law: &dyn SphereLaw,
    n: usize,
    d: usize,
    seed: RandomSeed,
) -> Result<DirectionSequence> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "direction dimension d must be >= 1 (got 0)".into(),
        ));
    }
    if !law.declares_zero_mean() {
        return Err(Error::InvalidParameter(format!(
            "sphere law '{}' does not declare Eε = 0",
            law.label()
        )));
    }
    let mut rng = seed.rng();
    let mut vectors = vec![0.0; n * d];
    for chunk in vectors.chunks_mut(d) {
        law.sample_into(&mut rng, chunk);
        let norm: f64 = chunk.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "sphere law '{}' produced a vector of norm {norm}",
                law.label()
            )));
        }
    }
    let tag = if law.label() == "uniform-sphere" {
        DirectionLaw::UniformSphere
    } else {
        DirectionLaw::Custom(law.label().to_string())
    };
    Ok(DirectionSequence {
        dim: d,
        vectors,
        law: tag,
    })
}

/// `Γ(x + alpha) / Γ(x)` through log-gamma, stable for large `x`.
///
/// Requires `x > 0` and `x + alpha > 0`.
pub fn gamma_ratio(x: f64, alpha: f64) -> f64 {
    (ln_gamma(x + alpha) - ln_gamma(x)).exp()
}

/// Exact moment `E Γ_k^β = Γ(k + β) / Γ(k)` of the `Gamma(k, 1)` arrival.
///
/// This is the analytic oracle behind the Lemma 4/5 checks. The moment
/// diverges unless `k + β > 0`.
pub fn exact_gamma_moment(k: u64, beta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "gamma moment needs a positive integer k (got 0)".into(),
        ));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma moment order must be finite (got {beta})"
        )));
    }
    let kf = k as f64;
    if kf + beta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma moment diverges: need k + beta > 0, got k = {k}, beta = {beta}"
        )));
    }
    Ok(gamma_ratio(kf, beta))
}
