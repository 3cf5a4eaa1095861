//! Random reduction matrices and the fraction of them that preserve the
//! generated space.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generator_certificate_with_ranks, gramian_ranks, model_length, CertifyOptions, ReductionMatrix};
use crate::error::{Error, Result};
use crate::model::GramianField;
use crate::numerics::ComplexMatrix;

/// Failing matrices kept in a [`SamplerReport`].
pub const MAX_FAILURE_EXAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Real and imaginary parts independent standard normals.
    #[default]
    Gaussian,
    /// Real and imaginary parts independent uniform on `[-1, 1]`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerReport {
    pub trials: usize,
    pub seed: u64,
    pub distribution: Distribution,
    pub l: usize,
    pub preserving_count: usize,
    pub failure_examples: Vec<ReductionMatrix>,
}

impl SamplerReport {
    pub fn preserving_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.preserving_count as f64 / self.trials as f64
        }
    }
}

/// The `trial`-th matrix of the stream for `seed`; independent of how many
/// trials are drawn or in what order.
pub fn draw_matrix(l: usize, m: usize, seed: u64, trial: u64, distribution: Distribution) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let data = (0..l * m)
        .map(|_| match distribution {
            Distribution::Gaussian => Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)),
            Distribution::Uniform => Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)),
        })
        .collect();
    ComplexMatrix::new(l, m, data).expect("sampled entries are finite")
}

/// Draws `trials` random `l x m` matrices and counts those that preserve the
/// generated MI space. Requires `length <= l <= m`.
pub fn sample_random_reductions(
    g: &GramianField,
    l: usize,
    trials: usize,
    seed: u64,
    distribution: Distribution,
    opts: &CertifyOptions,
) -> Result<SamplerReport> {
    let m = g.generator_count();
    let length = model_length(g, &opts.tol);
    if l < length || l > m {
        return Err(Error::Contract(format!(
            "sampling needs length <= l <= m, got length = {length}, l = {l}, m = {m}"
        )));
    }
    let ranks = gramian_ranks(g, &opts.tol);
    let outcomes: Vec<(bool, ReductionMatrix)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let a = ReductionMatrix::new(draw_matrix(l, m, seed, t, distribution));
            let cert = generator_certificate_with_ranks(g, &ranks, &a, opts)?;
            Ok((cert.preserving, a))
        })
        .collect::<Result<_>>()?;
    let preserving_count = outcomes.iter().filter(|(ok, _)| *ok).count();
    let failure_examples =
        outcomes.into_iter().filter(|(ok, _)| !ok).map(|(_, a)| a).take(MAX_FAILURE_EXAMPLES).collect();
    Ok(SamplerReport { trials, seed, distribution, l, preserving_count, failure_examples })
}
