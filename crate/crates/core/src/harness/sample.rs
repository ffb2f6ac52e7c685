use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::sphere::HarmonicSpectrum;

/// f_{lj} = z_{lj} (1 + l)^{-gamma} with z standard complex Gaussian
/// (E|z|^2 = 1), drawn in (l, j) order from a ChaCha8 stream.
pub fn sample_density(d: usize, n: usize, gamma: f64, seed: u64) -> HarmonicSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    HarmonicSpectrum::from_fn(d, n, |l, _| {
        let re: f64 = rng.sample(normal);
        let im: f64 = rng.sample(normal);
        Complex64::new(re, im) * (1.0 + l as f64).powf(-gamma)
    })
}

/// Seed of sample i in a run seeded with `seed`.
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}
