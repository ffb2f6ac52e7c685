//! Shared fixtures for the criterion benches.

use herglotz::harness::sample_density;
use herglotz::sphere::{Direction, HarmonicSpectrum};

/// Seeded density with the default decay.
pub fn density(d: usize, n: usize) -> HarmonicSpectrum {
    sample_density(d, n, 1.0, 7)
}

/// A fixed off-axis direction on S^2.
pub fn probe() -> Direction {
    Direction::from_spherical(0.7, 1.3)
}
