//! Shared inputs for the benchmarks.

use gendebias::synthetic::{generate, Fixture, FixtureConfig};

/// The default fixture grown to `vocab` words.
pub fn fixture(vocab: usize, dim: usize) -> Fixture {
    generate(&FixtureConfig {
        vocab,
        dim,
        ..FixtureConfig::default()
    })
    .expect("fixture")
}
