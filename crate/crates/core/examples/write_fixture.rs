//! Writes the synthetic fixture to a directory so the command-line tool can
//! be tried without downloading embeddings.
//!
//! cargo run -p gendebias --example write_fixture -- /tmp/fixture

use gendebias::synthetic::{generate, FixtureConfig};

fn main() -> gendebias::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fixture".into());
    let fx = generate(&FixtureConfig::default())?;
    let files = fx.write_files(&dir)?;
    println!("{files:#?}");
    Ok(())
}
