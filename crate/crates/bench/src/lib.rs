//! Benchmark-only crate; see the `benches/` directory.
//!
//! Shared inputs for the benches live here so both harnesses agree on what
//! "typical" chains look like.

use qb_core::{ChainConfig, Result};

/// Chain lengths the benches sweep over.
pub const BENCH_LENGTHS: [usize; 3] = [10, 50, 100];

pub fn uniform_chain(n: usize) -> Result<ChainConfig> {
    ChainConfig::uniform_unit(n)
}

pub fn parabolic_chain(n: usize) -> Result<ChainConfig> {
    ChainConfig::parabolic_unit(n)
}
