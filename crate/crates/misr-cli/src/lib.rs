//! Benchmark harness and on-disk formats for the multi-frame
//! super-resolution CLI. The binary in `main.rs` is a thin wrapper over
//! these modules so integration tests can drive them directly.

pub mod bench;
pub mod fixtures;
pub mod manifest;
