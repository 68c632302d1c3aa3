//! Library surface of the experiment runner, reused by the binary and by
//! the integration tests.

pub mod checks;
pub mod commands;
pub mod csvout;
