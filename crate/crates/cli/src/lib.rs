//! Command-line and HTTP front end for the `supercluster` engine.
//!
//! Exit codes: 0 ok, 2 incompatible pair, 3 malformed input, 4 division or
//! integrality failure, 5 mutation not allowed.

pub mod commands;
pub mod input;
pub mod server;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCOMPATIBLE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_NOT_DIVISIBLE: i32 = 4;
pub const EXIT_NOT_ALLOWED: i32 = 5;
