//! Exact arithmetic for quantum cluster superalgebras.
//!
//! Coefficients live in `Q[q^(±1/2)]` ([`coeff`]), cluster variables in a based
//! quantum supertorus ([`supertorus`]). Extended quivers ([`quiver`]) carry the
//! odd data; [`compat`] checks and mutates the compatible form; [`seed`]
//! performs super-seed mutation and [`laurent`] certifies Laurentness.

pub mod coeff;
pub mod compat;
pub mod laurent;
pub mod quiver;
pub mod render;
pub mod sample;
pub mod seed;
pub mod supertorus;
