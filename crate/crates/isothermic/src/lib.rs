//! Darboux and Calapso transforms of meromorphically isothermic surfaces in the light-cone
//! model of Möbius geometry.
//!
//! The crate integrates the flat connection pencil d + λΩ of a polarized surface on the
//! universal cover of a punctured disc, and measures monodromy and limits of the resulting
//! transforms at a pole of the quadratic differential of order one or two.

pub mod error;
pub mod io;
pub mod minkowski;

pub use error::{Error, Result};
pub mod cli;
pub mod connection;
pub mod polecore;
pub mod profile;
pub mod serial;
pub mod surface;
pub mod transforms;
