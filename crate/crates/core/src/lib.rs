//! Nonautonomous bright matter-wave solitons in time-modulated traps.

pub mod consistency;
pub mod error;
pub mod gpe;
pub mod modulation;
pub mod numerics;
pub mod soliton;

pub use error::{Error, Result};
