pub mod channel;
pub mod detection;
pub mod error;
pub mod io;
pub mod keygen;
pub mod metrics;
pub mod waveform;

pub use error::{Result, WdsError};
