pub mod ber_oracle;
pub mod channel;
pub mod error;
pub mod grid;
pub mod loading;
pub mod metrics;
pub mod modulation;
pub mod sweep;
pub mod systems;

pub use error::{Error, Result};
pub use grid::Grid;
pub use modulation::{catalog, ModulationFamily, ModulationScheme};
