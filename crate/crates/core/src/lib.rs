pub mod classifier;
pub mod component;
pub mod error;
pub mod jordan;
pub mod oracle;
pub mod quiver;
mod serde_big;

pub use error::{Error, Result};
pub use jordan::{DominanceConvention, DominanceResult, JordanType};
