//! The ADFF network.
//!
//! Five VGG-16 style convolution levels (the spatial feature learning module)
//! each feed a temporal branch: SE attention rescales the level's channels and
//! a two-layer bidirectional LSTM summarises the frequency-averaged feature
//! sequence into a fixed-length vector. The five vectors are concatenated and
//! mapped to the target space by a small fully connected head.

mod adff;
pub mod checkpoint;
mod config;
mod head;
mod sflm;
mod temporal;

pub use adff::{fuse, Adff, Trace};
pub use config::{ModelConfig, Task, Variant, BASE_CHANNELS, CONVS_PER_LEVEL, LEVELS};
pub use head::Head;
pub use sflm::{level_shapes, SflmLevel};
pub use temporal::TemporalBranch;
