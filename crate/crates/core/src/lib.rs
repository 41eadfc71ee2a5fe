//! Attention-based deep feature fusion (ADFF) for music emotion recognition.
//!
//! The crate is organised along the processing chain:
//!
//! * [`frontend`] decodes WAV audio and computes log Mel-spectrograms.
//! * [`dataset`] ingests annotated corpora, cuts chorus clips into fixed-length
//!   windows and stacks time slices of the spectrogram into input channels.
//! * [`nn`] holds the hand-written layers (convolution, batch-norm, SE
//!   attention, bidirectional LSTM, ...) with explicit backward passes.
//! * [`model`] assembles the spatial/temporal feature learning modules and the
//!   prediction head.
//! * [`train`] provides losses, metrics, Adam, the milestone schedule and the
//!   k-fold cross-validation harness.
//! * [`experiment`] is the configuration and reporting layer behind the `adff`
//!   command line tool.

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod frontend;
pub mod model;
pub mod nn;
pub mod real;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use real::Real;
pub use tensor::Tensor;
