//! Linear-chain conditional random fields for transmembrane helix prediction.

pub mod analysis;
pub mod chain;
pub mod config;
pub mod error;
pub mod features;
pub mod lbfgs;
pub mod math;
pub mod metrics;
pub mod model_io;
pub mod seq;
pub mod topology;
pub mod train;

pub use chain::{CrfModel, Decoded, Trellis};
pub use config::ExperimentConfig;
pub use error::{Error, ErrorClass, Result};
pub use metrics::MetricsReport;
pub use seq::{BinaryLabel, Dataset, ParseMode, ProteinRecord, Residue, Segment};
pub use topology::{StateTopology, TopologyKind};
pub use train::{TrainConfig, TrainReport};
