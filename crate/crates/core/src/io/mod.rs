//! Run configuration, shard files and dataset validation.

mod config;
mod shard;
mod validate;

pub use config::{load_config, parse_config, Command, LossesOptions, PreinterpOptions, RunConfig};
pub use shard::{read_shard, ShardReader, ShardWriter, SHARD_MAGIC, SHARD_VERSION};
pub use validate::{read_manifest, validate_dir, ValidationReport};
