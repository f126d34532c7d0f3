//! File formats and dataset ingestion.

pub mod dataset;
pub mod normalize;
pub mod pnm;
pub mod spf;

pub use dataset::{read_dataset, read_mask_dir, write_dataset};
pub use normalize::{normalize_dataset, ChannelStats};
pub use pnm::{read_image, read_mask, write_image, write_mask};
pub use spf::{read_probmap, write_probmap};
