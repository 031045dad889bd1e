//! File formats and report output.

pub mod dataset;
pub mod network;
pub mod pima;
pub mod report;
pub mod svg;

pub use dataset::{load_dataset, read_dataset, write_dataset};
pub use network::NetworkFile;
pub use pima::{prepare_pima, read_pima, MedianTie};
pub use report::{Cell, Format, Table};
pub use svg::{LineChart, Series};
