//! Discretization of raw case records into items.

mod config;
mod dataset;
mod error;
mod kmeans;
mod spec;
mod table;
mod transform;
mod tsh;

pub use config::{default_na_tokens, BinningConfig, ColumnConfig, ColumnType, Derived, Level, Role};
pub use dataset::{
    bin_table, decode_store, encode_dataset, BinnedColumn, BinnedDataset, ColumnKind, Ingested, RowCounts,
};
pub use error::BinningError;
pub use kmeans::{kmeans_1d, KMeans1d, MAX_ITER, N_INIT, TOLERANCE};
pub use spec::{
    bin_cutpoints, bin_fixed_width, bin_grid, bin_kmeans, resolve_grid, BinSpec, Binning, Cutpoints, FixedWidth, Grid,
    KMeansBins, NA_LABEL,
};
pub use table::{parse_days, read_tsh_csv, RawTable, TshTable};
pub use transform::{log_offset_transform, minmax_normalize, LOG_OFFSET};
pub use tsh::{mean_tsh_score, tsh_trmssd, TshSeries};
