//! Shared fixtures for the benchmarks.

use confboost_core::binning::{bin_table, encode_dataset, read_tsh_csv};
use confboost_core::synth::{case_table, CaseTableSpec};
use confboost_core::TransactionStore;

/// Encoded store from the study-sized synthetic table (1673 rows, 102 items).
pub fn study_store(seed: u64) -> TransactionStore {
    let data = case_table(&CaseTableSpec::study_sized(seed));
    let mut tsh = Vec::new();
    data.write_tsh(&mut tsh).expect("in-memory write");
    let tsh = read_tsh_csv(&tsh[..], &data.config.na_tokens).expect("generated TSH parses");
    let ingested = bin_table(&data.cases, Some(&tsh), &data.config, seed).expect("generated table bins");
    encode_dataset(&ingested.dataset).expect("generated table encodes")
}
