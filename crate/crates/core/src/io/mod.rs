//! File formats, run configuration and JSON reports.

mod config;
mod matrix;
mod report;

pub use config::{env_seed, RunConfig, SEED_ENV};
pub use matrix::{
    csv_to_matrix, decode_gstb, encode_csv, encode_gstb, parse_csv, read_labels, read_matrix,
    read_matrix_with_label_column, read_vector, write_matrix, CsvTable, MatrixFormat, GSTB_HEADER_LEN, GSTB_MAGIC,
    GSTB_VERSION,
};
pub use report::{CiEntry, ReportFile, ResultEntry, REPORT_SCHEMA, TOOL_VERSION};
