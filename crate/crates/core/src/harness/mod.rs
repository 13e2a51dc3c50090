//! Sweeps, summary reports and the CSV format behind the `qsd` binary.

mod config;
mod report;
mod sweep;

pub use config::{
    default_theta_grid, parse_protocol, ModeSelection, NoiseSetting, RunConfig, DEFAULT_RESOLUTION, DEFAULT_SHOTS,
};
pub use report::{
    run_calibration, run_oracles, run_table1, summarize_rows, OracleReport, OracleRow, Table1Report, Table1Row,
    TABLE1_PROTOCOLS,
};
pub use sweep::{cell_seed, csv_line, format_g, run_sweep, run_sweep_with, write_csv, CSV_HEADER};
