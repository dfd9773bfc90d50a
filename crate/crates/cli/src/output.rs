//! Writing reports and CSV series to an output directory.

use std::io;
use std::path::Path;

use serde::Serialize;

use crate::pipeline::RunOutput;
use crate::sweep::{table_csv, SweepReport};

pub const REPORT_FILE: &str = "report.json";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const ETA_FILE: &str = "eta.csv";
pub const SWEEP_FILE: &str = "sweep.json";
pub const TABLE_FILE: &str = "table.csv";

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_run(dir: &Path, out: &RunOutput) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(REPORT_FILE), to_json(&out.report))?;
    if let Some(csv) = &out.spectrum_csv {
        std::fs::write(dir.join(SPECTRUM_FILE), csv)?;
    }
    if let Some(csv) = &out.eta_csv {
        std::fs::write(dir.join(ETA_FILE), csv)?;
    }
    Ok(())
}

pub fn write_sweep(dir: &Path, report: &SweepReport) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(SWEEP_FILE), to_json(report))?;
    std::fs::write(dir.join(TABLE_FILE), table_csv(report))?;
    Ok(())
}
