//! CSV and manifest emission.

use std::fs;
use std::path::{Path, PathBuf};

use super::runspec::{RunSpec, SimOutput};
use super::RunReport;
use crate::error::{Error, Result};

/// Schema of the BLER curve CSV.
pub const BLER_CSV_HEADER: &str =
    "method,alpha_true,gsnr_db,blocks,block_errors,bler,bit_errors,ber";

/// Files written by [`emit_reports`].
#[derive(Debug, Clone)]
pub struct EmittedFiles {
    pub bler_csv: Option<PathBuf>,
    pub weight_traces: Vec<PathBuf>,
    pub early_stop_csv: Option<PathBuf>,
    pub manifest: PathBuf,
}

pub fn bler_csv(reports: &[RunReport]) -> String {
    let mut out = String::from(BLER_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.method,
            r.alpha_label,
            r.gsnr_db,
            r.blocks,
            r.block_errors,
            r.bler(),
            r.bit_errors,
            r.ber()
        ));
    }
    out
}

pub fn weight_trace_csv(report: &RunReport) -> String {
    let m = report
        .weight_trace
        .first()
        .map_or(report.expert_labels.len(), Vec::len);
    let mut out = String::from("block");
    for i in 1..=m {
        out.push_str(&format!(",zeta_{i}"));
    }
    out.push('\n');
    for (block, zeta) in report.weight_trace.iter().enumerate() {
        out.push_str(&format!("{}", block + 1));
        for z in zeta {
            out.push_str(&format!(",{z}"));
        }
        out.push('\n');
    }
    out
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the BLER curve CSV, one weight-trace CSV per run that recorded
/// one, the early-stopping table CSV when present, and a `key=value`
/// manifest echoing the full run specification.
pub fn emit_reports(output: &SimOutput, spec: &RunSpec, out_dir: &Path) -> Result<EmittedFiles> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut files = EmittedFiles {
        bler_csv: None,
        weight_traces: Vec::new(),
        early_stop_csv: None,
        manifest: out_dir.join("manifest.txt"),
    };
    if !output.reports.is_empty() {
        let path = out_dir.join("bler.csv");
        write(&path, &bler_csv(&output.reports))?;
        files.bler_csv = Some(path);
    }
    for report in &output.reports {
        if report.weight_trace.is_empty() {
            continue;
        }
        let path = out_dir.join(format!("weights_{}_g{}.csv", report.method, report.gsnr_db));
        write(&path, &weight_trace_csv(report))?;
        files.weight_traces.push(path);
    }
    if let Some(table) = &output.table {
        let path = out_dir.join("early_stop.csv");
        write(&path, &table.to_csv())?;
        files.early_stop_csv = Some(path);
    }
    write(&files.manifest, &spec.to_manifest())?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bler_header_is_exact() {
        assert_eq!(
            BLER_CSV_HEADER,
            "method,alpha_true,gsnr_db,blocks,block_errors,bler,bit_errors,ber"
        );
        let csv = bler_csv(&[]);
        assert!(csv.starts_with(BLER_CSV_HEADER));
    }

    #[test]
    fn trace_csv_shape() {
        let report = RunReport {
            method: "proposed".into(),
            alpha_label: "1.4".into(),
            gsnr_db: 10.0,
            blocks: 2,
            block_errors: 1,
            bits: 256,
            bit_errors: 3,
            weight_trace: vec![vec![0.5, 0.5], vec![0.6, 0.4]],
            expert_labels: vec!["a".into(), "b".into()],
            early_stop: None,
            wall_clock_secs: 0.0,
            config_echo: vec![],
        };
        let csv = weight_trace_csv(&report);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "block,zeta_1,zeta_2");
        assert_eq!(lines.next().unwrap(), "1,0.5,0.5");
        assert_eq!(lines.next().unwrap(), "2,0.6,0.4");
    }
}
