use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const STD_CONVENTION: &str = "population";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub dataset: String,
    pub subset: String,
    pub mean: f64,
    pub std: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    /// How `std` was computed; always `"population"` (divide by N).
    pub std_convention: String,
}

impl Default for RunReport {
    fn default() -> Self {
        RunReport {
            rows: Vec::new(),
            std_convention: STD_CONVENTION.to_string(),
        }
    }
}

impl RunReport {
    /// Rows sorted by (model, dataset, subset).
    pub fn sorted(&self) -> RunReport {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| {
            (&a.model, &a.dataset, &a.subset).cmp(&(&b.model, &b.dataset, &b.subset))
        });
        RunReport {
            rows,
            std_convention: self.std_convention.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Markdown,
    Json,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

/// A fraction as a percentage with one decimal, rounding half away from zero.
fn percent(x: f64) -> String {
    let v = (x * 1000.0).round() / 10.0;
    // avoid "-0.0"
    format!("{:.1}", if v == 0.0 { 0.0 } else { v })
}

pub fn markdown_cell(mean: f64, std: f64) -> String {
    format!("{}±{}", percent(mean), percent(std))
}

pub fn render_report(report: &RunReport, format: ReportFormat) -> String {
    let report = report.sorted();
    match format {
        ReportFormat::Markdown => {
            let mut out = String::from(
                "| model | dataset | subset | accuracy | seeds |\n|---|---|---|---|---|\n",
            );
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    r.model,
                    r.dataset,
                    r.subset,
                    markdown_cell(r.mean, r.std),
                    r.n_seeds
                );
            }
            let _ = writeln!(
                out,
                "\nAccuracy in percent, mean±std over seeds; std is the {} standard deviation.",
                report.std_convention
            );
            out
        }
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Tsv => {
            let mut out = String::from("model\tdataset\tsubset\tmean\tstd\tn_seeds\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.model, r.dataset, r.subset, r.mean, r.std, r.n_seeds
                );
            }
            out
        }
    }
}
