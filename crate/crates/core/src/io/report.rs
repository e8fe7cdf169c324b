//! Plain-text artefacts. Floats are written as the shortest decimal that
//! round-trips to the same binary64, so reports are byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::simlab::ExperimentTable;

use super::casestudy::CaseStudyReport;
use super::protocol::LogRecord;

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    DecisionLog(&'a [LogRecord]),
    Experiment(&'a ExperimentTable),
    CaseStudy(&'a CaseStudyReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// One row per record (decision log) or per `(procedure, pi1)` cell.
    Csv,
    /// One row per `(pi1, procedure, metric)` with its Monte Carlo SE.
    LongCsv,
    /// Fixed-width table: procedure | rejections | next level.
    TextSummary,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" | "wide" => Ok(ReportFormat::Csv),
            "long" | "long-csv" => Ok(ReportFormat::LongCsv),
            "text" | "summary" | "text-summary" => Ok(ReportFormat::TextSummary),
            _ => Err(Error::Input(format!("unknown report format `{s}`"))),
        }
    }
}

fn num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("UTF-8 input")
}

fn decision_csv(log: &[LogRecord]) -> String {
    let mut rows = vec![["t", "label", "p", "alpha", "rejected", "wealth"]
        .map(String::from)
        .to_vec()];
    for r in log {
        rows.push(vec![
            r.t.to_string(),
            r.label.clone().unwrap_or_default(),
            num(r.p),
            num(r.alpha),
            r.rejected.to_string(),
            r.wealth.map(num).unwrap_or_default(),
        ]);
    }
    csv_string(rows)
}

fn decision_summary(log: &[LogRecord]) -> String {
    let rejected: Vec<String> = log
        .iter()
        .filter(|r| r.rejected)
        .map(|r| r.label.clone().unwrap_or_else(|| r.t.to_string()))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "hypotheses tested | {}", log.len());
    let _ = writeln!(out, "rejections        | {}", join_or_dash(&rejected));
    if let Some(last) = log.last() {
        let _ = writeln!(out, "last level        | {:.4}", last.alpha);
        if let Some(w) = last.wealth {
            let _ = writeln!(out, "wealth            | {w:.6}");
        }
    }
    out
}

fn join_or_dash(items: &[String]) -> String {
    if items.is_empty() {
        "--".to_string()
    } else {
        items.join(", ")
    }
}

/// `procedure,pi1,fdr,mfdr,fdx,fwer,power,mean_rejections`
pub fn experiment_csv_wide(table: &ExperimentTable) -> String {
    let mut rows = vec![[
        "procedure",
        "pi1",
        "fdr",
        "mfdr",
        "fdx",
        "fwer",
        "power",
        "mean_rejections",
    ]
    .map(String::from)
    .to_vec()];
    for r in &table.rows {
        let m = &r.metrics;
        rows.push(vec![
            r.method.clone(),
            num(r.pi1),
            num(m.fdr),
            num(m.mfdr),
            num(m.fdx),
            num(m.fwer),
            num(m.power),
            num(m.mean_rejections),
        ]);
    }
    csv_string(rows)
}

/// `pi1,procedure,metric,value,mc_se`; mFDR has no SE column value.
pub fn experiment_csv_long(table: &ExperimentTable) -> String {
    let mut rows = vec![["pi1", "procedure", "metric", "value", "mc_se"]
        .map(String::from)
        .to_vec()];
    for r in &table.rows {
        let m = &r.metrics;
        let metrics = [
            ("fdr", m.fdr, Some(m.fdr_se)),
            ("mfdr", m.mfdr, None),
            ("fdx", m.fdx, Some(m.fdx_se)),
            ("fwer", m.fwer, Some(m.fwer_se)),
            ("power", m.power, Some(m.power_se)),
            ("mean_rejections", m.mean_rejections, Some(m.mean_rejections_se)),
        ];
        for (name, value, se) in metrics {
            rows.push(vec![
                num(r.pi1),
                r.method.clone(),
                name.to_string(),
                num(value),
                se.map(num).unwrap_or_default(),
            ]);
        }
    }
    csv_string(rows)
}

fn experiment_summary(table: &ExperimentTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<15}| {:>5} | {:>15} | {:>15} | {:>8}",
        "procedure", "pi1", "fdr (se)", "power (se)", "mean R"
    );
    for r in &table.rows {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{:<15}| {:>5} | {:>6.4} ({:.4}) | {:>6.4} ({:.4}) | {:>8.2}",
            r.method, r.pi1, m.fdr, m.fdr_se, m.power, m.power_se, m.mean_rejections
        );
    }
    out
}

fn case_study_summary(report: &CaseStudyReport) -> String {
    let width = report
        .rows
        .iter()
        .map(|r| r.display.len())
        .max()
        .unwrap_or(9)
        .max("Algorithm".len());
    let rejection_cells: Vec<String> = report
        .rows
        .iter()
        .map(|r| join_or_dash(&r.rejections))
        .collect();
    let rwidth = rejection_cells
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("Rejections".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$} | {:<rwidth$} | next level", "Algorithm", "Rejections");
    let _ = writeln!(out, "{}", "-".repeat(width + rwidth + 16));
    for (r, cell) in report.rows.iter().zip(&rejection_cells) {
        let level = r.next_level.map_or("--".to_string(), |l| format!("{l:.4}"));
        let _ = writeln!(out, "{:<width$} | {:<rwidth$} | {level}", r.display, cell);
    }
    out
}

fn case_study_csv(report: &CaseStudyReport) -> String {
    let mut rows = vec![["procedure", "rejections", "next_level"].map(String::from).to_vec()];
    for r in &report.rows {
        rows.push(vec![
            r.method.clone(),
            r.rejections.join(" "),
            r.next_level.map(num).unwrap_or_default(),
        ]);
    }
    csv_string(rows)
}

/// Renders a report in memory.
pub fn render_report(report: Report<'_>, format: ReportFormat) -> Result<String> {
    use ReportFormat::*;
    Ok(match (report, format) {
        (Report::DecisionLog(log), Csv) => decision_csv(log),
        (Report::DecisionLog(log), TextSummary) => decision_summary(log),
        (Report::Experiment(t), Csv) => experiment_csv_wide(t),
        (Report::Experiment(t), LongCsv) => experiment_csv_long(t),
        (Report::Experiment(t), TextSummary) => experiment_summary(t),
        (Report::CaseStudy(c), Csv) => case_study_csv(c),
        (Report::CaseStudy(c), TextSummary) => case_study_summary(c),
        (_, LongCsv) => {
            return Err(Error::Input(
                "long format applies to experiment tables only".into(),
            ))
        }
    })
}

/// Renders and writes a report to `path`.
pub fn emit_report(report: Report<'_>, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
