//! Reproduces the STAMPEDE platform-trial table: which arms each method
//! rejects, and the level the next arm would face.
//!
//! ```text
//! cargo run --example stampede_case_study
//! ```

use onlinefdr::io::{
    calibrate_w0, render_report, run_stampede, Report, ReportFormat, StampedeSettings,
};

fn main() -> onlinefdr::Result<()> {
    // Bundled, calibrated settings.
    let report = run_stampede(&StampedeSettings::default())?;
    print!("{}", render_report(Report::CaseStudy(&report), ReportFormat::TextSummary)?);

    // How each online method was configured to get there.
    let manifest = calibrate_w0(0.05)?;
    println!();
    for p in &manifest.procedures {
        let gamma = p.gamma.as_ref().map(ToString::to_string).unwrap_or_default();
        println!(
            "{:<15} w0 = {:<9} gamma = {:<26} alpha_8 = {:.6}",
            p.procedure.display_name(),
            p.w0_rule,
            gamma,
            p.next_level
        );
    }

    // With a flat 1/M sequence the adaptive methods lose both rejections.
    let flat = run_stampede(&StampedeSettings::bounded(0.05, 20))?;
    println!("\nflat 1/M sequence, default w0:");
    print!("{}", render_report(Report::CaseStudy(&flat), ReportFormat::TextSummary)?);
    Ok(())
}
