//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 state or integrity error.

use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use onlinefdr::io::{
    calibrate_w0, emit_report, ingest_csv, next_level_preview, read_stream, render_report,
    run_records, run_stampede, CalibrationManifest, ColumnMap, Report, ReportFormat,
    StampedeSettings, StreamSession, StreamSnapshot,
};
use onlinefdr::simlab::{run_experiment, ExperimentGrid, RosterEntry};
use onlinefdr::{Engine, Error, GammaSpec, PValueRecord, ProcedureConfig, ProcedureName, Result, W0};

#[derive(Parser)]
#[command(name = "onlinefdr", version, about = "Online false discovery rate control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a stream of p-values, optionally checkpointing to --state.
    Run(RunArgs),
    /// Print the level the next hypothesis would be tested at.
    Preview {
        #[arg(long)]
        state: PathBuf,
    },
    /// Monte Carlo experiment grid.
    Simulate(SimulateArgs),
    /// Bundled case studies.
    Casestudy {
        #[command(subcommand)]
        study: Study,
    },
    /// Grid-search w0 against the STAMPEDE reference values.
    #[command(name = "calibrate-w0")]
    CalibrateW0 {
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Manifest to write (TOML).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Study {
    /// Seven-arm platform trial.
    Stampede {
        /// Calibration manifest; defaults to the bundled one.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Use gamma = 1/M and default w0 instead of the calibrated settings.
        #[arg(long, conflicts_with = "manifest")]
        bounded: bool,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// text or csv
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
}

#[derive(Args, Clone)]
struct ProcedureArgs {
    #[arg(long)]
    procedure: Option<ProcedureName>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Initial wealth, a number or `auto`.
    #[arg(long)]
    w0: Option<W0>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// e.g. `lord-default`, `power:1.6`, `bounded:20`, `truncated:20:power:1.6`
    #[arg(long)]
    gamma: Option<GammaSpec>,
    /// GAI++ spending fraction.
    #[arg(long)]
    spend: Option<f64>,
}

impl ProcedureArgs {
    fn config(&self) -> Option<ProcedureConfig> {
        let mut cfg = ProcedureConfig::new(self.procedure?, self.alpha);
        cfg.w0 = self.w0.unwrap_or(W0::Auto);
        cfg.lambda = self.lambda;
        cfg.eta = self.eta;
        cfg.gamma = self.gamma.clone();
        cfg.spend = self.spend;
        Some(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    procedure: ProcedureArgs,
    /// NDJSON stream, or CSV when the name ends in `.csv`; `-` for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Checkpoint file; created on first use and resumed afterwards.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Decision log; CSV when the name ends in `.csv`, NDJSON otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Column holding p-values in CSV input.
    #[arg(long, default_value = "p")]
    p_column: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment grid in TOML or JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Comma-separated grid of non-null proportions.
    #[arg(long, value_delimiter = ',')]
    pi1: Option<Vec<f64>>,
    /// Comma-separated roster, e.g. `lord,saffron,bh`.
    #[arg(long, value_delimiter = ',')]
    procedure: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv (wide), long, or text
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_input(input: &str, p_column: &str) -> Result<Vec<PValueRecord>> {
    if input == "-" {
        return read_stream(std::io::stdin().lock());
    }
    let path = Path::new(input);
    if is_csv(path) {
        return ingest_csv(path, &ColumnMap::with_p(p_column));
    }
    let f = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    read_stream(BufReader::new(f))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            })?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(args: RunArgs) -> Result<()> {
    let records = read_input(&args.input, &args.p_column)?;
    let config = args.procedure.config();
    let csv_out = args.out.as_deref().is_some_and(is_csv);
    let io_err = |e: std::io::Error| Error::Input(format!("writing decision log: {e}"));

    let log = match &args.state {
        None => {
            let cfg = config
                .ok_or_else(|| Error::Input("--procedure is required without --state".into()))?;
            let mut engine = Engine::new(&cfg)?;
            run_records(&mut engine, &records)?
        }
        Some(state) => {
            let mut session = StreamSession::open(state, config.as_ref())?;
            session.check(&records)?;
            if csv_out {
                session.run(&records)?
            } else {
                // Stream each line out as soon as its checkpoint is on disk.
                let mut w = open_out(args.out.as_deref())?;
                for rec in &records {
                    let line = session.step(rec)?;
                    serde_json::to_writer(&mut w, &line)?;
                    w.write_all(b"\n").map_err(io_err)?;
                    w.flush().map_err(io_err)?;
                }
                return Ok(());
            }
        }
    };
    if csv_out {
        let path = args.out.as_deref().expect("csv output has a path");
        emit_report(Report::DecisionLog(&log), ReportFormat::Csv, path)
    } else {
        let w = open_out(args.out.as_deref())?;
        onlinefdr::io::write_log(w, &log).map_err(io_err)
    }
}

fn preview(state: &Path) -> Result<()> {
    let snapshot = StreamSnapshot::load(state)?;
    let level = next_level_preview(&snapshot)?;
    println!("t = {} next level = {}", snapshot.t() + 1, ryu::Buffer::new().format(level));
    Ok(())
}

fn load_grid(path: &Path) -> Result<ExperimentGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        Ok(serde_json::from_str(&text)?)
    } else {
        toml::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut grid = match &args.config {
        Some(path) => load_grid(path)?,
        None => ExperimentGrid::default(),
    };
    if let Some(a) = args.alpha {
        grid.base.alpha = a;
    }
    if let Some(s) = args.seed {
        grid.base.seed = s;
    }
    if let Some(r) = args.replicates {
        grid.base.replicates = r;
    }
    if let Some(h) = args.horizon {
        grid.base.horizon = h;
    }
    if let Some(p) = args.pi1 {
        grid.pi1_grid = p;
    }
    if let Some(names) = args.procedure {
        grid.base.roster = names.into_iter().map(RosterEntry::Name).collect();
    }
    let table = run_experiment(&grid)?;
    let text = render_report(Report::Experiment(&table), args.format)?;
    write_text(args.out.as_deref(), &text)
}

fn stampede(
    manifest: Option<PathBuf>,
    bounded: bool,
    alpha: f64,
    out: Option<PathBuf>,
    format: ReportFormat,
) -> Result<()> {
    let settings = if bounded {
        StampedeSettings::bounded(alpha, 20)
    } else {
        let mut s = match manifest {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                CalibrationManifest::from_toml(&text)?.settings()
            }
            None => StampedeSettings::default(),
        };
        if alpha != s.alpha {
            s = calibrate_w0(alpha)?.settings();
        }
        s
    };
    let report = run_stampede(&settings)?;
    let text = render_report(Report::CaseStudy(&report), format)?;
    write_text(out.as_deref(), &text)
}

fn calibrate(alpha: f64, out: Option<PathBuf>) -> Result<()> {
    let manifest = calibrate_w0(alpha)?;
    for p in &manifest.procedures {
        let gamma = p.gamma.as_ref().map_or("-".to_string(), |g| g.to_string());
        println!(
            "{:<15} w0 {:<9} gamma {:<26} next level {:.6} (reference {:.4}) {}",
            p.procedure.display_name(),
            p.w0_rule,
            gamma,
            p.next_level,
            p.expected_next_level,
            if p.matched { "match" } else { "MISMATCH" }
        );
    }
    match &manifest.joint_match {
        Some(point) => println!("shared grid point: {point}"),
        None => println!("no single grid point matches every procedure; w0 is set per procedure"),
    }
    if let Some(path) = out {
        let text = manifest.to_toml()?;
        std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Preview { state } => preview(&state),
        Command::Simulate(args) => simulate(args),
        Command::Casestudy {
            study:
                Study::Stampede {
                    manifest,
                    bounded,
                    alpha,
                    out,
                    format,
                },
        } => stampede(manifest, bounded, alpha, out, format),
        Command::CalibrateW0 { alpha, out } => calibrate(alpha, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
