//! Command-line front end: `extract`, `compare`, `adapt` and `serve`.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fittutor_core::{
    mirror_frame, validate_frame, CompareMode, ComparisonConfig, InvalidReason, PairSet, ReferencePose, Session,
    SessionConfig,
};
use serde_json::json;

use crate::adapter::{adapt_external_keypoints, AdapterDefaults};
use crate::format::{parse_frame, parse_reference, serialize_feedback, serialize_frame, serialize_reference_pretty, serialize_report};
use crate::server::{serve, DEFAULT_PORT};
use crate::wire::{DirectoryStore, NoStore, ReferenceStore};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_BAD_OUTPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fittutor", version, about = "Compare pose keypoint frames against a reference pose")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a reference document from one frame document.
    Extract(ExtractArgs),
    /// Compare a newline-delimited frame stream against a reference.
    Compare(CompareArgs),
    /// Convert a detector keypoint export into a canonical frame document.
    Adapt(AdaptArgs),
    /// Run the streaming session server.
    Serve(ServeArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairsArg {
    Table2,
    Extended,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Slope,
    Angle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// Canonical frame document.
    Frame,
    /// Detector export (`part` / `position` / `score` list).
    Posenet,
}

/// Comparison settings. Unset flags keep the reference's stored values
/// (or the defaults, when building a reference).
#[derive(Args, Debug, Clone, Default)]
pub struct ComparisonFlags {
    /// Accepted slope difference [default: 0.5]
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Minimum keypoint score for a limb to count [default: 0.5]
    #[arg(long)]
    pub min_score: Option<f64>,
    /// Joint-pair set [default: table2]
    #[arg(long, value_enum)]
    pub pairs: Option<PairsArg>,
    /// Comparison rule [default: slope]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Angle-mode tolerance in degrees [default: 15]
    #[arg(long)]
    pub angle_tolerance: Option<f64>,
}

impl ComparisonFlags {
    pub fn apply(&self, base: &ComparisonConfig) -> anyhow::Result<ComparisonConfig> {
        let mut c = base.clone();
        if let Some(t) = self.tolerance {
            c = c.with_tolerance(t)?;
        }
        if let Some(s) = self.min_score {
            c = c.with_min_score(s)?;
        }
        if let Some(a) = self.angle_tolerance {
            c = c.with_angle_tolerance_deg(a)?;
        }
        if let Some(p) = self.pairs {
            c = c.with_pair_set(match p {
                PairsArg::Table2 => PairSet::Table2,
                PairsArg::Extended => PairSet::Extended,
            });
        }
        if let Some(m) = self.mode {
            c = c.with_mode(match m {
                ModeArg::Slope => CompareMode::Slope,
                ModeArg::Angle => CompareMode::Angle,
            });
        }
        Ok(c)
    }
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Input frame file.
    pub input: PathBuf,
    /// Where to write the reference document.
    pub output: PathBuf,
    /// Reference name [default: input file stem]
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_enum, default_value = "frame")]
    pub format: InputFormat,
    /// Frame width for exports that do not carry one.
    #[arg(long, default_value_t = 640.0)]
    pub width: f64,
    /// Frame height for exports that do not carry one.
    #[arg(long, default_value_t = 480.0)]
    pub height: f64,
    #[command(flatten)]
    pub comparison: ComparisonFlags,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Reference document.
    pub reference: PathBuf,
    /// Frame stream, one frame document per line; `-` reads standard input.
    #[arg(default_value = "-")]
    pub frames: PathBuf,
    /// Feedback stream destination; `-` writes standard output.
    #[arg(short, long, default_value = "-")]
    pub out: PathBuf,
    #[command(flatten)]
    pub comparison: ComparisonFlags,
    /// Frames a correction must persist before it is reported.
    #[arg(long, default_value_t = 0)]
    pub debounce: u32,
    /// Append the session report as the final line.
    #[arg(long)]
    pub report: bool,
    /// Mirror user frames horizontally before comparing.
    #[arg(long)]
    pub mirror: bool,
}

#[derive(Args, Debug)]
pub struct AdaptArgs {
    /// Detector export file; `-` reads standard input.
    pub input: PathBuf,
    /// Destination; `-` writes standard output.
    #[arg(short, long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 640.0)]
    pub width: f64,
    #[arg(long, default_value_t = 480.0)]
    pub height: f64,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, env = "FITTUTOR_PORT", default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory of `<name>.json` reference documents for `hello` by name.
    #[arg(long)]
    pub refs: Option<PathBuf>,
}

/// Runs one parsed command and returns the process exit status.
pub fn run(cli: Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Extract(a) => cmd_extract(&a, stderr),
        Command::Compare(a) => cmd_compare(&a, stdin, stdout),
        Command::Adapt(a) => cmd_adapt(&a, stdin, stdout),
        Command::Serve(a) => cmd_serve(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError { code, message }) => {
            let _ = writeln!(stderr, "error: {message}");
            code
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn bad_input(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_BAD_INPUT,
        message: message.to_string(),
    }
}

fn bad_output(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_BAD_OUTPUT,
        message: message.to_string(),
    }
}

fn read_input(path: &Path, stdin: &mut dyn BufRead) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| bad_input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| bad_input(format!("{}: {e}", path.display())))
    }
}

pub fn cmd_extract(args: &ExtractArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input).map_err(|e| bad_input(format!("{}: {e}", args.input.display())))?;
    let frame = match args.format {
        InputFormat::Frame => parse_frame(&text),
        InputFormat::Posenet => adapt_external_keypoints(
            &text,
            AdapterDefaults {
                width: args.width,
                height: args.height,
            },
        ),
    }
    .map_err(|e| bad_input(format!("{}: {e}", args.input.display())))?;
    let config = args.comparison.apply(&ComparisonConfig::default()).map_err(bad_input)?;

    let validity = validate_frame(&frame, &config);
    if validity.valid_pairs < validity.total_pairs {
        let _ = writeln!(stderr, "warning: {} of {} pairs valid", validity.valid_pairs, validity.total_pairs);
        for inv in &validity.invalid {
            let _ = match inv.reason {
                InvalidReason::LowScore(part) => {
                    writeln!(stderr, "  {}: {} score below {}", inv.id, part, config.min_score())
                }
                InvalidReason::ZeroLength => writeln!(stderr, "  {}: zero-length limb", inv.id),
            };
        }
    }

    let name = args.name.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "reference".into())
    });
    let reference = ReferencePose::new(name, frame, config);
    let mut doc = serialize_reference_pretty(&reference);
    doc.push('\n');
    fs::write(&args.output, doc).map_err(|e| bad_output(format!("{}: {e}", args.output.display())))
}

fn open_output<'a>(path: &Path, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    if path == Path::new("-") {
        Ok(Box::new(stdout))
    } else {
        let f = fs::File::create(path).map_err(|e| bad_output(format!("{}: {e}", path.display())))?;
        Ok(Box::new(io::BufWriter::new(f)))
    }
}

/// Loads a reference and re-profiles it under the flag-adjusted config.
pub fn load_reference(path: &Path, flags: &ComparisonFlags) -> Result<ReferencePose, CliError> {
    let text = fs::read_to_string(path).map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
    let reference = parse_reference(&text).map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
    let config = flags.apply(reference.config()).map_err(bad_input)?;
    Ok(reference.reconfigured(config))
}

pub fn cmd_compare(args: &CompareArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<(), CliError> {
    let reference = load_reference(&args.reference, &args.comparison)?;
    let config = SessionConfig::new(reference.config().clone(), args.debounce);
    let mut session = Session::new(reference, config).map_err(bad_input)?;

    let mut file_reader;
    let input: &mut dyn BufRead = if args.frames == Path::new("-") {
        stdin
    } else {
        let f = fs::File::open(&args.frames).map_err(|e| bad_input(format!("{}: {e}", args.frames.display())))?;
        file_reader = BufReader::new(f);
        &mut file_reader
    };
    let mut out = open_output(&args.out, stdout)?;
    let write_err = |e: io::Error| bad_output(format!("{}: {e}", args.out.display()));

    for (idx, line) in input.lines().enumerate() {
        let line = line.map_err(|e| bad_input(format!("{}: {e}", args.frames.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = match parse_frame(&line) {
            Ok(frame) => {
                let frame = if args.mirror { mirror_frame(&frame) } else { frame };
                serialize_feedback(&session.push(&frame))
            }
            Err(e) => json!({"error": e.to_string(), "line": idx + 1}).to_string(),
        };
        writeln!(out, "{doc}").map_err(write_err)?;
        out.flush().map_err(write_err)?;
    }
    if args.report {
        writeln!(out, "{}", serialize_report(session.report())).map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}

pub fn cmd_adapt(args: &AdaptArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = read_input(&args.input, stdin)?;
    let frame = adapt_external_keypoints(
        &text,
        AdapterDefaults {
            width: args.width,
            height: args.height,
        },
    )
    .map_err(bad_input)?;
    let mut out = open_output(&args.out, stdout)?;
    writeln!(out, "{}", serialize_frame(&frame))
        .and_then(|_| out.flush())
        .map_err(|e| bad_output(format!("{}: {e}", args.out.display())))
}

pub fn cmd_serve(args: &ServeArgs) -> Result<(), CliError> {
    let store: Arc<dyn ReferenceStore> = match &args.refs {
        Some(dir) => Arc::new(DirectoryStore::new(dir)),
        None => Arc::new(NoStore),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    runtime
        .block_on(async {
            let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port)).await?;
            log::info!("listening on {}", listener.local_addr()?);
            eprintln!("listening on {}", listener.local_addr()?);
            serve(listener, store).await
        })
        .map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })
}
