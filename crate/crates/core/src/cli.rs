//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage/parse/IO error, 2 invalid input region or
//! parameters, 3 algorithm failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use sroi::centerline::DEFAULT_EXPONENT;
use sroi::io;
use sroi::{
    extract_centerline_with, run_pipeline, CenterlineConfig, Error, ErrorKind, SubdivisionConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "sroi",
    version,
    about = "Shape-following equal-area subdivision of binary ROI masks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a mask into k equal-area regions ordered along its centerline.
    ///
    /// Ring-shaped regions should have a notch cut into them first: the
    /// centerline is an open curve and only covers part of a closed loop.
    Subdivide {
        /// Input mask (P2 or P5 graymap; nonzero samples are inside).
        #[arg(long)]
        input: PathBuf,
        /// Number of regions.
        #[arg(long = "k", value_parser = clap::value_parser!(u16).range(1..))]
        k: u16,
        /// Output label map (P2 graymap, sample = label).
        #[arg(long)]
        output: PathBuf,
        /// Directory for intermediate fields, centerline, cuts and stats.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Power of the normalized distance map that weights the second wave.
        #[arg(long, default_value_t = DEFAULT_EXPONENT)]
        exponent: f64,
        /// Keep the raw cut regions instead of equalizing their areas.
        #[arg(long)]
        no_balance: bool,
    },
    /// Write the ordered centerline of a mask as `x,y` lines.
    Centerline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXPONENT)]
        exponent: f64,
    },
    /// Print per-label statistics of a label map as JSON lines.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Input => 1,
            ErrorKind::Validation => 2,
            ErrorKind::Algorithm => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

pub fn run<I>(args: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Subdivide {
            input,
            k,
            output,
            dump,
            exponent,
            no_balance,
        } => {
            let config = SubdivisionConfig {
                centerline: CenterlineConfig { exponent },
                balance: !no_balance,
            };
            cmd_subdivide(&input, k as usize, &output, dump.as_deref(), &config)
        }
        Command::Centerline {
            input,
            output,
            exponent,
        } => cmd_centerline(&input, &output, &CenterlineConfig { exponent }),
        Command::Stats { input } => cmd_stats(&input),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

/// Writes through a sibling temporary file so a failed run never leaves a
/// partial file at `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let file_name = path.file_name().ok_or_else(|| Failure {
        code: 1,
        message: format!("{}: not a file path", path.display()),
    })?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let written = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = written {
        let _ = fs::remove_file(&tmp);
        return Err(io_failure(path, e));
    }
    Ok(())
}

fn cmd_subdivide(
    input: &Path,
    k: usize,
    output: &Path,
    dump: Option<&Path>,
    config: &SubdivisionConfig,
) -> Result<(), Failure> {
    let mask = io::read_mask(&read_input(input)?)?;
    let result = run_pipeline(&mask, k, config)?;
    let labels = io::write_labelmap(&result.labels)?;

    if let Some(dir) = dump {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        let c = &result.centerline;
        let files: [(&str, Vec<u8>); 6] = [
            ("distance.csv", io::write_field_csv(&c.distance)),
            ("arrival1.csv", io::write_field_csv(c.first_wave.field())),
            ("arrival2.csv", io::write_field_csv(c.second_wave.field())),
            ("centerline.csv", io::write_path_csv(&c.path)),
            ("cuts.csv", io::write_cuts_csv(&result.cuts)),
            (
                "stats.jsonl",
                io::write_stats_jsonl(&io::region_stats(&result.labels)),
            ),
        ];
        for (name, bytes) in files {
            write_atomic(&dir.join(name), &bytes)?;
        }
    }
    write_atomic(output, &labels)
}

fn cmd_centerline(input: &Path, output: &Path, config: &CenterlineConfig) -> Result<(), Failure> {
    let mask = io::read_mask(&read_input(input)?)?;
    let centerline = extract_centerline_with(&mask, config)?;
    write_atomic(output, &io::write_path_csv(&centerline.path))
}

fn cmd_stats(input: &Path) -> Result<(), Failure> {
    let labels = io::read_labelmap(&read_input(input)?)?;
    let out = io::write_stats_jsonl(&io::region_stats(&labels));
    std::io::stdout()
        .write_all(&out)
        .map_err(|e| io_failure(Path::new("<stdout>"), e))
}
