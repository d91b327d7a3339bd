mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use error::CliError;

/// Far-field data, disk validation and Landweber direct sampling images for
/// 2D scatterers with a conductive boundary.
#[derive(Debug, Parser)]
#[command(name = "ldsm", version)]
pub struct Cli {
    /// Experiment file of `key = value` lines; flags given on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the forward problem and write the far-field matrix.
    #[command(args_override_self = true)]
    Forward(ForwardArgs),
    /// Compare boundary element far fields of a disk with the series solution.
    #[command(args_override_self = true)]
    DiskVerify(DiskVerifyArgs),
    /// Reconstruct an indicator image from a far-field file.
    #[command(args_override_self = true)]
    Image(ImageArgs),
}

#[derive(Debug, Clone, Copy, Args)]
struct MediumArgs {
    /// Real part of the refractive index.
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    n_re: f64,
    /// Imaginary part of the refractive index.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    n_im: f64,
    /// Real part of the boundary conductivity.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    eta_re: f64,
    /// Imaginary part of the boundary conductivity.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eta_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    /// Quadratic interpolant of the curve on every face.
    Quadratic,
    /// The parametrized curve itself.
    Exact,
}

#[derive(Debug, Clone, Args)]
struct ForwardArgs {
    /// circle, circle:<R>, kite, peanut or file:<path>.
    #[arg(long)]
    shape: String,
    /// Wavenumber; accepts multiples of pi such as `2pi`.
    #[arg(long, value_parser = parse_wavenumber)]
    k: f64,
    #[command(flatten)]
    medium: MediumArgs,
    /// Number of boundary faces.
    #[arg(long, default_value_t = 128)]
    nf: usize,
    /// Number of incident and observation directions.
    #[arg(long, default_value_t = 64)]
    dirs: usize,
    /// Face geometry of the boundary elements.
    #[arg(long, value_enum, default_value_t = GeometryArg::Quadratic)]
    geometry: GeometryArg,
    /// Output far-field file.
    #[arg(long, default_value = "farfield.ffmat")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Table,
    Csv,
    Both,
}

#[derive(Debug, Clone, Args)]
struct DiskVerifyArgs {
    /// Comma-separated wavenumbers.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6", value_parser = parse_wavenumber, action = ArgAction::Set)]
    k: Vec<f64>,
    /// Comma-separated face counts.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80", action = ArgAction::Set)]
    nf: Vec<usize>,
    /// Disk radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[command(flatten)]
    medium: MediumArgs,
    /// Number of directions.
    #[arg(long, default_value_t = 64)]
    dirs: usize,
    #[arg(long, value_enum, default_value_t = GeometryArg::Quadratic)]
    geometry: GeometryArg,
    /// What to print on standard output.
    #[arg(long, value_enum, default_value_t = TableFormat::Both)]
    format: TableFormat,
    /// Also write the `k,Nf,eps` table to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    /// 100 equispaced points on [0, s1].
    Equi,
    /// Eigenvalues of F#.
    Sv,
    /// 32 Gauss-Legendre points on [0, s1].
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseNormArg {
    Spectral,
    Frobenius,
}

/// `x0,x1,y0,y1,res`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct GridSpec {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    res: usize,
}

#[derive(Debug, Clone, Args)]
struct ImageArgs {
    /// Far-field file written by `forward`.
    #[arg(long)]
    input: PathBuf,
    /// Relative noise level in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Seed of the noise generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Normalization of the noise matrix.
    #[arg(long, value_enum, default_value_t = NoiseNormArg::Spectral)]
    noise_norm: NoiseNormArg,
    /// Interpolation nodes of the filter polynomial.
    #[arg(long, value_enum, default_value_t = SchemeArg::Gauss)]
    scheme: SchemeArg,
    /// Degree of the filter polynomial.
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// Step size as a fraction of 1/lambda_1.
    #[arg(long, default_value_t = 0.9)]
    beta_frac: f64,
    /// Iteration count; chosen by the discrepancy rule when omitted.
    #[arg(long)]
    r: Option<u32>,
    /// Sampling region and points per axis.
    #[arg(long, default_value = "-3,3,-3,3,100", value_parser = parse_grid, allow_hyphen_values = true)]
    grid: GridSpec,
    /// Power of the norm in the imaging function.
    #[arg(long, default_value_t = 4, value_parser = parse_exponent)]
    exponent: i32,
    /// Output CSV; the heatmap goes next to it with a `.pgm` extension.
    #[arg(long, default_value = "image.csv")]
    out: PathBuf,
}

fn parse_wavenumber(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let value = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().map_err(|e| format!("bad multiple of pi `{s}`: {e}"))?
        };
        factor * std::f64::consts::PI
    } else {
        t.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"))?
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("wavenumber must be positive, got {s}"));
    }
    Ok(value)
}

fn parse_exponent(s: &str) -> Result<i32, String> {
    match s.trim() {
        "2" => Ok(2),
        "4" => Ok(4),
        other => Err(format!("exponent must be 2 or 4, got `{other}`")),
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(format!("expected x0,x1,y0,y1,res, got `{s}`"));
    }
    let num = |i: usize| parts[i].parse::<f64>().map_err(|e| format!("bad grid bound `{}`: {e}", parts[i]));
    let res = parts[4]
        .parse::<usize>()
        .map_err(|e| format!("bad grid resolution `{}`: {e}", parts[4]))?;
    Ok(GridSpec { x0: num(0)?, x1: num(1)?, y0: num(2)?, y1: num(3)?, res })
}

fn run() -> Result<(), CliError> {
    let args = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                return Err(CliError::Usage(String::new()));
            }
            return Ok(());
        }
    };
    match cli.command {
        Command::Forward(a) => commands::forward(&a),
        Command::DiskVerify(a) => commands::disk_verify(&a),
        Command::Image(a) => commands::image(&a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
