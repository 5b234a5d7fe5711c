//! Command-line front end.

mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{format_sig, GridDocument, NodalDocument, SolveDocument, TableDocument, TableRow};

use crate::error::Error;
use crate::geometry::EllipseGeometry;
use crate::mathieu::{ModeIndex, Parity};
use crate::modes::{self, GridSpec};
use crate::qsolve::{self, ModeSpec, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count (0 = automatic).
pub const THREADS_VAR: &str = "MATHIEU_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "elliptic-drum",
    version,
    about = "Standing modes of a fixed elliptic membrane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of mode parameters q for one parity.
    Table(TableArgs),
    /// Solve and certify a single mode.
    Solve(SolveArgs),
    /// Sample a mode on a Cartesian grid.
    ModeGrid(GridArgs),
    /// Extract and count the nodal curves of a mode.
    Nodal(NodalArgs),
    /// Render a mode as a filled contour plot.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
struct GeometryArgs {
    /// Ratio of the semi-axes as MAJOR:MINOR, e.g. 5:3.
    #[arg(long, conflicts_with_all = ["c", "beta0"])]
    aspect: Option<String>,
    /// Focal half-distance (with --beta0).
    #[arg(long, requires = "beta0")]
    c: Option<f64>,
    /// Elliptic coordinate of the boundary (with --c).
    #[arg(long, requires = "c")]
    beta0: Option<f64>,
}

#[derive(Debug, Args)]
struct ModeArgs {
    #[arg(long, value_enum)]
    parity: ParityArg,
    /// Angular order.
    #[arg(long)]
    g: u32,
    /// Ordinal of the boundary among the radial zeros.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Upper end of the scan in q.
    #[arg(long)]
    q_max: Option<f64>,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value = "even")]
    parity: ParityArg,
    #[arg(long, default_value_t = 5)]
    g_max: u32,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    k_max: u32,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long)]
    q_max: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, default_value_t = 200)]
    nx: usize,
    #[arg(long, default_value_t = 200)]
    ny: usize,
    /// Sample the first quadrant only.
    #[arg(long)]
    quadrant: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct NodalArgs {
    #[command(flatten)]
    mode: ModeArgs,
    /// Samples per axis.
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Plot the first quadrant only.
    #[arg(long)]
    quadrant: bool,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
    /// The reader of standard output went away.
    Closed,
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Closed => EXIT_OK,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
            CliError::Closed => "",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidIndex(_) | Error::InvalidGeometry(_) | Error::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::Closed;
        }
        CliError::Failure(format!("i/o error: {e}"))
    }
}

type CliResult = std::result::Result<(), CliError>;

/// Parse `args` (program name first), run the command and return the exit
/// code. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let threads = match thread_count(std::env::var(THREADS_VAR).ok().as_deref()) {
        Ok(n) => n,
        Err(e) => return report(err, e),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => return report(err, CliError::Failure(format!("thread pool: {e}"))),
    };
    match pool.install(|| dispatch(cli.command, out, err)) {
        Ok(()) => EXIT_OK,
        Err(e) => report(err, e),
    }
}

fn report(err: &mut dyn Write, e: CliError) -> i32 {
    if !matches!(e, CliError::Closed) {
        let _ = writeln!(err, "error: {}", e.message());
    }
    e.code()
}

/// Worker count from the environment value; unset, empty or 0 means automatic.
fn thread_count(value: Option<&str>) -> std::result::Result<usize, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v.parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_VAR} must be a non-negative integer, got {v:?}"
            ))
        }),
    }
}

fn dispatch(
    command: Command,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CliResult {
    match command {
        Command::Table(a) => cmd_table(a, out, err),
        Command::Solve(a) => cmd_solve(a, out),
        Command::ModeGrid(a) => cmd_mode_grid(a, out),
        Command::Nodal(a) => cmd_nodal(a, out, err),
        Command::Plot(a) => cmd_plot(a, out),
    }
}

/// Parse `A:B` into an ellipse with semi-axes `A > B > 0`.
pub fn parse_aspect(text: &str) -> crate::Result<EllipseGeometry> {
    let bad = || {
        Error::InvalidGeometry(format!(
            "aspect must be MAJOR:MINOR with MAJOR > MINOR > 0, got {text:?}"
        ))
    };
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    EllipseGeometry::from_semiaxes(a, b).map_err(|_| bad())
}

fn geometry(args: &GeometryArgs) -> std::result::Result<EllipseGeometry, CliError> {
    match (&args.aspect, args.c, args.beta0) {
        (Some(aspect), _, _) => Ok(parse_aspect(aspect)?),
        (None, Some(c), Some(beta0)) => Ok(EllipseGeometry::from_focal(c, beta0)?),
        _ => Err(CliError::Usage(
            "geometry required: pass --aspect A:B or --c with --beta0".into(),
        )),
    }
}

fn solver_config(q_max: Option<f64>) -> std::result::Result<SolverConfig, CliError> {
    let mut cfg = SolverConfig::default();
    if let Some(q) = q_max {
        cfg.q_max = q;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn reject_svg(format: Format) -> CliResult {
    if format == Format::Svg {
        return Err(CliError::Usage(
            "svg output is only available from the plot command".into(),
        ));
    }
    Ok(())
}

/// Geometry, solver settings and a certified mode.
fn solve_args(args: &ModeArgs) -> std::result::Result<(EllipseGeometry, ModeSpec), CliError> {
    let geom = geometry(&args.geometry)?;
    let cfg = solver_config(args.q_max)?;
    let index = ModeIndex::new(args.parity.into(), args.g)?;
    let spec = qsolve::solve_mode(index, args.k as usize, geom.beta0(), &cfg)?;
    Ok((geom, spec))
}

fn cmd_table(args: TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    reject_svg(args.format)?;
    let geom = geometry(&args.geometry)?;
    let cfg = solver_config(args.q_max)?;
    let parity: Parity = args.parity.into();
    let g_min = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    if args.g_max < g_min {
        return Err(CliError::Usage(
            "odd tables need --g-max of at least 1".into(),
        ));
    }
    let cells = qsolve::build_table(
        parity,
        g_min..=args.g_max,
        1..=args.k_max as usize,
        geom.beta0(),
        &cfg,
    );
    let mut rows = Vec::with_capacity(cells.len());
    let mut failures = 0;
    for cell in cells {
        match cell.result {
            Ok(spec) => {
                let (lambda, _) = qsolve::frequency(&spec, &geom)?;
                rows.push(TableRow {
                    g: cell.g,
                    k: cell.k,
                    q: spec.q,
                    char_value: spec.char_value,
                    lambda,
                });
            }
            Err(e) => {
                failures += 1;
                writeln!(err, "error: g = {}, k = {}: {e}", cell.g, cell.k)?;
            }
        }
    }
    let doc = TableDocument {
        parity,
        beta0: geom.beta0(),
        c: geom.c(),
        rows,
    };
    match args.format {
        Format::Json => output::write_json(out, &doc)?,
        _ => output::write_table_csv(out, &doc)?,
    }
    if failures > 0 {
        return Err(CliError::Failure(format!(
            "{failures} table cell(s) failed"
        )));
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> CliResult {
    let (geom, spec) = solve_args(&args.mode)?;
    let (lambda, angular_rate) = qsolve::frequency(&spec, &geom)?;
    let doc = SolveDocument {
        parity: spec.index.parity(),
        g: spec.index.g(),
        k: spec.k,
        q: spec.q,
        char_value: spec.char_value,
        lambda,
        angular_rate,
        beta0: geom.beta0(),
        c: geom.c(),
        newton_iters: spec.newton_iters,
        residual: spec.residual,
    };
    output::write_json(out, &doc)?;
    Ok(())
}

fn cmd_mode_grid(args: GridArgs, out: &mut dyn Write) -> CliResult {
    reject_svg(args.format)?;
    let grid = GridSpec::new(args.nx, args.ny, args.quadrant)?;
    let (geom, spec) = solve_args(&args.mode)?;
    let field = modes::eval_grid(&spec, &geom, grid)?;
    let doc = GridDocument::from_field(&field);
    match args.format {
        Format::Json => output::write_json(out, &doc)?,
        _ => output::write_grid_csv(out, &doc)?,
    }
    Ok(())
}

fn cmd_nodal(args: NodalArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    reject_svg(args.format)?;
    let grid = GridSpec::square(args.resolution)?;
    let (geom, spec) = solve_args(&args.mode)?;
    let field = modes::eval_grid(&spec, &geom, grid)?;
    let curves = modes::extract_nodal_curves(&field);
    let counts = modes::classify_and_count(&curves, &geom);
    if counts.other > 0 {
        writeln!(
            err,
            "warning: {} nodal curve(s) could not be classified",
            counts.other
        )?;
    }
    let doc = NodalDocument {
        parity: spec.index.parity(),
        g: spec.index.g(),
        k: spec.k,
        q: spec.q,
        counts,
        curves,
    };
    match args.format {
        Format::Json => output::write_json(out, &doc)?,
        _ => output::write_nodal_csv(out, &doc)?,
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs, out: &mut dyn Write) -> CliResult {
    let grid = GridSpec::new(args.resolution, args.resolution, args.quadrant)?;
    let (geom, spec) = solve_args(&args.mode)?;
    let field = modes::eval_grid(&spec, &geom, grid)?;
    let svg = output::render_svg(&field);
    match args.out {
        Some(path) => std::fs::write(&path, svg)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(svg.as_bytes())?,
    }
    Ok(())
}
