use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "duffjoint", version, about = "Response of a tension-tuned compliant joint")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Joint configuration (TOML with unit-suffixed keys); the reference joint if omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving the CSV/JSON outputs and their manifests.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Exact,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    /// Values are multiples of the critical tension.
    Fstar,
    /// Values are in newtons.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let rows: usize = a.trim().parse().map_err(|_| format!("bad row count `{a}`"))?;
    let cols: usize = b.trim().parse().map_err(|_| format!("bad column count `{b}`"))?;
    if rows == 0 || cols == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok(Grid { rows, cols })
}

fn parse_order(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n @ (1 | 3 | 5 | 7)) => Ok(n),
        _ => Err(format!("max order must be one of 1, 3, 5, 7; got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct TensionList {
    /// Comma-separated tensions.
    #[arg(long, value_delimiter = ',')]
    pub tensions: Option<Vec<f64>>,
    /// Unit of `--tensions`.
    #[arg(long, value_enum, default_value = "newton")]
    pub relative_to: Reference,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and cubic torque against angle for a family of tensions.
    TorqueCurve {
        #[command(flatten)]
        tensions: TensionList,
        /// Angle samples on [-max, max].
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Largest angle (rad).
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        max_angle: f64,
    },
    /// Fitted odd-power coefficients, F* and F0.
    Taylor {
        #[command(flatten)]
        tensions: TensionList,
        /// Fit half-width (rad).
        #[arg(long, default_value_t = duffjoint::joint::DEFAULT_FIT_HALF_WIDTH)]
        theta_ref: f64,
        /// Window of the linearity objective for F0 (rad).
        #[arg(long, default_value_t = duffjoint::joint::DEFAULT_LINEARITY_WINDOW)]
        window: f64,
    },
    /// Cubic-model torque error over (F, theta) and the validity angle per tension.
    ErrorMap {
        /// Tension points x angle points.
        #[arg(long, value_parser = parse_grid, default_value = "200x157")]
        grid: Grid,
        /// Force resolution defining the reference torque error (N).
        #[arg(long, default_value_t = 0.05)]
        delta_f: f64,
    },
    /// Harmonic-balance amplitude over the (F, Omega) plane.
    HbSurface {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Tension of maximal amplitude at each frequency.
    MaximaLine {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Volterra output spectrum for one operating point.
    VolterraResponse {
        #[arg(long)]
        tension_n: f64,
        #[arg(long)]
        freq_hz: f64,
        #[arg(long, value_parser = parse_order, default_value = "7")]
        max_order: usize,
    },
    /// Time-domain simulation of one operating point.
    Simulate {
        #[arg(long)]
        tension_n: f64,
        #[arg(long)]
        freq_hz: f64,
        #[arg(long, value_enum, default_value = "exact")]
        model: Model,
        /// Integrator tolerance (absolute and relative).
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Harmonic balance, Volterra and simulation along a tension cut.
    Compare {
        #[arg(long)]
        freq_hz: f64,
        /// Tensions of the cut; 25 points on [0.5, 1.5] F* if omitted.
        #[command(flatten)]
        tensions: TensionList,
        #[arg(long, value_enum, default_value = "exact")]
        model: Model,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Sinusoidal forcing from the `[wake]` block of the configuration.
    WakeForcing {
        /// Also solve harmonic balance at this tension.
        #[arg(long)]
        tension_n: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Tension points x frequency points.
    #[arg(long, value_parser = parse_grid, default_value = "200x200")]
    pub grid: Grid,
    /// Upper tension bound as a multiple of F*.
    #[arg(long, default_value_t = 1.5)]
    pub max_tension_fstar: f64,
    /// Upper frequency bound (Hz).
    #[arg(long, default_value_t = 3.0)]
    pub max_freq_hz: f64,
    /// Force the cubic coefficient to zero.
    #[arg(long)]
    pub linear_surrogate: bool,
}
