use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mirrorpath", version, about = "Propagators, traces and Green's functions for hard-wall quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form kernel on every (x_f, x_i) pair.
    Kernel(Common),
    /// Euclidean trace Z(beta) of the diagonal kernel.
    Trace(Common),
    /// Bound-state energies from a grid eigensolve or from a trace ladder.
    Spectrum(Common),
    /// Fixed-energy Green's function on (0, pi).
    Greens(Common),
    /// Superpotential, partner potentials and the square-well limit check.
    Susy(Common),
    /// Run the cross-oracle verification suite.
    Verify(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Free,
    HalfLine,
    Isw,
    Ho,
    HalfHo,
    RosenMorse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Kernels,
    Spectra,
    Greens,
    Susy,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Grid,
    Trace,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum)]
    pub system: Option<SystemArg>,
    /// Square-well width; accepts `pi` and multiples such as `2pi`.
    #[arg(long, value_parser = parse_number)]
    pub width: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    pub omega: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    pub b: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true, conflicts_with = "euclidean")]
    pub real_tau: Option<f64>,
    #[arg(long)]
    pub euclidean: bool,
    /// Euclidean time; a comma list for `trace`.
    #[arg(long, value_parser = parse_number, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_number, value_delimiter = ',', allow_hyphen_values = true)]
    pub xf: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_number, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, value_parser = parse_number)]
    pub x_max: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Number of levels for `spectrum`.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = Method::Grid)]
    pub method: Method,
    /// Energy window `lo,hi` scanned for poles by `greens`.
    #[arg(long, value_parser = parse_number, value_delimiter = ',', allow_hyphen_values = true)]
    pub scan: Option<Vec<f64>>,
    /// Override hbar (defaults: 1).
    #[arg(long, value_parser = parse_number)]
    pub hbar: Option<f64>,
    /// Override the mass (defaults: 1/2 for isw and rosen-morse, 1 otherwise).
    #[arg(long, value_parser = parse_number)]
    pub mass: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
}

/// A float, or `pi` with an optional multiplier (`pi`, `2pi`, `0.5*pi`, `-pi`).
pub fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let value = match t.strip_suffix("pi") {
        Some(head) => {
            let head = head.trim_end_matches('*');
            let k = match head {
                "" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().map_err(|e| format!("{text}: {e}"))?,
            };
            k * std::f64::consts::PI
        }
        None => t.parse::<f64>().map_err(|e| format!("{text}: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{text}: not a finite number"))
    }
}
