//! Batch driver: parses arguments and an optional TOML config, runs one
//! pipeline and writes CSV files plus a JSON manifest.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable overriding the output directory of the config file.
pub const OUT_DIR_ENV: &str = "NLWAVE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "nlwave", version, about = "Experiments for the nonlocal water-wave formulation")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// TOML file with top-level `seed`/`out_dir` and one table per subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (wins over the environment and the config file)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

/// Declares a flag block whose fields are all optional on the command line and
/// in the config file, and its resolved counterpart with defaults applied.
macro_rules! params {
    ($args:ident => $resolved:ident { $( $(#[$m:meta])* $field:ident : $ty:ty = $default:expr ),* $(,)? }) => {
        #[derive(Args, Deserialize, Debug, Clone, Default)]
        #[command(allow_negative_numbers = true)]
        #[serde(deny_unknown_fields)]
        pub struct $args {
            $( $(#[$m])* #[arg(long)] pub $field: Option<$ty>, )*
        }

        #[derive(Serialize, Debug, Clone)]
        pub struct $resolved {
            $( pub $field: $ty, )*
        }

        impl $args {
            fn resolve(self, file: Option<$args>) -> $resolved {
                let file = file.unwrap_or_default();
                $resolved { $( $field: self.$field.or(file.$field).unwrap_or_else(|| $default), )* }
            }
        }
    };
}

params!(DispersionArgs => Dispersion {
    h0: f64 = 1.0,
    g: f64 = 9.81,
    sigma: f64 = 0.0,
    rho: f64 = 1.0,
    /// `per-density` (σ/ρ) or `raw` (σ)
    tension: String = "per-density".into(),
    kmax: f64 = 10.0,
    n: usize = 200,
});

params!(GlobalResidualArgs => GlobalResidual {
    /// `flat`, `irrotational`, `rotational` or `all`
    kind: String = "all".into(),
    n: usize = 256,
    half_period: f64 = std::f64::consts::PI,
    h0: f64 = 1.0,
    g: f64 = 9.81,
    /// wavenumber of the harmonic flow
    k0: f64 = 1.0,
    /// surface amplitude and wavenumber
    amp: f64 = 0.05,
    wave: f64 = 2.0,
    gamma: f64 = 0.0,
    kappa_max: f64 = 50.0,
});

params!(LinearSweepArgs => LinearSweep {
    /// `relation` or `bernoulli`
    measure: String = "relation".into(),
    #[arg(value_delimiter = ',')]
    eps: Vec<f64> = vec![0.02, 0.01, 0.005, 0.0025],
    n: usize = 512,
    half_period: f64 = 40.0,
    h0: f64 = 1.0,
    g: f64 = 9.81,
    sigma: f64 = 0.05,
    rho: f64 = 1.0,
    /// the relation is measured for |k| ≤ kappa_scale/ε
    kappa_scale: f64 = 0.1,
});

params!(EvolveArgs => Evolve {
    /// order `n,m`
    order: String = "1,1".into(),
    eps: f64 = 0.1,
    delta: f64 = 0.1,
    gamma: f64 = 0.0,
    sigma_hat: f64 = 0.5,
    n: usize = 256,
    half_period: f64 = 32.0,
    dt: f64 = 0.005,
    t_end: f64 = 10.0,
    /// `gaussian` or `random` (seeded)
    init: String = "gaussian".into(),
    amp: f64 = 1.0,
    width: f64 = 2.0,
});

params!(BoussinesqArgs => Boussinesq {
    kappa: f64 = 0.0,
    sigma_hat: f64 = 0.2,
    cubic: f64 = nonlocal_waves::hierarchy::CUBIC_SOLITON,
    n: usize = 32,
    half_period: f64 = std::f64::consts::PI,
    dt: f64 = 1e-3,
    t_end: f64 = 1.0,
    /// index m of the seeded mode k = πm/L
    mode: i64 = 3,
    amp: f64 = 1e-10,
    /// wavenumber cutoff applied to ξ_TT; 0 disables
    cutoff: f64 = 4.0,
    guard: f64 = 1e100,
});

params!(SolitonProfileArgs => SolitonProfile {
    c: f64 = 0.95,
    kappa: f64 = 0.5,
    sigma_hat: f64 = 0.4,
    /// `elevated` or `depression`
    family: String = "elevated".into(),
    /// evaluate this branch sign of the root instead of the family's, without admission check
    branch: f64 = 0.0,
    n: usize = 1024,
    /// half period in units of 1/α
    box_scale: f64 = 40.0,
});

params!(SolitonAtlasArgs => SolitonAtlas {
    #[arg(value_delimiter = ',')]
    c: Vec<f64> = vec![0.95],
    #[arg(value_delimiter = ',')]
    kappa: Vec<f64> = vec![0.5],
    #[arg(value_delimiter = ',')]
    sigma_hat: Vec<f64> = vec![0.4],
    /// `start,end,count` replacing the list of c
    #[arg(value_delimiter = ',')]
    c_range: Vec<f64> = Vec::new(),
    #[arg(value_delimiter = ',')]
    kappa_range: Vec<f64> = Vec::new(),
    #[arg(value_delimiter = ',')]
    sigma_hat_range: Vec<f64> = Vec::new(),
});

params!(ManifoldArgs => Manifold {
    c: f64 = 0.95,
    kappa: f64 = 0.5,
    sigma_hat: f64 = 0.4,
    n: usize = 400,
    t_max: f64 = 3.0,
});

#[derive(Subcommand, Debug)]
enum Command {
    /// ω²(κ) of the linearized problem
    Dispersion(DispersionArgs),
    /// Global-relation residuals of a manufactured harmonic flow
    GlobalResidual(GlobalResidualArgs),
    /// Linear-limit remainders against amplitude, with the fitted slope
    LinearSweep(LinearSweepArgs),
    /// Implicit-midpoint run of a graded long-wave system
    Evolve(EvolveArgs),
    /// Plane-wave run of the long-wave equation with vorticity
    Boussinesq(BoussinesqArgs),
    /// Closed-form soliton profile with residual checks
    SolitonProfile(SolitonProfileArgs),
    /// Existence and Γ-manifold classification over parameter lists
    SolitonAtlas(SolitonAtlasArgs),
    /// Samples of the Γ manifold
    Manifold(ManifoldArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dispersion(_) => "dispersion",
            Command::GlobalResidual(_) => "global-residual",
            Command::LinearSweep(_) => "linear-sweep",
            Command::Evolve(_) => "evolve",
            Command::Boussinesq(_) => "boussinesq",
            Command::SolitonProfile(_) => "soliton-profile",
            Command::SolitonAtlas(_) => "soliton-atlas",
            Command::Manifold(_) => "manifold",
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<nonlocal_waves::Error> for Failure {
    fn from(e: nonlocal_waves::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

pub(crate) type CmdResult<T> = std::result::Result<T, Failure>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> CmdResult<T> {
    Err(Failure::Validation(msg.into()))
}

/// Files and summary produced by one subcommand.
pub(crate) struct Output {
    pub files: Vec<(String, String)>,
    pub summary: Value,
    pub message: String,
}

#[derive(Deserialize, Default)]
struct ConfigFile {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    #[serde(flatten)]
    sections: toml::Table,
}

fn section<T: for<'de> Deserialize<'de>>(cfg: &ConfigFile, name: &str) -> CmdResult<Option<T>> {
    match cfg.sections.get(name) {
        None => Ok(None),
        Some(v) => v
            .clone()
            .try_into()
            .map(Some)
            .map_err(|e| Failure::Validation(format!("config section [{name}]: {e}"))),
    }
}

fn load_config(path: Option<&Path>) -> CmdResult<ConfigFile> {
    let Some(path) = path else { return Ok(ConfigFile::default()) };
    let text = fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> CmdResult<String> {
    let cfg = load_config(cli.config.as_deref())?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("nlwave-out"));
    let name = cli.command.name();
    let (config, out) = match cli.command {
        Command::Dispersion(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::dispersion(&r)?)
        }
        Command::GlobalResidual(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::global_residual(&r)?)
        }
        Command::LinearSweep(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::linear_sweep(&r)?)
        }
        Command::Evolve(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::evolve(&r, seed)?)
        }
        Command::Boussinesq(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::boussinesq(&r)?)
        }
        Command::SolitonProfile(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::soliton_profile(&r)?)
        }
        Command::SolitonAtlas(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::soliton_atlas(&r)?)
        }
        Command::Manifold(a) => {
            let r = a.resolve(section(&cfg, name)?);
            (json!(r), commands::manifold(&r)?)
        }
    };
    fs::create_dir_all(&out_dir)?;
    let mut names = Vec::new();
    for (file, body) in &out.files {
        fs::write(out_dir.join(file), body)?;
        names.push(file.clone());
    }
    let manifest = json!({
        "command": name,
        "config": config,
        "versions": { "nlwave": env!("CARGO_PKG_VERSION"), "nonlocal-waves": nonlocal_waves::VERSION },
        "seed": seed,
        "outputs": names,
        "summary": out.summary,
    });
    let manifest_name = format!("{name}.manifest.json");
    fs::write(out_dir.join(&manifest_name), serde_json::to_string_pretty(&manifest).expect("json") + "\n")?;
    Ok(format!("{}\nwrote {} file(s) and {manifest_name} to {}", out.message, names.len(), out_dir.display()))
}

/// Runs the driver on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                | ErrorKind::UnknownArgument => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
        }
    };
    match execute(cli) {
        Ok(msg) => {
            println!("{msg}");
            EXIT_OK
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            EXIT_VALIDATION
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            EXIT_NUMERICAL
        }
    }
}
