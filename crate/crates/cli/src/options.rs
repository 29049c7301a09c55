//! Subcommand parameters. Each one can come from a flag, from the
//! subcommand's section of the JSON config file, or from a default, in that
//! order of precedence.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Declares a flag struct of optional fields and its resolved counterpart.
macro_rules! params {
    (
        $args:ident => $resolved:ident {
            $(
                $(#[doc = $doc:literal])*
                #[arg($($arg:tt)*)]
                $(#[serde($($ser:tt)*)])?
                $field:ident : $ty:ty = $default:expr;
            )*
        }
    ) => {
        #[derive(Args, Debug, Clone, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $args {
            $(
                $(#[doc = $doc])*
                #[arg($($arg)*)]
                $(#[serde($($ser)*)])?
                pub $field: Option<$ty>,
            )*
        }

        #[derive(Debug, Clone, Serialize)]
        pub struct $resolved {
            $(
                $(#[serde($($ser)*)])?
                pub $field: $ty,
            )*
        }

        impl $args {
            pub fn resolve(self, file: Option<Self>) -> $resolved {
                let file = file.unwrap_or_default();
                $resolved {
                    $( $field: self.$field.or(file.$field).unwrap_or_else(|| $default), )*
                }
            }
        }
    };
}

#[derive(Parser, Debug)]
#[command(name = "barcode-lab", version, about = "Barcode growth experiments on the standard map")]
pub struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: out/<subcommand>]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on grid vertices n^k.
    #[arg(long, global = true, value_name = "CELLS")]
    pub budget: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Periodic orbit census.
    Orbits(OrbitsArgs),
    /// Barcode of a grid or orbit complex.
    Barcode(BarcodeArgs),
    /// Entropy profile of grid barcodes and curve growth.
    Entropy(EntropyArgs),
    /// Sequential estimates under several schedules.
    Sequential(SequentialArgs),
    /// Crofton integral and the length lower bound.
    Crofton(CroftonArgs),
    /// Orbit census and spectral-norm proxy per period.
    Gamma(GammaArgs),
    /// Entropy report on a synthetic barcode law.
    Synthetic(SyntheticArgs),
    /// Collects the manifests under a directory.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Orbits(_) => "orbits",
            Command::Barcode(_) => "barcode",
            Command::Entropy(_) => "entropy",
            Command::Sequential(_) => "sequential",
            Command::Crofton(_) => "crofton",
            Command::Gamma(_) => "gamma",
            Command::Synthetic(_) => "synthetic",
            Command::Report(_) => "report",
        }
    }
}

/// Top level of the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budget: Option<usize>,
    pub orbits: Option<OrbitsArgs>,
    pub barcode: Option<BarcodeArgs>,
    pub entropy: Option<EntropyArgs>,
    pub sequential: Option<SequentialArgs>,
    pub crofton: Option<CroftonArgs>,
    pub gamma: Option<GammaArgs>,
    pub synthetic: Option<SyntheticArgs>,
    pub report: Option<ReportArgs>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

params!(OrbitsArgs => Orbits {
    /// Kick strength.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    kick: f64 = 2.0;
    /// Period.
    #[arg(long)]
    k: usize = 1;
    /// Rotation classes.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m: Vec<i64> = vec![0];
    /// torus or cylinder
    #[arg(long)]
    phase_space: String = "torus".into();
    /// Random Newton seeds per class on top of the symbolic ones.
    #[arg(long)]
    random_seeds: usize = 0;
});

params!(BarcodeArgs => BarcodeParams {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    kick: f64 = 8.0;
    #[arg(long)]
    k: usize = 2;
    #[arg(long, allow_hyphen_values = true)]
    m: i64 = 0;
    /// Grid points per axis [default: largest within the budget]
    #[arg(long)]
    n: usize = 0;
    /// grid or orbit
    #[arg(long)]
    source: String = "grid".into();
});

params!(EntropyArgs => EntropyParams {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    kick: f64 = 8.0;
    #[arg(long)]
    kmin: u32 = 1;
    #[arg(long)]
    kmax: u32 = 4;
    #[arg(long, allow_hyphen_values = true)]
    m: i64 = 0;
    /// Strictly decreasing thresholds.
    #[arg(long, value_delimiter = ',')]
    eps_grid: Vec<f64> = vec![0.2, 0.1, 0.05];
});

params!(SequentialArgs => SequentialParams {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    kick: f64 = 8.0;
    #[arg(long)]
    kmin: u32 = 2;
    #[arg(long)]
    kmax: u32 = 6;
    #[arg(long, allow_hyphen_values = true)]
    m: i64 = 0;
    #[arg(long)]
    eps0: f64 = 0.05;
    /// constant, harmonic (ε₀/k), sqrt (ε₀/√k) or exp:<eta> (ε₀·2^(−ηk))
    #[arg(long, value_delimiter = ',')]
    schedules: Vec<String> = vec!["constant".into(), "harmonic".into(), "sqrt".into()];
    /// Allowed spread between schedule estimates, bits per iteration.
    #[arg(long)]
    agreement_tolerance: f64 = 0.15;
    /// Allowed excess over the curve-growth rate, bits per iteration.
    #[arg(long)]
    htop_margin: f64 = 0.3;
});

params!(CroftonArgs => CroftonParams {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    kick: f64 = 2.0;
    /// Largest iterate.
    #[arg(long)]
    k: usize = 8;
    #[arg(long)]
    quadrature_n: usize = 1000;
    /// Vertices of the initial circle y = 0.
    #[arg(long)]
    base_vertices: usize = 256;
    /// Schedule ε_k = eps0·k^(−power) for the vol-b chain.
    #[arg(long)]
    eps0: f64 = 0.1;
    #[arg(long)]
    power: f64 = 1.0;
});

params!(GammaArgs => GammaParams {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    kick: f64 = 8.0;
    #[arg(long)]
    kmin: usize = 1;
    #[arg(long)]
    kmax: usize = 6;
    #[arg(long, allow_hyphen_values = true)]
    m: i64 = 0;
    /// Required min of the proxy series as a fraction of its first value.
    #[arg(long)]
    threshold: f64 = 0.5;
});

params!(SyntheticArgs => SyntheticParams {
    /// exponential_growth, superexp, almost_periodic or pseudo_rotation
    #[arg(long)]
    law: String = "exponential_growth".into();
    /// Growth rate of exponential_growth.
    #[arg(long)]
    c: f64 = 0.5;
    /// Number of infinite bars minus one for pseudo_rotation.
    #[arg(long)]
    n: u32 = 2;
    /// Template period of almost_periodic.
    #[arg(long)]
    period: u32 = 5;
    /// Perturbation scale of almost_periodic.
    #[arg(long)]
    law_eps: f64 = 0.1;
    #[arg(long)]
    kmin: u32 = 1;
    #[arg(long)]
    kmax: u32 = 10;
    #[arg(long, value_delimiter = ',')]
    eps_grid: Vec<f64> = vec![0.5, 0.25, 0.125];
    #[arg(long)]
    eps0: f64 = 0.5;
    #[arg(long, value_delimiter = ',')]
    schedules: Vec<String> = vec!["constant".into(), "harmonic".into()];
});

params!(ReportArgs => ReportParams {
    /// Directory searched for run manifests.
    #[arg(long)]
    from: PathBuf = PathBuf::from("out");
});
