use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tubal::lab::{FactorScale, PhaseKind, SUCCESS_THRESHOLD};
use tubal::solve::LinearStrategy;
use tubal::AdmmConfig;

#[derive(Parser, Debug, Clone)]
#[command(name = "tubal", version, about = "Low-tubal-rank tensor recovery experiments")]
pub struct Cli {
    #[command(flatten)]
    pub settings: Settings,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. The output directory is not recorded
/// in manifests, so a replay into another directory reproduces them.
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = AdmmConfig::default().eps)]
    pub eps: f64,
    #[arg(long, global = true, default_value_t = AdmmConfig::default().max_iter)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = AdmmConfig::default().rho)]
    pub rho: f64,
    #[arg(long, global = true, default_value_t = AdmmConfig::default().mu0)]
    pub mu0: f64,
    #[arg(long, global = true, default_value_t = AdmmConfig::default().mu_max)]
    pub mu_max: f64,
    /// Relative tolerance for reported tubal ranks [default: 1e-6 for
    /// `info`, 1e-3 for solver output].
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    /// Write per-iteration solver history.
    #[arg(long, global = true)]
    pub history: bool,
    /// Output directory.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn admm(&self, linear: LinearStrategy) -> AdmmConfig {
        AdmmConfig {
            rho: self.rho,
            mu0: self.mu0,
            mu_max: self.mu_max,
            eps: self.eps,
            max_iter: self.max_iter,
            record_history: self.history,
            linear,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// N(0, 1) factors.
    #[default]
    Unit,
    /// N(0, 1/max(n1, n2)) factors.
    InvN,
}

impl From<Scale> for FactorScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Unit => FactorScale::Unit,
            Scale::InvN => FactorScale::InvN,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linear {
    #[default]
    Auto,
    Direct,
    Woodbury,
}

impl From<Linear> for LinearStrategy {
    fn from(l: Linear) -> Self {
        match l {
            Linear::Auto => LinearStrategy::Auto,
            Linear::Direct => LinearStrategy::Direct,
            Linear::Woodbury => LinearStrategy::Woodbury,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Gaussian,
    Completion,
}

impl From<Kind> for PhaseKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Gaussian => PhaseKind::Gaussian,
            Kind::Completion => PhaseKind::Completion,
        }
    }
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Random tensor of given tubal rank, written as tensor.t3.
    Gen {
        n1: usize,
        n2: usize,
        n3: usize,
        r: usize,
        #[arg(long, value_enum, default_value_t)]
        scale: Scale,
    },
    /// Measure a tensor with a Gaussian map and recover it.
    Recover {
        tensor: PathBuf,
        /// Number of measurements.
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t)]
        linear: Linear,
    },
    /// Complete a tensor from a random subset of its entries, or from an
    /// observed tensor and a stored mask.
    Complete {
        tensor: PathBuf,
        #[arg(long, required_unless_present = "mask", conflicts_with = "mask")]
        p: Option<f64>,
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Success-rate grid over (m or p, r).
    Phase {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        n3: usize,
        /// Measurement counts (gaussian) or sampling rates (completion).
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = SUCCESS_THRESHOLD)]
        threshold: f64,
    },
    /// Reruns the rows of the Gaussian (1) or completion (2) recovery table.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// Fill in missing pixels of a binary PPM/PGM image.
    Inpaint {
        image: PathBuf,
        #[arg(long, required_unless_present = "mask", conflicts_with = "mask")]
        p: Option<f64>,
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Complete a directory of equally sized PGM frames jointly.
    Frames {
        dir: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Print a summary of a tensor file.
    Info { tensor: PathBuf },
    /// Rerun the command recorded in a manifest.
    Replay { manifest: PathBuf },
}
