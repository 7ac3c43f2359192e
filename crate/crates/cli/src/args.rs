use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use condtele::{ComplexAmplitude, Parity, ResourceKind};
use serde::{Serialize, Serializer};

#[derive(Debug, Parser)]
#[command(name = "condtele", version, about = "Conditional-resource teleportation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Gauss–Hermite order per axis.
    #[arg(long, global = true, default_value_t = 48)]
    pub order: usize,
    /// Tail probability tolerated when truncating Fock sums.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub epsilon: f64,
    /// Hard cap on retained Fock levels.
    #[arg(long, global = true, default_value_t = 256)]
    pub hard_cap: usize,
    /// Skip the order-doubling convergence check.
    #[arg(long, global = true)]
    pub no_refine: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Coherent,
    Cat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Base {
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

/// `start:stop:step` or a comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid grid {s:?}: expected start:stop:step or a comma list");
        let values = if s.contains(':') {
            let parts: Vec<f64> = s
                .split(':')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            let [start, stop, step] = parts[..] else {
                return Err(bad());
            };
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 1_000_000 {
                return Err(format!("grid {s:?} has too many points"));
            }
            (0..=n).map(|i| start + i as f64 * step).collect()
        } else {
            s.split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad())?
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(bad());
        }
        Ok(Grid(values))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{v}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

fn parse_kind(s: &str) -> Result<ResourceKind, String> {
    s.parse().map_err(|e: condtele::Error| e.to_string())
}

fn parse_parity(s: &str) -> Result<Parity, String> {
    s.parse().map_err(|e: condtele::Error| e.to_string())
}

fn parse_amp(s: &str) -> Result<ComplexAmplitude, String> {
    s.parse().map_err(|e: condtele::Error| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    #[arg(long, value_enum, default_value_t = InputKind::Coherent)]
    pub input: InputKind,
    #[arg(long, value_parser = parse_parity, default_value = "even")]
    pub parity: Parity,
    /// Input amplitude, e.g. `1.5`, `1.5i`, `0.3-0.2i`.
    #[arg(long, value_parser = parse_amp, default_value = "1.5")]
    pub alpha: ComplexAmplitude,
    /// Comparison amplitude; defaults to α.
    #[arg(long, value_parser = parse_amp)]
    pub gamma: Option<ComplexAmplitude>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Photon-number distributions, entropies and heralding probability.
    ResourceStats {
        #[arg(long, default_value_t = 0.8)]
        lambda: f64,
        /// Tap reflectivity for the heralding probability.
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
    },
    /// Entanglement entropy against λ for all resources.
    EntropyCurve {
        #[arg(long, default_value = "0:0.95:0.01")]
        lambdas: Grid,
        #[arg(long, value_enum, default_value_t = Base::E)]
        base: Base,
    },
    /// Joint phase-sum density on [-π, π].
    PhaseDensity {
        #[arg(long, default_value_t = 0.8)]
        lambda: f64,
        #[arg(long, default_value_t = 361)]
        points: usize,
    },
    /// P(β) and F(β) at a single measurement outcome.
    CvPoint {
        #[arg(long, value_parser = parse_kind, default_value = "standard")]
        kind: ResourceKind,
        #[arg(long, default_value_t = 0.8)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        gain: f64,
        #[arg(long, value_parser = parse_amp, default_value = "0")]
        beta: ComplexAmplitude,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Average fidelity F̄.
    CvAvg {
        #[arg(long, value_parser = parse_kind, default_value = "standard")]
        kind: ResourceKind,
        #[arg(long, default_value_t = 0.8)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        gain: f64,
        #[command(flatten)]
        state: StateArgs,
    },
    /// F̄ over a (gain, γ) grid.
    GainScan {
        #[arg(long, value_parser = parse_kind, default_value = "subtracted")]
        kind: ResourceKind,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, value_parser = parse_amp, default_value = "3")]
        alpha: ComplexAmplitude,
        #[arg(long, default_value = "0.05:1:0.05")]
        gains: Grid,
        /// Real comparison amplitudes.
        #[arg(long, default_value = "0:3.5:0.05")]
        gammas: Grid,
    },
    /// Unity-gain F̄ against λ for the standard and subtracted resources.
    BoundaryScan {
        #[arg(long, value_parser = parse_amp, default_value = "3")]
        alpha: ComplexAmplitude,
        #[arg(long, default_value = "0.01:0.95:0.01")]
        lambdas: Grid,
    },
    /// Number-difference fidelity F(k) against λ for all resources.
    NdpsCurve {
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value = "0.01:0.99:0.01")]
        lambdas: Grid,
        #[command(flatten)]
        state: NdpsState,
    },
    /// Closed forms against the truncated-matrix oracle on a seeded sample.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 5)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Every headline claim, with a pass/fail report.
    ReproduceAll,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NdpsState {
    #[arg(long, value_enum, default_value_t = InputKind::Coherent)]
    pub input: InputKind,
    #[arg(long, value_parser = parse_parity, default_value = "even")]
    pub parity: Parity,
    #[arg(long, value_parser = parse_amp, default_value = "3")]
    pub alpha: ComplexAmplitude,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ResourceStats { .. } => "resource-stats",
            Command::EntropyCurve { .. } => "entropy-curve",
            Command::PhaseDensity { .. } => "phase-density",
            Command::CvPoint { .. } => "cv-point",
            Command::CvAvg { .. } => "cv-avg",
            Command::GainScan { .. } => "gain-scan",
            Command::BoundaryScan { .. } => "boundary-scan",
            Command::NdpsCurve { .. } => "ndps-curve",
            Command::OracleCheck { .. } => "oracle-check",
            Command::ReproduceAll => "reproduce-all",
        }
    }
}
