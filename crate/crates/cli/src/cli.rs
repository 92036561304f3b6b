use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ineq_forge_core::FamilyTag;

#[derive(Parser, Debug)]
#[command(
    name = "ineq-forge",
    version,
    about = "Weight chains, spectral verification and optimality probes for improved Hardy and Poincaré inequalities",
    args_override_self = true
)]
pub struct Cli {
    /// Flat key=value file using the flag names as keys; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate W_0..W_N and the partial sum on a grid of the chain variable.
    #[command(allow_negative_numbers = true)]
    Weights(WeightsArgs),
    /// Optimal Hardy-Poincaré constant Λ_{α,d}.
    #[command(allow_negative_numbers = true)]
    Constants(ConstantsArgs),
    /// Sign of the truncated quadratic form on an annulus over a refinement schedule.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Search for a negative direction after inflating the right-hand side.
    #[command(allow_negative_numbers = true)]
    Falsify(FalsifyArgs),
    /// Residuals of the recursion identity (and compatibility conditions).
    #[command(allow_negative_numbers = true)]
    Identity(IdentityArgs),
    /// Remainder ratio of a candidate weight at one level, extrapolated to t → 0.
    #[command(allow_negative_numbers = true)]
    Probe(ProbeArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Hardy,
    HardyExterior,
    Gaussian,
    GaussianPlane,
    HpPlane,
    Hp,
    HpExterior,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Dimension.
    #[arg(long)]
    pub d: Option<u32>,
    /// Hardy parameter a = log δ + 1/δ (default 1, the unit ball), or the plane parameter a > 1.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "t-star")]
    pub t_star: Option<f64>,
}

impl FamilyArgs {
    pub fn tag(&self) -> Result<FamilyTag, String> {
        let need_d = || self.d.ok_or_else(|| format!("--family {} requires --d", self.name()));
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| format!("--family {} requires --{flag}", self.name()));
        let tag = match self.family {
            FamilyName::Hardy => FamilyTag::HardyInterior { d: need_d()?, a: self.a.unwrap_or(1.0) },
            FamilyName::HardyExterior => FamilyTag::HardyExterior { d: need_d()?, a: self.a.unwrap_or(1.0) },
            FamilyName::Gaussian => FamilyTag::GaussianHighDim { d: need_d()? },
            FamilyName::GaussianPlane => FamilyTag::GaussianPlane { a: need(self.a, "a")? },
            FamilyName::HpPlane => FamilyTag::HpPlane {
                alpha: need(self.alpha, "alpha")?,
                beta: need(self.beta, "beta")?,
                t_star: need(self.t_star, "t-star")?,
            },
            FamilyName::Hp => FamilyTag::HpLowDim { d: need_d()?, alpha: need(self.alpha, "alpha")? },
            FamilyName::HpExterior => FamilyTag::HpExterior { d: need_d()?, alpha: need(self.alpha, "alpha")? },
        };
        tag.validate().map_err(|e| e.to_string())?;
        Ok(tag)
    }

    fn name(&self) -> &'static str {
        match self.family {
            FamilyName::Hardy => "hardy",
            FamilyName::HardyExterior => "hardy-exterior",
            FamilyName::Gaussian => "gaussian",
            FamilyName::GaussianPlane => "gaussian-plane",
            FamilyName::HpPlane => "hp-plane",
            FamilyName::Hp => "hp",
            FamilyName::HpExterior => "hp-exterior",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

/// `lo:hi:count` (uniform) or `lo:hi:count:log` (geometric), endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 && !(parts.len() == 4 && parts[3] == "log") {
        return Err(format!("expected lo:hi:count or lo:hi:count:log, got `{s}`"));
    }
    let lo: f64 = parts[0].parse().map_err(|_| format!("bad lower end `{}`", parts[0]))?;
    let hi: f64 = parts[1].parse().map_err(|_| format!("bad upper end `{}`", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad count `{}`", parts[2]))?;
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(format!("grid needs finite lo <= hi, got {lo}:{hi}"));
    }
    let geometric = parts.len() == 4;
    if geometric && !(lo > 0.0) {
        return Err("geometric grid needs lo > 0".into());
    }
    let pts = (0..count)
        .map(|i| {
            let x = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            if geometric {
                (lo.ln() + x * (hi.ln() - lo.ln())).exp()
            } else {
                lo + x * (hi - lo)
            }
        })
        .collect();
    Ok(Grid(pts))
}

#[derive(Args, Debug, Clone)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Truncation order.
    #[arg(long = "N", default_value_t = 4)]
    pub n: usize,
    #[arg(long = "t-grid", value_parser = parse_grid, default_value = "0.01:0.9:50")]
    pub t_grid: Grid,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateName {
    Log,
    Linear,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long = "N", default_value_t = 1)]
    pub n: usize,
    /// Inner radius of the annulus.
    #[arg(long)]
    pub rin: f64,
    /// Outer radius of the annulus.
    #[arg(long)]
    pub rout: f64,
    /// Refinement schedule (node counts), at least three.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
    pub nodes: Vec<usize>,
    #[arg(long, value_enum, default_value = "log")]
    pub coordinate: CoordinateName,
    /// Angular index ℓ.
    #[arg(long, default_value_t = 0)]
    pub ell: u32,
    #[command(flatten)]
    pub adjust: AdjustArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AdjustArgs {
    /// Inflation ε of the level-N weight.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Coefficient of an added ∫|x|²u²dμ term (gaussian families).
    #[arg(long, default_value_t = 0.0)]
    pub quadratic: f64,
    /// Coefficient of an added ∫u²dμ term (gaussian families).
    #[arg(long, default_value_t = 0.0)]
    pub constant: f64,
}

#[derive(Args, Debug, Clone)]
pub struct FalsifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long = "N", default_value_t = 1)]
    pub n: usize,
    /// Inflation ε of the level-N weight.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub quadratic: f64,
    #[arg(long, default_value_t = 0.0)]
    pub constant: f64,
    /// Mesh nodes per schedule step.
    #[arg(long, default_value_t = 4000)]
    pub nodes: usize,
    #[arg(long, value_enum, default_value = "log")]
    pub coordinate: CoordinateName,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long = "N", default_value_t = 4)]
    pub n: usize,
    /// Defaults to 25 geometric points inside the validity interval.
    #[arg(long = "t-grid", value_parser = parse_grid)]
    pub t_grid: Option<Grid>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// Σ_{j≤level} W_j.
    PartialSum,
    /// Weight produced by the truncated extremal seed.
    Seed,
    /// Σ_{j<level} W_j + factor · W_level.
    Inflated,
}

#[derive(Args, Debug, Clone)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, value_enum, default_value = "partial-sum")]
    pub candidate: Candidate,
    #[arg(long, default_value_t = 1.5)]
    pub factor: f64,
    /// Defaults to a geometric grid toward t = 0 sized to the level.
    #[arg(long = "t-grid", value_parser = parse_grid)]
    pub t_grid: Option<Grid>,
    #[command(flatten)]
    pub out: OutputArgs,
}
