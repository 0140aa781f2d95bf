//! Run configuration: a flat JSON object whose keys can be overridden on
//! the command line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Heat,
    Poisson,
    Ns,
    Bench,
    Transform,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Heat => "heat",
            Problem::Poisson => "poisson",
            Problem::Ns => "ns",
            Problem::Bench => "bench",
            Problem::Transform => "transform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    /// Homogeneous Dirichlet on the whole boundary.
    #[default]
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub reynolds: f64,
    pub h: f64,
    pub steps: usize,
    pub bdf_order: usize,
    pub adi_tol: f64,
    /// Snapshot cadence in steps; 0 keeps only the initial and final states.
    pub output_every: usize,
    pub bc: BcKind,
    pub output_path: PathBuf,
    pub seed: u64,
    /// Field file read by the `transform` problem.
    pub input: Option<PathBuf>,
    /// Sizes `s` (grid `s × s × s`, `p` rounded up to even) for the
    /// spectral and collocation bench rows.
    pub bench_sizes: Vec<usize>,
    /// Finite-difference sizes paired with `bench_sizes`.
    pub fd_sizes: Vec<usize>,
    /// Finite-difference steps over the same horizon `steps · h`.
    pub fd_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Heat,
            m: 15,
            n: 15,
            p: 16,
            alpha: 1.0,
            reynolds: 100.0,
            h: 0.01,
            steps: 200,
            bdf_order: 4,
            adi_tol: 1e-13,
            output_every: 0,
            bc: BcKind::Dirichlet,
            output_path: PathBuf::from("out"),
            seed: 0,
            input: None,
            bench_sizes: vec![7, 11, 15, 19],
            fd_sizes: vec![61, 81, 101, 121],
            fd_steps: 6,
        }
    }
}

/// Command-line overrides; each flag replaces the matching config key.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub re: Option<f64>,
    #[arg(long)]
    pub bdf: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub every: Option<usize>,
    /// Input field file for `transform`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(Error::io(path))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($field:ident <- $flag:ident),*) => {
                $(if let Some(v) = o.$flag.clone() {
                    self.$field = v;
                })*
            };
        }
        set!(m <- m, n <- n, p <- p, steps <- steps, h <- h, alpha <- alpha, reynolds <- re,
             bdf_order <- bdf, adi_tol <- tol, output_path <- out, seed <- seed, output_every <- every);
        if o.input.is_some() {
            self.input = o.input.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.problem != Problem::Transform && (self.m == 0 || self.n == 0 || self.p == 0) {
            return bad(format!("sizes must be positive (m={}, n={}, p={})", self.m, self.n, self.p));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("h must be positive, got {}", self.h));
        }
        if !(self.adi_tol > 0.0 && self.adi_tol <= 1e-2) {
            return bad(format!("adi_tol must lie in (0, 1e-2], got {}", self.adi_tol));
        }
        if !(1..=4).contains(&self.bdf_order) {
            return bad(format!("bdf_order must be 1..=4, got {}", self.bdf_order));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.reynolds > 0.0 && self.reynolds.is_finite()) {
            return bad(format!("reynolds must be positive, got {}", self.reynolds));
        }
        match self.problem {
            Problem::Ns if self.m % 2 == 1 => bad(format!("ns needs an even m, got {}", self.m)),
            Problem::Transform if self.input.is_none() => bad("transform needs an input field file".into()),
            Problem::Bench if self.bench_sizes.is_empty() || self.bench_sizes.contains(&0) => {
                bad("bench_sizes must be non-empty and positive".into())
            }
            Problem::Bench if self.fd_sizes.len() > self.bench_sizes.len() || self.fd_sizes.contains(&0) => {
                bad("fd_sizes must be positive and no longer than bench_sizes".into())
            }
            Problem::Bench if self.fd_steps == 0 => bad("fd_steps must be positive".into()),
            _ => Ok(()),
        }
    }
}
