//! Experiment drivers. Each returns a [`Verdict`] along with the time
//! series and field dumps that make up its artifact.
//!
//! Runs that use weights growing in `x` put an absorbing layer at the left
//! edge of the box (see [`Sponge`]); the others study the periodic problem
//! directly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use log::info;
use serde::{Deserialize, Serialize};

use crate::dynamics::{picard_iterate, rhs_linear, solve, solve_observed, SolverConfig, Sponge, Trajectory};
use crate::initial::InitialData;
use crate::io::Series;
use crate::norms::{indices_up_to, spectral_sq, x_norm, zt_components};
use crate::spectral::{deriv, weighted_integral, Field, Grid, Order};
use crate::identities::{
    integrated_relative_residual, integrated_signed_residual, main_equality_terms, three_level_order, TermBreakdown,
};
use crate::weights::{build_weight, gain_weights, persistence_weight_family, validate_weight, WeightFn, WeightSpec};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Uniqueness,
    BlowupBound,
    Picard,
    Persistence,
    Gain,
    /// Energy-identity residuals on a soliton run.
    Identities,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Uniqueness,
        Experiment::BlowupBound,
        Experiment::Picard,
        Experiment::Persistence,
        Experiment::Gain,
        Experiment::Identities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Uniqueness => "uniqueness",
            Experiment::BlowupBound => "blowup_bound",
            Experiment::Picard => "picard",
            Experiment::Persistence => "persistence",
            Experiment::Gain => "gain",
            Experiment::Identities => "identities",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nx: 64, ny: 64, lx: 8.0, ly: 8.0 }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny, self.lx, self.ly)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniquenessOptions {
    /// Amplitude factor of the second datum.
    pub scale: f64,
    pub order_min: f64,
    /// Accepted band for `C(scale φ) / C(φ)` is `scale / f .. scale * f`.
    pub linearity_factor: f64,
}

impl Default for UniquenessOptions {
    fn default() -> Self {
        UniquenessOptions { scale: 2.0, order_min: 3.5, linearity_factor: 1.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardOptions {
    pub n_iters: usize,
    /// Peak amplitudes of the rescaled datum used for the critical-time
    /// search.
    pub amplitudes: Vec<f64>,
    /// Largest horizon tried; halved until the iteration contracts.
    pub t_max: f64,
    pub max_halvings: u32,
    pub ratio_max: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { n_iters: 6, amplitudes: vec![1e-3, 1e-2, 1e-1], t_max: 8.0, max_halvings: 8, ratio_max: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PersistenceOptions {
    pub k_max: u32,
    pub c_margin: f64,
}

impl Default for PersistenceOptions {
    fn default() -> Self {
        PersistenceOptions { k_max: 3, c_margin: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainOptions {
    pub alpha: [u32; 2],
    pub t_min_fraction: f64,
    pub growth_min: f64,
    pub change_max: f64,
    /// Smooth datum run first at every resolution.
    pub control: InitialData,
}

impl Default for GainOptions {
    fn default() -> Self {
        GainOptions {
            alpha: [3, 0],
            t_min_fraction: 0.1,
            growth_min: 4.0,
            change_max: 0.25,
            control: InitialData::Gaussian { amplitude: 0.1, x_width: 1.5, y_width: 2.0, x0: 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentityOptions {
    pub alphas: Vec<[u32; 2]>,
    /// `(i, k)` of the weights, all at rate `sigma`.
    pub weights: Vec<[u32; 2]>,
    /// Snapshot strides, coarsest first; the last one sets the reported
    /// residual.
    pub strides: Vec<usize>,
    pub residual_max: f64,
    pub order_min: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions {
            alphas: vec![[1, 0], [2, 0], [1, 1]],
            weights: vec![[1, 0], [2, 0]],
            strides: vec![4, 2, 1],
            residual_max: 1e-3,
            order_min: 2.0,
        }
    }
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub name: Experiment,
    pub grid: GridSpec,
    pub initial: InitialData,
    pub solver: SolverConfig,
    /// Regularity index.
    #[serde(rename = "L")]
    pub l: u32,
    /// Exponential rate of the weights on the left.
    pub sigma: f64,
    /// Interior fraction of the box where weights are untapered.
    pub window: f64,
    pub seeds: Vec<u64>,
    pub resolutions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<UniquenessOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard: Option<PicardOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persistence: Option<PersistenceOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<GainOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentityOptions>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::defaults(Experiment::Uniqueness)
    }
}

fn gaussian(amplitude: f64) -> InitialData {
    InitialData::Gaussian { amplitude, x_width: 1.0, y_width: 1.0, x0: 0.0 }
}

impl ExperimentConfig {
    pub fn defaults(name: Experiment) -> Self {
        let base = ExperimentConfig {
            name,
            grid: GridSpec::default(),
            initial: gaussian(1.0),
            solver: SolverConfig::default(),
            l: 2,
            sigma: 1.0,
            window: 0.5,
            seeds: vec![1],
            resolutions: Vec::new(),
            uniqueness: None,
            picard: None,
            persistence: None,
            gain: None,
            identities: None,
        };
        let sponge = Some(Sponge { width: 0.4, strength: 1000.0 });
        match name {
            Experiment::Uniqueness => ExperimentConfig {
                grid: GridSpec { nx: 512, ny: 16, lx: 40.0, ly: 4.0 },
                initial: InitialData::LineSoliton { c: 1.0, x0: -1.0 },
                solver: SolverConfig { dt: 4e-3, t_final: 1.0, record_every: 5, decay_tol: 1e-3, ..Default::default() },
                uniqueness: Some(UniquenessOptions::default()),
                ..base
            },
            Experiment::BlowupBound => ExperimentConfig {
                grid: GridSpec { nx: 128, ny: 128, lx: 16.0, ly: 16.0 },
                solver: SolverConfig { dt: 5e-3, t_final: 1.0, record_every: 4, decay_tol: 1.0, ..Default::default() },
                ..base
            },
            Experiment::Picard => ExperimentConfig {
                initial: gaussian(1e-3),
                solver: SolverConfig { dt: 1e-2, t_final: 0.5, record_every: 1, decay_tol: 1.0, ..Default::default() },
                picard: Some(PicardOptions::default()),
                ..base
            },
            Experiment::Persistence => ExperimentConfig {
                grid: GridSpec { nx: 256, ny: 64, lx: 20.0, ly: 20.0 },
                solver: SolverConfig {
                    dt: 5e-4,
                    t_final: 1.0,
                    record_every: 10,
                    decay_tol: 0.25,
                    sponge,
                    ..Default::default()
                },
                window: 0.6,
                persistence: Some(PersistenceOptions::default()),
                ..base
            },
            Experiment::Gain => ExperimentConfig {
                grid: GridSpec { nx: 512, ny: 32, lx: 20.0, ly: 10.0 },
                initial: InitialData::Rough {
                    slope: 2.5,
                    seed: 1,
                    amplitude: 0.1,
                    envelope_x: 2.0,
                    envelope_y: 2.0,
                    x0: 0.0,
                },
                solver: SolverConfig {
                    dt: 5e-4,
                    t_final: 1.0,
                    record_every: 1,
                    decay_tol: 0.25,
                    sponge,
                    ..Default::default()
                },
                resolutions: vec![128, 256, 512],
                gain: Some(GainOptions::default()),
                ..base
            },
            Experiment::Identities => ExperimentConfig {
                grid: GridSpec { nx: 2048, ny: 32, lx: 40.0, ly: 8.0 },
                initial: InitialData::Sum {
                    parts: vec![
                        InitialData::LineSoliton { c: 1.0, x0: -1.0 },
                        InitialData::Gaussian { amplitude: 1e-2, x_width: 2.0, y_width: 2.0, x0: -1.0 },
                    ],
                },
                solver: SolverConfig { dt: 1e-3, t_final: 0.5, record_every: 10, decay_tol: 1.0, ..Default::default() },
                identities: Some(IdentityOptions::default()),
                ..base
            },
        }
    }

    /// Replaces the seed list, and the seed of random initial data.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds = vec![seed];
        self.initial = self.initial.with_seed(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.l < 2 {
            return bad(format!("L ≥ 2 required (got L = {})", self.l));
        }
        self.grid.build()?;
        self.initial.validate()?;
        self.solver.validate()?;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} must be positive", self.sigma));
        }
        if !(self.window > 0.0 && self.window < 1.0) {
            return bad(format!("window = {} must lie in (0, 1)", self.window));
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        let foreign = [
            ("uniqueness", self.uniqueness.is_some(), Experiment::Uniqueness),
            ("picard", self.picard.is_some(), Experiment::Picard),
            ("persistence", self.persistence.is_some(), Experiment::Persistence),
            ("gain", self.gain.is_some(), Experiment::Gain),
            ("identities", self.identities.is_some(), Experiment::Identities),
        ];
        for (section, present, owner) in foreign {
            if present && owner != self.name {
                return bad(format!("section [{section}] does not apply to experiment `{}`", self.name));
            }
        }
        match self.name {
            Experiment::Uniqueness => {
                let o = self.uniqueness.as_ref().expect("resolved");
                if !(o.scale > 1.0 && o.linearity_factor >= 1.0) {
                    return bad("uniqueness.scale must exceed 1 and linearity_factor must be at least 1".into());
                }
            }
            Experiment::Picard => {
                let o = self.picard.as_ref().expect("resolved");
                if o.n_iters < 4 {
                    return bad(format!("picard.n_iters = {} must be at least 4", o.n_iters));
                }
                if o.amplitudes.is_empty() || o.amplitudes.iter().any(|a| !(*a > 0.0)) {
                    return bad("picard.amplitudes must be a non-empty list of positive values".into());
                }
                if o.t_max / 2f64.powi(o.max_halvings as i32) < self.solver.dt {
                    return bad("picard.t_max / 2^max_halvings must be at least solver.dt".into());
                }
            }
            Experiment::Persistence => {
                let o = self.persistence.as_ref().expect("resolved");
                if !(1..=4).contains(&o.k_max) {
                    return bad(format!("persistence.k_max = {} must lie in 1..=4", o.k_max));
                }
            }
            Experiment::Gain => {
                let o = self.gain.as_ref().expect("resolved");
                let r = &self.resolutions;
                if r.len() < 3 || r.windows(2).any(|w| w[1] != 2 * w[0]) {
                    return bad("gain needs at least three resolutions, each double the previous".into());
                }
                if r.last() != Some(&self.grid.nx) {
                    return bad(format!("grid.nx = {} must equal the finest resolution", self.grid.nx));
                }
                if !(o.t_min_fraction > 0.0 && o.t_min_fraction < 1.0) {
                    return bad("gain.t_min_fraction must lie in (0, 1)".into());
                }
                o.control.validate()?;
            }
            Experiment::Identities => {
                let o = self.identities.as_ref().expect("resolved");
                if o.alphas.is_empty() || o.weights.is_empty() {
                    return bad("identities.alphas and identities.weights must not be empty".into());
                }
                if o.alphas.iter().any(|a| a[0] + a[1] == 0) {
                    return bad("identities.alphas must have positive order".into());
                }
                if o.strides.len() < 3 || o.strides.windows(2).any(|w| w[0] != 2 * w[1]) {
                    return bad("identities.strides needs at least three entries, each half the previous".into());
                }
            }
            Experiment::BlowupBound => {}
        }
        Ok(())
    }
}

/// Acceptance bound for one measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Between(f64, f64),
    Finite,
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Between(a, b) => a <= v && v <= b,
            Bound::Finite => v.is_finite(),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
            Bound::Between(a, b) => write!(f, "in [{a:e}, {b:e}]"),
            Bound::Finite => f.write_str("finite"),
        }
    }
}

/// JSON has no NaN or infinity; they are stored as `null`.
mod lossy_floats {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, Option<f64>> = m.iter().map(|(k, v)| (k, v.is_finite().then_some(*v))).collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let m = BTreeMap::<String, Option<f64>>::deserialize(d)?;
        Ok(m.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::NAN))).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    #[serde(with = "lossy_floats")]
    pub measured: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, Bound>,
    /// Reported quantities without a threshold.
    #[serde(with = "lossy_floats")]
    pub notes: BTreeMap<String, f64>,
    pub artifact_path: Option<PathBuf>,
}

impl Default for Verdict {
    fn default() -> Self {
        Verdict::new()
    }
}

impl Verdict {
    pub fn new() -> Self {
        Verdict {
            passed: true,
            measured: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            notes: BTreeMap::new(),
            artifact_path: None,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64, bound: Bound) -> &mut Self {
        let name = name.into();
        self.passed &= bound.holds(value);
        self.measured.insert(name.clone(), value);
        self.thresholds.insert(name, bound);
        self
    }

    pub fn note(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.notes.insert(name.into(), value);
        self
    }

    /// Names of the measured values outside their bounds.
    pub fn failures(&self) -> Vec<&str> {
        self.thresholds
            .iter()
            .filter(|(k, b)| !b.holds(self.measured[*k]))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Recomputes `passed` from the measurements.
    pub fn is_consistent(&self) -> bool {
        self.passed == self.failures().is_empty() && self.measured.keys().eq(self.thresholds.keys())
    }

    /// One line per measured value and note.
    pub fn table(&self) -> String {
        let mut out = format!("verdict: {}\n", if self.passed { "PASS" } else { "FAIL" });
        for (k, b) in &self.thresholds {
            let v = self.measured[k];
            let mark = if b.holds(v) { "ok  " } else { "FAIL" };
            out += &format!("  {mark} {k:<32} {v:>14.6e}  {b}\n");
        }
        for (k, v) in &self.notes {
            out += &format!("  note {k:<32} {v:>14.6e}\n");
        }
        out
    }
}

/// Verdict, diagnostics and field dumps of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub series: Series,
    pub fields: Vec<Field>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    info!("running {} on {} threads", cfg.name, par::current_threads());
    match cfg.name {
        Experiment::Uniqueness => run_uniqueness(cfg),
        Experiment::BlowupBound => run_blowup_bound(cfg),
        Experiment::Picard => run_picard(cfg),
        Experiment::Persistence => run_persistence(cfg),
        Experiment::Gain => run_gain(cfg),
        Experiment::Identities => run_identities(cfg),
    }
}

fn realize(cfg: &ExperimentConfig, grid: &Grid) -> Result<Field> {
    cfg.initial.with_seed(cfg.seeds[0]).realize(grid)
}

/// Slope of the least-squares line through `(t, y)`.
pub fn ls_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let den: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    num / den
}

/// Gronwall envelope `W(t) <= W(t₁) exp(C (t - t₁))` fitted to a
/// squared distance `W` sampled at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallFit {
    /// First sample with `W > 0`; `None` if the runs never separate.
    pub first: Option<usize>,
    /// Least-squares slope of `ln W` over the second half of the run.
    pub c: f64,
    /// `max_k [ln W_k - ln W(t₁) - C (t_k - t₁)]` over `t_k >= t₁`.
    pub excess: f64,
}

impl GronwallFit {
    pub fn new(t: &[f64], w: &[f64]) -> Self {
        let Some(k1) = w.iter().position(|v| *v > 0.0) else {
            return GronwallFit { first: None, c: 0.0, excess: 0.0 };
        };
        let half = 0.5 * t[t.len() - 1];
        let (tt, lw): (Vec<f64>, Vec<f64>) = (k1..t.len())
            .filter(|&k| t[k] >= half && w[k] > 0.0)
            .map(|k| (t[k], w[k].ln()))
            .unzip();
        let c = if tt.len() >= 2 { ls_slope(&tt, &lw) } else { f64::NAN };
        let excess = (k1..t.len())
            .map(|k| {
                if w[k] > 0.0 {
                    (w[k] / w[k1]).ln() - c * (t[k] - t[k1])
                } else {
                    f64::NEG_INFINITY
                }
            })
            .fold(f64::NEG_INFINITY, f64::max);
        GronwallFit { first: Some(k1), c, excess }
    }

    pub fn envelope(&self, t: &[f64], w: &[f64], k: usize) -> f64 {
        match self.first {
            Some(k1) if k >= k1 => w[k1] * (self.c * (t[k] - t[k1])).exp(),
            _ => 0.0,
        }
    }
}

fn twin_runs(phi: &Field, solver: &SolverConfig, levels: usize) -> Result<Vec<Trajectory>> {
    par::map_range(levels, |k| {
        let f = 1usize << k;
        let cfg = SolverConfig { dt: solver.dt / f as f64, record_every: solver.record_every * f, ..solver.clone() };
        solve(phi, &cfg)
    })
    .into_iter()
    .collect()
}

fn distances(a: &Trajectory, b: &Trajectory) -> Result<Vec<f64>> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::InvalidArgument("twin runs recorded different snapshot counts".into()));
    }
    a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(u, v)| {
            if (u.time() - v.time()).abs() > 1e-9 * (1.0 + u.time().abs()) {
                return Err(Error::InvalidArgument("twin snapshots are not simultaneous".into()));
            }
            Ok(u.sub(v)?.l2_sq())
        })
        .collect()
}

fn x0_norm(u: &Field) -> Result<f64> {
    Ok(x_norm(u, 0)?.value)
}

/// Twin runs at `dt`, `dt/2` (and `dt/4` for the order estimate) from `φ`
/// and from `scale φ`.
pub fn run_uniqueness(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = cfg.uniqueness.clone().unwrap_or_default();
    let grid = cfg.grid.build()?;
    let phi = realize(cfg, &grid)?;
    let base = twin_runs(&phi, &cfg.solver, 3)?;
    let scaled = twin_runs(&phi.scale(opts.scale), &cfg.solver, 2)?;
    let t = base[0].times();
    let w = distances(&base[0], &base[1])?;
    let w_fine = distances(&base[1], &base[2])?;
    let w_scaled = distances(&scaled[0], &scaled[1])?;
    let fit = GronwallFit::new(&t, &w);
    let fit_scaled = GronwallFit::new(&t, &w_scaled);

    let mut v = Verdict::new();
    let mut series = Series::new(["w_sq", "w_sq_fine", "w_sq_scaled", "envelope", "envelope_scaled", "x0_u", "x0_v"]);
    let mut x0_sum: f64 = 0.0;
    let mut x0_sum_scaled: f64 = 0.0;
    for k in 0..t.len() {
        let (xu, xv) = (x0_norm(&base[0].snapshots[k])?, x0_norm(&base[1].snapshots[k])?);
        x0_sum = x0_sum.max(xu + xv);
        x0_sum_scaled = x0_sum_scaled
            .max(x0_norm(&scaled[0].snapshots[k])? + x0_norm(&scaled[1].snapshots[k])?);
        series.push(
            t[k],
            &[
                w[k],
                w_fine[k],
                w_scaled[k],
                fit.envelope(&t, &w, k),
                fit_scaled.envelope(&t, &w_scaled, k),
                xu,
                xv,
            ],
        )?;
    }
    if fit.first.is_none() {
        v.note("trivial", 1.0);
    } else {
        v.check("envelope_excess", fit.excess, Bound::AtMost(0.0));
        v.check("envelope_excess_scaled", fit_scaled.excess, Bound::AtMost(0.0));
        let (wa, wb) = (w[w.len() - 1], w_fine[w_fine.len() - 1]);
        v.check("order", 0.5 * (wa / wb).log2(), Bound::AtLeast(opts.order_min));
        v.check(
            "c_ratio",
            fit_scaled.c / fit.c,
            Bound::Between(opts.scale / opts.linearity_factor, opts.scale * opts.linearity_factor),
        );
        v.note("c_fit", fit.c)
            .note("c_fit_scaled", fit_scaled.c)
            .note("c_over_x0", fit.c / x0_sum)
            .note("c_over_x0_scaled", fit_scaled.c / x0_sum_scaled)
            .note("x0_ratio", x0_sum_scaled / x0_sum)
            .note("t1", t[fit.first.unwrap_or(0)])
            .note("w_sq_final", w[w.len() - 1]);
    }
    Ok(Outcome { verdict: v, series, fields: vec![phi, base[0].last().clone()] })
}

/// `h = ‖u‖²_{X⁰}` on one run, checked against
/// `h(t)^(-1/2) >= h(0)^(-1/2) - c t / 2` with `c` the largest secant
/// estimate of `h'/h^(3/2)`.
pub fn run_blowup_bound(cfg: &ExperimentConfig) -> Result<Outcome> {
    let grid = cfg.grid.build()?;
    let phi = realize(cfg, &grid)?;
    let traj = solve(&phi, &cfg.solver)?;
    let t = traj.times();
    let h = par::map_range(traj.snapshots.len(), |k| {
        x_norm(&traj.snapshots[k], 0).map(|r| r.components.iter().map(|c| c.value).sum::<f64>())
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let mut v = Verdict::new();
    let mut series = Series::new(["h", "h_inv_sqrt", "bound"]);
    if h[0] == 0.0 {
        v.note("trivial", 1.0);
        for k in 0..t.len() {
            series.push(t[k], &[h[k], f64::INFINITY, f64::INFINITY])?;
        }
        return Ok(Outcome { verdict: v, series, fields: vec![phi, traj.last().clone()] });
    }
    let r: Vec<f64> = h.iter().map(|x| 1.0 / x.sqrt()).collect();
    let c = (0..t.len() - 1)
        .map(|k| 2.0 * (r[k] - r[k + 1]) / (t[k + 1] - t[k]))
        .fold(f64::NEG_INFINITY, f64::max);
    // pointwise centered estimate, for comparison
    let c_pointwise = (1..t.len() - 1)
        .map(|k| (h[k + 1] - h[k - 1]) / (t[k + 1] - t[k - 1]) / h[k].powf(1.5))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut slack = f64::INFINITY;
    for k in 0..t.len() {
        let bound = r[0] - 0.5 * c * t[k];
        slack = slack.min((r[k] - bound) / r[0]);
        series.push(t[k], &[h[k], r[k], bound])?;
    }
    v.check("c_fit", c, Bound::Finite)
        .check("bound_slack_min", slack, Bound::AtLeast(-1e-12))
        .note("c_pointwise", c_pointwise)
        .note("h0", h[0])
        .note("h_max", h.iter().cloned().fold(0.0, f64::max));
    Ok(Outcome { verdict: v, series, fields: vec![phi, traj.last().clone()] })
}

/// Per-iterate errors of one Picard sequence.
#[derive(Debug, Clone)]
pub struct PicardCell {
    pub t_final: f64,
    /// `sup_t ‖u⁽ⁿ⁾ - u*‖₂` for `n = 0 .. n_iters`, `u⁽⁰⁾ = φ`.
    pub errors: Vec<f64>,
    /// `e_{n+1} / e_n` over the iterates whose error is above round-off.
    pub ratios: Vec<f64>,
    pub contracting: bool,
    pub times: Vec<f64>,
    /// `‖u⁽ⁿ⁾(t) - u*(t)‖₂` per iterate and snapshot.
    pub error_series: Vec<Vec<f64>>,
    pub iterates: Vec<Trajectory>,
    pub star: Trajectory,
}

/// Errors below this fraction of `sup_t ‖u*‖₂` are round-off.
const PICARD_FLOOR: f64 = 1e-13;

pub fn picard_cell(phi: &Field, solver: &SolverConfig, n_iters: usize, ratio_max: f64) -> Result<PicardCell> {
    let cfg = SolverConfig { record_every: 1, ..solver.clone() };
    let star = solve(phi, &cfg)?;
    let iterates = picard_iterate(phi, n_iters, &cfg)?;
    let times = star.times();
    let mut error_series = vec![star.snapshots.iter().map(|u| u.sub(&phi.clone().with_time(u.time())).map(|d| d.l2_sq().sqrt())).collect::<Result<Vec<_>>>()?];
    for it in &iterates {
        error_series.push(
            it.snapshots
                .iter()
                .zip(&star.snapshots)
                .map(|(a, b)| a.sub(b).map(|d| d.l2_sq().sqrt()))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let errors: Vec<f64> = error_series.iter().map(|e| e.iter().cloned().fold(0.0, f64::max)).collect();
    let floor = PICARD_FLOOR * star.l2_sq.iter().cloned().fold(0.0, f64::max).sqrt();
    let ratios: Vec<f64> = errors.windows(2).take_while(|e| e[0] > floor).map(|e| e[1] / e[0]).collect();
    let contracting = ratios.iter().all(|r| *r <= ratio_max);
    Ok(PicardCell { t_final: solver.t_final, errors, ratios, contracting, times, error_series, iterates, star })
}

/// Largest `T = t_max / 2^j` at which the iteration contracts; 0 if none.
pub fn critical_time(phi: &Field, solver: &SolverConfig, opts: &PicardOptions) -> Result<f64> {
    let mut t = opts.t_max;
    for _ in 0..=opts.max_halvings {
        let cfg = SolverConfig { t_final: t, dt: solver.dt.min(t), ..solver.clone() };
        if picard_cell(phi, &cfg, opts.n_iters, opts.ratio_max)?.contracting {
            return Ok(t);
        }
        t *= 0.5;
    }
    Ok(0.0)
}

/// Smallest `c` with `‖v‖²_{Z_t} <= data + c t ‖w‖_{Z_t} ‖v‖²_{Z_t}` over
/// the snapshots, for each iterate `v = u⁽ⁿ⁾` advected by `w = u⁽ⁿ⁻¹⁾`,
/// with `N = 0`.
pub fn lemma_constants(phi: &Field, cell: &PicardCell) -> Result<Vec<f64>> {
    let n_snap = cell.times.len();
    let constant: Vec<Field> = cell.times.iter().map(|t| phi.clone().with_time(*t)).collect();
    let mut levels: Vec<&[Field]> = vec![&constant];
    levels.extend(cell.iterates.iter().map(|it| it.snapshots.as_slice()));
    let zero = Field::zeros(phi.grid());
    // running sup of the Z integrand per level
    let running = par::map_range(levels.len(), |m| -> Result<Vec<f64>> {
        let mut acc = 0f64;
        (0..n_snap)
            .map(|k| {
                let rate = if m == 0 { zero.clone() } else { rhs_linear(&levels[m][k], &levels[m - 1][k])? };
                let z: f64 = zt_components(&levels[m][k], &rate, 0).iter().map(|c| c.value).sum();
                acc = acc.max(z);
                Ok(acc)
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok((1..levels.len())
        .map(|n| {
            let (zv, zw) = (&running[n], &running[n - 1]);
            (1..n_snap)
                .map(|k| {
                    let den = cell.times[k] * zw[k].sqrt() * zv[k];
                    if den > 0.0 {
                        (zv[k] - zv[0]) / den
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        })
        .collect())
}

fn rescaled(phi: &Field, amplitude: f64) -> Field {
    let m = phi.max_abs();
    if m == 0.0 {
        phi.clone()
    } else {
        phi.scale(amplitude / m)
    }
}

pub fn run_picard(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = cfg.picard.clone().unwrap_or_default();
    let grid = cfg.grid.build()?;
    let phi = realize(cfg, &grid)?;
    let cell = picard_cell(&phi, &cfg.solver, opts.n_iters, opts.ratio_max)?;
    let mut amps = opts.amplitudes.clone();
    amps.sort_by(f64::total_cmp);
    let t_c = par::map_range(amps.len(), |k| critical_time(&rescaled(&phi, amps[k]), &cfg.solver, &opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let lemma = lemma_constants(&phi, &cell)?;

    let mut v = Verdict::new();
    if cell.errors.iter().all(|e| *e == 0.0) {
        v.note("trivial", 1.0);
    }
    let worst = cell.ratios.iter().cloned().fold(0.0, f64::max);
    v.check("ratio_max", worst, Bound::AtMost(opts.ratio_max));
    let rise = t_c.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    if t_c.len() > 1 {
        v.check("t_c_increase_max", rise, Bound::AtMost(0.0));
    }
    for (a, t) in amps.iter().zip(&t_c) {
        v.note(format!("t_c[{a:e}]"), *t);
    }
    for (n, e) in cell.errors.iter().enumerate() {
        v.note(format!("error[{n}]"), *e);
    }
    v.note("lemma_c_min", lemma.iter().cloned().fold(0.0, f64::max));
    let names: Vec<String> = (0..cell.error_series.len()).map(|n| format!("error_{n}")).collect();
    let mut series = Series::new(names);
    for k in 0..cell.times.len() {
        let row: Vec<f64> = cell.error_series.iter().map(|e| e[k]).collect();
        series.push(cell.times[k], &row)?;
    }
    Ok(Outcome { verdict: v, series, fields: vec![phi, cell.star.last().clone()] })
}

fn gate(w: &WeightFn, grid: &Grid, t_final: f64) -> Result<()> {
    validate_weight(w, grid, t_final).map(|_| ())
}

fn label(a: Order) -> String {
    format!("{}{}", a.0, a.1)
}

/// Running time integral by the trapezoid rule.
#[derive(Debug, Clone, Copy, Default)]
struct Trapezoid {
    last: Option<(f64, f64)>,
    total: f64,
}

impl Trapezoid {
    fn add(&mut self, t: f64, v: f64) -> f64 {
        if let Some((t0, v0)) = self.last {
            self.total += 0.5 * (t - t0) * (v + v0);
        }
        self.last = Some((t, v));
        self.total
    }
}

/// Monitors `M_α(t) = ∫ f_{α₁} (∂^α u)²` for `|α| <= K`, `α₁ ≠ 0`, and the
/// dissipation `∫₀ᵗ ∫ ∂x f_{α₁} (∂^α u_x)²`.
pub fn run_persistence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = cfg.persistence.clone().unwrap_or_default();
    let grid = cfg.grid.build()?;
    let t_final = cfg.solver.t_final;
    let family = persistence_weight_family(opts.k_max, &grid, cfg.window)?;
    for f in &family[1..] {
        gate(f, &grid, t_final)?;
    }
    let tables: Vec<_> = family.iter().map(|f| f.table(&grid)).collect();
    let alphas: Vec<Order> = indices_up_to(opts.k_max).filter(|a| a.0 > 0).collect();
    let phi = realize(cfg, &grid)?;

    let mut names: Vec<String> = alphas.iter().map(|a| format!("M_{}", label(*a))).collect();
    names.extend(alphas.iter().map(|a| format!("D_{}", label(*a))));
    let mut series = Series::new(names);
    let mut m0 = vec![0.0; alphas.len()];
    let mut worst = vec![0f64; alphas.len()];
    let mut diss = vec![Trapezoid::default(); alphas.len()];
    let mut last = phi.clone();
    solve_observed(&phi, &cfg.solver, |u| {
        let t = u.time();
        let vals = par::map_range(alphas.len(), |k| -> Result<(f64, f64)> {
            let a = alphas[k];
            let tab = &tables[a.0 as usize];
            let d = deriv(u, a);
            let dx = deriv(u, (a.0 + 1, a.1));
            Ok((
                weighted_integral(&d, &d, Some(&tab.f(t)), 1.0)?,
                weighted_integral(&dx, &dx, Some(&tab.dx(t, 1)), 1.0)?,
            ))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let mut row = Vec::with_capacity(2 * alphas.len());
        for (k, (m, _)) in vals.iter().enumerate() {
            if t == 0.0 {
                m0[k] = *m;
            }
            worst[k] = worst[k].max(m / m0[k].max(1.0));
            row.push(*m);
        }
        for (k, (_, g)) in vals.iter().enumerate() {
            row.push(diss[k].add(t, *g));
        }
        series.push(t, &row)?;
        last = u.clone();
        Ok(())
    })?;
    let mut v = Verdict::new();
    v.check("monitor_ratio_max", worst.iter().cloned().fold(0.0, f64::max), Bound::AtMost(opts.c_margin));
    for (k, a) in alphas.iter().enumerate() {
        v.note(format!("ratio_{}", label(*a)), worst[k]);
        v.note(format!("dissipation_{}", label(*a)), diss[k].total);
    }
    Ok(Outcome { verdict: v, series, fields: vec![phi, last] })
}

/// Refinement measurements of one datum at one resolution.
#[derive(Debug, Clone)]
pub struct GainCell {
    pub nx: usize,
    /// `∫ (∂x^{2L-1} φ)²`.
    pub q0: f64,
    /// `sup_{t >= t_min} ∫ f_α (∂^α u)² + ∫₀ᵀ ∫ g_α (∂^α u_x)²`.
    pub q1: f64,
    /// `∫ φ² + ∫ (∂y^L φ)² + ∫ (1 + x₊)^L (∂x^L φ)²`.
    pub hypothesis: f64,
    pub times: Vec<f64>,
    pub weighted: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub initial: Field,
    pub last: Field,
}

pub fn gain_cell(cfg: &ExperimentConfig, data: &InitialData, nx: usize) -> Result<GainCell> {
    let opts = cfg.gain.clone().unwrap_or_default();
    let grid = GridSpec { nx, ..cfg.grid }.build()?;
    let alpha = (opts.alpha[0], opts.alpha[1]);
    let t_final = cfg.solver.t_final;
    let (f, g) = gain_weights(alpha, cfg.l, cfg.sigma, &grid, cfg.window)?;
    gate(&f, &grid, t_final)?;
    gate(&g, &grid, t_final)?;
    let (ft, gt) = (f.table(&grid), g.table(&grid));
    let phi = data.realize(&grid)?;
    let l = cfg.l;
    let q0 = spectral_sq(&phi, 2 * l as i32 - 1, 0);
    let dl = deriv(&phi, (l, 0));
    let ramp: Vec<f64> = (0..nx).map(|ix| (1.0 + grid.x(ix).max(0.0)).powi(l as i32)).collect();
    let hypothesis =
        spectral_sq(&phi, 0, 0) + spectral_sq(&phi, 0, l) + weighted_integral(&dl, &dl, Some(&ramp), 1.0)?;
    let t_min = opts.t_min_fraction * t_final;
    let (mut times, mut weighted, mut dissipation) = (Vec::new(), Vec::new(), Vec::new());
    let mut sup = 0f64;
    let mut trap = Trapezoid::default();
    let mut last = phi.clone();
    solve_observed(&phi, &cfg.solver, |u| {
        let t = u.time();
        let d = deriv(u, alpha);
        let dx = deriv(u, (alpha.0 + 1, alpha.1));
        let a = weighted_integral(&d, &d, Some(&ft.f(t)), 1.0)?;
        let b = weighted_integral(&dx, &dx, Some(&gt.f(t)), 1.0)?;
        if t >= t_min * (1.0 - 1e-12) {
            sup = sup.max(a);
        }
        times.push(t);
        weighted.push(a);
        dissipation.push(trap.add(t, b));
        last = u.clone();
        Ok(())
    })?;
    Ok(GainCell { nx, q0, q1: sup + trap.total, hypothesis, times, weighted, dissipation, initial: phi, last })
}

fn relative_change(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs()
}

pub fn run_gain(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = cfg.gain.clone().unwrap_or_default();
    let res = &cfg.resolutions;
    let n = res.len();
    let mut v = Verdict::new();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut push_cells = |tag: &str, cells: &[GainCell], v: &mut Verdict| {
        for c in cells {
            v.note(format!("{tag}.q0[{}]", c.nx), c.q0);
            v.note(format!("{tag}.q1[{}]", c.nx), c.q1);
            v.note(format!("{tag}.hypothesis[{}]", c.nx), c.hypothesis);
            columns.push((format!("{tag}_nx{}_weighted", c.nx), c.weighted.clone()));
            columns.push((format!("{tag}_nx{}_dissipation", c.nx), c.dissipation.clone()));
        }
    };

    // the smooth control must settle before the rough runs mean anything
    let control = par::map_range(n, |k| gain_cell(cfg, &opts.control, res[k]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let control_q0 = relative_change(control[n - 2].q0, control[n - 1].q0);
    let control_q1 = relative_change(control[n - 2].q1, control[n - 1].q1);
    v.check("control.q0_change", control_q0, Bound::AtMost(opts.change_max));
    v.check("control.q1_change", control_q1, Bound::AtMost(opts.change_max));
    push_cells("control", &control, &mut v);
    let times = control[n - 1].times.clone();
    let mut fields = Vec::new();
    if v.passed {
        let cells: Vec<(u64, usize)> = cfg.seeds.iter().flat_map(|s| res.iter().map(move |r| (*s, *r))).collect();
        let rough = par::map_range(cells.len(), |k| {
            let (seed, nx) = cells[k];
            gain_cell(cfg, &cfg.initial.with_seed(seed), nx)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        for (j, seed) in cfg.seeds.iter().enumerate() {
            let c = &rough[j * n..(j + 1) * n];
            let tag = if cfg.seeds.len() == 1 { "rough".to_string() } else { format!("rough{seed}") };
            let growth = c.windows(2).map(|w| w[1].q0 / w[0].q0).fold(f64::INFINITY, f64::min);
            v.check(format!("{tag}.q0_growth_min"), growth, Bound::AtLeast(opts.growth_min));
            v.check(format!("{tag}.q1_change"), relative_change(c[n - 2].q1, c[n - 1].q1), Bound::AtMost(opts.change_max));
            v.note(format!("{tag}.hypothesis_change"), relative_change(c[n - 2].hypothesis, c[n - 1].hypothesis));
            push_cells(&tag, c, &mut v);
        }
        fields.push(rough[n - 1].initial.clone());
        fields.push(rough[n - 1].last.clone());
    } else {
        v.note("rough_skipped", 1.0);
        fields.push(control[n - 1].initial.clone());
        fields.push(control[n - 1].last.clone());
    }
    let mut series = Series::new(columns.iter().map(|c| c.0.clone()));
    for (k, t) in times.iter().enumerate() {
        let row: Vec<f64> = columns.iter().map(|c| c.1[k]).collect();
        series.push(*t, &row)?;
    }
    Ok(Outcome { verdict: v, series, fields })
}

/// Main Equality residuals for every weight and index, at each snapshot
/// stride. The series holds the term breakdown at the finest stride.
pub fn run_identities(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = cfg.identities.clone().unwrap_or_default();
    let grid = cfg.grid.build()?;
    let phi = realize(cfg, &grid)?;
    let traj = solve(&phi, &cfg.solver)?;
    let subs: Vec<Trajectory> = opts.strides.iter().map(|s| traj.subsample(*s)).collect();
    let mut v = Verdict::new();
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut times = Vec::new();
    for [i, k] in &opts.weights {
        let f = build_weight(WeightSpec::new(cfg.sigma, *i, *k), &grid, cfg.window)?;
        gate(&f, &grid, cfg.solver.t_final)?;
        let per_alpha = par::map_range(opts.alphas.len(), |j| -> Result<Vec<Vec<TermBreakdown>>> {
            let a = (opts.alphas[j][0], opts.alphas[j][1]);
            subs.iter().map(|s| main_equality_terms(s, &f, a)).collect()
        });
        for (a, terms) in opts.alphas.iter().zip(per_alpha) {
            let terms = terms?;
            let r: Vec<f64> = terms.iter().map(|t| integrated_relative_residual(t)).collect();
            let signed: Vec<f64> = terms.iter().map(|t| integrated_signed_residual(t)).collect();
            let tag = format!("w{}{}{}.a{}{}", cfg.sigma, i, k, a[0], a[1]);
            let n = r.len();
            v.check(format!("{tag}.residual"), r[n - 1], Bound::AtMost(opts.residual_max));
            let order = three_level_order([signed[n - 3], signed[n - 2], signed[n - 1]]);
            v.check(format!("{tag}.order"), order, Bound::AtLeast(opts.order_min));
            for ((s, x), y) in opts.strides.iter().zip(&r).zip(&signed) {
                v.note(format!("{tag}.residual[stride {s}]"), *x);
                v.note(format!("{tag}.signed[stride {s}]"), *y);
            }
            let fine = &terms[n - 1];
            times = fine.iter().map(|t| t.t).collect();
            for (c, name) in TermBreakdown::COLUMNS.iter().enumerate().skip(1) {
                columns.push((format!("{tag}.{name}"), fine.iter().map(|t| t.row()[c]).collect()));
            }
        }
    }
    let mut series = Series::new(columns.iter().map(|c| c.0.clone()));
    for (k, t) in times.iter().enumerate() {
        let row: Vec<f64> = columns.iter().map(|c| c.1[k]).collect();
        series.push(*t, &row)?;
    }
    Ok(Outcome { verdict: v, series, fields: vec![phi, traj.last().clone()] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(e.to_string(), e.name());
        }
        assert_eq!("blowup-bound".parse::<Experiment>().unwrap(), Experiment::BlowupBound);
        assert!("kdv".parse::<Experiment>().is_err());
    }

    #[test]
    fn defaults_validate() {
        for e in Experiment::ALL {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn l_below_two_is_rejected() {
        let cfg = ExperimentConfig { l: 1, ..ExperimentConfig::defaults(Experiment::Gain) };
        let e = cfg.validate().unwrap_err().to_string();
        assert!(e.contains("L ≥ 2 required"), "{e}");
    }

    #[test]
    fn verdict_passes_iff_all_bounds_hold() {
        let mut v = Verdict::new();
        v.check("a", 1.0, Bound::AtMost(2.0)).check("b", 3.0, Bound::AtLeast(1.0));
        assert!(v.passed && v.is_consistent());
        v.check("c", f64::NAN, Bound::Finite);
        assert!(!v.passed && v.is_consistent());
        assert_eq!(v.failures(), vec!["c"]);
    }

    #[test]
    fn gronwall_fit_of_exact_exponential() {
        let t: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
        let w: Vec<f64> = t.iter().map(|t| if *t == 0.0 { 0.0 } else { 1e-20 * (1.5 * t).exp() }).collect();
        let fit = GronwallFit::new(&t, &w);
        assert_eq!(fit.first, Some(1));
        assert!((fit.c - 1.5).abs() < 1e-9);
        assert!(fit.excess.abs() < 1e-9);
    }

    #[test]
    fn gronwall_fit_of_zero_distance() {
        let fit = GronwallFit::new(&[0.0, 1.0], &[0.0, 0.0]);
        assert_eq!(fit.first, None);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let mut tr = Trapezoid::default();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            tr.add(t, 2.0 * t);
        }
        assert!((tr.total - 1.0).abs() < 1e-14);
    }
}
