//! KP-I time integration.
//!
//! The linear part `-u_xxx - u_x + ∂x⁻¹u_yy` is diagonal in Fourier space
//! with purely imaginary symbol and is integrated exactly; the advection
//! term is stepped with the classical four-stage Runge-Kutta tableau in the
//! interaction picture (Lawson's integrating-factor RK4).

use log::{debug, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::initial::InitialData;
use crate::spectral::{self, dealias_coeffs, Field, Grid, DEALIAS_FRAC, ZERO_MODE_TOL};
use crate::{par, Error, Result, CODE_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    IfRk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dealias_frac: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
    pub record_every: usize,
    /// Largest admissible `max_{margin}|u| / max|u|`.
    pub decay_tol: f64,
    /// Outer fraction of the box in x watched by the decay check.
    pub margin: f64,
    /// Optional absorbing layer at the x-edges of the box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sponge: Option<Sponge>,
}

/// Absorbing layer near the left edge of the box. After every step `u` is
/// multiplied by `exp(-ν(x) dt)`, dealiased, and the `ξ = 0, η ≠ 0`
/// column is cleared again. `ν` is a smooth plateau of height `strength`
/// on `-Lx < x < (width - 1) Lx`, rising and falling over a quarter of
/// that span each, so it vanishes at both sides of the periodic seam.
/// Fast short waves travel left and are absorbed before they wrap into
/// the region where the weights grow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sponge {
    pub width: f64,
    pub strength: f64,
}

impl Sponge {
    pub fn profile(&self, grid: &Grid) -> Vec<f64> {
        let lx = grid.half_length_x();
        let span = self.width * lx;
        (0..grid.nx())
            .map(|ix| {
                let r = (grid.x(ix) + lx) / span;
                let step = crate::weights::smooth_step;
                self.strength * step(4.0 * r) * step(4.0 * (1.0 - r))
            })
            .collect()
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            t_final: 1.0,
            dealias_frac: DEALIAS_FRAC,
            cfl_safety: 0.5,
            scheme: Scheme::IfRk4,
            record_every: 10,
            decay_tol: 1e-10,
            margin: 0.25,
            sponge: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_final >= self.dt) {
            return bad(format!("T = {} must be at least dt = {}", self.t_final, self.dt));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return bad(format!("cfl_safety = {} must lie in (0, 1)", self.cfl_safety));
        }
        if !(self.dealias_frac > 0.0 && self.dealias_frac <= 1.0) {
            return bad(format!("dealias_frac = {} must lie in (0, 1]", self.dealias_frac));
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return bad(format!("margin = {} must lie in (0, 1)", self.margin));
        }
        if !(self.decay_tol > 0.0) {
            return bad(format!("decay_tol = {} must be positive", self.decay_tol));
        }
        if let Some(sp) = self.sponge {
            if !(sp.width > 0.0 && sp.width < 1.0) {
                return bad(format!("sponge.width = {} must lie in (0, 1)", sp.width));
            }
            if !(sp.strength >= 0.0 && sp.strength.is_finite()) {
                return bad(format!("sponge.strength = {} must be finite and nonnegative", sp.strength));
            }
        }
        Ok(())
    }

    /// Step count and the step actually taken: `T / ceil(T / dt)`.
    pub fn steps(&self) -> (usize, f64) {
        let n = ((self.t_final / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub initial: Option<InitialData>,
    pub code_version: String,
    pub coefficient: Option<String>,
}

impl Provenance {
    pub fn new(initial: Option<InitialData>) -> Self {
        Provenance { initial, code_version: CODE_VERSION.to_string(), coefficient: None }
    }
}

/// Time-ordered snapshots from one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
    /// `∫u²` per snapshot.
    pub l2_sq: Vec<f64>,
    pub config: SolverConfig,
    pub provenance: Provenance,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(Field::time).collect()
    }

    /// Every `stride`-th snapshot, starting with the first.
    pub fn subsample(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        Trajectory {
            snapshots: self.snapshots.iter().step_by(stride).cloned().collect(),
            l2_sq: self.l2_sq.iter().step_by(stride).cloned().collect(),
            config: SolverConfig { record_every: self.config.record_every * stride, ..self.config.clone() },
            provenance: self.provenance.clone(),
        }
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    pub fn grid(&self) -> &Grid {
        self.snapshots[0].grid()
    }
}

/// `i(ξ³ - ξ + η²/ξ)`, or `None` on the annihilated column `ξ = 0`.
pub fn dispersion_symbol(xi: f64, eta: f64) -> Option<Complex64> {
    if xi == 0.0 {
        return None;
    }
    Some(Complex64::new(0.0, xi * xi * xi - xi + eta * eta / xi))
}

fn symbol_table(grid: &Grid) -> Vec<Complex64> {
    let nx = grid.nx();
    let mut s = vec![Complex64::default(); grid.len()];
    par::for_each_chunk_mut(&mut s, nx, |iy, row| {
        let eta = grid.eta()[iy];
        for (ix, v) in row.iter_mut().enumerate() {
            if ix != nx / 2 {
                *v = dispersion_symbol(grid.xi()[ix], eta).unwrap_or_default();
            }
        }
    });
    s
}

/// Energy fraction of the modes `ξ = 0, η ≠ 0`, which the `∂x⁻¹∂y²` term
/// cannot act on.
pub fn domain_defect(u: &Field) -> f64 {
    let c = u.spectral();
    let nx = u.grid().nx();
    let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    (1..u.grid().ny()).map(|iy| c[iy * nx].norm_sqr()).sum::<f64>() / total
}

/// Checks that `∂x⁻¹ u_yy` is defined and removes the admissible residue.
/// The mean mode `(0, 0)` is kept: it is annihilated by every term.
pub fn project_domain(u: &Field) -> Result<Field> {
    let fraction = domain_defect(u);
    if fraction > ZERO_MODE_TOL {
        return Err(Error::NotInDomain { fraction, tolerance: ZERO_MODE_TOL });
    }
    if fraction == 0.0 {
        return Ok(u.clone().into_spectral().refresh_zero_x_mean());
    }
    warn!("removing zero-x-mode energy fraction {fraction:.3e} from the initial data");
    let nx = u.grid().nx();
    Ok(u.map_coeffs(|i, c| if i % nx == 0 && i != 0 { Complex64::default() } else { c })
        .with_time(u.time())
        .refresh_zero_x_mean())
}

/// `max |u|` over `|x| > (1 - margin) Lx`, relative to `max |u|`.
pub fn margin_ratio(u: &Field, margin: f64) -> f64 {
    let g = u.grid();
    let p = u.physical();
    let edge = (1.0 - margin) * g.half_length_x();
    let nx = g.nx();
    let (mut outer, mut all) = (0f64, 0f64);
    for (i, v) in p.iter().enumerate() {
        let a = v.abs();
        all = all.max(a);
        if g.x(i % nx).abs() > edge {
            outer = outer.max(a);
        }
    }
    if all == 0.0 {
        0.0
    } else {
        outer / all
    }
}

fn check_margin(u: &Field, cfg: &SolverConfig) -> Result<()> {
    let ratio = margin_ratio(u, cfg.margin);
    if ratio > cfg.decay_tol {
        return Err(Error::Margin { time: u.time(), ratio, tolerance: cfg.decay_tol });
    }
    Ok(())
}

/// Coefficient `b` in the linearized equation `u_t + ... + b u_x = 0`.
pub enum Coefficient<'a> {
    /// `b = 0`.
    Zero,
    /// A time-independent field.
    Frozen(&'a Field),
    /// Linear interpolation in time between the snapshots of a trajectory.
    Interpolated(&'a Trajectory),
    /// The stage states recorded while integrating another trajectory with
    /// the same step; makes the iteration's fixed point coincide with the
    /// nonlinear scheme.
    Stages(&'a StageRecord),
}

/// Dealiased stage states, four per step.
#[derive(Debug, Clone, Default)]
pub struct StageRecord {
    pub dt: f64,
    pub states: Vec<[Vec<f64>; 4]>,
}

struct NonlinearEval {
    value: Vec<Complex64>,
    state: Vec<f64>,
    speed: f64,
}

/// Integrating-factor RK4 propagator for one grid and step.
pub struct Integrator {
    grid: Grid,
    dt: f64,
    symbol: Vec<Complex64>,
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
    ikx: Vec<Complex64>,
    frac: f64,
    cfl: f64,
    sponge: Option<Vec<f64>>,
}

impl Integrator {
    pub fn new(grid: &Grid, dt: f64, cfg: &SolverConfig) -> Self {
        let symbol = symbol_table(grid);
        let e_half: Vec<Complex64> = symbol.iter().map(|s| (s * (0.5 * dt)).exp()).collect();
        let e_full = e_half.iter().map(|e| e * e).collect();
        let nx = grid.nx();
        let ikx = (0..nx)
            .map(|i| spectral::axis_factor(grid.xi()[i], i == nx / 2, 1))
            .collect();
        let sponge = cfg.sponge.map(|s| s.profile(grid).iter().map(|nu| (-nu * dt).exp()).collect());
        Integrator {
            grid: grid.clone(),
            dt,
            symbol,
            e_half,
            e_full,
            ikx,
            frac: cfg.dealias_frac,
            cfl: cfg.cfl_safety,
            sponge,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Largest step the CFL rule allows for advection speed `speed`.
    pub fn admissible_dt(&self, speed: f64) -> f64 {
        self.cfl * self.grid.dx() / (speed + 1.0)
    }

    /// `-P0 D FFT(b u_x)` with `b = u` when `coeff` is `None`.
    fn nonlinear(&self, uhat: &[Complex64], coeff: Option<&[f64]>) -> NonlinearEval {
        let g = &self.grid;
        let nx = g.nx();
        let mut z = uhat.to_vec();
        dealias_coeffs(g, &mut z, self.frac);
        let ikx = &self.ikx;
        par::for_each_chunk_mut(&mut z, nx, |_, row| {
            for (v, k) in row.iter_mut().zip(ikx) {
                // û + i (iξ û)
                *v += Complex64::i() * (k * *v);
            }
        });
        spectral::inverse_in_place(g, &mut z);
        let state: Vec<f64> = z.iter().map(|v| v.re).collect();
        let speed = match coeff {
            None => state.iter().fold(0f64, |m, v| m.max(v.abs())),
            Some(b) => b.iter().fold(0f64, |m, v| m.max(v.abs())),
        };
        let mut prod: Vec<Complex64> = match coeff {
            None => z.iter().map(|v| Complex64::new(v.re * v.im, 0.0)).collect(),
            Some(b) => z.iter().zip(b).map(|(v, b)| Complex64::new(b * v.im, 0.0)).collect(),
        };

        spectral::forward_in_place(g, &mut prod);
        dealias_coeffs(g, &mut prod, self.frac);
        par::for_each_chunk_mut(&mut prod, nx, |_, row| {
            row[0] = Complex64::default();
            row.iter_mut().for_each(|v| *v = -*v);
        });
        NonlinearEval { value: prod, state, speed }
    }

    fn zip3(&self, out: &mut [Complex64], f: impl Fn(usize, &mut Complex64) + Sync + Send) {
        let nx = self.grid.nx();
        par::for_each_chunk_mut(out, nx, |iy, row| {
            for (ix, v) in row.iter_mut().enumerate() {
                f(iy * nx + ix, v);
            }
        });
    }

    fn absorb(&self, c: &mut Vec<Complex64>, mask: &[f64]) {
        let g = &self.grid;
        let nx = g.nx();
        let mean = c[0];
        spectral::inverse_in_place(g, c);
        par::for_each_chunk_mut(c, nx, |_, row| {
            for (v, m) in row.iter_mut().zip(mask) {
                *v = Complex64::new(v.re * m, 0.0);
            }
        });
        spectral::forward_in_place(g, c);
        dealias_coeffs(g, c, self.frac);
        par::for_each_chunk_mut(c, nx, |iy, row| {
            if iy > 0 {
                row[0] = Complex64::default();
            }
        });
        // the mean is invariant under the equation; keep it exactly
        c[0] = mean;
    }

    /// Advances `uhat` by one step. `coeff(stage)` supplies `b` for the
    /// linearized problem; `record` receives the four stage states.
    pub fn step_coeffs(
        &self,
        uhat: &[Complex64],
        coeff: Option<&dyn Fn(usize) -> Vec<f64>>,
        record: Option<&mut [Vec<f64>; 4]>,
    ) -> Result<Vec<Complex64>> {
        let n = uhat.len();
        let dt = self.dt;
        let (eh, ef) = (&self.e_half, &self.e_full);
        let b: [Option<Vec<f64>>; 4] = match coeff {
            Some(c) => [Some(c(0)), Some(c(1)), Some(c(2)), Some(c(3))],
            None => [None, None, None, None],
        };
        let k1 = self.nonlinear(uhat, b[0].as_deref());
        let admissible = self.admissible_dt(k1.speed);
        if dt > admissible * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, admissible });
        }
        let mut s = vec![Complex64::default(); n];
        self.zip3(&mut s, |i, v| *v = eh[i] * (uhat[i] + k1.value[i] * (0.5 * dt)));
        let k2 = self.nonlinear(&s, b[1].as_deref());
        self.zip3(&mut s, |i, v| *v = eh[i] * uhat[i] + k2.value[i] * (0.5 * dt));
        let k3 = self.nonlinear(&s, b[2].as_deref());
        self.zip3(&mut s, |i, v| *v = ef[i] * uhat[i] + eh[i] * k3.value[i] * dt);
        let k4 = self.nonlinear(&s, b[3].as_deref());
        self.zip3(&mut s, |i, v| {
            *v = ef[i] * uhat[i]
                + (ef[i] * k1.value[i] + eh[i] * (k2.value[i] + k3.value[i]) * 2.0 + k4.value[i]) * (dt / 6.0)
        });
        if let Some(r) = record {
            *r = [k1.state, k2.state, k3.state, k4.state];
        }
        if let Some(mask) = &self.sponge {
            self.absorb(&mut s, mask);
        }
        Ok(s)
    }

    /// Full right-hand side `L û + N(û)` for the nonlinear equation, or for
    /// the linearized one with coefficient `b`.
    pub fn rhs_coeffs(&self, uhat: &[Complex64], b: Option<&[f64]>) -> Vec<Complex64> {
        let nl = self.nonlinear(uhat, b);
        uhat.iter()
            .zip(&self.symbol)
            .zip(nl.value)
            .map(|((u, s), n)| s * u + n)
            .collect()
    }
}

/// `u_t = -u_xxx - u_x - u u_x + ∂x⁻¹ u_yy` with the product dealiased.
pub fn rhs(u: &Field) -> Result<Field> {
    rhs_with(u, None)
}

/// Right-hand side of the linearized equation with coefficient `b`.
pub fn rhs_linear(u: &Field, b: &Field) -> Result<Field> {
    if u.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    rhs_with(u, Some(&dealiased_physical(b, DEALIAS_FRAC)))
}

fn rhs_with(u: &Field, b: Option<&[f64]>) -> Result<Field> {
    let uyy = spectral::deriv(u, (0, 2));
    spectral::inv_dx(&uyy)?;
    let cfg = SolverConfig::default();
    let it = Integrator::new(u.grid(), 0.0, &cfg);
    let c = it.rhs_coeffs(&u.spectral(), b);
    Ok(Field::from_spectral(u.grid(), c, u.time())?.refresh_zero_x_mean())
}

fn dealiased_physical(b: &Field, frac: f64) -> Vec<f64> {
    spectral::dealias(b, frac).physical().into_owned()
}

/// One integrating-factor RK4 step of the nonlinear equation.
pub fn step(u: &Field, dt: f64, cfg: &SolverConfig) -> Result<Field> {
    let it = Integrator::new(u.grid(), dt, cfg);
    let c = it.step_coeffs(&u.spectral(), None, None)?;
    Ok(Field::from_spectral(u.grid(), c, u.time() + dt)?.with_zero_x_mean(u.is_zero_x_mean()))
}

struct Driver<'a> {
    cfg: &'a SolverConfig,
    coefficient: Option<CoeffSource<'a>>,
    record_stages: bool,
}

enum CoeffSource<'a> {
    Frozen(Vec<f64>),
    Interpolated(Vec<(f64, Vec<f64>)>),
    Stages(&'a StageRecord),
    Zero(usize),
}

impl CoeffSource<'_> {
    fn at(&self, step: usize, stage: usize, t: f64, dt: f64) -> Vec<f64> {
        match self {
            CoeffSource::Zero(n) => vec![0.0; *n],
            CoeffSource::Frozen(b) => b.clone(),
            CoeffSource::Stages(r) => r.states[step][stage].clone(),
            CoeffSource::Interpolated(snaps) => {
                let offset = [0.0, 0.5, 0.5, 1.0][stage];
                let tau = t + offset * dt;
                let k = snaps.partition_point(|(s, _)| *s <= tau).clamp(1, snaps.len().max(2) - 1);
                if snaps.len() == 1 {
                    return snaps[0].1.clone();
                }
                let (t0, b0) = &snaps[k - 1];
                let (t1, b1) = &snaps[k];
                let w = ((tau - t0) / (t1 - t0)).clamp(0.0, 1.0);
                b0.iter().zip(b1).map(|(a, b)| a + w * (b - a)).collect()
            }
        }
    }
}

impl Driver<'_> {
    fn run(&self, phi: &Field, provenance: Provenance) -> Result<(Trajectory, StageRecord)> {
        let mut snapshots = Vec::new();
        let (config, record) = self.run_observed(phi, &mut |u| {
            snapshots.push(u.clone());
            Ok(())
        })?;
        let l2_sq = snapshots.iter().map(Field::l2_sq).collect();
        Ok((Trajectory { snapshots, l2_sq, config, provenance }, record))
    }

    /// Integrates and hands every recorded state, `φ` included, to
    /// `observe`. Returns the resolved config and the stage record.
    fn run_observed(
        &self,
        phi: &Field,
        observe: &mut dyn FnMut(&Field) -> Result<()>,
    ) -> Result<(SolverConfig, StageRecord)> {
        let cfg = self.cfg;
        cfg.validate()?;
        let phi = project_domain(phi)?.with_time(0.0);
        let grid = phi.grid().clone();
        let (n_steps, dt) = cfg.steps();
        let zero_mean = phi.is_zero_x_mean();
        let it = Integrator::new(&grid, dt, cfg);
        if let Some(CoeffSource::Stages(r)) = &self.coefficient {
            if r.states.len() < n_steps || (r.dt - dt).abs() > 1e-14 * dt {
                return Err(Error::InvalidArgument(
                    "stage record does not match the step sequence".into(),
                ));
            }
        }
        check_margin(&phi, cfg)?;
        observe(&phi)?;
        let mut record = StageRecord { dt, states: Vec::new() };
        let mut uhat = phi.into_coeffs();
        for s in 0..n_steps {
            let t = s as f64 * dt;
            let coeff = self.coefficient.as_ref().map(|c| move |stage: usize| c.at(s, stage, t, dt));
            let mut stages: [Vec<f64>; 4] = Default::default();
            uhat = it.step_coeffs(
                &uhat,
                coeff.as_ref().map(|c| c as &dyn Fn(usize) -> Vec<f64>),
                self.record_stages.then_some(&mut stages),
            )?;
            if self.record_stages {
                record.states.push(stages);
            }
            let done = s + 1 == n_steps;
            if (s + 1) % cfg.record_every == 0 || done {
                let t = if done { cfg.t_final } else { (s + 1) as f64 * dt };
                let u = Field::from_spectral(&grid, uhat.clone(), t)?.with_zero_x_mean(zero_mean);
                check_margin(&u, cfg)?;
                observe(&u)?;
            }
        }
        debug!("integrated {n_steps} steps of {dt:.3e}");
        let mut config = cfg.clone();
        config.dt = dt;
        Ok((config, record))
    }
}

/// Integrates the nonlinear equation from `phi` over `[0, T]`.
pub fn solve(phi: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    solve_with_provenance(phi, cfg, Provenance::new(None))
}

pub fn solve_with_provenance(phi: &Field, cfg: &SolverConfig, provenance: Provenance) -> Result<Trajectory> {
    let d = Driver { cfg, coefficient: None, record_stages: false };
    Ok(d.run(phi, provenance)?.0)
}

/// Integrates the nonlinear equation without storing snapshots; `observe`
/// sees `φ` and every `record_every`-th state.
pub fn solve_observed(phi: &Field, cfg: &SolverConfig, mut observe: impl FnMut(&Field) -> Result<()>) -> Result<()> {
    let d = Driver { cfg, coefficient: None, record_stages: false };
    d.run_observed(phi, &mut observe).map(|_| ())
}

/// Integrates the nonlinear equation and keeps every stage state.
pub fn solve_recording(phi: &Field, cfg: &SolverConfig) -> Result<(Trajectory, StageRecord)> {
    let d = Driver { cfg, coefficient: None, record_stages: true };
    d.run(phi, Provenance::new(None))
}

/// Integrates `u_t + u_xxx + u_x + b u_x - ∂x⁻¹u_yy = 0` from `phi`.
pub fn linear_solve(phi: &Field, b: Coefficient<'_>, cfg: &SolverConfig) -> Result<Trajectory> {
    Ok(linear_solve_recording(phi, b, cfg)?.0)
}

pub fn linear_solve_recording(
    phi: &Field,
    b: Coefficient<'_>,
    cfg: &SolverConfig,
) -> Result<(Trajectory, StageRecord)> {
    let frac = cfg.dealias_frac;
    let (source, label) = match b {
        Coefficient::Zero => (CoeffSource::Zero(phi.grid().len()), "zero"),
        Coefficient::Frozen(f) => {
            if f.grid() != phi.grid() {
                return Err(Error::GridMismatch);
            }
            (CoeffSource::Frozen(dealiased_physical(f, frac)), "frozen")
        }
        Coefficient::Interpolated(traj) => {
            if traj.grid() != phi.grid() {
                return Err(Error::GridMismatch);
            }
            let snaps = traj
                .snapshots
                .iter()
                .map(|u| (u.time(), dealiased_physical(u, frac)))
                .collect();
            (CoeffSource::Interpolated(snaps), "interpolated")
        }
        Coefficient::Stages(r) => (CoeffSource::Stages(r), "stages"),
    };
    let mut provenance = Provenance::new(None);
    provenance.coefficient = Some(label.to_string());
    let d = Driver { cfg, coefficient: Some(source), record_stages: true };
    d.run(phi, provenance)
}

/// Iterates `u⁽ⁿ⁾_t + ... + u⁽ⁿ⁻¹⁾ u⁽ⁿ⁾_x - ∂x⁻¹u⁽ⁿ⁾_yy = 0` from
/// `u⁽⁰⁾ = φ`, returning `u⁽¹⁾ .. u⁽ⁿ⁾`. Each iterate is advected by the
/// stage states of its predecessor, so snapshots are kept at every step.
pub fn picard_iterate(phi: &Field, n_iters: usize, cfg: &SolverConfig) -> Result<Vec<Trajectory>> {
    if n_iters == 0 {
        return Err(Error::InvalidArgument("n_iters must be at least 1".into()));
    }
    let mut cfg = cfg.clone();
    cfg.record_every = 1;
    let phi = project_domain(phi)?;
    let mut out = Vec::with_capacity(n_iters);
    let (first, mut record) = linear_solve_recording(&phi, Coefficient::Frozen(&phi), &cfg)?;
    out.push(first);
    for _ in 1..n_iters {
        let (next, r) = linear_solve_recording(&phi, Coefficient::Stages(&record), &cfg)?;
        record = r;
        out.push(next);
    }
    Ok(out)
}
