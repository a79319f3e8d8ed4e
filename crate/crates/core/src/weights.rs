//! Weight functions `f(x, t) = t^k P(x)` with `P ~ e^{σx}` as `x → -∞` and
//! `P ~ x^i` as `x → +∞`.
//!
//! The two asymptotic pieces are joined on `[-1, 1]` by the smooth partition
//! built from `s(z) = exp(-1/z)`. Beyond the interior window the profile is
//! tapered smoothly down to the floor [`TAPER_FLOOR`], which keeps `f`
//! positive and periodic on the torus. All x-derivatives through order 4 are
//! analytic (see [`crate::jet`]).

use serde::{Deserialize, Serialize};

use crate::jet::{Jet, ORDER};
use crate::spectral::Grid;
use crate::{par, Error, Result};

/// Value the taper decays to near the box edge.
pub const TAPER_FLOOR: f64 = 1e-8;

/// Fraction of the outer region `[a, Lx]` over which the taper falls.
const TAPER_SPAN: f64 = 0.8;

/// Composite Gauss-Legendre: panels no wider than this on `[-1, 1]`.
const PANEL: f64 = 0.125;
const NODES: usize = 16;

/// Highest x-derivative available from a weight.
pub const MAX_DERIVATIVE: usize = ORDER - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub sigma: f64,
    pub i: u32,
    pub k: u32,
}

impl WeightSpec {
    pub fn new(sigma: f64, i: u32, k: u32) -> Self {
        WeightSpec { sigma, i, k }
    }
}

fn s_jet(z: Jet) -> Jet {
    if z.value() <= 1e-3 {
        return Jet::constant(0.0);
    }
    (-z.recip()).exp()
}

/// Smooth step: 0 for `z <= 0`, 1 for `z >= 1`.
fn smoothstep(z: Jet) -> Jet {
    let a = s_jet(z);
    let b = s_jet(1.0 - z);
    if b.value() == 0.0 && a.value() > 0.0 {
        return Jet::constant(1.0);
    }
    if a.value() == 0.0 {
        return Jet::constant(0.0);
    }
    a / (a + b)
}

/// Value of the smooth step at `z`.
pub(crate) fn smooth_step(z: f64) -> f64 {
    smoothstep(Jet::variable(z)).value()
}

fn blend_jet(sigma: f64, i: u32, x: f64) -> Jet {
    let v = Jet::variable(x);
    let left = || v.scale(sigma).exp();
    let right = || (v + 1.0).powi(i);
    if x <= -1.0 {
        left()
    } else if x >= 1.0 {
        right()
    } else {
        let s = smoothstep((v + 1.0).scale(0.5));
        (1.0 - s) * left() + s * right()
    }
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, x);
                for j in 2..=n {
                    let q2 = ((2 * j - 1) as f64 * x * q1 - (j - 1) as f64 * q0) / j as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                weights[k] = 2.0 / ((1.0 - x * x) * dq * dq);
                break;
            }
        }
        nodes[k] = x;
    }
    (nodes, weights)
}

/// `offset + ∫_{-∞}^x η(z) dz` for the blended profile `η` with rate `sigma`
/// and power `i`.
#[derive(Debug, Clone)]
struct Antiderivative {
    sigma: f64,
    i: u32,
    offset: f64,
    /// Cumulative integral at the panel edges `-1 + m PANEL`.
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Antiderivative {
    fn new(sigma: f64, i: u32, offset: f64) -> Self {
        let (nodes, weights) = gauss_legendre(NODES);
        let mut a = Antiderivative { sigma, i, offset, edges: vec![], nodes, weights };
        let panels = (2.0 / PANEL).round() as usize;
        let mut acc = (-sigma).exp() / sigma;
        a.edges.push(acc);
        for m in 0..panels {
            let lo = -1.0 + m as f64 * PANEL;
            acc += a.quad(lo, lo + PANEL);
            a.edges.push(acc);
        }
        a
    }

    fn quad(&self, lo: f64, hi: f64) -> f64 {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| w * blend_jet(self.sigma, self.i, c + h * z).value())
            .sum::<f64>()
            * h
    }

    fn value(&self, x: f64) -> f64 {
        let base = if x <= -1.0 {
            (self.sigma * x).exp() / self.sigma
        } else if x >= 1.0 {
            let p = (self.i + 1) as f64;
            self.edges[self.edges.len() - 1] + ((1.0 + x).powf(p) - 2f64.powf(p)) / p
        } else {
            let m = (((x + 1.0) / PANEL).floor() as usize).min(self.edges.len() - 2);
            let lo = -1.0 + m as f64 * PANEL;
            self.edges[m] + self.quad(lo, x)
        };
        base + self.offset
    }

    fn jet(&self, x: f64) -> Jet {
        blend_jet(self.sigma, self.i, x).integrate(self.value(x))
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Blend { sigma: f64, i: u32 },
    Integral(Antiderivative),
}

impl Profile {
    fn jet(&self, x: f64) -> Jet {
        match self {
            Profile::Blend { sigma, i } => blend_jet(*sigma, *i, x),
            Profile::Integral(a) => a.jet(x),
        }
    }
}

/// Smooth cut-off equal to 1 on `|x| <= a` and 0 on `|x| >= b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Taper {
    pub a: f64,
    pub b: f64,
}

impl Taper {
    fn jet(&self, x: f64) -> Jet {
        let ax = x.abs();
        if ax <= self.a {
            return Jet::constant(1.0);
        }
        if ax >= self.b {
            return Jet::constant(0.0);
        }
        let v = if x < 0.0 { -Jet::variable(x) } else { Jet::variable(x) };
        1.0 - smoothstep((v + (-self.a)).scale(1.0 / (self.b - self.a)))
    }
}

/// A realized weight in the class `W_{σ,i,k}`.
#[derive(Debug, Clone)]
pub struct WeightFn {
    spec: WeightSpec,
    profile: Profile,
    scale: f64,
    taper: Taper,
    window: f64,
    half_length: f64,
}

impl WeightFn {
    pub fn spec(&self) -> WeightSpec {
        self.spec
    }

    pub fn taper(&self) -> Taper {
        self.taper
    }

    /// Interior window as a fraction of `Lx`.
    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        self
    }

    /// Spatial profile `P` and its first four derivatives at `x`.
    pub fn profile(&self, x: f64) -> [f64; ORDER] {
        let p = self.profile.jet(x);
        let tau = self.taper.jet(x);
        let j = (p + (-TAPER_FLOOR)) * tau + TAPER_FLOOR;
        j.derivatives().map(|d| d * self.scale)
    }

    /// `∂x^r f(x, t)` for `r <= 4`.
    pub fn eval(&self, x: f64, t: f64, r: usize) -> f64 {
        assert!(r <= MAX_DERIVATIVE, "derivative order {r} not available");
        time_factor(self.spec.k, t) * self.profile(x)[r]
    }

    /// `∂t f(x, t)`.
    pub fn dt(&self, x: f64, t: f64) -> f64 {
        time_rate(self.spec.k, t) * self.profile(x)[0]
    }

    /// Profile values and derivatives at the x-nodes of `grid`.
    pub fn table(&self, grid: &Grid) -> WeightTable {
        let rows = par::map_range(grid.nx(), |ix| self.profile(grid.x(ix)));
        let mut p: [Vec<f64>; ORDER] = Default::default();
        for row in &rows {
            for r in 0..ORDER {
                p[r].push(row[r]);
            }
        }
        WeightTable { k: self.spec.k, p }
    }
}

fn time_factor(k: u32, t: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        t.powi(k as i32)
    }
}

fn time_rate(k: u32, t: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * t.powi(k as i32 - 1)
    }
}

/// A weight sampled at the x-nodes of a grid.
#[derive(Debug, Clone)]
pub struct WeightTable {
    k: u32,
    p: [Vec<f64>; ORDER],
}

impl WeightTable {
    /// `∂x^r f(·, t)` at the nodes.
    pub fn dx(&self, t: f64, r: usize) -> Vec<f64> {
        let s = time_factor(self.k, t);
        self.p[r].iter().map(|v| v * s).collect()
    }

    pub fn f(&self, t: f64) -> Vec<f64> {
        self.dx(t, 0)
    }

    pub fn dt(&self, t: f64) -> Vec<f64> {
        let s = time_rate(self.k, t);
        self.p[0].iter().map(|v| v * s).collect()
    }

    /// The unit weight on `nx` nodes.
    pub fn unit(nx: usize) -> Self {
        let mut p: [Vec<f64>; ORDER] = Default::default();
        p[0] = vec![1.0; nx];
        for v in p.iter_mut().skip(1) {
            *v = vec![0.0; nx];
        }
        WeightTable { k: 0, p }
    }
}

fn check_window(window: f64) -> Result<()> {
    if !(window > 0.0 && window < 1.0) {
        return Err(Error::InvalidWeight(format!("window {window} must lie in (0, 1)")));
    }
    Ok(())
}

fn taper_for(grid: &Grid, window: f64) -> Taper {
    let lx = grid.half_length_x();
    let a = window * lx;
    Taper { a, b: a + TAPER_SPAN * (lx - a) }
}

/// Builds the blended weight of class `spec` for `grid`.
pub fn build_weight(spec: WeightSpec, grid: &Grid, window: f64) -> Result<WeightFn> {
    check_window(window)?;
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(Error::InvalidWeight(format!("sigma = {} must be finite and nonnegative", spec.sigma)));
    }
    Ok(WeightFn {
        spec,
        profile: Profile::Blend { sigma: spec.sigma, i: spec.i },
        scale: 1.0,
        taper: taper_for(grid, window),
        window,
        half_length: grid.half_length_x(),
    })
}

/// `f(x, t) = ∫_{-∞}^x g(z, t) dz`, one polynomial power above `g`.
pub fn antiderivative_weight(g: &WeightFn) -> Result<WeightFn> {
    let (sigma, i) = match g.profile {
        Profile::Blend { sigma, i } => (sigma, i),
        Profile::Integral(_) => {
            return Err(Error::InvalidWeight("antiderivative needs a blended integrand".into()))
        }
    };
    if sigma <= 0.0 {
        return Err(Error::InvalidWeight("sigma = 0: the lower tail integral diverges".into()));
    }
    Ok(WeightFn {
        spec: WeightSpec { sigma, i: i + 1, k: g.spec.k },
        profile: Profile::Integral(Antiderivative::new(sigma, i, 0.0)),
        scale: g.scale,
        taper: g.taper,
        window: g.window,
        half_length: g.half_length,
    })
}

/// `f_0 = 1` and `f_i = 1 + ∫_{-∞}^x g_i` with `g_i` blended at rate 1 and
/// power `i - 1`, so `f_i ~ (1+x)^i` on the right and `f_i → 1` on the left.
pub fn persistence_weight_family(kmax: u32, grid: &Grid, window: f64) -> Result<Vec<WeightFn>> {
    check_window(window)?;
    let taper = taper_for(grid, window);
    Ok((0..=kmax)
        .map(|i| {
            let profile = if i == 0 {
                Profile::Blend { sigma: 0.0, i: 0 }
            } else {
                Profile::Integral(Antiderivative::new(1.0, i - 1, 1.0))
            };
            WeightFn {
                spec: WeightSpec { sigma: 0.0, i, k: 0 },
                profile,
                scale: 1.0,
                taper,
                window,
                half_length: grid.half_length_x(),
            }
        })
        .collect())
}

/// The pair `(f_α, g_α)` with `g_α = 3 ∂x f_α` in `W_{σ, p-1, k}`,
/// `p = 2L - |α| - α₂` and `k = |α| - L`.
pub fn gain_weights(alpha: (u32, u32), l: u32, sigma: f64, grid: &Grid, window: f64) -> Result<(WeightFn, WeightFn)> {
    let n = alpha.0 + alpha.1;
    if n <= l || 2 * l < n + alpha.1 + 1 {
        return Err(Error::InvalidWeight(format!(
            "alpha = {alpha:?} needs L + 1 <= |alpha| and 2L - |alpha| - alpha_2 >= 1 (L = {l})"
        )));
    }
    let g = build_weight(WeightSpec::new(sigma, 2 * l - n - alpha.1 - 1, n - l), grid, window)?;
    let f = antiderivative_weight(&g)?.scaled(1.0 / 3.0);
    Ok((f, g))
}

/// Realized class constants; `None` where the sampled region is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    /// `k + sup |∂x^r f| / f` for `r = 1..=4`.
    pub c5_by_order: [f64; 4],
    pub c5: f64,
    pub samples: usize,
}

fn violation(x: f64, t: f64, reason: &str) -> Error {
    Error::WeightViolation { x, t, reason: reason.to_string() }
}

/// Samples `w` on the interior window at spacing `dx/4` and at
/// `t = T j / 16`, `j = 1..=16`, and returns the tightest class constants.
pub fn validate_weight(w: &WeightFn, grid: &Grid, t_final: f64) -> Result<ClassReport> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidArgument(format!("T = {t_final} must be positive")));
    }
    let a = w.window * grid.half_length_x();
    let h = grid.dx() / 4.0;
    let n = (2.0 * a / h).floor() as usize;
    let xs: Vec<f64> = (0..=n).map(|m| -a + m as f64 * h).collect();
    let profiles = par::map_range(xs.len(), |m| w.profile(xs[m]));
    let spec = w.spec;
    let (mut c1, mut c2, mut c3, mut c4) = (f64::INFINITY, 0f64, f64::INFINITY, 0f64);
    let (mut left, mut right) = (false, false);
    let mut c5 = [0f64; 4];
    for (x, p) in xs.iter().zip(&profiles) {
        let x = *x;
        for j in 1..=16 {
            let t = t_final * j as f64 / 16.0;
            let f = time_factor(spec.k, t) * p[0];
            if !f.is_finite() {
                return Err(violation(x, t, "weight is not finite"));
            }
            if f <= 0.0 {
                return Err(violation(x, t, "weight is not positive"));
            }
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(violation(x, t_final, "derivative is not finite"));
        }
        for r in 1..=4 {
            c5[r - 1] = c5[r - 1].max(p[r].abs() / p[0]);
        }
        if x < -1.0 {
            let v = p[0] * (-spec.sigma * x).exp();
            c1 = c1.min(v);
            c2 = c2.max(v);
            left = true;
        } else if x > 1.0 {
            let v = p[0] / x.powi(spec.i as i32);
            c3 = c3.min(v);
            c4 = c4.max(v);
            right = true;
        }
    }
    let c5_by_order = c5.map(|v| v + spec.k as f64);
    let c5 = c5_by_order.iter().cloned().fold(spec.k as f64, f64::max);
    let report = ClassReport {
        c1: left.then_some(c1),
        c2: left.then_some(c2),
        c3: right.then_some(c3),
        c4: right.then_some(c4),
        c5_by_order,
        c5,
        samples: xs.len() * 16,
    };
    for (name, v) in [("c1", report.c1), ("c3", report.c3)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(violation(f64::NAN, t_final, &format!("{name} = {v} is not a positive bound")));
            }
        }
    }
    Ok(report)
}

/// `sup (∂x f_hi) / f_lo` over the interior window.
pub fn derivative_domination(f_hi: &WeightFn, f_lo: &WeightFn, grid: &Grid) -> f64 {
    let a = f_hi.window.min(f_lo.window) * grid.half_length_x();
    let h = grid.dx() / 4.0;
    let n = (2.0 * a / h).floor() as usize;
    par::map_range(n + 1, |m| {
        let x = -a + m as f64 * h;
        f_hi.profile(x)[1] / f_lo.profile(x)[0]
    })
    .into_iter()
    .fold(0.0, f64::max)
}
