//! The weighted energy identity for `∂^α u` and its ingredients.
//!
//! For a weight `f(x, t)` the solution satisfies, per multi-index `α`,
//!
//! ```text
//! ∂t∫f(∂^αu)² + ∫3f_x(∂^αu_x)² + ∫θ(∂^αu)² + ∫θ₁(∂^α∂x⁻¹u_y)² + ∫R_α = 0
//! θ = -(f_t + f_xxx + f_x),   θ₁ = -f_x,
//! R_α = 2 Σ_{n<=α₁, m<=α₂} C(α₁,n) C(α₂,m) f (∂^αu)(∂x^n∂y^m u)(∂x^{α₁+1-n}∂y^{α₂-m} u).
//! ```
//!
//! Integrals are rectangle-rule sums over the whole torus; the tapered
//! weights make integration by parts exact there up to spectral accuracy.

use serde::{Deserialize, Serialize};

use crate::dynamics::{rhs, Trajectory};
use crate::spectral::{self, Field, Grid, Order};
use crate::weights::{WeightFn, WeightTable};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeibnizTerm {
    pub n: u32,
    pub m: u32,
    pub coeff: u64,
    pub left: Order,
    pub right: Order,
}

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All terms of `∂^α (u u_x)`, `n = 0..=α₁`, `m = 0..=α₂`.
pub fn leibniz_terms(alpha: Order) -> Vec<LeibnizTerm> {
    let (a1, a2) = alpha;
    let mut out = Vec::with_capacity(((a1 + 1) * (a2 + 1)) as usize);
    for n in 0..=a1 {
        for m in 0..=a2 {
            out.push(LeibnizTerm {
                n,
                m,
                coeff: binomial(a1, n) * binomial(a2, m),
                left: (n, m),
                right: (a1 + 1 - n, a2 - m),
            });
        }
    }
    out
}

fn phys(u: &Field, o: Order) -> Vec<f64> {
    spectral::deriv(u, o).physical().into_owned()
}

/// Pointwise `Σ coeff (∂^left u)(∂^right u)`.
fn leibniz_sum(u: &Field, alpha: Order) -> Vec<f64> {
    let mut acc = vec![0.0; u.grid().len()];
    for t in leibniz_terms(alpha) {
        let (l, r) = (phys(u, t.left), phys(u, t.right));
        let c = t.coeff as f64;
        for ((a, x), y) in acc.iter_mut().zip(&l).zip(&r) {
            *a += c * x * y;
        }
    }
    acc
}

fn product(u: &Field) -> Field {
    let (p, px) = (u.physical(), phys(u, (1, 0)));
    let v = p.iter().zip(&px).map(|(a, b)| a * b).collect();
    Field::from_physical(u.grid(), v, u.time()).expect("grid-sized buffer")
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if num == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Relative L² distance between the Leibniz expansion and `∂^α(u u_x)`
/// computed by spectral differentiation of the nodal product.
pub fn check_leibniz(u: &Field, alpha: Order) -> f64 {
    let direct = phys(&product(u), alpha);
    rel_l2(&leibniz_sum(u, alpha), &direct)
}

/// `Δx Δy Σ w(x) Π arrays`.
fn integrate(grid: &Grid, w: &[f64], arrays: &[&[f64]]) -> f64 {
    let nx = grid.nx();
    par::sum_range(grid.ny(), |iy| {
        (0..nx)
            .map(|ix| {
                let i = iy * nx + ix;
                arrays.iter().fold(w[ix], |p, a| p * a[i])
            })
            .sum::<f64>()
    }) * grid.dx()
        * grid.dy()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbpCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
}

/// The five integration-by-parts identities behind the energy identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identity {
    /// `2∫f v v_t = ∂t∫f v² - ∫f_t v²`
    Time = 1,
    /// `2∫f v v_xxx = 3∫f_x v_x² - ∫f_xxx v²`
    Dispersion = 2,
    /// `2∫f v v_x = -∫f_x v²`
    Transport = 3,
    /// `-2∫f v ∂^α∂x⁻¹u_yy = -∫f_x (∂^α∂x⁻¹u_y)²`
    Antiderivative = 4,
    /// `2∫f v ∂^α(u u_x)` by the Leibniz expansion and directly
    Nonlinear = 5,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::Time,
        Identity::Dispersion,
        Identity::Transport,
        Identity::Antiderivative,
        Identity::Nonlinear,
    ];

    pub fn from_index(i: u32) -> Result<Self> {
        Identity::ALL
            .get((i as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("identity index {i} outside 1..=5")))
    }
}

/// Evaluates both sides of `which` for `v = ∂^α u` with the weight at time
/// `t`. The relative error is `|L - R| / (|L| + |R| + ε)` with
/// `ε = 1e-12 ∫|f| v²`.
pub fn ibp_identity_check(u: &Field, f: &WeightFn, t: f64, alpha: Order, which: Identity) -> Result<IbpCheck> {
    let g = u.grid();
    let table = f.table(g);
    let w = table.f(t);
    let wx = table.dx(t, 1);
    let v = phys(u, alpha);
    let d = |o: Order| phys(u, (alpha.0 + o.0, alpha.1 + o.1));
    let (lhs, rhs_) = match which {
        Identity::Time => {
            let ut = rhs(u)?;
            let vt = phys(&ut, alpha);
            let lhs = 2.0 * integrate(g, &w, &[&v, &vt]);
            let h = 1e-2;
            let q = |s: f64| {
                let ws = table.f(s);
                let vs: Vec<f64> = v.iter().zip(&vt).map(|(a, b)| a + (s - t) * b).collect();
                integrate(g, &ws, &[&vs, &vs])
            };
            // sixth-order centred difference: exact for polynomials of degree <= 6
            let c = [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
            let dq = c.iter().map(|&(k, a)| a * (q(t + k * h) - q(t - k * h))).sum::<f64>() / (60.0 * h);
            (lhs, dq - integrate(g, &table.dt(t), &[&v, &v]))
        }
        Identity::Dispersion => {
            let lhs = 2.0 * integrate(g, &w, &[&v, &d((3, 0))]);
            let vx = d((1, 0));
            (lhs, 3.0 * integrate(g, &wx, &[&vx, &vx]) - integrate(g, &table.dx(t, 3), &[&v, &v]))
        }
        Identity::Transport => (2.0 * integrate(g, &w, &[&v, &d((1, 0))]), -integrate(g, &wx, &[&v, &v])),
        Identity::Antiderivative => {
            let uyy = spectral::deriv(u, (0, 2));
            let a = phys(&spectral::inv_dx(&uyy)?, alpha);
            let uy = spectral::inv_dx(&spectral::deriv(u, (0, 1)))?;
            let b = phys(&uy, alpha);
            (-2.0 * integrate(g, &w, &[&v, &a]), -integrate(g, &wx, &[&b, &b]))
        }
        Identity::Nonlinear => {
            let direct = phys(&product(u), alpha);
            let l = leibniz_sum(u, alpha);
            (2.0 * integrate(g, &w, &[&v, &l]), 2.0 * integrate(g, &w, &[&v, &direct]))
        }
    };
    let abs_w: Vec<f64> = w.iter().map(|x| x.abs()).collect();
    let eps = 1e-12 * integrate(g, &abs_w, &[&v, &v]);
    let den = lhs.abs() + rhs_.abs() + eps;
    let rel_error = if den == 0.0 { 0.0 } else { (lhs - rhs_).abs() / den };
    Ok(IbpCheck { lhs, rhs: rhs_, rel_error })
}

/// Terms of the energy identity on one snapshot interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TermBreakdown {
    /// Interval midpoint.
    pub t: f64,
    pub dt: f64,
    pub dA: f64,
    pub B: f64,
    pub C: f64,
    pub D: f64,
    pub E: f64,
    pub residual: f64,
}

impl TermBreakdown {
    pub const COLUMNS: [&'static str; 7] = ["t", "dA", "B", "C", "D", "E", "residual"];

    pub fn row(&self) -> [f64; 7] {
        [self.t, self.dA, self.B, self.C, self.D, self.E, self.residual]
    }
}

fn energy(u: &Field, table: &WeightTable, alpha: Order) -> f64 {
    let v = phys(u, alpha);
    integrate(u.grid(), &table.f(u.time()), &[&v, &v])
}

/// `[B, C, D, E]` at one state.
fn rate_terms(u: &Field, table: &WeightTable, alpha: Order) -> Result<[f64; 4]> {
    let g = u.grid();
    let t = u.time();
    let (f, fx, fxxx, ft) = (table.f(t), table.dx(t, 1), table.dx(t, 3), table.dt(t));
    let theta: Vec<f64> = (0..g.nx()).map(|i| -(ft[i] + fxxx[i] + fx[i])).collect();
    let v = phys(u, alpha);
    let vx = phys(u, (alpha.0 + 1, alpha.1));
    let uy = spectral::inv_dx(&spectral::deriv(u, (0, 1)))?;
    let w = phys(&uy, alpha);
    Ok([
        3.0 * integrate(g, &fx, &[&vx, &vx]),
        integrate(g, &theta, &[&v, &v]),
        -integrate(g, &fx, &[&w, &w]),
        2.0 * integrate(g, &f, &[&v, &leibniz_sum(u, alpha)]),
    ])
}

/// All terms on every adjacent snapshot interval of `traj`. `dA` is the
/// difference quotient of the weighted energy; the other terms are interval
/// means by Simpson's rule, with the midpoint state from cubic Hermite
/// interpolation of the snapshots and their time derivatives.
pub fn main_equality_terms(traj: &Trajectory, f: &WeightFn, alpha: Order) -> Result<Vec<TermBreakdown>> {
    let table = f.table(traj.grid());
    let s = &traj.snapshots;
    if s.len() < 2 {
        return Ok(Vec::new());
    }
    let ends = par::map_range(s.len(), |k| -> Result<(f64, [f64; 4], Field)> {
        Ok((energy(&s[k], &table, alpha), rate_terms(&s[k], &table, alpha)?, rhs(&s[k])?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    par::map_range(s.len() - 1, |k| {
        let (a, b) = (&s[k], &s[k + 1]);
        let (ea, ra, ua_t) = &ends[k];
        let (eb, rb, ub_t) = &ends[k + 1];
        let dt = b.time() - a.time();
        let tm = 0.5 * (a.time() + b.time());
        let mid = Field::lincomb(
            1.0,
            &Field::lincomb(0.5, a, 0.5, b)?,
            dt / 8.0,
            &Field::lincomb(1.0, ua_t, -1.0, ub_t)?,
        )?
        .with_time(tm);
        let rm = rate_terms(&mid, &table, alpha)?;
        let mean: Vec<f64> = (0..4).map(|i| (ra[i] + 4.0 * rm[i] + rb[i]) / 6.0).collect();
        let d_a = (eb - ea) / dt;
        Ok(TermBreakdown {
            t: tm,
            dt,
            dA: d_a,
            B: mean[0],
            C: mean[1],
            D: mean[2],
            E: mean[3],
            residual: d_a + mean.iter().sum::<f64>(),
        })
    })
    .into_iter()
    .collect()
}

/// Time-integrated `|residual|` relative to the largest time-integrated term.
pub fn integrated_relative_residual(terms: &[TermBreakdown]) -> f64 {
    let sum = |f: &dyn Fn(&TermBreakdown) -> f64| terms.iter().map(|t| f(t).abs() * t.dt).sum::<f64>();
    let res = sum(&|t| t.residual);
    let largest = [
        sum(&|t| t.dA),
        sum(&|t| t.B),
        sum(&|t| t.C),
        sum(&|t| t.D),
        sum(&|t| t.E),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if res == 0.0 {
        0.0
    } else {
        res / largest
    }
}

/// Time-integrated signed residual relative to the largest time-integrated
/// term. Since `dA` telescopes, this is `A(T) - A(0)` plus the quadrature of
/// the other terms.
pub fn integrated_signed_residual(terms: &[TermBreakdown]) -> f64 {
    let sum = |f: &dyn Fn(&TermBreakdown) -> f64| terms.iter().map(|t| f(t).abs() * t.dt).sum::<f64>();
    let largest = [sum(&|t| t.dA), sum(&|t| t.B), sum(&|t| t.C), sum(&|t| t.D), sum(&|t| t.E)]
        .into_iter()
        .fold(0.0, f64::max);
    let res: f64 = terms.iter().map(|t| t.residual * t.dt).sum();
    if res == 0.0 {
        0.0
    } else {
        res / largest
    }
}

/// Order `log2((r₀ - r₁) / (r₁ - r₂))` from a quantity at spacings `4h`,
/// `2h`, `h`; a spacing-independent offset cancels.
pub fn three_level_order(r: [f64; 3]) -> f64 {
    ((r[0] - r[1]) / (r[1] - r[2])).abs().log2()
}

/// Per interval: `dA + B <= -C - D + |E| + tol`, the inequality obtained
/// by discarding the sign of the nonlinear term, where `tol` is the largest
/// identity residual of the run.
pub fn main_inequality_monitor(traj: &Trajectory, f: &WeightFn, alpha: Order) -> Result<Vec<bool>> {
    let terms = main_equality_terms(traj, f, alpha)?;
    let tol = terms.iter().map(|t| t.residual.abs()).fold(0.0, f64::max);
    Ok(terms
        .iter()
        .map(|t| t.dA + t.B <= -t.C - t.D + t.E.abs() + tol * (1.0 + 1e-12))
        .collect())
}
