//! Norm families of the energy method.
//!
//! Unweighted norms are evaluated from the Fourier coefficients over the
//! whole box; weighted parts use the weight's interior window.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{domain_defect, rhs, Trajectory};
use crate::spectral::{self, inv_dx, weighted_integral, Field, Grid, ZERO_MODE_TOL};
use crate::weights::{WeightFn, WeightSpec};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    X0,
    XN,
    YN,
    ZtN,
    HtildeN,
    ZL,
    L2,
    Linf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: NormKind,
    pub order: u32,
    /// Square root of the sum of the components.
    pub value: f64,
    pub components: Vec<Component>,
    pub window: Option<f64>,
    pub weight: Option<WeightSpec>,
}

impl NormReport {
    fn quadratic(kind: NormKind, order: u32, components: Vec<Component>) -> Self {
        let sq: f64 = components.iter().map(|c| c.value).sum();
        NormReport { kind, order, value: sq.sqrt(), components, window: None, weight: None }
    }

    pub fn squared(&self) -> f64 {
        self.value * self.value
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|c| c.name == name).map(|c| c.value)
    }
}

fn comp(name: impl Into<String>, value: f64) -> Component {
    Component { name: name.into(), value }
}

/// Multi-indices `(a1, a2)` with `a1 + a2 == n`.
pub fn indices_of_order(n: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=n).rev().map(move |a| (a, n - a))
}

/// Multi-indices with `a1 + a2 <= n`, ordered by total order.
pub fn indices_up_to(n: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=n).flat_map(indices_of_order)
}

/// `∫ (∂x^ax ∂y^ay u)²` by Parseval; `ax < 0` means antiderivatives.
pub fn spectral_sq(u: &Field, ax: i32, ay: u32) -> f64 {
    let g = u.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mx: Vec<f64> = (0..nx)
        .map(|i| spectral::axis_factor(g.xi()[i], i == nx / 2, ax).norm_sqr())
        .collect();
    let my: Vec<f64> = (0..ny)
        .map(|i| spectral::axis_factor(g.eta()[i], i == ny / 2, ay as i32).norm_sqr())
        .collect();
    let c = u.spectral();
    par::sum_range(ny, |iy| {
        let row = &c[iy * nx..(iy + 1) * nx];
        my[iy] * row.iter().zip(&mx).map(|(v, m)| m * v.norm_sqr()).sum::<f64>()
    }) * g.area()
}

fn check_domain(u: &Field) -> Result<()> {
    let fraction = domain_defect(u);
    if fraction > ZERO_MODE_TOL {
        return Err(Error::NotInDomain { fraction, tolerance: ZERO_MODE_TOL });
    }
    Ok(())
}

fn label(a: (u32, u32), what: &str) -> String {
    format!("d{}{}:{what}", a.0, a.1)
}

fn x_components(u: &Field, n: u32) -> Result<Vec<Component>> {
    check_domain(u)?;
    let mut out = vec![comp("u", spectral_sq(u, 0, 0))];
    for a in indices_up_to(n) {
        out.push(comp(label(a, "u_xxx"), spectral_sq(u, a.0 as i32 + 3, a.1)));
        out.push(comp(label(a, "dx^-1 u_yy"), spectral_sq(u, a.0 as i32 - 1, a.1 + 2)));
    }
    Ok(out)
}

/// `∫ u² + Σ_{|α|<=N} [(∂^α u_xxx)² + (∂^α ∂x⁻¹u_yy)²]`.
pub fn x_norm(u: &Field, n: u32) -> Result<NormReport> {
    let kind = if n == 0 { NormKind::X0 } else { NormKind::XN };
    Ok(NormReport::quadratic(kind, n, x_components(u, n)?))
}

/// The `Xᴺ` components plus `Σ_{|α|<=N} (∂^α u_yy)²`.
pub fn y_norm(u: &Field, n: u32) -> Result<NormReport> {
    let mut c = x_components(u, n)?;
    for a in indices_up_to(n) {
        c.push(comp(label(a, "u_yy"), spectral_sq(u, a.0 as i32, a.1 + 2)));
    }
    Ok(NormReport::quadratic(NormKind::YN, n, c))
}

/// Instantaneous integrand of the `Z_tᴺ` norm. `∫u_t²` is counted once
/// when `N = 0`.
pub fn zt_components(u: &Field, u_t: &Field, n: u32) -> Vec<Component> {
    let mut c = vec![comp("u", spectral_sq(u, 0, 0))];
    for a in indices_of_order(n) {
        c.push(comp(label(a, "u_xxx"), spectral_sq(u, a.0 as i32 + 3, a.1)));
        c.push(comp(label(a, "u_yy"), spectral_sq(u, a.0 as i32, a.1 + 2)));
    }
    c.push(comp("u_t", spectral_sq(u_t, 0, 0)));
    if n > 0 {
        for a in indices_of_order(n) {
            c.push(comp(label(a, "u_t"), spectral_sq(u_t, a.0 as i32, a.1)));
        }
    }
    c
}

/// `sup_t` of the `Z_tᴺ` integrand over snapshots with the given rates.
/// The reported components are those of the maximizing snapshot.
pub fn zt_norm_with_rates(snapshots: &[Field], rates: &[Field], n: u32) -> Result<NormReport> {
    if snapshots.len() != rates.len() || snapshots.is_empty() {
        return Err(Error::InvalidArgument("need one rate per snapshot".into()));
    }
    let per = par::map_range(snapshots.len(), |k| zt_components(&snapshots[k], &rates[k], n));
    let best = per
        .into_iter()
        .max_by(|a, b| {
            let s = |c: &Vec<Component>| c.iter().map(|x| x.value).sum::<f64>();
            s(a).total_cmp(&s(b))
        })
        .expect("non-empty");
    Ok(NormReport::quadratic(NormKind::ZtN, n, best))
}

/// `Z_Tᴺ` of a nonlinear trajectory, with `u_t` taken from the equation.
pub fn zt_norm(traj: &Trajectory, n: u32) -> Result<NormReport> {
    let rates = traj.snapshots.iter().map(rhs).collect::<Result<Vec<_>>>()?;
    zt_norm_with_rates(&traj.snapshots, &rates, n)
}

/// `Σ_{|α|<=N} ∫(∂^α u)² + ∫ f (∂xᴺ u)²`, the weighted part over the
/// weight's interior window at time `t`.
pub fn weighted_sobolev_norm(u: &Field, n: u32, f: &WeightFn, t: f64) -> Result<NormReport> {
    let mut c: Vec<Component> = indices_up_to(n)
        .map(|a| comp(label(a, "u"), spectral_sq(u, a.0 as i32, a.1)))
        .collect();
    c.push(comp(format!("f*(dx^{n} u)^2"), weighted_top(u, n, f, t)?));
    let mut r = NormReport::quadratic(NormKind::HtildeN, n, c);
    r.window = Some(f.window());
    r.weight = Some(f.spec());
    Ok(r)
}

fn weighted_top(u: &Field, n: u32, f: &WeightFn, t: f64) -> Result<f64> {
    let d = spectral::deriv(u, (n, 0));
    let w = f.table(u.grid()).f(t);
    weighted_integral(&d, &d, Some(&w), f.window())
}

/// `∫ u² + u_xxxx² + (∂x⁻¹u_yy)² + u_yy² + Σ_{|α|<=L} (∂^α u)² + f (∂xᴸ u)²`
/// with the weight taken at `u.time()`.
pub fn zl_norm(u: &Field, l: u32, f: &WeightFn) -> Result<NormReport> {
    check_domain(u)?;
    let mut c = vec![
        comp("u", spectral_sq(u, 0, 0)),
        comp("u_xxxx", spectral_sq(u, 4, 0)),
        comp("dx^-1 u_yy", spectral_sq(u, -1, 2)),
        comp("u_yy", spectral_sq(u, 0, 2)),
    ];
    for a in indices_up_to(l) {
        c.push(comp(label(a, "u"), spectral_sq(u, a.0 as i32, a.1)));
    }
    c.push(comp(format!("f*(dx^{l} u)^2"), weighted_top(u, l, f, u.time())?));
    let mut r = NormReport::quadratic(NormKind::ZL, l, c);
    r.window = Some(f.window());
    r.weight = Some(f.spec());
    Ok(r)
}

pub fn l2_norm(u: &Field) -> NormReport {
    NormReport::quadratic(NormKind::L2, 0, vec![comp("u", spectral_sq(u, 0, 0))])
}

pub fn linf_norm(u: &Field) -> NormReport {
    let m = u.max_abs();
    NormReport {
        kind: NormKind::Linf,
        order: 0,
        value: m,
        components: vec![comp("max|u|", m)],
        window: None,
        weight: None,
    }
}

/// `max|u| / (∫ u² + u_xx² + u_y²)^(1/2)`.
pub fn linf_embedding_ratio(u: &Field) -> Result<f64> {
    let den = spectral_sq(u, 0, 0) + spectral_sq(u, 2, 0) + spectral_sq(u, 0, 1);
    if den == 0.0 {
        return Err(Error::InvalidArgument("embedding ratio of the zero field".into()));
    }
    Ok(u.max_abs() / den.sqrt())
}

/// `(∫|u|ⁿ)^(1/n) / (∫ u² + u_x² + (∂x⁻¹u_y)²)^(1/2)` for `2 <= n < 6`.
pub fn anisotropic_ln_ratio(u: &Field, n: f64) -> Result<f64> {
    if !(2.0..6.0).contains(&n) {
        return Err(Error::InvalidArgument(format!("exponent {n} outside [2, 6)")));
    }
    inv_dx(&spectral::deriv(u, (0, 1)))?;
    let den = spectral_sq(u, 0, 0) + spectral_sq(u, 1, 0) + spectral_sq(u, -1, 1);
    if den == 0.0 {
        return Err(Error::InvalidArgument("embedding ratio of the zero field".into()));
    }
    let g = u.grid();
    let p = u.physical();
    let nx = g.nx();
    let s = par::sum_range(g.ny(), |iy| p[iy * nx..(iy + 1) * nx].iter().map(|v| v.abs().powf(n)).sum::<f64>());
    Ok((s * g.dx() * g.dy()).powf(1.0 / n) / den.sqrt())
}

/// One member of the embedding corpora: `a s exp(-s² - r²)` with
/// `s = (x - x₀) / w`, `r = (y - y₀) / v`, widths log-uniform in `[1/2, 2]`,
/// centre uniform in the inner half of the box, truncated to
/// `|j|, |m| <= band` and stripped of its line means.
pub fn corpus_field(grid: &Grid, band: i64, rng: &mut impl Rng) -> Field {
    let (lx, ly) = (grid.half_length_x(), grid.half_length_y());
    let a: f64 = rng.random_range(-1.0..1.0);
    let x0 = rng.random_range(-0.5 * lx..0.5 * lx);
    let y0 = rng.random_range(-0.5 * ly..0.5 * ly);
    let w = rng.random_range(-LN_2..LN_2).exp();
    let v = rng.random_range(-LN_2..LN_2).exp();
    let u = Field::from_fn(grid, 0.0, |x, y| {
        let (s, r) = ((x - x0) / w, (y - y0) / v);
        a * s * (-s * s - r * r).exp()
    });
    let nx = grid.nx();
    let c = u
        .spectral()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if grid.jx(i % nx).abs() > band || grid.jy(i / nx).abs() > band {
                Complex64::default()
            } else {
                *c
            }
        })
        .collect();
    Field::from_spectral(grid, c, 0.0).expect("grid-sized buffer").remove_x_mean()
}

/// Largest [`linf_embedding_ratio`] and [`anisotropic_ln_ratio`] (with
/// exponent `n`) over `count` corpus fields drawn from `seed`.
pub fn embedding_corpus_maxima(grid: &Grid, count: usize, band: i64, n: f64, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<Field> = (0..count).map(|_| corpus_field(grid, band, &mut rng)).collect();
    let ratios = par::map_range(count, |k| -> Result<(f64, f64)> {
        Ok((linf_embedding_ratio(&fields[k])?, anisotropic_ln_ratio(&fields[k], n)?))
    });
    ratios.into_iter().try_fold((0f64, 0f64), |acc, r| {
        let (a, b) = r?;
        Ok((acc.0.max(a), acc.1.max(b)))
    })
}
