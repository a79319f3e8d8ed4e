//! Initial-data catalog.

use std::f64::consts::E;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::project_domain;
use crate::spectral::{Field, Grid, DEALIAS_FRAC};
use crate::{Error, Result};

/// Lattice half-width used to normalize the rough spectrum independently of
/// the grid it is sampled on.
const ROUGH_NORM_MODES: i64 = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// `A √(2e) (x'/wx) exp(-x'²/wx² - y²/wy²)` with `x' = x - x0`: zero
    /// x-mean on every line and peak value `A`.
    Gaussian {
        amplitude: f64,
        x_width: f64,
        y_width: f64,
        #[serde(default)]
        x0: f64,
    },
    /// `3c sech²(√c (x - x0) / 2)`, travelling at speed `1 + c`.
    LineSoliton { c: f64, x0: f64 },
    /// Random phases with `|coeff| ∝ (1 + |ξ| + |η|)^(-slope)`, localized
    /// by a Gaussian envelope; the line means are removed with a localized
    /// profile so the datum stays decaying.
    Rough {
        slope: f64,
        seed: u64,
        amplitude: f64,
        envelope_x: f64,
        envelope_y: f64,
        #[serde(default)]
        x0: f64,
    },
    Sum { parts: Vec<InitialData> },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("initial.{name} = {v} must be positive")))
            }
        };
        match self {
            InitialData::Zero => Ok(()),
            InitialData::Gaussian { x_width, y_width, .. } => {
                pos("x_width", *x_width)?;
                pos("y_width", *y_width)
            }
            InitialData::LineSoliton { c, .. } => pos("c", *c),
            InitialData::Rough { slope, envelope_x, envelope_y, .. } => {
                pos("slope", *slope)?;
                pos("envelope_x", *envelope_x)?;
                pos("envelope_y", *envelope_y)
            }
            InitialData::Sum { parts } => parts.iter().try_for_each(InitialData::validate),
        }
    }

    /// The same datum with every random seed replaced by `seed`.
    pub fn with_seed(&self, seed: u64) -> InitialData {
        match self {
            InitialData::Rough { slope, amplitude, envelope_x, envelope_y, x0, .. } => InitialData::Rough {
                slope: *slope,
                seed,
                amplitude: *amplitude,
                envelope_x: *envelope_x,
                envelope_y: *envelope_y,
                x0: *x0,
            },
            InitialData::Sum { parts } => InitialData::Sum { parts: parts.iter().map(|p| p.with_seed(seed)).collect() },
            other => other.clone(),
        }
    }

    pub fn is_random(&self) -> bool {
        match self {
            InitialData::Rough { .. } => true,
            InitialData::Sum { parts } => parts.iter().any(InitialData::is_random),
            _ => false,
        }
    }

    /// Samples the datum on `grid` and projects it into the domain of the
    /// equation.
    pub fn realize(&self, grid: &Grid) -> Result<Field> {
        self.validate()?;
        project_domain(&self.raw(grid)?)
    }

    fn raw(&self, grid: &Grid) -> Result<Field> {
        Ok(match *self {
            InitialData::Zero => Field::zeros(grid),
            InitialData::Gaussian { amplitude, x_width, y_width, x0 } => {
                let a = amplitude * (2.0 * E).sqrt();
                Field::from_fn(grid, 0.0, move |x, y| {
                    let s = (x - x0) / x_width;
                    let r = y / y_width;
                    a * s * (-s * s - r * r).exp()
                })
                .into_spectral()
                .remove_x_mean()
            }
            InitialData::LineSoliton { c, x0 } => Field::from_fn(grid, 0.0, move |x, _| line_soliton(c, x0, 0.0, x)),
            InitialData::Rough { slope, seed, amplitude, envelope_x, envelope_y, x0 } => {
                rough(grid, slope, seed, amplitude, envelope_x, envelope_y, x0)?
            }
            InitialData::Sum { ref parts } => {
                let mut acc = Field::zeros(grid);
                for p in parts {
                    acc = Field::lincomb(1.0, &acc, 1.0, &p.raw(grid)?)?;
                }
                acc
            }
        })
    }
}

/// The travelling line soliton at time `t`.
pub fn line_soliton(c: f64, x0: f64, t: f64, x: f64) -> f64 {
    let z = 0.5 * c.sqrt() * (x - x0 - (1.0 + c) * t);
    3.0 * c / z.cosh().powi(2)
}

fn mode_rng(seed: u64, j: i64, m: i64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    // one stream per lattice mode so coarse and fine grids share coefficients
    r.set_stream(((j as u64) << 32) ^ (m as u64 & 0xffff_ffff));
    r
}

fn rough_weight(xi: f64, eta: f64, slope: f64) -> f64 {
    (1.0 + xi.abs() + eta.abs()).powf(-slope)
}

#[allow(clippy::too_many_arguments)]
fn rough(
    grid: &Grid,
    slope: f64,
    seed: u64,
    amplitude: f64,
    ex: f64,
    ey: f64,
    x0: f64,
) -> Result<Field> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (kx, ky) = (grid.xi()[1], grid.eta()[1]);
    let norm: f64 = (-ROUGH_NORM_MODES..=ROUGH_NORM_MODES)
        .flat_map(|j| (-ROUGH_NORM_MODES..=ROUGH_NORM_MODES).map(move |m| (j, m)))
        .map(|(j, m)| rough_weight(j as f64 * kx, m as f64 * ky, slope).powi(2))
        .sum::<f64>()
        .sqrt();
    // Keep the random part inside the dealiased band so every grid resolves
    // its own modes exactly.
    let jmax = (DEALIAS_FRAC * nx as f64 / 2.0).floor() as i64;
    let mmax = (DEALIAS_FRAC * ny as f64 / 2.0).floor() as i64;
    let mut c = vec![Complex64::default(); grid.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            let (j, m) = (grid.jx(ix), grid.jy(iy));
            if j.abs() > jmax || m.abs() > mmax {
                continue;
            }
            // canonical representative of the pair (j, m) ~ (-j, -m)
            let flip = j < 0 || (j == 0 && m < 0);
            let (cj, cm) = if flip { (-j, -m) } else { (j, m) };
            let phase = if cj == 0 && cm == 0 {
                0.0
            } else {
                mode_rng(seed, cj, cm).random::<f64>() * std::f64::consts::TAU
            };
            let w = amplitude * rough_weight(grid.xi()[ix], grid.eta()[iy], slope) / norm;
            let v = Complex64::from_polar(w, phase);
            c[iy * nx + ix] = if flip { v.conj() } else { v };
        }
    }
    let r = Field::from_spectral(grid, c, 0.0)?;
    let rp = r.physical();
    let mut v = vec![0.0; grid.len()];
    let dx = grid.dx();
    let bump: Vec<f64> = (0..nx)
        .map(|ix| {
            let s = (grid.x(ix) - x0) / ex;
            (-s * s).exp()
        })
        .collect();
    let bump_sum: f64 = bump.iter().sum();
    for iy in 0..ny {
        let y = grid.y(iy) / ey;
        let ey_fac = (-y * y).exp();
        let row = &mut v[iy * nx..(iy + 1) * nx];
        for ix in 0..nx {
            row[ix] = rp[iy * nx + ix] * bump[ix] * ey_fac;
        }
        let mean: f64 = row.iter().sum::<f64>() * dx;
        for ix in 0..nx {
            row[ix] -= mean * bump[ix] / (bump_sum * dx);
        }
    }
    Ok(Field::from_physical(grid, v, 0.0)?.into_spectral().remove_x_mean())
}

/// Random real field with independent standard-normal coefficients on
/// `|j| <= jmax`, `|m| <= mmax`, Hermitian-symmetrized. With `zero_x_mean`
/// the `ξ = 0` column is left empty.
pub fn band_limited(grid: &Grid, jmax: i64, mmax: i64, seed: u64, zero_x_mean: bool) -> Field {
    let (nx, ny) = (grid.nx(), grid.ny());
    assert!(jmax < nx as i64 / 2 && mmax < ny as i64 / 2, "band must exclude the Nyquist slots");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![Complex64::default(); grid.len()];
    let slot = |j: i64, n: usize| j.rem_euclid(n as i64) as usize;
    for j in 0..=jmax {
        if zero_x_mean && j == 0 {
            continue;
        }
        for m in -mmax..=mmax {
            if j == 0 && m < 0 {
                continue;
            }
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if j == 0 && m == 0 { 0.0 } else { rng.sample(StandardNormal) };
            let v = Complex64::new(re, im);
            c[slot(m, ny) * nx + slot(j, nx)] = v;
            c[slot(-m, ny) * nx + slot(-j, nx)] = v.conj();
        }
    }
    let f = Field::from_spectral(grid, c, 0.0).expect("grid-sized buffer");
    if zero_x_mean {
        f.remove_x_mean()
    } else {
        f
    }
}
