use num_complex::Complex64;

use super::{Field, Grid};
use crate::{par, Error, Result};

/// Derivative orders `(a1, a2)` for `∂x^a1 ∂y^a2`.
pub type Order = (u32, u32);

/// Two-thirds rule.
pub const DEALIAS_FRAC: f64 = 2.0 / 3.0;

/// Largest admissible `ξ = 0` energy fraction for the inverse x-derivative.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// One-axis factor `(i k)^order`, with negative orders meaning repeated
/// antiderivatives. The zero wavenumber maps to 1 for order 0 and to 0
/// otherwise; odd orders vanish at the Nyquist slot so real fields stay real.
pub fn axis_factor(k: f64, nyquist: bool, order: i32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if k == 0.0 || (nyquist && order % 2 != 0) {
        return Complex64::default();
    }
    let unit = match order.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    unit * k.powi(order)
}

/// Full multiplier table for `(iξ)^ax (iη)^ay` in FFT order.
pub fn multiplier(grid: &Grid, ax: i32, ay: u32) -> Vec<Complex64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mx: Vec<Complex64> = (0..nx)
        .map(|i| axis_factor(grid.xi()[i], i == nx / 2, ax))
        .collect();
    let my: Vec<Complex64> = (0..ny)
        .map(|i| axis_factor(grid.eta()[i], i == ny / 2, ay as i32))
        .collect();
    let mut m = vec![Complex64::default(); nx * ny];
    for (iy, row) in m.chunks_mut(nx).enumerate() {
        for (ix, v) in row.iter_mut().enumerate() {
            *v = my[iy] * mx[ix];
        }
    }
    m
}

pub(crate) fn apply(u: &Field, ax: i32, ay: u32) -> Field {
    if ax == 0 && ay == 0 {
        return u.clone();
    }
    let nx = u.grid().nx();
    let mx: Vec<Complex64> = (0..nx)
        .map(|i| axis_factor(u.grid().xi()[i], i == nx / 2, ax))
        .collect();
    let ny = u.grid().ny();
    let my: Vec<Complex64> = (0..ny)
        .map(|i| axis_factor(u.grid().eta()[i], i == ny / 2, ay as i32))
        .collect();
    let zero_mean = u.is_zero_x_mean() || ax != 0;
    u.map_coeffs(|i, c| c * mx[i % nx] * my[i / nx])
        .flag_zero_x_mean(zero_mean)
}

/// `∂x^a1 ∂y^a2 u`, exact for band-limited input.
pub fn deriv(u: &Field, order: Order) -> Field {
    apply(u, order.0 as i32, order.1)
}

/// `∂x⁻¹ u` with symbol `1/(iξ)`. Fails when the `ξ = 0` column carries more
/// than [`ZERO_MODE_TOL`] of the energy.
pub fn inv_dx(u: &Field) -> Result<Field> {
    let fraction = u.zero_mode_fraction();
    if fraction > ZERO_MODE_TOL {
        return Err(Error::NotInDomain { fraction, tolerance: ZERO_MODE_TOL });
    }
    Ok(apply(u, -1, 0).flag_zero_x_mean(true))
}

fn keep_mask(n: usize, frac: f64, signed: impl Fn(usize) -> i64) -> Vec<bool> {
    let cut = frac * n as f64 / 2.0;
    (0..n).map(|i| (signed(i).abs() as f64) <= cut).collect()
}

/// Zeroes coefficients with `|j| > frac nx/2` or `|m| > frac ny/2`.
pub fn dealias_coeffs(grid: &Grid, c: &mut [Complex64], frac: f64) {
    let nx = grid.nx();
    let kx = keep_mask(nx, frac, |i| grid.jx(i));
    let ky = keep_mask(grid.ny(), frac, |i| grid.jy(i));
    par::for_each_chunk_mut(c, nx, |iy, row| {
        if !ky[iy] {
            row.iter_mut().for_each(|v| *v = Complex64::default());
            return;
        }
        for (v, &keep) in row.iter_mut().zip(&kx) {
            if !keep {
                *v = Complex64::default();
            }
        }
    });
}

pub fn dealias(u: &Field, frac: f64) -> Field {
    let mut c = u.spectral().into_owned();
    dealias_coeffs(u.grid(), &mut c, frac);
    Field::from_spectral(u.grid(), c, u.time())
        .expect("same grid")
        .flag_zero_x_mean(u.is_zero_x_mean())
}

/// `∫ u v` from the coefficients (Parseval).
pub fn spectral_inner(u: &Field, v: &Field) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let (cu, cv) = (u.spectral(), v.spectral());
    let nx = u.grid().nx();
    let s = par::sum_range(u.grid().ny(), |iy| {
        let r = iy * nx..(iy + 1) * nx;
        cu[r.clone()]
            .iter()
            .zip(&cv[r])
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum::<f64>()
    });
    Ok(s * u.grid().area())
}

/// Rectangle-rule quadrature of `w(x) u v` over `|x| <= window Lx` and the
/// full y extent. `w` holds one value per x-node; `None` means `w = 1`.
pub fn weighted_integral(u: &Field, v: &Field, w: Option<&[f64]>, window: f64) -> Result<f64> {
    let g = u.grid();
    if g != v.grid() {
        return Err(Error::GridMismatch);
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidArgument(format!("window {window} outside (0, 1]")));
    }
    let nx = g.nx();
    if let Some(w) = w {
        if w.len() != nx {
            return Err(Error::InvalidArgument(format!("weight has {} values, grid has nx = {nx}", w.len())));
        }
    }
    let limit = window * g.half_length_x() * (1.0 + 1e-12);
    let cols: Vec<usize> = (0..nx).filter(|&i| g.x(i).abs() <= limit).collect();
    let (pu, pv) = (u.physical(), v.physical());
    let s = par::sum_range(g.ny(), |iy| {
        let base = iy * nx;
        cols.iter()
            .map(|&ix| {
                let p = pu[base + ix] * pv[base + ix];
                match w {
                    Some(w) => w[ix] * p,
                    None => p,
                }
            })
            .sum::<f64>()
    });
    Ok(s * g.dx() * g.dy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pi_grid() -> Grid {
        Grid::new(16, 16, PI, PI).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.physical()
            .iter()
            .zip(b.physical().iter())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn derivative_of_sine() {
        let g = pi_grid();
        let u = Field::from_fn(&g, 0.0, |x, _| x.sin());
        let du = deriv(&u, (1, 0));
        assert!(max_diff(&du, &Field::from_fn(&g, 0.0, |x, _| x.cos())) < 1e-12);
        assert!(max_diff(&deriv(&u, (0, 0)), &u) == 0.0);
    }

    #[test]
    fn second_y_derivative() {
        let g = pi_grid();
        let u = Field::from_fn(&g, 0.0, |x, y| x.sin() * (2.0 * y).cos());
        let d = deriv(&u, (0, 2));
        assert!(max_diff(&d, &u.scale(-4.0)) < 1e-12);
    }

    #[test]
    fn antiderivatives() {
        let g = pi_grid();
        let s = Field::from_fn(&g, 0.0, |x, _| x.sin());
        let c = Field::from_fn(&g, 0.0, |x, _| x.cos());
        assert!(max_diff(&inv_dx(&s).unwrap(), &c.scale(-1.0)) < 1e-12);
        assert!(max_diff(&inv_dx(&c).unwrap(), &s) < 1e-12);
        let one = Field::from_fn(&g, 0.0, |_, _| 1.0);
        assert!(matches!(inv_dx(&one), Err(Error::NotInDomain { .. })));
    }

    #[test]
    fn dealias_kills_upper_third() {
        let g = pi_grid();
        let j = (g.nx() / 2 - 1) as f64;
        let u = Field::from_fn(&g, 0.0, |x, _| (j * x).cos());
        assert!(dealias(&u, DEALIAS_FRAC).max_abs() < 1e-14);
        let low = Field::from_fn(&g, 0.0, |x, y| (2.0 * x).sin() * y.cos());
        assert!(max_diff(&dealias(&low, DEALIAS_FRAC), &low) < 1e-14);
    }

    #[test]
    fn quadrature_of_sine_squared() {
        let g = pi_grid();
        let u = Field::from_fn(&g, 0.0, |x, _| x.sin());
        let v = weighted_integral(&u, &u, None, 1.0).unwrap();
        assert!((v - 2.0 * PI * PI).abs() < 1e-12);
        let w = Field::from_fn(&g, 0.0, |x, y| (2.0 * x).sin() * y.cos());
        assert!(weighted_integral(&u, &w, None, 1.0).unwrap().abs() < 1e-12);
        assert!((spectral_inner(&u, &u).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn nyquist_odd_derivative_is_zero() {
        let f = axis_factor(3.0, true, 1);
        assert_eq!(f, Complex64::default());
        assert_eq!(axis_factor(3.0, true, 2), Complex64::new(-9.0, 0.0));
        assert_eq!(axis_factor(0.0, false, -1), Complex64::default());
        assert_eq!(axis_factor(2.0, false, -1), Complex64::new(0.0, -0.5));
    }
}
