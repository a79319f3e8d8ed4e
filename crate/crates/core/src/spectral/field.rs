use std::borrow::Cow;

use num_complex::Complex64;

use super::{fft, Grid};
use crate::{par, Error, Result};

#[derive(Clone, Debug)]
enum Values {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A real scalar field at one time, held either as nodal values or as
/// Fourier coefficients.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Values,
    time: f64,
    zero_x_mean: bool,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: grid.clone(),
            values: Values::Spectral(vec![Complex64::default(); grid.len()]),
            time: 0.0,
            zero_x_mean: true,
        }
    }

    pub fn from_physical(grid: &Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} nodal values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field {
            grid: grid.clone(),
            values: Values::Physical(values),
            time,
            zero_x_mean: false,
        })
    }

    /// Coefficients must be Hermitian-symmetric for the field to be real.
    pub fn from_spectral(grid: &Grid, coeffs: Vec<Complex64>, time: f64) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Field {
            grid: grid.clone(),
            values: Values::Spectral(coeffs),
            time,
            zero_x_mean: false,
        })
    }

    /// Samples `f(x, y)` at the grid nodes.
    pub fn from_fn<F>(grid: &Grid, time: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let nx = grid.nx();
        let mut v = vec![0.0; grid.len()];
        par::for_each_chunk_mut(&mut v, nx, |iy, row| {
            let y = grid.y(iy);
            for (ix, val) in row.iter_mut().enumerate() {
                *val = f(grid.x(ix), y);
            }
        });
        Field {
            grid: grid.clone(),
            values: Values::Physical(v),
            time,
            zero_x_mean: false,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    /// True when the field is known to have no `ξ = 0` content.
    pub fn is_zero_x_mean(&self) -> bool {
        self.zero_x_mean
    }

    pub(crate) fn with_zero_x_mean(self, on: bool) -> Self {
        self.flag_zero_x_mean(on)
    }

    pub(crate) fn flag_zero_x_mean(mut self, on: bool) -> Self {
        self.zero_x_mean = on;
        self
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.values, Values::Spectral(_))
    }

    pub fn physical(&self) -> Cow<'_, [f64]> {
        match &self.values {
            Values::Physical(v) => Cow::Borrowed(v),
            Values::Spectral(c) => Cow::Owned(to_physical(&self.grid, c.clone())),
        }
    }

    pub fn spectral(&self) -> Cow<'_, [Complex64]> {
        match &self.values {
            Values::Spectral(c) => Cow::Borrowed(c),
            Values::Physical(v) => Cow::Owned(to_spectral(&self.grid, v)),
        }
    }

    pub fn into_spectral(self) -> Self {
        match self.values {
            Values::Spectral(_) => self,
            Values::Physical(ref v) => Field {
                values: Values::Spectral(to_spectral(&self.grid, v)),
                ..self
            },
        }
    }

    pub fn into_physical(self) -> Self {
        match self.values {
            Values::Physical(_) => self,
            Values::Spectral(c) => Field {
                values: Values::Physical(to_physical(&self.grid, c)),
                ..self
            },
        }
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        match self.values {
            Values::Spectral(c) => c,
            Values::Physical(v) => to_spectral(&self.grid, &v),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ u²` over the whole box.
    pub fn l2_sq(&self) -> f64 {
        super::spectral_inner(self, self).expect("same grid")
    }

    pub fn scale(&self, a: f64) -> Field {
        self.map_coeffs(|_, c| c * a).flag_zero_x_mean(self.zero_x_mean)
    }

    /// `a u + b v`, in spectral form.
    pub fn lincomb(a: f64, u: &Field, b: f64, v: &Field) -> Result<Field> {
        if u.grid != v.grid {
            return Err(Error::GridMismatch);
        }
        let (cu, cv) = (u.spectral(), v.spectral());
        let c = cu.iter().zip(cv.iter()).map(|(x, y)| x * a + y * b).collect();
        Ok(Field {
            grid: u.grid.clone(),
            values: Values::Spectral(c),
            time: u.time,
            zero_x_mean: u.zero_x_mean && v.zero_x_mean,
        })
    }

    pub fn sub(&self, v: &Field) -> Result<Field> {
        Field::lincomb(1.0, self, -1.0, v)
    }

    /// Applies `f(index, coeff)` to every coefficient.
    pub(crate) fn map_coeffs<F: Fn(usize, Complex64) -> Complex64>(&self, f: F) -> Field {
        let c = self.spectral().iter().enumerate().map(|(i, &v)| f(i, v)).collect();
        Field {
            grid: self.grid.clone(),
            values: Values::Spectral(c),
            time: self.time,
            zero_x_mean: false,
        }
    }

    /// Energy in the `ξ = 0` column relative to total energy (0 for the
    /// zero field).
    pub fn zero_mode_fraction(&self) -> f64 {
        let c = self.spectral();
        let nx = self.grid.nx();
        let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let zero: f64 = (0..self.grid.ny()).map(|iy| c[iy * nx].norm_sqr()).sum();
        zero / total
    }

    /// Removes the x-mean of every y-line.
    pub fn remove_x_mean(&self) -> Field {
        let nx = self.grid.nx();
        self.map_coeffs(|i, c| if i % nx == 0 { Complex64::default() } else { c })
            .flag_zero_x_mean(true)
    }

    /// Rechecks the zero-x-mean flag from the coefficients.
    pub fn refresh_zero_x_mean(self) -> Field {
        let nx = self.grid.nx();
        let ok = {
            let c = self.spectral();
            (0..self.grid.ny()).all(|iy| c[iy * nx] == Complex64::default())
        };
        self.flag_zero_x_mean(ok)
    }
}

pub(crate) fn to_spectral(grid: &Grid, v: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::forward(grid, &mut c);
    c
}

pub(crate) fn to_physical(grid: &Grid, mut c: Vec<Complex64>) -> Vec<f64> {
    fft::inverse(grid, &mut c);
    c.into_iter().map(|z| z.re).collect()
}
