use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

type Plan = Arc<dyn Fft<f64>>;

fn plan(len: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

pub(crate) struct Plans {
    pub x_fwd: Plan,
    pub x_inv: Plan,
    pub y_fwd: Plan,
    pub y_inv: Plan,
}

struct Inner {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    xi: Vec<f64>,
    eta: Vec<f64>,
    plans: Plans,
}

/// Periodic box `[-Lx, Lx) × [-Ly, Ly)` with `nx × ny` nodes.
///
/// Cheap to clone; clones share wavenumber tables and transform plans.
#[derive(Clone)]
pub struct Grid(Arc<Inner>);

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 16 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("{name} = {n} must be even and at least 16")));
            }
        }
        for (name, l) in [("Lx", lx), ("Ly", ly)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidGrid(format!("{name} = {l} must be positive")));
            }
        }
        let wavenumbers = |n: usize, l: f64| -> Vec<f64> {
            (0..n).map(|j| signed(j, n) as f64 * PI / l).collect()
        };
        Ok(Grid(Arc::new(Inner {
            nx,
            ny,
            lx,
            ly,
            xi: wavenumbers(nx, lx),
            eta: wavenumbers(ny, ly),
            plans: Plans {
                x_fwd: plan(nx, false),
                x_inv: plan(nx, true),
                y_fwd: plan(ny, false),
                y_inv: plan(ny, true),
            },
        })))
    }

    pub fn nx(&self) -> usize {
        self.0.nx
    }

    pub fn ny(&self) -> usize {
        self.0.ny
    }

    pub fn len(&self) -> usize {
        self.0.nx * self.0.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_length_x(&self) -> f64 {
        self.0.lx
    }

    pub fn half_length_y(&self) -> f64 {
        self.0.ly
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.0.lx / self.0.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.0.ly / self.0.ny as f64
    }

    /// Box area `4 Lx Ly`, the Parseval constant.
    pub fn area(&self) -> f64 {
        4.0 * self.0.lx * self.0.ly
    }

    pub fn x(&self, ix: usize) -> f64 {
        -self.0.lx + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        -self.0.ly + iy as f64 * self.dy()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx()).map(|i| self.x(i)).collect()
    }

    /// x-wavenumbers in FFT order.
    pub fn xi(&self) -> &[f64] {
        &self.0.xi
    }

    /// y-wavenumbers in FFT order.
    pub fn eta(&self) -> &[f64] {
        &self.0.eta
    }

    /// Signed lattice index of FFT slot `ix`, in `[-nx/2, nx/2)`.
    pub fn jx(&self, ix: usize) -> i64 {
        signed(ix, self.0.nx)
    }

    pub fn jy(&self, iy: usize) -> i64 {
        signed(iy, self.0.ny)
    }

    pub(crate) fn plans(&self) -> &Plans {
        &self.0.plans
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

fn signed(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl PartialEq for Grid {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
            || (self.0.nx == o.0.nx && self.0.ny == o.0.ny && self.0.lx == o.0.lx && self.0.ly == o.0.ly)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("nx", &self.0.nx)
            .field("ny", &self.0.ny)
            .field("lx", &self.0.lx)
            .field("ly", &self.0.ly)
            .finish()
    }
}
