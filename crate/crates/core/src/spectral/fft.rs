use num_complex::Complex64;

use super::Grid;
use crate::par;

const ROWS_PER_TASK: usize = 8;

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::default(); rows * cols];
    par::for_each_chunk_mut(&mut dst, rows, |c, out| {
        for (r, v) in out.iter_mut().enumerate() {
            *v = src[r * cols + c];
        }
    });
    dst
}

fn rows(data: &mut [Complex64], len: usize, fft: &dyn rustfft::Fft<f64>) {
    par::for_each_chunk_mut(data, len * ROWS_PER_TASK, |_, block| fft.process(block));
}

/// In-place 2-D forward transform, normalized by `1/(nx ny)`.
pub(crate) fn forward(grid: &Grid, data: &mut Vec<Complex64>) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let p = grid.plans();
    rows(data, nx, p.x_fwd.as_ref());
    let mut t = transpose(data, ny, nx);
    rows(&mut t, ny, p.y_fwd.as_ref());
    let scale = 1.0 / (nx * ny) as f64;
    *data = transpose(&t, nx, ny);
    par::for_each_chunk_mut(data, nx * ROWS_PER_TASK, |_, block| {
        block.iter_mut().for_each(|v| *v *= scale)
    });
}

/// In-place 2-D inverse transform (no normalization).
pub(crate) fn inverse(grid: &Grid, data: &mut Vec<Complex64>) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let p = grid.plans();
    let mut t = transpose(data, ny, nx);
    rows(&mut t, ny, p.y_inv.as_ref());
    *data = transpose(&t, nx, ny);
    rows(data, nx, p.x_inv.as_ref());
}
