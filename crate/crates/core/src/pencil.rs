//! Line operators applied pencil-by-pencil along one grid axis.
//!
//! A [`LineKernel`] is a periodic symmetric or antisymmetric stencil,
//! optionally followed by a constant-coefficient cyclic tridiagonal solve.
//! Lines are processed in batches laid out `[n][width]` so the inner loops run
//! over contiguous memory: z-lines use whole xy-planes as the batch, y-lines
//! use x-rows of one z-slab, and x-lines are transposed slab by slab.

use crate::error::Result;
use crate::grid::{Axis, Grid};
use crate::tridiag::CyclicFactor;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Parity {
    /// `c_m (f[i+m] + f[i-m])`
    Even,
    /// `c_m (f[i+m] - f[i-m])`
    Odd,
}

#[derive(Debug, Clone)]
pub(crate) struct LineKernel {
    center: f64,
    /// Coefficients for offsets `1..=radius`.
    coeffs: Vec<f64>,
    parity: Parity,
    solver: Option<CyclicFactor>,
}

impl LineKernel {
    /// Explicit stencil with an optional implicit left-hand side
    /// `alpha g[i-1] + g[i] + alpha g[i+1]`.
    pub(crate) fn new(
        n: usize,
        center: f64,
        coeffs: Vec<f64>,
        parity: Parity,
        lhs_alpha: f64,
    ) -> Result<Self> {
        let solver = if lhs_alpha != 0.0 {
            Some(CyclicFactor::new(n, lhs_alpha, 1.0, lhs_alpha)?)
        } else {
            None
        };
        Ok(Self {
            center,
            coeffs,
            parity,
            solver,
        })
    }

    /// Applies the kernel to `n` rows of `width` values with row stride `stride`.
    pub(crate) fn apply_rows(
        &self,
        input: &[f64],
        output: &mut [f64],
        n: usize,
        stride: usize,
        width: usize,
    ) {
        let row = |r: usize| &input[r * stride..r * stride + width];
        for i in 0..n {
            let out = &mut output[i * stride..i * stride + width];
            let c = self.center;
            if c == 0.0 {
                out.iter_mut().for_each(|v| *v = 0.0);
            } else {
                for (o, x) in out.iter_mut().zip(row(i)) {
                    *o = c * x;
                }
            }
            for (m, &cm) in self.coeffs.iter().enumerate() {
                let m = m + 1;
                if cm == 0.0 {
                    continue;
                }
                let p = row((i + m) % n);
                let q = row((i + n - (m % n)) % n);
                match self.parity {
                    Parity::Even => {
                        for ((o, a), b) in out.iter_mut().zip(p).zip(q) {
                            *o += cm * (a + b);
                        }
                    }
                    Parity::Odd => {
                        for ((o, a), b) in out.iter_mut().zip(p).zip(q) {
                            *o += cm * (a - b);
                        }
                    }
                }
            }
        }
        if let Some(s) = &self.solver {
            s.solve_rows(output, stride, width);
        }
    }
}

/// Applies `kernel` to every line of `input` parallel to `axis`.
pub(crate) fn apply_along(
    grid: &Grid,
    axis: Axis,
    kernel: &LineKernel,
    input: &[f64],
    output: &mut [f64],
) {
    let (nx, ny, nz) = (grid.nx(), grid.ny(), grid.nz());
    let slab = nx * ny;
    debug_assert_eq!(input.len(), grid.len());
    debug_assert_eq!(output.len(), grid.len());
    match axis {
        Axis::Z => kernel.apply_rows(input, output, nz, slab, slab),
        Axis::Y => {
            output
                .par_chunks_mut(slab)
                .zip(input.par_chunks(slab))
                .for_each(|(out, inp)| kernel.apply_rows(inp, out, ny, nx, nx));
        }
        Axis::X => {
            output
                .par_chunks_mut(slab)
                .zip(input.par_chunks(slab))
                .for_each_init(
                    || (vec![0.0; slab], vec![0.0; slab]),
                    |(t_in, t_out), (out, inp)| {
                        transpose(inp, t_in, ny, nx);
                        kernel.apply_rows(t_in, t_out, nx, ny, ny);
                        transpose(t_out, out, nx, ny);
                    },
                );
        }
    }
}

// `src` is `[rows][cols]`, `dst` becomes `[cols][rows]`.
fn transpose(src: &[f64], dst: &mut [f64], rows: usize, cols: usize) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
