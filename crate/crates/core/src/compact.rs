//! Sixth-order compact first derivatives and the eighth-order implicit
//! solution filter on periodic lines.

use crate::error::{Error, Result};
use crate::field::{ScalarField, TensorField, VectorField};
use crate::grid::{Axis, Grid};
use crate::pencil::{apply_along, LineKernel, Parity};

/// Tridiagonal compact first-derivative scheme
/// `alpha f'[i-1] + f'[i] + alpha f'[i+1] = a (f[i+1]-f[i-1])/(2h) + b (f[i+2]-f[i-2])/(4h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactScheme {
    pub lhs_alpha: f64,
    pub a: f64,
    pub b: f64,
    pub order: u32,
}

impl CompactScheme {
    pub const SIXTH_ORDER: CompactScheme = CompactScheme {
        lhs_alpha: 1.0 / 3.0,
        a: 14.0 / 9.0,
        b: 1.0 / 9.0,
        order: 6,
    };

    /// Modified wavenumber `k' h` at `k h = omega`.
    pub fn modified_wavenumber(&self, omega: f64) -> f64 {
        (self.a * omega.sin() + 0.5 * self.b * (2.0 * omega).sin())
            / (1.0 + 2.0 * self.lhs_alpha * omega.cos())
    }

    fn kernel(&self, n: usize, h: f64) -> Result<LineKernel> {
        LineKernel::new(
            n,
            0.0,
            vec![self.a / (2.0 * h), self.b / (4.0 * h)],
            Parity::Odd,
            self.lhs_alpha,
        )
    }
}

impl Default for CompactScheme {
    fn default() -> Self {
        Self::SIXTH_ORDER
    }
}

fn check_axes(grid: &Grid, min: usize) -> Result<()> {
    for axis in Axis::ALL {
        if grid.n(axis) < min {
            return Err(Error::AxisTooSmall {
                axis,
                n: grid.n(axis),
                min,
            });
        }
    }
    Ok(())
}

/// Compact differentiation operator bound to one grid, with per-axis factors
/// computed once.
#[derive(Debug, Clone)]
pub struct Differentiator {
    grid: Grid,
    kernels: [LineKernel; 3],
}

impl Differentiator {
    pub const MIN_POINTS: usize = 8;

    pub fn new(grid: Grid) -> Result<Self> {
        Self::with_scheme(grid, CompactScheme::SIXTH_ORDER)
    }

    pub fn with_scheme(grid: Grid, scheme: CompactScheme) -> Result<Self> {
        check_axes(&grid, Self::MIN_POINTS)?;
        let k = |a: Axis| scheme.kernel(grid.n(a), grid.spacing(a));
        Ok(Self {
            grid,
            kernels: [k(Axis::X)?, k(Axis::Y)?, k(Axis::Z)?],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Raw-slice derivative; `out` is overwritten.
    pub fn ddx_slice(&self, f: &[f64], axis: Axis, out: &mut [f64]) {
        apply_along(&self.grid, axis, &self.kernels[axis.index()], f, out);
    }

    pub fn ddx(&self, f: &ScalarField, axis: Axis) -> Result<ScalarField> {
        if f.grid().shape() != self.grid.shape() {
            return Err(Error::ShapeMismatch);
        }
        let mut out = vec![0.0; f.len()];
        self.ddx_slice(f.data(), axis, &mut out);
        ScalarField::from_vec(self.grid, out)
    }

    /// `(grad u)_ij = du_i / dx_j`.
    pub fn gradient(&self, u: &VectorField) -> Result<TensorField> {
        let mut comps = Vec::with_capacity(9);
        for i in 0..3 {
            for axis in Axis::ALL {
                comps.push(self.ddx(u.component(i), axis)?);
            }
        }
        TensorField::from_components(comps)
    }

    pub fn gradient_scalar(&self, f: &ScalarField) -> Result<VectorField> {
        VectorField::from_components([
            self.ddx(f, Axis::X)?,
            self.ddx(f, Axis::Y)?,
            self.ddx(f, Axis::Z)?,
        ])
    }
}

/// Sixth-order compact derivative of `f` along `axis`.
pub fn ddx(f: &ScalarField, axis: Axis) -> Result<ScalarField> {
    let n = f.grid().n(axis);
    if n < Differentiator::MIN_POINTS {
        return Err(Error::AxisTooSmall {
            axis,
            n,
            min: Differentiator::MIN_POINTS,
        });
    }
    Differentiator::new(*f.grid())?.ddx(f, axis)
}

pub fn gradient(u: &VectorField) -> Result<TensorField> {
    Differentiator::new(*u.grid())?.gradient(u)
}

/// Eighth-order tridiagonal low-pass filter
/// `alpha g[i-1] + g[i] + alpha g[i+1] = sum_n a_n/2 (f[i+n] + f[i-n])`,
/// applied once along each axis. Its gain is 1 at `kh = 0` and 0 at `kh = pi`.
#[derive(Debug, Clone)]
pub struct SolutionFilter {
    alpha: f64,
    grid: Grid,
    kernels: [LineKernel; 3],
}

impl SolutionFilter {
    pub const DEFAULT_ALPHA: f64 = 0.49;

    pub fn coefficients(alpha: f64) -> [f64; 5] {
        [
            (93.0 + 70.0 * alpha) / 128.0,
            (7.0 + 18.0 * alpha) / 16.0,
            (-7.0 + 14.0 * alpha) / 32.0,
            (1.0 - 2.0 * alpha) / 16.0,
            (-1.0 + 2.0 * alpha) / 128.0,
        ]
    }

    pub fn transfer_gain(alpha: f64, omega: f64) -> f64 {
        let a = Self::coefficients(alpha);
        let num: f64 = (0..5).map(|n| a[n] * (n as f64 * omega).cos()).sum();
        num / (1.0 + 2.0 * alpha * omega.cos())
    }

    pub fn new(grid: Grid, alpha: f64) -> Result<Self> {
        if !(alpha > 0.25 && alpha < 0.5) {
            return Err(Error::BadAlpha(alpha));
        }
        check_axes(&grid, Grid::MIN_POINTS)?;
        let a = Self::coefficients(alpha);
        let k = |axis: Axis| {
            LineKernel::new(
                grid.n(axis),
                a[0],
                vec![a[1] / 2.0, a[2] / 2.0, a[3] / 2.0, a[4] / 2.0],
                Parity::Even,
                alpha,
            )
        };
        Ok(Self {
            alpha,
            grid,
            kernels: [k(Axis::X)?, k(Axis::Y)?, k(Axis::Z)?],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Filters along x, y and z in turn; `scratch` must match `data` in length.
    pub fn apply_in_place(&self, data: &mut [f64], scratch: &mut [f64]) {
        for axis in Axis::ALL {
            apply_along(&self.grid, axis, &self.kernels[axis.index()], data, scratch);
            data.copy_from_slice(scratch);
        }
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        if f.grid().shape() != self.grid.shape() {
            return Err(Error::ShapeMismatch);
        }
        let mut data = f.data().to_vec();
        let mut scratch = vec![0.0; data.len()];
        self.apply_in_place(&mut data, &mut scratch);
        ScalarField::from_vec(self.grid, data)
    }
}

pub fn solution_filter(f: &ScalarField, strength_alpha: f64) -> Result<ScalarField> {
    SolutionFilter::new(*f.grid(), strength_alpha)?.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line_grid(n: usize, l: f64) -> Grid {
        Grid::new([n, 8, 8], [l, 1.0, 1.0]).unwrap()
    }

    fn sine_error(n: usize) -> f64 {
        let l = 3.0;
        let g = line_grid(n, l);
        let k = 2.0 * PI / l;
        let f = ScalarField::from_fn(g, |x, _, _| (k * x).sin());
        let d = ddx(&f, Axis::X).unwrap();
        let exact = ScalarField::from_fn(g, |x, _, _| k * (k * x).cos());
        d.zip_map(&exact, |a, b| a - b).unwrap().max_abs()
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = Grid::new([8, 12, 16], [1.0, 2.0, 3.0]).unwrap();
        let f = ScalarField::constant(g, 4.2);
        for a in Axis::ALL {
            assert!(ddx(&f, a).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn sine_derivative_accuracy_and_order() {
        let e32 = sine_error(32);
        assert!(e32 < 1e-5, "error {e32}");
        let p = (sine_error(16) / e32).log2();
        assert!((5.5..=6.5).contains(&p), "order {p}");
    }

    #[test]
    fn derivative_along_y_and_z() {
        let g = Grid::new([8, 32, 24], [1.0, 2.0, 1.5]).unwrap();
        let ky = 2.0 * PI / 2.0;
        let kz = 2.0 * PI / 1.5;
        let f = ScalarField::from_fn(g, |_, y, z| (ky * y).sin() * (kz * z).cos());
        let dy = ddx(&f, Axis::Y).unwrap();
        let dz = ddx(&f, Axis::Z).unwrap();
        let ey = ScalarField::from_fn(g, |_, y, z| ky * (ky * y).cos() * (kz * z).cos());
        let ez = ScalarField::from_fn(g, |_, y, z| -kz * (ky * y).sin() * (kz * z).sin());
        assert!(dy.zip_map(&ey, |a, b| a - b).unwrap().max_abs() < 1e-5);
        assert!(dz.zip_map(&ez, |a, b| a - b).unwrap().max_abs() < 1e-4);
    }

    #[test]
    fn axis_too_small() {
        let g = Grid::new([8, 8, 8], [1.0; 3]).unwrap();
        assert!(Differentiator::new(g).is_ok());
        assert!(matches!(
            Grid::new([8, 7, 8], [1.0; 3]),
            Err(Error::AxisTooSmall { .. })
        ));
    }

    #[test]
    fn modified_wavenumber_is_exact_at_low_k() {
        let s = CompactScheme::SIXTH_ORDER;
        assert!((s.modified_wavenumber(0.01) - 0.01).abs() < 1e-15);
        assert_eq!(s.modified_wavenumber(PI).abs() < 1e-15, true);
    }

    #[test]
    fn filter_preserves_constants_and_kills_nyquist() {
        let g = Grid::new([16, 8, 10], [1.0; 3]).unwrap();
        let c = ScalarField::constant(g, 2.5);
        let fc = solution_filter(&c, 0.49).unwrap();
        assert!(fc.zip_map(&c, |a, b| a - b).unwrap().max_abs() < 1e-13);

        let nyq = ScalarField::from_fn(g, |x, y, z| {
            let i = (x * 16.0).round() as i64 + (y * 8.0).round() as i64 + (z * 10.0).round() as i64;
            if i % 2 == 0 { 1.0 } else { -1.0 }
        });
        assert!(solution_filter(&nyq, 0.49).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn filter_barely_touches_resolved_modes() {
        let g = line_grid(64, 1.0);
        let f = ScalarField::from_fn(g, |x, _, _| (2.0 * PI * x).sin());
        let ff = solution_filter(&f, 0.49).unwrap();
        let loss = 1.0 - ff.max_abs() / f.max_abs();
        assert!(loss.abs() < 1e-6, "loss {loss}");
        let gain = SolutionFilter::transfer_gain(0.49, 2.0 * PI / 64.0);
        assert!((1.0 - gain) < 1e-6);
    }

    #[test]
    fn bad_alpha() {
        let g = Grid::cube(8, 1.0).unwrap();
        assert!(matches!(SolutionFilter::new(g, 0.5), Err(Error::BadAlpha(_))));
        assert!(matches!(SolutionFilter::new(g, 0.2), Err(Error::BadAlpha(_))));
    }
}
