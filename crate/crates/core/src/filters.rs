//! Discrete test filters (IMPL6, EXPL4, GAUSS), their transfer functions, and
//! the transfer function of the sixth-order compact midpoint interpolant.
//!
//! All three filters share the form
//! `alpha g[i-1] + g[i] + alpha g[i+1] = w0 f[i] + sum_j w_j (f[i+j] + f[i-j])`
//! with per-side weights `w_j`. For IMPL6 and EXPL4 the tabulated `b, c, d`
//! enter as `w_j = coef / 2`; the GAUSS row already lists per-side weights and
//! is used as is, which is what gives it unit gain at `k = 0`.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{Axis, Grid};
use crate::pencil::{apply_along, LineKernel, Parity};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Impl6,
    Expl4,
    Gauss,
}

impl FilterKind {
    pub const ALL: [FilterKind; 3] = [FilterKind::Impl6, FilterKind::Expl4, FilterKind::Gauss];
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterKind::Impl6 => "impl6",
            FilterKind::Expl4 => "expl4",
            FilterKind::Gauss => "gauss",
        })
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "impl6" => Ok(FilterKind::Impl6),
            "expl4" => Ok(FilterKind::Expl4),
            "gauss" => Ok(FilterKind::Gauss),
            _ => Err(Error::InvalidParameter(format!("unknown test filter '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFilterSpec {
    kind: FilterKind,
    alpha: f64,
}

impl TestFilterSpec {
    pub const IMPL6_DEFAULT_ALPHA: f64 = -0.4;

    pub fn impl6(alpha: f64) -> Result<Self> {
        if !(alpha > -0.5 && alpha < 0.5) {
            return Err(Error::BadAlpha(alpha));
        }
        Ok(Self {
            kind: FilterKind::Impl6,
            alpha,
        })
    }

    pub fn expl4() -> Self {
        Self {
            kind: FilterKind::Expl4,
            alpha: 0.0,
        }
    }

    pub fn gauss() -> Self {
        Self {
            kind: FilterKind::Gauss,
            alpha: 0.0,
        }
    }

    /// Default parameterization of each kind.
    pub fn of_kind(kind: FilterKind) -> Self {
        match kind {
            FilterKind::Impl6 => Self {
                kind,
                alpha: Self::IMPL6_DEFAULT_ALPHA,
            },
            FilterKind::Expl4 => Self::expl4(),
            FilterKind::Gauss => Self::gauss(),
        }
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Nominal test-to-grid width ratio.
    pub fn width_ratio(&self) -> f64 {
        match self.kind {
            FilterKind::Impl6 => 1.5,
            FilterKind::Expl4 => 2.0,
            FilterKind::Gauss => 3.0,
        }
    }

    /// Tabulated `(a, b, c, d, e)` coefficients.
    pub fn table_row(&self) -> [f64; 5] {
        match self.kind {
            FilterKind::Impl6 => {
                let al = self.alpha;
                [
                    (11.0 + 10.0 * al) / 16.0,
                    (15.0 + 34.0 * al) / 32.0,
                    (-3.0 + 6.0 * al) / 16.0,
                    (1.0 - 2.0 * al) / 32.0,
                    0.0,
                ]
            }
            FilterKind::Expl4 => [0.5, 9.0 / 16.0, 0.0, -1.0 / 16.0, 0.0],
            FilterKind::Gauss => [
                3565.0 / 10368.0,
                3091.0 / 12960.0,
                1997.0 / 25920.0,
                149.0 / 12960.0,
                107.0 / 103680.0,
            ],
        }
    }

    /// Center weight followed by per-side weights for offsets 1..=4.
    pub fn weights(&self) -> [f64; 5] {
        let t = self.table_row();
        match self.kind {
            FilterKind::Gauss => t,
            _ => [t[0], t[1] / 2.0, t[2] / 2.0, t[3] / 2.0, t[4] / 2.0],
        }
    }

    /// Stencil half-width.
    pub fn radius(&self) -> usize {
        match self.kind {
            FilterKind::Gauss => 4,
            _ => 3,
        }
    }

    pub fn min_points(&self) -> usize {
        2 * self.radius() + 2
    }

    /// Gain at `k_delta` without the domain check.
    pub fn gain(&self, k_delta: f64) -> f64 {
        let w = self.weights();
        let num = w[0] + 2.0 * (1..5).map(|j| w[j] * (j as f64 * k_delta).cos()).sum::<f64>();
        num / (1.0 + 2.0 * self.alpha * k_delta.cos())
    }

    pub fn transfer_gain(&self, k_delta: f64) -> Result<f64> {
        check_domain(k_delta)?;
        Ok(self.gain(k_delta))
    }

    /// `k_delta` at which the gain crosses 1/2 (bisection on `[0, pi]`).
    pub fn half_gain_wavenumber(&self) -> f64 {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.gain(mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn kernel(&self, n: usize) -> Result<LineKernel> {
        let w = self.weights();
        let coeffs = w[1..=self.radius()].to_vec();
        LineKernel::new(n, w[0], coeffs, Parity::Even, self.alpha)
    }
}

fn check_domain(k_delta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&k_delta) {
        return Err(Error::DomainError {
            what: "k_delta",
            value: k_delta,
        });
    }
    Ok(())
}

pub const INT6_ALPHA: f64 = 3.0 / 10.0;
pub const INT6_A: f64 = 3.0 / 2.0;
pub const INT6_B: f64 = 1.0 / 10.0;

/// Gain of the sixth-order compact midpoint interpolation.
pub fn int6_transfer_gain(k_delta: f64) -> Result<f64> {
    check_domain(k_delta)?;
    Ok(int6_gain(k_delta))
}

pub(crate) fn int6_gain(k_delta: f64) -> f64 {
    (INT6_A * (0.5 * k_delta).cos() + INT6_B * (1.5 * k_delta).cos())
        / (1.0 + 2.0 * INT6_ALPHA * k_delta.cos())
}

/// Closed-form transfer functions on `k_delta in [0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferFunction {
    Identity,
    Test(TestFilterSpec),
    Int6,
    /// Spectral cutoff at `k_delta = pi / width_ratio`.
    Sharp { width_ratio: f64 },
}

impl TransferFunction {
    pub fn gain(&self, k_delta: f64) -> f64 {
        match self {
            TransferFunction::Identity => 1.0,
            TransferFunction::Test(s) => s.gain(k_delta),
            TransferFunction::Int6 => int6_gain(k_delta),
            TransferFunction::Sharp { width_ratio } => {
                if k_delta < PI / width_ratio {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Interior points where the gain is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TransferFunction::Sharp { width_ratio } if *width_ratio > 1.0 => vec![PI / width_ratio],
            _ => Vec::new(),
        }
    }
}

/// Set of axes a filter acts along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxisSet([bool; 3]);

impl AxisSet {
    pub const ALL: AxisSet = AxisSet([true; 3]);

    pub fn new(axes: &[Axis]) -> Result<Self> {
        let mut s = [false; 3];
        for a in axes {
            s[a.index()] = true;
        }
        if !s.iter().any(|&b| b) {
            return Err(Error::InvalidParameter("axis set must not be empty".into()));
        }
        Ok(Self(s))
    }

    pub fn contains(&self, axis: Axis) -> bool {
        self.0[axis.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|a| self.contains(*a))
    }
}

impl Default for AxisSet {
    fn default() -> Self {
        Self::ALL
    }
}

impl fmt::Display for AxisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.iter() {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for AxisSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut axes = Vec::new();
        for c in s.chars() {
            axes.push(match c.to_ascii_lowercase() {
                'x' => Axis::X,
                'y' => Axis::Y,
                'z' => Axis::Z,
                _ => return Err(Error::InvalidParameter(format!("bad axis set '{s}'"))),
            });
        }
        Self::new(&axes)
    }
}

/// A test filter bound to a grid. Counts its applications, one per filtered
/// scalar field regardless of how many axes are active.
#[derive(Debug)]
pub struct TestFilter {
    spec: TestFilterSpec,
    axes: AxisSet,
    grid: Grid,
    kernels: [Option<LineKernel>; 3],
    applications: AtomicUsize,
}

impl Clone for TestFilter {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec,
            axes: self.axes,
            grid: self.grid,
            kernels: self.kernels.clone(),
            applications: AtomicUsize::new(self.applications()),
        }
    }
}

impl TestFilter {
    pub fn new(grid: Grid, spec: TestFilterSpec, axes: AxisSet) -> Result<Self> {
        let mut kernels: [Option<LineKernel>; 3] = [None, None, None];
        for axis in axes.iter() {
            let n = grid.n(axis);
            if n < spec.min_points() {
                return Err(Error::AxisTooSmall {
                    axis,
                    n,
                    min: spec.min_points(),
                });
            }
            kernels[axis.index()] = Some(spec.kernel(n)?);
        }
        Ok(Self {
            spec,
            axes,
            grid,
            kernels,
            applications: AtomicUsize::new(0),
        })
    }

    pub fn spec(&self) -> &TestFilterSpec {
        &self.spec
    }

    pub fn axes(&self) -> AxisSet {
        self.axes
    }

    pub fn applications(&self) -> usize {
        self.applications.load(Ordering::Relaxed)
    }

    pub fn reset_applications(&self) {
        self.applications.store(0, Ordering::Relaxed);
    }

    /// Filters `data` in place along every active axis.
    pub fn apply_in_place(&self, data: &mut [f64], scratch: &mut [f64]) {
        self.applications.fetch_add(1, Ordering::Relaxed);
        for axis in self.axes.iter() {
            let k = self.kernels[axis.index()].as_ref().expect("kernel for active axis");
            apply_along(&self.grid, axis, k, data, scratch);
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

/// Tensor-product test filtering of `f` along `axes`.
pub fn apply_test_filter(f: &ScalarField, spec: &TestFilterSpec, axes: AxisSet) -> Result<ScalarField> {
    TestFilter::new(*f.grid(), *spec, axes)?.apply(f)
}

pub fn transfer_gain(spec: &TestFilterSpec, k_delta: f64) -> Result<f64> {
    spec.transfer_gain(k_delta)
}
