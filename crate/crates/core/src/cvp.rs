//! Enstrophy-ratio sensor: `sigma = hat(xi) / xi` with `xi = |curl u|^2 / 2`,
//! the equilibrium threshold `sigma_eq`, the switch `f(sigma)` and its
//! application to an eddy-viscosity field.

use crate::compact::Differentiator;
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, ScalarField, TensorField, VectorField};
use crate::filters::{AxisSet, TestFilter, TestFilterSpec, TransferFunction};
use crate::grid::Grid;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Interpolant assumed between vorticity and density nodes in the
/// `sigma_eq` integral. A collocated solver has none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpolantMode {
    #[default]
    Identity,
    Int6,
}

impl InterpolantMode {
    pub fn transfer(self) -> TransferFunction {
        match self {
            InterpolantMode::Identity => TransferFunction::Identity,
            InterpolantMode::Int6 => TransferFunction::Int6,
        }
    }
}

impl fmt::Display for InterpolantMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterpolantMode::Identity => "identity",
            InterpolantMode::Int6 => "int6",
        })
    }
}

impl FromStr for InterpolantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(InterpolantMode::Identity),
            "int6" => Ok(InterpolantMode::Int6),
            _ => Err(Error::InvalidParameter(format!("unknown interpolant mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvpConfig {
    pub filter: TestFilterSpec,
    pub axes: AxisSet,
    pub sigma_eq: f64,
    pub enstrophy_floor: f64,
    pub interpolant_mode: InterpolantMode,
}

impl CvpConfig {
    pub const DEFAULT_FLOOR: f64 = 1e-12;

    /// Configuration with `sigma_eq` computed by quadrature for `mode`.
    pub fn new(filter: TestFilterSpec, mode: InterpolantMode) -> Self {
        Self {
            filter,
            axes: AxisSet::ALL,
            sigma_eq: sigma_eq_quadrature(&filter, mode),
            enstrophy_floor: Self::DEFAULT_FLOOR,
            interpolant_mode: mode,
        }
    }

    pub fn with_sigma_eq(mut self, sigma_eq: f64) -> Self {
        self.sigma_eq = sigma_eq;
        self
    }

    pub fn with_axes(mut self, axes: AxisSet) -> Self {
        self.axes = axes;
        self
    }

    /// Floor scaled as `1e-12 (v_ref / l_ref)^2`.
    pub fn with_reference_scales(mut self, v_ref: f64, l_ref: f64) -> Self {
        self.enstrophy_floor = Self::DEFAULT_FLOOR * (v_ref / l_ref).powi(2);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_eq > 0.0 && self.sigma_eq < 1.0) {
            return Err(Error::DomainError {
                what: "sigma_eq",
                value: self.sigma_eq,
            });
        }
        if !(self.enstrophy_floor > 0.0) {
            return Err(Error::DomainError {
                what: "enstrophy_floor",
                value: self.enstrophy_floor,
            });
        }
        Ok(())
    }
}

impl Default for CvpConfig {
    fn default() -> Self {
        Self::new(TestFilterSpec::expl4(), InterpolantMode::Identity)
    }
}

/// `xi = |omega|^2 / 2` from a velocity gradient (`slot 3i+j = du_i/dx_j`).
pub fn enstrophy_from_gradient(g: &TensorField) -> ScalarField {
    let w = |i: usize, j: usize| g.get(i, j).data();
    let (d21, d12) = (w(2, 1), w(1, 2));
    let (d02, d20) = (w(0, 2), w(2, 0));
    let (d10, d01) = (w(1, 0), w(0, 1));
    let data = (0..g.grid().len())
        .map(|n| {
            let ox = d21[n] - d12[n];
            let oy = d02[n] - d20[n];
            let oz = d10[n] - d01[n];
            0.5 * (ox * ox + oy * oy + oz * oz)
        })
        .collect();
    ScalarField::from_vec(*g.grid(), data).expect("grid length")
}

pub fn enstrophy(u: &VectorField) -> Result<ScalarField> {
    let g = Differentiator::new(*u.grid())?.gradient(u)?;
    Ok(enstrophy_from_gradient(&g))
}

fn sigma_from_filtered(xi: &[f64], filtered: &mut [f64], floor: f64) {
    for (s, &x) in filtered.iter_mut().zip(xi) {
        *s = if x < floor { 1.0 } else { s.max(0.0) / x };
    }
}

/// Pointwise enstrophy ratio; nodes with `xi` below the floor get `sigma = 1`.
pub fn sigma_field(xi: &ScalarField, config: &CvpConfig) -> Result<ScalarField> {
    let filter = TestFilter::new(*xi.grid(), config.filter, config.axes)?;
    let mut s = filter.apply(xi)?;
    sigma_from_filtered(xi.data(), s.data_mut(), config.enstrophy_floor);
    Ok(s)
}

/// `sigma_eq = r^(-4/3)` for sharp grid and test filters.
pub fn sigma_eq_sharp(r_delta: f64) -> Result<f64> {
    if !(r_delta >= 1.0) {
        return Err(Error::DomainError {
            what: "r_delta",
            value: r_delta,
        });
    }
    Ok(r_delta.powf(-4.0 / 3.0))
}

pub const SIGMA_EQ_PANELS: usize = 2048;

/// Ratio `int w^(1/3) G_test G_int^2 dw / int w^(1/3) G_int^2 dw` over
/// `[0, pi]` by composite Simpson.
///
/// The substitution `w = s^3` turns the weight into the smooth `3 s^3` and
/// makes step gains piecewise polynomial; the range is split at gain
/// discontinuities.
pub fn sigma_eq_integral(test: TransferFunction, interp: TransferFunction, panels: usize) -> f64 {
    let s_end = PI.cbrt();
    let mut knots = vec![0.0];
    let mut bps: Vec<f64> = test
        .breakpoints()
        .into_iter()
        .chain(interp.breakpoints())
        .filter(|b| *b > 0.0 && *b < PI)
        .map(f64::cbrt)
        .collect();
    bps.sort_by(f64::total_cmp);
    knots.extend(bps);
    knots.push(s_end);

    let (mut num, mut den) = (0.0, 0.0);
    for seg in knots.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mut m = ((panels as f64) * (b - a) / s_end).round() as usize;
        m = m.max(2);
        m += m % 2;
        let h = (b - a) / m as f64;
        let mut nterms = Vec::with_capacity(m + 1);
        let mut dterms = Vec::with_capacity(m + 1);
        for i in 0..=m {
            // Nudge the end nodes inward so a step gain takes its one-sided value.
            let s = if i == 0 {
                a + 1e-9 * h
            } else if i == m {
                b - 1e-9 * h
            } else {
                a + i as f64 * h
            };
            let w = s * s * s;
            let gi = interp.gain(w);
            let base = 3.0 * s * s * s * gi * gi;
            let c = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            dterms.push(c * base);
            nterms.push(c * base * test.gain(w));
        }
        num += pairwise_sum(&nterms) * h / 3.0;
        den += pairwise_sum(&dterms) * h / 3.0;
    }
    num / den
}

pub fn sigma_eq_quadrature(filter: &TestFilterSpec, mode: InterpolantMode) -> f64 {
    sigma_eq_integral(TransferFunction::Test(*filter), mode.transfer(), SIGMA_EQ_PANELS)
}

/// As [`sigma_eq_quadrature`], failing if quadrupling the panel count moves
/// the result by more than `tol`.
pub fn sigma_eq_quadrature_checked(
    filter: &TestFilterSpec,
    mode: InterpolantMode,
    tol: f64,
) -> Result<f64> {
    let coarse = sigma_eq_quadrature(filter, mode);
    let fine = sigma_eq_integral(
        TransferFunction::Test(*filter),
        mode.transfer(),
        4 * SIGMA_EQ_PANELS,
    );
    if (coarse - fine).abs() > tol {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    Ok(coarse)
}

/// `f(sigma)`: 1 below `sigma_eq`, 0 above 1, a half sine wave in between.
pub fn sensor_value(sigma: f64, sigma_eq: f64) -> f64 {
    if sigma < sigma_eq {
        1.0
    } else if sigma > 1.0 {
        0.0
    } else {
        let arg = PI * (sigma_eq - 2.0 * sigma + 1.0) / (2.0 * (1.0 - sigma_eq));
        (0.5 * (1.0 + arg.sin())).clamp(0.0, 1.0)
    }
}

/// Field of `f(sigma)` values, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorField(ScalarField);

impl SensorField {
    pub fn field(&self) -> &ScalarField {
        &self.0
    }

    pub fn into_field(self) -> ScalarField {
        self.0
    }

    pub fn grid(&self) -> &Grid {
        self.0.grid()
    }

    pub fn mean(&self) -> f64 {
        crate::field::volume_average(&self.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::DomainError { what: "f", value });
        }
        Ok(Self(ScalarField::constant(grid, value)))
    }
}

pub fn sensor_f(sigma: &ScalarField, sigma_eq: f64) -> Result<SensorField> {
    if !(sigma_eq > 0.0 && sigma_eq < 1.0) {
        return Err(Error::DomainError {
            what: "sigma_eq",
            value: sigma_eq,
        });
    }
    Ok(SensorField(sigma.map(|s| sensor_value(s, sigma_eq))))
}

/// `mu_t f(sigma)`.
pub fn apply_cvp(mu_t: &ScalarField, f: &SensorField) -> Result<ScalarField> {
    mu_t.zip_map(&f.0, |m, s| m * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorStats {
    pub mean_f: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Sensor bound to a grid so the test-filter factorization is reused.
#[derive(Debug, Clone)]
pub struct CvpSensor {
    config: CvpConfig,
    filter: TestFilter,
}

impl CvpSensor {
    pub fn new(grid: Grid, config: CvpConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            filter: TestFilter::new(grid, config.filter, config.axes)?,
        })
    }

    pub fn config(&self) -> &CvpConfig {
        &self.config
    }

    pub fn test_filter(&self) -> &TestFilter {
        &self.filter
    }

    pub fn sigma(&self, xi: &ScalarField) -> Result<ScalarField> {
        let mut s = self.filter.apply(xi)?;
        sigma_from_filtered(xi.data(), s.data_mut(), self.config.enstrophy_floor);
        Ok(s)
    }

    /// Sensor and `sigma` from a velocity gradient.
    pub fn evaluate(&self, grad_u: &TensorField) -> Result<(SensorField, ScalarField)> {
        let sigma = self.sigma(&enstrophy_from_gradient(grad_u))?;
        let f = sensor_f(&sigma, self.config.sigma_eq)?;
        Ok((f, sigma))
    }

    pub fn stats(f: &SensorField, sigma: &ScalarField) -> SensorStats {
        SensorStats {
            mean_f: f.mean(),
            sigma_min: sigma.min(),
            sigma_max: sigma.max(),
        }
    }
}
