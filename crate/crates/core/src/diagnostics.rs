//! Scalar and spectral diagnostics: kinetic energy, dissipation, spectra and
//! the helical-vortex deviation.

use crate::cases::HelixParams;
use crate::compact::Differentiator;
use crate::error::{Error, Result};
use crate::fft::{fft3, wavenumber, C64};
use crate::field::{pairwise_sum, volume_average, ConservedState, ScalarField, VectorField};
use crate::grid::{Axis, Grid};
use crate::sgs::StrainRate;

/// Velocity `m / rho` of a conserved state.
pub fn velocity(state: &ConservedState) -> Result<VectorField> {
    let c = |i: usize| state.mom.component(i).zip_map(&state.rho, |m, r| m / r);
    VectorField::from_components([c(0)?, c(1)?, c(2)?])
}

/// `E = <u.u> / 2`.
pub fn kinetic_energy(state: &ConservedState) -> Result<f64> {
    Ok(0.5 * volume_average(&velocity(state)?.norm_squared()))
}

/// `-dE/dt` from samples `(t, E)`: second-order three-point differences,
/// one-sided at both ends. Returned positive for decaying energy.
pub fn dissipation_series(t: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    if t.len() != e.len() {
        return Err(Error::InvalidParameter("time and energy series differ in length".into()));
    }
    let n = t.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sample times must increase strictly".into()));
    }
    // Derivative at t[c] of the parabola through points i0, i0+1, i0+2.
    let deriv = |i0: usize, c: usize| {
        let (x0, x1, x2) = (t[i0], t[i0 + 1], t[i0 + 2]);
        let x = t[c];
        let w0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let w1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let w2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        w0 * e[i0] + w1 * e[i0 + 1] + w2 * e[i0 + 2]
    };
    Ok((0..n)
        .map(|c| {
            let i0 = c.saturating_sub(1).min(n - 3);
            -deriv(i0, c)
        })
        .collect())
}

/// `eps_SGS = <mu_t S:S>`.
pub fn sgs_dissipation(mu_t: &ScalarField, strain: &StrainRate) -> Result<f64> {
    let p = mu_t.zip_map(strain.magnitude(), |m, s| m * s * s)?;
    Ok(volume_average(&p))
}

/// Shell-binned spectrum: `E[k]` sums `|u_hat|^2 / 2` over modes with
/// `round(|k|) = k`, integer box wavenumbers. `sum E = <u.u>/2`.
pub fn energy_spectrum(u: &VectorField) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = *u.grid();
    if !g.is_cubic() {
        return Err(Error::NonCubicGrid);
    }
    let n = g.nx();
    let total = g.len();
    let kmax = ((3.0f64).sqrt() * (n / 2) as f64).round() as usize;
    let mut shells = vec![Vec::new(); kmax + 1];
    let norm = 1.0 / total as f64;
    for c in 0..3 {
        let mut d: Vec<C64> = u.component(c).data().iter().map(|&v| C64::new(v, 0.0)).collect();
        fft3(&mut d, [n; 3], false);
        for (idx, v) in d.iter().enumerate() {
            let (i, j, k) = g.unflatten(idx);
            let (a, b, cc) = (wavenumber(i, n), wavenumber(j, n), wavenumber(k, n));
            let km = ((a * a + b * b + cc * cc) as f64).sqrt().round() as usize;
            shells[km].push(0.5 * (v * norm).norm_sqr());
        }
    }
    let e = shells.iter().map(|s| pairwise_sum(s)).collect();
    Ok(((0..=kmax).map(|k| k as f64).collect(), e))
}

/// Largest `|div u|` on the grid.
pub fn max_divergence(u: &VectorField, diff: &Differentiator) -> Result<f64> {
    let mut div = vec![0.0; u.grid().len()];
    let mut tmp = vec![0.0; div.len()];
    for a in Axis::ALL {
        diff.ddx_slice(u.component(a.index()).data(), a, &mut tmp);
        for (d, t) in div.iter_mut().zip(&tmp) {
            *d += t;
        }
    }
    Ok(div.iter().fold(0.0, |m, v: &f64| m.max(v.abs())))
}

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub kinetic_energy: f64,
    pub eps_sgs: f64,
    pub mean_f: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_mut: f64,
    pub min_rho: f64,
    pub max_div: f64,
    /// Helix deviation `d(t)`, when tracked.
    pub deviation: Option<f64>,
}

/// Sub-cell offset of a 3-point maximum, in cells, clamped to `[-1/2, 1/2]`.
fn parabolic_offset(fm: f64, f0: f64, fp: f64) -> f64 {
    let den = fm - 2.0 * f0 + fp;
    if den >= 0.0 {
        return 0.0;
    }
    (0.5 * (fm - fp) / den).clamp(-0.5, 0.5)
}

/// Mean over y-planes of `|r - R|`, where `r` is the distance from the box
/// axis to the vorticity maximum of the plane. Ties in the discrete argmax go
/// to the smallest flattened index; the maximum is then refined by parabolic
/// fits along x and z.
pub fn vortex_deviation(state: &ConservedState, params: &HelixParams) -> Result<f64> {
    let g = *state.grid();
    let diff = Differentiator::new(g)?;
    let w2 = vorticity_magnitude(&velocity(state)?, &diff)?;
    let w = w2.data();
    let ny = g.ny();
    let (dx, dz) = (g.spacing(Axis::X), g.spacing(Axis::Z));
    let (o, l) = (g.origin(), g.lengths());
    let (cx, cz) = (o[0] + 0.5 * l[0], o[2] + 0.5 * l[2]);
    let mut dev = Vec::with_capacity(ny);
    for j in 0..ny {
        let (bi, bk, best) = plane_argmax(w, &g, j);
        let at = |i: isize, k: isize| w[g.index(g.wrap(Axis::X, i), j, g.wrap(Axis::Z, k))];
        let (i, k) = (bi as isize, bk as isize);
        let sx = parabolic_offset(at(i - 1, k), best, at(i + 1, k));
        let sz = parabolic_offset(at(i, k - 1), best, at(i, k + 1));
        let x = g.coordinate(Axis::X, bi) + sx * dx - cx;
        let z = g.coordinate(Axis::Z, bk) + sz * dz - cz;
        dev.push(((x * x + z * z).sqrt() - params.radius).abs());
    }
    Ok(pairwise_sum(&dev) / ny as f64)
}

/// Largest value in plane `j`; the first in flattened order wins ties.
fn plane_argmax(w: &[f64], g: &Grid, j: usize) -> (usize, usize, f64) {
    let (mut bi, mut bk, mut best) = (0, 0, f64::NEG_INFINITY);
    for k in 0..g.nz() {
        for i in 0..g.nx() {
            let v = w[g.index(i, j, k)];
            if v > best {
                (bi, bk, best) = (i, k, v);
            }
        }
    }
    (bi, bk, best)
}

/// `|curl u|`.
pub fn vorticity_magnitude(u: &VectorField, diff: &Differentiator) -> Result<ScalarField> {
    let gr = diff.gradient(u)?;
    let wx = gr.get(2, 1).zip_map(gr.get(1, 2), |a, b| a - b)?;
    let wy = gr.get(0, 2).zip_map(gr.get(2, 0), |a, b| a - b)?;
    let wz = gr.get(1, 0).zip_map(gr.get(0, 1), |a, b| a - b)?;
    let m = wx.zip_map(&wy, |a, b| a * a + b * b)?;
    m.zip_map(&wz, |a, b| (a + b * b).sqrt())
}

/// Least-squares fit of `ln d = ln d0 + rate t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub rate: f64,
    pub log_d0: f64,
    pub r_squared: f64,
    pub samples: usize,
    /// False when `R^2 < 0.5`.
    pub reliable: bool,
}

pub const MIN_FIT_SAMPLES: usize = 4;

/// Fits samples with `t` inside `window` (inclusive).
pub fn growth_rate_fit(t: &[f64], d: &[f64], window: (f64, f64)) -> Result<GrowthFit> {
    if t.len() != d.len() {
        return Err(Error::InvalidParameter("time and deviation series differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(d)
        .filter(|(&ti, _)| ti >= window.0 && ti <= window.1)
        .map(|(&ti, &di)| (ti, di))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateFit(format!(
            "{} samples in window, at least {MIN_FIT_SAMPLES} required",
            pts.len()
        )));
    }
    if pts.iter().any(|&(_, di)| !(di > 0.0 && di.is_finite())) {
        return Err(Error::DegenerateFit("deviation must be positive and finite".into()));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(ti, di) in &pts {
        let (a, b) = (ti - tm, di.ln() - ym);
        stt += a * a;
        sty += a * b;
        syy += b * b;
    }
    if stt <= 0.0 {
        return Err(Error::DegenerateFit("all samples at one time".into()));
    }
    let rate = sty / stt;
    let ss_res: f64 = pts
        .iter()
        .map(|&(ti, di)| {
            let r = di.ln() - ym - rate * (ti - tm);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(GrowthFit {
        rate,
        log_d0: ym - rate * tm,
        r_squared,
        samples: pts.len(),
        reliable: r_squared >= 0.5,
    })
}
