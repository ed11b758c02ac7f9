//! Initial conditions: the Taylor-Green vortex and a periodic double helical
//! vortex built from a regularized Biot-Savart law.

use crate::error::{Error, Result};
use crate::fft::{fft3, wavenumber, C64};
use crate::field::{ConservedState, ScalarField, ThermoParams, VectorField};
use crate::grid::{Axis, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

pub const DEFAULT_GAMMA: f64 = 1.4;
pub const DEFAULT_PRANDTL: f64 = 0.71;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TgvParams {
    pub re: f64,
    pub mach: f64,
    pub l: f64,
    pub v0: f64,
    pub rho0: f64,
    pub gamma: f64,
    pub prandtl: f64,
    pub prandtl_t: f64,
}

impl Default for TgvParams {
    fn default() -> Self {
        Self {
            re: 5000.0,
            mach: 0.1,
            l: 1.0,
            v0: 1.0,
            rho0: 1.0,
            gamma: DEFAULT_GAMMA,
            prandtl: DEFAULT_PRANDTL,
            prandtl_t: ThermoParams::DEFAULT_PRANDTL_T,
        }
    }
}

impl TgvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.re > 0.0) {
            return Err(Error::InvalidParameter(format!("re must be positive, got {}", self.re)));
        }
        if !(self.mach > 0.0 && self.mach <= 0.3) {
            return Err(Error::InvalidParameter(format!("mach must be in (0, 0.3], got {}", self.mach)));
        }
        if !(self.l > 0.0 && self.v0 > 0.0 && self.rho0 > 0.0) {
            return Err(Error::InvalidParameter("l, v0 and rho0 must be positive".into()));
        }
        Ok(())
    }

    /// `p0 = rho0 V0^2 / (gamma M^2)`.
    pub fn p0(&self) -> f64 {
        self.rho0 * self.v0 * self.v0 / (self.gamma * self.mach * self.mach)
    }

    /// Gas with `T0 = 1` and `mu = rho0 V0 L / Re`.
    pub fn thermo(&self) -> ThermoParams {
        let r = self.p0() / self.rho0;
        ThermoParams {
            gamma: self.gamma,
            mu: self.rho0 * self.v0 * self.l / self.re,
            prandtl: self.prandtl,
            prandtl_t: self.prandtl_t,
            cp: self.gamma * r / (self.gamma - 1.0),
        }
    }

    /// Cubic grid on `[-pi L, pi L]^3`.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        Ok(Grid::cube(n, 2.0 * PI * self.l)?.with_origin([-PI * self.l; 3]))
    }

    /// Convective time `L / V0`.
    pub fn time_scale(&self) -> f64 {
        self.l / self.v0
    }
}

pub fn init_tgv(grid: &Grid, params: &TgvParams, thermo: &ThermoParams) -> Result<ConservedState> {
    params.validate()?;
    let l = params.l;
    let tol = 1e-12 * l;
    for a in Axis::ALL {
        let i = a.index();
        if (grid.lengths()[i] - 2.0 * PI * l).abs() > tol || (grid.origin()[i] + PI * l).abs() > tol {
            return Err(Error::DomainMismatch(format!(
                "Taylor-Green grid must span [-pi L, pi L] along {a}"
            )));
        }
    }
    let v0 = params.v0;
    let rho = ScalarField::constant(*grid, params.rho0);
    let u = VectorField::from_fn(*grid, |x, y, z| {
        let (x, y, z) = (x / l, y / l, z / l);
        [
            v0 * x.sin() * y.cos() * z.cos(),
            -v0 * x.cos() * y.sin() * z.cos(),
            0.0,
        ]
    });
    let p0 = params.p0();
    let amp = params.rho0 * v0 * v0 / 16.0;
    let p = ScalarField::from_fn(*grid, |x, y, z| {
        p0 + amp * ((2.0 * x / l).cos() + (2.0 * y / l).cos()) * ((2.0 * z / l).cos() + 2.0)
    });
    ConservedState::encode(&rho, &u, &p, thermo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixParams {
    /// Helix radius `R`.
    pub radius: f64,
    /// `h / R`.
    pub pitch_ratio: f64,
    /// `r_c / R`.
    pub core_ratio: f64,
    /// Kernel exponent; `f64::INFINITY` gives a Rankine core.
    pub n_kernel: f64,
    pub re_gamma: f64,
    /// Kinematic viscosity.
    pub nu: f64,
    pub rho0: f64,
    pub n_filaments: usize,
    pub n_turns: usize,
    /// Box length along x and z.
    pub box_xz: f64,
    /// Explicit axial periods summed on each side of the box.
    pub image_layers: usize,
    pub mach_peak: f64,
    /// Quadrature samples per turn for turns near the evaluation point.
    pub samples_per_turn: usize,
    /// Samples per turn for distant turns.
    pub far_samples_per_turn: usize,
    /// Random velocity perturbation, relative to the peak speed.
    pub perturbation: f64,
    /// Largest perturbation wavenumber, in box units.
    pub perturbation_kmax: f64,
    pub seed: u64,
    pub gamma: f64,
    pub prandtl: f64,
    pub prandtl_t: f64,
}

impl Default for HelixParams {
    fn default() -> Self {
        Self {
            radius: 0.115,
            pitch_ratio: 1.1,
            core_ratio: 0.06,
            n_kernel: 4.0,
            re_gamma: 7000.0,
            nu: 1e-6,
            rho0: 1.0,
            n_filaments: 2,
            n_turns: 4,
            box_xz: 0.5,
            image_layers: 8,
            mach_peak: 0.1,
            samples_per_turn: 512,
            far_samples_per_turn: 32,
            perturbation: 1e-4,
            perturbation_kmax: 4.0,
            seed: 1,
            gamma: DEFAULT_GAMMA,
            prandtl: DEFAULT_PRANDTL,
            prandtl_t: ThermoParams::DEFAULT_PRANDTL_T,
        }
    }
}

impl HelixParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.radius > 0.0 && self.pitch_ratio > 0.0) {
            return bad("radius and pitch_ratio must be positive");
        }
        if !(self.core_ratio > 0.0 && self.core_ratio < 1.0) {
            return bad("core radius must be positive and smaller than the helix radius");
        }
        if !(self.n_kernel >= 1.0) {
            return bad("n_kernel must be at least 1");
        }
        if self.n_turns < 1 || self.n_filaments < 1 {
            return bad("n_turns and n_filaments must be at least 1");
        }
        if !(self.re_gamma > 0.0 && self.nu > 0.0 && self.rho0 > 0.0) {
            return bad("re_gamma, nu and rho0 must be positive");
        }
        if !(self.box_xz > 2.0 * self.radius) {
            return bad("box must contain the helix");
        }
        if !(self.mach_peak > 0.0 && self.mach_peak < 1.0) {
            return bad("mach_peak must be in (0, 1)");
        }
        if self.samples_per_turn < 4 || self.far_samples_per_turn < 4 {
            return bad("at least 4 samples per turn are required");
        }
        if !(self.perturbation >= 0.0) {
            return bad("perturbation must be non-negative");
        }
        Ok(())
    }

    pub fn circulation(&self) -> f64 {
        self.re_gamma * self.nu
    }

    pub fn pitch(&self) -> f64 {
        self.pitch_ratio * self.radius
    }

    /// `l = h / (2 pi)`.
    pub fn ell(&self) -> f64 {
        self.pitch() / (2.0 * PI)
    }

    pub fn core_radius(&self) -> f64 {
        self.core_ratio * self.radius
    }

    /// Box lengths; the axial length holds an integer number of turns.
    pub fn lengths(&self) -> [f64; 3] {
        [self.box_xz, self.n_turns as f64 * self.pitch(), self.box_xz]
    }

    /// `n^3` points over [`Self::lengths`].
    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::new([n; 3], self.lengths())
    }

    fn kernel(&self) -> Kernel {
        Kernel::new(self.core_radius(), self.n_kernel)
    }
}

/// `1 / (d^(2n) + r_c^(2n))^(3/(2n))`, the regularized `1/d^3`.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    rc: f64,
    n: f64,
    rc2n: f64,
}

impl Kernel {
    pub fn new(rc: f64, n: f64) -> Self {
        Self {
            rc,
            n,
            rc2n: if n.is_finite() { rc.powf(2.0 * n) } else { 0.0 },
        }
    }

    #[inline]
    pub fn inv_cube(&self, d2: f64) -> f64 {
        if self.n == 4.0 {
            let d4 = d2 * d2;
            let x = d4 * d4 + self.rc2n;
            let s = x.sqrt().sqrt().sqrt();
            1.0 / (s * s * s)
        } else if self.n.is_infinite() {
            let d = d2.sqrt().max(self.rc);
            1.0 / (d * d * d)
        } else {
            (d2.powf(self.n) + self.rc2n).powf(-1.5 / self.n)
        }
    }
}

/// Samples of a filament: position, tangent times quadrature weight.
#[derive(Debug, Clone, Default)]
pub struct FilamentSamples {
    pos: Vec<[f64; 3]>,
    wt: Vec<[f64; 3]>,
}

impl FilamentSamples {
    /// Composite trapezoid samples of `curve(theta) -> (X, dX/dtheta)` on `[a, b]`.
    pub fn trapezoid(curve: impl Fn(f64) -> ([f64; 3], [f64; 3]), a: f64, b: f64, samples: usize) -> Self {
        let h = (b - a) / samples as f64;
        let mut s = Self::default();
        for i in 0..=samples {
            let w = if i == 0 || i == samples { 0.5 * h } else { h };
            let (x, t) = curve(a + i as f64 * h);
            s.pos.push(x);
            s.wt.push([t[0] * w, t[1] * w, t[2] * w]);
        }
        s
    }

    /// `-G/(4 pi) sum K (x - X) x t dtheta / |x - X|^3`, without the prefactor.
    #[inline]
    fn accumulate(&self, p: [f64; 3], k: &Kernel, acc: &mut [f64; 3]) {
        for (x, t) in self.pos.iter().zip(&self.wt) {
            let r = [p[0] - x[0], p[1] - x[1], p[2] - x[2]];
            let g = k.inv_cube(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
            acc[0] += g * (r[1] * t[2] - r[2] * t[1]);
            acc[1] += g * (r[2] * t[0] - r[0] * t[2]);
            acc[2] += g * (r[0] * t[1] - r[1] * t[0]);
        }
    }

    /// Induced velocity at `p` of a filament with circulation `gamma`.
    pub fn velocity(&self, p: [f64; 3], gamma: f64, kernel: &Kernel) -> [f64; 3] {
        let mut acc = [0.0; 3];
        self.accumulate(p, kernel, &mut acc);
        let c = -gamma / (4.0 * PI);
        [c * acc[0], c * acc[1], c * acc[2]]
    }
}

struct Turn {
    y_center: f64,
    fine: FilamentSamples,
    coarse: FilamentSamples,
}

/// Regularized Biot-Savart field of an axially infinite multi-filament helix.
pub struct HelixField {
    params: HelixParams,
    center: [f64; 2],
    y0: f64,
    y_lo: f64,
    y_hi: f64,
    kernel: Kernel,
    turns: Vec<Turn>,
}

impl HelixField {
    /// Helix with axis along y through `(center[0], ., center[1])`, filament 0
    /// at `theta = 0` on the plane `y = y0`.
    pub fn new(params: &HelixParams, center: [f64; 2], y0: f64) -> Result<Self> {
        params.validate()?;
        let (r, ell) = (params.radius, params.ell());
        let per = params.n_turns as i64;
        let lay = params.image_layers as i64;
        let (m_lo, m_hi) = (-lay * per, (lay + 1) * per);
        let mut turns = Vec::new();
        for f in 0..params.n_filaments {
            let phase = 2.0 * PI * f as f64 / params.n_filaments as f64;
            let curve = move |th: f64| {
                let a = th + phase;
                (
                    [center[0] + r * a.cos(), y0 + ell * th, center[1] + r * a.sin()],
                    [-r * a.sin(), ell, r * a.cos()],
                )
            };
            for m in m_lo..m_hi {
                let a = 2.0 * PI * m as f64;
                let b = a + 2.0 * PI;
                turns.push(Turn {
                    y_center: y0 + ell * (a + PI),
                    fine: FilamentSamples::trapezoid(curve, a, b, params.samples_per_turn),
                    coarse: FilamentSamples::trapezoid(curve, a, b, params.far_samples_per_turn),
                });
            }
        }
        Ok(Self {
            params: *params,
            center,
            y0,
            y_lo: y0 + ell * 2.0 * PI * m_lo as f64,
            y_hi: y0 + ell * 2.0 * PI * m_hi as f64,
            kernel: params.kernel(),
            turns,
        })
    }

    /// Induced velocity at `p`, including straight-line tails beyond the
    /// explicitly integrated turns.
    pub fn velocity(&self, p: [f64; 3]) -> [f64; 3] {
        let near = 1.5 * self.params.pitch();
        let mut acc = [0.0; 3];
        for t in &self.turns {
            let s = if (p[1] - t.y_center).abs() < near {
                &t.fine
            } else {
                &t.coarse
            };
            s.accumulate(p, &self.kernel, &mut acc);
        }
        let g = self.params.circulation();
        let c = -g / (4.0 * PI);
        let mut u = [c * acc[0], c * acc[1], c * acc[2]];
        // Semi-infinite axial lines carry the far turns.
        let (rx, rz) = (p[0] - self.center[0], p[2] - self.center[1]);
        let r2 = rx * rx + rz * rz;
        let tail = |d: f64| {
            let q = (r2 + d * d).sqrt();
            1.0 / (q * (q + d))
        };
        let w = self.params.n_filaments as f64 * g / (4.0 * PI)
            * (tail(self.y_hi - p[1]) + tail(p[1] - self.y_lo));
        // y_hat x (rx, 0, rz) = (rz, 0, -rx)
        u[0] += w * rz;
        u[2] -= w * rx;
        u
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }
}

/// Swirl of a straight axial line vortex with a Gaussian core of radius `a`.
fn lamb_oseen(gamma: f64, a: f64, rx: f64, rz: f64) -> [f64; 3] {
    let r2 = rx * rx + rz * rz;
    let q = r2 / (a * a);
    let g = if q < 1e-8 { 1.0 / (a * a) } else { -(-q).exp_m1() / r2 };
    let c = gamma / (2.0 * PI) * g;
    [c * rz, 0.0, -c * rx]
}

/// Doubly periodic array of Gaussian line vortices with a uniform
/// neutralizing background, sampled on the xz nodes of `grid`.
fn periodic_line_vortex(grid: &Grid, gamma: f64, a: f64, center: [f64; 2]) -> [Vec<f64>; 2] {
    let (nx, nz) = (grid.nx(), grid.nz());
    let (lx, lz) = (grid.lengths()[0], grid.lengths()[2]);
    let wrap = |d: f64, l: f64| d - l * (d / l).round();
    let mut w = vec![C64::new(0.0, 0.0); nx * nz];
    for k in 0..nz {
        let dz = wrap(grid.coordinate(Axis::Z, k) - center[1], lz);
        for i in 0..nx {
            let dx = wrap(grid.coordinate(Axis::X, i) - center[0], lx);
            let v = gamma / (PI * a * a) * (-(dx * dx + dz * dz) / (a * a)).exp();
            w[i + nx * k] = C64::new(v, 0.0);
        }
    }
    let dims = [nx, nz, 1];
    fft3(&mut w, dims, false);
    let mut ux = w.clone();
    let mut uz = w;
    for k in 0..nz {
        let kz = 2.0 * PI * wavenumber(k, nz) as f64 / lz;
        let kz_d = if nz % 2 == 0 && k == nz / 2 { 0.0 } else { kz };
        for i in 0..nx {
            let kx = 2.0 * PI * wavenumber(i, nx) as f64 / lx;
            let kx_d = if nx % 2 == 0 && i == nx / 2 { 0.0 } else { kx };
            let n = i + nx * k;
            let k2 = kx * kx + kz * kz;
            let psi = if k2 == 0.0 { C64::new(0.0, 0.0) } else { -ux[n] / k2 };
            ux[n] = C64::new(0.0, kz_d) * psi;
            uz[n] = C64::new(0.0, -kx_d) * psi;
        }
    }
    fft3(&mut ux, dims, true);
    fft3(&mut uz, dims, true);
    let scale = 1.0 / (nx * nz) as f64;
    [
        ux.iter().map(|c| c.re * scale).collect(),
        uz.iter().map(|c| c.re * scale).collect(),
    ]
}

/// Divergence-free random velocity built from Fourier modes with
/// `1 <= |k| <= kmax` (box units), scaled to a maximum speed of `amplitude`.
pub fn solenoidal_perturbation(grid: &Grid, kmax: f64, amplitude: f64, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let km = kmax.floor() as i64;
    let l = grid.lengths();
    let mut modes = Vec::new();
    for a in -km..=km {
        for b in -km..=km {
            for c in -km..=km {
                let n2 = (a * a + b * b + c * c) as f64;
                // one of each +/- pair
                let first = (a, b, c) > (0, 0, 0);
                if n2 < 1.0 || n2 > kmax * kmax || !first {
                    continue;
                }
                let k = [
                    2.0 * PI * a as f64 / l[0],
                    2.0 * PI * b as f64 / l[1],
                    2.0 * PI * c as f64 / l[2],
                ];
                let mut amp = [[0.0; 3]; 2];
                for part in amp.iter_mut() {
                    for v in part.iter_mut() {
                        *v = rng.gen_range(-1.0..1.0);
                    }
                    let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    let dot = part[0] * k[0] + part[1] * k[1] + part[2] * k[2];
                    for (v, kv) in part.iter_mut().zip(k) {
                        *v -= dot / kk * kv;
                    }
                }
                modes.push((k, amp));
            }
        }
    }
    let mut u = VectorField::from_fn(*grid, |x, y, z| {
        let mut s = [0.0; 3];
        for (k, amp) in &modes {
            let ph = k[0] * x + k[1] * y + k[2] * z;
            let (sn, cs) = ph.sin_cos();
            for d in 0..3 {
                s[d] += amp[0][d] * cs + amp[1][d] * sn;
            }
        }
        s
    });
    let peak = u.norm_squared().max().sqrt();
    if peak > 0.0 {
        let f = amplitude / peak;
        for c in 0..3 {
            let s = u.component(c).map(|v| v * f);
            *u.component_mut(c) = s;
        }
    }
    u
}

#[derive(Debug, Clone)]
pub struct HelixInit {
    pub state: ConservedState,
    pub thermo: ThermoParams,
    pub peak_speed: f64,
    pub sound_speed: f64,
}

/// Unperturbed periodic helix velocity on `grid`, axis at the box center.
pub fn helix_velocity(grid: &Grid, params: &HelixParams) -> Result<VectorField> {
    let o = grid.origin();
    let l = grid.lengths();
    if (l[1] - params.lengths()[1]).abs() > 1e-12 * l[1] {
        return Err(Error::DomainMismatch(format!(
            "axial box length must be {} turns of pitch {}",
            params.n_turns,
            params.pitch()
        )));
    }
    let center = [o[0] + 0.5 * l[0], o[2] + 0.5 * l[2]];
    let field = HelixField::new(params, center, o[1])?;
    let gamma_tot = params.n_filaments as f64 * params.circulation();
    let a = 0.5 * params.radius;
    let per = periodic_line_vortex(grid, gamma_tot, a, center);
    let nx = grid.nx();
    let vals: Vec<[f64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|n| {
            let (i, j, k) = grid.unflatten(n);
            let p = grid.position(i, j, k);
            let mut u = field.velocity(p);
            let lo = lamb_oseen(gamma_tot, a, p[0] - center[0], p[2] - center[1]);
            let m = i + nx * k;
            u[0] += per[0][m] - lo[0];
            u[2] += per[1][m] - lo[2];
            u
        })
        .collect();
    let comp = |c: usize| ScalarField::from_vec(*grid, vals.iter().map(|v| v[c]).collect());
    VectorField::from_components([comp(0)?, comp(1)?, comp(2)?])
}

fn probe_peak(params: &HelixParams, center: [f64; 2]) -> Result<f64> {
    let field = HelixField::new(params, center, 0.0)?;
    let (r, rc, ell) = (params.radius, params.core_radius(), params.ell());
    let mut peak: f64 = 0.0;
    for q in 0..8 {
        let th = 2.0 * PI * (q as f64 / 8.0 + 0.05);
        for dr in [-1.0, 0.0, 1.0, 2.0] {
            let rr = r + dr * rc;
            let p = [center[0] + rr * th.cos(), ell * th, center[1] + rr * th.sin()];
            let u = field.velocity(p);
            peak = peak.max((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt());
        }
    }
    Ok(peak)
}

/// Fails if doubling the samples or the image layers moves the probe peak
/// speed by more than `tol` (relative).
pub fn check_helix_convergence(params: &HelixParams, tol: f64) -> Result<f64> {
    let c = [0.0, 0.0];
    let base = probe_peak(params, c)?;
    let fine = HelixParams {
        samples_per_turn: 2 * params.samples_per_turn,
        far_samples_per_turn: 2 * params.far_samples_per_turn,
        ..*params
    };
    let wide = HelixParams {
        image_layers: 2 * params.image_layers.max(1),
        ..*params
    };
    for other in [probe_peak(&fine, c)?, probe_peak(&wide, c)?] {
        if ((other - base) / base).abs() > tol {
            return Err(Error::QuadratureNotConverged {
                coarse: base,
                fine: other,
            });
        }
    }
    Ok(base)
}

/// Double helix at uniform density and pressure; the sound speed follows
/// from the peak speed and `mach_peak`.
pub fn init_helix(grid: &Grid, params: &HelixParams) -> Result<HelixInit> {
    params.validate()?;
    check_helix_convergence(params, 1e-3)?;
    let mut u = helix_velocity(grid, params)?;
    let peak = u.norm_squared().max().sqrt();
    if params.perturbation > 0.0 {
        let du = solenoidal_perturbation(grid, params.perturbation_kmax, params.perturbation * peak, params.seed);
        for c in 0..3 {
            let s = u.component(c).zip_map(du.component(c), |a, b| a + b)?;
            *u.component_mut(c) = s;
        }
    }
    let sound = peak / params.mach_peak;
    let p0 = params.rho0 * sound * sound / params.gamma;
    let r_gas = p0 / params.rho0;
    let thermo = ThermoParams {
        gamma: params.gamma,
        mu: params.rho0 * params.nu,
        prandtl: params.prandtl,
        prandtl_t: params.prandtl_t,
        cp: params.gamma * r_gas / (params.gamma - 1.0),
    };
    let rho = ScalarField::constant(*grid, params.rho0);
    let p = ScalarField::constant(*grid, p0);
    let state = ConservedState::encode(&rho, &u, &p, &thermo)?;
    Ok(HelixInit {
        state,
        thermo,
        peak_speed: peak,
        sound_speed: sound,
    })
}
