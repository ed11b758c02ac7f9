//! Eddy-viscosity closures: Smagorinsky, structure function, Vreman and the
//! dynamic Smagorinsky model with global averaging.

use crate::compact::Differentiator;
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, ScalarField, TensorField, VectorField};
use crate::filters::{AxisSet, TestFilter, TestFilterSpec};
use crate::grid::{Axis, Grid};
use std::fmt;
use std::str::FromStr;

/// Deviatoric strain `S = (grad u + grad u^T)/2 - tr/3 I` and `|S| = sqrt(S:S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainRate {
    tensor: TensorField,
    magnitude: ScalarField,
}

impl StrainRate {
    /// From a velocity gradient with slot `3i+j = du_i/dx_j`.
    pub fn from_gradient(g: &TensorField) -> Self {
        let grid = *g.grid();
        let len = grid.len();
        let mut s: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; len]);
        let d = |i: usize, j: usize| g.get(i, j).data();
        let mut mag = vec![0.0; len];
        for n in 0..len {
            let tr3 = (d(0, 0)[n] + d(1, 1)[n] + d(2, 2)[n]) / 3.0;
            let s11 = d(0, 0)[n] - tr3;
            let s22 = d(1, 1)[n] - tr3;
            let s33 = d(2, 2)[n] - tr3;
            let s12 = 0.5 * (d(0, 1)[n] + d(1, 0)[n]);
            let s13 = 0.5 * (d(0, 2)[n] + d(2, 0)[n]);
            let s23 = 0.5 * (d(1, 2)[n] + d(2, 1)[n]);
            s[0][n] = s11;
            s[1][n] = s22;
            s[2][n] = s33;
            s[3][n] = s12;
            s[4][n] = s13;
            s[5][n] = s23;
            mag[n] = (s11 * s11 + s22 * s22 + s33 * s33 + 2.0 * (s12 * s12 + s13 * s13 + s23 * s23))
                .sqrt();
        }
        let f = |v: &Vec<f64>| ScalarField::from_vec(grid, v.clone()).expect("grid length");
        let comps = vec![
            f(&s[0]),
            f(&s[3]),
            f(&s[4]),
            f(&s[3]),
            f(&s[1]),
            f(&s[5]),
            f(&s[4]),
            f(&s[5]),
            f(&s[2]),
        ];
        Self {
            tensor: TensorField::from_components(comps).expect("same grid"),
            magnitude: ScalarField::from_vec(grid, mag).expect("grid length"),
        }
    }

    pub fn tensor(&self) -> &TensorField {
        &self.tensor
    }

    pub fn magnitude(&self) -> &ScalarField {
        &self.magnitude
    }

    pub fn grid(&self) -> &Grid {
        self.magnitude.grid()
    }
}

pub fn strain_rate(u: &VectorField) -> Result<StrainRate> {
    let g = Differentiator::new(*u.grid())?.gradient(u)?;
    Ok(StrainRate::from_gradient(&g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SgsModelKind {
    #[default]
    None,
    Smagorinsky,
    StructureFunction,
    Vreman,
    DynamicSmagorinsky,
}

impl fmt::Display for SgsModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SgsModelKind::None => "none",
            SgsModelKind::Smagorinsky => "smagorinsky",
            SgsModelKind::StructureFunction => "structure_function",
            SgsModelKind::Vreman => "vreman",
            SgsModelKind::DynamicSmagorinsky => "dynamic",
        })
    }
}

impl FromStr for SgsModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(SgsModelKind::None),
            "smagorinsky" | "smag" => Ok(SgsModelKind::Smagorinsky),
            "structure_function" | "sf" => Ok(SgsModelKind::StructureFunction),
            "vreman" => Ok(SgsModelKind::Vreman),
            "dynamic" | "dynamic_smagorinsky" => Ok(SgsModelKind::DynamicSmagorinsky),
            _ => Err(Error::InvalidParameter(format!("unknown sgs model '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgsModelConfig {
    pub kind: SgsModelKind,
    pub c_s: f64,
    pub c_k: f64,
    /// Vreman constant; `None` means `2.5 c_s^2`.
    pub vreman_c: Option<f64>,
    /// Lower clip for the dynamic coefficient.
    pub dynamic_clip: f64,
    pub dynamic_filter: TestFilterSpec,
    /// Denominators at or below this are treated as zero.
    pub eps_den: f64,
}

impl SgsModelConfig {
    pub const DEFAULT_C_S: f64 = 0.172;
    pub const DEFAULT_C_K: f64 = 1.5;

    pub fn new(kind: SgsModelKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn vreman_constant(&self) -> f64 {
        self.vreman_c.unwrap_or(2.5 * self.c_s * self.c_s)
    }

    pub fn structure_function_constant(&self) -> f64 {
        0.105 * self.c_k.powf(-1.5)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_s > 0.0) {
            return Err(Error::InvalidParameter(format!("c_s must be positive, got {}", self.c_s)));
        }
        if !(self.c_k > 0.0) {
            return Err(Error::InvalidParameter(format!("c_k must be positive, got {}", self.c_k)));
        }
        if let Some(c) = self.vreman_c {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!("vreman_c must be positive, got {c}")));
            }
        }
        Ok(())
    }
}

impl Default for SgsModelConfig {
    fn default() -> Self {
        Self {
            kind: SgsModelKind::None,
            c_s: Self::DEFAULT_C_S,
            c_k: Self::DEFAULT_C_K,
            vreman_c: None,
            dynamic_clip: 0.0,
            dynamic_filter: TestFilterSpec::of_kind(crate::filters::FilterKind::Impl6),
            eps_den: 1e-30,
        }
    }
}

/// `rho (c_s D)^2 |S|` with `D = (dx dy dz)^(1/3)`.
pub fn mut_smagorinsky(rho: &ScalarField, strain: &StrainRate, config: &SgsModelConfig) -> Result<ScalarField> {
    let d = rho.grid().filter_width();
    let c = (config.c_s * d).powi(2);
    rho.zip_map(strain.magnitude(), |r, s| r * c * s)
}

/// `rho 0.105 C_K^(-3/2) D sqrt(F2)` with `F2` the mean of `|u(x) - u(x + r)|^2`
/// over the six axis neighbors.
pub fn mut_structure_function(rho: &ScalarField, u: &VectorField, config: &SgsModelConfig) -> Result<ScalarField> {
    let grid = *u.grid();
    rho.check_same(u.component(0))?;
    if !grid.is_isotropic() {
        return Err(Error::AnisotropicGridUnsupported);
    }
    let d = grid.spacing(Axis::X);
    let c = config.structure_function_constant() * d;
    let mut f2 = vec![0.0; grid.len()];
    for comp in u.components() {
        let base = comp.data();
        for axis in Axis::ALL {
            for s in [-1isize, 1] {
                let shifted = comp.shift(axis, s);
                for ((o, a), b) in f2.iter_mut().zip(base).zip(shifted.data()) {
                    *o += (a - b) * (a - b);
                }
            }
        }
    }
    let data = f2
        .iter()
        .zip(rho.data())
        .map(|(f, r)| r * c * (f / 6.0).sqrt())
        .collect();
    ScalarField::from_vec(grid, data)
}

/// Vreman model `rho c sqrt(B_beta / (a_ij a_ij))` with `a_ij = du_j/dx_i`
/// and `beta_ij = sum_m D_m^2 a_mi a_mj`.
pub fn mut_vreman(rho: &ScalarField, grad_u: &TensorField, config: &SgsModelConfig) -> Result<ScalarField> {
    let grid = *grad_u.grid();
    rho.check_same(grad_u.get(0, 0))?;
    let d2 = grid.spacings().map(|h| h * h);
    let c = config.vreman_constant();
    let eps = config.eps_den;
    let data = (0..grid.len())
        .map(|n| {
            let t = grad_u.at(n);
            // a[i][j] = du_j/dx_i = t[j][i]
            let a = |i: usize, j: usize| t[j][i];
            let mut aa = 0.0;
            for row in &t {
                for v in row {
                    aa += v * v;
                }
            }
            if aa <= eps {
                return 0.0;
            }
            let beta = |i: usize, j: usize| (0..3).map(|m| d2[m] * a(m, i) * a(m, j)).sum::<f64>();
            let (b11, b22, b33) = (beta(0, 0), beta(1, 1), beta(2, 2));
            let (b12, b13, b23) = (beta(0, 1), beta(0, 2), beta(1, 2));
            let bb = b11 * b22 - b12 * b12 + b11 * b33 - b13 * b13 + b22 * b33 - b23 * b23;
            rho.data()[n] * c * (bb.max(0.0) / aa).sqrt()
        })
        .collect();
    ScalarField::from_vec(grid, data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicResult {
    pub mu_t: ScalarField,
    /// Dimensionless coefficient `<L:M>/<M:M>` after clipping.
    pub c: f64,
    /// `c D^2`, so that `mu_t = rho c_d |S|`.
    pub c_d: f64,
}

// Symmetric component order used below: 11, 22, 33, 12, 13, 23.
const SYM: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
const SYM_W: [f64; 6] = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];

/// Dynamic Smagorinsky with a globally averaged coefficient.
#[derive(Debug, Clone)]
pub struct DynamicSmagorinsky {
    filter: TestFilter,
    clip: f64,
    eps_den: f64,
}

impl DynamicSmagorinsky {
    pub const FILTER_APPLICATIONS: usize = 21;

    pub fn new(grid: Grid, config: &SgsModelConfig) -> Result<Self> {
        Ok(Self {
            filter: TestFilter::new(grid, config.dynamic_filter, AxisSet::ALL)?,
            clip: config.dynamic_clip,
            eps_den: config.eps_den,
        })
    }

    pub fn filter(&self) -> &TestFilter {
        &self.filter
    }

    pub fn evaluate(&self, rho: &ScalarField, u: &VectorField, strain: &StrainRate) -> Result<DynamicResult> {
        let grid = *rho.grid();
        rho.check_same(u.component(0))?;
        rho.check_same(strain.magnitude())?;
        let len = grid.len();
        let mut scratch = vec![0.0; len];
        let mut filt = |mut v: Vec<f64>| {
            self.filter.apply_in_place(&mut v, &mut scratch);
            v
        };
        let r = rho.data();
        let uc: [&[f64]; 3] = std::array::from_fn(|i| u.component(i).data());

        let rho_h = filt(r.to_vec());
        let m: [Vec<f64>; 3] = std::array::from_fn(|i| filt(r.iter().zip(uc[i]).map(|(a, b)| a * b).collect()));
        let p: [Vec<f64>; 6] = std::array::from_fn(|c| {
            let (i, j) = SYM[c];
            filt((0..len).map(|n| r[n] * uc[i][n] * uc[j][n]).collect())
        });
        let st = strain.tensor();
        let sh: [Vec<f64>; 6] = std::array::from_fn(|c| {
            let (i, j) = SYM[c];
            filt(st.get(i, j).data().to_vec())
        });
        let smag = strain.magnitude().data();
        // 33 follows from tracelessness of the filtered deviatoric product.
        let mut q: [Vec<f64>; 6] = std::array::from_fn(|_| Vec::new());
        for c in [0, 1, 3, 4, 5] {
            let (i, j) = SYM[c];
            let s = st.get(i, j).data();
            q[c] = filt((0..len).map(|n| r[n] * smag[n] * s[n]).collect());
        }
        q[2] = q[0].iter().zip(&q[1]).map(|(a, b)| -(a + b)).collect();

        let dbar2 = grid.filter_width().powi(2);
        let dhat2 = (self.filter.spec().width_ratio()).powi(2) * dbar2;
        let mut lm = vec![0.0; len];
        let mut mm = vec![0.0; len];
        for n in 0..len {
            let tr3 = (sh[0][n] + sh[1][n] + sh[2][n]) / 3.0;
            let shd: [f64; 6] = std::array::from_fn(|c| if c < 3 { sh[c][n] - tr3 } else { sh[c][n] });
            let shmag = (0..6).map(|c| SYM_W[c] * shd[c] * shd[c]).sum::<f64>().sqrt();
            let (mut a, mut b) = (0.0, 0.0);
            for c in 0..6 {
                let (i, j) = SYM[c];
                let l = p[c][n] - m[i][n] * m[j][n] / rho_h[n];
                let mc = -2.0 * dhat2 * rho_h[n] * shmag * shd[c] + 2.0 * dbar2 * q[c][n];
                a += SYM_W[c] * l * mc;
                b += SYM_W[c] * mc * mc;
            }
            lm[n] = a;
            mm[n] = b;
        }
        let lm_avg = pairwise_sum(&lm) / len as f64;
        let mm_avg = pairwise_sum(&mm) / len as f64;
        let c = if mm_avg > self.eps_den && (lm_avg / mm_avg).is_finite() {
            (lm_avg / mm_avg).max(self.clip)
        } else {
            0.0
        };
        let c_d = c * dbar2;
        let mu_t = rho.zip_map(strain.magnitude(), |r, s| r * c_d * s)?;
        Ok(DynamicResult { mu_t, c, c_d })
    }
}

pub fn mut_dynamic_smagorinsky(
    rho: &ScalarField,
    u: &VectorField,
    strain: &StrainRate,
    filter: &TestFilterSpec,
) -> Result<DynamicResult> {
    let cfg = SgsModelConfig {
        kind: SgsModelKind::DynamicSmagorinsky,
        dynamic_filter: *filter,
        ..SgsModelConfig::default()
    };
    DynamicSmagorinsky::new(*rho.grid(), &cfg)?.evaluate(rho, u, strain)
}

/// A configured model bound to one grid.
#[derive(Debug, Clone)]
pub struct SgsModel {
    config: SgsModelConfig,
    grid: Grid,
    dynamic: Option<DynamicSmagorinsky>,
    last_c_d: Option<f64>,
}

impl SgsModel {
    pub fn new(grid: Grid, config: SgsModelConfig) -> Result<Self> {
        config.validate()?;
        if config.kind == SgsModelKind::StructureFunction && !grid.is_isotropic() {
            return Err(Error::AnisotropicGridUnsupported);
        }
        let dynamic = if config.kind == SgsModelKind::DynamicSmagorinsky {
            Some(DynamicSmagorinsky::new(grid, &config)?)
        } else {
            None
        };
        Ok(Self {
            config,
            grid,
            dynamic,
            last_c_d: None,
        })
    }

    pub fn config(&self) -> &SgsModelConfig {
        &self.config
    }

    pub fn kind(&self) -> SgsModelKind {
        self.config.kind
    }

    /// Dynamic coefficient `c_d` from the latest evaluation.
    pub fn last_c_d(&self) -> Option<f64> {
        self.last_c_d
    }

    /// Test-filter applications made so far by the dynamic procedure.
    pub fn filter_applications(&self) -> usize {
        self.dynamic.as_ref().map_or(0, |d| d.filter().applications())
    }

    pub fn eddy_viscosity(
        &mut self,
        rho: &ScalarField,
        u: &VectorField,
        grad_u: &TensorField,
        strain: &StrainRate,
    ) -> Result<ScalarField> {
        match self.config.kind {
            SgsModelKind::None => Ok(ScalarField::zeros(self.grid)),
            SgsModelKind::Smagorinsky => mut_smagorinsky(rho, strain, &self.config),
            SgsModelKind::StructureFunction => mut_structure_function(rho, u, &self.config),
            SgsModelKind::Vreman => mut_vreman(rho, grad_u, &self.config),
            SgsModelKind::DynamicSmagorinsky => {
                let r = self.dynamic.as_ref().expect("dynamic model").evaluate(rho, u, strain)?;
                self.last_c_d = Some(r.c_d);
                Ok(r.mu_t)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cube(16, 2.0 * PI).unwrap()
    }

    fn shear(g: Grid) -> VectorField {
        VectorField::from_fn(g, |_, y, _| [y.sin(), 0.0, 0.0])
    }

    #[test]
    fn strain_symmetric_traceless() {
        let g = grid();
        let u = VectorField::from_fn(g, |x, y, z| [x.sin() * y.cos(), z.sin() + x.cos(), (x + y).sin()]);
        let s = strain_rate(&u).unwrap();
        let t = s.tensor();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.get(i, j), t.get(j, i));
            }
        }
        assert!(t.trace().max_abs() <= 1e-10 * t.max_abs());
    }

    #[test]
    fn shear_strain_and_smagorinsky() {
        let g = grid();
        let s = strain_rate(&shear(g)).unwrap();
        // du/dy = cos(y) = 1 at y = 0
        let n = g.index(0, 0, 0);
        assert!((s.tensor().get(0, 1).data()[n] - 0.5).abs() < 1e-5);
        let rho = ScalarField::constant(g, 1.3);
        let cfg = SgsModelConfig::new(SgsModelKind::Smagorinsky);
        let mu = mut_smagorinsky(&rho, &s, &cfg).unwrap();
        let expect = 1.3 * (0.172 * g.filter_width()).powi(2) / 2f64.sqrt();
        assert!((mu.data()[n] / expect - 1.0).abs() < 1e-4);
        let cfg2 = SgsModelConfig { c_s: 0.344, ..cfg };
        let mu2 = mut_smagorinsky(&rho, &s, &cfg2).unwrap();
        assert!(mu2.zip_map(&mu, |a, b| a - 4.0 * b).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn structure_function_single_mode() {
        let g = grid();
        let u = VectorField::from_fn(g, |x, _, _| [x.sin(), 0.0, 0.0]);
        let rho = ScalarField::constant(g, 1.0);
        let cfg = SgsModelConfig::new(SgsModelKind::StructureFunction);
        let mu = mut_structure_function(&rho, &u, &cfg).unwrap();
        let h = g.spacing(Axis::X);
        let c = cfg.structure_function_constant() * h;
        let expect = ScalarField::from_fn(g, |x, _, _| {
            let f2 = ((x.sin() - (x + h).sin()).powi(2) + (x.sin() - (x - h).sin()).powi(2)) / 6.0;
            c * f2.sqrt()
        });
        assert!(mu.zip_map(&expect, |a, b| a - b).unwrap().max_abs() < 1e-10);
        let aniso = Grid::new([16, 16, 16], [1.0, 2.0, 1.0]).unwrap();
        let u2 = VectorField::zeros(aniso);
        assert!(matches!(
            mut_structure_function(&ScalarField::constant(aniso, 1.0), &u2, &cfg),
            Err(Error::AnisotropicGridUnsupported)
        ));
    }

    #[test]
    fn vreman_cases() {
        let g = grid();
        let rho = ScalarField::constant(g, 1.0);
        let cfg = SgsModelConfig::new(SgsModelKind::Vreman);
        let mut t = TensorField::zeros(g);
        assert_eq!(mut_vreman(&rho, &t, &cfg).unwrap().max_abs(), 0.0);
        *t.get_mut(0, 1) = ScalarField::constant(g, 3.0);
        assert!(mut_vreman(&rho, &t, &cfg).unwrap().max_abs() < 1e-12);
        let gg = 0.7;
        let mut d = TensorField::zeros(g);
        for i in 0..3 {
            *d.get_mut(i, i) = ScalarField::constant(g, gg);
        }
        let h = g.spacing(Axis::X);
        let expect = cfg.vreman_constant() * h * h * gg;
        let mu = mut_vreman(&rho, &d, &cfg).unwrap();
        assert!((mu.data()[0] - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn dynamic_uniform_flow_is_zero() {
        let g = grid();
        let rho = ScalarField::constant(g, 1.0);
        let u = VectorField::from_fn(g, |_, _, _| [1.0, 2.0, 3.0]);
        let s = strain_rate(&u).unwrap();
        let r = mut_dynamic_smagorinsky(&rho, &u, &s, &TestFilterSpec::of_kind(crate::filters::FilterKind::Impl6)).unwrap();
        assert_eq!(r.c_d, 0.0);
        assert_eq!(r.mu_t.max_abs(), 0.0);
    }

    #[test]
    fn dynamic_counts_21_filterings() {
        let g = grid();
        let rho = ScalarField::from_fn(g, |x, _, _| 1.0 + 0.1 * x.cos());
        let u = VectorField::from_fn(g, |x, y, z| [x.sin() * y.cos(), (2.0 * z).cos(), (x + 3.0 * y).sin()]);
        let grad = Differentiator::new(g).unwrap().gradient(&u).unwrap();
        let s = StrainRate::from_gradient(&grad);
        let mut m = SgsModel::new(g, SgsModelConfig::new(SgsModelKind::DynamicSmagorinsky)).unwrap();
        m.eddy_viscosity(&rho, &u, &grad, &s).unwrap();
        assert_eq!(m.filter_applications(), DynamicSmagorinsky::FILTER_APPLICATIONS);
        assert!(m.last_c_d().unwrap() >= 0.0);
    }
}
