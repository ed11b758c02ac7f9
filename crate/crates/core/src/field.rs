//! Scalar, vector and tensor fields on a [`Grid`], the conserved state and
//! thermodynamic closure.
//!
//! Every component is a separate x-fastest array (structure of arrays).
//! Vector components are ordered (x, y, z); tensor component `(i, j)` lives at
//! slot `3 * i + j` and, for gradients, holds `du_i/dx_j`.

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 128;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_vec(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::ShapeMismatch);
        }
        Ok(Self { grid, data })
    }

    /// Samples `f(x, y, z)` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for k in 0..grid.nz() {
            let z = grid.coordinate(Axis::Z, k);
            for j in 0..grid.ny() {
                let y = grid.coordinate(Axis::Y, j);
                for i in 0..grid.nx() {
                    data.push(f(grid.coordinate(Axis::X, i), y, z));
                }
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.grid.index(i, j, k)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same(&self, other: &ScalarField) -> Result<()> {
        if self.grid.shape() != other.grid.shape() {
            return Err(Error::ShapeMismatch);
        }
        Ok(())
    }

    /// Periodic shift by `s` nodes along `axis`: `out[i] = self[i - s]`.
    pub fn shift(&self, axis: Axis, s: isize) -> Self {
        let g = self.grid;
        let mut out = vec![0.0; self.data.len()];
        for k in 0..g.nz() {
            for j in 0..g.ny() {
                for i in 0..g.nx() {
                    let (mut si, mut sj, mut sk) = (i as isize, j as isize, k as isize);
                    match axis {
                        Axis::X => si -= s,
                        Axis::Y => sj -= s,
                        Axis::Z => sk -= s,
                    }
                    let src = g.index(
                        g.wrap(Axis::X, si),
                        g.wrap(Axis::Y, sj),
                        g.wrap(Axis::Z, sk),
                    );
                    out[g.index(i, j, k)] = self.data[src];
                }
            }
        }
        Self {
            grid: g,
            data: out,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Mean over all nodes, `sum(f) / (nx ny nz)`, with fixed summation order.
pub fn volume_average(f: &ScalarField) -> f64 {
    pairwise_sum(f.data()) / f.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            comps: std::array::from_fn(|_| ScalarField::zeros(grid)),
        }
    }

    pub fn from_components(comps: [ScalarField; 3]) -> Result<Self> {
        comps[0].check_same(&comps[1])?;
        comps[0].check_same(&comps[2])?;
        Ok(Self { comps })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let comps = std::array::from_fn(|c| ScalarField::from_fn(grid, |x, y, z| f(x, y, z)[c]));
        Self { comps }
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn component(&self, c: usize) -> &ScalarField {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut ScalarField {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.comps
    }

    /// Pointwise `|v|^2`.
    pub fn norm_squared(&self) -> ScalarField {
        let [a, b, c] = &self.comps;
        let data = a
            .data()
            .iter()
            .zip(b.data())
            .zip(c.data())
            .map(|((x, y), z)| x * x + y * y + z * z)
            .collect();
        ScalarField {
            grid: *self.grid(),
            data,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.comps.iter().all(ScalarField::all_finite)
    }
}

/// Nine-component field; slot `3 * i + j` holds component `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    comps: Vec<ScalarField>,
}

impl TensorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            comps: (0..9).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn from_components(comps: Vec<ScalarField>) -> Result<Self> {
        if comps.len() != 9 {
            return Err(Error::ShapeMismatch);
        }
        for c in &comps[1..] {
            comps[0].check_same(c)?;
        }
        Ok(Self { comps })
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.comps[3 * i + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut ScalarField {
        &mut self.comps[3 * i + j]
    }

    /// Pointwise trace.
    pub fn trace(&self) -> ScalarField {
        let data = (0..self.grid().len())
            .map(|n| self.get(0, 0).data()[n] + self.get(1, 1).data()[n] + self.get(2, 2).data()[n])
            .collect();
        ScalarField {
            grid: *self.grid(),
            data,
        }
    }

    /// Pointwise double contraction `T:T`.
    pub fn double_dot_self(&self) -> ScalarField {
        let mut out = vec![0.0; self.grid().len()];
        for c in &self.comps {
            for (o, v) in out.iter_mut().zip(c.data()) {
                *o += v * v;
            }
        }
        ScalarField {
            grid: *self.grid(),
            data: out,
        }
    }

    /// Components at one node, row-major.
    pub fn at(&self, n: usize) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j).data()[n]))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }
}

/// Ideal-gas thermodynamics and transport coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoParams {
    pub gamma: f64,
    /// Dynamic viscosity.
    pub mu: f64,
    pub prandtl: f64,
    pub prandtl_t: f64,
    /// Heat capacity at constant pressure.
    pub cp: f64,
}

impl ThermoParams {
    pub const DEFAULT_PRANDTL_T: f64 = 0.5;

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) {
            return Err(Error::InvalidParameter(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !(self.mu >= 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be non-negative, got {}", self.mu)));
        }
        if !(self.prandtl > 0.0 && self.prandtl_t > 0.0 && self.cp > 0.0) {
            return Err(Error::InvalidParameter(
                "prandtl, prandtl_t and cp must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Specific gas constant `cp (gamma - 1) / gamma`.
    pub fn gas_constant(&self) -> f64 {
        self.cp * (self.gamma - 1.0) / self.gamma
    }

    /// Molecular conductivity `mu cp / Pr`.
    pub fn conductivity(&self) -> f64 {
        self.mu * self.cp / self.prandtl
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedState {
    pub rho: ScalarField,
    pub mom: VectorField,
    pub rho_e: ScalarField,
}

/// Velocity, pressure and temperature decoded from a [`ConservedState`].
#[derive(Debug, Clone, PartialEq)]
pub struct Primitives {
    pub velocity: VectorField,
    pub pressure: ScalarField,
    pub temperature: ScalarField,
}

impl ConservedState {
    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// The five conserved fields in storage order (rho, rho u, rho v, rho w, rho E).
    pub fn fields(&self) -> [&ScalarField; 5] {
        [
            &self.rho,
            self.mom.component(0),
            self.mom.component(1),
            self.mom.component(2),
            &self.rho_e,
        ]
    }

    pub fn fields_mut(&mut self) -> [&mut ScalarField; 5] {
        let [mx, my, mz] = &mut self.mom.comps;
        [&mut self.rho, mx, my, mz, &mut self.rho_e]
    }

    pub fn from_fields(fields: [ScalarField; 5]) -> Result<Self> {
        let [rho, mx, my, mz, rho_e] = fields;
        rho.check_same(&rho_e)?;
        let mom = VectorField::from_components([mx, my, mz])?;
        rho.check_same(mom.component(0))?;
        Ok(Self { rho, mom, rho_e })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            rho: ScalarField::zeros(grid),
            mom: VectorField::zeros(grid),
            rho_e: ScalarField::zeros(grid),
        }
    }

    /// Builds the conserved state from density, velocity and pressure.
    pub fn encode(
        rho: &ScalarField,
        velocity: &VectorField,
        pressure: &ScalarField,
        thermo: &ThermoParams,
    ) -> Result<Self> {
        rho.check_same(pressure)?;
        rho.check_same(velocity.component(0))?;
        let grid = *rho.grid();
        let n = grid.len();
        let mut mom = VectorField::zeros(grid);
        let mut rho_e = vec![0.0; n];
        let g1 = thermo.gamma - 1.0;
        for idx in 0..n {
            let r = rho.data()[idx];
            let mut ke = 0.0;
            for c in 0..3 {
                let u = velocity.component(c).data()[idx];
                mom.comps[c].data[idx] = r * u;
                ke += u * u;
            }
            rho_e[idx] = pressure.data()[idx] / g1 + 0.5 * r * ke;
        }
        Ok(Self {
            rho: rho.clone(),
            mom,
            rho_e: ScalarField {
                grid,
                data: rho_e,
            },
        })
    }

    /// Velocity, ideal-gas pressure and temperature `p / (rho r)`.
    pub fn decode(&self, thermo: &ThermoParams) -> Result<Primitives> {
        let grid = *self.grid();
        let n = grid.len();
        let r_gas = thermo.gas_constant();
        let g1 = thermo.gamma - 1.0;
        let mut vel: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; n]);
        let mut p = vec![0.0; n];
        let mut t = vec![0.0; n];
        for idx in 0..n {
            let r = self.rho.data[idx];
            if !(r > 0.0) {
                return Err(Error::NonPositiveDensity { index: idx, value: r });
            }
            let inv = 1.0 / r;
            let mut ke = 0.0;
            for c in 0..3 {
                let m = self.mom.comps[c].data[idx];
                vel[c][idx] = m * inv;
                ke += m * m;
            }
            let pr = g1 * (self.rho_e.data[idx] - 0.5 * ke * inv);
            if !(pr > 0.0) {
                return Err(Error::NonPositivePressure { index: idx, value: pr });
            }
            p[idx] = pr;
            t[idx] = pr * inv / r_gas;
        }
        let [vx, vy, vz] = vel;
        Ok(Primitives {
            velocity: VectorField {
                comps: [
                    ScalarField { grid, data: vx },
                    ScalarField { grid, data: vy },
                    ScalarField { grid, data: vz },
                ],
            },
            pressure: ScalarField { grid, data: p },
            temperature: ScalarField { grid, data: t },
        })
    }

    pub fn all_finite(&self) -> bool {
        self.fields().iter().all(|f| f.all_finite())
    }
}

/// Free-function form of [`ConservedState::decode`].
pub fn primitive_decode(state: &ConservedState, thermo: &ThermoParams) -> Result<Primitives> {
    state.decode(thermo)
}
