//! Right-hand side of the filtered compressible Navier-Stokes equations in
//! divergence form, SSP-RK3 time integration and time-step control.

use crate::compact::{Differentiator, SolutionFilter};
use crate::cvp::{apply_cvp, CvpConfig, CvpSensor};
use crate::diagnostics::sgs_dissipation;
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, ConservedState, Primitives, ScalarField, ThermoParams};
use crate::grid::{Axis, Grid};
use crate::sgs::{SgsModel, SgsModelConfig, SgsModelKind, StrainRate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Parts {
    convective: bool,
    viscous: bool,
    sgs: bool,
}

impl Parts {
    const ALL: Parts = Parts {
        convective: true,
        viscous: true,
        sgs: true,
    };
}

/// Flux-divergence engine for one grid and gas.
#[derive(Debug, Clone)]
pub struct RhsOperator {
    grid: Grid,
    thermo: ThermoParams,
    diff: Differentiator,
}

type Buf5 = [Vec<f64>; 5];

fn to_state(grid: Grid, out: Buf5) -> ConservedState {
    let f = out.map(|v| ScalarField::from_vec(grid, v).expect("grid length"));
    ConservedState::from_fields(f).expect("same grid")
}

fn blow_up(e: Error) -> Error {
    match e {
        Error::NonPositiveDensity { .. } | Error::NonPositivePressure { .. } => {
            Error::SolverBlowUp(e.to_string())
        }
        other => other,
    }
}

impl RhsOperator {
    pub fn new(grid: Grid, thermo: ThermoParams) -> Result<Self> {
        thermo.validate()?;
        Ok(Self {
            grid,
            thermo,
            diff: Differentiator::new(grid)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn thermo(&self) -> &ThermoParams {
        &self.thermo
    }

    pub fn differentiator(&self) -> &Differentiator {
        &self.diff
    }

    fn derivatives(&self, prims: &Primitives) -> ([Vec<f64>; 9], [Vec<f64>; 3]) {
        let len = self.grid.len();
        let mut gu: [Vec<f64>; 9] = std::array::from_fn(|_| vec![0.0; len]);
        let mut gt: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; len]);
        for i in 0..3 {
            let u = prims.velocity.component(i).data();
            for a in Axis::ALL {
                self.diff.ddx_slice(u, a, &mut gu[3 * i + a.index()]);
            }
        }
        for a in Axis::ALL {
            self.diff
                .ddx_slice(prims.temperature.data(), a, &mut gt[a.index()]);
        }
        (gu, gt)
    }

    fn assemble(&self, state: &ConservedState, mu_t: Option<&ScalarField>, parts: Parts) -> Result<Buf5> {
        let prims = state.decode(&self.thermo).map_err(blow_up)?;
        let len = self.grid.len();
        let needs_grad = parts.viscous || (parts.sgs && mu_t.is_some());
        let (gu, gt) = if needs_grad {
            self.derivatives(&prims)
        } else {
            (std::array::from_fn(|_| Vec::new()), std::array::from_fn(|_| Vec::new()))
        };
        let mu = self.thermo.mu;
        let lambda = self.thermo.conductivity();
        let kt = self.thermo.cp / self.thermo.prandtl_t;
        let m: [&[f64]; 3] = std::array::from_fn(|i| state.mom.component(i).data());
        let re = state.rho_e.data();
        let u: [&[f64]; 3] = std::array::from_fn(|i| prims.velocity.component(i).data());
        let p = prims.pressure.data();
        let mt = mu_t.filter(|_| parts.sgs).map(|f| f.data());

        let mut out: Buf5 = std::array::from_fn(|_| vec![0.0; len]);
        let mut flux: Buf5 = std::array::from_fn(|_| vec![0.0; len]);
        let mut d = vec![0.0; len];
        for axis in Axis::ALL {
            let j = axis.index();
            for n in 0..len {
                let uj = u[j][n];
                let mut f = [0.0; 5];
                if parts.convective {
                    f[0] = m[j][n];
                    for i in 0..3 {
                        f[1 + i] = m[i][n] * uj;
                    }
                    f[1 + j] += p[n];
                    f[4] = (re[n] + p[n]) * uj;
                }
                if needs_grad {
                    let g = |a: usize, b: usize| gu[3 * a + b][n];
                    let div3 = (g(0, 0) + g(1, 1) + g(2, 2)) / 3.0;
                    let s: [f64; 3] = std::array::from_fn(|i| {
                        0.5 * (g(i, j) + g(j, i)) - if i == j { div3 } else { 0.0 }
                    });
                    if parts.viscous {
                        let mut work = 0.0;
                        for i in 0..3 {
                            f[1 + i] -= 2.0 * mu * s[i];
                            work += s[i] * u[i][n];
                        }
                        f[4] -= 2.0 * mu * work + lambda * gt[j][n];
                    }
                    if let Some(mt) = mt {
                        let nu = mt[n];
                        for i in 0..3 {
                            f[1 + i] -= 2.0 * nu * s[i];
                        }
                        f[4] -= nu * kt * gt[j][n];
                    }
                }
                for e in 0..5 {
                    flux[e][n] = f[e];
                }
            }
            for e in 0..5 {
                if e == 0 && !parts.convective {
                    continue;
                }
                self.diff.ddx_slice(&flux[e], axis, &mut d);
                for (o, v) in out[e].iter_mut().zip(&d) {
                    *o -= v;
                }
            }
        }
        Ok(out)
    }

    /// `-div F_c`.
    pub fn convective_rhs(&self, state: &ConservedState) -> Result<ConservedState> {
        let p = Parts {
            convective: true,
            viscous: false,
            sgs: false,
        };
        Ok(to_state(self.grid, self.assemble(state, None, p)?))
    }

    /// `+div F_v` with `tau = 2 mu S` and Fourier heat flux.
    pub fn viscous_rhs(&self, state: &ConservedState) -> Result<ConservedState> {
        let p = Parts {
            convective: false,
            viscous: true,
            sgs: false,
        };
        Ok(to_state(self.grid, self.assemble(state, None, p)?))
    }

    /// `+div F_sgs` with `tau_sgs = 2 mu_t S` and heat flux `mu_t cp / Pr_t grad T`.
    pub fn sgs_rhs(&self, state: &ConservedState, mu_t: &ScalarField) -> Result<ConservedState> {
        let p = Parts {
            convective: false,
            viscous: false,
            sgs: true,
        };
        Ok(to_state(self.grid, self.assemble(state, Some(mu_t), p)?))
    }

    /// All three contributions in one pass.
    pub fn rhs(&self, state: &ConservedState, mu_t: Option<&ScalarField>) -> Result<ConservedState> {
        Ok(to_state(self.grid, self.assemble(state, mu_t, Parts::ALL)?))
    }

    pub fn budget(&self, state: &ConservedState, mu_t: &ScalarField) -> Result<RhsBudget> {
        Ok(RhsBudget {
            convective: self.convective_rhs(state)?,
            viscous: self.viscous_rhs(state)?,
            sgs: self.sgs_rhs(state, mu_t)?,
        })
    }
}

/// Separate contributions to the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsBudget {
    pub convective: ConservedState,
    pub viscous: ConservedState,
    pub sgs: ConservedState,
}

impl RhsBudget {
    pub fn total(&self) -> ConservedState {
        let grid = *self.convective.grid();
        let fields = std::array::from_fn(|e| {
            let a = self.convective.fields()[e].data();
            let b = self.viscous.fields()[e].data();
            let c = self.sgs.fields()[e].data();
            let v = (0..grid.len()).map(|n| a[n] + b[n] + c[n]).collect();
            ScalarField::from_vec(grid, v).expect("grid length")
        });
        ConservedState::from_fields(fields).expect("same grid")
    }
}

fn axpy_state(a: f64, x: &ConservedState, b: f64, y: &ConservedState, c: f64, z: &ConservedState) -> ConservedState {
    let grid = *x.grid();
    let fields = std::array::from_fn(|e| {
        let (xv, yv, zv) = (x.fields()[e].data(), y.fields()[e].data(), z.fields()[e].data());
        let v = (0..grid.len()).map(|n| a * xv[n] + b * yv[n] + c * zv[n]).collect();
        ScalarField::from_vec(grid, v).expect("grid length")
    });
    ConservedState::from_fields(fields).expect("same grid")
}

fn check_finite(s: &ConservedState, stage: usize) -> Result<()> {
    if !s.all_finite() {
        return Err(Error::SolverBlowUp(format!("non-finite value after stage {stage}")));
    }
    Ok(())
}

/// One three-stage strong-stability-preserving Runge-Kutta step (Shu-Osher form).
pub fn rk3_step<F>(state: &ConservedState, dt: f64, mut rhs: F) -> Result<ConservedState>
where
    F: FnMut(&ConservedState) -> Result<ConservedState>,
{
    let l0 = rhs(state)?;
    let u1 = axpy_state(1.0, state, dt, &l0, 0.0, &l0);
    check_finite(&u1, 1)?;
    let l1 = rhs(&u1)?;
    let u2 = axpy_state(0.75, state, 0.25, &u1, 0.25 * dt, &l1);
    check_finite(&u2, 2)?;
    let l2 = rhs(&u2)?;
    let u3 = axpy_state(1.0 / 3.0, state, 2.0 / 3.0, &u2, 2.0 / 3.0 * dt, &l2);
    check_finite(&u3, 3)?;
    Ok(u3)
}

/// `min(cfl * min D_a / (|u_a| + c), min(rho) D_min^2 / (2 (mu + mu_t_max) 3))`.
pub fn compute_dt(state: &ConservedState, thermo: &ThermoParams, cfl: f64, mu_t_max: f64) -> Result<f64> {
    let prims = state.decode(thermo)?;
    let grid = state.grid();
    let h = grid.spacings();
    let mut adv = f64::INFINITY;
    let mut rho_min = f64::INFINITY;
    for n in 0..grid.len() {
        let r = state.rho.data()[n];
        rho_min = rho_min.min(r);
        let c = (thermo.gamma * prims.pressure.data()[n] / r).sqrt();
        for a in 0..3 {
            let s = prims.velocity.component(a).data()[n].abs() + c;
            adv = adv.min(h[a] / s);
        }
    }
    let dt_adv = cfl * adv;
    let visc = thermo.mu + mu_t_max.max(0.0);
    let dt_visc = if visc > 0.0 {
        rho_min * grid.min_spacing().powi(2) / (2.0 * visc * 3.0)
    } else {
        f64::INFINITY
    };
    Ok(dt_adv.min(dt_visc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStepControl {
    pub cfl: f64,
    pub dt: f64,
    pub t: f64,
    pub step: u64,
}

impl TimeStepControl {
    pub const DEFAULT_CFL: f64 = 0.5;

    pub fn new(cfl: f64) -> Result<Self> {
        if !(cfl > 0.0) {
            return Err(Error::InvalidParameter(format!("cfl must be positive, got {cfl}")));
        }
        Ok(Self {
            cfl,
            dt: 0.0,
            t: 0.0,
            step: 0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    /// Solution-filter strength; `None` disables filtering.
    pub filter_alpha: Option<f64>,
    pub sgs: SgsModelConfig,
    pub cvp: Option<CvpConfig>,
    /// Re-evaluate the eddy viscosity at every stage instead of once per step.
    pub mut_per_stage: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: TimeStepControl::DEFAULT_CFL,
            filter_alpha: Some(SolutionFilter::DEFAULT_ALPHA),
            sgs: SgsModelConfig::default(),
            cvp: None,
            mut_per_stage: false,
        }
    }
}

/// Eddy viscosity and sensor statistics at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureState {
    pub mu_t: ScalarField,
    /// `<mu_t S:S>`.
    pub eps_sgs: f64,
    /// Volume mean of `f`; 1 when the sensor is off.
    pub mean_f: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_mut: f64,
    pub c_d: Option<f64>,
}

/// SGS model plus optional sensor.
#[derive(Debug, Clone)]
pub struct Closure {
    model: SgsModel,
    sensor: Option<CvpSensor>,
}

impl Closure {
    pub fn new(grid: Grid, sgs: SgsModelConfig, cvp: Option<CvpConfig>) -> Result<Self> {
        Ok(Self {
            model: SgsModel::new(grid, sgs)?,
            sensor: cvp.map(|c| CvpSensor::new(grid, c)).transpose()?,
        })
    }

    pub fn model(&self) -> &SgsModel {
        &self.model
    }

    pub fn sensor(&self) -> Option<&CvpSensor> {
        self.sensor.as_ref()
    }

    pub fn is_active(&self) -> bool {
        self.model.kind() != SgsModelKind::None || self.sensor.is_some()
    }

    pub fn evaluate(&mut self, op: &RhsOperator, state: &ConservedState) -> Result<ClosureState> {
        let grid = *op.grid();
        if !self.is_active() {
            return Ok(ClosureState {
                mu_t: ScalarField::zeros(grid),
                eps_sgs: 0.0,
                mean_f: 1.0,
                sigma_min: f64::NAN,
                sigma_max: f64::NAN,
                max_mut: 0.0,
                c_d: None,
            });
        }
        let prims = state.decode(op.thermo()).map_err(blow_up)?;
        let grad = op.differentiator().gradient(&prims.velocity)?;
        let strain = StrainRate::from_gradient(&grad);
        let mut mu_t = self
            .model
            .eddy_viscosity(&state.rho, &prims.velocity, &grad, &strain)?;
        let (mut mean_f, mut sigma_min, mut sigma_max) = (1.0, f64::NAN, f64::NAN);
        if let Some(sensor) = &self.sensor {
            let (f, sigma) = sensor.evaluate(&grad)?;
            mu_t = apply_cvp(&mu_t, &f)?;
            let st = CvpSensor::stats(&f, &sigma);
            mean_f = st.mean_f;
            sigma_min = st.sigma_min;
            sigma_max = st.sigma_max;
        }
        let eps_sgs = sgs_dissipation(&mu_t, &strain)?;
        Ok(ClosureState {
            max_mut: mu_t.max(),
            eps_sgs,
            mean_f,
            sigma_min,
            sigma_max,
            c_d: self.model.last_c_d(),
            mu_t,
        })
    }
}

/// Outcome of one time step; closure statistics refer to the start of the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub t: f64,
    pub dt: f64,
    pub eps_sgs: f64,
    pub mean_f: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub max_mut: f64,
    pub c_d: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FlowSolver {
    op: RhsOperator,
    closure: Closure,
    filter: Option<SolutionFilter>,
    config: SolverConfig,
    control: TimeStepControl,
}

impl FlowSolver {
    pub fn new(grid: Grid, thermo: ThermoParams, config: SolverConfig) -> Result<Self> {
        Ok(Self {
            op: RhsOperator::new(grid, thermo)?,
            closure: Closure::new(grid, config.sgs, config.cvp)?,
            filter: config
                .filter_alpha
                .map(|a| SolutionFilter::new(grid, a))
                .transpose()?,
            control: TimeStepControl::new(config.cfl)?,
            config,
        })
    }

    pub fn operator(&self) -> &RhsOperator {
        &self.op
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn control(&self) -> &TimeStepControl {
        &self.control
    }

    pub fn set_time(&mut self, t: f64) {
        self.control.t = t;
    }

    /// Closure statistics for `state` without advancing.
    pub fn closure_state(&mut self, state: &ConservedState) -> Result<ClosureState> {
        self.closure.evaluate(&self.op, state)
    }

    /// Advances `state` by one CFL-limited step.
    pub fn step(&mut self, state: &mut ConservedState) -> Result<StepReport> {
        self.advance(state, None, f64::INFINITY)
    }

    /// CFL-limited step that does not go past `t_end`.
    pub fn step_until(&mut self, state: &mut ConservedState, t_end: f64) -> Result<StepReport> {
        self.advance(state, None, t_end - self.control.t)
    }

    /// Advances `state` by exactly `dt`.
    pub fn step_with_dt(&mut self, state: &mut ConservedState, dt: f64) -> Result<StepReport> {
        self.advance(state, Some(dt), f64::INFINITY)
    }

    fn advance(&mut self, state: &mut ConservedState, dt: Option<f64>, cap: f64) -> Result<StepReport> {
        let cs = self.closure.evaluate(&self.op, state)?;
        let dt = match dt {
            Some(dt) => dt,
            None => compute_dt(state, self.op.thermo(), self.control.cfl, cs.max_mut)
                .map_err(blow_up)?
                .min(cap),
        };
        let active = self.closure.is_active();
        let per_stage = self.config.mut_per_stage && active;
        let op = &self.op;
        let closure = &mut self.closure;
        let mu_first = &cs.mu_t;
        let mut stage = 0usize;
        let mut next = rk3_step(state, dt, |s| {
            stage += 1;
            if !active {
                op.rhs(s, None)
            } else if per_stage && stage > 1 {
                let c = closure.evaluate(op, s)?;
                op.rhs(s, Some(&c.mu_t))
            } else {
                op.rhs(s, Some(mu_first))
            }
        })?;
        if let Some(f) = &self.filter {
            let mut scratch = vec![0.0; self.op.grid().len()];
            for field in next.fields_mut() {
                f.apply_in_place(field.data_mut(), &mut scratch);
            }
        }
        next.decode(self.op.thermo()).map_err(blow_up)?;
        *state = next;
        self.control.dt = dt;
        self.control.t += dt;
        self.control.step += 1;
        Ok(StepReport {
            t: self.control.t,
            dt,
            eps_sgs: cs.eps_sgs,
            mean_f: cs.mean_f,
            sigma_min: cs.sigma_min,
            sigma_max: cs.sigma_max,
            max_mut: cs.max_mut,
            c_d: cs.c_d,
        })
    }
}

/// Total of each conserved field times the cell volume.
pub fn conserved_totals(state: &ConservedState) -> [f64; 5] {
    let dv = state.grid().volume() / state.grid().len() as f64;
    state.fields().map(|f| pairwise_sum(f.data()) * dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;
    use std::f64::consts::PI;

    fn thermo(mu: f64) -> ThermoParams {
        ThermoParams {
            gamma: 1.4,
            mu,
            prandtl: 0.71,
            prandtl_t: ThermoParams::DEFAULT_PRANDTL_T,
            cp: 3.5,
        }
    }

    fn wavy_state(g: Grid, th: &ThermoParams) -> ConservedState {
        let rho = ScalarField::from_fn(g, |x, y, z| 1.0 + 0.1 * (x + 2.0 * z).sin() * y.cos());
        let u = VectorField::from_fn(g, |x, y, z| {
            [0.3 * y.sin() + 0.1 * z.cos(), 0.2 * (x + z).cos(), 0.1 * (x - y).sin()]
        });
        let p = ScalarField::from_fn(g, |x, y, _| 2.0 + 0.05 * x.cos() * (2.0 * y).sin());
        ConservedState::encode(&rho, &u, &p, th).unwrap()
    }

    #[test]
    fn uniform_state_has_zero_rhs() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let th = thermo(0.01);
        let rho = ScalarField::constant(g, 1.2);
        let u = VectorField::from_fn(g, |_, _, _| [0.3, -0.1, 0.2]);
        let p = ScalarField::constant(g, 1.0);
        let s = ConservedState::encode(&rho, &u, &p, &th).unwrap();
        let op = RhsOperator::new(g, th).unwrap();
        let mu = ScalarField::constant(g, 0.02);
        let r = op.rhs(&s, Some(&mu)).unwrap();
        for f in r.fields() {
            assert!(f.max_abs() < 1e-12);
        }
    }

    #[test]
    fn budget_is_additive_and_mass_conserved() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let th = thermo(0.01);
        let s = wavy_state(g, &th);
        let op = RhsOperator::new(g, th).unwrap();
        let mu = ScalarField::from_fn(g, |x, _, _| 0.01 * (1.0 + x.sin()));
        let b = op.budget(&s, &mu).unwrap();
        let total = op.rhs(&s, Some(&mu)).unwrap();
        let sum = b.total();
        for (a, c) in sum.fields().iter().zip(total.fields()) {
            let scale = c.max_abs().max(1.0);
            assert!(a.zip_map(c, |x, y| x - y).unwrap().max_abs() < 1e-13 * scale);
        }
        assert!(conserved_totals(&total)[0].abs() < 1e-11);
    }

    #[test]
    fn sgs_matches_viscous_at_equal_viscosity() {
        let g = Grid::cube(16, 2.0 * PI).unwrap();
        let th = thermo(0.01);
        let s = wavy_state(g, &th);
        let op = RhsOperator::new(g, th).unwrap();
        let v = op.viscous_rhs(&s).unwrap();
        let t = op.sgs_rhs(&s, &ScalarField::constant(g, th.mu)).unwrap();
        for c in 0..3 {
            let (a, b) = (v.mom.component(c), t.mom.component(c));
            assert!(a.zip_map(b, |x, y| x - y).unwrap().max_abs() < 1e-13);
        }
        // At rest only heat conduction remains; the ratio is Pr / Pr_t.
        let rho = ScalarField::constant(g, 1.0);
        let p = ScalarField::from_fn(g, |x, y, _| 1.0 + 0.1 * x.sin() * y.cos());
        let rest = ConservedState::encode(&rho, &VectorField::zeros(g), &p, &th).unwrap();
        let ev = op.viscous_rhs(&rest).unwrap().rho_e;
        let es = op.sgs_rhs(&rest, &ScalarField::constant(g, th.mu)).unwrap().rho_e;
        let k = th.prandtl / th.prandtl_t;
        assert!(es.zip_map(&ev, |a, b| a - k * b).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn shear_layer_momentum_diffusion() {
        let g = Grid::cube(32, 2.0 * PI).unwrap();
        let th = thermo(0.05);
        let rho = ScalarField::constant(g, 1.0);
        let u = VectorField::from_fn(g, |_, y, _| [y.sin(), 0.0, 0.0]);
        let p = ScalarField::constant(g, 1.0);
        let s = ConservedState::encode(&rho, &u, &p, &th).unwrap();
        let op = RhsOperator::new(g, th).unwrap();
        let r = op.viscous_rhs(&s).unwrap();
        let exact = ScalarField::from_fn(g, |_, y, _| -th.mu * y.sin());
        let err = r.mom.component(0).zip_map(&exact, |a, b| a - b).unwrap().max_abs();
        assert!(err < 1e-4 * th.mu, "err {err}");
    }

    #[test]
    fn rk3_zero_rhs_is_identity_and_third_order() {
        let g = Grid::cube(8, 1.0).unwrap();
        let th = thermo(0.0);
        let rho = ScalarField::constant(g, 1.0);
        let s = ConservedState::encode(&rho, &VectorField::zeros(g), &rho, &th).unwrap();
        let z = rk3_step(&s, 0.1, |x| Ok(ConservedState::zeros(*x.grid()))).unwrap();
        assert_eq!(z, s);

        let err = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut y = s.clone();
            for _ in 0..n {
                y = rk3_step(&y, dt, |x| {
                    let f = x.fields().map(|f| f.map(|v| -v));
                    ConservedState::from_fields(f)
                })
                .unwrap();
            }
            (y.rho.data()[0] - (-1f64).exp()).abs()
        };
        let p = (err(10) / err(20)).log2();
        assert!((2.7..=3.3).contains(&p), "order {p}");
    }

    #[test]
    fn dt_acoustic_and_viscous_limits() {
        let g = Grid::cube(10, 1.0).unwrap();
        // c = 1 with gamma p / rho = 1
        let th = thermo(0.0);
        let rho = ScalarField::constant(g, 1.0);
        let p = ScalarField::constant(g, 1.0 / 1.4);
        let s = ConservedState::encode(&rho, &VectorField::zeros(g), &p, &th).unwrap();
        assert!((compute_dt(&s, &th, 0.5, 0.0).unwrap() - 0.05).abs() < 1e-15);
        let thv = thermo(10.0);
        let dt = compute_dt(&s, &thv, 0.5, 0.5).unwrap();
        assert!((dt - 0.01 / (2.0 * 10.5 * 3.0)).abs() < 1e-15);
    }

    #[test]
    fn step_until_lands_on_end_time() {
        let g = Grid::cube(8, 2.0 * PI).unwrap();
        let th = thermo(0.01);
        let mut s = wavy_state(g, &th);
        let mut solver = FlowSolver::new(g, th, SolverConfig::default()).unwrap();
        let full = solver.step(&mut s.clone()).unwrap().dt;
        solver.set_time(0.0);
        let r = solver.step_until(&mut s, 0.25 * full).unwrap();
        assert_eq!(r.dt, 0.25 * full);
        assert_eq!(r.t, 0.25 * full);
    }
}
