//! The run loop and its outputs.
//!
//! Files written into the output directory:
//!
//! - `diagnostics.csv`: one row per diagnostics sample, schema below.
//! - `spectrum_NNNN.dat`: `# t = ...` line, then `k E(k)` pairs.
//! - `snapshot_NNNN.cvpl`: binary state, see [`crate::snapshot`].
//! - `status.txt`: `completed` or `blow-up: <reason>`.
//!
//! Every file is written to `<name>.partial` and renamed when complete.
//!
//! Diagnostics columns (schema version 1), in order: `step`, `t`, `dt`, `E`,
//! `eps` (`-dE/dt` from the sampled `E`), `eps_sgs`, `mean_f`, `sigma_min`,
//! `sigma_max`, `max_mut`, `min_rho`, `max_div`, `deviation` (helix only,
//! empty otherwise). Closure columns are evaluated on the same state as `E`;
//! `dt` is the step taken from that state.

use crate::config::{Case, RunConfig};
use crate::error::{Error, Result};
use crate::snapshot::write_snapshot;
use cvples_core::diagnostics::velocity;
use cvples_core::{
    dissipation_series, energy_spectrum, init_helix, init_tgv, max_divergence, vortex_deviation,
    ConservedState, DiagnosticsRecord, Differentiator, FlowSolver, Grid, StepReport,
};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub const CSV_SCHEMA: &str = "# cvples diagnostics v1";
pub const CSV_HEADER: &str =
    "step,t,dt,E,eps,eps_sgs,mean_f,sigma_min,sigma_max,max_mut,min_rho,max_div,deviation";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;

/// Writes `bytes` to `path` through a `.partial` sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<DiagnosticsRecord>,
    /// `-dE/dt` at each record; empty with fewer than three records.
    pub dissipation: Vec<f64>,
    pub steps: u64,
    pub t: f64,
    pub blow_up: Option<String>,
    /// Wall time spent inside solver steps.
    pub step_wall: Duration,
    /// Dynamic-model test filterings per step.
    pub dynamic_filterings_per_step: f64,
    pub final_state: ConservedState,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.blow_up.is_some() {
            EXIT_BLOW_UP
        } else {
            EXIT_OK
        }
    }

    pub fn csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{CSV_SCHEMA}").unwrap();
        writeln!(s, "{CSV_HEADER}").unwrap();
        for (i, r) in self.records.iter().enumerate() {
            let eps = self.dissipation.get(i).copied().map(fmt_f64).unwrap_or_default();
            let dev = r.deviation.map(fmt_f64).unwrap_or_default();
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                fmt_f64(r.t),
                fmt_f64(r.dt),
                fmt_f64(r.kinetic_energy),
                eps,
                fmt_f64(r.eps_sgs),
                fmt_f64(r.mean_f),
                fmt_f64(r.sigma_min),
                fmt_f64(r.sigma_max),
                fmt_f64(r.max_mut),
                fmt_f64(r.min_rho),
                fmt_f64(r.max_div),
                dev
            )
            .unwrap();
        }
        s
    }
}

/// Grid and initial state of the configured case.
pub fn initialize(config: &RunConfig) -> Result<(Grid, ConservedState, cvples_core::ThermoParams)> {
    match &config.case {
        Case::Tgv(p) => {
            if config.grid[0] != config.grid[1] || config.grid[1] != config.grid[2] {
                return Err(Error::bad("n", &format!("{:?}", config.grid), "tgv needs a cubic grid"));
            }
            let g = p.grid(config.grid[0])?;
            let th = p.thermo();
            Ok((g, init_tgv(&g, p, &th)?, th))
        }
        Case::Helix(p) => {
            let g = Grid::new(config.grid, p.lengths())?;
            let init = init_helix(&g, p)?;
            Ok((g, init.state, init.thermo))
        }
    }
}

struct Sample {
    step: u64,
    t: f64,
    e: f64,
    min_rho: f64,
    max_div: f64,
    deviation: Option<f64>,
}

impl Sample {
    fn take(step: u64, t: f64, state: &ConservedState, diff: &Differentiator, case: &Case) -> Result<Self> {
        let u = velocity(state)?;
        let deviation = match case {
            Case::Helix(p) => Some(vortex_deviation(state, p)?),
            Case::Tgv(_) => None,
        };
        Ok(Self {
            step,
            t,
            e: 0.5 * cvples_core::volume_average(&u.norm_squared()),
            min_rho: state.rho.min(),
            max_div: max_divergence(&u, diff)?,
            deviation,
        })
    }

    fn finish(self, r: &StepReport, dt: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            step: self.step,
            t: self.t,
            dt,
            kinetic_energy: self.e,
            eps_sgs: r.eps_sgs,
            mean_f: r.mean_f,
            sigma_min: r.sigma_min,
            sigma_max: r.sigma_max,
            max_mut: r.max_mut,
            min_rho: self.min_rho,
            max_div: self.max_div,
            deviation: self.deviation,
        }
    }
}

struct Periodic {
    every: Option<f64>,
    next: f64,
    index: usize,
}

impl Periodic {
    fn new(every: Option<f64>) -> Self {
        Self {
            every,
            next: 0.0,
            index: 0,
        }
    }

    fn due(&mut self, t: f64) -> Option<usize> {
        let every = self.every?;
        if t + 1e-12 * every < self.next {
            return None;
        }
        while self.next <= t + 1e-12 * every {
            self.next += every;
        }
        self.index += 1;
        Some(self.index - 1)
    }
}

/// Runs the configured case to `t_end`. A solver blow-up ends the run
/// normally with [`RunOutcome::blow_up`] set; outputs are flushed either way.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let (grid, mut state, thermo) = initialize(config)?;
    let dir = config.output_dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let mut solver = FlowSolver::new(grid, thermo, config.solver)?;
    let diff = Differentiator::new(grid)?;
    let mut spectra = Periodic::new(config.spectra_every);
    let mut snaps = Periodic::new(config.snapshot_every);
    let mut records = Vec::new();
    let mut pending: Option<Sample> = None;
    let mut blow_up = None;
    let mut step_wall = Duration::ZERO;
    let (mut t, mut step) = (0.0, 0u64);
    let filterings0 = solver.closure().model().filter_applications();
    let stop = |t: f64, step: u64| {
        t >= config.t_end * (1.0 - 1e-12) || config.max_steps.is_some_and(|m| step >= m)
    };
    loop {
        if step % config.diag_every == 0 || stop(t, step) {
            pending = Some(Sample::take(step, t, &state, &diff, &config.case)?);
        }
        if let (Some(i), Some(d)) = (spectra.due(t), dir) {
            write_spectrum(&d.join(format!("spectrum_{i:04}.dat")), t, &state)?;
        }
        if let (Some(i), Some(d)) = (snaps.due(t), dir) {
            write_snapshot(&state, t, &d.join(format!("snapshot_{i:04}.cvpl")))?;
        }
        if stop(t, step) {
            break;
        }
        let start = Instant::now();
        let res = solver.step_until(&mut state, config.t_end);
        step_wall += start.elapsed();
        match res {
            Ok(r) => {
                if let Some(s) = pending.take() {
                    records.push(s.finish(&r, r.dt));
                }
                t = r.t;
                step += 1;
            }
            Err(cvples_core::Error::SolverBlowUp(msg)) => {
                blow_up = Some(format!("t = {t}, step {step}: {msg}"));
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let filterings = solver.closure().model().filter_applications() - filterings0;
    if let Some(s) = pending.take() {
        // Closure statistics of the last state; NaN if it cannot be evaluated.
        let r = match solver.closure_state(&state) {
            Ok(c) => StepReport {
                t,
                dt: 0.0,
                eps_sgs: c.eps_sgs,
                mean_f: c.mean_f,
                sigma_min: c.sigma_min,
                sigma_max: c.sigma_max,
                max_mut: c.max_mut,
                c_d: c.c_d,
            },
            Err(_) => StepReport {
                t,
                dt: 0.0,
                eps_sgs: f64::NAN,
                mean_f: f64::NAN,
                sigma_min: f64::NAN,
                sigma_max: f64::NAN,
                max_mut: f64::NAN,
                c_d: None,
            },
        };
        records.push(s.finish(&r, 0.0));
    }
    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let es: Vec<f64> = records.iter().map(|r| r.kinetic_energy).collect();
    let dissipation = dissipation_series(&ts, &es).unwrap_or_default();
    let outcome = RunOutcome {
        records,
        dissipation,
        steps: step,
        t,
        blow_up,
        step_wall,
        dynamic_filterings_per_step: if step > 0 { filterings as f64 / step as f64 } else { 0.0 },
        final_state: state,
    };
    if let Some(d) = dir {
        write_atomic(&d.join("diagnostics.csv"), outcome.csv().as_bytes())?;
        let status = match &outcome.blow_up {
            Some(m) => format!("blow-up: {m}\n"),
            None => "completed\n".to_string(),
        };
        write_atomic(&d.join("status.txt"), status.as_bytes())?;
    }
    Ok(outcome)
}

fn write_spectrum(path: &Path, t: f64, state: &ConservedState) -> Result<()> {
    let u = velocity(state)?;
    let (k, e) = match energy_spectrum(&u) {
        Ok(s) => s,
        // Spectra are only defined on cubic grids.
        Err(cvples_core::Error::NonCubicGrid) => return Ok(()),
        Err(e) => return Err(e.into()),
    };
    let mut s = format!("# t = {}\n", fmt_f64(t));
    for (k, e) in k.iter().zip(&e) {
        writeln!(s, "{} {}", fmt_f64(*k), fmt_f64(*e)).unwrap();
    }
    write_atomic(path, s.as_bytes())
}
