//! Wall-clock cost of SGS closures relative to a run without model.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::run::run;
use cvples_core::SgsModelKind;
use std::time::Duration;

#[derive(Debug, Clone, PartialEq)]
pub struct OverheadRow {
    pub label: String,
    pub steps: u64,
    pub wall: Duration,
    /// Wall time per step over the baseline's.
    pub relative: f64,
    pub dynamic_filterings_per_step: f64,
}

pub fn label(config: &RunConfig) -> String {
    let model = config.solver.sgs.kind;
    match (&config.solver.cvp, model) {
        (_, SgsModelKind::None) => "no model".to_string(),
        (Some(c), m) => format!("CvP-{m} ({})", c.filter.kind()),
        (None, m) => m.to_string(),
    }
}

/// Times the step loop of each config, plus a no-model baseline built from
/// the first config. Output files are disabled for all runs.
pub fn measure_overhead(configs: &[RunConfig]) -> Result<Vec<OverheadRow>> {
    let first = configs.first().ok_or_else(|| Error::MissingRequired("config".into()))?;
    let mut base = first.clone();
    base.solver.sgs.kind = SgsModelKind::None;
    base.solver.cvp = None;
    let mut rows = Vec::new();
    for c in std::iter::once(&base).chain(configs) {
        if c.grid != first.grid || c.case != first.case {
            return Err(Error::bad("n", &format!("{:?}", c.grid), "overhead runs must share case and grid"));
        }
        let mut c = c.clone();
        c.output_dir = None;
        let out = run(&c)?;
        if let Some(m) = out.blow_up {
            return Err(cvples_core::Error::SolverBlowUp(m).into());
        }
        rows.push(OverheadRow {
            label: label(&c),
            steps: out.steps,
            wall: out.step_wall,
            relative: 0.0,
            dynamic_filterings_per_step: out.dynamic_filterings_per_step,
        });
    }
    let per_step = |r: &OverheadRow| r.wall.as_secs_f64() / r.steps.max(1) as f64;
    let b = per_step(&rows[0]);
    for r in &mut rows {
        r.relative = per_step(r) / b;
    }
    Ok(rows)
}

pub fn format_table(rows: &[OverheadRow]) -> String {
    let mut s = String::from("model                      steps   wall [s]   relative\n");
    for r in rows {
        s.push_str(&format!(
            "{:<26} {:>5} {:>10.3} {:>10.3}\n",
            r.label,
            r.steps,
            r.wall.as_secs_f64(),
            r.relative
        ));
    }
    s
}
