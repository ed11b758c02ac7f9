//! Flat `key=value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Command-line overrides take
//! the form `--key=value` and win over file entries. Unknown keys are errors.

use crate::error::{Error, Result};
use cvples_core::{
    AxisSet, CvpConfig, FilterKind, HelixParams, InterpolantMode, SgsModelConfig, SgsModelKind,
    SolutionFilter, SolverConfig, TestFilterSpec, TgvParams, TimeStepControl,
};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

/// Environment variable that replaces `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "CVPLES_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum Case {
    Tgv(TgvParams),
    Helix(HelixParams),
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::Tgv(_) => "tgv",
            Case::Helix(_) => "helix",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: Case,
    pub grid: [usize; 3],
    pub solver: SolverConfig,
    pub t_end: f64,
    /// Stop after this many steps even if `t_end` is not reached.
    pub max_steps: Option<u64>,
    /// Diagnostics row every this many steps.
    pub diag_every: u64,
    /// Spectrum output period in time units.
    pub spectra_every: Option<f64>,
    /// Snapshot output period in time units.
    pub snapshot_every: Option<f64>,
    /// `None` keeps everything in memory.
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

const COMMON_KEYS: &[&str] = &[
    "case", "n", "nx", "ny", "nz", "gamma", "prandtl", "prandtl_t", "sgs", "cs", "ck", "vreman_c",
    "dynamic_clip", "cvp", "cvp_filter", "impl6_alpha", "cvp_interpolant", "sigma_eq", "cvp_axes",
    "enstrophy_floor", "cfl", "solution_filter", "filter_alpha", "mut_per_stage", "t_end",
    "max_steps", "diag_every", "spectra_every", "snapshot_every", "output_dir", "seed",
];
const TGV_KEYS: &[&str] = &["re", "mach", "l", "v0", "rho0"];
const HELIX_KEYS: &[&str] = &[
    "radius", "pitch_ratio", "core_ratio", "n_kernel", "re_gamma", "nu", "rho0", "n_filaments",
    "n_turns", "box_xz", "image_layers", "mach_peak", "samples_per_turn", "far_samples_per_turn",
    "perturbation", "perturbation_kmax",
];

/// Raw entries with their origin, before typing.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Syntax {
                    line: i + 1,
                    text: line.to_string(),
                });
            };
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let known = COMMON_KEYS.iter().chain(TGV_KEYS).chain(HELIX_KEYS).any(|k| *k == key);
        if !known {
            return Err(Error::UnknownKey(key.to_string()));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies `--key=value` arguments.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, args: &[S]) -> Result<()> {
        for a in args {
            let a = a.as_ref();
            let body = a.strip_prefix("--").unwrap_or(a);
            let Some((k, v)) = body.split_once('=') else {
                return Err(Error::Syntax {
                    line: 0,
                    text: a.to_string(),
                });
            };
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|e| Error::bad(key, &v, e.to_string())),
        }
    }

    fn get_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "on" | "true" | "yes" | "1" => Ok(true),
                "off" | "false" | "no" | "0" => Ok(false),
                _ => Err(Error::bad(key, &v, "expected on/off")),
            },
        }
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.get_or(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::bad(key, &v.to_string(), "must be positive"));
        }
        Ok(v)
    }

    /// Types and validates the entries.
    pub fn build(mut self) -> Result<RunConfig> {
        let case_name: String = self.take("case").ok_or_else(|| Error::MissingRequired("case".into()))?;
        let n: Option<usize> = self.get("n")?;
        let axes: [Option<usize>; 3] = [self.get("nx")?, self.get("ny")?, self.get("nz")?];
        let grid = match (n, axes) {
            (Some(n), [None, None, None]) => [n; 3],
            (None, [Some(a), Some(b), Some(c)]) => [a, b, c],
            (None, [None, None, None]) => return Err(Error::MissingRequired("grid".into())),
            _ => return Err(Error::bad("n", "", "give either n or all of nx, ny, nz")),
        };
        let gamma = self.positive("gamma", cvples_core::cases::DEFAULT_GAMMA)?;
        let prandtl = self.positive("prandtl", cvples_core::cases::DEFAULT_PRANDTL)?;
        let prandtl_t = self.positive("prandtl_t", cvples_core::ThermoParams::DEFAULT_PRANDTL_T)?;

        let (case, foreign, t_default, v_ref, l_ref) = match case_name.as_str() {
            "tgv" => {
                let d = TgvParams::default();
                let p = TgvParams {
                    re: self.positive("re", d.re)?,
                    mach: self.positive("mach", d.mach)?,
                    l: self.positive("l", d.l)?,
                    v0: self.positive("v0", d.v0)?,
                    rho0: self.positive("rho0", d.rho0)?,
                    gamma,
                    prandtl,
                    prandtl_t,
                };
                p.validate().map_err(|e| Error::bad("mach", &p.mach.to_string(), e.to_string()))?;
                (Case::Tgv(p), HELIX_KEYS, 20.0 * p.time_scale(), p.v0, p.l)
            }
            "helix" => {
                let d = HelixParams::default();
                let n_kernel = match self.take("n_kernel") {
                    None => d.n_kernel,
                    Some(v) if v == "inf" || v == "rankine" => f64::INFINITY,
                    Some(v) => v.parse().map_err(|e: std::num::ParseFloatError| Error::bad("n_kernel", &v, e.to_string()))?,
                };
                let p = HelixParams {
                    radius: self.positive("radius", d.radius)?,
                    pitch_ratio: self.positive("pitch_ratio", d.pitch_ratio)?,
                    core_ratio: self.positive("core_ratio", d.core_ratio)?,
                    n_kernel,
                    re_gamma: self.positive("re_gamma", d.re_gamma)?,
                    nu: self.positive("nu", d.nu)?,
                    rho0: self.positive("rho0", d.rho0)?,
                    n_filaments: self.get_or("n_filaments", d.n_filaments)?,
                    n_turns: self.get_or("n_turns", d.n_turns)?,
                    box_xz: self.positive("box_xz", d.box_xz)?,
                    image_layers: self.get_or("image_layers", d.image_layers)?,
                    mach_peak: self.positive("mach_peak", d.mach_peak)?,
                    samples_per_turn: self.get_or("samples_per_turn", d.samples_per_turn)?,
                    far_samples_per_turn: self.get_or("far_samples_per_turn", d.far_samples_per_turn)?,
                    perturbation: self.get_or("perturbation", d.perturbation)?,
                    perturbation_kmax: self.positive("perturbation_kmax", d.perturbation_kmax)?,
                    seed: 0,
                    gamma,
                    prandtl,
                    prandtl_t,
                };
                p.validate().map_err(|e| Error::bad("case", "helix", e.to_string()))?;
                let v_ref = p.circulation() / (2.0 * std::f64::consts::PI * p.core_radius());
                (Case::Helix(p), TGV_KEYS, 3.0, v_ref, p.core_radius())
            }
            other => return Err(Error::bad("case", other, "expected tgv or helix")),
        };
        // rho0 belongs to both lists and is already consumed here.
        for k in foreign {
            if let Some(v) = self.take(k) {
                return Err(Error::bad(k, &v, format!("not used by case {}", case.name())));
            }
        }

        let sgs_kind: SgsModelKind = self.get_or("sgs", SgsModelKind::None)?;
        let mut sgs = SgsModelConfig::new(sgs_kind);
        sgs.c_s = self.positive("cs", sgs.c_s)?;
        sgs.c_k = self.positive("ck", sgs.c_k)?;
        sgs.vreman_c = self.get("vreman_c")?;
        sgs.dynamic_clip = self.get_or("dynamic_clip", sgs.dynamic_clip)?;
        sgs.validate().map_err(|e| Error::bad("sgs", &sgs_kind.to_string(), e.to_string()))?;

        let cvp_on = self.flag("cvp", false)?;
        let kind: FilterKind = self.get_or("cvp_filter", FilterKind::Expl4)?;
        let alpha: Option<f64> = self.get("impl6_alpha")?;
        let spec = match (kind, alpha) {
            (FilterKind::Impl6, Some(a)) => {
                TestFilterSpec::impl6(a).map_err(|e| Error::bad("impl6_alpha", &a.to_string(), e.to_string()))?
            }
            (_, Some(a)) => return Err(Error::bad("impl6_alpha", &a.to_string(), "only used with cvp_filter=impl6")),
            (k, None) => TestFilterSpec::of_kind(k),
        };
        let mode: InterpolantMode = self.get_or("cvp_interpolant", InterpolantMode::Identity)?;
        let mut cvp = CvpConfig::new(spec, mode).with_reference_scales(v_ref, l_ref);
        if let Some(s) = self.get::<f64>("sigma_eq")? {
            cvp = cvp.with_sigma_eq(s);
        }
        if let Some(a) = self.get::<AxisSet>("cvp_axes")? {
            cvp = cvp.with_axes(a);
        }
        if let Some(f) = self.get::<f64>("enstrophy_floor")? {
            cvp.enstrophy_floor = f;
        }
        cvp.validate().map_err(|e| Error::bad("cvp", "on", e.to_string()))?;
        if cvp_on && sgs_kind == SgsModelKind::None {
            return Err(Error::bad("cvp", "on", "the sensor needs an sgs model"));
        }

        let cfl = self.positive("cfl", TimeStepControl::DEFAULT_CFL)?;
        let filter_on = self.flag("solution_filter", true)?;
        let alpha_f = self.get_or("filter_alpha", SolutionFilter::DEFAULT_ALPHA)?;
        if filter_on && !(alpha_f > 0.25 && alpha_f < 0.5) {
            return Err(Error::bad("filter_alpha", &alpha_f.to_string(), "must lie in (0.25, 0.5)"));
        }
        let solver = SolverConfig {
            cfl,
            filter_alpha: filter_on.then_some(alpha_f),
            sgs,
            cvp: cvp_on.then_some(cvp),
            mut_per_stage: self.flag("mut_per_stage", false)?,
        };

        let t_end = self.positive("t_end", t_default)?;
        let max_steps = self.get("max_steps")?;
        let diag_every: u64 = self.get_or("diag_every", 1)?;
        if diag_every == 0 {
            return Err(Error::bad("diag_every", "0", "must be at least 1"));
        }
        let period = |s: &mut Self, key: &str| -> Result<Option<f64>> {
            match s.get::<f64>(key)? {
                Some(v) if !(v > 0.0) => Err(Error::bad(key, &v.to_string(), "must be positive")),
                v => Ok(v),
            }
        };
        let spectra_every = period(&mut self, "spectra_every")?;
        let snapshot_every = period(&mut self, "snapshot_every")?;
        let mut output_dir = self.take("output_dir").map(PathBuf::from).or(Some(PathBuf::from("output")));
        if let Ok(d) = std::env::var(OUTPUT_DIR_ENV) {
            if !d.is_empty() {
                output_dir = Some(PathBuf::from(d));
            }
        }
        let seed = self.get_or("seed", 1u64)?;
        let case = match case {
            Case::Helix(p) => Case::Helix(HelixParams { seed, ..p }),
            c => c,
        };
        if let Some(k) = self.entries.keys().next() {
            return Err(Error::UnknownKey(k.clone()));
        }
        Ok(RunConfig {
            case,
            grid,
            solver,
            t_end,
            max_steps,
            diag_every,
            spectra_every,
            snapshot_every,
            output_dir,
            seed,
        })
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    RawConfig::parse(text)?.build()
}

/// Parses `text`, then applies `--key=value` overrides.
pub fn parse_with_overrides<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<RunConfig> {
    let mut raw = RawConfig::parse(text)?;
    raw.apply_overrides(overrides)?;
    raw.build()
}
