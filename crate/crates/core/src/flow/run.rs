//! Run configuration and the sampling driver shared by both reductions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::equivariant::{sphere_radius, EquivariantFlowState};
use super::reduction::reduction_oracle;
use super::torus::TorusFlowState;
use super::{FlowSeries, Sample, DEFAULT_CFL};
use crate::error::{Error, Result};
use crate::model::{BackgroundPath, ModelSpace, PathMode};
use crate::oracle::{constant_c_from_bounds, DEFAULT_C0};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowCase {
    Torus,
    Equivariant,
}

/// Named initial data.
///
/// Torus (`f = Lx + u`): `zero`, `linear` (`u = 0`), `sine` (`u¹ = a sin x¹`),
/// `linear_sine` (`L` plus `u^α = a sin(x¹ + α) cos(x²)`).
/// Equivariant: `zero`, `identity` (`ρ = θ`), `sine` (`ρ = a sin θ`),
/// `identity_sine` (`ρ = θ + a sin θ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Zero,
    Linear,
    Sine,
    LinearSine,
    Identity,
    IdentitySine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub preset: Preset,
    #[serde(default)]
    pub amplitude: f64,
    /// Torus only: the `n × m` linear part, row by row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    #[serde(default = "static_mode")]
    pub mode: PathMode,
    #[serde(default = "unit")]
    pub radius_m: f64,
    #[serde(default = "unit")]
    pub radius_n: f64,
}

fn static_mode() -> PathMode {
    PathMode::Static
}

fn unit() -> f64 {
    1.0
}

fn default_cfl() -> f64 {
    DEFAULT_CFL
}

impl Default for Background {
    fn default() -> Self {
        Self {
            mode: PathMode::Static,
            radius_m: 1.0,
            radius_n: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub case: FlowCase,
    /// `[m, n]`
    pub dims: [usize; 2],
    /// points per direction (torus) or θ-points (equivariant)
    pub grid: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// fixed step; must respect the CFL limit throughout
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub t_end: f64,
    /// monitor cadence in time units
    pub sample_dt: f64,
    pub initial: InitialData,
    #[serde(default)]
    pub background: Background,
    /// `a` in `e^{at}𝔪(t)`; defaults to the oracle constant on evolving
    /// backgrounds and to 0 on static ones
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_rate: Option<f64>,
    /// record the discrete evolution residual at every sample
    #[serde(default = "yes")]
    pub residual: bool,
}

fn yes() -> bool {
    true
}

/// Result of a run: the series up to the end time or the abort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowOutcome {
    pub series: FlowSeries,
    pub steps: usize,
    pub final_time: f64,
    /// grid spacing
    pub h: f64,
    /// the growth rate used for `e^{at}𝔪(t)`
    pub growth_rate: f64,
    /// smallest rate for which the samples are monotone, if any
    pub smallest_monotone_rate: Option<f64>,
    pub abort: Option<String>,
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::OutOfRange(msg));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end {} must be positive", self.t_end));
        }
        if !(self.sample_dt > 0.0) {
            return bad(format!("sample_dt {} must be positive", self.sample_dt));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl {} must lie in (0, 1]", self.cfl));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("dt {dt} must be positive"));
            }
        }
        let b = &self.background;
        if !(b.radius_m > 0.0 && b.radius_n > 0.0) {
            return bad("background radii must be positive".into());
        }
        let torus_only = matches!(self.initial.preset, Preset::Linear | Preset::LinearSine);
        let sphere_only = matches!(self.initial.preset, Preset::Identity | Preset::IdentitySine);
        match self.case {
            FlowCase::Torus if sphere_only => bad(format!(
                "preset {:?} needs the equivariant case",
                self.initial.preset
            )),
            FlowCase::Equivariant if torus_only => bad(format!(
                "preset {:?} needs the torus case",
                self.initial.preset
            )),
            FlowCase::Equivariant if self.initial.linear.is_some() => {
                bad("a linear part only applies to the torus case".into())
            }
            _ => Ok(()),
        }
    }

    /// Background paths of the two factors.
    pub fn paths(&self) -> Result<(BackgroundPath, BackgroundPath)> {
        let [m, n] = self.dims;
        let b = &self.background;
        let (sm, sn) = match self.case {
            FlowCase::Torus => (
                ModelSpace::flat_torus(m, 2.0 * PI)?,
                ModelSpace::flat_torus(n, 2.0 * PI)?,
            ),
            FlowCase::Equivariant => (
                ModelSpace::sphere(m, b.radius_m)?,
                ModelSpace::sphere(n, b.radius_n)?,
            ),
        };
        let path = |s: ModelSpace| match (self.case, b.mode) {
            // flat metrics are Ricci-flat, so the homothety is trivial
            (FlowCase::Torus, _) => Ok(BackgroundPath::fixed(s)),
            _ => BackgroundPath::new(s, b.mode),
        };
        Ok((path(sm)?, path(sn)?))
    }

    /// The growth rate `a`: explicit, else the oracle constant of the initial backgrounds.
    pub fn resolved_growth_rate(&self) -> Result<f64> {
        if let Some(a) = self.growth_rate {
            return Ok(a);
        }
        if self.background.mode == PathMode::Static || self.case == FlowCase::Torus {
            return Ok(0.0);
        }
        let (pm, pn) = self.paths()?;
        let [m, n] = self.dims;
        Ok(constant_c_from_bounds(
            DEFAULT_C0,
            &pm.base.bounds(),
            &pn.base.bounds(),
            pm.dt_metric(0.0)?,
            pn.dt_metric(0.0)?,
            m,
            n,
        ))
    }

    fn linear_part(&self) -> Result<DMatrix<f64>> {
        let [m, n] = self.dims;
        match (&self.initial.linear, self.initial.preset) {
            (Some(rows), _) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != m) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: rows.len(),
                    });
                }
                Ok(DMatrix::from_fn(n, m, |a, k| rows[a][k]))
            }
            (None, Preset::Linear | Preset::LinearSine) => Ok(default_linear(n, m)),
            (None, _) => Ok(DMatrix::zeros(n, m)),
        }
    }

    pub fn torus_state(&self) -> Result<TorusFlowState> {
        let [m, n] = self.dims;
        let amp = self.initial.amplitude;
        let preset = self.initial.preset;
        TorusFlowState::from_fn(m, n, self.grid, self.linear_part()?, |x, a| match preset {
            Preset::Sine if a == 0 => amp * x[0].sin(),
            Preset::LinearSine => amp * (x[0] + a as f64).sin() * x[1].cos(),
            _ => 0.0,
        })
    }

    pub fn equivariant_state(&self) -> Result<EquivariantFlowState> {
        let [m, n] = self.dims;
        let amp = self.initial.amplitude;
        let preset = self.initial.preset;
        let b = &self.background;
        EquivariantFlowState::from_fn(m, n, self.grid, b.radius_m, b.radius_n, |t| match preset {
            Preset::Identity => t,
            Preset::Sine => amp * t.sin(),
            Preset::IdentitySine => t + amp * t.sin(),
            _ => 0.0,
        })
    }
}

/// Area-decreasing default linear part: `0.6` and `0.4` on the diagonal.
fn default_linear(n: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |a, k| match (a, k) {
        (0, 0) => 0.6,
        (1, 1) => 0.4,
        _ => 0.0,
    })
}

/// A flow state the driver can advance and sample.
trait Flow: Sized {
    fn time(&self) -> f64;
    fn limit(&self, cfl: f64, t_next: f64) -> Result<f64>;
    fn advance(&self, dt: f64, cfl: f64) -> Result<Self>;
    fn sample(&self, residual: bool) -> Result<Sample>;
}

struct TorusRun {
    st: TorusFlowState,
}

impl Flow for TorusRun {
    fn time(&self) -> f64 {
        self.st.t
    }

    fn limit(&self, cfl: f64, _t_next: f64) -> Result<f64> {
        Ok(self.st.stable_dt(cfl))
    }

    fn advance(&self, dt: f64, cfl: f64) -> Result<Self> {
        Ok(Self {
            st: self.st.step(dt, cfl)?,
        })
    }

    fn sample(&self, residual: bool) -> Result<Sample> {
        let (m_of_t, lambda_max, max_product) = self.st.monitors()?;
        let residual = if residual {
            self.st.evo_residual()?
        } else {
            0.0
        };
        Ok(Sample {
            t: self.st.t,
            m_of_t,
            lambda_max,
            max_product,
            residual,
            scale_m: 1.0,
            scale_n: 1.0,
        })
    }
}

struct EquivariantRun {
    st: EquivariantFlowState,
    pm: BackgroundPath,
    pn: BackgroundPath,
}

impl Flow for EquivariantRun {
    fn time(&self) -> f64 {
        self.st.t
    }

    fn limit(&self, cfl: f64, t_next: f64) -> Result<f64> {
        let r = sphere_radius(&self.pm, t_next)?.min(self.st.r_m);
        Ok(self.st.stable_dt(cfl, r))
    }

    fn advance(&self, dt: f64, cfl: f64) -> Result<Self> {
        Ok(Self {
            st: self.st.step(dt, cfl, &self.pm, &self.pn)?,
            pm: self.pm.clone(),
            pn: self.pn.clone(),
        })
    }

    fn sample(&self, residual: bool) -> Result<Sample> {
        let (m_of_t, lambda_max, max_product) = self.st.monitors()?;
        let t = self.st.t;
        Ok(Sample {
            t,
            m_of_t,
            lambda_max,
            max_product,
            residual: if residual {
                reduction_oracle(&self.st)
            } else {
                0.0
            },
            scale_m: self.pm.metric_factor(t)?,
            scale_n: self.pn.metric_factor(t)?,
        })
    }
}

/// Steps of at most the CFL limit (or the fixed `dt`), shortened to land
/// exactly on sample times. Step errors end the run with an abort reason.
fn drive<F: Flow>(mut flow: F, cfg: &FlowConfig, h: f64) -> Result<FlowOutcome> {
    let mut series = FlowSeries::default();
    series.push(flow.sample(cfg.residual)?)?;
    let mut steps = 0;
    let mut abort = None;
    let mut k = 1;
    'outer: while flow.time() < cfg.t_end {
        let target = (k as f64 * cfg.sample_dt).min(cfg.t_end);
        while flow.time() < target {
            let t = flow.time();
            let remaining = target - t;
            let step = match cfg.dt {
                Some(dt) => dt.min(remaining),
                None => {
                    let guess = remaining.min(flow.limit(cfg.cfl, t)?);
                    match flow.limit(cfg.cfl, t + guess) {
                        Ok(l) => guess.min(l),
                        Err(e) => {
                            abort = Some(e.to_string());
                            break 'outer;
                        }
                    }
                }
            };
            // avoid a sliver step from rounding
            let step = if remaining - step < 1e-12 * remaining.max(1.0) {
                remaining
            } else {
                step
            };
            match flow.advance(step, cfg.cfl) {
                Ok(next) => flow = next,
                Err(e) => {
                    abort = Some(e.to_string());
                    break 'outer;
                }
            }
            steps += 1;
        }
        match flow.sample(cfg.residual) {
            Ok(s) => series.push(Sample { t: target, ..s })?,
            Err(e) => {
                abort = Some(e.to_string());
                break;
            }
        }
        k += 1;
    }
    let growth_rate = cfg.resolved_growth_rate()?;
    Ok(FlowOutcome {
        smallest_monotone_rate: series.smallest_monotone_rate(),
        series,
        steps,
        final_time: flow.time(),
        h,
        growth_rate,
        abort,
    })
}

/// Integrates the configured flow to `t_end` or to an abort.
pub fn run(cfg: &FlowConfig) -> Result<FlowOutcome> {
    cfg.validate()?;
    match cfg.case {
        FlowCase::Torus => {
            let st = cfg.torus_state()?;
            let h = st.h_spacing;
            drive(TorusRun { st }, cfg, h)
        }
        FlowCase::Equivariant => {
            let (pm, pn) = cfg.paths()?;
            let st = cfg.equivariant_state()?;
            let h = st.spacing();
            let (rm, rn) = (sphere_radius(&pm, 0.0)?, sphere_radius(&pn, 0.0)?);
            if (rm, rn) != (st.r_m, st.r_n) {
                return Err(Error::HypothesisViolation(
                    "initial radii disagree with backgrounds".into(),
                ));
            }
            drive(EquivariantRun { st, pm, pn }, cfg, h)
        }
    }
}
