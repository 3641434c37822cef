//! Homogeneous backgrounds with closed-form curvature and their exact
//! Ricci-flow homotheties.
//!
//! Backgrounds evolve under `∂_t g = −Ric(g)` (no factor 2). An Einstein
//! metric with `Ric(g₀) = L g₀` then evolves as `g(t) = (1 − Lt) g₀`, which
//! becomes extinct at `t = 1/L` when `L > 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curvature::{
    constant_curvature, kulkarni_nomizu, CurvatureBounds, CurvatureTensor, SymBilinear,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    RoundSphere,
    FubiniStudy,
    FlatTorus,
    ConstantCurvature,
    CustomBounds,
}

/// Descriptor of a homogeneous background.
///
/// `scale` is the radius for spheres, the maximal holomorphic sectional
/// curvature for Fubini–Study (4 gives sectional range `[1, 4]`), the period
/// for tori, and the signed curvature itself for `ConstantCurvature`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    pub kind: SpaceKind,
    pub dim: usize,
    pub scale: f64,
    pub bounds_override: Option<CurvatureBounds>,
    pub einstein_const: Option<f64>,
}

impl ModelSpace {
    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        Self::build(SpaceKind::RoundSphere, dim, radius)
    }

    pub fn fubini_study(dim: usize, holomorphic_max: f64) -> Result<Self> {
        Self::build(SpaceKind::FubiniStudy, dim, holomorphic_max)
    }

    pub fn flat_torus(dim: usize, period: f64) -> Result<Self> {
        Self::build(SpaceKind::FlatTorus, dim, period)
    }

    pub fn constant(dim: usize, curvature: f64) -> Result<Self> {
        Self::build(SpaceKind::ConstantCurvature, dim, curvature)
    }

    /// User-supplied bounds, optionally Einstein with constant `einstein`.
    pub fn custom(dim: usize, bounds: CurvatureBounds, einstein: Option<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall {
                what: "model space",
                dim,
                min: 2,
            });
        }
        bounds.validate(0.0)?;
        Ok(Self {
            kind: SpaceKind::CustomBounds,
            dim,
            scale: 1.0,
            bounds_override: Some(bounds),
            einstein_const: einstein,
        })
    }

    fn build(kind: SpaceKind, dim: usize, scale: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall {
                what: "model space",
                dim,
                min: 2,
            });
        }
        if !scale.is_finite() {
            return Err(Error::OutOfRange(format!("scale {scale} is not finite")));
        }
        if kind != SpaceKind::ConstantCurvature && scale <= 0.0 {
            return Err(Error::OutOfRange(format!("scale {scale} must be positive")));
        }
        if kind == SpaceKind::FubiniStudy && !dim.is_multiple_of(2) {
            return Err(Error::OutOfRange(format!(
                "Fubini-Study needs even real dimension, got {dim}"
            )));
        }
        let d = dim as f64;
        let einstein = match kind {
            SpaceKind::RoundSphere => (d - 1.0) / (scale * scale),
            SpaceKind::FubiniStudy => scale / 4.0 * (d + 2.0),
            SpaceKind::FlatTorus => 0.0,
            SpaceKind::ConstantCurvature => (d - 1.0) * scale,
            SpaceKind::CustomBounds => unreachable!("custom spaces use ModelSpace::custom"),
        };
        Ok(Self {
            kind,
            dim,
            scale,
            bounds_override: None,
            einstein_const: Some(einstein),
        })
    }

    /// Frame curvature and metric. One tensor serves every point.
    pub fn curvature_at(&self) -> Result<(CurvatureTensor, SymBilinear)> {
        let g = SymBilinear::identity(self.dim);
        let r = match self.kind {
            SpaceKind::RoundSphere => constant_curvature(&g, 1.0 / (self.scale * self.scale)),
            SpaceKind::ConstantCurvature => constant_curvature(&g, self.scale),
            SpaceKind::FlatTorus => CurvatureTensor::zeros(self.dim),
            SpaceKind::FubiniStudy => fubini_study_tensor(self.dim, self.scale),
            SpaceKind::CustomBounds => return Err(Error::NoTensor("custom bounds")),
        };
        Ok((r, g))
    }

    /// Closed-form pointwise bounds.
    pub fn bounds(&self) -> CurvatureBounds {
        let d = self.dim;
        match self.kind {
            SpaceKind::RoundSphere => CurvatureBounds::constant(d, 1.0 / (self.scale * self.scale)),
            SpaceKind::ConstantCurvature => CurvatureBounds::constant(d, self.scale),
            SpaceKind::FlatTorus => CurvatureBounds::zero(d),
            SpaceKind::FubiniStudy => {
                let c = self.scale;
                if d == 2 {
                    return CurvatureBounds::constant(2, c);
                }
                let ric = c / 4.0 * (d as f64 + 2.0);
                CurvatureBounds {
                    kappa: c / 4.0,
                    tau: c,
                    ric_min: ric,
                    ric_max: ric,
                    scal_min: d as f64 * ric,
                    scal_max: d as f64 * ric,
                    // a triple with v, w ⟂ Ju realizes c/4 + c/4
                    ric3_min: Some(c / 2.0),
                    // weakly PIC1 with equality frames (e, Je, f, −Jf), μ = 1
                    chi_ic1: Some(0.0),
                }
            }
            SpaceKind::CustomBounds => self
                .bounds_override
                .expect("custom spaces carry bounds by construction"),
        }
    }

    pub fn is_einstein(&self) -> bool {
        self.einstein_const.is_some()
    }
}

/// Kähler curvature of constant holomorphic sectional curvature `c`:
/// `R = (c/4)[½ g⧆g + ω(X,W)ω(Y,Z) − ω(X,Z)ω(Y,W) + 2ω(X,Y)ω(W,Z)]`
/// with `ω(X,Y) = g(JX,Y)` and `J e₂ₖ = e₂ₖ₊₁`.
pub fn fubini_study_tensor(dim: usize, c: f64) -> CurvatureTensor {
    let g = SymBilinear::identity(dim);
    let base = kulkarni_nomizu(&g, &g).expect("same dimension").scaled(0.5);
    let omega = |x: usize, y: usize| -> f64 {
        // g(J e_x, e_y)
        if x.is_multiple_of(2) && y == x + 1 {
            1.0
        } else if x % 2 == 1 && y + 1 == x {
            -1.0
        } else {
            0.0
        }
    };
    let mut comp = base.components().to_vec();
    let mut at = 0;
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                for w in 0..dim {
                    comp[at] += omega(x, w) * omega(y, z) - omega(x, z) * omega(y, w)
                        + 2.0 * omega(x, y) * omega(w, z);
                    comp[at] *= c / 4.0;
                    at += 1;
                }
            }
        }
    }
    CurvatureTensor::from_components(dim, comp).expect("Kähler curvature is algebraic")
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SpaceKind::RoundSphere => "sphere",
            SpaceKind::FubiniStudy => "fubini",
            SpaceKind::FlatTorus => "torus",
            SpaceKind::ConstantCurvature => "const",
            SpaceKind::CustomBounds => {
                let b = self.bounds();
                write!(
                    f,
                    "custom:{}:kappa={},tau={},ric_min={},ric_max={},scal_min={},scal_max={}",
                    self.dim, b.kappa, b.tau, b.ric_min, b.ric_max, b.scal_min, b.scal_max
                )?;
                if let Some(v) = b.ric3_min {
                    write!(f, ",ric3={v}")?;
                }
                if let Some(v) = b.chi_ic1 {
                    write!(f, ",chi={v}")?;
                }
                if let Some(v) = self.einstein_const {
                    write!(f, ",L={v}")?;
                }
                return Ok(());
            }
        };
        write!(f, "{kind}:{}:{}", self.dim, self.scale)
    }
}

/// Parses `kind:dim:scale` (kinds `sphere`, `fubini`, `torus`, `const`) or
/// `custom:dim:key=value,...` with keys `kappa`, `tau` (required) and
/// `ric_min`, `ric_max`, `scal_min`, `scal_max`, `ric3`, `chi`, `L`.
/// Missing Ricci and scalar bounds default to the ones implied by the
/// sectional range, `ric3` to `2·kappa`.
impl FromStr for ModelSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().splitn(3, ':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected kind:dim:scale, got {s:?}")));
        }
        let dim: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension {:?}", parts[1])))?;
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {v:?}")))
        };
        match parts[0] {
            "sphere" => Self::sphere(dim, num(parts[2])?),
            "fubini" => Self::fubini_study(dim, num(parts[2])?),
            "torus" => Self::flat_torus(dim, num(parts[2])?),
            "const" => Self::constant(dim, num(parts[2])?),
            "custom" => parse_custom(dim, parts[2]),
            other => Err(Error::Parse(format!("unknown space kind {other:?}"))),
        }
    }
}

fn parse_custom(dim: usize, body: &str) -> Result<ModelSpace> {
    let mut kv = std::collections::BTreeMap::new();
    for item in body.split(',').filter(|x| !x.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad number for {k}: {v:?}")))?;
        let key = k.trim();
        if !matches!(
            key,
            "kappa"
                | "tau"
                | "ric_min"
                | "ric_max"
                | "scal_min"
                | "scal_max"
                | "ric3"
                | "chi"
                | "L"
        ) {
            return Err(Error::Parse(format!("unknown bound {key:?}")));
        }
        kv.insert(key.to_string(), v);
    }
    let need = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::Parse(format!("custom space needs {k}")))
    };
    let kappa = need("kappa")?;
    let tau = need("tau")?;
    let d = dim as f64;
    let ric_min = kv.get("ric_min").copied().unwrap_or((d - 1.0) * kappa);
    let ric_max = kv.get("ric_max").copied().unwrap_or((d - 1.0) * tau);
    let bounds = CurvatureBounds {
        kappa,
        tau,
        ric_min,
        ric_max,
        scal_min: kv.get("scal_min").copied().unwrap_or(d * ric_min),
        scal_max: kv.get("scal_max").copied().unwrap_or(d * ric_max),
        ric3_min: if dim >= 3 {
            Some(kv.get("ric3").copied().unwrap_or(2.0 * kappa))
        } else {
            None
        },
        chi_ic1: kv.get("chi").copied(),
    };
    ModelSpace::custom(dim, bounds, kv.get("L").copied())
}

/// `𝓡_min(g₀) − (m/n)·𝓡_max(h₀)`.
pub fn scalar_hypothesis(space_m: &ModelSpace, space_n: &ModelSpace) -> f64 {
    let ratio = space_m.dim as f64 / space_n.dim as f64;
    space_m.bounds().scal_min - ratio * space_n.bounds().scal_max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    Static,
    RicciHomothety,
}

/// Background metric as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundPath {
    pub base: ModelSpace,
    pub mode: PathMode,
    pub t_max: f64,
}

impl BackgroundPath {
    pub fn fixed(base: ModelSpace) -> Self {
        Self {
            base,
            mode: PathMode::Static,
            t_max: f64::INFINITY,
        }
    }

    /// Exact Ricci flow of an Einstein base. Fails for non-Einstein bases.
    pub fn homothety(base: ModelSpace) -> Result<Self> {
        let l = base.einstein_const.ok_or_else(|| {
            Error::HypothesisViolation("Ricci homothety needs an Einstein background".into())
        })?;
        let t_max = if l > 0.0 { 1.0 / l } else { f64::INFINITY };
        Ok(Self {
            base,
            mode: PathMode::RicciHomothety,
            t_max,
        })
    }

    pub fn new(base: ModelSpace, mode: PathMode) -> Result<Self> {
        match mode {
            PathMode::Static => Ok(Self::fixed(base)),
            PathMode::RicciHomothety => Self::homothety(base),
        }
    }

    fn einstein(&self) -> f64 {
        match self.mode {
            PathMode::Static => 0.0,
            PathMode::RicciHomothety => self.base.einstein_const.unwrap_or(0.0),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::OutOfRange(format!("time {t} is negative")));
        }
        if t >= self.t_max {
            return Err(Error::Extinct {
                t,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    /// `g(t) = factor · g₀`.
    pub fn metric_factor(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(1.0 - self.einstein() * t)
    }

    /// `∂_t g(e, e)` for a `g(t)`-unit vector `e`, i.e. `−Ric(e, e)`.
    pub fn dt_metric(&self, t: f64) -> Result<f64> {
        let factor = self.metric_factor(t)?;
        Ok(-self.einstein() / factor)
    }

    pub fn at_time(&self, t: f64) -> Result<ModelSpace> {
        let factor = self.metric_factor(t)?;
        if self.mode == PathMode::Static {
            return Ok(self.base.clone());
        }
        let b = &self.base;
        let mut out = b.clone();
        out.scale = match b.kind {
            SpaceKind::RoundSphere | SpaceKind::FlatTorus => b.scale * factor.sqrt(),
            SpaceKind::FubiniStudy | SpaceKind::ConstantCurvature => b.scale / factor,
            SpaceKind::CustomBounds => b.scale,
        };
        out.bounds_override = b.bounds_override.map(|x| x.scaled(1.0 / factor));
        // Ric is scale invariant, so Ric = L g₀ = (L / factor) g(t)
        out.einstein_const = b.einstein_const.map(|l| l / factor);
        Ok(out)
    }
}
