//! Rotationally equivariant maps `S^m → S^n` (`m ≤ n`),
//! `(θ, ω) ↦ (ρ(θ), ω)` with `ω ∈ S^{m−1}` on an equator of `S^{n−1}`.
//! The DeTurck flow with round backgrounds of radii `r_M`, `r_N` reduces to
//!
//! `ρ_t = ρ″/(r_M² + r_N²ρ′²) + (m−1)(sin θ cos θ ρ′ − sin ρ cos ρ)/(r_M² sin²θ + r_N² sin²ρ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::LAMBDA_GUARD;
use crate::error::{Error, Result};
use crate::model::{BackgroundPath, SpaceKind};
use crate::profile::{m_monitor, SingularProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivariantFlowState {
    pub m: usize,
    pub n: usize,
    /// `ρ(θ_k)` at `θ_k = kπ/(N−1)`
    pub rho: Vec<f64>,
    pub r_m: f64,
    pub r_n: f64,
    pub t: f64,
}

/// Radius of a round-sphere background at time `t`.
pub fn sphere_radius(path: &BackgroundPath, t: f64) -> Result<f64> {
    if path.base.kind != SpaceKind::RoundSphere {
        return Err(Error::HypothesisViolation(format!(
            "equivariant flow needs round sphere backgrounds, got {:?}",
            path.base.kind
        )));
    }
    Ok(path.at_time(t)?.scale)
}

impl EquivariantFlowState {
    pub fn new(m: usize, n: usize, rho: Vec<f64>, r_m: f64, r_n: f64, t: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::DimensionTooSmall {
                what: "equivariant source sphere",
                dim: m,
                min: 2,
            });
        }
        if m > n {
            return Err(Error::OutOfRange(format!(
                "equivariant flow needs m <= n, got {m} > {n}"
            )));
        }
        if rho.len() < 5 {
            return Err(Error::OutOfRange(format!(
                "theta grid of {} points is below 5",
                rho.len()
            )));
        }
        if !(r_m > 0.0 && r_n > 0.0) {
            return Err(Error::OutOfRange(
                "background radii must be positive".into(),
            ));
        }
        if rho.iter().any(|r| !r.is_finite()) {
            return Err(Error::GraphBreakdown("non-finite profile value".into()));
        }
        let end = *rho.last().expect("nonempty");
        if rho[0] != 0.0 || !(end == 0.0 || end == PI) {
            return Err(Error::HypothesisViolation(format!(
                "boundary values must be rho(0) = 0 and rho(pi) in {{0, pi}}, got {} and {end}",
                rho[0]
            )));
        }
        Ok(Self {
            m,
            n,
            rho,
            r_m,
            r_n,
            t,
        })
    }

    /// Samples `ρ = init(θ)` and snaps the end values to the nearest class.
    pub fn from_fn<F>(
        m: usize,
        n: usize,
        points: usize,
        r_m: f64,
        r_n: f64,
        init: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        let mut rho: Vec<f64> = (0..points).map(|k| init(theta_at(k, points))).collect();
        if let Some(first) = rho.first_mut() {
            *first = 0.0;
        }
        if let Some(last) = rho.last_mut() {
            *last = if (*last - PI).abs() < (*last).abs() {
                PI
            } else {
                0.0
            };
        }
        Self::new(m, n, rho, r_m, r_n, 0.0)
    }

    pub fn points(&self) -> usize {
        self.rho.len()
    }

    pub fn spacing(&self) -> f64 {
        PI / (self.points() - 1) as f64
    }

    pub fn theta(&self, k: usize) -> f64 {
        theta_at(k, self.points())
    }

    /// `ρ′` at node `k`; at the poles by odd reflection about the end value.
    pub fn derivative(&self, k: usize) -> f64 {
        derivative(&self.rho, k, self.spacing())
    }

    /// Reduced right-hand side at every node (zero at the fixed poles).
    pub fn rhs(&self) -> Vec<f64> {
        reduced_rhs(&self.rho, self.m, self.r_m, self.r_n)
    }

    /// `cfl·h²·r_M²/(2m)`.
    pub fn stable_dt(&self, cfl: f64, r_m: f64) -> f64 {
        let h = self.spacing();
        cfl * h * h * r_m * r_m / (2.0 * self.m as f64)
    }

    /// One Heun step with radii read from the background paths at `t` and `t + dt`.
    pub fn step(
        &self,
        dt: f64,
        cfl: f64,
        path_m: &BackgroundPath,
        path_n: &BackgroundPath,
    ) -> Result<Self> {
        let t1 = self.t + dt;
        let (rm1, rn1) = (sphere_radius(path_m, t1)?, sphere_radius(path_n, t1)?);
        let limit = self.stable_dt(cfl, self.r_m.min(rm1));
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { dt, limit });
        }
        let k1 = self.rhs();
        let mid: Vec<f64> = self.rho.iter().zip(&k1).map(|(r, k)| r + dt * k).collect();
        let k2 = reduced_rhs(&mid, self.m, rm1, rn1);
        let rho = self
            .rho
            .iter()
            .zip(k1.iter().zip(&k2))
            .map(|(r, (a, b))| r + 0.5 * dt * (a + b))
            .collect();
        let next = Self::new(self.m, self.n, rho, rm1, rn1, t1)?;
        let lmax = next.lambda_max();
        if !(lmax <= LAMBDA_GUARD) {
            return Err(Error::GraphBreakdown(format!(
                "lambda_max {lmax} exceeds {LAMBDA_GUARD} at t = {t1}"
            )));
        }
        Ok(next)
    }

    /// `(λ₁, λ₂)` at node `k`: `λ₁ = (r_N/r_M)|ρ′|`, `λ₂ = (r_N/r_M)|sin ρ/ sin θ|`
    /// (multiplicity `m − 1`), with `λ₂ = λ₁` at the poles.
    pub fn lambdas(&self, k: usize) -> (f64, f64) {
        let ratio = self.r_n / self.r_m;
        let l1 = ratio * self.derivative(k).abs();
        let l2 = if k == 0 || k + 1 == self.points() {
            l1
        } else {
            ratio * (self.rho[k].sin() / self.theta(k).sin()).abs()
        };
        (l1, l2)
    }

    fn lambda_max(&self) -> f64 {
        (0..self.points())
            .map(|k| {
                let (a, b) = self.lambdas(k);
                a.max(b)
            })
            .fold(0.0, f64::max)
    }

    pub fn profiles(&self) -> Result<Vec<SingularProfile>> {
        (0..self.points())
            .map(|k| {
                let (l1, l2) = self.lambdas(k);
                let mut lam = vec![l2; self.m];
                lam[0] = l1;
                SingularProfile::from_lambdas(self.m, self.n, &lam)
            })
            .collect()
    }

    /// `(𝔪, λ_max, max λ₁λ₂)` over the θ-grid.
    pub fn monitors(&self) -> Result<(f64, f64, f64)> {
        let profiles = self.profiles()?;
        let m_of_t = m_monitor(&profiles)?;
        let lmax = profiles.iter().map(|p| p.lambda[0]).fold(0.0, f64::max);
        let prod = profiles
            .iter()
            .map(|p| p.lambda[0] * p.lambda[1])
            .fold(0.0, f64::max);
        Ok((m_of_t, lmax, prod))
    }
}

pub(crate) fn theta_at(k: usize, points: usize) -> f64 {
    PI * k as f64 / (points - 1) as f64
}

fn derivative(rho: &[f64], k: usize, h: f64) -> f64 {
    let last = rho.len() - 1;
    if k == 0 {
        (rho[1] - rho[0]) / h
    } else if k == last {
        (rho[last] - rho[last - 1]) / h
    } else {
        (rho[k + 1] - rho[k - 1]) / (2.0 * h)
    }
}

/// The reduced operator on a uniform θ-grid over `[0, π]`; pole entries are zero.
pub fn reduced_rhs(rho: &[f64], m: usize, r_m: f64, r_n: f64) -> Vec<f64> {
    let points = rho.len();
    let h = PI / (points - 1) as f64;
    let (rm2, rn2) = (r_m * r_m, r_n * r_n);
    let mut out = vec![0.0; points];
    for k in 1..points - 1 {
        let (st, ct) = theta_at(k, points).sin_cos();
        let (sr, cr) = rho[k].sin_cos();
        let d1 = (rho[k + 1] - rho[k - 1]) / (2.0 * h);
        let d2 = (rho[k + 1] - 2.0 * rho[k] + rho[k - 1]) / (h * h);
        out[k] = d2 / (rm2 + rn2 * d1 * d1)
            + (m - 1) as f64 * (st * ct * d1 - sr * cr) / (rm2 * st * st + rn2 * sr * sr);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpace;

    fn static_unit(d: usize) -> BackgroundPath {
        BackgroundPath::fixed(ModelSpace::sphere(d, 1.0).unwrap())
    }

    #[test]
    fn identity_is_stationary() {
        let st = EquivariantFlowState::from_fn(3, 3, 513, 1.0, 1.0, |t| t).unwrap();
        let worst = st.rhs().iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        assert!(worst <= 1e-10, "{worst}");
        let (m, lmax, _) = st.monitors().unwrap();
        assert!(m.abs() < 1e-12 && (lmax - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_map_is_fixed() {
        let st = EquivariantFlowState::from_fn(3, 4, 65, 1.0, 1.0, |_| 0.0).unwrap();
        let (pm, pn) = (static_unit(3), static_unit(4));
        let next = st.step(st.stable_dt(0.4, 1.0), 0.4, &pm, &pn).unwrap();
        assert_eq!(next.rho, st.rho);
        assert_eq!(next.monitors().unwrap().0, 2.0);
    }

    #[test]
    fn small_data_decays() {
        let mut st = EquivariantFlowState::from_fn(3, 3, 65, 1.0, 1.0, |t| 0.01 * t.sin()).unwrap();
        let p = static_unit(3);
        let sup = |s: &EquivariantFlowState| s.rho.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        let mut last = sup(&st);
        for _ in 0..200 {
            st = st.step(st.stable_dt(0.4, 1.0), 0.4, &p, &p).unwrap();
            let now = sup(&st);
            assert!(now < last);
            last = now;
        }
        // linearization at ρ = 0: ρ = sin θ is an eigenfunction with rate m
        let rate = (0.01 / last).ln() / st.t;
        assert!((rate - 3.0).abs() < 0.02, "{rate}");
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(EquivariantFlowState::new(4, 3, vec![0.0; 9], 1.0, 1.0, 0.0).is_err());
        assert!(
            EquivariantFlowState::new(3, 3, vec![0.0, 0.1, 0.2, 0.3, 0.4], 1.0, 1.0, 0.0).is_err()
        );
        let st = EquivariantFlowState::from_fn(3, 3, 9, 1.0, 1.0, |t| t).unwrap();
        let p = static_unit(3);
        let dt = 2.0 * st.stable_dt(0.4, 1.0);
        assert!(matches!(
            st.step(dt, 0.4, &p, &p),
            Err(Error::StepTooLarge { .. })
        ));
        let torus = BackgroundPath::fixed(ModelSpace::flat_torus(3, 1.0).unwrap());
        assert!(st.step(st.stable_dt(0.4, 1.0), 0.4, &torus, &p).is_err());
    }
}
