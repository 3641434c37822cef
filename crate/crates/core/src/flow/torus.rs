//! Graph flow of `f = Lx + u(x)` over the flat torus `[0, 2π)^m` into flat
//! `R^n`. With flat metrics all Christoffel terms vanish and the DeTurck
//! system is `∂_t f^α = η^{ij} ∂_i∂_j f^α`, `η = I + dfᵀdf`.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use super::{CONDITION_GUARD, LAMBDA_GUARD};
use crate::curvature::SymBilinear;
use crate::error::{Error, Result};
use crate::profile::{singular_decomposition, SingularProfile};

/// Largest supported `m` and `n` (point data lives in 4×4 stack matrices).
pub const MAX_DIM: usize = 4;

type M4 = Matrix4<f64>;

/// First and second discrete derivatives of `f` at one grid point.
/// `p[(α, k)] = ∂_k f^α`, `hess[α][(k, l)] = ∂_k∂_l f^α`; unused slots are zero.
#[derive(Debug, Clone, Copy)]
struct Jet {
    p: M4,
    hess: [M4; MAX_DIM],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusFlowState {
    pub m: usize,
    pub n: usize,
    /// points per direction
    pub grid: usize,
    pub h_spacing: f64,
    /// constant part of `df`, `n × m`
    pub linear: DMatrix<f64>,
    /// periodic part, `n` values per point, point-major
    pub u: Vec<f64>,
    pub t: f64,
}

impl TorusFlowState {
    /// Samples `u^α(x)` from `init(x, α)` on the uniform `grid^m` lattice.
    pub fn from_fn<F>(
        m: usize,
        n: usize,
        grid: usize,
        linear: DMatrix<f64>,
        init: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64], usize) -> f64,
    {
        if !(2..=MAX_DIM).contains(&m) {
            return Err(Error::OutOfRange(format!(
                "torus flow needs 2 <= m <= {MAX_DIM}, got {m}"
            )));
        }
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::OutOfRange(format!(
                "torus flow needs 1 <= n <= {MAX_DIM}, got {n}"
            )));
        }
        if grid < 4 {
            return Err(Error::OutOfRange(format!("torus grid {grid} is below 4")));
        }
        if linear.shape() != (n, m) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: linear.nrows(),
            });
        }
        let h = 2.0 * std::f64::consts::PI / grid as f64;
        let mut st = Self {
            m,
            n,
            grid,
            h_spacing: h,
            linear,
            u: Vec::new(),
            t: 0.0,
        };
        let mut u = Vec::with_capacity(st.points() * n);
        for p in 0..st.points() {
            let x = st.coords(p);
            for a in 0..n {
                u.push(init(&x, a));
            }
        }
        st.u = u;
        Ok(st)
    }

    pub fn points(&self) -> usize {
        self.grid.pow(self.m as u32)
    }

    pub fn coords(&self, p: usize) -> Vec<f64> {
        let mut rest = p;
        (0..self.m)
            .map(|_| {
                let c = rest % self.grid;
                rest /= self.grid;
                c as f64 * self.h_spacing
            })
            .collect()
    }

    /// Index of the neighbour of `p` shifted by `off` in direction `dim`, wrapping.
    fn shift(&self, p: usize, dim: usize, off: isize) -> usize {
        let stride = self.grid.pow(dim as u32);
        let c = (p / stride) % self.grid;
        let g = self.grid as isize;
        let nc = ((c as isize + off).rem_euclid(g)) as usize;
        p - c * stride + nc * stride
    }

    fn jet(&self, u: &[f64], p: usize) -> Jet {
        let (m, n, h) = (self.m, self.n, self.h_spacing);
        let at = |q: usize, a: usize| u[q * n + a];
        let mut jet = Jet {
            p: M4::zeros(),
            hess: [M4::zeros(); MAX_DIM],
        };
        for k in 0..m {
            let (kp, km) = (self.shift(p, k, 1), self.shift(p, k, -1));
            for a in 0..n {
                jet.p[(a, k)] = self.linear[(a, k)] + (at(kp, a) - at(km, a)) / (2.0 * h);
                jet.hess[a][(k, k)] = (at(kp, a) - 2.0 * at(p, a) + at(km, a)) / (h * h);
            }
            for l in k + 1..m {
                let pp = self.shift(kp, l, 1);
                let pm = self.shift(kp, l, -1);
                let mp = self.shift(km, l, 1);
                let mm = self.shift(km, l, -1);
                for a in 0..n {
                    let v = (at(pp, a) - at(pm, a) - at(mp, a) + at(mm, a)) / (4.0 * h * h);
                    jet.hess[a][(k, l)] = v;
                    jet.hess[a][(l, k)] = v;
                }
            }
        }
        jet
    }

    /// `η⁻¹` padded to 4×4; guards the condition number of `η = I + PᵀP`.
    fn eta_inverse(&self, jet: &Jet, p: usize) -> Result<M4> {
        // eigenvalues of η lie in [1, 1 + |P|²]
        let cond_bound = 1.0 + jet.p.norm_squared();
        if !cond_bound.is_finite() || cond_bound > CONDITION_GUARD {
            return Err(Error::GraphBreakdown(format!(
                "induced metric condition bound {cond_bound:e} at point {p}"
            )));
        }
        let eta = M4::identity() + jet.p.transpose() * jet.p;
        eta.try_inverse()
            .ok_or_else(|| Error::GraphBreakdown(format!("singular induced metric at point {p}")))
    }

    fn point_rhs(&self, u: &[f64], p: usize) -> Result<[f64; MAX_DIM]> {
        let jet = self.jet(u, p);
        let inv = self.eta_inverse(&jet, p)?;
        let mut out = [0.0; MAX_DIM];
        for (a, o) in out.iter_mut().enumerate().take(self.n) {
            *o = inv.component_mul(&jet.hess[a]).sum();
        }
        Ok(out)
    }

    /// `η^{ij} ∂_i∂_j f^α` at every point, point-major.
    pub fn rhs(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let rows = crate::par_map(self.points(), |p| self.point_rhs(u, p));
        let mut out = Vec::with_capacity(self.points() * n);
        for r in rows {
            out.extend_from_slice(&r?[..n]);
        }
        Ok(out)
    }

    /// Largest stable step `cfl·h²/(2m)`.
    pub fn stable_dt(&self, cfl: f64) -> f64 {
        cfl * self.h_spacing * self.h_spacing / (2.0 * self.m as f64)
    }

    /// One Heun (RK2) step. Fails if `dt` exceeds `stable_dt(cfl)` or the graph breaks down.
    pub fn step(&self, dt: f64, cfl: f64) -> Result<Self> {
        let limit = self.stable_dt(cfl);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { dt, limit });
        }
        let k1 = self.rhs(&self.u)?;
        let mid: Vec<f64> = self.u.iter().zip(&k1).map(|(u, k)| u + dt * k).collect();
        let k2 = self.rhs(&mid)?;
        let u = self
            .u
            .iter()
            .zip(k1.iter().zip(&k2))
            .map(|(u, (a, b))| u + 0.5 * dt * (a + b))
            .collect();
        Ok(Self {
            m: self.m,
            n: self.n,
            grid: self.grid,
            h_spacing: self.h_spacing,
            linear: self.linear.clone(),
            u,
            t: self.t + dt,
        })
    }

    fn df(&self, jet: &Jet) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.m, |a, k| jet.p[(a, k)])
    }

    /// Singular profile of `df` at every point (flat metrics).
    pub fn profiles(&self) -> Result<Vec<SingularProfile>> {
        let (g, h) = (SymBilinear::identity(self.m), SymBilinear::identity(self.n));
        let rows = crate::par_map(self.points(), |p| {
            let jet = self.jet(&self.u, p);
            singular_decomposition(&self.df(&jet), &g, &h).map(|d| d.profile)
        });
        rows.into_iter().collect()
    }

    /// `(𝔪, λ_max, max λ₁λ₂)` over the grid; aborts past the λ guard.
    pub fn monitors(&self) -> Result<(f64, f64, f64)> {
        let profiles = self.profiles()?;
        let m_of_t = crate::profile::m_monitor(&profiles)?;
        let lmax = profiles.iter().map(|p| p.lambda[0]).fold(0.0, f64::max);
        let prod = profiles
            .iter()
            .map(|p| p.lambda[0] * p.lambda[1])
            .fold(0.0, f64::max);
        if lmax > LAMBDA_GUARD {
            return Err(Error::GraphBreakdown(format!(
                "lambda_max {lmax} exceeds {LAMBDA_GUARD}"
            )));
        }
        Ok((m_of_t, lmax, prod))
    }

    /// Max-norm over the grid of `∂_t φ − η^{ij}∂_i∂_j φ − Σᵢ Iᵢ` for the trace
    /// `φ = tr_η S = 2 tr η⁻¹ − m`.
    ///
    /// `∂_t φ` is taken along the semi-discrete flow (chain rule through the
    /// discrete right-hand side), and the DeTurck tangential drift is absorbed
    /// into the coordinate Laplacian, so the result is `O(h²)`.
    pub fn evo_residual(&self) -> Result<f64> {
        let (m, n, h) = (self.m, self.n, self.h_spacing);
        let rhs = self.rhs(&self.u)?;
        let phi: Vec<f64> = {
            let rows = crate::par_map(self.points(), |p| {
                let jet = self.jet(&self.u, p);
                self.eta_inverse(&jet, p)
                    .map(|inv| 2.0 * inv.trace() - 2.0 * (MAX_DIM - m) as f64 - m as f64)
            });
            rows.into_iter().collect::<Result<_>>()?
        };
        let (g, hm) = (SymBilinear::identity(m), SymBilinear::identity(n));
        let rows = crate::par_map(self.points(), |p| -> Result<f64> {
            let jet = self.jet(&self.u, p);
            let inv = self.eta_inverse(&jet, p)?;
            // ∂_t φ = −4 Σ (P η⁻²)_{αk} ∂_k(∂_t f^α)
            let w = jet.p * inv * inv;
            let mut phi_t = 0.0;
            for k in 0..m {
                let (kp, km) = (self.shift(p, k, 1), self.shift(p, k, -1));
                for a in 0..n {
                    let d = (rhs[kp * n + a] - rhs[km * n + a]) / (2.0 * h);
                    phi_t -= 4.0 * w[(a, k)] * d;
                }
            }
            let mut lap = 0.0;
            for k in 0..m {
                let (kp, km) = (self.shift(p, k, 1), self.shift(p, k, -1));
                lap += inv[(k, k)] * (phi[kp] - 2.0 * phi[p] + phi[km]) / (h * h);
                for l in k + 1..m {
                    let d = (phi[self.shift(kp, l, 1)]
                        - phi[self.shift(kp, l, -1)]
                        - phi[self.shift(km, l, 1)]
                        + phi[self.shift(km, l, -1)])
                        / (4.0 * h * h);
                    lap += 2.0 * inv[(k, l)] * d;
                }
            }
            let dec = singular_decomposition(&self.df(&jet), &g, &hm)?;
            let term_i = term_i_total(&dec.profile, &dec.u, &dec.v, &jet);
            Ok((phi_t - lap - term_i).abs())
        });
        rows.into_iter()
            .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))
    }
}

/// `Σᵢ Iᵢ = Σ_{i,l,a} 2(Sᵢᵢ + Sₐₐ)|A^{a+m}_{il}|²` with `A` read off the
/// coordinate Hessian in the singular frame.
fn term_i_total(p: &SingularProfile, u: &DMatrix<f64>, v: &DMatrix<f64>, jet: &Jet) -> f64 {
    let (m, n) = (p.m, p.n);
    let x: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let r = (1.0 + p.lambda[i].powi(2)).sqrt();
            (0..m).map(|j| u[(j, i)] / r).collect()
        })
        .collect();
    let mut total = 0.0;
    for i in 0..m {
        for l in 0..m {
            // w^α = ∂²f^α(Xᵢ, X_l)
            let w: Vec<f64> = (0..n)
                .map(|a| {
                    let mut s = 0.0;
                    for j in 0..m {
                        for k in 0..m {
                            s += x[i][j] * x[l][k] * jet.hess[a][(j, k)];
                        }
                    }
                    s
                })
                .collect();
            for b in 0..n {
                let lb = p.lambda_target(b);
                let proj: f64 = (0..n).map(|a| v[(a, b)] * w[a]).sum();
                let entry = proj / (1.0 + lb * lb).sqrt();
                total += 2.0 * (p.s_diag[i] + p.s_target(b)) * entry * entry;
            }
        }
    }
    total
}
