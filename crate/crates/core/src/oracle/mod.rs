//! Pointwise evaluation of the evolution-equation terms for `S` and `Θ₁₂₂₁`
//! and of the lower bounds used in the monotonicity arguments.
//!
//! Everything is expressed in the singular frame at one point: `uᵢ` on `M`,
//! `vₐ` on `N`, the graph frame built from them, sectional curvatures
//! `K^g_ij = K^g(uᵢ,uⱼ)`, `K^h_ab = K^h(vₐ,v_b)`, second fundamental form
//! entries `A^{a+m}_{il}` and metric derivatives `∂_t g_ii`, `∂_t h_aa`.
//! Indices are zero-based in code.

pub mod sweep;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::audit::{check_a, check_b, check_c, check_d, ConditionReport};
use crate::curvature::{product_curvature, CurvatureBounds, CurvatureTensor};
use crate::error::{Error, Result};
use crate::profile::{graph_frame, SingularProfile};

/// Tolerance for hypothesis checks on state entries.
pub const HYP_TOL: f64 = 1e-12;

/// Tolerance for condition slacks.
pub const SLACK_TOL: f64 = 1e-10;

/// Default multiplier in the explicit constant of the evolving-background bounds.
pub const DEFAULT_C0: f64 = 8.0;

/// One-point snapshot feeding the oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointState {
    pub profile: SingularProfile,
    /// `m × m`, symmetric, zero diagonal
    pub kg: DMatrix<f64>,
    /// `n × n`, symmetric, zero diagonal (rows past `ℓ` enter the Ricci rows of `h`)
    pub kh: DMatrix<f64>,
    /// `a[α][(i, l)] = A^{α+m}_{il}`, one symmetric `m × m` block per normal direction
    pub a: Vec<DMatrix<f64>>,
    /// `∂_t g_ii`, length `m`
    pub dtg: Vec<f64>,
    /// `∂_t h_aa`, length `n`
    pub dth: Vec<f64>,
    /// declared curvature bounds of `M` and `N`
    pub bounds_m: CurvatureBounds,
    pub bounds_n: CurvatureBounds,
}

fn check_sectional_block(k: &DMatrix<f64>, d: usize, what: &str) -> Result<()> {
    if k.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: k.nrows(),
        });
    }
    for i in 0..d {
        if k[(i, i)] != 0.0 {
            return Err(Error::HypothesisViolation(format!(
                "{what} has a nonzero diagonal"
            )));
        }
        for j in 0..i {
            let asym = (k[(i, j)] - k[(j, i)]).abs();
            if asym > HYP_TOL * (1.0 + k[(i, j)].abs()) {
                return Err(Error::NotSymmetric { asymmetry: asym });
            }
        }
    }
    Ok(())
}

fn offdiag(k: &DMatrix<f64>) -> impl Iterator<Item = f64> + '_ {
    let d = k.nrows();
    (0..d).flat_map(move |i| (0..d).filter(move |&j| j != i).map(move |j| k[(i, j)]))
}

impl PointState {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        profile: SingularProfile,
        kg: DMatrix<f64>,
        kh: DMatrix<f64>,
        a: Vec<DMatrix<f64>>,
        dtg: Vec<f64>,
        dth: Vec<f64>,
        bounds_m: CurvatureBounds,
        bounds_n: CurvatureBounds,
    ) -> Result<Self> {
        let (m, n) = (profile.m, profile.n);
        check_sectional_block(&kg, m, "K^g")?;
        check_sectional_block(&kh, n, "K^h")?;
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        for block in &a {
            if block.shape() != (m, m) {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: block.nrows(),
                });
            }
            let asym = (block - block.transpose()).amax();
            if asym > HYP_TOL * (1.0 + block.amax()) {
                return Err(Error::NotSymmetric { asymmetry: asym });
            }
        }
        if dtg.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: dtg.len(),
            });
        }
        if dth.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dth.len(),
            });
        }
        let tol = |b: f64| HYP_TOL * (1.0 + b.abs());
        for (k, b, side) in [(&kg, &bounds_m, "M"), (&kh, &bounds_n, "N")] {
            for v in offdiag(k) {
                if v < b.kappa - tol(b.kappa) || v > b.tau + tol(b.tau) {
                    return Err(Error::HypothesisViolation(format!(
                        "sectional value {v} of {side} outside declared [{}, {}]",
                        b.kappa, b.tau
                    )));
                }
            }
        }
        Ok(Self {
            profile,
            kg,
            kh,
            a,
            dtg,
            dth,
            bounds_m,
            bounds_n,
        })
    }

    pub fn m(&self) -> usize {
        self.profile.m
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    /// `A^{α+m}_{il}`, zero for normal indices past `n`.
    pub fn a_entry(&self, alpha: usize, i: usize, l: usize) -> f64 {
        self.a.get(alpha).map_or(0.0, |b| b[(i, l)])
    }

    /// `|A|²` over all entries.
    pub fn a_norm_sq(&self) -> f64 {
        self.a.iter().map(|b| b.norm_squared()).sum()
    }

    /// `Σ_{a,k} |A^{a+m}_{ik}|²` for a fixed tangent row `i`.
    pub fn a_row_sq(&self, i: usize) -> f64 {
        self.a.iter().map(|b| b.row(i).norm_squared()).sum()
    }

    pub fn ricci_g(&self, i: usize) -> f64 {
        self.kg.row(i).sum()
    }

    pub fn ricci_h(&self, a: usize) -> f64 {
        self.kh.row(a).sum()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.m() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.m(),
            });
        }
        Ok(())
    }

    fn kh_entry(&self, i: usize, k: usize) -> f64 {
        if i < self.n() && k < self.n() {
            self.kh[(i, k)]
        } else {
            0.0
        }
    }
}

/// The three terms of `(∂_t − Δ_η) S(Eᵢ, Eᵢ)`.
pub fn terms_i_ii_iii(st: &PointState, i: usize) -> Result<(f64, f64, f64)> {
    st.check_index(i)?;
    let p = &st.profile;
    let sii = p.s_diag[i];
    let mut t1 = 0.0;
    for a in 0..st.n() {
        let weight = 2.0 * (sii + p.s_target(a));
        for l in 0..st.m() {
            t1 += weight * st.a[a][(i, l)].powi(2);
        }
    }
    let c2 = p.c_diag[i].powi(2);
    let t2 = c2 * curvature_sum(st, i);
    let dth = st.dth.get(i).copied().unwrap_or(0.0);
    let t3 = 0.5 * c2 * (st.dtg[i] - dth);
    Ok((t1, t2, t3))
}

/// `Σ_k (K^g_ik − λ_k² K^h_ik)/(1 + λ_k²)`, with the `K^h` term dropped past `n`.
fn curvature_sum(st: &PointState, i: usize) -> f64 {
    let lam = &st.profile.lambda;
    (0..st.m())
        .map(|k| {
            let l2 = lam[k] * lam[k];
            (st.kg[(i, k)] - l2 * st.kh_entry(i, k)) / (1.0 + l2)
        })
        .sum()
}

/// Term II by contracting the product curvature of `g ⊕ h` in the graph
/// frame: `−2Cᵢᵢ Σ_k R̃(Ẽᵢ, Ẽ_k, Ẽ_k, Ẽ_{m+i})`.
pub fn term_ii_bruteforce(st: &PointState, i: usize) -> Result<f64> {
    st.check_index(i)?;
    let (m, n) = (st.m(), st.n());
    if i >= n {
        // no normal partner Ẽ_{m+i}; λᵢ = 0 there so the term vanishes
        return Ok(0.0);
    }
    let rg = CurvatureTensor::from_sectional_matrix(&st.kg);
    let rh = CurvatureTensor::from_sectional_matrix(&st.kh);
    let r = product_curvature(&rg, &rh);
    let frame = graph_frame(
        &st.profile,
        &DMatrix::identity(m, m),
        &DMatrix::identity(n, n),
    )?;
    let as_vec = |v: &DVector<f64>| -> Vec<f64> { v.iter().copied().collect() };
    let ei = as_vec(frame.combined(i));
    let nui = as_vec(frame.combined(m + i));
    let mut sum = 0.0;
    for k in 0..m {
        let ek = as_vec(frame.combined(k));
        sum += r.eval(&ei, &ek, &ek, &nui);
    }
    Ok(-2.0 * st.profile.c_diag[i] * sum)
}

/// `∇_{E_k} Θ₁₂₂₁ = −2(C₁₁A^{1+m}_{1k} + C₂₂A^{2+m}_{2k})`.
pub fn grad_theta_1221(st: &PointState) -> Vec<f64> {
    let c = &st.profile.c_diag;
    (0..st.m())
        .map(|k| -2.0 * (c[0] * st.a_entry(0, 0, k) + c[1] * st.a_entry(1, 1, k)))
        .collect()
}

/// `(1)`: the second-fundamental-form part of `(∂_t − Δ)Θ₁₂₂₁`.
pub fn term_1(st: &PointState) -> f64 {
    let t = |i| terms_i_ii_iii(st, i).expect("m >= 2").0;
    t(0) + t(1)
}

/// `(2)`: the curvature part.
pub fn term_2(st: &PointState) -> f64 {
    let t = |i| terms_i_ii_iii(st, i).expect("m >= 2").1;
    t(0) + t(1)
}

/// `(3)`: the background time-derivative part.
pub fn term_3(st: &PointState) -> f64 {
    let t = |i| terms_i_ii_iii(st, i).expect("m >= 2").2;
    t(0) + t(1)
}

fn diag_sums(st: &PointState) -> (f64, f64) {
    let s1: f64 = (0..st.m()).map(|k| st.a_entry(0, 0, k).powi(2)).sum();
    let s2: f64 = (0..st.m()).map(|k| st.a_entry(1, 1, k).powi(2)).sum();
    (s1, s2)
}

/// LHS − RHS of the `Θ₁₂₂₁ + α` inequality, with `(∂_t − Δ)Θ₁₂₂₁`
/// assembled as `(1) + (2) + (3)` and `|A|²` the full norm.
pub fn positivity_gap(st: &PointState, alpha: f64) -> Result<f64> {
    let p = &st.profile;
    let theta = p.theta_1221();
    let shift = theta + alpha;
    if !(shift > 0.0) {
        return Err(Error::NonPositiveShift(shift));
    }
    let evo = term_1(st) + term_2(st) + term_3(st);
    let grad_sq: f64 = grad_theta_1221(st).iter().map(|g| g * g).sum();
    let lhs = shift * evo + 0.5 * grad_sq;
    let (s1, s2) = diag_sums(st);
    let rhs = -2.0 * alpha * shift * st.a_norm_sq()
        + 4.0 * alpha * (p.s_diag[0] * s1 + p.s_diag[1] * s2)
        + shift * (term_2(st) + term_3(st));
    Ok(lhs - rhs)
}

/// Constant `a` in the determinant estimate: `Θ(1) + ½|∇Θ|² ≥ a Θ² |A_{1·}, A_{2·}|²`.
pub const CDET_A: f64 = 2.0;

/// The `α = 0` chain behind the determinant estimate:
/// `Θ₁₂₂₁·(1) + ½|∇Θ₁₂₂₁|² − 2Θ₁₂₂₁² Σ_{a,k}(|A^{a+m}_{1k}|² + |A^{a+m}_{2k}|²)`.
pub fn cdet_gap(st: &PointState) -> Result<f64> {
    let theta = st.profile.theta_1221();
    if !(theta > 0.0) {
        return Err(Error::NonPositiveShift(theta));
    }
    let grad_sq: f64 = grad_theta_1221(st).iter().map(|g| g * g).sum();
    let rows = st.a_row_sq(0) + st.a_row_sq(1);
    Ok(theta * term_1(st) + 0.5 * grad_sq - CDET_A * theta * theta * rows)
}

fn violation(msg: impl Into<String>) -> Error {
    Error::HypothesisViolation(msg.into())
}

/// Every slack of the report must be nonnegative up to `SLACK_TOL`, so
/// states built exactly on a boundary are accepted.
fn require_condition(report: &ConditionReport) -> Result<()> {
    match report.slacks.iter().find(|s| s.value < -SLACK_TOL) {
        Some(s) => Err(violation(format!(
            "condition ({}) fails: {} = {}",
            report.condition.tag(),
            s.name,
            s.value
        ))),
        None => Ok(()),
    }
}

fn require_static(st: &PointState) -> Result<()> {
    if st.dtg.iter().chain(&st.dth).any(|&v| v != 0.0) {
        return Err(violation("static background required"));
    }
    Ok(())
}

fn ell(st: &PointState) -> usize {
    st.m().min(st.n())
}

fn mixed_weight(st: &PointState) -> f64 {
    let l = &st.profile.lambda;
    let (a, b) = (l[0] * l[0], l[1] * l[1]);
    (a + b) / ((1.0 + a) * (1.0 + b))
}

/// `(2) + (3)` minus the lower bound under condition (A).
pub fn bound_a(st: &PointState) -> Result<f64> {
    require_static(st)?;
    let (m, n) = (st.m(), st.n());
    let (bm, bn) = (&st.bounds_m, &st.bounds_n);
    require_condition(&check_a(bm, bn, m, n)?)?;
    for i in 0..m {
        if st.ricci_g(i) < bm.ric_min - HYP_TOL * (1.0 + bm.ric_min.abs()) {
            return Err(violation("Ric(g) row below declared minimum"));
        }
    }
    for a in 0..n {
        if st.ricci_h(a) > bn.ric_max + HYP_TOL * (1.0 + bn.ric_max.abs()) {
            return Err(violation("Ric(h) row above declared maximum"));
        }
    }
    let p = &st.profile;
    let (c1, c2) = (p.c_diag[0].powi(2), p.c_diag[1].powi(2));
    let mut sum = 0.0;
    for q in 2..ell(st) {
        sum += (c1 * (st.kg[(0, q)] + st.kh[(0, q)]) + c2 * (st.kg[(1, q)] + st.kh[(1, q)]))
            * p.s_diag[q];
    }
    let k12 = st.kg[(0, 1)] + st.kh[(0, 1)];
    let bound = 0.5 * sum + k12 * mixed_weight(st) * p.theta_1221();
    Ok(term_2(st) + term_3(st) - bound)
}

/// `(2) + (3)` minus the lower bound under condition (B).
pub fn bound_b(st: &PointState) -> Result<f64> {
    require_static(st)?;
    let (m, n) = (st.m(), st.n());
    let (bm, bn) = (&st.bounds_m, &st.bounds_n);
    require_condition(&check_b(bm, bn, m, n)?)?;
    let p = &st.profile;
    let (c1, c2) = (p.c_diag[0].powi(2), p.c_diag[1].powi(2));
    let s_tail: f64 = (2..ell(st)).map(|q| p.s_diag[q]).sum();
    let bound =
        (bm.kappa + bn.tau) * (0.5 * (c1 + c2) * s_tail + mixed_weight(st) * p.theta_1221());
    Ok(term_2(st) + term_3(st) - bound)
}

/// Smallest `K(u_p, u_i) + K(u_p, u_j)` over distinct coordinate triples.
pub fn coordinate_ric3(k: &DMatrix<f64>) -> Option<f64> {
    let d = k.nrows();
    if d < 3 {
        return None;
    }
    let mut best = f64::INFINITY;
    for p in 0..d {
        for i in 0..d {
            for j in i + 1..d {
                if i != p && j != p {
                    best = best.min(k[(p, i)] + k[(p, j)]);
                }
            }
        }
    }
    Some(best)
}

/// Explicit constant `C = c₀ (max|K^g| + max|K^h| + max|∂_t g| + max|∂_t h|)(m + n)`.
pub fn constant_c(st: &PointState, c0: f64) -> f64 {
    let amax = |v: &[f64]| v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let mag = st.kg.amax() + st.kh.amax() + amax(&st.dtg) + amax(&st.dth);
    c0 * mag * (st.m() + st.n()) as f64
}

/// The same constant computed from declared bounds and metric derivative magnitudes.
pub fn constant_c_from_bounds(
    c0: f64,
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    dtg_max: f64,
    dth_max: f64,
    m: usize,
    n: usize,
) -> f64 {
    let kmax = |b: &CurvatureBounds| b.kappa.abs().max(b.tau.abs());
    c0 * (kmax(bm) + kmax(bn) + dtg_max.abs() + dth_max.abs()) * (m + n) as f64
}

fn require_ricci_flow(st: &PointState, evolve_h: bool) -> Result<()> {
    let close = |a: f64, b: f64| (a - b).abs() <= HYP_TOL * (1.0 + a.abs() + b.abs());
    for i in 0..st.m() {
        if !close(st.dtg[i], -st.ricci_g(i)) {
            return Err(violation("d/dt g must equal -Ric(g)"));
        }
    }
    for a in 0..st.n() {
        let want = if evolve_h { -st.ricci_h(a) } else { 0.0 };
        if !close(st.dth[a], want) {
            return Err(violation(if evolve_h {
                "d/dt h must equal -Ric(h)"
            } else {
                "h must be static"
            }));
        }
    }
    Ok(())
}

fn require_ric3(k: &DMatrix<f64>, declared: Option<f64>, side: &str) -> Result<()> {
    if let (Some(found), Some(declared)) = (coordinate_ric3(k), declared) {
        if found < declared - HYP_TOL * (1.0 + declared.abs()) {
            return Err(violation(format!("Ric3 of {side} below declared bound")));
        }
    }
    Ok(())
}

fn lead_weight(st: &PointState) -> f64 {
    let l1 = st.profile.lambda[0];
    2.0 * l1 * l1 / (1.0 + l1 * l1).powi(2)
}

/// `(2) + (3)` minus the lower bound under condition (C), with constant `constant_c(st, c0)`.
pub fn bound_c(st: &PointState, c0: f64) -> Result<f64> {
    require_ricci_flow(st, true)?;
    let (m, n) = (st.m(), st.n());
    require_condition(&check_c(&st.bounds_m, &st.bounds_n, m, n)?)?;
    require_ric3(&st.kg, st.bounds_m.ric3_min, "M")?;
    require_ric3(&st.kh, st.bounds_n.ric3_min, "N")?;
    let p = &st.profile;
    let sum: f64 = (2..ell(st))
        .map(|q| (st.kg[(0, q)] + st.kg[(1, q)] + st.kh[(0, q)] + st.kh[(1, q)]) * p.s_diag[q])
        .sum();
    let bound = -constant_c(st, c0) * p.theta_1221().abs() + lead_weight(st) * sum;
    Ok(term_2(st) + term_3(st) - bound)
}

/// `(2) + (3)` minus the lower bound under condition (D), with constant `constant_c(st, c0)`.
pub fn bound_d(st: &PointState, c0: f64) -> Result<f64> {
    require_ricci_flow(st, false)?;
    let (m, n) = (st.m(), st.n());
    require_condition(&check_d(&st.bounds_m, &st.bounds_n, m, n)?)?;
    require_ric3(&st.kg, st.bounds_m.ric3_min, "M")?;
    let p = &st.profile;
    let tau = st.bounds_n.tau;
    let sum: f64 = (2..ell(st))
        .map(|q| (st.kg[(0, q)] + st.kg[(1, q)]) * p.s_diag[q])
        .sum();
    let tau_term: f64 = (0..ell(st))
        .map(|a| {
            let l2 = p.lambda[a].powi(2);
            2.0 * tau * l2 / (1.0 + l2)
        })
        .sum();
    let bound = -constant_c(st, c0) * p.theta_1221().abs() + lead_weight(st) * (sum - tau_term);
    Ok(term_2(st) + term_3(st) - bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_state(m: usize, n: usize, lambda: &[f64]) -> PointState {
        PointState::new(
            SingularProfile::from_lambdas(m, n, lambda).unwrap(),
            DMatrix::zeros(m, m),
            DMatrix::zeros(n, n),
            vec![DMatrix::zeros(m, m); n],
            vec![0.0; m],
            vec![0.0; n],
            CurvatureBounds::zero(m),
            CurvatureBounds::zero(n),
        )
        .unwrap()
    }

    fn sphere_block(d: usize, c: f64) -> DMatrix<f64> {
        let mut k = DMatrix::from_element(d, d, c);
        k.fill_diagonal(0.0);
        k
    }

    fn sphere_state(m: usize, n: usize, lambda: &[f64], shrinking: bool) -> PointState {
        let (dtg, dth) = if shrinking {
            (vec![-(m as f64 - 1.0); m], vec![-(n as f64 - 1.0); n])
        } else {
            (vec![0.0; m], vec![0.0; n])
        };
        PointState::new(
            SingularProfile::from_lambdas(m, n, lambda).unwrap(),
            sphere_block(m, 1.0),
            sphere_block(n, 1.0),
            vec![DMatrix::zeros(m, m); n],
            dtg,
            dth,
            CurvatureBounds::constant(m, 1.0),
            CurvatureBounds::constant(n, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn flat_static_terms_vanish() {
        let st = flat_state(3, 3, &[0.7, 0.2]);
        for i in 0..3 {
            assert_eq!(terms_i_ii_iii(&st, i).unwrap(), (0.0, 0.0, 0.0));
            assert_eq!(term_ii_bruteforce(&st, i).unwrap(), 0.0);
        }
        assert!(matches!(
            terms_i_ii_iii(&st, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_eq!(bound_a(&st).unwrap(), 0.0);
        assert_eq!(bound_c(&st, DEFAULT_C0).unwrap(), 0.0);
    }

    #[test]
    fn term_i_vanishes_at_isometry() {
        let mut st = flat_state(2, 2, &[1.0, 1.0]);
        st.a[0][(0, 0)] = 1.0;
        assert_eq!(terms_i_ii_iii(&st, 0).unwrap().0, 0.0);
    }

    #[test]
    fn term_ii_vanishes_for_constant_map() {
        let st = sphere_state(3, 3, &[], false);
        for i in 0..3 {
            assert_eq!(terms_i_ii_iii(&st, i).unwrap().1, 0.0);
        }
    }

    #[test]
    fn term_ii_equal_spheres_isometry() {
        let st = sphere_state(2, 2, &[1.0, 1.0], false);
        let (_, ii, _) = terms_i_ii_iii(&st, 0).unwrap();
        assert!(ii.abs() < 1e-15);
        assert!(term_ii_bruteforce(&st, 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn positivity_gap_without_second_fundamental_form() {
        let st = flat_state(3, 2, &[0.8, 0.3]);
        assert_eq!(positivity_gap(&st, 0.5).unwrap(), 0.0);
        let st = flat_state(2, 2, &[2.0, 2.0]);
        assert!(matches!(
            positivity_gap(&st, 0.1),
            Err(Error::NonPositiveShift(_))
        ));
    }

    #[test]
    fn positivity_gap_fails_for_negative_alpha_off_rows() {
        // A supported in rows i ≥ 3 only: the gap is 2α(Θ+α)|A|², negative for α < 0
        let mut st = flat_state(3, 3, &[0.5, 0.5, 0.5]);
        st.a[0][(2, 2)] = 1.0;
        let alpha = -0.1;
        let theta = st.profile.theta_1221();
        let gap = positivity_gap(&st, alpha).unwrap();
        assert!((gap - 2.0 * alpha * (theta + alpha)).abs() < 1e-14);
        assert!(gap < 0.0);
    }

    #[test]
    fn bounds_on_equal_spheres_at_isometry() {
        let st = sphere_state(3, 3, &[1.0, 1.0, 1.0], false);
        assert!(bound_a(&st).unwrap().abs() < 1e-15);
        assert!(bound_b(&st).unwrap().abs() < 1e-15);
        let st = sphere_state(3, 3, &[1.0, 1.0, 1.0], true);
        assert!(bound_c(&st, DEFAULT_C0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn constant_map_bounds_are_zero() {
        let st = sphere_state(3, 4, &[], false);
        assert_eq!(bound_a(&st).unwrap(), 0.0);
        assert_eq!(bound_b(&st).unwrap(), 0.0);
    }

    #[test]
    fn hypothesis_violations_are_reported() {
        let mut st = sphere_state(3, 3, &[0.5, 0.2], false);
        st.dtg[0] = -1.0;
        assert!(matches!(bound_a(&st), Err(Error::HypothesisViolation(_))));
        let st = sphere_state(3, 3, &[0.5, 0.2], false);
        assert!(matches!(
            bound_c(&st, DEFAULT_C0),
            Err(Error::HypothesisViolation(_))
        ));
        let bad = PointState::new(
            SingularProfile::from_lambdas(2, 2, &[]).unwrap(),
            sphere_block(2, 3.0),
            sphere_block(2, 1.0),
            vec![DMatrix::zeros(2, 2); 2],
            vec![0.0; 2],
            vec![0.0; 2],
            CurvatureBounds::constant(2, 1.0),
            CurvatureBounds::constant(2, 1.0),
        );
        assert!(matches!(bad, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn oracle_constant_for_unit_three_spheres() {
        let st = sphere_state(3, 3, &[], true);
        assert_eq!(constant_c(&st, DEFAULT_C0), 288.0);
        let b = CurvatureBounds::constant(3, 1.0);
        assert_eq!(
            constant_c_from_bounds(DEFAULT_C0, &b, &b, 2.0, 2.0, 3, 3),
            288.0
        );
    }
}
