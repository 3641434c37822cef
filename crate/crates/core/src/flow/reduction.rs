//! Cross-check of the equivariant reduction against the unreduced DeTurck
//! operator, evaluated by finite differences in normal coordinates of `S^m`.

use nalgebra::{DMatrix, DVector};

use super::equivariant::EquivariantFlowState;

/// Fraction of `[0, π]` kept away from each pole when sampling test nodes.
const POLE_MARGIN: f64 = 0.15;

/// Number of interior nodes probed.
const PROBES: usize = 9;

/// Cubic Lagrange interpolation of grid data on `[0, π]`.
fn interpolate(rho: &[f64], h: f64, theta: f64) -> f64 {
    let last = rho.len() - 1;
    let j = ((theta / h).floor() as usize).clamp(1, last - 2);
    let nodes = [j - 1, j, j + 1, j + 2];
    let mut out = 0.0;
    for &a in &nodes {
        let mut w = 1.0;
        for &b in &nodes {
            if a != b {
                w *= (theta - b as f64 * h) / ((a as f64 - b as f64) * h);
            }
        }
        out += w * rho[a];
    }
    out
}

/// `ρ_t` of the full DeTurck operator at `(θ, ω = e₁)`.
///
/// The map is `x = (cos θ, sin θ ω) ↦ u = (cos ρ, sin ρ ω, 0, …)` between unit
/// spheres, sampled through `exp_p` so the domain Christoffel symbols vanish
/// at the centre; the target Hessian is the tangential part of `∂²u`.
pub fn unreduced_velocity<F>(
    rho: F,
    theta: f64,
    m: usize,
    n: usize,
    r_m: f64,
    r_n: f64,
    h: f64,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let (st, ct) = theta.sin_cos();
    let mut p = DVector::zeros(m + 1);
    p[0] = ct;
    p[1] = st;
    let mut tangents = Vec::with_capacity(m);
    let mut t1 = DVector::zeros(m + 1);
    t1[0] = -st;
    t1[1] = ct;
    tangents.push(t1);
    for j in 2..=m {
        let mut tj = DVector::zeros(m + 1);
        tj[j] = 1.0;
        tangents.push(tj);
    }
    let eval = |y: &[f64]| -> DVector<f64> {
        let mut v = DVector::zeros(m + 1);
        for (yi, ti) in y.iter().zip(&tangents) {
            v += ti * *yi;
        }
        let r = v.norm();
        let x = if r == 0.0 {
            p.clone()
        } else {
            &p * r.cos() + &v * (r.sin() / r)
        };
        let th = x[0].clamp(-1.0, 1.0).acos();
        let w = x.rows(1, m).into_owned();
        let w = &w / w.norm();
        let (sr, cr) = rho(th).sin_cos();
        let mut u = DVector::zeros(n + 1);
        u[0] = cr;
        for i in 0..m {
            u[1 + i] = sr * w[i];
        }
        u
    };
    let offset = |pairs: &[(usize, f64)]| {
        let mut y = vec![0.0; m];
        for &(i, s) in pairs {
            y[i] += s * h;
        }
        eval(&y)
    };
    let u0 = eval(&vec![0.0; m]);
    let mut first = Vec::with_capacity(m);
    let mut second = vec![vec![DVector::zeros(n + 1); m]; m];
    for i in 0..m {
        let (up, um) = (offset(&[(i, 1.0)]), offset(&[(i, -1.0)]));
        first.push((&up - &um) / (2.0 * h));
        second[i][i] = (&up - &u0 * 2.0 + &um) / (h * h);
        for j in i + 1..m {
            let d = (offset(&[(i, 1.0), (j, 1.0)])
                - offset(&[(i, 1.0), (j, -1.0)])
                - offset(&[(i, -1.0), (j, 1.0)])
                + offset(&[(i, -1.0), (j, -1.0)]))
                / (4.0 * h * h);
            second[i][j] = d.clone();
            second[j][i] = d;
        }
    }
    let eta = DMatrix::from_fn(m, m, |i, j| {
        let g = if i == j { r_m * r_m } else { 0.0 };
        g + r_n * r_n * first[i].dot(&first[j])
    });
    let inv = eta
        .try_inverse()
        .expect("induced metric is positive definite");
    let mut vel = DVector::zeros(n + 1);
    for i in 0..m {
        for j in 0..m {
            let w = &second[i][j];
            vel += (w - &u0 * w.dot(&u0)) * inv[(i, j)];
        }
    }
    let (sr, cr) = rho(theta).sin_cos();
    let mut e_rho = DVector::zeros(n + 1);
    e_rho[0] = -sr;
    e_rho[1] = cr;
    vel.dot(&e_rho)
}

/// Largest gap between the reduced right-hand side and the projected
/// unreduced operator over interior probe nodes. `O(h²)`.
pub fn reduction_oracle(st: &EquivariantFlowState) -> f64 {
    let h = st.spacing();
    let points = st.points();
    let lo = (POLE_MARGIN * (points - 1) as f64).ceil() as usize;
    let hi = points - 1 - lo;
    let reduced = st.rhs();
    let rho = |t: f64| interpolate(&st.rho, h, t);
    let span = hi - lo;
    (0..PROBES)
        .map(|q| lo + q * span / (PROBES - 1))
        .map(|k| {
            let full = unreduced_velocity(rho, st.theta(k), st.m, st.n, st.r_m, st.r_n, h);
            (full - reduced[k]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_equal_spheres() {
        let st = EquivariantFlowState::from_fn(3, 3, 257, 1.0, 1.0, |t| t).unwrap();
        assert!(reduction_oracle(&st) <= 1e-8);
    }

    #[test]
    fn sine_data_converges_at_second_order() {
        let res = |pts| {
            let st = EquivariantFlowState::from_fn(3, 4, pts, 1.0, 1.3, |t| 0.5 * t.sin()).unwrap();
            reduction_oracle(&st)
        };
        let (a, b) = (res(129), res(257));
        let slope = (a / b).log2();
        assert!((slope - 2.0).abs() < 0.3, "{a} {b} {slope}");
    }

    #[test]
    fn interpolation_is_exact_on_cubics() {
        let h = 0.1;
        let data: Vec<f64> = (0..20)
            .map(|k| (k as f64 * h).powi(3) - k as f64 * h)
            .collect();
        let t = 0.73;
        assert!((interpolate(&data, h, t) - (t * t * t - t)).abs() < 1e-13);
    }
}
