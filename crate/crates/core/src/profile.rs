//! Singular values of a differential between two metrics, the derived
//! `S`, `C`, `Θ` quantities, and the area/distance predicates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::SymBilinear;
use crate::error::{Error, Result};

/// Pullback eigenvalues in `[−CLIP_TOL, 0)` are rounded to zero.
pub const CLIP_TOL: f64 = 1e-12;

/// Ordered singular values `λ₁ ≥ … ≥ λ_m ≥ 0` of a map `M^m → N^n`, with
/// `λᵢ = 0` for `i > ℓ = min(m, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub m: usize,
    pub n: usize,
    pub lambda: Vec<f64>,
    /// `Sᵢᵢ = (1 − λᵢ²)/(1 + λᵢ²)`
    pub s_diag: Vec<f64>,
    /// `Cᵢᵢ = 2λᵢ/(1 + λᵢ²)`
    pub c_diag: Vec<f64>,
    /// `Sᵢᵢ + Sⱼⱼ` for `i < j`, in lexicographic pair order.
    pub theta_eigs: Vec<f64>,
}

/// `Sᵢᵢ + Sⱼⱼ` written as `2(1 − (λᵢλⱼ)²)/((1 + λᵢ²)(1 + λⱼ²))`, whose sign is
/// exactly that of `1 − λᵢλⱼ` in floating point.
fn theta_pair(li: f64, lj: f64) -> f64 {
    let p = li * lj;
    2.0 * (1.0 - p * p) / ((1.0 + li * li) * (1.0 + lj * lj))
}

impl SingularProfile {
    /// Builds a profile from singular values given in any order. Missing
    /// trailing values are zero; values past `ℓ` must be zero.
    pub fn from_lambdas(m: usize, n: usize, lambda: &[f64]) -> Result<Self> {
        if m < 2 {
            return Err(Error::DimensionTooSmall {
                what: "singular profile source",
                dim: m,
                min: 2,
            });
        }
        if n < 1 {
            return Err(Error::DimensionTooSmall {
                what: "singular profile target",
                dim: n,
                min: 1,
            });
        }
        if lambda.len() > m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: lambda.len(),
            });
        }
        if let Some(bad) = lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidSingularValues(format!(
                "{bad} is not a finite nonnegative number"
            )));
        }
        let mut lam = lambda.to_vec();
        lam.resize(m, 0.0);
        lam.sort_by(|a, b| b.total_cmp(a));
        let ell = m.min(n);
        if lam[ell..].iter().any(|&l| l != 0.0) {
            return Err(Error::InvalidSingularValues(format!(
                "more than min(m, n) = {ell} nonzero singular values"
            )));
        }
        let s_diag = lam.iter().map(|l| (1.0 - l * l) / (1.0 + l * l)).collect();
        let c_diag = lam.iter().map(|l| 2.0 * l / (1.0 + l * l)).collect();
        let mut theta_eigs = Vec::with_capacity(m * (m - 1) / 2);
        for i in 0..m {
            for j in i + 1..m {
                theta_eigs.push(theta_pair(lam[i], lam[j]));
            }
        }
        Ok(Self {
            m,
            n,
            lambda: lam,
            s_diag,
            c_diag,
            theta_eigs,
        })
    }

    pub fn ell(&self) -> usize {
        self.m.min(self.n)
    }

    /// `Θᵢⱼⱼᵢ = Sᵢᵢ + Sⱼⱼ` (zero-based indices, `i ≠ j`).
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        theta_pair(self.lambda[i], self.lambda[j])
    }

    /// `Θ₁₂₂₁`, the smallest eigenvalue of `Θ`.
    pub fn theta_1221(&self) -> f64 {
        self.theta(0, 1)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda[0]
    }

    /// `λ₁λ₂`, the largest two-dimensional area stretch.
    pub fn max_product(&self) -> f64 {
        self.lambda[0] * self.lambda[1]
    }

    /// `Sₐₐ` for a target index, extended by 1 past `m` (where `λₐ = 0`).
    pub fn s_target(&self, a: usize) -> f64 {
        self.s_diag.get(a).copied().unwrap_or(1.0)
    }

    pub fn lambda_target(&self, a: usize) -> f64 {
        self.lambda.get(a).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// all `λᵢ ≤ 1`
    pub distance_nonincreasing: bool,
    /// all `λᵢ < 1`
    pub distance_decreasing: bool,
    /// all `λᵢλⱼ ≤ 1` (i ≠ j)
    pub area_nonincreasing: bool,
    /// all `λᵢλⱼ < 1` (i ≠ j)
    pub area_decreasing: bool,
}

/// Area and distance predicates. By the ordering they only involve `λ₁` and `λ₁λ₂`.
pub fn classify(p: &SingularProfile) -> Classification {
    let l1 = p.lambda_max();
    let prod = p.max_product();
    Classification {
        distance_nonincreasing: l1 <= 1.0,
        distance_decreasing: l1 < 1.0,
        area_nonincreasing: prod <= 1.0,
        area_decreasing: prod < 1.0,
    }
}

/// Singular bases: `df uᵢ = λᵢ vᵢ` with `u` orthonormal for `g`, `v` for `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularDecomposition {
    pub profile: SingularProfile,
    /// `m × m`, columns `uᵢ`
    pub u: DMatrix<f64>,
    /// `n × n`, columns `vₐ`
    pub v: DMatrix<f64>,
}

/// Singular values of `df` (an `n × m` matrix: rows index the target) as
/// square roots of the eigenvalues of `f*h` with respect to `g`.
pub fn singular_profile(
    df: &DMatrix<f64>,
    g: &SymBilinear,
    h: &SymBilinear,
) -> Result<SingularProfile> {
    singular_decomposition(df, g, h).map(|d| d.profile)
}

pub fn singular_decomposition(
    df: &DMatrix<f64>,
    g: &SymBilinear,
    h: &SymBilinear,
) -> Result<SingularDecomposition> {
    let (m, n) = (g.dim(), h.dim());
    if df.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: df.nrows(),
        });
    }
    if df.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: df.ncols(),
        });
    }
    g.ensure_positive_definite()?;
    h.ensure_positive_definite()?;
    let chol = g
        .matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: g.eigenvalues()[0],
        })?;
    let l_inv = chol.l().try_inverse().ok_or(Error::NotPositiveDefinite {
        min_eigenvalue: 0.0,
    })?;
    let pull = df.transpose() * h.matrix() * df;
    let sym = &l_inv * pull * l_inv.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    // stable: ties keep eigen-solver order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let ell = m.min(n);
    let mut lambda = Vec::with_capacity(m);
    for (rank, &k) in order.iter().enumerate() {
        let ev = eig.eigenvalues[k];
        if ev < -CLIP_TOL * (1.0 + eig.eigenvalues.amax()) {
            return Err(Error::NegativePullback(ev));
        }
        lambda.push(if rank < ell { ev.max(0.0).sqrt() } else { 0.0 });
    }
    let y = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    let u = l_inv.transpose() * y;

    // vᵢ = df uᵢ / λᵢ where λᵢ is safely positive, then complete by Gram–Schmidt in h
    let hm = h.matrix();
    let ip = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(hm * b));
    let scale = lambda[0].max(1.0);
    let mut vs: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..ell {
        if lambda[i] > 1e-8 * scale {
            let mut w = df * u.column(i) / lambda[i];
            for prev in &vs {
                let c = ip(prev, &w);
                w -= prev * c;
            }
            let norm = ip(&w, &w).sqrt();
            vs.push(w / norm);
        } else {
            break;
        }
    }
    let mut candidate = 0;
    while vs.len() < n {
        let mut w = DVector::zeros(n);
        w[candidate % n] = 1.0;
        candidate += 1;
        for _ in 0..2 {
            for prev in &vs {
                let c = ip(prev, &w);
                w -= prev * c;
            }
        }
        let norm = ip(&w, &w).sqrt();
        if norm > 1e-6 {
            vs.push(w / norm);
        }
        if candidate > 4 * n {
            return Err(Error::InvalidSingularValues(
                "could not complete the target basis".into(),
            ));
        }
    }
    let v = DMatrix::from_columns(&vs);
    let profile = SingularProfile::from_lambdas(m, n, &lambda)?;
    Ok(SingularDecomposition { profile, u, v })
}

/// Orthonormal frame of `(M × N, g ⊕ h)` adapted to the graph:
/// `eᵢ = (uᵢ + λᵢvᵢ)/√(1+λᵢ²)` tangent, `νₐ = (−λₐuₐ + vₐ)/√(1+λₐ²)` normal.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFrame {
    pub m: usize,
    pub n: usize,
    pub e: Vec<DVector<f64>>,
    pub nu: Vec<DVector<f64>>,
}

impl GraphFrame {
    /// `Ẽ_α`: tangent vectors first, then normals.
    pub fn combined(&self, alpha: usize) -> &DVector<f64> {
        if alpha < self.m {
            &self.e[alpha]
        } else {
            &self.nu[alpha - self.m]
        }
    }

    /// `s = π*g − π*h` for Euclidean factor metrics.
    pub fn s_form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let m = self.m;
        let top = x.rows(0, m).dot(&y.rows(0, m));
        let bottom = x.rows(m, self.n).dot(&y.rows(m, self.n));
        top - bottom
    }

    /// Largest deviation of the Gram matrix of `e ∪ ν` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let all: Vec<&DVector<f64>> = self.e.iter().chain(self.nu.iter()).collect();
        let mut worst = 0.0_f64;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }
}

fn orthonormal_defect(b: &DMatrix<f64>) -> f64 {
    (b.transpose() * b - DMatrix::identity(b.ncols(), b.ncols())).amax()
}

/// Graph frame from Euclidean-orthonormal singular bases (`u` is `m × m`, `v` is `n × n`).
pub fn graph_frame(p: &SingularProfile, u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<GraphFrame> {
    let (m, n) = (p.m, p.n);
    if u.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: u.nrows(),
        });
    }
    if v.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.nrows(),
        });
    }
    let defect = orthonormal_defect(u).max(orthonormal_defect(v));
    if defect > 1e-10 {
        return Err(Error::NonOrthonormalFrame { defect });
    }
    let stack = |top: DVector<f64>, bottom: DVector<f64>| {
        let mut out = DVector::zeros(m + n);
        out.rows_mut(0, m).copy_from(&top);
        out.rows_mut(m, n).copy_from(&bottom);
        out
    };
    let e = (0..m)
        .map(|i| {
            let l = p.lambda[i];
            let norm = (1.0 + l * l).sqrt();
            let vi = if i < n {
                v.column(i) * l
            } else {
                DVector::zeros(n)
            };
            stack(u.column(i).into_owned(), vi) / norm
        })
        .collect();
    let nu = (0..n)
        .map(|a| {
            let l = p.lambda_target(a);
            let norm = (1.0 + l * l).sqrt();
            let ua = if a < m {
                u.column(a) * (-l)
            } else {
                DVector::zeros(m)
            };
            stack(ua, v.column(a).into_owned()) / norm
        })
        .collect();
    Ok(GraphFrame { m, n, e, nu })
}

/// `𝔪 = min over sample points of Θ₁₂₂₁`.
pub fn m_monitor<'a, I>(profiles: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a SingularProfile>,
{
    profiles
        .into_iter()
        .map(SingularProfile::theta_1221)
        .reduce(f64::min)
        .ok_or(Error::EmptyInput("profile samples"))
}

/// Profile of the Hopf submersion `S^{2n+1} → CPⁿ` (sectional range `[1, 4]`):
/// an isometry on the horizontal space and zero on the fibre.
pub fn hopf_profile(n: usize) -> Result<SingularProfile> {
    if n < 1 {
        return Err(Error::OutOfRange("Hopf fibration needs n >= 1".into()));
    }
    SingularProfile::from_lambdas(2 * n + 1, 2 * n, &vec![1.0; 2 * n])
}
