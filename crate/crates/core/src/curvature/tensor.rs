use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating the algebraic symmetries of a curvature tensor.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric bilinear form in a fixed frame (a metric, the tensor `s`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymBilinear {
    mat: DMatrix<f64>,
}

impl SymBilinear {
    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self {
            mat: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    /// Wraps a square matrix, rejecting it if it is not symmetric to 1e-12 (relative).
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let scale = mat.amax().max(1.0);
        let asymmetry = (&mat - mat.transpose()).amax();
        if asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(Self { mat: sym })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.mat * y))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Errors unless every eigenvalue is strictly positive.
    pub fn ensure_positive_definite(&self) -> Result<()> {
        let min_eigenvalue = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min_eigenvalue > 0.0 {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite { min_eigenvalue })
        }
    }

    /// Columns form a basis that is orthonormal for this (positive definite) form.
    pub fn orthonormal_basis(&self) -> Result<DMatrix<f64>> {
        self.ensure_positive_definite()?;
        let eig = self.mat.clone().symmetric_eigen();
        let mut basis = eig.eigenvectors.clone();
        for (k, mut col) in basis.column_iter_mut().enumerate() {
            col /= eig.eigenvalues[k].sqrt();
        }
        Ok(basis)
    }
}

/// Frame components `R[i][j][k][l]` of an algebraic curvature tensor.
///
/// Sign convention: `R(e_i, e_j, e_j, e_i)` is the sectional curvature of the
/// plane spanned by the orthonormal pair `e_i, e_j` (positive on spheres).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTensor {
    dim: usize,
    comp: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            comp: vec![0.0; dim.pow(4)],
        }
    }

    /// Builds a tensor from raw components, validating the curvature symmetries.
    pub fn from_components(dim: usize, comp: Vec<f64>) -> Result<Self> {
        if comp.len() != dim.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: dim.pow(4),
                found: comp.len(),
            });
        }
        let t = Self { dim, comp };
        let defect = t.symmetry_defect();
        let scale = t.comp.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
        if defect > SYMMETRY_TOL * scale {
            return Err(Error::HypothesisViolation(format!(
                "curvature symmetries fail by {defect:e}"
            )));
        }
        Ok(t)
    }

    /// Tensor whose only nonzero components are `R[i][j][j][i] = K[i][j]`
    /// (and the entries forced by symmetry). Any symmetric `K` with zero
    /// diagonal yields a valid algebraic curvature tensor this way.
    pub fn from_sectional_matrix(k: &DMatrix<f64>) -> Self {
        let dim = k.nrows();
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let v = 0.5 * (k[(i, j)] + k[(j, i)]);
                t.set(i, j, j, i, v);
                t.set(i, j, i, j, -v);
            }
        }
        t
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comp[self.idx(i, j, k, l)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.idx(i, j, k, l);
        self.comp[at] = v;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.comp
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            comp: self.comp.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            comp: self
                .comp
                .iter()
                .zip(&other.comp)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest violation of antisymmetry, pair symmetry and the first Bianchi identity.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Multilinear evaluation `R(x, y, z, w)`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let d = self.dim;
        let mut total = 0.0;
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            let mut si = 0.0;
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                let mut sj = 0.0;
                for k in 0..d {
                    if z[k] == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    let row = &self.comp[base..base + d];
                    let sk: f64 = row.iter().zip(w).map(|(r, wl)| r * wl).sum();
                    sj += z[k] * sk;
                }
                si += y[j] * sj;
            }
            total += x[i] * si;
        }
        total
    }

    /// Gradient of `R(x, y, z, w)` with respect to the argument in `slot`
    /// (the vector `v` with `<v, a> = R(..., a, ...)`).
    pub fn slot_gradient(&self, slot: usize, args: [&[f64]; 4]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r = self.get(i, j, k, l);
                        if r == 0.0 {
                            continue;
                        }
                        let idx = [i, j, k, l];
                        let mut prod = r;
                        for (s, arg) in args.iter().enumerate() {
                            if s != slot {
                                prod *= arg[idx[s]];
                            }
                        }
                        out[idx[slot]] += prod;
                    }
                }
            }
        }
        out
    }

    /// Sectional curvature `R[i][j][j][i]` of a coordinate plane.
    pub fn sectional(&self, i: usize, j: usize) -> Result<f64> {
        sectional(self, i, j)
    }

    /// Ricci form `Ric_ij = sum_k R(e_i, e_k, e_k, e_j)`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, j| (0..d).map(|k| self.get(i, k, k, j)).sum())
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().trace()
    }

    /// Components with respect to the basis given by the columns of `basis`.
    pub fn in_basis(&self, basis: &DMatrix<f64>) -> Self {
        let d = self.dim;
        assert_eq!(basis.nrows(), d);
        let e = basis.ncols();
        // contract one slot at a time: cost O(d^4 e) per slot
        let mut cur = self.comp.clone();
        let mut shape = [d, d, d, d];
        for slot in 0..4 {
            let mut new_shape = shape;
            new_shape[slot] = e;
            let mut next = vec![0.0; new_shape.iter().product()];
            for a in 0..new_shape[0] {
                for b in 0..new_shape[1] {
                    for c in 0..new_shape[2] {
                        for w in 0..new_shape[3] {
                            let out_idx = [a, b, c, w];
                            let mut acc = 0.0;
                            for p in 0..d {
                                let mut src = out_idx;
                                src[slot] = p;
                                let flat = ((src[0] * shape[1] + src[1]) * shape[2] + src[2])
                                    * shape[3]
                                    + src[3];
                                acc += basis[(p, out_idx[slot])] * cur[flat];
                            }
                            let flat_out =
                                ((a * new_shape[1] + b) * new_shape[2] + c) * new_shape[3] + w;
                            next[flat_out] = acc;
                        }
                    }
                }
            }
            cur = next;
            shape = new_shape;
        }
        Self { dim: e, comp: cur }
    }
}

/// `(S ⧆ T)(X,Y,Z,W) = S(X,W)T(Y,Z) + S(Y,Z)T(X,W) - S(X,Z)T(Y,W) - S(Y,W)T(X,Z)`.
pub fn kulkarni_nomizu(s: &SymBilinear, t: &SymBilinear) -> Result<CurvatureTensor> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: t.dim(),
        });
    }
    let d = s.dim();
    let (s, t) = (s.matrix(), t.matrix());
    let mut r = CurvatureTensor::zeros(d);
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let v = s[(x, w)] * t[(y, z)] + s[(y, z)] * t[(x, w)]
                        - s[(x, z)] * t[(y, w)]
                        - s[(y, w)] * t[(x, z)];
                    r.set(x, y, z, w, v);
                }
            }
        }
    }
    Ok(r)
}

/// Constant curvature `c` model: `c · ½ (g ⧆ g)`.
pub fn constant_curvature(g: &SymBilinear, c: f64) -> CurvatureTensor {
    kulkarni_nomizu(g, g)
        .expect("same dimension")
        .scaled(0.5 * c)
}

pub fn sectional(r: &CurvatureTensor, i: usize, j: usize) -> Result<f64> {
    let d = r.dim();
    for idx in [i, j] {
        if idx >= d {
            return Err(Error::IndexOutOfRange { index: idx, dim: d });
        }
    }
    if i == j {
        return Err(Error::DegeneratePlane(i));
    }
    Ok(r.get(i, j, j, i))
}

/// Curvature of the product metric `g ⊕ h`: `Rg` on the first block,
/// `Rh` on the second, every mixed component zero.
pub fn product_curvature(rg: &CurvatureTensor, rh: &CurvatureTensor) -> CurvatureTensor {
    let (m, n) = (rg.dim(), rh.dim());
    let mut out = CurvatureTensor::zeros(m + n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    out.set(i, j, k, l, rg.get(i, j, k, l));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    out.set(m + a, m + b, m + c, m + e, rh.get(a, b, c, e));
                }
            }
        }
    }
    out
}
