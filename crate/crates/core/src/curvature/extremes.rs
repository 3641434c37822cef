//! Extremes of curvature quantities over orthonormal frames.
//!
//! Every quantity here is an infimum or supremum over frames. We estimate it
//! with a multi-start Riemannian gradient descent on the Stiefel manifold of
//! orthonormal k-frames. Starts are QR factors of Gaussian matrices drawn from
//! per-start seeded streams, and the reduction picks the smallest value (ties
//! broken by start index), so results are deterministic for a fixed seed.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::tensor::{CurvatureTensor, SymBilinear};
use crate::error::{Error, Result};
use crate::par_map;

/// Orthonormality tolerance for frames passed in by callers.
pub const FRAME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSearch {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the Riemannian gradient norm falls below this.
    pub grad_tol: f64,
}

impl Default for FrameSearch {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0x5eed,
            max_iter: 2000,
            grad_tol: 1e-9,
        }
    }
}

/// Outcome of a frame minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub frame: DMatrix<f64>,
    /// Optimal μ for PIC1 searches, zero otherwise.
    pub mu: f64,
    pub grad_norm: f64,
    pub start: usize,
}

/// Linear objective `Σ coef · R(E_a, E_b, E_c, E_d)` over the columns of a frame.
#[derive(Debug, Clone)]
struct Linear {
    k: usize,
    terms: Vec<(f64, [usize; 4])>,
}

impl Linear {
    fn value(&self, r: &CurvatureTensor, cols: &[Vec<f64>]) -> f64 {
        self.terms
            .iter()
            .map(|(c, [a, b, x, y])| c * r.eval(&cols[*a], &cols[*b], &cols[*x], &cols[*y]))
            .sum()
    }

    fn gradient(&self, r: &CurvatureTensor, cols: &[Vec<f64>]) -> DMatrix<f64> {
        let d = r.dim();
        let mut g = DMatrix::zeros(d, self.k);
        for (c, idx) in &self.terms {
            let args = [
                cols[idx[0]].as_slice(),
                cols[idx[1]].as_slice(),
                cols[idx[2]].as_slice(),
                cols[idx[3]].as_slice(),
            ];
            for (slot, &col) in idx.iter().enumerate() {
                let sg = r.slot_gradient(slot, args);
                for p in 0..d {
                    g[(p, col)] += c * sg[p];
                }
            }
        }
        g
    }
}

fn columns(e: &DMatrix<f64>) -> Vec<Vec<f64>> {
    e.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

/// Q factor with a positive-diagonal R, so the retraction is well defined.
fn qr_retract(a: DMatrix<f64>) -> DMatrix<f64> {
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn random_frame(d: usize, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, k, |_, _| StandardNormal.sample(rng));
    qr_retract(a)
}

fn stiefel_project(e: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let etg = e.transpose() * g;
    let sym = (&etg + etg.transpose()) * 0.5;
    g - e * sym
}

/// Objective evaluated at a frame: value plus the Euclidean gradient and any
/// auxiliary scalar (μ for PIC1).
trait FrameObjective: Sync {
    fn k(&self) -> usize;
    fn eval(&self, r: &CurvatureTensor, e: &DMatrix<f64>) -> (f64, f64);
    fn grad(&self, r: &CurvatureTensor, e: &DMatrix<f64>, aux: f64) -> DMatrix<f64>;
}

impl FrameObjective for Linear {
    fn k(&self) -> usize {
        self.k
    }
    fn eval(&self, r: &CurvatureTensor, e: &DMatrix<f64>) -> (f64, f64) {
        (self.value(r, &columns(e)), 0.0)
    }
    fn grad(&self, r: &CurvatureTensor, e: &DMatrix<f64>, _aux: f64) -> DMatrix<f64> {
        self.gradient(r, &columns(e))
    }
}

/// `min_μ pic1_defect(R, E, μ) / pic1_defect(½g⧆g, E, μ)` with the closed-form μ.
struct Pic1Ratio;

impl Pic1Ratio {
    fn linear(mu: f64) -> Linear {
        let w = 1.0 / (2.0 * (1.0 + mu * mu));
        Linear {
            k: 4,
            terms: vec![
                (w, [0, 2, 2, 0]),
                (w * mu * mu, [0, 3, 3, 0]),
                (w, [1, 2, 2, 1]),
                (w * mu * mu, [1, 3, 3, 1]),
                (-2.0 * w * mu, [0, 1, 2, 3]),
            ],
        }
    }
}

/// Minimizes `(a + bμ² − 2cμ) / (2(1 + μ²))` over μ ∈ [0, 1].
pub fn optimal_mu(a: f64, b: f64, c: f64) -> (f64, f64) {
    let ratio = |mu: f64| (a + b * mu * mu - 2.0 * c * mu) / (2.0 * (1.0 + mu * mu));
    let mut cands = vec![0.0, 1.0];
    // stationary points solve cμ² + (b − a)μ − c = 0
    if c.abs() > 1e-300 {
        let disc = (b - a).powi(2) + 4.0 * c * c;
        let sq = disc.sqrt();
        for root in [(-(b - a) + sq) / (2.0 * c), (-(b - a) - sq) / (2.0 * c)] {
            if (0.0..=1.0).contains(&root) {
                cands.push(root);
            }
        }
    }
    cands
        .into_iter()
        .map(|mu| (ratio(mu), mu))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(v, mu)| (mu, v))
        .expect("nonempty candidates")
}

impl FrameObjective for Pic1Ratio {
    fn k(&self) -> usize {
        4
    }
    fn eval(&self, r: &CurvatureTensor, e: &DMatrix<f64>) -> (f64, f64) {
        let cols = columns(e);
        let a = r.eval(&cols[0], &cols[2], &cols[2], &cols[0])
            + r.eval(&cols[1], &cols[2], &cols[2], &cols[1]);
        let b = r.eval(&cols[0], &cols[3], &cols[3], &cols[0])
            + r.eval(&cols[1], &cols[3], &cols[3], &cols[1]);
        let c = r.eval(&cols[0], &cols[1], &cols[2], &cols[3]);
        let (mu, v) = optimal_mu(a, b, c);
        (v, mu)
    }
    fn grad(&self, r: &CurvatureTensor, e: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
        // envelope: the μ-derivative vanishes at the optimum (or μ sits on a boundary)
        Self::linear(mu).gradient(r, &columns(e))
    }
}

fn descend<O: FrameObjective>(
    obj: &O,
    r: &CurvatureTensor,
    mut e: DMatrix<f64>,
    search: &FrameSearch,
) -> (f64, f64, f64, DMatrix<f64>) {
    let (mut f, mut aux) = obj.eval(r, &e);
    let mut step: f64 = 0.5;
    let mut gnorm = f64::INFINITY;
    for _ in 0..search.max_iter {
        let grad = stiefel_project(&e, &obj.grad(r, &e, aux));
        gnorm = grad.norm();
        if gnorm < search.grad_tol {
            break;
        }
        let mut accepted = false;
        step = (step * 2.0).min(10.0);
        while step > 1e-14 {
            let cand = qr_retract(&e - &grad * step);
            let (fc, ac) = obj.eval(r, &cand);
            if fc <= f - 1e-4 * step * gnorm * gnorm {
                e = cand;
                f = fc;
                aux = ac;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f, aux, gnorm, e)
}

fn minimize<O: FrameObjective>(
    obj: &O,
    r: &CurvatureTensor,
    search: &FrameSearch,
) -> Result<Extremum> {
    let d = r.dim();
    let k = obj.k();
    if d < k {
        return Err(Error::DimensionTooSmall {
            what: "frame search",
            dim: d,
            min: k,
        });
    }
    if search.starts == 0 {
        return Err(Error::EmptyInput("frame search starts"));
    }
    let runs = par_map(search.starts, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
        rng.set_stream(s as u64);
        let e0 = random_frame(d, k, &mut rng);
        descend(obj, r, e0, search)
    });
    let (start, (value, mu, grad_norm, frame)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
        .expect("at least one start");
    Ok(Extremum {
        value,
        frame,
        mu,
        grad_norm,
        start,
    })
}

/// Tensor in a `g`-orthonormal basis, so frame searches can stay Euclidean.
fn normalized(r: &CurvatureTensor, g: &SymBilinear) -> Result<CurvatureTensor> {
    if g.dim() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: g.dim(),
        });
    }
    if *g.matrix() == DMatrix::identity(r.dim(), r.dim()) {
        return Ok(r.clone());
    }
    Ok(r.in_basis(&g.orthonormal_basis()?))
}

fn check_frame(frame: &DMatrix<f64>, d: usize, k: usize) -> Result<()> {
    if frame.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: frame.nrows(),
        });
    }
    if frame.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: frame.ncols(),
        });
    }
    let defect = (frame.transpose() * frame - DMatrix::identity(k, k)).amax();
    if defect > FRAME_TOL {
        return Err(Error::NonOrthonormalFrame { defect });
    }
    Ok(())
}

/// `R₁₃₃₁ + μ²R₁₄₄₁ + R₂₃₃₂ + μ²R₂₄₄₂ − 2μR₁₂₃₄` in the frame given by the
/// four columns of `frame4`.
pub fn pic1_defect(r: &CurvatureTensor, frame4: &DMatrix<f64>, mu: f64) -> Result<f64> {
    if r.dim() < 4 {
        return Err(Error::DimensionTooSmall {
            what: "PIC1 defect",
            dim: r.dim(),
            min: 4,
        });
    }
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::OutOfRange(format!("mu = {mu} not in [0, 1]")));
    }
    check_frame(frame4, r.dim(), 4)?;
    let scale = 2.0 * (1.0 + mu * mu);
    Ok(scale * Pic1Ratio::linear(mu).value(r, &columns(frame4)))
}

/// Largest `s` with `R − s·½(g⧆g)` weakly PIC1.
///
/// Since the PIC1 defect of `½(g⧆g)` is `2(1 + μ²)` in every frame, `s` is the
/// minimum over frames and μ of the ratio of the two defects, which we minimize
/// directly rather than bisecting on `s`. Dimension 3 is refused: there the
/// condition reduces to Ricci positivity and callers use the Ricci minimum.
pub fn chi_ic1(r: &CurvatureTensor, g: &SymBilinear) -> Result<f64> {
    chi_ic1_with(r, g, &FrameSearch::default()).map(|e| e.value)
}

pub fn chi_ic1_with(
    r: &CurvatureTensor,
    g: &SymBilinear,
    search: &FrameSearch,
) -> Result<Extremum> {
    if r.dim() < 4 {
        return Err(Error::DimensionTooSmall {
            what: "chi_IC1",
            dim: r.dim(),
            min: 4,
        });
    }
    let rn = normalized(r, g)?;
    if rn.components().iter().all(|&v| v == 0.0) {
        return Ok(Extremum {
            value: 0.0,
            frame: DMatrix::identity(r.dim(), 4),
            mu: 0.0,
            grad_norm: 0.0,
            start: 0,
        });
    }
    let best = minimize(&Pic1Ratio, &rn, search)?;
    let scale = rn.components().iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    if best.grad_norm > 1e-6 * scale {
        return Err(Error::NotConverged { best: best.value });
    }
    Ok(best)
}

fn sectional_objective(sign: f64) -> Linear {
    Linear {
        k: 2,
        terms: vec![(sign, [0, 1, 1, 0])],
    }
}

/// Minimum and maximum sectional curvature over 2-planes.
pub fn sectional_range(r: &CurvatureTensor, search: &FrameSearch) -> Result<(f64, f64)> {
    let lo = minimize(&sectional_objective(1.0), r, search)?.value;
    let hi = -minimize(&sectional_objective(-1.0), r, search)?.value;
    Ok((lo, hi))
}

/// Minimum over orthonormal triples `{u, v, w}` of `K(u,v) + K(u,w)`.
pub fn ric3_min(r: &CurvatureTensor) -> Result<f64> {
    ric3_min_with(r, &FrameSearch::default())
}

pub fn ric3_min_with(r: &CurvatureTensor, search: &FrameSearch) -> Result<f64> {
    if r.dim() < 3 {
        return Err(Error::DimensionTooSmall {
            what: "Ric3",
            dim: r.dim(),
            min: 3,
        });
    }
    let obj = Linear {
        k: 3,
        terms: vec![(1.0, [0, 1, 1, 0]), (1.0, [0, 2, 2, 0])],
    };
    Ok(minimize(&obj, r, search)?.value)
}

/// Pointwise curvature bounds. `ric3_min` needs dimension ≥ 3, `chi_ic1` ≥ 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    pub kappa: f64,
    pub tau: f64,
    pub ric_min: f64,
    pub ric_max: f64,
    pub scal_min: f64,
    pub scal_max: f64,
    pub ric3_min: Option<f64>,
    pub chi_ic1: Option<f64>,
}

impl CurvatureBounds {
    pub fn zero(dim: usize) -> Self {
        Self {
            kappa: 0.0,
            tau: 0.0,
            ric_min: 0.0,
            ric_max: 0.0,
            scal_min: 0.0,
            scal_max: 0.0,
            ric3_min: (dim >= 3).then_some(0.0),
            chi_ic1: (dim >= 4).then_some(0.0),
        }
    }

    /// Exact bounds of the constant curvature `c` model in dimension `dim`.
    pub fn constant(dim: usize, c: f64) -> Self {
        let d = dim as f64;
        Self {
            kappa: c,
            tau: c,
            ric_min: (d - 1.0) * c,
            ric_max: (d - 1.0) * c,
            scal_min: d * (d - 1.0) * c,
            scal_max: d * (d - 1.0) * c,
            ric3_min: (dim >= 3).then_some(2.0 * c),
            chi_ic1: (dim >= 4).then_some(c),
        }
    }

    /// Checks the ordering invariants, with `tol` slack for optimized values.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let bad = |what: &str| Err(Error::HypothesisViolation(format!("bounds: {what}")));
        if self.kappa > self.tau + tol {
            return bad("kappa > tau");
        }
        if self.ric_min > self.ric_max + tol {
            return bad("ric_min > ric_max");
        }
        if self.scal_min > self.scal_max + tol {
            return bad("scal_min > scal_max");
        }
        if let Some(r3) = self.ric3_min {
            if r3 < 2.0 * self.kappa - tol {
                return bad("ric3_min < 2 kappa");
            }
        }
        Ok(())
    }

    /// Scales every bound by `factor` (curvature of the metric `g / factor`).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            kappa: self.kappa * factor,
            tau: self.tau * factor,
            ric_min: self.ric_min * factor,
            ric_max: self.ric_max * factor,
            scal_min: self.scal_min * factor,
            scal_max: self.scal_max * factor,
            ric3_min: self.ric3_min.map(|v| v * factor),
            chi_ic1: self.chi_ic1.map(|v| v * factor),
        }
    }
}

/// Aggregates sectional, Ricci, scalar, Ric₃ and χ_IC1 extremes of `R` with
/// respect to the metric `g`.
pub fn bounds_of(r: &CurvatureTensor, g: &SymBilinear) -> Result<CurvatureBounds> {
    bounds_of_with(r, g, &FrameSearch::default())
}

pub fn bounds_of_with(
    r: &CurvatureTensor,
    g: &SymBilinear,
    search: &FrameSearch,
) -> Result<CurvatureBounds> {
    let rn = normalized(r, g)?;
    let d = rn.dim();
    if rn.components().iter().all(|&v| v == 0.0) {
        return Ok(CurvatureBounds::zero(d));
    }
    let (kappa, tau) = sectional_range(&rn, search)?;
    let ric = SymBilinear::from_matrix(rn.ricci())?;
    let ev = ric.eigenvalues();
    let scal = rn.scalar();
    Ok(CurvatureBounds {
        kappa,
        tau,
        ric_min: ev[0],
        ric_max: ev[d - 1],
        scal_min: scal,
        scal_max: scal,
        ric3_min: if d >= 3 {
            Some(ric3_min_with(&rn, search)?)
        } else {
            None
        },
        chi_ic1: if d >= 4 {
            Some(chi_ic1_with(&rn, &SymBilinear::identity(d), search)?.value)
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::tensor::constant_curvature;
    use proptest::prelude::*;

    fn coord_frame(d: usize) -> DMatrix<f64> {
        DMatrix::identity(d, 4)
    }

    #[test]
    fn pic1_defect_of_constant_curvature() {
        let r = constant_curvature(&SymBilinear::identity(5), 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let frame = random_frame(5, 4, &mut rng);
        for mu in [0.0, 0.3, 1.0] {
            let v = pic1_defect(&r, &frame, mu).unwrap();
            assert!((v - 2.0 * 0.7 * (1.0 + mu * mu)).abs() < 1e-12);
        }
        assert_eq!(
            pic1_defect(&CurvatureTensor::zeros(4), &coord_frame(4), 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn pic1_defect_at_mu_zero() {
        let k = DMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                0.0
            } else {
                (i + 2 * j + 2 * i * j) as f64
            }
        });
        let k = (&k + k.transpose()) * 0.5;
        let r = CurvatureTensor::from_sectional_matrix(&k);
        let v = pic1_defect(&r, &coord_frame(4), 0.0).unwrap();
        assert_eq!(v, k[(0, 2)] + k[(1, 2)]);
    }

    #[test]
    fn pic1_defect_errors() {
        let r3 = CurvatureTensor::zeros(3);
        assert!(matches!(
            pic1_defect(&r3, &DMatrix::identity(3, 4), 0.0),
            Err(Error::DimensionTooSmall { .. })
        ));
        let r = CurvatureTensor::zeros(4);
        let mut f = coord_frame(4);
        f[(0, 1)] = 0.1;
        assert!(matches!(
            pic1_defect(&r, &f, 0.0),
            Err(Error::NonOrthonormalFrame { .. })
        ));
    }

    #[test]
    fn chi_ic1_of_models() {
        let g = SymBilinear::identity(4);
        let sphere = constant_curvature(&g, 1.0);
        assert!((chi_ic1(&sphere, &g).unwrap() - 1.0).abs() < 1e-3);
        assert_eq!(chi_ic1(&CurvatureTensor::zeros(4), &g).unwrap(), 0.0);
        assert!(matches!(
            chi_ic1(&CurvatureTensor::zeros(3), &SymBilinear::identity(3)),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn chi_ic1_respects_metric() {
        // constant curvature 1 for g = 4·I is c·½(g⧆g), whose g-normalized value is 1
        let g = SymBilinear::diagonal(&[4.0; 4]);
        let r = constant_curvature(&g, 1.0);
        assert!((chi_ic1(&r, &g).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ric3_of_constant_curvature() {
        for c in [1.0, 0.0, -0.5] {
            let r = constant_curvature(&SymBilinear::identity(4), c);
            assert!((ric3_min(&r).unwrap() - 2.0 * c).abs() < 1e-9);
        }
    }

    #[test]
    fn bounds_of_sphere_and_torus() {
        let g = SymBilinear::identity(4);
        let b = bounds_of(&constant_curvature(&g, 1.0), &g).unwrap();
        assert!((b.kappa - 1.0).abs() < 1e-9 && (b.tau - 1.0).abs() < 1e-9);
        assert!((b.ric_min - 3.0).abs() < 1e-12 && (b.ric_max - 3.0).abs() < 1e-12);
        assert!((b.scal_min - 12.0).abs() < 1e-12);
        assert_eq!(
            bounds_of(&CurvatureTensor::zeros(4), &g).unwrap(),
            CurvatureBounds::zero(4)
        );
    }

    #[test]
    fn optimal_mu_candidates() {
        // b = a and c = 0: ratio is a / 2 for every μ
        let (_, v) = optimal_mu(2.0, 2.0, 0.0);
        assert!((v - 1.0).abs() < 1e-15);
        // a = 0, b = 0, c = 1: minimized at μ = 1 with value −1/2
        let (mu, v) = optimal_mu(0.0, 0.0, 1.0);
        assert!((mu - 1.0).abs() < 1e-15 && (v + 0.5).abs() < 1e-15);
    }

    fn random_tensor(seed: u64) -> CurvatureTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(5, 5, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
        let mut k = (&a + a.transpose()) * 0.5;
        k.fill_diagonal(0.0);
        let b = DMatrix::from_fn(5, 5, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
        let s = SymBilinear::from_matrix((&b + b.transpose()) * 0.5).unwrap();
        CurvatureTensor::from_sectional_matrix(&k)
            .add(&crate::curvature::tensor::kulkarni_nomizu(&s, &SymBilinear::identity(5)).unwrap())
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pic1_defect_frame_substitution(seed in 0u64..1000, mu in 0.05f64..1.0) {
            let r = random_tensor(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 17);
            let f = random_frame(5, 4, &mut rng);
            // e1 -> -e1 with e3 <-> e4 trades the roles of μ and 1/μ
            let mut g = f.clone();
            g.column_mut(0).neg_mut();
            g.swap_columns(2, 3);
            let a = pic1_defect(&r, &f, mu).unwrap();
            let b = pic1_defect(&r, &g, 1.0).unwrap();
            let a1 = pic1_defect(&r, &f, 1.0).unwrap();
            prop_assert!((a1 - b).abs() < 1e-10 * (1.0 + a1.abs()));
            let c = {
                let cols = columns(&f);
                let gc = columns(&g);
                let lin = |cols: &[Vec<f64>], m: f64| {
                    r.eval(&cols[0], &cols[2], &cols[2], &cols[0])
                        + m * m * r.eval(&cols[0], &cols[3], &cols[3], &cols[0])
                        + r.eval(&cols[1], &cols[2], &cols[2], &cols[1])
                        + m * m * r.eval(&cols[1], &cols[3], &cols[3], &cols[1])
                        - 2.0 * m * r.eval(&cols[0], &cols[1], &cols[2], &cols[3])
                };
                (lin(&gc, mu), mu * mu * lin(&cols, 1.0 / mu))
            };
            prop_assert!((c.0 - c.1).abs() < 1e-9 * (1.0 + c.0.abs()));
            // e1 -> e2, e2 -> -e1 leaves the defect unchanged for every μ
            let mut h = f.clone();
            h.set_column(0, &f.column(1));
            h.set_column(1, &(-f.column(0)));
            let d = pic1_defect(&r, &h, mu).unwrap();
            prop_assert!((a - d).abs() < 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn chi_ic1_recovers_constant(c in -2.0f64..2.0) {
            let g = SymBilinear::identity(4);
            let r = constant_curvature(&g, c);
            let search = FrameSearch { starts: 4, ..FrameSearch::default() };
            let v = chi_ic1_with(&r, &g, &search).unwrap().value;
            prop_assert!((v - c).abs() < 1e-3);
        }

        #[test]
        fn ric3_dominates_twice_kappa(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(4, 4, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
            let mut k = (&a + a.transpose()) * 0.5;
            k.fill_diagonal(0.0);
            let r = CurvatureTensor::from_sectional_matrix(&k);
            let search = FrameSearch { starts: 8, ..FrameSearch::default() };
            let (kappa, _) = sectional_range(&r, &search).unwrap();
            let r3 = ric3_min_with(&r, &search).unwrap();
            prop_assert!(r3 >= 2.0 * kappa - 1e-6);
        }
    }
}
