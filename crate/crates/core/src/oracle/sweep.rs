//! Seeded random sweeps over admissible point states.
//!
//! Every sample draws from its own ChaCha8 stream keyed by suite and index,
//! so results do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    bound_a, bound_b, bound_c, bound_d, cdet_gap, constant_c, coordinate_ric3, positivity_gap,
    term_ii_bruteforce, terms_i_ii_iii, PointState, DEFAULT_C0,
};
use crate::curvature::{kulkarni_nomizu, CurvatureBounds, SymBilinear};
use crate::error::{Error, Result};
use crate::profile::{classify, SingularProfile};

/// Default per-suite sample count of the identity sweeps.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Absolute tolerance for identity residuals.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Allowed negative excursion of an inequality gap.
pub const GAP_TOL: f64 = 1e-9;

/// Cap on the number of times `c₀` is doubled before a bound suite gives up.
pub const MAX_DOUBLINGS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// `S² + C² = 1`, the pair formula for `Θ`, and classification against `Θ ≥ 0`
    Profile,
    /// eigenvalues of `S ⧆ η` on `Λ²` in a rotated frame
    Wedge,
    /// `C₁₁²S₂₂ + C₂₂²S₁₁ = 2(λ₁²+λ₂²)Θ₁₂₂₁/((1+λ₁²)(1+λ₂²))` and
    /// `2ΘᵢⱼⱼᵢSᵢᵢ − Θᵢⱼⱼᵢ² − Cⱼⱼ² + Cᵢᵢ² = 0` on a random pair
    MixedWeight,
    /// closed-form term II against the product curvature contraction
    TermII,
    /// positivity inequality with `α > 0`
    Positivity,
    /// the `α = 0` determinant chain
    Cdet,
    BoundA,
    BoundB,
    BoundC,
    BoundD,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Profile,
        Suite::Wedge,
        Suite::MixedWeight,
        Suite::TermII,
        Suite::Positivity,
        Suite::Cdet,
        Suite::BoundA,
        Suite::BoundB,
        Suite::BoundC,
        Suite::BoundD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Profile => "profile",
            Suite::Wedge => "wedge",
            Suite::MixedWeight => "mixed_weight",
            Suite::TermII => "term_ii",
            Suite::Positivity => "positivity",
            Suite::Cdet => "cdet",
            Suite::BoundA => "bound_a",
            Suite::BoundB => "bound_b",
            Suite::BoundC => "bound_c",
            Suite::BoundD => "bound_d",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }

    /// Identity suites compare two expressions; the rest check an inequality.
    pub fn is_identity(self) -> bool {
        matches!(
            self,
            Suite::Profile | Suite::Wedge | Suite::MixedWeight | Suite::TermII
        )
    }

    fn tolerance(self) -> f64 {
        if self.is_identity() {
            IDENTITY_TOL
        } else {
            GAP_TOL
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Outcome of one suite. For identity suites `min_gap` is minus the largest residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub samples: usize,
    pub min_gap: f64,
    pub chosen_constants: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
}

fn sample_rng(seed: u64, suite: Suite, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite.index() << 40) | index as u64);
    rng
}

fn random_lambdas(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(0.0..3.0)).collect()
}

fn random_profile(rng: &mut ChaCha8Rng, m: usize, n: usize) -> SingularProfile {
    let l = random_lambdas(rng, m.min(n));
    SingularProfile::from_lambdas(m, n, &l).expect("valid random profile")
}

/// Redraws `λ` until `Θ₁₂₂₁ + shift` clears a small margin.
fn profile_with_theta(rng: &mut ChaCha8Rng, m: usize, n: usize, shift: f64) -> SingularProfile {
    loop {
        let p = random_profile(rng, m, n);
        if p.theta_1221() + shift > 1e-3 {
            return p;
        }
    }
}

fn random_sectional(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..i {
            let v = rng.random_range(lo..=hi);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

fn shift_offdiag(k: &mut DMatrix<f64>, s: f64) {
    let d = k.nrows();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                k[(i, j)] += s;
            }
        }
    }
}

fn random_second_fundamental_form(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<DMatrix<f64>> {
    (0..n)
        .map(|_| {
            let x = DMatrix::from_fn(m, m, |_, _| -> f64 { StandardNormal.sample(&mut *rng) });
            (&x + x.transpose()) * 0.5
        })
        .collect()
}

/// Bounds read off the entries of a diagonal-type block.
fn declared_bounds(k: &DMatrix<f64>) -> CurvatureBounds {
    let d = k.nrows();
    let mut kappa = f64::INFINITY;
    let mut tau = f64::NEG_INFINITY;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                kappa = kappa.min(k[(i, j)]);
                tau = tau.max(k[(i, j)]);
            }
        }
    }
    let rows: Vec<f64> = (0..d).map(|i| k.row(i).sum()).collect();
    let ric_min = rows.iter().copied().fold(f64::INFINITY, f64::min);
    let ric_max = rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scal = rows.iter().sum();
    CurvatureBounds {
        kappa,
        tau,
        ric_min,
        ric_max,
        scal_min: scal,
        scal_max: scal,
        ric3_min: coordinate_ric3(k),
        chi_ic1: None,
    }
}

fn ricci_flow_rate(k: &DMatrix<f64>) -> Vec<f64> {
    (0..k.nrows()).map(|i| -k.row(i).sum()).collect()
}

fn dims(rng: &mut ChaCha8Rng, lo_m: usize, lo_n: usize, hi: usize) -> (usize, usize) {
    (rng.random_range(lo_m..=hi), rng.random_range(lo_n..=hi))
}

/// Unconstrained state: any curvature, any metric derivatives.
fn free_state(rng: &mut ChaCha8Rng, profile: SingularProfile) -> PointState {
    let (m, n) = (profile.m, profile.n);
    let kg = random_sectional(rng, m, -2.0, 2.0);
    let kh = random_sectional(rng, n, -2.0, 2.0);
    let a = random_second_fundamental_form(rng, m, n);
    let dtg = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    let dth = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let (bm, bn) = (declared_bounds(&kg), declared_bounds(&kh));
    PointState::new(profile, kg, kh, a, dtg, dth, bm, bn).expect("consistent by construction")
}

/// Optionally lands exactly on the boundary of a shift-enforced condition.
fn extra_shift(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.25) {
        0.0
    } else {
        rng.random_range(0.0..0.5)
    }
}

/// Static state satisfying condition (A).
pub fn state_a(rng: &mut ChaCha8Rng) -> PointState {
    let (m, n) = dims(rng, 2, 2, 5);
    let l = m.min(n);
    let kappa_m = rng.random_range(-1.0..1.0);
    let kappa_n = -kappa_m + rng.random_range(0.0..1.0);
    let mut kg = random_sectional(rng, m, kappa_m, kappa_m + 2.0);
    let kh = random_sectional(rng, n, kappa_n, kappa_n + 2.0);
    let slack = |kg: &DMatrix<f64>| {
        let (bg, bh) = (declared_bounds(kg), declared_bounds(&kh));
        bg.ric_min - bh.ric_max + (m - l) as f64 * kappa_m + (n - l) as f64 * kappa_n
    };
    let s = slack(&kg);
    if s < 0.0 {
        shift_offdiag(&mut kg, -s / (m - 1) as f64 + extra_shift(rng));
    }
    let mut bm = declared_bounds(&kg);
    let mut bn = declared_bounds(&kh);
    bm.kappa = kappa_m;
    bn.kappa = kappa_n;
    let profile = random_profile(rng, m, n);
    let a = random_second_fundamental_form(rng, m, n);
    PointState::new(profile, kg, kh, a, vec![0.0; m], vec![0.0; n], bm, bn)
        .expect("consistent by construction")
}

/// Static state satisfying condition (B).
pub fn state_b(rng: &mut ChaCha8Rng) -> PointState {
    let (m, n) = dims(rng, 2, 2, 5);
    let l = m.min(n);
    let kappa_m = rng.random_range(0.0..2.0);
    let tau_cap = (2 * (m - l) + l - 1) as f64 * kappa_m / (l - 1) as f64;
    let tau_n = if rng.random_bool(0.25) {
        tau_cap
    } else {
        rng.random_range(-2.0..=tau_cap)
    };
    let kappa_n = tau_n - rng.random_range(0.0..2.0);
    let kg = random_sectional(rng, m, kappa_m, kappa_m + 1.0);
    let kh = random_sectional(rng, n, kappa_n, tau_n);
    let mut bm = declared_bounds(&kg);
    let mut bn = declared_bounds(&kh);
    bm.kappa = kappa_m;
    bn.kappa = kappa_n;
    bn.tau = tau_n;
    let profile = random_profile(rng, m, n);
    let a = random_second_fundamental_form(rng, m, n);
    PointState::new(profile, kg, kh, a, vec![0.0; m], vec![0.0; n], bm, bn)
        .expect("consistent by construction")
}

/// Both metrics moving by Ricci flow, condition (C).
pub fn state_c(rng: &mut ChaCha8Rng) -> PointState {
    let (m, n) = dims(rng, 3, 3, 5);
    let l = m.min(n);
    let mut kg = random_sectional(rng, m, -1.0, 2.0);
    let mut kh = random_sectional(rng, n, -1.0, 2.0);
    let cg = coordinate_ric3(&kg).expect("m >= 3");
    let ch = coordinate_ric3(&kh).expect("n >= 3");
    // shifting every entry by s raises each Ric3 by 2s
    let mut need = -(cg + ch) / 4.0;
    let spread = (m + n - 2 * l) as f64;
    if spread > 0.0 {
        let weighted = (m - l) as f64 * cg + (n - l) as f64 * ch;
        need = need.max(-weighted / (2.0 * spread));
    }
    if need > 0.0 {
        let s = need + extra_shift(rng);
        shift_offdiag(&mut kg, s);
        shift_offdiag(&mut kh, s);
    }
    let (dtg, dth) = (ricci_flow_rate(&kg), ricci_flow_rate(&kh));
    let (bm, bn) = (declared_bounds(&kg), declared_bounds(&kh));
    let profile = random_profile(rng, m, n);
    let a = random_second_fundamental_form(rng, m, n);
    PointState::new(profile, kg, kh, a, dtg, dth, bm, bn).expect("consistent by construction")
}

/// `g` by Ricci flow, `h` static with `τ_N ≤ 0`, condition (D).
pub fn state_d(rng: &mut ChaCha8Rng) -> PointState {
    let (m, n) = dims(rng, 3, 2, 5);
    let tau_n = if rng.random_bool(0.25) {
        0.0
    } else {
        rng.random_range(-2.0..0.0)
    };
    let mut kg = random_sectional(rng, m, -1.0, 2.0);
    let kh = random_sectional(rng, n, tau_n - 2.0, tau_n);
    let cg = coordinate_ric3(&kg).expect("m >= 3");
    if cg < 0.0 {
        shift_offdiag(&mut kg, -cg / 2.0 + extra_shift(rng));
    }
    let dtg = ricci_flow_rate(&kg);
    let bm = declared_bounds(&kg);
    let mut bn = declared_bounds(&kh);
    bn.tau = tau_n;
    let profile = random_profile(rng, m, n);
    let a = random_second_fundamental_form(rng, m, n);
    PointState::new(profile, kg, kh, a, dtg, vec![0.0; n], bm, bn)
        .expect("consistent by construction")
}

fn profile_residual(rng: &mut ChaCha8Rng) -> f64 {
    let (m, n) = dims(rng, 2, 1, 6);
    let p = random_profile(rng, m, n);
    let mut worst = 0.0_f64;
    for i in 0..m {
        worst = worst.max((p.s_diag[i].powi(2) + p.c_diag[i].powi(2) - 1.0).abs());
        for j in i + 1..m {
            worst = worst.max((p.theta(i, j) - (p.s_diag[i] + p.s_diag[j])).abs());
        }
    }
    let min_theta = p.theta_eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if classify(&p).area_nonincreasing != (min_theta >= 0.0) {
        worst = f64::INFINITY;
    }
    worst
}

fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let x = DMatrix::from_fn(d, d, |_, _| -> f64 { StandardNormal.sample(&mut *rng) });
    x.qr().q()
}

fn wedge_residual(rng: &mut ChaCha8Rng) -> f64 {
    let (m, n) = dims(rng, 2, 1, 6);
    let p = random_profile(rng, m, n);
    let q = random_rotation(rng, m);
    let s = &q * DMatrix::from_diagonal(&p.s_diag.clone().into()) * q.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let s = SymBilinear::from_matrix(s).expect("symmetrized");
    let r = kulkarni_nomizu(&s, &SymBilinear::identity(m)).expect("same dimension");
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let w = DMatrix::from_fn(pairs.len(), pairs.len(), |x, y| {
        let ((i, j), (k, l)) = (pairs[x], pairs[y]);
        r.get(i, j, l, k)
    });
    let mut got: Vec<f64> = w.symmetric_eigenvalues().iter().copied().collect();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| p.s_diag[i] + p.s_diag[j])
        .collect();
    want.sort_by(f64::total_cmp);
    got.iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn mixed_weight_residual(rng: &mut ChaCha8Rng) -> f64 {
    let (m, n) = dims(rng, 2, 2, 6);
    let p = random_profile(rng, m, n);
    let (s, c, l) = (&p.s_diag, &p.c_diag, &p.lambda);
    let (a, b) = (l[0] * l[0], l[1] * l[1]);
    let lhs = c[0].powi(2) * s[1] + c[1].powi(2) * s[0];
    let rhs = 2.0 * (a + b) * p.theta_1221() / ((1.0 + a) * (1.0 + b));
    let i = rng.random_range(0..m);
    let j = (i + rng.random_range(1..m)) % m;
    let th = p.theta(i, j);
    let keystone = 2.0 * th * s[i] - th * th - c[j].powi(2) + c[i].powi(2);
    (lhs - rhs).abs().max(keystone.abs())
}

fn term_ii_residual(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (m, n) = dims(rng, 2, 1, 4);
    let p = random_profile(rng, m, n);
    let st = free_state(rng, p);
    let mut worst = 0.0_f64;
    for i in 0..m {
        let closed = terms_i_ii_iii(&st, i)?.1;
        let brute = term_ii_bruteforce(&st, i)?;
        worst = worst.max((closed - brute).abs() / (1.0 + closed.abs()));
    }
    Ok(worst)
}

/// Reduces per-sample values to their minimum, keeping the first error.
fn min_of(values: Vec<Result<f64>>) -> Result<f64> {
    values
        .into_iter()
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
}

fn sweep<F>(samples: usize, seed: u64, suite: Suite, f: F) -> Result<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync + Send,
{
    min_of(crate::par_map(samples, |i| {
        f(&mut sample_rng(seed, suite, i))
    }))
}

fn summary(
    suite: Suite,
    samples: usize,
    min_gap: f64,
    constants: BTreeMap<String, f64>,
) -> SuiteSummary {
    let tolerance = suite.tolerance();
    SuiteSummary {
        suite,
        samples,
        min_gap,
        chosen_constants: constants,
        tolerance,
        passed: min_gap >= -tolerance,
    }
}

/// Doubles `c₀` until the bound holds on every sample or the cap is hit.
fn adaptive_bound<B, G>(
    suite: Suite,
    samples: usize,
    seed: u64,
    gen: G,
    bound: B,
) -> Result<SuiteSummary>
where
    G: Fn(&mut ChaCha8Rng) -> PointState + Sync + Send,
    B: Fn(&PointState, f64) -> Result<f64> + Sync + Send,
{
    let mut c0 = DEFAULT_C0;
    let mut doublings = 0;
    loop {
        let min_gap = sweep(samples, seed, suite, |rng| bound(&gen(rng), c0))?;
        if min_gap >= -GAP_TOL || doublings == MAX_DOUBLINGS {
            let c_max = min_of(crate::par_map(samples, |i| {
                Ok(-constant_c(&gen(&mut sample_rng(seed, suite, i)), c0))
            }))?;
            let mut k = BTreeMap::new();
            k.insert("c0".to_string(), c0);
            k.insert("doublings".to_string(), f64::from(doublings));
            k.insert("C_max".to_string(), -c_max);
            return Ok(summary(suite, samples, min_gap, k));
        }
        c0 *= 2.0;
        doublings += 1;
    }
}

/// Runs one suite over `samples` seeded draws.
pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Result<SuiteSummary> {
    if samples == 0 {
        return Err(Error::EmptyInput("sweep sample count"));
    }
    let none = BTreeMap::new;
    let identity = |r: f64| summary(suite, samples, r, none());
    match suite {
        Suite::Profile => Ok(identity(sweep(samples, seed, suite, |rng| {
            Ok(-profile_residual(rng))
        })?)),
        Suite::Wedge => Ok(identity(sweep(samples, seed, suite, |rng| {
            Ok(-wedge_residual(rng))
        })?)),
        Suite::MixedWeight => Ok(identity(sweep(samples, seed, suite, |rng| {
            Ok(-mixed_weight_residual(rng))
        })?)),
        Suite::TermII => Ok(identity(sweep(samples, seed, suite, |rng| {
            term_ii_residual(rng).map(|r| -r)
        })?)),
        Suite::Positivity => {
            const ALPHA_MAX: f64 = 2.0;
            let gap = sweep(samples, seed, suite, |rng| {
                let alpha = rng.random_range(0.0..ALPHA_MAX);
                let (m, n) = dims(rng, 2, 2, 4);
                let p = profile_with_theta(rng, m, n, alpha);
                positivity_gap(&free_state(rng, p), alpha)
            })?;
            let mut k = BTreeMap::new();
            k.insert("alpha_max".to_string(), ALPHA_MAX);
            Ok(summary(suite, samples, gap, k))
        }
        Suite::Cdet => {
            let gap = sweep(samples, seed, suite, |rng| {
                let (m, n) = dims(rng, 2, 2, 4);
                let p = profile_with_theta(rng, m, n, 0.0);
                cdet_gap(&free_state(rng, p))
            })?;
            let mut k = BTreeMap::new();
            k.insert("a".to_string(), super::CDET_A);
            Ok(summary(suite, samples, gap, k))
        }
        Suite::BoundA => {
            let gap = sweep(samples, seed, suite, |rng| bound_a(&state_a(rng)))?;
            Ok(summary(suite, samples, gap, none()))
        }
        Suite::BoundB => {
            let gap = sweep(samples, seed, suite, |rng| bound_b(&state_b(rng)))?;
            Ok(summary(suite, samples, gap, none()))
        }
        Suite::BoundC => adaptive_bound(suite, samples, seed, state_c, bound_c),
        Suite::BoundD => adaptive_bound(suite, samples, seed, state_d, bound_d),
    }
}

/// Runs every suite with the same sample count and seed.
pub fn verify_identities(samples: usize, seed: u64) -> Result<Vec<SuiteSummary>> {
    Suite::ALL
        .into_iter()
        .map(|s| run_suite(s, samples, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_sweeps_pass_and_are_deterministic() {
        for s in Suite::ALL {
            let a = run_suite(s, 300, 7).unwrap();
            assert!(a.passed, "{s}: {a:?}");
            assert_eq!(a, run_suite(s, 300, 7).unwrap());
        }
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(matches!(
            run_suite(Suite::Profile, 0, 1),
            Err(Error::EmptyInput(_))
        ));
    }
}
