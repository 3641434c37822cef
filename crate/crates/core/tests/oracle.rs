use approx::assert_relative_eq;
use areaflow::curvature::CurvatureBounds;
use areaflow::oracle::sweep::{state_a, state_b, state_c, state_d};
use areaflow::oracle::{
    bound_a, bound_b, bound_c, bound_d, cdet_gap, grad_theta_1221, positivity_gap, term_1,
    term_ii_bruteforce, terms_i_ii_iii, PointState, DEFAULT_C0,
};
use areaflow::profile::SingularProfile;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `R(x,y,z,w) = Σ K_ij (x_i w_i y_j z_j − x_i z_i y_j w_j)` for a diagonal-type tensor.
fn diag_type(k: &DMatrix<f64>, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let d = k.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += k[(i, j)] * (x[i] * w[i] * y[j] * z[j] - x[i] * z[i] * y[j] * w[j]);
        }
    }
    s
}

/// Product curvature on `R^m ⊕ R^n`, evaluated blockwise.
fn product_eval(st: &PointState, v: [&[f64]; 4]) -> f64 {
    let m = st.m();
    let top = |x: &[f64]| x[..m].to_vec();
    let bot = |x: &[f64]| x[m..].to_vec();
    diag_type(&st.kg, &top(v[0]), &top(v[1]), &top(v[2]), &top(v[3]))
        + diag_type(&st.kh, &bot(v[0]), &bot(v[1]), &bot(v[2]), &bot(v[3]))
}

fn tangent(st: &PointState, i: usize) -> Vec<f64> {
    let (m, n) = (st.m(), st.n());
    let l = st.profile.lambda[i];
    let r = (1.0 + l * l).sqrt();
    let mut x = vec![0.0; m + n];
    x[i] = 1.0 / r;
    if i < n {
        x[m + i] = l / r;
    }
    x
}

fn normal(st: &PointState, a: usize) -> Vec<f64> {
    let (m, n) = (st.m(), st.n());
    let l = st.profile.lambda_target(a);
    let r = (1.0 + l * l).sqrt();
    let mut x = vec![0.0; m + n];
    if a < m {
        x[a] = -l / r;
    }
    x[m + a] = 1.0 / r;
    x
}

fn term_ii_by_hand(st: &PointState, i: usize) -> f64 {
    if i >= st.n() {
        return 0.0;
    }
    let ei = tangent(st, i);
    let nui = normal(st, i);
    let sum: f64 = (0..st.m())
        .map(|k| {
            let ek = tangent(st, k);
            product_eval(st, [&ei, &ek, &ek, &nui])
        })
        .sum();
    -2.0 * st.profile.c_diag[i] * sum
}

fn random_state(seed: u64) -> PointState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(2..=4);
    let n = rng.random_range(1..=4);
    let lam: Vec<f64> = (0..m.min(n)).map(|_| rng.random_range(0.0..3.0)).collect();
    let sect = |rng: &mut ChaCha8Rng, d: usize| {
        let mut k = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..i {
                let v = rng.random_range(-2.0..2.0);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    };
    let kg = sect(&mut rng, m);
    let kh = sect(&mut rng, n);
    let a = (0..n)
        .map(|_| {
            let x = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
            &x + x.transpose()
        })
        .collect();
    let dtg = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dth = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let wide = |d| CurvatureBounds {
        kappa: -2.0,
        tau: 2.0,
        ..CurvatureBounds::zero(d)
    };
    PointState::new(
        SingularProfile::from_lambdas(m, n, &lam).unwrap(),
        kg,
        kh,
        a,
        dtg,
        dth,
        wide(m),
        wide(n),
    )
    .unwrap()
}

fn two_by_two(lam: &[f64]) -> PointState {
    PointState::new(
        SingularProfile::from_lambdas(2, 2, lam).unwrap(),
        DMatrix::zeros(2, 2),
        DMatrix::zeros(2, 2),
        vec![DMatrix::zeros(2, 2); 2],
        vec![0.0; 2],
        vec![0.0; 2],
        CurvatureBounds::zero(2),
        CurvatureBounds::zero(2),
    )
    .unwrap()
}

#[test]
fn term_one_and_gradient_on_a_single_entry() {
    let mut st = two_by_two(&[0.5, 0.2]);
    st.a[0][(0, 0)] = 1.0;
    // only A^{1+m}_{11} = 1: (1) = 2(S11 + S11)
    let s11 = (1.0 - 0.25) / 1.25;
    assert_relative_eq!(term_1(&st), 4.0 * s11, epsilon = 1e-15);
    let g = grad_theta_1221(&st);
    assert_relative_eq!(g[0], -2.0 * (2.0 * 0.5 / 1.25), epsilon = 1e-15);
    assert_eq!(g[1], 0.0);
}

#[test]
fn cdet_gap_single_entry_closed_form() {
    let mut st = two_by_two(&[0.5, 0.2]);
    st.a[0][(0, 0)] = 1.0;
    let p = &st.profile;
    let theta = p.s_diag[0] + p.s_diag[1];
    let want = theta * 4.0 * p.s_diag[0] + 2.0 * p.c_diag[0].powi(2) - 2.0 * theta * theta;
    assert_relative_eq!(cdet_gap(&st).unwrap(), want, epsilon = 1e-14);
    assert!(want >= 0.0);
}

#[test]
fn term_ii_matches_hand_contraction() {
    for seed in 0..200 {
        let st = random_state(seed);
        for i in 0..st.m() {
            let closed = terms_i_ii_iii(&st, i).unwrap().1;
            let hand = term_ii_by_hand(&st, i);
            let brute = term_ii_bruteforce(&st, i).unwrap();
            assert!(
                (closed - hand).abs() <= 1e-12 * (1.0 + hand.abs()),
                "seed {seed}"
            );
            assert!(
                (brute - hand).abs() <= 1e-12 * (1.0 + hand.abs()),
                "seed {seed}"
            );
        }
    }
}

proptest! {
    #[test]
    fn positivity_gap_nonnegative(seed in any::<u64>(), alpha in 0.0..3.0f64) {
        let st = random_state(seed);
        prop_assume!(st.profile.theta_1221() + alpha > 0.0);
        prop_assert!(positivity_gap(&st, alpha).unwrap() >= -1e-10);
    }

    #[test]
    fn cdet_gap_nonnegative(seed in any::<u64>()) {
        let st = random_state(seed);
        prop_assume!(st.profile.theta_1221() > 0.0);
        prop_assert!(cdet_gap(&st).unwrap() >= -1e-10);
    }

    #[test]
    fn static_bounds_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(bound_a(&state_a(&mut rng)).unwrap() >= -1e-10);
        prop_assert!(bound_b(&state_b(&mut rng)).unwrap() >= -1e-10);
    }

    #[test]
    fn evolving_bounds_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(bound_c(&state_c(&mut rng), DEFAULT_C0).unwrap() >= -1e-10);
        prop_assert!(bound_d(&state_d(&mut rng), DEFAULT_C0).unwrap() >= -1e-10);
    }

    #[test]
    fn bounds_reject_time_dependence_mismatch(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = state_c(&mut rng);
        st.dth[0] += 0.1;
        prop_assert!(bound_c(&st, DEFAULT_C0).is_err());
        let mut st = state_a(&mut rng);
        st.dtg[0] = 0.5;
        prop_assert!(bound_a(&st).is_err());
    }
}

#[test]
fn gradient_square_matches_expanded_sum() {
    for seed in 0..100 {
        let st = random_state(seed);
        let c = &st.profile.c_diag;
        let half: f64 = 0.5 * grad_theta_1221(&st).iter().map(|g| g * g).sum::<f64>();
        let expanded: f64 = (0..st.m())
            .map(|k| 2.0 * (c[0] * st.a_entry(0, 0, k) + c[1] * st.a_entry(1, 1, k)).powi(2))
            .sum();
        assert!(
            (half - expanded).abs() <= 1e-13 * (1.0 + expanded),
            "seed {seed}"
        );
    }
}
