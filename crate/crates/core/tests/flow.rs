use std::f64::consts::PI;

use areaflow::flow::equivariant::reduced_rhs;
use areaflow::flow::reduction::unreduced_velocity;
use areaflow::flow::{
    run, Background, EquivariantFlowState, FlowCase, FlowConfig, FlowOutcome, InitialData, Preset,
    DEFAULT_CFL,
};
use areaflow::model::{BackgroundPath, ModelSpace, PathMode};
use areaflow::Error;
use proptest::prelude::*;

fn config(
    case: FlowCase,
    dims: [usize; 2],
    grid: usize,
    preset: Preset,
    amp: f64,
    t_end: f64,
) -> FlowConfig {
    FlowConfig {
        case,
        dims,
        grid,
        cfl: DEFAULT_CFL,
        dt: None,
        t_end,
        sample_dt: t_end / 20.0,
        initial: InitialData {
            preset,
            amplitude: amp,
            linear: None,
        },
        background: Background::default(),
        growth_rate: None,
        residual: false,
    }
}

fn eps_disc(out: &FlowOutcome) -> f64 {
    5.0 * out.h * out.h
}

fn max_residual(out: &FlowOutcome) -> f64 {
    out.series.residual.iter().fold(0.0, |a, &b| a.max(b))
}

#[test]
fn torus_area_decreasing_data_is_monotone() {
    let cfg = config(FlowCase::Torus, [2, 2], 64, Preset::LinearSine, 0.1, 0.5);
    let out = run(&cfg).unwrap();
    assert_eq!(out.abort, None);
    let eps = eps_disc(&out);
    assert!(out.series.m_of_t[0] > 0.0);
    assert!(
        out.series.worst_drop(0.0) <= eps,
        "{}",
        out.series.worst_drop(0.0)
    );
    let lowest = out
        .series
        .m_of_t
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(lowest >= -eps);
}

#[test]
fn lambda_bounded_by_m_monitor() {
    let runs = [
        config(FlowCase::Torus, [2, 2], 32, Preset::LinearSine, 0.15, 0.3),
        config(FlowCase::Equivariant, [3, 3], 65, Preset::Sine, 0.8, 0.3),
    ];
    for cfg in runs {
        let s = run(&cfg).unwrap().series;
        for (m, l) in s.m_of_t.iter().zip(&s.lambda_max) {
            if *m > 0.0 {
                assert!(*l <= 2.0 / m, "{l} > 2/{m}");
            }
        }
    }
}

#[test]
fn torus_residual_converges_at_second_order() {
    let res = |grid| {
        let mut cfg = config(FlowCase::Torus, [2, 2], grid, Preset::LinearSine, 0.2, 0.02);
        cfg.residual = true;
        max_residual(&run(&cfg).unwrap())
    };
    let (a, b) = (res(32), res(64));
    let slope = (a / b).log2();
    assert!(slope >= 1.8, "{a} {b} {slope}");
}

#[test]
fn equivariant_sine_converges_to_constant_map() {
    let cfg = config(FlowCase::Equivariant, [3, 3], 512, Preset::Sine, 0.8, 2.0);
    let out = run(&cfg).unwrap();
    assert_eq!(out.abort, None);
    let last = *out.series.m_of_t.last().unwrap();
    assert!(last >= 1.9, "{last}");
    assert!(out.series.worst_drop(0.0) <= eps_disc(&out));
}

#[test]
fn identity_is_stationary_per_step() {
    let st = EquivariantFlowState::from_fn(3, 3, 512, 1.0, 1.0, |t| t).unwrap();
    let p = BackgroundPath::fixed(ModelSpace::sphere(3, 1.0).unwrap());
    let dt = st.stable_dt(DEFAULT_CFL, 1.0);
    let next = st.step(dt, DEFAULT_CFL, &p, &p).unwrap();
    let update = st
        .rho
        .iter()
        .zip(&next.rho)
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    assert!(update <= 1e-10 * dt, "{update}");
}

#[test]
fn coupled_shrinking_spheres_with_oracle_rate() {
    let mut cfg = config(FlowCase::Equivariant, [3, 3], 128, Preset::Sine, 0.8, 0.45);
    cfg.background.mode = PathMode::RicciHomothety;
    let out = run(&cfg).unwrap();
    assert_eq!(out.abort, None);
    assert_eq!(out.growth_rate, 288.0);
    assert!(out.series.worst_drop(out.growth_rate) <= eps_disc(&out));
    let last = out.series.scale_m.last().unwrap();
    assert!((last - (1.0 - 2.0 * 0.45)).abs() < 1e-12);
    let needed = out.series.smallest_monotone_rate().unwrap();
    assert!(needed <= out.growth_rate);
}

#[test]
fn reruns_are_byte_identical() {
    let mut cfg = config(FlowCase::Torus, [2, 3], 16, Preset::LinearSine, 0.2, 0.1);
    cfg.residual = true;
    cfg.initial.linear = Some(vec![vec![0.5, 0.1], vec![0.0, 0.3], vec![0.2, 0.0]]);
    let a = run(&cfg).unwrap().series.to_csv();
    let b = run(&cfg).unwrap().series.to_csv();
    assert_eq!(a, b);
}

#[test]
fn steep_initial_data_is_rejected() {
    let cfg = config(FlowCase::Torus, [2, 1], 32, Preset::Sine, 60.0, 0.1);
    assert!(matches!(run(&cfg), Err(Error::GraphBreakdown(_))));
}

/// Allowance factor on `5h²` for the pointwise reduction gap.
const REDUCTION_SCALE: f64 = 10.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reduction_matches_unreduced_operator(
        b1 in -0.4..0.4_f64,
        b2 in -0.2..0.2_f64,
        b3 in -0.1..0.1_f64,
        rn in 0.6..1.5_f64,
        k in 20usize..108,
    ) {
        let rho = |t: f64| t + b1 * t.sin() + b2 * (2.0 * t).sin() + b3 * (3.0 * t).sin();
        let points = 129;
        let h = PI / (points - 1) as f64;
        let grid: Vec<f64> = (0..points).map(|j| rho(j as f64 * h)).collect();
        let reduced = reduced_rhs(&grid, 3, 1.0, rn)[k];
        let full = unreduced_velocity(rho, k as f64 * h, 3, 4, 1.0, rn, h);
        prop_assert!((full - reduced).abs() <= 5.0 * h * h * REDUCTION_SCALE, "{full} {reduced}");
    }
}
