//! Curvature hypotheses (A)–(F) and the two alternatives of the static
//! rigidity theorem, evaluated on bounds with named slacks.
//!
//! Every slack is `LHS − RHS` of one inequality. `holds` means every slack is
//! nonnegative; `strict` reports the condition's designated strict inequality,
//! so callers can pick whichever form the theorem they invoke needs.

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureBounds;
use crate::error::{Error, Result};
use crate::model::{scalar_hypothesis, ModelSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
    C,
    D,
    E,
    F,
    #[serde(rename = "Thm1_i")]
    Thm1I,
    #[serde(rename = "Thm1_ii")]
    Thm1Ii,
}

impl Condition {
    pub const ALL: [Condition; 8] = [
        Condition::A,
        Condition::B,
        Condition::C,
        Condition::D,
        Condition::E,
        Condition::F,
        Condition::Thm1I,
        Condition::Thm1Ii,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Condition::A => "A",
            Condition::B => "B",
            Condition::C => "C",
            Condition::D => "D",
            Condition::E => "E",
            Condition::F => "F",
            Condition::Thm1I => "Thm1_i",
            Condition::Thm1Ii => "Thm1_ii",
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown condition {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub holds: bool,
    pub strict: bool,
    pub slacks: Vec<Slack>,
    pub unchecked_hypotheses: Vec<String>,
}

impl ConditionReport {
    fn new(condition: Condition, slacks: Vec<(&str, f64)>, strict: bool) -> Self {
        let slacks: Vec<Slack> = slacks
            .into_iter()
            .map(|(name, value)| Slack {
                name: name.to_string(),
                value,
            })
            .collect();
        Self {
            condition,
            holds: slacks.iter().all(|s| s.value >= 0.0),
            strict,
            slacks,
            unchecked_hypotheses: Vec::new(),
        }
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.slacks.iter().find(|s| s.name == name).map(|s| s.value)
    }
}

pub const A_RICCI: &str = "Ric_min(g) - Ric_max(h) + (m-l)*kappa_M + (n-l)*kappa_N";
pub const A_KAPPA: &str = "kappa_M + kappa_N";
pub const B_KAPPA: &str = "kappa_M";
pub const B_PINCH: &str = "(2(m-l)+l-1)*kappa_M - (l-1)*tau_N";
pub const C_SUM: &str = "chi_g + chi_h";
pub const C_WEIGHTED: &str = "(m-l)*chi_g + (n-l)*chi_h";
pub const D_CHI: &str = "chi_g";
pub const D_TAU: &str = "-tau_N";
pub const E_KAPPA: &str = "kappa_N";
pub const E_EINSTEIN: &str = "Ric_min(h) - Ric_max(h)";
pub const CHI_IC1: &str = "chi_IC1(g)";
pub const SCALAR: &str = "R_min(g) - (m/n)*R_max(h)";
pub const DIMS: &str = "min(m,n) - 3";

fn ell(m: usize, n: usize) -> usize {
    m.min(n)
}

fn need_dims(m: usize, n: usize) -> Result<()> {
    for d in [m, n] {
        if d < 2 {
            return Err(Error::DimensionTooSmall {
                what: "condition audit",
                dim: d,
                min: 2,
            });
        }
    }
    Ok(())
}

pub fn check_a(
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    m: usize,
    n: usize,
) -> Result<ConditionReport> {
    need_dims(m, n)?;
    let l = ell(m, n);
    let ricci = bm.ric_min - bn.ric_max + (m - l) as f64 * bm.kappa + (n - l) as f64 * bn.kappa;
    let kappa = bm.kappa + bn.kappa;
    Ok(ConditionReport::new(
        Condition::A,
        vec![(A_RICCI, ricci), (A_KAPPA, kappa)],
        kappa > 0.0,
    ))
}

/// Uses the multiplied form `(ℓ−1)τ_N ≤ (2(m−ℓ)+ℓ−1)κ_M`, defined for `ℓ ≥ 2`.
pub fn check_b(
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    m: usize,
    n: usize,
) -> Result<ConditionReport> {
    need_dims(m, n)?;
    let l = ell(m, n);
    let pinch = (2 * (m - l) + l - 1) as f64 * bm.kappa - (l - 1) as f64 * bn.tau;
    Ok(ConditionReport::new(
        Condition::B,
        vec![(B_KAPPA, bm.kappa), (B_PINCH, pinch)],
        bm.kappa > 0.0,
    ))
}

fn chi(b: &CurvatureBounds, side: &str) -> Result<f64> {
    b.ric3_min
        .ok_or_else(|| Error::MissingData(format!("Ric3 lower bound of {side}")))
}

pub fn check_c(
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    m: usize,
    n: usize,
) -> Result<ConditionReport> {
    need_dims(m, n)?;
    let (cg, ch) = (chi(bm, "M")?, chi(bn, "N")?);
    let l = ell(m, n);
    let sum = cg + ch;
    let weighted = (m - l) as f64 * cg + (n - l) as f64 * ch;
    Ok(ConditionReport::new(
        Condition::C,
        vec![(C_SUM, sum), (C_WEIGHTED, weighted)],
        sum > 0.0,
    ))
}

/// Strictness follows `χ^g > 0`; the stronger conclusion under `τ_N < 0`
/// can be read off the `-tau_N` slack.
pub fn check_d(
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    m: usize,
    n: usize,
) -> Result<ConditionReport> {
    need_dims(m, n)?;
    let cg = chi(bm, "M")?;
    Ok(ConditionReport::new(
        Condition::D,
        vec![(D_CHI, cg), (D_TAU, -bn.tau)],
        cg > 0.0,
    ))
}

fn irreducibility_caveats() -> Vec<String> {
    vec![
        "M locally irreducible".to_string(),
        "M non-symmetric".to_string(),
    ]
}

/// `χ_IC1(g₀)`, or the Ricci minimum for three-dimensional `M`, where the
/// PIC1 condition reduces to `Ric ≥ 0`.
fn chi_ic1_clause(space: &ModelSpace) -> Result<f64> {
    let b = space.bounds();
    if space.dim <= 3 {
        return Ok(b.ric_min);
    }
    b.chi_ic1
        .ok_or_else(|| Error::MissingData("chi_IC1 of M".into()))
}

pub fn check_e(space_m: &ModelSpace, space_n: &ModelSpace) -> Result<ConditionReport> {
    need_dims(space_m.dim, space_n.dim)?;
    let bn = space_n.bounds();
    let einstein = if space_n.is_einstein() {
        0.0
    } else {
        bn.ric_min - bn.ric_max
    };
    let scalar = scalar_hypothesis(space_m, space_n);
    let mut report = ConditionReport::new(
        Condition::E,
        vec![
            (E_KAPPA, bn.kappa),
            (E_EINSTEIN, einstein),
            (CHI_IC1, chi_ic1_clause(space_m)?),
            (SCALAR, scalar),
        ],
        scalar > 0.0,
    );
    report.unchecked_hypotheses = irreducibility_caveats();
    Ok(report)
}

pub fn check_f(space_m: &ModelSpace, space_n: &ModelSpace) -> Result<ConditionReport> {
    need_dims(space_m.dim, space_n.dim)?;
    let tau = space_n.bounds().tau;
    let mut report = ConditionReport::new(
        Condition::F,
        vec![
            (D_TAU, -tau),
            (CHI_IC1, chi_ic1_clause(space_m)?),
            (SCALAR, scalar_hypothesis(space_m, space_n)),
        ],
        -tau > 0.0,
    );
    report.unchecked_hypotheses = irreducibility_caveats();
    Ok(report)
}

/// Alternative (i) of the static rigidity theorem: condition (A) with
/// `κ_M + κ_N > 0` (read `strict`) and `m, n ≥ 3`.
pub fn check_thm1_i(
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    m: usize,
    n: usize,
) -> Result<ConditionReport> {
    let a = check_a(bm, bn, m, n)?;
    let mut slacks: Vec<(&str, f64)> =
        vec![(A_RICCI, a.slacks[0].value), (A_KAPPA, a.slacks[1].value)];
    slacks.push((DIMS, m.min(n) as f64 - 3.0));
    Ok(ConditionReport::new(Condition::Thm1I, slacks, a.strict))
}

/// Alternative (ii): `κ_M > 0` (read `strict`) and the pinching of (B), `m, n ≥ 3`.
pub fn check_thm1_ii(
    bm: &CurvatureBounds,
    bn: &CurvatureBounds,
    m: usize,
    n: usize,
) -> Result<ConditionReport> {
    let b = check_b(bm, bn, m, n)?;
    let slacks: Vec<(&str, f64)> = vec![
        (B_KAPPA, b.slacks[0].value),
        (B_PINCH, b.slacks[1].value),
        (DIMS, m.min(n) as f64 - 3.0),
    ];
    Ok(ConditionReport::new(Condition::Thm1Ii, slacks, b.strict))
}

/// Audits a pair of model spaces with their closed-form bounds.
pub fn audit(
    space_m: &ModelSpace,
    space_n: &ModelSpace,
    condition: Condition,
) -> Result<ConditionReport> {
    let (bm, bn) = (space_m.bounds(), space_n.bounds());
    let (m, n) = (space_m.dim, space_n.dim);
    match condition {
        Condition::A => check_a(&bm, &bn, m, n),
        Condition::B => check_b(&bm, &bn, m, n),
        Condition::C => check_c(&bm, &bn, m, n),
        Condition::D => check_d(&bm, &bn, m, n),
        Condition::E => check_e(space_m, space_n),
        Condition::F => check_f(space_m, space_n),
        Condition::Thm1I => check_thm1_i(&bm, &bn, m, n),
        Condition::Thm1Ii => check_thm1_ii(&bm, &bn, m, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sphere(d: usize) -> ModelSpace {
        ModelSpace::sphere(d, 1.0).unwrap()
    }

    #[test]
    fn equal_spheres_pass_a_strictly() {
        for d in 3..8 {
            let r = audit(&sphere(d), &sphere(d), Condition::A).unwrap();
            assert_eq!(r.slacks[0].value, 0.0);
            assert_eq!(r.slacks[1].value, 2.0);
            assert!(r.holds && r.strict);
        }
    }

    #[test]
    fn hopf_pairs_fail_a_and_b() {
        for n in 1..6 {
            let m_space = sphere(2 * n + 1);
            let n_space = ModelSpace::fubini_study(2 * n, 4.0).unwrap();
            let a = audit(&m_space, &n_space, Condition::A).unwrap();
            assert_eq!(a.slack(A_RICCI), Some(-1.0));
            assert!(!a.holds);
            let b = audit(&m_space, &n_space, Condition::B).unwrap();
            assert_eq!(b.slack(B_PINCH), Some(5.0 - 6.0 * n as f64));
            assert!(!b.holds);
        }
    }

    #[test]
    fn flat_tori_hold_but_not_strictly() {
        let t = ModelSpace::flat_torus(3, 1.0).unwrap();
        let r = audit(&t, &t, Condition::A).unwrap();
        assert!(r.holds && !r.strict);
        assert_eq!(r.slacks[0].value, 0.0);
        let b = audit(&t, &t, Condition::B).unwrap();
        assert!(b.holds && !b.strict);
    }

    #[test]
    fn b_on_sphere_pairs() {
        for n in 3..6 {
            for m in n..8 {
                let r = audit(&sphere(m), &sphere(n), Condition::B).unwrap();
                assert_eq!(r.slack(B_PINCH), Some(2.0 * (m - n) as f64));
                assert!(r.holds && r.strict);
            }
        }
    }

    #[test]
    fn b_rejects_small_ell() {
        let b = CurvatureBounds::constant(2, 1.0);
        assert!(check_b(&b, &CurvatureBounds::constant(1, 1.0), 2, 1).is_err());
    }

    #[test]
    fn c_and_d_examples() {
        let s = CurvatureBounds::constant(3, 1.0);
        let c = check_c(&s, &s, 3, 3).unwrap();
        assert!(c.holds && c.slacks[0].value == 4.0);
        let hyper = CurvatureBounds::constant(3, -1.0);
        let d = check_d(&s, &hyper, 3, 3).unwrap();
        assert!(d.holds && d.strict && d.slack(D_TAU) == Some(1.0));
        let mut neg = s;
        neg.ric3_min = Some(-1.0);
        let mut zero = s;
        zero.ric3_min = Some(0.0);
        assert!(!check_c(&neg, &zero, 3, 3).unwrap().holds);
        let mut missing = s;
        missing.ric3_min = None;
        assert!(matches!(
            check_c(&missing, &s, 3, 3),
            Err(Error::MissingData(_))
        ));
    }

    #[test]
    fn e_and_f_examples() {
        let e = audit(&sphere(4), &sphere(3), Condition::E).unwrap();
        assert_eq!(e.slack(SCALAR), Some(4.0));
        assert_eq!(e.slack(E_KAPPA), Some(1.0));
        assert!(e.holds);
        assert_eq!(e.unchecked_hypotheses.len(), 2);
        let e = audit(&sphere(3), &sphere(4), Condition::E).unwrap();
        assert_eq!(e.slack(SCALAR), Some(-3.0));
        assert!(!e.holds);
        let f = audit(
            &sphere(4),
            &ModelSpace::flat_torus(4, 1.0).unwrap(),
            Condition::F,
        )
        .unwrap();
        assert_eq!(f.slack(D_TAU), Some(0.0));
        assert!(f.holds && !f.strict);
    }

    #[test]
    fn report_json_shape() {
        let r = audit(&sphere(3), &sphere(3), Condition::Thm1I).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 5);
        for k in [
            "condition",
            "holds",
            "strict",
            "slacks",
            "unchecked_hypotheses",
        ] {
            assert!(keys.contains(&k));
        }
        assert_eq!(v["condition"], "Thm1_i");
        assert_eq!(v["slacks"][2]["name"], DIMS);
    }

    fn bounds_strategy() -> impl Strategy<Value = (CurvatureBounds, CurvatureBounds, usize, usize)>
    {
        (
            2usize..9,
            2usize..9,
            -2.0f64..2.0,
            0.0f64..3.0,
            -2.0f64..2.0,
            0.0f64..3.0,
        )
            .prop_map(|(m, n, km, wm, kn, wn)| {
                let mk = |d: usize, k: f64, w: f64| {
                    let mut b = CurvatureBounds::constant(d, k);
                    b.tau = k + w;
                    b.ric_max = (d as f64 - 1.0) * b.tau;
                    b.scal_max = d as f64 * b.ric_max;
                    b
                };
                (mk(m, km, wm), mk(n, kn, wn), m, n)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn b_pinching_implies_a_ricci_slack(
            d1 in 2usize..9, d2 in 2usize..9, km in 0.01f64..2.0,
            pinch in 0.0f64..1.0, gap in 0.0f64..2.0, pinched_n in proptest::bool::ANY,
        ) {
            // with n > m the implication needs κ_N = τ_N, so those draws pin N
            let (m, n) = if pinched_n { (d1, d2) } else { (d1.max(d2), d1.min(d2)) };
            let l = m.min(n);
            let tau_max = (2 * (m - l) + l - 1) as f64 / (l - 1) as f64 * km;
            let tau_n = pinch * tau_max;
            let kappa_n = if pinched_n { tau_n } else { tau_n - gap };
            let bm = CurvatureBounds::constant(m, km);
            let mut bn = CurvatureBounds::constant(n, kappa_n);
            bn.tau = tau_n;
            bn.ric_max = (n as f64 - 1.0) * tau_n;
            let b = check_thm1_ii(&bm, &bn, m, n).unwrap();
            prop_assert!(b.slack(B_KAPPA).unwrap() > 0.0 && b.slack(B_PINCH).unwrap() >= -1e-12);
            let a = check_a(&bm, &bn, m, n).unwrap();
            prop_assert!(a.slack(A_RICCI).unwrap() >= -1e-12);
        }

        #[test]
        fn raising_kappa_m_never_breaks_a_pass(
            (bm, bn, m, n) in bounds_strategy(), bump in 0.0f64..2.0, cond in 0usize..4
        ) {
            let mut up = bm;
            up.kappa += bump;
            up.tau = up.tau.max(up.kappa);
            up.ric_min += (m as f64 - 1.0) * bump;
            up.ric_max = up.ric_max.max(up.ric_min);
            up.ric3_min = up.ric3_min.map(|v| v + 2.0 * bump);
            let check = [check_a, check_b, check_c, check_d][cond];
            if let (Ok(before), Ok(after)) = (check(&bm, &bn, m, n), check(&up, &bn, m, n)) {
                prop_assert!(!before.holds || after.holds);
            }
        }
    }
}
