use std::f64::consts::PI;

use lcalim_core::schedule::TablePoint;
use lcalim_core::{
    check_theorem, compound_growth, crosscheck_gensym2, ft_sup_distance, predict_limit,
    trend_classify, ArrayKind, Character, CompactSubgroup, DiscreteMeasure, ElementRule,
    GroupElement, GroupId, LimitLaw, Neighborhood, OverallVerdict, Prediction, Schedule,
    TheoremTag, Trend, TrendRule, TriangularArray, VerifyConfig,
};

fn torus_rademacher(exp: f64) -> TriangularArray {
    TriangularArray::rademacher(
        GroupId::Torus,
        ElementRule::Angle(Schedule::power(1.0, exp)),
        Schedule::identity(),
    )
    .unwrap()
}

fn dyadic_bernoulli(prob: Schedule) -> TriangularArray {
    let group = GroupId::padic(2, 16).unwrap();
    TriangularArray::bernoulli(GroupElement::padic_digits(group, &[1]).unwrap(), prob, Schedule::identity())
        .unwrap()
}

fn poisson_law(lambda: f64) -> LimitLaw {
    let group = GroupId::padic(2, 16).unwrap();
    let x = GroupElement::padic_digits(group, &[1]).unwrap();
    let eta = lcalim_core::validate_levy(DiscreteMeasure::point(x, lambda).unwrap()).unwrap();
    LimitLaw::compound_poisson(eta).unwrap()
}

#[test]
fn symmetric_row_transforms_are_real_powers() {
    let arrays = [
        torus_rademacher(-0.5),
        torus_rademacher(-0.3),
        TriangularArray::new(
            GroupId::Torus,
            ArrayKind::IidSymmetric {
                atoms: vec![
                    (ElementRule::Angle(Schedule::power(0.5, -0.5)), 0.25),
                    (ElementRule::Angle(Schedule::power(3.0, -0.5)), 0.75),
                ],
            },
            Schedule::power(3.0, 1.0),
        )
        .unwrap(),
    ];
    for array in &arrays {
        for n in [10u64, 1000, 100_000] {
            let k = array.k_n(n).unwrap() as f64;
            for l in -6..=6 {
                let chi = Character::Torus { l };
                let z = array.row_ft_exact(n, &chi).unwrap();
                assert!(z.im.abs() <= 1e-10);
                assert!(z.norm() <= 1.0);
                let s = array.symmetric_stat(n, &chi).unwrap();
                let oracle = (1.0 - s / k).powf(k);
                assert!((z.re - oracle).abs() <= 1e-10, "n={n} l={l}: {} vs {oracle}", z.re);
            }
            assert_eq!(array.row_ft_exact(n, &Character::Torus { l: 0 }).unwrap().re, 1.0);
        }
    }
}

#[test]
fn proof_identity_gap_shrinks_along_the_grid() {
    let array = torus_rademacher(-0.5);
    for l in 1..=4 {
        let chi = Character::Torus { l };
        let gaps: Vec<f64> = VerifyConfig::default_grid()
            .into_iter()
            .map(|n| (array.symmetric_stat(n, &chi).unwrap() - 0.5 * array.sum_var_g(n, &chi).unwrap()).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        // n(1 - cos(ℓ/√n)) - ℓ²/2 ≈ -ℓ⁴/(24n)
        let l4 = (l * l * l * l) as f64;
        assert!((*gaps.last().unwrap() - l4 / 24e6).abs() <= 1e-3 * l4 / 24e6);
    }
}

#[test]
fn tail_sums_are_monotone_in_the_neighbourhood() {
    let array = TriangularArray::new(
        GroupId::Torus,
        ArrayKind::IidSymmetric {
            atoms: vec![
                (ElementRule::Fixed(GroupElement::torus_angle(0.3).unwrap()), 0.3),
                (ElementRule::Fixed(GroupElement::torus_angle(1.0).unwrap()), 0.2),
                (ElementRule::Angle(Schedule::power(2.0, -0.5)), 0.5),
            ],
        },
        Schedule::identity(),
    )
    .unwrap();
    let eps = [PI / 16.0, PI / 8.0, PI / 4.0, PI / 2.0, 3.0];
    for n in [10u64, 100, 1000] {
        let tails: Vec<f64> = eps
            .iter()
            .map(|&e| array.sum_tail(n, &Neighborhood::Arc { eps: e }).unwrap())
            .collect();
        assert!(tails.windows(2).all(|w| w[0] >= w[1]), "{tails:?}");
    }
}

#[test]
fn rademacher_clt_on_the_circle() {
    let array = torus_rademacher(-0.5);
    let law = LimitLaw::gauss(GroupId::Torus, 1.0).unwrap();
    let chars: Vec<Character> = (1..=3).map(|l| Character::Torus { l }).collect();
    let d = ft_sup_distance(&array, &law, 1_000_000, &chars).unwrap();
    let oracle = (1..=3)
        .map(|l: i32| {
            let l = l as f64;
            ((l * 1e-3).cos().ln() * 1e6).exp() - (-l * l / 2.0).exp()
        })
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((d - oracle).abs() <= 1e-9);
    assert!(d <= 5e-4);

    let report = check_theorem(&array, &law, &VerifyConfig::defaults(&GroupId::Torus)).unwrap();
    assert_eq!(report.overall, OverallVerdict::Pass);
    assert_eq!(report.tag, TheoremTag::RademacherClt);

    match predict_limit(&array, &VerifyConfig::defaults(&GroupId::Torus)).unwrap() {
        Prediction::Law { law: predicted, tag } => {
            assert_eq!(tag, TheoremTag::RademacherClt);
            assert!((predicted.qform().b() - 1.0).abs() <= 1e-3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn rademacher_clt_fails_against_the_wrong_variance() {
    let array = torus_rademacher(-0.5);
    let law = LimitLaw::gauss(GroupId::Torus, 2.0).unwrap();
    let report = check_theorem(&array, &law, &VerifyConfig::defaults(&GroupId::Torus)).unwrap();
    assert_eq!(report.overall, OverallVerdict::Fail);
    assert!(!report.ft_passed);
}

#[test]
fn haar_limit_on_the_circle() {
    let array = torus_rademacher(-0.25);
    let mut cfg = VerifyConfig::defaults(&GroupId::Torus);
    cfg.grid = (2..=8).map(|e| 10u64.pow(e)).collect();
    let law = LimitLaw::haar(GroupId::Torus, CompactSubgroup::Full).unwrap();
    let report = check_theorem(&array, &law, &cfg).unwrap();
    assert_eq!(report.overall, OverallVerdict::Pass);
    assert_eq!(report.tag, TheoremTag::RademacherHaar);
}

#[test]
fn dyadic_bernoulli_poisson() {
    let array = dyadic_bernoulli(Schedule::power(2.0, -1.0));
    let law = poisson_law(2.0);
    let cfg = VerifyConfig::defaults(&array.group());
    let report = check_theorem(&array, &law, &cfg).unwrap();
    assert_eq!(report.overall, OverallVerdict::Pass, "{:#?}", report.conditions);
    assert_eq!(report.tag, TheoremTag::BernoulliPoisson);
    assert!(report.conditions.iter().any(|c| c.condition == "cylinder"));

    // the cylinder sums are constant: n p_n = 2 on the cylinders through x
    let x0 = GroupElement::padic_integer(array.group(), 5).unwrap();
    for n in cfg.grid.iter().copied() {
        assert_eq!(array.sum_cylinder(n, &x0, 2).unwrap(), 2.0);
        assert_eq!(array.sum_cylinder(n, &x0, 3).unwrap(), 0.0);
    }
}

#[test]
fn mismatched_poisson_rate_is_detected() {
    let array = dyadic_bernoulli(Schedule::power(1.0, -1.0));
    let law = poisson_law(2.0);
    let chi = Character::Padic { d: 0, l: 1 };
    let d = ft_sup_distance(&array, &law, 10_000_000, &[chi]).unwrap();
    let oracle = ((-2.0f64).exp() - (-4.0f64).exp()).abs();
    assert!((d - oracle).abs() <= 1e-6, "{d} vs {oracle}");
    let report = check_theorem(&array, &law, &VerifyConfig::defaults(&array.group())).unwrap();
    assert_eq!(report.overall, OverallVerdict::Fail);
}

#[test]
fn dyadic_bernoulli_haar() {
    let array = dyadic_bernoulli(Schedule::power(1.0, -0.5));
    let cfg = VerifyConfig::defaults(&array.group());
    let Prediction::Law { law, tag } = predict_limit(&array, &cfg).unwrap() else {
        panic!("unclassified")
    };
    assert_eq!(tag, TheoremTag::BernoulliHaar);
    assert_eq!(law.subgroup(), CompactSubgroup::Full);
    assert_eq!(check_theorem(&array, &law, &cfg).unwrap().overall, OverallVerdict::Pass);

    // x = 4 generates Λ_2
    let group = array.group();
    let x = GroupElement::padic_integer(group, 4).unwrap();
    let array = TriangularArray::bernoulli(x, Schedule::power(1.0, -0.5), Schedule::identity()).unwrap();
    let Prediction::Law { law, .. } = predict_limit(&array, &cfg).unwrap() else {
        panic!("unclassified")
    };
    assert_eq!(law.subgroup(), CompactSubgroup::Lambda(2));
}

#[test]
fn solenoid_rademacher_clt() {
    let group = GroupId::solenoid(2, 16).unwrap();
    let array = TriangularArray::rademacher(
        group,
        ElementRule::Angle(Schedule::power(1.0, -0.5)),
        Schedule::identity(),
    )
    .unwrap();
    let law = LimitLaw::gauss(group, 1.0).unwrap();
    for d in 0..=2u32 {
        for l in -3..=3i64 {
            let z = array.row_ft_exact(1_000_000, &Character::Solenoid { d, l }).unwrap();
            let target = (-((l * l) as f64) / 2f64.powi(2 * d as i32 + 1)).exp();
            assert!((z.re - target).abs() <= 5e-4 && z.im.abs() <= 1e-12);
        }
    }
    let report = check_theorem(&array, &law, &VerifyConfig::defaults(&group)).unwrap();
    assert_eq!(report.overall, OverallVerdict::Pass);
}

#[test]
fn equivalent_statements_agree() {
    let mut cfg = VerifyConfig::defaults(&GroupId::Torus);
    cfg.grid = (2..=8).map(|e| 10u64.pow(e)).collect();
    cfg.chars = [-3, -2, -1, 1, 2, 3].into_iter().map(|l| Character::Torus { l }).collect();

    let clt = crosscheck_gensym2(&torus_rademacher(-0.5), 1.0, &cfg).unwrap();
    assert!(clt.consistent && clt.ft && clt.symmetric_stat && clt.variance_and_tails);

    let haar = crosscheck_gensym2(&torus_rademacher(-0.25), 1.0, &cfg).unwrap();
    assert!(haar.consistent && !haar.ft && !haar.symmetric_stat && !haar.variance_and_tails);

    let degenerate = TriangularArray::rademacher(
        GroupId::Torus,
        ElementRule::Fixed(GroupElement::identity(GroupId::Torus)),
        Schedule::identity(),
    )
    .unwrap();
    let r = crosscheck_gensym2(&degenerate, 0.0, &cfg).unwrap();
    assert!(r.consistent && r.ft);

    let bernoulli = dyadic_bernoulli(Schedule::power(2.0, -1.0));
    assert!(crosscheck_gensym2(&bernoulli, 0.0, &VerifyConfig::defaults(&bernoulli.group())).is_err());
}

#[test]
fn reports_are_deterministic() {
    let array = torus_rademacher(-0.5);
    let law = LimitLaw::gauss(GroupId::Torus, 1.0).unwrap();
    let cfg = VerifyConfig::defaults(&GroupId::Torus);
    let a = check_theorem(&array, &law, &cfg).unwrap();
    let b = check_theorem(&array, &law, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn compound_growth_tracks_the_exponential() {
    let n = 1_000_000;
    for a in -5..=5 {
        let e = (a as f64).exp();
        assert!((compound_growth(a as f64, n).unwrap() - e).abs() <= 1e-4 * e);
    }
    assert_eq!(compound_growth(-(n as f64), n).unwrap(), 0.0);
    assert!(compound_growth(-(n as f64) - 1.0, n).is_err());
}

#[test]
fn tightening_the_tolerance_never_creates_convergence() {
    let seqs: Vec<Vec<(u64, f64)>> = vec![
        (1..=8).map(|e| (10u64.pow(e), 3.0 + 1.0 / 10f64.powi(e as i32))).collect(),
        (1..=8).map(|e| (10u64.pow(e), (-1f64).powi(e as i32))).collect(),
        (1..=8).map(|e| (10u64.pow(e), 1.0 / e as f64)).collect(),
    ];
    for seq in &seqs {
        let mut was_inconclusive = false;
        for tol in [1e-1, 1e-2, 1e-3, 1e-5, 1e-8] {
            let rule = TrendRule { tol, ..TrendRule::default() };
            let v = trend_classify(seq, &rule).unwrap();
            if was_inconclusive {
                assert_eq!(v.trend, Trend::Inconclusive);
            }
            was_inconclusive = v.trend == Trend::Inconclusive;
        }
    }
}

#[test]
fn table_schedules_drive_arrays() {
    let rows = Schedule::Table {
        values: vec![
            TablePoint { n: 1, value: 1.0 },
            TablePoint { n: 2, value: 4.0 },
            TablePoint { n: 3, value: 9.0 },
        ],
    };
    let array = TriangularArray::rademacher(
        GroupId::Torus,
        ElementRule::Fixed(GroupElement::torus_angle(PI / 4.0).unwrap()),
        rows,
    )
    .unwrap();
    assert_eq!(array.k_n(2).unwrap(), 4);
    let z = array.row_ft_exact(2, &Character::Torus { l: 1 }).unwrap();
    assert!((z.re - 0.25).abs() <= 1e-15);
    assert!(array.k_n(4).is_err());
}
