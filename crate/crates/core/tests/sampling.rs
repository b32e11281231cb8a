use std::f64::consts::PI;

use lcalim_core::{
    empirical_ft, empirical_ft_direct, empirical_ft_law, sample_limit_law, validate_levy,
    ArrayKind, Character, CompactSubgroup, DiscreteMeasure, ElementRule, GroupElement, GroupId,
    LimitLaw, QuadraticForm, Schedule, SeededStream, TriangularArray,
};
use num_complex::Complex64;

const M: u64 = 40_000;

fn bound(k: f64) -> f64 {
    k / (M as f64).sqrt()
}

fn torus_chars() -> Vec<Character> {
    (-4..=4).map(|l| Character::Torus { l }).collect()
}

fn arrays() -> Vec<(TriangularArray, Vec<Character>)> {
    let padic = GroupId::padic(3, 6).unwrap();
    let padic_chars: Vec<Character> = (0..=2u32)
        .flat_map(|d| (0..3u64.pow(d + 1)).map(move |l| Character::Padic { d, l }))
        .collect();
    let solenoid = GroupId::solenoid(2, 10).unwrap();
    let solenoid_chars: Vec<Character> = (0..=2u32)
        .flat_map(|d| (-3..=3i64).map(move |l| Character::Solenoid { d, l }))
        .collect();
    vec![
        (
            TriangularArray::rademacher(
                GroupId::Torus,
                ElementRule::Angle(Schedule::power(1.0, -0.5)),
                Schedule::identity(),
            )
            .unwrap(),
            torus_chars(),
        ),
        (
            TriangularArray::bernoulli(
                GroupElement::torus_angle(2.0).unwrap(),
                Schedule::power(1.5, -1.0),
                Schedule::identity(),
            )
            .unwrap(),
            torus_chars(),
        ),
        (
            TriangularArray::bernoulli(
                GroupElement::padic_integer(padic, 1).unwrap(),
                Schedule::power(2.0, -1.0),
                Schedule::identity(),
            )
            .unwrap(),
            padic_chars.clone(),
        ),
        (
            TriangularArray::new(
                padic,
                ArrayKind::General {
                    pattern: vec![
                        vec![(ElementRule::Fixed(GroupElement::padic_integer(padic, 2).unwrap()), 1.0)],
                        vec![
                            (ElementRule::Fixed(GroupElement::padic_integer(padic, 5).unwrap()), 0.5),
                            (ElementRule::Fixed(GroupElement::identity(padic)), 0.5),
                        ],
                    ],
                },
                Schedule::constant(7.0),
            )
            .unwrap(),
            padic_chars,
        ),
        (
            TriangularArray::rademacher(
                solenoid,
                ElementRule::Angle(Schedule::power(1.0, -0.5)),
                Schedule::identity(),
            )
            .unwrap(),
            solenoid_chars,
        ),
    ]
}

#[test]
fn empirical_transforms_match_the_exact_engine() {
    for (i, (array, chars)) in arrays().into_iter().enumerate() {
        for n in [10u64, 300] {
            let est = empirical_ft(&array, n, &chars, M, &SeededStream::new(42).child(i as u64)).unwrap();
            assert_eq!(est.stderr, 1.0 / (M as f64).sqrt());
            for (chi, z) in &est.estimates {
                let exact = array.row_ft_exact(n, chi).unwrap();
                assert!((z - exact).norm() <= bound(4.0), "array {i} n={n} {chi}: {z} vs {exact}");
                assert!(z.norm() <= 1.0 + 1e-12);
                if chi.is_trivial() {
                    assert_eq!(*z, Complex64::new(1.0, 0.0));
                }
            }
        }
    }
}

#[test]
fn shortcut_and_direct_samplers_agree() {
    for (i, (array, chars)) in arrays().into_iter().enumerate() {
        let n = 200;
        let a = empirical_ft(&array, n, &chars, M, &SeededStream::new(7).child(i as u64)).unwrap();
        let b = empirical_ft_direct(&array, n, &chars, M, &SeededStream::new(8).child(i as u64)).unwrap();
        for ((chi, x), (_, y)) in a.estimates.iter().zip(&b.estimates) {
            assert!((x - y).norm() <= bound(6.0), "array {i} {chi}: {x} vs {y}");
        }
    }
}

#[test]
fn wrapped_normal_has_the_gauss_transform() {
    for b in [0.3, 1.0, 2.5] {
        let law = LimitLaw::gauss(GroupId::Torus, b).unwrap();
        let est = empirical_ft_law(&law, &torus_chars(), M, &SeededStream::new(3)).unwrap();
        for (chi, z) in &est.estimates {
            let Character::Torus { l } = chi else { unreachable!() };
            let target = (-b * (l * l) as f64 / 2.0).exp();
            assert!((z.re - target).abs() <= bound(4.0), "b={b} l={l}");
            assert!(z.im.abs() <= bound(4.0));
        }
    }
}

#[test]
fn compound_poisson_draws_match_the_poisson_transform() {
    let group = GroupId::padic(3, 6).unwrap();
    let eta = DiscreteMeasure::new(
        group,
        vec![
            (GroupElement::padic_integer(group, 1).unwrap(), 1.5),
            (GroupElement::padic_integer(group, 10).unwrap(), 0.5),
        ],
    )
    .unwrap();
    let law = LimitLaw::compound_poisson(validate_levy(eta.clone()).unwrap()).unwrap();
    let chars: Vec<Character> = (0..9).map(|l| Character::Padic { d: 1, l }).collect();
    let est = empirical_ft_law(&law, &chars, M, &SeededStream::new(4)).unwrap();
    for (chi, z) in &est.estimates {
        let oracle: Complex64 = eta
            .atoms()
            .iter()
            .map(|(x, w)| *w * (chi.eval(x).unwrap() - 1.0))
            .sum::<Complex64>()
            .exp();
        assert!((z - oracle).norm() <= bound(4.0), "{chi}");
    }

    // on the circle the generalized Poisson factor carries the compensating shift
    let x = GroupElement::torus_angle(1.2).unwrap();
    let eta = DiscreteMeasure::point(x, 2.0).unwrap();
    let levy = validate_levy(eta).unwrap();
    let law = LimitLaw::new(
        CompactSubgroup::Trivial,
        GroupElement::identity(GroupId::Torus),
        QuadraticForm::zero(GroupId::Torus),
        levy,
    )
    .unwrap();
    let est = empirical_ft_law(&law, &torus_chars(), M, &SeededStream::new(5)).unwrap();
    for (chi, z) in &est.estimates {
        assert!((z - law.ft(chi).unwrap()).norm() <= bound(4.0), "{chi}");
    }
}

#[test]
fn haar_samples_are_uniform_on_the_subgroup() {
    let law = LimitLaw::haar(GroupId::Torus, CompactSubgroup::Cyclic(6)).unwrap();
    let est = empirical_ft_law(&law, &torus_chars(), M, &SeededStream::new(6)).unwrap();
    for (chi, z) in &est.estimates {
        let target = if law.ft(chi).unwrap().re == 1.0 { 1.0 } else { 0.0 };
        assert!((z - target).norm() <= bound(4.0), "{chi}");
    }
    let mut rng = SeededStream::new(9).rng();
    for _ in 0..1000 {
        let y = sample_limit_law(&law, &mut rng).unwrap();
        let k = y.arg().unwrap() / (PI / 3.0);
        assert!((k - k.round()).abs() <= 1e-9);
    }
}

#[test]
fn reruns_are_bit_identical_across_thread_counts() {
    let (array, chars) = arrays().swap_remove(0);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| empirical_ft(&array, 1000, &chars, 20_000, &SeededStream::new(42)).unwrap())
    };
    let a = run(1);
    let b = run(4);
    for ((_, x), (_, y)) in a.estimates.iter().zip(&b.estimates) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}
