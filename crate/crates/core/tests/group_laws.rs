use std::f64::consts::{FRAC_PI_2, PI, TAU};

use lcalim_core::{Character, GroupElement, GroupId};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 10_000;

fn groups() -> Vec<GroupId> {
    vec![
        GroupId::Torus,
        GroupId::padic(3, 8).unwrap(),
        GroupId::padic(2, 16).unwrap(),
        GroupId::solenoid(2, 12).unwrap(),
        GroupId::solenoid(5, 6).unwrap(),
    ]
}

fn element(group: GroupId, rng: &mut ChaCha8Rng) -> GroupElement {
    match group {
        GroupId::Torus => GroupElement::torus_turns(rng.random_range(-0.5..0.5)).unwrap(),
        GroupId::Padic { p, depth } => {
            GroupElement::padic_integer(group, rng.random_range(0..p.pow(depth + 1)) as i128).unwrap()
        }
        GroupId::Solenoid { p, depth } => GroupElement::solenoid_parts(
            group,
            rng.random_range(-0.5..0.5),
            rng.random_range(0..p.pow(depth)),
        )
        .unwrap(),
    }
}

fn character(group: GroupId, rng: &mut ChaCha8Rng) -> Character {
    match group {
        GroupId::Torus => Character::Torus { l: rng.random_range(-50..=50) },
        GroupId::Padic { p, depth } => {
            let d = rng.random_range(0..=depth);
            Character::Padic { d, l: rng.random_range(0..p.pow(d + 1)) }
        }
        GroupId::Solenoid { depth, .. } => Character::Solenoid {
            d: rng.random_range(0..=depth),
            l: rng.random_range(-50..=50),
        },
    }
}

fn same(x: &GroupElement, y: &GroupElement) -> bool {
    if x.group().is_padic() {
        x == y
    } else {
        x.approx_eq(y, 1e-12 / TAU)
    }
}

#[test]
fn group_axioms_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for group in groups() {
        let e = GroupElement::identity(group);
        for _ in 0..SAMPLES {
            let (x, y, z) = (element(group, &mut rng), element(group, &mut rng), element(group, &mut rng));
            assert!(same(&x.add(&y).unwrap(), &y.add(&x).unwrap()), "{group}: commutativity");
            let l = x.add(&y).unwrap().add(&z).unwrap();
            let r = x.add(&y.add(&z).unwrap()).unwrap();
            assert!(same(&l, &r), "{group}: associativity at {x} {y} {z}");
            assert!(same(&x.add(&e).unwrap(), &x), "{group}: identity");
            let zero = x.add(&x.neg()).unwrap();
            assert!(same(&zero, &e), "{group}: inverse of {x}");
            if group.is_padic() {
                assert!(zero.is_identity());
            }
        }
    }
}

#[test]
fn characters_are_unimodular_homomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for group in groups() {
        for _ in 0..SAMPLES {
            let (x, y) = (element(group, &mut rng), element(group, &mut rng));
            let chi = character(group, &mut rng);
            let lhs = chi.eval(&x.add(&y).unwrap()).unwrap();
            let rhs = chi.eval(&x).unwrap() * chi.eval(&y).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10, "{group} {chi}: {lhs} vs {rhs}");
            assert!((chi.eval(&x).unwrap().norm() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn local_inner_is_additive_in_the_character_and_odd() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..SAMPLES {
        let x = element(GroupId::Torus, &mut rng);
        let (l1, l2) = (rng.random_range(-30..=30i64), rng.random_range(-30..=30i64));
        let g = |l: i64| x.local_inner(&Character::Torus { l }).unwrap();
        assert!((g(l1 + l2) - (g(l1) + g(l2))).abs() <= 1e-12);
        let chi = Character::Torus { l: l1 };
        assert_eq!(x.neg().local_inner(&chi).unwrap(), -x.local_inner(&chi).unwrap());
    }
    let group = GroupId::solenoid(3, 8).unwrap();
    for _ in 0..SAMPLES {
        let x = element(group, &mut rng);
        let d = rng.random_range(0..=8u32);
        let (l1, l2) = (rng.random_range(-30..=30i64), rng.random_range(-30..=30i64));
        let g = |l: i64| x.local_inner(&Character::Solenoid { d, l }).unwrap();
        assert!((g(l1 + l2) - (g(l1) + g(l2))).abs() <= 1e-12);
        let chi = Character::Solenoid { d, l: l1 };
        assert_eq!(x.neg().local_inner(&chi).unwrap(), -x.local_inner(&chi).unwrap());
    }
}

#[test]
fn local_identity_on_the_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..SAMPLES {
        let theta: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        let x = GroupElement::torus_angle(theta).unwrap();
        let chi = Character::Torus { l: rng.random_range(-40..=40) };
        let g = x.local_inner(&chi).unwrap();
        let z = Complex64::from_polar(1.0, g);
        assert!((chi.eval(&x).unwrap() - z).norm() <= 1e-10);
    }
}

#[test]
fn local_identity_on_the_solenoid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, depth) in [(2u64, 12u32), (3, 8), (7, 5)] {
        let group = GroupId::solenoid(p, depth).unwrap();
        for _ in 0..SAMPLES {
            let d = rng.random_range(0..=depth);
            // |arg y_d| ≤ π/(2p^d) with y_0 on the line through the identity
            let s: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
            let branch = p.pow(d) * rng.random_range(0..p.pow(depth - d));
            let x = GroupElement::solenoid_parts(group, s / TAU, branch).unwrap();
            let chi = Character::Solenoid { d, l: rng.random_range(-40..=40) };
            let z = Complex64::from_polar(1.0, x.local_inner(&chi).unwrap());
            assert!((chi.eval(&x).unwrap() - z).norm() <= 1e-10, "{x} {chi}");
        }
    }
}

#[test]
fn padic_characters_are_trivial_on_the_matching_lambda() {
    let (p, depth) = (3u64, 4u32);
    let group = GroupId::padic(p, depth).unwrap();
    let modulus = p.pow(depth + 1);
    for d in 0..=depth {
        let step = p.pow(d + 1);
        for l in 0..step {
            let chi = Character::Padic { d, l };
            for v in (0..modulus).step_by(step as usize) {
                let x = GroupElement::padic_integer(group, v as i128).unwrap();
                assert_eq!(chi.phase(&x).unwrap(), 0.0, "{chi} at {v}");
                assert_eq!(x.local_inner(&chi).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn padic_metric_is_invariant_and_satisfies_the_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let group = GroupId::padic(2, 16).unwrap();
    for _ in 0..SAMPLES {
        let (x, y, z) = (element(group, &mut rng), element(group, &mut rng), element(group, &mut rng));
        let dxy = x.padic_metric(&y).unwrap();
        let shifted = x.add(&z).unwrap().padic_metric(&y.add(&z).unwrap()).unwrap();
        assert_eq!(dxy, shifted);
        assert!(dxy <= x.padic_metric(&z).unwrap() + z.padic_metric(&y).unwrap());
        assert_eq!(dxy, y.padic_metric(&x).unwrap());
    }
}

#[test]
fn arg_convention_is_half_open() {
    let minus_one = GroupElement::torus_angle(PI).unwrap();
    assert_eq!(minus_one.arg().unwrap(), -PI);
    assert_eq!(GroupElement::torus_angle(-PI).unwrap().arg().unwrap(), -PI);
}

proptest! {
    #[test]
    fn padic_integers_add_like_residues(a in 0u64..(1 << 20), b in 0u64..(1 << 20)) {
        let group = GroupId::padic(2, 16).unwrap();
        let m = 1u64 << 17;
        let x = GroupElement::padic_integer(group, a as i128).unwrap();
        let y = GroupElement::padic_integer(group, b as i128).unwrap();
        prop_assert_eq!(x.add(&y).unwrap().residue(), Some((a + b) % m));
        prop_assert_eq!(x.sub(&y).unwrap().residue(), Some((a % m + m - b % m) % m));
    }

    #[test]
    fn character_ids_parse_back(d in 0u32..6, l in -100i64..100) {
        let group = GroupId::solenoid(3, 8).unwrap();
        let chi = Character::Solenoid { d, l };
        prop_assert_eq!(Character::parse(&group, &chi.id()).unwrap(), chi);
    }

    #[test]
    fn solenoid_lift_projects_back(t in -0.5f64..0.5, branch in 0u64..729, k in 0u64..3) {
        let group = GroupId::solenoid(3, 6).unwrap();
        let x = GroupElement::solenoid_parts(group, t, branch).unwrap();
        let back = x.solenoid_lift(k).unwrap().solenoid_project().unwrap();
        prop_assert!(back.approx_eq(&x, 1e-12));
    }
}
