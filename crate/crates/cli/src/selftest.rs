//! The acceptance suite. Every reference value is recomputed here from
//! scalar formulas rather than taken from the engine under test.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lcalim_core::{
    check_theorem, compound_growth, convolve, cpoisson_ft, crosscheck_gensym2, empirical_ft,
    genpoisson_ft, local_mean, predict_limit, trend_classify, validate_levy, Character,
    CompactSubgroup, DiscreteMeasure, ElementRule, GroupElement, GroupId, LimitLaw,
    OverallVerdict, Prediction, QuadraticForm, Result, Schedule, SeededStream, TheoremTag, Trend,
    TriangularArray, TrendRule, VerifyConfig,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

fn outcome(id: u32, title: &'static str, res: Result<(bool, String)>) -> CriterionOutcome {
    match res {
        Ok((passed, detail)) => CriterionOutcome { id, title, passed, detail },
        Err(e) => CriterionOutcome {
            id,
            title,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn geometric_grid(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|e| 10u64.pow(e)).collect()
}

fn torus_chars(ls: impl IntoIterator<Item = i64>) -> Vec<Character> {
    ls.into_iter().map(|l| Character::Torus { l }).collect()
}

/// Characters `χ_{d,ℓ}` of `Δ_p` with `d ≤ dmax`, all `ℓ` (the trivial one included).
fn padic_chars(p: u64, dmax: u32) -> Vec<Character> {
    let mut out = Vec::new();
    for d in 0..=dmax {
        let m = p.pow(d + 1);
        for l in 0..m {
            out.push(Character::Padic { d, l });
        }
    }
    out
}

pub fn torus_clt_array() -> Result<TriangularArray> {
    TriangularArray::rademacher(
        GroupId::Torus,
        ElementRule::Angle(Schedule::power(1.0, -0.5)),
        Schedule::identity(),
    )
}

pub fn padic_poisson_array() -> Result<TriangularArray> {
    let group = GroupId::padic(2, 16)?;
    TriangularArray::bernoulli(
        GroupElement::padic_digits(group, &[1])?,
        Schedule::power(2.0, -1.0),
        Schedule::identity(),
    )
}

fn c1() -> Result<(bool, String)> {
    let array = torus_clt_array()?;
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    for l in 1..=3i64 {
        let target = (-(l * l) as f64 / 2.0).exp();
        let z = array.row_ft_exact(n, &Character::Torus { l })?;
        worst = worst.max((z - target).norm());
    }
    let law = LimitLaw::gauss(GroupId::Torus, 1.0)?;
    let report = check_theorem(&array, &law, &VerifyConfig::defaults(&GroupId::Torus))?;
    let ok = worst <= 5e-4 && report.overall == OverallVerdict::Pass;
    Ok((
        ok,
        format!(
            "max |ft - e^(-l^2/2)| at n=1e6 = {worst:.3e} (<= 5e-4), verdict {:?} ({:?})",
            report.overall, report.tag
        ),
    ))
}

fn c2() -> Result<(bool, String)> {
    let array = TriangularArray::rademacher(
        GroupId::Torus,
        ElementRule::Angle(Schedule::power(1.0, -0.25)),
        Schedule::identity(),
    )?;
    let mut worst: f64 = 0.0;
    for chi in torus_chars(1..=5) {
        worst = worst.max(array.row_ft_exact(10_000, &chi)?.norm());
    }
    let grid = geometric_grid(2, 8);
    let rule = TrendRule::default();
    let mut diverging = true;
    for chi in torus_chars(1..=5) {
        let seq: Result<Vec<(u64, f64)>> =
            grid.iter().map(|&n| Ok((n, array.symmetric_stat(n, &chi)?))).collect();
        diverging &= trend_classify(&seq?, &rule)?.trend == Trend::DivergesToInfinity;
    }
    Ok((
        worst <= 1e-6 && diverging,
        format!("max |ft| at n=1e4 = {worst:.3e} (<= 1e-6), symmetric_stat diverges for l=1..5: {diverging}"),
    ))
}

fn c3() -> Result<(bool, String)> {
    let array = padic_poisson_array()?;
    let n = 100_000;
    let mut worst: f64 = 0.0;
    let mut at_minus_one = f64::NAN;
    for chi in padic_chars(2, 2) {
        let Character::Padic { d, l } = chi else { unreachable!() };
        // x = 1, so χ_{d,ℓ}(x) = exp(2πiℓ/2^{d+1})
        let chi_x = Complex64::from_polar(1.0, TAU * l as f64 / 2f64.powi(d as i32 + 1));
        let target = (2.0 * (chi_x - 1.0)).exp();
        let z = array.row_ft_exact(n, &chi)?;
        worst = worst.max((z - target).norm());
        if d == 0 && l == 1 {
            at_minus_one = z.re;
        }
    }
    Ok((
        worst <= 1e-3,
        format!(
            "max |ft - exp(2(chi(x)-1))| over d<=2 at n=1e5 = {worst:.3e} (<= 1e-3); ft at chi(x)=-1: {at_minus_one:.6} vs e^-4 = {:.6}",
            (-4f64).exp()
        ),
    ))
}

fn c4() -> Result<(bool, String)> {
    let group = GroupId::padic(2, 16)?;
    let x = GroupElement::padic_digits(group, &[1])?;
    let array = TriangularArray::bernoulli(x, Schedule::power(1.0, -0.5), Schedule::identity())?;
    let haar = LimitLaw::haar(group, CompactSubgroup::Full)?;
    let mut worst: f64 = 0.0;
    let mut zero_set_ok = true;
    for chi in padic_chars(2, 2) {
        let limit = haar.ft(&chi)?;
        if chi.is_trivial() {
            zero_set_ok &= limit == Complex64::new(1.0, 0.0);
        } else {
            zero_set_ok &= limit == Complex64::new(0.0, 0.0);
            worst = worst.max(array.row_ft_exact(1_000_000, &chi)?.norm());
        }
    }
    let mut cfg = VerifyConfig::defaults(&group);
    cfg.chars = padic_chars(2, 2);
    let predicted = match predict_limit(&array, &cfg)? {
        Prediction::Law { law, tag } => tag == TheoremTag::BernoulliHaar && law.subgroup() == CompactSubgroup::Full,
        Prediction::Unclassified(_) => false,
    };
    Ok((
        worst <= 1e-3 && zero_set_ok && predicted,
        format!(
            "max |ft| over nontrivial d<=2 at n=1e6 = {worst:.3e} (<= 1e-3), Haar ft zero exactly off the trivial character: {zero_set_ok}, predicted Haar on the full group: {predicted}"
        ),
    ))
}

fn c5() -> Result<(bool, String)> {
    let group = GroupId::solenoid(2, 16)?;
    let array = TriangularArray::rademacher(
        group,
        ElementRule::Angle(Schedule::power(1.0, -0.5)),
        Schedule::identity(),
    )?;
    let mut worst: f64 = 0.0;
    for d in 0..=2u32 {
        for l in -3..=3i64 {
            let target = (-((l * l) as f64) / 2f64.powi(2 * d as i32 + 1)).exp();
            let z = array.row_ft_exact(1_000_000, &Character::Solenoid { d, l })?;
            worst = worst.max((z - target).norm());
        }
    }
    Ok((
        worst <= 5e-4,
        format!("max |ft - e^(-l^2/2^(2d+1))| over d<=2, |l|<=3 at n=1e6 = {worst:.3e} (<= 5e-4)"),
    ))
}

/// The symmetric torus instances of the equivalence suite and whether each
/// should converge.
pub fn equivalence_instances() -> Result<Vec<(&'static str, TriangularArray, f64, bool)>> {
    let t = GroupId::Torus;
    let angle = |c: f64, e: f64| ElementRule::Angle(Schedule::power(c, e));
    Ok(vec![
        (
            "rademacher n^-1/2, K=n",
            TriangularArray::rademacher(t, angle(1.0, -0.5), Schedule::identity())?,
            1.0,
            true,
        ),
        (
            "rademacher n^-1/2, K=2n",
            TriangularArray::rademacher(t, angle(1.0, -0.5), Schedule::power(2.0, 1.0))?,
            2.0,
            true,
        ),
        (
            "two-scale symmetric, K=n",
            TriangularArray::new(
                t,
                lcalim_core::ArrayKind::IidSymmetric {
                    atoms: vec![(angle(1.0, -0.5), 0.5), (angle(2.0, -0.5), 0.5)],
                },
                Schedule::identity(),
            )?,
            2.5,
            true,
        ),
        (
            "rademacher n^-1/4, K=n",
            TriangularArray::rademacher(t, angle(1.0, -0.25), Schedule::identity())?,
            1.0,
            false,
        ),
        (
            "rademacher n^-1/3, K=n",
            TriangularArray::rademacher(t, angle(1.0, -1.0 / 3.0), Schedule::identity())?,
            1.0,
            false,
        ),
    ])
}

fn c6() -> Result<(bool, String)> {
    let mut cfg = VerifyConfig::defaults(&GroupId::Torus);
    cfg.grid = geometric_grid(2, 8);
    cfg.chars = torus_chars([-3, -2, -1, 1, 2, 3]);
    let mut all = true;
    let mut parts = Vec::new();
    for (name, array, b, converges) in equivalence_instances()? {
        let r = crosscheck_gensym2(&array, b, &cfg)?;
        let expected = r.ft == converges;
        all &= r.consistent && expected;
        parts.push(format!(
            "{name}: (i)={} (ii)={} (iii)={}",
            r.ft, r.symmetric_stat, r.variance_and_tails
        ));
    }
    Ok((all, parts.join("; ")))
}

fn random_element<R: Rng>(group: GroupId, rng: &mut R) -> Result<GroupElement> {
    match group {
        GroupId::Torus => GroupElement::torus_turns(rng.random_range(-0.5..0.5)),
        GroupId::Padic { p, depth } => {
            let m = p.pow(depth + 1);
            GroupElement::padic_integer(group, rng.random_range(0..m) as i128)
        }
        GroupId::Solenoid { p, depth } => {
            let m = p.pow(depth);
            GroupElement::solenoid_parts(group, rng.random_range(-0.5..0.5), rng.random_range(0..m))
        }
    }
}

fn random_character<R: Rng>(group: GroupId, rng: &mut R) -> Character {
    match group {
        GroupId::Torus => Character::Torus { l: rng.random_range(-20..=20) },
        GroupId::Padic { p, depth } => {
            let d = rng.random_range(0..=depth.min(4));
            Character::Padic { d, l: rng.random_range(0..p.pow(d + 1)) }
        }
        GroupId::Solenoid { depth, .. } => Character::Solenoid {
            d: rng.random_range(0..=depth.min(4)),
            l: rng.random_range(-20..=20),
        },
    }
}

fn random_measure<R: Rng>(group: GroupId, rng: &mut R) -> Result<DiscreteMeasure> {
    let k = rng.random_range(1..=4);
    let mut atoms = Vec::with_capacity(k);
    for _ in 0..k {
        let mut x = random_element(group, rng)?;
        while x.is_identity() {
            x = random_element(group, rng)?;
        }
        atoms.push((x, rng.random_range(0.01..2.0)));
    }
    DiscreteMeasure::new(group, atoms)
}

fn test_groups() -> Result<Vec<GroupId>> {
    Ok(vec![GroupId::Torus, GroupId::padic(3, 8)?, GroupId::solenoid(3, 8)?])
}

/// `ψ(χ1χ2) + ψ(χ1χ2⁻¹) = 2(ψ(χ1) + ψ(χ2))` in exact rational arithmetic,
/// with `ψ(χ_{d,ℓ}) ∝ ℓ²/p^{2d}`.
fn parallelogram_exact(group: GroupId, [sum, diff, a, b]: [&Character; 4]) -> Result<bool> {
    let [s, d, a, b] = [sum, diff, a, b].map(|c| QuadraticForm::unit_index(&group, c));
    let (s, d, a, b) = (s?, d?, a?, b?);
    let den = s.1.max(d.1).max(a.1).max(b.1);
    let lift = |(num, q): (u128, u128)| num * (den / q);
    Ok(lift(s) + lift(d) == 2 * (lift(a) + lift(b)))
}

fn c7() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut shift_err: f64 = 0.0;
    let mut conv_err: f64 = 0.0;
    let mut parallelogram_ok = true;
    for group in test_groups()? {
        for _ in 0..1000 {
            let eta = random_measure(group, &mut rng)?;
            let chi = random_character(group, &mut rng);
            let levy = validate_levy(eta.clone())?;
            let lhs = cpoisson_ft(&eta, &chi)?;
            let rhs = genpoisson_ft(&levy, &chi)? * chi.eval(&local_mean(&eta)?)?;
            shift_err = shift_err.max((lhs - rhs).norm());

            let mu = random_measure(group, &mut rng)?;
            let fconv = convolve(&eta, &mu)?.fourier(&chi)?;
            let direct = |m: &DiscreteMeasure| -> Result<Complex64> {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, w) in m.atoms() {
                    acc += *w * chi.eval(x)?;
                }
                Ok(acc)
            };
            conv_err = conv_err.max((fconv - direct(&eta)? * direct(&mu)?).norm());

            if !group.is_padic() {
                let b = rng.random_range(1..=5) as f64;
                let q = QuadraticForm::new(group, b)?;
                let chi2 = match chi {
                    Character::Solenoid { d, .. } => Character::Solenoid { d, l: rng.random_range(-20..=20) },
                    _ => random_character(group, &mut rng),
                };
                let sum = chi.mul(&chi2, &group)?;
                let diff = chi.mul(&chi2.inverse(&group)?, &group)?;
                parallelogram_ok &= parallelogram_exact(group, [&sum, &diff, &chi, &chi2])?;
                if group == GroupId::Torus {
                    parallelogram_ok &=
                        q.eval(&sum)? + q.eval(&diff)? == 2.0 * (q.eval(&chi)? + q.eval(&chi2)?);
                }
            }
        }
    }
    Ok((
        shift_err <= 1e-10 && conv_err <= 1e-10 && parallelogram_ok,
        format!(
            "shift identity max err {shift_err:.3e}, convolution max err {conv_err:.3e} (both <= 1e-10), parallelogram exact: {parallelogram_ok}"
        ),
    ))
}

fn c8() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0u64;
    let mut checked = 0u64;
    let per_group = 100_000 / 3 + 1;
    for group in test_groups()? {
        for _ in 0..per_group {
            let (x, chi) = match group {
                GroupId::Torus => {
                    let l = loop {
                        let l: i64 = rng.random_range(-20..=20);
                        if l != 0 {
                            break l;
                        }
                    };
                    let a = FRAC_PI_2 / l.unsigned_abs() as f64;
                    (GroupElement::torus_angle(rng.random_range(-a..a))?, Character::Torus { l })
                }
                GroupId::Padic { p, depth } => {
                    let d = rng.random_range(0..depth);
                    let chi = Character::Padic { d, l: rng.random_range(0..p.pow(d + 1)) };
                    let m = p.pow(depth - d);
                    let x = GroupElement::padic_integer(group, (rng.random_range(0..m) * p.pow(d + 1)) as i128)?;
                    (x, chi)
                }
                GroupId::Solenoid { p, depth } => {
                    let d = rng.random_range(0..=depth.min(4));
                    let l = loop {
                        let l: i64 = rng.random_range(-20..=20);
                        if l != 0 {
                            break l;
                        }
                    };
                    // |arg y_0| · |ℓ| / p^d ≤ π/2 and |arg y_0| < π/2
                    let s_max = (FRAC_PI_2 * p.pow(d) as f64 / l.unsigned_abs() as f64).min(FRAC_PI_2);
                    let s = rng.random_range(-s_max..s_max);
                    let branch = p.pow(d) * rng.random_range(0..p.pow(depth - d));
                    let x = GroupElement::solenoid_parts(group, s / TAU, branch)?;
                    (x, Character::Solenoid { d, l })
                }
            };
            let g = x.local_inner(&chi)?;
            if g.abs() > FRAC_PI_2 {
                continue;
            }
            checked += 1;
            let v = chi.one_minus_re(&x)?;
            if !(0.25 * g * g <= v && v <= 0.5 * g * g) {
                violations += 1;
            }
        }
    }
    Ok((
        violations == 0 && checked >= 100_000,
        format!("{checked} samples with |g| <= pi/2 inside the local identity region, {violations} violations"),
    ))
}

fn c9() -> Result<(bool, String)> {
    let n = 1_000_000u64;
    let mut worst: f64 = 0.0;
    for a in -5..=5i32 {
        let e = (a as f64).exp();
        worst = worst.max((compound_growth(a as f64, n)? - e).abs() / e);
    }
    let zero = compound_growth(-(n as f64), n)?;
    Ok((
        worst <= 1e-4 && zero == 0.0,
        format!("max relative error {worst:.3e} (<= 1e-4), value at alpha=-n: {zero}"),
    ))
}

fn mc_check(array: &TriangularArray, chars: &[Character], seed: u64) -> Result<(f64, Vec<Complex64>)> {
    let m = 100_000;
    let est = empirical_ft(array, 1000, chars, m, &SeededStream::new(seed))?;
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for (chi, z) in &est.estimates {
        worst = worst.max((z - array.row_ft_exact(1000, chi)?).norm());
        values.push(*z);
    }
    Ok((worst, values))
}

fn c10() -> Result<(bool, String)> {
    let bound = 4.0 / (100_000f64).sqrt();
    let torus = torus_clt_array()?;
    let tchars = torus_chars(1..=3);
    let padic = padic_poisson_array()?;
    let pchars = padic_chars(2, 2);
    let (e1, v1) = mc_check(&torus, &tchars, 42)?;
    let (e3, v3) = mc_check(&padic, &pchars, 42)?;
    let (_, v1b) = mc_check(&torus, &tchars, 42)?;
    let (_, v3b) = mc_check(&padic, &pchars, 42)?;
    let same = |a: &[Complex64], b: &[Complex64]| {
        a.iter()
            .zip(b)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
    };
    let identical = same(&v1, &v1b) && same(&v3, &v3b);
    Ok((
        e1 <= bound && e3 <= bound && identical,
        format!(
            "max err torus {e1:.3e}, p-adic {e3:.3e} (bound 4/sqrt(M) = {bound:.3e}), rerun bit-identical: {identical}"
        ),
    ))
}

fn c11() -> Result<(bool, String)> {
    let array = padic_poisson_array()?;
    let group = array.group();
    let grid = VerifyConfig::default_grid();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for r in 1..=3u32 {
        let classes = 1u64 << r;
        for c in 1..classes {
            let x0 = GroupElement::padic_integer(group, c as i128)?;
            // η = 2δ_1: the cylinder c + Λ_r holds the atom iff c ≡ 1 mod 2^r
            let target = if c == 1 { 2.0 } else { 0.0 };
            for &n in &grid {
                worst = worst.max((array.sum_cylinder(n, &x0, r)? - target).abs());
            }
            count += 1;
        }
    }
    Ok((
        worst <= 1e-9,
        format!("{count} cylinders with r<=3, max |n p_n 1{{x in cyl}} - eta(cyl)| = {worst:.3e} (<= 1e-9)"),
    ))
}

pub const TITLES: [&str; 11] = [
    "torus Rademacher CLT",
    "torus Haar limit",
    "2-adic Bernoulli Poisson",
    "2-adic Bernoulli Haar",
    "solenoid Rademacher CLT",
    "equivalence suite",
    "measure-factor identities",
    "inequality band",
    "compound growth",
    "Monte Carlo cross-validation",
    "cylinder convergence",
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: u32) -> CriterionOutcome {
    let res = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        11 => c11(),
        _ => Ok((false, "no such criterion".into())),
    };
    let title = TITLES.get(id.wrapping_sub(1) as usize).copied().unwrap_or("unknown");
    outcome(id, title, res)
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=11).map(run_criterion).collect()
}
