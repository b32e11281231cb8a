//! Seeded Monte Carlo simulation of row sums and limit laws, and empirical
//! characteristic functions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, Poisson};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::array::TriangularArray;
use crate::error::{Error, Result};
use crate::group::{Character, CompactSubgroup, GroupElement, GroupId};
use crate::measure::{local_mean, LimitLaw};

/// Largest `K_n` the samplers accept unless told otherwise.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// `derive_seed(master, path)`: the first 8 bytes of
/// `SHA-256("lcalim-seed" || master || path...)`, all integers little-endian.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"lcalim-seed");
    h.update(master.to_le_bytes());
    for p in path {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeededStream {
    pub master: u64,
    pub path: Vec<u64>,
}

impl SeededStream {
    pub fn new(master: u64) -> Self {
        SeededStream {
            master,
            path: Vec::new(),
        }
    }

    pub fn child(&self, i: u64) -> Self {
        let mut path = self.path.clone();
        path.push(i);
        SeededStream {
            master: self.master,
            path,
        }
    }

    pub fn seed(&self) -> u64 {
        derive_seed(self.master, &self.path)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed())
    }
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p checked to lie in (0, 1)").sample(rng)
}

/// Counts of `n` draws from the atom weights `ws` (summing to 1), via conditional binomials.
fn multinomial<R: Rng + ?Sized>(rng: &mut R, n: u64, ws: &[f64]) -> Vec<u64> {
    let mut out = vec![0; ws.len()];
    let mut left = n;
    let mut mass: f64 = ws.iter().sum();
    for (i, &w) in ws.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == ws.len() {
            out[i] = left;
            break;
        }
        let c = if mass > 0.0 { binomial(rng, left, w / mass) } else { 0 };
        out[i] = c;
        left -= c;
        mass -= w;
    }
    out
}

fn count_as_i64(c: u64) -> Result<i64> {
    i64::try_from(c).map_err(|_| Error::InvalidArgument("count exceeds i64".into()))
}

/// `sample_row_sum(array, n, stream)`: draws each block of identically
/// distributed rows as a multinomial count vector over its atoms.
pub fn sample_row_sum<R: Rng + ?Sized>(
    array: &TriangularArray,
    n: u64,
    rng: &mut R,
    budget: u64,
) -> Result<GroupElement> {
    let rows = array.k_n(n)?;
    if rows > budget {
        return Err(Error::BudgetExceeded {
            needed: rows,
            budget,
        });
    }
    let mut acc = GroupElement::identity(array.group());
    for block in array.row_blocks(n)? {
        let atoms = block.dist.measure().atoms();
        let ws: Vec<f64> = atoms.iter().map(|&(_, w)| w).collect();
        let counts = multinomial(rng, block.mult, &ws);
        for (&(x, _), &c) in atoms.iter().zip(&counts) {
            if c > 0 {
                acc = acc.add(&x.scale(count_as_i64(c)?))?;
            }
        }
    }
    Ok(acc)
}

/// Row sum drawn one row at a time (reference sampler for small `K_n`).
pub fn sample_row_sum_direct<R: Rng + ?Sized>(
    array: &TriangularArray,
    n: u64,
    rng: &mut R,
    budget: u64,
) -> Result<GroupElement> {
    let rows = array.k_n(n)?;
    if rows > budget {
        return Err(Error::BudgetExceeded {
            needed: rows,
            budget,
        });
    }
    let mut acc = GroupElement::identity(array.group());
    for block in array.row_blocks(n)? {
        let atoms = block.dist.measure().atoms();
        for _ in 0..block.mult {
            let u: f64 = rng.random();
            let mut cum = 0.0;
            let mut pick = atoms.len() - 1;
            for (i, &(_, w)) in atoms.iter().enumerate() {
                cum += w;
                if u < cum {
                    pick = i;
                    break;
                }
            }
            acc = acc.add(&atoms[pick].0)?;
        }
    }
    Ok(acc)
}

/// Poisson count: inversion for `λ ≤ 30`, the library sampler beyond.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> Result<u64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidWeight(lambda));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    if lambda <= 30.0 {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cum = p;
        while u >= cum && k < 1_000 {
            k += 1;
            p *= lambda / k as f64;
            cum += p;
        }
        return Ok(k);
    }
    let d = Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(d.sample(rng) as u64)
}

fn sample_haar<R: Rng + ?Sized>(
    rng: &mut R,
    group: GroupId,
    h: CompactSubgroup,
) -> Result<GroupElement> {
    match (h, group) {
        (CompactSubgroup::Trivial, _) => Ok(GroupElement::identity(group)),
        (CompactSubgroup::Full, GroupId::Torus) => {
            GroupElement::torus_turns(rng.random::<f64>() - 0.5)
        }
        (CompactSubgroup::Cyclic(r), GroupId::Torus) => {
            let j = rng.random_range(0..r);
            GroupElement::torus_turns(j as f64 / r as f64)
        }
        (CompactSubgroup::Full, GroupId::Padic { p, depth }) => {
            let v = rng.random_range(0..p.pow(depth + 1));
            GroupElement::padic_integer(group, v as i128)
        }
        (CompactSubgroup::Lambda(r), GroupId::Padic { p, depth }) => {
            let v = rng.random_range(0..p.pow(depth + 1 - r));
            GroupElement::padic_integer(group, v as i128 * p.pow(r) as i128)
        }
        _ => Err(Error::Unsupported(format!("Haar sampling of {h:?} on {group}"))),
    }
}

/// `sample_limit_law(law, stream)`: independent factor draws added in the group.
pub fn sample_limit_law<R: Rng + ?Sized>(law: &LimitLaw, rng: &mut R) -> Result<GroupElement> {
    let group = law.group();
    if let GroupId::Solenoid { .. } = group {
        return Err(Error::Unsupported("limit-law sampling on the solenoid".into()));
    }
    let mut acc = sample_haar(rng, group, law.subgroup())?;
    acc = acc.add(&law.shift())?;
    let b = law.qform().b();
    if b > 0.0 {
        if group.is_padic() {
            return Err(Error::PadicQuadraticForm);
        }
        let normal = Normal::new(0.0, b.sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let theta: f64 = normal.sample(rng);
        acc = acc.add(&GroupElement::torus_turns(theta / TAU)?)?;
    }
    let eta = law.levy().measure();
    if !eta.is_zero() {
        for &(x, w) in eta.atoms() {
            let count = sample_poisson(rng, w)?;
            if count > 0 {
                acc = acc.add(&x.scale(count_as_i64(count)?))?;
            }
        }
        acc = acc.add(&local_mean(eta)?.neg())?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalFt {
    pub estimates: Vec<(Character, Complex64)>,
    pub replicates: u64,
    /// `M^{-1/2}`.
    pub stderr: f64,
}

fn average_ft(samples: &[GroupElement], chars: &[Character]) -> Result<Vec<(Character, Complex64)>> {
    let m = samples.len() as f64;
    chars
        .iter()
        .map(|chi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in samples {
                acc += chi.eval(x)?;
            }
            Ok((*chi, acc / m))
        })
        .collect()
}

fn replicate<F>(m: u64, stream: &SeededStream, draw: F) -> Result<Vec<GroupElement>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<GroupElement> + Sync,
{
    if m == 0 {
        return Err(Error::InvalidArgument("replicate count must be positive".into()));
    }
    (0..m)
        .into_par_iter()
        .map(|i| draw(&mut stream.child(i).rng()))
        .collect()
}

/// Draws `m` row sums on independent derived streams.
pub fn sample_row_sums(
    array: &TriangularArray,
    n: u64,
    m: u64,
    stream: &SeededStream,
    budget: u64,
) -> Result<Vec<GroupElement>> {
    replicate(m, stream, |rng| sample_row_sum(array, n, rng, budget))
}

/// `empirical_ft(array, n, chars, M, stream)`.
pub fn empirical_ft(
    array: &TriangularArray,
    n: u64,
    chars: &[Character],
    m: u64,
    stream: &SeededStream,
) -> Result<EmpiricalFt> {
    for chi in chars {
        chi.check(&array.group())?;
    }
    let samples = sample_row_sums(array, n, m, stream, DEFAULT_BUDGET)?;
    Ok(EmpiricalFt {
        estimates: average_ft(&samples, chars)?,
        replicates: m,
        stderr: (m as f64).powf(-0.5),
    })
}

/// Empirical FT of the per-row direct sampler.
pub fn empirical_ft_direct(
    array: &TriangularArray,
    n: u64,
    chars: &[Character],
    m: u64,
    stream: &SeededStream,
) -> Result<EmpiricalFt> {
    let samples = replicate(m, stream, |rng| sample_row_sum_direct(array, n, rng, DEFAULT_BUDGET))?;
    Ok(EmpiricalFt {
        estimates: average_ft(&samples, chars)?,
        replicates: m,
        stderr: (m as f64).powf(-0.5),
    })
}

/// Empirical FT of a limit law.
pub fn empirical_ft_law(
    law: &LimitLaw,
    chars: &[Character],
    m: u64,
    stream: &SeededStream,
) -> Result<EmpiricalFt> {
    let samples = replicate(m, stream, |rng| sample_limit_law(law, rng))?;
    Ok(EmpiricalFt {
        estimates: average_ft(&samples, chars)?,
        replicates: m,
        stderr: (m as f64).powf(-0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::ElementRule;
    use crate::measure::{validate_levy, DiscreteMeasure};
    use crate::schedule::Schedule;

    #[test]
    fn seeds() {
        assert_eq!(derive_seed(42, &[1, 2]), derive_seed(42, &[1, 2]));
        assert_ne!(derive_seed(42, &[1]), derive_seed(42, &[2]));
        assert_ne!(derive_seed(42, &[]), 42);
        assert_ne!(derive_seed(42, &[]), derive_seed(43, &[]));
        assert_ne!(derive_seed(42, &[0]), derive_seed(42, &[]));
    }

    #[test]
    fn dirac_rows_sum_to_identity() {
        let t = GroupId::Torus;
        let a = TriangularArray::rademacher(t, ElementRule::Angle(Schedule::constant(0.0)), Schedule::identity())
            .unwrap();
        let mut rng = SeededStream::new(1).rng();
        assert!(sample_row_sum(&a, 1000, &mut rng, DEFAULT_BUDGET).unwrap().is_identity());
        let est = empirical_ft(&a, 10, &[Character::Torus { l: 3 }], 50, &SeededStream::new(1)).unwrap();
        assert_eq!(est.estimates[0].1, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn budget_is_enforced() {
        let t = GroupId::Torus;
        let a = TriangularArray::rademacher(t, ElementRule::Angle(Schedule::constant(0.1)), Schedule::identity())
            .unwrap();
        let mut rng = SeededStream::new(1).rng();
        assert!(matches!(
            sample_row_sum(&a, 1000, &mut rng, 999),
            Err(Error::BudgetExceeded { needed: 1000, budget: 999 })
        ));
    }

    #[test]
    fn poisson_mean() {
        let mut rng = SeededStream::new(3).rng();
        for lambda in [0.5, 4.0, 50.0] {
            let m = 20_000;
            let mean: f64 = (0..m).map(|_| sample_poisson(&mut rng, lambda).unwrap() as f64).sum::<f64>() / m as f64;
            assert!((mean - lambda).abs() < 6.0 * (lambda / m as f64).sqrt(), "lambda {lambda}: {mean}");
        }
    }

    #[test]
    fn trivial_character_is_exactly_one() {
        let g = GroupId::padic(2, 8).unwrap();
        let x = GroupElement::padic_digits(g, &[1]).unwrap();
        let a = TriangularArray::bernoulli(x, Schedule::constant(0.3), Schedule::constant(20.0)).unwrap();
        let est = empirical_ft(&a, 1, &[Character::Padic { d: 0, l: 0 }], 333, &SeededStream::new(9)).unwrap();
        assert_eq!(est.estimates[0].1, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn haar_samples_stay_in_subgroup() {
        let g = GroupId::padic(3, 5).unwrap();
        let law = LimitLaw::haar(g, CompactSubgroup::Lambda(2)).unwrap();
        let mut rng = SeededStream::new(5).rng();
        for _ in 0..200 {
            let x = sample_limit_law(&law, &mut rng).unwrap();
            assert!(x.in_nbhd(&crate::group::Neighborhood::Lambda { r: 2 }).unwrap());
        }
        let law = LimitLaw::haar(GroupId::Torus, CompactSubgroup::Cyclic(5)).unwrap();
        for _ in 0..200 {
            let x = sample_limit_law(&law, &mut rng).unwrap();
            assert!(x.scale(5).approx_eq(&GroupElement::identity(GroupId::Torus), 1e-12));
        }
    }

    #[test]
    fn solenoid_law_sampling_unsupported() {
        let s = GroupId::solenoid(2, 3).unwrap();
        let law = LimitLaw::gauss(s, 1.0).unwrap();
        let mut rng = SeededStream::new(5).rng();
        assert!(matches!(sample_limit_law(&law, &mut rng), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dirac_law_samples_its_shift() {
        let a = GroupElement::torus_angle(1.25).unwrap();
        let law = LimitLaw::dirac(a);
        let mut rng = SeededStream::new(5).rng();
        for _ in 0..10 {
            assert_eq!(sample_limit_law(&law, &mut rng).unwrap(), a);
        }
    }

    #[test]
    fn compound_poisson_draws_are_multiples() {
        let g = GroupId::padic(5, 4).unwrap();
        let x = GroupElement::padic_integer(g, 7).unwrap();
        let eta = validate_levy(DiscreteMeasure::point(x, 2.0).unwrap()).unwrap();
        let law = LimitLaw::compound_poisson(eta).unwrap();
        let mut rng = SeededStream::new(11).rng();
        for _ in 0..100 {
            let y = sample_limit_law(&law, &mut rng).unwrap();
            let r = y.residue().unwrap();
            assert!((0..200).any(|k| (7 * k) % 3125 == r));
        }
    }
}
