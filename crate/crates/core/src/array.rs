//! Triangular arrays `{X_{n,k} : k ≤ K_n}` with finitely supported rows and
//! the exact row statistics that appear in the limit-theorem hypotheses.
//!
//! Rows are grouped into blocks of identically distributed entries, so every
//! statistic costs `O(#blocks)` rather than `O(K_n)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Character, GroupElement, GroupId, Neighborhood};
use crate::measure::{cylinder_mass, local_mean, tail_mass, DiscreteMeasure};
use crate::schedule::Schedule;

/// Total mass tolerance for a row distribution.
pub const PROB_TOL: f64 = 1e-12;

/// A probability measure with finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct RowDistribution(DiscreteMeasure);

impl RowDistribution {
    pub fn new(mu: DiscreteMeasure) -> Result<Self> {
        let mass = mu.total_mass();
        if (mass - 1.0).abs() > PROB_TOL {
            return Err(Error::NotProbability(mass));
        }
        Ok(RowDistribution(mu))
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.0
    }
}

/// `char_moment(μ, χ) = E χ(X)`.
pub fn char_moment(dist: &RowDistribution, chi: &Character) -> Result<Complex64> {
    dist.0.fourier(chi)
}

/// `z^m` for `z = 1 + w` with `w` supplied directly, avoiding cancellation when `z ≈ 1`.
fn power_near_one(w: Complex64, m: u64, real: bool) -> Complex64 {
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mf = m as f64;
    if real {
        let z = 1.0 + w.re;
        if z == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mag = if z > 0.0 {
            (mf * w.re.ln_1p()).exp()
        } else {
            let mag = (mf * (-z).ln()).exp();
            if m % 2 == 1 {
                -mag
            } else {
                mag
            }
        };
        return Complex64::new(mag, 0.0);
    }
    let z = Complex64::new(1.0, 0.0) + w;
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_abs = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let arg = w.im.atan2(1.0 + w.re);
    (Complex64::new(log_abs, arg) * mf).exp()
}

/// How the row element `x_n` depends on `n`.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementRule {
    Fixed(GroupElement),
    /// `e^{i s(n)}` on `T`; on `S_p` the element with `arg y_j = s(n)/p^j`.
    Angle(Schedule),
    /// `unit · p^{⌊v(n)⌋}` on `Δ_p` (the identity once the exponent exceeds the depth).
    PadicPower { unit: i64, valuation: Schedule },
}

impl ElementRule {
    pub fn eval(&self, group: GroupId, n: u64) -> Result<GroupElement> {
        match self {
            ElementRule::Fixed(x) => {
                group.ensure_same(&x.group())?;
                Ok(*x)
            }
            ElementRule::Angle(s) => {
                let theta = s.eval(n)?;
                match group {
                    GroupId::Torus => GroupElement::torus_angle(theta),
                    GroupId::Solenoid { .. } => GroupElement::solenoid_line(group, theta),
                    GroupId::Padic { .. } => Err(Error::WrongKind {
                        expected: "torus or solenoid",
                        found: group.to_string(),
                    }),
                }
            }
            ElementRule::PadicPower { unit, valuation } => {
                let GroupId::Padic { p, depth } = group else {
                    return Err(Error::WrongKind {
                        expected: "padic",
                        found: group.to_string(),
                    });
                };
                let v = valuation.eval(n)?.floor();
                if v < 0.0 {
                    return Err(Error::Schedule(format!(
                        "valuation at n = {n} is negative"
                    )));
                }
                if v > depth as f64 {
                    return Ok(GroupElement::identity(group));
                }
                let x = GroupElement::padic_integer(group, *unit as i128)?;
                Ok(x.scale(p.pow(v as u32) as i64))
            }
        }
    }
}

/// The family of row distributions.
#[derive(Clone, Debug, PartialEq)]
pub enum ArrayKind {
    /// `P(X = x_n) = P(X = -x_n) = ½`.
    Rademacher { x: ElementRule },
    /// `P(X = x) = p_n`, `P(X = e) = 1 - p_n`.
    Bernoulli { x: GroupElement, prob: Schedule },
    /// i.i.d. rows with law `½(μ_n + μ_n∘neg)`, `μ_n = Σ w_i δ_{x_i(n)}`.
    IidSymmetric { atoms: Vec<(ElementRule, f64)> },
    /// Row `k` uses `pattern[(k - 1) mod pattern.len()]`.
    General { pattern: Vec<Vec<(ElementRule, f64)>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriangularArray {
    group: GroupId,
    kind: ArrayKind,
    rows: Schedule,
}

/// A block of `mult` identically distributed rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RowBlock {
    pub dist: RowDistribution,
    pub mult: u64,
}

impl TriangularArray {
    pub fn new(group: GroupId, kind: ArrayKind, rows: Schedule) -> Result<Self> {
        rows.validate()?;
        match &kind {
            ArrayKind::Rademacher { x } => check_rule(group, x)?,
            ArrayKind::Bernoulli { x, prob } => {
                group.ensure_same(&x.group())?;
                prob.validate()?;
            }
            ArrayKind::IidSymmetric { atoms } => check_atoms(group, atoms)?,
            ArrayKind::General { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::InvalidArgument("general array needs a row pattern".into()));
                }
                for atoms in pattern {
                    check_atoms(group, atoms)?;
                }
            }
        }
        Ok(TriangularArray { group, kind, rows })
    }

    pub fn rademacher(group: GroupId, x: ElementRule, rows: Schedule) -> Result<Self> {
        TriangularArray::new(group, ArrayKind::Rademacher { x }, rows)
    }

    pub fn bernoulli(x: GroupElement, prob: Schedule, rows: Schedule) -> Result<Self> {
        TriangularArray::new(x.group(), ArrayKind::Bernoulli { x, prob }, rows)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn kind(&self) -> &ArrayKind {
        &self.kind
    }

    pub fn rows(&self) -> &Schedule {
        &self.rows
    }

    pub fn k_n(&self, n: u64) -> Result<u64> {
        self.rows.eval_count(n)
    }

    pub fn is_iid(&self) -> bool {
        match &self.kind {
            ArrayKind::General { pattern } => pattern.len() == 1,
            _ => true,
        }
    }

    /// Symmetric by construction (Rademacher and symmetrized rows).
    pub fn is_symmetric(&self) -> bool {
        matches!(
            self.kind,
            ArrayKind::Rademacher { .. } | ArrayKind::IidSymmetric { .. }
        )
    }

    /// `x_n` of a Rademacher array.
    pub fn rademacher_point(&self, n: u64) -> Result<GroupElement> {
        match &self.kind {
            ArrayKind::Rademacher { x } => x.eval(self.group, n),
            _ => Err(Error::UnsupportedArray {
                op: "rademacher_point",
                required: "a Rademacher array",
            }),
        }
    }

    fn pattern_dist(&self, atoms: &[(ElementRule, f64)], n: u64) -> Result<RowDistribution> {
        let mut pts = Vec::with_capacity(atoms.len());
        for (rule, w) in atoms {
            pts.push((rule.eval(self.group, n)?, *w));
        }
        RowDistribution::new(DiscreteMeasure::new(self.group, pts)?)
    }

    fn iid_dist(&self, n: u64) -> Result<RowDistribution> {
        match &self.kind {
            ArrayKind::Rademacher { x } => {
                let x = x.eval(self.group, n)?;
                RowDistribution::new(DiscreteMeasure::new(self.group, [(x, 0.5), (x.neg(), 0.5)])?)
            }
            ArrayKind::Bernoulli { x, prob } => {
                let p = prob.eval(n)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Schedule(format!(
                        "probability at n = {n} is {p}, outside [0, 1]"
                    )));
                }
                let e = GroupElement::identity(self.group);
                RowDistribution::new(DiscreteMeasure::new(self.group, [(*x, p), (e, 1.0 - p)])?)
            }
            ArrayKind::IidSymmetric { atoms } => {
                let mu = self.pattern_dist(atoms, n)?;
                RowDistribution::new(mu.0.symmetrized())
            }
            ArrayKind::General { pattern } => self.pattern_dist(&pattern[0], n),
        }
    }

    /// `row_dist(n, k)`.
    pub fn row_dist(&self, n: u64, k: u64) -> Result<RowDistribution> {
        let rows = self.k_n(n)?;
        if k == 0 || k > rows {
            return Err(Error::RowIndex { k, rows });
        }
        match &self.kind {
            ArrayKind::General { pattern } => {
                let idx = ((k - 1) % pattern.len() as u64) as usize;
                self.pattern_dist(&pattern[idx], n)
            }
            _ => self.iid_dist(n),
        }
    }

    /// Row `n` as blocks of identically distributed entries.
    pub fn row_blocks(&self, n: u64) -> Result<Vec<RowBlock>> {
        let rows = self.k_n(n)?;
        match &self.kind {
            ArrayKind::General { pattern } if pattern.len() > 1 => {
                let len = pattern.len() as u64;
                let mut out = Vec::with_capacity(pattern.len());
                for (i, atoms) in pattern.iter().enumerate() {
                    let i = i as u64;
                    let mult = rows / len + u64::from(i < rows % len);
                    if mult > 0 {
                        out.push(RowBlock {
                            dist: self.pattern_dist(atoms, n)?,
                            mult,
                        });
                    }
                }
                Ok(out)
            }
            _ => Ok(vec![RowBlock {
                dist: self.iid_dist(n)?,
                mult: rows,
            }]),
        }
    }

    fn require_iid(&self, op: &'static str) -> Result<()> {
        if self.is_iid() {
            Ok(())
        } else {
            Err(Error::UnsupportedArray {
                op,
                required: "rowwise i.i.d. rows",
            })
        }
    }

    /// `row_ft_exact(n, χ) = Π_k E χ(X_{n,k})`.
    pub fn row_ft_exact(&self, n: u64, chi: &Character) -> Result<Complex64> {
        chi.check(&self.group)?;
        let symmetric = self.is_symmetric();
        let mut acc = Complex64::new(1.0, 0.0);
        for block in self.row_blocks(n)? {
            let w = if symmetric {
                Complex64::new(-block.dist.0.one_minus_re(chi)?, 0.0)
            } else {
                block.dist.0.fourier_deviation(chi)?
            };
            acc *= power_near_one(w, block.mult, symmetric || w.im == 0.0);
        }
        Ok(acc)
    }

    /// `sum_local_means(n) = Σ_k m_g(X_{n,k})`.
    pub fn sum_local_means(&self, n: u64) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(self.group);
        for block in self.row_blocks(n)? {
            let m = local_mean(&block.dist.0)?;
            let mult = i64::try_from(block.mult)
                .map_err(|_| Error::InvalidArgument("row count exceeds i64".into()))?;
            acc = acc.add(&m.scale(mult))?;
        }
        Ok(acc)
    }

    /// `sum_var_g(n, χ) = Σ_k Var g(X_{n,k}, χ)`.
    pub fn sum_var_g(&self, n: u64, chi: &Character) -> Result<f64> {
        chi.check(&self.group)?;
        let mut acc = 0.0;
        for block in self.row_blocks(n)? {
            acc += block.mult as f64 * block.dist.0.variance_g(chi)?;
        }
        Ok(acc)
    }

    /// `Σ_k Var arg(X_{n,k})` on `T`, `Σ_k Var arg((X_{n,k})_0)` on `S_p`.
    pub fn sum_var_arg(&self, n: u64) -> Result<f64> {
        if self.group.is_padic() {
            return Err(Error::UnsupportedArray {
                op: "sum_var_arg",
                required: "a torus or solenoid array",
            });
        }
        let mut acc = 0.0;
        for block in self.row_blocks(n)? {
            let atoms = block.dist.0.atoms();
            let mut mean = 0.0;
            for &(x, w) in atoms {
                mean += w * x.base_arg()?;
            }
            let mut var = 0.0;
            for &(x, w) in atoms {
                let dev = x.base_arg()? - mean;
                var += w * dev * dev;
            }
            acc += block.mult as f64 * var;
        }
        Ok(acc)
    }

    /// `sum_tail(n, U) = Σ_k P(X_{n,k} ∉ U)`.
    pub fn sum_tail(&self, n: u64, u: &Neighborhood) -> Result<f64> {
        let mut acc = 0.0;
        for block in self.row_blocks(n)? {
            acc += block.mult as f64 * tail_mass(&block.dist.0, u)?;
        }
        Ok(acc)
    }

    /// `infinitesimality_stat(n, U) = max_k P(X_{n,k} ∉ U)`.
    pub fn infinitesimality_stat(&self, n: u64, u: &Neighborhood) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for block in self.row_blocks(n)? {
            worst = worst.max(tail_mass(&block.dist.0, u)?);
        }
        Ok(worst)
    }

    /// `Σ_k P(X_{n,k} ∈ x + Λ_r)` for a cylinder not containing the identity.
    pub fn sum_cylinder(&self, n: u64, x: &GroupElement, r: u32) -> Result<f64> {
        if x.in_nbhd(&Neighborhood::Lambda { r })? {
            return Err(Error::InvalidArgument(format!(
                "cylinder {x} + Lambda_{r} contains the identity"
            )));
        }
        let mut acc = 0.0;
        for block in self.row_blocks(n)? {
            acc += block.mult as f64 * cylinder_mass(&block.dist.0, x, r)?;
        }
        Ok(acc)
    }

    /// `symmetric_stat(n, χ) = K_n (1 - Re E χ(X_{n,1}))`.
    pub fn symmetric_stat(&self, n: u64, chi: &Character) -> Result<f64> {
        self.require_iid("symmetric_stat")?;
        let blocks = self.row_blocks(n)?;
        let block = &blocks[0];
        Ok(block.mult as f64 * block.dist.0.one_minus_re(chi)?)
    }

    /// `bernoulli_rate(n) = K_n p_n`.
    pub fn bernoulli_rate(&self, n: u64) -> Result<f64> {
        match &self.kind {
            ArrayKind::Bernoulli { prob, .. } => Ok(self.k_n(n)? as f64 * prob.eval(n)?),
            _ => Err(Error::UnsupportedArray {
                op: "bernoulli_rate",
                required: "a Bernoulli array",
            }),
        }
    }

    /// `K_n (arg x_n)²` (`arg` of the base coordinate on `S_p`).
    pub fn rademacher_rate(&self, n: u64) -> Result<f64> {
        let x = self.rademacher_point(n)?;
        let a = x.base_arg()?;
        Ok(self.k_n(n)? as f64 * a * a)
    }

    /// Checks that the row element tends to the identity, or `p_n → 0`, along `grid`.
    pub fn check_null_trend(&self, grid: &[u64]) -> Result<()> {
        let (Some(&first), Some(&last)) = (grid.first(), grid.last()) else {
            return Ok(());
        };
        let size = |n: u64| -> Result<f64> {
            match &self.kind {
                ArrayKind::Rademacher { x } => {
                    let x = x.eval(self.group, n)?;
                    match self.group {
                        GroupId::Padic { .. } => {
                            x.padic_metric(&GroupElement::identity(self.group))
                        }
                        _ => Ok(x.base_arg()?.abs() / TAU),
                    }
                }
                ArrayKind::Bernoulli { prob, .. } => prob.eval(n),
                _ => Ok(0.0),
            }
        };
        for &n in grid {
            if let ArrayKind::Bernoulli { prob, .. } = &self.kind {
                let p = prob.eval(n)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Schedule(format!(
                        "probability at n = {n} is {p}, outside [0, 1]"
                    )));
                }
            }
        }
        if size(last)? > size(first)? {
            return Err(Error::Schedule(
                "row element does not approach the identity along the grid".into(),
            ));
        }
        Ok(())
    }
}

fn check_rule(group: GroupId, rule: &ElementRule) -> Result<()> {
    match rule {
        ElementRule::Fixed(x) => group.ensure_same(&x.group()),
        ElementRule::Angle(s) => {
            if group.is_padic() {
                return Err(Error::WrongKind {
                    expected: "torus or solenoid",
                    found: group.to_string(),
                });
            }
            s.validate()
        }
        ElementRule::PadicPower { valuation, .. } => {
            if !group.is_padic() {
                return Err(Error::WrongKind {
                    expected: "padic",
                    found: group.to_string(),
                });
            }
            valuation.validate()
        }
    }
}

fn check_atoms(group: GroupId, atoms: &[(ElementRule, f64)]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::NotProbability(0.0));
    }
    let mut mass = 0.0;
    for (rule, w) in atoms {
        check_rule(group, rule)?;
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidWeight(*w));
        }
        mass += w;
    }
    if (mass - 1.0).abs() > PROB_TOL {
        return Err(Error::NotProbability(mass));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn torus_rademacher(theta: Schedule, rows: Schedule) -> TriangularArray {
        TriangularArray::rademacher(GroupId::Torus, ElementRule::Angle(theta), rows).unwrap()
    }

    fn padic_bernoulli(prob: Schedule, rows: Schedule) -> TriangularArray {
        let g = GroupId::padic(2, 16).unwrap();
        let x = GroupElement::padic_digits(g, &[1]).unwrap();
        TriangularArray::bernoulli(x, prob, rows).unwrap()
    }

    #[test]
    fn row_distributions() {
        let a = torus_rademacher(Schedule::constant(0.5), Schedule::constant(3.0));
        let d = a.row_dist(1, 2).unwrap();
        let atoms = d.measure().atoms();
        assert_eq!(atoms.len(), 2);
        assert!(atoms.iter().all(|&(_, w)| w == 0.5));
        assert!(matches!(a.row_dist(1, 4), Err(Error::RowIndex { k: 4, rows: 3 })));
        assert!(a.row_dist(1, 0).is_err());

        let b = padic_bernoulli(Schedule::constant(0.1), Schedule::constant(5.0));
        let d = b.row_dist(1, 1).unwrap();
        let e = GroupElement::identity(b.group());
        let mass_e: f64 = d.measure().atoms().iter().filter(|(x, _)| *x == e).map(|&(_, w)| w).sum();
        assert!((mass_e - 0.9).abs() < 1e-15);

        let t = GroupId::Torus;
        let general = TriangularArray::new(
            t,
            ArrayKind::General {
                pattern: vec![
                    vec![(ElementRule::Angle(Schedule::constant(0.1)), 1.0)],
                    vec![(ElementRule::Angle(Schedule::constant(0.2)), 1.0)],
                ],
            },
            Schedule::constant(3.0),
        )
        .unwrap();
        let second = general.row_dist(1, 2).unwrap();
        assert!((second.measure().atoms()[0].0.arg().unwrap() - 0.2).abs() < 1e-15);
        let third = general.row_dist(1, 3).unwrap();
        assert!((third.measure().atoms()[0].0.arg().unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        let t = GroupId::Torus;
        let x = GroupElement::torus_angle(FRAC_PI_4).unwrap();
        let d = RowDistribution::new(DiscreteMeasure::new(t, [(x, 0.5), (x.neg(), 0.5)]).unwrap()).unwrap();
        let m = char_moment(&d, &Character::Torus { l: 1 }).unwrap();
        assert!((m.re - FRAC_PI_4.cos()).abs() < 1e-15 && m.im.abs() < 1e-15);
        assert_eq!(char_moment(&d, &Character::Torus { l: 0 }).unwrap(), Complex64::new(1.0, 0.0));

        let b = padic_bernoulli(Schedule::constant(0.1), Schedule::constant(1.0));
        let m = char_moment(&b.row_dist(1, 1).unwrap(), &Character::Padic { d: 0, l: 1 }).unwrap();
        assert!((m - Complex64::new(0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_row_transforms() {
        let a = torus_rademacher(Schedule::constant(FRAC_PI_4), Schedule::constant(4.0));
        let v = a.row_ft_exact(1, &Character::Torus { l: 1 }).unwrap();
        assert!((v.re - 0.25).abs() < 1e-15 && v.im == 0.0);
        let b = padic_bernoulli(Schedule::constant(0.02), Schedule::constant(100.0));
        let v = b.row_ft_exact(1, &Character::Padic { d: 0, l: 1 }).unwrap();
        assert!((v.re - 0.96f64.powi(100)).abs() < 1e-15);
        assert!((v.re - 0.0168701).abs() < 1e-6);
        for n in [1, 10, 1000] {
            assert_eq!(a.row_ft_exact(n, &Character::Torus { l: 0 }).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn exact_zero_and_signs() {
        // Re E χ = cos(π/2) = 0 exactly after the symmetric reduction
        let a = torus_rademacher(Schedule::constant(PI / 2.0), Schedule::constant(1e9));
        assert_eq!(a.row_ft_exact(1, &Character::Torus { l: 1 }).unwrap().norm(), 0.0);
        // x = -1: (E χ_1)^K = (-1)^K
        let a = torus_rademacher(Schedule::constant(-PI), Schedule::constant(1e9 + 1.0));
        assert_eq!(a.row_ft_exact(1, &Character::Torus { l: 1 }).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn local_mean_sums() {
        let a = torus_rademacher(Schedule::power(1.0, -0.5), Schedule::identity());
        assert!(a.sum_local_means(100).unwrap().is_identity());
        let b = padic_bernoulli(Schedule::power(2.0, -1.0), Schedule::identity());
        assert!(b.sum_local_means(100).unwrap().is_identity());
        let x = GroupElement::torus_angle(0.3).unwrap();
        let c = TriangularArray::bernoulli(x, Schedule::constant(0.1), Schedule::constant(10.0)).unwrap();
        assert!(c.sum_local_means(1).unwrap().approx_eq(&x, 1e-15));
    }

    #[test]
    fn variance_sums() {
        let a = torus_rademacher(Schedule::constant(0.01), Schedule::constant(1e4));
        let v = a.sum_var_g(1, &Character::Torus { l: 1 }).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let b = padic_bernoulli(Schedule::constant(0.3), Schedule::constant(50.0));
        assert_eq!(b.sum_var_g(1, &Character::Padic { d: 2, l: 3 }).unwrap(), 0.0);
        let point = torus_rademacher(Schedule::constant(0.0), Schedule::constant(10.0));
        assert_eq!(point.sum_var_g(1, &Character::Torus { l: 3 }).unwrap(), 0.0);
    }

    #[test]
    fn tail_sums() {
        let u = Neighborhood::Lambda { r: 1 };
        let b = padic_bernoulli(Schedule::constant(0.01), Schedule::constant(300.0));
        assert!((b.sum_tail(1, &u).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(b.infinitesimality_stat(1, &u).unwrap(), 0.01);
        let a = torus_rademacher(Schedule::constant(0.1), Schedule::constant(100.0));
        assert_eq!(a.sum_tail(1, &Neighborhood::Arc { eps: 0.2 }).unwrap(), 0.0);
        assert_eq!(a.infinitesimality_stat(1, &Neighborhood::Arc { eps: 0.2 }).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_statistic() {
        let a = torus_rademacher(Schedule::power(1.0, -0.5), Schedule::identity());
        let s = a.symmetric_stat(10_000, &Character::Torus { l: 1 }).unwrap();
        assert!((s - 1e4 * (1.0 - 0.01f64.cos())).abs() < 1e-9);
        assert!((s - 0.4999958).abs() < 1e-7);
        assert_eq!(a.symmetric_stat(10_000, &Character::Torus { l: 0 }).unwrap(), 0.0);
        let b = padic_bernoulli(Schedule::constant(0.01), Schedule::constant(100.0));
        let s = b.symmetric_stat(1, &Character::Padic { d: 0, l: 1 }).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rates() {
        let b = padic_bernoulli(Schedule::power(2.0, -1.0), Schedule::identity());
        assert_eq!(b.bernoulli_rate(1000).unwrap(), 2.0);
        let b = padic_bernoulli(Schedule::power(1.0, -0.5), Schedule::identity());
        assert!((b.bernoulli_rate(10_000).unwrap() - 100.0).abs() < 1e-9);
        let b = padic_bernoulli(Schedule::constant(0.0), Schedule::identity());
        assert_eq!(b.bernoulli_rate(10).unwrap(), 0.0);
        let a = torus_rademacher(Schedule::constant(0.1), Schedule::identity());
        assert!(a.bernoulli_rate(10).is_err());
    }

    #[test]
    fn cylinders_exclude_identity() {
        let b = padic_bernoulli(Schedule::power(2.0, -1.0), Schedule::identity());
        let x = GroupElement::padic_digits(b.group(), &[1]).unwrap();
        assert_eq!(b.sum_cylinder(100, &x, 2).unwrap(), 2.0);
        let y = GroupElement::padic_digits(b.group(), &[1, 1]).unwrap();
        assert_eq!(b.sum_cylinder(100, &y, 2).unwrap(), 0.0);
        assert!(b.sum_cylinder(100, &GroupElement::identity(b.group()), 2).is_err());
    }

    #[test]
    fn validation() {
        let t = GroupId::Torus;
        let bad = TriangularArray::new(
            t,
            ArrayKind::IidSymmetric {
                atoms: vec![(ElementRule::Angle(Schedule::constant(0.1)), 0.7)],
            },
            Schedule::identity(),
        );
        assert!(matches!(bad, Err(Error::NotProbability(_))));
        let b = padic_bernoulli(Schedule::constant(1.5), Schedule::identity());
        assert!(b.row_dist(2, 1).is_err());
        assert!(b.check_null_trend(&[10, 100]).is_err());
        let grow = torus_rademacher(Schedule::power(1.0, 0.5), Schedule::identity());
        assert!(grow.check_null_trend(&[4, 9]).is_err());
        let ok = torus_rademacher(Schedule::power(1.0, -0.5), Schedule::identity());
        assert!(ok.check_null_trend(&[100, 10_000]).is_ok());
    }

    #[test]
    fn padic_power_rule() {
        let g = GroupId::padic(3, 4).unwrap();
        let rule = ElementRule::PadicPower {
            unit: 2,
            valuation: Schedule::power(1.0, 0.5),
        };
        assert_eq!(rule.eval(g, 4).unwrap().digits().unwrap(), vec![0, 0, 2, 0, 0]);
        assert!(rule.eval(g, 100).unwrap().is_identity());
    }
}
