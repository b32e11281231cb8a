//! Finite-grid verification of the limit theorems: condition sequences,
//! trend classification, Fourier-transform distances and verdicts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use rayon::prelude::*;
use serde::Serialize;

use crate::array::{ArrayKind, TriangularArray};
use crate::error::{Error, Result};
use crate::group::{Character, CompactSubgroup, GroupElement, GroupId, Neighborhood};
use crate::measure::{cylinder_mass, tail_mass, DiscreteMeasure, LevyMeasure, LimitLaw, QuadraticForm};

/// `compound_growth(α, n) = (1 + α/n)^n`, computed as `exp(n·log1p(α/n))`.
pub fn compound_growth(alpha: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let nf = n as f64;
    if !alpha.is_finite() || alpha < -nf {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} must be finite and at least -n = {}",
            -nf
        )));
    }
    if alpha == -nf {
        return Ok(0.0);
    }
    Ok((nf * (alpha / nf).ln_1p()).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "limit", rename_all = "snake_case")]
pub enum Trend {
    ConvergesTo(f64),
    DivergesToInfinity,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendVerdict {
    pub trend: Trend,
    /// The last `window` values the verdict is based on.
    pub evidence: Vec<f64>,
}

/// Tolerances of a finite-grid limit judgment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendRule {
    pub tol: f64,
    pub window: usize,
    pub divergence: f64,
}

impl Default for TrendRule {
    fn default() -> Self {
        TrendRule {
            tol: 1e-3,
            window: 3,
            divergence: 1e3,
        }
    }
}

/// `trend_classify(seq, tol, window)` with divergence threshold `rule.divergence`.
///
/// `ConvergesTo(mean)` if the last `window` values span less than `tol`;
/// `DivergesToInfinity` if they are nondecreasing and the last one is at least
/// the divergence threshold; `Inconclusive` otherwise.
pub fn trend_classify(seq: &[(u64, f64)], rule: &TrendRule) -> Result<TrendVerdict> {
    if rule.window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    if seq.len() < rule.window {
        return Err(Error::SequenceTooShort {
            len: seq.len(),
            window: rule.window,
        });
    }
    if seq.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidArgument("sequence must be sorted by n".into()));
    }
    let evidence: Vec<f64> = seq[seq.len() - rule.window..].iter().map(|&(_, v)| v).collect();
    if evidence.iter().any(|v| v.is_nan()) {
        return Ok(TrendVerdict {
            trend: Trend::Inconclusive,
            evidence,
        });
    }
    let lo = evidence.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = evidence.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let trend = if hi.is_finite() && lo.is_finite() && hi - lo < rule.tol {
        Trend::ConvergesTo(evidence.iter().sum::<f64>() / evidence.len() as f64)
    } else if evidence.windows(2).all(|w| w[1] >= w[0])
        && *evidence.last().expect("window is nonempty") >= rule.divergence
    {
        Trend::DivergesToInfinity
    } else {
        Trend::Inconclusive
    };
    Ok(TrendVerdict { trend, evidence })
}

/// Grid, character set, neighbourhood set and tolerances of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub grid: Vec<u64>,
    pub chars: Vec<Character>,
    pub nbhds: Vec<Neighborhood>,
    pub rule: TrendRule,
}

impl VerifyConfig {
    pub fn default_grid() -> Vec<u64> {
        vec![100, 1_000, 10_000, 100_000, 1_000_000]
    }

    /// Torus `|ℓ| ≤ 8`; Δ_p all `χ_{d,ℓ}` with `d ≤ min(3, D)`; S_p `d ≤ min(3, D)`, `|ℓ| ≤ 8`.
    pub fn default_chars(group: &GroupId) -> Vec<Character> {
        match *group {
            GroupId::Torus => (-8..=8).map(|l| Character::Torus { l }).collect(),
            GroupId::Padic { p, depth } => {
                let mut out = Vec::new();
                for d in 0..=depth.min(3) {
                    let m = p.saturating_pow(d + 1).min(4096);
                    out.extend((0..m).map(|l| Character::Padic { d, l }));
                }
                out
            }
            GroupId::Solenoid { depth, .. } => {
                let mut out = Vec::new();
                for d in 0..=depth.min(3) {
                    out.extend((-8..=8).map(|l| Character::Solenoid { d, l }));
                }
                out
            }
        }
    }

    pub fn default_nbhds(group: &GroupId) -> Vec<Neighborhood> {
        let eps = [FRAC_PI_2, FRAC_PI_4, FRAC_PI_8];
        match *group {
            GroupId::Torus => eps.iter().map(|&eps| Neighborhood::Arc { eps }).collect(),
            GroupId::Padic { depth, .. } => (1..=3.min(depth + 1))
                .map(|r| Neighborhood::Lambda { r })
                .collect(),
            GroupId::Solenoid { depth, .. } => {
                let mut out = Vec::new();
                for d in 0..=2.min(depth) {
                    out.extend(eps.iter().map(|&eps| Neighborhood::SolenoidBox { d, eps }));
                }
                out
            }
        }
    }

    pub fn defaults(group: &GroupId) -> Self {
        VerifyConfig {
            grid: Self::default_grid(),
            chars: Self::default_chars(group),
            nbhds: Self::default_nbhds(group),
            rule: TrendRule::default(),
        }
    }

    pub fn validate(&self, group: &GroupId) -> Result<()> {
        if self.grid.len() < self.rule.window || self.rule.window == 0 {
            return Err(Error::Config(format!(
                "grid has {} points but the window is {}",
                self.grid.len(),
                self.rule.window
            )));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) || self.grid[0] == 0 {
            return Err(Error::Config("grid must be strictly increasing and positive".into()));
        }
        if !(self.rule.tol > 0.0 && self.rule.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.rule.tol)));
        }
        if !(self.rule.divergence.is_finite() && self.rule.divergence > 0.0) {
            return Err(Error::Config("divergence threshold must be positive".into()));
        }
        if self.chars.is_empty() {
            return Err(Error::Config("character set is empty".into()));
        }
        for chi in &self.chars {
            chi.check(group)?;
        }
        for u in &self.nbhds {
            u.check(group)?;
        }
        Ok(())
    }
}

/// `ft_sup_distance(array, law, n, chars)`.
pub fn ft_sup_distance(
    array: &TriangularArray,
    law: &LimitLaw,
    n: u64,
    chars: &[Character],
) -> Result<f64> {
    array.group().ensure_same(&law.group())?;
    let errs: Result<Vec<f64>> = chars
        .par_iter()
        .map(|chi| Ok((array.row_ft_exact(n, chi)? - law.ft(chi)?).norm()))
        .collect();
    Ok(errs?.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremTag {
    GaussPoisson,
    Clt,
    RademacherClt,
    RademacherHaar,
    RademacherPadic,
    SymmetricIid,
    SymmetricHaar,
    BernoulliPoisson,
    BernoulliHaar,
    PadicPoisson,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Value(f64),
    Infinity,
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::Value(v) => format!("{v:.16e}"),
            Target::Infinity => "inf".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    pub condition: String,
    pub label: String,
    pub target: Target,
    pub values: Vec<(u64, f64)>,
    pub verdict: TrendVerdict,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FtRow {
    pub n: u64,
    pub chi: String,
    pub exact: (f64, f64),
    pub limit: (f64, f64),
    pub abs_err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverallVerdict {
    Pass,
    Fail,
    /// The Fourier transforms converge but the hypotheses of the dispatched
    /// theorem fail (or no theorem applies).
    FtOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub tag: TheoremTag,
    pub ft_table: Vec<FtRow>,
    pub ft_distance: Vec<(u64, f64)>,
    pub ft_verdict: TrendVerdict,
    pub ft_passed: bool,
    pub conditions: Vec<ConditionResult>,
    pub overall: OverallVerdict,
}

fn judge(values: Vec<(u64, f64)>, target: Target, rule: &TrendRule) -> Result<(TrendVerdict, bool)> {
    match target {
        Target::Value(c) => {
            // sequences are compared on the scale of their target
            let scale = c.abs().max(1.0);
            let scaled: Vec<(u64, f64)> = values.iter().map(|&(n, v)| (n, v / scale)).collect();
            let mut verdict = trend_classify(&scaled, rule)?;
            verdict.evidence = values[values.len() - rule.window..].iter().map(|&(_, v)| v).collect();
            let passed = match verdict.trend {
                Trend::ConvergesTo(m) => {
                    verdict.trend = Trend::ConvergesTo(m * scale);
                    (m - c / scale).abs() <= rule.tol
                }
                _ => false,
            };
            Ok((verdict, passed))
        }
        Target::Infinity => {
            let verdict = trend_classify(&values, rule)?;
            let passed = verdict.trend == Trend::DivergesToInfinity;
            Ok((verdict, passed))
        }
    }
}

struct Conditions<'a> {
    array: &'a TriangularArray,
    cfg: &'a VerifyConfig,
    out: Vec<ConditionResult>,
}

impl Conditions<'_> {
    fn add<F>(&mut self, condition: &str, label: String, target: Target, f: F) -> Result<()>
    where
        F: Fn(u64) -> Result<f64> + Sync,
    {
        let values: Result<Vec<(u64, f64)>> =
            self.cfg.grid.par_iter().map(|&n| Ok((n, f(n)?))).collect();
        let values = values?;
        let (verdict, passed) = judge(values.clone(), target, &self.cfg.rule)?;
        self.out.push(ConditionResult {
            condition: condition.into(),
            label,
            target,
            values,
            verdict,
            passed,
        });
        Ok(())
    }
}

fn char_gap(chars: &[Character], x: &GroupElement, a: &GroupElement) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for chi in chars {
        worst = worst.max((chi.eval(x)? - chi.eval(a)?).norm());
    }
    Ok(worst)
}

fn levy_on_boundary(levy: &LevyMeasure, u: &Neighborhood) -> Result<bool> {
    for &(x, _) in levy.measure().atoms() {
        if u.on_boundary(&x)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Representatives `x ∉ Λ_r` of the cylinders `x + Λ_r`, `1 ≤ r ≤ min(3, D)`,
/// skipping ranks with more than 4096 classes.
fn cylinder_classes(group: &GroupId) -> Vec<(GroupElement, u32)> {
    let GroupId::Padic { p, depth } = *group else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for r in 1..=depth.min(3) {
        let m = p.saturating_pow(r);
        if m > 4096 {
            break;
        }
        for v in 1..m {
            let x = GroupElement::padic_integer(*group, v as i128).expect("padic group");
            out.push((x, r));
        }
    }
    out
}

/// The compact subgroup generated by `x`: `H_r` on `T` when `arg x = 2πj/r`
/// (detected with denominators up to `10^5`), `Λ_v` on `Δ_p` with `v` the
/// valuation of `x`. `None` when the closure cannot be classified.
pub fn generated_subgroup(x: &GroupElement) -> Option<CompactSubgroup> {
    if x.is_identity() {
        return Some(CompactSubgroup::Trivial);
    }
    match x.group() {
        GroupId::Torus => {
            let t = x.turns().expect("torus");
            Some(match rational_turns(t, 100_000, 1e-12) {
                Some(r) => CompactSubgroup::Cyclic(r),
                None => CompactSubgroup::Full,
            })
        }
        GroupId::Padic { .. } => {
            let v = x.padic_valuation().expect("nonzero");
            CompactSubgroup::Lambda(v).normalize(&x.group()).ok()
        }
        GroupId::Solenoid { .. } => None,
    }
}

/// Smallest denominator `q ≤ max_den` with `|t - j/q| < tol`, by continued fractions.
fn rational_turns(t: f64, max_den: u64, tol: f64) -> Option<u64> {
    let x = t.rem_euclid(1.0);
    let (mut h0, mut h1) = (0f64, 1f64);
    let (mut k0, mut k1) = (1f64, 0f64);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as f64 {
            return None;
        }
        if (x - h2 / k2).abs() < tol || (x - h2 / k2 - 1.0).abs() < tol {
            return Some((k2 as u64).max(1));
        }
        let rest = frac - a;
        if rest <= 0.0 {
            return None;
        }
        frac = 1.0 / rest;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum Prediction {
    Law { law: LimitLaw, tag: TheoremTag },
    Unclassified(String),
}

/// `predict_limit(array, config)` for Rademacher and Bernoulli arrays.
pub fn predict_limit(array: &TriangularArray, cfg: &VerifyConfig) -> Result<Prediction> {
    cfg.validate(&array.group())?;
    let group = array.group();
    let rate_of = |f: &dyn Fn(u64) -> Result<f64>| -> Result<TrendVerdict> {
        let seq: Result<Vec<(u64, f64)>> = cfg.grid.iter().map(|&n| Ok((n, f(n)?))).collect();
        trend_classify(&seq?, &cfg.rule)
    };
    match array.kind() {
        ArrayKind::Rademacher { .. } => {
            if group.is_padic() {
                return Ok(Prediction::Law {
                    law: LimitLaw::dirac(GroupElement::identity(group)),
                    tag: TheoremTag::RademacherPadic,
                });
            }
            let verdict = rate_of(&|n| array.rademacher_rate(n))?;
            Ok(match verdict.trend {
                Trend::ConvergesTo(b) => Prediction::Law {
                    law: LimitLaw::gauss(group, b.max(0.0))?,
                    tag: TheoremTag::RademacherClt,
                },
                Trend::DivergesToInfinity => Prediction::Law {
                    law: LimitLaw::haar(group, CompactSubgroup::Full)?,
                    tag: TheoremTag::RademacherHaar,
                },
                Trend::Inconclusive => {
                    Prediction::Unclassified("K_n (arg x_n)^2 has no clear trend on the grid".into())
                }
            })
        }
        ArrayKind::Bernoulli { x, .. } => {
            let verdict = rate_of(&|n| array.bernoulli_rate(n))?;
            Ok(match verdict.trend {
                Trend::ConvergesTo(lambda) => {
                    let lambda = lambda.max(0.0);
                    let law = if x.is_identity() || lambda == 0.0 {
                        LimitLaw::dirac(GroupElement::identity(group))
                    } else {
                        let eta = crate::measure::validate_levy(DiscreteMeasure::point(*x, lambda)?)?;
                        LimitLaw::compound_poisson(eta)?
                    };
                    Prediction::Law {
                        law,
                        tag: TheoremTag::BernoulliPoisson,
                    }
                }
                Trend::DivergesToInfinity => match generated_subgroup(x) {
                    Some(h) => Prediction::Law {
                        law: LimitLaw::haar(group, h)?,
                        tag: TheoremTag::BernoulliHaar,
                    },
                    None => Prediction::Unclassified(
                        "closed subgroup generated by x is not classified on the solenoid".into(),
                    ),
                },
                Trend::Inconclusive => {
                    Prediction::Unclassified("K_n p_n has no clear trend on the grid".into())
                }
            })
        }
        _ => Err(Error::UnsupportedArray {
            op: "predict_limit",
            required: "a Rademacher or Bernoulli array",
        }),
    }
}

type FtSection = (Vec<FtRow>, Vec<(u64, f64)>, TrendVerdict, bool);

fn ft_section(array: &TriangularArray, law: &LimitLaw, cfg: &VerifyConfig) -> Result<FtSection> {
    let cells: Vec<(u64, Character)> = cfg
        .grid
        .iter()
        .flat_map(|&n| cfg.chars.iter().map(move |&chi| (n, chi)))
        .collect();
    let rows: Result<Vec<FtRow>> = cells
        .par_iter()
        .map(|&(n, chi)| {
            let exact = array.row_ft_exact(n, &chi)?;
            let limit = law.ft(&chi)?;
            Ok(FtRow {
                n,
                chi: chi.id(),
                exact: (exact.re, exact.im),
                limit: (limit.re, limit.im),
                abs_err: (exact - limit).norm(),
            })
        })
        .collect();
    let rows = rows?;
    let distance: Vec<(u64, f64)> = cfg
        .grid
        .iter()
        .map(|&n| {
            let worst = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.abs_err)
                .fold(0.0, f64::max);
            (n, worst)
        })
        .collect();
    let (verdict, passed) = judge(distance.clone(), Target::Value(0.0), &cfg.rule)?;
    Ok((rows, distance, verdict, passed))
}

/// `check_theorem(array, law, config)`.
pub fn check_theorem(
    array: &TriangularArray,
    law: &LimitLaw,
    cfg: &VerifyConfig,
) -> Result<ConvergenceReport> {
    let group = array.group();
    group.ensure_same(&law.group())?;
    cfg.validate(&group)?;

    let mut conds = Conditions {
        array,
        cfg,
        out: Vec::new(),
    };
    let tag = if law.subgroup() == CompactSubgroup::Trivial {
        gaiser_conditions(&mut conds, law)?
    } else {
        haar_conditions(&mut conds, law)?
    };

    let (ft_table, ft_distance, ft_verdict, ft_passed) = ft_section(array, law, cfg)?;
    let hypotheses = tag != TheoremTag::None && conds.out.iter().all(|c| c.passed);
    let overall = match (ft_passed, hypotheses) {
        (true, true) => OverallVerdict::Pass,
        (true, false) => OverallVerdict::FtOnly,
        (false, _) => OverallVerdict::Fail,
    };
    Ok(ConvergenceReport {
        tag,
        ft_table,
        ft_distance,
        ft_verdict,
        ft_passed,
        conditions: conds.out,
        overall,
    })
}

/// Evaluates the condition sequences only (no Fourier table).
pub fn condition_sequences(
    array: &TriangularArray,
    law: &LimitLaw,
    cfg: &VerifyConfig,
) -> Result<(TheoremTag, Vec<ConditionResult>)> {
    let group = array.group();
    group.ensure_same(&law.group())?;
    cfg.validate(&group)?;
    let mut conds = Conditions {
        array,
        cfg,
        out: Vec::new(),
    };
    let tag = if law.subgroup() == CompactSubgroup::Trivial {
        gaiser_conditions(&mut conds, law)?
    } else {
        haar_conditions(&mut conds, law)?
    };
    Ok((tag, conds.out))
}

fn gaiser_conditions(c: &mut Conditions<'_>, law: &LimitLaw) -> Result<TheoremTag> {
    let array = c.array;
    let cfg = c.cfg;
    let group = array.group();
    let levy = law.levy().clone();
    let eta = levy.measure().clone();
    let qform = law.qform();
    let a = law.shift();

    for u in &cfg.nbhds {
        c.add("infinitesimal", u.id(), Target::Value(0.0), |n| {
            array.infinitesimality_stat(n, u)
        })?;
    }
    let chars = cfg.chars.clone();
    c.add("local_mean_gap", "chars".into(), Target::Value(0.0), |n| {
        char_gap(&chars, &array.sum_local_means(n)?, &a)
    })?;
    for chi in cfg.chars.iter().filter(|chi| !chi.is_trivial()) {
        let target = qform.eval(chi)? + eta.integrate_g_sq(chi)?;
        c.add("var_g", chi.id(), Target::Value(target), |n| array.sum_var_g(n, chi))?;
    }
    for u in &cfg.nbhds {
        if levy_on_boundary(&levy, u)? {
            continue;
        }
        let target = tail_mass(&eta, u)?;
        c.add("tail", u.id(), Target::Value(target), |n| array.sum_tail(n, u))?;
    }
    for (x, r) in cylinder_classes(&group) {
        let target = cylinder_mass(&eta, &x, r)?;
        c.add("cylinder", format!("x:{},r:{r}", x.residue().unwrap_or(0)), Target::Value(target), |n| {
            array.sum_cylinder(n, &x, r)
        })?;
    }

    let eta_zero = eta.is_zero();
    let mut tag = if group.is_padic() {
        TheoremTag::PadicPoisson
    } else if eta_zero {
        TheoremTag::Clt
    } else {
        TheoremTag::GaussPoisson
    };

    if eta_zero && !group.is_padic() {
        c.add("var_arg", "arg".into(), Target::Value(qform.b()), |n| array.sum_var_arg(n))?;
    }
    match array.kind() {
        ArrayKind::Rademacher { .. } if !group.is_padic() => {
            c.add("rademacher_rate", "K_n*arg(x_n)^2".into(), Target::Value(qform.b()), |n| {
                array.rademacher_rate(n)
            })?;
            tag = TheoremTag::RademacherClt;
        }
        ArrayKind::Rademacher { .. } => tag = TheoremTag::RademacherPadic,
        ArrayKind::Bernoulli { x, .. } => {
            let target: f64 = eta
                .atoms()
                .iter()
                .filter(|(y, _)| y.approx_eq(x, crate::measure::ATOM_TOL_TURNS))
                .map(|&(_, w)| w)
                .sum();
            c.add("bernoulli_rate", "K_n*p_n".into(), Target::Value(target), |n| {
                array.bernoulli_rate(n)
            })?;
            tag = TheoremTag::BernoulliPoisson;
        }
        _ => {}
    }
    if array.is_symmetric() && array.is_iid() && eta_zero {
        for chi in cfg.chars.iter().filter(|chi| !chi.is_trivial()) {
            let target = 0.5 * qform.eval(chi)?;
            c.add("symmetric_stat", chi.id(), Target::Value(target), |n| {
                array.symmetric_stat(n, chi)
            })?;
        }
        if !matches!(array.kind(), ArrayKind::Rademacher { .. }) {
            tag = TheoremTag::SymmetricIid;
        }
    }
    Ok(tag)
}

fn haar_conditions(c: &mut Conditions<'_>, law: &LimitLaw) -> Result<TheoremTag> {
    let array = c.array;
    let cfg = c.cfg;
    let group = array.group();
    let plain_haar = law.shift().is_identity()
        && law.qform().b() == 0.0
        && law.levy().measure().is_zero();
    match array.kind() {
        ArrayKind::Bernoulli { x, .. } if plain_haar => {
            c.add("bernoulli_rate", "K_n*p_n".into(), Target::Infinity, |n| array.bernoulli_rate(n))?;
            let generated = generated_subgroup(x);
            let matched = generated == Some(law.subgroup());
            c.add("subgroup_match", format!("{generated:?}"), Target::Value(1.0), |_| {
                Ok(if matched { 1.0 } else { 0.0 })
            })?;
            Ok(TheoremTag::BernoulliHaar)
        }
        _ if plain_haar
            && law.subgroup() == CompactSubgroup::Full
            && array.is_symmetric()
            && array.is_iid() =>
        {
            for chi in cfg.chars.iter().filter(|chi| !chi.is_trivial()) {
                c.add("symmetric_stat", chi.id(), Target::Infinity, |n| array.symmetric_stat(n, chi))?;
            }
            if matches!(array.kind(), ArrayKind::Rademacher { .. }) && !group.is_padic() {
                c.add("rademacher_rate", "K_n*arg(x_n)^2".into(), Target::Infinity, |n| {
                    array.rademacher_rate(n)
                })?;
                Ok(TheoremTag::RademacherHaar)
            } else {
                Ok(TheoremTag::SymmetricHaar)
            }
        }
        _ => Ok(TheoremTag::None),
    }
}

/// Verdicts of the three equivalent statements for an i.i.d. symmetric array.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenSymReport {
    /// Fourier transforms converge to those of `γ_ψ`.
    pub ft: bool,
    /// `K_n (1 - Re E χ(X_{n,1})) → ψ(χ)/2`.
    pub symmetric_stat: bool,
    /// `K_n Var g(X_{n,1}, χ) → ψ(χ)` and all tails vanish.
    pub variance_and_tails: bool,
    pub consistent: bool,
    pub conditions: Vec<ConditionResult>,
    pub ft_distance: Vec<(u64, f64)>,
}

/// `crosscheck_gensym2(array, b, config)`.
pub fn crosscheck_gensym2(
    array: &TriangularArray,
    b: f64,
    cfg: &VerifyConfig,
) -> Result<GenSymReport> {
    if !(array.is_symmetric() && array.is_iid()) {
        return Err(Error::UnsupportedArray {
            op: "crosscheck_gensym2",
            required: "a rowwise i.i.d. symmetric array",
        });
    }
    let group = array.group();
    cfg.validate(&group)?;
    let qform = QuadraticForm::new(group, b)?;
    let law = LimitLaw::gauss(group, b)?;
    let mut conds = Conditions {
        array,
        cfg,
        out: Vec::new(),
    };
    let nontrivial: Vec<Character> = cfg.chars.iter().copied().filter(|c| !c.is_trivial()).collect();
    for chi in &nontrivial {
        let target = 0.5 * qform.eval(chi)?;
        conds.add("symmetric_stat", chi.id(), Target::Value(target), |n| {
            array.symmetric_stat(n, chi)
        })?;
    }
    let split = conds.out.len();
    for chi in &nontrivial {
        let target = qform.eval(chi)?;
        conds.add("var_g", chi.id(), Target::Value(target), |n| array.sum_var_g(n, chi))?;
    }
    for u in &cfg.nbhds {
        conds.add("tail", u.id(), Target::Value(0.0), |n| array.sum_tail(n, u))?;
    }
    let (_, ft_distance, _, ft) = ft_section(array, &law, cfg)?;
    let symmetric_stat = conds.out[..split].iter().all(|c| c.passed);
    let variance_and_tails = conds.out[split..].iter().all(|c| c.passed);
    Ok(GenSymReport {
        ft,
        symmetric_stat,
        variance_and_tails,
        consistent: ft == symmetric_stat && symmetric_stat == variance_and_tails,
        conditions: conds.out,
        ft_distance,
    })
}
