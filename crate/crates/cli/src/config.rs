//! Experiment configuration files (JSON) and their validation.

use serde::Deserialize;

use lcalim_core::{
    validate_levy, ArrayKind, Character, CompactSubgroup, DiscreteMeasure, ElementRule, Error,
    GroupElement, GroupId, LimitLaw, Neighborhood, QuadraticForm, Schedule, TriangularArray,
    TrendRule, VerifyConfig, DEFAULT_DEPTH,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str) -> impl Fn(Error) -> ConfigError + '_ {
    move |e| ConfigError::Field {
        field: field.to_string(),
        message: e.to_string(),
    }
}

fn field_msg(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Torus,
    Padic {
        p: u64,
        #[serde(default = "default_depth")]
        depth: u32,
    },
    Solenoid {
        p: u64,
        #[serde(default = "default_depth")]
        depth: u32,
    },
}

fn default_depth() -> u32 {
    DEFAULT_DEPTH
}

/// A group element: `{"angle": θ}` (torus, or the solenoid line point with
/// `arg y_0 = θ`), `{"deep_angle": θ_D}` (solenoid), `{"digits": [...]}` or
/// `{"integer": v}` (p-adic), or `"identity"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Identity,
    Angle(f64),
    DeepAngle(f64),
    Digits(Vec<u64>),
    Integer(i64),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadicPowerSpec {
    pub unit: i64,
    pub valuation: Schedule,
}

/// How `x_n` depends on `n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    Fixed(ElementSpec),
    Angle(Schedule),
    PadicPower(PadicPowerSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedRule {
    pub x: RuleSpec,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArraySpec {
    Rademacher {
        x: RuleSpec,
        rows: Schedule,
    },
    Bernoulli {
        x: ElementSpec,
        prob: Schedule,
        rows: Schedule,
    },
    IidSymmetric {
        atoms: Vec<WeightedRule>,
        rows: Schedule,
    },
    General {
        pattern: Vec<Vec<WeightedRule>>,
        rows: Schedule,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubgroupSpec {
    Trivial,
    Full,
    Cyclic { r: u64 },
    Lambda { r: u32 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: ElementSpec,
    pub weight: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    #[serde(default = "default_subgroup")]
    pub subgroup: SubgroupSpec,
    #[serde(default = "default_shift")]
    pub shift: ElementSpec,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub levy: Vec<AtomSpec>,
    /// Use the compound Poisson law `e(η)` (shift = local mean of `η`).
    #[serde(default)]
    pub compound_poisson: bool,
}

fn default_subgroup() -> SubgroupSpec {
    SubgroupSpec::Trivial
}

fn default_shift() -> ElementSpec {
    ElementSpec::Identity
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NbhdSpec {
    Box { d: u32, eps: f64 },
    Arc { eps: f64 },
    Lambda { r: u32 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_divergence")]
    pub divergence: f64,
}

fn default_tol() -> f64 {
    TrendRule::default().tol
}
fn default_window() -> usize {
    TrendRule::default().window
}
fn default_divergence() -> f64 {
    TrendRule::default().divergence
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default = "default_true")]
    pub enabled: bool,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Row indices to simulate; defaults to the first grid point.
    #[serde(default)]
    pub n: Vec<u64>,
}

fn default_true() -> bool {
    true
}
fn default_replicates() -> u64 {
    10_000
}
fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub group: GroupSpec,
    pub array: ArraySpec,
    /// Candidate limit law; when absent the theorem-predicted law is used.
    #[serde(default)]
    pub law: Option<LawSpec>,
    #[serde(default)]
    pub grid: Option<Vec<u64>>,
    #[serde(default)]
    pub chars: Option<Vec<String>>,
    #[serde(default)]
    pub nbhds: Option<Vec<NbhdSpec>>,
    #[serde(default)]
    pub tolerances: Option<TolSpec>,
    #[serde(default)]
    pub mc: Option<McSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// Monte Carlo settings after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub enabled: bool,
    pub replicates: u64,
    pub seed: u64,
    pub n: Vec<u64>,
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub group: GroupId,
    pub array: TriangularArray,
    /// `None` means "use the predicted law".
    pub law: Option<LimitLaw>,
    pub verify: VerifyConfig,
    pub mc: McSettings,
    pub output_dir: Option<String>,
}

fn build_group(spec: &GroupSpec) -> Result<GroupId, ConfigError> {
    match *spec {
        GroupSpec::Torus => Ok(GroupId::Torus),
        GroupSpec::Padic { p, depth } => GroupId::padic(p, depth).map_err(field_err("group")),
        GroupSpec::Solenoid { p, depth } => GroupId::solenoid(p, depth).map_err(field_err("group")),
    }
}

fn build_element(group: GroupId, spec: &ElementSpec, field: &str) -> Result<GroupElement, ConfigError> {
    let res = match (spec, group) {
        (ElementSpec::Identity, _) => Ok(GroupElement::identity(group)),
        (ElementSpec::Angle(t), GroupId::Torus) => GroupElement::torus_angle(*t),
        (ElementSpec::Angle(t), GroupId::Solenoid { .. }) => GroupElement::solenoid_line(group, *t),
        (ElementSpec::DeepAngle(t), GroupId::Solenoid { .. }) => {
            GroupElement::solenoid_deep_angle(group, *t)
        }
        (ElementSpec::Digits(d), GroupId::Padic { .. }) => GroupElement::padic_digits(group, d),
        (ElementSpec::Integer(v), GroupId::Padic { .. }) => {
            GroupElement::padic_integer(group, *v as i128)
        }
        (spec, group) => {
            return Err(field_msg(field, format!("{spec:?} is not an element of {group}")));
        }
    };
    res.map_err(field_err(field))
}

fn build_rule(group: GroupId, spec: &RuleSpec, field: &str) -> Result<ElementRule, ConfigError> {
    Ok(match spec {
        RuleSpec::Fixed(e) => ElementRule::Fixed(build_element(group, e, field)?),
        RuleSpec::Angle(s) => ElementRule::Angle(s.clone()),
        RuleSpec::PadicPower(pp) => ElementRule::PadicPower {
            unit: pp.unit,
            valuation: pp.valuation.clone(),
        },
    })
}

fn build_atoms(
    group: GroupId,
    atoms: &[WeightedRule],
    field: &str,
) -> Result<Vec<(ElementRule, f64)>, ConfigError> {
    atoms
        .iter()
        .enumerate()
        .map(|(i, a)| Ok((build_rule(group, &a.x, &format!("{field}[{i}].x"))?, a.weight)))
        .collect()
}

fn build_array(group: GroupId, spec: &ArraySpec) -> Result<TriangularArray, ConfigError> {
    let (kind, rows) = match spec {
        ArraySpec::Rademacher { x, rows } => (
            ArrayKind::Rademacher {
                x: build_rule(group, x, "array.x")?,
            },
            rows,
        ),
        ArraySpec::Bernoulli { x, prob, rows } => (
            ArrayKind::Bernoulli {
                x: build_element(group, x, "array.x")?,
                prob: prob.clone(),
            },
            rows,
        ),
        ArraySpec::IidSymmetric { atoms, rows } => (
            ArrayKind::IidSymmetric {
                atoms: build_atoms(group, atoms, "array.atoms")?,
            },
            rows,
        ),
        ArraySpec::General { pattern, rows } => {
            let mut out = Vec::with_capacity(pattern.len());
            for (i, row) in pattern.iter().enumerate() {
                out.push(build_atoms(group, row, &format!("array.pattern[{i}]"))?);
            }
            (ArrayKind::General { pattern: out }, rows)
        }
    };
    TriangularArray::new(group, kind, rows.clone()).map_err(field_err("array"))
}

fn build_law(group: GroupId, spec: &LawSpec) -> Result<LimitLaw, ConfigError> {
    let qform = QuadraticForm::new(group, spec.b).map_err(field_err("law.b"))?;
    let subgroup = match spec.subgroup {
        SubgroupSpec::Trivial => CompactSubgroup::Trivial,
        SubgroupSpec::Full => CompactSubgroup::Full,
        SubgroupSpec::Cyclic { r } => CompactSubgroup::Cyclic(r),
        SubgroupSpec::Lambda { r } => CompactSubgroup::Lambda(r),
    };
    let mut atoms = Vec::with_capacity(spec.levy.len());
    for (i, a) in spec.levy.iter().enumerate() {
        atoms.push((build_element(group, &a.x, &format!("law.levy[{i}].x"))?, a.weight));
    }
    let eta = DiscreteMeasure::new(group, atoms).map_err(field_err("law.levy"))?;
    let levy = validate_levy(eta).map_err(field_err("law.levy"))?;
    if spec.compound_poisson {
        if !matches!(spec.shift, ElementSpec::Identity) {
            return Err(field_msg(
                "law.shift",
                "a compound Poisson law takes its shift from the Lévy measure",
            ));
        }
        let base = LimitLaw::compound_poisson(levy).map_err(field_err("law.levy"))?;
        return LimitLaw::new(subgroup, base.shift(), qform, base.levy().clone())
            .map_err(field_err("law.subgroup"));
    }
    let shift = build_element(group, &spec.shift, "law.shift")?;
    LimitLaw::new(subgroup, shift, qform, levy).map_err(field_err("law.subgroup"))
}

fn build_nbhd(spec: &NbhdSpec) -> Neighborhood {
    match *spec {
        NbhdSpec::Box { d, eps } => Neighborhood::SolenoidBox { d, eps },
        NbhdSpec::Arc { eps } => Neighborhood::Arc { eps },
        NbhdSpec::Lambda { r } => Neighborhood::Lambda { r },
    }
}

/// `parse_config(text)`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    build_config(&raw)
}

pub fn build_config(raw: &RawConfig) -> Result<ExperimentConfig, ConfigError> {
    let group = build_group(&raw.group)?;
    let array = build_array(group, &raw.array)?;
    let law = match &raw.law {
        Some(spec) => Some(build_law(group, spec)?),
        None => None,
    };

    let mut verify = VerifyConfig::defaults(&group);
    if let Some(grid) = &raw.grid {
        verify.grid = grid.clone();
    }
    if let Some(chars) = &raw.chars {
        verify.chars = chars
            .iter()
            .enumerate()
            .map(|(i, c)| Character::parse(&group, c).map_err(field_err(&format!("chars[{i}]"))))
            .collect::<Result<_, _>>()?;
    }
    if let Some(nbhds) = &raw.nbhds {
        verify.nbhds = nbhds.iter().map(build_nbhd).collect();
        for (i, u) in verify.nbhds.iter().enumerate() {
            u.check(&group).map_err(field_err(&format!("nbhds[{i}]")))?;
        }
    }
    if let Some(t) = &raw.tolerances {
        verify.rule = TrendRule {
            tol: t.tol,
            window: t.window,
            divergence: t.divergence,
        };
    }
    verify.validate(&group).map_err(field_err("grid/chars/tolerances"))?;
    array
        .check_null_trend(&verify.grid)
        .map_err(field_err("array"))?;

    let mc = match &raw.mc {
        Some(m) => McSettings {
            enabled: m.enabled,
            replicates: m.replicates,
            seed: m.seed,
            n: if m.n.is_empty() { vec![verify.grid[0]] } else { m.n.clone() },
        },
        None => McSettings {
            enabled: false,
            replicates: default_replicates(),
            seed: default_seed(),
            n: vec![verify.grid[0]],
        },
    };
    if mc.replicates == 0 {
        return Err(field_msg("mc.replicates", "must be positive"));
    }
    if mc.n.contains(&0) {
        return Err(field_msg("mc.n", "row indices must be positive"));
    }

    Ok(ExperimentConfig {
        name: raw.name.clone().unwrap_or_else(|| "experiment".into()),
        group,
        array,
        law,
        verify,
        mc,
        output_dir: raw.output.as_ref().and_then(|o| o.dir.clone()),
    })
}
