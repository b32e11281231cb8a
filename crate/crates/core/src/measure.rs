//! Finite discrete measures, Lévy measures, quadratic forms and the Fourier
//! transforms of the factors of a limit law `ω_H * δ_a * γ_ψ * π_{η,g}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{
    cis_turns_minus_one, h_trunc, Character, CompactSubgroup, GroupElement, GroupId,
    Neighborhood,
};

/// Atoms closer than this (in turns) are treated as the same point.
pub const ATOM_TOL_TURNS: f64 = 1e-12;

/// A finite measure with finitely many atoms on one group.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    group: GroupId,
    atoms: Vec<(GroupElement, f64)>,
}

impl DiscreteMeasure {
    pub fn zero(group: GroupId) -> Self {
        DiscreteMeasure {
            group,
            atoms: Vec::new(),
        }
    }

    /// Builds a measure, merging atoms that coincide at working precision.
    pub fn new(group: GroupId, atoms: impl IntoIterator<Item = (GroupElement, f64)>) -> Result<Self> {
        let mut out = DiscreteMeasure::zero(group);
        for (x, w) in atoms {
            out.push(x, w)?;
        }
        Ok(out)
    }

    pub fn dirac(x: GroupElement) -> Self {
        DiscreteMeasure {
            group: x.group(),
            atoms: vec![(x, 1.0)],
        }
    }

    pub fn point(x: GroupElement, w: f64) -> Result<Self> {
        DiscreteMeasure::new(x.group(), [(x, w)])
    }

    fn push(&mut self, x: GroupElement, w: f64) -> Result<()> {
        self.group.ensure_same(&x.group())?;
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidWeight(w));
        }
        match self
            .atoms
            .iter_mut()
            .find(|(y, _)| y.approx_eq(&x, ATOM_TOL_TURNS))
        {
            Some((_, v)) => *v += w,
            None => self.atoms.push((x, w)),
        }
        Ok(())
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn atoms(&self) -> &[(GroupElement, f64)] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|&(_, w)| w == 0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        DiscreteMeasure::new(self.group, self.atoms.iter().map(|&(x, w)| (x, c * w)))
    }

    /// `½(μ + μ∘neg)`.
    pub fn symmetrized(&self) -> Self {
        let mut out = DiscreteMeasure::zero(self.group);
        for &(x, w) in &self.atoms {
            out.push(x, 0.5 * w).expect("validated atoms");
            out.push(x.neg(), 0.5 * w).expect("validated atoms");
        }
        out
    }

    /// Whether `μ(A) = μ(-A)` atom by atom.
    pub fn is_symmetric(&self) -> bool {
        let scale = self.total_mass().max(1.0);
        self.atoms.iter().all(|&(x, w)| {
            let mirrored: f64 = self
                .atoms
                .iter()
                .filter(|(y, _)| y.approx_eq(&x.neg(), ATOM_TOL_TURNS))
                .map(|&(_, v)| v)
                .sum();
            (mirrored - w).abs() <= 1e-12 * scale
        })
    }

    /// `μ̂(χ) = Σ w χ(x)`.
    pub fn fourier(&self, chi: &Character) -> Result<Complex64> {
        chi.check(&self.group)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in &self.atoms {
            acc += w * chi.eval(&x)?;
        }
        Ok(acc)
    }

    /// `μ̂(χ) - μ(G)`, accurate when every atom is close to the kernel of `χ`.
    pub fn fourier_deviation(&self, chi: &Character) -> Result<Complex64> {
        chi.check(&self.group)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in &self.atoms {
            acc += w * chi.eval_minus_one(&x)?;
        }
        Ok(acc)
    }

    /// `∫ (1 - Re χ) dμ`.
    pub fn one_minus_re(&self, chi: &Character) -> Result<f64> {
        chi.check(&self.group)?;
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            acc += w * chi.one_minus_re(&x)?;
        }
        Ok(acc)
    }

    /// `∫ g(x, χ) dμ`.
    pub fn integrate_g(&self, chi: &Character) -> Result<f64> {
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            acc += w * x.local_inner(chi)?;
        }
        Ok(acc)
    }

    /// `∫ g(x, χ)² dμ`.
    pub fn integrate_g_sq(&self, chi: &Character) -> Result<f64> {
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            let g = x.local_inner(chi)?;
            acc += w * g * g;
        }
        Ok(acc)
    }

    /// `Var g(X, χ)` for `X ~ μ` (μ a probability).
    pub fn variance_g(&self, chi: &Character) -> Result<f64> {
        let m = self.integrate_g(chi)?;
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            let dev = x.local_inner(chi)? - m;
            acc += w * dev * dev;
        }
        Ok(acc)
    }
}

/// `convolve(μ1, μ2)`: the image of `μ1 ⊗ μ2` under addition.
pub fn convolve(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    mu1.group.ensure_same(&mu2.group)?;
    let mut out = DiscreteMeasure::zero(mu1.group);
    for &(x, v) in &mu1.atoms {
        for &(y, w) in &mu2.atoms {
            out.push(x.add(&y)?, v * w)?;
        }
    }
    Ok(out)
}

/// A finite Lévy measure: a discrete measure without an atom at the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyMeasure(DiscreteMeasure);

impl LevyMeasure {
    pub fn zero(group: GroupId) -> Self {
        LevyMeasure(DiscreteMeasure::zero(group))
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.0
    }

    pub fn group(&self) -> GroupId {
        self.0.group
    }
}

/// `validate_levy(η)`.
pub fn validate_levy(eta: DiscreteMeasure) -> Result<LevyMeasure> {
    let e = GroupElement::identity(eta.group);
    if eta
        .atoms
        .iter()
        .any(|&(x, w)| w > 0.0 && x.approx_eq(&e, ATOM_TOL_TURNS))
    {
        return Err(Error::IdentityAtom);
    }
    let atoms = eta.atoms.into_iter().filter(|&(_, w)| w > 0.0).collect();
    Ok(LevyMeasure(DiscreteMeasure {
        group: eta.group,
        atoms,
    }))
}

/// The quadratic form `ψ_b`: `bℓ²` on `T`, `bℓ²/p^(2d)` on `S_p`, `0` on `Δ_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticForm {
    group: GroupId,
    b: f64,
}

impl QuadraticForm {
    pub fn new(group: GroupId, b: f64) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::InvalidQuadraticForm(b));
        }
        if group.is_padic() && b != 0.0 {
            return Err(Error::PadicQuadraticForm);
        }
        Ok(QuadraticForm { group, b })
    }

    pub fn zero(group: GroupId) -> Self {
        QuadraticForm { group, b: 0.0 }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// `ψ_1(χ)` as an exact fraction `(numerator, denominator)`.
    pub fn unit_index(group: &GroupId, chi: &Character) -> Result<(u128, u128)> {
        chi.check(group)?;
        Ok(match *chi {
            Character::Torus { l } => ((l as i128 * l as i128) as u128, 1),
            Character::Padic { .. } => (0, 1),
            Character::Solenoid { d, l } => {
                let p = group.prime().expect("solenoid") as u128;
                ((l as i128 * l as i128) as u128, p.pow(2 * d))
            }
        })
    }

    /// `qform_eval(b, χ)`.
    pub fn eval(&self, chi: &Character) -> Result<f64> {
        let (num, den) = Self::unit_index(&self.group, chi)?;
        if self.b == 0.0 {
            return Ok(0.0);
        }
        Ok(self.b * (num as f64 / den as f64))
    }
}

/// `gauss_ft(b, χ) = exp(-ψ_b(χ)/2)`.
pub fn gauss_ft(q: &QuadraticForm, chi: &Character) -> Result<f64> {
    Ok((-0.5 * q.eval(chi)?).exp())
}

/// `cpoisson_ft(η, χ) = exp Σ w (χ(x) - 1)`.
pub fn cpoisson_ft(eta: &DiscreteMeasure, chi: &Character) -> Result<Complex64> {
    Ok(eta.fourier_deviation(chi)?.exp())
}

/// `genpoisson_ft(η, χ) = exp Σ w (χ(x) - 1 - i g(x, χ))`.
pub fn genpoisson_ft(eta: &LevyMeasure, chi: &Character) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in &eta.0.atoms {
        let phase = chi.phase(&x)?;
        let g = x.local_inner(chi)?;
        acc += w * (cis_turns_minus_one(phase) - Complex64::new(0.0, g));
    }
    Ok(acc.exp())
}

/// `local_mean(μ)`: the element `m` with `χ(m) = exp(i ∫ g(x, χ) dμ)` for every `χ`.
pub fn local_mean(mu: &DiscreteMeasure) -> Result<GroupElement> {
    let group = mu.group;
    match group {
        GroupId::Padic { .. } => Ok(GroupElement::identity(group)),
        GroupId::Torus | GroupId::Solenoid { .. } => {
            let mut s = 0.0;
            for &(x, w) in &mu.atoms {
                s += w * h_trunc(x.base_arg()?);
            }
            match group {
                GroupId::Torus => GroupElement::torus_angle(s),
                _ => GroupElement::solenoid_line(group, s),
            }
        }
    }
}

/// `cylinder_mass(η, x, r) = η(x + Λ_r)`.
pub fn cylinder_mass(eta: &DiscreteMeasure, x: &GroupElement, r: u32) -> Result<f64> {
    let GroupId::Padic { depth, .. } = eta.group else {
        return Err(Error::WrongKind {
            expected: "padic",
            found: eta.group.to_string(),
        });
    };
    eta.group.ensure_same(&x.group())?;
    if r > depth {
        return Err(Error::DepthOverflow {
            requested: r,
            depth,
        });
    }
    let u = Neighborhood::Lambda { r };
    let mut acc = 0.0;
    for &(y, w) in &eta.atoms {
        if y.sub(x)?.in_nbhd(&u)? {
            acc += w;
        }
    }
    Ok(acc)
}

/// `tail_mass_measure(η, U) = η(G ∖ U)`.
pub fn tail_mass(eta: &DiscreteMeasure, u: &Neighborhood) -> Result<f64> {
    u.check(&eta.group)?;
    let mut acc = 0.0;
    for &(x, w) in &eta.atoms {
        if !x.in_nbhd(u)? {
            acc += w;
        }
    }
    Ok(acc)
}

/// A weakly infinitely divisible law given by its quadruplet `(H, a, ψ, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitLaw {
    subgroup: CompactSubgroup,
    shift: GroupElement,
    qform: QuadraticForm,
    levy: LevyMeasure,
}

impl LimitLaw {
    pub fn new(
        subgroup: CompactSubgroup,
        shift: GroupElement,
        qform: QuadraticForm,
        levy: LevyMeasure,
    ) -> Result<Self> {
        let group = shift.group();
        group.ensure_same(&qform.group)?;
        group.ensure_same(&levy.group())?;
        let subgroup = subgroup.normalize(&group)?;
        Ok(LimitLaw {
            subgroup,
            shift,
            qform,
            levy,
        })
    }

    pub fn dirac(a: GroupElement) -> Self {
        let group = a.group();
        LimitLaw {
            subgroup: CompactSubgroup::Trivial,
            shift: a,
            qform: QuadraticForm::zero(group),
            levy: LevyMeasure::zero(group),
        }
    }

    /// `γ_{ψ_b}`.
    pub fn gauss(group: GroupId, b: f64) -> Result<Self> {
        let qform = QuadraticForm::new(group, b)?;
        Ok(LimitLaw {
            qform,
            ..LimitLaw::dirac(GroupElement::identity(group))
        })
    }

    /// `ω_H`.
    pub fn haar(group: GroupId, subgroup: CompactSubgroup) -> Result<Self> {
        LimitLaw::new(
            subgroup,
            GroupElement::identity(group),
            QuadraticForm::zero(group),
            LevyMeasure::zero(group),
        )
    }

    /// The compound Poisson law `e(η) = π_{η,g} * δ_{m_g(η)}`.
    pub fn compound_poisson(eta: LevyMeasure) -> Result<Self> {
        let group = eta.group();
        let shift = local_mean(eta.measure())?;
        LimitLaw::new(
            CompactSubgroup::Trivial,
            shift,
            QuadraticForm::zero(group),
            eta,
        )
    }

    pub fn group(&self) -> GroupId {
        self.shift.group()
    }

    pub fn subgroup(&self) -> CompactSubgroup {
        self.subgroup
    }

    pub fn shift(&self) -> GroupElement {
        self.shift
    }

    pub fn qform(&self) -> QuadraticForm {
        self.qform
    }

    pub fn levy(&self) -> &LevyMeasure {
        &self.levy
    }

    /// `limit_law_ft(law, χ) = 𝟙_{H^⊥}(χ) χ(a) γ̂_ψ(χ) π̂_{η,g}(χ)`.
    pub fn ft(&self, chi: &Character) -> Result<Complex64> {
        let group = self.group();
        if !self.subgroup.annihilator_contains(&group, chi)? {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a = chi.eval(&self.shift)?;
        Ok(a * gauss_ft(&self.qform, chi)? * genpoisson_ft(&self.levy, chi)?)
    }
}
