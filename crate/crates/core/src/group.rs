//! The three concrete groups: the circle `T`, the p-adic integers `Δ_p` and the
//! p-adic solenoid `S_p`, together with their characters, compact subgroups,
//! identity neighbourhoods and explicit local inner products.
//!
//! Angles are stored in turns, reduced into `[-1/2, 1/2)`, and exposed in
//! radians. A p-adic integer is kept as its residue modulo `p^(D+1)` for a
//! working depth `D`. A solenoid element of depth `D` is kept as the pair
//! `(t_0, K)` where `t_0` is the turn of the coordinate `y_0` and
//! `K in [0, p^D)` selects the branch of `p^D`-th root, so that
//! `y_j = exp(2 pi i (t_0 + (K mod p^j)) / p^j)` for every `j <= D`.
//! Only `t_0` is floating point; all root-branch bookkeeping is integral.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Working depth used when a configuration does not specify one.
pub const DEFAULT_DEPTH: u32 = 16;

/// Largest supported p-adic modulus `p^(D+1)`.
const PADIC_MODULUS_LIMIT: u64 = 1 << 62;
/// Largest supported solenoid branch modulus `p^D` (exactly representable in f64).
const SOLENOID_MODULUS_LIMIT: u64 = 1 << 53;

/// Splits `t` into `carry + frac` with `carry` integral and `frac in [-1/2, 1/2)`.
pub(crate) fn split_turns(t: f64) -> (f64, f64) {
    let mut carry = (t + 0.5).floor();
    let mut frac = t - carry;
    if frac >= 0.5 {
        frac -= 1.0;
        carry += 1.0;
    } else if frac < -0.5 {
        frac += 1.0;
        carry -= 1.0;
    }
    (carry, frac)
}

pub(crate) fn canon_turns(t: f64) -> f64 {
    split_turns(t).1
}

/// `exp(2 pi i t)` for a phase given in turns.
pub(crate) fn cis_turns(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// `exp(2 pi i t) - 1` without cancellation near `t = 0`.
pub(crate) fn cis_turns_minus_one(t: f64) -> Complex64 {
    let half = (PI * t).sin();
    Complex64::new(-2.0 * half * half, (TAU * t).sin())
}

/// `1 - cos(2 pi t)` without cancellation near `t = 0`.
pub(crate) fn one_minus_cos_turns(t: f64) -> f64 {
    let half = (PI * t).sin();
    2.0 * half * half
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u64;
    while q.saturating_mul(q) <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

fn pow_u64(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

fn rem_f64(carry: f64, modulus: u64) -> u64 {
    carry.rem_euclid(modulus as f64) as u64
}

/// The truncation function `h`: identity on `[-pi/2, pi/2)`, folded back
/// linearly to zero at `±pi`, and zero outside `[-pi, pi)`.
pub fn h_trunc(x: f64) -> f64 {
    if !(-PI..PI).contains(&x) {
        0.0
    } else if x < -PI / 2.0 {
        -x - PI
    } else if x < PI / 2.0 {
        x
    } else {
        PI - x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupId {
    Torus,
    Padic { p: u64, depth: u32 },
    Solenoid { p: u64, depth: u32 },
}

impl GroupId {
    pub fn torus() -> Self {
        GroupId::Torus
    }

    pub fn padic(p: u64, depth: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("p = {p} is not prime")));
        }
        match pow_u64(p, depth + 1) {
            Some(m) if m <= PADIC_MODULUS_LIMIT => Ok(GroupId::Padic { p, depth }),
            _ => Err(Error::InvalidGroup(format!(
                "p^(D+1) = {p}^{} exceeds 2^62",
                depth + 1
            ))),
        }
    }

    pub fn solenoid(p: u64, depth: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("p = {p} is not prime")));
        }
        match pow_u64(p, depth) {
            Some(m) if m <= SOLENOID_MODULUS_LIMIT => Ok(GroupId::Solenoid { p, depth }),
            _ => Err(Error::InvalidGroup(format!(
                "p^D = {p}^{depth} exceeds 2^53"
            ))),
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            GroupId::Torus => None,
            GroupId::Padic { p, .. } | GroupId::Solenoid { p, .. } => Some(p),
        }
    }

    pub fn depth(&self) -> Option<u32> {
        match *self {
            GroupId::Torus => None,
            GroupId::Padic { depth, .. } | GroupId::Solenoid { depth, .. } => Some(depth),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupId::Torus => "torus",
            GroupId::Padic { .. } => "padic",
            GroupId::Solenoid { .. } => "solenoid",
        }
    }

    pub fn is_padic(&self) -> bool {
        matches!(self, GroupId::Padic { .. })
    }

    /// `p^(D+1)` for Δ_p, `p^D` for S_p.
    fn modulus(&self) -> u64 {
        match *self {
            GroupId::Torus => 1,
            GroupId::Padic { p, depth } => p.pow(depth + 1),
            GroupId::Solenoid { p, depth } => p.pow(depth),
        }
    }

    pub(crate) fn ensure_same(&self, other: &GroupId) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    fn check_depth(&self, requested: u32) -> Result<()> {
        match self.depth() {
            Some(depth) if requested > depth => Err(Error::DepthOverflow { requested, depth }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Torus => write!(f, "T"),
            GroupId::Padic { p, depth } => write!(f, "Delta_{p}[D={depth}]"),
            GroupId::Solenoid { p, depth } => write!(f, "S_{p}[D={depth}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Repr {
    Turns(f64),
    Residue(u64),
    Cylinder { base: f64, branch: u64 },
}

/// An element of one of the three groups, tagged with its [`GroupId`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    group: GroupId,
    repr: Repr,
}

impl GroupElement {
    pub fn identity(group: GroupId) -> Self {
        let repr = match group {
            GroupId::Torus => Repr::Turns(0.0),
            GroupId::Padic { .. } => Repr::Residue(0),
            GroupId::Solenoid { .. } => Repr::Cylinder {
                base: 0.0,
                branch: 0,
            },
        };
        GroupElement { group, repr }
    }

    pub fn torus_turns(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidElement(format!("non-finite angle {t}")));
        }
        Ok(GroupElement {
            group: GroupId::Torus,
            repr: Repr::Turns(canon_turns(t)),
        })
    }

    /// `e^{i theta}` on the circle.
    pub fn torus_angle(theta: f64) -> Result<Self> {
        Self::torus_turns(theta / TAU)
    }

    /// The p-adic integer with the given low-order digits (missing digits are zero).
    pub fn padic_digits(group: GroupId, digits: &[u64]) -> Result<Self> {
        let GroupId::Padic { p, depth } = group else {
            return Err(Error::WrongKind {
                expected: "padic",
                found: group.to_string(),
            });
        };
        if digits.len() > depth as usize + 1 {
            return Err(Error::InvalidElement(format!(
                "{} digits exceed working depth {depth}",
                digits.len()
            )));
        }
        let mut residue = 0u64;
        let mut place = 1u64;
        for (j, &digit) in digits.iter().enumerate() {
            if digit >= p {
                return Err(Error::InvalidElement(format!(
                    "digit {digit} at index {j} is not below p = {p}"
                )));
            }
            residue += digit * place;
            place = place.saturating_mul(p);
        }
        Ok(GroupElement {
            group,
            repr: Repr::Residue(residue),
        })
    }

    /// The class of the integer `value` in `Δ_p`.
    pub fn padic_integer(group: GroupId, value: i128) -> Result<Self> {
        if !group.is_padic() {
            return Err(Error::WrongKind {
                expected: "padic",
                found: group.to_string(),
            });
        }
        let m = group.modulus() as i128;
        Ok(GroupElement {
            group,
            repr: Repr::Residue(value.rem_euclid(m) as u64),
        })
    }

    /// The solenoid element whose deepest stored coordinate `y_D` has angle `theta_d`.
    pub fn solenoid_deep_angle(group: GroupId, theta_d: f64) -> Result<Self> {
        let GroupId::Solenoid { .. } = group else {
            return Err(Error::WrongKind {
                expected: "solenoid",
                found: group.to_string(),
            });
        };
        if !theta_d.is_finite() {
            return Err(Error::InvalidElement(format!("non-finite angle {theta_d}")));
        }
        let t_d = canon_turns(theta_d / TAU);
        Self::solenoid_unwrapped_turns(group, t_d * group.modulus() as f64)
    }

    /// Image of the real number `s` under the embedding `R -> S_p`,
    /// i.e. the element with `arg`-lift `s / p^j` at coordinate `j`.
    pub fn solenoid_line(group: GroupId, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidElement(format!("non-finite angle {s}")));
        }
        Self::solenoid_unwrapped_turns(group, s / TAU)
    }

    fn solenoid_unwrapped_turns(group: GroupId, u: f64) -> Result<Self> {
        let GroupId::Solenoid { .. } = group else {
            return Err(Error::WrongKind {
                expected: "solenoid",
                found: group.to_string(),
            });
        };
        let (carry, base) = split_turns(u);
        Ok(GroupElement {
            group,
            repr: Repr::Cylinder {
                base,
                branch: rem_f64(carry, group.modulus()),
            },
        })
    }

    /// Solenoid element from its `y_0` turn and branch index `K in [0, p^D)`.
    pub fn solenoid_parts(group: GroupId, base_turns: f64, branch: u64) -> Result<Self> {
        let GroupId::Solenoid { .. } = group else {
            return Err(Error::WrongKind {
                expected: "solenoid",
                found: group.to_string(),
            });
        };
        if !base_turns.is_finite() {
            return Err(Error::InvalidElement(format!("non-finite angle {base_turns}")));
        }
        let (carry, base) = split_turns(base_turns);
        let m = group.modulus();
        let branch = ((branch % m) as i128 + carry as i128).rem_euclid(m as i128) as u64;
        Ok(GroupElement {
            group,
            repr: Repr::Cylinder { base, branch },
        })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn is_identity(&self) -> bool {
        match self.repr {
            Repr::Turns(t) => t == 0.0,
            Repr::Residue(r) => r == 0,
            Repr::Cylinder { base, branch } => base == 0.0 && branch == 0,
        }
    }

    /// Torus angle in turns, in `[-1/2, 1/2)`.
    pub fn turns(&self) -> Option<f64> {
        match self.repr {
            Repr::Turns(t) => Some(t),
            _ => None,
        }
    }

    /// Residue modulo `p^(D+1)` of a p-adic element.
    pub fn residue(&self) -> Option<u64> {
        match self.repr {
            Repr::Residue(r) => Some(r),
            _ => None,
        }
    }

    /// Digits `x_0, ..., x_D` of a p-adic element.
    pub fn digits(&self) -> Option<Vec<u64>> {
        match (self.group, self.repr) {
            (GroupId::Padic { p, depth }, Repr::Residue(mut r)) => {
                let mut out = Vec::with_capacity(depth as usize + 1);
                for _ in 0..=depth {
                    out.push(r % p);
                    r /= p;
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Turn of the solenoid coordinate `y_j` in `[-1/2, 1/2)`.
    pub fn coordinate_turns(&self, j: u32) -> Result<f64> {
        match (self.group, self.repr) {
            (GroupId::Solenoid { p, depth }, Repr::Cylinder { base, branch }) => {
                if j > depth {
                    return Err(Error::DepthOverflow {
                        requested: j,
                        depth,
                    });
                }
                if j == 0 {
                    return Ok(base);
                }
                let pj = p.pow(j);
                Ok(canon_turns((base + (branch % pj) as f64) / pj as f64))
            }
            _ => Err(Error::WrongKind {
                expected: "solenoid",
                found: self.group.to_string(),
            }),
        }
    }

    /// Angle of the deepest stored solenoid coordinate `y_D`.
    pub fn deep_angle(&self) -> Result<f64> {
        let depth = self.group.depth().filter(|_| !self.group.is_padic());
        match depth {
            Some(d) => Ok(TAU * self.coordinate_turns(d)?),
            None => Err(Error::WrongKind {
                expected: "solenoid",
                found: self.group.to_string(),
            }),
        }
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.group.ensure_same(&other.group)?;
        let repr = match (self.repr, other.repr) {
            (Repr::Turns(a), Repr::Turns(b)) => Repr::Turns(canon_turns(a + b)),
            (Repr::Residue(a), Repr::Residue(b)) => {
                let m = self.group.modulus() as u128;
                Repr::Residue(((a as u128 + b as u128) % m) as u64)
            }
            (
                Repr::Cylinder { base: a, branch: ka },
                Repr::Cylinder { base: b, branch: kb },
            ) => {
                let (carry, base) = split_turns(a + b);
                let m = self.group.modulus() as i128;
                let branch = (ka as i128 + kb as i128 + carry as i128).rem_euclid(m) as u64;
                Repr::Cylinder { base, branch }
            }
            _ => unreachable!("representation always matches its group"),
        };
        Ok(GroupElement {
            group: self.group,
            repr,
        })
    }

    pub fn neg(&self) -> GroupElement {
        let repr = match self.repr {
            Repr::Turns(t) => Repr::Turns(canon_turns(-t)),
            Repr::Residue(r) => {
                let m = self.group.modulus();
                Repr::Residue((m - r) % m)
            }
            Repr::Cylinder { base, branch } => {
                let (carry, base) = split_turns(-base);
                let m = self.group.modulus() as i128;
                let branch = (carry as i128 - branch as i128).rem_euclid(m) as u64;
                Repr::Cylinder { base, branch }
            }
        };
        GroupElement {
            group: self.group,
            repr,
        }
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.add(&other.neg())
    }

    /// The `c`-fold group sum of `self` (negative `c` uses the inverse).
    pub fn scale(&self, c: i64) -> GroupElement {
        let repr = match self.repr {
            Repr::Turns(t) => Repr::Turns(canon_turns(c as f64 * t)),
            Repr::Residue(r) => {
                let m = self.group.modulus() as i128;
                let c = (c as i128).rem_euclid(m);
                Repr::Residue(((c as u128 * r as u128) % m as u128) as u64)
            }
            Repr::Cylinder { base, branch } => {
                let m = self.group.modulus();
                let (carry, base) = split_turns(c as f64 * base);
                let carry = rem_f64(carry, m) as i128;
                let branch =
                    ((c as i128).rem_euclid(m as i128) * branch as i128 + carry).rem_euclid(m as i128);
                Repr::Cylinder {
                    base,
                    branch: branch as u64,
                }
            }
        };
        GroupElement {
            group: self.group,
            repr,
        }
    }

    /// Equality at working depth: p-adic digits exactly, angles within `tol_turns`.
    pub fn approx_eq(&self, other: &GroupElement, tol_turns: f64) -> bool {
        let Ok(diff) = self.sub(other) else {
            return false;
        };
        match diff.repr {
            Repr::Turns(t) => t.abs() <= tol_turns,
            Repr::Residue(r) => r == 0,
            Repr::Cylinder { base, branch } => branch == 0 && base.abs() <= tol_turns,
        }
    }

    /// `arg` of a torus element, in `[-pi, pi)`.
    pub fn arg(&self) -> Result<f64> {
        match self.repr {
            Repr::Turns(t) => Ok(TAU * t),
            _ => Err(Error::WrongKind {
                expected: "torus",
                found: self.group.to_string(),
            }),
        }
    }

    /// `arg` of the base coordinate: the angle itself on `T`, `arg y_0` on `S_p`.
    pub fn base_arg(&self) -> Result<f64> {
        match self.repr {
            Repr::Turns(t) => Ok(TAU * t),
            Repr::Cylinder { base, .. } => Ok(TAU * base),
            Repr::Residue(_) => Err(Error::WrongKind {
                expected: "torus or solenoid",
                found: self.group.to_string(),
            }),
        }
    }

    /// The explicit local inner product `g(x, chi)` of the group.
    pub fn local_inner(&self, chi: &Character) -> Result<f64> {
        chi.check(&self.group)?;
        Ok(match (*chi, self.repr) {
            (Character::Torus { l }, Repr::Turns(t)) => l as f64 * h_trunc(TAU * t),
            (Character::Padic { .. }, _) => 0.0,
            (Character::Solenoid { d, l }, Repr::Cylinder { base, .. }) => {
                let p = self.group.prime().expect("solenoid has a prime");
                l as f64 * h_trunc(TAU * base) / (p as f64).powi(d as i32)
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn in_nbhd(&self, u: &Neighborhood) -> Result<bool> {
        u.check(&self.group)?;
        Ok(match (*u, self.repr) {
            (Neighborhood::Arc { eps }, Repr::Turns(t)) => (TAU * t).abs() < eps,
            (Neighborhood::Lambda { r }, Repr::Residue(res)) => {
                let p = self.group.prime().expect("padic has a prime");
                res % p.pow(r) == 0
            }
            (Neighborhood::SolenoidBox { d, eps }, Repr::Cylinder { .. }) => {
                let mut inside = true;
                for j in 0..=d {
                    if (TAU * self.coordinate_turns(j)?).abs() >= eps {
                        inside = false;
                        break;
                    }
                }
                inside
            }
            _ => unreachable!("checked above"),
        })
    }

    /// `2^{-m}` for the least index `m` at which the digits differ, 0 if equal to depth D.
    pub fn padic_metric(&self, other: &GroupElement) -> Result<f64> {
        let (GroupId::Padic { p, .. }, Repr::Residue(_)) = (self.group, self.repr) else {
            return Err(Error::WrongKind {
                expected: "padic",
                found: self.group.to_string(),
            });
        };
        let mut diff = self.sub(other)?.residue().expect("padic");
        if diff == 0 {
            return Ok(0.0);
        }
        let mut m = 0i32;
        while diff % p == 0 {
            diff /= p;
            m += 1;
        }
        Ok(2f64.powi(-m))
    }

    /// Index of the first nonzero digit (the p-adic valuation), `None` for zero.
    pub fn padic_valuation(&self) -> Option<u32> {
        let (GroupId::Padic { p, .. }, Repr::Residue(mut r)) = (self.group, self.repr) else {
            return None;
        };
        if r == 0 {
            return None;
        }
        let mut v = 0;
        while r % p == 0 {
            r /= p;
            v += 1;
        }
        Some(v)
    }

    /// Lifts a depth-D solenoid element to depth D+1 along root branch `k`.
    pub fn solenoid_lift(&self, k: u64) -> Result<GroupElement> {
        let (GroupId::Solenoid { p, depth }, Repr::Cylinder { base, branch }) =
            (self.group, self.repr)
        else {
            return Err(Error::WrongKind {
                expected: "solenoid",
                found: self.group.to_string(),
            });
        };
        if k >= p {
            return Err(Error::InvalidArgument(format!(
                "branch {k} out of range 0..{p}"
            )));
        }
        let lifted = GroupId::solenoid(p, depth + 1)?;
        let pd = p.pow(depth) as i128;
        // theta_D is canonical in [-pi, pi): subtract one turn when (t_0 + K)/p^D >= 1/2.
        let wrapped = ((2 * branch as i128 - pd) as f64) >= -2.0 * base;
        let shift = k as i128 - wrapped as i128;
        let m = lifted.modulus() as i128;
        let branch = (branch as i128 + shift * pd).rem_euclid(m) as u64;
        Ok(GroupElement {
            group: lifted,
            repr: Repr::Cylinder { base, branch },
        })
    }

    /// Drops the deepest coordinate of a solenoid element (inverse of any lift).
    pub fn solenoid_project(&self) -> Result<GroupElement> {
        let (GroupId::Solenoid { p, depth }, Repr::Cylinder { base, branch }) =
            (self.group, self.repr)
        else {
            return Err(Error::WrongKind {
                expected: "solenoid",
                found: self.group.to_string(),
            });
        };
        if depth == 0 {
            return Err(Error::InvalidArgument(
                "cannot project a depth-0 solenoid element".into(),
            ));
        }
        let group = GroupId::solenoid(p, depth - 1)?;
        Ok(GroupElement {
            group,
            repr: Repr::Cylinder {
                base,
                branch: branch % group.modulus(),
            },
        })
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Turns(t) => write!(f, "e^(i*{})", TAU * t),
            Repr::Residue(_) => {
                let digits = self.digits().unwrap_or_default();
                let body: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
                write!(f, "({})", body.join(","))
            }
            Repr::Cylinder { base, branch } => write!(f, "[t0={base}, K={branch}]"),
        }
    }
}

/// `identity(g)`.
pub fn identity(group: GroupId) -> GroupElement {
    GroupElement::identity(group)
}

/// A character of one of the three groups.
///
/// Torus: `chi_l(y) = y^l`. p-adic: `chi_{d,l}(x) = exp(2 pi i l (x mod p^(d+1)) / p^(d+1))`
/// with `0 <= l < p^(d+1)`. Solenoid: `chi_{d,l}(y) = y_d^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Character {
    Torus { l: i64 },
    Padic { d: u32, l: u64 },
    Solenoid { d: u32, l: i64 },
}

impl Character {
    pub fn trivial(group: &GroupId) -> Character {
        match group {
            GroupId::Torus => Character::Torus { l: 0 },
            GroupId::Padic { .. } => Character::Padic { d: 0, l: 0 },
            GroupId::Solenoid { .. } => Character::Solenoid { d: 0, l: 0 },
        }
    }

    pub fn is_trivial(&self) -> bool {
        match *self {
            Character::Torus { l } => l == 0,
            Character::Padic { l, .. } => l == 0,
            Character::Solenoid { l, .. } => l == 0,
        }
    }

    /// Depth `d` of a p-adic or solenoid character (0 on the torus).
    pub fn depth(&self) -> u32 {
        match *self {
            Character::Torus { .. } => 0,
            Character::Padic { d, .. } | Character::Solenoid { d, .. } => d,
        }
    }

    pub fn check(&self, group: &GroupId) -> Result<()> {
        match (*self, *group) {
            (Character::Torus { .. }, GroupId::Torus) => Ok(()),
            (Character::Padic { d, l }, GroupId::Padic { p, .. }) => {
                group.check_depth(d)?;
                let m = p.pow(d + 1);
                if l >= m {
                    return Err(Error::InvalidCharacter(format!(
                        "l = {l} must be below p^(d+1) = {m}"
                    )));
                }
                Ok(())
            }
            (Character::Solenoid { d, .. }, GroupId::Solenoid { .. }) => group.check_depth(d),
            _ => Err(Error::GroupMismatch {
                left: self.id(),
                right: group.to_string(),
            }),
        }
    }

    /// Phase `chi(x)` in turns, in `[-1/2, 1/2)`.
    pub fn phase(&self, x: &GroupElement) -> Result<f64> {
        self.check(&x.group)?;
        Ok(match (*self, x.repr) {
            (Character::Torus { l }, Repr::Turns(t)) => canon_turns(l as f64 * t),
            (Character::Padic { d, l }, Repr::Residue(r)) => {
                let p = x.group.prime().expect("padic");
                let m = p.pow(d + 1) as u128;
                let num = (l as u128 * (r as u128 % m)) % m;
                canon_turns(num as f64 / m as f64)
            }
            (Character::Solenoid { d, l }, Repr::Cylinder { base, branch }) => {
                let p = x.group.prime().expect("solenoid");
                let pd = p.pow(d) as i128;
                let (carry, frac) = split_turns(l as f64 * base);
                let int = (l as i128 * (branch as i128 % pd) + carry.rem_euclid(pd as f64) as i128)
                    .rem_euclid(pd);
                canon_turns((frac + int as f64) / pd as f64)
            }
            _ => unreachable!("checked above"),
        })
    }

    /// `chi(x)` as a unit complex number.
    pub fn eval(&self, x: &GroupElement) -> Result<Complex64> {
        Ok(cis_turns(self.phase(x)?))
    }

    /// `chi(x) - 1`, accurate when `chi(x)` is close to 1.
    pub fn eval_minus_one(&self, x: &GroupElement) -> Result<Complex64> {
        Ok(cis_turns_minus_one(self.phase(x)?))
    }

    /// `1 - Re chi(x)`, accurate when `chi(x)` is close to 1.
    pub fn one_minus_re(&self, x: &GroupElement) -> Result<f64> {
        Ok(one_minus_cos_turns(self.phase(x)?))
    }

    /// Rewrites the character at depth `target >= d` (`chi_{d,l} = chi_{d+1, p l}`).
    pub fn refine(&self, group: &GroupId, target: u32) -> Result<Character> {
        self.check(group)?;
        group.check_depth(target)?;
        let p = group.prime().unwrap_or(1);
        match *self {
            Character::Torus { .. } => Ok(*self),
            Character::Padic { d, l } => {
                if target < d {
                    return Err(Error::InvalidArgument(format!(
                        "cannot refine depth {d} down to {target}"
                    )));
                }
                Ok(Character::Padic {
                    d: target,
                    l: l * p.pow(target - d),
                })
            }
            Character::Solenoid { d, l } => {
                if target < d {
                    return Err(Error::InvalidArgument(format!(
                        "cannot refine depth {d} down to {target}"
                    )));
                }
                let factor = p.pow(target - d) as i64;
                let l = l.checked_mul(factor).ok_or_else(|| {
                    Error::InvalidCharacter("refined index overflows i64".into())
                })?;
                Ok(Character::Solenoid { d: target, l })
            }
        }
    }

    /// Canonical form: the smallest depth representing the same character.
    pub fn canonical(&self, group: &GroupId) -> Result<Character> {
        self.check(group)?;
        let p = group.prime().unwrap_or(1);
        Ok(match *self {
            Character::Torus { .. } => *self,
            Character::Padic { mut d, mut l } => {
                if l == 0 {
                    return Ok(Character::Padic { d: 0, l: 0 });
                }
                while d > 0 && l % p == 0 {
                    l /= p;
                    d -= 1;
                }
                Character::Padic { d, l }
            }
            Character::Solenoid { mut d, mut l } => {
                if l == 0 {
                    return Ok(Character::Solenoid { d: 0, l: 0 });
                }
                while d > 0 && l % p as i64 == 0 {
                    l /= p as i64;
                    d -= 1;
                }
                Character::Solenoid { d, l }
            }
        })
    }

    /// Pointwise product `chi_1 chi_2`, refined to the common depth.
    pub fn mul(&self, other: &Character, group: &GroupId) -> Result<Character> {
        let d = self.depth().max(other.depth());
        let a = self.refine(group, d)?;
        let b = other.refine(group, d)?;
        Ok(match (a, b) {
            (Character::Torus { l: x }, Character::Torus { l: y }) => Character::Torus { l: x + y },
            (Character::Padic { l: x, .. }, Character::Padic { l: y, .. }) => {
                let m = group.prime().expect("padic").pow(d + 1);
                Character::Padic { d, l: (x + y) % m }
            }
            (Character::Solenoid { l: x, .. }, Character::Solenoid { l: y, .. }) => {
                Character::Solenoid { d, l: x + y }
            }
            _ => unreachable!("both checked against the same group"),
        })
    }

    pub fn inverse(&self, group: &GroupId) -> Result<Character> {
        self.check(group)?;
        Ok(match *self {
            Character::Torus { l } => Character::Torus { l: -l },
            Character::Padic { d, l } => {
                let m = group.prime().expect("padic").pow(d + 1);
                Character::Padic { d, l: (m - l) % m }
            }
            Character::Solenoid { d, l } => Character::Solenoid { d, l: -l },
        })
    }

    /// Identifier used in reports: `l:<l>` or `d:<d>,l:<l>`.
    pub fn id(&self) -> String {
        match *self {
            Character::Torus { l } => format!("l:{l}"),
            Character::Padic { d, l } => format!("d:{d},l:{l}"),
            Character::Solenoid { d, l } => format!("d:{d},l:{l}"),
        }
    }

    /// Parses an identifier produced by [`Character::id`] for the given group.
    pub fn parse(group: &GroupId, text: &str) -> Result<Character> {
        let bad = || Error::InvalidCharacter(format!("cannot parse `{text}`"));
        let mut d: Option<u32> = None;
        let mut l: Option<&str> = None;
        for part in text.split(',') {
            let (key, value) = part.trim().split_once(':').ok_or_else(bad)?;
            match key.trim() {
                "d" => d = Some(value.trim().parse().map_err(|_| bad())?),
                "l" => l = Some(value.trim()),
                _ => return Err(bad()),
            }
        }
        let l = l.ok_or_else(bad)?;
        let chi = match group {
            GroupId::Torus => {
                if d.is_some() {
                    return Err(bad());
                }
                Character::Torus {
                    l: l.parse().map_err(|_| bad())?,
                }
            }
            GroupId::Padic { .. } => Character::Padic {
                d: d.ok_or_else(bad)?,
                l: l.parse().map_err(|_| bad())?,
            },
            GroupId::Solenoid { .. } => Character::Solenoid {
                d: d.ok_or_else(bad)?,
                l: l.parse().map_err(|_| bad())?,
            },
        };
        chi.check(group)?;
        Ok(chi)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// `char_eval(chi, x)`.
pub fn char_eval(chi: &Character, x: &GroupElement) -> Result<Complex64> {
    chi.eval(x)
}

/// `local_inner(x, chi)`.
pub fn local_inner(x: &GroupElement, chi: &Character) -> Result<f64> {
    x.local_inner(chi)
}

/// Compact subgroups that a limit law may carry as its Haar factor.
///
/// `Cyclic(r)` is the group of `r`-th roots of unity in `T`; `Lambda(r)` is the
/// subgroup of `Δ_p` whose first `r` digits vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompactSubgroup {
    Trivial,
    Full,
    Cyclic(u64),
    Lambda(u32),
}

impl CompactSubgroup {
    /// Validates the subgroup against `group` and folds aliases
    /// (`Cyclic(1)` and `Lambda(D+1)` are trivial, `Lambda(0)` is the whole group).
    pub fn normalize(&self, group: &GroupId) -> Result<CompactSubgroup> {
        match (*self, *group) {
            (CompactSubgroup::Trivial, _) | (CompactSubgroup::Full, _) => Ok(*self),
            (CompactSubgroup::Cyclic(0), GroupId::Torus) => Err(Error::InvalidSubgroup(
                "cyclic subgroup order must be at least 1".into(),
            )),
            (CompactSubgroup::Cyclic(1), GroupId::Torus) => Ok(CompactSubgroup::Trivial),
            (CompactSubgroup::Cyclic(_), GroupId::Torus) => Ok(*self),
            (CompactSubgroup::Lambda(0), GroupId::Padic { .. }) => Ok(CompactSubgroup::Full),
            (CompactSubgroup::Lambda(r), GroupId::Padic { depth, .. }) => {
                if r > depth + 1 {
                    Err(Error::DepthOverflow {
                        requested: r,
                        depth: depth + 1,
                    })
                } else if r == depth + 1 {
                    Ok(CompactSubgroup::Trivial)
                } else {
                    Ok(*self)
                }
            }
            (h, g) => Err(Error::InvalidSubgroup(format!("{h:?} is not a subgroup of {g}"))),
        }
    }

    /// Whether `chi` lies in the annihilator `H^perp`, i.e. `chi = 1` on `H`.
    pub fn annihilator_contains(&self, group: &GroupId, chi: &Character) -> Result<bool> {
        chi.check(group)?;
        let h = self.normalize(group)?;
        Ok(match (h, *chi) {
            (CompactSubgroup::Trivial, _) => true,
            (CompactSubgroup::Full, chi) => chi.is_trivial(),
            (CompactSubgroup::Cyclic(r), Character::Torus { l }) => l.rem_euclid(r as i64) == 0,
            (CompactSubgroup::Lambda(r), Character::Padic { d, l }) => {
                if l == 0 || d < r {
                    true
                } else {
                    let p = group.prime().expect("padic");
                    l % p.pow(d + 1 - r) == 0
                }
            }
            _ => unreachable!("normalize rejects subgroups of other groups"),
        })
    }
}

/// Basic identity neighbourhoods: an arc on `T`, `Λ_r` on `Δ_p`, and
/// `{ |arg y_j| < eps for all j <= d }` on `S_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Neighborhood {
    Arc { eps: f64 },
    Lambda { r: u32 },
    SolenoidBox { d: u32, eps: f64 },
}

impl Neighborhood {
    pub fn check(&self, group: &GroupId) -> Result<()> {
        let valid_eps = |eps: f64| eps > 0.0 && eps <= PI;
        match (*self, *group) {
            (Neighborhood::Arc { eps }, GroupId::Torus) if valid_eps(eps) => Ok(()),
            (Neighborhood::Lambda { r }, GroupId::Padic { depth, .. }) => {
                if r > depth + 1 {
                    Err(Error::DepthOverflow {
                        requested: r,
                        depth: depth + 1,
                    })
                } else {
                    Ok(())
                }
            }
            (Neighborhood::SolenoidBox { d, eps }, GroupId::Solenoid { depth, .. })
                if valid_eps(eps) =>
            {
                if d > depth {
                    Err(Error::DepthOverflow {
                        requested: d,
                        depth,
                    })
                } else {
                    Ok(())
                }
            }
            (u, g) => Err(Error::InvalidNeighborhood(format!("{u:?} on {g}"))),
        }
    }

    /// Whether `x` lies on the topological boundary of the neighbourhood.
    /// The `Λ_r` are clopen, so this is always false on `Δ_p`.
    pub fn on_boundary(&self, x: &GroupElement) -> Result<bool> {
        self.check(&x.group())?;
        Ok(match *self {
            Neighborhood::Arc { eps } => (x.arg()?.abs() - eps).abs() < 1e-12,
            Neighborhood::Lambda { .. } => false,
            Neighborhood::SolenoidBox { d, eps } => {
                let mut worst: f64 = 0.0;
                for j in 0..=d {
                    worst = worst.max((TAU * x.coordinate_turns(j)?).abs());
                }
                (worst - eps).abs() < 1e-12
            }
        })
    }

    pub fn id(&self) -> String {
        match *self {
            Neighborhood::Arc { eps } => format!("eps:{eps}"),
            Neighborhood::Lambda { r } => format!("r:{r}"),
            Neighborhood::SolenoidBox { d, eps } => format!("d:{d},eps:{eps}"),
        }
    }
}
