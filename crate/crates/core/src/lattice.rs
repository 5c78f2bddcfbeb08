//! Divisor classes on the blow-up of the plane at general points.
//!
//! A class `d·h − Σ mᵢ·eᵢ` is stored as the integer vector `(d; m₁, …, m_r)`.
//! The intersection form has `h² = 1`, `eᵢ² = −1` and `h·eᵢ = 0`; vectors of
//! different lengths are compared by zero-extending the shorter one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(d; m₁, …, m_r)` representing `d·h − Σ mᵢ·eᵢ`.
///
/// Entries may be negative. Trailing zeros are kept until [`normalize`] is
/// called, since slot identity matters to Cremona traces.
///
/// [`normalize`]: DivisorClass::normalize
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    degree: i64,
    mults: Vec<i64>,
}

impl DivisorClass {
    pub fn new(degree: i64, mults: impl Into<Vec<i64>>) -> Self {
        DivisorClass {
            degree,
            mults: mults.into(),
        }
    }

    /// The pull-back `h` of a line.
    pub fn line() -> Self {
        DivisorClass::new(1, Vec::new())
    }

    /// The exceptional class `eᵢ` (0-based slot), written `(0; 0, …, −1)`.
    pub fn exceptional(slot: usize) -> Self {
        let mut mults = vec![0; slot + 1];
        mults[slot] = -1;
        DivisorClass::new(0, mults)
    }

    pub fn zero() -> Self {
        DivisorClass::new(0, Vec::new())
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn mults(&self) -> &[i64] {
        &self.mults
    }

    /// Multiplicity at `slot`, zero past the stored length.
    pub fn mult(&self, slot: usize) -> i64 {
        self.mults.get(slot).copied().unwrap_or(0)
    }

    /// Number of stored slots (including trailing zeros).
    pub fn slots(&self) -> usize {
        self.mults.len()
    }

    pub fn is_zero(&self) -> bool {
        self.degree == 0 && self.mults.iter().all(|&m| m == 0)
    }

    pub(crate) fn mults_mut(&mut self) -> &mut Vec<i64> {
        &mut self.mults
    }

    pub(crate) fn set_degree(&mut self, degree: i64) {
        self.degree = degree;
    }

    /// Strip trailing zero multiplicities.
    pub fn normalize(&self) -> Self {
        let mut out = self.clone();
        while out.mults.last() == Some(&0) {
            out.mults.pop();
        }
        out
    }

    /// Zero-extend to at least `len` slots.
    pub fn padded(&self, len: usize) -> Self {
        let mut out = self.clone();
        if out.mults.len() < len {
            out.mults.resize(len, 0);
        }
        out
    }

    /// Checked intersection product.
    pub fn try_dot(&self, other: &DivisorClass) -> Result<i64> {
        let overflow = || Error::Overflow("intersection pairing");
        let mut acc = self.degree.checked_mul(other.degree).ok_or_else(overflow)?;
        for (a, b) in self.mults.iter().zip(&other.mults) {
            let p = a.checked_mul(*b).ok_or_else(overflow)?;
            acc = acc.checked_sub(p).ok_or_else(overflow)?;
        }
        Ok(acc)
    }

    /// Intersection product. Panics on `i64` overflow; use [`try_dot`] to
    /// handle that case.
    ///
    /// [`try_dot`]: DivisorClass::try_dot
    pub fn dot(&self, other: &DivisorClass) -> i64 {
        self.try_dot(other).expect("intersection pairing overflowed i64")
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    /// `L·K` against the plane canonical class on the same number of slots.
    pub fn dot_canonical(&self) -> i64 {
        -3 * self.degree + self.mults.iter().sum::<i64>()
    }

    /// Greatest common divisor of all entries (0 for the zero class).
    pub fn content(&self) -> i64 {
        self.mults
            .iter()
            .fold(self.degree.abs(), |g, &m| gcd(g, m.abs()))
    }

    /// Divide every entry by `n`; `None` unless all entries are divisible.
    pub fn divide(&self, n: i64) -> Option<DivisorClass> {
        if n == 0 || self.degree % n != 0 || self.mults.iter().any(|m| m % n != 0) {
            return None;
        }
        Some(DivisorClass::new(
            self.degree / n,
            self.mults.iter().map(|m| m / n).collect::<Vec<_>>(),
        ))
    }

    /// Concise rendering with multiplicities sorted descending, zeros dropped
    /// and repeats folded into exponents, e.g. `(2; 1^5)`.
    pub fn folded(&self) -> String {
        let mut ms: Vec<i64> = self.mults.iter().copied().filter(|&m| m != 0).collect();
        ms.sort_unstable_by(|a, b| b.cmp(a));
        let mut atoms = Vec::new();
        let mut i = 0;
        while i < ms.len() {
            let mut j = i;
            while j < ms.len() && ms[j] == ms[i] {
                j += 1;
            }
            if j - i == 1 {
                atoms.push(ms[i].to_string());
            } else {
                atoms.push(format!("{}^{}", ms[i], j - i));
            }
            i = j;
        }
        if atoms.is_empty() {
            format!("({};)", self.degree)
        } else {
            format!("({}; {})", self.degree, atoms.join(", "))
        }
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.degree)?;
        for (i, m) in self.mults.iter().enumerate() {
            if i == 0 {
                write!(f, " {m}")?;
            } else {
                write!(f, ", {m}")?;
            }
        }
        write!(f, ")")
    }
}

fn zip_extend(a: &DivisorClass, b: &DivisorClass, op: impl Fn(i64, i64) -> i64) -> DivisorClass {
    let len = a.slots().max(b.slots());
    let mults = (0..len).map(|i| op(a.mult(i), b.mult(i))).collect::<Vec<_>>();
    DivisorClass::new(op(a.degree, b.degree), mults)
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        zip_extend(self, rhs, |x, y| x + y)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        zip_extend(self, rhs, |x, y| x - y)
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass::new(
            self * rhs.degree,
            rhs.mults.iter().map(|m| self * m).collect::<Vec<_>>(),
        )
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        -1 * self
    }
}

/// `A·B` with zero-extension of the shorter class.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> i64 {
    a.dot(b)
}

/// Canonical class `K = −3h + Σ eᵢ` on `r` slots, i.e. `(−3; −1^r)`.
pub fn canonical_class(r: usize) -> DivisorClass {
    DivisorClass::new(-3, vec![-1; r])
}

/// Projective virtual dimension `(L² − L·K)/2 + χ − 1`.
pub fn virtual_dim(l: &DivisorClass, chi: i64) -> i64 {
    (l.self_intersection() - l.dot_canonical()) / 2 + chi - 1
}

/// `max(vdim, −1)`.
pub fn expected_dim(l: &DivisorClass, chi: i64) -> i64 {
    virtual_dim(l, chi).max(-1)
}

/// `p_a = (L² + L·K)/2 + 1`.
pub fn arithmetic_genus(l: &DivisorClass) -> i64 {
    (l.self_intersection() + l.dot_canonical()) / 2 + 1
}

/// Surfaces the classification rules know about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// Blow-up of the plane at ≤ 9 general points.
    RationalAnticanonical,
    K3,
    Abelian,
    Enriques,
}

impl SurfaceKind {
    pub fn chi(self) -> i64 {
        match self {
            SurfaceKind::RationalAnticanonical => 1,
            SurfaceKind::K3 => 2,
            SurfaceKind::Abelian => 0,
            SurfaceKind::Enriques => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::RationalAnticanonical => "p2",
            SurfaceKind::K3 => "k3",
            SurfaceKind::Abelian => "abelian",
            SurfaceKind::Enriques => "enriques",
        }
    }
}

/// A surface kind together with its holomorphic Euler characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceProfile {
    kind: SurfaceKind,
    chi: i64,
}

impl SurfaceProfile {
    pub fn new(kind: SurfaceKind) -> Self {
        SurfaceProfile {
            kind,
            chi: kind.chi(),
        }
    }

    pub fn plane() -> Self {
        SurfaceProfile::new(SurfaceKind::RationalAnticanonical)
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }
}

/// Most free multiplicity slots a rational anticanonical surface allows.
pub const MAX_FREE_SLOTS: usize = 9;

/// The class a system is built on, before the extra double points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseClass {
    /// Explicit class on the blown-up plane.
    Plane(DivisorClass),
    /// `multiple · H` for a class `H` with the given self-intersection, on a
    /// surface whose Picard lattice is not modelled.
    Abstract { multiple: i64, h_squared: i64 },
}

/// A surface, a base class, and a number of extra general double points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub surface: SurfaceProfile,
    pub base: BaseClass,
    pub doubles: u32,
}

impl SystemSpec {
    /// A plane system `base − 2·Σ Eⱼ` with `doubles` extra double points.
    pub fn plane(base: DivisorClass, doubles: u32) -> Self {
        SystemSpec {
            surface: SurfaceProfile::plane(),
            base: BaseClass::Plane(base),
            doubles,
        }
    }

    /// Plane system from a full multiplicity list: every entry equal to 2 is
    /// counted as an extra double point, the others form the base.
    pub fn plane_from_full(degree: i64, mults: &[i64]) -> Self {
        let doubles = mults.iter().filter(|&&m| m == 2).count() as u32;
        let free: Vec<i64> = mults.iter().copied().filter(|&m| m != 2).collect();
        SystemSpec::plane(DivisorClass::new(degree, free), doubles)
    }

    pub fn abstract_class(kind: SurfaceKind, multiple: i64, h_squared: i64, doubles: u32) -> Self {
        SystemSpec {
            surface: SurfaceProfile::new(kind),
            base: BaseClass::Abstract {
                multiple,
                h_squared,
            },
            doubles,
        }
    }

    /// The base class extended by `doubles` entries equal to 2.
    pub fn full_class(&self) -> Result<DivisorClass> {
        match &self.base {
            BaseClass::Plane(base) => {
                let mut mults = base.mults().to_vec();
                mults.extend(std::iter::repeat_n(2, self.doubles as usize));
                Ok(DivisorClass::new(base.degree(), mults))
            }
            BaseClass::Abstract { .. } => Err(Error::Precondition(
                "abstract classes have no explicit plane representation".into(),
            )),
        }
    }

    /// Number of nonzero free slots in the base of a plane system.
    pub fn free_slots(&self) -> usize {
        match &self.base {
            BaseClass::Plane(base) => base.normalize().slots(),
            BaseClass::Abstract { .. } => 0,
        }
    }
}
