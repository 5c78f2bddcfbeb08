//! Speciality verdicts and secant defectivity.
//!
//! For plane systems `dh − Σ mᵢeᵢ − Σ 2Eⱼ` (at most nine free points plus any
//! number of double points) the verdict comes from Cremona reduction: every
//! negative multiplicity met along the way is an exceptional curve in the
//! fixed part, and is peeled off. A curve peeled with multiplicity `c`
//! raises the virtual dimension of the residual by `c(c−1)/2`; the system is
//! special exactly when some `c ≥ 2` and the residual is nonempty. Once the
//! residual is in standard form, it meets every (−1)-curve nonnegatively and
//! its dimension is the virtual one.
//!
//! K3, Abelian and Enriques surfaces are handled by numeric rules only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cremona::{reduce_with, Terminal};
use crate::error::{Error, Result};
use crate::lattice::{
    virtual_dim, BaseClass, DivisorClass, SurfaceKind, SystemSpec, MAX_FREE_SLOTS,
};
use crate::oracle::{dimension_pair, OracleConfig};

/// A fixed curve with the multiplicity it is contained in the base locus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedComponent {
    pub class: DivisorClass,
    pub multiplicity: i64,
}

/// The moving part `n·D`, with `D` primitive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreePart {
    pub n: i64,
    pub class: DivisorClass,
}

/// `L = F + n·D`; `free` is `None` when the residual class is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub fixed: Vec<FixedComponent>,
    pub free: Option<FreePart>,
}

impl Decomposition {
    pub fn residual(&self) -> DivisorClass {
        match &self.free {
            Some(f) => f.n * &f.class,
            None => DivisorClass::zero(),
        }
    }
}

/// Structure of the system one double point earlier.
///
/// When `L − 2E_k` is special but `L` (the same system without the double
/// point at `removed_slot`) is not, `|L| = F + |n·D|` is composed with the
/// pencil `|D|` and `R = D − E_k` is a (−1)-curve with `(L − 2E_k)·R = −2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilDecomposition {
    pub removed_slot: usize,
    pub base: DivisorClass,
    pub fixed: Vec<FixedComponent>,
    pub n: i64,
    pub pencil: DivisorClass,
    pub curve: DivisorClass,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictBasis {
    /// Cremona reduction on the plane.
    Symbolic,
    /// Numeric classification rule with no independent check available.
    Rule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub vdim: i64,
    pub edim: i64,
    pub adim_predicted: i64,
    pub special: bool,
    /// A (−1)-class `W` with `L·W ≤ −2`, in the caller's slot labels.
    pub witness: Option<DivisorClass>,
    pub decomposition: Option<Decomposition>,
    pub pencil: Option<PencilDecomposition>,
    pub basis: VerdictBasis,
    pub note: Option<String>,
}

/// Reduce a full plane class and read off dimension, fixed part and witness.
fn analyze(full: &DivisorClass) -> Verdict {
    let vdim = virtual_dim(full, 1);
    let edim = vdim.max(-1);
    let reduced = reduce_with(full, i64::MAX);
    let adim = match reduced.terminal {
        Terminal::NegativeDegree => -1,
        _ => virtual_dim(&reduced.cls, 1).max(-1),
    };
    let special = adim > edim;
    if adim < 0 {
        return Verdict {
            vdim,
            edim,
            adim_predicted: adim,
            special,
            witness: None,
            decomposition: None,
            pencil: None,
            basis: VerdictBasis::Symbolic,
            note: None,
        };
    }

    let mut fixed: Vec<FixedComponent> = Vec::new();
    for (class, amount) in reduced.peeled() {
        match fixed.iter_mut().find(|f| f.class == class) {
            Some(f) => f.multiplicity += amount,
            None => fixed.push(FixedComponent {
                class,
                multiplicity: amount,
            }),
        }
    }
    let residual = fixed
        .iter()
        .fold(full.clone(), |acc, f| &acc - &(f.multiplicity * &f.class))
        .normalize();
    let free = (!residual.is_zero()).then(|| {
        let n = residual.content();
        FreePart {
            n,
            class: residual.divide(n).expect("content divides every entry"),
        }
    });

    let witness = if special {
        fixed
            .iter()
            .filter(|f| f.multiplicity >= 2)
            .min_by_key(|f| full.dot(&f.class))
            .map(|f| f.class.clone())
    } else {
        None
    };

    Verdict {
        vdim,
        edim,
        adim_predicted: adim,
        special,
        witness,
        decomposition: Some(Decomposition { fixed, free }),
        pencil: None,
        basis: VerdictBasis::Symbolic,
        note: None,
    }
}

fn pencil_of(full: &DivisorClass, removed_slot: usize) -> Option<PencilDecomposition> {
    let mut mults = full.mults().to_vec();
    mults.remove(removed_slot);
    let base = DivisorClass::new(full.degree(), mults);
    let earlier = analyze(&base);
    if earlier.special || earlier.adim_predicted < 0 {
        return None;
    }
    let decomposition = earlier.decomposition?;
    let free = decomposition.free?;
    // reinsert the removed slot with multiplicity 0 so labels match `full`
    let relabel = |c: &DivisorClass| {
        let mut m = c.padded(removed_slot).mults().to_vec();
        m.insert(removed_slot, 0);
        DivisorClass::new(c.degree(), m).normalize()
    };
    let pencil = relabel(&free.class);
    let curve = &pencil - &DivisorClass::exceptional(removed_slot);
    Some(PencilDecomposition {
        removed_slot,
        base: relabel(&base),
        fixed: decomposition
            .fixed
            .iter()
            .map(|f| FixedComponent {
                class: relabel(&f.class),
                multiplicity: f.multiplicity,
            })
            .collect(),
        n: free.n,
        pencil,
        curve: curve.normalize(),
    })
}

fn plane_full_class(spec: &SystemSpec) -> Result<DivisorClass> {
    if spec.surface.kind() != SurfaceKind::RationalAnticanonical {
        return Err(Error::Precondition(format!(
            "{} systems are classified by classify_kodaira_zero",
            spec.surface.kind().name()
        )));
    }
    let BaseClass::Plane(base) = &spec.base else {
        return Err(Error::Precondition(
            "plane systems need an explicit base class".into(),
        ));
    };
    if spec.free_slots() > MAX_FREE_SLOTS {
        return Err(Error::Scope(format!(
            "{} free multiplicities exceed the nine-point range; use the oracle instead",
            spec.free_slots()
        )));
    }
    if base.mults().iter().any(|&m| m < 0) || base.degree() < 0 {
        return Err(Error::Precondition(
            "degree and multiplicities must be nonnegative".into(),
        ));
    }
    spec.full_class()
}

/// Speciality of `dh − Σ mᵢeᵢ − Σ 2Eⱼ` on the plane.
pub fn speciality_plane(spec: &SystemSpec) -> Result<Verdict> {
    let full = plane_full_class(spec)?;
    let mut verdict = analyze(&full);
    if verdict.special && spec.doubles > 0 {
        verdict.pencil = pencil_of(&full, full.slots() - 1);
    }
    Ok(verdict)
}

/// `(D², D·K)` for the pencil `|D|` of a special double-point system on a
/// surface with the given `χ(O_S)`: `(χ − 1, 3χ − 5)`.
pub fn pencil_invariants(chi: i64) -> (i64, i64) {
    (chi - 1, 3 * chi - 5)
}

/// Whether a pencil may appear with multiplicity `n`: `n | 2(1 − χ)`.
pub fn pencil_multiplicity_allowed(chi: i64, n: i64) -> bool {
    n > 0 && (2 * (1 - chi)) % n == 0
}

/// Rules for K3, Abelian and Enriques surfaces, applied to `c·H` with given
/// `H²` and `s` extra double points.
///
/// Only the K3 case can be special: `s = 2`, `c = 2`, `H² = 2`. No lattice
/// genericity beyond these numbers is assumed or checked.
pub fn classify_kodaira_zero(spec: &SystemSpec) -> Result<Verdict> {
    let kind = spec.surface.kind();
    if kind == SurfaceKind::RationalAnticanonical {
        return Err(Error::Precondition(
            "rational systems are classified by speciality_plane".into(),
        ));
    }
    let BaseClass::Abstract {
        multiple,
        h_squared,
    } = spec.base
    else {
        return Err(Error::MalformedClass(
            "expected an abstract class c·H with given H²".into(),
        ));
    };
    if multiple < 1 {
        return Err(Error::MalformedClass(format!(
            "multiple {multiple} must be positive"
        )));
    }
    if h_squared <= 0 || h_squared % 2 != 0 {
        return Err(Error::MalformedClass(format!(
            "H² = {h_squared} must be positive and even"
        )));
    }
    let chi = spec.surface.chi();
    let s = spec.doubles as i64;
    let lsq = multiple
        .checked_mul(multiple)
        .and_then(|v| v.checked_mul(h_squared))
        .ok_or(Error::Overflow("abstract self-intersection"))?;
    // K numerically trivial on S, so K_S̃ = Σ Eⱼ and L·K_S̃ = 2s
    let vdim = (lsq - 4 * s - 2 * s) / 2 + chi - 1;
    let edim = vdim.max(-1);

    let (special, note) = match kind {
        SurfaceKind::Abelian => {
            let (dsq, _) = pencil_invariants(chi);
            debug_assert!(dsq < 0);
            // a pencil would need D² = −1
            (false, "never special on abelian surfaces".to_string())
        }
        SurfaceKind::Enriques => (false, "never special on Enriques surfaces".to_string()),
        SurfaceKind::K3 => {
            let (dsq, dk) = pencil_invariants(chi);
            // D = H − Σ Eᵢ over DK exceptional curves, M = nD with n > 1
            let n_ok = multiple > 1 && pencil_multiplicity_allowed(chi, multiple);
            let hit = n_ok && s == dk + 1 && h_squared == dsq + dk;
            if hit {
                (
                    true,
                    "2H − 2E₀ − 2E₁ with H² = 2; defect predicted, unverified".to_string(),
                )
            } else {
                (false, "non-special on K3 surfaces".to_string())
            }
        }
        SurfaceKind::RationalAnticanonical => unreachable!(),
    };
    Ok(Verdict {
        vdim,
        edim,
        adim_predicted: if special { edim + 1 } else { edim },
        special,
        witness: None,
        decomposition: None,
        pencil: None,
        basis: VerdictBasis::Rule,
        note: Some(note),
    })
}

/// Why `very_ample_check` rejected a class, if it did.
pub fn very_ample_failure(h: &DivisorClass) -> Result<Option<String>> {
    let mut ms: Vec<i64> = h.mults().to_vec();
    ms.retain(|&m| m != 0);
    if ms.len() > MAX_FREE_SLOTS {
        return Err(Error::Scope(format!(
            "very-ampleness criterion covers at most nine points, got {}",
            ms.len()
        )));
    }
    if ms.iter().any(|&m| m < 0) {
        return Ok(Some("negative multiplicity".into()));
    }
    ms.sort_unstable_by(|a, b| b.cmp(a));
    let m = |i: usize| ms.get(i).copied().unwrap_or(0);
    let d = h.degree();
    if d < m(0) + m(1) + m(2) {
        return Ok(Some(format!("not in standard form: d < {}", m(0) + m(1) + m(2))));
    }
    if d < m(0) + m(1) + 1 {
        return Ok(Some(format!("d < m₁ + m₂ + 1 = {}", m(0) + m(1) + 1)));
    }
    let anti = 3 * d - ms.iter().sum::<i64>();
    if anti < 3 {
        return Ok(Some(format!("3d − Σmᵢ = {anti} < 3")));
    }
    Ok(None)
}

/// Standard form, `d ≥ m₁ + m₂ + 1` and `3d − Σ mᵢ ≥ 3`.
pub fn very_ample_check(h: &DivisorClass) -> Result<bool> {
    Ok(very_ample_failure(h)?.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecantMode {
    Symbolic,
    Oracle,
}

/// Dimension bookkeeping for the `k`-secant variety of `φ_H(S) ⊂ ℙᴺ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantReport {
    pub h: DivisorClass,
    pub n: i64,
    pub k: u32,
    pub expected: i64,
    pub actual: i64,
    pub defective: bool,
}

/// `dim Sec_k = N − 1 − dim|H − 2p₀ − … − 2p_k|`, against `min(N, 3k + 2)`.
pub fn secant_report(
    h: &DivisorClass,
    k: u32,
    mode: SecantMode,
    config: &OracleConfig,
) -> Result<SecantReport> {
    if let Some(why) = very_ample_failure(h)? {
        return Err(Error::Precondition(format!("{} is not very ample: {why}", h.folded())));
    }
    let n = virtual_dim(h, 1);
    let spec = SystemSpec::plane(h.clone(), k + 1);
    let adim = match mode {
        SecantMode::Symbolic => speciality_plane(&spec)?.adim_predicted,
        SecantMode::Oracle => dimension_pair(&spec, config)?.1,
    };
    let actual = n - 1 - adim;
    let expected = n.min(3 * k as i64 + 2);
    Ok(SecantReport {
        h: h.clone(),
        n,
        k,
        expected,
        actual,
        defective: actual < expected,
    })
}

/// Every very ample class of degree `1..=d_max` on at most nine points,
/// multiplicities sorted descending, in lexicographic order.
pub fn very_ample_classes(d_max: i64) -> Vec<DivisorClass> {
    fn extend(d: i64, prefix: &mut Vec<i64>, out: &mut Vec<DivisorClass>) {
        let h = DivisorClass::new(d, prefix.clone());
        if very_ample_check(&h).unwrap_or(false) {
            out.push(h);
        }
        if prefix.len() == MAX_FREE_SLOTS {
            return;
        }
        let cap = prefix.last().copied().unwrap_or(d);
        let sum: i64 = prefix.iter().sum();
        for m in 1..=cap {
            // adding points only lowers 3d − Σm and raises the top sums
            if 3 * d - sum - m < 3 {
                break;
            }
            prefix.push(m);
            let top: i64 = prefix.iter().take(3).sum();
            let top2: i64 = prefix.iter().take(2).sum();
            if top <= d && top2 < d {
                extend(d, prefix, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 1..=d_max {
        extend(d, &mut Vec::new(), &mut out);
    }
    out
}

/// Defective secant varieties of all very ample `H` with `deg H ≤ d_max` and
/// `k ≤ k_max`, sorted by class and then `k`.
pub fn scan_defective(
    d_max: i64,
    k_max: u32,
    mode: SecantMode,
    config: &OracleConfig,
) -> Result<Vec<SecantReport>> {
    let classes = very_ample_classes(d_max);
    let jobs: Vec<(&DivisorClass, u32)> = classes
        .iter()
        .flat_map(|h| (0..=k_max).map(move |k| (h, k)))
        .collect();
    let mut reports = jobs
        .par_iter()
        .map(|&(h, k)| secant_report(h, k, mode, config))
        .collect::<Result<Vec<_>>>()?;
    reports.retain(|r| r.defective);
    reports.sort_by(|a, b| {
        (a.h.degree(), a.h.mults(), a.k).cmp(&(b.h.degree(), b.h.mults(), b.k))
    });
    Ok(reports)
}
