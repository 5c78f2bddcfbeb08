//! Quadratic Cremona transformations acting on divisor classes.
//!
//! The transformation based at slots `i, j, k` sends
//! `(d; …, mᵢ, …, mⱼ, …, m_k, …)` to `(d − t; …, mᵢ − t, …, mⱼ − t, …, m_k − t, …)`
//! with `t = mᵢ + mⱼ + m_k − d`. It preserves the intersection form and fixes
//! the canonical class, and it is an involution.
//!
//! [`to_standard_form`] alternates descending sorts with Cremona steps at the
//! three largest multiplicities until the class is in standard form or leaves
//! the effective cone. Every operation is logged in a [`CremonaTrace`] so that
//! classes found at the end (such as an exceptional class carrying a negative
//! multiplicity) can be pulled back to the original point labels.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::DivisorClass;

/// One quadratic transformation, with the `t` it had when applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CremonaStep {
    pub slots: [usize; 3],
    pub t: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceOp {
    /// Relabel slots: new slot `i` holds old slot `perm[i]`.
    Permute(Vec<usize>),
    Cremona(CremonaStep),
    /// Subtract `amount` copies of the exceptional class at `slot`
    /// (raising a negative multiplicity by `amount`).
    Peel { slot: usize, amount: i64 },
}

/// Ordered log of the moves taken by a reduction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CremonaTrace {
    ops: Vec<TraceOp>,
}

impl CremonaTrace {
    pub fn ops(&self) -> &[TraceOp] {
        &self.ops
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn steps(&self) -> impl Iterator<Item = &CremonaStep> {
        self.ops.iter().filter_map(|op| match op {
            TraceOp::Cremona(s) => Some(s),
            _ => None,
        })
    }

    pub fn permutations(&self) -> impl Iterator<Item = &[usize]> {
        self.ops.iter().filter_map(|op| match op {
            TraceOp::Permute(p) => Some(p.as_slice()),
            _ => None,
        })
    }

    pub(crate) fn push(&mut self, op: TraceOp) {
        self.ops.push(op);
    }

    /// Apply every logged move, peels included, to `cls`.
    pub fn replay(&self, cls: &DivisorClass) -> DivisorClass {
        self.ops.iter().fold(cls.clone(), |c, op| forward(op, &c))
    }

    /// Undo every logged move in reverse order.
    pub fn replay_inverse(&self, cls: &DivisorClass) -> DivisorClass {
        self.ops.iter().rev().fold(cls.clone(), |c, op| backward(op, &c))
    }

    /// Map a class expressed in the reduced coordinates back to the original
    /// slots, using only the lattice isometries (permutations and Cremona
    /// steps) logged before position `upto` in the trace.
    pub fn pull_back(&self, cls: &DivisorClass, upto: usize) -> DivisorClass {
        self.ops[..upto]
            .iter()
            .rev()
            .filter(|op| !matches!(op, TraceOp::Peel { .. }))
            .fold(cls.clone(), |c, op| backward(op, &c))
    }
}

fn permute(cls: &DivisorClass, perm: &[usize]) -> DivisorClass {
    let src = cls.padded(perm.len());
    let mut mults: Vec<i64> = perm.iter().map(|&p| src.mult(p)).collect();
    mults.extend_from_slice(&src.mults()[perm.len().min(src.slots())..]);
    DivisorClass::new(cls.degree(), mults)
}

fn unpermute(cls: &DivisorClass, perm: &[usize]) -> DivisorClass {
    let src = cls.padded(perm.len());
    let mut mults = src.mults().to_vec();
    for (i, &p) in perm.iter().enumerate() {
        mults[p] = src.mult(i);
    }
    DivisorClass::new(cls.degree(), mults)
}

fn peel(cls: &DivisorClass, slot: usize, amount: i64) -> DivisorClass {
    let mut out = cls.padded(slot + 1);
    out.mults_mut()[slot] += amount;
    out
}

fn cremona_unchecked(cls: &DivisorClass, [i, j, k]: [usize; 3]) -> DivisorClass {
    let mut out = cls.padded(i.max(j).max(k) + 1);
    let t = out.mult(i) + out.mult(j) + out.mult(k) - out.degree();
    out.set_degree(out.degree() - t);
    let ms = out.mults_mut();
    ms[i] -= t;
    ms[j] -= t;
    ms[k] -= t;
    out
}

fn forward(op: &TraceOp, cls: &DivisorClass) -> DivisorClass {
    match op {
        TraceOp::Permute(p) => permute(cls, p),
        TraceOp::Cremona(s) => cremona_unchecked(cls, s.slots),
        TraceOp::Peel { slot, amount } => peel(cls, *slot, *amount),
    }
}

fn backward(op: &TraceOp, cls: &DivisorClass) -> DivisorClass {
    match op {
        TraceOp::Permute(p) => unpermute(cls, p),
        TraceOp::Cremona(s) => cremona_unchecked(cls, s.slots),
        TraceOp::Peel { slot, amount } => peel(cls, *slot, -*amount),
    }
}

/// Quadratic transformation based at the (0-based) slots `i, j, k`.
/// Classes shorter than the largest slot are zero-extended.
pub fn apply_cremona(l: &DivisorClass, i: usize, j: usize, k: usize) -> Result<DivisorClass> {
    if i == j || j == k || i == k {
        return Err(Error::SlotCollision(i, j, k));
    }
    Ok(cremona_unchecked(l, [i, j, k]))
}

/// How a reduction ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// Sorted, nonnegative, and `d ≥ m₁ + m₂ + m₃`.
    Standard,
    /// All multiplicities nonnegative but `d < 0`: the system is empty.
    NegativeDegree,
    /// A multiplicity `≤ −2` at `slot` (in reduced coordinates).
    NegativeMultiplicity { slot: usize, value: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub cls: DivisorClass,
    pub trace: CremonaTrace,
    pub terminal: Terminal,
}

impl ReducedForm {
    /// Fixed exceptional components found while reducing, as
    /// `(class in original slots, multiplicity)`.
    pub fn peeled(&self) -> Vec<(DivisorClass, i64)> {
        self.trace
            .ops()
            .iter()
            .enumerate()
            .filter_map(|(pos, op)| match op {
                TraceOp::Peel { slot, amount } => Some((
                    self.trace
                        .pull_back(&DivisorClass::exceptional(*slot), pos)
                        .normalize(),
                    *amount,
                )),
                _ => None,
            })
            .collect()
    }

    /// Degrees of the class before each Cremona step, followed by the final
    /// degree.
    pub fn degree_sequence(&self, input: &DivisorClass) -> Vec<i64> {
        let mut seq = vec![input.degree()];
        let mut cur = input.clone();
        for op in self.trace.ops() {
            cur = forward(op, &cur);
            if matches!(op, TraceOp::Cremona(_)) {
                seq.push(cur.degree());
            }
        }
        seq
    }
}

/// Stable descending sort permutation (ties keep the lower slot first).
fn sort_permutation(cls: &DivisorClass) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..cls.slots()).collect();
    perm.sort_by_key(|&i| std::cmp::Reverse(cls.mult(i)));
    perm
}

fn is_identity(perm: &[usize]) -> bool {
    perm.iter().enumerate().all(|(i, &p)| i == p)
}

/// `d ≥ m₁ + m₂ + m₃` for a class already sorted descending.
fn top_three_fit(cls: &DivisorClass) -> bool {
    cls.degree() >= cls.mult(0) + cls.mult(1) + cls.mult(2)
}

/// Sorted descending, nonnegative multiplicities, `d ≥ m₁ + m₂ + m₃`.
pub fn is_standard(cls: &DivisorClass) -> bool {
    let ms = cls.mults();
    ms.windows(2).all(|w| w[0] >= w[1])
        && ms.iter().all(|&m| m >= 0)
        && cls.degree() >= 0
        && top_three_fit(cls)
}

/// Shared reduction loop. Negative multiplicities with magnitude at most
/// `peel_limit` are peeled and reduction continues; anything more negative
/// stops with [`Terminal::NegativeMultiplicity`].
pub(crate) fn reduce_with(l: &DivisorClass, peel_limit: i64) -> ReducedForm {
    let mut cur = l.clone();
    let mut trace = CremonaTrace::default();
    loop {
        let perm = sort_permutation(&cur);
        if !is_identity(&perm) {
            cur = permute(&cur, &perm);
            trace.push(TraceOp::Permute(perm));
        }
        let mut stop = None;
        for slot in 0..cur.slots() {
            let m = cur.mult(slot);
            if m < 0 {
                if -m <= peel_limit {
                    cur = peel(&cur, slot, -m);
                    trace.push(TraceOp::Peel { slot, amount: -m });
                } else if stop.is_none() {
                    stop = Some(Terminal::NegativeMultiplicity { slot, value: m });
                }
            }
        }
        if let Some(terminal) = stop {
            return ReducedForm {
                cls: cur,
                trace,
                terminal,
            };
        }
        if cur.mults().iter().any(|&m| m < 0) || !cur.mults().windows(2).all(|w| w[0] >= w[1]) {
            // peeling raised trailing entries to zero; re-sort first
            continue;
        }
        if cur.degree() < 0 {
            return ReducedForm {
                cls: cur,
                trace,
                terminal: Terminal::NegativeDegree,
            };
        }
        if top_three_fit(&cur) {
            return ReducedForm {
                cls: cur,
                trace,
                terminal: Terminal::Standard,
            };
        }
        let slots = [0, 1, 2];
        let t = cur.mult(0) + cur.mult(1) + cur.mult(2) - cur.degree();
        cur = cremona_unchecked(&cur, slots);
        trace.push(TraceOp::Cremona(CremonaStep { slots, t }));
    }
}

/// Reduce to standard form. Multiplicities of `−1` are peeled and the loop
/// continues; a multiplicity of `−2` or less ends the reduction.
pub fn to_standard_form(l: &DivisorClass) -> ReducedForm {
    reduce_with(l, 1)
}

/// Whether `c` is the class of a (−1)-curve: `C² = −1`, `C·K = −1`, and
/// sorting plus Cremona steps carry it to an exceptional class.
pub fn is_minus_one_class(c: &DivisorClass) -> bool {
    if c.self_intersection() != -1 || c.dot_canonical() != -1 {
        return false;
    }
    let mut cur = c.clone();
    loop {
        cur = permute(&cur, &sort_permutation(&cur));
        let negatives = cur.mults().iter().filter(|&&m| m < 0).count();
        if cur.degree() == 0 && negatives == 1 && cur.mults().iter().all(|&m| m == 0 || m == -1) {
            return true;
        }
        if negatives > 0 || cur.degree() < 0 || top_three_fit(&cur) {
            return false;
        }
        cur = cremona_unchecked(&cur, [0, 1, 2]);
    }
}

/// All (−1)-classes on `r` slots with degree at most `max_degree`, ordered by
/// degree and then lexicographically on the multiplicity vector.
pub fn enumerate_minus_one_classes(r: usize, max_degree: i64) -> Result<Vec<DivisorClass>> {
    if !(1..=10).contains(&r) {
        return Err(Error::Precondition(format!(
            "slot count {r} outside 1..=10"
        )));
    }
    if max_degree < 0 {
        return Err(Error::Precondition("max_degree must be nonnegative".into()));
    }
    let mut out: Vec<DivisorClass> = (0..r)
        .map(|i| DivisorClass::exceptional(i).padded(r))
        .collect();
    for delta in 1..=max_degree {
        let mut found = Vec::new();
        let mut buf = vec![0i64; r];
        search(delta, 3 * delta - 1, delta * delta + 1, 0, &mut buf, &mut found);
        found.sort();
        out.extend(
            found
                .into_iter()
                .map(|m| DivisorClass::new(delta, m))
                .filter(is_minus_one_class),
        );
    }
    Ok(out)
}

fn search(
    delta: i64,
    sum_left: i64,
    sq_left: i64,
    pos: usize,
    buf: &mut Vec<i64>,
    found: &mut Vec<Vec<i64>>,
) {
    let remaining = (buf.len() - pos) as i64;
    if remaining == 0 {
        if sum_left == 0 && sq_left == 0 {
            found.push(buf.clone());
        }
        return;
    }
    // μ² ≥ μ and Cauchy–Schwarz
    if sum_left < 0 || sq_left < sum_left || sum_left * sum_left > remaining * sq_left {
        return;
    }
    let mut mu = 0;
    while mu <= delta && mu <= sum_left && mu * mu <= sq_left {
        buf[pos] = mu;
        search(delta, sum_left - mu, sq_left - mu * mu, pos + 1, buf, found);
        mu += 1;
    }
    buf[pos] = 0;
}

type Memo = RwLock<HashMap<(usize, i64), Arc<Vec<DivisorClass>>>>;

/// Memoised [`enumerate_minus_one_classes`], shared across threads.
pub fn minus_one_classes_cached(r: usize, max_degree: i64) -> Result<Arc<Vec<DivisorClass>>> {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(hit) = memo.read().expect("memo poisoned").get(&(r, max_degree)) {
        return Ok(Arc::clone(hit));
    }
    let list = Arc::new(enumerate_minus_one_classes(r, max_degree)?);
    memo.write()
        .expect("memo poisoned")
        .insert((r, max_degree), Arc::clone(&list));
    Ok(list)
}
