//! Actual dimension of plane systems by interpolation over a prime field.
//!
//! A degree-`d` curve has multiplicity `m` at a point exactly when all partial
//! derivatives of order `< m` of its affine equation vanish there. Stacking
//! those linear conditions for random points gives a matrix whose rank, at
//! general points, counts the independent conditions; the projective
//! dimension of the system is then `N − 1 − rank` with `N = (d+1)(d+2)/2`.
//!
//! Random points over `F_p` are general with probability at least
//! `1 − deg/p`, where `deg` bounds the degree of the locus where the rank
//! drops. At `p ≈ 2³¹` and a few trials (taking the maximum rank) a wrong
//! answer is not a practical concern, but a rank deficiency seen mod `p` is
//! only evidence, not proof, in characteristic 0; repeating with independent
//! primes is the usual cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{virtual_dim, BaseClass, SurfaceKind, SystemSpec};

pub const DEFAULT_PRIME: u64 = 2_147_483_647;
pub const DEFAULT_TRIALS: u32 = 3;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// `F_p` for a prime `p < 2³²`, so products fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Option<Self> {
        (p < 1 << 32 && is_prime(p)).then_some(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FieldMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[u64]>::to_vec).collect()
    }

    /// Rank by Gaussian elimination, pivoting on the first nonzero entry.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let cap = rows.min(cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == cap {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            if piv != rank {
                for c in col..cols {
                    a.swap(piv * cols + c, rank * cols + c);
                }
            }
            let inv = f.inv(a[rank * cols + col]);
            for c in col..cols {
                a[rank * cols + c] = f.mul(a[rank * cols + c], inv);
            }
            let (head, tail) = a.split_at_mut((rank + 1) * cols);
            let pivot_row = &head[rank * cols..];
            for row in tail.chunks_mut(cols) {
                let factor = row[col];
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    row[c] = f.sub(row[c], f.mul(factor, pivot_row[c]));
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Monomials `x^α y^β` with `α + β ≤ d`, ordered by total degree and then by
/// decreasing power of `x`: `1, x, y, x², xy, y², …`.
pub fn monomial_basis(d: i64) -> Vec<(usize, usize)> {
    let d = d.max(0) as usize;
    (0..=d)
        .flat_map(|t| (0..=t).rev().map(move |a| (a, t - a)))
        .collect()
}

pub fn monomial_count(d: i64) -> i64 {
    if d < 0 {
        0
    } else {
        (d + 1) * (d + 2) / 2
    }
}

/// Derivative conditions at affine points `(x, y, multiplicity)`.
///
/// Row `(point, (a, b))` for `a + b < m` holds `∂ᵃ_x ∂ᵇ_y` of every basis
/// monomial evaluated at the point (plain derivatives, no factorial
/// normalisation).
pub fn conditions_matrix(d: i64, points: &[(u64, u64, i64)], prime: u64) -> Result<FieldMatrix> {
    let field = PrimeField::new(prime)
        .filter(|f| d < 0 || f.modulus() > d as u64)
        .ok_or(Error::Modulus { prime, degree: d })?;
    let basis = monomial_basis(d);
    let cols = basis.len();
    let du = d.max(0) as usize;

    // falling[n][k] = n (n-1) ... (n-k+1) mod p
    let mut falling = vec![vec![0u64; du + 1]; du + 1];
    for (n, row) in falling.iter_mut().enumerate() {
        row[0] = 1;
        for k in 1..=n {
            row[k] = field.mul(row[k - 1], (n - k + 1) as u64);
        }
    }

    let mut data = Vec::new();
    let mut rows = 0;
    for &(x, y, m) in points {
        if m <= 0 {
            continue;
        }
        let mut xp = vec![1u64; du + 1];
        let mut yp = vec![1u64; du + 1];
        for i in 1..=du {
            xp[i] = field.mul(xp[i - 1], x % prime);
            yp[i] = field.mul(yp[i - 1], y % prime);
        }
        for order in 0..m as usize {
            for a in (0..=order).rev() {
                let b = order - a;
                for &(alpha, beta) in &basis {
                    let v = if alpha < a || beta < b {
                        0
                    } else {
                        let coeff = field.mul(falling[alpha][a], falling[beta][b]);
                        field.mul(coeff, field.mul(xp[alpha - a], yp[beta - b]))
                    };
                    data.push(v);
                }
                rows += 1;
            }
        }
    }
    Ok(FieldMatrix {
        field,
        rows,
        cols,
        data,
    })
}

/// Degree, point multiplicities and sampling parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationProblem {
    pub degree: i64,
    pub mults: Vec<i64>,
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
}

impl InterpolationProblem {
    pub fn new(degree: i64, mults: &[i64], config: &OracleConfig) -> Self {
        InterpolationProblem {
            degree,
            mults: mults.to_vec(),
            prime: config.prime,
            trials: config.trials,
            seed: config.seed,
        }
    }

    pub fn monomials(&self) -> i64 {
        monomial_count(self.degree)
    }

    pub fn conditions(&self) -> i64 {
        self.mults.iter().filter(|&&m| m > 0).map(|m| m * (m + 1) / 2).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("at least one trial is required".into()));
        }
        if let Some(m) = self.mults.iter().find(|&&m| m < 0) {
            return Err(Error::Precondition(format!("negative multiplicity {m}")));
        }
        if PrimeField::new(self.prime).is_none() || (self.degree >= 0 && self.prime <= self.degree as u64) {
            return Err(Error::Modulus {
                prime: self.prime,
                degree: self.degree,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub prime: u64,
    /// Maximum rank over trials.
    pub rank: i64,
    /// `N − 1 − rank`.
    pub adim: i64,
    pub per_trial: Vec<i64>,
}

/// Sampling parameters shared by oracle calls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            prime: DEFAULT_PRIME,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        }
    }
}

fn sample_points(problem: &InterpolationProblem, trial: u32) -> Vec<(u64, u64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    rng.set_stream(trial as u64);
    let mut points: Vec<(u64, u64, i64)> = Vec::new();
    for &m in problem.mults.iter().filter(|&&m| m > 0) {
        loop {
            let x = rng.gen_range(0..problem.prime);
            let y = rng.gen_range(0..problem.prime);
            if !points.iter().any(|&(px, py, _)| px == x && py == y) {
                points.push((x, y, m));
                break;
            }
        }
    }
    points
}

fn trial_rank(problem: &InterpolationProblem, trial: u32) -> Result<i64> {
    let points = sample_points(problem, trial);
    let matrix = conditions_matrix(problem.degree, &points, problem.prime)?;
    Ok(matrix.rank() as i64)
}

/// Projective dimension of the system at random points.
pub fn actual_dim(problem: &InterpolationProblem) -> Result<RankResult> {
    problem.validate()?;
    let n = problem.monomials();
    if n == 0 {
        return Ok(RankResult {
            prime: problem.prime,
            rank: 0,
            adim: -1,
            per_trial: vec![0; problem.trials as usize],
        });
    }
    let per_trial = (0..problem.trials)
        .into_par_iter()
        .map(|t| trial_rank(problem, t))
        .collect::<Result<Vec<_>>>()?;
    let rank = per_trial.iter().copied().max().unwrap_or(0);
    Ok(RankResult {
        prime: problem.prime,
        rank,
        adim: n - 1 - rank,
        per_trial,
    })
}

/// `(vdim, adim)` for a plane system.
pub fn dimension_pair(spec: &SystemSpec, config: &OracleConfig) -> Result<(i64, i64)> {
    if spec.surface.kind() != SurfaceKind::RationalAnticanonical || !matches!(spec.base, BaseClass::Plane(_)) {
        return Err(Error::Scope(
            "the interpolation oracle only covers plane systems".into(),
        ));
    }
    let full = spec.full_class()?;
    let problem = InterpolationProblem::new(full.degree(), full.mults(), config);
    let result = actual_dim(&problem)?;
    Ok((virtual_dim(&full, 1), result.adim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DivisorClass;

    const P: u64 = DEFAULT_PRIME;

    fn adim(d: i64, mults: &[i64]) -> i64 {
        actual_dim(&InterpolationProblem::new(d, mults, &OracleConfig::default()))
            .unwrap()
            .adim
    }

    #[test]
    fn basis_order() {
        assert_eq!(
            monomial_basis(2),
            vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        );
        assert_eq!(monomial_basis(5).len() as i64, monomial_count(5));
    }

    #[test]
    fn line_through_origin() {
        let m = conditions_matrix(1, &[(0, 0, 1)], P).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1, 0, 0]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn singular_conic_conditions() {
        let m = conditions_matrix(2, &[(3, 5, 2)], P).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.rank(), 3);
        // value row at (3,5): 1, x, y, x², xy, y²
        assert_eq!(m.to_rows()[0], vec![1, 3, 5, 9, 15, 25]);
        // ∂x row: 0, 1, 0, 2x, y, 0
        assert_eq!(m.to_rows()[1], vec![0, 1, 0, 6, 5, 0]);

        let two = conditions_matrix(2, &[(3, 5, 2), (7, 11, 2)], P).unwrap();
        assert_eq!(two.rows(), 6);
        assert_eq!(two.rank(), 5);
    }

    #[test]
    fn modulus_errors() {
        assert!(matches!(
            conditions_matrix(5, &[(1, 1, 1)], 5),
            Err(Error::Modulus { .. })
        ));
        assert!(matches!(
            conditions_matrix(1, &[(1, 1, 1)], 15),
            Err(Error::Modulus { .. })
        ));
        assert!(actual_dim(&InterpolationProblem {
            degree: 3,
            mults: vec![1],
            prime: 3,
            trials: 1,
            seed: 0
        })
        .is_err());
    }

    #[test]
    fn actual_dim_examples() {
        assert_eq!(adim(4, &[2, 2, 2, 2, 2]), 0);
        assert_eq!(adim(1, &[]), 2);
        assert_eq!(adim(2, &[2, 2]), 0);
        assert_eq!(adim(3, &[2, 2]), 3);
        assert_eq!(adim(-1, &[]), -1);
    }

    #[test]
    fn dimension_pair_examples() {
        let cfg = OracleConfig::default();
        let pair = |d, m: &[i64]| dimension_pair(&SystemSpec::plane_from_full(d, m), &cfg).unwrap();
        assert_eq!(pair(2, &[2, 2]), (-1, 0));
        assert_eq!(pair(3, &[2, 2]), (3, 3));
        assert_eq!(pair(4, &[2, 2, 2, 2, 2]), (-1, 0));
        let k3 = SystemSpec::abstract_class(SurfaceKind::K3, 2, 2, 2);
        assert!(dimension_pair(&k3, &cfg).is_err());
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let problem = InterpolationProblem::new(6, &[3, 2, 2, 2, 1], &OracleConfig::default());
        assert_eq!(actual_dim(&problem).unwrap(), actual_dim(&problem).unwrap());
    }

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(P).unwrap();
        assert_eq!(f.mul(f.inv(12345), 12345), 1);
        assert!(PrimeField::new(2_147_483_629).is_some());
        assert!(PrimeField::new(1_000_000_007).is_some());
        assert!(PrimeField::new(1 << 32).is_none());
        assert!(PrimeField::new(91).is_none());
    }

    #[test]
    fn adim_is_at_least_edim() {
        for d in 0..7i64 {
            for a in 0..4i64 {
                for b in 0..4i64 {
                    for s in 0..4usize {
                        let mut m = vec![a, b];
                        m.extend(std::iter::repeat_n(2, s));
                        let e = crate::lattice::expected_dim(&DivisorClass::new(d, m.clone()), 1);
                        assert!(adim(d, &m) >= e, "({d}; {m:?})");
                    }
                }
            }
        }
    }
}
