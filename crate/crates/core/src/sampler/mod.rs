//! Exact rational witnesses for every stratum, and the identity engine that
//! evaluates registered identities on them.

mod expr;
mod registry;
mod suite;

pub use expr::{parse_expr, Env, Expr, Value};
pub use registry::{
    default_registry, Check, Family, IdentityEntry, IdentityKind, NRange, Registry,
};
pub use suite::{run_identity_suite, run_identity_suite_with, IdentityReport};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::vw;
use crate::json::Pair;
use crate::matrix::{commutator, outer, rank, Matrix, Vector};
use crate::scalar::{Rational, Scalar, TolerancePolicy};

/// Per-trial generator: one ChaCha stream per `(trial, n)` under `seed`.
pub fn trial_rng(seed: u64, trial: u64, n: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 8) | n as u64);
    rng
}

fn int(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// Small random rational `p/q` with `|p| <= 12`, `1 <= q <= 5`.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        BigInt::from(rng.gen_range(-12..=12)),
        BigInt::from(rng.gen_range(1..=5)),
    )
}

pub fn random_nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let q = random_rational(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

fn distinct_rationals(n: usize, rng: &mut impl Rng) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    while out.len() < n {
        let q = random_rational(rng);
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// `X, Y, c, r` with `XY - YX + I = c r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CMQuadruple {
    pub x: Matrix<Rational>,
    pub y: Matrix<Rational>,
    pub c: Vector<Rational>,
    pub r: Vector<Rational>,
}

impl CMQuadruple {
    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// Verifies `[X,Y] + I = c r` and `r c = n` exactly.
    pub fn check(&self) -> Result<()> {
        let lhs = &commutator(&self.x, &self.y)? + &Matrix::identity(self.n());
        if lhs != outer(&self.c, &self.r)? {
            return Err(Error::Construction("[X,Y] + I != c r".into()));
        }
        let rc = self
            .r
            .entries
            .iter()
            .zip(&self.c.entries)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        if rc != int(self.n() as i64) {
            return Err(Error::Construction(format!(
                "r c = {rc}, expected {}",
                self.n()
            )));
        }
        Ok(())
    }

    /// `g . (X, Y, c, r) = (g X g^-1, g Y g^-1, g c, r g^-1)`.
    pub fn conjugate(&self, g: &Matrix<Rational>, g_inv: &Matrix<Rational>) -> CMQuadruple {
        let n = self.n();
        let gc = (0..n)
            .map(|i| {
                (0..n).fold(Rational::zero(), |acc, j| {
                    acc + g.get(i, j) * &self.c.entries[j]
                })
            })
            .collect();
        let rg = (0..n)
            .map(|j| {
                (0..n).fold(Rational::zero(), |acc, i| {
                    acc + &self.r.entries[i] * g_inv.get(i, j)
                })
            })
            .collect();
        CMQuadruple {
            x: &(g * &self.x) * g_inv,
            y: &(g * &self.y) * g_inv,
            c: Vector::column(gc),
            r: Vector::row(rg),
        }
    }

    pub fn pair(&self) -> Pair<Rational> {
        Pair {
            x: self.x.clone(),
            y: self.y.clone(),
            c: Some(self.c.clone()),
            r: Some(self.r.clone()),
        }
    }
}

/// `X = diag(x)`, `Y_ij = 1/(x_i - x_j)` off the diagonal, `Y_ii = y_diag_i`,
/// `c` and `r` all ones.
pub fn cm_point(x: &[Rational], y_diag: &[Rational]) -> Result<CMQuadruple> {
    if x.len() != y_diag.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y_diag.len(),
        });
    }
    let n = x.len();
    for i in 0..n {
        for j in i + 1..n {
            if x[i] == x[j] {
                return Err(Error::RepeatedAbscissa(i, j));
            }
        }
    }
    let y = Matrix::from_fn(n, |i, j| {
        if i == j {
            y_diag[i].clone()
        } else {
            Rational::one() / (&x[i] - &x[j])
        }
    });
    let q = CMQuadruple {
        x: Matrix::diag(x),
        y,
        c: Vector::column(vec![Rational::one(); n]),
        r: Vector::row(vec![Rational::one(); n]),
    };
    q.check()?;
    Ok(q)
}

/// A random integer matrix of determinant one together with its inverse,
/// built from a few elementary row operations.
pub fn random_unimodular(n: usize, rng: &mut impl Rng) -> (Matrix<Rational>, Matrix<Rational>) {
    let mut g = Matrix::identity(n);
    let mut g_inv = Matrix::identity(n);
    if n < 2 {
        return (g, g_inv);
    }
    for _ in 0..3 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = rng.gen_range(-2..=2i64);
        let e = Matrix::from_fn(n, |a, b| {
            if a == b {
                int(1)
            } else if (a, b) == (i, j) {
                int(k)
            } else {
                int(0)
            }
        });
        let e_inv = Matrix::from_fn(n, |a, b| {
            if a == b {
                int(1)
            } else if (a, b) == (i, j) {
                int(-k)
            } else {
                int(0)
            }
        });
        g = &g * &e;
        g_inv = &e_inv * &g_inv;
    }
    (g, g_inv)
}

/// Random Calogero-Moser point of size `n`, conjugated by a random
/// unimodular matrix so that `X` is not diagonal in general.
pub fn random_cm_point(n: usize, rng: &mut impl Rng) -> CMQuadruple {
    let x = distinct_rationals(n, rng);
    let y_diag: Vec<Rational> = (0..n).map(|_| random_rational(rng)).collect();
    let q = cm_point(&x, &y_diag).expect("abscissae are distinct");
    let (g, g_inv) = random_unimodular(n, rng);
    q.conjugate(&g, &g_inv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommutingFamily {
    SimultaneousDiagonal,
    PolynomialInX,
    NilpotentJordan,
}

impl CommutingFamily {
    pub const ALL: [CommutingFamily; 3] = [
        CommutingFamily::SimultaneousDiagonal,
        CommutingFamily::PolynomialInX,
        CommutingFamily::NilpotentJordan,
    ];
}

fn small_int(rng: &mut impl Rng, bound: i64) -> Rational {
    int(rng.gen_range(-bound..=bound))
}

fn conjugate_pair(
    x: &Matrix<Rational>,
    y: &Matrix<Rational>,
    rng: &mut impl Rng,
) -> (Matrix<Rational>, Matrix<Rational>) {
    let (g, g_inv) = random_unimodular(x.n(), rng);
    (&(&g * x) * &g_inv, &(&g * y) * &g_inv)
}

/// A commuting 3x3 pair from the given family, conjugated by a random
/// unimodular matrix.
///
/// * simultaneous-diagonal: random joint eigenvalue pairs; a quarter of the
///   draws repeat one pair and an eighth use a single scalar pair
/// * polynomial-in-X: random integer `X` and `Y = c0 + c1 X + c2 X^2`
/// * nilpotent-jordan: `lambda + a N + b N^2` for the regular nilpotent `N`,
///   or the square-zero variant spanned by `E12`, `E13`
pub fn commuting_pair(
    family: CommutingFamily,
    rng: &mut impl Rng,
) -> (Matrix<Rational>, Matrix<Rational>) {
    let (x, y) = match family {
        CommutingFamily::SimultaneousDiagonal => {
            let mut pairs: Vec<(Rational, Rational)> = (0..3)
                .map(|_| (random_rational(rng), random_rational(rng)))
                .collect();
            match rng.gen_range(0..8) {
                0 => {
                    let p = pairs[0].clone();
                    pairs = vec![p; 3];
                }
                1 | 2 => {
                    pairs[2] = pairs[1].clone();
                    pairs.shuffle(rng);
                }
                _ => {}
            }
            let xs: Vec<Rational> = pairs.iter().map(|p| p.0.clone()).collect();
            let ys: Vec<Rational> = pairs.iter().map(|p| p.1.clone()).collect();
            (Matrix::diag(&xs), Matrix::diag(&ys))
        }
        CommutingFamily::PolynomialInX => {
            let x = Matrix::from_fn(3, |_, _| small_int(rng, 5));
            let c: Vec<Rational> = (0..3).map(|_| random_rational(rng)).collect();
            let y =
                &(&Matrix::identity(3).scale(&c[0]) + &x.scale(&c[1])) + &(&x * &x).scale(&c[2]);
            (x, y)
        }
        CommutingFamily::NilpotentJordan => {
            let (e1, e2) = if rng.gen_bool(0.5) {
                let n = Matrix::from_fn(3, |i, j| if j == i + 1 { int(1) } else { int(0) });
                let n2 = &n * &n;
                (n, n2)
            } else {
                let e12 = Matrix::from_fn(3, |i, j| if (i, j) == (0, 1) { int(1) } else { int(0) });
                let e13 = Matrix::from_fn(3, |i, j| if (i, j) == (0, 2) { int(1) } else { int(0) });
                (e12, e13)
            };
            let mut combo = || {
                let s = random_rational(rng);
                let a = random_rational(rng);
                let b = random_rational(rng);
                &(&Matrix::identity(3).scale(&s) + &e1.scale(&a)) + &e2.scale(&b)
            };
            let x = combo();
            let y = combo();
            (x, y)
        }
    };
    conjugate_pair(&x, &y, rng)
}

/// [`commuting_pair`] driven by a seed instead of a generator.
pub fn commuting_pair_seeded(
    family: CommutingFamily,
    seed: u64,
) -> (Matrix<Rational>, Matrix<Rational>) {
    commuting_pair(family, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A 3x3 pair with `rank([X,Y] + I) = k` for `k` in `{2, 3}`.
///
/// A hollow `Z` with `rank(I + Z) = k` is prescribed and realized as the
/// commutator of `X = diag(x)` with `Y_ij = Z_ij / (x_i - x_j)`.
pub fn rank_k_pair(k: usize, rng: &mut impl Rng) -> Result<(Matrix<Rational>, Matrix<Rational>)> {
    let tol = TolerancePolicy::default();
    let z = match k {
        2 => loop {
            // I + Z = P Q with unit diagonal: row p_i of P and column q_i of Q
            // satisfy p_i . q_i = 1.
            let p: Vec<[Rational; 2]> = (0..3)
                .map(|_| [small_int(rng, 4), small_int(rng, 4)])
                .collect();
            if p.iter().any(|pi| pi[1].is_zero()) {
                continue;
            }
            let q: Vec<[Rational; 2]> = p
                .iter()
                .map(|pi| {
                    let s = small_int(rng, 4);
                    let t = (int(1) - &pi[0] * &s) / &pi[1];
                    [s, t]
                })
                .collect();
            let m = Matrix::from_fn(3, |i, j| &p[i][0] * &q[j][0] + &p[i][1] * &q[j][1]);
            if rank(&m, &tol) == 2 {
                break &m - &Matrix::identity(3);
            }
        },
        3 => loop {
            let z = Matrix::from_fn(3, |i, j| if i == j { int(0) } else { small_int(rng, 5) });
            if rank(&(&z + &Matrix::identity(3)), &tol) == 3 {
                break z;
            }
        },
        other => {
            return Err(Error::Construction(format!(
                "rank target must be 2 or 3, got {other}"
            )))
        }
    };
    let xs = distinct_rationals(3, rng);
    let y = Matrix::from_fn(3, |i, j| {
        if i == j {
            random_rational(rng)
        } else {
            z.get(i, j) / (&xs[i] - &xs[j])
        }
    });
    let x = Matrix::diag(&xs);
    let shifted = &commutator(&x, &y)? + &Matrix::identity(3);
    if rank(&shifted, &tol) != k {
        return Err(Error::Construction(format!("rank([X,Y] + I) != {k}")));
    }
    if k == 3 {
        let (v, w) = vw(&x, &y)?;
        if (int(1) + v + w).is_zero() {
            return Err(Error::Construction("rank-3 pair hit 1 + v + w = 0".into()));
        }
    }
    Ok(conjugate_pair(&x, &y, rng))
}

/// Pair of `n x n` matrices with integer entries uniform in `[-10, 10]`.
pub fn generic_pair(n: usize, rng: &mut impl Rng) -> (Matrix<Rational>, Matrix<Rational>) {
    let x = Matrix::from_fn(n, |_, _| small_int(rng, 10));
    let y = Matrix::from_fn(n, |_, _| small_int(rng, 10));
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::invariant_tuple;
    use crate::relations::{classify_stratum, eval_id1z, eval_id2z, Stratum};

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    #[test]
    fn standard_cm_point() {
        let pt = cm_point(&[q(0, 1), q(1, 1), q(2, 1)], &[q(0, 1), q(0, 1), q(0, 1)]).unwrap();
        let j = &commutator(&pt.x, &pt.y).unwrap() + &Matrix::identity(3);
        assert_eq!(j, Matrix::from_fn(3, |_, _| q(1, 1)));
        let t = invariant_tuple(&pt.x, &pt.y).unwrap();
        assert_eq!(t.a[4], q(-9, 2));
        assert!(matches!(
            cm_point(&[q(1, 1), q(1, 1)], &[q(0, 1), q(0, 1)]),
            Err(Error::RepeatedAbscissa(0, 1))
        ));
    }

    #[test]
    fn random_cm_points_satisfy_invariants() {
        for trial in 0..20 {
            for n in 2..=5 {
                let pt = random_cm_point(n, &mut trial_rng(1, trial, n));
                pt.check().unwrap();
                if n == 3 {
                    let t = invariant_tuple(&pt.x, &pt.y).unwrap();
                    assert!(eval_id1z(&t.reduced()).values().iter().all(Zero::is_zero));
                    assert_eq!((t.v, t.w), (q(-3, 1), q(2, 1)));
                }
            }
        }
    }

    #[test]
    fn commuting_families() {
        let x = Matrix::diag(&[q(1, 1), q(2, 1), q(3, 1)]);
        assert!(commutator(&x, &(&x * &x))
            .unwrap()
            .entries()
            .iter()
            .all(Zero::is_zero));
        let jordan = Matrix::from_fn(3, |i, j| if j == i + 1 { q(1, 1) } else { q(0, 1) });
        assert!(commutator(&jordan, &(&jordan * &jordan))
            .unwrap()
            .entries()
            .iter()
            .all(Zero::is_zero));
        for f in CommutingFamily::ALL {
            for seed in 0..20 {
                let (x, y) = commuting_pair_seeded(f, seed);
                assert!(commutator(&x, &y)
                    .unwrap()
                    .entries()
                    .iter()
                    .all(Zero::is_zero));
                let t = invariant_tuple(&x, &y).unwrap();
                assert!(eval_id2z(&t.reduced()).values().iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn rank_pairs() {
        let tol = TolerancePolicy::default();
        for trial in 0..20 {
            let mut rng = trial_rng(5, trial, 3);
            let (x, y) = rank_k_pair(2, &mut rng).unwrap();
            assert_eq!(classify_stratum(&x, &y, &tol).unwrap(), Stratum::Prime);
            let (v, w) = vw(&x, &y).unwrap();
            assert!((int(1) + v + w).is_zero());
            let (x, y) = rank_k_pair(3, &mut rng).unwrap();
            assert_eq!(
                classify_stratum(&x, &y, &tol).unwrap(),
                Stratum::DoublePrime
            );
        }
        assert!(rank_k_pair(1, &mut trial_rng(0, 0, 3)).is_err());
    }

    #[test]
    fn streams_are_deterministic() {
        let a = generic_pair(3, &mut trial_rng(9, 4, 3));
        let b = generic_pair(3, &mut trial_rng(9, 4, 3));
        let c = generic_pair(3, &mut trial_rng(9, 5, 3));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
