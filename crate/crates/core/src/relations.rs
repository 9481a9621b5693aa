//! Relation polynomials on invariant tuples and the rank stratification of
//! pairs of 3x3 matrices.
//!
//! Every residual is "left-hand side minus right-hand side" with the
//! relations kept in a fixed order; the ids (`id1z.1`, `r.3`, `rel.old`, ...)
//! match the identity manifest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{invariant_tuple, vw, ReducedTuple};
use crate::matrix::{commutator, rank_outcome, Matrix};
use crate::scalar::{Rational, Scalar, TolerancePolicy};

#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    pub id: String,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualVector<T> {
    pub entries: Vec<Residual<T>>,
}

impl<T: Scalar> ResidualVector<T> {
    fn from_values(prefix: &str, values: Vec<T>) -> Self {
        ResidualVector {
            entries: values
                .into_iter()
                .enumerate()
                .map(|(i, value)| Residual {
                    id: format!("{prefix}.{}", i + 1),
                    value,
                })
                .collect(),
        }
    }

    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|r| r.value.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&T> {
        self.entries.iter().find(|r| r.id == id).map(|r| &r.value)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.entries
            .iter()
            .map(|r| r.value.magnitude())
            .fold(0.0, f64::max)
    }

    /// True iff every residual is zero (exactly, or within `tol` at `scale`).
    pub fn satisfied(&self, tol: &TolerancePolicy, scale: f64) -> bool {
        self.entries
            .iter()
            .all(|r| r.value.is_zero_within(tol, scale))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stratum {
    /// `rank([X,Y] + I) = 1`
    Cm,
    /// `rank([X,Y] + I) = 2`
    Prime,
    /// `rank([X,Y] + I) = 3`, non-commuting
    DoublePrime,
    /// `[X,Y] = 0`
    Commuting,
}

/// `c * x_1 * ... * x_k`
fn mono<T: Scalar>(c: i64, xs: &[&T]) -> T {
    xs.iter().fold(T::from_i64(c), |acc, x| acc * (*x).clone())
}

fn frac<T: Scalar>(p: i64, q: i64) -> T {
    T::ratio(p, q)
}

fn det2<T: Scalar>(a: &T, b: &T, c: &T, d: &T) -> T {
    a.clone() * d.clone() - b.clone() * c.clone()
}

struct Coords<T>([T; 7]);

impl<T: Scalar> Coords<T> {
    fn of(t: &ReducedTuple<T>) -> Self {
        Coords(t.0.clone())
    }
}

/// The five relations cutting out the Calogero-Moser image:
/// the two bilinear ones first, then the three with constant `9`.
pub fn eval_id1z<T: Scalar>(t: &ReducedTuple<T>) -> ResidualVector<T> {
    let Coords([a3, a4, a5, a6, a7, a8, a9]) = Coords::of(t);
    let values = vec![
        mono(1, &[&a3, &a9]) - mono(2, &[&a4, &a8]) + mono(1, &[&a5, &a7]),
        mono(1, &[&a5, &a6]) - mono(2, &[&a4, &a7]) + mono(1, &[&a3, &a8]),
        mono(9, &[&a3]) - mono(1, &[&a3, &a4, &a4])
            + mono(1, &[&a3, &a3, &a5])
            + mono(6, &[&a6, &a8])
            - mono(6, &[&a7, &a7]),
        mono(9, &[&a4]) - mono(1, &[&a4, &a4, &a4])
            + mono(1, &[&a3, &a4, &a5])
            + mono(3, &[&a6, &a9])
            - mono(3, &[&a7, &a8]),
        mono(9, &[&a5]) - mono(1, &[&a4, &a4, &a5])
            + mono(1, &[&a3, &a5, &a5])
            + mono(6, &[&a7, &a9])
            - mono(6, &[&a8, &a8]),
    ];
    ResidualVector::from_values("id1z", values)
}

/// The homogeneous system of the commuting variety.
pub fn eval_id2z<T: Scalar>(t: &ReducedTuple<T>) -> ResidualVector<T> {
    let Coords([a3, a4, a5, a6, a7, a8, a9]) = Coords::of(t);
    let values = vec![
        mono(1, &[&a3, &a9]) - mono(2, &[&a4, &a8]) + mono(1, &[&a5, &a7]),
        mono(1, &[&a5, &a6]) - mono(2, &[&a4, &a7]) + mono(1, &[&a3, &a8]),
        mono(1, &[&a3, &a3, &a5]) - mono(1, &[&a3, &a4, &a4]) + mono(6, &[&a6, &a8])
            - mono(6, &[&a7, &a7]),
        mono(1, &[&a3, &a4, &a5]) - mono(1, &[&a4, &a4, &a4]) + mono(3, &[&a6, &a9])
            - mono(3, &[&a7, &a8]),
        mono(1, &[&a3, &a5, &a5]) - mono(1, &[&a4, &a4, &a5]) + mono(6, &[&a7, &a9])
            - mono(6, &[&a8, &a8]),
    ];
    ResidualVector::from_values("id2z", values)
}

/// `r1..r5` with the parameter `v`. At `v = -3` these are the `id1z`
/// polynomials; at `v = 0` the `id2z` ones.
pub fn eval_r<T: Scalar>(t: &ReducedTuple<T>, v: &T) -> [T; 5] {
    let Coords([a3, a4, a5, a6, a7, a8, a9]) = Coords::of(t);
    let u = det2(&a3, &a4, &a4, &a5) - mono(3, &[v]);
    [
        det2(&a3, &a4, &a8, &a9) - det2(&a4, &a5, &a7, &a8),
        det2(&a3, &a4, &a7, &a8) - det2(&a4, &a5, &a6, &a7),
        a3 * u.clone() + mono(6, &[&det2(&a6, &a7, &a7, &a8)]),
        a4 * u.clone() + mono(3, &[&det2(&a6, &a7, &a8, &a9)]),
        a5 * u + mono(6, &[&det2(&a7, &a8, &a8, &a9)]),
    ]
}

pub fn r_residuals<T: Scalar>(t: &ReducedTuple<T>, v: &T) -> ResidualVector<T> {
    ResidualVector::from_values("r", eval_r(t, v).to_vec())
}

/// `w^2 + 4v^3/27 - (r3 r5 - r4^2)/27 - (a3 r1^2 - 2 a4 r1 r2 + a5 r2^2)/18`
pub fn eval_new_relation<T: Scalar>(t: &ReducedTuple<T>, v: &T, w: &T) -> T {
    let [r1, r2, r3, r4, r5] = eval_r(t, v);
    let (a3, a4, a5) = (t.a(3), t.a(4), t.a(5));
    mono(1, &[w, w]) + frac::<T>(4, 27) * mono(1, &[v, v, v])
        - frac::<T>(1, 27) * (mono(1, &[&r3, &r5]) - mono(1, &[&r4, &r4]))
        - frac::<T>(1, 18)
            * (mono(1, &[a3, &r1, &r1]) - mono(2, &[a4, &r1, &r2]) + mono(1, &[a5, &r2, &r2]))
}

/// The older defining relation of the invariant ring, written through
/// `u = a3 a5 - a4^2`, the 3x3 determinant `D` of rows `(a3 a4 a5)`,
/// `(a6 a7 a8)`, `(a7 a8 a9)`, the cubic discriminant `w6` and the
/// degree-six form `w3''`.
pub fn eval_old_relation<T: Scalar>(t: &ReducedTuple<T>, v: &T, w: &T) -> T {
    let Coords([a3, a4, a5, a6, a7, a8, a9]) = Coords::of(t);
    let u = det2(&a3, &a4, &a4, &a5);
    let d = a3.clone() * det2(&a7, &a8, &a8, &a9) - a4.clone() * det2(&a6, &a8, &a7, &a9)
        + a5.clone() * det2(&a6, &a7, &a7, &a8);
    let w1 = mono(1, &[&u, &u, &u]);
    let w2 = mono(1, &[&u, &u, v]);
    let w4 = mono(1, &[&u, v, v]);
    let w7 = mono(1, &[v, v, v]);
    let w5 = mono(1, &[v, &d]);
    let w3p = mono(1, &[&u, &d]);
    let disc = det2(&a6, &a8, &a7, &a9);
    let w6 =
        mono(1, &[&disc, &disc]) - mono(4, &[&det2(&a7, &a8, &a8, &a9), &det2(&a6, &a7, &a7, &a8)]);
    let w3pp = mono(5, &[&a5, &a5, &a5, &a6, &a6]) + mono(5, &[&a3, &a3, &a3, &a9, &a9])
        - mono(30, &[&a5, &a5, &a4, &a6, &a7])
        - mono(30, &[&a3, &a3, &a4, &a8, &a9])
        - mono::<T>(
            2,
            &[&(mono(2, &[&a4, &a4, &a4]) + mono(3, &[&a3, &a4, &a5]))],
        ) * (mono(9, &[&a7, &a8]) + mono(1, &[&a6, &a9]))
        + mono::<T>(
            3,
            &[&(mono(4, &[&a5, &a4, &a4]) + mono(1, &[&a5, &a5, &a3]))],
        ) * (mono(3, &[&a7, &a7]) + mono(2, &[&a8, &a6]))
        + mono::<T>(
            3,
            &[&(mono(4, &[&a4, &a4, &a3]) + mono(1, &[&a3, &a3, &a5]))],
        ) * (mono(3, &[&a8, &a8]) + mono(2, &[&a7, &a9]));
    mono(1, &[w, w]) - frac::<T>(1, 27) * w1 + frac::<T>(2, 9) * w2
        - frac::<T>(4, 15) * w3p
        - frac::<T>(1, 90) * w3pp
        - frac::<T>(1, 3) * w4
        + frac::<T>(2, 3) * w5
        + frac::<T>(1, 3) * w6
        + frac::<T>(4, 27) * w7
}

/// Every relation residual the registry knows about, for one realized tuple.
pub fn all_residuals<T: Scalar>(t: &ReducedTuple<T>, v: &T, w: &T) -> ResidualVector<T> {
    let mut out = eval_id1z(t);
    out.entries.extend(eval_id2z(t).entries);
    out.entries.extend(r_residuals(t, v).entries);
    out.entries.push(Residual {
        id: "rel.old".into(),
        value: eval_old_relation(t, v, w),
    });
    out.entries.push(Residual {
        id: "rel.new".into(),
        value: eval_new_relation(t, v, w),
    });
    out
}

/// Checks, on `trials` random integer pairs, that both forms of the defining
/// relation vanish and coincide. Returns the first disagreement as an error.
pub fn validate_old_relation(trials: usize, seed: u64) -> Result<()> {
    use crate::sampler::{generic_pair, trial_rng};
    for i in 0..trials {
        let mut rng = trial_rng(seed, i as u64, 3);
        let (x, y) = generic_pair(3, &mut rng);
        let inv = invariant_tuple(&x, &y)?;
        let t = inv.reduced();
        let old = eval_old_relation(&t, &inv.v, &inv.w);
        let new = eval_new_relation(&t, &inv.v, &inv.w);
        if old != new || !new.eq(&Rational::from_i64(0)) {
            return Err(Error::RelationMismatch(format!(
                "old={old}, new={new} on trial {i}"
            )));
        }
    }
    Ok(())
}

fn require_three<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<()> {
    x.check_same_dim(y)?;
    if x.n() != 3 {
        return Err(Error::DimensionMismatch {
            left: x.n(),
            right: 3,
        });
    }
    Ok(())
}

/// Stratum of a pair of 3x3 matrices by `rank([X,Y] + I)`. A complex rank
/// whose pivots sit inside the tolerance guard band is reported as
/// [`Error::Ambiguous`].
pub fn classify_stratum<T: Scalar>(
    x: &Matrix<T>,
    y: &Matrix<T>,
    tol: &TolerancePolicy,
) -> Result<Stratum> {
    require_three(x, y)?;
    let c = commutator(x, y)?;
    let scale = x.max_magnitude() * y.max_magnitude();
    if c.is_zero_within(tol, scale) {
        return Ok(Stratum::Commuting);
    }
    let shifted = &c + &Matrix::identity(3);
    let outcome = rank_outcome(&shifted, tol);
    if outcome.ambiguous {
        return Err(Error::Ambiguous {
            context: "rank([X,Y] + I)".into(),
            magnitude: f64::NAN,
            lower: tol.bound(shifted.max_magnitude()),
            upper: 10.0 * tol.bound(shifted.max_magnitude()),
        });
    }
    match outcome.rank {
        1 => Ok(Stratum::Cm),
        2 => Ok(Stratum::Prime),
        3 => Ok(Stratum::DoublePrime),
        r => Err(Error::Construction(format!(
            "rank([X,Y] + I) = {r} is impossible"
        ))),
    }
}

/// `w^2 + 4 v^3 / 27 = 0`.
pub fn on_cuspidal_curve<T: Scalar>(v: &T, w: &T, tol: &TolerancePolicy) -> bool {
    let r = mono(1, &[w, w]) + frac::<T>(4, 27) * mono(1, &[v, v, v]);
    let scale = w.magnitude().powi(2) + v.magnitude().powi(3);
    r.is_zero_within(tol, scale)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CPrimeCheck<T> {
    pub rank_is_two: bool,
    /// `1 + v + w`
    pub residual: T,
}

/// Both sides of the rank-two criterion: whether `rank([X,Y] + I) = 2`,
/// and the value of `1 + v + w`.
pub fn check_cprime_criterion<T: Scalar>(
    x: &Matrix<T>,
    y: &Matrix<T>,
    tol: &TolerancePolicy,
) -> Result<CPrimeCheck<T>> {
    require_three(x, y)?;
    let (v, w) = vw(x, y)?;
    let c = commutator(x, y)?;
    let rank_is_two = rank_outcome(&(&c + &Matrix::identity(3)), tol).rank == 2;
    Ok(CPrimeCheck {
        rank_is_two,
        residual: T::one() + v + w,
    })
}

/// Weights of `(X, Y) -> (alpha X, Y)`: the powers of `alpha` picked up by
/// `a1..a9`, `(v, w)` and `r1..r5`.
pub const SCALING_A_WEIGHTS: [u32; 9] = [1, 0, 2, 1, 0, 3, 2, 1, 0];
pub const SCALING_VW_WEIGHTS: [u32; 2] = [2, 3];
pub const SCALING_R_WEIGHTS: [u32; 5] = [2, 3, 4, 3, 2];

/// Whether the realized tuple, `(v, w)` and `r1..r5` of `(alpha X, Y)` are
/// those of `(X, Y)` multiplied by the scaling weights.
pub fn check_scaling<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, alpha: &T) -> Result<bool> {
    require_three(x, y)?;
    let tol = TolerancePolicy::default();
    let pow = |k: u32| (0..k).fold(T::one(), |acc, _| acc * alpha.clone());
    let close = |got: &T, want: T| {
        let scale = got.magnitude().max(want.magnitude());
        (got.clone() - want).is_zero_within(&tol, scale)
    };
    let before = invariant_tuple(x, y)?;
    let after = invariant_tuple(&x.scale(alpha), y)?;
    let mut ok = before
        .a
        .iter()
        .zip(&after.a)
        .zip(SCALING_A_WEIGHTS)
        .all(|((b, a), k)| close(a, b.clone() * pow(k)));
    ok &= close(&after.v, before.v.clone() * pow(SCALING_VW_WEIGHTS[0]));
    ok &= close(&after.w, before.w.clone() * pow(SCALING_VW_WEIGHTS[1]));
    let r_before = eval_r(&before.reduced(), &before.v);
    let r_after = eval_r(&after.reduced(), &after.v);
    ok &= r_before
        .iter()
        .zip(&r_after)
        .zip(SCALING_R_WEIGHTS)
        .all(|((b, a), k)| close(a, b.clone() * pow(k)));
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn rt(v: [(i64, i64); 7]) -> ReducedTuple<Rational> {
        ReducedTuple(v.map(|(p, d)| q(p, d)))
    }

    #[test]
    fn id1z_examples() {
        assert!(eval_id1z(&ReducedTuple::<Rational>::zero())
            .values()
            .iter()
            .all(Zero::is_zero));
        let cm = rt([(2, 1), (0, 1), (-9, 2), (0, 1), (0, 1), (0, 1), (0, 1)]);
        assert!(eval_id1z(&cm).values().iter().all(Zero::is_zero));
        let e = rt([(1, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(eval_id1z(&e).get("id1z.3"), Some(&q(9, 1)));
    }

    #[test]
    fn id2z_examples() {
        let diag = rt([(2, 1), (0, 1), (2, 3), (0, 1), (2, 3), (0, 1), (-2, 9)]);
        assert!(eval_id2z(&diag).values().iter().all(Zero::is_zero));
        let cbrt6 = 6f64.cbrt();
        let special = ReducedTuple(
            [0.0, 0.0, cbrt6, 0.0, 0.0, 0.0, 1.0].map(|x| crate::scalar::Complex::new(x, 0.0)),
        );
        assert!(eval_id2z(&special).satisfied(&TolerancePolicy::default(), 10.0));
    }

    #[test]
    fn r_specializes_to_both_systems() {
        let t = rt([(3, 2), (-1, 1), (5, 7), (2, 1), (-4, 3), (1, 5), (7, 1)]);
        assert_eq!(eval_r(&t, &q(-3, 1)).to_vec(), eval_id1z(&t).values());
        assert_eq!(eval_r(&t, &q(0, 1)).to_vec(), eval_id2z(&t).values());
        assert!(eval_r(&ReducedTuple::zero(), &q(11, 3))
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn relation_examples() {
        let cm = rt([(2, 1), (0, 1), (-9, 2), (0, 1), (0, 1), (0, 1), (0, 1)]);
        assert!(eval_new_relation(&cm, &q(-3, 1), &q(2, 1)).is_zero());
        assert!(eval_old_relation(&cm, &q(-3, 1), &q(2, 1)).is_zero());
        let z = ReducedTuple::<Rational>::zero();
        assert!(eval_new_relation(&z, &q(0, 1), &q(0, 1)).is_zero());
        assert!(eval_old_relation(&z, &q(0, 1), &q(0, 1)).is_zero());
        validate_old_relation(50, 3).unwrap();
    }

    #[test]
    fn cusp_examples() {
        let tol = TolerancePolicy::default();
        assert!(on_cuspidal_curve(&q(-3, 1), &q(2, 1), &tol));
        assert!(on_cuspidal_curve(&q(-3, 1), &q(-2, 1), &tol));
        assert!(on_cuspidal_curve(&q(0, 1), &q(0, 1), &tol));
        assert!(!on_cuspidal_curve(&q(1, 1), &q(1, 1), &tol));
    }

    #[test]
    fn stratum_examples() {
        let tol = TolerancePolicy::default();
        let x = Matrix::diag(&[q(0, 1), q(1, 1), q(2, 1)]);
        let y = Matrix::from_fn(3, |i, j| {
            if i == j {
                q(0, 1)
            } else {
                q(1, 1) / q(i as i64 - j as i64, 1)
            }
        });
        assert_eq!(classify_stratum(&x, &y, &tol).unwrap(), Stratum::Cm);
        assert_eq!(
            classify_stratum(&x, &x.pow(2), &tol).unwrap(),
            Stratum::Commuting
        );
        let c = check_cprime_criterion(&x, &y, &tol).unwrap();
        assert!(!c.rank_is_two);
        assert!(c.residual.is_zero());
        let c = check_cprime_criterion(&x, &x, &tol).unwrap();
        assert_eq!(c.residual, q(1, 1));
        let two = Matrix::<Rational>::identity(2);
        assert!(classify_stratum(&two, &two, &tol).is_err());
    }
}
