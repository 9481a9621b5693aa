//! Words in the affine Cremona group acting on matrix pairs and on reduced
//! invariant tuples.
//!
//! Matrix level: `PhiPoly(p): (X, Y) -> (X + p(Y), Y)`,
//! `PsiPoly(q): (X, Y) -> (X, Y + q(X))`,
//! `Theta(M): (X, Y) -> (m00 X + m01 Y, m10 X + m11 Y)` with `det M = 1`.
//!
//! Tuple level (for `tr X = tr Y = 0`): constants act trivially, linear
//! terms are `Theta` moves, and quadratic monomials use closed formulas in
//! which the commutator invariant `v` enters as a parameter. Higher degrees
//! are only supported at matrix level.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::invariants::{invariant_tuple, ReducedTuple};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, TolerancePolicy};

#[derive(Clone, Debug, PartialEq)]
pub enum Move<T> {
    /// Coefficients of `p`, lowest degree first.
    PhiPoly(Vec<T>),
    /// Coefficients of `q`, lowest degree first.
    PsiPoly(Vec<T>),
    Theta([[T; 2]; 2]),
}

fn det2<T: Scalar>(m: &[[T; 2]; 2]) -> T {
    m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
}

impl<T: Scalar> Move<T> {
    /// `Theta(m)` after checking `det m = 1` (exactly, or within the
    /// default tolerance for complex entries).
    pub fn theta(m: [[T; 2]; 2]) -> Result<Self> {
        let d = det2(&m) - T::one();
        let scale = m
            .iter()
            .flatten()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
            .powi(2);
        if !d.is_zero_within(&TolerancePolicy::default(), scale) {
            return Err(Error::NotUnimodular);
        }
        Ok(Move::Theta(m))
    }

    /// `X -> X + alpha Y^2`.
    pub fn phi_quad(alpha: T) -> Self {
        Move::PhiPoly(vec![T::zero(), T::zero(), alpha])
    }

    /// `Y -> Y + alpha X^2`.
    pub fn psi_quad(alpha: T) -> Self {
        Move::PsiPoly(vec![T::zero(), T::zero(), alpha])
    }

    pub fn inverse(&self) -> Self {
        match self {
            Move::PhiPoly(p) => Move::PhiPoly(p.iter().map(|c| -c.clone()).collect()),
            Move::PsiPoly(q) => Move::PsiPoly(q.iter().map(|c| -c.clone()).collect()),
            Move::Theta(m) => {
                let d = det2(m);
                Move::Theta([
                    [m[1][1].clone() / d.clone(), -m[0][1].clone() / d.clone()],
                    [-m[1][0].clone() / d.clone(), m[0][0].clone() / d],
                ])
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &[T]| Value::Array(v.iter().map(Scalar::encode).collect());
        match self {
            Move::PhiPoly(p) => json!({ "phi": enc(p) }),
            Move::PsiPoly(q) => json!({ "psi": enc(q) }),
            Move::Theta(m) => json!({ "theta": [enc(&m[0]), enc(&m[1])] }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .filter(|o| o.len() == 1)
            .ok_or_else(|| Error::Json(format!("move must be a one-key object, got {v}")))?;
        let (key, body) = obj.iter().next().expect("one key");
        let coeffs = |b: &Value| -> Result<Vec<T>> {
            b.as_array()
                .ok_or_else(|| Error::Json(format!("{key} needs an array of coefficients")))?
                .iter()
                .map(T::decode)
                .collect()
        };
        match key.as_str() {
            "phi" => Ok(Move::PhiPoly(coeffs(body)?)),
            "psi" => Ok(Move::PsiPoly(coeffs(body)?)),
            "theta" => {
                let rows = body
                    .as_array()
                    .filter(|r| r.len() == 2)
                    .ok_or_else(|| Error::Json("theta needs two rows".into()))?;
                let mut m: Vec<[T; 2]> = Vec::with_capacity(2);
                for row in rows {
                    let r = coeffs(row)?;
                    let [a, b]: [T; 2] = r
                        .try_into()
                        .map_err(|_| Error::Json("theta rows need two entries".into()))?;
                    m.push([a, b]);
                }
                let [r0, r1]: [[T; 2]; 2] = m.try_into().expect("two rows");
                Move::theta([r0, r1])
            }
            other => Err(Error::Json(format!("unknown move {other:?}"))),
        }
    }
}

/// Ordered list of moves; the first move is applied first.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupWord<T>(pub Vec<Move<T>>);

impl<T: Scalar> GroupWord<T> {
    pub fn empty() -> Self {
        GroupWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reverse order, each move inverted.
    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(Move::inverse).collect())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(Move::to_json).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        v.as_array()
            .ok_or_else(|| Error::Json("group word must be an array of moves".into()))?
            .iter()
            .map(Move::from_json)
            .collect::<Result<Vec<_>>>()
            .map(GroupWord)
    }
}

fn poly_at<T: Scalar>(coeffs: &[T], m: &Matrix<T>) -> Matrix<T> {
    let n = m.n();
    coeffs.iter().rev().fold(Matrix::zeros(n), |acc, c| {
        &(&acc * m) + &Matrix::identity(n).scale(c)
    })
}

fn apply_move<T: Scalar>(mv: &Move<T>, x: &Matrix<T>, y: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    match mv {
        Move::PhiPoly(p) => (x + &poly_at(p, y), y.clone()),
        Move::PsiPoly(q) => (x.clone(), y + &poly_at(q, x)),
        Move::Theta(m) => (
            &x.scale(&m[0][0]) + &y.scale(&m[0][1]),
            &x.scale(&m[1][0]) + &y.scale(&m[1][1]),
        ),
    }
}

pub fn act_matrices<T: Scalar>(
    word: &GroupWord<T>,
    x: &Matrix<T>,
    y: &Matrix<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    x.check_same_dim(y)?;
    let mut pair = (x.clone(), y.clone());
    for mv in &word.0 {
        pair = apply_move(mv, &pair.0, &pair.1);
    }
    Ok(pair)
}

/// `(X', Y') = (p0 X + p1 Y, q0 X + q1 Y)` on the quadratic and cubic
/// trace forms: `a3..a5` are the values of the symmetric bilinear form with
/// coefficients `a_{3+k}` and `a6..a9` those of the trilinear form with
/// coefficients `a_{6+k}`, `k` counting second-matrix slots.
fn theta_tuple<T: Scalar>(m: &[[T; 2]; 2], t: &ReducedTuple<T>) -> ReducedTuple<T> {
    let quad = |u: &[T; 2], w: &[T; 2]| {
        let mut acc = T::zero();
        for (i, ui) in u.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                acc = acc + ui.clone() * wj.clone() * t.a(3 + i + j).clone();
            }
        }
        acc
    };
    let cubic = |u: &[T; 2], w: &[T; 2], z: &[T; 2]| {
        let mut acc = T::zero();
        for (i, ui) in u.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                for (k, zk) in z.iter().enumerate() {
                    acc = acc + ui.clone() * wj.clone() * zk.clone() * t.a(6 + i + j + k).clone();
                }
            }
        }
        acc
    };
    let (p, q) = (&m[0], &m[1]);
    ReducedTuple([
        quad(p, p),
        quad(p, q),
        quad(q, q),
        cubic(p, p, p),
        cubic(p, p, q),
        cubic(p, q, q),
        cubic(q, q, q),
    ])
}

/// `Y -> Y + alpha X^2` on a tuple with `tr X = tr Y = 0`.
fn psi_quad_tuple<T: Scalar>(alpha: &T, t: &ReducedTuple<T>, v: &T) -> ReducedTuple<T> {
    let [a3, a4, a5, a6, a7, a8, a9] = t.0.clone();
    let k = |p, q| T::ratio(p, q);
    let al = alpha.clone();
    let al2 = al.clone() * al.clone();
    let al3 = al2.clone() * al.clone();
    let a3sq = a3.clone() * a3.clone();
    ReducedTuple([
        a3.clone(),
        a4.clone() + al.clone() * a6.clone(),
        a5.clone() + k(2, 1) * al.clone() * a7.clone() + al2.clone() * a3sq.clone() * k(1, 6),
        a6.clone(),
        a7.clone() + al.clone() * a3sq.clone() * k(1, 6),
        a8 + al.clone() * a3.clone() * a4.clone() * k(1, 3)
            + al2.clone() * a3.clone() * a6.clone() * k(1, 6),
        a9 + al * (a4.clone() * a4.clone() - a3.clone() * a5 * k(1, 2) + v.clone())
            + al2 * (a4 * a6.clone() - a3.clone() * a7 * k(1, 2))
            + al3 * (a6.clone() * a6 * k(1, 3) - a3sq * a3 * k(1, 36)),
    ])
}

fn poly_tuple<T: Scalar>(
    coeffs: &[T],
    t: &ReducedTuple<T>,
    v: &T,
    on_first: bool,
) -> Result<ReducedTuple<T>> {
    if coeffs.len() > 3 && coeffs[3..].iter().any(|c| !c.is_zero()) {
        return Err(Error::UnsupportedMove(format!(
            "polynomial of degree {} (tuple level supports degree <= 2)",
            coeffs.len() - 1
        )));
    }
    let get = |k: usize| coeffs.get(k).cloned().unwrap_or_else(T::zero);
    let (c1, c2) = (get(1), get(2));
    // Work in the frame where the modified matrix is the second one.
    let mut s = if on_first { t.swapped() } else { t.clone() };
    if !c1.is_zero() {
        s = theta_tuple(&[[T::one(), T::zero()], [c1, T::one()]], &s);
    }
    if !c2.is_zero() {
        s = psi_quad_tuple(&c2, &s, v);
    }
    Ok(if on_first { s.swapped() } else { s })
}

/// Action of one move on a reduced tuple of a pair with `tr X = tr Y = 0`.
pub fn act_tuple<T: Scalar>(mv: &Move<T>, t: &ReducedTuple<T>, v: &T) -> Result<ReducedTuple<T>> {
    match mv {
        Move::Theta(m) => Ok(theta_tuple(m, t)),
        Move::PhiPoly(p) => poly_tuple(p, t, v, true),
        Move::PsiPoly(q) => poly_tuple(q, t, v, false),
    }
}

pub fn act_tuple_word<T: Scalar>(
    word: &GroupWord<T>,
    t: &ReducedTuple<T>,
    v: &T,
) -> Result<ReducedTuple<T>> {
    word.0
        .iter()
        .try_fold(t.clone(), |acc, mv| act_tuple(mv, &acc, v))
}

/// The matrix-level image of a quadratic move leaves `tr X` or `tr Y`
/// nonzero; this is the constant that restores it, so that words replay
/// identically at both levels.
pub fn recentered<T: Scalar>(mv: Move<T>, t: &ReducedTuple<T>) -> Move<T> {
    match mv {
        Move::PhiPoly(mut p) if p.len() == 3 => {
            p[0] = -(p[2].clone() * t.a(5).clone() / T::from_i64(3));
            Move::PhiPoly(p)
        }
        Move::PsiPoly(mut q) if q.len() == 3 => {
            q[0] = -(q[2].clone() * t.a(3).clone() / T::from_i64(3));
            Move::PsiPoly(q)
        }
        other => other,
    }
}

/// Both images of a traceless pair under one move: `(tuple level, matrix level)`.
pub fn action_levels<T: Scalar>(
    mv: &Move<T>,
    a: &Matrix<T>,
    b: &Matrix<T>,
) -> Result<(ReducedTuple<T>, ReducedTuple<T>)> {
    let inv = invariant_tuple(a, b)?;
    let tol = TolerancePolicy::default();
    if !inv.a[0].is_zero_within(&tol, a.max_magnitude())
        || !inv.a[1].is_zero_within(&tol, b.max_magnitude())
    {
        return Err(Error::NonzeroTranslation);
    }
    let tuple_level = act_tuple(mv, &inv.reduced(), &inv.v)?;
    let (x2, y2) = act_matrices(&GroupWord(vec![mv.clone()]), a, b)?;
    let matrix_level = invariant_tuple(&x2, &y2)?.reduced();
    Ok((tuple_level, matrix_level))
}
