//! Trace invariants of a matrix pair.
//!
//! For a pair `(X, Y)` the nine generators are
//! `a1 = tr X`, `a2 = tr Y` and the traces `a3..a9` of
//! `A^2, AB, B^2, A^3, A^2B, AB^2, B^3` for the traceless parts
//! `A = X - tr(X)/n I`, `B = Y - tr(Y)/n I`. The two extra invariants are
//! `v = -tr([A,B]^2)/2` and `w = tr([A,B]^3)/3`.

use crate::error::{Error, Result};
use crate::matrix::{commutator, trace_word, Letter, Matrix};
use crate::scalar::{Scalar, TolerancePolicy};

/// The seven coordinates `(a3, ..., a9)` that survive once `tr X` and
/// `tr Y` have been shifted to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedTuple<T>(pub [T; 7]);

impl<T: Scalar> ReducedTuple<T> {
    pub fn zero() -> Self {
        ReducedTuple(std::array::from_fn(|_| T::zero()))
    }

    pub fn from_slice(values: &[T]) -> Option<Self> {
        let arr: [T; 7] = values.to_vec().try_into().ok()?;
        Some(ReducedTuple(arr))
    }

    /// Coordinate `a_k` for `k` in `3..=9`.
    pub fn a(&self, k: usize) -> &T {
        &self.0[k - 3]
    }

    pub fn set(&mut self, k: usize, value: T) {
        self.0[k - 3] = value;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ReducedTuple<U> {
        ReducedTuple(std::array::from_fn(|i| f(&self.0[i])))
    }

    /// Largest coordinate magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.0.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// `max_i |self_i - other_i|`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// The `X <-> Y` relabelling: `a3<->a5`, `a6<->a9`, `a7<->a8`.
    pub fn swapped(&self) -> Self {
        let a = &self.0;
        ReducedTuple([
            a[2].clone(),
            a[1].clone(),
            a[0].clone(),
            a[6].clone(),
            a[5].clone(),
            a[4].clone(),
            a[3].clone(),
        ])
    }
}

/// Generators `a1..a9` plus `v` and `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTuple<T> {
    pub a: [T; 9],
    pub v: T,
    pub w: T,
}

impl<T: Scalar> InvariantTuple<T> {
    pub fn reduced(&self) -> ReducedTuple<T> {
        ReducedTuple(std::array::from_fn(|i| self.a[i + 2].clone()))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> InvariantTuple<U> {
        InvariantTuple {
            a: std::array::from_fn(|i| f(&self.a[i])),
            v: f(&self.v),
            w: f(&self.w),
        }
    }
}

pub fn traceless_pair<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    x.check_same_dim(y)?;
    Ok((traceless(x), traceless(y)))
}

pub(crate) fn traceless<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.n();
    let shift = m.trace() / T::from_i64(n as i64);
    let mut out = m.clone();
    for i in 0..n {
        let d = out.get(i, i).clone() - shift.clone();
        out.set(i, i, d);
    }
    out
}

fn tw<T: Scalar>(word: &str, a: &Matrix<T>, b: &Matrix<T>) -> T {
    let w = Letter::parse_word(word).expect("static trace word");
    trace_word(&w, (a, b)).expect("pair dimensions checked by caller")
}

pub fn invariant_tuple<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<InvariantTuple<T>> {
    let (a, b) = traceless_pair(x, y)?;
    let (v, w) = vw(x, y)?;
    Ok(InvariantTuple {
        a: [
            x.trace(),
            y.trace(),
            tw("AA", &a, &b),
            tw("AB", &a, &b),
            tw("BB", &a, &b),
            tw("AAA", &a, &b),
            tw("AAB", &a, &b),
            tw("ABB", &a, &b),
            tw("BBB", &a, &b),
        ],
        v,
        w,
    })
}

/// `v = -tr([X,Y]^2)/2`, `w = tr([X,Y]^3)/3`. The commutator of the pair
/// equals that of its traceless parts.
pub fn vw<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<(T, T)> {
    let c = commutator(x, y)?;
    let c2 = &c * &c;
    let v = -(c2.trace() / T::from_i64(2));
    let w = (&c2 * &c).trace() / T::from_i64(3);
    Ok((v, w))
}

/// Auxiliary traces of a traceless pair, each evaluated directly as a trace
/// word.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxTraces<T> {
    pub a3b: T,
    pub ab3: T,
    pub a3b2: T,
    pub a2b3: T,
    pub a3b3: T,
    pub a2b2: T,
    pub abab: T,
    pub a4b2: T,
    pub a3bab: T,
    pub a2ba2b: T,
    pub a2b2ab: T,
    pub a2bab2: T,
    pub ababab: T,
}

impl<T: Scalar> AuxTraces<T> {
    /// `(name, word, value)` triples, for reporting.
    pub fn named(&self) -> Vec<(&'static str, &'static str, &T)> {
        vec![
            ("tr(A^3B)", AUX_WORDS[0], &self.a3b),
            ("tr(AB^3)", AUX_WORDS[1], &self.ab3),
            ("tr(A^3B^2)", AUX_WORDS[2], &self.a3b2),
            ("tr(A^2B^3)", AUX_WORDS[3], &self.a2b3),
            ("tr(A^3B^3)", AUX_WORDS[4], &self.a3b3),
            ("tr(A^2B^2)", AUX_WORDS[5], &self.a2b2),
            ("tr(ABAB)", AUX_WORDS[6], &self.abab),
            ("tr(A^4B^2)", AUX_WORDS[7], &self.a4b2),
            ("tr(A^3BAB)", AUX_WORDS[8], &self.a3bab),
            ("tr((A^2B)^2)", AUX_WORDS[9], &self.a2ba2b),
            ("tr(A^2B^2AB)", AUX_WORDS[10], &self.a2b2ab),
            ("tr(A^2BAB^2)", AUX_WORDS[11], &self.a2bab2),
            ("tr((AB)^3)", AUX_WORDS[12], &self.ababab),
        ]
    }
}

const AUX_WORDS: [&str; 13] = [
    "AAAB", "ABBB", "AAABB", "AABBB", "AAABBB", "AABB", "ABAB", "AAAABB", "AAABAB", "AABAAB",
    "AABBAB", "AABABB", "ABABAB",
];

pub fn aux_traces<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<AuxTraces<T>> {
    a.check_same_dim(b)?;
    let tol = TolerancePolicy::default();
    for m in [a, b] {
        if !m.trace().is_zero_within(&tol, m.max_magnitude()) {
            return Err(Error::NotTraceless);
        }
    }
    let t: Vec<T> = AUX_WORDS.iter().map(|w| tw(w, a, b)).collect();
    let mut it = t.into_iter();
    let mut next = || it.next().expect("13 aux words");
    Ok(AuxTraces {
        a3b: next(),
        ab3: next(),
        a3b2: next(),
        a2b3: next(),
        a3b3: next(),
        a2b2: next(),
        abab: next(),
        a4b2: next(),
        a3bab: next(),
        a2ba2b: next(),
        a2b2ab: next(),
        a2bab2: next(),
        ababab: next(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::One;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn calogero_pair() -> (Matrix<Rational>, Matrix<Rational>) {
        let x = Matrix::diag(&[q(0, 1), q(1, 1), q(2, 1)]);
        let y = Matrix::from_fn(3, |i, j| {
            if i == j {
                q(0, 1)
            } else {
                Rational::one() / (q(i as i64, 1) - q(j as i64, 1))
            }
        });
        (x, y)
    }

    #[test]
    fn traceless_examples() {
        let x = Matrix::diag(&[q(0, 1), q(1, 1), q(2, 1)]);
        let (a, _) = traceless_pair(&x, &x).unwrap();
        assert_eq!(a, Matrix::diag(&[q(-1, 1), q(0, 1), q(1, 1)]));
        let (a2, _) = traceless_pair(&a, &a).unwrap();
        assert_eq!(a2, a);
    }

    #[test]
    fn calogero_point_tuple() {
        let (x, y) = calogero_pair();
        let t = invariant_tuple(&x, &y).unwrap();
        let expect = [
            q(3, 1),
            q(0, 1),
            q(2, 1),
            q(0, 1),
            q(-9, 2),
            q(0, 1),
            q(0, 1),
            q(0, 1),
            q(0, 1),
        ];
        assert_eq!(t.a, expect);
        assert_eq!(t.v, q(-3, 1));
        assert_eq!(t.w, q(2, 1));
    }

    #[test]
    fn zero_pair_and_commuting_diagonal() {
        let z = Matrix::<Rational>::zeros(3);
        let t = invariant_tuple(&z, &z).unwrap();
        assert!(t.a.iter().all(|x| *x == q(0, 1)));
        let a = Matrix::diag(&[q(-1, 1), q(0, 1), q(1, 1)]);
        let b = Matrix::diag(&[q(1, 3), q(-2, 3), q(1, 3)]);
        let t = invariant_tuple(&a, &b).unwrap();
        let expect = [
            q(0, 1),
            q(0, 1),
            q(2, 1),
            q(0, 1),
            q(2, 3),
            q(0, 1),
            q(2, 3),
            q(0, 1),
            q(-2, 9),
        ];
        assert_eq!(t.a, expect);
        assert_eq!((t.v, t.w), (q(0, 1), q(0, 1)));
    }

    #[test]
    fn vw_of_all_ones_minus_identity() {
        // [diag(0,1,2), Calogero Y] = J - I.
        let (x, y) = calogero_pair();
        assert_eq!(vw(&x, &y).unwrap(), (q(-3, 1), q(2, 1)));
        assert_eq!(vw(&x, &x).unwrap(), (q(0, 1), q(0, 1)));
    }

    #[test]
    fn aux_traces_checks_traceless() {
        let x = Matrix::diag(&[q(0, 1), q(1, 1), q(2, 1)]);
        assert!(matches!(aux_traces(&x, &x), Err(Error::NotTraceless)));
        let (a, b) = traceless_pair(&x, &calogero_pair().1).unwrap();
        let aux = aux_traces(&a, &b).unwrap();
        let ab = tw("AB", &a, &b);
        assert_eq!(aux.abab.clone() - aux.a2b2.clone(), q(3, 1));
        // Same-matrix words collapse to powers.
        let same = aux_traces(&a, &a).unwrap();
        assert_eq!(same.a3b, tw("AAAA", &a, &a));
        assert_eq!(ab, q(0, 1));
    }

    #[test]
    fn swapped_is_involution() {
        let t = ReducedTuple([3, 4, 5, 6, 7, 8, 9].map(|k| q(k, 1)));
        assert_eq!(t.swapped().0, [5, 4, 3, 9, 8, 7, 6].map(|k| q(k, 1)));
        assert_eq!(t.swapped().swapped(), t);
    }
}
